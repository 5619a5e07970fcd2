use std::path::Path;

use crate::error::{Error, Result};

/// A CSV file read back by column name.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers()?.iter().map(str::to_string).collect::<Vec<_>>();
        let records = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()?;
        if headers.is_empty() || records.is_empty() {
            return Err(Error::Table("table has no data rows".into()));
        }
        Ok(CsvTable { headers, records })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Table(format!("missing column '{name}'")))
    }

    pub fn text(&self, name: &str) -> Result<Vec<&str>> {
        let i = self.index(name)?;
        Ok(self.records.iter().map(|r| r[i].as_str()).collect())
    }

    /// Numeric column; empty cells become `None`.
    pub fn numbers(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let i = self.index(name)?;
        self.records
            .iter()
            .enumerate()
            .map(|(row, r)| match r[i].trim() {
                "" => Ok(None),
                cell => cell.parse().map(Some).map_err(|_| {
                    Error::Table(format!("row {}: column '{name}' holds {cell:?}", row + 1))
                }),
            })
            .collect()
    }

    /// Row indices grouped by the `scenario` column, in first-seen order.
    pub fn groups(&self) -> Result<Vec<(String, Vec<usize>)>> {
        let mut out: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, s) in self.text("scenario")?.into_iter().enumerate() {
            match out.iter_mut().find(|(k, _)| k == s) {
                Some((_, rows)) => rows.push(i),
                None => out.push((s.to_string(), vec![i])),
            }
        }
        Ok(out)
    }
}
