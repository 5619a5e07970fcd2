use std::fmt;

use super::table::CsvTable;
use crate::analytics::{fit_power_exponent, FLOODING_EXPONENT};
use crate::error::{Error, Result};

/// Minimum distinct axis values for a fit.
const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct FitEntry {
    pub scenario: String,
    pub quantity: &'static str,
    pub value: f64,
    pub stderr: Option<f64>,
    pub target: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitReport {
    pub entries: Vec<FitEntry>,
}

impl FitReport {
    pub fn find(&self, scenario: &str, quantity: &str) -> Option<&FitEntry> {
        self.entries
            .iter()
            .find(|e| e.scenario == scenario && e.quantity == quantity)
    }
}

impl fmt::Display for FitEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<14} {:<30} {:>10.5}", self.scenario, self.quantity, self.value)?;
        if let Some(se) = self.stderr {
            write!(f, " ± {se:.5}")?;
        }
        if let Some(t) = self.target {
            write!(f, "  target {t} (deviation {:+.5})", self.value - t)?;
        }
        write!(f, "  [{} points]", self.samples)
    }
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

fn distinct(xs: &[f64]) -> usize {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

fn coefficient_of_variation(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt() / m
}

/// Scaling summary of a sweep table, per scenario:
/// - along `n`: log-log slope of throughput (grid) or the coefficient of
///   variation of `gamma * ln n` (random cells), for analytic and simulated
///   columns;
/// - along `rho`: the decay exponent `a` in `h_bar ~ rho^-a` of the exact
///   hop count, compared with 1 (path-wise) or the ring-search exponent.
pub fn fit_report(table: &CsvTable) -> Result<FitReport> {
    let n_col = table.numbers("n")?;
    let rho_col = table.numbers("rho")?;
    let mut report = FitReport::default();
    for (scenario, rows) in table.groups()? {
        let grid = scenario.starts_with("grid");
        let ns: Vec<f64> = rows.iter().map(|&i| n_col[i].unwrap_or(f64::NAN)).collect();
        let rhos: Vec<f64> = rows.iter().map(|&i| rho_col[i].unwrap_or(f64::NAN)).collect();

        if distinct(&ns) >= MIN_POINTS {
            for (column, slope_name, cv_name) in [
                ("gamma_analytic", "slope gamma_analytic vs n", "cv gamma_analytic*ln(n)"),
                ("gamma_sim", "slope gamma_sim vs n", "cv gamma_sim*ln(n)"),
            ] {
                let ys = table.numbers(column)?;
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .zip(&ns)
                    .filter_map(|(&i, &n)| ys[i].map(|y| (n, y)))
                    .collect();
                if pts.len() < MIN_POINTS {
                    continue;
                }
                let entry = if grid {
                    let fit = fit_power_exponent(&pts)?;
                    FitEntry {
                        scenario: scenario.clone(),
                        quantity: slope_name,
                        value: fit.exponent,
                        stderr: Some(fit.stderr),
                        target: Some(-0.5),
                        samples: fit.samples,
                    }
                } else {
                    let scaled: Vec<f64> = pts.iter().map(|&(n, y)| y * n.ln()).collect();
                    FitEntry {
                        scenario: scenario.clone(),
                        quantity: cv_name,
                        value: coefficient_of_variation(&scaled),
                        stderr: None,
                        target: Some(0.0),
                        samples: pts.len(),
                    }
                };
                report.entries.push(entry);
            }
        }

        if distinct(&rhos) >= MIN_POINTS {
            let hs = table.numbers("h_bar_exact")?;
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .zip(&rhos)
                .filter_map(|(&i, &r)| hs[i].map(|h| (r, h)))
                .collect();
            let fit = fit_power_exponent(&pts)?;
            let target = match scenario.as_str() {
                "grid-pathwise" => Some(1.0),
                "grid-flooding" => Some(FLOODING_EXPONENT),
                _ => None,
            };
            report.entries.push(FitEntry {
                scenario: scenario.clone(),
                quantity: "exponent h_bar ~ rho^-a",
                value: -fit.exponent,
                stderr: Some(fit.stderr),
                target,
                samples: fit.samples,
            });
        }
    }
    if report.entries.is_empty() {
        return Err(Error::param(format!(
            "fit needs at least {MIN_POINTS} distinct n or rho values within one scenario"
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(scenario: &str, rows: &[(f64, f64, f64)]) -> String {
        let mut s = String::from("scenario,n,rho,gamma_analytic,gamma_sim,h_bar_exact\n");
        for (n, rho, g) in rows {
            s += &format!("{scenario},{n},{rho},{g},,{}\n", 3.0 * rho.powf(-0.7));
        }
        s
    }

    #[test]
    fn planted_slope_recovered() {
        let rows: Vec<_> = [64.0f64, 128.0, 256.0, 512.0]
            .iter()
            .map(|s| (s * s, 0.5, 2.5 * (s * s).powf(-0.5)))
            .collect();
        let r = fit_report(&CsvTable::parse(&synthetic("grid-pathwise", &rows)).unwrap()).unwrap();
        let e = r.find("grid-pathwise", "slope gamma_analytic vs n").unwrap();
        assert!((e.value + 0.5).abs() < 1e-12);
        // gamma_sim is empty and therefore skipped.
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn planted_log_law_has_zero_cv() {
        let rows: Vec<_> = [1e3f64, 1e4, 1e5, 1e6].iter().map(|&n| (n, 0.5, 4.0 / n.ln())).collect();
        let r = fit_report(&CsvTable::parse(&synthetic("random-cell", &rows)).unwrap()).unwrap();
        assert!(r.find("random-cell", "cv gamma_analytic*ln(n)").unwrap().value < 1e-12);
    }

    #[test]
    fn planted_rho_exponent() {
        let rows: Vec<_> = [0.01, 0.02, 0.05, 0.1].iter().map(|&r| (10_000.0, r, 1.0)).collect();
        let r = fit_report(&CsvTable::parse(&synthetic("grid-flooding", &rows)).unwrap()).unwrap();
        let e = r.find("grid-flooding", "exponent h_bar ~ rho^-a").unwrap();
        assert!((e.value - 0.7).abs() < 1e-12);
        assert_eq!(e.target, Some(FLOODING_EXPONENT));
        assert!(e.to_string().contains("deviation"));
    }

    #[test]
    fn too_few_points() {
        let rows = [(16.0, 0.5, 1.0), (64.0, 0.5, 0.5), (256.0, 0.5, 0.25)];
        assert!(fit_report(&CsvTable::parse(&synthetic("grid-pathwise", &rows)).unwrap()).is_err());
    }
}
