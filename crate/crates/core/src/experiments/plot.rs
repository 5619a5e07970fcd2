use std::path::Path;
use std::str::FromStr;

use plotters::prelude::*;

use super::table::CsvTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    GammaVsN,
    GammaVsRatio,
    TrafficVsRatio,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gamma-vs-n" => Ok(PlotKind::GammaVsN),
            "gamma-vs-ratio" => Ok(PlotKind::GammaVsRatio),
            "traffic-vs-ratio" => Ok(PlotKind::TrafficVsRatio),
            other => Err(Error::param(format!("unknown plot kind '{other}'"))),
        }
    }
}

/// Linear or base-10 logarithmic placement of one axis.
#[derive(Clone, Copy)]
struct Scale {
    log: bool,
}

impl Scale {
    /// Logarithmic when the positive data span two decades or more.
    fn for_values(vals: &[f64]) -> Scale {
        let (lo, hi) = bounds(vals);
        Scale {
            log: lo > 0.0 && hi / lo >= 100.0,
        }
    }

    fn map(self, v: f64) -> f64 {
        if self.log {
            v.log10()
        } else {
            v
        }
    }

    fn label(self, t: f64) -> String {
        if self.log {
            let v = 10f64.powf(t);
            if (t - t.round()).abs() < 1e-9 {
                format!("1e{}", t.round())
            } else {
                format!("{v:.3e}")
            }
        } else {
            compact(t)
        }
    }
}

fn compact(t: f64) -> String {
    let a = t.abs();
    if a == 0.0 {
        "0".into()
    } else if !(1e-2..1e5).contains(&a) {
        format!("{t:.2e}")
    } else {
        let s = format!("{t:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    vals.iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn padded(lo: f64, hi: f64) -> std::ops::Range<f64> {
    let pad = if hi > lo { (hi - lo) * 0.05 } else { 0.5 };
    (lo - pad)..(hi + pad)
}

struct Series {
    name: String,
    line: Vec<(f64, f64)>,
    markers: Vec<(f64, f64)>,
}

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Table(format!("plot rendering failed: {e}"))
}

/// Renders a sweep table to a standalone SVG file: analytic values as lines,
/// simulated values as markers, one colour per scenario. Traffic plots add
/// the `n mu B` saturation level as a dashed reference.
pub fn emit_plot(table: &CsvTable, kind: PlotKind, out: &Path) -> Result<()> {
    let n = table.numbers("n")?;
    let lambda = table.numbers("lambda")?;
    let mu = table.numbers("mu")?;
    let need = |v: Option<f64>, col: &str| v.ok_or_else(|| Error::Table(format!("empty cell in '{col}'")));
    let xs: Vec<f64> = match kind {
        PlotKind::GammaVsN => n.iter().map(|&v| need(v, "n")).collect::<Result<_>>()?,
        _ => lambda
            .iter()
            .zip(&mu)
            .map(|(&l, &m)| Ok(need(l, "lambda")? / need(m, "mu")?))
            .collect::<Result<_>>()?,
    };
    let (line_col, marker_col, y_desc) = match kind {
        PlotKind::TrafficVsRatio => ("total_traffic", None, "total traffic (bits/s)"),
        _ => ("gamma_analytic", Some("gamma_sim"), "max download rate (bits/s)"),
    };
    let lines = table.numbers(line_col)?;
    let markers = marker_col.map(|c| table.numbers(c)).transpose()?;

    let mut series = Vec::new();
    for (name, rows) in table.groups()? {
        let mut s = Series {
            name,
            line: Vec::new(),
            markers: Vec::new(),
        };
        for &i in &rows {
            if let Some(y) = lines[i] {
                s.line.push((xs[i], y));
            }
            if let Some(y) = markers.as_ref().and_then(|m| m[i]) {
                s.markers.push((xs[i], y));
            }
        }
        s.line.sort_by(|a, b| a.0.total_cmp(&b.0));
        series.push(s);
    }
    let mut reference = None;
    if kind == PlotKind::TrafficVsRatio {
        // Ratio sweeps share n, mu and B across rows.
        let b = table.numbers("b_content")?;
        reference = Some(need(n[0], "n")? * need(mu[0], "mu")? * need(b[0], "b_content")?);
    }

    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.line.iter().chain(&s.markers).map(|p| p.1))
        .chain(reference)
        .collect();
    if ys.is_empty() {
        return Err(Error::Table(format!("column '{line_col}' has no values")));
    }
    let (sx, sy) = (Scale::for_values(&xs), Scale::for_values(&ys));
    let mx: Vec<f64> = xs.iter().map(|&x| sx.map(x)).collect();
    let my: Vec<f64> = ys.iter().map(|&y| sy.map(y)).collect();
    let (x0, x1) = bounds(&mx);
    let (y0, y1) = bounds(&my);

    let root = SVGBackend::new(out, (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let x_desc = match kind {
        PlotKind::GammaVsN => "n",
        _ => "lambda / mu",
    };
    let mut chart = ChartBuilder::on(&root)
        .margin(20)
        .x_label_area_size(45)
        .y_label_area_size(80)
        .build_cartesian_2d(padded(x0, x1), padded(y0, y1))
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc(x_desc)
        .y_desc(y_desc)
        .x_label_formatter(&|t| sx.label(*t))
        .y_label_formatter(&|t| sy.label(*t))
        .draw()
        .map_err(plot_err)?;

    for (k, s) in series.iter().enumerate() {
        let colour = Palette99::pick(k).to_rgba();
        let line: Vec<_> = s.line.iter().map(|&(x, y)| (sx.map(x), sy.map(y))).collect();
        chart
            .draw_series(LineSeries::new(line, colour.stroke_width(2)))
            .map_err(plot_err)?
            .label(s.name.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], colour.stroke_width(2)));
        let line_marks = s.line.iter().map(|&(x, y)| Circle::new((sx.map(x), sy.map(y)), 3, colour.filled()));
        chart.draw_series(line_marks).map_err(plot_err)?;
        let sim = s.markers.iter().map(|&(x, y)| Cross::new((sx.map(x), sy.map(y)), 5, colour.stroke_width(2)));
        chart.draw_series(sim).map_err(plot_err)?;
    }
    if let Some(level) = reference {
        let y = sy.map(level);
        let (a, b) = (padded(x0, x1).start, padded(x0, x1).end);
        chart
            .draw_series(DashedLineSeries::new(vec![(a, y), (b, y)], 8, 5, BLACK.stroke_width(1)))
            .map_err(plot_err)?
            .label("n mu B")
            .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLACK));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(|e| Error::io(out, std::io::Error::other(e.to_string())))?;
    Ok(())
}
