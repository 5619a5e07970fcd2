//! Parameter sweeps that put analytic and simulated figures side by side,
//! plus the fitting, plotting and self-check tools that consume them.

mod fit;
mod plot;
mod settings;
mod table;
mod validate;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

pub use fit::{fit_report, FitEntry, FitReport};
pub use plot::{emit_plot, PlotKind};
pub use settings::{Settings, KEYS};
pub use table::CsvTable;
pub use validate::{validate_suite, Check};

use crate::analytics::{
    max_throughput, no_cache_baseline, server_probability, supportable_ratio_bound,
    total_request_rate, total_traffic, Regime,
};
use crate::config::{nearest_perfect_square, perfect_square_root, Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, with_workers, Execution};
use crate::model::occupancy_threshold;
use crate::montecarlo::{estimate_discovery_metrics_with, estimate_serving_load_with, supported_throughput};
use crate::rng::derive_seed;
use crate::topology::Topology;

/// Quantity varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    /// `lambda / mu` with `mu` held at 1.
    RatioLambdaMu,
    Rho,
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" => Ok(Axis::N),
            "ratio" | "lambda/mu" => Ok(Axis::RatioLambdaMu),
            "rho" => Ok(Axis::Rho),
            other => Err(Error::param(format!("unknown sweep axis '{other}'"))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::N => "n",
            Axis::RatioLambdaMu => "ratio",
            Axis::Rho => "rho",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub scenarios: Vec<Scenario>,
    pub axis: Axis,
    pub points: Vec<f64>,
    /// Synchronized request epochs per point for the load columns; 0 skips them.
    pub epochs: usize,
    pub workers: Option<usize>,
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl SweepSpec {
    pub fn new(base: ScenarioConfig, axis: Axis, points: Vec<f64>) -> Self {
        SweepSpec {
            scenarios: vec![base.scenario],
            base,
            axis,
            points,
            epochs: 20,
            workers: None,
            csv: None,
            plot: None,
        }
    }

    /// Configuration of one sweep point, with its own derived seed.
    pub fn point_config(&self, scenario_idx: usize, point_idx: usize) -> Result<ScenarioConfig> {
        let scenario = self.scenarios[scenario_idx];
        let point = self.points[point_idx];
        let mut cfg = self.base.clone();
        cfg.scenario = scenario;
        cfg.seed = derive_seed(self.base.seed, &[scenario_idx as u64, point_idx as u64]);
        match self.axis {
            Axis::N => {
                if !(point >= 4.0 && point.fract() == 0.0 && point < 1e15) {
                    return Err(Error::param(format!("n must be an integer >= 4, got {point}")));
                }
                cfg.n = point as usize;
            }
            Axis::RatioLambdaMu => {
                cfg.mu = 1.0;
                cfg.lambda = point;
            }
            Axis::Rho => {
                if !(point > 0.0 && point < 1.0) {
                    return Err(Error::param(format!("rho points must lie in (0, 1), got {point}")));
                }
                cfg = cfg.with_rho(point);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::param("sweep needs at least one point"));
        }
        if self.scenarios.is_empty() {
            return Err(Error::param("sweep needs at least one scenario"));
        }
        if let Some(w) = self.points.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::param(format!(
                "sweep points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if self.axis == Axis::N && self.scenarios.iter().any(|s| s.is_grid()) {
            for &p in &self.points {
                let n = p as usize;
                if p.fract() != 0.0 || perfect_square_root(n).is_none() {
                    return Err(Error::param(format!(
                        "grid sweep point {p} is not a perfect square; nearest valid is {}",
                        nearest_perfect_square(n)
                    )));
                }
            }
        }
        for s in 0..self.scenarios.len() {
            for p in 0..self.points.len() {
                self.point_config(s, p)?;
            }
        }
        Ok(())
    }
}

/// One output line. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario: &'static str,
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
    pub h_bar_cond: Option<f64>,
    pub h_bar_uncond: Option<f64>,
    pub p_s: Option<f64>,
    pub max_load: Option<u64>,
    pub gamma_sim: Option<f64>,
    pub gamma_analytic: f64,
    pub h_bar_cond_ci95: Option<f64>,
    pub h_bar_uncond_ci95: Option<f64>,
    pub p_s_ci95: Option<f64>,
    pub gamma_sim_ci95: Option<f64>,
    pub seed: u64,
    pub trials: usize,
    pub epochs: usize,
    pub h_bar_exact: f64,
    pub h_bar_s: f64,
    pub p_s_analytic: f64,
    pub p_s_lower: f64,
    pub p_s_upper: f64,
    pub transport_capacity: f64,
    pub gamma_baseline: f64,
    pub occupancy_threshold: f64,
    pub regime: &'static str,
    pub ratio_bound: Option<f64>,
    pub total_request_rate: f64,
    pub total_traffic: f64,
    pub server_load: Option<f64>,
    pub relay_load: Option<f64>,
    pub w_bandwidth: f64,
    pub b_content: f64,
}

pub fn evaluate_point(cfg: &ScenarioConfig, epochs: usize, exec: Execution) -> Result<SweepRow> {
    let rho = cfg.rho();
    let s = cfg.scenario;
    let cap = max_throughput(s, cfg.n, rho, cfg.w_bandwidth)?;
    let bracket = server_probability(s, rho, cfg.n)?;
    let topology = Topology::for_config(cfg)?;
    let disc = estimate_discovery_metrics_with(cfg, &topology, exec)?;
    let load = if epochs > 0 {
        let mut lc = cfg.clone();
        lc.trials = epochs;
        Some(estimate_serving_load_with(&lc, &topology, exec)?)
    } else {
        None
    };

    let finite = |x: f64| x.is_finite().then_some(x);
    let dist = disc.h_bar_uncond();
    let gamma = supported_throughput(s, cfg.n, rho, cfg.w_bandwidth, dist).ok();
    let cond = disc.h_bar_cond();
    let p_s = disc.p_s();
    Ok(SweepRow {
        scenario: s.label(),
        n: cfg.n,
        lambda: cfg.lambda,
        mu: cfg.mu,
        rho,
        h_bar_cond: finite(cond.value),
        h_bar_uncond: finite(dist.value),
        p_s: finite(p_s.value),
        max_load: load.as_ref().and_then(|l| l.max_load()),
        gamma_sim: gamma.map(|g| g.gamma),
        gamma_analytic: cap.gamma_max,
        h_bar_cond_ci95: finite(cond.ci95_halfwidth()),
        h_bar_uncond_ci95: finite(dist.ci95_halfwidth()),
        p_s_ci95: finite(p_s.ci95_halfwidth()),
        gamma_sim_ci95: gamma.map(|g| g.gamma * dist.ci95_halfwidth() / dist.value),
        seed: cfg.seed,
        trials: cfg.trials,
        epochs,
        h_bar_exact: cap.h_bar,
        h_bar_s: cap.h_bar_s,
        p_s_analytic: cap.p_s,
        p_s_lower: bracket.lower,
        p_s_upper: bracket.upper,
        transport_capacity: cap.transport_capacity,
        gamma_baseline: no_cache_baseline(s, cfg.n, cfg.w_bandwidth),
        occupancy_threshold: occupancy_threshold(s, cfg.n)?,
        regime: match cap.regime {
            Regime::CacheDominated => "cache",
            Regime::ServerDominated => "server",
        },
        ratio_bound: supportable_ratio_bound(s, cfg.n).ok(),
        total_request_rate: total_request_rate(cfg.n, cfg.lambda, cfg.mu)?,
        total_traffic: total_traffic(cfg.n, cfg.lambda, cfg.mu, cfg.b_content, s)?,
        server_load: load.as_ref().and_then(|l| l.server_load()).map(|e| e.value),
        relay_load: load.as_ref().and_then(|l| l.relay_load()).map(|e| e.value),
        w_bandwidth: cfg.w_bandwidth,
        b_content: cfg.b_content,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

/// Evaluates every (scenario, point) pair, scenario-major, and writes the CSV
/// and plot outputs named in the spec. Rows come out in spec order whatever
/// the worker count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let np = spec.points.len();
    let jobs = spec.scenarios.len() * np;
    let rows = with_workers(spec.workers, || {
        map_indexed(Execution::Parallel, jobs, |j| {
            let cfg = spec.point_config(j / np, j % np)?;
            evaluate_point(&cfg, spec.epochs, Execution::Parallel)
        })
    });
    let table = SweepTable {
        rows: rows.into_iter().collect::<Result<_>>()?,
    };
    if let Some(path) = &spec.csv {
        write_file(path, table.to_csv()?.as_bytes())?;
    }
    if let Some(path) = &spec.plot {
        let csv = CsvTable::parse(&table.to_csv()?)?;
        let kind = match spec.axis {
            Axis::N => PlotKind::GammaVsN,
            Axis::RatioLambdaMu | Axis::Rho => PlotKind::GammaVsRatio,
        };
        emit_plot(&csv, kind, path)?;
    }
    Ok(table)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
