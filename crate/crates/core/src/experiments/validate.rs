//! Fast self-check suite: each check pits a simulator against an
//! independently computed reference at small sizes.

use super::{evaluate_point, Axis, SweepSpec};
use crate::analytics::{ring_search_pmf, server_probability, total_request_rate};
use crate::config::{RequesterPolicy, Scenario, ScenarioConfig};
use crate::error::Result;
use crate::exec::Execution;
use crate::model::simulate_occupancy_ctmc;
use crate::montecarlo::{estimate_discovery_metrics_with, Estimate};
use crate::topology::{build_grid, Topology};

/// Two-sided 99.9% normal quantile; keeps false alarms rare across the suite.
const Z999: f64 = 3.290_526_731_491_926;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn within(est: Estimate, target: f64) -> bool {
    (est.value - target).abs() <= Z999 * est.stderr
}

/// Runs the suite with `base` supplying the seed, occupancy and trial count
/// (at least 5000 trials are used).
pub fn validate_suite(base: &ScenarioConfig) -> Result<Vec<Check>> {
    let rho = base.rho();
    let trials = base.trials.max(5_000);
    let mut out = Vec::new();

    let horizon = 2e4 / base.lambda.min(base.mu);
    let frac = simulate_occupancy_ctmc(base.lambda, base.mu, horizon, base.seed)?;
    out.push(check(
        "occupancy time fraction",
        (frac - rho).abs() < 0.02,
        format!("simulated {frac:.4}, steady state {rho:.4}"),
    ));

    // Path-wise search stops at the first holder or at the server, so each
    // requester's hop count is min(Geometric(rho), distance).
    let g = build_grid(31 * 31)?;
    let q = 1.0 - rho;
    let oracle = (0..g.node_count())
        .map(|v| {
            let d = g.server_distance(v) as i32;
            (1.0 - q.powi(d)) / rho
        })
        .sum::<f64>()
        / g.node_count() as f64;
    let mut cfg = ScenarioConfig::new(Scenario::GridPathwise, g.node_count());
    cfg.lambda = base.lambda;
    cfg.mu = base.mu;
    cfg.seed = base.seed;
    cfg.trials = trials;
    let topo = Topology::from(g.clone());
    let seq = estimate_discovery_metrics_with(&cfg, &topo, Execution::Sequential)?;
    let est = seq.h_bar_uncond();
    out.push(check(
        "path-wise hop count vs truncated geometric",
        within(est, oracle),
        format!("simulated {:.4} ± {:.4}, oracle {oracle:.4}", est.value, est.stderr),
    ));

    let par = estimate_discovery_metrics_with(&cfg, &topo, Execution::Parallel)?;
    let again = estimate_discovery_metrics_with(&cfg, &topo, Execution::Parallel)?;
    out.push(check(
        "deterministic replay",
        par == seq && par == again,
        "parallel, sequential and repeated runs compared".into(),
    ));

    // Ring search from the centre never reaches the boundary before radius 15.
    let mut fcfg = cfg.clone();
    fcfg.scenario = Scenario::GridFlooding;
    fcfg = fcfg.with_rho(0.3);
    fcfg.requesters = RequesterPolicy::Interior { margin: 15 };
    let flood = estimate_discovery_metrics_with(&fcfg, &topo, Execution::Parallel)?;
    let hist = flood.hop_histogram();
    let total: u64 = hist.iter().sum();
    let tv = 0.5
        * (1..=15)
            .map(|h| {
                let sim = hist.get(h).copied().unwrap_or(0) as f64 / total as f64;
                (sim - ring_search_pmf(0.3, h)).abs()
            })
            .sum::<f64>();
    out.push(check(
        "ring-search hop distribution",
        tv < 0.03,
        format!("total variation {tv:.4} over {total} requests"),
    ));

    let mut identity_ok = true;
    let mut worst = 0.0f64;
    for s in Scenario::ALL {
        let mut c = ScenarioConfig::new(s, 1024);
        c.lambda = base.lambda;
        c.mu = base.mu;
        c.seed = base.seed;
        c.trials = 1_000;
        let row = evaluate_point(&c, 2, Execution::Parallel)?;
        let per = (1.0 - row.p_s_analytic) * row.h_bar_exact + row.p_s_analytic * row.h_bar_s;
        let err = (row.gamma_analytic * row.n as f64 * (1.0 - row.rho) * per / row.transport_capacity - 1.0).abs();
        worst = worst.max(err);
        identity_ok &= err < 1e-9;
    }
    out.push(check(
        "throughput identity",
        identity_ok,
        format!("worst relative error {worst:.2e}"),
    ));

    let b = server_probability(Scenario::GridPathwise, rho, g.node_count())?;
    let ps = seq.p_s();
    let gap = (ps.value - b.upper).max(b.lower - ps.value).max(0.0);
    out.push(check(
        "server share vs bracket",
        gap <= Z999 * ps.stderr,
        format!(
            "simulated {:.5} ± {:.5}, bracket [{:.5}, {:.5}]",
            ps.value, ps.stderr, b.lower, b.upper
        ),
    ));

    let rate = total_request_rate(g.node_count(), base.lambda, base.mu)?;
    let cap = g.node_count() as f64 * base.mu;
    out.push(check(
        "request rate below n mu",
        rate < cap,
        format!("{rate:.4} vs {cap:.4}"),
    ));

    let spec = SweepSpec::new(cfg, Axis::N, vec![961.0, 289.0]);
    out.push(check(
        "sweep rejects unordered points",
        spec.validate().is_err(),
        "points 961, 289".into(),
    ));
    Ok(out)
}
