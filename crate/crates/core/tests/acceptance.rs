//! End-to-end acceptance checks. Runs as a plain binary so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.
//!
//! Every tolerance and seed is pinned below. Reference values are computed
//! here from first principles wherever that is possible without reusing the
//! library routine under test.

use std::time::{Duration, Instant};

use icncap::analytics::{
    expected_hops_exact, fit_power_exponent, max_throughput, no_cache_baseline, ring_search_hops,
    server_probability, total_request_rate, total_traffic, FLOODING_EXPONENT,
};
use icncap::experiments::{run_sweep, Axis, SweepSpec};
use icncap::model::{occupancy_threshold, simulate_occupancy_ctmc};
use icncap::montecarlo::{
    estimate_discovery_metrics, estimate_serving_load, estimate_supported_throughput, Proportion,
};
use icncap::topology::{build_grid, Topology};
use icncap::{CellMode, RequesterPolicy, Scenario, ScenarioConfig};

const SEED: u64 = 20_240_601;

// 1: occupancy
const OCCUPANCY_ABS_TOL: f64 = 0.01;
const OCCUPANCY_HORIZON_SCALE: f64 = 1e6;
const OCCUPANCY_BUDGET: Duration = Duration::from_secs(10);
// 2: path-wise hop count
const PATH_SIDE: usize = 101;
const PATH_RHOS: [f64; 3] = [0.05, 0.2, 0.5];
const PATH_TRIALS: usize = 100_000;
const INVERSE_RHO_TOL: f64 = 0.02;
const PATH_BUDGET: Duration = Duration::from_secs(60);
// 3: ring search
const RING_SIDE: usize = 201;
const RING_MARGIN: usize = 20;
const RING_RHOS: [f64; 2] = [0.05, 0.2];
const RING_TRIALS: usize = 100_000;
const RING_TV_TOL: f64 = 0.02;
const RING_FIT_RHOS: (f64, f64, usize) = (1e-3, 1e-1, 13);
const RING_FIT_CAP: usize = 1_000_000;
const RING_EXPONENT_WINDOW: (f64, f64) = (0.42, 0.52);
const RING_BUDGET: Duration = Duration::from_secs(120);
// 4: cell search
const CELL_N: usize = 10_000;
const CELL_RHO: f64 = 0.5;
const CELL_TRIALS: usize = 100_000;
const CELL_HOPS_MAX: f64 = 1.2;
const CELL_BUDGET: Duration = Duration::from_secs(30);
// 5: server share
const SHARE_SIDES: [usize; 2] = [101, 301];
const SHARE_RHOS: [f64; 2] = [0.05, 0.2];
const SHARE_TRIALS: usize = 100_000;
const CELL_SHARE_REL_TOL: f64 = 0.25;
const SHARE_BUDGET: Duration = Duration::from_secs(120);
// 6: throughput scaling
const SCALING_RHO: f64 = 0.875;
const GRID_SIDES: [usize; 4] = [64, 128, 256, 512];
const RANDOM_NS: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];
const SLOPE_TARGET: f64 = -0.5;
const SLOPE_TOL: f64 = 0.05;
const LOG_LAW_CV_MAX: f64 = 0.1;
const AGREEMENT_FACTOR: f64 = 2.0;
const SCALING_EPOCHS: usize = 10;
const SCALING_BUDGET: Duration = Duration::from_secs(300);
// 7: no-cache limit
const NO_CACHE_GRID_N: usize = 101 * 101;
const NO_CACHE_RANDOM_N: usize = 10_000;
const NO_CACHE_RHO_FRACTION: f64 = 1e-3;
const NO_CACHE_EPOCHS: usize = 20;
// 8: load
const LOAD_N: usize = 10_000;
const LOAD_RHO: f64 = 0.5;
const LOAD_EPOCHS: usize = 100;
const LOAD_FACTOR: (f64, f64) = (0.3, 3.0);
const BOTTLENECK_SIDES: (usize, usize) = (100, 141);
const BOTTLENECK_RATIO_MAX: f64 = 1.0;
// 9: saturation
const SATURATION_RATIO: f64 = 1e3;
const SATURATION_N: usize = 10_000;
const SATURATION_REL_TOL: f64 = 0.05;
// 10: determinism
const DETERMINISM_WORKERS: (usize, usize) = (1, 8);

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

struct Outcome {
    passed: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(format!("{} {detail}", if ok { "ok  " } else { "MISS" }));
    }

    fn note(&mut self, detail: String) {
        self.details.push(format!("     {detail}"));
    }

    fn budget(&mut self, started: Instant, limit: Duration) {
        let spent = started.elapsed();
        self.check(
            spent < limit,
            format!("runtime {:.1}s (limit {}s)", spent.as_secs_f64(), limit.as_secs()),
        );
    }
}

fn cfg(scenario: Scenario, n: usize, rho: f64, trials: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(scenario, n).with_rho(rho);
    c.trials = trials;
    c.seed = SEED;
    c
}

fn ratio_within(x: f64, reference: f64, factor: f64) -> bool {
    let r = x / reference;
    r >= 1.0 / factor && r <= factor
}

fn occupancy() -> Outcome {
    let mut out = Outcome::new();
    let t0 = Instant::now();
    for (lambda, mu) in [(1.0, 1.0), (7.0, 1.0), (0.1, 1.0)] {
        let horizon = OCCUPANCY_HORIZON_SCALE / f64::min(lambda, mu);
        let frac = simulate_occupancy_ctmc(lambda, mu, horizon, SEED).unwrap();
        let rho = lambda / (lambda + mu);
        out.check(
            (frac - rho).abs() <= OCCUPANCY_ABS_TOL,
            format!("lambda={lambda} mu={mu}: time fraction {frac:.5} vs {rho:.5}"),
        );
    }
    out.budget(t0, OCCUPANCY_BUDGET);
    out
}

fn path_hops() -> Outcome {
    let mut out = Outcome::new();
    let t0 = Instant::now();
    let grid = build_grid(PATH_SIDE * PATH_SIDE).unwrap();
    let topo = Topology::from(grid.clone());
    for rho in PATH_RHOS {
        // A request walks its server path and stops at the first holder or at
        // the end, so its hop count is min(Geometric(rho), d):
        // E = sum_{k<d} (1-rho)^k = (1 - (1-rho)^d) / rho.
        let q = 1.0 - rho;
        let oracle = (0..grid.node_count())
            .map(|v| (1.0 - q.powi(grid.server_distance(v) as i32)) / rho)
            .sum::<f64>()
            / grid.node_count() as f64;
        let c = cfg(Scenario::GridPathwise, grid.node_count(), rho, PATH_TRIALS);
        let est = estimate_discovery_metrics(&c, &topo).unwrap().h_bar_uncond();
        let half = Z95 * est.stderr;
        out.check(
            (est.value - oracle).abs() <= half,
            format!("rho={rho}: simulated {:.4} ± {half:.4} vs oracle {oracle:.4}", est.value),
        );
    }
    let h = expected_hops_exact(Scenario::GridPathwise, 0.05, 1_000_000).unwrap();
    out.check(
        (h * 0.05 - 1.0).abs() <= INVERSE_RHO_TOL,
        format!("rho * h_bar at rho=0.05, n=1e6: {:.6}", h * 0.05),
    );
    out.budget(t0, PATH_BUDGET);
    out
}

/// P(H = h) for ring search on an unbounded lattice: radius h holds 4h nodes
/// and radii 1..h-1 hold 2h(h-1).
fn ring_pmf(rho: f64, h: usize) -> f64 {
    let q = 1.0 - rho;
    let h = h as f64;
    (1.0 - q.powf(4.0 * h)) * q.powf(2.0 * h * (h - 1.0))
}

fn ring_search() -> Outcome {
    let mut out = Outcome::new();
    let t0 = Instant::now();
    let topo = Topology::from(build_grid(RING_SIDE * RING_SIDE).unwrap());
    for rho in RING_RHOS {
        let mut c = cfg(Scenario::GridFlooding, RING_SIDE * RING_SIDE, rho, RING_TRIALS);
        c.requesters = RequesterPolicy::Interior { margin: RING_MARGIN };
        let r = estimate_discovery_metrics(&c, &topo).unwrap();
        let hist = r.hop_histogram();
        let total: u64 = hist.iter().sum();
        let top = hist.len().max(RING_MARGIN + 1);
        let mut tv = 0.0;
        let mut mass = 0.0;
        for h in 1..top {
            let p = ring_pmf(rho, h);
            mass += p;
            tv += (hist.get(h).copied().unwrap_or(0) as f64 / total as f64 - p).abs();
        }
        tv += hist.first().copied().unwrap_or(0) as f64 / total as f64;
        tv = 0.5 * (tv + (1.0 - mass).max(0.0));
        out.check(
            tv < RING_TV_TOL,
            format!("rho={rho}: total variation {tv:.5} over {total} requests"),
        );
    }
    let (lo, hi, k) = RING_FIT_RHOS;
    let pts: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let rho = lo * (hi / lo).powf(i as f64 / (k - 1) as f64);
            (rho, ring_search_hops(rho, RING_FIT_CAP))
        })
        .collect();
    let fit = fit_power_exponent(&pts).unwrap();
    let a = -fit.exponent;
    out.check(
        (RING_EXPONENT_WINDOW.0..=RING_EXPONENT_WINDOW.1).contains(&a),
        format!(
            "fitted exponent {a:.4} ± {:.4} over rho in [{lo}, {hi}] ({k} points, cap {RING_FIT_CAP})",
            fit.stderr
        ),
    );
    out.note(format!(
        "deviation from {FLOODING_EXPONENT}: {:+.4}",
        a - FLOODING_EXPONENT
    ));
    out.budget(t0, RING_BUDGET);
    out
}

fn cell_search() -> Outcome {
    let mut out = Outcome::new();
    let t0 = Instant::now();
    let c = cfg(Scenario::RandomCellPathwise, CELL_N, CELL_RHO, CELL_TRIALS);
    let topo = Topology::for_config(&c).unwrap();
    let r = estimate_discovery_metrics(&c, &topo).unwrap();
    let hist = r.hop_histogram();
    // Requesters inside the server cell are served on the spot (0 hops) and
    // are outside the scope of the one-hop formula.
    let travelling: u64 = hist.iter().skip(1).sum();
    let one_hop = Proportion {
        hits: hist.get(1).copied().unwrap_or(0),
        total: travelling,
    };
    let (lo, hi) = one_hop.wilson95();
    let formula = 1.0 - (1.0 - CELL_RHO).powf(2.0 * (CELL_N as f64).ln());
    out.check(
        lo <= formula && formula <= hi,
        format!(
            "P(hops=1) = {}/{} , Wilson 95% [{lo:.6}, {hi:.6}] vs {formula:.6}",
            one_hop.hits, one_hop.total
        ),
    );
    let h = r.h_bar_uncond().value;
    out.check(h <= CELL_HOPS_MAX, format!("h_bar = {h:.4} (max {CELL_HOPS_MAX})"));
    out.budget(t0, CELL_BUDGET);
    out
}

fn server_share() -> Outcome {
    let mut out = Outcome::new();
    let t0 = Instant::now();
    for side in SHARE_SIDES {
        let n = side * side;
        let grid = build_grid(n).unwrap();
        let topo = Topology::from(grid.clone());
        for rho in SHARE_RHOS {
            let b = server_probability(Scenario::GridPathwise, rho, n).unwrap();
            let est = estimate_discovery_metrics(&cfg(Scenario::GridPathwise, n, rho, SHARE_TRIALS), &topo)
                .unwrap()
                .p_s();
            // The bracket is far narrower than any feasible sampling error, so
            // the test is overlap of the 95% interval with it.
            let (lo, hi) = est.ci95();
            let exact = (0..n)
                .map(|v| (1.0 - rho).powi(grid.server_distance(v) as i32))
                .sum::<f64>()
                / n as f64;
            out.check(
                lo <= b.upper && b.lower <= hi,
                format!(
                    "side={side} rho={rho}: simulated {:.3e} [{lo:.3e}, {hi:.3e}] vs bracket [{:.3e}, {:.3e}] (lattice average {exact:.3e})",
                    est.value, b.lower, b.upper
                ),
            );
        }
    }
    let c = cfg(Scenario::RandomCellPathwise, CELL_N, CELL_RHO, SHARE_TRIALS);
    let topo = Topology::for_config(&c).unwrap();
    let est = estimate_discovery_metrics(&c, &topo).unwrap().p_s();
    let formula = server_probability(Scenario::RandomCellPathwise, CELL_RHO, CELL_N).unwrap().value;
    let rel = (est.value - formula).abs() / formula;
    out.check(
        rel <= CELL_SHARE_REL_TOL,
        format!(
            "cells n={CELL_N} rho={CELL_RHO}: simulated {:.3e} ± {:.1e} vs formula {formula:.3e} (relative gap {rel:.3})",
            est.value, est.stderr
        ),
    );
    out.budget(t0, SHARE_BUDGET);
    out
}

fn scaling() -> Outcome {
    let mut out = Outcome::new();
    let t0 = Instant::now();
    let mut grid_pts = Vec::new();
    let mut worst = (1.0f64, String::new());
    let mut track = |sim: f64, ana: f64, label: String| {
        let r = sim / ana;
        let dev = r.max(1.0 / r);
        if dev > worst.0 {
            worst = (dev, format!("{label}: simulated/analytic {r:.3}"));
        }
        ratio_within(sim, ana, AGREEMENT_FACTOR)
    };
    let mut all_agree = true;
    for side in GRID_SIDES {
        let n = side * side;
        let ana = max_throughput(Scenario::GridPathwise, n, SCALING_RHO, 1.0).unwrap().gamma_max;
        grid_pts.push((n as f64, ana));
        let c = cfg(Scenario::GridPathwise, n, SCALING_RHO, SCALING_EPOCHS);
        let sim = estimate_supported_throughput(&c, &Topology::for_config(&c).unwrap()).unwrap().gamma;
        all_agree &= track(sim, ana, format!("grid n={n}"));
    }
    let fit = fit_power_exponent(&grid_pts).unwrap();
    out.check(
        (fit.exponent - SLOPE_TARGET).abs() <= SLOPE_TOL,
        format!("grid log-log slope {:.4} (target {SLOPE_TARGET} ± {SLOPE_TOL})", fit.exponent),
    );
    let mut scaled = Vec::new();
    for n in RANDOM_NS {
        let ana = max_throughput(Scenario::RandomCellPathwise, n, SCALING_RHO, 1.0).unwrap().gamma_max;
        scaled.push(ana * (n as f64).ln());
        let c = cfg(Scenario::RandomCellPathwise, n, SCALING_RHO, SCALING_EPOCHS);
        let sim = estimate_supported_throughput(&c, &Topology::for_config(&c).unwrap()).unwrap().gamma;
        all_agree &= track(sim, ana, format!("cells n={n}"));
    }
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let sd = (scaled.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (scaled.len() - 1) as f64).sqrt();
    out.check(
        sd / mean < LOG_LAW_CV_MAX,
        format!("cells CV of gamma*ln(n) {:.4} (max {LOG_LAW_CV_MAX})", sd / mean),
    );
    out.check(
        all_agree,
        format!("simulated within factor {AGREEMENT_FACTOR} everywhere; worst {}", worst.1),
    );
    out.budget(t0, SCALING_BUDGET);
    out
}

fn no_cache() -> Outcome {
    let mut out = Outcome::new();
    for (scenario, n) in [
        (Scenario::GridPathwise, NO_CACHE_GRID_N),
        (Scenario::RandomCellPathwise, NO_CACHE_RANDOM_N),
    ] {
        let rho = occupancy_threshold(scenario, n).unwrap() * NO_CACHE_RHO_FRACTION;
        let c = cfg(scenario, n, rho, NO_CACHE_EPOCHS);
        let sim = estimate_supported_throughput(&c, &Topology::for_config(&c).unwrap()).unwrap().gamma;
        let base = no_cache_baseline(scenario, n, 1.0);
        out.check(
            ratio_within(sim, base, AGREEMENT_FACTOR),
            format!("{scenario} n={n} rho={rho:.2e}: simulated {sim:.4e} vs baseline {base:.4e} (ratio {:.4})", sim / base),
        );
    }
    out
}

fn load() -> Outcome {
    let mut out = Outcome::new();
    let ln = (LOAD_N as f64).ln();
    for (scenario, reference, label) in [
        (Scenario::GridPathwise, ln / ln.ln(), "ln n / ln ln n"),
        (Scenario::RandomCellPathwise, ln.ln() / ln.ln().ln(), "ln ln n / ln ln ln n"),
    ] {
        let c = cfg(scenario, LOAD_N, LOAD_RHO, LOAD_EPOCHS);
        let r = estimate_serving_load(&c, &Topology::for_config(&c).unwrap()).unwrap();
        let median = r.max_load().unwrap() as f64;
        let (lo, hi) = (LOAD_FACTOR.0 * reference, LOAD_FACTOR.1 * reference);
        out.check(
            lo <= median && median <= hi,
            format!("{scenario}: median max load {median} vs {label} = {reference:.3}, window [{lo:.3}, {hi:.3}]"),
        );
    }
    let mut flows = Vec::new();
    for side in [BOTTLENECK_SIDES.0, BOTTLENECK_SIDES.1] {
        let n = side * side;
        let c = cfg(Scenario::GridPathwise, n, LOAD_RHO, LOAD_EPOCHS);
        let r = estimate_serving_load(&c, &Topology::for_config(&c).unwrap()).unwrap();
        let gamma = max_throughput(Scenario::GridPathwise, n, LOAD_RHO, 1.0).unwrap().gamma_max;
        let server = r.server_load().unwrap().value;
        flows.push(server * gamma);
        out.note(format!("n={n}: server requests/epoch {server:.3}, gamma {gamma:.4e}, flow {:.4e}", server * gamma));
    }
    let ratio = flows[1] / flows[0];
    out.check(
        ratio <= BOTTLENECK_RATIO_MAX,
        format!("server flow ratio at ~2n: {ratio:.4} (max {BOTTLENECK_RATIO_MAX})"),
    );
    out
}

fn saturation() -> Outcome {
    let mut out = Outcome::new();
    let (lambda, mu, b) = (SATURATION_RATIO, 1.0, 1.0);
    let n = SATURATION_N as f64;
    let rate = total_request_rate(SATURATION_N, lambda, mu).unwrap();
    out.check(
        (rate / (n * mu) - 1.0).abs() <= SATURATION_REL_TOL,
        format!("total request rate / (n mu) = {:.5}", rate / (n * mu)),
    );
    for s in Scenario::ALL {
        let t = total_traffic(SATURATION_N, lambda, mu, b, s).unwrap();
        out.check(
            (t / (n * mu * b) - 1.0).abs() <= SATURATION_REL_TOL,
            format!("{s}: total traffic / (n mu B) = {:.5}", t / (n * mu * b)),
        );
    }
    out
}

fn determinism() -> Outcome {
    let mut out = Outcome::new();
    let mut base = cfg(Scenario::GridPathwise, 1024, 0.5, 2_000);
    base.mode = CellMode::Empirical;
    let mut spec = SweepSpec::new(base, Axis::N, vec![256.0, 1024.0, 4096.0]);
    spec.scenarios = Scenario::ALL.to_vec();
    spec.epochs = 5;
    let run = |workers: usize| {
        let mut s = spec.clone();
        s.workers = Some(workers);
        run_sweep(&s).unwrap().to_csv().unwrap().into_bytes()
    };
    let (w1, w8) = DETERMINISM_WORKERS;
    let a = run(w1);
    let b = run(w1);
    let c = run(w8);
    out.check(a == b, format!("two runs with {w1} worker: {} bytes, identical: {}", a.len(), a == b));
    out.check(a == c, format!("{w1} vs {w8} workers identical: {}", a == c));
    out
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("steady-state occupancy", occupancy),
        ("path-wise hop count", path_hops),
        ("ring-search hop distribution and exponent", ring_search),
        ("cell search one-hop probability", cell_search),
        ("server share", server_share),
        ("throughput scaling", scaling),
        ("no-cache baseline", no_cache),
        ("serving load and server flow", load),
        ("request-rate and traffic saturation", saturation),
        ("sweep determinism", determinism),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let outcome = run();
        println!("{} criterion {id:>2}: {name}", if outcome.passed { "PASS" } else { "FAIL" });
        for d in &outcome.details {
            println!("        {d}");
        }
        if !outcome.passed {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
