//! Monte Carlo estimation of hop counts, server share, per-node serving load
//! and supported throughput.
//!
//! Discovery trials draw one requester against a fresh possession field.
//! Load trials resolve a synchronized epoch in which every node without the
//! content issues one request against the same field. Trial `t` draws from
//! streams `2t` and `2t + 1` of the configured seed, and trials are folded in
//! fixed blocks, so a report depends only on `(config, seed)`.

mod field;
pub mod stats;

use rand::Rng;

pub use field::sample_cache_field;
pub use stats::{CountStats, Estimate, Proportion};

use crate::analytics::transport_capacity;
use crate::config::{FieldModel, RequesterPolicy, Scenario, ScenarioConfig};
use crate::discovery::{discover, CacheField, DiscoveryOutcome, LazyField, Source};
use crate::error::{Error, Result};
use crate::exec::{fold_blocks, map_indexed, Execution};
use crate::rng::{stream_rng, SimRng};
use crate::topology::{GridTopology, Topology};

/// Per-request discovery statistics accumulated over trials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscoveryTally {
    /// Hop counts of every resolved request.
    pub all: CountStats,
    /// Hop counts of cache-served requests.
    pub cache: CountStats,
    /// Hop counts of server-served requests.
    pub server: CountStats,
    pub server_share: Proportion,
    /// Resolved requests by hop count, both sources.
    pub hop_histogram: Vec<u64>,
    /// Cache-served requests by hop count.
    pub cache_hop_histogram: Vec<u64>,
}

impl DiscoveryTally {
    pub fn record(&mut self, out: &DiscoveryOutcome) {
        let hops = out.hops as u64;
        self.all.push(hops);
        stats::bump(&mut self.hop_histogram, out.hops);
        match out.source {
            Source::Server => {
                self.server.push(hops);
                self.server_share.record(true);
            }
            Source::Cache(_) => {
                self.cache.push(hops);
                self.server_share.record(false);
                stats::bump(&mut self.cache_hop_histogram, out.hops);
            }
        }
    }

    pub fn merge(&mut self, other: DiscoveryTally) {
        self.all.merge(&other.all);
        self.cache.merge(&other.cache);
        self.server.merge(&other.server);
        self.server_share.merge(&other.server_share);
        stats::merge_histogram(&mut self.hop_histogram, &other.hop_histogram);
        stats::merge_histogram(&mut self.cache_hop_histogram, &other.cache_hop_histogram);
    }

    pub fn requests(&self) -> u64 {
        self.all.count
    }
}

/// Load statistics over synchronized request epochs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoadTally {
    /// Busiest node's served-request count, one entry per epoch.
    pub max_load: Vec<u64>,
    /// Holders by number of requests served, pooled over epochs.
    pub load_histogram: Vec<u64>,
    /// Server-served requests per epoch.
    pub server_load: CountStats,
    /// Requests issued per epoch.
    pub epoch_requests: CountStats,
    /// Sum over requests of intermediate hops, per epoch.
    pub relay_transits: CountStats,
}

impl LoadTally {
    fn merge(&mut self, other: LoadTally) {
        self.max_load.extend(other.max_load);
        stats::merge_histogram(&mut self.load_histogram, &other.load_histogram);
        self.server_load.merge(&other.server_load);
        self.epoch_requests.merge(&other.epoch_requests);
        self.relay_transits.merge(&other.relay_transits);
    }
}

/// Aggregated Monte Carlo output for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub scenario: Scenario,
    pub trials: usize,
    pub seed: u64,
    /// Trials in which no node lacked the content.
    pub zero_request_trials: u64,
    pub discovery: DiscoveryTally,
    /// Present for epoch-based runs.
    pub load: Option<LoadTally>,
    /// Relay units (grid nodes or cells) used to normalise relay load.
    pub relay_units: usize,
}

impl MetricsReport {
    /// Mean hop count over cache-served requests.
    pub fn h_bar_cond(&self) -> Estimate {
        self.discovery.cache.estimate()
    }

    /// Mean hop count over all requests, server-served included.
    pub fn h_bar_uncond(&self) -> Estimate {
        self.discovery.all.estimate()
    }

    /// Mean hop count of server-served requests.
    pub fn server_hops(&self) -> Estimate {
        self.discovery.server.estimate()
    }

    pub fn p_s(&self) -> Estimate {
        self.discovery.server_share.estimate()
    }

    pub fn hop_histogram(&self) -> &[u64] {
        &self.discovery.hop_histogram
    }

    /// Median over epochs of the busiest node's load.
    pub fn max_load(&self) -> Option<u64> {
        self.load.as_ref().and_then(|l| stats::median(&l.max_load))
    }

    /// Mean relay transits per relay unit per epoch.
    pub fn relay_load(&self) -> Option<Estimate> {
        let l = self.load.as_ref()?;
        let e = l.relay_transits.estimate();
        let units = self.relay_units as f64;
        Some(Estimate {
            value: e.value / units,
            stderr: e.stderr / units,
        })
    }

    pub fn server_load(&self) -> Option<Estimate> {
        self.load.as_ref().map(|l| l.server_load.estimate())
    }
}

/// Outcome of one synchronized epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochOutcome {
    /// Requests served by each node.
    pub served: Vec<u32>,
    pub server_load: u64,
    pub requests: u64,
    pub relay_transits: u64,
    pub tally: DiscoveryTally,
}

impl EpochOutcome {
    pub fn max_load(&self) -> u64 {
        self.served.iter().copied().max().unwrap_or(0) as u64
    }

    /// Mean hop distance between source and requester.
    pub fn mean_source_distance(&self) -> f64 {
        self.tally.all.mean()
    }
}

/// Every node lacking the content requests it once; all requests are resolved
/// against the same field.
pub fn run_epoch<R: Rng + ?Sized>(
    scenario: Scenario,
    topology: &Topology,
    field: &CacheField,
    rng: &mut R,
) -> Result<EpochOutcome> {
    if field.len() != topology.node_count() {
        return Err(Error::param("field size does not match topology"));
    }
    let mut served = vec![0u32; field.len()];
    let mut out = EpochOutcome {
        served: Vec::new(),
        server_load: 0,
        requests: 0,
        relay_transits: 0,
        tally: DiscoveryTally::default(),
    };
    for v in (0..field.len()).filter(|&v| !field.get(v)) {
        let d = discover(scenario, topology, field, v, rng)?;
        #[cfg(debug_assertions)]
        if let (Scenario::GridFlooding, Topology::Grid(g), Source::Cache(_)) =
            (scenario, topology, d.source)
        {
            debug_assert!(no_holder_within(g, field, v, d.hops - 1));
        }
        match d.source {
            Source::Cache(u) => served[u] += 1,
            Source::Server => out.server_load += 1,
        }
        out.requests += 1;
        out.relay_transits += d.hops.saturating_sub(1) as u64;
        out.tally.record(&d);
    }
    out.served = served;
    Ok(out)
}

/// No holder other than `v` within Manhattan radius `radius`, by scanning the
/// bounding box.
#[cfg(debug_assertions)]
fn no_holder_within(g: &GridTopology, field: &CacheField, v: usize, radius: usize) -> bool {
    let (x, y) = g.coords(v);
    let side = g.side();
    let (x0, x1) = (x.saturating_sub(radius), (x + radius).min(side - 1));
    let (y0, y1) = (y.saturating_sub(radius), (y + radius).min(side - 1));
    for yy in y0..=y1 {
        for xx in x0..=x1 {
            let u = g.node_at(xx, yy);
            if u != v && x.abs_diff(xx) + y.abs_diff(yy) <= radius && field.get(u) {
                return false;
            }
        }
    }
    true
}

fn check_topology(cfg: &ScenarioConfig, topology: &Topology) -> Result<()> {
    cfg.validate()?;
    match (cfg.scenario.is_grid(), topology) {
        (true, Topology::Grid(_)) | (false, Topology::Random(_)) => Ok(()),
        _ => Err(Error::param(format!(
            "scenario {} does not run on this topology",
            cfg.scenario
        ))),
    }
}

fn draw_field(cfg: &ScenarioConfig, n: usize, rng: &mut SimRng) -> Result<CacheField> {
    match cfg.field {
        FieldModel::Snapshot => Ok(field::bernoulli_field(n, cfg.rho(), rng)),
        FieldModel::Ctmc { horizon } => field::ctmc_field(n, cfg.lambda, cfg.mu, horizon, rng),
    }
}

fn eligible_requesters(cfg: &ScenarioConfig, topology: &Topology) -> Result<Option<Vec<usize>>> {
    match cfg.requesters {
        RequesterPolicy::Uniform => Ok(None),
        RequesterPolicy::Interior { margin } => {
            let Topology::Grid(g) = topology else {
                return Err(Error::param("interior requesters need a grid topology"));
            };
            let nodes: Vec<usize> = (0..g.node_count())
                .filter(|&v| g.boundary_margin(v) >= margin)
                .collect();
            if nodes.is_empty() {
                return Err(Error::param(format!("no node is {margin} steps from the boundary")));
            }
            Ok(Some(nodes))
        }
    }
}

/// Single-requester discovery trials. See [`estimate_discovery_metrics_with`].
pub fn estimate_discovery_metrics(cfg: &ScenarioConfig, topology: &Topology) -> Result<MetricsReport> {
    estimate_discovery_metrics_with(cfg, topology, Execution::default())
}

/// Each trial draws a requester among the eligible nodes lacking the content
/// and resolves one discovery. Snapshot fields are sampled lazily along the
/// query, which leaves the other flags i.i.d. given the requester. CTMC fields
/// are drawn in full and the requester is picked among the empty nodes.
pub fn estimate_discovery_metrics_with(
    cfg: &ScenarioConfig,
    topology: &Topology,
    exec: Execution,
) -> Result<MetricsReport> {
    check_topology(cfg, topology)?;
    let eligible = eligible_requesters(cfg, topology)?;
    let n = topology.node_count();
    let rho = cfg.rho();

    let trial = |acc: &mut (DiscoveryTally, u64), t: usize| -> Result<()> {
        let mut rng = stream_rng(cfg.seed, 2 * t as u64);
        let field_rng = stream_rng(cfg.seed, 2 * t as u64 + 1);
        let pick = |rng: &mut SimRng| match &eligible {
            Some(nodes) => nodes[rng.random_range(0..nodes.len())],
            None => rng.random_range(0..n),
        };
        let out = match cfg.field {
            FieldModel::Snapshot => {
                let v = pick(&mut rng);
                let mut field = LazyField::new(rho, field_rng);
                field.fix(v, false);
                discover(cfg.scenario, topology, &mut field, v, &mut rng)?
            }
            FieldModel::Ctmc { .. } => {
                let mut frng = field_rng;
                let field = draw_field(cfg, n, &mut frng)?;
                let empty: Vec<usize> = match &eligible {
                    Some(nodes) => nodes.iter().copied().filter(|&v| !field.get(v)).collect(),
                    None => (0..n).filter(|&v| !field.get(v)).collect(),
                };
                if empty.is_empty() {
                    acc.1 += 1;
                    return Ok(());
                }
                let v = empty[rng.random_range(0..empty.len())];
                discover(cfg.scenario, topology, &field, v, &mut rng)?
            }
        };
        acc.0.record(&out);
        Ok(())
    };

    if rho >= 1.0 {
        // No node ever lacks the content: every trial is request-free.
        return Ok(report(cfg, topology, DiscoveryTally::default(), cfg.trials as u64, None));
    }
    let (tally, zero, err) = fold_blocks(
        exec,
        cfg.trials,
        || (DiscoveryTally::default(), 0u64, None),
        |acc: &mut (DiscoveryTally, u64, Option<Error>), t| {
            if acc.2.is_some() {
                return;
            }
            let mut inner = (std::mem::take(&mut acc.0), acc.1);
            if let Err(e) = trial(&mut inner, t) {
                acc.2 = Some(e);
            }
            acc.0 = inner.0;
            acc.1 = inner.1;
        },
        |a, b| {
            a.0.merge(b.0);
            a.1 += b.1;
            if a.2.is_none() {
                a.2 = b.2;
            }
        },
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(report(cfg, topology, tally, zero, None))
}

fn report(
    cfg: &ScenarioConfig,
    topology: &Topology,
    discovery: DiscoveryTally,
    zero_request_trials: u64,
    load: Option<LoadTally>,
) -> MetricsReport {
    MetricsReport {
        scenario: cfg.scenario,
        trials: cfg.trials,
        seed: cfg.seed,
        zero_request_trials,
        discovery,
        load,
        relay_units: topology.relay_units(),
    }
}

/// Synchronized request epochs, one per trial.
pub fn estimate_serving_load(cfg: &ScenarioConfig, topology: &Topology) -> Result<MetricsReport> {
    estimate_serving_load_with(cfg, topology, Execution::default())
}

pub fn estimate_serving_load_with(
    cfg: &ScenarioConfig,
    topology: &Topology,
    exec: Execution,
) -> Result<MetricsReport> {
    check_topology(cfg, topology)?;
    let n = topology.node_count();
    let epochs = map_indexed(exec, cfg.trials, |t| -> Result<EpochOutcome> {
        let mut rng = stream_rng(cfg.seed, 2 * t as u64);
        let mut field_rng = stream_rng(cfg.seed, 2 * t as u64 + 1);
        let field = draw_field(cfg, n, &mut field_rng)?;
        let mut epoch = run_epoch(cfg.scenario, topology, &field, &mut rng)?;
        // Only holders can serve; keep their loads for the histogram.
        let holders: Vec<u32> = (0..n).filter(|&v| field.get(v)).map(|v| epoch.served[v]).collect();
        epoch.served = holders;
        Ok(epoch)
    });
    let mut discovery = DiscoveryTally::default();
    let mut load = LoadTally::default();
    let mut zero = 0;
    for epoch in epochs {
        let epoch = epoch?;
        if epoch.requests == 0 {
            zero += 1;
        }
        let mut part = LoadTally {
            max_load: vec![epoch.max_load()],
            ..LoadTally::default()
        };
        for &s in &epoch.served {
            stats::bump(&mut part.load_histogram, s as usize);
        }
        part.server_load.push(epoch.server_load);
        part.epoch_requests.push(epoch.requests);
        part.relay_transits.push(epoch.relay_transits);
        load.merge(part);
        discovery.merge(epoch.tally);
    }
    Ok(report(cfg, topology, discovery, zero, Some(load)))
}

/// Throughput supported by the simulated request mix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    pub gamma: f64,
    /// Mean source-to-requester hops over all epoch requests.
    pub mean_source_distance: Estimate,
    pub transport_capacity: f64,
}

/// `transport_capacity / (n (1 - rho) * mean source distance)` with the
/// distance averaged over epoch requests.
pub fn estimate_supported_throughput(cfg: &ScenarioConfig, topology: &Topology) -> Result<ThroughputEstimate> {
    let report = estimate_serving_load(cfg, topology)?;
    throughput_from_report(cfg, &report)
}

pub fn throughput_from_report(cfg: &ScenarioConfig, report: &MetricsReport) -> Result<ThroughputEstimate> {
    let dist = report.h_bar_uncond();
    supported_throughput(cfg.scenario, cfg.n, cfg.rho(), cfg.w_bandwidth, dist)
}

/// Throughput implied by a measured mean source distance.
pub fn supported_throughput(
    scenario: Scenario,
    n: usize,
    rho: f64,
    w_bandwidth: f64,
    mean_source_distance: Estimate,
) -> Result<ThroughputEstimate> {
    if !(mean_source_distance.value > 0.0) {
        return Err(Error::param(
            "no request travelled any distance; throughput is unbounded",
        ));
    }
    let capacity = transport_capacity(scenario, n, w_bandwidth);
    Ok(ThroughputEstimate {
        gamma: capacity / (n as f64 * (1.0 - rho) * mean_source_distance.value),
        mean_source_distance,
        transport_capacity: capacity,
    })
}
