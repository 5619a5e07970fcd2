use super::{check_n, check_rho, expected_hops_exact, lattice_side, miss_pow, server_probability};
use crate::config::Scenario;
use crate::error::{Error, Result};
use crate::model::{occupancy_threshold, steady_state_occupancy};
use crate::topology::{cell_grid_side, cell_mean_server_distance, connectivity_radius, grid_mean_server_distance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    CacheDominated,
    ServerDominated,
}

/// Terms of the per-download rate bound at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityBreakdown {
    pub rho: f64,
    pub h_bar: f64,
    pub h_bar_s: f64,
    pub p_s: f64,
    pub transport_capacity: f64,
    pub gamma_max: f64,
    pub regime: Regime,
}

impl CapacityBreakdown {
    /// `(1 - p_s) h_bar + p_s h_bar_s`.
    pub fn mean_source_distance(&self) -> f64 {
        (1.0 - self.p_s) * self.h_bar + self.p_s * self.h_bar_s
    }
}

/// Aggregate bit-hops per second the network can carry: `W sqrt(n)` on the
/// grid, `W / r(n)^2 = W n / ln n` in the cell model.
pub fn transport_capacity(scenario: Scenario, n: usize, w_bandwidth: f64) -> f64 {
    match scenario {
        Scenario::GridPathwise | Scenario::GridFlooding => w_bandwidth * (n as f64).sqrt(),
        Scenario::RandomCellPathwise => w_bandwidth / connectivity_radius(n).powi(2),
    }
}

/// Mean hop distance to the server: lattice Manhattan mean on the grid, mean
/// cell-path length to the middle cell otherwise.
pub fn mean_server_hops(scenario: Scenario, n: usize) -> f64 {
    match scenario {
        Scenario::GridPathwise | Scenario::GridFlooding => grid_mean_server_distance(lattice_side(n)),
        Scenario::RandomCellPathwise => cell_mean_server_distance(cell_grid_side(n, 1.0)),
    }
}

/// Largest per-download rate such that all `n (1 - rho)` outstanding
/// downloads fit in the transport capacity.
pub fn max_throughput(
    scenario: Scenario,
    n: usize,
    rho: f64,
    w_bandwidth: f64,
) -> Result<CapacityBreakdown> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param(format!(
            "throughput needs 0 < rho < 1, got {rho}"
        )));
    }
    check_n(n)?;
    let h_bar = expected_hops_exact(scenario, rho, n)?;
    let p_s = server_probability(scenario, rho, n)?.value;
    let h_bar_s = mean_server_hops(scenario, n);
    let capacity = transport_capacity(scenario, n, w_bandwidth);
    let per_request = (1.0 - p_s) * h_bar + p_s * h_bar_s;
    let gamma_max = capacity / (n as f64 * (1.0 - rho) * per_request);
    let regime = if rho < occupancy_threshold(scenario, n)? {
        Regime::ServerDominated
    } else {
        Regime::CacheDominated
    };
    Ok(CapacityBreakdown {
        rho,
        h_bar,
        h_bar_s,
        p_s,
        transport_capacity: capacity,
        gamma_max,
        regime,
    })
}

/// Per-download rate when every request goes to the server: `W / n` on the
/// grid, `W / sqrt(n ln n)` in the cell model.
pub fn no_cache_baseline(scenario: Scenario, n: usize, w_bandwidth: f64) -> f64 {
    let nf = n as f64;
    match scenario {
        Scenario::GridPathwise | Scenario::GridFlooding => w_bandwidth / nf,
        Scenario::RandomCellPathwise => w_bandwidth / (nf * nf.ln()).sqrt(),
    }
}

/// Largest request-to-expiry ratio under which the busiest node keeps up:
/// `n ln ln n / ln n` on the grid, `ln n ln ln ln n / ln ln n` in the cell
/// model. Requires `n >= 16 > e^e`, where both are positive.
pub fn supportable_ratio_bound(scenario: Scenario, n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::param(format!(
            "supportable ratio needs n >= 16 so that ln ln ln n is defined, got {n}"
        )));
    }
    let nf = n as f64;
    let l1 = nf.ln();
    let l2 = l1.ln();
    Ok(match scenario {
        Scenario::GridPathwise | Scenario::GridFlooding => nf * l2 / l1,
        Scenario::RandomCellPathwise => l1 * l2.ln() / l2,
    })
}

/// Relation between a candidate source and a requester in the cell model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServingRelation {
    SameCell,
    /// On the requester's server path, `h` cells away.
    OnPath(usize),
    OffPath,
}

/// Probability that a given holder serves a given requester in the cell
/// model, for large `n` and moderate `rho`.
pub fn serving_probability(n: usize, rho: f64, relation: ServingRelation) -> Result<f64> {
    check_rho(rho)?;
    check_n(n)?;
    let ln_n = (n as f64).ln();
    let reach = ((n as f64) / ln_n).sqrt();
    Ok(match relation {
        ServingRelation::SameCell => 1.0 / ln_n,
        ServingRelation::OnPath(1) => miss_pow(rho, ln_n) / ln_n,
        ServingRelation::OnPath(h) if h > 1 && (h as f64) <= reach => {
            miss_pow(rho, h as f64 + ln_n) / ln_n
        }
        ServingRelation::OnPath(_) | ServingRelation::OffPath => 0.0,
    })
}

/// The serving probabilities for the common relations at one `(n, rho)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ServingTable {
    pub same_cell: f64,
    pub first_hop: f64,
    /// `(h, p)` for `h = 2 ..= floor(sqrt(n / ln n))`.
    pub further: Vec<(usize, f64)>,
    pub off_path: f64,
}

pub fn serving_probability_table(n: usize, rho: f64) -> Result<ServingTable> {
    let reach = ((n as f64) / (n as f64).ln()).sqrt().floor() as usize;
    let further = (2..=reach)
        .map(|h| Ok((h, serving_probability(n, rho, ServingRelation::OnPath(h))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ServingTable {
        same_cell: serving_probability(n, rho, ServingRelation::SameCell)?,
        first_hop: serving_probability(n, rho, ServingRelation::OnPath(1))?,
        further,
        off_path: serving_probability(n, rho, ServingRelation::OffPath)?,
    })
}

/// Requests per unit time across the network, `lambda n (1 - rho)`.
pub fn total_request_rate(n: usize, lambda: f64, mu: f64) -> Result<f64> {
    let rho = steady_state_occupancy(lambda, mu)?;
    Ok(lambda * n as f64 * (1.0 - rho))
}

/// Bits per unit time moved across the network:
/// `B lambda n (1 - rho) ((1 - p_s) h_bar + p_s h_bar_s)`.
pub fn total_traffic(n: usize, lambda: f64, mu: f64, b_content: f64, scenario: Scenario) -> Result<f64> {
    let rho = steady_state_occupancy(lambda, mu)?;
    check_n(n)?;
    let h_bar = expected_hops_exact(scenario, rho, n)?;
    let p_s = server_probability(scenario, rho, n)?.value;
    let h_bar_s = mean_server_hops(scenario, n);
    let per_request = (1.0 - p_s) * h_bar + p_s * h_bar_s;
    Ok(b_content * total_request_rate(n, lambda, mu)? * per_request)
}
