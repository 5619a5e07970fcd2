//! Finite-`n` evaluation of the hop-count, server-share, capacity and load
//! expressions, plus their leading-order forms. Every Θ constant is 1.

mod capacity;
mod fit;
mod hops;
mod server;

pub use capacity::{
    max_throughput, mean_server_hops, no_cache_baseline, serving_probability,
    serving_probability_table, supportable_ratio_bound,
    total_request_rate, total_traffic, transport_capacity, CapacityBreakdown, Regime,
    ServingRelation, ServingTable,
};
pub use fit::{fit_power_exponent, PowerFit};
pub use hops::{
    cell_search_hops, expected_hops_asymptotic, expected_hops_exact, expected_hops_normalized,
    path_search_hops, path_search_hops_closed_form, ring_search_hops, ring_search_pmf,
    FLOODING_EXPONENT,
};
pub use server::{server_probability, ServerProbability, ServerProbabilityKind};

use crate::error::{Error, Result};

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho == 0.0 {
        return Err(Error::param("rho = 0: no cached copies, hop count undefined"));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::param(format!("rho must lie in (0, 1], got {rho}")));
    }
    Ok(())
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::param(format!("n must be at least 4, got {n}")));
    }
    Ok(())
}

/// `(1 - rho)^e` for a real exponent, with `0^0 = 1`.
pub(crate) fn miss_pow(rho: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if rho >= 1.0 {
        0.0
    } else {
        ((-rho).ln_1p() * e).exp()
    }
}

/// Side of the square lattice used for a nominal size `n`.
pub(crate) fn lattice_side(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    while s * s > n {
        s -= 1;
    }
    s
}
