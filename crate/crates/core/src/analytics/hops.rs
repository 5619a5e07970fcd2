use super::{check_n, check_rho, lattice_side, miss_pow};
use crate::config::Scenario;
use crate::error::{Error, Result};
use crate::topology::cell_grid_side;

/// Leading-order hop exponent of ring search as reported for the flooding
/// scenario.
pub const FLOODING_EXPONENT: f64 = 0.4646;

/// `sum_{h=1}^{terms} h rho (1-rho)^(h-1)`, term by term.
pub fn path_search_hops(rho: f64, terms: usize) -> f64 {
    (1..=terms)
        .map(|h| h as f64 * rho * miss_pow(rho, (h - 1) as f64))
        .sum()
}

/// Closed form of [`path_search_hops`]:
/// `(1 - (N+1) q^N + N q^(N+1)) / rho`.
pub fn path_search_hops_closed_form(rho: f64, terms: usize) -> f64 {
    let n = terms as f64;
    let q_n = miss_pow(rho, n);
    (1.0 - (n + 1.0) * q_n + n * q_n * (1.0 - rho)) / rho
}

/// Probability that ring search first succeeds at radius `h` on an
/// untruncated lattice: `(1 - q^{4h}) q^{2h(h-1)}`.
pub fn ring_search_pmf(rho: f64, h: usize) -> f64 {
    let h = h as f64;
    (1.0 - miss_pow(rho, 4.0 * h)) * miss_pow(rho, 2.0 * h * (h - 1.0))
}

/// `sum_{h=1}^{terms} h (1 - q^{4h}) prod_{k<h} q^{4k}`, using
/// `prod_{k=1}^{h-1} q^{4k} = q^{2h(h-1)}`. Stops once the survival factor
/// underflows.
pub fn ring_search_hops(rho: f64, terms: usize) -> f64 {
    let mut total = 0.0;
    for h in 1..=terms {
        let hf = h as f64;
        let survive = miss_pow(rho, 2.0 * hf * (hf - 1.0));
        if survive == 0.0 {
            break;
        }
        total += hf * (1.0 - miss_pow(rho, 4.0 * hf)) * survive;
    }
    total
}

/// `1 - q^{2 ln n} + sum_{h=2}^{floor(1/r(n))} h q^{h ln n} (1 - q^{ln n})`.
pub fn cell_search_hops(rho: f64, n: usize) -> f64 {
    let ln_n = (n as f64).ln();
    let g = cell_grid_side(n, 1.0);
    let tail: f64 = (2..=g)
        .map(|h| {
            let h = h as f64;
            h * miss_pow(rho, h * ln_n) * (1.0 - miss_pow(rho, ln_n))
        })
        .sum();
    1.0 - miss_pow(rho, 2.0 * ln_n) + tail
}

/// Mean hop distance from a requester to the discovering cache, as the
/// truncated sums are printed (tails beyond the truncation are dropped, not
/// renormalised).
pub fn expected_hops_exact(scenario: Scenario, rho: f64, n: usize) -> Result<f64> {
    check_rho(rho)?;
    check_n(n)?;
    let side = lattice_side(n);
    Ok(match scenario {
        Scenario::GridPathwise => path_search_hops(rho, side),
        Scenario::GridFlooding => ring_search_hops(rho, side),
        Scenario::RandomCellPathwise => cell_search_hops(rho, n),
    })
}

/// [`expected_hops_exact`] divided by the probability mass its truncated
/// range covers, i.e. the mean hop count conditional on a cache within range.
pub fn expected_hops_normalized(scenario: Scenario, rho: f64, n: usize) -> Result<f64> {
    let mean = expected_hops_exact(scenario, rho, n)?;
    let side = lattice_side(n);
    let mass = match scenario {
        Scenario::GridPathwise => 1.0 - miss_pow(rho, side as f64),
        Scenario::GridFlooding => (1..=side).map(|h| ring_search_pmf(rho, h)).sum(),
        Scenario::RandomCellPathwise => {
            let ln_n = (n as f64).ln();
            let g = cell_grid_side(n, 1.0);
            1.0 - miss_pow(rho, 2.0 * ln_n)
                + (2..=g)
                    .map(|h| miss_pow(rho, h as f64 * ln_n) * (1.0 - miss_pow(rho, ln_n)))
                    .sum::<f64>()
        }
    };
    if mass <= 0.0 {
        return Err(Error::param("no probability mass inside the truncated range"));
    }
    Ok(mean / mass)
}

/// Leading-order hop count: `1/rho`, `rho^-0.4646` or `1`.
pub fn expected_hops_asymptotic(scenario: Scenario, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(match scenario {
        Scenario::GridPathwise => 1.0 / rho,
        Scenario::GridFlooding => rho.powf(-FLOODING_EXPONENT),
        Scenario::RandomCellPathwise => 1.0,
    })
}
