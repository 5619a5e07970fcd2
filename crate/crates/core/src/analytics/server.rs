use super::{check_n, check_rho, lattice_side, miss_pow};
use crate::config::Scenario;
use crate::error::Result;
use crate::topology::cell_grid_side;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServerProbabilityKind {
    /// `value` is the geometric mean of a two-sided bracket.
    Bracket,
    /// Only `upper` is meaningful; `value == upper`.
    UpperBound,
    /// Closed-form expression; `lower == value == upper`.
    Formula,
}

/// Probability that a request is served by the origin server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServerProbability {
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    pub kind: ServerProbabilityKind,
}

impl ServerProbability {
    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// `(1 + sum_{k=1}^{m} 4k (1-rho)^k) / n`, clamped to `[0, 1]`.
fn ring_bound(rho: f64, m: usize, n: usize) -> f64 {
    let sum: f64 = (1..=m)
        .map(|k| 4.0 * k as f64 * miss_pow(rho, k as f64))
        .sum();
    ((1.0 + sum) / n as f64).clamp(0.0, 1.0)
}

/// Server share per scenario. The grid bracket sums rings up to `h_max / 2`
/// and `h_max`, where `h_max` is the largest hop distance to the middle node.
pub fn server_probability(scenario: Scenario, rho: f64, n: usize) -> Result<ServerProbability> {
    check_rho(rho)?;
    check_n(n)?;
    let side = lattice_side(n);
    let h_max = 2 * (side / 2).max(side - 1 - side / 2);
    Ok(match scenario {
        Scenario::GridPathwise => {
            let lower = ring_bound(rho, h_max / 2, n);
            let upper = ring_bound(rho, h_max, n);
            ServerProbability {
                lower,
                upper,
                value: (lower * upper).sqrt(),
                kind: ServerProbabilityKind::Bracket,
            }
        }
        Scenario::GridFlooding => {
            let upper = ring_bound(rho, h_max, n);
            ServerProbability {
                lower: 0.0,
                upper,
                value: upper,
                kind: ServerProbabilityKind::UpperBound,
            }
        }
        Scenario::RandomCellPathwise => {
            let ln_n = (n as f64).ln();
            let g = cell_grid_side(n, 1.0);
            let tail: f64 = (2..=g)
                .map(|h| {
                    let h = h as f64;
                    4.0 * h * ln_n * miss_pow(rho, (h - 1.0) * ln_n)
                })
                .sum();
            let value =
                ((1.0 + 5.0 * ln_n * (1.0 - rho) + tail) / n as f64).clamp(0.0, 1.0);
            ServerProbability {
                lower: value,
                upper: value,
                value,
                kind: ServerProbabilityKind::Formula,
            }
        }
    })
}
