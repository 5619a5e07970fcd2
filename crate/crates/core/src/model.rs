//! Two-state cache occupancy: a node holds the content (state 1) or not
//! (state 0). It fetches at rate `lambda` while empty and the copy expires at
//! rate `mu`.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::config::Scenario;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, SimRng};

fn check_rates(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) || !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::param(format!(
            "rates must be positive and finite (lambda={lambda}, mu={mu})"
        )));
    }
    Ok(())
}

/// Long-run fraction of time a node holds the content, `lambda / (lambda + mu)`.
pub fn steady_state_occupancy(lambda: f64, mu: f64) -> Result<f64> {
    check_rates(lambda, mu)?;
    Ok(lambda / (lambda + mu))
}

/// One state of a sample path, entered at `last_transition_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupancyState {
    pub has_content: bool,
    pub last_transition_time: f64,
}

/// Sample path of the occupancy chain. Starts empty at time zero and yields
/// every state it enters, the initial one included.
pub struct OccupancyChain<R: Rng> {
    fetch: Exp<f64>,
    expire: Exp<f64>,
    state: Option<OccupancyState>,
    rng: R,
}

impl<R: Rng> OccupancyChain<R> {
    pub fn new(lambda: f64, mu: f64, rng: R) -> Result<Self> {
        check_rates(lambda, mu)?;
        Ok(OccupancyChain {
            fetch: Exp::new(lambda).map_err(|e| Error::param(e.to_string()))?,
            expire: Exp::new(mu).map_err(|e| Error::param(e.to_string()))?,
            state: None,
            rng,
        })
    }

    /// Time spent in `state` before the next transition.
    fn holding_time(&mut self, has_content: bool) -> f64 {
        if has_content {
            self.expire.sample(&mut self.rng)
        } else {
            self.fetch.sample(&mut self.rng)
        }
    }
}

impl<R: Rng> Iterator for OccupancyChain<R> {
    type Item = OccupancyState;

    fn next(&mut self) -> Option<OccupancyState> {
        let next = match self.state {
            None => OccupancyState {
                has_content: false,
                last_transition_time: 0.0,
            },
            Some(cur) => {
                let dwell = self.holding_time(cur.has_content);
                OccupancyState {
                    has_content: !cur.has_content,
                    last_transition_time: cur.last_transition_time + dwell,
                }
            }
        };
        self.state = Some(next);
        Some(next)
    }
}

/// Fraction of `[0, horizon]` the chain spends holding the content.
pub fn simulate_occupancy_ctmc(lambda: f64, mu: f64, horizon: f64, seed: u64) -> Result<f64> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param(format!("horizon must be positive, got {horizon}")));
    }
    let mut chain = OccupancyChain::new(lambda, mu, stream_rng(seed, 0))?;
    let mut cur = chain.next().expect("chain is infinite");
    let mut occupied = 0.0;
    loop {
        let next = chain.next().expect("chain is infinite");
        let end = next.last_transition_time.min(horizon);
        if cur.has_content {
            occupied += end - cur.last_transition_time;
        }
        if next.last_transition_time >= horizon {
            break;
        }
        cur = next;
    }
    Ok(occupied / horizon)
}

/// State at time `t` of a chain started empty at zero.
pub fn occupancy_at(lambda: f64, mu: f64, t: f64, rng: &mut SimRng) -> Result<bool> {
    let mut chain = OccupancyChain::new(lambda, mu, rng)?;
    let mut cur = chain.next().expect("chain is infinite");
    for next in chain {
        if next.last_transition_time > t {
            break;
        }
        cur = next;
    }
    Ok(cur.has_content)
}

/// Occupancy order separating the cache-dominated from the server-dominated
/// regime: `n^{-1/2}` on the grid, `1 / ln n` in the random network.
pub fn occupancy_threshold(scenario: Scenario, n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::param(format!("n must be at least 4, got {n}")));
    }
    let n = n as f64;
    Ok(match scenario {
        Scenario::GridPathwise | Scenario::GridFlooding => n.powf(-0.5),
        Scenario::RandomCellPathwise => 1.0 / n.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(steady_state_occupancy(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(steady_state_occupancy(7.0, 1.0).unwrap(), 0.875);
        let tiny = steady_state_occupancy(1e-4, 1.0).unwrap();
        assert!((tiny - 9.999e-5).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(steady_state_occupancy(0.0, 1.0).is_err());
        assert!(steady_state_occupancy(1.0, -1.0).is_err());
        assert!(steady_state_occupancy(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn ctmc_matches_steady_state() {
        for (lambda, mu) in [(1.0, 1.0), (7.0, 1.0)] {
            let frac = simulate_occupancy_ctmc(lambda, mu, 1e6, 11).unwrap();
            let rho = steady_state_occupancy(lambda, mu).unwrap();
            assert!((frac - rho).abs() < 0.01, "{lambda}/{mu}: {frac} vs {rho}");
        }
    }

    #[test]
    fn ctmc_rejects_empty_horizon() {
        assert!(simulate_occupancy_ctmc(1.0, 1.0, 0.0, 1).is_err());
        assert!(simulate_occupancy_ctmc(1.0, 1.0, -5.0, 1).is_err());
    }

    #[test]
    fn ctmc_is_deterministic() {
        let a = simulate_occupancy_ctmc(2.0, 3.0, 1e4, 5).unwrap();
        let b = simulate_occupancy_ctmc(2.0, 3.0, 1e4, 5).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn sample_path_alternates() {
        let chain = OccupancyChain::new(3.0, 0.5, stream_rng(3, 0)).unwrap();
        let path: Vec<_> = chain.take(10_000).collect();
        assert!(!path[0].has_content);
        assert_eq!(path[0].last_transition_time, 0.0);
        for w in path.windows(2) {
            assert_ne!(w[0].has_content, w[1].has_content);
            assert!(w[1].last_transition_time > w[0].last_transition_time);
        }
    }

    #[test]
    fn occupancy_at_time_zero_is_empty() {
        let mut rng = stream_rng(1, 0);
        assert!(!occupancy_at(5.0, 1.0, 0.0, &mut rng).unwrap());
    }

    #[test]
    fn thresholds() {
        assert!((occupancy_threshold(Scenario::GridPathwise, 10_000).unwrap() - 0.01).abs() < 1e-15);
        assert_eq!(occupancy_threshold(Scenario::GridFlooding, 4).unwrap(), 0.5);
        let n = 10f64.exp().round() as usize;
        let t = occupancy_threshold(Scenario::RandomCellPathwise, n).unwrap();
        assert!((t - 0.1).abs() < 1e-4);
        assert!(occupancy_threshold(Scenario::GridPathwise, 3).is_err());
    }

    proptest! {
        #[test]
        fn ratio_invariance(lambda in 1e-3f64..1e3, mu in 1e-3f64..1e3, k in 1e-3f64..1e3) {
            let a = steady_state_occupancy(lambda, mu).unwrap();
            let b = steady_state_occupancy(k * lambda, k * mu).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!(a > 0.0 && a < 1.0);
        }

        #[test]
        fn monotone_in_rates(lambda in 1e-3f64..1e3, mu in 1e-3f64..1e3) {
            let base = steady_state_occupancy(lambda, mu).unwrap();
            prop_assert!(steady_state_occupancy(lambda * 1.5, mu).unwrap() >= base);
            prop_assert!(steady_state_occupancy(lambda, mu * 1.5).unwrap() <= base);
        }
    }
}
