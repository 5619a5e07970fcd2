use rand::Rng;

use crate::discovery::CacheField;
use crate::error::{Error, Result};
use crate::model::occupancy_at;
use crate::rng::{stream_rng, SimRng};
use crate::topology::Topology;

/// I.i.d. Bernoulli(rho) possession flags, one per node.
pub fn sample_cache_field(topology: &Topology, rho: f64, seed: u64) -> Result<CacheField> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::param(format!("rho must lie in [0, 1], got {rho}")));
    }
    Ok(bernoulli_field(topology.node_count(), rho, &mut stream_rng(seed, 0)))
}

pub(crate) fn bernoulli_field(n: usize, rho: f64, rng: &mut SimRng) -> CacheField {
    CacheField::new((0..n).map(|_| rng.random_bool(rho)).collect())
}

/// Every node runs its own occupancy chain from the empty state; flags are
/// the states at `horizon`.
pub(crate) fn ctmc_field(
    n: usize,
    lambda: f64,
    mu: f64,
    horizon: f64,
    rng: &mut SimRng,
) -> Result<CacheField> {
    let flags = (0..n)
        .map(|_| occupancy_at(lambda, mu, horizon, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(CacheField::new(flags))
}
