//! Content discovery over a possession snapshot: path-wise search on the
//! grid, ring search on the grid, and cell-wise path search in the random
//! network.

use std::collections::HashMap;

use rand::Rng;

use crate::config::Scenario;
use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::topology::{GridTopology, RandomCellTopology, Topology};

/// Read access to per-node possession flags. The server always holds the
/// content and is never a node flag.
pub trait Possession {
    fn holds(&mut self, node: usize) -> bool;
}

impl<T: Possession + ?Sized> Possession for &mut T {
    fn holds(&mut self, node: usize) -> bool {
        (**self).holds(node)
    }
}

/// Dense possession snapshot for the single content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheField {
    flags: Vec<bool>,
}

impl CacheField {
    pub fn new(flags: Vec<bool>) -> Self {
        CacheField { flags }
    }

    pub fn empty(n: usize) -> Self {
        CacheField { flags: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        CacheField { flags: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn get(&self, node: usize) -> bool {
        self.flags[node]
    }

    pub fn set(&mut self, node: usize, value: bool) {
        self.flags[node] = value;
    }

    pub fn holders(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }
}

impl Possession for &CacheField {
    fn holds(&mut self, node: usize) -> bool {
        self.flags[node]
    }
}

/// I.i.d. Bernoulli(rho) field whose flags are drawn the first time they are
/// read. Distributionally identical to sampling the whole field up front.
pub struct LazyField {
    rho: f64,
    rng: SimRng,
    drawn: HashMap<usize, bool>,
}

impl LazyField {
    pub fn new(rho: f64, rng: SimRng) -> Self {
        LazyField {
            rho: rho.clamp(0.0, 1.0),
            rng,
            drawn: HashMap::new(),
        }
    }

    pub fn fix(&mut self, node: usize, value: bool) {
        self.drawn.insert(node, value);
    }
}

impl Possession for LazyField {
    fn holds(&mut self, node: usize) -> bool {
        let (rho, rng) = (self.rho, &mut self.rng);
        *self.drawn.entry(node).or_insert_with(|| rng.random_bool(rho))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Cache(usize),
    Server,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscoveryOutcome {
    pub source: Source,
    /// Hops the content travels from the source to the requester.
    pub hops: usize,
    /// Nodes that received the query. Not part of any capacity figure.
    pub probed: usize,
}

impl DiscoveryOutcome {
    pub fn from_server(&self) -> bool {
        self.source == Source::Server
    }
}

/// Walks the shortest path toward the server and stops at the first holder.
/// The requester's own flag is never read.
pub fn pathwise_discover<F: Possession>(
    grid: &GridTopology,
    mut field: F,
    requester: usize,
) -> DiscoveryOutcome {
    let path = grid.path_to_server(requester);
    for (i, &u) in path.iter().enumerate() {
        if field.holds(u) {
            return DiscoveryOutcome {
                source: Source::Cache(u),
                hops: i + 1,
                probed: i + 1,
            };
        }
    }
    DiscoveryOutcome {
        source: Source::Server,
        hops: path.len(),
        probed: path.len(),
    }
}

/// Expanding ring search: the smallest radius holding any cached copy wins,
/// ties broken by lexicographically smallest `(x, y)`. Rings are truncated at
/// the grid boundary. Falls back to the server only when no node anywhere
/// holds the content.
pub fn flood_discover<F: Possession>(
    grid: &GridTopology,
    mut field: F,
    requester: usize,
) -> DiscoveryOutcome {
    let mut probed = 0;
    for radius in 1..=grid.eccentricity(requester) {
        let mut ring_size = 0;
        let mut found = None;
        for u in grid.ring(requester, radius) {
            ring_size += 1;
            if found.is_none() && field.holds(u) {
                found = Some(u);
            }
        }
        probed += ring_size;
        if let Some(u) = found {
            return DiscoveryOutcome {
                source: Source::Cache(u),
                hops: radius,
                probed,
            };
        }
    }
    DiscoveryOutcome {
        source: Source::Server,
        hops: grid.server_distance(requester),
        probed,
    }
}

/// Cell-wise path search. Hop one covers the requester's own cell and then
/// the next cell toward the server; hop `h > 1` covers the `h`-th cell on
/// the path. The source is drawn uniformly among holders of the first cell
/// that has any.
pub fn cell_pathwise_discover<F: Possession, R: Rng + ?Sized>(
    topo: &RandomCellTopology,
    mut field: F,
    requester: usize,
    rng: &mut R,
) -> DiscoveryOutcome {
    let own = topo.cell_of(requester);
    let path = topo.cell_path_to_server(own);
    let mut probed = 0;
    let mut holders = Vec::new();

    let mut scan = |cell: usize, probed: &mut usize, holders: &mut Vec<usize>| {
        holders.clear();
        for &u in topo.cell_members(cell) {
            if u == requester {
                continue;
            }
            *probed += 1;
            if field.holds(u) {
                holders.push(u);
            }
        }
    };
    let pick = |holders: &[usize], rng: &mut R| holders[rng.random_range(0..holders.len())];

    scan(own, &mut probed, &mut holders);
    if !holders.is_empty() {
        return DiscoveryOutcome {
            source: Source::Cache(pick(&holders, rng)),
            hops: 1,
            probed,
        };
    }
    for (i, &cell) in path.iter().enumerate() {
        scan(cell, &mut probed, &mut holders);
        if !holders.is_empty() {
            return DiscoveryOutcome {
                source: Source::Cache(pick(&holders, rng)),
                hops: i + 1,
                probed,
            };
        }
    }
    DiscoveryOutcome {
        source: Source::Server,
        hops: path.len(),
        probed,
    }
}

/// Runs the discovery procedure belonging to `scenario`.
pub fn discover<F: Possession, R: Rng + ?Sized>(
    scenario: Scenario,
    topology: &Topology,
    field: F,
    requester: usize,
    rng: &mut R,
) -> Result<DiscoveryOutcome> {
    match (scenario, topology) {
        (Scenario::GridPathwise, Topology::Grid(g)) => Ok(pathwise_discover(g, field, requester)),
        (Scenario::GridFlooding, Topology::Grid(g)) => Ok(flood_discover(g, field, requester)),
        (Scenario::RandomCellPathwise, Topology::Random(r)) => {
            Ok(cell_pathwise_discover(r, field, requester, rng))
        }
        _ => Err(Error::param(format!(
            "scenario {scenario} does not run on this topology"
        ))),
    }
}
