//! Network geometries: the square lattice and the random cell network.

mod grid;
mod random;

use std::io::Write;

pub use grid::{grid_mean_server_distance, GridTopology};
pub use random::{
    cell_grid_side, cell_mean_server_distance, connectivity_radius, idealized_cell_occupancy,
    RandomCellTopology,
};

use crate::config::{CellMode, ScenarioConfig};
use crate::error::{Error, Result};

/// Ordered nodes (grid) or cells (random network) from a requester to the
/// server. Excludes the requester's own position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerPath(pub Vec<usize>);

impl ServerPath {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub enum Topology {
    Grid(GridTopology),
    Random(RandomCellTopology),
}

pub fn build_grid(n: usize) -> Result<GridTopology> {
    GridTopology::new(n)
}

pub fn build_random(n: usize, mode: CellMode, seed: u64) -> Result<RandomCellTopology> {
    RandomCellTopology::new(n, mode, 1.0, seed)
}

impl Topology {
    /// Geometry for the scenario in `cfg`.
    pub fn for_config(cfg: &ScenarioConfig) -> Result<Self> {
        if cfg.scenario.is_grid() {
            Ok(Topology::Grid(GridTopology::new(cfg.n)?))
        } else {
            Ok(Topology::Random(RandomCellTopology::new(
                cfg.n,
                cfg.mode,
                cfg.cell_scale,
                cfg.seed,
            )?))
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Topology::Grid(g) => g.node_count(),
            Topology::Random(r) => r.node_count(),
        }
    }

    pub fn hop_distance(&self, a: usize, b: usize) -> Result<usize> {
        match self {
            Topology::Grid(g) => g.hop_distance(a, b),
            Topology::Random(r) => r.hop_distance(a, b),
        }
    }

    pub fn server_distance(&self, v: usize) -> usize {
        match self {
            Topology::Grid(g) => g.server_distance(v),
            Topology::Random(r) => r.server_distance(v),
        }
    }

    pub fn path_to_server(&self, v: usize) -> Result<ServerPath> {
        match self {
            Topology::Grid(g) => {
                g.check(v)?;
                Ok(ServerPath(g.path_to_server(v)))
            }
            Topology::Random(r) => {
                r.check(v)?;
                Ok(ServerPath(r.path_to_server(v)))
            }
        }
    }

    /// Mean hop distance from a uniformly chosen node to the server.
    pub fn mean_server_distance(&self) -> f64 {
        match self {
            Topology::Grid(g) => g.mean_server_distance(),
            Topology::Random(r) => r.mean_server_distance(),
        }
    }

    pub fn max_server_distance(&self) -> usize {
        match self {
            Topology::Grid(g) => g.max_server_distance(),
            Topology::Random(r) => r.max_server_distance(),
        }
    }

    /// Units that can act as relays: nodes on the grid, cells otherwise.
    pub fn relay_units(&self) -> usize {
        match self {
            Topology::Grid(g) => g.node_count(),
            Topology::Random(r) => r.cell_count(),
        }
    }

    /// Plain-text listing, one node per line: `id x y cell`. Grid cells are
    /// the nodes themselves.
    pub fn dump(&self, out: &mut impl Write) -> std::io::Result<()> {
        match self {
            Topology::Grid(g) => {
                writeln!(out, "# grid side={} server={}", g.side(), g.server())?;
                for v in 0..g.node_count() {
                    let (x, y) = g.coords(v);
                    writeln!(out, "{v} {x} {y} {v}")?;
                }
            }
            Topology::Random(r) => {
                writeln!(
                    out,
                    "# random mode={} cells={}x{} server_cell={}",
                    r.mode(),
                    r.cell_grid_side(),
                    r.cell_grid_side(),
                    r.server_cell()
                )?;
                for v in 0..r.node_count() {
                    let (x, y) = r.position(v);
                    writeln!(out, "{v} {x:.6} {y:.6} {}", r.cell_of(v))?;
                }
            }
        }
        Ok(())
    }
}

impl From<GridTopology> for Topology {
    fn from(g: GridTopology) -> Self {
        Topology::Grid(g)
    }
}

impl From<RandomCellTopology> for Topology {
    fn from(r: RandomCellTopology) -> Self {
        Topology::Random(r)
    }
}

impl TryFrom<Topology> for GridTopology {
    type Error = Error;

    fn try_from(t: Topology) -> Result<Self> {
        match t {
            Topology::Grid(g) => Ok(g),
            Topology::Random(_) => Err(Error::param("expected a grid topology")),
        }
    }
}
