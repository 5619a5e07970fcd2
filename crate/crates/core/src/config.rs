//! Scenario parameters shared by every module.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Network model plus content-discovery procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Grid network, query travels along the shortest path to the server.
    GridPathwise,
    /// Grid network, expanding ring search.
    GridFlooding,
    /// Uniform random placement with square cells, cell-wise path discovery.
    RandomCellPathwise,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::GridPathwise,
        Scenario::GridFlooding,
        Scenario::RandomCellPathwise,
    ];

    pub fn is_grid(self) -> bool {
        !matches!(self, Scenario::RandomCellPathwise)
    }

    /// Short label used in tables and on the command line.
    pub fn label(self) -> &'static str {
        match self {
            Scenario::GridPathwise => "grid-pathwise",
            Scenario::GridFlooding => "grid-flooding",
            Scenario::RandomCellPathwise => "random-cell",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "grid-pathwise" | "i" | "1" | "pathwise" => Ok(Scenario::GridPathwise),
            "grid-flooding" | "ii" | "2" | "flooding" => Ok(Scenario::GridFlooding),
            "random-cell" | "iii" | "3" | "random" => Ok(Scenario::RandomCellPathwise),
            other => Err(Error::param(format!("unknown scenario '{other}'"))),
        }
    }
}

/// How nodes are placed into cells in the random topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellMode {
    /// Exactly `ceil(ln n)` nodes in every cell.
    #[default]
    Idealized,
    /// `n` nodes placed i.i.d. uniformly on the unit square.
    Empirical,
}

impl fmt::Display for CellMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellMode::Idealized => "idealized",
            CellMode::Empirical => "empirical",
        })
    }
}

impl FromStr for CellMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "idealized" => Ok(CellMode::Idealized),
            "empirical" => Ok(CellMode::Empirical),
            other => Err(Error::param(format!("unknown cell mode '{other}'"))),
        }
    }
}

/// Which nodes may be drawn as requesters in discovery trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RequesterPolicy {
    /// Any node lacking the content.
    #[default]
    Uniform,
    /// Grid nodes at least `margin` lattice steps away from every boundary,
    /// so rings up to radius `margin` are never truncated.
    Interior { margin: usize },
}

/// How the per-node possession snapshot is produced.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FieldModel {
    /// Independent Bernoulli(rho) flags.
    #[default]
    Snapshot,
    /// Every node runs its own two-state chain from the empty state and the
    /// field is read off at time `horizon`.
    Ctmc { horizon: f64 },
}

/// A complete experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n: usize,
    /// Request rate of a node that lacks the content.
    pub lambda: f64,
    /// Rate at which a cached copy expires.
    pub mu: f64,
    /// Per-node channel rate in bits/s.
    pub w_bandwidth: f64,
    /// Content size in bits.
    pub b_content: f64,
    pub seed: u64,
    pub trials: usize,
    pub mode: CellMode,
    /// Cell side as a multiple of the connectivity radius.
    pub cell_scale: f64,
    pub requesters: RequesterPolicy,
    pub field: FieldModel,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: Scenario::GridPathwise,
            n: 10_000,
            lambda: 7.0,
            mu: 1.0,
            w_bandwidth: 1.0,
            b_content: 1.0,
            seed: 1,
            trials: 1_000,
            mode: CellMode::Idealized,
            cell_scale: 1.0,
            requesters: RequesterPolicy::Uniform,
            field: FieldModel::Snapshot,
        }
    }
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, n: usize) -> Self {
        ScenarioConfig {
            scenario,
            n,
            ..ScenarioConfig::default()
        }
    }

    /// Sets `lambda` so that the steady-state occupancy equals `rho` at the
    /// current `mu`.
    pub fn with_rho(mut self, rho: f64) -> Self {
        self.lambda = self.mu * rho / (1.0 - rho);
        self
    }

    pub fn rho(&self) -> f64 {
        self.lambda / (self.lambda + self.mu)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("w_bandwidth", self.w_bandwidth),
            ("b_content", self.b_content),
            ("cell_scale", self.cell_scale),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::param(format!("{name} must be positive, got {value}")));
            }
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.n < 4 {
            return Err(Error::param(format!("n must be at least 4, got {}", self.n)));
        }
        if self.scenario.is_grid() && perfect_square_root(self.n).is_none() {
            return Err(Error::param(format!(
                "grid scenarios need a perfect-square n; nearest valid is {}",
                nearest_perfect_square(self.n)
            )));
        }
        if let FieldModel::Ctmc { horizon } = self.field {
            if !(horizon > 0.0) {
                return Err(Error::param("CTMC field horizon must be positive"));
            }
        }
        Ok(())
    }
}

pub fn perfect_square_root(n: usize) -> Option<usize> {
    let root = (n as f64).sqrt().round() as usize;
    (root * root == n).then_some(root)
}

pub fn nearest_perfect_square(n: usize) -> usize {
    let root = (n as f64).sqrt();
    let lo = root.floor() as usize;
    let hi = lo + 1;
    if n - lo * lo <= hi * hi - n {
        lo * lo
    } else {
        hi * hi
    }
}
