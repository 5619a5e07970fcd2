use rand::Rng;

use crate::config::CellMode;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Transmission radius at the connectivity threshold, `sqrt(ln n / n)`.
pub fn connectivity_radius(n: usize) -> f64 {
    let n = n as f64;
    (n.ln() / n).sqrt()
}

/// Number of cells along each side of the unit square for cell side
/// `scale * connectivity_radius(n)`.
pub fn cell_grid_side(n: usize, scale: f64) -> usize {
    ((1.0 / (scale * connectivity_radius(n))).floor() as usize).max(1)
}

/// Nodes per cell in idealized mode.
pub fn idealized_cell_occupancy(n: usize) -> usize {
    (n as f64).ln().ceil() as usize
}

/// Mean cell-Manhattan distance from a uniformly chosen cell to the middle
/// cell of a `g * g` cell grid.
pub fn cell_mean_server_distance(g: usize) -> f64 {
    super::grid::grid_mean_server_distance(g)
}

/// Nodes scattered over the unit square and binned into a `g * g` grid of
/// square cells. The server sits in the middle cell.
#[derive(Debug, Clone)]
pub struct RandomCellTopology {
    n: usize,
    mode: CellMode,
    g: usize,
    positions: Vec<(f64, f64)>,
    node_cell: Vec<usize>,
    cells: Vec<Vec<usize>>,
    server_cell: usize,
}

impl RandomCellTopology {
    pub fn new(n: usize, mode: CellMode, scale: f64, seed: u64) -> Result<Self> {
        if n < 16 {
            return Err(Error::param(format!(
                "random topology needs n >= 16, got {n}"
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::param(format!("cell scale must be positive, got {scale}")));
        }
        let g = cell_grid_side(n, scale);
        let mut rng = stream_rng(seed, u64::MAX);
        let mut topo = RandomCellTopology::blank(n, mode, g);
        match mode {
            CellMode::Idealized => topo.fill_cells(idealized_cell_occupancy(n), &mut rng),
            CellMode::Empirical => {
                for _ in 0..n {
                    let p: (f64, f64) = (rng.random(), rng.random());
                    let cx = ((p.0 * g as f64) as usize).min(g - 1);
                    let cy = ((p.1 * g as f64) as usize).min(g - 1);
                    topo.push(p, cy * g + cx);
                }
            }
        }
        Ok(topo)
    }

    /// Idealized network with an explicit `g * g` cell grid and `per_cell`
    /// nodes in every cell. The nominal size is the node count.
    pub fn idealized_with_geometry(g: usize, per_cell: usize, seed: u64) -> Result<Self> {
        if g == 0 || per_cell == 0 {
            return Err(Error::param("cell grid and cell occupancy must be non-empty"));
        }
        let mut topo = RandomCellTopology::blank(g * g * per_cell, CellMode::Idealized, g);
        topo.fill_cells(per_cell, &mut stream_rng(seed, u64::MAX));
        Ok(topo)
    }

    fn blank(n: usize, mode: CellMode, g: usize) -> Self {
        let mid = g / 2;
        RandomCellTopology {
            n,
            mode,
            g,
            positions: Vec::new(),
            node_cell: Vec::new(),
            cells: vec![Vec::new(); g * g],
            server_cell: mid * g + mid,
        }
    }

    fn push(&mut self, p: (f64, f64), cell: usize) {
        self.cells[cell].push(self.positions.len());
        self.positions.push(p);
        self.node_cell.push(cell);
    }

    fn fill_cells(&mut self, per_cell: usize, rng: &mut impl Rng) {
        let g = self.g;
        let side = 1.0 / g as f64;
        for c in 0..g * g {
            let (cx, cy) = ((c % g) as f64, (c / g) as f64);
            for _ in 0..per_cell {
                let p = (
                    (cx + rng.random::<f64>()) * side,
                    (cy + rng.random::<f64>()) * side,
                );
                self.push(p, c);
            }
        }
    }

    /// Nominal network size the geometry was derived from.
    pub fn nominal_n(&self) -> usize {
        self.n
    }

    /// Nodes actually placed; differs from `nominal_n` in idealized mode.
    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn mode(&self) -> CellMode {
        self.mode
    }

    pub fn cell_grid_side(&self) -> usize {
        self.g
    }

    pub fn cell_count(&self) -> usize {
        self.g * self.g
    }

    pub fn server_cell(&self) -> usize {
        self.server_cell
    }

    pub fn position(&self, v: usize) -> (f64, f64) {
        self.positions[v]
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.node_cell[v]
    }

    pub fn cell_members(&self, cell: usize) -> &[usize] {
        &self.cells[cell]
    }

    pub fn cell_coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.g, cell / self.g)
    }

    pub(crate) fn check(&self, v: usize) -> Result<()> {
        if v >= self.node_count() {
            return Err(Error::param(format!(
                "node {v} outside topology of {} nodes",
                self.node_count()
            )));
        }
        Ok(())
    }

    pub fn cell_distance(&self, a: usize, b: usize) -> usize {
        let (ax, ay) = self.cell_coords(a);
        let (bx, by) = self.cell_coords(b);
        ax.abs_diff(bx) + ay.abs_diff(by)
    }

    /// Cell steps between the cells of two nodes.
    pub fn hop_distance(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.cell_distance(self.node_cell[a], self.node_cell[b]))
    }

    pub fn server_distance(&self, v: usize) -> usize {
        self.cell_distance(self.node_cell[v], self.server_cell)
    }

    /// Cells visited on the x-first staircase from `cell` to the server cell,
    /// excluding `cell` itself.
    pub fn cell_path_to_server(&self, cell: usize) -> Vec<usize> {
        let (mut x, mut y) = self.cell_coords(cell);
        let (sx, sy) = self.cell_coords(self.server_cell);
        let mut path = Vec::with_capacity(self.cell_distance(cell, self.server_cell));
        while x != sx {
            x = if x < sx { x + 1 } else { x - 1 };
            path.push(y * self.g + x);
        }
        while y != sy {
            y = if y < sy { y + 1 } else { y - 1 };
            path.push(y * self.g + x);
        }
        path
    }

    pub fn path_to_server(&self, v: usize) -> Vec<usize> {
        self.cell_path_to_server(self.node_cell[v])
    }

    pub fn mean_server_distance(&self) -> f64 {
        if self.positions.is_empty() {
            return 0.0;
        }
        let total: usize = (0..self.node_count()).map(|v| self.server_distance(v)).sum();
        total as f64 / self.node_count() as f64
    }

    pub fn max_server_distance(&self) -> usize {
        (0..self.cell_count())
            .filter(|&c| !self.cells[c].is_empty())
            .map(|c| self.cell_distance(c, self.server_cell))
            .max()
            .unwrap_or(0)
    }

    /// Longest cell-to-cell distance, corner to opposite corner.
    pub fn cell_diameter(&self) -> usize {
        2 * (self.g - 1)
    }
}
