use crate::config::perfect_square_root;
use crate::error::{Error, Result};

/// Square lattice of `side * side` nodes. Node `i` sits at
/// `(i % side, i / side)`; the server is attached to the middle node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridTopology {
    side: usize,
    server: usize,
}

impl GridTopology {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::param(format!("grid needs n >= 4, got {n}")));
        }
        let side = perfect_square_root(n).ok_or_else(|| {
            Error::param(format!(
                "grid needs a perfect-square n, got {n} (nearest valid: {})",
                crate::config::nearest_perfect_square(n)
            ))
        })?;
        let c = side / 2;
        Ok(GridTopology {
            side,
            server: c * side + c,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn node_count(&self) -> usize {
        self.side * self.side
    }

    pub fn server(&self) -> usize {
        self.server
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % self.side, v / self.side)
    }

    pub fn node_at(&self, x: usize, y: usize) -> usize {
        y * self.side + x
    }

    pub(crate) fn check(&self, v: usize) -> Result<()> {
        if v >= self.node_count() {
            return Err(Error::param(format!(
                "node {v} outside grid of {} nodes",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Manhattan distance; no validity check.
    pub fn manhattan(&self, a: usize, b: usize) -> usize {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        ax.abs_diff(bx) + ay.abs_diff(by)
    }

    pub fn hop_distance(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.manhattan(a, b))
    }

    pub fn server_distance(&self, v: usize) -> usize {
        self.manhattan(v, self.server)
    }

    /// Shortest staircase from `v` to the server, x-axis first. Excludes `v`,
    /// ends at the server node.
    pub fn path_to_server(&self, v: usize) -> Vec<usize> {
        let (mut x, mut y) = self.coords(v);
        let (sx, sy) = self.coords(self.server);
        let mut path = Vec::with_capacity(self.server_distance(v));
        while x != sx {
            x = if x < sx { x + 1 } else { x - 1 };
            path.push(self.node_at(x, y));
        }
        while y != sy {
            y = if y < sy { y + 1 } else { y - 1 };
            path.push(self.node_at(x, y));
        }
        path
    }

    /// Nodes at Manhattan distance exactly `radius` from `v` that lie inside
    /// the grid, in lexicographic `(x, y)` order.
    pub fn ring(&self, v: usize, radius: usize) -> impl Iterator<Item = usize> + '_ {
        let (x, y) = self.coords(v);
        let (x, y, r) = (x as isize, y as isize, radius as isize);
        let side = self.side as isize;
        (-r..=r).flat_map(move |dx| {
            let rem = r - dx.abs();
            let dys: &[isize] = if rem == 0 { &[0] } else { &[-1, 1] };
            dys.iter().filter_map(move |&sign| {
                let (nx, ny) = (x + dx, y + sign * rem);
                (nx >= 0 && ny >= 0 && nx < side && ny < side)
                    .then(|| (ny * side + nx) as usize)
            })
        })
    }

    /// Largest Manhattan distance from `v` to any grid node.
    pub fn eccentricity(&self, v: usize) -> usize {
        let (x, y) = self.coords(v);
        x.max(self.side - 1 - x) + y.max(self.side - 1 - y)
    }

    /// Lattice steps from `v` to the nearest boundary row or column.
    pub fn boundary_margin(&self, v: usize) -> usize {
        let (x, y) = self.coords(v);
        x.min(y).min(self.side - 1 - x).min(self.side - 1 - y)
    }

    pub fn mean_server_distance(&self) -> f64 {
        grid_mean_server_distance(self.side)
    }

    pub fn max_server_distance(&self) -> usize {
        self.eccentricity(self.server)
    }
}

/// Mean Manhattan distance from a uniformly chosen node to the middle node
/// of a `side * side` lattice.
pub fn grid_mean_server_distance(side: usize) -> f64 {
    let c = side / 2;
    let axis: usize = (0..side).map(|x| x.abs_diff(c)).sum();
    2.0 * axis as f64 / side as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three() {
        let g = GridTopology::new(9).unwrap();
        assert_eq!(g.side(), 3);
        assert_eq!(g.coords(g.server()), (1, 1));
        assert_eq!(g.max_server_distance(), 2);
        assert!((g.mean_server_distance() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn large_grid_server() {
        let g = GridTopology::new(10_000).unwrap();
        assert_eq!(g.coords(g.server()), (50, 50));
        assert!(GridTopology::new(10).is_err());
        assert!(GridTopology::new(1).is_err());
    }

    #[test]
    fn manhattan_and_identity() {
        let g = GridTopology::new(100).unwrap();
        let a = g.node_at(0, 0);
        let b = g.node_at(3, 4);
        assert_eq!(g.hop_distance(a, b).unwrap(), 7);
        assert_eq!(g.hop_distance(b, b).unwrap(), 0);
        assert!(g.hop_distance(a, 100).is_err());
    }

    #[test]
    fn corner_paths() {
        let g = GridTopology::new(9).unwrap();
        let p = g.path_to_server(g.node_at(0, 0));
        assert_eq!(p, vec![g.node_at(1, 0), g.node_at(1, 1)]);
        assert!(g.path_to_server(g.server()).is_empty());

        let g = GridTopology::new(101 * 101).unwrap();
        assert_eq!(g.path_to_server(0).len(), 100);
        assert_eq!(g.max_server_distance(), 100);
    }

    #[test]
    fn ring_sizes_and_order() {
        let g = GridTopology::new(21 * 21).unwrap();
        let c = g.server();
        for r in 1..=10 {
            let ring: Vec<_> = g.ring(c, r).collect();
            assert_eq!(ring.len(), 4 * r);
            assert!(ring.iter().all(|&u| g.manhattan(u, c) == r));
            let coords: Vec<_> = ring.iter().map(|&u| g.coords(u)).collect();
            assert!(coords.windows(2).all(|w| w[0] < w[1]));
        }
        // Truncated at a corner: only the quarter that fits.
        assert_eq!(g.ring(0, 3).count(), 4);
        assert_eq!(g.ring(c, 0).collect::<Vec<_>>(), vec![c]);
    }

    #[test]
    fn mean_distance_matches_enumeration() {
        for side in [2usize, 3, 4, 7, 10, 31] {
            let g = GridTopology::new(side * side).unwrap();
            let total: usize = (0..g.node_count()).map(|v| g.server_distance(v)).sum();
            let brute = total as f64 / g.node_count() as f64;
            assert!((g.mean_server_distance() - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_distances_converge() {
        // h_max / side -> 1 and mean / side -> 1/2 from below.
        let mut prev = (0.0, 0.0);
        for side in [11usize, 31, 101, 301] {
            let g = GridTopology::new(side * side).unwrap();
            let s = side as f64;
            let cur = (g.max_server_distance() as f64 / s, g.mean_server_distance() / s);
            assert!(cur.0 > prev.0 && cur.1 > prev.1);
            prev = cur;
        }
        assert!((prev.0 - 1.0).abs() < 0.01);
        assert!((prev.1 - 0.5).abs() < 0.01);
    }
}
