use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Columns per brick column.
pub const BRICK_WIDTH: usize = 4;

/// Lattice site: column `x`, row `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

impl Site {
    pub fn new(x: usize, y: usize) -> Self {
        Site { x, y }
    }
}

/// Brickwork graph state layout.
///
/// Brick column `b` spans lattice columns `4b ..= 4b+4`. Its bricks join
/// rows `y, y+1` with `y ≡ b (mod 2)` by vertical edges at columns `4b+2`
/// and `4b+4`, so the vertical pattern has period 8 and the paired rows
/// shift by one every 4 columns. A row pair that would reach past the last
/// row is simply absent, which handles odd row counts without padding.
#[derive(Clone, Debug, PartialEq)]
pub struct BrickworkGraph {
    n_rows: usize,
    n_cols: usize,
    edges: Vec<(Site, Site)>,
    neighbors: Vec<Vec<usize>>,
}

/// `n_rows` wires and `n_bricks` brick columns (`4·n_bricks + 1` columns).
pub fn build_brickwork(n_rows: usize, n_bricks: usize) -> Result<BrickworkGraph> {
    if n_rows == 0 || n_bricks == 0 {
        return Err(Error::InvalidArgument(format!(
            "brickwork needs at least one row and one brick column, got {n_rows}×{n_bricks}"
        )));
    }
    let n_cols = BRICK_WIDTH * n_bricks + 1;
    let mut edges = Vec::new();
    for y in 0..n_rows {
        for x in 0..n_cols - 1 {
            edges.push((Site::new(x, y), Site::new(x + 1, y)));
        }
    }
    for b in 0..n_bricks {
        for y in (b % 2..n_rows.saturating_sub(1)).step_by(2) {
            for x in [BRICK_WIDTH * b + 2, BRICK_WIDTH * b + 4] {
                edges.push((Site::new(x, y), Site::new(x, y + 1)));
            }
        }
    }
    BrickworkGraph::from_edges(n_rows, n_cols, edges)
}

impl BrickworkGraph {
    pub(crate) fn from_edges(n_rows: usize, n_cols: usize, mut edges: Vec<(Site, Site)>) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n_rows * n_cols];
        for e in &mut edges {
            if e.1 < e.0 {
                *e = (e.1, e.0);
            }
            let (a, b) = *e;
            if a == b || a.x >= n_cols || b.x >= n_cols || a.y >= n_rows || b.y >= n_rows {
                return Err(Error::InvalidArgument(format!("invalid edge {a:?}-{b:?}")));
            }
            let (ia, ib) = (a.x * n_rows + a.y, b.x * n_rows + b.y);
            if neighbors[ia].contains(&ib) {
                return Err(Error::InvalidArgument(format!("duplicate edge {a:?}-{b:?}")));
            }
            neighbors[ia].push(ib);
            neighbors[ib].push(ia);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(BrickworkGraph {
            n_rows,
            n_cols,
            edges,
            neighbors,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Brick columns, each `BRICK_WIDTH` sites wide.
    pub fn n_bricks(&self) -> usize {
        (self.n_cols - 1) / BRICK_WIDTH
    }

    /// Bricks any one row takes part in. Consecutive brick columns pair
    /// alternate row offsets, so a row joins every other column.
    pub fn bricks_per_row(&self) -> usize {
        self.n_bricks().div_ceil(2)
    }

    pub fn n_sites(&self) -> usize {
        self.n_rows * self.n_cols
    }

    /// Column-major index; this is also the measurement order.
    pub fn index(&self, site: Site) -> usize {
        site.x * self.n_rows + site.y
    }

    pub fn site(&self, index: usize) -> Site {
        Site::new(index / self.n_rows, index % self.n_rows)
    }

    pub fn cz_edges(&self) -> &[(Site, Site)] {
        &self.edges
    }

    pub fn has_edge(&self, a: Site, b: Site) -> bool {
        if a.x >= self.n_cols || a.y >= self.n_rows || b.x >= self.n_cols || b.y >= self.n_rows {
            return false;
        }
        self.neighbors[self.index(a)].contains(&self.index(b))
    }

    /// Neighbor indices of site `index`, ascending.
    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.neighbors[index]
    }

    pub fn vertical_edges(&self) -> impl Iterator<Item = &(Site, Site)> {
        self.edges.iter().filter(|(a, b)| a.x == b.x)
    }
}
