//! Discretization of the bounded real line and thickening arithmetic.
//!
//! The line `[-L*delta, L*delta]` is cut into vertex cells at the integer
//! levels `-L..=L` and edge cells between consecutive levels. A basic open is
//! a single cell together with a thickening count; all interval arithmetic is
//! done in integer level units, `delta` is carried only for reporting the
//! geometric realization.

use core::fmt;

/// The grid: resolution `delta` and half-range `L`.
///
/// Vertex cells are indexed by `-L..=L`, edge cells by `-L..=L-1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    delta: f64,
    half_range: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridError {
    BadDelta,
    BadHalfRange,
    IndexOutOfRange { index: i64 },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::BadDelta => write!(f, "delta must be positive and finite"),
            GridError::BadHalfRange => write!(f, "half range must be at least 1"),
            GridError::IndexOutOfRange { index } => write!(f, "cell index {index} out of range"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GridError {}

impl Grid {
    pub fn new(delta: f64, half_range: i64) -> Result<Grid, GridError> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(GridError::BadDelta);
        }
        if half_range < 1 {
            return Err(GridError::BadHalfRange);
        }
        Ok(Grid { delta, half_range })
    }

    /// Grid with `delta = 1` large enough to contain the given levels.
    pub fn covering(levels: impl IntoIterator<Item = i64>) -> Grid {
        let mut l = 1;
        for level in levels {
            l = l.max(level.abs());
        }
        Grid { delta: 1.0, half_range: l }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn half_range(&self) -> i64 {
        self.half_range
    }

    pub fn vertex_level_ok(&self, i: i64) -> bool {
        (-self.half_range..=self.half_range).contains(&i)
    }

    pub fn edge_level_ok(&self, i: i64) -> bool {
        (-self.half_range..self.half_range).contains(&i)
    }

    /// Clamp an inclusive level interval to the vertex range; `None` if empty.
    pub fn clamp_levels(&self, lo: i64, hi: i64) -> Option<(i64, i64)> {
        let lo = lo.max(-self.half_range);
        let hi = hi.min(self.half_range);
        (lo <= hi).then_some((lo, hi))
    }

    /// Vertex levels covered by the `n`-thickening of the vertex cell `i`,
    /// clamped to the grid.
    pub fn vertex_window(&self, i: i64, n: u64) -> Option<(i64, i64)> {
        let n = n as i64;
        self.clamp_levels(i - n, i + n)
    }

    /// Vertex levels covered by the `n`-thickening of the edge cell `i`,
    /// clamped to the grid. Empty for `n = 0`.
    pub fn edge_window(&self, i: i64, n: u64) -> Option<(i64, i64)> {
        if n == 0 {
            return None;
        }
        let n = n as i64;
        self.clamp_levels(i - n + 1, i + n)
    }
}

/// A cell of the grid complex: a vertex level or the edge between a level and
/// the next one up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellRef {
    Vertex(i64),
    Edge(i64),
}

impl CellRef {
    pub fn index(self) -> i64 {
        match self {
            CellRef::Vertex(i) | CellRef::Edge(i) => i,
        }
    }
}

/// A thickened basic open `S_rho^n`.
///
/// Thickening past the grid boundary clamps and sets the `saturated` flag;
/// every realization stays inside `[-L*delta, L*delta]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasicOpen {
    cell: CellRef,
    thickness: u64,
    saturated: bool,
}

impl BasicOpen {
    pub fn new(grid: &Grid, cell: CellRef) -> Result<BasicOpen, GridError> {
        let ok = match cell {
            CellRef::Vertex(i) => grid.vertex_level_ok(i),
            CellRef::Edge(i) => grid.edge_level_ok(i),
        };
        if !ok {
            return Err(GridError::IndexOutOfRange { index: cell.index() });
        }
        Ok(BasicOpen { cell, thickness: 0, saturated: false })
    }

    pub fn cell(&self) -> CellRef {
        self.cell
    }

    pub fn thickness(&self) -> u64 {
        self.thickness
    }

    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// Maximum thickness whose realization still fits in the bounding box.
    fn max_thickness(&self, grid: &Grid) -> u64 {
        let l = grid.half_range();
        let m = match self.cell {
            CellRef::Vertex(i) => (i + l).min(l - i),
            CellRef::Edge(i) => (i + l).min(l - 1 - i),
        };
        m.max(0) as u64
    }

    /// Increase the thickness by `steps`, clamping at the grid boundary.
    pub fn thicken(&self, grid: &Grid, steps: u64) -> BasicOpen {
        let want = self.thickness.saturating_add(steps);
        let cap = self.max_thickness(grid);
        BasicOpen {
            cell: self.cell,
            thickness: want.min(cap),
            saturated: self.saturated || want > cap,
        }
    }

    /// Geometric realization as an open interval in function units.
    pub fn realization(&self, grid: &Grid) -> (f64, f64) {
        let d = grid.delta();
        let n = self.thickness as i64;
        match self.cell {
            CellRef::Vertex(i) => {
                // S_sigma itself realizes to U_sigma, one cell to each side.
                let r = n.max(1);
                (((i - r) as f64) * d, ((i + r) as f64) * d)
            }
            CellRef::Edge(i) => (((i - n) as f64) * d, ((i + 1 + n) as f64) * d),
        }
    }

    /// Inclusive interval of vertex levels contained in the open; `None` when
    /// the open covers no vertex level (an unthickened edge cell).
    pub fn covered_vertex_levels(&self, grid: &Grid) -> Option<(i64, i64)> {
        match self.cell {
            CellRef::Vertex(i) => grid.vertex_window(i, self.thickness),
            CellRef::Edge(i) => grid.edge_window(i, self.thickness),
        }
    }
}
