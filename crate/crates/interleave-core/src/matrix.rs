//! Dense matrices over [`Value`] partitioned into per-level blocks.
//!
//! Rows and columns are indexed by the vertices or edges of a mapper graph in
//! their canonical level-sorted order, so a level partition splits a matrix
//! into blocks. Structure classes record what kind of matrix a value is; they
//! are advisory metadata used for validation and reporting, the arithmetic is
//! uniform.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{DistanceTable, MapperGraph};
use crate::value::Value;

/// A partition of `0..len` into consecutive per-level blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    start_level: i64,
    /// Block start offsets plus a final sentinel equal to `len`.
    offsets: Vec<usize>,
}

impl Partition {
    pub fn new(start_level: i64, sizes: &[usize]) -> Partition {
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &s in sizes {
            acc += s;
            offsets.push(acc);
        }
        Partition { start_level, offsets }
    }

    /// Vertex partition of a graph over the full grid range.
    pub fn vertices(g: &MapperGraph) -> Partition {
        let sizes: Vec<usize> =
            g.vertex_partition_sizes().iter().map(|&(_, s)| s).collect();
        Partition::new(-g.grid().half_range(), &sizes)
    }

    /// Edge partition of a graph over the full grid range.
    pub fn edges(g: &MapperGraph) -> Partition {
        let sizes: Vec<usize> = g.edge_partition_sizes().iter().map(|&(_, s)| s).collect();
        Partition::new(-g.grid().half_range(), &sizes)
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn start_level(&self) -> i64 {
        self.start_level
    }

    /// Half-open index range of the block at `level`.
    pub fn block(&self, level: i64) -> core::ops::Range<usize> {
        let k = (level - self.start_level) as usize;
        self.offsets[k]..self.offsets[k + 1]
    }

    pub fn levels(&self) -> impl Iterator<Item = i64> + '_ {
        self.start_level..self.start_level + self.block_count() as i64
    }

    /// Level of the block containing index `i`.
    pub fn level_of(&self, i: usize) -> i64 {
        let k = self.offsets.partition_point(|&o| o <= i) - 1;
        self.start_level + k as i64
    }
}

/// What a matrix represents; checked by [`BlockMatrix::check_class`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureClass {
    /// 0/1, at most two ones per column (a boundary half has exactly one).
    Boundary,
    /// 0/1, exactly one 1 per column, level preserving.
    Inclusion,
    /// Symmetric, zero diagonal, zero outside the diagonal blocks;
    /// `Unbounded` marks in-block pairs that never merge.
    Distance,
    /// 0/1, exactly one 1 per column, level preserving, free rows.
    Assignment,
    General,
}

/// A dense matrix over [`Value`] with row and column level partitions.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    rows: Partition,
    cols: Partition,
    class: StructureClass,
    data: Vec<Value>,
}

impl BlockMatrix {
    pub fn zero(rows: Partition, cols: Partition, class: StructureClass) -> BlockMatrix {
        let data = vec![Value::ZERO; rows.len() * cols.len()];
        BlockMatrix { rows, cols, class, data }
    }

    /// Upper boundary of a graph: rows are vertices, columns are edges, a 1
    /// at the upper endpoint of each edge.
    pub fn boundary_up(g: &MapperGraph) -> BlockMatrix {
        let mut m = BlockMatrix::zero(
            Partition::vertices(g),
            Partition::edges(g),
            StructureClass::Boundary,
        );
        for e in 0..g.edge_count() {
            let (_, up) = g.edge(e);
            m.set(up, e, Value::Fin(1));
        }
        m
    }

    /// Lower boundary: a 1 at the lower endpoint of each edge.
    pub fn boundary_down(g: &MapperGraph) -> BlockMatrix {
        let mut m = BlockMatrix::zero(
            Partition::vertices(g),
            Partition::edges(g),
            StructureClass::Boundary,
        );
        for e in 0..g.edge_count() {
            let (down, _) = g.edge(e);
            m.set(down, e, Value::Fin(1));
        }
        m
    }

    /// Full boundary `B = B_up + B_down`.
    pub fn boundary(g: &MapperGraph) -> BlockMatrix {
        let mut m = BlockMatrix::boundary_up(g);
        for e in 0..g.edge_count() {
            let (down, _) = g.edge(e);
            m.set(down, e, Value::Fin(1));
        }
        m
    }

    /// Column-one-hot matrix of a map `j -> target[j]`, rows partitioned by
    /// `rows`, columns by `cols`.
    pub fn from_map(
        rows: Partition,
        cols: Partition,
        target: &[usize],
        class: StructureClass,
    ) -> BlockMatrix {
        assert_eq!(cols.len(), target.len());
        let mut m = BlockMatrix::zero(rows, cols, class);
        for (j, &i) in target.iter().enumerate() {
            m.set(i, j, Value::Fin(1));
        }
        m
    }

    /// Vertex distance matrix: block diagonal with the per-level merge
    /// distances, zero between distinct levels.
    pub fn distance_vertices(g: &MapperGraph, table: &DistanceTable) -> BlockMatrix {
        let part = Partition::vertices(g);
        let mut m = BlockMatrix::zero(part.clone(), part, StructureClass::Distance);
        for level in table.vertex_levels() {
            let block = m.rows.block(level);
            for (a, i) in block.clone().enumerate() {
                for (b, j) in block.clone().enumerate() {
                    let v = table.vertex_block(level).get(a, b);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// Edge distance matrix, same layout over the edge partition.
    pub fn distance_edges(g: &MapperGraph, table: &DistanceTable) -> BlockMatrix {
        let part = Partition::edges(g);
        let mut m = BlockMatrix::zero(part.clone(), part, StructureClass::Distance);
        for level in table.edge_levels() {
            let block = m.rows.block(level);
            for (a, i) in block.clone().enumerate() {
                for (b, j) in block.clone().enumerate() {
                    let v = table.edge_block(level).get(a, b);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> &Partition {
        &self.rows
    }

    pub fn cols(&self) -> &Partition {
        &self.cols
    }

    pub fn class(&self) -> StructureClass {
        self.class
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Value {
        self.data[i * self.cols.len() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Value) {
        let n = self.cols.len();
        self.data[i * n + j] = v;
    }

    /// For a column-one-hot matrix, the row carrying the 1 in column `j`.
    pub fn column_target(&self, j: usize) -> Option<usize> {
        let mut hit = None;
        for i in 0..self.nrows() {
            if !self.get(i, j).is_zero() {
                if hit.is_some() || self.get(i, j) != Value::Fin(1) {
                    return None;
                }
                hit = Some(i);
            }
        }
        hit
    }

    pub fn mul(&self, rhs: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.ncols(), rhs.nrows());
        let mut out = BlockMatrix::zero(
            self.rows.clone(),
            rhs.cols.clone(),
            StructureClass::General,
        );
        for i in 0..self.nrows() {
            for k in 0..self.ncols() {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.ncols() {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * rhs.get(k, j));
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.nrows(), rhs.nrows());
        assert_eq!(self.ncols(), rhs.ncols());
        let mut out = self.clone();
        out.class = StructureClass::General;
        for (a, &b) in out.data.iter_mut().zip(&rhs.data) {
            *a = *a - b;
        }
        out
    }

    /// Largest entry; `Unbounded` dominates.
    pub fn max_entry(&self) -> Value {
        self.data.iter().copied().max().unwrap_or(Value::ZERO)
    }

    /// Verify the invariants promised by the structure class.
    pub fn check_class(&self) -> Result<(), String> {
        match self.class {
            StructureClass::Boundary => {
                for j in 0..self.ncols() {
                    let mut ones = 0;
                    for i in 0..self.nrows() {
                        match self.get(i, j) {
                            Value::Fin(0) => {}
                            Value::Fin(1) => ones += 1,
                            v => return Err(format!("boundary entry {v} at ({i}, {j})")),
                        }
                    }
                    if ones == 0 || ones > 2 {
                        return Err(format!("boundary column {j} has {ones} ones"));
                    }
                }
            }
            StructureClass::Inclusion | StructureClass::Assignment => {
                for j in 0..self.ncols() {
                    let Some(i) = self.column_target(j) else {
                        return Err(format!("column {j} is not one-hot"));
                    };
                    if self.rows.level_of(i) != self.cols.level_of(j) {
                        return Err(format!(
                            "column {j} maps across levels ({} -> {})",
                            self.cols.level_of(j),
                            self.rows.level_of(i)
                        ));
                    }
                }
            }
            StructureClass::Distance => {
                if self.nrows() != self.ncols() {
                    return Err(String::from("distance matrix is not square"));
                }
                for i in 0..self.nrows() {
                    if !self.get(i, i).is_zero() {
                        return Err(format!("nonzero diagonal at {i}"));
                    }
                    for j in 0..self.ncols() {
                        if self.get(i, j) != self.get(j, i) {
                            return Err(format!("asymmetry at ({i}, {j})"));
                        }
                        if self.get(i, j) < Value::ZERO {
                            return Err(format!("negative entry at ({i}, {j})"));
                        }
                    }
                }
            }
            StructureClass::General => {}
        }
        Ok(())
    }

    /// CSV dump, one row per line, `inf` for unbounded entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn single_edge() -> MapperGraph {
        let grid = Grid::new(1.0, 1).unwrap();
        MapperGraph::from_parts(grid, vec![0, 1], vec![(0, 1)]).unwrap()
    }

    #[test]
    fn boundary_of_single_edge() {
        let g = single_edge();
        let up = BlockMatrix::boundary_up(&g);
        assert_eq!((up.nrows(), up.ncols()), (2, 1));
        assert_eq!(up.get(1, 0), Value::Fin(1));
        assert_eq!(up.get(0, 0), Value::ZERO);
        let b = BlockMatrix::boundary(&g);
        assert_eq!(b.get(0, 0), Value::Fin(1));
        assert_eq!(b.get(1, 0), Value::Fin(1));
        up.check_class().unwrap();
        b.check_class().unwrap();
    }

    #[test]
    fn partition_lookup() {
        let p = Partition::new(-2, &[1, 0, 2, 3]);
        assert_eq!(p.len(), 6);
        assert_eq!(p.block(-2), 0..1);
        assert_eq!(p.block(-1), 1..1);
        assert_eq!(p.block(0), 1..3);
        assert_eq!(p.level_of(0), -2);
        assert_eq!(p.level_of(2), 0);
        assert_eq!(p.level_of(5), 1);
    }

    #[test]
    fn distance_matrix_blocks() {
        let grid = Grid::new(1.0, 2).unwrap();
        let g = MapperGraph::from_parts(
            grid,
            vec![0, 1, 1, 2],
            vec![(0, 1), (0, 2), (1, 3)],
        )
        .unwrap();
        let t = g.distance_tables();
        let d = BlockMatrix::distance_vertices(&g, &t);
        d.check_class().unwrap();
        assert_eq!(d.get(1, 2), Value::Fin(1));
        assert_eq!(d.get(0, 1), Value::ZERO);
        assert_eq!(d.get(1, 1), Value::ZERO);
    }

    #[test]
    fn one_hot_product_selects_rows() {
        let g = single_edge();
        let b = BlockMatrix::boundary_up(&g);
        let id = BlockMatrix::from_map(
            Partition::vertices(&g),
            Partition::vertices(&g),
            &[0, 1],
            StructureClass::Inclusion,
        );
        let p = id.mul(&b);
        assert_eq!(p.get(1, 0), Value::Fin(1));
        assert_eq!(p.get(0, 0), Value::ZERO);
    }

    #[test]
    fn column_target_detects_one_hot() {
        let g = single_edge();
        let m = BlockMatrix::from_map(
            Partition::vertices(&g),
            Partition::vertices(&g),
            &[1, 1],
            StructureClass::General,
        );
        assert_eq!(m.column_target(0), Some(1));
        assert_eq!(m.column_target(1), Some(1));
        let z = BlockMatrix::zero(
            Partition::vertices(&g),
            Partition::vertices(&g),
            StructureClass::General,
        );
        assert_eq!(z.column_target(0), None);
    }

    #[test]
    fn csv_roundtrip_shape() {
        let g = single_edge();
        let b = BlockMatrix::boundary(&g);
        assert_eq!(b.to_csv(), "1\n1\n");
    }
}
