//! Level-annotated mapper graphs, smoothing, and per-level merge distances.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::grid::Grid;
use crate::value::Value;

/// Union-find over `0..len` with path compression and union by size.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> UnionFind {
        UnionFind { parent: (0..len).collect(), size: vec![1; len] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, x: usize, y: usize) {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// A mapper cosheaf stored as a graph.
///
/// Vertices are grouped and sorted by level; every edge joins a vertex at its
/// own level (the lower endpoint) to one at the next level up. Multi-edges
/// are allowed, self-loops are not.
#[derive(Clone, Debug)]
pub struct MapperGraph {
    grid: Grid,
    vertex_level: Vec<i64>,
    vertex_name: Vec<String>,
    /// (lower, upper) vertex indices, sorted by the lower endpoint's level.
    edges: Vec<(usize, usize)>,
    edge_name: Vec<String>,
}

/// Result of checking a graph description against the structural invariants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub violations: Vec<String>,
    pub connected: bool,
}

impl Diagnostics {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    Invalid(Diagnostics),
    UnknownVertex(String),
    DuplicateId(String),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::Invalid(d) => {
                write!(f, "invalid mapper graph:")?;
                for v in &d.violations {
                    write!(f, " {v};")?;
                }
                Ok(())
            }
            GraphError::UnknownVertex(id) => write!(f, "edge references unknown vertex {id:?}"),
            GraphError::DuplicateId(id) => write!(f, "duplicate id {id:?}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

/// Check named vertex/edge lists against the invariants without building.
pub fn diagnose(
    grid: &Grid,
    vertices: &[(String, i64)],
    edges: &[(String, String, String)],
) -> Diagnostics {
    let mut d = Diagnostics { violations: Vec::new(), connected: true };
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, (id, level)) in vertices.iter().enumerate() {
        if index.insert(id, k).is_some() {
            d.violations.push(format!("duplicate vertex id {id:?}"));
        }
        if !grid.vertex_level_ok(*level) {
            d.violations.push(format!("vertex {id:?} level {level} out of range"));
        }
    }
    let mut eids: BTreeMap<&str, ()> = BTreeMap::new();
    let mut uf = UnionFind::new(vertices.len());
    for (id, lo, hi) in edges {
        if eids.insert(id, ()).is_some() {
            d.violations.push(format!("duplicate edge id {id:?}"));
        }
        let (a, b) = match (index.get(lo.as_str()), index.get(hi.as_str())) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                d.violations.push(format!("edge {id:?} references unknown vertex"));
                continue;
            }
        };
        if a == b {
            d.violations.push(format!("edge {id:?} is a self-loop"));
            continue;
        }
        let (la, lb) = (vertices[a].1, vertices[b].1);
        if lb != la + 1 {
            d.violations
                .push(format!("edge {id:?} spans levels {la}->{lb}, expected adjacent levels"));
        }
        if !grid.edge_level_ok(la) {
            d.violations.push(format!("edge {id:?} level {la} out of range"));
        }
        uf.union(a, b);
    }
    if !vertices.is_empty() {
        let root = uf.find(0);
        d.connected = (1..vertices.len()).all(|v| uf.find(v) == root);
    }
    d
}

impl MapperGraph {
    /// Build from named vertices and edges, sorting into the canonical
    /// level-grouped order (stable within each level).
    pub fn build(
        grid: Grid,
        vertices: Vec<(String, i64)>,
        edges: Vec<(String, String, String)>,
    ) -> Result<MapperGraph, GraphError> {
        let d = diagnose(&grid, &vertices, &edges);
        if !d.is_valid() {
            return Err(GraphError::Invalid(d));
        }
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by_key(|&k| vertices[k].1);
        let mut pos = vec![0usize; vertices.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (k, (id, _)) in vertices.iter().enumerate() {
            index.insert(id, pos[k]);
        }
        let vertex_level: Vec<i64> = order.iter().map(|&k| vertices[k].1).collect();
        let vertex_name: Vec<String> = order.iter().map(|&k| vertices[k].0.clone()).collect();
        let mut es: Vec<(String, usize, usize)> = edges
            .into_iter()
            .map(|(id, lo, hi)| {
                let (a, b) = (index[lo.as_str()], index[hi.as_str()]);
                // Orient so the lower-level endpoint comes first.
                if vertex_level[a] <= vertex_level[b] {
                    (id, a, b)
                } else {
                    (id, b, a)
                }
            })
            .collect();
        es.sort_by_key(|&(_, lo, _)| vertex_level[lo]);
        let edge_name = es.iter().map(|(id, _, _)| id.clone()).collect();
        let edges = es.into_iter().map(|(_, a, b)| (a, b)).collect();
        Ok(MapperGraph { grid, vertex_level, vertex_name, edges, edge_name })
    }

    /// Build from levels and index pairs with generated names.
    pub fn from_parts(
        grid: Grid,
        levels: Vec<i64>,
        edges: Vec<(usize, usize)>,
    ) -> Result<MapperGraph, GraphError> {
        let vertices: Vec<(String, i64)> =
            levels.iter().enumerate().map(|(k, &l)| (format!("v{k}"), l)).collect();
        let named: Vec<(String, String, String)> = edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| (format!("e{k}"), format!("v{a}"), format!("v{b}")))
            .collect();
        for &(a, b) in &edges {
            if a >= levels.len() || b >= levels.len() {
                return Err(GraphError::UnknownVertex(format!("v{}", a.max(b))));
            }
        }
        MapperGraph::build(grid, vertices, named)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_level.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_level(&self, v: usize) -> i64 {
        self.vertex_level[v]
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_name[v]
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edge_name[e]
    }

    /// Lower and upper endpoints of edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_level(&self, e: usize) -> i64 {
        self.vertex_level[self.edges[e].0]
    }

    /// Indices of the vertices at `level`.
    pub fn vertex_range(&self, level: i64) -> Range<usize> {
        let lo = self.vertex_level.partition_point(|&l| l < level);
        let hi = self.vertex_level.partition_point(|&l| l <= level);
        lo..hi
    }

    /// Indices of the edges at `level`.
    pub fn edge_range(&self, level: i64) -> Range<usize> {
        let lo = self.edges.partition_point(|&(a, _)| self.vertex_level[a] < level);
        let hi = self.edges.partition_point(|&(a, _)| self.vertex_level[a] <= level);
        lo..hi
    }

    /// Per-level vertex block sizes over the full grid range.
    pub fn vertex_partition_sizes(&self) -> Vec<(i64, usize)> {
        let l = self.grid.half_range();
        (-l..=l).map(|i| (i, self.vertex_range(i).len())).collect()
    }

    /// Per-level edge block sizes over the full grid range.
    pub fn edge_partition_sizes(&self) -> Vec<(i64, usize)> {
        let l = self.grid.half_range();
        (-l..l).map(|i| (i, self.edge_range(i).len())).collect()
    }

    /// Structural diagnostics for an already-built graph (always valid; the
    /// interesting output is the connectivity flag).
    pub fn validate(&self) -> Diagnostics {
        let mut uf = UnionFind::new(self.vertex_count());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        let connected = if self.vertex_count() == 0 {
            true
        } else {
            let root = uf.find(0);
            (1..self.vertex_count()).all(|v| uf.find(v) == root)
        };
        Diagnostics { violations: Vec::new(), connected }
    }

    /// Union-find of the subgraph induced by vertex levels `lo..=hi`:
    /// vertices outside stay singletons, edges with both endpoints inside are
    /// joined.
    fn window_components(&self, lo: i64, hi: i64) -> UnionFind {
        let mut uf = UnionFind::new(self.vertex_count());
        if lo > hi {
            return uf;
        }
        for level in lo..hi {
            for e in self.edge_range(level) {
                let (a, b) = self.edges[e];
                uf.union(a, b);
            }
        }
        uf
    }

    /// Smooth by `n`: per level, the output vertices (edges) are the
    /// connected components of the subgraph induced by the thickened vertex
    /// (edge) window, clamped to the grid. Returns the smoothed graph and the
    /// level-preserving inclusion maps on vertices and edges.
    ///
    /// Components are labeled canonically by their minimum contained input
    /// vertex index, so the construction is deterministic.
    pub fn smooth(&self, n: u64) -> (MapperGraph, Vec<usize>, Vec<usize>) {
        let l = self.grid.half_range();
        if n == 0 {
            let vmap = (0..self.vertex_count()).collect();
            let emap = (0..self.edge_count()).collect();
            return (self.clone(), vmap, emap);
        }

        // Vertex components per level: comp_at[level][input vertex] -> output index.
        let mut out_levels: Vec<i64> = Vec::new();
        let mut out_names: Vec<String> = Vec::new();
        let mut comp_at: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let mut vmap = vec![usize::MAX; self.vertex_count()];
        for level in -l..=l {
            let Some((wlo, whi)) = self.grid.vertex_window(level, n) else { continue };
            let mut uf = self.window_components(wlo, whi);
            let members_start = self.vertex_range(wlo).start;
            let members_end = self.vertex_range(whi).end;
            if members_start == members_end {
                continue;
            }
            // Component representative -> output vertex, ordered by min member.
            let mut reps: Vec<usize> = Vec::new();
            let mut lookup = vec![usize::MAX; self.vertex_count()];
            let mut slot = comp_at.entry(level).or_insert_with(|| vec![usize::MAX; self.vertex_count()]);
            for v in members_start..members_end {
                let r = uf.find(v);
                if lookup[r] == usize::MAX {
                    lookup[r] = out_levels.len() + reps.len();
                    reps.push(v); // v is the minimal member: iteration is ascending
                }
            }
            let base = out_levels.len();
            for (k, &rep) in reps.iter().enumerate() {
                out_levels.push(level);
                out_names.push(format!("v{rep}@{level}"));
                debug_assert_eq!(base + k, lookup[uf.find(rep)]);
            }
            for v in members_start..members_end {
                let out = lookup[uf.find(v)];
                slot[v] = out;
                if self.vertex_level[v] == level {
                    vmap[v] = out;
                }
            }
            let _ = &mut slot;
        }

        // Edge components per level.
        let mut out_edges: Vec<(usize, usize)> = Vec::new();
        let mut out_edge_names: Vec<String> = Vec::new();
        let mut emap = vec![usize::MAX; self.edge_count()];
        for level in -l..l {
            let Some((wlo, whi)) = self.grid.edge_window(level, n) else { continue };
            let mut uf = self.window_components(wlo, whi);
            let members_start = self.vertex_range(wlo).start;
            let members_end = self.vertex_range(whi).end;
            if members_start == members_end {
                continue;
            }
            let mut lookup = vec![usize::MAX; self.vertex_count()];
            let mut reps: Vec<usize> = Vec::new();
            for v in members_start..members_end {
                let r = uf.find(v);
                if lookup[r] == usize::MAX {
                    lookup[r] = out_edges.len() + reps.len();
                    reps.push(v);
                }
            }
            let lower_comp = &comp_at[&level];
            let upper_comp = &comp_at[&(level + 1)];
            for &rep in &reps {
                // Endpoints: the component of any member in the two vertex
                // windows; those windows contain the edge window.
                out_edges.push((lower_comp[rep], upper_comp[rep]));
                out_edge_names.push(format!("e{rep}@{level}"));
            }
            for e in 0..self.edge_count() {
                let (a, _) = self.edges[e];
                if self.vertex_level[a] == level {
                    emap[e] = lookup[uf.find(a)];
                }
            }
        }

        let smoothed = MapperGraph {
            grid: self.grid,
            vertex_level: out_levels,
            vertex_name: out_names,
            edges: out_edges,
            edge_name: out_edge_names,
        };
        debug_assert!(vmap.iter().all(|&v| v != usize::MAX));
        debug_assert!(emap.iter().all(|&e| e != usize::MAX));
        (smoothed, vmap, emap)
    }

    /// Per-level merge distances between vertices and between edges.
    ///
    /// `d(u, v)` for `u, v` at level `i` is the smallest `k` such that the
    /// two lie in one component of the subgraph induced by the (clamped)
    /// window of levels `[i - k, i + k]`; the edge version uses the window
    /// `[i - k + 1, i + k]`. Pairs that never merge inside the grid are
    /// `Unbounded`.
    pub fn distance_tables(&self) -> DistanceTable {
        let l = self.grid.half_range();
        let mut vertex = Vec::new();
        for level in -l..=l {
            vertex.push(self.vertex_block_distances(level));
        }
        let mut edge = Vec::new();
        for level in -l..l {
            edge.push(self.edge_block_distances(level));
        }
        DistanceTable {
            vertex_offsets: (-l..=l).map(|i| self.vertex_range(i).start).collect(),
            edge_offsets: (-l..l).map(|i| self.edge_range(i).start).collect(),
            half_range: l,
            vertex,
            edge,
        }
    }

    fn vertex_block_distances(&self, level: i64) -> Block {
        let range = self.vertex_range(level);
        let ids: Vec<usize> = range.collect();
        let mut block = Block::new(ids.len());
        if ids.len() <= 1 {
            return block;
        }
        let mut uf = UnionFind::new(self.vertex_count());
        let mut pending: Vec<(usize, usize)> = Vec::new();
        for a in 0..ids.len() {
            for b in (a + 1)..ids.len() {
                pending.push((a, b));
            }
        }
        let kmax = (level + self.grid.half_range()).max(self.grid.half_range() - level);
        for k in 1..=kmax {
            // Edges newly inside the window [level-k, level+k].
            for el in [level - k, level + k - 1] {
                if self.grid.edge_level_ok(el)
                    && (level - k..level + k).contains(&el)
                {
                    for e in self.edge_range(el) {
                        let (a, b) = self.edges[e];
                        uf.union(a, b);
                    }
                }
            }
            pending.retain(|&(a, b)| {
                if uf.find(ids[a]) == uf.find(ids[b]) {
                    block.set(a, b, Value::Fin(k));
                    false
                } else {
                    true
                }
            });
            if pending.is_empty() {
                break;
            }
        }
        block
    }

    fn edge_block_distances(&self, level: i64) -> Block {
        let range = self.edge_range(level);
        let ids: Vec<usize> = range.collect();
        let mut block = Block::new(ids.len());
        if ids.len() <= 1 {
            return block;
        }
        let mut uf = UnionFind::new(self.vertex_count());
        let mut pending: Vec<(usize, usize)> = Vec::new();
        for a in 0..ids.len() {
            for b in (a + 1)..ids.len() {
                pending.push((a, b));
            }
        }
        let kmax =
            (level + self.grid.half_range() + 1).max(self.grid.half_range() - level);
        for k in 1..=kmax {
            // Window of vertex levels [level-k+1, level+k]; edges fully
            // inside sit at levels [level-k+1, level+k-1].
            for el in [level - k + 1, level + k - 1] {
                if self.grid.edge_level_ok(el)
                    && (level - k + 1..level + k).contains(&el)
                {
                    for e in self.edge_range(el) {
                        let (a, b) = self.edges[e];
                        uf.union(a, b);
                    }
                }
            }
            pending.retain(|&(a, b)| {
                let (la, _) = self.edges[ids[a]];
                let (lb, _) = self.edges[ids[b]];
                if uf.find(la) == uf.find(lb) {
                    block.set(a, b, Value::Fin(k));
                    false
                } else {
                    true
                }
            });
            if pending.is_empty() {
                break;
            }
        }
        block
    }
}

/// A symmetric per-level distance block with zero diagonal.
#[derive(Clone, Debug)]
pub struct Block {
    size: usize,
    data: Vec<Value>,
}

impl Block {
    fn new(size: usize) -> Block {
        let mut data = vec![Value::Unbounded; size * size];
        for i in 0..size {
            data[i * size + i] = Value::Fin(0);
        }
        Block { size, data }
    }

    fn set(&mut self, a: usize, b: usize, v: Value) {
        self.data[a * self.size + b] = v;
        self.data[b * self.size + a] = v;
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, a: usize, b: usize) -> Value {
        self.data[a * self.size + b]
    }
}

/// Vertex and edge merge distances for one graph, indexed by global ids.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    half_range: i64,
    vertex_offsets: Vec<usize>,
    edge_offsets: Vec<usize>,
    vertex: Vec<Block>,
    edge: Vec<Block>,
}

impl DistanceTable {
    fn slot(&self, level: i64) -> usize {
        (level + self.half_range) as usize
    }

    pub fn vertex_block(&self, level: i64) -> &Block {
        &self.vertex[self.slot(level)]
    }

    pub fn edge_block(&self, level: i64) -> &Block {
        &self.edge[self.slot(level)]
    }

    /// Distance between two vertices; both must sit at `level`.
    pub fn vertex_distance(&self, level: i64, u: usize, v: usize) -> Value {
        let s = self.slot(level);
        let off = self.vertex_offsets[s];
        self.vertex[s].get(u - off, v - off)
    }

    /// Distance between two edges; both must sit at `level`.
    pub fn edge_distance(&self, level: i64, e: usize, f: usize) -> Value {
        let s = self.slot(level);
        let off = self.edge_offsets[s];
        self.edge[s].get(e - off, f - off)
    }

    pub fn vertex_levels(&self) -> impl Iterator<Item = i64> + '_ {
        -self.half_range..=self.half_range
    }

    pub fn edge_levels(&self) -> impl Iterator<Item = i64> + '_ {
        -self.half_range..self.half_range
    }
}

/// The six-graph system used by a loss evaluation: a base graph, its `n`- and
/// `2n`-smoothings, and the inclusion maps between consecutive stages.
///
/// The `2n`-smoothing is built by smoothing the `n`-smoothing again, which is
/// canonically isomorphic to smoothing the base by `2n` directly.
#[derive(Clone, Debug)]
pub struct SmoothSystem {
    pub base: MapperGraph,
    pub smooth_n: MapperGraph,
    pub smooth_2n: MapperGraph,
    /// base vertex -> smooth_n vertex
    pub incl_v_base: Vec<usize>,
    /// base edge -> smooth_n edge
    pub incl_e_base: Vec<usize>,
    /// smooth_n vertex -> smooth_2n vertex
    pub incl_v_n: Vec<usize>,
    /// smooth_n edge -> smooth_2n edge
    pub incl_e_n: Vec<usize>,
    pub n: u64,
}

impl SmoothSystem {
    pub fn build(base: MapperGraph, n: u64) -> SmoothSystem {
        let (smooth_n, incl_v_base, incl_e_base) = base.smooth(n);
        let (smooth_2n, incl_v_n, incl_e_n) = smooth_n.smooth(n);
        SmoothSystem { base, smooth_n, smooth_2n, incl_v_base, incl_e_base, incl_v_n, incl_e_n, n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    pub(crate) fn path_graph(lo: i64, hi: i64) -> MapperGraph {
        let grid = Grid::covering(lo..=hi);
        let levels: Vec<i64> = (lo..=hi).collect();
        let edges: Vec<(usize, usize)> = (0..levels.len() - 1).map(|k| (k, k + 1)).collect();
        MapperGraph::from_parts(grid, levels, edges).unwrap()
    }

    #[test]
    fn build_sorts_by_level() {
        let grid = Grid::new(1.0, 5).unwrap();
        let g = MapperGraph::build(
            grid,
            vec![("b".to_string(), 2), ("a".to_string(), 0), ("m".to_string(), 1)],
            vec![
                ("e1".to_string(), "m".to_string(), "b".to_string()),
                ("e0".to_string(), "a".to_string(), "m".to_string()),
            ],
        )
        .unwrap();
        assert_eq!(g.vertex_name(0), "a");
        assert_eq!(g.vertex_name(2), "b");
        assert_eq!(g.edge_level(0), 0);
        assert_eq!(g.edge_level(1), 1);
    }

    #[test]
    fn diagnose_rejects_long_edge() {
        let grid = Grid::new(1.0, 5).unwrap();
        let d = diagnose(
            &grid,
            &[("a".to_string(), 2), ("b".to_string(), 5)],
            &[("e".to_string(), "a".to_string(), "b".to_string())],
        );
        assert!(!d.is_valid());
        assert!(d.violations[0].contains("2->5"));
    }

    #[test]
    fn validate_reports_disconnected() {
        let grid = Grid::new(1.0, 5).unwrap();
        let g = MapperGraph::from_parts(grid, vec![0, 1, 0, 1], vec![(0, 1), (2, 3)]).unwrap();
        let d = g.validate();
        assert!(d.is_valid());
        assert!(!d.connected);
        assert!(path_graph(0, 5).validate().connected);
    }

    #[test]
    fn smooth_zero_is_identity() {
        let g = path_graph(-3, 4);
        let (s, vmap, emap) = g.smooth(0);
        assert_eq!(s.vertex_count(), g.vertex_count());
        assert_eq!(s.edge_count(), g.edge_count());
        assert!(vmap.iter().enumerate().all(|(k, &v)| k == v));
        assert!(emap.iter().enumerate().all(|(k, &e)| k == e));
    }

    /// A path spanning the whole grid is unchanged by smoothing.
    #[test]
    fn smooth_path_is_path() {
        let g = path_graph(-4, 4);
        for n in 1..5 {
            let (s, _, _) = g.smooth(n);
            assert_eq!(s.vertex_count(), g.vertex_count());
            assert_eq!(s.edge_count(), g.edge_count());
            for level in -4..=4 {
                assert_eq!(s.vertex_range(level).len(), 1);
            }
        }
    }

    /// Smoothing widens the support: levels within `n` of an occupied level
    /// become occupied.
    #[test]
    fn smooth_extends_support() {
        let grid = Grid::new(1.0, 5).unwrap();
        let g = MapperGraph::from_parts(grid, vec![0, 1], vec![(0, 1)]).unwrap();
        let (s, _, _) = g.smooth(2);
        for level in -2..=3 {
            assert_eq!(s.vertex_range(level).len(), 1, "level {level}");
        }
        assert!(s.vertex_range(-3).is_empty());
        assert!(s.vertex_range(4).is_empty());
        assert!(s.validate().connected);
    }

    /// Two parallel chains joined at the bottom merge level by level.
    #[test]
    fn smooth_merges_branches() {
        let grid = Grid::new(1.0, 6).unwrap();
        // Branch point at level 0, two branches up to level 3.
        let levels = vec![0, 1, 1, 2, 2, 3, 3];
        let edges = vec![(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 6)];
        let g = MapperGraph::from_parts(grid, levels, edges).unwrap();
        let (s1, vmap, _) = g.smooth(1);
        // At level 1 the window [0,2] contains the branch point: merged.
        assert_eq!(s1.vertex_range(1).len(), 1);
        assert_eq!(vmap[1], vmap[2]);
        // At level 2 the window [1,3] misses it: still split.
        assert_eq!(s1.vertex_range(2).len(), 2);
        let (s2, _, _) = g.smooth(2);
        assert_eq!(s2.vertex_range(2).len(), 1);
        assert_eq!(s2.vertex_range(3).len(), 2);
    }

    #[test]
    fn distance_identity_symmetry() {
        let g = path_graph(0, 6);
        let t = g.distance_tables();
        for v in 0..g.vertex_count() {
            assert_eq!(t.vertex_distance(g.vertex_level(v), v, v), Value::Fin(0));
        }
    }

    #[test]
    fn distance_two_branches() {
        let grid = Grid::new(1.0, 6).unwrap();
        // Merge at level 0; u, v at level 3 on different branches.
        let levels = vec![0, 1, 1, 2, 2, 3, 3];
        let edges = vec![(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 6)];
        let g = MapperGraph::from_parts(grid, levels, edges).unwrap();
        let t = g.distance_tables();
        // Window [3-k, 3+k] reaches level 0 at k = 3.
        assert_eq!(t.vertex_distance(3, 5, 6), Value::Fin(3));
        assert_eq!(t.vertex_distance(1, 1, 2), Value::Fin(1));
        // Edges at level 2 on the two branches: window [2-k+1, 2+k] reaches
        // level 0 at k = 3.
        assert_eq!(t.edge_distance(2, 4, 5), Value::Fin(3));
    }

    #[test]
    fn distance_unbounded_when_disconnected() {
        let grid = Grid::new(1.0, 3).unwrap();
        let g = MapperGraph::from_parts(grid, vec![0, 0], vec![]).unwrap();
        let t = g.distance_tables();
        assert_eq!(t.vertex_distance(0, 0, 1), Value::Unbounded);
    }

    #[test]
    fn parallel_edges_distance_one() {
        let grid = Grid::new(1.0, 3).unwrap();
        let g = MapperGraph::from_parts(grid, vec![0, 1], vec![(0, 1), (0, 1)]).unwrap();
        let t = g.distance_tables();
        assert_eq!(t.edge_distance(0, 0, 1), Value::Fin(1));
        assert_eq!(t.edge_distance(0, 0, 0), Value::Fin(0));
    }
}
