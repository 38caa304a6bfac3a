//! Assignments between two mapper graphs and the twelve-term loss function.
//!
//! An assignment at shift `n` is a family of eight level-preserving maps: the
//! forward maps send the vertices and edges of `F` into the `n`-smoothing of
//! `G` and the vertices and edges of that smoothing into the `2n`-smoothing
//! of `G`; the backward maps do the same with the roles swapped. The loss is
//! the largest failure of commutativity over twelve families of diagrams,
//! measured in merge distance; `n + loss` bounds the interleaving distance.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::bundle::{Bundle, MatrixBundle};
use crate::graph::MapperGraph;
use crate::matrix::{BlockMatrix, Partition, StructureClass};
use crate::value::Value;

/// One of the eight maps making up an assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MapKind {
    PhiV,
    PhiE,
    PsiV,
    PsiE,
    PhiNV,
    PhiNE,
    PsiNV,
    PsiNE,
}

impl MapKind {
    pub const ALL: [MapKind; 8] = [
        MapKind::PhiV,
        MapKind::PhiE,
        MapKind::PsiV,
        MapKind::PsiE,
        MapKind::PhiNV,
        MapKind::PhiNE,
        MapKind::PsiNV,
        MapKind::PsiNE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapKind::PhiV => "phi_V",
            MapKind::PhiE => "phi_E",
            MapKind::PsiV => "psi_V",
            MapKind::PsiE => "psi_E",
            MapKind::PhiNV => "phin_V",
            MapKind::PhiNE => "phin_E",
            MapKind::PsiNV => "psin_V",
            MapKind::PsiNE => "psin_E",
        }
    }

    pub fn is_edge_map(self) -> bool {
        matches!(self, MapKind::PhiE | MapKind::PsiE | MapKind::PhiNE | MapKind::PsiNE)
    }

    pub fn source_graph(self, b: &Bundle) -> &MapperGraph {
        match self {
            MapKind::PhiV | MapKind::PhiE => &b.f.base,
            MapKind::PsiV | MapKind::PsiE => &b.g.base,
            MapKind::PhiNV | MapKind::PhiNE => &b.f.smooth_n,
            MapKind::PsiNV | MapKind::PsiNE => &b.g.smooth_n,
        }
    }

    pub fn target_graph(self, b: &Bundle) -> &MapperGraph {
        match self {
            MapKind::PhiV | MapKind::PhiE => &b.g.smooth_n,
            MapKind::PsiV | MapKind::PsiE => &b.f.smooth_n,
            MapKind::PhiNV | MapKind::PhiNE => &b.g.smooth_2n,
            MapKind::PsiNV | MapKind::PsiNE => &b.f.smooth_2n,
        }
    }

    pub fn source_count(self, b: &Bundle) -> usize {
        let g = self.source_graph(b);
        if self.is_edge_map() {
            g.edge_count()
        } else {
            g.vertex_count()
        }
    }

    /// Admissible targets for source object `src`: the target-graph block at
    /// the source's level.
    pub fn candidates(self, b: &Bundle, src: usize) -> Range<usize> {
        let sg = self.source_graph(b);
        let tg = self.target_graph(b);
        if self.is_edge_map() {
            tg.edge_range(sg.edge_level(src))
        } else {
            tg.vertex_range(sg.vertex_level(src))
        }
    }
}

/// A full family of eight assignment maps, stored as target indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub phi_v: Vec<usize>,
    pub phi_e: Vec<usize>,
    pub psi_v: Vec<usize>,
    pub psi_e: Vec<usize>,
    pub phin_v: Vec<usize>,
    pub phin_e: Vec<usize>,
    pub psin_v: Vec<usize>,
    pub psin_e: Vec<usize>,
}

/// No assignment exists: some source object has no target at its level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasible {
    pub map: &'static str,
    pub level: i64,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no admissible target for {} at level {}", self.map, self.level)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Infeasible {}

impl Assignment {
    pub fn map(&self, kind: MapKind) -> &[usize] {
        match kind {
            MapKind::PhiV => &self.phi_v,
            MapKind::PhiE => &self.phi_e,
            MapKind::PsiV => &self.psi_v,
            MapKind::PsiE => &self.psi_e,
            MapKind::PhiNV => &self.phin_v,
            MapKind::PhiNE => &self.phin_e,
            MapKind::PsiNV => &self.psin_v,
            MapKind::PsiNE => &self.psin_e,
        }
    }

    pub fn map_mut(&mut self, kind: MapKind) -> &mut Vec<usize> {
        match kind {
            MapKind::PhiV => &mut self.phi_v,
            MapKind::PhiE => &mut self.phi_e,
            MapKind::PsiV => &mut self.psi_v,
            MapKind::PsiE => &mut self.psi_e,
            MapKind::PhiNV => &mut self.phin_v,
            MapKind::PhiNE => &mut self.phin_e,
            MapKind::PsiNV => &mut self.psin_v,
            MapKind::PsiNE => &mut self.psin_e,
        }
    }

    /// The assignment sending every source object to the first admissible
    /// target at its level.
    pub fn first_feasible(b: &Bundle) -> Result<Assignment, Infeasible> {
        let mut a = Assignment {
            phi_v: Vec::new(),
            phi_e: Vec::new(),
            psi_v: Vec::new(),
            psi_e: Vec::new(),
            phin_v: Vec::new(),
            phin_e: Vec::new(),
            psin_v: Vec::new(),
            psin_e: Vec::new(),
        };
        for kind in MapKind::ALL {
            for src in 0..kind.source_count(b) {
                let cand = kind.candidates(b, src);
                if cand.is_empty() {
                    let sg = kind.source_graph(b);
                    let level = if kind.is_edge_map() {
                        sg.edge_level(src)
                    } else {
                        sg.vertex_level(src)
                    };
                    return Err(Infeasible { map: kind.name(), level });
                }
                a.map_mut(kind).push(cand.start);
            }
        }
        Ok(a)
    }

    /// Check sizes and that every target sits in the admissible block.
    pub fn validate(&self, b: &Bundle) -> Result<(), String> {
        for kind in MapKind::ALL {
            let m = self.map(kind);
            if m.len() != kind.source_count(b) {
                return Err(alloc::format!(
                    "{}: wrong length {} (expected {})",
                    kind.name(),
                    m.len(),
                    kind.source_count(b)
                ));
            }
            for (src, &dst) in m.iter().enumerate() {
                if !kind.candidates(b, src).contains(&dst) {
                    return Err(alloc::format!(
                        "{}: source {src} maps to {dst}, outside its level block",
                        kind.name()
                    ));
                }
            }
        }
        Ok(())
    }

    /// The eight maps as column-one-hot matrices, named for export.
    pub fn matrices(&self, b: &Bundle) -> Vec<(&'static str, BlockMatrix)> {
        MapKind::ALL
            .iter()
            .map(|&kind| {
                let sg = kind.source_graph(b);
                let tg = kind.target_graph(b);
                let (rows, cols) = if kind.is_edge_map() {
                    (Partition::edges(tg), Partition::edges(sg))
                } else {
                    (Partition::vertices(tg), Partition::vertices(sg))
                };
                let m =
                    BlockMatrix::from_map(rows, cols, self.map(kind), StructureClass::Assignment);
                (kind.name(), m)
            })
            .collect()
    }
}

/// One of the twelve loss-term families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LossTerm {
    /// Upper endpoints of `F` edges under `phi`.
    PhiUp,
    /// Lower endpoints of `F` edges under `phi`.
    PhiDown,
    PsiUp,
    PsiDown,
    /// `F` vertices: thickening `phi` once versus applying `phin`.
    PhiThickV,
    PhiThickE,
    PsiThickV,
    PsiThickE,
    /// `F` vertices around the triangle through `G`'s smoothing.
    TriFV,
    TriFE,
    TriGV,
    TriGE,
}

impl LossTerm {
    pub const ALL: [LossTerm; 12] = [
        LossTerm::PhiUp,
        LossTerm::PhiDown,
        LossTerm::PsiUp,
        LossTerm::PsiDown,
        LossTerm::PhiThickV,
        LossTerm::PhiThickE,
        LossTerm::PsiThickV,
        LossTerm::PsiThickE,
        LossTerm::TriFV,
        LossTerm::TriFE,
        LossTerm::TriGV,
        LossTerm::TriGE,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LossTerm::PhiUp => "phi_up",
            LossTerm::PhiDown => "phi_down",
            LossTerm::PsiUp => "psi_up",
            LossTerm::PsiDown => "psi_down",
            LossTerm::PhiThickV => "phi_thick_V",
            LossTerm::PhiThickE => "phi_thick_E",
            LossTerm::PsiThickV => "psi_thick_V",
            LossTerm::PsiThickE => "psi_thick_E",
            LossTerm::TriFV => "tri_F_V",
            LossTerm::TriFE => "tri_F_E",
            LossTerm::TriGV => "tri_G_V",
            LossTerm::TriGE => "tri_G_E",
        }
    }

    /// Whether the term's matrix entries are halved (rounded up).
    pub fn halved(self) -> bool {
        matches!(
            self,
            LossTerm::TriFV | LossTerm::TriFE | LossTerm::TriGV | LossTerm::TriGE
        )
    }

    /// Number of diagram instances (one per source object).
    pub fn column_count(self, b: &Bundle) -> usize {
        match self {
            LossTerm::PhiUp | LossTerm::PhiDown | LossTerm::PhiThickE | LossTerm::TriFE => {
                b.f.base.edge_count()
            }
            LossTerm::PsiUp | LossTerm::PsiDown | LossTerm::PsiThickE | LossTerm::TriGE => {
                b.g.base.edge_count()
            }
            LossTerm::PhiThickV | LossTerm::TriFV => b.f.base.vertex_count(),
            LossTerm::PsiThickV | LossTerm::TriGV => b.g.base.vertex_count(),
        }
    }
}

/// The two objects whose merge distance a diagram instance measures: the
/// results of chasing the source object around the two sides. Both live at
/// `level` in the graph whose distance table scores the term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chase {
    pub level: i64,
    pub left: usize,
    pub right: usize,
}

/// Chase diagram instance `col` of `term` around both sides.
pub fn term_chase(b: &Bundle, a: &Assignment, term: LossTerm, col: usize) -> Chase {
    match term {
        LossTerm::PhiUp => {
            let (_, up) = b.f.base.edge(col);
            Chase {
                level: b.f.base.edge_level(col) + 1,
                left: a.phi_v[up],
                right: b.g.smooth_n.edge(a.phi_e[col]).1,
            }
        }
        LossTerm::PhiDown => {
            let (down, _) = b.f.base.edge(col);
            Chase {
                level: b.f.base.edge_level(col),
                left: a.phi_v[down],
                right: b.g.smooth_n.edge(a.phi_e[col]).0,
            }
        }
        LossTerm::PsiUp => {
            let (_, up) = b.g.base.edge(col);
            Chase {
                level: b.g.base.edge_level(col) + 1,
                left: a.psi_v[up],
                right: b.f.smooth_n.edge(a.psi_e[col]).1,
            }
        }
        LossTerm::PsiDown => {
            let (down, _) = b.g.base.edge(col);
            Chase {
                level: b.g.base.edge_level(col),
                left: a.psi_v[down],
                right: b.f.smooth_n.edge(a.psi_e[col]).0,
            }
        }
        LossTerm::PhiThickV => Chase {
            level: b.f.base.vertex_level(col),
            left: a.phin_v[b.f.incl_v_base[col]],
            right: b.g.incl_v_n[a.phi_v[col]],
        },
        LossTerm::PhiThickE => Chase {
            level: b.f.base.edge_level(col),
            left: a.phin_e[b.f.incl_e_base[col]],
            right: b.g.incl_e_n[a.phi_e[col]],
        },
        LossTerm::PsiThickV => Chase {
            level: b.g.base.vertex_level(col),
            left: a.psin_v[b.g.incl_v_base[col]],
            right: b.f.incl_v_n[a.psi_v[col]],
        },
        LossTerm::PsiThickE => Chase {
            level: b.g.base.edge_level(col),
            left: a.psin_e[b.g.incl_e_base[col]],
            right: b.f.incl_e_n[a.psi_e[col]],
        },
        LossTerm::TriFV => Chase {
            level: b.f.base.vertex_level(col),
            left: b.f.incl_v_n[b.f.incl_v_base[col]],
            right: a.psin_v[a.phi_v[col]],
        },
        LossTerm::TriFE => Chase {
            level: b.f.base.edge_level(col),
            left: b.f.incl_e_n[b.f.incl_e_base[col]],
            right: a.psin_e[a.phi_e[col]],
        },
        LossTerm::TriGV => Chase {
            level: b.g.base.vertex_level(col),
            left: b.g.incl_v_n[b.g.incl_v_base[col]],
            right: a.phin_v[a.psi_v[col]],
        },
        LossTerm::TriGE => Chase {
            level: b.g.base.edge_level(col),
            left: b.g.incl_e_n[b.g.incl_e_base[col]],
            right: a.phin_e[a.psi_e[col]],
        },
    }
}

/// Loss contribution of one diagram instance.
pub fn term_value(b: &Bundle, a: &Assignment, term: LossTerm, col: usize) -> Value {
    let c = term_chase(b, a, term, col);
    let raw = match term {
        LossTerm::PhiUp | LossTerm::PhiDown => b.dist_g_n.vertex_distance(c.level, c.left, c.right),
        LossTerm::PsiUp | LossTerm::PsiDown => b.dist_f_n.vertex_distance(c.level, c.left, c.right),
        LossTerm::PhiThickV => b.dist_g_2n.vertex_distance(c.level, c.left, c.right),
        LossTerm::PhiThickE => b.dist_g_2n.edge_distance(c.level, c.left, c.right),
        LossTerm::PsiThickV => b.dist_f_2n.vertex_distance(c.level, c.left, c.right),
        LossTerm::PsiThickE => b.dist_f_2n.edge_distance(c.level, c.left, c.right),
        LossTerm::TriFV => b.dist_f_2n.vertex_distance(c.level, c.left, c.right),
        LossTerm::TriFE => b.dist_f_2n.edge_distance(c.level, c.left, c.right),
        LossTerm::TriGV => b.dist_g_2n.vertex_distance(c.level, c.left, c.right),
        LossTerm::TriGE => b.dist_g_2n.edge_distance(c.level, c.left, c.right),
    };
    if term.halved() {
        raw.ceil_half()
    } else {
        raw
    }
}

/// Worst instance of one term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermReport {
    pub term: LossTerm,
    pub value: Value,
    /// Column index of a worst diagram instance, if the term has any.
    pub witness: Option<usize>,
}

/// Full loss breakdown for one assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LossReport {
    pub n: u64,
    pub terms: Vec<TermReport>,
    pub loss: Value,
}

impl LossReport {
    /// The interleaving-distance bound `n + loss`.
    pub fn bound(&self) -> Value {
        Value::Fin(self.n as i64) + self.loss
    }

    pub fn is_interleaving(&self) -> bool {
        self.loss.is_zero()
    }
}

pub fn evaluate_loss(b: &Bundle, a: &Assignment) -> LossReport {
    let mut terms = Vec::with_capacity(LossTerm::ALL.len());
    let mut loss = Value::ZERO;
    for term in LossTerm::ALL {
        let mut report = TermReport { term, value: Value::ZERO, witness: None };
        for col in 0..term.column_count(b) {
            let v = term_value(b, a, term, col);
            if report.witness.is_none() || v > report.value {
                report.value = v;
                report.witness = Some(col);
            }
        }
        loss = loss.max(report.value);
        terms.push(report);
    }
    LossReport { n: b.n(), terms, loss }
}

/// The literal matrix `D (A1 - A2)` of one term, for cross-checking the
/// per-column evaluation. Meaningful when every in-block distance used is
/// finite; unbounded distances lose information under subtraction.
pub fn term_product_matrix(
    b: &Bundle,
    mb: &MatrixBundle,
    a: &Assignment,
    term: LossTerm,
) -> BlockMatrix {
    let ms = a.matrices(b);
    let m = |name: &str| &ms.iter().find(|(n, _)| *n == name).unwrap().1;
    let (d, a1, a2) = match term {
        LossTerm::PhiUp => (&mb.d_gn_v, m("phi_V").mul(&mb.b_f_up), mb.b_gn_up.mul(m("phi_E"))),
        LossTerm::PhiDown => {
            (&mb.d_gn_v, m("phi_V").mul(&mb.b_f_down), mb.b_gn_down.mul(m("phi_E")))
        }
        LossTerm::PsiUp => (&mb.d_fn_v, m("psi_V").mul(&mb.b_g_up), mb.b_fn_up.mul(m("psi_E"))),
        LossTerm::PsiDown => {
            (&mb.d_fn_v, m("psi_V").mul(&mb.b_g_down), mb.b_fn_down.mul(m("psi_E")))
        }
        LossTerm::PhiThickV => {
            (&mb.d_g2n_v, m("phin_V").mul(&mb.i_f_v), mb.i_gn_v.mul(m("phi_V")))
        }
        LossTerm::PhiThickE => {
            (&mb.d_g2n_e, m("phin_E").mul(&mb.i_f_e), mb.i_gn_e.mul(m("phi_E")))
        }
        LossTerm::PsiThickV => {
            (&mb.d_f2n_v, m("psin_V").mul(&mb.i_g_v), mb.i_fn_v.mul(m("psi_V")))
        }
        LossTerm::PsiThickE => {
            (&mb.d_f2n_e, m("psin_E").mul(&mb.i_g_e), mb.i_fn_e.mul(m("psi_E")))
        }
        LossTerm::TriFV => {
            (&mb.d_f2n_v, mb.i_fn_v.mul(&mb.i_f_v), m("psin_V").mul(m("phi_V")))
        }
        LossTerm::TriFE => {
            (&mb.d_f2n_e, mb.i_fn_e.mul(&mb.i_f_e), m("psin_E").mul(m("phi_E")))
        }
        LossTerm::TriGV => {
            (&mb.d_g2n_v, mb.i_gn_v.mul(&mb.i_g_v), m("phin_V").mul(m("psi_V")))
        }
        LossTerm::TriGE => {
            (&mb.d_g2n_e, mb.i_gn_e.mul(&mb.i_g_e), m("phin_E").mul(m("psi_E")))
        }
    };
    d.mul(&a1.sub(&a2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn line(lo: i64, hi: i64) -> MapperGraph {
        let grid = Grid::covering(lo..=hi);
        let levels: Vec<i64> = (lo..=hi).collect();
        let edges: Vec<(usize, usize)> = (0..levels.len() - 1).map(|k| (k, k + 1)).collect();
        MapperGraph::from_parts(grid, levels, edges).unwrap()
    }

    #[test]
    fn identical_lines_interleave_at_zero() {
        let b = Bundle::new(line(-2, 3), line(-2, 3), 0);
        let a = Assignment::first_feasible(&b).unwrap();
        a.validate(&b).unwrap();
        let r = evaluate_loss(&b, &a);
        assert!(r.is_interleaving());
        assert_eq!(r.bound(), Value::ZERO);
    }

    #[test]
    fn mismatched_lines_are_infeasible_at_zero() {
        let f = line(-2, 3);
        let g = {
            let grid = *f.grid();
            MapperGraph::from_parts(grid, alloc::vec![-1, 0, 1, 2], alloc::vec![(0, 1), (1, 2), (2, 3)])
                .unwrap()
        };
        let b = Bundle::new(f, g, 0);
        let err = Assignment::first_feasible(&b).unwrap_err();
        assert_eq!(err.map, "phi_V");
    }

    /// A fork against a line: the fork's two top vertices must map to the
    /// single line vertex, and the triangle in the fork direction pays for
    /// the merge.
    #[test]
    fn fork_vs_line_loss() {
        let grid = Grid::new(1.0, 4).unwrap();
        let fork = MapperGraph::from_parts(
            grid,
            alloc::vec![0, 1, 1, 2, 2],
            alloc::vec![(0, 1), (0, 2), (1, 3), (2, 4)],
        )
        .unwrap();
        let lin = MapperGraph::from_parts(grid, alloc::vec![0, 1, 2], alloc::vec![(0, 1), (1, 2)])
            .unwrap();
        let b = Bundle::new(fork.clone(), lin.clone(), 0);
        let a = Assignment::first_feasible(&b).unwrap();
        let r = evaluate_loss(&b, &a);
        // The branches at level 2 merge only at window radius 2, and the
        // triangle halves it.
        assert_eq!(r.loss, Value::Fin(1));
        // At n = 2 the fork is smoothed flat and the identity-like
        // assignment commutes exactly.
        let b2 = Bundle::new(fork, lin, 2);
        let a2 = Assignment::first_feasible(&b2).unwrap();
        assert!(evaluate_loss(&b2, &a2).is_interleaving());
    }

    #[test]
    fn matrix_form_matches_column_form() {
        let grid = Grid::new(1.0, 4).unwrap();
        let fork = MapperGraph::from_parts(
            grid,
            alloc::vec![0, 1, 1, 2, 2],
            alloc::vec![(0, 1), (0, 2), (1, 3), (2, 4)],
        )
        .unwrap();
        let lin = MapperGraph::from_parts(grid, alloc::vec![0, 1, 2], alloc::vec![(0, 1), (1, 2)])
            .unwrap();
        for n in [1u64, 2] {
            let b = Bundle::new(fork.clone(), lin.clone(), n);
            let mb = MatrixBundle::build(&b);
            let a = Assignment::first_feasible(&b).unwrap();
            for term in LossTerm::ALL {
                let x = term_product_matrix(&b, &mb, &a, term);
                let from_matrix = if term.halved() {
                    x.max_entry().ceil_half()
                } else {
                    x.max_entry()
                };
                let from_columns = (0..term.column_count(&b))
                    .map(|c| term_value(&b, &a, term, c))
                    .max()
                    .unwrap_or(Value::ZERO);
                if from_matrix.is_finite() && from_columns.is_finite() {
                    assert_eq!(from_matrix, from_columns, "term {}", term.name());
                }
            }
        }
    }
}
