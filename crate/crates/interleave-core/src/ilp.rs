//! 0/1 integer program for the loss-minimal assignment, with LP-file export.
//!
//! Variables: one binary `x` per admissible (target, source) pair in each of
//! the eight assignment maps, one binary `z` per product of two `x`
//! variables appearing in a triangle term, one general integer `c` per
//! triangle matrix entry (its halved ceiling), and the objective `l`.
//! Constraints: every source column sums to one; `l` dominates every
//! parallelogram entry, which is linear in `x` because the distance,
//! boundary, and inclusion matrices are constant; and `l` dominates every
//! `c`, where `2c` dominates the triangle entry written with the linearized
//! products.
//!
//! The exported file uses LP syntax so any off-the-shelf solver can minimize
//! it; a solution file can be read back and cross-checked against the native
//! loss evaluation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::bundle::Bundle;
use crate::loss::{Assignment, Infeasible, LossTerm, MapKind};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    /// Non-negative general integer.
    Integer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub name: String,
    /// `(coefficient, variable id)` pairs.
    pub terms: Vec<(i64, usize)>,
    pub sense: Sense,
    pub rhs: i64,
}

#[derive(Clone, Debug)]
pub enum ModelError {
    Infeasible(Infeasible),
    /// A required merge distance is unbounded; the finite-coefficient
    /// program cannot express it. The native solver still handles the pair.
    UnboundedDistance { term: &'static str },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Infeasible(e) => write!(f, "{e}"),
            ModelError::UnboundedDistance { term } => {
                write!(f, "unbounded distance in term {term}; model has no finite encoding")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

impl From<Infeasible> for ModelError {
    fn from(e: Infeasible) -> ModelError {
        ModelError::Infeasible(e)
    }
}

/// The assembled program plus the bookkeeping to read a solution back.
#[derive(Clone, Debug)]
pub struct IlpModel {
    var_names: Vec<String>,
    var_kinds: Vec<VarKind>,
    pub constraints: Vec<Constraint>,
    obj: usize,
    /// `(map position in MapKind::ALL, target, source) -> x` variable id.
    x_vars: BTreeMap<(usize, usize, usize), usize>,
    /// Source counts per map, in `MapKind::ALL` order.
    sizes: [usize; 8],
}

struct Builder {
    m: IlpModel,
}

impl Builder {
    fn var(&mut self, name: String, kind: VarKind) -> usize {
        self.m.var_names.push(name);
        self.m.var_kinds.push(kind);
        self.m.var_names.len() - 1
    }

    fn x(&mut self, kind: MapKind, target: usize, source: usize) -> usize {
        let pos = MapKind::ALL.iter().position(|&k| k == kind).unwrap();
        *self.m.x_vars.entry((pos, target, source)).or_insert_with(|| {
            let id = self.m.var_names.len();
            self.m.var_names.push(format!("x_{}_{}_{}", kind.name(), target, source));
            self.m.var_kinds.push(VarKind::Binary);
            id
        })
    }

    fn add(&mut self, name: String, terms: Vec<(i64, usize)>, sense: Sense, rhs: i64) {
        self.m.constraints.push(Constraint { name, terms, sense, rhs });
    }
}

/// One side of a parallelogram entry: a map applied to a fixed source, the
/// result pushed through a constant transform into the scored graph.
struct Side<'a> {
    kind: MapKind,
    source: usize,
    transform: &'a dyn Fn(usize) -> usize,
}

fn fin(v: Value, term: &'static str) -> Result<i64, ModelError> {
    v.finite().ok_or(ModelError::UnboundedDistance { term })
}

#[allow(clippy::too_many_arguments)]
fn parallelogram(
    bl: &mut Builder,
    b: &Bundle,
    term: LossTerm,
    col: usize,
    rows: Range<usize>,
    dist: &dyn Fn(usize, usize) -> Value,
    left: Side<'_>,
    right: Side<'_>,
) -> Result<(), ModelError> {
    for i in rows {
        let mut terms = alloc::vec![(1i64, bl.m.obj)];
        for cand in left.kind.candidates(b, left.source) {
            let d = fin(dist(i, (left.transform)(cand)), term.name())?;
            let x = bl.x(left.kind, cand, left.source);
            terms.push((-d, x));
        }
        for cand in right.kind.candidates(b, right.source) {
            let d = fin(dist(i, (right.transform)(cand)), term.name())?;
            let x = bl.x(right.kind, cand, right.source);
            terms.push((d, x));
        }
        bl.add(format!("pg_{}_{}_{}", term.name(), i, col), terms, Sense::Ge, 0);
    }
    Ok(())
}

/// A triangle entry: constant left side, product of two maps on the right.
#[allow(clippy::too_many_arguments)]
fn triangle(
    bl: &mut Builder,
    b: &Bundle,
    term: LossTerm,
    col: usize,
    rows: Range<usize>,
    dist: &dyn Fn(usize, usize) -> Value,
    left_target: usize,
    first: MapKind,
    second: MapKind,
) -> Result<(), ModelError> {
    // Linearized products z = x_first * x_second, one per path col -> mid -> end.
    let mut paths: Vec<(usize, usize)> = Vec::new();
    for mid in first.candidates(b, col) {
        for end in second.candidates(b, mid) {
            let x1 = bl.x(first, mid, col);
            let x2 = bl.x(second, end, mid);
            let z = bl.var(format!("z_{}_{}_{}_{}", term.name(), col, mid, end), VarKind::Binary);
            bl.add(
                format!("zl_{}_{}_{}_{}", term.name(), col, mid, end),
                alloc::vec![(1, z), (-1, x1)],
                Sense::Le,
                0,
            );
            bl.add(
                format!("zr_{}_{}_{}_{}", term.name(), col, mid, end),
                alloc::vec![(1, z), (-1, x2)],
                Sense::Le,
                0,
            );
            bl.add(
                format!("zb_{}_{}_{}_{}", term.name(), col, mid, end),
                alloc::vec![(1, z), (-1, x1), (-1, x2)],
                Sense::Ge,
                -1,
            );
            paths.push((end, z));
        }
    }
    for i in rows {
        let lc = fin(dist(i, left_target), term.name())?;
        let c = bl.var(format!("c_{}_{}_{}", term.name(), i, col), VarKind::Integer);
        let mut terms = alloc::vec![(2i64, c)];
        for &(end, z) in &paths {
            terms.push((fin(dist(i, end), term.name())?, z));
        }
        bl.add(format!("tr_{}_{}_{}", term.name(), i, col), terms, Sense::Ge, lc);
        bl.add(
            format!("tc_{}_{}_{}", term.name(), i, col),
            alloc::vec![(1, bl.m.obj), (-1, c)],
            Sense::Ge,
            0,
        );
    }
    Ok(())
}

/// Assemble the full program for a bundle.
pub fn build_model(b: &Bundle) -> Result<IlpModel, ModelError> {
    // Fails fast when no assignment exists at all.
    Assignment::first_feasible(b)?;

    let mut bl = Builder {
        m: IlpModel {
            var_names: Vec::new(),
            var_kinds: Vec::new(),
            constraints: Vec::new(),
            obj: 0,
            x_vars: BTreeMap::new(),
            sizes: [0; 8],
        },
    };
    let obj = bl.var("l".to_string(), VarKind::Integer);
    bl.m.obj = obj;

    // Every x variable, and one-hot column constraints.
    for (pos, kind) in MapKind::ALL.into_iter().enumerate() {
        bl.m.sizes[pos] = kind.source_count(b);
        for src in 0..kind.source_count(b) {
            let terms: Vec<(i64, usize)> =
                kind.candidates(b, src).map(|cand| (1, bl.x(kind, cand, src))).collect();
            bl.add(format!("oh_{}_{}", kind.name(), src), terms, Sense::Eq, 1);
        }
    }

    let gn = &b.g.smooth_n;
    let fnn = &b.f.smooth_n;
    let g2n = &b.g.smooth_2n;
    let f2n = &b.f.smooth_2n;

    // Edge-vertex parallelograms.
    for e in 0..b.f.base.edge_count() {
        let (down, up) = b.f.base.edge(e);
        let lvl = b.f.base.edge_level(e);
        let dist = |i: usize, j: usize| b.dist_g_n.vertex_distance(lvl + 1, i, j);
        parallelogram(
            &mut bl,
            b,
            LossTerm::PhiUp,
            e,
            gn.vertex_range(lvl + 1),
            &dist,
            Side { kind: MapKind::PhiV, source: up, transform: &|i| i },
            Side { kind: MapKind::PhiE, source: e, transform: &|i| gn.edge(i).1 },
        )?;
        let dist = |i: usize, j: usize| b.dist_g_n.vertex_distance(lvl, i, j);
        parallelogram(
            &mut bl,
            b,
            LossTerm::PhiDown,
            e,
            gn.vertex_range(lvl),
            &dist,
            Side { kind: MapKind::PhiV, source: down, transform: &|i| i },
            Side { kind: MapKind::PhiE, source: e, transform: &|i| gn.edge(i).0 },
        )?;
    }
    for e in 0..b.g.base.edge_count() {
        let (down, up) = b.g.base.edge(e);
        let lvl = b.g.base.edge_level(e);
        let dist = |i: usize, j: usize| b.dist_f_n.vertex_distance(lvl + 1, i, j);
        parallelogram(
            &mut bl,
            b,
            LossTerm::PsiUp,
            e,
            fnn.vertex_range(lvl + 1),
            &dist,
            Side { kind: MapKind::PsiV, source: up, transform: &|i| i },
            Side { kind: MapKind::PsiE, source: e, transform: &|i| fnn.edge(i).1 },
        )?;
        let dist = |i: usize, j: usize| b.dist_f_n.vertex_distance(lvl, i, j);
        parallelogram(
            &mut bl,
            b,
            LossTerm::PsiDown,
            e,
            fnn.vertex_range(lvl),
            &dist,
            Side { kind: MapKind::PsiV, source: down, transform: &|i| i },
            Side { kind: MapKind::PsiE, source: e, transform: &|i| fnn.edge(i).0 },
        )?;
    }

    // Thickening parallelograms.
    for v in 0..b.f.base.vertex_count() {
        let lvl = b.f.base.vertex_level(v);
        let dist = |i: usize, j: usize| b.dist_g_2n.vertex_distance(lvl, i, j);
        parallelogram(
            &mut bl,
            b,
            LossTerm::PhiThickV,
            v,
            g2n.vertex_range(lvl),
            &dist,
            Side { kind: MapKind::PhiNV, source: b.f.incl_v_base[v], transform: &|i| i },
            Side { kind: MapKind::PhiV, source: v, transform: &|i| b.g.incl_v_n[i] },
        )?;
    }
    for e in 0..b.f.base.edge_count() {
        let lvl = b.f.base.edge_level(e);
        let dist = |i: usize, j: usize| b.dist_g_2n.edge_distance(lvl, i, j);
        parallelogram(
            &mut bl,
            b,
            LossTerm::PhiThickE,
            e,
            g2n.edge_range(lvl),
            &dist,
            Side { kind: MapKind::PhiNE, source: b.f.incl_e_base[e], transform: &|i| i },
            Side { kind: MapKind::PhiE, source: e, transform: &|i| b.g.incl_e_n[i] },
        )?;
    }
    for v in 0..b.g.base.vertex_count() {
        let lvl = b.g.base.vertex_level(v);
        let dist = |i: usize, j: usize| b.dist_f_2n.vertex_distance(lvl, i, j);
        parallelogram(
            &mut bl,
            b,
            LossTerm::PsiThickV,
            v,
            f2n.vertex_range(lvl),
            &dist,
            Side { kind: MapKind::PsiNV, source: b.g.incl_v_base[v], transform: &|i| i },
            Side { kind: MapKind::PsiV, source: v, transform: &|i| b.f.incl_v_n[i] },
        )?;
    }
    for e in 0..b.g.base.edge_count() {
        let lvl = b.g.base.edge_level(e);
        let dist = |i: usize, j: usize| b.dist_f_2n.edge_distance(lvl, i, j);
        parallelogram(
            &mut bl,
            b,
            LossTerm::PsiThickE,
            e,
            f2n.edge_range(lvl),
            &dist,
            Side { kind: MapKind::PsiNE, source: b.g.incl_e_base[e], transform: &|i| i },
            Side { kind: MapKind::PsiE, source: e, transform: &|i| b.f.incl_e_n[i] },
        )?;
    }

    // Triangles.
    for v in 0..b.f.base.vertex_count() {
        let lvl = b.f.base.vertex_level(v);
        let dist = |i: usize, j: usize| b.dist_f_2n.vertex_distance(lvl, i, j);
        triangle(
            &mut bl,
            b,
            LossTerm::TriFV,
            v,
            f2n.vertex_range(lvl),
            &dist,
            b.f.incl_v_n[b.f.incl_v_base[v]],
            MapKind::PhiV,
            MapKind::PsiNV,
        )?;
    }
    for e in 0..b.f.base.edge_count() {
        let lvl = b.f.base.edge_level(e);
        let dist = |i: usize, j: usize| b.dist_f_2n.edge_distance(lvl, i, j);
        triangle(
            &mut bl,
            b,
            LossTerm::TriFE,
            e,
            f2n.edge_range(lvl),
            &dist,
            b.f.incl_e_n[b.f.incl_e_base[e]],
            MapKind::PhiE,
            MapKind::PsiNE,
        )?;
    }
    for v in 0..b.g.base.vertex_count() {
        let lvl = b.g.base.vertex_level(v);
        let dist = |i: usize, j: usize| b.dist_g_2n.vertex_distance(lvl, i, j);
        triangle(
            &mut bl,
            b,
            LossTerm::TriGV,
            v,
            g2n.vertex_range(lvl),
            &dist,
            b.g.incl_v_n[b.g.incl_v_base[v]],
            MapKind::PsiV,
            MapKind::PhiNV,
        )?;
    }
    for e in 0..b.g.base.edge_count() {
        let lvl = b.g.base.edge_level(e);
        let dist = |i: usize, j: usize| b.dist_g_2n.edge_distance(lvl, i, j);
        triangle(
            &mut bl,
            b,
            LossTerm::TriGE,
            e,
            g2n.edge_range(lvl),
            &dist,
            b.g.incl_e_n[b.g.incl_e_base[e]],
            MapKind::PsiE,
            MapKind::PhiNE,
        )?;
    }

    Ok(bl.m)
}

impl IlpModel {
    pub fn variable_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn variable_name(&self, id: usize) -> &str {
        &self.var_names[id]
    }

    /// Serialize in LP format.
    pub fn export_lp(&self) -> String {
        let mut out = String::new();
        out.push_str("\\ loss minimization over assignment matrices\n");
        out.push_str("Minimize\n obj: l\nSubject To\n");
        for c in &self.constraints {
            out.push_str(&format!(" {}:", c.name));
            for (k, &(coef, var)) in c.terms.iter().enumerate() {
                let name = &self.var_names[var];
                if k == 0 {
                    if coef == 1 {
                        out.push_str(&format!(" {name}"));
                    } else if coef == -1 {
                        out.push_str(&format!(" - {name}"));
                    } else {
                        out.push_str(&format!(" {coef} {name}"));
                    }
                } else {
                    let sign = if coef < 0 { '-' } else { '+' };
                    let mag = coef.abs();
                    if mag == 1 {
                        out.push_str(&format!(" {sign} {name}"));
                    } else {
                        out.push_str(&format!(" {sign} {mag} {name}"));
                    }
                }
            }
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            out.push_str(&format!(" {op} {}\n", c.rhs));
        }
        out.push_str("Generals\n");
        for (id, kind) in self.var_kinds.iter().enumerate() {
            if *kind == VarKind::Integer {
                out.push_str(&format!(" {}\n", self.var_names[id]));
            }
        }
        out.push_str("Binaries\n");
        for (id, kind) in self.var_kinds.iter().enumerate() {
            if *kind == VarKind::Binary {
                out.push_str(&format!(" {}\n", self.var_names[id]));
            }
        }
        out.push_str("End\n");
        out
    }

    /// Read a solution in `name value` lines (one `objective <v>` line, `#`
    /// comments allowed) and reconstruct the assignment it encodes.
    pub fn import_solution(&self, text: &str) -> Result<(Assignment, Value), SolutionError> {
        let mut values: BTreeMap<&str, f64> = BTreeMap::new();
        let mut objective = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(name), Some(value), None) = (it.next(), it.next(), it.next()) else {
                return Err(SolutionError::BadLine { lineno: lineno + 1 });
            };
            let value: f64 =
                value.parse().map_err(|_| SolutionError::BadLine { lineno: lineno + 1 })?;
            if name == "objective" {
                objective = Some(value);
            } else {
                values.insert(name, value);
            }
        }
        let objective = objective.ok_or(SolutionError::MissingObjective)?;
        if !objective.is_finite() || objective < 0.0 || objective.fract().abs() > 1e-6 {
            return Err(SolutionError::BadObjective);
        }

        let mut maps: [Vec<usize>; 8] =
            core::array::from_fn(|pos| alloc::vec![usize::MAX; self.sizes[pos]]);
        for (&(pos, target, source), &var) in &self.x_vars {
            let name = &self.var_names[var];
            let v = values.get(name.as_str()).copied().unwrap_or(0.0);
            if v > 0.5 {
                if maps[pos][source] != usize::MAX {
                    return Err(SolutionError::NotOneHot {
                        map: MapKind::ALL[pos].name(),
                        source,
                    });
                }
                maps[pos][source] = target;
            }
        }
        for (pos, m) in maps.iter().enumerate() {
            if let Some(source) = m.iter().position(|&t| t == usize::MAX) {
                return Err(SolutionError::NotOneHot { map: MapKind::ALL[pos].name(), source });
            }
        }
        let [phi_v, phi_e, psi_v, psi_e, phin_v, phin_e, psin_v, psin_e] = maps;
        let a = Assignment { phi_v, phi_e, psi_v, psi_e, phin_v, phin_e, psin_v, psin_e };
        Ok((a, Value::Fin(objective.round() as i64)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionError {
    BadLine { lineno: usize },
    MissingObjective,
    BadObjective,
    NotOneHot { map: &'static str, source: usize },
}

impl fmt::Display for SolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionError::BadLine { lineno } => write!(f, "unparseable line {lineno}"),
            SolutionError::MissingObjective => write!(f, "no objective line"),
            SolutionError::BadObjective => write!(f, "objective is not a non-negative integer"),
            SolutionError::NotOneHot { map, source } => {
                write!(f, "{map} column {source} is not one-hot in the solution")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolutionError {}
