//! Exact minimization of the loss over all assignments at a fixed shift.
//!
//! The optimizer runs iterative deepening on the loss value: for thresholds
//! `t = 0, 1, 2, ...` it searches for an assignment whose loss is at most
//! `t`, pruning any candidate that resolves a loss term above `t`. A failed
//! search proves the minimum exceeds `t`, so the first success is optimal.
//! Columns are assigned depth first in an order where every loss term
//! resolves as soon as its last input is chosen: vertex maps interleaved
//! with the edge columns hanging below them, then the smoothing-level maps.
//!
//! The search is anytime: it always returns a valid assignment (the best
//! found, or a canonical feasible one) together with a proven lower bound on
//! the minimal loss. Callers that only need to know whether the loss
//! reaches some value can pass a `cap` to stop the deepening early.

use alloc::vec::Vec;

use crate::bundle::Bundle;
use crate::loss::{evaluate_loss, term_value, Assignment, Infeasible, LossReport, LossTerm, MapKind};
use crate::value::Value;

/// Search limits. `max_seconds` is ignored without the `std` feature.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_seconds: Option<u64>,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { max_nodes: 1_000_000, max_seconds: Some(60) }
    }
}

/// Outcome of a solve: a concrete assignment plus what was proven about the
/// true minimum.
#[derive(Clone, Debug)]
pub struct Solved {
    pub assignment: Assignment,
    pub report: LossReport,
    /// The minimal loss is at least this; equal to `report.loss` when the
    /// solve is exact.
    pub lower_bound: Value,
    pub nodes: u64,
    pub proven_optimal: bool,
}

/// Set of column depths, used for conflict-directed backjumping.
#[derive(Clone, Debug)]
struct DepthSet {
    bits: Vec<u64>,
}

impl DepthSet {
    fn new(len: usize) -> DepthSet {
        DepthSet { bits: alloc::vec![0; len.div_ceil(64)] }
    }

    fn insert(&mut self, d: usize) {
        self.bits[d / 64] |= 1 << (d % 64);
    }

    fn remove(&mut self, d: usize) {
        self.bits[d / 64] &= !(1 << (d % 64));
    }

    fn contains(&self, d: usize) -> bool {
        self.bits[d / 64] & (1 << (d % 64)) != 0
    }

    fn merge(&mut self, other: &DepthSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }
}

enum Step {
    Found,
    /// Dead end; the set holds every earlier column whose choice could have
    /// influenced the failure.
    Fail(DepthSet),
}

struct Searcher<'a> {
    b: &'a Bundle,
    order: Vec<(MapKind, usize)>,
    /// Depth of every column in `order`.
    depth_of: Vec<Vec<usize>>,
    /// Preimages of the base-to-smoothing inclusions, indexed by smoothed id.
    pre_f_v: Vec<Vec<usize>>,
    pre_f_e: Vec<Vec<usize>>,
    pre_g_v: Vec<Vec<usize>>,
    pre_g_e: Vec<Vec<usize>>,
    threshold: Value,
    found: Option<Assignment>,
    nodes: u64,
    max_nodes: u64,
    #[cfg(feature = "std")]
    deadline: Option<std::time::Instant>,
    out_of_budget: bool,
}

fn preimages(map: &[usize], target_len: usize) -> Vec<Vec<usize>> {
    let mut pre = alloc::vec![Vec::new(); target_len];
    for (src, &dst) in map.iter().enumerate() {
        pre[dst].push(src);
    }
    pre
}

impl<'a> Searcher<'a> {
    /// Worst loss term that becomes fully determined when `(kind, src)`
    /// receives a value, given that all earlier columns are assigned.
    fn resolved(&self, a: &Assignment, kind: MapKind, src: usize) -> Value {
        let b = self.b;
        let mut worst = Value::ZERO;
        let mut take = |t: LossTerm, col: usize| {
            let v = term_value(b, a, t, col);
            if v > worst {
                worst = v;
            }
        };
        match kind {
            MapKind::PhiV | MapKind::PsiV => {}
            MapKind::PhiE => {
                take(LossTerm::PhiUp, src);
                take(LossTerm::PhiDown, src);
            }
            MapKind::PsiE => {
                take(LossTerm::PsiUp, src);
                take(LossTerm::PsiDown, src);
            }
            MapKind::PhiNV => {
                for &v in &self.pre_f_v[src] {
                    take(LossTerm::PhiThickV, v);
                }
                for w in 0..b.g.base.vertex_count() {
                    if a.psi_v[w] == src {
                        take(LossTerm::TriGV, w);
                    }
                }
            }
            MapKind::PhiNE => {
                for &e in &self.pre_f_e[src] {
                    take(LossTerm::PhiThickE, e);
                }
                for w in 0..b.g.base.edge_count() {
                    if a.psi_e[w] == src {
                        take(LossTerm::TriGE, w);
                    }
                }
            }
            MapKind::PsiNV => {
                for &v in &self.pre_g_v[src] {
                    take(LossTerm::PsiThickV, v);
                }
                for w in 0..b.f.base.vertex_count() {
                    if a.phi_v[w] == src {
                        take(LossTerm::TriFV, w);
                    }
                }
            }
            MapKind::PsiNE => {
                for &e in &self.pre_g_e[src] {
                    take(LossTerm::PsiThickE, e);
                }
                for w in 0..b.f.base.edge_count() {
                    if a.phi_e[w] == src {
                        take(LossTerm::TriFE, w);
                    }
                }
            }
        }
        worst
    }

    /// Whether any loss term resolves at this column. Columns of the
    /// smoothing maps with no inclusion preimage and no image preimage under
    /// `phi`/`psi` never influence the loss, so branching over them is
    /// pointless.
    fn constrained(&self, a: &Assignment, kind: MapKind, src: usize) -> bool {
        match kind {
            MapKind::PhiV | MapKind::PhiE | MapKind::PsiV | MapKind::PsiE => true,
            MapKind::PhiNV => !self.pre_f_v[src].is_empty() || a.psi_v.contains(&src),
            MapKind::PhiNE => !self.pre_f_e[src].is_empty() || a.psi_e.contains(&src),
            MapKind::PsiNV => !self.pre_g_v[src].is_empty() || a.phi_v.contains(&src),
            MapKind::PsiNE => !self.pre_g_e[src].is_empty() || a.phi_e.contains(&src),
        }
    }

    /// One-step lookahead for a vertex-map candidate: every edge hanging
    /// below the vertex gets its edge column right after, and each of those
    /// columns must admit some target within the threshold. On failure
    /// returns the depth of the edge's lower-endpoint column, the only other
    /// choice the dead end depends on.
    fn edge_lookahead(&self, a: &mut Assignment, kind: MapKind, v: usize) -> Result<(), usize> {
        let (kv, ke, edges) = match kind {
            MapKind::PhiV => (MapKind::PhiV, MapKind::PhiE, &self.b.f.base),
            MapKind::PsiV => (MapKind::PsiV, MapKind::PsiE, &self.b.g.base),
            _ => return Ok(()),
        };
        for e in 0..edges.edge_count() {
            if edges.edge(e).1 != v {
                continue;
            }
            let saved = a.map(ke)[e];
            let ok = ke.candidates(self.b, e).any(|cand| {
                a.map_mut(ke)[e] = cand;
                self.resolved(a, ke, e) <= self.threshold
            });
            a.map_mut(ke)[e] = saved;
            if !ok {
                return Err(self.depth_of[kv as usize][edges.edge(e).0]);
            }
        }
        Ok(())
    }

    /// Depths of the earlier columns feeding the loss terms that resolve at
    /// `(kind, src)`: the columns a dead end here can be blamed on.
    fn conflict_cols(&self, a: &Assignment, kind: MapKind, src: usize, out: &mut DepthSet) {
        let b = self.b;
        let d = &self.depth_of;
        match kind {
            MapKind::PhiV | MapKind::PsiV => {}
            MapKind::PhiE => {
                let (lo, up) = b.f.base.edge(src);
                out.insert(d[MapKind::PhiV as usize][lo]);
                out.insert(d[MapKind::PhiV as usize][up]);
            }
            MapKind::PsiE => {
                let (lo, up) = b.g.base.edge(src);
                out.insert(d[MapKind::PsiV as usize][lo]);
                out.insert(d[MapKind::PsiV as usize][up]);
            }
            MapKind::PhiNV => {
                for &v in &self.pre_f_v[src] {
                    out.insert(d[MapKind::PhiV as usize][v]);
                }
                for w in 0..b.g.base.vertex_count() {
                    if a.psi_v[w] == src {
                        out.insert(d[MapKind::PsiV as usize][w]);
                    }
                }
            }
            MapKind::PhiNE => {
                for &e in &self.pre_f_e[src] {
                    out.insert(d[MapKind::PhiE as usize][e]);
                }
                for w in 0..b.g.base.edge_count() {
                    if a.psi_e[w] == src {
                        out.insert(d[MapKind::PsiE as usize][w]);
                    }
                }
            }
            MapKind::PsiNV => {
                for &v in &self.pre_g_v[src] {
                    out.insert(d[MapKind::PsiV as usize][v]);
                }
                for w in 0..b.f.base.vertex_count() {
                    if a.phi_v[w] == src {
                        out.insert(d[MapKind::PhiV as usize][w]);
                    }
                }
            }
            MapKind::PsiNE => {
                for &e in &self.pre_g_e[src] {
                    out.insert(d[MapKind::PsiE as usize][e]);
                }
                for w in 0..b.f.base.edge_count() {
                    if a.phi_e[w] == src {
                        out.insert(d[MapKind::PhiE as usize][w]);
                    }
                }
            }
        }
    }

    fn spent(&mut self) -> bool {
        if self.out_of_budget {
            return true;
        }
        if self.nodes >= self.max_nodes {
            self.out_of_budget = true;
            return true;
        }
        #[cfg(feature = "std")]
        if let Some(deadline) = self.deadline {
            // Clock checks are cheap but not free; sample them.
            if self.nodes % 1024 == 0 && std::time::Instant::now() >= deadline {
                self.out_of_budget = true;
                return true;
            }
        }
        false
    }

    /// Depth-first decision search for an assignment with loss at most the
    /// threshold, with conflict-directed backjumping: a dead end reports
    /// which earlier columns it depends on, and ancestors not in that set
    /// skip their remaining candidates instead of re-proving the same
    /// failure. Fills `found` on success.
    fn dfs(&mut self, depth: usize, a: &mut Assignment) -> Step {
        let Some(&(kind, src)) = self.order.get(depth) else {
            self.found = Some(a.clone());
            return Step::Found;
        };
        let mut confl = DepthSet::new(self.order.len());
        // Try cheap targets first: rank candidates by the worst loss term
        // they resolve, ties broken by id for determinism.
        let mut ranked: Vec<(Value, usize)> = Vec::new();
        if self.constrained(a, kind, src) {
            let mut pruned_any = false;
            for cand in kind.candidates(self.b, src) {
                a.map_mut(kind)[src] = cand;
                let v = self.resolved(a, kind, src);
                if v <= self.threshold {
                    ranked.push((v, cand));
                } else {
                    pruned_any = true;
                }
            }
            if pruned_any {
                self.conflict_cols(a, kind, src, &mut confl);
            }
            ranked.sort();
        } else {
            ranked.push((Value::ZERO, kind.candidates(self.b, src).start));
        }
        for (_, cand) in ranked {
            self.nodes += 1;
            if self.spent() {
                return Step::Fail(confl);
            }
            a.map_mut(kind)[src] = cand;
            match self.edge_lookahead(a, kind, src) {
                Ok(()) => {}
                Err(other) => {
                    confl.insert(other);
                    continue;
                }
            }
            match self.dfs(depth + 1, a) {
                Step::Found => return Step::Found,
                Step::Fail(mut sub) => {
                    if self.out_of_budget {
                        return Step::Fail(confl);
                    }
                    if !sub.contains(depth) {
                        // This column's choice is irrelevant to the dead
                        // end; trying other candidates cannot help.
                        return Step::Fail(sub);
                    }
                    sub.remove(depth);
                    confl.merge(&sub);
                }
            }
        }
        Step::Fail(confl)
    }
}

/// Solve exactly: iterative deepening until the minimum is proven.
pub fn solve_exact(b: &Bundle, budget: &Budget) -> Result<Solved, Infeasible> {
    solve_with_cap(b, budget, Value::Unbounded)
}

/// Like [`solve_exact`], but stop deepening once the minimal loss is proven
/// to be at least `cap`. Useful when any loss that large already makes the
/// shift uncompetitive.
pub fn solve_with_cap(b: &Bundle, budget: &Budget, cap: Value) -> Result<Solved, Infeasible> {
    let mut incumbent = Assignment::first_feasible(b)?;
    let mut incumbent_report = evaluate_loss(b, &incumbent);

    // Interleave vertex and edge columns so that an edge column comes right
    // after its upper endpoint and resolves its parallelogram terms at once.
    let mut order = Vec::new();
    for (kv, ke) in [(MapKind::PhiV, MapKind::PhiE), (MapKind::PsiV, MapKind::PsiE)] {
        let src = kv.source_graph(b);
        for v in 0..src.vertex_count() {
            order.push((kv, v));
            for e in 0..src.edge_count() {
                if src.edge(e).1 == v {
                    order.push((ke, e));
                }
            }
        }
    }
    for kind in [MapKind::PhiNV, MapKind::PhiNE, MapKind::PsiNV, MapKind::PsiNE] {
        for src in 0..kind.source_count(b) {
            order.push((kind, src));
        }
    }

    let mut depth_of: Vec<Vec<usize>> =
        MapKind::ALL.iter().map(|k| alloc::vec![usize::MAX; k.source_count(b)]).collect();
    for (d, &(kind, src)) in order.iter().enumerate() {
        depth_of[kind as usize][src] = d;
    }

    let pre_f_v = preimages(&b.f.incl_v_base, b.f.smooth_n.vertex_count());
    let pre_f_e = preimages(&b.f.incl_e_base, b.f.smooth_n.edge_count());
    let pre_g_v = preimages(&b.g.incl_v_base, b.g.smooth_n.vertex_count());
    let pre_g_e = preimages(&b.g.incl_e_base, b.g.smooth_n.edge_count());

    // No finite loss can exceed the largest possible merge distance.
    let t_max = 2 * b.f.base.grid().half_range() + 2;
    let mut lower = Value::ZERO;
    let mut nodes_total = 0u64;
    #[cfg(feature = "std")]
    let deadline = budget
        .max_seconds
        .map(|sec| std::time::Instant::now() + std::time::Duration::from_secs(sec));

    let mut t = 0i64;
    while Value::Fin(t) < incumbent_report.loss && lower < cap {
        let mut s = Searcher {
            b,
            order: core::mem::take(&mut order),
            depth_of: depth_of.clone(),
            pre_f_v: pre_f_v.clone(),
            pre_f_e: pre_f_e.clone(),
            pre_g_v: pre_g_v.clone(),
            pre_g_e: pre_g_e.clone(),
            threshold: Value::Fin(t),
            found: None,
            nodes: 0,
            max_nodes: budget.max_nodes.saturating_sub(nodes_total),
            #[cfg(feature = "std")]
            deadline,
            out_of_budget: false,
        };
        let mut work = incumbent.clone();
        let _ = s.dfs(0, &mut work);
        nodes_total += s.nodes;
        order = s.order;
        if let Some(a) = s.found {
            let report = evaluate_loss(b, &a);
            debug_assert!(report.loss <= Value::Fin(t));
            incumbent = a;
            incumbent_report = report;
            break;
        }
        if s.out_of_budget {
            break;
        }
        lower = Value::Fin(t + 1);
        if t >= t_max {
            // Every finite threshold is refuted: the loss is unbounded.
            lower = Value::Unbounded;
            break;
        }
        t += 1;
    }
    if incumbent_report.loss <= lower {
        lower = incumbent_report.loss;
    }

    let proven_optimal = lower == incumbent_report.loss;
    Ok(Solved {
        assignment: incumbent,
        report: incumbent_report,
        lower_bound: lower,
        nodes: nodes_total,
        proven_optimal,
    })
}
