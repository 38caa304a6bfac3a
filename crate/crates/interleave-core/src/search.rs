//! Search over the shift `n` for the best bound `n + loss(n)`.
//!
//! The minimal loss is not monotone in `n`, but it does reach zero once `n`
//! is large enough (on a bounded grid, by `2L` at the latest, when every
//! smoothing collapses to one component per level). The search first finds
//! the smallest zero-loss shift by doubling and bisection, asking each
//! visited shift only the cheap question "is the loss zero?". It then
//! revisits the smaller shifts in order, each solve capped at the loss that
//! would already fail to beat the best bound seen, and reports the minimum
//! `n + loss` over all visited shifts.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bundle::Bundle;
use crate::graph::MapperGraph;
use crate::solve::{solve_with_cap, Budget, Solved};
use crate::value::Value;

/// One evaluated shift.
#[derive(Clone, Debug)]
pub struct SearchStep {
    pub n: u64,
    /// Loss of the best assignment found at this shift (an upper bound on
    /// the minimum); `Unbounded` when no assignment exists.
    pub loss: Value,
    /// Proven lower bound on the minimal loss at this shift.
    pub lower: Value,
    /// `n + loss`.
    pub bound: Value,
    pub nodes: u64,
}

impl SearchStep {
    /// `n + lower`: no assignment at this shift can certify less.
    pub fn floor(&self) -> Value {
        Value::Fin(self.n as i64) + self.lower
    }
}

/// Full record of a search.
#[derive(Clone, Debug)]
pub struct SearchTrace {
    /// Final state of every visited shift, in ascending shift order.
    pub steps: Vec<SearchStep>,
    /// Shift achieving the best bound.
    pub best_n: u64,
    pub best: Option<Solved>,
    /// Minimum `n + loss` over the visited shifts.
    pub bound: Value,
    /// True when every visited shift was either solved exactly or proven
    /// unable to beat `bound`, so `bound` is the exact optimum over the
    /// visited range.
    pub proven: bool,
}

fn solve_at(
    f: &MapperGraph,
    g: &MapperGraph,
    n: u64,
    budget: &Budget,
    cap: Value,
    cache: &mut BTreeMap<u64, Solved>,
) -> Value {
    let prior_lower = cache.get(&n).map(|s| s.lower_bound);
    if let Some(s) = cache.get(&n) {
        // Already answered at least as precisely as asked.
        if s.proven_optimal || s.lower_bound >= cap {
            return s.report.loss;
        }
    }
    let b = Bundle::new(f.clone(), g.clone(), n);
    match solve_with_cap(&b, budget, cap) {
        Ok(mut s) => {
            if let Some(pl) = prior_lower {
                s.lower_bound = s.lower_bound.max(pl);
            }
            let loss = s.report.loss;
            cache.insert(n, s);
            loss
        }
        Err(_) => {
            // No assignment exists at this shift at all.
            cache.insert(
                n,
                Solved {
                    assignment: crate::loss::Assignment {
                        phi_v: Vec::new(),
                        phi_e: Vec::new(),
                        psi_v: Vec::new(),
                        psi_e: Vec::new(),
                        phin_v: Vec::new(),
                        phin_e: Vec::new(),
                        psin_v: Vec::new(),
                        psin_e: Vec::new(),
                    },
                    report: crate::loss::LossReport {
                        n,
                        terms: Vec::new(),
                        loss: Value::Unbounded,
                    },
                    lower_bound: Value::Unbounded,
                    nodes: 0,
                    proven_optimal: true,
                },
            );
            Value::Unbounded
        }
    }
}

/// Optimize the bound over shifts `0..=n_cap` (default `2L`).
pub fn search_over_n(
    f: &MapperGraph,
    g: &MapperGraph,
    budget: &Budget,
    n_cap: Option<u64>,
) -> SearchTrace {
    let cap_n = n_cap.unwrap_or(2 * f.grid().half_range().max(1) as u64);
    let mut cache: BTreeMap<u64, Solved> = BTreeMap::new();
    let zero = Value::Fin(1); // deepening cap for "is the loss zero?"

    // Double until a zero-loss shift appears or the range is exhausted.
    let mut zero_at: Option<u64> = None;
    let mut below: u64 = 0;
    let mut n: u64 = 0;
    loop {
        let loss = solve_at(f, g, n, budget, zero, &mut cache);
        if loss.is_zero() {
            zero_at = Some(n);
            break;
        }
        if n >= cap_n {
            break;
        }
        below = n;
        n = if n == 0 { 1 } else { (n * 2).min(cap_n) };
    }

    // Bisect for the smallest zero-loss shift.
    if let Some(mut hi) = zero_at {
        let mut lo = below;
        while hi > lo + 1 {
            let mid = lo + (hi - lo) / 2;
            if solve_at(f, g, mid, budget, zero, &mut cache).is_zero() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        zero_at = Some(hi);
    }

    // Revisit the smaller shifts: each only needs solving until it either
    // beats the current best bound or is proven unable to.
    let mut best_bound = match zero_at {
        Some(n0) => Value::Fin(n0 as i64),
        None => {
            let visited: Vec<u64> = cache.keys().copied().collect();
            visited
                .iter()
                .map(|&m| Value::Fin(m as i64) + cache[&m].report.loss)
                .min()
                .unwrap_or(Value::Unbounded)
        }
    };
    let visited: Vec<u64> = cache.keys().copied().collect();
    for m in visited {
        let cap = match best_bound - Value::Fin(m as i64) {
            Value::Fin(gap) if gap <= 0 => continue,
            c => c,
        };
        solve_at(f, g, m, budget, cap, &mut cache);
        let got = Value::Fin(m as i64) + cache[&m].report.loss;
        if got < best_bound {
            best_bound = got;
        }
    }

    let steps: Vec<SearchStep> = cache
        .iter()
        .map(|(&m, s)| SearchStep {
            n: m,
            loss: s.report.loss,
            lower: s.lower_bound,
            bound: Value::Fin(m as i64) + s.report.loss,
            nodes: s.nodes,
        })
        .collect();
    let mut best_n = 0;
    let mut bound = Value::Unbounded;
    for s in &steps {
        if s.bound < bound {
            bound = s.bound;
            best_n = s.n;
        }
    }
    let proven = steps
        .iter()
        .all(|s| cache[&s.n].proven_optimal || s.floor() >= bound);
    let best = cache.remove(&best_n);
    SearchTrace { steps, best_n, best, bound, proven }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{counterexample_pair, line_mapper, torus_mapper};

    #[test]
    fn identical_lines_need_no_shift() {
        let l = line_mapper(-3, 3);
        let t = search_over_n(&l, &l, &Budget::default(), None);
        assert_eq!(t.bound, Value::Fin(0));
        assert_eq!(t.best_n, 0);
        assert!(t.proven);
    }

    #[test]
    fn torus_bound_matches_loop_quarter() {
        let l = line_mapper(-4, 4);
        let t4 = torus_mapper(-4, 4, -2, 2);
        let trace = search_over_n(&l, &t4, &Budget::default(), None);
        assert_eq!(trace.bound, Value::Fin(1));
        assert!(trace.proven);
    }

    /// The best bound can come from a shift below the smallest zero-loss
    /// shift, so the search must keep every visited step.
    #[test]
    fn best_bound_tracks_all_steps() {
        let (f, g) = counterexample_pair();
        let budget = Budget { max_nodes: 50_000_000, max_seconds: Some(300) };
        let trace = search_over_n(&f, &g, &budget, None);
        assert!(trace.proven);
        assert_eq!(trace.bound, Value::Fin(2));
        let zero_step = trace.steps.iter().find(|s| s.loss.is_zero()).unwrap();
        assert_eq!(zero_step.n, 2);
    }
}
