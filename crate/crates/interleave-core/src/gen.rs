//! Synthetic fixtures and a brute-force oracle for small instances.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use rand::Rng;

use crate::bundle::Bundle;
use crate::graph::MapperGraph;
use crate::grid::Grid;
use crate::loss::{evaluate_loss, Assignment, Infeasible, LossReport, MapKind};

/// A single path with one vertex per level of `lo..=hi`.
pub fn line_mapper(lo: i64, hi: i64) -> MapperGraph {
    assert!(lo < hi);
    let grid = Grid::covering([lo, hi]);
    let levels: Vec<i64> = (lo..=hi).collect();
    let edges: Vec<(usize, usize)> = (0..levels.len() - 1).map(|k| (k, k + 1)).collect();
    MapperGraph::from_parts(grid, levels, edges).unwrap()
}

/// A path with a cycle in the middle: single vertices outside
/// `loop_lo..=loop_hi`, two parallel strands strictly inside, joined at the
/// loop ends. The mapper graph of a torus standing on end.
pub fn torus_mapper(lo: i64, hi: i64, loop_lo: i64, loop_hi: i64) -> MapperGraph {
    assert!(lo <= loop_lo && loop_lo + 1 < loop_hi && loop_hi <= hi);
    let grid = Grid::covering([lo, hi]);
    let mut levels = Vec::new();
    let mut ids: Vec<Vec<usize>> = Vec::new();
    for level in lo..=hi {
        let width = if level > loop_lo && level < loop_hi { 2 } else { 1 };
        let mut here = Vec::new();
        for _ in 0..width {
            here.push(levels.len());
            levels.push(level);
        }
        ids.push(here);
    }
    let mut edges = Vec::new();
    for (k, level) in (lo..hi).enumerate() {
        let below = &ids[k];
        let above = &ids[k + 1];
        let _ = level;
        if below.len() == 1 && above.len() == 1 {
            edges.push((below[0], above[0]));
        } else if below.len() == 1 {
            edges.push((below[0], above[0]));
            edges.push((below[0], above[1]));
        } else if above.len() == 1 {
            edges.push((below[0], above[0]));
            edges.push((below[1], above[0]));
        } else {
            edges.push((below[0], above[0]));
            edges.push((below[1], above[1]));
        }
    }
    MapperGraph::from_parts(grid, levels, edges).unwrap()
}

/// A pair of graphs whose optimized bound is strictly larger than their
/// interleaving distance: each is a long chain with a short spur, but the
/// spurs hang at different heights, so no assignment at the true distance
/// commutes on the nose.
pub fn counterexample_pair() -> (MapperGraph, MapperGraph) {
    let grid = Grid::covering([-2, 7]);
    // Main chain -2..=7 plus a spur hanging from the chain at level 6 down
    // to level 1.
    let mut f_levels: Vec<i64> = (-2..=7).collect();
    let chain_at = |level: i64| (level + 2) as usize;
    let mut f_edges: Vec<(usize, usize)> = (0..9).map(|k| (k, k + 1)).collect();
    let spur_base = f_levels.len();
    for level in 1..=5 {
        f_levels.push(level);
    }
    // Spur tip at level 1, rising to level 5, attached to the chain at 6.
    for k in 0..4 {
        f_edges.push((spur_base + k, spur_base + k + 1));
    }
    f_edges.push((spur_base + 4, chain_at(6)));
    let f = MapperGraph::from_parts(grid, f_levels, f_edges).unwrap();

    // Same chain, spur hanging from level 5 down to level 3.
    let mut g_levels: Vec<i64> = (-2..=7).collect();
    let mut g_edges: Vec<(usize, usize)> = (0..9).map(|k| (k, k + 1)).collect();
    let spur_base = g_levels.len();
    for level in 3..=4 {
        g_levels.push(level);
    }
    g_edges.push((spur_base, spur_base + 1));
    g_edges.push((spur_base + 1, chain_at(5)));
    let g = MapperGraph::from_parts(grid, g_levels, g_edges).unwrap();
    (f, g)
}

/// Shape of a random mapper graph.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub levels: RangeInclusive<i64>,
    /// Maximum vertices per level (at least 1 is always placed).
    pub max_width: usize,
    /// Extra random edges on top of the spanning ones.
    pub extra_edges: usize,
}

/// A random connected mapper graph: every level in the span is nonempty and
/// every vertex is wired to the level below, then extra edges are sprinkled.
pub fn random_mapper<R: Rng>(spec: &RandomSpec, rng: &mut R) -> MapperGraph {
    let (lo, hi) = (*spec.levels.start(), *spec.levels.end());
    assert!(lo < hi && spec.max_width >= 1);
    let grid = Grid::covering([lo, hi]);
    let mut levels = Vec::new();
    let mut ids: Vec<Vec<usize>> = Vec::new();
    for level in lo..=hi {
        let width = rng.gen_range(1..=spec.max_width);
        let mut here = Vec::new();
        for _ in 0..width {
            here.push(levels.len());
            levels.push(level);
        }
        ids.push(here);
    }
    let mut edges = Vec::new();
    for k in 1..ids.len() {
        for &v in &ids[k] {
            let below = &ids[k - 1];
            edges.push((below[rng.gen_range(0..below.len())], v));
        }
        // Keep stranded lower vertices attached too.
        for &v in &ids[k - 1] {
            if !edges.iter().any(|&(a, _)| a == v) {
                let above = &ids[k];
                edges.push((v, above[rng.gen_range(0..above.len())]));
            }
        }
    }
    for _ in 0..spec.extra_edges {
        let k = rng.gen_range(1..ids.len());
        let below = &ids[k - 1];
        let above = &ids[k];
        edges.push((
            below[rng.gen_range(0..below.len())],
            above[rng.gen_range(0..above.len())],
        ));
    }
    MapperGraph::from_parts(grid, levels, edges).unwrap()
}

/// The search space is too large to enumerate under the given cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TooLarge {
    pub combinations: u128,
    pub cap: u128,
}

impl fmt::Display for TooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} assignments exceed the enumeration cap {}", self.combinations, self.cap)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TooLarge {}

#[derive(Clone, Debug)]
pub enum OracleError {
    Infeasible(Infeasible),
    TooLarge(TooLarge),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Infeasible(e) => write!(f, "{e}"),
            OracleError::TooLarge(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OracleError {}

impl From<Infeasible> for OracleError {
    fn from(e: Infeasible) -> OracleError {
        OracleError::Infeasible(e)
    }
}

/// Enumerate every assignment and keep a loss-minimal one. Independent of
/// the branch-and-bound solver; used as its oracle on small instances.
pub fn brute_force_min_loss(
    b: &Bundle,
    cap: u128,
) -> Result<(Assignment, LossReport), OracleError> {
    let mut a = Assignment::first_feasible(b)?;
    let mut columns: Vec<(MapKind, usize)> = Vec::new();
    let mut combinations: u128 = 1;
    for kind in MapKind::ALL {
        for src in 0..kind.source_count(b) {
            columns.push((kind, src));
            combinations = combinations.saturating_mul(kind.candidates(b, src).len() as u128);
            if combinations > cap {
                return Err(OracleError::TooLarge(TooLarge { combinations, cap }));
            }
        }
    }
    let mut best = a.clone();
    let mut best_report = evaluate_loss(b, &a);
    loop {
        let report = evaluate_loss(b, &a);
        if report.loss < best_report.loss {
            best = a.clone();
            best_report = report;
        }
        // Odometer step over the admissible ranges.
        let mut k = columns.len();
        loop {
            if k == 0 {
                return Ok((best, best_report));
            }
            k -= 1;
            let (kind, src) = columns[k];
            let range = kind.candidates(b, src);
            let cur = a.map(kind)[src];
            if cur + 1 < range.end {
                a.map_mut(kind)[src] = cur + 1;
                break;
            }
            a.map_mut(kind)[src] = range.start;
        }
    }
}

/// Smallest shift admitting a zero-loss assignment, found by enumeration.
/// `None` if no shift up to `n_max` works.
pub fn brute_force_interleaving(
    f: &MapperGraph,
    g: &MapperGraph,
    n_max: u64,
    cap: u128,
) -> Result<Option<u64>, TooLarge> {
    for n in 0..=n_max {
        let b = Bundle::new(f.clone(), g.clone(), n);
        match brute_force_min_loss(&b, cap) {
            Ok((_, report)) if report.loss.is_zero() => return Ok(Some(n)),
            Ok(_) => {}
            Err(OracleError::Infeasible(_)) => {}
            Err(OracleError::TooLarge(e)) => return Err(e),
        }
    }
    Ok(None)
}

/// Human-readable one-line description of a fixture graph.
pub fn describe(g: &MapperGraph) -> String {
    format!(
        "{} vertices, {} edges, levels {}..={}",
        g.vertex_count(),
        g.edge_count(),
        (0..g.vertex_count()).map(|v| g.vertex_level(v)).min().unwrap_or(0),
        (0..g.vertex_count()).map(|v| g.vertex_level(v)).max().unwrap_or(0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::{solve_exact, solve_with_cap, Budget};
    use crate::value::Value;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn line_and_torus_shapes() {
        let l = line_mapper(-3, 3);
        assert_eq!(l.vertex_count(), 7);
        assert_eq!(l.edge_count(), 6);
        assert!(l.validate().connected);
        let t = torus_mapper(-3, 3, -2, 2);
        assert!(t.validate().connected);
        assert_eq!(t.vertex_range(0).len(), 2);
        assert_eq!(t.vertex_range(-2).len(), 1);
    }

    #[test]
    fn line_interleaves_with_itself_at_zero() {
        let l = line_mapper(-2, 2);
        assert_eq!(brute_force_interleaving(&l, &l, 2, 1_000_000).unwrap(), Some(0));
    }

    /// The loop collapses once the smoothing window spans it, so the
    /// distance to the line is a quarter of the loop height, rounded up.
    #[test]
    fn torus_vs_line_distance() {
        for h in [2i64, 3, 4] {
            let lo = -4;
            let hi = 4;
            let l = line_mapper(lo, hi);
            let half = h / 2;
            let t = torus_mapper(lo, hi, -half, h - half);
            let expect = (h as u64).div_ceil(4);
            let got = brute_force_interleaving(&l, &t, 4, 10_000_000).unwrap();
            assert_eq!(got, Some(expect), "loop height {h}");
        }
    }

    #[test]
    fn random_graphs_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let spec = RandomSpec { levels: -2..=2, max_width: 2, extra_edges: 2 };
            let g = random_mapper(&spec, &mut rng);
            assert!(g.validate().connected);
        }
    }

    #[test]
    fn solver_matches_oracle_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let spec = RandomSpec { levels: -1..=2, max_width: 2, extra_edges: 1 };
        for round in 0..10 {
            let f = random_mapper(&spec, &mut rng);
            let g = random_mapper(&spec, &mut rng);
            for n in [0u64, 1] {
                let b = Bundle::new(f.clone(), g.clone(), n);
                let (_, oracle) = match brute_force_min_loss(&b, 3_000_000) {
                    Ok(r) => r,
                    Err(OracleError::TooLarge(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                let solved = solve_exact(&b, &Budget::default()).unwrap();
                assert!(solved.proven_optimal, "round {round} n {n}");
                assert_eq!(solved.report.loss, oracle.loss, "round {round} n {n}");
            }
        }
    }

    /// The optimized bound can overshoot the true distance: these two graphs
    /// interleave at 2, but no single assignment certifies better than 3.
    #[test]
    fn counterexample_bound_exceeds_distance() {
        let (f, g) = counterexample_pair();
        let budget = Budget { max_nodes: 50_000_000, max_seconds: Some(300) };
        // No interleaving at shifts 0 and 1: refuting loss zero is enough.
        let s0 = solve_with_cap(&Bundle::new(f.clone(), g.clone(), 0), &budget, Value::Fin(1))
            .unwrap();
        assert!(s0.lower_bound >= Value::Fin(1));
        let s1 = solve_exact(&Bundle::new(f.clone(), g.clone(), 1), &budget).unwrap();
        assert!(s1.proven_optimal);
        assert_eq!(s1.report.bound(), Value::Fin(3));
        // The smallest interleaving shift is 2, matching the true distance.
        let s2 = solve_exact(&Bundle::new(f, g, 2), &budget).unwrap();
        assert!(s2.proven_optimal);
        assert!(s2.report.is_interleaving());
    }
}
