//! Synthetic letter-shaped point clouds: six letter classes sampled from
//! polyline skeletons at several densities and noise levels.

use interleave_core::cloud::PointCloud2D;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CLASSES: [char; 6] = ['A', 'B', 'D', 'I', 'R', 'W'];
pub const POINT_COUNTS: [usize; 3] = [500, 700, 1000];
pub const NOISE_LEVELS: [f64; 3] = [0.0, 0.01, 0.02];

type Seg = ([f64; 2], [f64; 2]);

/// Skeleton of a letter as segments in the unit square.
fn skeleton(letter: char) -> Vec<Seg> {
    match letter {
        'A' => vec![
            ([0.0, 0.0], [0.5, 1.0]),
            ([0.5, 1.0], [1.0, 0.0]),
            ([0.25, 0.5], [0.75, 0.5]),
        ],
        'B' => vec![
            ([0.0, 0.0], [0.0, 1.0]),
            ([0.0, 1.0], [0.6, 0.85]),
            ([0.6, 0.85], [0.0, 0.5]),
            ([0.0, 0.5], [0.7, 0.25]),
            ([0.7, 0.25], [0.0, 0.0]),
        ],
        'D' => vec![
            ([0.0, 0.0], [0.0, 1.0]),
            ([0.0, 1.0], [0.8, 0.5]),
            ([0.8, 0.5], [0.0, 0.0]),
        ],
        'I' => vec![([0.5, 0.0], [0.5, 1.0])],
        'R' => vec![
            ([0.0, 0.0], [0.0, 1.0]),
            ([0.0, 1.0], [0.7, 0.75]),
            ([0.7, 0.75], [0.0, 0.5]),
            ([0.0, 0.5], [1.0, 0.0]),
        ],
        'W' => vec![
            ([0.0, 1.0], [0.25, 0.0]),
            ([0.25, 0.0], [0.5, 0.6]),
            ([0.5, 0.6], [0.75, 0.0]),
            ([0.75, 0.0], [1.0, 1.0]),
        ],
        other => panic!("unknown letter {other:?}"),
    }
}

fn seg_len(s: &Seg) -> f64 {
    let (dx, dy) = (s.1[0] - s.0[0], s.1[1] - s.0[1]);
    (dx * dx + dy * dy).sqrt()
}

/// Standard normal via Box-Muller.
fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Sample `points` points uniformly along the skeleton, jittered by
/// Gaussian noise of deviation `sigma`. Deterministic in the seed.
pub fn letter_cloud(letter: char, points: usize, sigma: f64, seed: u64) -> PointCloud2D {
    let segs = skeleton(letter);
    let total: f64 = segs.iter().map(seg_len).sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cloud = Vec::with_capacity(points);
    for i in 0..points {
        let mut t = (i as f64 + 0.5) / points as f64 * total;
        let mut p = segs[segs.len() - 1].1;
        for s in &segs {
            let l = seg_len(s);
            if t <= l {
                let f = t / l;
                p = [s.0[0] + f * (s.1[0] - s.0[0]), s.0[1] + f * (s.1[1] - s.0[1])];
                break;
            }
            t -= l;
        }
        cloud.push([p[0] + sigma * gaussian(&mut rng), p[1] + sigma * gaussian(&mut rng)]);
    }
    PointCloud2D::new(cloud)
}

/// Stable per-fixture seed so regenerated corpora are identical.
pub fn fixture_seed(letter: char, points: usize, noise_index: usize) -> u64 {
    (letter as u64) << 32 | (points as u64) << 8 | noise_index as u64
}

/// All 54 fixtures as `(name, class, cloud)`.
pub fn corpus() -> Vec<(String, String, PointCloud2D)> {
    let mut out = Vec::new();
    for &letter in &CLASSES {
        for &points in &POINT_COUNTS {
            for (ni, &sigma) in NOISE_LEVELS.iter().enumerate() {
                let name = format!("{letter}_p{points}_n{ni}");
                let cloud = letter_cloud(letter, points, sigma, fixture_seed(letter, points, ni));
                out.push((name, letter.to_string(), cloud));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use interleave_core::cloud::{build_mapper, CoverSpec};

    fn spec() -> CoverSpec {
        CoverSpec { intervals: 10, overlap: 0.3, epsilon: 0.12, resolution: Some(20) }
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = corpus();
        let b = corpus();
        assert_eq!(a.len(), 54);
        for ((n1, _, c1), (n2, _, c2)) in a.iter().zip(&b) {
            assert_eq!(n1, n2);
            assert_eq!(c1.points, c2.points);
        }
    }

    #[test]
    fn letter_shapes_have_expected_cycles() {
        // Cycle rank = |E| - |V| + 1 for a connected graph.
        for (letter, cycles) in [('I', 0), ('D', 1), ('A', 1), ('B', 2)] {
            let cloud = letter_cloud(letter, 800, 0.0, 7);
            let (g, info) = build_mapper(&cloud, &spec()).unwrap();
            assert!(!info.trimmed, "letter {letter} fell apart");
            let rank = g.edge_count() as i64 - g.vertex_count() as i64 + 1;
            assert_eq!(rank, cycles, "letter {letter}");
        }
    }
}
