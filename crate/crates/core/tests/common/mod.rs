//! Shared generators for the integration tests.
#![allow(dead_code)]

use llcomp_core::models::{ModelParams, VertexKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CURVATURES: [f64; 5] = [-1.0, -0.25, 0.0, 0.25, 1.0];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn params(k: f64) -> ModelParams {
    ModelParams::new(k).unwrap()
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

pub fn kind(rng: &mut ChaCha8Rng) -> VertexKind {
    [VertexKind::Apex, VertexKind::Shoulder, VertexKind::Sink][rng.random_range(0..3)]
}

/// Side lengths `(a, b, c)` of a nondegenerate triangle well inside the
/// size bounds of every curvature in [`CURVATURES`].
pub fn triangle_sides(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let a = uniform(rng, 0.05, 0.9);
    let b = uniform(rng, 0.05, 0.9);
    let c = a + b + uniform(rng, 0.02, 1.0);
    [a, b, c]
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

use llcomp_core::spaces::{EventPoint, TabulatedSpace};

/// A causal set: `n` random events of the diamond `|x| + |t − 1| ≤ 1` with
/// the Minkowski order, and `τ` the number of links of the longest chain.
/// Integer values make the reverse triangle inequality exact.
pub fn causal_set(n: usize, seed: u64) -> TabulatedSpace {
    let mut r = rng(seed);
    let mut pts: Vec<EventPoint> = Vec::with_capacity(n);
    while pts.len() < n {
        let (u, v) = (r.random::<f64>(), r.random::<f64>());
        // Light-cone coordinates fill the diamond uniformly.
        let p = EventPoint::new(u - v, u + v);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts.sort_by(|p, q| p.t.total_cmp(&q.t));
    let precedes = |p: &EventPoint, q: &EventPoint| q.t - p.t > (q.x - p.x).abs();
    let mut tau = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if !precedes(&pts[i], &pts[j]) {
                continue;
            }
            let mut best: f64 = 1.0;
            for m in i + 1..j {
                if precedes(&pts[i], &pts[m]) && precedes(&pts[m], &pts[j]) {
                    best = best.max(tau[i][m] + 1.0);
                }
            }
            tau[i][j] = best;
        }
    }
    let ids = (0..n).map(|i| format!("e{i}")).collect();
    TabulatedSpace::new(ids, pts, tau, None).unwrap()
}
