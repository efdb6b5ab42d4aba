//! Laws of cosines and the hinge, zero-sum and straightening lemmas in the
//! model spaces of all three curvature signs.

mod common;

use common::{close, kind, params, rng, triangle_sides, uniform, CURVATURES};
use llcomp_core::angles::Vertex;
use llcomp_core::models::{rescale_angle, HingeSpec, ModelError, ModelParams, Side, SideOffset, VertexKind};
use proptest::prelude::*;

const HINGES_PER_SIGN: usize = 10_000;
const CONFIGS_PER_SIGN: usize = 1_000;

/// Round-trip error of a valid hinge: `None` when the hinge endpoints are
/// not timelike related or the opposite side reaches the conjugate distance.
fn round_trip_error(k: &ModelParams, h: &HingeSpec) -> Option<f64> {
    let opp = k.hinge_opposite(h).ok()?;
    let limit = k.conjugate_limit().unwrap_or(f64::INFINITY);
    if !(opp > 1e-3 && opp < limit - 1e-3) {
        return None;
    }
    let back = k.vertex_coshphi(h.adj1, h.adj2, opp, h.kind).unwrap();
    Some((back - h.coshphi).abs())
}

#[test]
fn law_of_cosines_round_trip() {
    for (seed, kv) in [(1, -1.0), (2, 0.0), (3, 1.0)] {
        let k = params(kv);
        let mut r = rng(seed);
        let mut checked = 0;
        let mut worst: f64 = 0.0;
        while checked < HINGES_PER_SIGN {
            let h = HingeSpec::new(uniform(&mut r, 0.05, 1.2), uniform(&mut r, 0.05, 1.2), uniform(&mut r, 1.0, 4.0), kind(&mut r)).unwrap();
            if let Some(e) = round_trip_error(&k, &h) {
                worst = worst.max(e);
                checked += 1;
            }
        }
        assert!(worst < 1e-12, "k = {kv}: worst round-trip error {worst:e}");
    }
}

#[test]
fn flat_limit_of_the_laws_of_cosines() {
    let flat = ModelParams::flat();
    let mut r = rng(4);
    for _ in 0..2_000 {
        let h = HingeSpec::new(uniform(&mut r, 0.05, 2.0), uniform(&mut r, 0.05, 2.0), uniform(&mut r, 1.0, 5.0), kind(&mut r)).unwrap();
        let scale = h.adj1.max(h.adj2);
        let reference = flat.hinge_opposite(&h).unwrap();
        for kv in [1e-6, -1e-6] {
            let opp = params(kv).hinge_opposite(&h).unwrap();
            assert!((opp - reference).abs() < 1e-5 * scale * scale, "k = {kv}: {opp} vs {reference}");
        }
    }
}

#[test]
fn realized_triangles_reproduce_their_sides() {
    let mut r = rng(5);
    for &kv in &CURVATURES {
        let k = params(kv);
        for _ in 0..500 {
            let sides = triangle_sides(&mut r);
            let tri = k.realize_triangle(sides[0], sides[1], sides[2]).unwrap();
            let [x, y, z] = *tri.vertices();
            let got = [k.tau(&x, &y).unwrap(), k.tau(&y, &z).unwrap(), k.tau(&x, &z).unwrap()];
            for i in 0..3 {
                assert!((got[i] - sides[i]).abs() < 1e-12 * sides[i].max(1.0), "k = {kv}: {got:?} vs {sides:?}");
            }
        }
    }
}

/// `τ̄` between side points computed twice: from the laws of cosines, and
/// from coordinates of the realized triangle.
#[test]
fn corresponding_tau_agrees_with_realized_coordinates() {
    let mut r = rng(6);
    for &kv in &CURVATURES {
        let k = params(kv);
        for _ in 0..1_000 {
            let sides = triangle_sides(&mut r);
            let tri = k.realize_triangle(sides[0], sides[1], sides[2]).unwrap();
            let pick = |r: &mut _| {
                let side = Side::ALL[rand::Rng::random_range(r, 0..3)];
                SideOffset::new(side, uniform(r, 0.0, sides[side.index()]))
            };
            let (p, q) = (pick(&mut r), pick(&mut r));
            let by_law = k.corresponding_tau(sides, p, q).unwrap();
            let (pp, qp) = (tri.side_offset_point(p).unwrap(), tri.side_offset_point(q).unwrap());
            let by_coords = k.tau(&pp, &qp).unwrap();
            assert!((by_law - by_coords).abs() < 1e-9, "k = {kv}, {p:?} {q:?}: {by_law} vs {by_coords}");
        }
    }
}

/// Non-normalized angles at `m ∈ β` of the sub-triangles `(x, y, m)` (sink)
/// and `(x, m, z)` (shoulder) for a cevian of length `d`.
fn angles_at_m(k: &ModelParams, sides: [f64; 3], lambda: f64, d: f64) -> Result<(f64, f64), ModelError> {
    let [a, b, c] = sides;
    let (b1, b2) = (lambda * b, (1.0 - lambda) * b);
    let (s1, s2, o1) = Vertex::Z.roles([a, b1, d]);
    let sink = k.nonnormalized_angle(s1, s2, o1, VertexKind::Sink)?;
    let (s1, s2, o1) = Vertex::Y.roles([d, b2, c]);
    let shoulder = k.nonnormalized_angle(s1, s2, o1, VertexKind::Shoulder)?;
    Ok((sink, shoulder))
}

#[test]
fn zero_sum_identity() {
    let mut r = rng(7);
    for &kv in &CURVATURES {
        let k = params(kv);
        for _ in 0..CONFIGS_PER_SIGN {
            let sides = triangle_sides(&mut r);
            let lambda = uniform(&mut r, 0.05, 0.95);
            let d = k
                .corresponding_tau(sides, SideOffset::new(Side::Xy, 0.0), SideOffset::new(Side::Yz, lambda * sides[1]))
                .unwrap();
            let (ymx, xmz) = angles_at_m(&k, sides, lambda, d).unwrap();
            let residual = (1.0 - lambda) * ymx + lambda * xmz;
            assert!(residual.abs() < 1e-9 * ymx.abs().max(1.0), "k = {kv}: residual {residual:e}");
        }
    }
}

/// Straightening lemma and its converse: for a cevian `x → m` of length `d`
/// replacing the model cevian, the weighted shoulder sum at `m` is
/// nonnegative exactly when the outer comparison angles at `y` and `z`
/// dominate the rescaled angles of the whole triangle.
#[test]
fn straightening_lemma_and_converse() {
    let mut r = rng(8);
    for kv in [-1.0, 0.0, 1.0] {
        let k = params(kv);
        let mut checked = 0;
        while checked < CONFIGS_PER_SIGN {
            let sides = triangle_sides(&mut r);
            let [a, b, c] = sides;
            let lambda = uniform(&mut r, 0.1, 0.9);
            let (b1, b2) = (lambda * b, (1.0 - lambda) * b);
            let d_model = k
                .corresponding_tau(sides, SideOffset::new(Side::Xy, 0.0), SideOffset::new(Side::Yz, b1))
                .unwrap();
            // Any cevian length keeping both sub-triangles valid.
            let lo = a + b1;
            let hi = c - b2;
            if hi <= lo {
                continue;
            }
            let d = uniform(&mut r, lo, hi);
            if (d - d_model).abs() < 1e-7 {
                continue;
            }
            let Ok((ymx, xmz)) = angles_at_m(&k, sides, lambda, d) else { continue };
            let sum = (1.0 - lambda) * ymx + lambda * xmz;
            // Outer angles: at y in (x, y, m), at z in (x, m, z).
            let (p1, p2, o) = Vertex::Y.roles([a, b1, d]);
            let at_y = k.nonnormalized_angle(p1, p2, o, VertexKind::Shoulder).unwrap();
            let (p1, p2, o) = Vertex::Z.roles([d, b2, c]);
            let at_z = k.nonnormalized_angle(p1, p2, o, VertexKind::Sink).unwrap();
            let (p1, p2, o) = Vertex::Y.roles(sides);
            let big_y = rescale_angle(k.nonnormalized_angle(p1, p2, o, VertexKind::Shoulder).unwrap(), 1.0, lambda);
            let (p1, p2, o) = Vertex::Z.roles(sides);
            let big_z = rescale_angle(k.nonnormalized_angle(p1, p2, o, VertexKind::Sink).unwrap(), 1.0, 1.0 - lambda);
            let dominated = at_y <= big_y + 1e-9 && at_z <= big_z + 1e-9;
            let strictly_exceeds = at_y > big_y + 1e-9 && at_z > big_z + 1e-9;
            if sum >= 1e-9 {
                assert!(dominated, "k = {kv}: sum {sum} ≥ 0 but ({at_y}, {at_z}) vs ({big_y}, {big_z})");
            } else if sum <= -1e-9 {
                assert!(strictly_exceeds, "k = {kv}: sum {sum} < 0 but ({at_y}, {at_z}) vs ({big_y}, {big_z})");
            }
            checked += 1;
        }
    }
}

#[test]
fn hinge_monotonicity() {
    let mut r = rng(9);
    for kv in [-1.0, 0.0, 1.0] {
        let k = params(kv);
        let mut checked = 0;
        while checked < CONFIGS_PER_SIGN {
            let kd = kind(&mut r);
            let (a1, a2) = (uniform(&mut r, 0.05, 1.0), uniform(&mut r, 0.05, 1.0));
            let (c1, c2) = (uniform(&mut r, 1.0, 4.0), uniform(&mut r, 1.0, 4.0));
            if (c1 - c2).abs() < 1e-6 {
                continue;
            }
            let o1 = k.hinge_opposite(&HingeSpec::new(a1, a2, c1, kd).unwrap());
            let o2 = k.hinge_opposite(&HingeSpec::new(a1, a2, c2, kd).unwrap());
            let (Ok(o1), Ok(o2)) = (o1, o2) else { continue };
            let limit = k.conjugate_limit().unwrap_or(f64::INFINITY);
            if !(o1 > 0.0 && o2 > 0.0 && o1.max(o2) < limit) {
                continue;
            }
            match kd {
                // Included angles: opposite side decreasing in cosh φ.
                VertexKind::Apex | VertexKind::Sink => assert_eq!(c1 < c2, o1 > o2, "k = {kv}, {kd:?}"),
                // Shoulder: opposite side increasing in cosh φ.
                VertexKind::Shoulder => assert_eq!(c1 < c2, o1 < o2, "k = {kv}"),
            }
            // Hinge lemma: with two sides fixed, the opposite side is
            // shorter exactly when the signed angle is smaller.
            let ang = |o| k.nonnormalized_angle(a1, a2, o, kd).unwrap();
            assert_eq!(o1 <= o2, ang(o1) <= ang(o2), "k = {kv}, {kd:?}");
            checked += 1;
        }
    }
}

#[test]
fn rescaling_is_bilinear() {
    let mut r = rng(10);
    for &kv in &CURVATURES {
        let k = params(kv);
        for _ in 0..500 {
            let sides = triangle_sides(&mut r);
            let (lam, mu) = (uniform(&mut r, 0.0, 1.0), uniform(&mut r, 0.0, 1.0));
            let angle = k.nonnormalized_angle(sides[0], sides[2], sides[1], VertexKind::Apex).unwrap();
            assert_eq!(rescale_angle(angle, lam, mu), lam * mu * angle);
            assert_eq!(rescale_angle(angle, 1.0, 1.0), angle);
            assert!(close(rescale_angle(rescale_angle(angle, lam, 1.0), 1.0, mu), rescale_angle(angle, lam, mu), 1e-15));
            // Geometric content: the hinge of the shortened sides at x has
            // the rescaled angle.
            let (lam, mu) = (uniform(&mut r, 0.05, 1.0), uniform(&mut r, 0.05, 1.0));
            let opp = k
                .corresponding_tau(sides, SideOffset::new(Side::Xy, lam * sides[0]), SideOffset::new(Side::Xz, mu * sides[2]))
                .unwrap();
            if opp > 1e-3 {
                let sub = k.nonnormalized_angle(lam * sides[0], mu * sides[2], opp, VertexKind::Apex).unwrap();
                assert!(close(sub, rescale_angle(angle, lam, mu), 1e-9), "k = {kv}: {sub} vs {}", rescale_angle(angle, lam, mu));
            }
        }
    }
}

#[test]
fn nonnormalized_angle_is_continuous() {
    let delta = 1e-6;
    let mut r = rng(11);
    for &kv in &CURVATURES {
        let k = params(kv);
        for _ in 0..500 {
            let [a, b, c] = triangle_sides(&mut r);
            for (v, kd) in [(Vertex::X, VertexKind::Apex), (Vertex::Y, VertexKind::Shoulder), (Vertex::Z, VertexKind::Sink)] {
                let (p1, p2, o) = v.roles([a, b, c]);
                let base = k.nonnormalized_angle(p1, p2, o, kd).unwrap();
                let moved = k.nonnormalized_angle(p1 - delta, p2 + delta, o + delta, kd).unwrap();
                assert!((moved - base).abs() < 1e3 * delta, "k = {kv}: {base} → {moved}");
            }
        }
    }
}

proptest! {
    #[test]
    fn flat_angles_reduce_to_the_polarization_identity(a in 0.01f64..3.0, b in 0.01f64..3.0, extra in 0.0f64..3.0) {
        let k = ModelParams::flat();
        let c = a + b + extra;
        let x = k.nonnormalized_angle(a, c, b, VertexKind::Apex).unwrap();
        let y = k.nonnormalized_angle(a, b, c, VertexKind::Shoulder).unwrap();
        let z = k.nonnormalized_angle(b, c, a, VertexKind::Sink).unwrap();
        prop_assert!(close(x, (b * b - a * a - c * c) / 2.0, 1e-12));
        prop_assert!(close(y, (c * c - a * a - b * b) / 2.0, 1e-12));
        prop_assert!(close(z, (a * a - b * b - c * c) / 2.0, 1e-12));
        prop_assert!(x < 0.0 && y > 0.0 && z < 0.0);
    }

    #[test]
    fn round_trip_holds_for_arbitrary_hinges(
        ki in 0usize..5, a1 in 0.01f64..1.0, a2 in 0.01f64..1.0, ch in 1.0f64..6.0, kd in 0usize..3,
    ) {
        let kind = [VertexKind::Apex, VertexKind::Shoulder, VertexKind::Sink][kd];
        let k = params(CURVATURES[ki]);
        let h = HingeSpec::new(a1, a2, ch, kind).unwrap();
        if let Some(e) = round_trip_error(&k, &h) {
            prop_assert!(e < 1e-12 * ch, "error {e:e}");
        }
    }
}
