//! Exact geometry of the two-dimensional Lorentzian model spaces.
//!
//! * `k = 0`: Minkowski plane, chart `(x, t)` with `τ = √(Δt² − Δx²)`.
//! * `k > 0`: universal cover of de Sitter space of radius `r = 1/√k`, embedded
//!   as `−X₀² + X₁² + X₂² = r²`. The chart `(x, t)` maps to
//!   `(r sinh(t/r), r cosh(t/r) cos(x/r), r cosh(t/r) sin(x/r))` with the
//!   spatial angle `x/r` unwrapped.
//! * `k < 0`: universal cover of anti-de Sitter space, `−X₀² − X₁² + X₂² = −r²`.
//!   The chart `(x, t)` maps to
//!   `(r cosh(x/r) cos(t/r), r cosh(x/r) sin(t/r), r sinh(x/r))` with the
//!   time angle `t/r` unwrapped.
//!
//! Both curved charts agree with the Minkowski chart to first order at the
//! origin. Pairs whose unwrapped angle differs by `π` or more are rejected
//! instead of being wrapped.
//!
//! Angles are non-normalized: the inner product of the initial velocities of
//! two sides parametrized on `[0, 1]`. With unit tangents meeting at hyperbolic
//! angle `φ` this is `−ℓ₁ℓ₂ cosh φ` at an apex (both sides future directed) or a
//! sink (both past directed) and `+ℓ₁ℓ₂ cosh φ` at a shoulder.

use core::f64::consts::PI;
use core::fmt;

use crate::numeric::{
    acos_1m, acosh_1p, asinh, atan2, cos, cosh, cosh_m1, ge_rel, one_m_cos, sin, sinh, sqrt,
    wrap_pi, LENGTH_REL_TOL,
};
use crate::spaces::EventPoint;

/// Coordinates of a point of the ambient space `ℝ³` of a curved model.
pub type Ambient = [f64; 3];

/// Lower bound accepted for `cosh φ` before a configuration is declared
/// infeasible.
pub const COSHPHI_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("curvature must be finite, got {0}")]
    InvalidCurvature(f64),
    #[error("lengths must be positive and finite, got {0}")]
    NonPositiveLength(f64),
    #[error("timelike size bounds fail: {0}")]
    SizeBounds(SizeDiagnosis),
    #[error("pair leaves the simply connected chart (angle difference {delta} is not below π)")]
    OutOfChart { delta: f64 },
    #[error("lengths do not form a triangle of this kind (cosh φ = {coshphi})")]
    InfeasibleTriangle { coshphi: f64 },
    #[error("points are timelike separated beyond the conjugate locus")]
    BeyondConjugate,
    #[error("offset {offset} lies outside a side of length {length}")]
    OffsetOutOfRange { offset: f64, length: f64 },
    #[error("points are not causally related")]
    NotCausal,
    #[error("points belong to different model spaces")]
    MismatchedPoint,
}

/// Why a length triple fails the timelike size bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "failure", rename_all = "snake_case"))]
pub enum SizeDiagnosis {
    /// The longest side is shorter than the sum of the other two.
    ReverseTriangle { longest: f64, sum: f64 },
    /// The longest side reaches the conjugate distance `π/√(−k)`.
    ConjugateBound { longest: f64, limit: f64 },
}

impl fmt::Display for SizeDiagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeDiagnosis::ReverseTriangle { longest, sum } => write!(
                f,
                "reverse triangle inequality violated: longest side {longest} < {sum}"
            ),
            SizeDiagnosis::ConjugateBound { longest, limit } => write!(
                f,
                "size bound violated: longest side {longest} >= π/√(−k) = {limit}"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeVerdict {
    Ok { degenerate: bool },
    Fail(SizeDiagnosis),
}

impl SizeVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, SizeVerdict::Ok { .. })
    }
}

/// Role of a vertex in a timelike triangle `x ≪ y ≪ z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum VertexKind {
    /// Both sides leave the vertex to the future (`x`).
    Apex,
    /// One side to the past, one to the future (`y`).
    Shoulder,
    /// Both sides leave the vertex to the past (`z`).
    Sink,
}

/// Sides of a triangle, named by their endpoints and oriented to the future.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Side {
    /// `x → y`, length `a`.
    Xy,
    /// `y → z`, length `b`.
    Yz,
    /// `x → z`, length `c`.
    Xz,
}

impl Side {
    pub const ALL: [Side; 3] = [Side::Xy, Side::Yz, Side::Xz];

    pub fn index(self) -> usize {
        match self {
            Side::Xy => 0,
            Side::Yz => 1,
            Side::Xz => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Xy => "xy",
            Side::Yz => "yz",
            Side::Xz => "xz",
        }
    }

    pub fn from_name(name: &str) -> Option<Side> {
        match name {
            "xy" => Some(Side::Xy),
            "yz" => Some(Side::Yz),
            "xz" => Some(Side::Xz),
            _ => None,
        }
    }
}

/// A point on a triangle side, given by its τ-offset from the side's
/// initial vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SideOffset {
    pub side: Side,
    pub offset: f64,
}

impl SideOffset {
    pub const fn new(side: Side, offset: f64) -> Self {
        SideOffset { side, offset }
    }
}

/// A hinge: two sides of given lengths meeting at hyperbolic angle `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HingeSpec {
    pub adj1: f64,
    pub adj2: f64,
    pub coshphi: f64,
    pub kind: VertexKind,
}

impl HingeSpec {
    pub fn new(adj1: f64, adj2: f64, coshphi: f64, kind: VertexKind) -> Result<Self, ModelError> {
        for len in [adj1, adj2] {
            if !(len > 0.0 && len.is_finite()) {
                return Err(ModelError::NonPositiveLength(len));
            }
        }
        if !(coshphi >= 1.0 && coshphi.is_finite()) {
            return Err(ModelError::InfeasibleTriangle { coshphi });
        }
        Ok(HingeSpec {
            adj1,
            adj2,
            coshphi,
            kind,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Curvature {
    Flat,
    DeSitter { r: f64 },
    AntiDeSitter { r: f64 },
}

/// Curvature `k` of a model space together with its scale `r = 1/√|k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    k: f64,
    curvature: Curvature,
}

/// A point of a model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelPoint {
    Flat(EventPoint),
    /// Unwrapped spatial angle and the embedding on `⟨P,P⟩ = r²`.
    DeSitter { theta: f64, ambient: Ambient },
    /// Unwrapped time angle, radial coordinate and the embedding on
    /// `⟨P,P⟩ = −r²`.
    AntiDeSitter { time: f64, chi: f64, ambient: Ambient },
}

impl ModelPoint {
    pub fn ambient(&self) -> Option<Ambient> {
        match self {
            ModelPoint::Flat(_) => None,
            ModelPoint::DeSitter { ambient, .. } | ModelPoint::AntiDeSitter { ambient, .. } => {
                Some(*ambient)
            }
        }
    }
}

/// Causal classification of an ordered pair of model points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Separation {
    Equal,
    Chronological(f64),
    Null,
    Unrelated,
}

impl ModelParams {
    pub fn new(k: f64) -> Result<Self, ModelError> {
        if !k.is_finite() {
            return Err(ModelError::InvalidCurvature(k));
        }
        let curvature = if k == 0.0 {
            Curvature::Flat
        } else if k > 0.0 {
            Curvature::DeSitter { r: 1.0 / sqrt(k) }
        } else {
            Curvature::AntiDeSitter { r: 1.0 / sqrt(-k) }
        };
        Ok(ModelParams { k, curvature })
    }

    pub const fn flat() -> Self {
        ModelParams {
            k: 0.0,
            curvature: Curvature::Flat,
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn radius(&self) -> Option<f64> {
        match self.curvature {
            Curvature::Flat => None,
            Curvature::DeSitter { r } | Curvature::AntiDeSitter { r } => Some(r),
        }
    }

    /// `π/√(−k)` for anti-de Sitter models.
    pub fn conjugate_limit(&self) -> Option<f64> {
        match self.curvature {
            Curvature::AntiDeSitter { r } => Some(PI * r),
            _ => None,
        }
    }

    /// Ambient inner product of the embedding space.
    pub fn inner(&self, a: &Ambient, b: &Ambient) -> f64 {
        match self.curvature {
            Curvature::Flat | Curvature::DeSitter { .. } => -a[0] * b[0] + a[1] * b[1] + a[2] * b[2],
            Curvature::AntiDeSitter { .. } => -a[0] * b[0] - a[1] * b[1] + a[2] * b[2],
        }
    }

    /// `⟨P,P⟩ ∓ r²`; zero for points on the quadric.
    pub fn quadric_residual(&self, p: &ModelPoint) -> f64 {
        match (self.curvature, p) {
            (Curvature::DeSitter { r }, ModelPoint::DeSitter { ambient, .. }) => {
                self.inner(ambient, ambient) - r * r
            }
            (Curvature::AntiDeSitter { r }, ModelPoint::AntiDeSitter { ambient, .. }) => {
                self.inner(ambient, ambient) + r * r
            }
            _ => 0.0,
        }
    }

    /// Lifts chart coordinates `(x, t)` to a model point.
    pub fn point(&self, chart: EventPoint) -> ModelPoint {
        match self.curvature {
            Curvature::Flat => ModelPoint::Flat(chart),
            Curvature::DeSitter { r } => {
                let theta = chart.x / r;
                let ch = cosh(chart.t / r);
                ModelPoint::DeSitter {
                    theta,
                    ambient: [r * sinh(chart.t / r), r * ch * cos(theta), r * ch * sin(theta)],
                }
            }
            Curvature::AntiDeSitter { r } => {
                let time = chart.t / r;
                let chi = chart.x / r;
                let ch = cosh(chi);
                ModelPoint::AntiDeSitter {
                    time,
                    chi,
                    ambient: [r * ch * cos(time), r * ch * sin(time), r * sinh(chi)],
                }
            }
        }
    }

    /// Chart coordinates of a model point.
    pub fn chart(&self, p: &ModelPoint) -> EventPoint {
        match (self.curvature, p) {
            (Curvature::DeSitter { r }, ModelPoint::DeSitter { theta, ambient }) => {
                EventPoint::new(r * theta, r * asinh(ambient[0] / r))
            }
            (Curvature::AntiDeSitter { r }, ModelPoint::AntiDeSitter { time, chi, .. }) => {
                EventPoint::new(r * chi, r * time)
            }
            (_, ModelPoint::Flat(e)) => *e,
            // Foreign points keep their chart angle; the caller mixed models.
            (_, ModelPoint::DeSitter { theta, ambient }) => {
                EventPoint::new(*theta, asinh(ambient[0]))
            }
            (_, ModelPoint::AntiDeSitter { time, chi, .. }) => EventPoint::new(*chi, *time),
        }
    }

    fn point_near_ambient(&self, a: Ambient, near: &ModelPoint) -> ModelPoint {
        match (self.curvature, near) {
            (Curvature::DeSitter { .. }, ModelPoint::DeSitter { theta, .. }) => {
                let raw = atan2(a[2], a[1]);
                ModelPoint::DeSitter {
                    theta: theta + wrap_pi(raw - theta),
                    ambient: a,
                }
            }
            (Curvature::AntiDeSitter { r }, ModelPoint::AntiDeSitter { time, .. }) => {
                let raw = atan2(a[1], a[0]);
                ModelPoint::AntiDeSitter {
                    time: time + wrap_pi(raw - time),
                    chi: asinh(a[2] / r),
                    ambient: a,
                }
            }
            _ => *near,
        }
    }

    fn check_cover(&self, p: &ModelPoint, q: &ModelPoint) -> Result<(), ModelError> {
        let delta = match (p, q) {
            (ModelPoint::Flat(_), ModelPoint::Flat(_)) => return Ok(()),
            (ModelPoint::DeSitter { theta: a, .. }, ModelPoint::DeSitter { theta: b, .. }) => b - a,
            (
                ModelPoint::AntiDeSitter { time: a, .. },
                ModelPoint::AntiDeSitter { time: b, .. },
            ) => b - a,
            _ => return Err(ModelError::MismatchedPoint),
        };
        if delta.abs() < PI {
            Ok(())
        } else {
            Err(ModelError::OutOfChart { delta: delta.abs() })
        }
    }

    /// Causal classification of the ordered pair `(p, q)`.
    pub fn separation(&self, p: &ModelPoint, q: &ModelPoint) -> Result<Separation, ModelError> {
        self.check_cover(p, q)?;
        match (self.curvature, p, q) {
            (Curvature::Flat, ModelPoint::Flat(p), ModelPoint::Flat(q)) => {
                let dx = (q.x - p.x).abs();
                let dt = q.t - p.t;
                Ok(if dx == 0.0 && dt == 0.0 {
                    Separation::Equal
                } else if dt > dx {
                    Separation::Chronological(sqrt((dt - dx) * (dt + dx)))
                } else if dt == dx {
                    Separation::Null
                } else {
                    Separation::Unrelated
                })
            }
            (
                Curvature::DeSitter { r },
                ModelPoint::DeSitter { ambient: a, .. },
                ModelPoint::DeSitter { ambient: b, .. },
            ) => {
                let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                if d == [0.0; 3] {
                    return Ok(Separation::Equal);
                }
                let dd = self.inner(&d, &d);
                // X₀ increases along every future causal curve.
                let future = d[0] > 0.0;
                Ok(if dd < 0.0 && future {
                    Separation::Chronological(r * acosh_1p(-dd / (2.0 * r * r)))
                } else if dd == 0.0 && future {
                    Separation::Null
                } else {
                    Separation::Unrelated
                })
            }
            (
                Curvature::AntiDeSitter { r },
                ModelPoint::AntiDeSitter { time: ta, ambient: a, .. },
                ModelPoint::AntiDeSitter { time: tb, ambient: b, .. },
            ) => {
                let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                if d == [0.0; 3] {
                    return Ok(Separation::Equal);
                }
                let dd = self.inner(&d, &d);
                let future = tb > ta;
                let e = -dd / (2.0 * r * r);
                if dd < 0.0 && future {
                    if e >= 2.0 {
                        return Err(ModelError::BeyondConjugate);
                    }
                    Ok(Separation::Chronological(r * acos_1m(e)))
                } else if dd == 0.0 && future {
                    Ok(Separation::Null)
                } else {
                    Ok(Separation::Unrelated)
                }
            }
            _ => Err(ModelError::MismatchedPoint),
        }
    }

    /// Time separation `τ̄(p, q)` in the model.
    pub fn tau(&self, p: &ModelPoint, q: &ModelPoint) -> Result<f64, ModelError> {
        Ok(match self.separation(p, q)? {
            Separation::Chronological(t) => t,
            _ => 0.0,
        })
    }

    /// Checks the timelike size bounds for sides `a = τ(x,y)`, `b = τ(y,z)`,
    /// `c = τ(x,z)`.
    pub fn size_bounds_ok(&self, a: f64, b: f64, c: f64) -> Result<SizeVerdict, ModelError> {
        for len in [a, b, c] {
            if !(len > 0.0 && len.is_finite()) {
                return Err(ModelError::NonPositiveLength(len));
            }
        }
        let sum = a + b;
        if !ge_rel(c, sum) {
            return Ok(SizeVerdict::Fail(SizeDiagnosis::ReverseTriangle { longest: c, sum }));
        }
        if let Some(limit) = self.conjugate_limit() {
            if c >= limit {
                return Ok(SizeVerdict::Fail(SizeDiagnosis::ConjugateBound { longest: c, limit }));
            }
        }
        Ok(SizeVerdict::Ok {
            degenerate: (c - sum).abs() <= LENGTH_REL_TOL * c.max(1.0),
        })
    }

    fn require_size_bounds(&self, a: f64, b: f64, c: f64) -> Result<bool, ModelError> {
        match self.size_bounds_ok(a, b, c)? {
            SizeVerdict::Ok { degenerate } => Ok(degenerate),
            SizeVerdict::Fail(d) => Err(ModelError::SizeBounds(d)),
        }
    }

    fn check_conjugate(&self, lengths: &[f64]) -> Result<(), ModelError> {
        if let Some(limit) = self.conjugate_limit() {
            for &len in lengths {
                if len >= limit {
                    return Err(ModelError::SizeBounds(SizeDiagnosis::ConjugateBound {
                        longest: len,
                        limit,
                    }));
                }
            }
        }
        Ok(())
    }

    /// Length of the side opposite a hinge. Apex and sink hinges return the
    /// time separation between the two endpoints in whichever order is
    /// chronological, and `0` when they are not timelike related.
    pub fn hinge_opposite(&self, h: &HingeSpec) -> Result<f64, ModelError> {
        self.opposite(h.adj1, h.adj2, h.coshphi, h.kind)
    }

    /// Same as [`hinge_opposite`](Self::hinge_opposite) but accepts zero
    /// length sides.
    pub(crate) fn opposite(
        &self,
        adj1: f64,
        adj2: f64,
        coshphi: f64,
        kind: VertexKind,
    ) -> Result<f64, ModelError> {
        let cm1 = coshphi - 1.0;
        let shoulder = kind == VertexKind::Shoulder;
        match self.curvature {
            Curvature::Flat => {
                if shoulder {
                    let s = adj1 + adj2;
                    Ok(sqrt(s * s + 2.0 * adj1 * adj2 * cm1))
                } else {
                    let d = adj2 - adj1;
                    let sq = d * d - 2.0 * adj1 * adj2 * cm1;
                    Ok(if sq > 0.0 { sqrt(sq) } else { 0.0 })
                }
            }
            Curvature::DeSitter { r } => {
                let prod = sinh(adj1 / r) * sinh(adj2 / r) * cm1;
                if shoulder {
                    Ok(r * acosh_1p(cosh_m1((adj1 + adj2) / r) + prod))
                } else {
                    let e = cosh_m1((adj2 - adj1) / r) - prod;
                    Ok(if e > 0.0 { r * acosh_1p(e) } else { 0.0 })
                }
            }
            Curvature::AntiDeSitter { r } => {
                self.check_conjugate(&[adj1, adj2])?;
                let prod = sin(adj1 / r) * sin(adj2 / r) * cm1;
                if shoulder {
                    self.check_conjugate(&[adj1 + adj2])?;
                    let e = one_m_cos((adj1 + adj2) / r) + prod;
                    if e >= 2.0 {
                        return Err(ModelError::SizeBounds(SizeDiagnosis::ConjugateBound {
                            longest: PI * r,
                            limit: PI * r,
                        }));
                    }
                    Ok(r * acos_1m(e))
                } else {
                    let e = one_m_cos((adj2 - adj1) / r) - prod;
                    Ok(if e > 0.0 { r * acos_1m(e) } else { 0.0 })
                }
            }
        }
    }

    /// `cosh φ − 1` at a vertex with adjacent sides `adj1`, `adj2` and
    /// opposite side `opp`.
    pub(crate) fn vertex_cosh_m1(
        &self,
        adj1: f64,
        adj2: f64,
        opp: f64,
        kind: VertexKind,
    ) -> Result<f64, ModelError> {
        for len in [adj1, adj2] {
            if !(len > 0.0 && len.is_finite()) {
                return Err(ModelError::NonPositiveLength(len));
            }
        }
        if !(opp >= 0.0 && opp.is_finite()) {
            return Err(ModelError::NonPositiveLength(opp));
        }
        let d = (adj2 - adj1).abs();
        let s = adj1 + adj2;
        let shoulder = kind == VertexKind::Shoulder;
        let cm1 = match self.curvature {
            Curvature::Flat => {
                if shoulder {
                    (opp - s) * (opp + s) / (2.0 * adj1 * adj2)
                } else {
                    (d - opp) * (d + opp) / (2.0 * adj1 * adj2)
                }
            }
            Curvature::DeSitter { r } => {
                let den = sinh(adj1 / r) * sinh(adj2 / r);
                if shoulder {
                    (cosh_m1(opp / r) - cosh_m1(s / r)) / den
                } else {
                    (cosh_m1(d / r) - cosh_m1(opp / r)) / den
                }
            }
            Curvature::AntiDeSitter { r } => {
                self.check_conjugate(&[adj1, adj2, opp])?;
                let den = sin(adj1 / r) * sin(adj2 / r);
                if shoulder {
                    (one_m_cos(opp / r) - one_m_cos(s / r)) / den
                } else {
                    (one_m_cos(d / r) - one_m_cos(opp / r)) / den
                }
            }
        };
        if !cm1.is_finite() || cm1 < -COSHPHI_SLACK {
            return Err(ModelError::InfeasibleTriangle { coshphi: 1.0 + cm1 });
        }
        Ok(cm1.max(0.0))
    }

    /// `cosh φ` of the hyperbolic angle at a vertex, inverting the law of
    /// cosines for the vertex kind.
    pub fn vertex_coshphi(
        &self,
        adj1: f64,
        adj2: f64,
        opp: f64,
        kind: VertexKind,
    ) -> Result<f64, ModelError> {
        Ok(1.0 + self.vertex_cosh_m1(adj1, adj2, opp, kind)?)
    }

    /// Signed non-normalized angle at a vertex: negative at apex and sink,
    /// positive at a shoulder.
    pub fn nonnormalized_angle(
        &self,
        adj1: f64,
        adj2: f64,
        opp: f64,
        kind: VertexKind,
    ) -> Result<f64, ModelError> {
        let cm1 = self.vertex_cosh_m1(adj1, adj2, opp, kind)?;
        if self.curvature == Curvature::Flat {
            return Ok(0.5 * (opp * opp - adj1 * adj1 - adj2 * adj2));
        }
        let magnitude = adj1 * adj2 * (1.0 + cm1);
        Ok(match kind {
            VertexKind::Shoulder => magnitude,
            VertexKind::Apex | VertexKind::Sink => -magnitude,
        })
    }

    /// `cosh φ` at `x`, `y`, `z` of a triangle with sides `(a, b, c)`.
    pub fn triangle_coshphis(&self, a: f64, b: f64, c: f64) -> Result<[f64; 3], ModelError> {
        Ok([
            self.vertex_coshphi(a, c, b, VertexKind::Apex)?,
            self.vertex_coshphi(a, b, c, VertexKind::Shoulder)?,
            self.vertex_coshphi(b, c, a, VertexKind::Sink)?,
        ])
    }

    /// Whether, for two future rays leaving a common vertex at hyperbolic
    /// angle `φ`, the point at distance `d2` on the second ray lies later
    /// than the point at distance `d1` on the first one.
    fn hinge_second_later(&self, d1: f64, d2: f64, coshphi: f64) -> bool {
        match self.curvature {
            Curvature::Flat => d1 < d2 * coshphi,
            Curvature::DeSitter { r } => sinh(d1 / r) < sinh(d2 / r) * coshphi,
            Curvature::AntiDeSitter { r } => d1 / r < atan2(sin(d2 / r) * coshphi, cos(d2 / r)),
        }
    }

    /// Realizes the comparison triangle with sides `(a, b, c)`: `x̄` at the
    /// chart origin, `z̄` on the time axis and `ȳ` on the positive spatial side.
    pub fn realize_triangle(&self, a: f64, b: f64, c: f64) -> Result<ModelTriangle, ModelError> {
        let degenerate = self.require_size_bounds(a, b, c)?;
        let cm1 = self.vertex_cosh_m1(a, c, b, VertexKind::Apex)?;
        let coshphi = 1.0 + cm1;
        let sinhphi = sqrt(cm1 * (cm1 + 2.0));
        let (x, y, z, t_alpha, t_gamma) = match self.curvature {
            Curvature::Flat => {
                let t_alpha = [sinhphi, coshphi, 0.0];
                let t_gamma = [0.0, 1.0, 0.0];
                (
                    ModelPoint::Flat(EventPoint::new(0.0, 0.0)),
                    ModelPoint::Flat(EventPoint::new(a * sinhphi, a * coshphi)),
                    ModelPoint::Flat(EventPoint::new(0.0, c)),
                    t_alpha,
                    t_gamma,
                )
            }
            Curvature::DeSitter { .. } | Curvature::AntiDeSitter { .. } => {
                let x = self.point(EventPoint::new(0.0, 0.0));
                let (u, v) = match self.curvature {
                    Curvature::DeSitter { .. } => ([1.0, 0.0, 0.0], [coshphi, 0.0, sinhphi]),
                    _ => ([0.0, 1.0, 0.0], [0.0, coshphi, sinhphi]),
                };
                let y = self.walk(&x, &v, a);
                let z = self.walk(&x, &u, c);
                (x, y, z, v, u)
            }
        };
        let t_beta = self.unit_tangent(&y, &z, b);
        Ok(ModelTriangle {
            params: *self,
            sides: [a, b, c],
            vertices: [x, y, z],
            tangents: [t_alpha, t_beta, t_gamma],
            degenerate,
        })
    }

    /// Point at τ-distance `s` from `start` along the unit tangent.
    /// Flat tangents are stored as `[dx, dt, 0]`.
    fn walk(&self, start: &ModelPoint, tangent: &Ambient, s: f64) -> ModelPoint {
        match (self.curvature, start) {
            (Curvature::Flat, ModelPoint::Flat(p)) => {
                ModelPoint::Flat(EventPoint::new(p.x + s * tangent[0], p.t + s * tangent[1]))
            }
            (Curvature::DeSitter { r }, ModelPoint::DeSitter { ambient: p, .. }) => {
                let (ch, sh) = (cosh(s / r), sinh(s / r));
                let a = [
                    p[0] * ch + r * tangent[0] * sh,
                    p[1] * ch + r * tangent[1] * sh,
                    p[2] * ch + r * tangent[2] * sh,
                ];
                self.point_near_ambient(a, start)
            }
            (Curvature::AntiDeSitter { r }, ModelPoint::AntiDeSitter { ambient: p, .. }) => {
                let (c, sn) = (cos(s / r), sin(s / r));
                let a = [
                    p[0] * c + r * tangent[0] * sn,
                    p[1] * c + r * tangent[1] * sn,
                    p[2] * c + r * tangent[2] * sn,
                ];
                self.point_near_ambient(a, start)
            }
            _ => *start,
        }
    }

    /// Unit future tangent at `p` of the geodesic to `q`, given `τ̄(p,q) = len > 0`.
    fn unit_tangent(&self, p: &ModelPoint, q: &ModelPoint, len: f64) -> Ambient {
        match (self.curvature, p, q) {
            (Curvature::Flat, ModelPoint::Flat(p), ModelPoint::Flat(q)) => {
                [(q.x - p.x) / len, (q.t - p.t) / len, 0.0]
            }
            (Curvature::DeSitter { r }, _, _) => {
                let (pa, qa) = (p.ambient().unwrap_or_default(), q.ambient().unwrap_or_default());
                let m = cosh_m1(len / r);
                let den = r * sinh(len / r);
                core::array::from_fn(|i| (qa[i] - pa[i] - pa[i] * m) / den)
            }
            (Curvature::AntiDeSitter { r }, _, _) => {
                let (pa, qa) = (p.ambient().unwrap_or_default(), q.ambient().unwrap_or_default());
                let m = one_m_cos(len / r);
                let den = r * sin(len / r);
                core::array::from_fn(|i| (qa[i] - pa[i] + pa[i] * m) / den)
            }
            _ => [0.0; 3],
        }
    }

    /// Point at fraction `lambda` of the model geodesic from `p` to `q`
    /// (fraction of τ for timelike pairs, affine for null pairs).
    pub fn geodesic_point(
        &self,
        p: &ModelPoint,
        q: &ModelPoint,
        lambda: f64,
    ) -> Result<ModelPoint, ModelError> {
        match self.separation(p, q)? {
            Separation::Equal => Ok(*p),
            Separation::Chronological(len) => {
                let tangent = self.unit_tangent(p, q, len);
                Ok(self.walk(p, &tangent, lambda * len))
            }
            Separation::Null => match (p, q) {
                (ModelPoint::Flat(a), ModelPoint::Flat(b)) => Ok(ModelPoint::Flat(a.lerp(b, lambda))),
                _ => {
                    // Null geodesics of the quadrics are straight ambient lines.
                    let (pa, qa) = (p.ambient().unwrap_or_default(), q.ambient().unwrap_or_default());
                    let a = core::array::from_fn(|i| pa[i] + lambda * (qa[i] - pa[i]));
                    Ok(self.point_near_ambient(a, p))
                }
            },
            Separation::Unrelated => Err(ModelError::NotCausal),
        }
    }

    /// `τ̄(p̄, q̄)` between corresponding points of the comparison triangle with
    /// sides `(a, b, c)`, computed from the laws of cosines and the bilinear
    /// rescaling of hinge angles (no coordinates involved).
    pub fn corresponding_tau(
        &self,
        sides: [f64; 3],
        p: SideOffset,
        q: SideOffset,
    ) -> Result<f64, ModelError> {
        let [a, b, c] = sides;
        self.require_size_bounds(a, b, c)?;
        let p_off = clamp_offset(p.offset, sides[p.side.index()])?;
        let q_off = clamp_offset(q.offset, sides[q.side.index()])?;
        if p.side == q.side {
            return Ok((q_off - p_off).max(0.0));
        }
        let [ch_x, ch_y, ch_z] = self.triangle_coshphis(a, b, c)?;
        match (p.side, q.side) {
            // Hinge at x̄, both rays to the future.
            (Side::Xy, Side::Xz) | (Side::Xz, Side::Xy) => {
                let tau = self.opposite(p_off, q_off, ch_x, VertexKind::Apex)?;
                let later = self.hinge_second_later(p_off, q_off, ch_x);
                Ok(if tau > 0.0 && later { tau } else { 0.0 })
            }
            // Hinge at ȳ: every point of x̄ȳ precedes every point of ȳz̄.
            (Side::Xy, Side::Yz) => self.opposite(a - p_off, q_off, ch_y, VertexKind::Shoulder),
            (Side::Yz, Side::Xy) => Ok(0.0),
            // Hinge at z̄, both rays to the past.
            (Side::Yz, Side::Xz) | (Side::Xz, Side::Yz) => {
                let dp = sides[p.side.index()] - p_off;
                let dq = sides[q.side.index()] - q_off;
                let tau = self.opposite(dp, dq, ch_z, VertexKind::Sink)?;
                let later = self.hinge_second_later(dq, dp, ch_z);
                Ok(if tau > 0.0 && later { tau } else { 0.0 })
            }
            _ => unreachable!("distinct sides always share a vertex"),
        }
    }
}

fn clamp_offset(offset: f64, length: f64) -> Result<f64, ModelError> {
    let slack = LENGTH_REL_TOL * length.max(1.0);
    if !(offset >= -slack && offset <= length + slack) {
        return Err(ModelError::OffsetOutOfRange { offset, length });
    }
    Ok(offset.clamp(0.0, length))
}

/// Bilinear rescaling of a non-normalized angle when its two sides are
/// shortened to the fractions `lam` and `mu` (measured from the vertex).
pub fn rescale_angle(angle: f64, lam: f64, mu: f64) -> f64 {
    lam * mu * angle
}

/// A realized comparison triangle with unit-speed side parametrizations.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTriangle {
    params: ModelParams,
    sides: [f64; 3],
    vertices: [ModelPoint; 3],
    tangents: [Ambient; 3],
    degenerate: bool,
}

impl ModelTriangle {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Side lengths `(a, b, c)`.
    pub fn sides(&self) -> [f64; 3] {
        self.sides
    }

    /// Vertices `x̄, ȳ, z̄`.
    pub fn vertices(&self) -> &[ModelPoint; 3] {
        &self.vertices
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    fn initial_vertex(&self, side: Side) -> &ModelPoint {
        match side {
            Side::Xy | Side::Xz => &self.vertices[0],
            Side::Yz => &self.vertices[1],
        }
    }

    /// Point at τ-offset `s` from the initial vertex of `side`.
    pub fn side_point(&self, side: Side, s: f64) -> Result<ModelPoint, ModelError> {
        let s = clamp_offset(s, self.sides[side.index()])?;
        let start = self.initial_vertex(side);
        if s == 0.0 {
            return Ok(*start);
        }
        Ok(self.params.walk(start, &self.tangents[side.index()], s))
    }

    pub fn side_offset_point(&self, p: SideOffset) -> Result<ModelPoint, ModelError> {
        self.side_point(p.side, p.offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat() -> ModelParams {
        ModelParams::flat()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn size_bounds_examples() {
        let v = flat().size_bounds_ok(1.0, 1.0, 6.0).unwrap();
        assert_eq!(v, SizeVerdict::Ok { degenerate: false });
        match flat().size_bounds_ok(3.0, 4.0, 6.0).unwrap() {
            SizeVerdict::Fail(SizeDiagnosis::ReverseTriangle { longest, sum }) => {
                assert_eq!((longest, sum), (6.0, 7.0))
            }
            other => panic!("unexpected {other:?}"),
        }
        let ads = ModelParams::new(-1.0).unwrap();
        match ads.size_bounds_ok(1.0, 1.0, 4.0).unwrap() {
            SizeVerdict::Fail(SizeDiagnosis::ConjugateBound { limit, .. }) => {
                assert!(close(limit, PI, 1e-15))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            flat().size_bounds_ok(1.0, 2.0, 3.0).unwrap(),
            SizeVerdict::Ok { degenerate: true }
        );
        assert!(matches!(
            flat().size_bounds_ok(0.0, 1.0, 3.0),
            Err(ModelError::NonPositiveLength(_))
        ));
    }

    #[test]
    fn flat_tau_examples() {
        let p = flat().point(EventPoint::new(0.0, 0.0));
        let q = flat().point(EventPoint::new(0.0, 6.0));
        assert_eq!(flat().tau(&p, &q).unwrap(), 6.0);
        let q = flat().point(EventPoint::new(2.0 * core::f64::consts::SQRT_2, 3.0));
        assert!(close(flat().tau(&p, &q).unwrap(), 1.0, 1e-14));
        assert_eq!(flat().tau(&q, &p).unwrap(), 0.0);
    }

    #[test]
    fn hinge_opposite_examples() {
        let h = HingeSpec::new(1.0, 6.0, 3.0, VertexKind::Apex).unwrap();
        assert!(close(flat().hinge_opposite(&h).unwrap(), 1.0, 1e-14));

        for k in [0.0, 1.0, -1.0, 0.3] {
            let m = ModelParams::new(k).unwrap();
            let h = HingeSpec::new(0.4, 1.5, 1.0, VertexKind::Apex).unwrap();
            assert!(close(m.hinge_opposite(&h).unwrap(), 1.1, 1e-14), "k = {k}");
        }

        let ds = ModelParams::new(1.0).unwrap();
        let h = HingeSpec::new(0.5, 2.0, 1.2, VertexKind::Apex).unwrap();
        assert!(close(ds.hinge_opposite(&h).unwrap(), 1.302, 1e-3));

        let ads = ModelParams::new(-1.0).unwrap();
        let h = HingeSpec::new(0.3, 1.0, 1.5, VertexKind::Apex).unwrap();
        let naive = libm::acos(
            libm::cos(0.3) * libm::cos(1.0) + libm::sin(0.3) * libm::sin(1.0) * 1.5,
        );
        // Independent high-precision evaluation: 0.475250726182184.
        assert!(close(naive, 0.475_250_726_182_184, 1e-12));
        assert!(close(ads.hinge_opposite(&h).unwrap(), naive, 1e-13));
    }

    #[test]
    fn vertex_coshphi_examples() {
        let m = flat();
        assert!(close(m.vertex_coshphi(1.0, 6.0, 1.0, VertexKind::Apex).unwrap(), 3.0, 1e-14));
        assert!(close(
            m.vertex_coshphi(1.0, 1.0, 6.0, VertexKind::Shoulder).unwrap(),
            17.0,
            1e-14
        ));
        assert_eq!(m.vertex_coshphi(2.0, 5.0, 3.0, VertexKind::Apex).unwrap(), 1.0);
        assert!(matches!(
            m.vertex_coshphi(1.0, 6.0, 5.5, VertexKind::Apex),
            Err(ModelError::InfeasibleTriangle { .. })
        ));
    }

    #[test]
    fn nonnormalized_angle_examples() {
        let m = flat();
        assert_eq!(m.nonnormalized_angle(1.0, 6.0, 1.0, VertexKind::Apex).unwrap(), -18.0);
        assert_eq!(m.nonnormalized_angle(1.0, 1.0, 6.0, VertexKind::Shoulder).unwrap(), 17.0);
        assert_eq!(m.nonnormalized_angle(6.0, 1.0, 1.0, VertexKind::Sink).unwrap(), -18.0);
    }

    #[test]
    fn rescale_angle_examples() {
        assert_eq!(rescale_angle(-18.0, 0.5, 1.0), -9.0);
        assert_eq!(rescale_angle(17.0, 1.0, 0.25), 4.25);
        assert_eq!(rescale_angle(3.7, 1.0, 1.0), 3.7);
    }

    #[test]
    fn realize_flat_triangle() {
        let tri = flat().realize_triangle(1.0, 1.0, 6.0).unwrap();
        match tri.vertices()[1] {
            ModelPoint::Flat(y) => {
                assert!(close(y.x, 2.0 * core::f64::consts::SQRT_2, 1e-14));
                assert!(close(y.t, 3.0, 1e-14));
            }
            _ => unreachable!(),
        }
        let q = tri.side_point(Side::Yz, 0.25).unwrap();
        match q {
            ModelPoint::Flat(q) => {
                assert!(close(q.x, 1.5 * core::f64::consts::SQRT_2, 1e-14));
                assert!(close(q.t, 3.75, 1e-14));
            }
            _ => unreachable!(),
        }
        assert_eq!(tri.side_point(Side::Yz, 0.0).unwrap(), tri.vertices()[1]);
        let end = tri.side_point(Side::Yz, 1.0).unwrap();
        if let (ModelPoint::Flat(e), ModelPoint::Flat(z)) = (end, tri.vertices()[2]) {
            assert!(close(e.x, z.x, 1e-14) && close(e.t, z.t, 1e-14));
        }
        assert!(matches!(
            tri.side_point(Side::Yz, 1.5),
            Err(ModelError::OffsetOutOfRange { .. })
        ));
    }

    #[test]
    fn realize_degenerate_is_collinear() {
        let tri = flat().realize_triangle(2.0, 3.0, 5.0).unwrap();
        assert!(tri.is_degenerate());
        if let ModelPoint::Flat(y) = tri.vertices()[1] {
            assert_eq!(y.x, 0.0);
            assert!(close(y.t, 2.0, 1e-14));
        }
    }

    #[test]
    fn realize_curved_triangles_reproduce_sides() {
        for k in [-1.0, 1.0, -0.2, 2.5] {
            let m = ModelParams::new(k).unwrap();
            let (a, b, c) = (0.3, 0.4, 1.0);
            let tri = m.realize_triangle(a, b, c).unwrap();
            let [x, y, z] = *tri.vertices();
            assert!(close(m.tau(&x, &y).unwrap(), a, 1e-12), "k={k}");
            assert!(close(m.tau(&y, &z).unwrap(), b, 1e-12), "k={k}");
            assert!(close(m.tau(&x, &z).unwrap(), c, 1e-12), "k={k}");
            for p in [x, y, z] {
                assert!(m.quadric_residual(&p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corresponding_tau_examples() {
        let m = flat();
        let sides = [1.0, 1.0, 6.0];
        let x = SideOffset::new(Side::Xy, 0.0);
        let v = m.corresponding_tau(sides, x, SideOffset::new(Side::Yz, 0.25)).unwrap();
        assert!(close(v, libm::sqrt(153.0) / 4.0, 1e-12));
        let v = m.corresponding_tau(sides, x, SideOffset::new(Side::Yz, 0.875)).unwrap();
        assert!(close(v, libm::sqrt(2017.0) / 8.0, 1e-12));
        let v = m.corresponding_tau(sides, x, SideOffset::new(Side::Yz, 0.0)).unwrap();
        assert!(close(v, 1.0, 1e-12));
        // Reverse order is not chronological.
        let v = m.corresponding_tau(sides, SideOffset::new(Side::Yz, 0.25), x).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn out_of_chart_pairs_are_rejected() {
        let ds = ModelParams::new(1.0).unwrap();
        let p = ds.point(EventPoint::new(0.0, 0.0));
        let q = ds.point(EventPoint::new(3.5, 10.0));
        assert!(matches!(ds.tau(&p, &q), Err(ModelError::OutOfChart { .. })));
        let ads = ModelParams::new(-1.0).unwrap();
        let p = ads.point(EventPoint::new(0.0, 0.0));
        let q = ads.point(EventPoint::new(0.0, 3.2));
        assert!(matches!(ads.tau(&p, &q), Err(ModelError::OutOfChart { .. })));
    }

    #[test]
    fn chart_round_trip() {
        for k in [1.0, -1.0, 0.5] {
            let m = ModelParams::new(k).unwrap();
            let e = EventPoint::new(0.3, -0.7);
            let back = m.chart(&m.point(e));
            assert!(close(back.x, e.x, 1e-14) && close(back.t, e.t, 1e-14));
        }
    }
}
