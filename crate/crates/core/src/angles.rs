//! Comparison angles of triangles in instance spaces, the angle comparison
//! functions `θ`, normalized angles and the checks built on them.
//!
//! For a timelike triangle `x ≪ y ≪ z` with sides `α: x → y`, `β: y → z`,
//! `γ: x → z` the comparison functions are
//!
//! * at `x`: `θ(s, t) = ∠̃ α(s) x γ(t) / (st)`, defined when `α(s)` and `γ(t)`
//!   are chronologically related (either order);
//! * at `y`: `θ(s, t) = ∠̃ β(s) y α(a − t) / (st)`, always defined;
//! * at `z`: `θ(s, t) = ∠̃ γ(c − s) z β(b − t) / (st)`, defined when the two
//!   points are chronologically related.
//!
//! The normalized angle is the limit of `θ` as both scales shrink.

use alloc::vec::Vec;

use crate::models::{ModelError, ModelParams, Side, SizeVerdict, VertexKind};
use crate::spaces::{
    EventPoint, MaximizerVariant, PolylineCurve, PreLengthSpace, Relation, SpaceError,
    SpaceInstance,
};

/// Values of `θ` below this are reported as divergence to `−∞`.
pub const DIVERGENCE_THRESHOLD: f64 = -1e6;

/// Largest `|j|` tried in the ratio search `t/s = μ₀ 2^j`.
pub const RATIO_SEARCH_RANGE: i32 = 6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AngleError {
    #[error("vertices are not in chronological order x ≪ y ≪ z")]
    NotChronological,
    #[error("side points are not chronologically related")]
    ChronologyFailure,
    #[error("sub-triangle violates the size bounds: {0}")]
    SizeBounds(crate::models::SizeDiagnosis),
    #[error("side {side} has τ-length {length}, expected {expected}")]
    NotMaximal { side: &'static str, length: f64, expected: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(&'static str),
    #[error("the split point must lie before the end of the side")]
    SplitAtEnd,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A vertex of a triangle `x ≪ y ≪ z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Vertex {
    X,
    Y,
    Z,
}

impl Vertex {
    pub const ALL: [Vertex; 3] = [Vertex::X, Vertex::Y, Vertex::Z];

    pub fn kind(self) -> VertexKind {
        match self {
            Vertex::X => VertexKind::Apex,
            Vertex::Y => VertexKind::Shoulder,
            Vertex::Z => VertexKind::Sink,
        }
    }

    pub fn from_kind(kind: VertexKind) -> Vertex {
        match kind {
            VertexKind::Apex => Vertex::X,
            VertexKind::Shoulder => Vertex::Y,
            VertexKind::Sink => Vertex::Z,
        }
    }

    /// `(adj1, adj2, opp)` among the side lengths `[a, b, c]`.
    pub fn roles(self, lengths: [f64; 3]) -> (f64, f64, f64) {
        let [a, b, c] = lengths;
        match self {
            Vertex::X => (a, c, b),
            Vertex::Y => (a, b, c),
            Vertex::Z => (b, c, a),
        }
    }
}

/// A point on a triangle side.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SidePointRef {
    pub side: Side,
    /// Requested τ-offset from the side's initial vertex.
    pub offset: f64,
    /// Offset of the resolved point; differs from `offset` only when the
    /// space cannot attain intermediate values.
    pub resolved_offset: f64,
    pub point: EventPoint,
    /// `|resolved_offset − offset|`.
    pub snap: f64,
}

/// A timelike geodesic triangle `x ≪ y ≪ z` of an instance space.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicTriangle {
    vertices: [EventPoint; 3],
    sides: [PolylineCurve; 3],
    lengths: [f64; 3],
}

impl GeodesicTriangle {
    /// Triangle with sides from the space's maximizer of the given variant.
    pub fn new(
        space: &SpaceInstance,
        x: EventPoint,
        y: EventPoint,
        z: EventPoint,
        variant: MaximizerVariant,
    ) -> Result<Self, AngleError> {
        Self::check_order(space, &x, &y, &z)?;
        let sides = [
            space.maximizer(&x, &y, variant)?,
            space.maximizer(&y, &z, variant)?,
            space.maximizer(&x, &z, variant)?,
        ];
        Self::from_sides(space, sides)
    }

    fn check_order(space: &SpaceInstance, x: &EventPoint, y: &EventPoint, z: &EventPoint) -> Result<(), AngleError> {
        let ok = space.relation(x, y)? == Relation::Chronological
            && space.relation(y, z)? == Relation::Chronological;
        if ok {
            Ok(())
        } else {
            Err(AngleError::NotChronological)
        }
    }

    /// Triangle from explicit sides `[α, β, γ]`; each must be maximal.
    pub fn from_sides(space: &SpaceInstance, sides: [PolylineCurve; 3]) -> Result<Self, AngleError> {
        let x = *sides[0].start();
        let y = *sides[1].start();
        let z = *sides[1].end();
        if sides[0].end() != &y || sides[2].start() != &x || sides[2].end() != &z {
            return Err(AngleError::Space(SpaceError::InvalidCurve { index: 0 }));
        }
        Self::check_order(space, &x, &y, &z)?;
        let ends = [(x, y), (y, z), (x, z)];
        let mut lengths = [0.0; 3];
        for (i, side) in Side::ALL.iter().enumerate() {
            let expected = space.tau(&ends[i].0, &ends[i].1)?;
            let length = space.tau_length(&sides[i], 0)?.value;
            if (length - expected).abs() > 1e-12 * expected.max(1.0) {
                return Err(AngleError::NotMaximal {
                    side: side.name(),
                    length,
                    expected,
                });
            }
            lengths[i] = expected;
        }
        Ok(GeodesicTriangle {
            vertices: [x, y, z],
            sides,
            lengths,
        })
    }

    /// `[x, y, z]`.
    pub fn vertices(&self) -> [EventPoint; 3] {
        self.vertices
    }

    pub fn vertex(&self, v: Vertex) -> EventPoint {
        match v {
            Vertex::X => self.vertices[0],
            Vertex::Y => self.vertices[1],
            Vertex::Z => self.vertices[2],
        }
    }

    /// `[a, b, c] = [τ(x,y), τ(y,z), τ(x,z)]`.
    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn side(&self, side: Side) -> &PolylineCurve {
        &self.sides[side.index()]
    }

    pub fn length(&self, side: Side) -> f64 {
        self.lengths[side.index()]
    }

    /// Resolves the point at τ-offset `offset` on `side`.
    pub fn side_point(&self, space: &SpaceInstance, side: Side, offset: f64) -> Result<SidePointRef, AngleError> {
        let len = self.length(side);
        let slack = 1e-12 * len.max(1.0);
        if !(offset >= -slack && offset <= len + slack) {
            return Err(ModelError::OffsetOutOfRange { offset, length: len }.into());
        }
        let (point, resolved) = space.point_along(self.side(side), offset)?;
        Ok(SidePointRef {
            side,
            offset,
            resolved_offset: resolved,
            point,
            snap: (resolved - offset).abs(),
        })
    }

    /// The two sub-curves of `β` before and after the τ-offset `s`.
    fn split_beta(&self, space: &SpaceInstance, s: f64) -> Result<(EventPoint, PolylineCurve, PolylineCurve), AngleError> {
        let beta = self.side(Side::Yz);
        let cum = beta.cumulative_tau(space)?;
        let m = self.side_point(space, Side::Yz, s)?;
        if m.point == *beta.end() {
            return Err(AngleError::SplitAtEnd);
        }
        let vs = beta.vertices();
        let mut head = Vec::new();
        let mut tail = Vec::new();
        for (i, v) in vs.iter().enumerate() {
            if cum[i] < m.resolved_offset && *v != m.point {
                head.push(*v);
            } else if cum[i] > m.resolved_offset && *v != m.point {
                tail.push(*v);
            }
        }
        head.push(m.point);
        tail.insert(0, m.point);
        let head = PolylineCurve::new(space, head)?;
        let tail = PolylineCurve::new(space, tail)?;
        Ok((m.point, head, tail))
    }
}

/// Signed comparison angle of the whole triangle at a vertex.
pub fn comparison_angle(tri: &GeodesicTriangle, vertex: Vertex, k: &ModelParams) -> Result<f64, AngleError> {
    let [a, b, c] = tri.lengths();
    if let SizeVerdict::Fail(d) = k.size_bounds_ok(a, b, c)? {
        return Err(AngleError::SizeBounds(d));
    }
    let (adj1, adj2, opp) = vertex.roles(tri.lengths());
    Ok(k.nonnormalized_angle(adj1, adj2, opp, vertex.kind())?)
}

/// One evaluation of an angle comparison function.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThetaSample {
    pub s: f64,
    pub t: f64,
    pub theta: f64,
}

fn chronological_tau(space: &SpaceInstance, p: &EventPoint, q: &EventPoint) -> Result<Option<f64>, AngleError> {
    let forward = space.tau(p, q)?;
    if forward > 0.0 {
        return Ok(Some(forward));
    }
    let backward = space.tau(q, p)?;
    Ok((backward > 0.0).then_some(backward))
}

/// Size-bound checked comparison angle of a sub-triangle with adjacent sides
/// `adj1`, `adj2` and opposite side `opp` at a vertex of the given kind.
fn sub_angle(k: &ModelParams, adj1: f64, adj2: f64, opp: f64, kind: VertexKind) -> Result<f64, AngleError> {
    let (lo, hi) = if adj1 <= adj2 { (adj1, adj2) } else { (adj2, adj1) };
    let verdict = match kind {
        VertexKind::Shoulder => k.size_bounds_ok(adj1, adj2, opp)?,
        VertexKind::Apex | VertexKind::Sink => k.size_bounds_ok(lo, opp, hi)?,
    };
    if let SizeVerdict::Fail(d) = verdict {
        return Err(AngleError::SizeBounds(d));
    }
    Ok(k.nonnormalized_angle(adj1, adj2, opp, kind)?)
}

/// Angle comparison function `θ(s, t)` at a vertex.
pub fn theta(
    space: &SpaceInstance,
    tri: &GeodesicTriangle,
    vertex: Vertex,
    s: f64,
    t: f64,
    k: &ModelParams,
) -> Result<ThetaSample, AngleError> {
    if !(s > 0.0 && t > 0.0) {
        return Err(AngleError::InvalidSchedule("scales must be positive"));
    }
    let [a, b, c] = tri.lengths();
    let kind = vertex.kind();
    let (vp, p, q) = match vertex {
        Vertex::X => (
            tri.vertex(Vertex::X),
            tri.side_point(space, Side::Xy, s)?,
            tri.side_point(space, Side::Xz, t)?,
        ),
        Vertex::Y => (
            tri.vertex(Vertex::Y),
            tri.side_point(space, Side::Yz, s)?,
            tri.side_point(space, Side::Xy, a - t)?,
        ),
        Vertex::Z => (
            tri.vertex(Vertex::Z),
            tri.side_point(space, Side::Xz, c - s)?,
            tri.side_point(space, Side::Yz, b - t)?,
        ),
    };
    let (adj1, adj2) = match vertex {
        Vertex::X => (space.tau(&vp, &p.point)?, space.tau(&vp, &q.point)?),
        Vertex::Y => (space.tau(&vp, &p.point)?, space.tau(&q.point, &vp)?),
        Vertex::Z => (space.tau(&p.point, &vp)?, space.tau(&q.point, &vp)?),
    };
    let opp = match vertex {
        Vertex::Y => space.tau(&q.point, &p.point)?,
        _ => chronological_tau(space, &p.point, &q.point)?.ok_or(AngleError::ChronologyFailure)?,
    };
    if !(adj1 > 0.0 && adj2 > 0.0) {
        return Err(AngleError::ChronologyFailure);
    }
    let angle = sub_angle(k, adj1, adj2, opp, kind)?;
    let (rs, rt) = match vertex {
        Vertex::X => (p.resolved_offset, q.resolved_offset),
        Vertex::Y => (p.resolved_offset, a - q.resolved_offset),
        Vertex::Z => (c - p.resolved_offset, b - q.resolved_offset),
    };
    Ok(ThetaSample {
        s: rs,
        t: rt,
        theta: angle / (rs * rt),
    })
}

/// Geometric sequence of scales `(s₀ρⁿ, t₀ρⁿ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AngleSchedule {
    pub s0: f64,
    pub t0: f64,
    pub rho: f64,
    pub tol: f64,
    pub max_steps: usize,
}

impl AngleSchedule {
    /// `s₀ = t₀ = (shortest side)/4`, `ρ = 1/2`, relative tolerance `1e−6`,
    /// 40 steps.
    pub fn default_for(tri: &GeodesicTriangle) -> Self {
        let min = tri.lengths().iter().cloned().fold(f64::INFINITY, f64::min);
        AngleSchedule {
            s0: min / 4.0,
            t0: min / 4.0,
            rho: 0.5,
            tol: 1e-6,
            max_steps: 40,
        }
    }

    fn validate(&self) -> Result<(), AngleError> {
        if !(self.s0 > 0.0 && self.t0 > 0.0) {
            return Err(AngleError::InvalidSchedule("initial scales must be positive"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(AngleError::InvalidSchedule("ratio must lie in (0, 1)"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_steps == 0 {
            return Err(AngleError::InvalidSchedule("tolerance and step count must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AngleStatus {
    Converged,
    /// `θ` dropped below [`DIVERGENCE_THRESHOLD`].
    Diverging,
    /// No scale pair satisfied the chronology condition.
    ChronologyExhausted,
    /// The step budget ran out before successive values settled.
    Unconverged,
}

/// Normalized angle estimate with its full sample history.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AngleEstimate {
    pub vertex: Vertex,
    /// Ratio `t/s` used along the schedule.
    pub ratio: f64,
    pub samples: Vec<ThetaSample>,
    pub limit: f64,
    /// `[min observed, last]`.
    pub bracket: [f64; 2],
    pub status: AngleStatus,
    /// Steps skipped for chronology or size-bound failures.
    pub skipped: usize,
}

impl AngleEstimate {
    pub fn is_converged(&self) -> bool {
        self.status == AngleStatus::Converged
    }

    /// The limit when converged.
    pub fn value(&self) -> Option<f64> {
        self.is_converged().then_some(self.limit)
    }
}

fn ratio_order() -> impl Iterator<Item = i32> {
    core::iter::once(0).chain((1..=RATIO_SEARCH_RANGE).flat_map(|j| [j, -j]))
}

/// Initial pair with ratio `t/s = (t₀/s₀)·μ`, shrinking one scale so that
/// neither exceeds its schedule value.
fn ratio_pair(sched: &AngleSchedule, mu: f64) -> (f64, f64) {
    if mu >= 1.0 {
        (sched.s0 / mu, sched.t0)
    } else {
        (sched.s0, sched.t0 * mu)
    }
}

/// Normalized angle at a vertex as the limit of `θ` along a fixed-ratio
/// geometric schedule.
pub fn normalized_angle(
    space: &SpaceInstance,
    tri: &GeodesicTriangle,
    vertex: Vertex,
    k: &ModelParams,
    sched: &AngleSchedule,
) -> Result<AngleEstimate, AngleError> {
    sched.validate()?;
    let mut chosen = None;
    if vertex == Vertex::Y {
        chosen = Some(1.0);
    } else {
        for j in ratio_order() {
            let mu = libm::ldexp(1.0, j);
            let (s, t) = ratio_pair(sched, mu);
            if theta(space, tri, vertex, s, t, k).is_ok() {
                chosen = Some(mu);
                break;
            }
        }
    }
    let base_ratio = sched.t0 / sched.s0;
    let Some(mu) = chosen else {
        return Ok(AngleEstimate {
            vertex,
            ratio: base_ratio,
            samples: Vec::new(),
            limit: f64::NAN,
            bracket: [f64::NAN, f64::NAN],
            status: AngleStatus::ChronologyExhausted,
            skipped: 0,
        });
    };
    let (s_init, t_init) = ratio_pair(sched, mu);
    let mut samples: Vec<ThetaSample> = Vec::new();
    let mut skipped = 0;
    let mut status = AngleStatus::Unconverged;
    let mut scale = 1.0;
    for _ in 0..sched.max_steps {
        let (s, t) = (s_init * scale, t_init * scale);
        scale *= sched.rho;
        let sample = match theta(space, tri, vertex, s, t, k) {
            Ok(v) => v,
            Err(AngleError::ChronologyFailure | AngleError::SizeBounds(_) | AngleError::Model(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        samples.push(sample);
        if sample.theta < DIVERGENCE_THRESHOLD {
            status = AngleStatus::Diverging;
            break;
        }
        if let [.., prev, last] = samples.as_slice() {
            if (last.theta - prev.theta).abs() < sched.tol * last.theta.abs().max(1.0) {
                status = AngleStatus::Converged;
                break;
            }
        }
    }
    if samples.is_empty() {
        status = AngleStatus::ChronologyExhausted;
    }
    let last = samples.last().map_or(f64::NAN, |s| s.theta);
    let min = samples.iter().map(|s| s.theta).fold(f64::INFINITY, f64::min);
    Ok(AngleEstimate {
        vertex,
        ratio: base_ratio * mu,
        samples,
        limit: last,
        bracket: [min, last],
        status,
        skipped,
    })
}

/// Toponogov comparison at a vertex: `∠̃/(adj₁ adj₂) − ∠`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ToponogovDefect {
    pub normalized_comparison: f64,
    pub angle: AngleEstimate,
    /// `None` when the angle estimate did not converge.
    pub defect: Option<f64>,
}

pub fn toponogov_defect(
    space: &SpaceInstance,
    tri: &GeodesicTriangle,
    vertex: Vertex,
    k: &ModelParams,
    sched: &AngleSchedule,
) -> Result<ToponogovDefect, AngleError> {
    let cmp = comparison_angle(tri, vertex, k)?;
    let (adj1, adj2, _) = vertex.roles(tri.lengths());
    let normalized_comparison = cmp / (adj1 * adj2);
    let angle = normalized_angle(space, tri, vertex, k, sched)?;
    let defect = angle.value().map(|a| normalized_comparison - a);
    Ok(ToponogovDefect {
        normalized_comparison,
        angle,
        defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HingeResidual {
    pub s: f64,
    pub t: f64,
    pub tau: f64,
    pub tau_bar: f64,
    /// `τ − τ̄`; nonnegative under a lower curvature bound.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HingeCheck {
    pub angle: AngleEstimate,
    /// `|ac·∠ − ∠̃| < tol`.
    pub hypothesis_met: bool,
    pub residuals: Vec<HingeResidual>,
}

/// Compares `τ(α(s), γ(t))` with the model hinge built from the normalized
/// angle at `x`.
pub fn hinge_check(
    space: &SpaceInstance,
    tri: &GeodesicTriangle,
    k: &ModelParams,
    grid: &[(f64, f64)],
    sched: &AngleSchedule,
) -> Result<HingeCheck, AngleError> {
    let angle = normalized_angle(space, tri, Vertex::X, k, sched)?;
    let [a, _, c] = tri.lengths();
    let cmp = comparison_angle(tri, Vertex::X, k)?;
    let hypothesis_met = angle
        .value()
        .is_some_and(|v| (a * c * v - cmp).abs() < sched.tol * cmp.abs().max(1.0));
    let coshphi = if angle.limit.is_finite() { (-angle.limit).max(1.0) } else { 1.0 };
    let mut residuals = Vec::with_capacity(grid.len());
    for &(s, t) in grid {
        if !(s > 0.0 && s <= a && t > 0.0 && t <= c) {
            continue;
        }
        let p = tri.side_point(space, Side::Xy, s)?;
        let q = tri.side_point(space, Side::Xz, t)?;
        let tau = chronological_tau(space, &p.point, &q.point)?.unwrap_or(0.0);
        let tau_bar = match k.opposite(p.resolved_offset, q.resolved_offset, coshphi, VertexKind::Apex) {
            Ok(v) => v,
            Err(ModelError::SizeBounds(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        residuals.push(HingeResidual {
            s: p.resolved_offset,
            t: q.resolved_offset,
            tau,
            tau_bar,
            residual: tau - tau_bar,
        });
    }
    Ok(HingeCheck {
        angle,
        hypothesis_met,
        residuals,
    })
}

/// `∠ymx + ∠xmz` at a point `m` of `β`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdjacentSum {
    pub m: EventPoint,
    /// Sink angle at `m` of the sub-triangle `(x, y, m)`; absent when `m = y`.
    pub angle_ymx: Option<AngleEstimate>,
    /// Shoulder angle at `m` of the sub-triangle `(x, m, z)`.
    pub angle_xmz: AngleEstimate,
    /// `None` when a constituent did not converge.
    pub sum: Option<f64>,
}

/// Adjacent angle sum at the point of `β` with τ-offset `offset`, using the
/// maximizer `x → m` of the given variant as cevian.
pub fn adjacent_angle_sum(
    space: &SpaceInstance,
    tri: &GeodesicTriangle,
    offset: f64,
    k: &ModelParams,
    sched: Option<&AngleSchedule>,
    variant: MaximizerVariant,
) -> Result<AdjacentSum, AngleError> {
    let [x, y, _] = tri.vertices();
    if tri.side_point(space, Side::Yz, offset)?.point == y {
        let sched = sched.copied().unwrap_or_else(|| AngleSchedule::default_for(tri));
        let angle_xmz = normalized_angle(space, tri, Vertex::Y, k, &sched)?;
        return Ok(AdjacentSum {
            m: y,
            angle_ymx: None,
            sum: angle_xmz.value(),
            angle_xmz,
        });
    }
    let (m, head, tail) = tri.split_beta(space, offset)?;
    let cevian = space.maximizer(&x, &m, variant)?;
    let left = GeodesicTriangle::from_sides(space, [tri.side(Side::Xy).clone(), head, cevian.clone()])?;
    let right = GeodesicTriangle::from_sides(space, [cevian, tail, tri.side(Side::Xz).clone()])?;
    let ls = sched.copied().unwrap_or_else(|| AngleSchedule::default_for(&left));
    let rs = sched.copied().unwrap_or_else(|| AngleSchedule::default_for(&right));
    let angle_ymx = normalized_angle(space, &left, Vertex::Z, k, &ls)?;
    let angle_xmz = normalized_angle(space, &right, Vertex::Y, k, &rs)?;
    let sum = match (angle_ymx.value(), angle_xmz.value()) {
        (Some(l), Some(r)) => Some(l + r),
        _ => None,
    };
    Ok(AdjacentSum {
        m,
        angle_ymx: Some(angle_ymx),
        angle_xmz,
        sum,
    })
}

/// Schedule `t₀ρⁱ` for the first variation of `ℓ(t) = τ(α(t), z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VariationSchedule {
    pub t0: f64,
    pub rho: f64,
    pub steps: usize,
}

impl Default for VariationSchedule {
    fn default() -> Self {
        VariationSchedule {
            t0: 1e-2,
            rho: 0.5,
            steps: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VariationSample {
    pub t: f64,
    pub ell: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FirstVariationResult {
    pub samples: Vec<VariationSample>,
    /// Last slope.
    pub slope_limit: f64,
    /// Angle at `x` the slope is compared against (the maximum over
    /// maximizer variants when requested).
    pub angle: AngleEstimate,
    /// `slope_limit − ∠yxz`, when the angle converged.
    pub residual: Option<f64>,
    /// Smallest `slope − ∠yxz` over the schedule. In smooth spaces this is
    /// negative at every finite `t` whenever `ℓ` is concave; only the limit
    /// is bounded by the angle.
    pub min_slope_gap: Option<f64>,
    /// Estimate of `lim (ℓ(t) − ℓ(0))/t` by polynomial extrapolation of the
    /// slopes to `t = 0`.
    pub extrapolated: f64,
    /// `extrapolated − ∠yxz`, when the angle converged.
    pub extrapolated_residual: Option<f64>,
}

/// Extrapolates `slope(t)` to `t = 0` with second-order Neville tables over
/// consecutive samples, keeping the entry whose successive estimates agree
/// best (smaller `t` improves truncation but amplifies rounding).
fn extrapolate_slopes(samples: &[VariationSample]) -> f64 {
    const ORDER: usize = 2;
    match samples.len() {
        0 => return f64::NAN,
        n if n <= ORDER => return samples[n - 1].slope,
        _ => {}
    }
    let estimate = |i: usize| -> f64 {
        // Neville's scheme on samples i − ORDER ..= i evaluated at 0.
        let w = &samples[i - ORDER..=i];
        let mut p: Vec<f64> = w.iter().map(|s| s.slope).collect();
        for j in 1..=ORDER {
            for m in (j..=ORDER).rev() {
                let (tl, tr) = (w[m - j].t, w[m].t);
                p[m] = (tl * p[m] - tr * p[m - 1]) / (tl - tr);
            }
        }
        p[ORDER]
    };
    let estimates: Vec<f64> = (ORDER..samples.len()).map(estimate).collect();
    let mut best = estimates.len() - 1;
    let mut best_gap = f64::INFINITY;
    for i in 1..estimates.len() {
        // Rounding in ℓ is amplified by 1/t in the quotient and by the
        // extrapolation weights, so tiny steps can agree spuriously.
        let s = &samples[i + ORDER];
        let rounding = 16.0 * f64::EPSILON * s.ell.abs().max(1.0) / s.t;
        let gap = (estimates[i] - estimates[i - 1]).abs() + rounding;
        if gap < best_gap {
            best_gap = gap;
            best = i;
        }
    }
    estimates[best]
}

/// First variation of `ℓ(t) = τ(α(t), z)` at `t = 0`. With `max_over_variants`
/// the angle at `x` is the maximum over triangles using each maximizer
/// variant for `γ`.
pub fn first_variation(
    space: &SpaceInstance,
    tri: &GeodesicTriangle,
    sched: &VariationSchedule,
    k: &ModelParams,
    angle_sched: &AngleSchedule,
    max_over_variants: bool,
) -> Result<FirstVariationResult, AngleError> {
    if !(sched.t0 > 0.0 && sched.rho > 0.0 && sched.rho < 1.0 && sched.steps > 0) {
        return Err(AngleError::InvalidSchedule("variation schedule must be positive with ρ in (0, 1)"));
    }
    let [a, _, c] = tri.lengths();
    let z = tri.vertex(Vertex::Z);
    let mut t = sched.t0.min(a);
    let mut samples = Vec::with_capacity(sched.steps);
    for _ in 0..sched.steps {
        let p = tri.side_point(space, Side::Xy, t)?;
        if p.resolved_offset > 0.0 {
            let ell = space.tau(&p.point, &z)?;
            let tt = p.resolved_offset;
            if samples.last().is_none_or(|s: &VariationSample| tt < s.t) {
                samples.push(VariationSample {
                    t: tt,
                    ell,
                    slope: (ell - c) / tt,
                });
            }
        }
        t *= sched.rho;
    }
    let mut angle = normalized_angle(space, tri, Vertex::X, k, angle_sched)?;
    if max_over_variants {
        for variant in MaximizerVariant::ALL {
            let [x, _, z] = tri.vertices();
            let gamma = space.maximizer(&x, &z, variant)?;
            let other = GeodesicTriangle::from_sides(space, [tri.side(Side::Xy).clone(), tri.side(Side::Yz).clone(), gamma]);
            if let Ok(other) = other {
                let est = normalized_angle(space, &other, Vertex::X, k, angle_sched)?;
                if let (Some(v), cur) = (est.value(), angle.value()) {
                    if cur.is_none_or(|c| v > c) {
                        angle = est;
                    }
                }
            }
        }
    }
    let slope_limit = samples.last().map_or(f64::NAN, |s| s.slope);
    let residual = angle.value().map(|v| slope_limit - v);
    let min_slope_gap = angle
        .value()
        .map(|v| samples.iter().map(|s| s.slope - v).fold(f64::INFINITY, f64::min));
    let extrapolated = extrapolate_slopes(&samples);
    let extrapolated_residual = angle.value().map(|v| extrapolated - v);
    Ok(FirstVariationResult {
        samples,
        slope_limit,
        angle,
        residual,
        min_slope_gap,
        extrapolated,
        extrapolated_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;

    fn e(x: f64, t: f64) -> EventPoint {
        EventPoint::new(x, t)
    }

    fn flat_tri() -> (SpaceInstance, GeodesicTriangle) {
        let s = SpaceInstance::Minkowski;
        let tri = GeodesicTriangle::new(&s, e(0.0, 0.0), e(2.0 * SQRT_2, 3.0), e(0.0, 6.0), MaximizerVariant::Canonical).unwrap();
        (s, tri)
    }

    fn taxi_tri() -> (SpaceInstance, GeodesicTriangle) {
        let s = SpaceInstance::Taxicab;
        let tri = GeodesicTriangle::new(&s, e(0.0, 0.0), e(-2.0, 3.0), e(1.0, 7.0), MaximizerVariant::Canonical).unwrap();
        (s, tri)
    }

    #[test]
    fn comparison_angle_examples() {
        let (_, tri) = flat_tri();
        let k = ModelParams::flat();
        assert!((comparison_angle(&tri, Vertex::X, &k).unwrap() + 18.0).abs() < 1e-12);
        assert!((comparison_angle(&tri, Vertex::Y, &k).unwrap() - 17.0).abs() < 1e-12);
        assert!((comparison_angle(&tri, Vertex::Z, &k).unwrap() + 18.0).abs() < 1e-12);
    }

    #[test]
    fn theta_examples() {
        let (s, tri) = flat_tri();
        let k = ModelParams::flat();
        assert!((theta(&s, &tri, Vertex::X, 0.1, 1.0, &k).unwrap().theta + 3.0).abs() < 1e-9);
        assert!((theta(&s, &tri, Vertex::Y, 0.3, 0.7, &k).unwrap().theta - 17.0).abs() < 1e-9);
        let (s, tri) = taxi_tri();
        assert_eq!(tri.lengths(), [1.0, 1.0, 6.0]);
        // Full sides: the comparison angle −18 divided by s·t = 6.
        assert!((theta(&s, &tri, Vertex::X, 1.0, 6.0, &k).unwrap().theta + 3.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_angle_examples() {
        let (s, tri) = flat_tri();
        let k = ModelParams::flat();
        let sched = AngleSchedule::default_for(&tri);
        let est = normalized_angle(&s, &tri, Vertex::X, &k, &sched).unwrap();
        assert!(est.is_converged() && est.samples.len() <= 2);
        assert!((est.limit + 3.0).abs() < 1e-9);
        let est = normalized_angle(&s, &tri, Vertex::Y, &k, &sched).unwrap();
        assert!((est.limit - 17.0).abs() < 1e-9);

        let tri = GeodesicTriangle::new(&s, e(0.0, 0.0), e(0.0, 2.0), e(0.0, 5.0), MaximizerVariant::Canonical).unwrap();
        let est = normalized_angle(&s, &tri, Vertex::X, &k, &AngleSchedule::default_for(&tri)).unwrap();
        assert!(est.is_converged() && (est.limit + 1.0).abs() < 1e-9);
    }

    #[test]
    fn taxicab_angle_needs_ratio_search() {
        let (s, tri) = taxi_tri();
        let k = ModelParams::flat();
        let est = normalized_angle(&s, &tri, Vertex::X, &k, &AngleSchedule::default_for(&tri)).unwrap();
        assert_eq!(est.ratio, 0.5);
        assert!(est.is_converged());
        assert!((est.limit + 41.0 / 36.0).abs() < 1e-12);
    }

    #[test]
    fn toponogov_examples() {
        let (s, tri) = flat_tri();
        let k = ModelParams::flat();
        let sched = AngleSchedule::default_for(&tri);
        for v in [Vertex::X, Vertex::Y] {
            let d = toponogov_defect(&s, &tri, v, &k, &sched).unwrap();
            assert!(d.defect.unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn hinge_check_examples() {
        let (s, tri) = flat_tri();
        let k = ModelParams::flat();
        let grid = [(0.5, 1.0), (1.0, 3.0), (0.25, 5.0)];
        let h = hinge_check(&s, &tri, &k, &grid, &AngleSchedule::default_for(&tri)).unwrap();
        assert!(h.hypothesis_met);
        assert!(h.residuals.iter().all(|r| r.residual.abs() < 1e-9));

        let (s, tri) = taxi_tri();
        let h = hinge_check(&s, &tri, &k, &[(1.0, 0.6)], &AngleSchedule::default_for(&tri)).unwrap();
        assert!(h.residuals[0].residual > 0.1);
    }

    #[test]
    fn adjacent_sum_flat_midpoint() {
        let (s, tri) = flat_tri();
        let k = ModelParams::flat();
        let sum = adjacent_angle_sum(&s, &tri, 0.5, &k, None, MaximizerVariant::Canonical).unwrap();
        assert!((sum.m.x - SQRT_2).abs() < 1e-12 && (sum.m.t - 4.5).abs() < 1e-12);
        let expected = 17.5 / libm::sqrt(18.25);
        assert!((sum.angle_xmz.limit - expected).abs() < 1e-9);
        assert!((sum.angle_ymx.unwrap().limit + expected).abs() < 1e-9);
        assert!(sum.sum.unwrap().abs() < 1e-9);
        let at_y = adjacent_angle_sum(&s, &tri, 0.0, &k, None, MaximizerVariant::Canonical).unwrap();
        assert!(at_y.sum.unwrap() > 0.0);
        assert!(adjacent_angle_sum(&s, &tri, 1.0, &k, None, MaximizerVariant::Canonical).is_err());
    }

    #[test]
    fn first_variation_flat_example() {
        let (s, tri) = flat_tri();
        let k = ModelParams::flat();
        let sched = VariationSchedule { t0: 1e-2, rho: 0.5, steps: 14 };
        let fv = first_variation(&s, &tri, &sched, &k, &AngleSchedule::default_for(&tri), false).unwrap();
        assert!(fv.residual.unwrap().abs() < 1e-6);
        for smp in &fv.samples {
            let exact = (libm::sqrt(36.0 - 36.0 * smp.t + smp.t * smp.t) - 6.0) / smp.t;
            assert!((smp.slope - exact).abs() < 1e-9);
        }
    }
}
