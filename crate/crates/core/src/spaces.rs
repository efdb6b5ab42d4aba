//! Lorentzian pre-length spaces: relations, time separation, maximizers and
//! τ-length of causal polylines.
//!
//! Coordinates are `(x, t)` throughout: the first entry is spatial and the
//! second is time.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::models::{ModelError, ModelParams};
use crate::numeric::LENGTH_REL_TOL;

/// An event in the chart `(x, t)` of an instance space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EventPoint {
    pub x: f64,
    pub t: f64,
}

impl EventPoint {
    pub const fn new(x: f64, t: f64) -> Self {
        EventPoint { x, t }
    }

    /// Affine interpolation `self + λ (other − self)`.
    pub fn lerp(&self, other: &EventPoint, lambda: f64) -> EventPoint {
        EventPoint::new(
            self.x + lambda * (other.x - self.x),
            self.t + lambda * (other.t - self.t),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.t.is_finite()
    }
}

/// Causal classification of an ordered pair `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Relation {
    /// `p ≪ q`.
    Chronological,
    /// `p ≤ q`, `p ≠ q` and `τ(p, q) = 0`.
    CausalOnly,
    Unrelated,
    Equal,
}

impl Relation {
    /// `p ≤ q`.
    pub fn is_causal(self) -> bool {
        !matches!(self, Relation::Unrelated)
    }

    pub fn is_chronological(self) -> bool {
        matches!(self, Relation::Chronological)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error("point ({x}, {t}) is not in the table")]
    UnknownPoint { x: f64, t: f64 },
    #[error("no causal curve joins the points")]
    NoCurve,
    #[error("curve is not causal between vertices {index} and {}", index + 1)]
    InvalidCurve { index: usize },
    #[error("curve is constant")]
    ConstantCurve,
    #[error("invalid space configuration: {0}")]
    Config(String),
    #[error("reverse triangle inequality fails on ({p}, {q}, {r})")]
    ReverseTriangle { p: String, q: String, r: String },
    #[error("causal relation is not transitive on ({p}, {q}, {r})")]
    NotTransitive { p: String, q: String, r: String },
    #[error("operation requires a space with dilations")]
    NotHomogeneous,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Interface shared by every pre-length space in the crate.
pub trait PreLengthSpace {
    type Point: Copy + PartialEq + core::fmt::Debug;

    fn relation(&self, p: &Self::Point, q: &Self::Point) -> Result<Relation, SpaceError>;

    fn tau(&self, p: &Self::Point, q: &Self::Point) -> Result<f64, SpaceError>;
}

/// Which maximizer to return between two causally related points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MaximizerVariant {
    /// Straight segment (a geodesic in model spaces, a longest chain in
    /// tabulated spaces).
    #[default]
    Canonical,
    /// In the taxicab space: alternating time-like and null legs with
    /// monotone spatial coordinate. Other spaces fall back to the canonical
    /// maximizer.
    Staircase,
}

impl MaximizerVariant {
    pub const ALL: [MaximizerVariant; 2] = [MaximizerVariant::Canonical, MaximizerVariant::Staircase];
}

/// Number of time legs of the taxicab staircase maximizer.
const STAIRCASE_STEPS: usize = 4;

/// A finite space with a tabulated time separation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpace {
    ids: Vec<String>,
    coords: Vec<EventPoint>,
    tau: Vec<f64>,
    causal: Vec<bool>,
}

impl TabulatedSpace {
    /// Validates and builds a tabulated space. Without an explicit causal
    /// matrix, `p ≤ q` iff `τ(p, q) > 0` or `p = q`.
    pub fn new(
        ids: Vec<String>,
        coords: Vec<EventPoint>,
        tau: Vec<Vec<f64>>,
        causal: Option<Vec<Vec<bool>>>,
    ) -> Result<Self, SpaceError> {
        let n = ids.len();
        if n == 0 {
            return Err(SpaceError::Config("tabulated space has no points".into()));
        }
        if coords.len() != n {
            return Err(SpaceError::Config("ids and coordinates differ in length".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(SpaceError::Config(format!("point {} has non-finite coordinates", ids[i])));
            }
            if coords[..i].contains(c) {
                return Err(SpaceError::Config(format!("point {} repeats coordinates", ids[i])));
            }
        }
        if tau.len() != n || tau.iter().any(|row| row.len() != n) {
            return Err(SpaceError::Config(format!("tau matrix must be {n}×{n}")));
        }
        let flat_tau: Vec<f64> = tau.into_iter().flatten().collect();
        for i in 0..n {
            for j in 0..n {
                let v = flat_tau[i * n + j];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(SpaceError::Config(format!(
                        "tau({}, {}) = {v} is not a nonnegative number",
                        ids[i], ids[j]
                    )));
                }
            }
            if flat_tau[i * n + i] != 0.0 {
                return Err(SpaceError::Config(format!("tau({0}, {0}) must be 0", ids[i])));
            }
        }
        let flat_causal: Vec<bool> = match causal {
            Some(m) => {
                if m.len() != n || m.iter().any(|row| row.len() != n) {
                    return Err(SpaceError::Config(format!("causal matrix must be {n}×{n}")));
                }
                let m: Vec<bool> = m.into_iter().flatten().collect();
                for i in 0..n {
                    if !m[i * n + i] {
                        return Err(SpaceError::Config(format!("causal({0}, {0}) must be true", ids[i])));
                    }
                    for j in 0..n {
                        if flat_tau[i * n + j] > 0.0 && !m[i * n + j] {
                            return Err(SpaceError::Config(format!(
                                "tau({}, {}) > 0 but the pair is not causal",
                                ids[i], ids[j]
                            )));
                        }
                    }
                }
                m
            }
            None => (0..n * n)
                .map(|ij| ij / n == ij % n || flat_tau[ij] > 0.0)
                .collect(),
        };
        for p in 0..n {
            for q in 0..n {
                if !flat_causal[p * n + q] {
                    continue;
                }
                for r in 0..n {
                    if !flat_causal[q * n + r] {
                        continue;
                    }
                    let names = || (ids[p].clone(), ids[q].clone(), ids[r].clone());
                    if !flat_causal[p * n + r] {
                        let (p, q, r) = names();
                        return Err(SpaceError::NotTransitive { p, q, r });
                    }
                    if flat_tau[p * n + r] < flat_tau[p * n + q] + flat_tau[q * n + r] {
                        let (p, q, r) = names();
                        return Err(SpaceError::ReverseTriangle { p, q, r });
                    }
                }
            }
        }
        Ok(TabulatedSpace {
            ids,
            coords,
            tau: flat_tau,
            causal: flat_causal,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn points(&self) -> &[EventPoint] {
        &self.coords
    }

    pub fn index_of(&self, p: &EventPoint) -> Result<usize, SpaceError> {
        self.coords
            .iter()
            .position(|c| c == p)
            .ok_or(SpaceError::UnknownPoint { x: p.x, t: p.t })
    }

    pub fn tau_at(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.len() + j]
    }

    pub fn causal_at(&self, i: usize, j: usize) -> bool {
        self.causal[i * self.len() + j]
    }

    /// Same table with every τ multiplied by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> TabulatedSpace {
        TabulatedSpace {
            tau: self.tau.iter().map(|v| v * lambda).collect(),
            ..self.clone()
        }
    }

    /// Longest chain (most nodes) from `i` to `j` whose τ telescopes to
    /// `τ(i, j)`.
    fn longest_chain(&self, i: usize, j: usize) -> Result<Vec<usize>, SpaceError> {
        if !self.causal_at(i, j) {
            return Err(SpaceError::NoCurve);
        }
        if i == j {
            return Ok(vec![i]);
        }
        let total = self.tau_at(i, j);
        let tol = LENGTH_REL_TOL * total.max(1.0);
        let fits = |u: usize, w: usize| {
            u != w
                && self.causal_at(u, w)
                && (self.tau_at(i, u) + self.tau_at(u, w) - self.tau_at(i, w)).abs() <= tol
        };
        let mut nodes: Vec<usize> = (0..self.len())
            .filter(|&v| {
                v != i
                    && v != j
                    && self.causal_at(i, v)
                    && self.causal_at(v, j)
                    && (self.tau_at(i, v) + self.tau_at(v, j) - total).abs() <= tol
            })
            .collect();
        // A topological order of the causal pre-order restricted to the
        // diamond: count causal predecessors.
        let rank = |v: usize| {
            (0..self.len())
                .filter(|&u| u != v && self.causal_at(u, v) && !self.causal_at(v, u))
                .count()
        };
        nodes.sort_by_key(|&v| (rank(v), v));
        let mut order = vec![i];
        order.extend(nodes);
        order.push(j);
        let m = order.len();
        let mut best: Vec<Option<usize>> = vec![None; m];
        let mut prev: Vec<usize> = vec![0; m];
        best[0] = Some(1);
        for w in 1..m {
            for u in 0..w {
                if let Some(len) = best[u] {
                    if fits(order[u], order[w]) && best[w].is_none_or(|b| len + 1 > b) {
                        best[w] = Some(len + 1);
                        prev[w] = u;
                    }
                }
            }
        }
        if best[m - 1].is_none() {
            return Err(SpaceError::NoCurve);
        }
        let mut chain = vec![order[m - 1]];
        let mut cur = m - 1;
        while cur != 0 {
            cur = prev[cur];
            chain.push(order[cur]);
        }
        chain.reverse();
        Ok(chain)
    }
}

/// A concrete pre-length space whose points are chart events.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceInstance {
    Minkowski,
    /// `ℝ²` with the taxicab metric, Minkowski causality and
    /// `τ = Δt − |Δx|` on causal pairs.
    Taxicab,
    Model(ModelParams),
    Tabulated(TabulatedSpace),
}

impl SpaceInstance {
    pub fn model(k: f64) -> Result<Self, SpaceError> {
        Ok(SpaceInstance::Model(ModelParams::new(k)?))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SpaceInstance::Minkowski => "minkowski",
            SpaceInstance::Taxicab => "taxicab",
            SpaceInstance::Model(_) => "model",
            SpaceInstance::Tabulated(_) => "tabulated",
        }
    }

    /// Whether `τ(p, q)` is attained at every intermediate value along a
    /// maximizer (false for finite tables).
    pub fn is_continuous(&self) -> bool {
        !matches!(self, SpaceInstance::Tabulated(_))
    }

    /// Whether dilations `p ↦ c + λ(p − c)` scale τ by `λ`.
    pub fn is_homogeneous(&self) -> bool {
        matches!(self, SpaceInstance::Minkowski | SpaceInstance::Taxicab)
    }

    /// Dilation about `center` by `lambda`; only for homogeneous spaces.
    pub fn dilate(&self, p: &EventPoint, center: &EventPoint, lambda: f64) -> Result<EventPoint, SpaceError> {
        if !self.is_homogeneous() {
            return Err(SpaceError::NotHomogeneous);
        }
        Ok(center.lerp(p, lambda))
    }

    fn minkowski_relation(p: &EventPoint, q: &EventPoint) -> Relation {
        let dx = (q.x - p.x).abs();
        let dt = q.t - p.t;
        if dx == 0.0 && dt == 0.0 {
            Relation::Equal
        } else if dt > dx {
            Relation::Chronological
        } else if dt == dx {
            Relation::CausalOnly
        } else {
            Relation::Unrelated
        }
    }

    /// Maximizer from `p` to `q`.
    pub fn maximizer(
        &self,
        p: &EventPoint,
        q: &EventPoint,
        variant: MaximizerVariant,
    ) -> Result<PolylineCurve, SpaceError> {
        let rel = self.relation(p, q)?;
        if !rel.is_causal() {
            return Err(SpaceError::NoCurve);
        }
        let vertices = match (self, variant) {
            (SpaceInstance::Tabulated(tab), _) => {
                let (i, j) = (tab.index_of(p)?, tab.index_of(q)?);
                tab.longest_chain(i, j)?.into_iter().map(|v| tab.coords[v]).collect()
            }
            (SpaceInstance::Taxicab, MaximizerVariant::Staircase)
                if rel.is_chronological() && q.x != p.x =>
            {
                let tau = self.tau(p, q)?;
                let n = STAIRCASE_STEPS;
                let (leg_t, leg_x) = (tau / n as f64, (q.x - p.x) / n as f64);
                let xs: Vec<f64> = (0..=n)
                    .map(|i| if i == n { q.x } else { p.x + i as f64 * leg_x })
                    .collect();
                // Null legs are built in floating point; nudge their endpoints
                // so that rounding never makes a leg spacelike.
                let causal = |a: &EventPoint, b: &EventPoint| Self::minkowski_relation(a, b).is_causal();
                let mut v = vec![*p];
                let mut t = p.t;
                for i in 0..n {
                    t += leg_t;
                    let mut a = EventPoint::new(xs[i], t);
                    if i + 1 == n {
                        a.t = q.t - (q.x - xs[i]).abs();
                        while !causal(&a, q) {
                            a.t = a.t.next_down();
                        }
                        v.push(a);
                        v.push(*q);
                    } else {
                        let mut b = EventPoint::new(xs[i + 1], t + (xs[i + 1] - xs[i]).abs());
                        while !causal(&a, &b) {
                            b.t = b.t.next_up();
                        }
                        t = b.t;
                        v.push(a);
                        v.push(b);
                    }
                }
                v
            }
            _ => vec![*p, *q],
        };
        PolylineCurve::new(self, vertices)
    }

    /// Point at fraction `lambda` of the canonical maximizer from `p` to `q`.
    pub fn interpolate(&self, p: &EventPoint, q: &EventPoint, lambda: f64) -> Result<EventPoint, SpaceError> {
        match self {
            SpaceInstance::Minkowski | SpaceInstance::Taxicab => Ok(p.lerp(q, lambda)),
            SpaceInstance::Model(m) => {
                let g = m.geodesic_point(&m.point(*p), &m.point(*q), lambda)?;
                Ok(m.chart(&g))
            }
            SpaceInstance::Tabulated(_) => Err(SpaceError::NoCurve),
        }
    }

    /// Point at τ-offset `s` from the start of a maximizer. Returns the
    /// resolved point and its actual offset; in tabulated spaces the nearest
    /// chain node is used.
    pub fn point_along(&self, curve: &PolylineCurve, s: f64) -> Result<(EventPoint, f64), SpaceError> {
        let cum = curve.cumulative_tau(self)?;
        let total = *cum.last().unwrap_or(&0.0);
        let s = s.clamp(0.0, total);
        if let SpaceInstance::Tabulated(_) = self {
            let mut best = 0;
            for (i, c) in cum.iter().enumerate() {
                if (c - s).abs() < (cum[best] - s).abs() {
                    best = i;
                }
            }
            return Ok((curve.vertices[best], cum[best]));
        }
        for i in 0..cum.len() - 1 {
            let (c0, c1) = (cum[i], cum[i + 1]);
            if s <= c1 && c1 > c0 {
                if s <= c0 {
                    return Ok((curve.vertices[i], s));
                }
                let lambda = (s - c0) / (c1 - c0);
                let pt = if lambda >= 1.0 {
                    curve.vertices[i + 1]
                } else {
                    self.interpolate(&curve.vertices[i], &curve.vertices[i + 1], lambda)?
                };
                return Ok((pt, s));
            }
        }
        Ok((*curve.end(), s))
    }

    /// τ-length of a causal polyline by dyadic refinement of its partition.
    pub fn tau_length(&self, curve: &PolylineCurve, depth: u32) -> Result<TauLength, SpaceError> {
        let mut estimates = Vec::with_capacity(depth as usize + 1);
        for d in 0..=depth {
            if d > 0 && !self.is_continuous() {
                let last = estimates[0];
                estimates.push(last);
                continue;
            }
            let pieces = 1usize << d;
            let mut sum = 0.0;
            for w in curve.vertices.windows(2) {
                let mut prev = w[0];
                for j in 1..=pieces {
                    let next = if j == pieces {
                        w[1]
                    } else {
                        self.interpolate(&w[0], &w[1], j as f64 / pieces as f64)?
                    };
                    sum += self.tau(&prev, &next)?;
                    prev = next;
                }
            }
            estimates.push(sum);
        }
        let value = *estimates.last().unwrap_or(&0.0);
        Ok(TauLength { estimates, value })
    }
}

impl PreLengthSpace for SpaceInstance {
    type Point = EventPoint;

    fn relation(&self, p: &EventPoint, q: &EventPoint) -> Result<Relation, SpaceError> {
        match self {
            SpaceInstance::Minkowski | SpaceInstance::Taxicab => Ok(Self::minkowski_relation(p, q)),
            SpaceInstance::Model(m) => {
                use crate::models::Separation;
                Ok(match m.separation(&m.point(*p), &m.point(*q))? {
                    Separation::Equal => Relation::Equal,
                    Separation::Chronological(_) => Relation::Chronological,
                    Separation::Null => Relation::CausalOnly,
                    Separation::Unrelated => Relation::Unrelated,
                })
            }
            SpaceInstance::Tabulated(tab) => {
                let (i, j) = (tab.index_of(p)?, tab.index_of(q)?);
                Ok(if i == j {
                    Relation::Equal
                } else if tab.tau_at(i, j) > 0.0 {
                    Relation::Chronological
                } else if tab.causal_at(i, j) {
                    Relation::CausalOnly
                } else {
                    Relation::Unrelated
                })
            }
        }
    }

    fn tau(&self, p: &EventPoint, q: &EventPoint) -> Result<f64, SpaceError> {
        match self {
            SpaceInstance::Minkowski => {
                let dx = (q.x - p.x).abs();
                let dt = q.t - p.t;
                Ok(if dt > dx { libm::sqrt((dt - dx) * (dt + dx)) } else { 0.0 })
            }
            SpaceInstance::Taxicab => {
                let dx = (q.x - p.x).abs();
                let dt = q.t - p.t;
                Ok(if dt > dx { dt - dx } else { 0.0 })
            }
            SpaceInstance::Model(m) => Ok(m.tau(&m.point(*p), &m.point(*q))?),
            SpaceInstance::Tabulated(tab) => Ok(tab.tau_at(tab.index_of(p)?, tab.index_of(q)?)),
        }
    }
}

/// Dyadic τ-length estimates, non-increasing in the refinement depth.
#[derive(Debug, Clone, PartialEq)]
pub struct TauLength {
    pub estimates: Vec<f64>,
    pub value: f64,
}

/// A future-directed causal polyline. In model spaces consecutive vertices
/// are joined by model geodesics.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineCurve {
    vertices: Vec<EventPoint>,
}

impl PolylineCurve {
    /// Validates causality of consecutive vertices and drops repeats.
    pub fn new(space: &SpaceInstance, vertices: Vec<EventPoint>) -> Result<Self, SpaceError> {
        let mut kept: Vec<EventPoint> = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.into_iter().enumerate() {
            if let Some(last) = kept.last() {
                match space.relation(last, &v)? {
                    Relation::Equal => continue,
                    Relation::Unrelated => return Err(SpaceError::InvalidCurve { index: i - 1 }),
                    _ => {}
                }
            }
            kept.push(v);
        }
        if kept.len() < 2 {
            return Err(SpaceError::ConstantCurve);
        }
        Ok(PolylineCurve { vertices: kept })
    }

    pub fn vertices(&self) -> &[EventPoint] {
        &self.vertices
    }

    pub fn start(&self) -> &EventPoint {
        &self.vertices[0]
    }

    pub fn end(&self) -> &EventPoint {
        &self.vertices[self.vertices.len() - 1]
    }

    /// Telescoped τ at each vertex, starting at 0.
    pub fn cumulative_tau(&self, space: &SpaceInstance) -> Result<Vec<f64>, SpaceError> {
        let mut cum = Vec::with_capacity(self.vertices.len());
        let mut acc = 0.0;
        cum.push(acc);
        for w in self.vertices.windows(2) {
            acc += space.tau(&w[0], &w[1])?;
            cum.push(acc);
        }
        Ok(cum)
    }
}

/// A finite metric space given by a distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    ids: Vec<String>,
    dist: Vec<f64>,
}

impl FiniteMetric {
    pub fn new(ids: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let n = ids.len();
        if n == 0 {
            return Err(SpaceError::Config("metric space has no points".into()));
        }
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(SpaceError::Config(format!("distance matrix must be {n}×{n}")));
        }
        let d: Vec<f64> = dist.into_iter().flatten().collect();
        for i in 0..n {
            for j in 0..n {
                let v = d[i * n + j];
                let ok = v.is_finite()
                    && v >= 0.0
                    && (v == 0.0) == (i == j)
                    && v == d[j * n + i];
                if !ok {
                    return Err(SpaceError::Config(format!(
                        "d({}, {}) = {v} violates the metric axioms",
                        ids[i], ids[j]
                    )));
                }
                for k in 0..n {
                    if d[i * n + k] > v + d[j * n + k] {
                        return Err(SpaceError::Config(format!(
                            "triangle inequality fails on ({}, {}, {})",
                            ids[i], ids[j], ids[k]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric { ids, dist: d })
    }

    pub fn single_point() -> Self {
        FiniteMetric {
            ids: vec!["*".into()],
            dist: vec![0.0],
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }
}

/// A point `(a, b)` of a taxicab product: `a` indexes the metric factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint {
    pub factor: usize,
    pub base: EventPoint,
}

/// Taxicab product `X × Y` of a metric space with a pre-length space:
/// `(a,b) ≤ (x,y)` iff `b ≤ y` and `τ_Y(b,y) ≥ d_X(a,x)`, chronological iff
/// `τ_Y(b,y) > d_X(a,x)`, and `τ = τ_Y − d_X` on causal pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TaxicabProduct {
    metric: FiniteMetric,
    base: Box<SpaceInstance>,
}

impl TaxicabProduct {
    pub fn new(metric: FiniteMetric, base: SpaceInstance) -> Self {
        TaxicabProduct {
            metric,
            base: Box::new(base),
        }
    }

    pub fn metric(&self) -> &FiniteMetric {
        &self.metric
    }

    pub fn base(&self) -> &SpaceInstance {
        &self.base
    }

    fn check(&self, p: &ProductPoint) -> Result<(), SpaceError> {
        if p.factor < self.metric.len() {
            Ok(())
        } else {
            Err(SpaceError::UnknownPoint { x: p.base.x, t: p.base.t })
        }
    }
}

impl PreLengthSpace for TaxicabProduct {
    type Point = ProductPoint;

    fn relation(&self, p: &ProductPoint, q: &ProductPoint) -> Result<Relation, SpaceError> {
        self.check(p)?;
        self.check(q)?;
        let d = self.metric.distance(p.factor, q.factor);
        let base_rel = self.base.relation(&p.base, &q.base)?;
        if d == 0.0 {
            return Ok(base_rel);
        }
        if !base_rel.is_causal() {
            return Ok(Relation::Unrelated);
        }
        let tau_y = self.base.tau(&p.base, &q.base)?;
        Ok(if tau_y > d {
            Relation::Chronological
        } else if tau_y == d {
            Relation::CausalOnly
        } else {
            Relation::Unrelated
        })
    }

    fn tau(&self, p: &ProductPoint, q: &ProductPoint) -> Result<f64, SpaceError> {
        Ok(match self.relation(p, q)? {
            Relation::Chronological => {
                self.base.tau(&p.base, &q.base)? - self.metric.distance(p.factor, q.factor)
            }
            _ => 0.0,
        })
    }
}

/// Any space the crate can load from a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySpace {
    Instance(SpaceInstance),
    Product(TaxicabProduct),
}

impl AnySpace {
    pub fn instance(&self) -> Option<&SpaceInstance> {
        match self {
            AnySpace::Instance(s) => Some(s),
            AnySpace::Product(_) => None,
        }
    }
}

/// One row of a tabulated space configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TabulatedPointConfig {
    pub id: String,
    pub x: f64,
    pub t: f64,
}

/// Metric factor of a taxicab product configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricConfig {
    pub ids: Vec<String>,
    pub distances: Vec<Vec<f64>>,
}

/// Declarative description of a space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case", deny_unknown_fields))]
pub enum SpaceConfig {
    Minkowski,
    Taxicab,
    Model {
        k: f64,
    },
    Tabulated {
        points: Vec<TabulatedPointConfig>,
        tau: Vec<Vec<f64>>,
        #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
        causal: Option<Vec<Vec<bool>>>,
    },
    TaxicabProduct {
        metric_points: MetricConfig,
        space: Box<SpaceConfig>,
    },
}

/// Builds and validates a space from its configuration.
pub fn load_space(config: &SpaceConfig) -> Result<AnySpace, SpaceError> {
    match config {
        SpaceConfig::TaxicabProduct { metric_points, space } => {
            let metric = FiniteMetric::new(metric_points.ids.clone(), metric_points.distances.clone())?;
            match load_space(space)? {
                AnySpace::Instance(base) => Ok(AnySpace::Product(TaxicabProduct::new(metric, base))),
                AnySpace::Product(_) => Err(SpaceError::Config("nested taxicab products are not supported".into())),
            }
        }
        other => load_instance(other).map(AnySpace::Instance),
    }
}

/// Like [`load_space`] but rejects products.
pub fn load_instance(config: &SpaceConfig) -> Result<SpaceInstance, SpaceError> {
    match config {
        SpaceConfig::Minkowski => Ok(SpaceInstance::Minkowski),
        SpaceConfig::Taxicab => Ok(SpaceInstance::Taxicab),
        SpaceConfig::Model { k } => {
            if *k == 0.0 {
                return Err(SpaceError::Config("model curvature must be nonzero; use minkowski".into()));
            }
            SpaceInstance::model(*k)
        }
        SpaceConfig::Tabulated { points, tau, causal } => {
            let ids = points.iter().map(|p| p.id.clone()).collect();
            let coords = points.iter().map(|p| EventPoint::new(p.x, p.t)).collect();
            Ok(SpaceInstance::Tabulated(TabulatedSpace::new(ids, coords, tau.clone(), causal.clone())?))
        }
        SpaceConfig::TaxicabProduct { .. } => Err(SpaceError::Config(
            "a taxicab product supports relation and τ queries only".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(x: f64, t: f64) -> EventPoint {
        EventPoint::new(x, t)
    }

    #[test]
    fn relation_examples() {
        let m = SpaceInstance::Minkowski;
        assert_eq!(m.relation(&e(0.0, 0.0), &e(0.0, 6.0)).unwrap(), Relation::Chronological);
        assert_eq!(m.relation(&e(0.0, 0.0), &e(3.0, 2.0)).unwrap(), Relation::Unrelated);
        let t = SpaceInstance::Taxicab;
        assert_eq!(t.relation(&e(0.0, 0.0), &e(2.0, 2.0)).unwrap(), Relation::CausalOnly);
        assert_eq!(t.tau(&e(0.0, 0.0), &e(2.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn tau_examples() {
        let t = SpaceInstance::Taxicab;
        assert_eq!(t.tau(&e(0.0, 0.0), &e(0.25, 6.5)).unwrap(), 6.25);
        assert_eq!(t.tau(&e(0.0, 0.0), &e(-1.25, 4.0)).unwrap(), 2.75);
        assert_eq!(t.tau(&e(0.0, 0.0), &e(-2.0, 3.0)).unwrap(), 1.0);
        let m = SpaceInstance::Minkowski;
        let v = m.tau(&e(0.0, 0.0), &e(2.0 * core::f64::consts::SQRT_2, 3.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn maximizer_examples() {
        let t = SpaceInstance::Taxicab;
        let c = t.maximizer(&e(0.0, 0.0), &e(-2.0, 3.0), MaximizerVariant::Canonical).unwrap();
        assert_eq!(c.vertices().len(), 2);
        assert_eq!(t.tau_length(&c, 0).unwrap().value, 1.0);

        let c = t.maximizer(&e(0.0, 0.0), &e(3.0, 8.0), MaximizerVariant::Staircase).unwrap();
        assert!(c.vertices().len() > 2);
        assert!(c.vertices().windows(2).all(|w| w[1].x >= w[0].x));
        let len = t.tau_length(&c, 6).unwrap();
        assert!(len.estimates.iter().all(|v| (v - 5.0).abs() < 1e-12));

        // A detour that moves back in x loses τ-length.
        let detour = PolylineCurve::new(&t, vec![e(0.0, 0.0), e(1.0, 1.0), e(1.0, 3.0), e(0.0, 4.0)]).unwrap();
        assert_eq!(t.tau_length(&detour, 0).unwrap().value, 2.0);

        let m = SpaceInstance::Minkowski;
        assert!(matches!(
            m.maximizer(&e(0.0, 0.0), &e(3.0, 2.0), MaximizerVariant::Canonical),
            Err(SpaceError::NoCurve)
        ));
    }

    #[test]
    fn tau_length_examples() {
        let m = SpaceInstance::Minkowski;
        let c = PolylineCurve::new(&m, vec![e(0.0, 0.0), e(1.0, 2.0), e(0.0, 4.0)]).unwrap();
        let len = m.tau_length(&c, 4).unwrap();
        assert!((len.value - 2.0 * libm::sqrt(3.0)).abs() < 1e-12);
        let t = SpaceInstance::Taxicab;
        let c = PolylineCurve::new(&t, vec![e(-2.0, 3.0), e(1.0, 7.0)]).unwrap();
        assert!(t.tau_length(&c, 5).unwrap().estimates.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(matches!(
            PolylineCurve::new(&m, vec![e(0.0, 0.0), e(3.0, 1.0)]),
            Err(SpaceError::InvalidCurve { index: 0 })
        ));
    }

    fn three_point(tau_pr: f64) -> Result<TabulatedSpace, SpaceError> {
        TabulatedSpace::new(
            vec!["p".into(), "q".into(), "r".into()],
            vec![e(0.0, 0.0), e(0.0, 1.0), e(0.0, 2.0)],
            vec![
                vec![0.0, 1.0, tau_pr],
                vec![0.0, 0.0, 1.0],
                vec![0.0, 0.0, 0.0],
            ],
            None,
        )
    }

    #[test]
    fn tabulated_validation_names_triple() {
        assert!(three_point(2.0).is_ok());
        match three_point(1.5) {
            Err(SpaceError::ReverseTriangle { p, q, r }) => assert_eq!((p.as_str(), q.as_str(), r.as_str()), ("p", "q", "r")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tabulated_maximizer_uses_longest_chain() {
        let s = SpaceInstance::Tabulated(three_point(2.0).unwrap());
        let c = s.maximizer(&e(0.0, 0.0), &e(0.0, 2.0), MaximizerVariant::Canonical).unwrap();
        assert_eq!(c.vertices().len(), 3);
        let (pt, off) = s.point_along(&c, 0.8).unwrap();
        assert_eq!((pt, off), (e(0.0, 1.0), 1.0));
    }

    #[test]
    fn one_point_product_reduces_to_base() {
        let prod = TaxicabProduct::new(FiniteMetric::single_point(), SpaceInstance::Taxicab);
        let p = ProductPoint { factor: 0, base: e(0.0, 0.0) };
        let q = ProductPoint { factor: 0, base: e(-1.25, 4.0) };
        assert_eq!(prod.tau(&p, &q).unwrap(), 2.75);
    }

    #[test]
    fn product_subtracts_distance() {
        let metric = FiniteMetric::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        )
        .unwrap();
        let prod = TaxicabProduct::new(metric, SpaceInstance::Minkowski);
        let p = ProductPoint { factor: 0, base: e(0.0, 0.0) };
        let q = ProductPoint { factor: 1, base: e(0.0, 3.0) };
        assert_eq!(prod.tau(&p, &q).unwrap(), 2.0);
        let q = ProductPoint { factor: 1, base: e(0.0, 1.0) };
        assert_eq!(prod.relation(&p, &q).unwrap(), Relation::CausalOnly);
        let q = ProductPoint { factor: 1, base: e(0.0, 0.5) };
        assert_eq!(prod.relation(&p, &q).unwrap(), Relation::Unrelated);
    }
}
