//! Sampling-based certification of timelike curvature bounds.
//!
//! A space has timelike curvature bounded below (above) by `k` on a region
//! when every pair of points `p, q` on the sides of a timelike triangle
//! satisfies `τ(p, q) ≤ τ̄(p̄, q̄)` (`≥`), where `p̄, q̄` are the corresponding
//! points of the comparison triangle in the model space of curvature `k`.
//! The defect `Δ = τ̄ − τ` is therefore negative on a violation of a lower
//! bound and positive on a violation of an upper bound.
//!
//! Every triangle draws from its own ChaCha stream, so results do not depend
//! on evaluation order or on the number of workers.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angles::{
    adjacent_angle_sum, normalized_angle, theta, toponogov_defect, AngleError, AngleSchedule,
    GeodesicTriangle, SidePointRef, Vertex,
};
use crate::models::{ModelError, ModelParams, Side, SideOffset, SizeVerdict};
use crate::spaces::{EventPoint, MaximizerVariant, PreLengthSpace, SpaceError, SpaceInstance};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertifyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no timelike triangle found in the region after {attempts} draws")]
    EmptySample { attempts: usize },
    #[error(transparent)]
    Angle(#[from] AngleError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Coordinate box `[x0, x1] × [t0, t1]` of the instance chart.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Region {
    pub x0: f64,
    pub x1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Region {
    pub fn new(x0: f64, x1: f64, t0: f64, t1: f64) -> Result<Self, CertifyError> {
        let finite = [x0, x1, t0, t1].iter().all(|v| v.is_finite());
        if !finite || x0 > x1 || t0 > t1 {
            return Err(CertifyError::Config(alloc::format!(
                "region [{x0}, {x1}] × [{t0}, {t1}] is empty or not finite"
            )));
        }
        Ok(Region { x0, x1, t0, t1 })
    }

    pub fn contains(&self, p: &EventPoint) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.t >= self.t0 && p.t <= self.t1
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> EventPoint {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        EventPoint::new(self.x0 + u * (self.x1 - self.x0), self.t0 + v * (self.t1 - self.t0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Direction {
    /// Curvature bounded below: violations have `Δ < −tol`.
    Below,
    /// Curvature bounded above: violations have `Δ > tol`.
    Above,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Below, Direction::Above];

    pub fn violates(self, defect: f64, tol: f64) -> bool {
        match self {
            Direction::Below => defect < -tol,
            Direction::Above => defect > tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PairMode {
    /// Cevian pairs plus the same number of pairs on arbitrary sides.
    #[default]
    FullPairs,
    /// Pairs of a vertex and a point on the opposite side.
    CevianOnly,
}

/// A triangle evaluated in addition to the random ones, with explicit
/// pairs to probe.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InjectedTriangle {
    pub vertices: [EventPoint; 3],
    pub probes: Vec<(SideOffset, SideOffset)>,
}

impl InjectedTriangle {
    /// The taxicab triangle `(0,0), (−2ε,3ε), (ε,7ε)` with sides `(ε, ε, 6ε)`,
    /// probing `x` against the points of `β` at offsets `7ε/8` and `ε/4`.
    pub fn taxicab_counterexample(eps: f64) -> Self {
        let x = SideOffset::new(Side::Xy, 0.0);
        InjectedTriangle {
            vertices: [
                EventPoint::new(0.0, 0.0),
                EventPoint::new(-2.0 * eps, 3.0 * eps),
                EventPoint::new(eps, 7.0 * eps),
            ],
            probes: vec![
                (x, SideOffset::new(Side::Yz, 0.875 * eps)),
                (x, SideOffset::new(Side::Yz, 0.25 * eps)),
            ],
        }
    }

    fn dilated(&self, lambda: f64, space: &SpaceInstance) -> Result<Self, SpaceError> {
        let c = self.vertices[0];
        let mut vertices = self.vertices;
        for v in vertices.iter_mut() {
            *v = space.dilate(v, &c, lambda)?;
        }
        let scale = |p: SideOffset| SideOffset::new(p.side, p.offset * lambda);
        Ok(InjectedTriangle {
            vertices,
            probes: self.probes.iter().map(|&(p, q)| (scale(p), scale(q))).collect(),
        })
    }
}

/// Parameters of a certification run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleConfig {
    pub seed: u64,
    /// Number of random triangles.
    pub triangles: usize,
    /// Random pairs per triangle and pair family.
    pub pairs: usize,
    pub mode: PairMode,
    pub tolerance: f64,
    pub variant: MaximizerVariant,
    #[cfg_attr(feature = "serde", serde(default))]
    pub injected: Vec<InjectedTriangle>,
    /// Cap on the witness list of a verdict.
    pub max_witnesses: usize,
    /// Draws per triangle before sampling gives up.
    pub max_rejections: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            triangles: 100,
            pairs: 10,
            mode: PairMode::FullPairs,
            tolerance: 1e-7,
            variant: MaximizerVariant::Canonical,
            injected: Vec::new(),
            max_witnesses: 64,
            max_rejections: 10_000,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<(), CertifyError> {
        if self.triangles == 0 && self.injected.is_empty() {
            return Err(CertifyError::Config("triangle count must be at least 1".into()));
        }
        if self.pairs == 0 {
            return Err(CertifyError::Config("pair count must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CertifyError::Config("tolerance must be positive".into()));
        }
        if self.max_rejections == 0 {
            return Err(CertifyError::Config("rejection cap must be positive".into()));
        }
        Ok(())
    }

    /// Total number of triangles, injected ones first.
    pub fn total_triangles(&self) -> usize {
        self.injected.len() + self.triangles
    }
}

/// A sampled or injected triangle together with the pairs probed on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTriangle {
    pub id: usize,
    pub triangle: GeodesicTriangle,
    pub probes: Vec<(SideOffset, SideOffset)>,
    pub injected: bool,
    pub degenerate: bool,
    /// Rejected draws before acceptance.
    pub rejections: usize,
}

fn stream(seed: u64, id: usize, family: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * id as u64 + family);
    rng
}

fn size_ok(k: &ModelParams, tri: &GeodesicTriangle) -> Result<Option<bool>, ModelError> {
    let [a, b, c] = tri.lengths();
    Ok(match k.size_bounds_ok(a, b, c)? {
        SizeVerdict::Ok { degenerate } => Some(degenerate),
        SizeVerdict::Fail(_) => None,
    })
}

/// Draws triangle `id` (after the injected ones) from its own stream.
fn draw_triangle(
    space: &SpaceInstance,
    region: &Region,
    k: &ModelParams,
    cfg: &SampleConfig,
    id: usize,
) -> Result<SampledTriangle, CertifyError> {
    let mut rng = stream(cfg.seed, id, 0);
    let table: Option<Vec<EventPoint>> = match space {
        SpaceInstance::Tabulated(tab) => Some(tab.points().iter().copied().filter(|p| region.contains(p)).collect()),
        _ => None,
    };
    for attempt in 0..cfg.max_rejections {
        let mut pts = match &table {
            Some(nodes) if nodes.len() >= 3 => {
                let mut pick = || nodes[rng.random_range(0..nodes.len())];
                [pick(), pick(), pick()]
            }
            Some(_) => break,
            None => [region.draw(&mut rng), region.draw(&mut rng), region.draw(&mut rng)],
        };
        pts.sort_by(|p, q| p.t.total_cmp(&q.t));
        let tri = match GeodesicTriangle::new(space, pts[0], pts[1], pts[2], cfg.variant) {
            Ok(t) => t,
            Err(_) => continue,
        };
        if let Some(degenerate) = size_ok(k, &tri)? {
            return Ok(SampledTriangle {
                id,
                triangle: tri,
                probes: Vec::new(),
                injected: false,
                degenerate,
                rejections: attempt,
            });
        }
    }
    Err(CertifyError::EmptySample {
        attempts: cfg.max_rejections,
    })
}

fn build_injected(
    space: &SpaceInstance,
    k: &ModelParams,
    cfg: &SampleConfig,
    id: usize,
    inj: &InjectedTriangle,
) -> Result<Option<SampledTriangle>, CertifyError> {
    let [x, y, z] = inj.vertices;
    let tri = GeodesicTriangle::new(space, x, y, z, cfg.variant)?;
    Ok(size_ok(k, &tri)?.map(|degenerate| SampledTriangle {
        id,
        triangle: tri,
        probes: inj.probes.clone(),
        injected: true,
        degenerate,
        rejections: 0,
    }))
}

/// Triangle number `id` of a run: the injected triangles come first, then
/// random ones. Injected triangles failing the size bounds for `k` yield
/// `None`.
pub fn sample_triangle(
    space: &SpaceInstance,
    region: &Region,
    k: &ModelParams,
    cfg: &SampleConfig,
    id: usize,
) -> Result<Option<SampledTriangle>, CertifyError> {
    match cfg.injected.get(id) {
        Some(inj) => build_injected(space, k, cfg, id, inj),
        None => draw_triangle(space, region, k, cfg, id).map(Some),
    }
}

/// All triangles of a run, in id order.
pub fn sample_triangles(
    space: &SpaceInstance,
    region: &Region,
    k: &ModelParams,
    cfg: &SampleConfig,
) -> Result<Vec<SampledTriangle>, CertifyError> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.total_triangles());
    for id in 0..cfg.total_triangles() {
        if let Some(t) = sample_triangle(space, region, k, cfg, id)? {
            out.push(t);
        }
    }
    Ok(out)
}

/// One evaluated pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonDatum {
    pub triangle_id: usize,
    pub pair_index: usize,
    pub p: SidePointRef,
    pub q: SidePointRef,
    pub tau: f64,
    pub tau_bar: f64,
    /// `τ̄ − τ`.
    pub defect: f64,
    /// Whether one of the two points is a vertex and the other lies on the
    /// opposite side.
    pub cevian: bool,
}

impl ComparisonDatum {
    /// Snapping of the two points, added to the tolerance.
    pub fn snap(&self) -> f64 {
        self.p.snap + self.q.snap
    }
}

/// Evaluates `τ(p, q)` and `τ̄(p̄, q̄)` for points given by side offsets.
pub fn evaluate_pair(
    space: &SpaceInstance,
    k: &ModelParams,
    tri: &GeodesicTriangle,
    p: SideOffset,
    q: SideOffset,
) -> Result<(SidePointRef, SidePointRef, f64, f64), CertifyError> {
    let pr = tri.side_point(space, p.side, p.offset)?;
    let qr = tri.side_point(space, q.side, q.offset)?;
    let tau = space.tau(&pr.point, &qr.point)?;
    let tau_bar = k.corresponding_tau(
        tri.lengths(),
        SideOffset::new(p.side, pr.resolved_offset),
        SideOffset::new(q.side, qr.resolved_offset),
    )?;
    Ok((pr, qr, tau, tau_bar))
}

/// A vertex expressed as an endpoint of a side, and the opposite side.
fn vertex_and_opposite(v: usize, lengths: [f64; 3]) -> (SideOffset, Side) {
    match v {
        0 => (SideOffset::new(Side::Xy, 0.0), Side::Yz),
        1 => (SideOffset::new(Side::Xy, lengths[0]), Side::Xz),
        _ => (SideOffset::new(Side::Xz, lengths[2]), Side::Xy),
    }
}

/// The ordered list of pairs probed on a triangle, flagged cevian or not.
pub fn pair_list(st: &SampledTriangle, cfg: &SampleConfig) -> Vec<(SideOffset, SideOffset, bool)> {
    let lengths = st.triangle.lengths();
    let mut pairs: Vec<(SideOffset, SideOffset, bool)> = st
        .probes
        .iter()
        .map(|&(p, q)| {
            let cevian = p.side != q.side && (is_vertex(p, lengths) || is_vertex(q, lengths));
            (p, q, cevian)
        })
        .collect();
    let mut rng = stream(cfg.seed, st.id, 1);
    for _ in 0..cfg.pairs {
        let v = rng.random_range(0..3usize);
        let (vp, side) = vertex_and_opposite(v, lengths);
        let u: f64 = rng.random();
        pairs.push((vp, SideOffset::new(side, u * lengths[side.index()]), true));
    }
    if cfg.mode == PairMode::FullPairs {
        for _ in 0..cfg.pairs {
            let sp = Side::ALL[rng.random_range(0..3usize)];
            let sq = Side::ALL[rng.random_range(0..3usize)];
            let u: f64 = rng.random();
            let w: f64 = rng.random();
            pairs.push((
                SideOffset::new(sp, u * lengths[sp.index()]),
                SideOffset::new(sq, w * lengths[sq.index()]),
                false,
            ));
        }
    }
    pairs
}

fn is_vertex(p: SideOffset, lengths: [f64; 3]) -> bool {
    p.offset == 0.0 || p.offset == lengths[p.side.index()]
}

/// Defects of one triangle, in pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleOutcome {
    pub triangle_id: usize,
    pub vertices: [EventPoint; 3],
    pub lengths: [f64; 3],
    pub degenerate: bool,
    pub data: Vec<ComparisonDatum>,
    /// Pairs whose evaluation failed (e.g. leaving a model chart).
    pub skipped: usize,
}

/// Evaluates every pair of a triangle in both orientations. Pairs with
/// `τ = τ̄ = 0` are not recorded.
pub fn evaluate_triangle(
    space: &SpaceInstance,
    k: &ModelParams,
    st: &SampledTriangle,
    cfg: &SampleConfig,
) -> TriangleOutcome {
    let mut data = Vec::new();
    let mut skipped = 0;
    let mut index = 0;
    for (p, q, cevian) in pair_list(st, cfg) {
        for (p, q) in [(p, q), (q, p)] {
            let pair_index = index;
            index += 1;
            match evaluate_pair(space, k, &st.triangle, p, q) {
                Ok((pr, qr, tau, tau_bar)) => {
                    if tau > 0.0 || tau_bar > 0.0 {
                        data.push(ComparisonDatum {
                            triangle_id: st.id,
                            pair_index,
                            p: pr,
                            q: qr,
                            tau,
                            tau_bar,
                            defect: tau_bar - tau,
                            cevian,
                        });
                    }
                }
                Err(_) => skipped += 1,
            }
        }
    }
    TriangleOutcome {
        triangle_id: st.id,
        vertices: st.triangle.vertices(),
        lengths: st.triangle.lengths(),
        degenerate: st.degenerate,
        data,
        skipped,
    }
}

/// Everything needed to reproduce one violating pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub triangle_id: usize,
    pub pair_index: usize,
    pub vertices: [EventPoint; 3],
    pub lengths: [f64; 3],
    pub variant: MaximizerVariant,
    pub p: SidePointRef,
    pub q: SidePointRef,
    pub tau: f64,
    pub tau_bar: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum VerdictStatus {
    Consistent,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerdictCounts {
    pub triangles: usize,
    pub degenerate: usize,
    pub rejections: usize,
    /// Injected triangles or pairs dropped for size bounds or failed evaluation.
    pub skipped: usize,
    pub data: usize,
    pub violations: usize,
}

/// Outcome of a certification run in one direction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub direction: Direction,
    pub k: f64,
    pub status: VerdictStatus,
    /// Smallest and largest defect seen.
    pub min_defect: f64,
    pub max_defect: f64,
    /// The most extreme violation.
    pub worst: Option<Witness>,
    /// Violations sorted by triangle id then pair index, capped.
    pub witnesses: Vec<Witness>,
    pub counts: VerdictCounts,
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        self.status == VerdictStatus::Violated
    }

    /// `max |Δ|` over all recorded pairs.
    pub fn max_abs_defect(&self) -> f64 {
        if self.counts.data == 0 {
            0.0
        } else {
            self.min_defect.abs().max(self.max_defect.abs())
        }
    }
}

fn witness(o: &TriangleOutcome, d: &ComparisonDatum, variant: MaximizerVariant) -> Witness {
    Witness {
        triangle_id: o.triangle_id,
        pair_index: d.pair_index,
        vertices: o.vertices,
        lengths: o.lengths,
        variant,
        p: d.p,
        q: d.q,
        tau: d.tau,
        tau_bar: d.tau_bar,
        defect: d.defect,
    }
}

/// Merges per-triangle outcomes into a verdict. `filter` selects the data
/// taken into account. The result does not depend on the input order.
pub fn merge_outcomes<F: Fn(&ComparisonDatum) -> bool>(
    direction: Direction,
    k: &ModelParams,
    cfg: &SampleConfig,
    outcomes: &[TriangleOutcome],
    extra: VerdictCounts,
    filter: F,
) -> Verdict {
    let mut sorted: Vec<&TriangleOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| o.triangle_id);
    let mut counts = extra;
    let (mut min_defect, mut max_defect) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut witnesses = Vec::new();
    let mut worst: Option<Witness> = None;
    for o in sorted {
        counts.triangles += 1;
        counts.degenerate += o.degenerate as usize;
        counts.skipped += o.skipped;
        for d in o.data.iter().filter(|d| filter(d)) {
            counts.data += 1;
            min_defect = min_defect.min(d.defect);
            max_defect = max_defect.max(d.defect);
            if direction.violates(d.defect, cfg.tolerance + d.snap()) {
                counts.violations += 1;
                let w = witness(o, d, cfg.variant);
                let more_extreme = worst.is_none_or(|cur| match direction {
                    Direction::Below => d.defect < cur.defect,
                    Direction::Above => d.defect > cur.defect,
                });
                if more_extreme {
                    worst = Some(w);
                }
                if witnesses.len() < cfg.max_witnesses {
                    witnesses.push(w);
                }
            }
        }
    }
    if counts.data == 0 {
        min_defect = 0.0;
        max_defect = 0.0;
    }
    Verdict {
        direction,
        k: k.k(),
        status: if counts.violations > 0 {
            VerdictStatus::Violated
        } else {
            VerdictStatus::Consistent
        },
        min_defect,
        max_defect,
        worst,
        witnesses,
        counts,
    }
}

/// Sampling statistics that precede per-triangle evaluation.
pub fn sampling_counts(samples: &[SampledTriangle], cfg: &SampleConfig) -> VerdictCounts {
    VerdictCounts {
        rejections: samples.iter().map(|s| s.rejections).sum(),
        skipped: cfg.total_triangles() - samples.len(),
        ..VerdictCounts::default()
    }
}

/// Certifies (or refutes) a curvature bound in one direction.
pub fn certify_bound(
    space: &SpaceInstance,
    region: &Region,
    k: &ModelParams,
    direction: Direction,
    cfg: &SampleConfig,
) -> Result<Verdict, CertifyError> {
    let samples = sample_triangles(space, region, k, cfg)?;
    let outcomes: Vec<TriangleOutcome> = samples.iter().map(|s| evaluate_triangle(space, k, s, cfg)).collect();
    Ok(merge_outcomes(direction, k, cfg, &outcomes, sampling_counts(&samples, cfg), |_| true))
}

/// Result of re-evaluating a witness from its recorded data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replay {
    pub tau: f64,
    pub tau_bar: f64,
    pub defect: f64,
}

impl Replay {
    /// Largest deviation from the recorded witness values.
    pub fn deviation(&self, w: &Witness) -> f64 {
        (self.tau - w.tau)
            .abs()
            .max((self.tau_bar - w.tau_bar).abs())
            .max((self.defect - w.defect).abs())
    }
}

/// Rebuilds the witness triangle and re-evaluates the pair.
pub fn replay_witness(space: &SpaceInstance, k: &ModelParams, w: &Witness) -> Result<Replay, CertifyError> {
    let [x, y, z] = w.vertices;
    let tri = GeodesicTriangle::new(space, x, y, z, w.variant)?;
    let (_, _, tau, tau_bar) = evaluate_pair(
        space,
        k,
        &tri,
        SideOffset::new(w.p.side, w.p.offset),
        SideOffset::new(w.q.side, w.q.offset),
    )?;
    Ok(Replay {
        tau,
        tau_bar,
        defect: tau_bar - tau,
    })
}

/// Verdicts in both directions at one curvature.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KScanRow {
    pub k: f64,
    pub below: Verdict,
    pub above: Verdict,
    /// Triangles shrunk to meet the size bounds of this `k`.
    pub rescaled: usize,
}

/// Fits a shared sample to the size bounds of `k`: triangles whose longest
/// side reaches the conjugate bound are dilated about `x` in homogeneous
/// spaces and dropped otherwise.
pub fn fit_samples(
    space: &SpaceInstance,
    k: &ModelParams,
    samples: &[SampledTriangle],
    cfg: &SampleConfig,
) -> Result<(Vec<SampledTriangle>, usize), CertifyError> {
    let mut out = Vec::with_capacity(samples.len());
    let mut rescaled = 0;
    for st in samples {
        if let Some(degenerate) = size_ok(k, &st.triangle)? {
            out.push(SampledTriangle { degenerate, ..st.clone() });
            continue;
        }
        let (Some(limit), true) = (k.conjugate_limit(), space.is_homogeneous()) else {
            continue;
        };
        let c = st.triangle.length(Side::Xz);
        let lambda = 0.9 * limit / c;
        let inj = InjectedTriangle {
            vertices: st.triangle.vertices(),
            probes: st.probes.clone(),
        }
        .dilated(lambda, space)?;
        let Some(mut fitted) = build_injected(space, k, cfg, st.id, &inj)? else {
            continue;
        };
        fitted.injected = st.injected;
        fitted.rejections = st.rejections;
        rescaled += 1;
        out.push(fitted);
    }
    Ok((out, rescaled))
}

/// Runs both directions over a grid of curvatures on one shared sample.
pub fn k_scan(
    space: &SpaceInstance,
    region: &Region,
    ks: &[f64],
    cfg: &SampleConfig,
) -> Result<Vec<KScanRow>, CertifyError> {
    let flat = ModelParams::flat();
    let samples = sample_triangles(space, region, &flat, cfg)?;
    let mut rows = Vec::with_capacity(ks.len());
    for &kv in ks {
        let k = ModelParams::new(kv)?;
        let (fitted, rescaled) = fit_samples(space, &k, &samples, cfg)?;
        let outcomes: Vec<TriangleOutcome> = fitted.iter().map(|s| evaluate_triangle(space, &k, s, cfg)).collect();
        let extra = VerdictCounts {
            skipped: cfg.total_triangles() - fitted.len(),
            ..sampling_counts(&fitted, cfg)
        };
        rows.push(KScanRow {
            k: kv,
            below: merge_outcomes(Direction::Below, &k, cfg, &outcomes, extra, |_| true),
            above: merge_outcomes(Direction::Above, &k, cfg, &outcomes, extra, |_| true),
            rescaled,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DetectorVerdict {
    Consistent,
    Violated,
    Inconclusive,
}

/// Result of one of the four lower-bound criteria.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectorReport {
    pub name: String,
    pub verdict: DetectorVerdict,
    /// Most negative margin seen (negative on violation).
    pub worst_margin: f64,
    pub checks: usize,
    pub violations: usize,
    pub inconclusive: usize,
}

impl DetectorReport {
    fn new(name: &str) -> Self {
        DetectorReport {
            name: name.into(),
            verdict: DetectorVerdict::Consistent,
            worst_margin: f64::INFINITY,
            checks: 0,
            violations: 0,
            inconclusive: 0,
        }
    }

    fn record(&mut self, margin: f64, tol: f64) {
        self.checks += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if margin < -tol {
            self.violations += 1;
        }
    }

    fn finish(mut self) -> Self {
        self.verdict = if self.violations > 0 {
            DetectorVerdict::Violated
        } else if self.inconclusive > 0 {
            DetectorVerdict::Inconclusive
        } else {
            DetectorVerdict::Consistent
        };
        if self.checks == 0 {
            self.worst_margin = 0.0;
        }
        self
    }
}

/// The four lower-bound detectors and their pairwise agreement.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossCheck {
    pub k: f64,
    /// Full-pair defects, cevian defects, θ monotonicity, Toponogov and
    /// adjacent angle sums.
    pub detectors: [DetectorReport; 4],
    pub agreement: [[bool; 4]; 4],
}

impl CrossCheck {
    pub fn all_agree(&self) -> bool {
        self.agreement.iter().all(|row| row.iter().all(|&b| b))
    }
}

/// Options of the angle-based detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheckOptions {
    /// Number of leading triangles examined by the angle detectors.
    pub angle_triangles: usize,
    /// Schedule for normalized angles; `None` uses the per-triangle default.
    pub schedule: Option<AngleSchedule>,
    /// Tolerance of the angle detectors, relative to `max(1, |value|)`.
    pub angle_tol: f64,
}

impl Default for CrossCheckOptions {
    fn default() -> Self {
        CrossCheckOptions {
            angle_triangles: 16,
            schedule: None,
            angle_tol: 1e-6,
        }
    }
}

/// Nested scale factors of the θ monotonicity detector.
const NESTED_SCALES: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

fn monotonicity_detector(
    space: &SpaceInstance,
    k: &ModelParams,
    tri: &GeodesicTriangle,
    tol: f64,
    report: &mut DetectorReport,
) {
    let h = tri.lengths().iter().cloned().fold(f64::INFINITY, f64::min) / 4.0;
    for vertex in Vertex::ALL {
        let mut grid: Vec<(f64, f64, f64)> = Vec::new();
        for &fs in &NESTED_SCALES {
            for &ft in &NESTED_SCALES {
                if let Ok(smp) = theta(space, tri, vertex, h * fs, h * ft, k) {
                    grid.push((smp.s, smp.t, smp.theta));
                }
            }
        }
        for &(s, t, th) in &grid {
            for &(s2, t2, th2) in &grid {
                let nested = s2 <= s && t2 <= t && (s2, t2) != (s, t);
                if nested {
                    // Lower bounds make θ non-increasing as the scales shrink.
                    report.record((th - th2) / th.abs().max(1.0), tol);
                }
            }
        }
    }
}

fn toponogov_detector(
    space: &SpaceInstance,
    k: &ModelParams,
    tri: &GeodesicTriangle,
    opts: &CrossCheckOptions,
    report: &mut DetectorReport,
) {
    let sched = opts.schedule.unwrap_or_else(|| AngleSchedule::default_for(tri));
    for vertex in Vertex::ALL {
        match toponogov_defect(space, tri, vertex, k, &sched) {
            Ok(d) => match d.defect {
                Some(v) => report.record(v / d.angle.limit.abs().max(1.0), opts.angle_tol),
                None => report.inconclusive += 1,
            },
            Err(_) => report.inconclusive += 1,
        }
    }
    let sum = adjacent_angle_sum(
        space,
        tri,
        0.5 * tri.length(Side::Yz),
        k,
        opts.schedule.as_ref(),
        MaximizerVariant::Canonical,
    );
    match sum {
        Ok(s) => match s.sum {
            Some(v) => {
                let scale = s.angle_xmz.limit.abs().max(1.0);
                report.record(v / scale, opts.angle_tol);
            }
            None => report.inconclusive += 1,
        },
        Err(_) => report.inconclusive += 1,
    }
}

/// Runs the four equivalent criteria for a lower curvature bound `k` on one
/// sample and reports each verdict. Disagreements are reported as they are.
pub fn criteria_cross_check(
    space: &SpaceInstance,
    region: &Region,
    k: &ModelParams,
    cfg: &SampleConfig,
    opts: &CrossCheckOptions,
) -> Result<CrossCheck, CertifyError> {
    let full_cfg = SampleConfig {
        mode: PairMode::FullPairs,
        ..cfg.clone()
    };
    let samples = sample_triangles(space, region, k, &full_cfg)?;
    let outcomes: Vec<TriangleOutcome> = samples
        .iter()
        .map(|s| evaluate_triangle(space, k, s, &full_cfg))
        .collect();
    let extra = sampling_counts(&samples, &full_cfg);
    let to_report = |name: &str, v: &Verdict| DetectorReport {
        name: name.into(),
        verdict: if v.is_violated() {
            DetectorVerdict::Violated
        } else {
            DetectorVerdict::Consistent
        },
        worst_margin: v.min_defect,
        checks: v.counts.data,
        violations: v.counts.violations,
        inconclusive: 0,
    };
    let a = merge_outcomes(Direction::Below, k, &full_cfg, &outcomes, extra, |_| true);
    let b = merge_outcomes(Direction::Below, k, &full_cfg, &outcomes, extra, |d| d.cevian);
    let mut c = DetectorReport::new("theta_monotonicity");
    let mut d = DetectorReport::new("toponogov_adjacent_sum");
    for st in samples.iter().take(opts.angle_triangles) {
        monotonicity_detector(space, k, &st.triangle, opts.angle_tol, &mut c);
        toponogov_detector(space, k, &st.triangle, opts, &mut d);
    }
    let detectors = [
        to_report("full_pairs", &a),
        to_report("cevian", &b),
        c.finish(),
        d.finish(),
    ];
    let agreement = core::array::from_fn(|i| core::array::from_fn(|j| detectors[i].verdict == detectors[j].verdict));
    Ok(CrossCheck {
        k: k.k(),
        detectors,
        agreement,
    })
}

/// Normalized angle at each vertex, for reporting.
pub fn vertex_angles(
    space: &SpaceInstance,
    tri: &GeodesicTriangle,
    k: &ModelParams,
    sched: &AngleSchedule,
) -> Result<[crate::angles::AngleEstimate; 3], CertifyError> {
    Ok([
        normalized_angle(space, tri, Vertex::X, k, sched)?,
        normalized_angle(space, tri, Vertex::Y, k, sched)?,
        normalized_angle(space, tri, Vertex::Z, k, sched)?,
    ])
}
