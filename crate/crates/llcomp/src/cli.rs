//! Command-line front end.
//!
//! Exit codes: `0` consistent / success, `1` a curvature bound is violated
//! (or a replay does not reproduce), `2` invalid input.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use llcomp_core::angles::{
    adjacent_angle_sum, first_variation, normalized_angle, theta, AngleSchedule, GeodesicTriangle,
    VariationSchedule, Vertex,
};
use llcomp_core::certify::{
    criteria_cross_check, replay_witness, CrossCheckOptions, DetectorVerdict, Direction, InjectedTriangle,
    PairMode, Region, SampleConfig,
};
use llcomp_core::models::{ModelParams, SizeVerdict};
use llcomp_core::spaces::{AnySpace, EventPoint, MaximizerVariant, PreLengthSpace, ProductPoint, SpaceInstance};

use crate::config::{build_instance, build_space, resolve_space};
use crate::error::CliError;
use crate::parallel;
use crate::render::render_report;
use crate::report::{
    self, CrossCheckDocument, ReportDocument, ScanDocument, Timing, ECHOED_TRIANGLES, TOOL, VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "llcomp", version, about = "Timelike curvature comparison for Lorentzian pre-length spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify (or refute) a curvature bound by sampling triangles.
    Certify(CertifyArgs),
    /// Certify both directions over a grid of curvatures.
    Scan(ScanArgs),
    /// Run the four equivalent lower-bound criteria and compare verdicts.
    Crosscheck(CrossCheckArgs),
    /// Re-evaluate every witness of a report.
    Replay(ReplayArgs),
    /// Draw a report as SVG.
    Render(RenderArgs),
    /// Size bounds, comparison angles and realization of a model triangle.
    Triangle(TriangleArgs),
    /// Normalized angle at a vertex of a triangle.
    Angle(AngleArgs),
    /// Angle comparison function θ(s, t) at a vertex.
    Theta(ThetaArgs),
    /// First variation of τ along the side x → y.
    Firstvar(FirstVarArgs),
    /// Adjacent angle sum at a point of the side y → z.
    Adjacent(AdjacentArgs),
    /// Causal relation and time separation of two points.
    Tau(TauArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Below,
    Above,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Below => Direction::Below,
            DirectionArg::Above => Direction::Above,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Full,
    Cevian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Canonical,
    Staircase,
}

impl From<VariantArg> for MaximizerVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Canonical => MaximizerVariant::Canonical,
            VariantArg::Staircase => MaximizerVariant::Staircase,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    /// `minkowski`, `taxicab`, `ds:<k>`, `ads:<k>` or a JSON configuration file.
    #[arg(long, default_value = "minkowski")]
    pub space: String,
    /// Maximizer used for triangle sides.
    #[arg(long, value_enum, default_value = "canonical")]
    pub variant: VariantArg,
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random triangles.
    #[arg(long, default_value_t = 100)]
    pub triangles: usize,
    /// Random pairs per triangle and pair family.
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    #[arg(long, value_enum, default_value = "full")]
    pub mode: ModeArg,
    /// Violation tolerance on the defect.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Sampling box `x0,x1,t0,t1`.
    #[arg(long, default_value = "-1,1,0,2", allow_hyphen_values = true)]
    pub region: String,
    /// Evaluate the taxicab triangle (0,0), (−2ε,3ε), (ε,7ε) first.
    #[arg(long)]
    pub inject_taxicab_triangle: bool,
    /// Scale ε of the injected triangle.
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 64)]
    pub max_witnesses: usize,
}

impl SamplingArgs {
    fn region(&self) -> Result<Region, CliError> {
        let v = parse_floats(&self.region, 4, "region")?;
        Ok(Region::new(v[0], v[1], v[2], v[3])?)
    }

    fn config(&self, variant: VariantArg) -> Result<SampleConfig, CliError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(CliError::Input("--epsilon must be positive".into()));
        }
        let cfg = SampleConfig {
            seed: self.seed,
            triangles: self.triangles,
            pairs: self.pairs,
            mode: match self.mode {
                ModeArg::Full => PairMode::FullPairs,
                ModeArg::Cevian => PairMode::CevianOnly,
            },
            tolerance: self.tol,
            variant: variant.into(),
            injected: if self.inject_taxicab_triangle {
                vec![InjectedTriangle::taxicab_counterexample(self.epsilon)]
            } else {
                Vec::new()
            },
            max_witnesses: self.max_witnesses,
            ..SampleConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// JSON report path (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit wall-clock timing from the report.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Comparison curvature.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, value_enum, default_value = "below")]
    pub direction: DirectionArg,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// CSV table of witnesses.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// SVG figure of the report.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Comma-separated curvature grid.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub ks: String,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CrossCheckArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k: f64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Triangles examined by the angle-based detectors.
    #[arg(long, default_value_t = 16)]
    pub angle_triangles: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub angle_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Report produced by `certify`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Largest accepted deviation from the recorded values.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub svg: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TriangleArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Side lengths `a,b,c` of `x→y`, `y→z`, `x→z`.
    #[arg(long, allow_hyphen_values = true)]
    pub sides: String,
    /// Also print the vertices of the comparison triangle.
    #[arg(long)]
    pub realize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TriangleInput {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Comparison curvature.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k: f64,
    /// Vertices `x,t` of `x ≪ y ≪ z`.
    #[arg(long, num_args = 3, required = true, allow_hyphen_values = true)]
    pub vertices: Vec<String>,
}

impl TriangleInput {
    fn build(&self) -> Result<(SpaceInstance, GeodesicTriangle, ModelParams), CliError> {
        let space = build_instance(&resolve_space(&self.space.space)?)?;
        let v: Vec<EventPoint> = self.vertices.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?;
        let tri = GeodesicTriangle::new(&space, v[0], v[1], v[2], self.space.variant.into())?;
        let k = ModelParams::new(self.k)?;
        Ok((space, tri, k))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScheduleArgs {
    /// Initial scale on the first side (default: shortest side / 4).
    #[arg(long)]
    pub s0: Option<f64>,
    /// Initial scale on the second side (default: shortest side / 4).
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub angle_tol: f64,
    #[arg(long, default_value_t = 40)]
    pub max_steps: usize,
}

impl ScheduleArgs {
    fn schedule(&self, tri: &GeodesicTriangle) -> AngleSchedule {
        let d = AngleSchedule::default_for(tri);
        AngleSchedule {
            s0: self.s0.unwrap_or(d.s0),
            t0: self.t0.unwrap_or(d.t0),
            rho: self.rho,
            tol: self.angle_tol,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AngleArgs {
    #[command(flatten)]
    pub triangle: TriangleInput,
    /// `x`/`apex`, `y`/`shoulder` or `z`/`sink`.
    #[arg(long, value_parser = parse_vertex)]
    pub vertex: Vertex,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ThetaArgs {
    #[command(flatten)]
    pub triangle: TriangleInput,
    #[arg(long, value_parser = parse_vertex)]
    pub vertex: Vertex,
    /// Scales on the first side; defaults to a nested grid.
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    /// Scales on the second side, paired with `--s`.
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FirstVarArgs {
    #[command(flatten)]
    pub triangle: TriangleInput,
    #[arg(long = "var-t0", default_value_t = 1e-2)]
    pub var_t0: f64,
    #[arg(long = "var-rho", default_value_t = 0.5)]
    pub var_rho: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    /// Compare against the largest angle over maximizer variants.
    #[arg(long)]
    pub max_over_variants: bool,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AdjacentArgs {
    #[command(flatten)]
    pub triangle: TriangleInput,
    /// τ-offset of the point on `y → z`.
    #[arg(long)]
    pub offset: f64,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TauArgs {
    #[arg(long, default_value = "minkowski")]
    pub space: String,
    /// `x,t`, or `id@x,t` in a taxicab product.
    #[arg(long, allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, allow_hyphen_values = true)]
    pub to: String,
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("{what} {s:?}: expected {n} comma-separated numbers")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("{what} {s:?}: expected {n} finite comma-separated numbers")));
    }
    Ok(v)
}

pub fn parse_point(s: &str) -> Result<EventPoint, CliError> {
    let v = parse_floats(s, 2, "point")?;
    Ok(EventPoint::new(v[0], v[1]))
}

fn parse_vertex(s: &str) -> Result<Vertex, String> {
    match s {
        "x" | "apex" => Ok(Vertex::X),
        "y" | "shoulder" => Ok(Vertex::Y),
        "z" | "sink" => Ok(Vertex::Z),
        _ => Err(format!("unknown vertex {s:?}; use x/apex, y/shoulder or z/sink")),
    }
}

fn print_json_line<T: Serialize>(value: &T) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string(value)?)?;
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

pub fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Certify(a) => cmd_certify(&a),
        Command::Scan(a) => cmd_scan(&a),
        Command::Crosscheck(a) => cmd_crosscheck(&a),
        Command::Replay(a) => cmd_replay(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Triangle(a) => cmd_triangle(&a),
        Command::Angle(a) => cmd_angle(&a),
        Command::Theta(a) => cmd_theta(&a),
        Command::Firstvar(a) => cmd_firstvar(&a),
        Command::Adjacent(a) => cmd_adjacent(&a),
        Command::Tau(a) => cmd_tau(&a),
    }
}

fn timing(out: &OutputArgs, start: Instant, threads: usize) -> Option<Timing> {
    (!out.no_timing).then(|| Timing {
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        threads,
    })
}

pub fn cmd_certify(a: &CertifyArgs) -> Result<i32, CliError> {
    let space_cfg = resolve_space(&a.space.space)?;
    let space = build_instance(&space_cfg)?;
    let k = ModelParams::new(a.k)?;
    let region = a.sampling.region()?;
    let config = a.sampling.config(a.space.variant)?;
    let direction: Direction = a.direction.into();
    let threads = parallel::thread_count();
    let start = Instant::now();
    let (verdict, samples) = parallel::certify_bound(&space, &region, &k, direction, &config, threads)?;
    let doc = ReportDocument {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: "certify".into(),
        space: space_cfg,
        k: a.k,
        direction,
        region,
        config,
        triangles: samples.iter().take(ECHOED_TRIANGLES).map(|s| s.triangle.vertices()).collect(),
        verdict,
        timing: None,
    };
    let doc = ReportDocument {
        timing: timing(&a.output, start, threads),
        ..doc
    };
    report::emit(&report::to_json(&doc)?, a.output.out.as_deref())?;
    if let Some(path) = &a.csv {
        report::write_witness_csv(std::fs::File::create(path)?, &doc.verdict.witnesses)?;
    }
    if let Some(path) = &a.svg {
        std::fs::write(path, render_report(&doc))?;
    }
    let v = &doc.verdict;
    eprintln!(
        "{:?} k={}: {:?}; defects in [{:e}, {:e}] over {} pairs on {} triangles; {} violations",
        direction, a.k, v.status, v.min_defect, v.max_defect, v.counts.data, v.counts.triangles, v.counts.violations
    );
    Ok(if v.is_violated() { EXIT_VIOLATED } else { EXIT_OK })
}

pub fn cmd_scan(a: &ScanArgs) -> Result<i32, CliError> {
    let space_cfg = resolve_space(&a.space.space)?;
    let space = build_instance(&space_cfg)?;
    let ks: Vec<f64> = a
        .ks
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Input(format!("invalid curvature grid {:?}", a.ks)))?;
    if ks.is_empty() || ks.iter().any(|k| !k.is_finite()) {
        return Err(CliError::Input("the curvature grid must be finite and nonempty".into()));
    }
    let region = a.sampling.region()?;
    let config = a.sampling.config(a.space.variant)?;
    let threads = parallel::thread_count();
    let start = Instant::now();
    let rows = parallel::k_scan(&space, &region, &ks, &config, threads)?;
    for r in &rows {
        eprintln!("k={}: below {:?}, above {:?}", r.k, r.below.status, r.above.status);
    }
    let violated = rows.iter().any(|r| r.below.is_violated() || r.above.is_violated());
    let doc = ScanDocument {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: "scan".into(),
        space: space_cfg,
        region,
        config,
        rows,
        timing: timing(&a.output, start, threads),
    };
    report::emit(&report::to_json(&doc)?, a.output.out.as_deref())?;
    Ok(if violated { EXIT_VIOLATED } else { EXIT_OK })
}

pub fn cmd_crosscheck(a: &CrossCheckArgs) -> Result<i32, CliError> {
    let space_cfg = resolve_space(&a.space.space)?;
    let space = build_instance(&space_cfg)?;
    let k = ModelParams::new(a.k)?;
    let region = a.sampling.region()?;
    let config = a.sampling.config(a.space.variant)?;
    let opts = CrossCheckOptions {
        angle_triangles: a.angle_triangles,
        angle_tol: a.angle_tol,
        ..CrossCheckOptions::default()
    };
    let start = Instant::now();
    let result = criteria_cross_check(&space, &region, &k, &config, &opts)?;
    for d in &result.detectors {
        eprintln!("{}: {:?} ({} checks, {} violations)", d.name, d.verdict, d.checks, d.violations);
    }
    let violated = result.detectors.iter().any(|d| d.verdict == DetectorVerdict::Violated);
    let doc = CrossCheckDocument {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: "crosscheck".into(),
        space: space_cfg,
        region,
        config,
        angle_triangles: a.angle_triangles,
        all_agree: result.all_agree(),
        result,
        timing: timing(&a.output, start, 1),
    };
    report::emit(&report::to_json(&doc)?, a.output.out.as_deref())?;
    Ok(if violated { EXIT_VIOLATED } else { EXIT_OK })
}

#[derive(Serialize)]
struct ReplayLine {
    triangle_id: usize,
    pair_index: usize,
    recorded: [f64; 3],
    replayed: [f64; 3],
    deviation: f64,
    bit_identical: bool,
}

pub fn cmd_replay(a: &ReplayArgs) -> Result<i32, CliError> {
    let doc = report::read_report(&a.input)?;
    let space = build_instance(&doc.space)?;
    let k = ModelParams::new(doc.k)?;
    let mut worst: f64 = 0.0;
    for w in &doc.verdict.witnesses {
        let r = replay_witness(&space, &k, w)?;
        let dev = r.deviation(w);
        worst = worst.max(dev);
        print_json_line(&ReplayLine {
            triangle_id: w.triangle_id,
            pair_index: w.pair_index,
            recorded: [w.tau, w.tau_bar, w.defect],
            replayed: [r.tau, r.tau_bar, r.defect],
            deviation: dev,
            bit_identical: r.tau.to_bits() == w.tau.to_bits()
                && r.tau_bar.to_bits() == w.tau_bar.to_bits()
                && r.defect.to_bits() == w.defect.to_bits(),
        })?;
    }
    eprintln!("replayed {} witnesses; largest deviation {worst:e}", doc.verdict.witnesses.len());
    Ok(if worst <= a.tol { EXIT_OK } else { EXIT_VIOLATED })
}

pub fn cmd_render(a: &RenderArgs) -> Result<i32, CliError> {
    let doc = report::read_report(&a.input)?;
    std::fs::write(&a.svg, render_report(&doc))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TriangleLine {
    k: f64,
    sides: [f64; 3],
    degenerate: bool,
    /// Signed non-normalized comparison angles at `x`, `y`, `z`.
    angles: [f64; 3],
    coshphi: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<[EventPoint; 3]>,
}

pub fn cmd_triangle(a: &TriangleArgs) -> Result<i32, CliError> {
    let s = parse_floats(&a.sides, 3, "sides")?;
    let lengths = [s[0], s[1], s[2]];
    let k = ModelParams::new(a.k)?;
    let degenerate = match k.size_bounds_ok(s[0], s[1], s[2])? {
        SizeVerdict::Ok { degenerate } => degenerate,
        SizeVerdict::Fail(d) => return Err(CliError::Input(d.to_string())),
    };
    let mut angles = [0.0; 3];
    for (i, v) in Vertex::ALL.iter().enumerate() {
        let (adj1, adj2, opp) = v.roles(lengths);
        angles[i] = k.nonnormalized_angle(adj1, adj2, opp, v.kind())?;
    }
    let coshphi = k.triangle_coshphis(s[0], s[1], s[2])?;
    let vertices = if a.realize {
        let tri = k.realize_triangle(s[0], s[1], s[2])?;
        Some(tri.vertices().map(|p| k.chart(&p)))
    } else {
        None
    };
    print_json_line(&TriangleLine {
        k: a.k,
        sides: lengths,
        degenerate,
        angles,
        coshphi,
        vertices,
    })?;
    Ok(EXIT_OK)
}

pub fn cmd_angle(a: &AngleArgs) -> Result<i32, CliError> {
    let (space, tri, k) = a.triangle.build()?;
    let est = normalized_angle(&space, &tri, a.vertex, &k, &a.schedule.schedule(&tri))?;
    print_json_line(&est)?;
    Ok(EXIT_OK)
}

pub fn cmd_theta(a: &ThetaArgs) -> Result<i32, CliError> {
    let (space, tri, k) = a.triangle.build()?;
    if a.s.len() != a.t.len() {
        return Err(CliError::Input("--s and --t must have the same number of values".into()));
    }
    let pairs: Vec<(f64, f64)> = if a.s.is_empty() {
        let d = AngleSchedule::default_for(&tri);
        (0..6).map(|j| (d.s0 * 0.5f64.powi(j), d.t0 * 0.5f64.powi(j))).collect()
    } else {
        a.s.iter().copied().zip(a.t.iter().copied()).collect()
    };
    for (s, t) in pairs {
        print_json_line(&theta(&space, &tri, a.vertex, s, t, &k)?)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_firstvar(a: &FirstVarArgs) -> Result<i32, CliError> {
    let (space, tri, k) = a.triangle.build()?;
    let sched = VariationSchedule {
        t0: a.var_t0,
        rho: a.var_rho,
        steps: a.steps,
    };
    let res = first_variation(&space, &tri, &sched, &k, &a.schedule.schedule(&tri), a.max_over_variants)?;
    print_json_line(&res)?;
    Ok(EXIT_OK)
}

pub fn cmd_adjacent(a: &AdjacentArgs) -> Result<i32, CliError> {
    let (space, tri, k) = a.triangle.build()?;
    let sched = a.schedule.schedule(&tri);
    let res = adjacent_angle_sum(&space, &tri, a.offset, &k, Some(&sched), a.triangle.space.variant.into())?;
    print_json_line(&res)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TauLine {
    relation: llcomp_core::spaces::Relation,
    tau: f64,
}

fn parse_product_point(s: &str, ids: &[String]) -> Result<ProductPoint, CliError> {
    let (id, rest) = s
        .split_once('@')
        .ok_or_else(|| CliError::Input(format!("product point {s:?}: expected id@x,t")))?;
    let factor = ids
        .iter()
        .position(|i| i == id)
        .ok_or_else(|| CliError::Input(format!("unknown metric point {id:?}")))?;
    Ok(ProductPoint {
        factor,
        base: parse_point(rest)?,
    })
}

pub fn cmd_tau(a: &TauArgs) -> Result<i32, CliError> {
    let line = match build_space(&resolve_space(&a.space)?)? {
        AnySpace::Instance(space) => {
            let (p, q) = (parse_point(&a.from)?, parse_point(&a.to)?);
            TauLine {
                relation: space.relation(&p, &q)?,
                tau: space.tau(&p, &q)?,
            }
        }
        AnySpace::Product(space) => {
            let ids = space.metric().ids();
            let (p, q) = (parse_product_point(&a.from, ids)?, parse_product_point(&a.to, ids)?);
            TauLine {
                relation: space.relation(&p, &q)?,
                tau: space.tau(&p, &q)?,
            }
        }
    };
    print_json_line(&line)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_negative_values() {
        let cli = Cli::try_parse_from([
            "llcomp", "angle", "--space", "minkowski", "--vertices", "0,0", "-2,3", "1,7", "--vertex", "shoulder",
        ])
        .unwrap();
        match cli.command {
            Command::Angle(a) => assert_eq!(a.triangle.vertices[1], "-2,3"),
            _ => unreachable!(),
        }
        let cli = Cli::try_parse_from(["llcomp", "triangle", "--k", "-1", "--sides", "1,1,4"]).unwrap();
        match cli.command {
            Command::Triangle(a) => assert_eq!(a.k, -1.0),
            _ => unreachable!(),
        }
        let cli = Cli::try_parse_from(["llcomp", "scan", "--ks", "-1,0,1", "--region", "-1,1,0,2"]).unwrap();
        match cli.command {
            Command::Scan(a) => assert_eq!(a.ks, "-1,0,1"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn bad_input_exits_with_two() {
        assert_eq!(run(["llcomp", "triangle", "--k", "0", "--sides", "3,4,6"]), EXIT_INVALID);
        assert_eq!(run(["llcomp", "triangle", "--k", "-1", "--sides", "1,1,4"]), EXIT_INVALID);
        assert_eq!(run(["llcomp", "certify", "--space", "nosuch.json"]), EXIT_INVALID);
        assert_eq!(run(["llcomp", "nosuchcommand"]), EXIT_INVALID);
        assert_eq!(run(["llcomp", "triangle", "--k", "0", "--sides", "1,1,6"]), EXIT_OK);
    }
}
