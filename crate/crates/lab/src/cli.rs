//! Argument parsing and the subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use csflab_core::breather::{
    detect, junction_smoothness, orbit_boundedness, refine_shift, rescale_sequence, rescaled_deficit, splice,
    Direction, JunctionReport, OrbitReport, SpliceMode,
};
use csflab_core::entropy::{
    breather_gamma_threshold, entropy_report, gamma_admissible, gamma_integral, sup_entropy, verify_monotonicity,
    EntropyReport, GammaReport, MonotonicityReport, SupEntropy, SupSearch,
};
use csflab_core::flow::{evolve, Scheme, SolverOptions, TimeStep};
use csflab_core::geometry::resample_by_arclength;
use csflab_core::harnack::{
    expanding_harnack, rotator_minimality_check, sqrt_t_h_monotone, steady_harnack, HarnackSample, RotatorReport,
    VMode,
};
use csflab_core::solitons::{
    classify_counterexample, generate, generate_closed, generate_two_sided, preset, residual, CounterexampleReport,
    Layout, SolitonSpec, Start,
};
use csflab_core::{FlowHistory, Vec2};
use log::info;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{CliError, CliResult};
use crate::format::{self, Sidecar, SimilarityFile};

#[derive(Parser, Debug)]
#[command(name = "csflab", version, about = "Curve shortening flow experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the flow from a curve file and write the history.
    #[command(allow_negative_numbers = true)]
    Evolve(EvolveArgs),
    /// Gaussian density of every slice of a history.
    #[command(allow_negative_numbers = true)]
    Entropy(EntropyArgs),
    /// Density per slice plus both sides of the monotonicity identity.
    #[command(allow_negative_numbers = true)]
    EntropyVerify(EntropyArgs),
    /// Supremum of the density over centers.
    #[command(allow_negative_numbers = true)]
    SupEntropy(SupEntropyArgs),
    /// Gaussian-weighted length integrals and the breather threshold on gamma.
    #[command(allow_negative_numbers = true)]
    GammaCheck(GammaArgs),
    /// Integrate a soliton profile.
    #[command(allow_negative_numbers = true)]
    Soliton(SolitonArgs),
    /// Fit a similarity between two slices.
    #[command(allow_negative_numbers = true)]
    BreatherDetect(DetectArgs),
    /// Extend one period to an ancient, immortal or eternal history.
    #[command(allow_negative_numbers = true)]
    Splice(SpliceArgs),
    /// Compare time derivatives across the junctions of a splice.
    #[command(allow_negative_numbers = true)]
    JunctionCheck(JunctionArgs),
    /// Parabolically rescaled copy of a shrinking splice.
    #[command(allow_negative_numbers = true)]
    Rescale(RescaleArgs),
    /// Harnack quantities of a history (CSV).
    #[command(allow_negative_numbers = true)]
    Harnack(HarnackArgs),
    /// Closest-point test on a rotator profile.
    #[command(allow_negative_numbers = true)]
    RotatorCheck(RotatorArgs),
    /// Orbit of a sample under the index correspondence.
    #[command(allow_negative_numbers = true)]
    Orbit(OrbitArgs),
}

fn parse_numbers<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0f64; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|_| format!("`{p}` is not a number"))?;
        if !o.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(out)
}

fn parse_vec2(s: &str) -> Result<Vec2, String> {
    parse_numbers::<2>(s).map(|[x, y]| Vec2::new(x, y))
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_numbers::<3>(s)
}

fn parse_dt(s: &str) -> Result<TimeStep, String> {
    if s == "auto" {
        return Ok(TimeStep::Auto);
    }
    s.parse::<f64>()
        .map(TimeStep::Fixed)
        .map_err(|_| format!("`{s}` is neither `auto` nor a number"))
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SchemeArg {
    Explicit,
    SemiImplicit,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long)]
    t1: f64,
    /// Resample to this many points by arclength first.
    #[arg(long)]
    n: Option<usize>,
    /// `auto` or a fixed step.
    #[arg(long, default_value = "auto", value_parser = parse_dt)]
    dt: TimeStep,
    #[arg(long, value_enum, default_value_t = SchemeArg::Explicit)]
    scheme: SchemeArg,
    /// Redistribute by arclength every this many steps.
    #[arg(long)]
    redistribute: Option<usize>,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    #[arg(long, default_value_t = 0.2)]
    cfl: f64,
    /// Stop when max curvature exceeds this multiple of its initial value.
    #[arg(long, default_value_t = 10.0)]
    blowup: f64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[arg(long)]
    history: PathBuf,
    #[arg(long, default_value = "0,0", value_parser = parse_vec2, allow_hyphen_values = true)]
    center: Vec2,
    #[arg(long)]
    t0: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SupEntropyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    t0: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GammaArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Arclength half-widths of the windows.
    #[arg(long, value_delimiter = ',')]
    windows: Vec<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    t2: Option<f64>,
    /// The breather isometry has no translation part (gamma may equal the threshold).
    #[arg(long)]
    no_translation: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LayoutArg {
    OneSided,
    TwoSided,
    Closed,
}

#[derive(Args, Debug)]
struct SolitonArgs {
    /// A preset name or `custom`.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, value_parser = parse_vec2, allow_hyphen_values = true)]
    e: Option<Vec2>,
    #[arg(long)]
    smax: Option<f64>,
    #[arg(long)]
    ds: Option<f64>,
    /// Start point and tangent angle as `x,y,theta`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    start: Option<[f64; 3]>,
    #[arg(long, value_enum)]
    layout: Option<LayoutArg>,
    /// Also classify the profile with this gamma.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long, requires = "slice2", conflicts_with = "history")]
    slice1: Option<PathBuf>,
    #[arg(long, requires = "slice1")]
    slice2: Option<PathBuf>,
    /// Use the first and last slices of a history instead.
    #[arg(long)]
    history: Option<PathBuf>,
    #[arg(long)]
    allow_reflection: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Shrinking,
    Expanding,
    Steady,
    Eternal,
}

impl From<ModeArg> for SpliceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Shrinking => SpliceMode::Shrinking,
            ModeArg::Expanding => SpliceMode::Expanding,
            ModeArg::Steady => SpliceMode::SteadyBackward,
            ModeArg::Eternal => SpliceMode::SteadyEternal,
        }
    }
}

#[derive(Args, Debug)]
struct SpliceArgs {
    /// The period, on `[0, 1]`.
    #[arg(long)]
    history: PathBuf,
    #[arg(long)]
    similarity: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long)]
    copies: usize,
    #[arg(long)]
    output: PathBuf,
    /// Defaults to the output path with `.sidecar.json` appended.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct JunctionArgs {
    /// Spliced history; its sidecar is found as in `splice`.
    #[arg(long)]
    splice: PathBuf,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    order: u8,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RescaleArgs {
    #[arg(long)]
    splice: PathBuf,
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long)]
    j: usize,
    #[arg(long)]
    output: PathBuf,
    /// Integrate the deficit of the rescaled flow over `lo,hi`.
    #[arg(long, value_parser = parse_vec2, allow_hyphen_values = true)]
    deficit_window: Option<Vec2>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum QuantityArg {
    Steady,
    Expanding,
    #[value(name = "sqrtTH")]
    SqrtTH,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VModeArg {
    Zero,
    Optimal,
}

#[derive(Args, Debug)]
struct HarnackArgs {
    #[arg(long)]
    history: PathBuf,
    #[arg(long, value_enum)]
    quantity: QuantityArg,
    #[arg(long, value_enum, default_value_t = VModeArg::Zero)]
    v_mode: VModeArg,
    /// Only the slice at this time (default: every slice).
    #[arg(long)]
    t: Option<f64>,
    /// Sample indices for `sqrtTH` (default: all).
    #[arg(long, value_delimiter = ',')]
    index: Vec<usize>,
    /// CSV output (default: standard output).
    #[arg(long)]
    report: Option<PathBuf>,
    /// JSON summary (default: standard output when the CSV goes to a file).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RotatorArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    omega: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long)]
    history: PathBuf,
    #[arg(long)]
    similarity: PathBuf,
    #[arg(long)]
    p0: usize,
    #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
    direction: DirectionArg,
    #[arg(long)]
    j: usize,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Metric names with a one-line description each, serialized as a JSON object.
struct Quantities(&'static [(&'static str, &'static str)]);

impl Serialize for Quantities {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

const ENTROPY_QUANTITIES: Quantities = Quantities(&[
    ("value", "integral of the backward heat kernel centered at (center, t0) against arclength"),
    ("deficit", "integral of |kappa n + x_perp / (2 (t0 - t))|^2 times the kernel; the rate at which value drops"),
    ("tail_estimate", "kernel mass beyond the ends of a truncated open curve, extrapolating the end rate"),
    ("lhs_drop", "value at the first slice minus value at the last"),
    ("integrated_deficit", "trapezoid integral of deficit in time; equals lhs_drop for an exact flow"),
]);

const SUP_QUANTITIES: Quantities = Quantities(&[(
    "value",
    "largest density over kernel centers at fixed scale t0 - t, by grid and compass search",
)]);

const GAMMA_QUANTITIES: Quantities = Quantities(&[
    ("window_values", "integral of exp(-gamma |x|^2) ds over arclength windows around the sample nearest the origin"),
    ("threshold", "(1 - alpha^2) / (4 (t2 - t1)); gamma below it rules out a shrinking breather with these data"),
    ("admissible", "gamma below the threshold, or equal to it without translation"),
]);

const SOLITON_QUANTITIES: Quantities = Quantities(&[
    ("residual", "max over interior samples of |kappa - <lambda x + omega J x + e, n>|"),
    ("blowup_arclength", "arclength where integration stopped on curvature blow-up"),
]);

const DETECT_QUANTITIES: Quantities = Quantities(&[
    ("alpha", "length ratio of the second slice to the first"),
    ("rotation", "orthogonal part of the best fit x2[i] = alpha R x1[shift(i)] + V"),
    ("V", "translation part of the fit"),
    ("residual", "RMS misfit in length units of the second slice"),
    ("fractional_shift", "index offset refined by a parabola through the neighbouring misfits"),
]);

const JUNCTION_QUANTITIES: Quantities = Quantities(&[
    ("position_gap", "distance between the two formulas meeting at the junction"),
    ("discrepancy", "largest difference of the one-sided time quotients across the junction"),
    ("dt_scale", "adjacent time step, the scale of the expected first-order error"),
]);

const RESCALE_QUANTITIES: Quantities = Quantities(&[
    ("tau_j", "junction time at which copy j + 1 begins"),
    ("scale_factor", "alpha^(2 (j + 1)) tau_j, which tends to c0"),
    ("c0", "1 / (alpha^-2 - 1)"),
    ("drift", "tau_j^(-1/2) times the accumulated translation of the step map"),
    ("deficit", "time integral of the deficit of the rescaled flow (center 0, t0 = 0) over the window"),
]);

const HARNACK_QUANTITIES: Quantities = Quantities(&[
    ("steady", "dH/dt + 2 V grad H + kappa V^2"),
    ("expanding", "dH/dt + H / (2t) + 2 V grad H + kappa V^2"),
    ("sqrtTH", "sqrt(t) H at a fixed sample; slope between consecutive slices"),
    ("valid", "weakly convex slice, interior sample, centered time difference, kappa above cutoff for optimal V"),
]);

const ROTATOR_QUANTITIES: Quantities = Quantities(&[
    ("distance", "min |x| on the profile, refined on a local parabola"),
    ("h_at_argmin", "curvature at the refined minimizer; zero for a rotator"),
    ("tangency_defect", "|<x, T>| / |x| at the minimizer"),
    ("residual", "rotator equation residual; gates the test"),
]);

const ORBIT_QUANTITIES: Quantities = Quantities(&[
    ("norms", "|x| on the first slice along the orbit of p0"),
    ("bounded", "no escape and the late maximum is within 5% of the early one"),
]);

fn emit<T: Serialize>(path: Option<&Path>, value: &T, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => format::write_json(p, value),
        None => print(out, &format::pretty(value)),
    }
}

fn print(out: &mut dyn Write, line: &str) -> CliResult<()> {
    writeln!(out, "{line}").map_err(|e| CliError::new("io", e.to_string()))
}

fn distinct(paths: &[&Path]) -> CliResult<()> {
    for (i, a) in paths.iter().enumerate() {
        if paths[i + 1..].contains(a) {
            return Err(CliError::usage(format!("output path {} is used twice", a.display())));
        }
    }
    Ok(())
}

/// `<path>.sidecar.json`.
pub fn default_sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".sidecar.json");
    path.with_file_name(name)
}

fn run_evolve(a: EvolveArgs) -> CliResult<()> {
    let mut curve = format::read_curve(&a.input)?;
    if let Some(n) = a.n {
        curve = resample_by_arclength(&curve, n)?;
    }
    let opts = SolverOptions {
        scheme: match a.scheme {
            SchemeArg::Explicit => Scheme::Explicit,
            SchemeArg::SemiImplicit => Scheme::SemiImplicit,
        },
        dt: a.dt,
        cfl: a.cfl,
        redistribute: a.redistribute,
        record_every: a.record_every,
        curvature_blowup: a.blowup,
    };
    let h = evolve(&curve, a.t0, a.t1, &opts)?;
    info!("evolve: {} slices, last t = {}, singular at {:?}", h.len(), h.last().t, h.singular_time);
    format::write_history(&a.output, &h)
}

#[derive(Serialize)]
struct EntropyOut {
    quantities: Quantities,
    center: Vec2,
    t0: f64,
    slices: Vec<EntropyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monotonicity: Option<MonotonicityReport>,
}

fn run_entropy(a: EntropyArgs, verify: bool, out: &mut dyn Write) -> CliResult<()> {
    let h = format::read_history(&a.history)?;
    let slices = h
        .slices()
        .iter()
        .map(|sl| entropy_report(&sl.curve, sl.t, a.center, a.t0))
        .collect::<Result<Vec<_>, _>>()?;
    let monotonicity = if verify {
        Some(verify_monotonicity(&h, a.center, a.t0)?)
    } else {
        None
    };
    let report = EntropyOut {
        quantities: ENTROPY_QUANTITIES,
        center: a.center,
        t0: a.t0,
        slices,
        monotonicity,
    };
    emit(a.report.as_deref(), &report, out)
}

#[derive(Serialize)]
struct SupOut {
    quantities: Quantities,
    #[serde(flatten)]
    result: SupEntropy,
}

fn run_sup_entropy(a: SupEntropyArgs, out: &mut dyn Write) -> CliResult<()> {
    let curve = format::read_curve(&a.input)?;
    let result = sup_entropy(&curve, a.t, a.t0, &SupSearch::default())?;
    emit(a.report.as_deref(), &SupOut { quantities: SUP_QUANTITIES, result }, out)
}

#[derive(Serialize)]
struct GammaOut {
    quantities: Quantities,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    admissible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integral: Option<GammaReport>,
}

fn run_gamma(a: GammaArgs, out: &mut dyn Write) -> CliResult<()> {
    let threshold = match (a.alpha, a.t1, a.t2) {
        (Some(alpha), Some(t1), Some(t2)) => Some(breather_gamma_threshold(alpha, t1, t2)?),
        (None, None, None) => None,
        _ => return Err(CliError::usage("--alpha, --t1 and --t2 go together")),
    };
    if let Some(th) = threshold {
        print(out, &format!("threshold {th:.5}"))?;
    }
    let integral = match &a.input {
        Some(path) => {
            let gamma = a.gamma.ok_or_else(|| CliError::usage("--input needs --gamma"))?;
            if a.windows.is_empty() {
                return Err(CliError::usage("--input needs --windows"));
            }
            let curve = format::read_curve(path)?;
            let mut r = gamma_integral(&curve, gamma, &a.windows)?;
            r.threshold = threshold;
            Some(r)
        }
        None if threshold.is_none() => {
            return Err(CliError::usage("give --input with --gamma, or --alpha --t1 --t2"))
        }
        None => None,
    };
    let admissible = match (a.gamma, threshold) {
        (Some(g), Some(th)) => Some(gamma_admissible(g, th, a.no_translation)),
        _ => None,
    };
    if a.input.is_none() && a.report.is_none() {
        return Ok(());
    }
    let report = GammaOut {
        quantities: GAMMA_QUANTITIES,
        threshold,
        admissible,
        integral,
    };
    emit(a.report.as_deref(), &report, out)
}

#[derive(Serialize)]
struct SolitonOut {
    quantities: Quantities,
    kind: String,
    spec: SolitonSpec,
    points: usize,
    length: f64,
    residual: f64,
    blowup_arclength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<CounterexampleReport>,
}

fn run_soliton(a: SolitonArgs, out: &mut dyn Write) -> CliResult<()> {
    let (spec, start, s_max, ds, layout) = if a.kind == "custom" {
        let spec = SolitonSpec::custom(
            a.lambda.unwrap_or(0.0),
            a.omega.unwrap_or(0.0),
            a.e.unwrap_or(Vec2::ZERO),
        );
        spec.validate()?;
        (spec, Start::new(0.0, 0.0, 0.0), 10.0, 1e-3, Layout::TwoSided)
    } else {
        if a.lambda.is_some() || a.omega.is_some() || a.e.is_some() {
            return Err(CliError::usage("--lambda, --omega and --e need --kind custom"));
        }
        let p = preset(&a.kind)?;
        (p.spec, p.start, p.s_max, p.ds, p.layout)
    };
    let start = a.start.map_or(start, |[x, y, th]| Start::new(x, y, th));
    let layout = match a.layout {
        Some(LayoutArg::OneSided) => Layout::OneSided,
        Some(LayoutArg::TwoSided) => Layout::TwoSided,
        Some(LayoutArg::Closed) => Layout::Closed,
        None => layout,
    };
    let (s_max, ds) = (a.smax.unwrap_or(s_max), a.ds.unwrap_or(ds));
    let profile = match layout {
        Layout::OneSided => generate(&spec, start, s_max, ds),
        Layout::TwoSided => generate_two_sided(&spec, start, s_max, ds),
        Layout::Closed => generate_closed(&spec, start, s_max, ds),
    }?;
    format::write_curve(&a.output, &profile.curve)?;
    let classification = match a.gamma {
        Some(g) => Some(classify_counterexample(&spec, &profile.curve, g)?),
        None => None,
    };
    let report = SolitonOut {
        quantities: SOLITON_QUANTITIES,
        kind: a.kind,
        spec,
        points: profile.curve.len(),
        length: profile.curve.length(),
        residual: residual(&profile.curve, &spec)?,
        blowup_arclength: profile.blowup_arclength,
        classification,
    };
    emit(a.report.as_deref(), &report, out)
}

#[derive(Serialize)]
struct DetectOut {
    quantities: Quantities,
    #[serde(flatten)]
    similarity: SimilarityFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    fractional_shift: Option<f64>,
}

fn run_detect(a: DetectArgs, out: &mut dyn Write) -> CliResult<()> {
    let (c1, c2) = match (&a.slice1, &a.slice2, &a.history) {
        (Some(p1), Some(p2), None) => (format::read_curve(p1)?, format::read_curve(p2)?),
        (None, None, Some(h)) => {
            let h = format::read_history(h)?;
            (h.first().curve.clone(), h.last().curve.clone())
        }
        _ => return Err(CliError::usage("give --slice1 and --slice2, or --history")),
    };
    let s = detect(&c1, &c2, a.allow_reflection)?;
    let fractional_shift = refine_shift(&c1, &c2, &s).ok();
    let report = DetectOut {
        quantities: DETECT_QUANTITIES,
        similarity: SimilarityFile::from(&s),
        fractional_shift,
    };
    emit(a.report.as_deref(), &report, out)
}

fn run_splice(a: SpliceArgs) -> CliResult<()> {
    let sidecar = a.sidecar.clone().unwrap_or_else(|| default_sidecar(&a.output));
    distinct(&[&a.output, &sidecar])?;
    let period = format::read_history(&a.history)?;
    let s = format::read_similarity(&a.similarity)?;
    let result = splice(&period, &s, a.mode.into(), a.copies)?;
    info!("splice: {} slices on [{}, {}]", result.history.len(), result.history.first().t, result.history.last().t);
    format::write_history(&a.output, &result.history)?;
    format::write_json(&sidecar, &Sidecar::of(&result))
}

fn read_splice(path: &Path, sidecar: Option<&Path>) -> CliResult<csflab_core::breather::SpliceResult> {
    let history = format::read_history(path)?;
    let side = sidecar.map(Path::to_path_buf).unwrap_or_else(|| default_sidecar(path));
    let data: Sidecar = format::read_json(&side)?;
    data.into_splice(history)
}

#[derive(Serialize)]
struct JunctionOut {
    quantities: Quantities,
    order: u8,
    max_position_gap: f64,
    max_discrepancy: f64,
    junctions: Vec<JunctionReport>,
}

fn run_junction(a: JunctionArgs, out: &mut dyn Write) -> CliResult<()> {
    let sp = read_splice(&a.splice, a.sidecar.as_deref())?;
    let junctions = junction_smoothness(&sp, a.order)?;
    let report = JunctionOut {
        quantities: JUNCTION_QUANTITIES,
        order: a.order,
        max_position_gap: junctions.iter().map(|r| r.position_gap).fold(0.0, f64::max),
        max_discrepancy: junctions.iter().map(|r| r.discrepancy).fold(0.0, f64::max),
        junctions,
    };
    emit(a.report.as_deref(), &report, out)
}

#[derive(Serialize)]
struct RescaleOut {
    quantities: Quantities,
    j: usize,
    tau_j: f64,
    scale_factor: f64,
    c0: f64,
    drift: Vec2,
    drift_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deficit: Option<f64>,
}

fn run_rescale(a: RescaleArgs, out: &mut dyn Write) -> CliResult<()> {
    if let Some(r) = &a.report {
        distinct(&[&a.output, r])?;
    }
    let sp = read_splice(&a.splice, a.sidecar.as_deref())?;
    let r = rescale_sequence(&sp, a.j)?;
    format::write_history(&a.output, &r.history)?;
    let deficit = match a.deficit_window {
        Some(w) => Some(rescaled_deficit(&r.history, w.x, w.y)?),
        None => None,
    };
    let report = RescaleOut {
        quantities: RESCALE_QUANTITIES,
        j: r.j,
        tau_j: r.tau_j,
        scale_factor: r.scale_factor,
        c0: r.c0,
        drift: r.drift,
        drift_ratio: r.drift_ratio,
        deficit,
    };
    emit(a.report.as_deref(), &report, out)
}

#[derive(Serialize)]
struct HarnackSummary {
    quantities: Quantities,
    quantity: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_mode: Option<&'static str>,
    samples: usize,
    valid_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_quantity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_quantity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monotone: Option<bool>,
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// large magnitudes (the same text JSON output uses).
fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map(|n| n.to_string()).unwrap_or_default()
    } else {
        x.to_string()
    }
}

/// Header of the per-sample CSV of the steady and expanding quantities.
pub const HARNACK_CSV_HEADER: &str = "index,t,H,dHdt,gradH,V,quantity,valid";
/// Header of the `sqrtTH` CSV; `slope` is empty on the last slice.
pub const SQRT_T_H_CSV_HEADER: &str = "index,t,H,sqrtTH,slope,valid";

fn harnack_rows(h: &FlowHistory, a: &HarnackArgs, vmode: VMode) -> CliResult<Vec<HarnackSample>> {
    let times: Vec<f64> = match a.t {
        Some(t) => vec![t],
        None => h.times(),
    };
    let mut rows = Vec::new();
    for t in times {
        let samples = match a.quantity {
            QuantityArg::Steady => steady_harnack(h, t, vmode)?,
            _ => expanding_harnack(h, t, vmode)?,
        };
        rows.extend(samples);
    }
    Ok(rows)
}

fn run_harnack(a: HarnackArgs, out: &mut dyn Write) -> CliResult<()> {
    if let (Some(r), Some(s)) = (&a.report, &a.summary) {
        distinct(&[r, s])?;
    }
    let h = format::read_history(&a.history)?;
    let vmode = match a.v_mode {
        VModeArg::Zero => VMode::Zero,
        VModeArg::Optimal => VMode::Optimal,
    };
    let mut csv = String::new();
    let summary = if a.quantity == QuantityArg::SqrtTH {
        let indices: Vec<usize> = if a.index.is_empty() { (0..h.count()).collect() } else { a.index.clone() };
        csv.push_str(SQRT_T_H_CSV_HEADER);
        csv.push('\n');
        let (mut min_slope, mut max_abs, mut valid) = (f64::INFINITY, 0.0f64, true);
        for &i in &indices {
            let r = sqrt_t_h_monotone(&h, i)?;
            min_slope = min_slope.min(r.min_slope);
            max_abs = max_abs.max(r.max_abs_slope);
            valid &= r.valid;
            for (k, &(t, v)) in r.series.iter().enumerate() {
                let slope = r
                    .series
                    .get(k + 1)
                    .map(|&(t2, v2)| num((v2 - v) / (t2 - t)))
                    .unwrap_or_default();
                csv.push_str(&format!("{i},{},{},{},{slope},{}\n", num(t), num(v / t.sqrt()), num(v), r.valid));
            }
        }
        HarnackSummary {
            quantities: HARNACK_QUANTITIES,
            quantity: "sqrtTH",
            v_mode: None,
            samples: indices.len(),
            valid_samples: if valid { indices.len() } else { 0 },
            max_abs_quantity: None,
            min_quantity: None,
            min_slope: Some(min_slope),
            max_abs_slope: Some(max_abs),
            monotone: Some(min_slope >= -1e-6),
        }
    } else {
        let rows = harnack_rows(&h, &a, vmode)?;
        csv.push_str(HARNACK_CSV_HEADER);
        csv.push('\n');
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.index,
                num(r.t),
                num(r.h),
                num(r.dh_dt),
                num(r.grad_h),
                num(r.v),
                num(r.quantity),
                r.valid
            ));
        }
        let valid: Vec<&HarnackSample> = rows.iter().filter(|r| r.valid).collect();
        HarnackSummary {
            quantities: HARNACK_QUANTITIES,
            quantity: if a.quantity == QuantityArg::Steady { "steady" } else { "expanding" },
            v_mode: Some(match vmode {
                VMode::Zero => "zero",
                VMode::Optimal => "optimal",
            }),
            samples: rows.len(),
            valid_samples: valid.len(),
            max_abs_quantity: valid.iter().map(|r| r.quantity.abs()).reduce(f64::max),
            min_quantity: valid.iter().map(|r| r.quantity).reduce(f64::min),
            min_slope: None,
            max_abs_slope: None,
            monotone: None,
        }
    };
    match &a.report {
        Some(p) => format::write_csv(p, &csv)?,
        None => out.write_all(csv.as_bytes()).map_err(|e| CliError::new("io", e.to_string()))?,
    }
    match (&a.summary, &a.report) {
        (Some(p), _) => format::write_json(p, &summary),
        (None, Some(_)) => print(out, &format::pretty(&summary)),
        (None, None) => Ok(()),
    }
}

#[derive(Serialize)]
struct RotatorOut {
    quantities: Quantities,
    omega: f64,
    #[serde(flatten)]
    result: RotatorReport,
}

fn run_rotator(a: RotatorArgs, out: &mut dyn Write) -> CliResult<()> {
    let curve = format::read_curve(&a.input)?;
    let result = rotator_minimality_check(&curve, a.omega)?;
    emit(
        a.report.as_deref(),
        &RotatorOut {
            quantities: ROTATOR_QUANTITIES,
            omega: a.omega,
            result,
        },
        out,
    )
}

#[derive(Serialize)]
struct OrbitOut {
    quantities: Quantities,
    #[serde(flatten)]
    result: OrbitReport,
}

fn run_orbit(a: OrbitArgs, out: &mut dyn Write) -> CliResult<()> {
    let h = format::read_history(&a.history)?;
    let s = format::read_similarity(&a.similarity)?;
    let dir = match a.direction {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    };
    let result = orbit_boundedness(&h, &s, a.p0, dir, a.j)?;
    emit(a.report.as_deref(), &OrbitOut { quantities: ORBIT_QUANTITIES, result }, out)
}

/// Parse and run one command. `argv[0]` is the program name.
pub fn run<I, S>(argv: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return print(out, e.to_string().trim_end());
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::usage(first.trim_start_matches("error: ")));
        }
    };
    match cli.command {
        Command::Evolve(a) => run_evolve(a),
        Command::Entropy(a) => run_entropy(a, false, out),
        Command::EntropyVerify(a) => run_entropy(a, true, out),
        Command::SupEntropy(a) => run_sup_entropy(a, out),
        Command::GammaCheck(a) => run_gamma(a, out),
        Command::Soliton(a) => run_soliton(a, out),
        Command::BreatherDetect(a) => run_detect(a, out),
        Command::Splice(a) => run_splice(a),
        Command::JunctionCheck(a) => run_junction(a, out),
        Command::Rescale(a) => run_rescale(a, out),
        Command::Harnack(a) => run_harnack(a, out),
        Command::RotatorCheck(a) => run_rotator(a, out),
        Command::Orbit(a) => run_orbit(a, out),
    }
}

/// Run one command, writing results to `out` and the `E:<code>:<message>`
/// line to `err` on failure. Returns the exit code: 0 on success, 2 otherwise.
pub fn dispatch_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match run(argv, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.line());
            2
        }
    }
}

/// [`dispatch_with`] on the standard streams.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
