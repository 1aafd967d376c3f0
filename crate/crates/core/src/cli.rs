//! Batch front door: flag parsing, config resolution, and report emission.
//!
//! Each subcommand resolves its flags, an optional JSON config file, and
//! defaults into one [`RunConfig`], runs the owning library routine, and
//! emits a deterministic JSON report. Reports embed the resolved config, so
//! a run can be reproduced by feeding the embedded object back through
//! `--config`. Artifact files (pixmaps, CSV tables, JSONL trees) are
//! written atomically: a rerun with the same config replaces them with
//! byte-identical content.
//!
//! Exit codes: 0 success (and every check passed), 1 a verified inequality
//! failed, 2 usage or validation error, 3 numerical failure. Failures print
//! one machine-readable JSON object on stderr.

use crate::construction::{build_scales, eval_f_anchored, region_of, BuildError, Params, Scales};
use crate::dimension::{
    bowen_zero_from, closed_form_bound, cover_sum, level_ratio_log2, pressure_curve, DimError,
    DEFAULT_DEPTH, DEFAULT_T_RANGE,
};
use crate::dynamics::{classify_grid, DynError, Window};
use crate::inverse::{build_tree, export_jsonl, preimages, InvError};
use crate::output::{atomic_write, encode_csv, encode_p6};
use crate::xnum::{XComplex, XReal};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Default grid resolution (radial rings, angular columns).
const DEFAULT_RES: [usize; 2] = [192, 192];
/// Default orbit iteration cap for grid classification.
const DEFAULT_MAX_ITER: usize = 64;
/// Number of tabulated t values on the pressure curve.
const T_GRID: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "repeller",
    about = "Numerical laboratory for an entire function whose bounded dynamics \
             concentrate on a ladder of annuli",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Parameters shared by every subcommand.
#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Coefficient C of the function (default 2000)
    #[arg(long = "C", value_name = "C", allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Top annulus index N for boundedness questions (default 3)
    #[arg(long = "N", value_name = "N")]
    pub n: Option<usize>,
    /// Number of product factors kept when evaluating f (default N + 8)
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Relative-error budget for evaluations (default 1e-9)
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Samples per circle in the verifier's image checks (default 256)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Seed for every randomized sampler (default 1)
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON config file; explicit flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the report (render: the pixmap) here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the scale ladder a_k, r_k, s_k with exact renderings
    Scales {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every construction inequality and report signed margins
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Classify orbit starts over a log-polar grid
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        /// Window as log2_lo,log2_hi,theta_lo,theta_hi (defaults to the full ladder)
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            value_name = "LO,HI,TLO,THI"
        )]
        window: Option<Vec<f64>>,
        /// Grid resolution as radial,angular (default 192,192)
        #[arg(long, value_delimiter = ',', value_name = "NR,NT")]
        res: Option<Vec<usize>>,
        /// Iteration cap per orbit (default 64)
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Solve f(b) = a on the bounded annuli for a base point a
    Preimages {
        #[command(flatten)]
        common: CommonArgs,
        /// Base point in log-polar form: log2 magnitude, angle (default 0,0 → a = 1)
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            value_name = "LOG2,THETA"
        )]
        base: Option<Vec<f64>>,
        /// Also build the depth-n preimage tree (default 1: first generation only)
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Pressure curve, finite-depth Bowen estimate, and the closed-form ceiling
    Dimension {
        #[command(flatten)]
        common: CommonArgs,
        /// Base point in log-polar form: log2 magnitude, angle (default 0,0 → a = 1)
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            value_name = "LOG2,THETA"
        )]
        base: Option<Vec<f64>>,
        /// Preimage tree depth (default 5)
        #[arg(long)]
        depth: Option<usize>,
        /// Lower end of the t bracket (default 1e-3)
        #[arg(long)]
        t_lo: Option<f64>,
        /// Upper end of the t bracket (default 1.5)
        #[arg(long)]
        t_hi: Option<f64>,
    },
    /// Render grid verdicts as a binary P6 pixmap (requires --out)
    Render {
        #[command(flatten)]
        common: CommonArgs,
        /// Window as log2_lo,log2_hi,theta_lo,theta_hi (defaults to the full ladder)
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            value_name = "LO,HI,TLO,THI"
        )]
        window: Option<Vec<f64>>,
        /// Image resolution as radial,angular (default 192,192)
        #[arg(long, value_delimiter = ',', value_name = "NR,NT")]
        res: Option<Vec<usize>>,
        /// Iteration cap per orbit (default 64)
        #[arg(long)]
        max_iter: Option<usize>,
    },
}

/// Optional JSON config file. Flags win on conflict; the `command` key is
/// accepted (so embedded report configs round-trip) but the subcommand on
/// the command line decides what runs.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "command")]
    _command: Option<String>,
    #[serde(rename = "C")]
    c: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    trunc: Option<usize>,
    tail_tol: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    max_iter: Option<usize>,
    depth: Option<usize>,
    t_lo: Option<f64>,
    t_hi: Option<f64>,
    window: Option<[f64; 4]>,
    res: Option<[usize; 2]>,
    base: Option<[f64; 2]>,
}

/// A fully resolved run: every report embeds this object verbatim.
///
/// Fields a command does not consume stay `None` and are omitted from the
/// serialized form. `window` is resolved against the ladder inside the run
/// (its default upper radius is `log2 s_N`), after which the embedded copy
/// carries the concrete numbers.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub trunc: usize,
    pub tail_tol: f64,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub res: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<[f64; 2]>,
}

impl RunConfig {
    pub fn params(&self) -> Params {
        Params {
            c: self.c,
            n: self.n,
            trunc: self.trunc,
            tail_tol: self.tail_tol,
            samples_per_circle: self.samples,
            seed: self.seed,
        }
    }
}

/// A failure on the way to or through a run, tagged with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, or parameters outside their ranges (exit 2).
    Usage(String),
    /// The computation itself failed: overflow, lost bracket, contour on a
    /// zero, domain violation (exit 3).
    Numerical(String),
    /// Filesystem trouble writing an artifact (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }

    /// One-line machine-readable form for the error stream.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.message() }
        })
        .to_string()
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> CliError {
        match e {
            BuildError::InvalidParams(m) => CliError::Usage(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<DynError> for CliError {
    fn from(e: DynError) -> CliError {
        match e {
            DynError::WindowOutOfRange(m) => CliError::Usage(m),
        }
    }
}

impl From<InvError> for CliError {
    fn from(e: InvError) -> CliError {
        match e {
            InvError::Budget { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<DimError> for CliError {
    fn from(e: DimError) -> CliError {
        match e {
            DimError::Inverse(inner) => inner.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

/// What a run produced: the JSON report and where the exit code landed
/// (verify reports all-pass as 0 and any genuine failure as 1).
#[derive(Debug)]
pub struct RunOutput {
    pub report: String,
    pub exit: i32,
}

fn take<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn fixed_len<T: Copy, const K: usize>(
    v: Option<Vec<T>>,
    name: &str,
) -> Result<Option<[T; K]>, CliError> {
    match v {
        None => Ok(None),
        Some(items) => {
            let arr: [T; K] = items.try_into().map_err(|items: Vec<T>| {
                CliError::Usage(format!(
                    "--{name} takes {} comma-separated values, got {}",
                    K,
                    items.len()
                ))
            })?;
            Ok(Some(arr))
        }
    }
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

/// Merges flags over the config file over defaults into a single resolved
/// run description. Command-specific options resolve only for the command
/// that consumes them.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let (name, common) = match &cli.command {
        Command::Scales { common } => ("scales", common),
        Command::Verify { common } => ("verify", common),
        Command::Classify { common, .. } => ("classify", common),
        Command::Preimages { common, .. } => ("preimages", common),
        Command::Dimension { common, .. } => ("dimension", common),
        Command::Render { common, .. } => ("render", common),
    };
    let file = load_file_config(common.config.as_deref())?;

    let c = take(common.c, file.c, 2000.0);
    let n = take(common.n, file.n, 3);
    let mut cfg = RunConfig {
        command: name.to_string(),
        c,
        n,
        trunc: take(common.trunc, file.trunc, n + 8),
        tail_tol: take(common.tail_tol, file.tail_tol, 1e-9),
        samples: take(common.samples, file.samples, 256),
        seed: take(common.seed, file.seed, 1),
        max_iter: None,
        depth: None,
        t_lo: None,
        t_hi: None,
        window: None,
        res: None,
        base: None,
    };

    match &cli.command {
        Command::Scales { .. } | Command::Verify { .. } => {}
        Command::Classify {
            window,
            res,
            max_iter,
            ..
        }
        | Command::Render {
            window,
            res,
            max_iter,
            ..
        } => {
            cfg.window = fixed_len::<f64, 4>(window.clone(), "window")?.or(file.window);
            cfg.res = Some(
                fixed_len::<usize, 2>(res.clone(), "res")?
                    .or(file.res)
                    .unwrap_or(DEFAULT_RES),
            );
            cfg.max_iter = Some(take(*max_iter, file.max_iter, DEFAULT_MAX_ITER));
        }
        Command::Preimages { base, depth, .. } => {
            cfg.base = Some(
                fixed_len::<f64, 2>(base.clone(), "base")?
                    .or(file.base)
                    .unwrap_or([0.0, 0.0]),
            );
            cfg.depth = Some(take(*depth, file.depth, 1));
        }
        Command::Dimension {
            base,
            depth,
            t_lo,
            t_hi,
            ..
        } => {
            cfg.base = Some(
                fixed_len::<f64, 2>(base.clone(), "base")?
                    .or(file.base)
                    .unwrap_or([0.0, 0.0]),
            );
            cfg.depth = Some(take(*depth, file.depth, DEFAULT_DEPTH));
            cfg.t_lo = Some(take(*t_lo, file.t_lo, DEFAULT_T_RANGE.0));
            cfg.t_hi = Some(take(*t_hi, file.t_hi, DEFAULT_T_RANGE.1));
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.params().validate().map_err(CliError::from)?;
    if let Some(d) = cfg.depth {
        if d == 0 {
            return Err(CliError::Usage("depth must be at least 1".into()));
        }
    }
    if let (Some(lo), Some(hi)) = (cfg.t_lo, cfg.t_hi) {
        if !(lo > 0.0 && lo < hi && hi <= 2.0) {
            return Err(CliError::Usage(format!(
                "t range must satisfy 0 < t_lo < t_hi <= 2, got ({lo}, {hi})"
            )));
        }
    }
    if let Some([nr, nt]) = cfg.res {
        if nr == 0 || nt == 0 {
            return Err(CliError::Usage(
                "resolution components must be positive".into(),
            ));
        }
        if nr.saturating_mul(nt) > 16_000_000 {
            return Err(CliError::Usage(format!(
                "resolution {nr}x{nt} exceeds the 16e6-cell budget"
            )));
        }
    }
    Ok(())
}

/// Caps the global thread pool from `REPELLER_THREADS`. Must run before the
/// first parallel region; later calls are silently inert, which is fine
/// because the variable cannot change mid-process.
pub fn init_threads() -> Result<(), CliError> {
    match std::env::var("REPELLER_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let k: usize = raw.trim().parse().ok().filter(|&k| k >= 1).ok_or_else(|| {
                CliError::Usage(format!(
                    "REPELLER_THREADS must be a positive integer, got {raw:?}"
                ))
            })?;
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Report payloads
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct XRender {
    decimal: String,
    exact: String,
}

impl XRender {
    fn of(x: &XReal) -> XRender {
        XRender {
            decimal: x.decimal_string(),
            exact: x.exact_string(),
        }
    }
}

#[derive(Serialize)]
struct ScaleRow {
    k: usize,
    a: XRender,
    r: XRender,
    s: XRender,
}

#[derive(Serialize)]
struct ScalesOut<'a> {
    config: &'a RunConfig,
    log2_8c: f64,
    l: XRender,
    ladder: Vec<ScaleRow>,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    config: &'a RunConfig,
    all_pass: bool,
    genuine_failures: Vec<String>,
    report: crate::verifier::VerificationReport,
}

#[derive(Serialize)]
struct GridOut<'a> {
    config: &'a RunConfig,
    window: Window,
    res: [usize; 2],
    counts: GridCounts,
    /// One string per radial ring (lowest log-radius first); each character
    /// is a verdict code digit, angle increasing from theta_lo.
    rows: Vec<String>,
}

#[derive(Serialize)]
struct GridCounts {
    bounded_witness: usize,
    escape_certified: usize,
    undecided: usize,
}

#[derive(Serialize)]
struct PreimageRow {
    region: String,
    re: String,
    im: String,
    re_exact: String,
    im_exact: String,
    /// Ladder index the point is anchored to (0 when the point is plain).
    anchor: usize,
    offset_re: String,
    offset_im: String,
    f_prime_abs_log2: f64,
    /// log2 |f(b) - a|: how well the located point maps back to the base.
    residual_log2: f64,
}

#[derive(Serialize)]
struct TreeSummary {
    depth: usize,
    level_counts: Vec<usize>,
    leaves: usize,
    jsonl: Option<String>,
}

#[derive(Serialize)]
struct PreimagesOut<'a> {
    config: &'a RunConfig,
    base: BasePoint,
    count: usize,
    per_annulus: Vec<usize>,
    preimages: Vec<PreimageRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tree: Option<TreeSummary>,
}

#[derive(Serialize)]
struct BasePoint {
    re: String,
    im: String,
    log2_mag: f64,
    angle: f64,
    region: String,
}

#[derive(Serialize)]
struct CurvePoint {
    t: f64,
    s_log2: f64,
    p: f64,
}

#[derive(Serialize)]
struct CoverRatio {
    t: f64,
    ratio_log2: f64,
    bound_log2: f64,
}

#[derive(Serialize)]
struct DimensionOut<'a> {
    config: &'a RunConfig,
    #[serde(rename = "C")]
    c: f64,
    #[serde(rename = "N")]
    n_top: usize,
    n: usize,
    t_star: f64,
    t_n: f64,
    pressure_curve: Vec<CurvePoint>,
    /// log2 of cover-sum ratios between depths n-1 and n, with the
    /// geometric bound they must stay under once t exceeds t_star.
    cover_ratios: Vec<CoverRatio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
}

#[derive(Serialize)]
struct RenderOut<'a> {
    config: &'a RunConfig,
    window: Window,
    res: [usize; 2],
    counts: GridCounts,
    out: String,
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize infallibly");
    text.push('\n');
    text
}

fn run_scales(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let sc = build_scales(&cfg.params())?;
    let ladder = (0..=sc.m())
        .map(|k| ScaleRow {
            k,
            a: XRender::of(&sc.a(k)),
            r: XRender::of(&sc.r(k)),
            s: XRender::of(&sc.s(k)),
        })
        .collect();
    let out = ScalesOut {
        config: cfg,
        log2_8c: sc.log2_8c(),
        l: XRender::of(&sc.l()),
        ladder,
    };
    Ok(RunOutput {
        report: to_json(&out),
        exit: 0,
    })
}

fn run_verify(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let report = crate::verifier::run_all(&cfg.params());
    if let Some(err) = &report.build_error {
        return Err(CliError::Numerical(format!(
            "scale construction failed: {err}"
        )));
    }
    let genuine_failures = report
        .genuine_failures()
        .iter()
        .map(|c| format!("{}[{}]", c.name, c.k))
        .collect();
    let exit = if report.all_pass { 0 } else { 1 };
    let out = VerifyOut {
        config: cfg,
        all_pass: report.all_pass,
        genuine_failures,
        report,
    };
    Ok(RunOutput {
        report: to_json(&out),
        exit,
    })
}

/// Resolves the window (defaulting to the whole ladder over a full turn),
/// classifies the grid, and returns everything the classify and render
/// reports share.
fn classified_grid(
    cfg: &mut RunConfig,
    sc: &Scales,
) -> Result<(Window, [usize; 2], Vec<u8>, GridCounts), CliError> {
    let window = match cfg.window {
        Some([lo, hi, tlo, thi]) => Window {
            log2_lo: lo,
            log2_hi: hi,
            theta_lo: tlo,
            theta_hi: thi,
        },
        None => {
            let top = sc
                .s(sc.n())
                .log2()
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            Window {
                log2_lo: -4.0,
                log2_hi: top,
                theta_lo: -PI,
                theta_hi: PI,
            }
        }
    };
    cfg.window = Some([
        window.log2_lo,
        window.log2_hi,
        window.theta_lo,
        window.theta_hi,
    ]);
    let res = cfg.res.expect("grid commands always resolve a resolution");
    let max_iter = cfg.max_iter.expect("grid commands always resolve max_iter");
    let codes = classify_grid(&cfg.params(), sc, &window, (res[0], res[1]), max_iter)?;
    let mut tally = [0usize; 3];
    for &c in &codes {
        tally[c as usize] += 1;
    }
    let counts = GridCounts {
        bounded_witness: tally[0],
        escape_certified: tally[1],
        undecided: tally[2],
    };
    Ok((window, res, codes, counts))
}

fn run_classify(cfg: &mut RunConfig) -> Result<RunOutput, CliError> {
    let sc = build_scales(&cfg.params())?;
    let (window, res, codes, counts) = classified_grid(cfg, &sc)?;
    let rows = codes
        .chunks(res[1])
        .map(|ring| ring.iter().map(|c| char::from(b'0' + c)).collect())
        .collect();
    let out = GridOut {
        config: cfg,
        window,
        res,
        counts,
        rows,
    };
    Ok(RunOutput {
        report: to_json(&out),
        exit: 0,
    })
}

fn run_render(cfg: &mut RunConfig, out_path: Option<&Path>) -> Result<RunOutput, CliError> {
    let Some(path) = out_path else {
        return Err(CliError::Usage(
            "render writes a pixmap and requires --out".into(),
        ));
    };
    let sc = build_scales(&cfg.params())?;
    let (window, res, codes, counts) = classified_grid(cfg, &sc)?;
    let pixmap = encode_p6(res[1], res[0], &codes);
    atomic_write(path, &pixmap)?;
    let out = RenderOut {
        config: cfg,
        window,
        res,
        counts,
        out: path.display().to_string(),
    };
    Ok(RunOutput {
        report: to_json(&out),
        exit: 0,
    })
}

fn base_point(cfg: &RunConfig) -> Result<XComplex, CliError> {
    let [log2_mag, angle] = cfg.base.expect("base commands always resolve a base point");
    XComplex::from_polar(log2_mag, angle)
        .map_err(|e| CliError::Usage(format!("base point out of range: {e}")))
}

fn run_preimages(cfg: &RunConfig, out_path: Option<&Path>) -> Result<RunOutput, CliError> {
    let p = cfg.params();
    let sc = build_scales(&p)?;
    let a = base_point(cfg)?;
    let region = region_of(&sc, sc.n(), &a).map_err(|e| CliError::Numerical(e.to_string()))?;
    let found = preimages(&p, &sc, &a)?;

    let mut per_annulus = vec![0usize; sc.n() + 1];
    let mut rows = Vec::with_capacity(found.len());
    for pre in &found {
        per_annulus[pre.region] += 1;
        let (val, _) =
            eval_f_anchored(&sc, &pre.point).map_err(|e| CliError::Numerical(e.to_string()))?;
        let residual = val
            .sub(&a)
            .and_then(|d| d.abs())
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let residual_log2 = if residual.is_zero() {
            f64::NEG_INFINITY
        } else {
            residual.log2_abs().unwrap_or(f64::NEG_INFINITY)
        };
        rows.push(PreimageRow {
            region: format!("A{}", pre.region),
            re: pre.value.re.decimal_string(),
            im: pre.value.im.decimal_string(),
            re_exact: pre.value.re.exact_string(),
            im_exact: pre.value.im.exact_string(),
            anchor: pre.point.anchor,
            offset_re: pre.point.offset.re.decimal_string(),
            offset_im: pre.point.offset.im.decimal_string(),
            f_prime_abs_log2: pre
                .f_prime_abs
                .log2()
                .map_err(|e| CliError::Numerical(e.to_string()))?,
            residual_log2,
        });
    }

    let depth = cfg.depth.expect("preimages always resolves a depth");
    let tree = if depth >= 2 {
        let tree = build_tree(&p, &sc, &a, depth)?;
        let jsonl = match out_path {
            Some(path) => {
                let mut bytes = Vec::new();
                export_jsonl(&tree, &mut bytes)?;
                let side = path.with_extension("jsonl");
                atomic_write(&side, &bytes)?;
                Some(side.display().to_string())
            }
            None => None,
        };
        Some(TreeSummary {
            depth,
            level_counts: tree.levels.iter().map(|(lo, hi)| hi - lo).collect(),
            leaves: tree.leaves().len(),
            jsonl,
        })
    } else {
        None
    };

    let (log2_mag, angle) = a.polar().map_err(|e| CliError::Numerical(e.to_string()))?;
    let out = PreimagesOut {
        config: cfg,
        base: BasePoint {
            re: a.re.decimal_string(),
            im: a.im.decimal_string(),
            log2_mag,
            angle,
            region: region.to_string(),
        },
        count: found.len(),
        per_annulus,
        preimages: rows,
        tree,
    };
    Ok(RunOutput {
        report: to_json(&out),
        exit: 0,
    })
}

fn run_dimension(cfg: &RunConfig, out_path: Option<&Path>) -> Result<RunOutput, CliError> {
    // The contraction requirement L = C/(4e) > 1 is the command's defining
    // precondition; check it before anything else so small C reports the
    // domain violation rather than a downstream ladder failure.
    let t_star = closed_form_bound(cfg.c)?;
    let p = cfg.params();
    let sc = build_scales(&p)?;
    let a = base_point(cfg)?;
    let depth = cfg.depth.expect("dimension always resolves a depth");
    let (t_lo, t_hi) = (
        cfg.t_lo.expect("dimension always resolves t_lo"),
        cfg.t_hi.expect("dimension always resolves t_hi"),
    );

    let tree = build_tree(&p, &sc, &a, depth)?;
    let t_values: Vec<f64> = (0..T_GRID)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / (T_GRID - 1) as f64)
        .collect();
    let curve = pressure_curve(&tree, &t_values)?;
    let t_n = bowen_zero_from(&tree, (t_lo, t_hi))?;

    let mut points = Vec::with_capacity(T_GRID);
    for i in 0..t_values.len() {
        points.push(CurvePoint {
            t: curve.t_values[i],
            s_log2: curve.s_values[i]
                .log2()
                .map_err(|e| CliError::Numerical(e.to_string()))?,
            p: curve.p_values[i],
        });
    }

    // Cover-sum contraction between the last two generations, tabulated on
    // the same t grid as the pressure curve.
    let mut cover_ratios = Vec::with_capacity(T_GRID);
    if depth >= 2 {
        let prev = build_tree(&p, &sc, &a, depth - 1)?;
        for &t in &t_values {
            let top = cover_sum(&tree, t)?;
            let bot = cover_sum(&prev, t)?;
            let ratio_log2 = top.log2().map_err(|e| CliError::Numerical(e.to_string()))?
                - bot.log2().map_err(|e| CliError::Numerical(e.to_string()))?;
            let bound_log2 = level_ratio_log2(&sc, t)?;
            cover_ratios.push(CoverRatio {
                t,
                ratio_log2,
                bound_log2,
            });
        }
    }

    let csv = match out_path {
        Some(path) => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|pt| vec![pt.t.to_string(), pt.s_log2.to_string(), pt.p.to_string()])
                .collect();
            let table = encode_csv(&["t", "s_log2", "p"], &rows);
            let side = path.with_extension("csv");
            atomic_write(&side, table.as_bytes())?;
            Some(side.display().to_string())
        }
        None => None,
    };

    let out = DimensionOut {
        config: cfg,
        c: cfg.c,
        n_top: cfg.n,
        n: depth,
        t_star,
        t_n,
        pressure_curve: points,
        cover_ratios,
        csv,
    };
    Ok(RunOutput {
        report: to_json(&out),
        exit: 0,
    })
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Runs one resolved config. `out_path` is the `--out` flag: commands whose
/// primary artifact is binary (render) or that carry sidecar tables
/// (dimension CSV, preimage-tree JSONL) write those files here or alongside.
pub fn execute(cfg: &mut RunConfig, out_path: Option<&Path>) -> Result<RunOutput, CliError> {
    match cfg.command.as_str() {
        "scales" => run_scales(cfg),
        "verify" => run_verify(cfg),
        "classify" => run_classify(cfg),
        "preimages" => run_preimages(cfg, out_path),
        "dimension" => run_dimension(cfg, out_path),
        "render" => run_render(cfg, out_path),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

/// Full CLI entry: parse, resolve, run, emit. Returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let out_path = match &cli.command {
        Command::Scales { common }
        | Command::Verify { common }
        | Command::Classify { common, .. }
        | Command::Preimages { common, .. }
        | Command::Dimension { common, .. }
        | Command::Render { common, .. } => common.out.clone(),
    };
    let run = init_threads()
        .and_then(|()| resolve(&cli))
        .and_then(|mut cfg| execute(&mut cfg, out_path.as_deref()));
    match run {
        Ok(output) => {
            // Render's --out already received the pixmap; its report goes to
            // stdout. Everything else sends the report to --out when given.
            let is_render = matches!(cli.command, Command::Render { .. });
            match (&out_path, is_render) {
                (Some(path), false) => {
                    if let Err(e) = atomic_write(path, output.report.as_bytes()) {
                        let err = CliError::Io(e.to_string());
                        eprintln!("{}", err.to_json());
                        return err.exit_code();
                    }
                }
                _ => print!("{}", output.report),
            }
            output.exit
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
