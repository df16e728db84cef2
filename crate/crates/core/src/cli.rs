//! Command-line front end: `complete`, `mask`, `metrics`, `sweep`.
//!
//! Settings resolve as built-in defaults, then the `--config` file, then
//! flags. Every CSV row carries the flattened manifest so it can be replayed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::imaging::{psnr, quaternion_to_rgb, rgb_to_quaternion, ssim, text_mask, ColorImage};
use crate::mask::ObservationMask;
use crate::qdct::TransformAxis;
use crate::solver::{solve, CompletionProblem, IterationRecord, Method, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Mask images are read with this luminance threshold.
const MASK_IMAGE_THRESHOLD: f64 = 128.0;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::TruncationOutOfRange { .. }
            | Error::InvalidAxis
            | Error::EmptyMask => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunManifest {
    pub input: Option<PathBuf>,
    /// Mask file (text grid or image); overrides `sr`.
    pub mask: Option<PathBuf>,
    pub sr: f64,
    /// Seeds both the random mask and the multiplier initialization.
    pub seed: u64,
    pub method: Method,
    pub lambda: f64,
    pub beta1: f64,
    pub beta_max: f64,
    pub rho: f64,
    pub rank: usize,
    pub eps_inner: f64,
    pub eps_outer: f64,
    pub max_inner: usize,
    pub max_outer: usize,
    pub axis: [f64; 3],
    pub out: Option<PathBuf>,
    pub log_csv: Option<PathBuf>,
    pub metrics_csv: Option<PathBuf>,
}

impl Default for RunManifest {
    fn default() -> Self {
        let c = SolverConfig::<f64>::default();
        let u = c.axis.quaternion();
        Self {
            input: None,
            mask: None,
            sr: 0.3,
            seed: 0,
            method: Method::LrqrSr,
            lambda: c.lambda,
            beta1: c.beta1,
            beta_max: c.beta_max,
            rho: c.rho,
            rank: 30,
            eps_inner: c.eps_inner,
            eps_outer: c.eps_outer,
            max_inner: c.max_inner,
            max_outer: c.max_outer,
            axis: [u.x, u.y, u.z],
            out: None,
            log_csv: None,
            metrics_csv: None,
        }
    }
}

impl RunManifest {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are all representable")
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn solver_config(&self) -> CliResult<SolverConfig<f64>> {
        let [x, y, z] = self.axis;
        Ok(SolverConfig {
            lambda: self.lambda,
            beta1: self.beta1,
            beta_max: self.beta_max,
            rho: self.rho,
            rank: self.rank,
            eps_inner: self.eps_inner,
            eps_outer: self.eps_outer,
            max_inner: self.max_inner,
            max_outer: self.max_outer,
            axis: TransformAxis::new(x, y, z)?,
            seed: self.seed,
        })
    }

    /// `(key, value)` pairs in key order; absent paths are empty strings.
    pub fn flatten(&self) -> Vec<(String, String)> {
        let value = toml::Value::try_from(self).expect("manifest serializes");
        let table = value.as_table().expect("manifest is a table");
        let mut keys: Vec<&str> = MANIFEST_KEYS.to_vec();
        keys.sort_unstable();
        keys.into_iter()
            .map(|k| {
                let v = match table.get(k) {
                    None => String::new(),
                    Some(toml::Value::String(s)) => s.clone(),
                    Some(toml::Value::Array(a)) => a
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(";"),
                    Some(other) => other.to_string(),
                };
                (k.to_string(), v)
            })
            .collect()
    }
}

const MANIFEST_KEYS: [&str; 18] = [
    "input",
    "mask",
    "sr",
    "seed",
    "method",
    "lambda",
    "beta1",
    "beta_max",
    "rho",
    "rank",
    "eps_inner",
    "eps_outer",
    "max_inner",
    "max_outer",
    "axis",
    "out",
    "log_csv",
    "metrics_csv",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(name = "lrqr-sr")]
    LrqrSr,
    Qtnn,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::LrqrSr => Method::LrqrSr,
            MethodArg::Qtnn => Method::Qtnn,
        }
    }
}

/// Flags shared by `complete` and `sweep`; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// Flat key = value config file with manifest fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Ground-truth color image (PNG or PPM).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Mask file: text grid (`M N` header) or image (dark = missing).
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Sampling rate for a random mask.
    #[arg(long)]
    pub sr: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub eps_inner: Option<f64>,
    #[arg(long)]
    pub eps_outer: Option<f64>,
    #[arg(long)]
    pub max_inner: Option<usize>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// Output image (`complete`) or CSV (`sweep`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration CSV.
    #[arg(long)]
    pub log_csv: Option<PathBuf>,
}

impl RunFlags {
    pub fn resolve(&self) -> CliResult<RunManifest> {
        let mut m = match &self.config {
            Some(p) => RunManifest::load(p)?,
            None => RunManifest::default(),
        };
        macro_rules! take {
            ($($f:ident),*) => {$( if let Some(v) = self.$f.clone() { m.$f = v.into(); } )*};
        }
        take!(
            sr, seed, lambda, beta1, beta_max, rho, rank, eps_inner, eps_outer, max_inner,
            max_outer
        );
        if let Some(v) = self.method {
            m.method = v.into();
        }
        for (dst, src) in [
            (&mut m.input, &self.input),
            (&mut m.mask, &self.mask),
            (&mut m.out, &self.out),
            (&mut m.log_csv, &self.log_csv),
        ] {
            if src.is_some() {
                dst.clone_from(src);
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "quatcomp",
    version,
    about = "Color image completion with low-rank quaternion recovery"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover an image from a masked observation.
    Complete {
        #[command(flatten)]
        run: RunFlags,
        /// One-row CSV with the manifest and quality metrics.
        #[arg(long)]
        metrics_csv: Option<PathBuf>,
        /// Also write the masked observation here.
        #[arg(long)]
        observed_out: Option<PathBuf>,
    },
    /// Write a random or image-derived mask.
    Mask {
        #[arg(long, required_unless_present = "input")]
        rows: Option<usize>,
        #[arg(long, required_unless_present = "input")]
        cols: Option<usize>,
        /// Take the size from this image, or the mask itself with `--from-text`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Threshold `--input` (dark = missing) instead of sampling.
        #[arg(long, requires = "input")]
        from_text: bool,
        #[arg(long, default_value_t = MASK_IMAGE_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 0.3)]
        sr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `.txt` for the text grid, otherwise an image (white = observed).
        #[arg(long)]
        out: PathBuf,
    },
    /// PSNR/SSIM between two images.
    Metrics {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vary one parameter over a grid.
    Sweep {
        #[command(flatten)]
        run: RunFlags,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Grid points solved concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// gnuplot script plotting PSNR and SSIM against the parameter.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Lambda,
    Beta1,
    #[value(alias = "r")]
    Rank,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Beta1 => "beta1",
            SweepParam::Rank => "rank",
        }
    }

    fn apply(self, m: &mut RunManifest, v: f64) -> CliResult<()> {
        match self {
            SweepParam::Lambda => m.lambda = v,
            SweepParam::Beta1 => m.beta1 = v,
            SweepParam::Rank => {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(CliError::Usage(format!(
                        "rank grid value {v} is not a nonnegative integer"
                    )));
                }
                m.rank = v as usize;
            }
        }
        Ok(())
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Complete {
            run,
            metrics_csv,
            observed_out,
        } => {
            let mut m = run.resolve()?;
            if metrics_csv.is_some() {
                m.metrics_csv = metrics_csv;
            }
            let report = cmd_complete(&m, observed_out.as_deref())?;
            println!("{}", report.summary_line());
            Ok(())
        }
        Command::Mask {
            rows,
            cols,
            input,
            from_text,
            threshold,
            sr,
            seed,
            out,
        } => cmd_mask(
            rows,
            cols,
            input.as_deref(),
            from_text,
            threshold,
            sr,
            seed,
            &out,
        ),
        Command::Metrics {
            input,
            reference,
            out,
        } => cmd_metrics(&input, &reference, out.as_deref()),
        Command::Sweep {
            run,
            param,
            values,
            jobs,
            plot,
        } => {
            let m = run.resolve()?;
            cmd_sweep(&m, param, &values, jobs, plot.as_deref())
        }
    }
}

/// Outcome of one `complete` run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionReport {
    pub psnr: f64,
    pub ssim: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub converged: bool,
    pub sampling_rate: f64,
    pub wall_seconds: f64,
}

impl CompletionReport {
    pub fn summary_line(&self) -> String {
        format!(
            "psnr={:.4} ssim={:.4} sr={:.4} outer={} inner={} converged={} wall_s={:.2}",
            self.psnr,
            self.ssim,
            self.sampling_rate,
            self.outer_iters,
            self.inner_iters,
            self.converged,
            self.wall_seconds
        )
    }
}

pub fn load_mask(path: &Path, rows: usize, cols: usize) -> CliResult<ObservationMask> {
    let is_text = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("txt") | Some("mask")
    );
    let mask = if is_text {
        let text = std::fs::read_to_string(path)
            .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
        ObservationMask::from_text(&text)?
    } else {
        text_mask(&ColorImage::load(path)?, MASK_IMAGE_THRESHOLD)
    };
    if mask.shape() != (rows, cols) {
        return Err(CliError::Runtime(format!(
            "mask is {}x{}, image is {rows}x{cols}",
            mask.rows(),
            mask.cols()
        )));
    }
    Ok(mask)
}

fn build_problem(m: &RunManifest) -> CliResult<(ColorImage, CompletionProblem<f64>)> {
    let input = m
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let img = ColorImage::load(input)?;
    let (rows, cols) = img.shape();
    let mask = match &m.mask {
        Some(p) => load_mask(p, rows, cols)?,
        None => ObservationMask::random(rows, cols, m.sr, m.seed)?,
    };
    let problem = CompletionProblem::new(&rgb_to_quaternion(&img), mask)?;
    Ok((img, problem))
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn manifest_header(m: &RunManifest) -> Vec<String> {
    m.flatten().into_iter().map(|(k, _)| k).collect()
}

fn manifest_values(m: &RunManifest) -> Vec<String> {
    m.flatten().into_iter().map(|(_, v)| v).collect()
}

/// Shortest round-trip float text; `inf` for the identical-image PSNR.
fn num(v: f64) -> String {
    format!("{v}")
}

const METRIC_COLUMNS: [&str; 6] = [
    "psnr",
    "ssim",
    "sampling_rate",
    "outer_iters",
    "inner_iters",
    "converged",
];

fn metric_values(r: &CompletionReport) -> Vec<String> {
    vec![
        num(r.psnr),
        num(r.ssim),
        num(r.sampling_rate),
        r.outer_iters.to_string(),
        r.inner_iters.to_string(),
        r.converged.to_string(),
    ]
}

/// Recovers the image described by `m`, writing the requested outputs.
pub fn cmd_complete(m: &RunManifest, observed_out: Option<&Path>) -> CliResult<CompletionReport> {
    let config = m.solver_config()?;
    let (img, problem) = build_problem(m)?;
    config.validate(img.rows(), img.cols())?;
    if let Some(p) = observed_out {
        img.masked(problem.mask(), [0.0; 3]).save(p)?;
    }
    let mut log = match &m.log_csv {
        Some(p) => {
            let mut w = csv_writer(p)?;
            let mut header = manifest_header(m);
            header.extend(
                [
                    "outer",
                    "inner",
                    "beta",
                    "primal_residual",
                    "transform_residual",
                    "change",
                    "objective",
                ]
                .map(String::from),
            );
            w.write_record(&header).map_err(runtime)?;
            Some(w)
        }
        None => None,
    };
    let prefix = manifest_values(m);
    let mut log_error = None;
    let mut observer = |r: &IterationRecord| {
        if let Some(w) = log.as_mut() {
            let mut row = prefix.clone();
            row.extend([
                r.outer.to_string(),
                r.inner.to_string(),
                num(r.beta),
                num(r.residuals.primal),
                num(r.residuals.transform),
                num(r.residuals.change),
                num(r.objective),
            ]);
            if let Err(e) = w.write_record(&row) {
                log_error.get_or_insert(e);
            }
        }
    };
    let start = Instant::now();
    let result = solve(&problem, &config, m.method, &mut observer)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    if let Some(e) = log_error {
        return Err(runtime(e));
    }
    if let Some(w) = log.as_mut() {
        w.flush().map_err(runtime)?;
    }
    let recovered = quaternion_to_rgb(&result.x_opt);
    if let Some(p) = &m.out {
        recovered.save(p)?;
    }
    let report = CompletionReport {
        psnr: psnr(&recovered, &img)?,
        ssim: ssim(&recovered, &img)?,
        outer_iters: result.outer_iters,
        inner_iters: result.total_inner_iters,
        converged: result.converged,
        sampling_rate: problem.mask().sampling_rate(),
        wall_seconds,
    };
    if let Some(p) = &m.metrics_csv {
        let mut w = csv_writer(p)?;
        let mut header = manifest_header(m);
        header.extend(METRIC_COLUMNS.map(String::from));
        w.write_record(&header).map_err(runtime)?;
        let mut row = prefix;
        row.extend(metric_values(&report));
        w.write_record(&row).map_err(runtime)?;
        w.flush().map_err(runtime)?;
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_mask(
    rows: Option<usize>,
    cols: Option<usize>,
    input: Option<&Path>,
    from_text: bool,
    threshold: f64,
    sr: f64,
    seed: u64,
    out: &Path,
) -> CliResult<()> {
    let mask = match input {
        Some(p) if from_text => text_mask(&ColorImage::load(p)?, threshold),
        Some(p) => {
            let img = ColorImage::load(p)?;
            ObservationMask::random(img.rows(), img.cols(), sr, seed)?
        }
        None => {
            let (r, c) = rows
                .zip(cols)
                .ok_or_else(|| CliError::Usage("--rows and --cols are required".into()))?;
            ObservationMask::random(r, c, sr, seed)?
        }
    };
    if out.extension().and_then(|e| e.to_str()) == Some("txt") {
        std::fs::write(out, mask.to_text())
            .map_err(|e| runtime(format!("{}: {e}", out.display())))?;
    } else {
        let img = ColorImage::from_fn(mask.rows(), mask.cols(), |i, j| {
            [if mask.is_observed(i, j) { 255.0 } else { 0.0 }; 3]
        });
        img.save(out)?;
    }
    println!(
        "rows={} cols={} observed={} sr={:.4}",
        mask.rows(),
        mask.cols(),
        mask.count(),
        mask.sampling_rate()
    );
    Ok(())
}

pub fn cmd_metrics(input: &Path, reference: &Path, out: Option<&Path>) -> CliResult<()> {
    let a = ColorImage::load(input)?;
    let b = ColorImage::load(reference)?;
    let (p, s) = (psnr(&a, &b)?, ssim(&a, &b)?);
    println!("psnr={p:.4} ssim={s:.4}");
    if let Some(path) = out {
        let mut w = csv_writer(path)?;
        w.write_record(["input", "reference", "psnr", "ssim"])
            .map_err(runtime)?;
        w.write_record([
            input.display().to_string(),
            reference.display().to_string(),
            num(p),
            num(s),
        ])
        .map_err(runtime)?;
        w.flush().map_err(runtime)?;
    }
    Ok(())
}

/// One grid point of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub manifest: RunManifest,
    pub outcome: std::result::Result<CompletionReport, String>,
}

/// Solves every grid point (up to `jobs` at once), rows in grid order.
pub fn sweep_rows(
    base: &RunManifest,
    param: SweepParam,
    values: &[f64],
    jobs: usize,
) -> CliResult<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep grid is empty".into()));
    }
    let mut points = Vec::with_capacity(values.len());
    for &v in values {
        let mut m = base.clone();
        param.apply(&mut m, v)?;
        // per-point artifacts would collide; sweeps only report metrics
        m.out = None;
        m.log_csv = None;
        m.metrics_csv = None;
        points.push((v, m));
    }
    let solve_point = |(v, m): &(f64, RunManifest)| SweepRow {
        value: *v,
        manifest: m.clone(),
        outcome: cmd_complete(m, None).map_err(|e| e.to_string()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(runtime)?;
    Ok(pool.install(|| points.par_iter().map(solve_point).collect()))
}

pub fn cmd_sweep(
    base: &RunManifest,
    param: SweepParam,
    values: &[f64],
    jobs: usize,
    plot: Option<&Path>,
) -> CliResult<()> {
    let out = base
        .out
        .clone()
        .ok_or_else(|| CliError::Usage("--out is required for sweep".into()))?;
    let rows = sweep_rows(base, param, values, jobs)?;
    let mut w = csv_writer(&out)?;
    let mut header = vec!["param".to_string(), "value".to_string()];
    header.extend(manifest_header(base));
    header.extend(METRIC_COLUMNS.map(String::from));
    header.push("status".into());
    w.write_record(&header).map_err(runtime)?;
    for row in &rows {
        let mut rec = vec![param.key().to_string(), num(row.value)];
        rec.extend(manifest_values(&row.manifest));
        match &row.outcome {
            Ok(r) => {
                rec.extend(metric_values(r));
                rec.push("ok".into());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), METRIC_COLUMNS.len()));
                rec.push(e.clone());
            }
        }
        w.write_record(&rec).map_err(runtime)?;
        match &row.outcome {
            Ok(r) => println!("{}={} {}", param.key(), num(row.value), r.summary_line()),
            Err(e) => println!("{}={} failed: {e}", param.key(), num(row.value)),
        }
    }
    w.flush().map_err(runtime)?;
    if let Some(p) = plot {
        std::fs::write(p, gnuplot_script(&out, param))
            .map_err(|e| runtime(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn gnuplot_script(csv: &Path, param: SweepParam) -> String {
    let logscale = if param == SweepParam::Beta1 {
        "set logscale x\n"
    } else {
        ""
    };
    let psnr_col = 2 + MANIFEST_KEYS.len() + 1;
    let ssim_col = psnr_col + 1;
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel '{key}'\n\
         {logscale}\
         set ylabel 'PSNR (dB)'\n\
         set y2label 'SSIM'\n\
         set ytics nomirror\n\
         set y2tics\n\
         plot '{csv}' using 2:{psnr_col} with linespoints title 'PSNR', \\\n     \
         '' using 2:{ssim_col} axes x1y2 with linespoints title 'SSIM'\n",
        key = param.key(),
        csv = csv.display(),
    )
}

/// Applies `QC_THREADS` to the linear-algebra kernels: sequential unless it
/// is set above 1.
pub fn configure_threads() {
    let threads = std::env::var("QC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(1);
    let par = if threads > 1 {
        faer::Par::rayon(threads)
    } else {
        faer::Par::Seq
    };
    faer::set_global_parallelism(par);
}
