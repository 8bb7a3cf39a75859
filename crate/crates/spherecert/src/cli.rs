//! Command-line interface. Data goes to stdout (or `--out`), human-readable
//! summaries and structured errors to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use spherecert_core::certify::{deep_certificate, required_margin};
use spherecert_core::montecarlo::validate_certificate;
use spherecert_core::network::ReluNetwork;
use spherecert_core::region::LinearRegion;

use crate::error::exit;
use crate::format::{
    load_network, parse_point, save_network, to_json_line, CertificateDoc, EstimateDoc, RegionDoc,
    ValidationDoc,
};
use crate::render::{render_partition, RenderSpec};
use crate::sweep::{run_sweep, to_csv, SweepSpec};
use crate::{parallel, CliError};

/// Seed used when neither `--seed` nor `SPHERECERT_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

pub const SEED_ENV: &str = "SPHERECERT_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "spherecert",
    version,
    about = "Certify robustness of ReLU networks against random spherical perturbations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the linear region of x and emit a robustness certificate.
    Certify(CertifyArgs),
    /// Monte Carlo estimate of local robustness; with --cert, validate a certificate.
    Estimate(EstimateArgs),
    /// Emit the linear region containing x: faces, pattern, decision hyperplane.
    Region(RegionArgs),
    /// Dimension sweep for a single perceptron at a fixed margin/radius ratio (CSV).
    Sweep(SweepArgs),
    /// Render the partition of a two-input network as a PPM image.
    Render2d(RenderArgs),
    /// Generate a seeded random network.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct SeedArg {
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// Input point as a JSON array, or @FILE.
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub r: f64,
    /// Also report the margin needed for misclassification probability <= epsilon.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// Input point as a JSON array, or @FILE. Defaults to the certificate's point.
    #[arg(long)]
    pub x: Option<String>,
    /// Defaults to the certificate's radius.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub n_samples: u64,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// Certificate to validate against the estimate.
    #[arg(long)]
    pub cert: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated input dimensions.
    #[arg(long)]
    pub dims: String,
    /// Margin over perturbation radius, a / r.
    #[arg(long)]
    pub ratio: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n_samples: u64,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub net: PathBuf,
    /// x0,y0,x1,y1
    #[arg(long, default_value = "-2,-2,2,2", allow_hyphen_values = true)]
    pub bbox: String,
    #[arg(long, default_value_t = 256)]
    pub res: usize,
    /// Query point to mark, with its perturbation circle when --r is given.
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub input_dim: usize,
    /// Comma-separated hidden layer widths.
    #[arg(long, default_value = "")]
    pub widths: String,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn read_network(path: &Path) -> Result<ReluNetwork, CliError> {
    load_network(&read(path)?)
}

/// `[1, 2]` inline, or `@path` to a file holding the array.
pub fn read_point(arg: &str) -> Result<Vec<f64>, CliError> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let bytes = read(Path::new(path))?;
            parse_point(&String::from_utf8_lossy(&bytes))
        }
        None => parse_point(arg),
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("cannot parse {what} entry {s:?}")))
        })
        .collect()
}

/// Two-sided normal quantile for a confidence level in (0, 1).
pub fn z_for_confidence(confidence: f64) -> Result<f64, CliError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(CliError::Usage(format!(
            "confidence must be in (0, 1), got {confidence}"
        )));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(1.0 - (1.0 - confidence) / 2.0))
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn display(path: &Path) -> Option<String> {
    Some(path.display().to_string())
}

fn certify(
    args: &CertifyArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let net = read_network(&args.net)?;
    let x = read_point(&args.x)?;
    let cert = deep_certificate(&net, &x, args.r)?;
    let mut doc = CertificateDoc::new(&cert, display(&args.net));
    if let Some(eps) = args.epsilon {
        let needed = required_margin(eps, cert.r, cert.d, cert.n)?;
        doc.epsilon = Some(eps);
        doc.required_margin = Some(needed);
        doc.meets_epsilon = Some(cert.a >= needed);
    }
    emit(args.out.as_deref(), &to_json_line(&doc), stdout)?;
    let _ = writeln!(
        stderr,
        "label {} | margin {} over {} faces (n = {}, d = {}) | bounds: union {:.6}, sum-exp {:.6}, exact-cap {:.6}",
        cert.label,
        cert.a,
        cert.hyperplane_count(),
        cert.n,
        cert.d,
        cert.bound_paper,
        cert.bound_sum_exp,
        cert.bound_exact_cap
    );
    Ok(exit::OK)
}

fn estimate(
    args: &EstimateArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let net = read_network(&args.net)?;
    let cert = match &args.cert {
        Some(path) => {
            let doc: CertificateDoc =
                serde_json::from_slice(&read(path)?).map_err(|source| CliError::Parse {
                    what: "certificate",
                    source,
                })?;
            Some(doc.to_certificate())
        }
        None => None,
    };
    let x = match (&args.x, &cert) {
        (Some(x), _) => read_point(x)?,
        (None, Some(c)) => c.x.clone(),
        (None, None) => return Err(CliError::Usage("--x is required without --cert".into())),
    };
    let r = match (args.r, &cert) {
        (Some(r), _) => r,
        (None, Some(c)) => c.r,
        (None, None) => return Err(CliError::Usage("--r is required without --cert".into())),
    };
    let z = z_for_confidence(args.confidence)?;

    let start = Instant::now();
    let est = parallel::estimate_local_robustness(&net, &x, r, args.n_samples, args.seed.seed, z)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut doc = EstimateDoc::new(&est, args.confidence, seconds, display(&args.net));
    let mut code = exit::OK;
    if let Some(cert) = &cert {
        let report = validate_certificate(cert, &est)?;
        if !report.pass {
            code = exit::UNSOUND;
        }
        doc.validation = Some(ValidationDoc::new(&report, cert));
    }
    emit(args.out.as_deref(), &to_json_line(&doc), stdout)?;
    let e = &est.estimate;
    let _ = writeln!(
        stderr,
        "agreement {}/{} = {:.6} ({:.0}% CI [{:.6}, {:.6}]) in {:.2}s",
        e.successes,
        e.samples,
        e.point_estimate,
        100.0 * args.confidence,
        e.ci_low,
        e.ci_high,
        seconds
    );
    if let Some(v) = &doc.validation {
        let _ = writeln!(
            stderr,
            "certificate {}: bound {:.6} vs CI upper end {:.6} (slack {:.6})",
            if v.pass { "PASS" } else { "FAIL" },
            v.bound_exact_cap.max(v.bound_paper),
            v.ci_high,
            v.slack
        );
    }
    Ok(code)
}

fn region(
    args: &RegionArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let net = read_network(&args.net)?;
    let x = read_point(&args.x)?;
    let region = LinearRegion::build(&net, &x)?;
    let doc = RegionDoc::new(&region, display(&args.net));
    emit(args.out.as_deref(), &to_json_line(&doc), stdout)?;
    let _ = writeln!(
        stderr,
        "region with {} faces (n = {}), label {}",
        doc.hyperplane_count, doc.total_units, doc.label
    );
    Ok(exit::OK)
}

fn sweep(
    args: &SweepArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let spec = SweepSpec {
        dims: parse_list(&args.dims, "dimension")?,
        ratio: args.ratio,
        r: args.r,
        samples: args.n_samples,
        seed: args.seed.seed,
        z: z_for_confidence(args.confidence)?,
    };
    let rows = run_sweep(&spec)?;
    emit(args.out.as_deref(), to_csv(&rows).as_bytes(), stdout)?;
    let _ = writeln!(
        stderr,
        "{} dimensions swept at a/r = {}",
        rows.len(),
        args.ratio
    );
    Ok(exit::OK)
}

fn render2d(
    args: &RenderArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let net = read_network(&args.net)?;
    let bbox: Vec<f64> = parse_list(&args.bbox, "bbox")?;
    let bbox: [f64; 4] = bbox
        .try_into()
        .map_err(|_| CliError::Usage("bbox needs four numbers x0,y0,x1,y1".into()))?;
    let query = match &args.x {
        Some(x) => Some((read_point(x)?, args.r.unwrap_or(0.0))),
        None => None,
    };
    let raster = render_partition(
        &net,
        &RenderSpec {
            bbox,
            res: args.res,
            query,
        },
    )?;
    emit(args.out.as_deref(), &raster.to_ppm(), stdout)?;
    let _ = writeln!(
        stderr,
        "{}x{} image, {} activation patterns",
        raster.width, raster.height, raster.pattern_count
    );
    Ok(exit::OK)
}

fn gen(args: &GenArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let widths: Vec<usize> = parse_list(&args.widths, "width")?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.seed);
    let net = ReluNetwork::random(args.input_dim, &widths, &mut rng)?;
    emit(args.out.as_deref(), &save_network(&net), stdout)?;
    let _ = writeln!(
        stderr,
        "network with d = {}, hidden {:?}, n = {}",
        net.input_dim(),
        widths,
        net.total_units()
    );
    Ok(exit::OK)
}

/// Run one command; returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Certify(a) => certify(a, stdout, stderr),
        Command::Estimate(a) => estimate(a, stdout, stderr),
        Command::Region(a) => region(a, stdout, stderr),
        Command::Sweep(a) => sweep(a, stdout, stderr),
        Command::Render2d(a) => render2d(a, stdout, stderr),
        Command::Gen(a) => gen(a, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let report = serde_json::json!({ "error": e.to_string(), "kind": e.kind() });
            let _ = writeln!(stderr, "{report}");
            e.exit_code()
        }
    }
}
