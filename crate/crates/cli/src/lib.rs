//! Command-line front end: weight catalog, spectra, Weyl reports, Orlicz
//! scans and sign-changing weights.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use steklov_core::asymptotics::{signed_weyl_fits, trusted_signed_spectrum, trusted_spectrum, weyl_slope, CountingFunction};
use steklov_core::fourier::perimeter;
use steklov_core::orlicz::llog_membership_scan;
use steklov_core::{Error, SpectralResult, WeightDescriptor, WeylFit};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const DEFAULT_MODES: usize = 128;
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Domains,
    Spectrum,
    Weyl,
    OrliczNorm,
    Indefinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub weight: Option<WeightDescriptor>,
    pub modes: usize,
    pub quad_tol: f64,
    pub window: Option<(f64, f64)>,
    /// CSV spectrum output.
    pub out: Option<PathBuf>,
    /// JSON report output.
    pub report: Option<PathBuf>,
    /// SVG plot of the counting function.
    pub plot: Option<PathBuf>,
    pub a: f64,
    pub caps: Vec<f64>,
    pub cap: Option<f64>,
    pub seed: u64,
}

/// Command-line misuse; the process exits with `exit_code`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError {
    pub message: String,
    pub exit_code: i32,
}

#[derive(Parser, Debug)]
#[command(name = "steklov", version, about = "Weighted Steklov spectra on the unit disk and Weyl-law checks")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// List the weight catalog with perimeters.
    Domains,
    /// Compute the spectrum and write `k,sigma,trusted` rows.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the counting function against perimeter/π.
    Weyl {
        #[command(flatten)]
        common: CommonArgs,
        /// Fit window `lo,hi`.
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Replace β by min(β, M).
        #[arg(long)]
        cap: Option<f64>,
    },
    /// Capped L(log L)^a norms and a boundedness verdict.
    #[command(name = "orlicz-norm")]
    OrliczNorm {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value = "1e2,1e4,1e6,1e8")]
        caps: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Two-sided Weyl fits for a sign-changing weight.
    Indefinite {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    weight: String,
    #[arg(long, default_value_t = DEFAULT_MODES)]
    modes: usize,
    #[arg(long = "quad-tol", default_value_t = DEFAULT_QUAD_TOL)]
    quad_tol: f64,
    /// Seed for randomized checks; the computations themselves are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn usage(message: impl Into<String>) -> UsageError {
    UsageError {
        message: message.into(),
        exit_code: 2,
    }
}

fn parse_weight(text: &str) -> Result<WeightDescriptor, UsageError> {
    text.parse::<WeightDescriptor>()
        .map_err(|e| usage(format!("{e}\n\n{}", WeightDescriptor::GRAMMAR)))
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, UsageError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("cannot parse {what} entry {s:?}")))
        })
        .collect()
}

fn parse_window(text: Option<String>) -> Result<Option<(f64, f64)>, UsageError> {
    let Some(text) = text else { return Ok(None) };
    match parse_list(&text, "window")?.as_slice() {
        &[lo, hi] if lo > 0.0 && hi > lo => Ok(Some((lo, hi))),
        _ => Err(usage(format!("window must be `lo,hi` with 0 < lo < hi, got {text:?}"))),
    }
}

impl RunConfig {
    fn base(command: Command) -> Self {
        Self {
            command,
            weight: None,
            modes: DEFAULT_MODES,
            quad_tol: DEFAULT_QUAD_TOL,
            window: None,
            out: None,
            report: None,
            plot: None,
            a: 1.0,
            caps: Vec::new(),
            cap: None,
            seed: 0,
        }
    }

    fn with_common(command: Command, c: CommonArgs) -> Result<Self, UsageError> {
        if c.modes < 1 {
            return Err(usage("--modes must be at least 1"));
        }
        if !(c.quad_tol > 0.0 && c.quad_tol <= 1e-2) {
            return Err(usage(format!("--quad-tol must lie in (0, 1e-2], got {}", c.quad_tol)));
        }
        Ok(Self {
            weight: Some(parse_weight(&c.weight)?),
            modes: c.modes,
            quad_tol: c.quad_tol,
            seed: c.seed,
            ..Self::base(command)
        })
    }

    fn weight(&self) -> &WeightDescriptor {
        self.weight.as_ref().expect("command requires a weight")
    }
}

/// Parse a full argument vector (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| UsageError {
        message: e.render().to_string(),
        exit_code: if e.use_stderr() { 2 } else { 0 },
    })?;
    match cli.command {
        Sub::Domains => Ok(RunConfig::base(Command::Domains)),
        Sub::Spectrum { common, out } => Ok(RunConfig {
            out,
            ..RunConfig::with_common(Command::Spectrum, common)?
        }),
        Sub::Weyl {
            common,
            window,
            report,
            plot,
            cap,
        } => {
            if let Some(m) = cap {
                if !(m > 0.0 && m.is_finite()) {
                    return Err(usage(format!("--cap must be positive, got {m}")));
                }
            }
            Ok(RunConfig {
                window: parse_window(window)?,
                report,
                plot,
                cap,
                ..RunConfig::with_common(Command::Weyl, common)?
            })
        }
        Sub::OrliczNorm {
            weight,
            a,
            caps,
            report,
        } => {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(usage(format!("--a must be nonnegative, got {a}")));
            }
            let caps = parse_list(&caps, "caps")?;
            if caps.iter().any(|c| !(*c > 0.0)) || caps.windows(2).any(|p| p[1] <= p[0]) {
                return Err(usage("--caps must be positive and strictly increasing"));
            }
            Ok(RunConfig {
                weight: Some(parse_weight(&weight)?),
                a,
                caps,
                report,
                ..RunConfig::base(Command::OrliczNorm)
            })
        }
        Sub::Indefinite {
            common,
            window,
            report,
            out,
        } => Ok(RunConfig {
            window: parse_window(window)?,
            report,
            out,
            ..RunConfig::with_common(Command::Indefinite, common)?
        }),
    }
}

/// Run a parsed configuration; primary output goes to `stdout` unless a file
/// is named, errors go to `stderr` as JSON. Returns the process exit code.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(config, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let body = json!({ "code": e.code(), "message": e.to_string() });
            let _ = writeln!(stderr, "{body}");
            1
        }
    }
}

fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), Error> {
    match config.command {
        Command::Domains => domains(stdout),
        Command::Spectrum => spectrum(config, stdout),
        Command::Weyl => weyl(config, stdout),
        Command::OrliczNorm => orlicz(config, stdout),
        Command::Indefinite => indefinite(config, stdout),
    }
}

/// `%.17g`-style formatting: 17 significant digits, trailing zeros removed.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Write via a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Error> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn json_bytes(value: Value) -> Vec<u8> {
    // serde_json maps are ordered by key, so output is stable.
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

const CATALOG: &[&str] = &[
    "constant:1",
    "cardioid",
    "ngon:3",
    "ngon:4",
    "ngon:6",
    "cusp:0.5",
    "fastcusp:2",
    "mobius:0.5,0:constant:1",
    "mobius:0,0.3:cardioid",
    "cos:1,2",
];

fn domains(stdout: &mut dyn Write) -> Result<(), Error> {
    let mut text = String::from("descriptor,perimeter,in_llogl,nonnegative\n");
    for d in CATALOG {
        let w: WeightDescriptor = d.parse()?;
        let p = perimeter(&w, DEFAULT_QUAD_TOL)?;
        let _ = writeln!(
            text,
            "{d},{},{},{}",
            format_g17(p),
            w.llogl_obstruction().is_none(),
            w.is_nonnegative()
        );
    }
    text.push('\n');
    text.push_str(WeightDescriptor::GRAMMAR);
    text.push('\n');
    Ok(stdout.write_all(text.as_bytes())?)
}

fn spectrum_csv(rows: impl Iterator<Item = (i64, f64, bool)>) -> Result<Vec<u8>, Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["k", "sigma", "trusted"]).map_err(csv_err)?;
    for (k, sigma, trusted) in rows {
        w.write_record([k.to_string(), format_g17(sigma), trusted.to_string()])
            .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn spectrum(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), Error> {
    let sr = trusted_spectrum(config.weight(), config.modes, config.quad_tol)?;
    let bytes = spectrum_csv(
        sr.sigmas
            .iter()
            .enumerate()
            .map(|(k, &s)| (k as i64, s, k < sr.trusted_count)),
    )?;
    emit(config.out.as_deref(), &bytes, stdout)
}

fn window_json(fit: &WeylFit) -> Value {
    json!([fit.window.0, fit.window.1])
}

fn weyl(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), Error> {
    let start = Instant::now();
    let mut w = config.weight().clone();
    if let Some(m) = config.cap {
        w = WeightDescriptor::capped(w, m)?;
    }
    if let Some(s) = w.llogl_obstruction() {
        return Err(Error::NotLlogL {
            angle: s.angle,
            power: s.power,
            log_power: s.log_power,
        });
    }
    if !w.is_nonnegative() {
        return Err(Error::InvalidParameter(
            "weyl needs a nonnegative weight; use `indefinite` for sign-changing weights".into(),
        ));
    }
    let sr = trusted_spectrum(&w, config.modes, config.quad_tol)?;
    let fit = weyl_slope(&sr, config.window)?;
    let perim = perimeter(&w, config.quad_tol)?;
    if let Some(path) = &config.plot {
        write_atomic(path, counting_svg(&sr, &fit).as_bytes())?;
    }
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("weight".into(), json!(w.id()));
    m.insert("modes".into(), json!(config.modes));
    m.insert("slope".into(), json!(fit.slope));
    m.insert("target".into(), json!(fit.target));
    m.insert("rel_error".into(), json!(fit.rel_error));
    m.insert("window".into(), window_json(&fit));
    m.insert("trusted_count".into(), json!(sr.trusted_count));
    m.insert("perimeter".into(), json!(perim));
    m.insert("runtime_seconds".into(), json!(start.elapsed().as_secs_f64()));
    emit(config.report.as_deref(), &json_bytes(Value::Object(m)), stdout)
}

fn orlicz(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), Error> {
    let w = config.weight();
    let scan = llog_membership_scan(w, config.a, &config.caps)?;
    let exponents: Vec<Value> = scan
        .exponents
        .iter()
        .map(|e| json!({ "angle": e.angle, "power": e.power, "log_power": e.log_power }))
        .collect();
    let value = json!({
        "weight": w.id(),
        "a": config.a,
        "caps": scan.caps,
        "norms": scan.norms,
        "verdict": scan.verdict.as_str(),
        "local_exponents": exponents,
    });
    emit(config.report.as_deref(), &json_bytes(value), stdout)
}

fn fit_json(fit: &WeylFit, trusted: usize) -> Value {
    json!({
        "slope": fit.slope,
        "target": fit.target,
        "rel_error": fit.rel_error,
        "window": window_json(fit),
        "trusted_count": trusted,
    })
}

fn indefinite(config: &RunConfig, stdout: &mut dyn Write) -> Result<(), Error> {
    let start = Instant::now();
    let w = config.weight();
    let ssr = trusted_signed_spectrum(w, config.modes, config.quad_tol)?;
    if let Some(path) = &config.out {
        // Negative eigenvalues are indexed −1, −2, … in order of magnitude.
        let pos = ssr
            .sigmas_pos
            .iter()
            .enumerate()
            .map(|(i, &s)| (i as i64 + 1, s, i < ssr.trusted_pos));
        let neg = ssr
            .sigmas_neg
            .iter()
            .enumerate()
            .map(|(i, &s)| (-(i as i64) - 1, s, i < ssr.trusted_neg));
        write_atomic(path, &spectrum_csv(pos.chain(neg))?)?;
    }
    let fits = signed_weyl_fits(w, &ssr, config.quad_tol, config.window)?;
    let value = json!({
        "schema_version": SCHEMA_VERSION,
        "weight": w.id(),
        "modes": config.modes,
        "positive": fit_json(&fits.positive, ssr.trusted_pos),
        "negative": fit_json(&fits.negative, ssr.trusted_neg),
        "mass_pos": fits.mass_pos,
        "mass_neg": fits.mass_neg,
        "kernel_modes": ssr.kernel_modes,
        "runtime_seconds": start.elapsed().as_secs_f64(),
    });
    emit(config.report.as_deref(), &json_bytes(value), stdout)
}

/// Staircase `N(σ)` over the trusted range with the target and fitted lines.
pub fn counting_svg(sr: &SpectralResult, fit: &WeylFit) -> String {
    let (width, height, pad) = (640.0, 480.0, 40.0);
    let n = CountingFunction::from_spectrum(sr);
    let x_max = n.limit().max(1e-12);
    let y_max = (n.jumps().len() as f64).max(fit.target * x_max).max(1.0);
    let px = |x: f64| pad + (width - 2.0 * pad) * x / x_max;
    let py = |y: f64| height - pad - (height - 2.0 * pad) * y / y_max;

    let mut stairs = String::new();
    let mut count = 0.0;
    let mut last = 0.0;
    for &s in n.jumps() {
        let _ = write!(stairs, "{:.3},{:.3} {:.3},{:.3} ", px(last), py(count), px(s), py(count));
        count += 1.0;
        last = s;
    }
    let _ = write!(stairs, "{:.3},{:.3}", px(x_max), py(count));

    let line = |slope: f64, intercept: f64, color: &str| {
        format!(
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{color}\" stroke-width=\"1\"/>\n",
            px(0.0),
            py(intercept.max(0.0)),
            px(x_max),
            py(intercept + slope * x_max),
        )
    };
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    );
    let _ = writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{stairs}\"/>"
    );
    svg.push_str(&line(fit.target, 0.0, "red"));
    svg.push_str(&line(fit.slope, fit.intercept, "blue"));
    let _ = writeln!(
        svg,
        "<text x=\"{pad}\" y=\"20\" font-family=\"monospace\" font-size=\"12\">{} slope {} target {}</text>",
        sr.weight_id,
        format_g17(fit.slope),
        format_g17(fit.target)
    );
    svg.push_str("</svg>\n");
    svg
}
