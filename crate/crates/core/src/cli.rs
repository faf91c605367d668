//! Command-line front end: `rate`, `sweep`, `figure` and `validate`.
//!
//! Lengths are meters and frequencies rad/s. Every flag of `rate` and
//! `sweep` may also be given in a `--config` file of `key = value` lines
//! using the flag name as key; flags on the command line win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::model::constants::E_A0;
use crate::model::{
    transition_wavelength, AngularFrequency, Atom, DickeParity, DipoleVector, Environment, PairConfig, Position3,
    RateResult,
};
use crate::rates::collective_rate;
use crate::scenarios::{
    csv_string, emit_csv, emit_svg, figure_preset, run_figure, run_sweep, write_atomic, FigureId, Normalization,
    Orientation, PlotSeries, LineStyle, PresetOptions, Spacing, SweepParameter, SweepSpec, DEFAULT_SAMPLES,
    MIN_SPACING,
};
use crate::validate::{run_validation, ValidationOptions};

#[derive(Debug, Parser)]
#[command(name = "collective-decay", version, about = "Collective decay rates of two entangled emitters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decay rate of a single configuration
    Rate(RateArgs),
    /// Sweep z_A or the separation and write CSV (and optionally SVG)
    Sweep(SweepArgs),
    /// Reproduce a figure preset (fig1, fig3..fig8)
    Figure(FigureArgs),
    /// Run the randomized oracle and identity suites
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Default)]
struct PairArgs {
    /// Plain-text `key = value` file mirroring the flag names
    #[arg(long)]
    config: Option<PathBuf>,
    /// free | mirror
    #[arg(long)]
    env: Option<String>,
    #[arg(long = "zA", allow_hyphen_values = true)]
    z_a: Option<f64>,
    #[arg(long = "zB", allow_hyphen_values = true)]
    z_b: Option<f64>,
    #[arg(long = "xA", allow_hyphen_values = true)]
    x_a: Option<f64>,
    #[arg(long = "yA", allow_hyphen_values = true)]
    y_a: Option<f64>,
    #[arg(long = "xB", allow_hyphen_values = true)]
    x_b: Option<f64>,
    #[arg(long = "yB", allow_hyphen_values = true)]
    y_b: Option<f64>,
    /// zz | xx (both dipoles along the named axis)
    #[arg(long)]
    orient: Option<String>,
    /// Direction of atom A's dipole, e.g. 0,0,1 (overrides --orient)
    #[arg(long = "dA", allow_hyphen_values = true)]
    d_a: Option<String>,
    /// Direction of atom B's dipole (defaults to --dA)
    #[arg(long = "dB", allow_hyphen_values = true)]
    d_b: Option<String>,
    /// sym | antisym
    #[arg(long)]
    parity: Option<String>,
    /// Transition angular frequency, rad/s
    #[arg(long)]
    omega0: Option<f64>,
    /// Dipole magnitude, C·m (default e·a₀)
    #[arg(long)]
    dipole: Option<f64>,
}

#[derive(Debug, Args)]
struct RateArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Also print the result as a CSV header and row
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// zA | rho
    #[arg(long)]
    vary: Option<String>,
    #[arg(long)]
    min: Option<f64>,
    #[arg(long)]
    max: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    /// linear | log
    #[arg(long)]
    spacing: Option<String>,
    /// pair_sum | single_atom
    #[arg(long)]
    normalization: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// fig1, fig3, fig4, fig5, fig6, fig7 or fig8
    id: String,
    /// Wide CSV with one scaled-rate column per curve
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Directory for one full CSV per curve
    #[arg(long = "curves-dir")]
    curves_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Dipole pair for fig1: xx (default) or zz
    #[arg(long)]
    orient: Option<String>,
    /// Worker threads (0 = rayon default)
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Run a tenth of the samples
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    seed: Option<u64>,
}

/// `key = value` lines; `#` starts a comment.
#[derive(Debug, Default)]
struct ConfigFile(BTreeMap<String, String>);

impl ConfigFile {
    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config("config", format!("line {}: expected `key = value`", i + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(ConfigFile(map))
    }

    fn string(&self, flag: Option<&String>, key: &str) -> Option<String> {
        flag.cloned().or_else(|| self.0.get(key).cloned())
    }

    fn parsed<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::config(key, format!("malformed value '{v}'"))),
        }
    }
}

fn parse_env(s: &str) -> Result<Environment> {
    match s {
        "free" | "free-space" | "vacuum" => Ok(Environment::FreeSpace),
        "mirror" | "plate" => Ok(Environment::PerfectMirror),
        _ => Err(Error::config("env", format!("expected free or mirror, got '{s}'"))),
    }
}

fn parse_parity(s: &str) -> Result<DickeParity> {
    match s {
        "sym" | "symmetric" | "+" => Ok(DickeParity::Symmetric),
        "antisym" | "antisymmetric" | "-" => Ok(DickeParity::Antisymmetric),
        _ => Err(Error::config("parity", format!("expected sym or antisym, got '{s}'"))),
    }
}

fn parse_orientation(s: &str) -> Result<Orientation> {
    match s {
        "zz" => Ok(Orientation::Zz),
        "xx" => Ok(Orientation::Xx),
        _ => Err(Error::config("orient", format!("expected zz or xx, got '{s}'"))),
    }
}

fn parse_vector(field: &str, s: &str) -> Result<DipoleVector> {
    let parts: Vec<_> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::config(field, format!("expected three comma-separated components, got '{s}'")));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| Error::config(field, format!("malformed number '{p}'")))?;
    }
    let d = DipoleVector::from_array(v);
    if !(d.norm() > 0.0 && d.norm().is_finite()) {
        return Err(Error::config(field, "direction must be a finite non-zero vector"));
    }
    Ok(d)
}

/// Fully resolved physical setup shared by `rate` and `sweep`.
struct PairSetup {
    config: ConfigFile,
    env: Environment,
    parity: DickeParity,
    omega0: AngularFrequency,
    orientation: Orientation,
    magnitude: f64,
    z_a: Option<f64>,
    z_b: Option<f64>,
    lateral: [f64; 4],
}

impl PairSetup {
    fn resolve(args: &PairArgs) -> Result<Self> {
        let config = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let env = match config.string(args.env.as_ref(), "env") {
            Some(s) => parse_env(&s)?,
            None => Environment::FreeSpace,
        };
        let parity = match config.string(args.parity.as_ref(), "parity") {
            Some(s) => parse_parity(&s)?,
            None => DickeParity::Symmetric,
        };
        let omega0 = config.parsed(args.omega0, "omega0")?.unwrap_or(1.55e16);
        let omega0 = AngularFrequency::new(omega0)?;
        let magnitude = config.parsed(args.dipole, "dipole")?.unwrap_or(E_A0);
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(Error::config("dipole", format!("must be a non-negative magnitude, got {magnitude}")));
        }

        let d_a = config.string(args.d_a.as_ref(), "dA");
        let d_b = config.string(args.d_b.as_ref(), "dB");
        let orientation = match (d_a, d_b) {
            (Some(a), b) => {
                let va = parse_vector("dA", &a)?.with_magnitude(magnitude);
                let vb = match b {
                    Some(b) => parse_vector("dB", &b)?.with_magnitude(magnitude),
                    None => va,
                };
                Orientation::Custom(va, vb)
            }
            (None, Some(_)) => return Err(Error::config("dA", "required when dB is given")),
            (None, None) => match config.string(args.orient.as_ref(), "orient") {
                Some(s) => parse_orientation(&s)?,
                None => Orientation::Zz,
            },
        };

        let lateral = [
            config.parsed(args.x_a, "xA")?.unwrap_or(0.0),
            config.parsed(args.y_a, "yA")?.unwrap_or(0.0),
            config.parsed(args.x_b, "xB")?.unwrap_or(0.0),
            config.parsed(args.y_b, "yB")?.unwrap_or(0.0),
        ];
        Ok(Self {
            z_a: config.parsed(args.z_a, "zA")?,
            z_b: config.parsed(args.z_b, "zB")?,
            config,
            env,
            parity,
            omega0,
            orientation,
            magnitude,
            lateral,
        })
    }

    fn pair(&self, z_a: f64, z_b: f64) -> Result<PairConfig> {
        let (da, db) = self.orientation.dipoles(self.magnitude);
        let ra = Position3::new(self.lateral[0], self.lateral[1], z_a)?;
        let rb = Position3::new(self.lateral[2], self.lateral[3], z_b)?;
        PairConfig::new(Atom::new(ra, da), Atom::new(rb, db), self.omega0, self.parity, self.env)
    }
}

fn required(value: Option<f64>, field: &str) -> Result<f64> {
    value.ok_or_else(|| Error::config(field, "required"))
}

fn format_rate(cfg: &PairConfig, r: &RateResult) -> String {
    let lam0 = transition_wavelength(cfg.omega0.value()).unwrap_or(f64::NAN);
    let rows: [(&str, String); 13] = [
        ("environment", cfg.environment.name().to_string()),
        ("parity", cfg.parity.name().to_string()),
        ("omega0_rad_s", format!("{:.6e}", cfg.omega0.value())),
        ("lambda0_m", format!("{lam0:.6e}")),
        ("separation_m", format!("{:.6e}", cfg.separation())),
        ("gamma_total_si", format!("{:.9e}", r.gamma_total)),
        ("gamma_A_si", format!("{:.9e}", r.gamma_a)),
        ("gamma_B_si", format!("{:.9e}", r.gamma_b)),
        ("gamma_AB_si", format!("{:.9e}", r.gamma_ab)),
        ("gamma_bulk_si", format!("{:.9e}", r.gamma_bulk)),
        ("gamma_scatter_si", format!("{:.9e}", r.gamma_scatter)),
        ("scaled_pair_sum", format!("{:.9}", r.scaled_pair_sum)),
        ("scaled_single", format!("{:.9}", r.scaled_single)),
    ];
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k:<18}{v}\n"));
    }
    out
}

fn cmd_rate(args: &RateArgs, out: &mut dyn Write) -> Result<()> {
    let setup = PairSetup::resolve(&args.pair)?;
    let z_a = required(setup.z_a, "zA")?;
    let z_b = required(setup.z_b, "zB")?;
    let cfg = setup.pair(z_a, z_b)?;
    let r = collective_rate(&cfg)?;
    let mut text = format_rate(&cfg, &r);
    if args.csv {
        let table = crate::scenarios::SweepTable {
            normalization: Normalization::PairSum,
            rows: vec![crate::scenarios::SweepRow { abscissa: z_a, z_a, result: r }],
        };
        text.push_str(&csv_string(&table));
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let setup = PairSetup::resolve(&args.pair)?;
    let cfg = &setup.config;
    let parameter = match cfg.string(args.vary.as_ref(), "vary").as_deref() {
        None | Some("zA") => SweepParameter::AtomAHeight,
        Some("rho") | Some("separation") => SweepParameter::Separation,
        Some(other) => return Err(Error::config("vary", format!("expected zA or rho, got '{other}'"))),
    };
    let spacing = match cfg.string(args.spacing.as_ref(), "spacing").as_deref() {
        None | Some("linear") => Spacing::Linear,
        Some("log") => Spacing::Log,
        Some(other) => return Err(Error::config("spacing", format!("expected linear or log, got '{other}'"))),
    };
    let normalization = match cfg.string(args.normalization.as_ref(), "normalization").as_deref() {
        None | Some("pair_sum") => Normalization::PairSum,
        Some("single_atom") => Normalization::SingleAtom,
        Some(other) => {
            return Err(Error::config("normalization", format!("expected pair_sum or single_atom, got '{other}'")))
        }
    };
    let out_path: PathBuf = cfg
        .string(args.out.as_ref().map(|p| p.to_string_lossy().into_owned()).as_ref(), "out")
        .map(PathBuf::from)
        .ok_or_else(|| Error::config("out", "required"))?;
    let svg_path =
        cfg.string(args.svg.as_ref().map(|p| p.to_string_lossy().into_owned()).as_ref(), "svg").map(PathBuf::from);

    let lam0 = transition_wavelength(setup.omega0.value())?;
    let z_b = match (setup.z_b, setup.env, parameter) {
        (Some(z), _, _) => z,
        (None, Environment::FreeSpace, SweepParameter::Separation) => 0.0,
        _ => return Err(Error::config("zB", "required")),
    };
    let default_min = match parameter {
        SweepParameter::AtomAHeight => z_b + MIN_SPACING,
        SweepParameter::Separation => MIN_SPACING,
    };
    let min = cfg.parsed(args.min, "min")?.unwrap_or(default_min);
    let max = cfg.parsed(args.max, "max")?.unwrap_or(10.0 * lam0);
    let count = cfg.parsed(args.count, "count")?.unwrap_or(DEFAULT_SAMPLES);

    let first = match parameter {
        SweepParameter::AtomAHeight => min,
        SweepParameter::Separation => z_b + min,
    };
    let template = setup.pair(first, z_b)?;
    let spec = SweepSpec {
        parameter,
        min,
        max,
        count,
        spacing,
        template,
        orientation: setup.orientation,
        dipole_magnitude: setup.magnitude,
        normalization,
    };
    let table = run_sweep(&spec)?;
    emit_csv(&table, &out_path)?;
    if let Some(svg) = svg_path {
        let label = format!("{} {} {}", setup.env.name(), setup.orientation.name(), setup.parity.name());
        let series = [PlotSeries::from_table(&label, LineStyle::Continuous, "blue", &table)];
        let x_label = match parameter {
            SweepParameter::AtomAHeight => "z_A (m)",
            SweepParameter::Separation => "interatomic distance ϱ (m)",
        };
        emit_svg(&series, "Collective decay rate", x_label, normalization.axis_label(), &svg)?;
    }
    writeln!(out, "wrote {} rows to {}", table.rows.len(), out_path.display())
        .map_err(|e| Error::io("<stdout>", e))
}

fn cmd_figure(args: &FigureArgs, out: &mut dyn Write) -> Result<()> {
    let id = FigureId::parse(&args.id)?;
    let mut opts = PresetOptions { samples: args.samples, ..Default::default() };
    if let Some(o) = &args.orient {
        opts.fig1_orientation = parse_orientation(o)?;
    }
    let preset = figure_preset(id, &opts)?;

    let data = if args.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?;
        pool.install(|| run_figure(&preset))?
    } else {
        run_figure(&preset)?
    };

    write_atomic(&args.out, data.csv_string().as_bytes())?;
    if let Some(dir) = &args.curves_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (curve, table) in preset.curves.iter().zip(&data.tables) {
            emit_csv(table, &dir.join(format!("{}_{}.csv", id.name(), curve.label)))?;
        }
    }
    if let Some(svg) = &args.svg {
        emit_svg(&data.series(), &preset.title, data.x_label(), preset.normalization.axis_label(), svg)?;
    }
    writeln!(
        out,
        "{}: {} curves x {} samples ({} normalization) -> {}",
        id.name(),
        preset.curves.len(),
        args.samples,
        preset.normalization.name(),
        args.out.display()
    )
    .map_err(|e| Error::io("<stdout>", e))
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<bool> {
    let mut opts = ValidationOptions::default();
    if args.quick {
        opts.sample_scale = 0.1;
    }
    if let Some(seed) = args.seed {
        opts.seed = seed;
    }
    let reports = run_validation(&opts);
    let mut text = String::new();
    for r in &reports {
        text.push_str(&format!(
            "{} {:<30} samples={:<5} max_error={:.3e} tolerance={:.1e}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.samples,
            r.max_error,
            r.tolerance
        ));
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))?;
    Ok(reports.iter().all(|r| r.passed))
}

/// Parses `argv` (including the program name) and runs the command,
/// writing normal output to `out` and diagnostics to `err`. Returns the
/// process exit code: 0 on success, 1 on usage/domain errors or failed
/// validation, 2 on I/O errors.
pub fn run_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{line}");
            return 1;
        }
    };

    let result = match &cli.command {
        Command::Rate(a) => cmd_rate(a, out).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a, out).map(|_| true),
        Command::Figure(a) => cmd_figure(a, out).map(|_| true),
        Command::Validate(a) => cmd_validate(a, out),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with_io(std::iter::once("collective-decay").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_file_parsing() {
        let c = ConfigFile::parse("# comment\nenv = mirror\n zA=2e-9 # trailing\n\n").unwrap();
        assert_eq!(c.0["env"], "mirror");
        assert_eq!(c.parsed::<f64>(None, "zA").unwrap(), Some(2e-9));
        assert_eq!(c.parsed(Some(5e-9), "zA").unwrap(), Some(5e-9));
        assert!(ConfigFile::parse("novalue").is_err());
        let bad = ConfigFile::parse("zA = abc").unwrap();
        assert!(bad.parsed::<f64>(None, "zA").unwrap_err().to_string().starts_with("zA:"));
    }

    #[test]
    fn vector_parsing() {
        assert_eq!(parse_vector("dA", "0,0,1").unwrap(), DipoleVector::along_z(1.0));
        assert!(parse_vector("dA", "0,0").is_err());
        assert!(parse_vector("dA", "0,0,0").is_err());
        assert!(parse_vector("dA", "a,0,1").unwrap_err().to_string().starts_with("dA:"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_capture(&["rate", "--bogus", "1"]);
        assert_eq!(code, 1);
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn malformed_number_names_field() {
        let (code, _, err) = run_capture(&["rate", "--zA", "abc", "--zB", "1e-9"]);
        assert_eq!(code, 1);
        assert!(err.contains("--zA"), "{err}");
    }

    #[test]
    fn missing_height_names_field() {
        let (code, _, err) = run_capture(&["rate", "--zA", "2e-9"]);
        assert_eq!(code, 1);
        assert!(err.contains("zB"), "{err}");
    }

    #[test]
    fn mirror_geometry_violation() {
        let (code, _, err) = run_capture(&["rate", "--env", "mirror", "--zA", "2e-9", "--zB", "-1e-9"]);
        assert_eq!(code, 1);
        assert!(err.contains("zB"), "{err}");
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("rate"));
    }
}
