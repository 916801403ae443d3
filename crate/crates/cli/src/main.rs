mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{num, opt, Meta};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vortex_spectra::dispersion::{self, DispersionScan, ScanOptions};
use vortex_spectra::kernel_transversality as kt;
use vortex_spectra::operator_lab;
use vortex_spectra::profile::validate_hypotheses;
use vortex_spectra::sturm::{self, GeneratorOptions};
use vortex_spectra::{modes, Profile, ProfileConfig, Sign, SpectraError};

const THREADS_VAR: &str = "VORTEX_SPECTRA_THREADS";

#[derive(Parser)]
#[command(name = "vortex-spectra", version, about = "Spectral analysis of 2D Euler linearized around radial vortices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile constants, hypothesis checks and the first singular angular velocities.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Sample ζ_m across a window and refine its sign changes.
    ScanDispersion {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mode: ModeArgs,
        /// Override the regime window, as LO:HI or two values.
        #[arg(long, num_args = 1..=2, allow_negative_numbers = true, value_name = "LO:HI")]
        window: Vec<String>,
        #[arg(long, default_value_t = 41)]
        samples: usize,
    },
    /// Dispersion roots for a single m or a range LO:HI.
    FindEigenvalues {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "3")]
        m: String,
        #[arg(long, value_enum)]
        regime: Option<RegimeArg>,
        #[arg(long, default_value_t = dispersion::DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Root of ζ_m together with the higher-mode and mode-zero certificate.
    Certify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Kernel generator h*_m at the dispersion root.
    Kernel {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mode: ModeArgs,
        /// Uniform r samples in the exported profile.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Transversality integral I_m and its parts at the dispersion root.
    Transversality {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Eigenvalues of the Nyström discretization of L_n at given Ω (uses --grid nodes).
    OperatorSpectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Comma separated angular velocities.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        omega: Vec<f64>,
    },
    /// Mode-zero phase θ̄(Ω) and its crossings of πℤ above κ2.
    Mode0 {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 1..=2, allow_negative_numbers = true, value_name = "LO:HI", required = true)]
        window: Vec<String>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Profile description in TOML.
    profile: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 128)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Serialize)]
struct ModeArgs {
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    #[arg(long, default_value_t = dispersion::DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum RegimeArg {
    Scarcity,
    Abundance,
}

enum Failure {
    Validation(String),
    Numeric(SpectraError),
    Io(String),
}

impl From<SpectraError> for Failure {
    fn from(e: SpectraError) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numeric(e)
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Everything that determines an output, hashed into its metadata.
#[derive(Serialize)]
struct RunConfig<'a, X: Serialize> {
    command: &'a str,
    profile: &'a ProfileConfig,
    tol: f64,
    grid: usize,
    format: Format,
    options: X,
}

struct Ctx {
    command: &'static str,
    profile: Profile,
    config: ProfileConfig,
    tol: f64,
    grid: usize,
    format: Format,
    out: Option<PathBuf>,
}

impl Ctx {
    fn load(command: &'static str, c: &Common) -> Outcome<Ctx> {
        if !(c.tol > 0.0) {
            return Err(Failure::Validation(format!("--tol must be positive, got {}", c.tol)));
        }
        if c.grid < 16 {
            return Err(Failure::Validation(format!("--grid must be at least 16, got {}", c.grid)));
        }
        let text = std::fs::read_to_string(&c.profile)
            .map_err(|e| Failure::Io(format!("{}: {e}", c.profile.display())))?;
        let config: ProfileConfig = toml::from_str(&text)
            .map_err(|e| Failure::Validation(format!("{}: {e}", c.profile.display())))?;
        let profile = Profile::from_config(&config)?;
        Ok(Ctx { command, profile, config, tol: c.tol, grid: c.grid, format: c.format, out: c.out.clone() })
    }

    fn meta<X: Serialize>(&self, options: X) -> Meta {
        let run = RunConfig {
            command: self.command,
            profile: &self.config,
            tol: self.tol,
            grid: self.grid,
            format: self.format,
            options,
        };
        Meta::new(self.command, &run)
    }

    fn scan_opts(&self) -> ScanOptions {
        let mut o = ScanOptions::with_tol(self.tol);
        o.generator.grid = self.grid;
        o
    }

    fn gen_opts(&self) -> GeneratorOptions {
        GeneratorOptions::with_grid(self.grid, self.tol)
    }

    fn emit(&self, text: String) -> Outcome<()> {
        output::emit(&text, self.out.as_deref()).map_err(|e| {
            let path = self.out.as_deref().unwrap_or(Path::new("<stdout>"));
            Failure::Io(format!("{}: {e}", path.display()))
        })
    }

    fn write<T: Serialize>(&self, meta: &Meta, report: &T, header: &[&str], rows: impl FnOnce() -> Vec<Vec<String>>) -> Outcome<()> {
        let text = match self.format {
            Format::Json => output::json(meta, report),
            Format::Csv => output::csv(meta, header, &rows()),
        };
        self.emit(text)
    }
}

fn parse_window(parts: &[String]) -> Outcome<(f64, f64)> {
    let bad = || Failure::Validation(format!("--window expects LO:HI or two numbers, got {parts:?}"));
    let nums: Vec<&str> = match parts {
        [one] => one.split(':').collect(),
        [a, b] => vec![a.as_str(), b.as_str()],
        _ => return Err(bad()),
    };
    if nums.len() != 2 {
        return Err(bad());
    }
    let lo: f64 = nums[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = nums[1].trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Failure::Validation(format!("window must satisfy LO < HI, got {lo}:{hi}")));
    }
    Ok((lo, hi))
}

fn parse_modes(arg: &str) -> Outcome<Vec<usize>> {
    let bad = || Failure::Validation(format!("--m expects N or LO:HI, got {arg:?}"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match arg.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => (parse(arg)?, parse(arg)?),
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

/// Pick the regime from the profile sign unless one is given.
fn find_root(ctx: &Ctx, m: usize, regime: Option<RegimeArg>, alpha: f64) -> Outcome<DispersionScan> {
    scan_regime(&ctx.profile, m, regime, alpha, &ctx.scan_opts())
}

fn scan_regime(p: &Profile, m: usize, regime: Option<RegimeArg>, alpha: f64, opts: &ScanOptions) -> Outcome<DispersionScan> {
    let regime = regime.unwrap_or(if p.sign() == Sign::Positive { RegimeArg::Scarcity } else { RegimeArg::Abundance });
    let scan = match regime {
        RegimeArg::Scarcity => dispersion::scan_scarcity(p, m, opts)?,
        RegimeArg::Abundance => dispersion::scan_abundance(p, m, alpha, opts)?,
    };
    Ok(scan)
}

fn first_root(scan: &DispersionScan) -> Outcome<(usize, f64)> {
    match scan.roots.first() {
        Some(r) => Ok((scan.n, r.omega)),
        None => Err(Failure::Numeric(SpectraError::NoSignChange {
            lo: scan.window.0,
            hi: scan.window.1,
            zeta_lo: scan.zeta_values[0],
            zeta_hi: *scan.zeta_values.last().unwrap_or(&f64::NAN),
        })),
    }
}

#[derive(Serialize)]
struct AnalyzeReport {
    constants: vortex_spectra::profile::ProfileConstants,
    sign: Sign,
    forbidden_band: (f64, f64),
    validation: vortex_spectra::profile::ValidationReport,
    c0: vortex_spectra::profile::C0Estimate,
    omega_hat: Vec<(usize, f64)>,
    scarcity_bound: Option<f64>,
    kappa: Option<kt::KappaConstant>,
}

fn analyze(c: &Common, n_max: usize) -> Outcome<()> {
    let ctx = Ctx::load("analyze", c)?;
    let p = &ctx.profile;
    let validation = validate_hypotheses(&ctx.config, ctx.grid.max(64))?;
    let omega_hat = (1..=n_max).map(|n| modes::omega_hat(p, n).map(|o| (n, o))).collect::<Result<Vec<_>, _>>()?;
    let report = AnalyzeReport {
        constants: p.constants(),
        sign: p.sign(),
        forbidden_band: (p.kappa1(), p.kappa2()),
        validation,
        c0: p.empirical_c0(ctx.grid.max(64)),
        omega_hat,
        scarcity_bound: (p.sign() == Sign::Positive).then(|| dispersion::scarcity_bound(p)),
        kappa: kt::kappa_constant(p).ok(),
    };
    let meta = ctx.meta(n_max);
    ctx.write(&meta, &report, &["quantity", "value"], || {
        let k = &report.constants;
        let mut rows = vec![
            vec!["kappa1".into(), num(k.kappa1)],
            vec!["kappa2".into(), num(k.kappa2)],
            vec!["amplitude".into(), num(k.amplitude)],
            vec!["f0_at_0".into(), num(k.f0_at_0)],
            vec!["f0_at_1".into(), num(k.f0_at_1)],
            vec!["c0".into(), num(report.c0.c0)],
        ];
        rows.extend(report.omega_hat.iter().map(|(n, o)| vec![format!("omega_hat_{n}"), num(*o)]));
        if let Some(b) = report.scarcity_bound {
            rows.push(vec!["scarcity_bound".into(), num(b)]);
        }
        if let Some(kc) = report.kappa {
            rows.push(vec!["kappa".into(), num(kc.kappa)]);
            rows.push(vec!["kappa_laplace".into(), num(kc.kappa_laplace)]);
        }
        rows
    })
}

#[derive(Serialize)]
struct ScanArgs<'a> {
    mode: &'a ModeArgs,
    window: Option<(f64, f64)>,
    samples: usize,
}

fn scan_dispersion(c: &Common, mode: &ModeArgs, window: &[String], samples: usize) -> Outcome<()> {
    let ctx = Ctx::load("scan-dispersion", c)?;
    let p = &ctx.profile;
    if samples < 3 {
        return Err(Failure::Validation("--samples must be at least 3".into()));
    }
    let window = if window.is_empty() { None } else { Some(parse_window(window)?) };
    let mut opts = ctx.scan_opts();
    opts.samples = samples;
    let scan = match window {
        Some((lo, hi)) => {
            if hi >= p.kappa1() && lo <= p.kappa2() {
                return Err(Failure::Validation(format!(
                    "window [{lo}, {hi}] meets the forbidden band [{}, {}]",
                    p.kappa1(),
                    p.kappa2()
                )));
            }
            dispersion::scan_window(p, mode.m, lo, hi, &opts)?
        }
        None => scan_regime(p, mode.m, mode.regime, mode.alpha, &opts)?,
    };
    let meta = ctx.meta(ScanArgs { mode, window, samples });
    let omega_hat = modes::omega_hat(p, scan.n)?;
    ctx.write(&meta, &scan, &["kind", "n", "omega", "zeta", "omega_hat"], || {
        let mut rows: Vec<Vec<String>> = scan
            .omega_samples
            .iter()
            .zip(&scan.zeta_values)
            .map(|(o, z)| vec!["sample".into(), scan.n.to_string(), num(*o), num(*z), num(omega_hat)])
            .collect();
        for r in &scan.roots {
            rows.push(vec!["root".into(), scan.n.to_string(), num(r.omega), num(r.residual), num(omega_hat)]);
        }
        rows
    })
}

#[derive(Serialize)]
struct FoundRoot {
    m_requested: usize,
    m: usize,
    omega_hat: f64,
    root: dispersion::DispersionRoot,
    window: (f64, f64),
}

fn find_eigenvalues(c: &Common, m: &str, regime: Option<RegimeArg>, alpha: f64) -> Outcome<()> {
    let ctx = Ctx::load("find-eigenvalues", c)?;
    let ms = parse_modes(m)?;
    let mut found = Vec::new();
    for &mi in &ms {
        let scan = find_root(&ctx, mi, regime, alpha)?;
        let omega_hat = modes::omega_hat(&ctx.profile, scan.n)?;
        for root in &scan.roots {
            found.push(FoundRoot { m_requested: mi, m: scan.n, omega_hat, root: *root, window: scan.window });
        }
    }
    let meta = ctx.meta((m, regime, alpha));
    ctx.write(&meta, &found, &["m", "omega", "zeta_residual", "omega_hat", "bracket_lo", "bracket_hi"], || {
        found
            .iter()
            .map(|f| {
                vec![
                    f.m.to_string(),
                    num(f.root.omega),
                    num(f.root.residual),
                    num(f.omega_hat),
                    num(f.root.bracket.0),
                    num(f.root.bracket.1),
                ]
            })
            .collect()
    })
}

fn certify(c: &Common, mode: &ModeArgs, n_max: usize) -> Outcome<()> {
    let ctx = Ctx::load("certify", c)?;
    let scan = find_root(&ctx, mode.m, mode.regime, mode.alpha)?;
    let (m, omega) = first_root(&scan)?;
    let cert = dispersion::certify(&ctx.profile, m, omega, n_max, &ctx.scan_opts())?;
    let meta = ctx.meta((mode, n_max));
    ctx.write(&meta, &cert, &["mode", "omega_m", "zeta", "margin"], || {
        cert.higher_mode_zeta
            .iter()
            .zip(&cert.higher_mode_margins)
            .map(|(&(k, z), &(_, margin))| vec![k.to_string(), num(cert.omega_m), num(z), num(margin)])
            .collect()
    })
}

#[derive(Serialize)]
struct KernelExport<'a> {
    kernel: &'a kt::KernelGenerator,
    r: Vec<f64>,
    h_star_sampled: Vec<f64>,
}

fn kernel(c: &Common, mode: &ModeArgs, points: usize) -> Outcome<()> {
    let ctx = Ctx::load("kernel", c)?;
    if points < 2 {
        return Err(Failure::Validation("--points must be at least 2".into()));
    }
    let scan = find_root(&ctx, mode.m, mode.regime, mode.alpha)?;
    let (m, omega) = first_root(&scan)?;
    let kg = kt::kernel_generator(&ctx.profile, m, omega, &ctx.gen_opts())?;
    let r: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let h: Vec<f64> = r.iter().map(|&x| kg.eval(&ctx.profile, x)).collect();
    let report = KernelExport { kernel: &kg, r, h_star_sampled: h };
    let meta = ctx.meta((mode, points));
    ctx.write(&meta, &report, &["r", "h_star"], || {
        report.r.iter().zip(&report.h_star_sampled).map(|(x, y)| vec![num(*x), num(*y)]).collect()
    })
}

fn transversality(c: &Common, mode: &ModeArgs) -> Outcome<()> {
    let ctx = Ctx::load("transversality", c)?;
    let scan = find_root(&ctx, mode.m, mode.regime, mode.alpha)?;
    let (m, omega) = first_root(&scan)?;
    let rep = kt::transversality(&ctx.profile, m, omega, &ctx.gen_opts())?;
    let meta = ctx.meta(mode);
    let header = [
        "m", "omega_m", "I_m", "I_m1", "I_m2", "I_m3", "error_bar", "verdict", "kappa", "kappa_laplace", "asymptotic_ratio",
    ];
    ctx.write(&meta, &rep, &header, || {
        vec![vec![
            rep.m.to_string(),
            num(rep.omega_m),
            num(rep.i_m),
            num(rep.parts.0),
            num(rep.parts.1),
            num(rep.parts.2),
            num(rep.error_bar),
            rep.verdict.to_string(),
            opt(rep.kappa),
            opt(rep.kappa_laplace),
            opt(rep.asymptotic_ratio),
        ]]
    })
}

fn operator_spectrum(c: &Common, m: usize, omegas: &[f64]) -> Outcome<()> {
    let ctx = Ctx::load("operator-spectrum", c)?;
    let reports = omegas
        .iter()
        .map(|&o| operator_lab::discretize(&ctx.profile, o, m, ctx.grid).map(|op| op.spectrum()))
        .collect::<Result<Vec<_>, _>>()?;
    let meta = ctx.meta((m, omegas));
    ctx.write(&meta, &reports, &["n", "omega", "N", "index", "eigenvalue"], || {
        reports
            .iter()
            .flat_map(|rep| {
                let size = rep.nodes;
                rep.eigenvalues
                    .iter()
                    .enumerate()
                    .map(move |(i, e)| vec![rep.n.to_string(), num(rep.omega), size.to_string(), i.to_string(), num(*e)])
            })
            .collect()
    })
}

#[derive(Serialize)]
struct Mode0Report {
    window: (f64, f64),
    omega: Vec<f64>,
    theta_bar: Vec<f64>,
    exceptional: Vec<f64>,
}

fn mode0(c: &Common, window: &[String], samples: usize) -> Outcome<()> {
    let ctx = Ctx::load("mode0", c)?;
    let p = &ctx.profile;
    let (lo, hi) = parse_window(window)?;
    if samples < 2 {
        return Err(Failure::Validation("--samples must be at least 2".into()));
    }
    // only Ω > κ2 carries a mode-zero phase, so the window is clipped there
    let floor = p.kappa2() + 1e-6 * (1.0 + p.kappa2().abs());
    let lo = lo.max(floor);
    if !(hi > lo) {
        return Err(Failure::Validation(format!("window lies below kappa2 = {}", p.kappa2())));
    }
    let omega: Vec<f64> = (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
    let theta_bar = omega
        .iter()
        .map(|&o| sturm::prufer_trace(p, o, ctx.tol.max(1e-12)).map(|t| t.theta_bar))
        .collect::<Result<Vec<_>, _>>()?;
    let exceptional = sturm::mode0_exceptional_set(p, (lo, hi), samples, ctx.tol)?;
    let report = Mode0Report { window: (lo, hi), omega, theta_bar, exceptional };
    let meta = ctx.meta((window, samples));
    ctx.write(&meta, &report, &["kind", "omega", "theta_bar"], || {
        let mut rows: Vec<Vec<String>> = report
            .omega
            .iter()
            .zip(&report.theta_bar)
            .map(|(o, t)| vec!["sample".into(), num(*o), num(*t)])
            .collect();
        rows.extend(report.exceptional.iter().map(|o| vec!["exceptional".into(), num(*o), String::new()]));
        rows
    })
}

fn configure_threads() -> Outcome<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Validation(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Validation(format!("{THREADS_VAR}: {e}")))
}

fn run(cli: Cli) -> Outcome<()> {
    configure_threads()?;
    match &cli.command {
        Command::Analyze { common, n_max } => analyze(common, *n_max),
        Command::ScanDispersion { common, mode, window, samples } => scan_dispersion(common, mode, window, *samples),
        Command::FindEigenvalues { common, m, regime, alpha } => find_eigenvalues(common, m, *regime, *alpha),
        Command::Certify { common, mode, n_max } => certify(common, mode, *n_max),
        Command::Kernel { common, mode, points } => kernel(common, mode, *points),
        Command::Transversality { common, mode } => transversality(common, mode),
        Command::OperatorSpectrum { common, m, omega } => operator_spectrum(common, *m, omega),
        Command::Mode0 { common, window, samples } => mode0(common, window, *samples),
    }
}

#[derive(Serialize)]
struct Diagnostic<'a, D: Serialize> {
    status: &'a str,
    version: &'a str,
    diagnostic: D,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            let d = Diagnostic { status: "numeric_failure", version: output::VERSION, diagnostic: &e };
            eprintln!("{}", serde_json::to_string_pretty(&d).expect("diagnostic serializes"));
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(4)
        }
    }
}
