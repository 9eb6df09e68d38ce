use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use toml::Value;

use super::config::{validate_with, Kind};
use super::{run_experiment, threads_from_env};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qlab",
    version,
    about = "Run quantisation experiments and write CSV reports",
    after_help = "Every experiment writes <output> (CSV) and <output>.summary.json.\n\
                  Exit status: 0 all checks pass, 1 numerical failure, 2 invalid config.\n\
                  QLAB_THREADS (default 1) sets the number of worker threads."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Config file; flags override its entries.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Experiment name (default: the subcommand).
    #[arg(long)]
    name: Option<String>,
    /// CSV report path (default: <name>.csv).
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// RNG seed; required by sampling experiments.
    #[arg(long)]
    seed: Option<u64>,
    /// Pass tolerance (each kind documents its default).
    #[arg(long)]
    tol: Option<f64>,
}

/// Comma-separated numbers; brackets are ignored so `[[0,1],[-1,0]]` works.
#[derive(Debug, Clone)]
struct FloatList(Vec<f64>);

fn parse_list(s: &str) -> Result<FloatList, String> {
    let cleaned: String = s.chars().filter(|c| !matches!(c, '[' | ']') && !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Ok(FloatList(Vec::new()));
    }
    cleaned
        .split(',')
        .map(|x| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()
        .map(FloatList)
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run any config file; the kind is taken from the file.
    Run {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Star product of two trigonometric polynomials on the noncommutative torus.
    #[command(after_help = "Mode lists look like \"(1,0):1,0;(0,1):0,-0.5\" (mode:re,im).\n\
                            Prints the product as a mode list.\n\
                            CSV columns: r_1..r_n (mode), re, im.\n\
                            --tol (default 1e-14) applies to the --expect comparison.")]
    NctorusStar {
        #[command(flatten)]
        common: Common,
        /// Bivector as a row-major list.
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        eta: Option<FloatList>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hbar: Option<f64>,
        /// Expected product; the run fails when it differs by more than --tol.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
    },
    /// Semiclassical limit of the torus star commutator over random pairs.
    #[command(after_help = "CSV columns: hbar, max_error, bound, slope_running.\n\
                            Passes when every trial is within its Taylor bound and the\n\
                            fitted log-log slope is 2 +- slope_tol.")]
    Semiclassical {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        eta: Option<FloatList>,
        #[arg(long, value_parser = parse_list)]
        hbar_list: Option<FloatList>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        max_modes: Option<u64>,
        #[arg(long)]
        max_freq: Option<u64>,
        #[arg(long)]
        slope_tol: Option<f64>,
    },
    /// Commutator of quantised fiber-polynomial symbols on a periodic grid.
    #[command(after_help = "Symbols are polynomials in X1..Xn (or X when n = 1) with\n\
                            trigonometric-polynomial coefficients in p, e.g. \"X^2\" or \"sin(p)\".\n\
                            CSV columns: hbar, deviation, slope.")]
    Weyl {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        grid_size: Option<u64>,
        /// Box period (default 2pi).
        #[arg(long)]
        period: Option<f64>,
        #[arg(long, value_parser = parse_list)]
        hbar_list: Option<FloatList>,
        #[arg(long)]
        symbol_f: Option<String>,
        #[arg(long)]
        symbol_g: Option<String>,
        #[arg(long)]
        max_deviation: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        expect_slope: Option<f64>,
        #[arg(long)]
        slope_tol: Option<f64>,
    },
    /// RK4 solution of t alpha' + alpha = t against a/t + t/2.
    #[command(after_help = "CSV columns: t, alpha, closed_form, deviation.\n--tol defaults to 1e-8.")]
    SphereOde {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Initial value (default a/t0 + t0/2).
        #[arg(long, allow_hyphen_values = true)]
        alpha0: Option<f64>,
    },
    /// Residual of the Poisson-map condition for a map TP -> P.
    #[command(after_help = "CSV columns: sample_id, unorm, residual, then rows `max` and `mean`.\n\
                            --tol defaults to 1e-8 (torus) or 1e-6 (sphere). With\n\
                            --expect-poisson false every residual must be at least --tol.")]
    PoissonResidual {
        #[command(flatten)]
        common: Common,
        /// torus or sphere.
        #[arg(long)]
        geometry: Option<String>,
        /// arcsin, half or file.
        #[arg(long)]
        profile: Option<String>,
        /// CSV with columns t and alpha (or t and mu).
        #[arg(long, value_name = "FILE")]
        profile_file: Option<PathBuf>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        umin: Option<f64>,
        #[arg(long)]
        umax: Option<f64>,
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        eta: Option<FloatList>,
        #[arg(long)]
        fd_step: Option<f64>,
        #[arg(long)]
        expect_poisson: Option<bool>,
    },
    /// Closed-form differentials of the sphere exponential against finite differences.
    #[command(after_help = "CSV columns: sample_id, unorm, d1_exp_err, d2_exp_err, jacobi_err, deta_norm.\n\
                            --tol defaults to 1e-7; the differential must also have rank 2.")]
    JacobiCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        umax: Option<f64>,
        #[arg(long)]
        fd_step: Option<f64>,
    },
    /// Antisymmetry, Jacobi and Leibniz residuals of a Lie-Poisson chart.
    #[command(after_help = "Chart files hold base_dim, fiber_dim, B ([j][k][h]) and rho.\n\
                            CSV columns: sample_id, antisymmetry, jacobi_residual, leibniz.\n\
                            --tol defaults to 1e-8.")]
    BracketValidate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "FILE")]
        chart: Option<PathBuf>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        umax: Option<f64>,
        #[arg(long)]
        zmax: Option<f64>,
        #[arg(long)]
        fd_step: Option<f64>,
    },
}

#[derive(Default)]
struct Overrides(Vec<(&'static str, Value)>);

impl Overrides {
    fn float(&mut self, key: &'static str, v: Option<f64>) -> &mut Self {
        if let Some(v) = v {
            self.0.push((key, Value::Float(v)));
        }
        self
    }
    fn int(&mut self, key: &'static str, v: Option<u64>) -> &mut Self {
        if let Some(v) = v {
            self.0.push((key, Value::Integer(v.min(i64::MAX as u64) as i64)));
        }
        self
    }
    fn string(&mut self, key: &'static str, v: Option<String>) -> &mut Self {
        if let Some(v) = v {
            self.0.push((key, Value::String(v)));
        }
        self
    }
    fn path(&mut self, key: &'static str, v: Option<PathBuf>) -> &mut Self {
        // flags are relative to the working directory, not the config file
        let v = v.map(|p| std::path::absolute(&p).unwrap_or(p).to_string_lossy().into_owned());
        self.string(key, v)
    }
    fn list(&mut self, key: &'static str, v: Option<FloatList>) -> &mut Self {
        if let Some(FloatList(v)) = v {
            self.0.push((key, Value::Array(v.into_iter().map(Value::Float).collect())));
        }
        self
    }
    fn boolean(&mut self, key: &'static str, v: Option<bool>) -> &mut Self {
        if let Some(v) = v {
            self.0.push((key, Value::Boolean(v)));
        }
        self
    }
}

fn split(command: Command) -> (Option<Kind>, Common, Overrides) {
    let mut o = Overrides::default();
    let (kind, common) = match command {
        Command::Run { config, output } => {
            let common = Common { config: Some(config), name: None, output, seed: None, tol: None };
            return (None, common, o);
        }
        Command::NctorusStar { common, eta, a, b, hbar, expect } => {
            o.list("eta", eta).string("a", a).string("b", b).float("hbar", hbar).string("expect", expect);
            (Kind::NctorusStar, common)
        }
        Command::Semiclassical { common, eta, hbar_list, trials, max_modes, max_freq, slope_tol } => {
            o.list("eta", eta)
                .list("hbar_list", hbar_list)
                .int("trials", trials)
                .int("max_modes", max_modes)
                .int("max_freq", max_freq)
                .float("slope_tol", slope_tol);
            (Kind::Semiclassical, common)
        }
        Command::Weyl { common, n, grid_size, period, hbar_list, symbol_f, symbol_g, max_deviation, expect_slope, slope_tol } => {
            o.int("n", n)
                .int("grid_size", grid_size)
                .float("period", period)
                .list("hbar_list", hbar_list)
                .string("symbol_f", symbol_f)
                .string("symbol_g", symbol_g)
                .float("max_deviation", max_deviation)
                .float("expect_slope", expect_slope)
                .float("slope_tol", slope_tol);
            (Kind::Weyl, common)
        }
        Command::SphereOde { common, a, t0, t1, step, alpha0 } => {
            o.float("a", a).float("t0", t0).float("t1", t1).float("step", step).float("alpha0", alpha0);
            (Kind::SphereOde, common)
        }
        Command::PoissonResidual { common, geometry, profile, profile_file, samples, umin, umax, eta, fd_step, expect_poisson } => {
            o.string("geometry", geometry)
                .string("profile", profile)
                .path("profile_file", profile_file)
                .int("samples", samples)
                .float("umin", umin)
                .float("umax", umax)
                .list("eta", eta)
                .float("fd_step", fd_step)
                .boolean("expect_poisson", expect_poisson);
            (Kind::PoissonResidual, common)
        }
        Command::JacobiCheck { common, samples, umax, fd_step } => {
            o.int("samples", samples).float("umax", umax).float("fd_step", fd_step);
            (Kind::JacobiCheck, common)
        }
        Command::BracketValidate { common, chart, samples, umax, zmax, fd_step } => {
            o.path("chart", chart).int("samples", samples).float("umax", umax).float("zmax", zmax).float("fd_step", fd_step);
            (Kind::BracketValidate, common)
        }
    };
    (Some(kind), common, o)
}

/// Entry point of the `qlab` binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID_CONFIG } else { EXIT_PASS };
        }
    };
    let (kind, common, mut overrides) = split(cli.command);
    let (text, base_dir) = match &common.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => (text, path.parent().map(Path::to_path_buf).unwrap_or_default()),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return EXIT_INVALID_CONFIG;
            }
        },
        None => (String::new(), PathBuf::from(".")),
    };
    overrides
        .string("name", common.name)
        .string("output", common.output.map(|p| p.to_string_lossy().into_owned()))
        .int("seed", common.seed)
        .float("tol", common.tol);
    let mut defaults = Vec::new();
    if let Some(kind) = kind {
        defaults.push(("name", Value::String(kind.as_str().into())));
        defaults.push(("output", Value::String(format!("{kind}.csv"))));
    }
    let config = match validate_with(&text, &base_dir, kind, overrides.0, defaults) {
        Ok(c) => c,
        Err(diags) => {
            let source = common.config.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "flags".into());
            eprintln!("error: invalid configuration ({source})");
            for d in diags {
                eprintln!("  {d}");
            }
            return EXIT_INVALID_CONFIG;
        }
    };
    let threads = match threads_from_env() {
        Ok(n) => n,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INVALID_CONFIG;
        }
    };
    let outcome = match run_experiment(&config, threads) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot write report {}: {e}", config.output.display());
            return EXIT_FAILURE;
        }
    };
    if let Some(out) = &outcome.stdout {
        println!("{out}");
    }
    let s = &outcome.summary;
    let status = if s.pass { "PASS" } else { "FAIL" };
    eprintln!("{status} {} ({}) max_error={:e} runtime_ms={:.1}", s.name, s.kind, s.max_error, s.runtime_ms);
    if let Some(f) = &s.failure {
        eprintln!("  {f}");
    }
    outcome.exit_code()
}
