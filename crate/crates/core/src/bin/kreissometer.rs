// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kreissometer::cauchy::{CauchyConfig, Forcing};
use kreissometer::constants::SearchConfig;
use kreissometer::families::{FamilyKind, FamilySpec};
use kreissometer::report::{cmd_analyze, cmd_cauchy, cmd_family, cmd_grid, cmd_region, AnalyzeOptions, GridSpec};
use kreissometer::{Error, Mode, Result};

#[derive(Parser)]
#[command(name = "kreissometer", version, about = "Resolvent estimates and stability certificates for dense matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum, stability verdict, K1, K2 and 𝒦 for one matrix (JSON).
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        mode: ModeArgs,
        /// Build triangular and Lyapunov certificates.
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value_t = 1.0)]
        eps_scaling: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resolvent norm and ratio on a rectangular grid (CSV).
    Grid {
        path: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership of grid points in S(M,r) or T(M,r) (CSV).
    Region {
        path: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniformity sweep over a generated matrix family (JSON).
    Family {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        mode: ModeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contour reconstruction and resolvent envelopes (CSV plus JSON summary).
    Cauchy {
        path: PathBuf,
        #[command(flatten)]
        cauchy: CauchyArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Output directory for envelope.csv, solution.csv and summary.json;
        /// without it the envelope CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModeArgs {
    #[arg(long, default_value = "continuous")]
    mode: String,
    /// Shorthand for `--mode discrete`.
    #[arg(long)]
    discrete: bool,
}

impl ModeArgs {
    fn mode(&self) -> Result<Mode> {
        if self.discrete {
            Ok(Mode::Discrete)
        } else {
            self.mode.parse()
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Coarse search grid per axis.
    #[arg(long, default_value_t = SearchConfig::default().grid)]
    grid: usize,
    #[arg(long, default_value_t = SearchConfig::default().refine_iters)]
    refine_iters: usize,
    #[arg(long, default_value_t = SearchConfig::default().starts)]
    starts: usize,
    #[arg(long, default_value_t = SearchConfig::default().divergence_threshold)]
    divergence_threshold: f64,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = SearchConfig::default().nu_max)]
    nu_max: usize,
    /// Real-part (continuous) or radius (discrete) cap of the search box.
    #[arg(long)]
    re_max: Option<f64>,
    #[arg(long)]
    im_max: Option<f64>,
    #[arg(long, default_value_t = SearchConfig::default().tol)]
    tol: f64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            grid: self.grid,
            refine_iters: self.refine_iters,
            starts: self.starts,
            divergence_threshold: self.divergence_threshold,
            t_max: self.t_max,
            nu_max: self.nu_max,
            re_cap: self.re_max,
            im_cap: self.im_max,
            tol: self.tol,
            ..SearchConfig::default()
        }
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    re_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    re_max: f64,
    #[arg(long, allow_hyphen_values = true)]
    im_min: Option<f64>,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    im_max: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 64)]
    grid: usize,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            re_range: (self.re_min, self.re_max),
            im_range: (self.im_min.unwrap_or(-self.im_max), self.im_max),
            re_count: self.grid,
            im_count: self.grid,
        }
    }
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    shift_margin: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long)]
    symbol: Option<String>,
    /// Concatenated Matrix Market file with `% xi:` comments.
    #[arg(long)]
    symbol_table: Option<PathBuf>,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    xi_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    xi_max: f64,
}

impl FamilyArgs {
    fn spec(&self) -> Result<FamilySpec> {
        let kind: FamilyKind = self.kind.parse()?;
        let mut spec = FamilySpec::new(kind, self.n, self.count, self.seed);
        spec.shift_margin = self.shift_margin;
        spec.delta = self.delta;
        spec.theta = self.theta;
        spec.symbol = self.symbol.clone();
        spec.xi_range = (self.xi_min, self.xi_max);
        if let Some(p) = &self.symbol_table {
            spec.symbol_table = Some(read(p)?);
            spec.symbol.get_or_insert_with(|| "user-table".into());
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct CauchyArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long)]
    k_old: Option<f64>,
    #[arg(long)]
    k_new: Option<f64>,
    #[arg(long, default_value_t = 200.0)]
    y_max: f64,
    #[arg(long, default_value_t = 200_000)]
    y_count: usize,
    /// Evaluation times, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    t: Vec<f64>,
    /// constant, exponential-decay or gaussian-pulse.
    #[arg(long, default_value = "constant")]
    forcing: String,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes()).map_err(Error::from)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { path, search, mode, certify, eps_scaling, out } => {
            let opts = AnalyzeOptions { mode: mode.mode()?, certify, eps_scaling, search: search.config() };
            emit(out.as_deref(), &cmd_analyze(&read(&path)?, &opts)?)
        }
        Command::Grid { path, grid, out } => emit(out.as_deref(), &cmd_grid(&read(&path)?, &grid.spec())?),
        Command::Region { path, grid, r, mode, out } => {
            emit(out.as_deref(), &cmd_region(&read(&path)?, &grid.spec(), r, mode.mode()?)?)
        }
        Command::Family { family, search, mode, out } => {
            emit(out.as_deref(), &cmd_family(&family.spec()?, mode.mode()?, &search.config())?)
        }
        Command::Cauchy { path, cauchy, search, out } => {
            let text = read(&path)?;
            let m = kreissometer::io::read_matrix_market(&text)?;
            let forcing = Forcing::uniform(Forcing::parse_profile(&cauchy.forcing)?, m.n());
            let cfg = CauchyConfig {
                gamma: cauchy.gamma,
                alpha: cauchy.alpha,
                k_old: cauchy.k_old,
                k_new: cauchy.k_new,
                y_max: cauchy.y_max,
                y_count: cauchy.y_count,
                t_eval: cauchy.t,
            };
            let art = cmd_cauchy(&text, &forcing, &cfg, &search.config())?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
                    emit(Some(&dir.join("envelope.csv")), &art.envelope_csv)?;
                    emit(Some(&dir.join("solution.csv")), &art.solution_csv)?;
                    emit(Some(&dir.join("summary.json")), &art.summary_json)
                }
                None => emit(None, &art.envelope_csv),
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("KREISS_THREADS") {
        let n: usize =
            v.parse().map_err(|_| Error::Config(format!("KREISS_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::Config("KREISS_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kreissometer: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
