//! The `tracs` command line.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 bad input
//! data, 4 I/O failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::eval::{
    bench_perturbation, direction_error_curve, gen_random_trajectory, perturb, run_experiment,
    short_side_trajectory, timing_csv, BenchMethod, CurvePoint, DirectionMethod, EpsDRule,
    EvalReport, ExperimentConfig, Method, ReferenceRule, TrajectorySource,
};
use crate::geometry::{Angle, RectSpace, UnitValue};
use crate::io::{read_points, read_trajectories, write_text, write_trajectories, FileError};
use crate::mechanisms::{mcirc_pdf, mdist_pdf, PrivacyBudget, RngSeed};
use crate::trajectory::{DiscreteSpace, Trajectory};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Io { .. } => CliError::Io(e.to_string()),
            FileError::Data { .. } => CliError::Data(e.to_string()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "tracs", version, about = "Locally private trajectory perturbation")]
pub struct Cli {
    /// Master seed; falls back to TRACS_SEED, then 0.
    #[arg(long, env = "TRACS_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write random trajectories.
    Gen(GenArgs),
    /// Perturb every trajectory of a file.
    Perturb(PerturbArgs),
    /// Snap every location to a grid cell centre or the nearest listed point.
    Round(RoundArgs),
    /// Run an experiment and write CSV and JSON reports.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SpaceArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a_sta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub a_end: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub b_sta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b_end: f64,
}

impl SpaceArgs {
    fn space(&self) -> CliResult<RectSpace<f64>> {
        RectSpace::new(self.a_sta, self.a_end, self.b_sta, self.b_end)
            .map_err(|e| CliError::Usage(format!("space: {e}")))
    }
}

#[derive(Debug, Clone, Args)]
pub struct DiscreteArgs {
    /// Round onto a ROWS x COLS grid over the space.
    #[arg(long, num_args = 2, value_names = ["ROWS", "COLS"], conflicts_with = "points")]
    pub grid: Option<Vec<usize>>,
    /// Round to the nearest location listed in this trajectory file.
    #[arg(long)]
    pub points: Option<PathBuf>,
}

impl DiscreteArgs {
    fn load(&self, space: RectSpace<f64>) -> CliResult<Option<DiscreteSpace<f64>>> {
        match (&self.grid, &self.points) {
            (Some(g), _) => Ok(Some(DiscreteSpace::grid(space, g[0], g[1])?)),
            (None, Some(p)) => {
                let pts = read_points(p)?;
                DiscreteSpace::points(pts)
                    .map(Some)
                    .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
            }
            (None, None) => Ok(None),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of trajectories.
    #[arg(long)]
    pub n: usize,
    /// Locations per trajectory.
    #[arg(long, default_value_t = 100)]
    pub length: usize,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReferenceArg {
    Start,
    Center,
    Random,
}

impl From<ReferenceArg> for ReferenceRule {
    fn from(r: ReferenceArg) -> Self {
        match r {
            ReferenceArg::Start => ReferenceRule::SpaceStart,
            ReferenceArg::Center => ReferenceRule::Center,
            ReferenceArg::Random => ReferenceRule::Random,
        }
    }
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// tracs_d, tracs_c, tracs_d_rsw or strawman.
    #[arg(long)]
    pub method: String,
    /// Per-location privacy budget.
    #[arg(long)]
    pub eps: f64,
    /// Direction share of the budget; defaults to eps*pi/(pi+1).
    #[arg(long)]
    pub eps_d: Option<f64>,
    /// Sector count for the strawman method.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    /// Public starting reference.
    #[arg(long, value_enum, default_value_t = ReferenceArg::Start)]
    pub reference: ReferenceArg,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub discrete: DiscreteArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["grid", "points"])))]
pub struct RoundArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub discrete: DiscreteArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Unit square, random trajectories, three methods.
    Fig5a,
    /// [0,2) x [0,10), random trajectories, three methods.
    Fig5b,
    /// [0,2) x [0,10), one trajectory along the bottom edge.
    Fig6,
    /// Piecewise mechanisms against the redesigned SW ones.
    Fig7,
    /// Dominant intervals for the circular example.
    Fig8,
    /// Direction error curves.
    Fig10,
    /// Per-location timing against the exponential mechanism.
    Bench,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").args(["preset", "config", "method"])))]
pub struct EvaluateArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Method for a flag-driven experiment.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    /// Privacy budgets to sweep.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long)]
    pub eps_d: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub n_traj: usize,
    #[arg(long, default_value_t = 100)]
    pub length: usize,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, value_enum, default_value_t = ReferenceArg::Start)]
    pub reference: ReferenceArg,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[command(flatten)]
    pub discrete: DiscreteArgs,
    /// Shrink preset sizes for a fast smoke run.
    #[arg(long)]
    pub quick: bool,
    /// Directory receiving `<name>.csv` and `<name>.json`.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to stderr.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    let seed = RngSeed(cli.seed);
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, seed),
        Command::Perturb(a) => cmd_perturb(a, seed),
        Command::Round(a) => cmd_round(a),
        Command::Evaluate(a) => cmd_evaluate(a, seed),
    }
}

fn cmd_gen(a: &GenArgs, seed: RngSeed) -> CliResult<()> {
    if a.n == 0 || a.length == 0 {
        return Err(CliError::Usage("--n and --length must be at least 1".into()));
    }
    let space = a.space.space()?;
    let trajs = (0..a.n)
        .map(|i| gen_random_trajectory(&space, a.length, &mut seed.derive(&[i as u64]).rng()))
        .collect::<crate::Result<Vec<_>>>()?;
    write_trajectories(&a.out, &trajs)?;
    Ok(())
}

fn load_within(path: &Path, space: &RectSpace<f64>) -> CliResult<Vec<Trajectory<f64>>> {
    let trajs = read_trajectories(path)?;
    for (i, t) in trajs.iter().enumerate() {
        t.check_within(space)
            .map_err(|e| CliError::Data(format!("{}: record {}: {e}", path.display(), i + 1)))?;
    }
    Ok(trajs)
}

fn eps_rule(eps_d: Option<f64>) -> EpsDRule {
    eps_d.map_or(EpsDRule::Heuristic, EpsDRule::Fixed)
}

fn cmd_perturb(a: &PerturbArgs, seed: RngSeed) -> CliResult<()> {
    let method = Method::parse(&a.method, Some(a.k))?;
    if !(a.eps > 0.0) || !a.eps.is_finite() {
        return Err(CliError::Usage(format!("--eps must be positive, got {}", a.eps)));
    }
    let rule = eps_rule(a.eps_d);
    if method != Method::TracsC {
        rule.budget(a.eps)?;
    }
    let space = a.space.space()?;
    let discrete = a.discrete.load(space)?;
    let trajs = load_within(&a.input, &space)?;
    let mut out = Vec::with_capacity(trajs.len());
    for (i, t) in trajs.iter().enumerate() {
        let mut rng = seed.derive(&[i as u64]).rng();
        let mut p = perturb(method, &space, t, a.eps, rule, a.reference.into(), &mut rng)?;
        if let Some(d) = &discrete {
            p = d.round_trajectory(&p)?;
        }
        out.push(p);
    }
    write_trajectories(&a.out, &out)?;
    Ok(())
}

fn cmd_round(a: &RoundArgs) -> CliResult<()> {
    let space = a.space.space()?;
    let discrete = a
        .discrete
        .load(space)?
        .ok_or_else(|| CliError::Usage("one of --grid or --points is required".into()))?;
    let trajs = if matches!(discrete, DiscreteSpace::Grid { .. }) {
        load_within(&a.input, &space)?
    } else {
        read_trajectories(&a.input)?
    };
    let out = trajs
        .iter()
        .map(|t| discrete.round_trajectory(t))
        .collect::<crate::Result<Vec<_>>>()?;
    write_trajectories(&a.out, &out)?;
    Ok(())
}

const FIG_EPS: [f64; 8] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];

fn tall_space() -> RectSpace<f64> {
    RectSpace::new(0.0, 2.0, 0.0, 10.0).expect("valid space")
}

/// Configurations for the figure presets that compare methods on AE.
pub fn preset_configs(preset: Preset, seed: RngSeed, quick: bool) -> Vec<ExperimentConfig> {
    let (count, length) = if quick { (10, 20) } else { (100, 100) };
    let random = |space, method| {
        let mut c = ExperimentConfig::random(space, method, FIG_EPS.to_vec(), count, length, seed.0);
        c.seed = seed;
        c
    };
    match preset {
        Preset::Fig5a | Preset::Fig5b => {
            let space = if preset == Preset::Fig5a { RectSpace::unit() } else { tall_space() };
            [Method::TracsD, Method::TracsC, Method::Strawman { k: 6 }]
                .into_iter()
                .map(|m| random(space, m))
                .collect()
        }
        Preset::Fig6 => {
            let space = tall_space();
            let traj = short_side_trajectory(&space, 100).expect("non-empty");
            [Method::TracsD, Method::TracsC]
                .into_iter()
                .map(|m| {
                    let mut c = random(space, m);
                    c.trajectories = TrajectorySource::Given(vec![traj.clone()]);
                    c.repeats = if quick { 20 } else { 1000 };
                    c
                })
                .collect()
        }
        Preset::Fig7 => [Method::TracsD, Method::TracsDRsw]
            .into_iter()
            .map(|m| random(RectSpace::unit(), m))
            .collect(),
        Preset::Fig8 | Preset::Fig10 | Preset::Bench => Vec::new(),
    }
}

fn write_report(dir: &Path, name: &str, csv: &str, json: &str) -> CliResult<()> {
    write_text(&dir.join(format!("{name}.csv")), csv)?;
    write_text(&dir.join(format!("{name}.json")), json)?;
    Ok(())
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable report")
}

fn cmd_evaluate(a: &EvaluateArgs, seed: RngSeed) -> CliResult<()> {
    if let Some(preset) = a.preset {
        let name = preset
            .to_possible_value()
            .expect("named preset")
            .get_name()
            .to_string();
        return match preset {
            Preset::Fig8 => {
                let (csv, js) = fig8_table()?;
                write_report(&a.out_dir, &name, &csv, &js)
            }
            Preset::Fig10 => {
                let n = if a.quick { 2_000 } else { 100_000 };
                let mut rows: Vec<CurvePoint> = Vec::new();
                let methods = [
                    DirectionMethod::Tracs,
                    DirectionMethod::Strawman { k: 3 },
                    DirectionMethod::Strawman { k: 6 },
                    DirectionMethod::Strawman { k: 12 },
                ];
                for (i, m) in methods.into_iter().enumerate() {
                    let mut rng = seed.derive(&[3, i as u64]).rng();
                    rows.extend(direction_error_curve(m, &FIG_EPS, n, &mut rng)?);
                }
                let mut csv = String::from("method,eps,mean_error,stderr\n");
                for r in &rows {
                    csv.push_str(&format!("{},{},{},{}\n", r.method, r.eps, r.mean_error, r.stderr));
                }
                write_report(&a.out_dir, &name, &csv, &json(&rows))
            }
            Preset::Bench => {
                let (grid, reps): (&[usize], usize) = if a.quick {
                    (&[100, 1_000], 500)
                } else {
                    (&[100, 10_000, 250_000], 10_000)
                };
                let rows = bench_perturbation(
                    &[BenchMethod::TracsD, BenchMethod::TracsC, BenchMethod::Exponential],
                    grid,
                    reps,
                    seed,
                )?;
                write_report(&a.out_dir, &name, &timing_csv(&rows), &json(&rows))
            }
            _ => {
                let mut report = EvalReport::default();
                for cfg in preset_configs(preset, seed, a.quick) {
                    report.extend(run_experiment(&cfg)?);
                }
                write_report(&a.out_dir, &name, &report.to_csv(), &report.to_json())
            }
        };
    }

    let cfg = if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if cfg.seed == RngSeed::default() {
            cfg.seed = seed;
        }
        cfg
    } else if let Some(method) = &a.method {
        let space = a.space.space()?;
        ExperimentConfig {
            space,
            method: Method::parse(method, Some(a.k))?,
            eps_grid: if a.eps.is_empty() { FIG_EPS.to_vec() } else { a.eps.clone() },
            eps_d: eps_rule(a.eps_d),
            trajectories: TrajectorySource::Random {
                count: a.n_traj,
                length: a.length,
            },
            repeats: a.repeats,
            seed,
            discretize: a.discrete.load(space)?,
            reference: a.reference.into(),
        }
    } else {
        return Err(CliError::Usage(
            "one of --preset, --config or --method is required".into(),
        ));
    };
    cfg.validate()
        .map_err(|e| CliError::Usage(format!("config: {e}")))?;
    let report = run_experiment(&cfg)?;
    write_report(&a.out_dir, "report", &report.to_csv(), &report.to_json())
}

/// Dominant intervals of both mechanisms for the circular example
/// `τ = (π, 0.5)` at `ε = 5` with the heuristic split.
pub fn fig8_table() -> CliResult<(String, String)> {
    let budget = PrivacyBudget::heuristic(5.0)?;
    let dir = mcirc_pdf(Angle::new(std::f64::consts::PI), budget.direction_eps())?;
    let dist = mdist_pdf(UnitValue::new(0.5)?, budget.distance_eps())?;
    let (dl, dh) = dir.high_interval();
    let (rl, rh) = dist.high_interval();
    let pi = std::f64::consts::PI;
    let csv = format!(
        "quantity,lo,hi,mass\ndirection_over_pi,{},{},{}\ndistance,{},{},{}\n",
        dl / pi,
        dh / pi,
        dir.high_mass(),
        rl,
        rh,
        dist.high_mass()
    );
    let js = json(&serde_json::json!({
        "eps": 5.0,
        "eps_d": budget.direction_eps(),
        "direction": {"lo": dl, "hi": dh, "mass": dir.high_mass()},
        "distance": {"lo": rl, "hi": rh, "mass": dist.high_mass()},
    }));
    Ok((csv, js))
}
