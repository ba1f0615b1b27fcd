//! Utility metrics, the experiment runner and timing benchmarks.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::{Angle, Location, RectSpace, UnitValue};
use crate::mechanisms::{
    exponential_mechanism, sample_direction, sample_distance, strawman_direction, Family,
    PrivacyBudget, RngSeed,
};
use crate::scalar::{circular_distance, Scalar};
use crate::trajectory::{
    strawman_trajectory, tracs_c, tracs_d_with_family, DiscreteSpace, Trajectory,
};

/// Mean Euclidean distance between corresponding locations.
pub fn average_error<T: Scalar>(t: &Trajectory<T>, t2: &Trajectory<T>) -> Result<T> {
    if t.len() != t2.len() {
        return Err(Error::LengthMismatch {
            left: t.len(),
            right: t2.len(),
        });
    }
    let sum = t
        .points()
        .iter()
        .zip(t2.points())
        .fold(T::zero(), |acc, (p, q)| acc + p.distance(q));
    Ok(sum / T::from_usize(t.len()).expect("length fits the scalar type"))
}

/// `length` locations drawn i.i.d. uniformly over the half-open space.
pub fn gen_random_trajectory<T: Scalar, R: Rng + ?Sized>(
    space: &RectSpace<T>,
    length: usize,
    rng: &mut R,
) -> Result<Trajectory<T>> {
    if length == 0 {
        return Err(param("trajectory length must be at least 1"));
    }
    let pts = (0..length)
        .map(|_| {
            let a = space.a_sta() + T::unit_draw(rng) * space.width();
            let b = space.b_sta() + T::unit_draw(rng) * space.height();
            space.clamp_half_open(Location::new(a, b))
        })
        .collect();
    Trajectory::new(pts)
}

/// `length` evenly spaced locations along the bottom edge of the space.
pub fn short_side_trajectory(space: &RectSpace<f64>, length: usize) -> Result<Trajectory<f64>> {
    if length == 0 {
        return Err(param("trajectory length must be at least 1"));
    }
    let step = space.width() / length as f64;
    Trajectory::new(
        (0..length)
            .map(|i| Location::new(space.a_sta() + (i as f64 + 0.5) * step, space.b_sta()))
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TracsD,
    TracsC,
    Strawman { k: usize },
    TracsDRsw,
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::TracsD => "tracs_d".into(),
            Method::TracsC => "tracs_c".into(),
            Method::Strawman { k } => format!("strawman_k{k}"),
            Method::TracsDRsw => "tracs_d_rsw".into(),
        }
    }

    /// Parses `tracs_d`, `tracs_c`, `tracs_d_rsw`, `strawman` (with `k`) or `strawman_k<k>`.
    pub fn parse(name: &str, k: Option<usize>) -> Result<Method> {
        match name {
            "tracs_d" => Ok(Method::TracsD),
            "tracs_c" => Ok(Method::TracsC),
            "tracs_d_rsw" => Ok(Method::TracsDRsw),
            "strawman" => match k {
                Some(k) if k >= 2 => Ok(Method::Strawman { k }),
                Some(k) => Err(param(format!("strawman needs k >= 2, got {k}"))),
                None => Err(param("strawman needs k")),
            },
            other => match other.strip_prefix("strawman_k").map(str::parse::<usize>) {
                Some(Ok(k)) if k >= 2 => Ok(Method::Strawman { k }),
                _ => Err(param(format!("unknown method `{other}`"))),
            },
        }
    }
}

/// How the direction share `ε_d` is picked for a given `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EpsDRule {
    /// `ε_d = επ/(π+1)`.
    #[default]
    Heuristic,
    /// `ε_d = f·ε`.
    Fraction(f64),
    /// The same `ε_d` for every `ε`.
    Fixed(f64),
}

impl EpsDRule {
    pub fn budget(&self, eps: f64) -> Result<PrivacyBudget<f64>> {
        match *self {
            EpsDRule::Heuristic => PrivacyBudget::heuristic(eps),
            EpsDRule::Fraction(f) => PrivacyBudget::new(eps, f * eps),
            EpsDRule::Fixed(d) => PrivacyBudget::new(eps, d),
        }
    }
}

/// Public starting reference for the direction/distance methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceRule {
    /// `(a_sta, b_sta)`.
    #[default]
    SpaceStart,
    Center,
    /// Uniform over the space, drawn from the run's generator.
    Random,
    Fixed(Location<f64>),
}

impl ReferenceRule {
    pub fn pick<R: Rng + ?Sized>(&self, space: &RectSpace<f64>, rng: &mut R) -> Location<f64> {
        match *self {
            ReferenceRule::SpaceStart => space.start(),
            ReferenceRule::Center => space.center(),
            ReferenceRule::Random => space.clamp_half_open(Location::new(
                space.a_sta() + rng.random::<f64>() * space.width(),
                space.b_sta() + rng.random::<f64>() * space.height(),
            )),
            ReferenceRule::Fixed(p) => p,
        }
    }
}

/// Perturbs one trajectory with `method` at per-location budget `eps`.
pub fn perturb<R: Rng + ?Sized>(
    method: Method,
    space: &RectSpace<f64>,
    traj: &Trajectory<f64>,
    eps: f64,
    eps_d: EpsDRule,
    reference: ReferenceRule,
    rng: &mut R,
) -> Result<Trajectory<f64>> {
    match method {
        Method::TracsC => tracs_c(space, traj, eps, rng),
        Method::TracsD | Method::TracsDRsw => {
            let family = if method == Method::TracsD {
                Family::Tracs
            } else {
                Family::RedesignedSw
            };
            let budget = eps_d.budget(eps)?;
            let r0 = reference.pick(space, rng);
            tracs_d_with_family(space, traj, &budget, r0, family, rng)
        }
        Method::Strawman { k } => {
            let budget = eps_d.budget(eps)?;
            let r0 = reference.pick(space, rng);
            strawman_trajectory(space, traj, &budget, k, r0, rng)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectorySource {
    Random { count: usize, length: usize },
    Given(Vec<Trajectory<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub space: RectSpace<f64>,
    pub method: Method,
    pub eps_grid: Vec<f64>,
    #[serde(default)]
    pub eps_d: EpsDRule,
    pub trajectories: TrajectorySource,
    /// Perturbations per trajectory and `ε`.
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: RngSeed,
    #[serde(default)]
    pub discretize: Option<DiscreteSpace<f64>>,
    #[serde(default)]
    pub reference: ReferenceRule,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    /// Random trajectories on `space`, heuristic `ε_d`, one repeat.
    pub fn random(
        space: RectSpace<f64>,
        method: Method,
        eps_grid: Vec<f64>,
        count: usize,
        length: usize,
        seed: u64,
    ) -> Self {
        ExperimentConfig {
            space,
            method,
            eps_grid,
            eps_d: EpsDRule::Heuristic,
            trajectories: TrajectorySource::Random { count, length },
            repeats: 1,
            seed: RngSeed(seed),
            discretize: None,
            reference: ReferenceRule::SpaceStart,
        }
    }

    pub fn validate(&self) -> Result<()> {
        RectSpace::new(
            self.space.a_sta(),
            self.space.a_end(),
            self.space.b_sta(),
            self.space.b_end(),
        )
        .map_err(|e| param(format!("space: {e}")))?;
        if self.eps_grid.is_empty() {
            return Err(param("eps_grid: must not be empty"));
        }
        if let Some(e) = self.eps_grid.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(param(format!("eps_grid: values must be positive, got {e}")));
        }
        if self.repeats == 0 {
            return Err(param("repeats: must be at least 1"));
        }
        match &self.trajectories {
            TrajectorySource::Random { count, length } => {
                if *count == 0 || *length == 0 {
                    return Err(param("trajectories: count and length must be at least 1"));
                }
            }
            TrajectorySource::Given(ts) => {
                if ts.is_empty() {
                    return Err(param("trajectories: no trajectories given"));
                }
                for t in ts {
                    t.check_within(&self.space)
                        .map_err(|e| param(format!("trajectories: {e}")))?;
                }
            }
        }
        if let Method::Strawman { k } = self.method {
            if k < 2 {
                return Err(param(format!("method: strawman needs k >= 2, got {k}")));
            }
        }
        if !matches!(self.method, Method::TracsC) {
            for &eps in &self.eps_grid {
                self.eps_d
                    .budget(eps)
                    .map_err(|e| param(format!("eps_d: {e}")))?;
            }
        }
        if let Some(DiscreteSpace::Points(p)) = &self.discretize {
            if p.is_empty() {
                return Err(param("discretize: empty point set"));
            }
        }
        Ok(())
    }

    /// The private trajectories. Random ones depend only on the seed, so
    /// every method and every `ε` sees the same inputs.
    pub fn materialize(&self) -> Result<Vec<Trajectory<f64>>> {
        match &self.trajectories {
            TrajectorySource::Random { count, length } => (0..*count)
                .map(|i| {
                    let mut rng = self.seed.derive(&[0, i as u64]).rng();
                    gen_random_trajectory(&self.space, *length, &mut rng)
                })
                .collect(),
            TrajectorySource::Given(ts) => Ok(ts.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub method: String,
    pub eps: f64,
    pub mean_ae: f64,
    /// Standard error of `mean_ae` over the perturbation runs.
    pub stderr: f64,
    /// Wall time of perturbation plus rounding, per location.
    pub per_loc_time_s: f64,
    pub n_runs: usize,
    pub n_locations: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn extend(&mut self, other: EvalReport) {
        self.rows.extend(other.rows);
    }

    pub fn row(&self, method: &str, eps: f64) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.method == method && r.eps == eps)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,eps,mean_ae,stderr,per_loc_time_s\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.method, r.eps, r.mean_ae, r.stderr, r.per_loc_time_s
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs every `ε` of the grid over all trajectories and repeats.
///
/// Each run owns a generator derived from `(seed, ε index, trajectory,
/// repeat)`, so the error columns are identical across thread counts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let trajectories = cfg.materialize()?;
    let runs: Vec<(usize, usize)> = (0..trajectories.len())
        .flat_map(|t| (0..cfg.repeats).map(move |r| (t, r)))
        .collect();
    let n_locations: usize = trajectories.iter().map(|t| t.len()).sum::<usize>() * cfg.repeats;

    let mut report = EvalReport::default();
    for (ei, &eps) in cfg.eps_grid.iter().enumerate() {
        let results = runs
            .par_iter()
            .map(|&(ti, rep)| {
                let traj = &trajectories[ti];
                let mut rng = cfg.seed.derive(&[1, ei as u64, ti as u64, rep as u64]).rng();
                let start = Instant::now();
                let mut out = perturb(cfg.method, &cfg.space, traj, eps, cfg.eps_d, cfg.reference, &mut rng)?;
                if let Some(d) = &cfg.discretize {
                    out = d.round_trajectory(&out)?;
                }
                let elapsed = start.elapsed();
                Ok((average_error(traj, &out)?, elapsed))
            })
            .collect::<Result<Vec<(f64, Duration)>>>()?;
        let aes: Vec<f64> = results.iter().map(|r| r.0).collect();
        let time: Duration = results.iter().map(|r| r.1).sum();
        let (mean_ae, stderr) = mean_stderr(&aes);
        report.rows.push(EvalRow {
            method: cfg.method.name(),
            eps,
            mean_ae,
            stderr,
            per_loc_time_s: time.as_secs_f64() / n_locations as f64,
            n_runs: runs.len(),
            n_locations,
        });
    }
    Ok(report)
}

/// Single-input mechanisms whose error can be measured in isolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismId {
    /// Direction mechanism on `[0, 2π)`; error is the arc length.
    Mcirc,
    /// Distance mechanism on `[0, 1)`.
    Mdist,
    SwDirection,
    SwDistance,
}

/// `(1/n) Σ (y_i − input)²` over `n` draws.
pub fn empirical_mse<R: Rng + ?Sized>(
    mech: MechanismId,
    input: f64,
    eps: f64,
    n: usize,
    rng: &mut R,
) -> Result<f64> {
    if n == 0 {
        return Err(param("n must be at least 1"));
    }
    let mut sum = 0.0;
    match mech {
        MechanismId::Mcirc | MechanismId::SwDirection => {
            let family = if mech == MechanismId::Mcirc { Family::Tracs } else { Family::RedesignedSw };
            let phi = Angle::new(input);
            for _ in 0..n {
                let y = sample_direction(family, phi, eps, rng)?.value();
                let d = circular_distance(y, phi.value());
                sum += d * d;
            }
        }
        MechanismId::Mdist | MechanismId::SwDistance => {
            let family = if mech == MechanismId::Mdist { Family::Tracs } else { Family::RedesignedSw };
            let x = UnitValue::new(input)?;
            for _ in 0..n {
                let y = sample_distance(family, x, eps, rng)?.value();
                sum += (y - x.value()) * (y - x.value());
            }
        }
    }
    Ok(sum / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionMethod {
    Tracs,
    RedesignedSw,
    Strawman { k: usize },
}

impl DirectionMethod {
    pub fn name(&self) -> String {
        match self {
            DirectionMethod::Tracs => "tracs_d".into(),
            DirectionMethod::RedesignedSw => "tracs_d_rsw".into(),
            DirectionMethod::Strawman { k } => format!("strawman_k{k}"),
        }
    }

    pub fn perturb<R: Rng + ?Sized>(&self, phi: Angle<f64>, eps: f64, rng: &mut R) -> Result<Angle<f64>> {
        match *self {
            DirectionMethod::Tracs => sample_direction(Family::Tracs, phi, eps, rng),
            DirectionMethod::RedesignedSw => sample_direction(Family::RedesignedSw, phi, eps, rng),
            DirectionMethod::Strawman { k } => strawman_direction(phi, k, eps, rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub method: String,
    pub eps: f64,
    pub mean_error: f64,
    pub stderr: f64,
}

/// Mean arc-length error of direction perturbation over `n` uniformly
/// random private directions per `ε`.
pub fn direction_error_curve<R: Rng + ?Sized>(
    method: DirectionMethod,
    eps_grid: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<Vec<CurvePoint>> {
    if n == 0 {
        return Err(param("n must be at least 1"));
    }
    eps_grid
        .iter()
        .map(|&eps| {
            let errs = (0..n)
                .map(|_| {
                    let phi = Angle::new(rng.random::<f64>() * std::f64::consts::TAU);
                    let out = method.perturb(phi, eps, rng)?;
                    Ok(circular_distance(out.value(), phi.value()))
                })
                .collect::<Result<Vec<f64>>>()?;
            let (mean_error, stderr) = mean_stderr(&errs);
            Ok(CurvePoint {
                method: method.name(),
                eps,
                mean_error,
                stderr,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchMethod {
    /// Direction/distance perturbation, rounded onto an `m`-cell grid.
    TracsD,
    /// Cartesian perturbation, rounded onto an `m`-cell grid.
    TracsC,
    /// Exponential mechanism over `m` candidate points.
    Exponential,
}

impl BenchMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BenchMethod::TracsD => "tracs_d",
            BenchMethod::TracsC => "tracs_c",
            BenchMethod::Exponential => "exponential",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub method: String,
    pub m: usize,
    /// Median per-location time over timed batches.
    pub per_loc_time_s: f64,
    pub reps: usize,
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("method,m,per_loc_time_s,reps\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.method, r.m, r.per_loc_time_s, r.reps);
    }
    out
}

/// Grid with roughly square cells holding at least `m` cells.
fn grid_for(m: usize) -> (usize, usize) {
    let rows = ((m as f64).sqrt().floor() as usize).max(1);
    (rows, m.div_ceil(rows))
}

const BENCH_EPS: f64 = 5.0;
const TRAJ_LEN: usize = 64;

/// Median per-location time of each method for each size `m`, from
/// `reps` perturbed locations per cell (after one warm-up batch).
pub fn bench_perturbation(
    methods: &[BenchMethod],
    m_grid: &[usize],
    reps: usize,
    seed: RngSeed,
) -> Result<Vec<TimingRow>> {
    if reps == 0 {
        return Err(param("reps must be at least 1"));
    }
    let space = RectSpace::<f64>::unit();
    let mut rows = Vec::new();
    for &method in methods {
        for &m in m_grid {
            if m == 0 {
                return Err(param("m must be at least 1"));
            }
            let mut rng = seed.derive(&[2, m as u64]).rng();
            let per_loc = match method {
                BenchMethod::TracsD | BenchMethod::TracsC => {
                    let (r, c) = grid_for(m);
                    let grid = DiscreteSpace::grid(space, r, c)?;
                    let budget = PrivacyBudget::heuristic(BENCH_EPS)?;
                    let traj = gen_random_trajectory(&space, TRAJ_LEN, &mut rng)?;
                    let batches = reps.div_ceil(TRAJ_LEN).max(5);
                    time_batches(batches, TRAJ_LEN, || {
                        let out = if method == BenchMethod::TracsD {
                            tracs_d_with_family(&space, &traj, &budget, space.start(), Family::Tracs, &mut rng)?
                        } else {
                            tracs_c(&space, &traj, BENCH_EPS, &mut rng)?
                        };
                        std::hint::black_box(grid.round_trajectory(&out)?);
                        Ok(())
                    })?
                }
                BenchMethod::Exponential => {
                    let points: Vec<Location<f64>> = (0..m)
                        .map(|_| Location::new(rng.random(), rng.random()))
                        .collect();
                    let batch = (4096 / m).max(1);
                    let batches = reps.div_ceil(batch).max(5);
                    let queries: Vec<Location<f64>> = (0..batch)
                        .map(|_| Location::new(rng.random(), rng.random()))
                        .collect();
                    time_batches(batches, batch, || {
                        for x in &queries {
                            std::hint::black_box(exponential_mechanism(x, &points, BENCH_EPS, &mut rng)?);
                        }
                        Ok(())
                    })?
                }
            };
            rows.push(TimingRow {
                method: method.name().to_string(),
                m,
                per_loc_time_s: per_loc,
                reps,
            });
        }
    }
    Ok(rows)
}

fn time_batches<F: FnMut() -> Result<()>>(batches: usize, per_batch: usize, mut f: F) -> Result<f64> {
    f()?;
    let mut samples = Vec::with_capacity(batches);
    for _ in 0..batches {
        let start = Instant::now();
        f()?;
        samples.push(start.elapsed().as_secs_f64() / per_batch as f64);
    }
    samples.sort_by(|a, b| a.total_cmp(b));
    Ok(samples[samples.len() / 2])
}

/// Width and mass of the high-probability direction region for the
/// piecewise mechanism and for the k-sector strawman at the same `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorTradeoff {
    pub eps: f64,
    pub k: usize,
    pub tracs_width: f64,
    pub tracs_mass: f64,
    pub strawman_width: f64,
    pub strawman_mass: f64,
}

pub fn sector_tradeoff(eps: f64, k: usize) -> Result<SectorTradeoff> {
    let (tracs_width, tracs_mass) = crate::mechanisms::dominant_sector(eps)?;
    let (strawman_mass, _) = crate::mechanisms::krr_probabilities(k, eps)?;
    Ok(SectorTradeoff {
        eps,
        k,
        tracs_width,
        tracs_mass,
        strawman_width: std::f64::consts::TAU / k as f64,
        strawman_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn traj(pts: &[(f64, f64)]) -> Trajectory<f64> {
        Trajectory::new(pts.iter().map(|&(a, b)| Location::new(a, b)).collect()).unwrap()
    }

    #[test]
    fn average_error_examples() {
        let t = traj(&[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(average_error(&t, &t).unwrap(), 0.0);
        let t2 = traj(&[(1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(average_error(&t, &t2).unwrap(), 1.0);
        assert_eq!(average_error(&t2, &t).unwrap(), 1.0);
        let shifted = |t: &Trajectory<f64>| {
            traj(&t.points().iter().map(|p| (p.a + 3.5, p.b - 2.0)).collect::<Vec<_>>())
        };
        let moved = average_error(&shifted(&t), &shifted(&t2)).unwrap();
        assert!((moved - 1.0).abs() < 1e-12);
        assert!(matches!(
            average_error(&t, &traj(&[(0.0, 0.0)])),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn random_trajectory_properties() {
        let space = RectSpace::new(0.0, 2.0, 0.0, 10.0).unwrap();
        let mut rng = RngSeed(3).rng();
        let t = gen_random_trajectory(&space, 100_000, &mut rng).unwrap();
        assert_eq!(t.len(), 100_000);
        assert!(t.points().iter().all(|p| space.contains_half_open(p)));
        let n = t.len() as f64;
        let mean_a = t.points().iter().map(|p| p.a).sum::<f64>() / n;
        let mean_b = t.points().iter().map(|p| p.b).sum::<f64>() / n;
        let sd_a = 2.0 / 12f64.sqrt() / n.sqrt();
        let sd_b = 10.0 / 12f64.sqrt() / n.sqrt();
        assert!((mean_a - 1.0).abs() < 3.0 * sd_a);
        assert!((mean_b - 5.0).abs() < 3.0 * sd_b);

        let a = gen_random_trajectory(&space, 10, &mut RngSeed(9).rng()).unwrap();
        let b = gen_random_trajectory(&space, 10, &mut RngSeed(9).rng()).unwrap();
        assert_eq!(a, b);
        assert!(gen_random_trajectory(&space, 0, &mut rng).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::TracsD, Method::TracsC, Method::TracsDRsw, Method::Strawman { k: 6 }] {
            assert_eq!(Method::parse(&m.name(), None).unwrap(), m);
        }
        assert_eq!(Method::parse("strawman", Some(3)).unwrap(), Method::Strawman { k: 3 });
        assert!(Method::parse("strawman", None).is_err());
        assert!(Method::parse("strawman_k1", None).is_err());
        assert!(Method::parse("laplace", None).is_err());
    }

    #[test]
    fn config_validation_names_fields() {
        let mut cfg = ExperimentConfig::random(RectSpace::unit(), Method::TracsD, vec![1.0], 2, 3, 0);
        assert!(cfg.validate().is_ok());
        cfg.eps_grid = vec![0.0];
        assert!(cfg.validate().unwrap_err().to_string().contains("eps_grid"));
        cfg.eps_grid = vec![1.0];
        cfg.repeats = 0;
        assert!(cfg.validate().unwrap_err().to_string().contains("repeats"));
        cfg.repeats = 1;
        cfg.eps_d = EpsDRule::Fixed(2.0);
        assert!(cfg.validate().unwrap_err().to_string().contains("eps_d"));
        cfg.eps_d = EpsDRule::Heuristic;
        cfg.trajectories = TrajectorySource::Given(vec![traj(&[(3.0, 0.0)])]);
        assert!(cfg.validate().unwrap_err().to_string().contains("trajectories"));
    }

    #[test]
    fn experiment_is_reproducible_and_sized() {
        let mut cfg = ExperimentConfig::random(RectSpace::unit(), Method::TracsC, vec![2.0, 8.0], 20, 30, 17);
        cfg.repeats = 2;
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.rows.len(), 2);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.mean_ae.to_bits(), y.mean_ae.to_bits());
            assert_eq!(x.stderr.to_bits(), y.stderr.to_bits());
            assert_eq!(x.n_runs, 40);
            assert_eq!(x.n_locations, 1200);
            assert!(x.mean_ae >= 0.0);
        }
        assert!(a.rows[1].mean_ae < a.rows[0].mean_ae);
        let csv = a.to_csv();
        assert!(csv.starts_with("method,eps,mean_ae,stderr,per_loc_time_s\n"));
        assert_eq!(csv.lines().count(), 3);
        let parsed: EvalReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(parsed.rows.len(), 2);
    }

    #[test]
    fn experiment_with_rounding() {
        let mut cfg = ExperimentConfig::random(RectSpace::unit(), Method::TracsD, vec![4.0], 5, 10, 1);
        cfg.discretize = Some(DiscreteSpace::grid(RectSpace::unit(), 10, 10).unwrap());
        cfg.reference = ReferenceRule::Random;
        let r = run_experiment(&cfg).unwrap();
        assert!(r.rows[0].mean_ae > 0.0);
    }

    #[test]
    fn mse_examples() {
        let mut rng = RngSeed(4).rng();
        let m = empirical_mse(MechanismId::Mdist, 0.0, 4.0, 200_000, &mut rng).unwrap();
        assert!((m - 0.0492).abs() < 0.003);
        let mut prev = f64::INFINITY;
        for eps in [2.0, 4.0, 6.0, 8.0] {
            let m = empirical_mse(MechanismId::Mcirc, 1.0, eps, 100_000, &mut rng).unwrap();
            assert!(m < prev);
            prev = m;
        }
        assert!(empirical_mse(MechanismId::Mdist, 0.0, 4.0, 0, &mut rng).is_err());
        assert!(empirical_mse(MechanismId::SwDistance, 1.5, 4.0, 10, &mut rng).is_err());
        assert!(empirical_mse(MechanismId::SwDirection, 1.5, 4.0, 10, &mut rng).is_ok());
    }

    #[test]
    fn direction_error_limits() {
        let mut rng = RngSeed(5).rng();
        let n = 100_000;
        for method in [DirectionMethod::Tracs, DirectionMethod::Strawman { k: 6 }] {
            let c = direction_error_curve(method, &[1e-6], n, &mut rng).unwrap();
            // Uniform output: the arc error is uniform on [0, π], mean π/2.
            let sd = PI / 12f64.sqrt() / (n as f64).sqrt();
            assert!((c[0].mean_error - PI / 2.0).abs() < 4.0 * sd, "{:?}", c[0]);
        }
    }

    #[test]
    fn sector_tradeoff_closed_forms() {
        let small = sector_tradeoff(2.0, 12).unwrap();
        assert!(small.tracs_mass > small.strawman_mass);
        assert!(small.tracs_width > small.strawman_width);
        let large = sector_tradeoff(8.0, 6).unwrap();
        assert!(large.tracs_width < large.strawman_width);
        assert!((large.tracs_mass - large.strawman_mass).abs() < 0.05);
    }

    #[test]
    fn bench_rows() {
        let rows = bench_perturbation(
            &[BenchMethod::TracsC, BenchMethod::Exponential],
            &[100],
            500,
            RngSeed(1),
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.per_loc_time_s > 0.0));
        assert!(timing_csv(&rows).starts_with("method,m,per_loc_time_s,reps\n"));
        assert_eq!(grid_for(100), (10, 10));
        assert_eq!(grid_for(250_000), (500, 500));
        assert_eq!(grid_for(7), (2, 4));
    }

    #[test]
    fn short_side_layout() {
        let s = RectSpace::new(0.0, 2.0, 0.0, 10.0).unwrap();
        let t = short_side_trajectory(&s, 4).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.points().iter().all(|p| p.b == 0.0 && s.contains(p)));
    }
}
