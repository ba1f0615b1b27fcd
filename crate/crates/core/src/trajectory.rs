//! Whole-trajectory perturbation and rounding to discrete spaces.
//!
//! Two decompositions are supported. The direction/distance one walks the
//! trajectory with a public reference location: each private point is
//! described by its direction from the reference and its distance
//! normalized by the room left to the boundary along that direction. Both
//! are perturbed, the perturbed point is reconstructed, and it becomes the
//! next reference. The Cartesian one perturbs the two normalized
//! coordinates of every point independently.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::geometry::{
    advance, boundary_distance, denormalize_coords, direction_between, normalize_coords, Angle,
    Location, RectSpace, UnitValue,
};
use crate::mechanisms::{
    sample_direction, sample_distance, sample_mdist, strawman_direction, Family, PrivacyBudget,
};
use crate::scalar::Scalar;

/// A non-empty ordered sequence of locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T = f64> {
    points: Vec<Location<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(points: Vec<Location<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("trajectory"));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            let (a, b) = p.to_f64_pair();
            return Err(param(format!("non-finite coordinate ({a}, {b})")));
        }
        Ok(Trajectory { points })
    }

    pub fn points(&self) -> &[Location<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Location<T>> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn check_within(&self, space: &RectSpace<T>) -> Result<()> {
        self.points.iter().try_for_each(|p| space.check_contains(p))
    }
}

/// Perturbs with the direction/distance decomposition, starting from the
/// public reference `reference`.
pub fn tracs_d<T: Scalar, R: Rng + ?Sized>(
    space: &RectSpace<T>,
    traj: &Trajectory<T>,
    budget: &PrivacyBudget<T>,
    reference: Location<T>,
    rng: &mut R,
) -> Result<Trajectory<T>> {
    tracs_d_with_family(space, traj, budget, reference, Family::Tracs, rng)
}

/// [`tracs_d`] with a choice of piecewise family for both sub-mechanisms.
pub fn tracs_d_with_family<T: Scalar, R: Rng + ?Sized>(
    space: &RectSpace<T>,
    traj: &Trajectory<T>,
    budget: &PrivacyBudget<T>,
    reference: Location<T>,
    family: Family,
    rng: &mut R,
) -> Result<Trajectory<T>> {
    let eps_d = budget.direction_eps();
    perturb_chained(
        space,
        traj,
        reference,
        family,
        budget.distance_eps(),
        |phi, rng| sample_direction(family, phi, eps_d, rng),
        rng,
    )
}

/// Same pipeline as [`tracs_d`] with the direction perturbed by k-RR over
/// `k` sectors followed by a uniform draw inside the reported sector.
pub fn strawman_trajectory<T: Scalar, R: Rng + ?Sized>(
    space: &RectSpace<T>,
    traj: &Trajectory<T>,
    budget: &PrivacyBudget<T>,
    k: usize,
    reference: Location<T>,
    rng: &mut R,
) -> Result<Trajectory<T>> {
    if k < 2 {
        return Err(param(format!("strawman needs k >= 2, got {k}")));
    }
    let eps_d = budget.direction_eps();
    perturb_chained(
        space,
        traj,
        reference,
        Family::Tracs,
        budget.distance_eps(),
        |phi, rng| strawman_direction(phi, k, eps_d, rng),
        rng,
    )
}

fn perturb_chained<T, R, F>(
    space: &RectSpace<T>,
    traj: &Trajectory<T>,
    reference: Location<T>,
    distance_family: Family,
    distance_eps: T,
    mut perturb_direction: F,
    rng: &mut R,
) -> Result<Trajectory<T>>
where
    T: Scalar,
    R: Rng + ?Sized,
    F: FnMut(Angle<T>, &mut R) -> Result<Angle<T>>,
{
    traj.check_within(space)?;
    space.check_contains(&reference)?;
    let mut reference = reference;
    let mut out = Vec::with_capacity(traj.len());
    for target in traj.points() {
        // The corner decomposition needs an interior reference.
        let r = space.nudge_inside(reference);
        let phi = direction_between(&r, target);
        let room = boundary_distance(space, &r, phi.value());
        let rbar = UnitValue::clamped(r.distance(target) / room);

        let phi_out = perturb_direction(phi, rng)?;
        let rbar_out = sample_distance(distance_family, rbar, distance_eps, rng)?;

        let room_out = boundary_distance(space, &r, phi_out.value());
        let next = space.clamp_half_open(advance(&r, phi_out, rbar_out.value() * room_out));
        out.push(next);
        reference = next;
    }
    Trajectory::new(out)
}

/// Perturbs each point's two normalized coordinates independently with the
/// distance mechanism at `ε/2` each.
pub fn tracs_c<T: Scalar, R: Rng + ?Sized>(
    space: &RectSpace<T>,
    traj: &Trajectory<T>,
    eps: T,
    rng: &mut R,
) -> Result<Trajectory<T>> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(param(format!("ε must be positive and finite, got {eps}")));
    }
    let half = eps / T::lit(2.0);
    let out = traj
        .points()
        .iter()
        .map(|p| {
            let (da, db) = normalize_coords(space, p)?;
            let da = sample_mdist(da, half, rng)?;
            let db = sample_mdist(db, half, rng)?;
            Ok(space.clamp_half_open(denormalize_coords(space, (da, db))))
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(out)
}

/// A disc of radius `R` around the origin, addressed in polar coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularSpace<T = f64> {
    radius: T,
}

impl<T: Scalar> CircularSpace<T> {
    pub fn new(radius: T) -> Result<Self> {
        if radius > T::zero() && radius.is_finite() {
            Ok(CircularSpace { radius })
        } else {
            Err(param(format!("radius must be positive and finite, got {radius}")))
        }
    }

    pub fn radius(&self) -> T {
        self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint<T = f64> {
    pub phi: Angle<T>,
    pub r: T,
}

impl<T: Scalar> PolarPoint<T> {
    pub fn new(phi: T, r: T) -> Self {
        PolarPoint {
            phi: Angle::new(phi),
            r,
        }
    }
}

/// Direction/distance perturbation on a disc. Direction and radius are
/// absolute here, so points are perturbed independently without a
/// reference chain.
pub fn tracs_d_circular<T: Scalar, R: Rng + ?Sized>(
    space: &CircularSpace<T>,
    traj: &[PolarPoint<T>],
    budget: &PrivacyBudget<T>,
    rng: &mut R,
) -> Result<Vec<PolarPoint<T>>> {
    traj.iter()
        .map(|p| {
            if !(p.r >= T::zero() && p.r <= space.radius) {
                return Err(param(format!(
                    "radius {} outside [0, {})",
                    p.r, space.radius
                )));
            }
            let phi = sample_direction(Family::Tracs, p.phi, budget.direction_eps(), rng)?;
            let rbar = UnitValue::clamped(p.r / space.radius);
            let rbar = sample_distance(Family::Tracs, rbar, budget.distance_eps(), rng)?;
            let r = (rbar.value() * space.radius).min(space.radius.step_down());
            Ok(PolarPoint { phi, r })
        })
        .collect()
}

/// `(row, col)` of the grid cell holding `loc`; rows follow `b`, columns `a`.
/// Cells are half-open, so a shared edge belongs to the cell above or to the
/// right of it; the far boundary belongs to the last cell.
pub fn round_to_grid<T: Scalar>(
    space: &RectSpace<T>,
    loc: &Location<T>,
    rows: usize,
    cols: usize,
) -> Result<(usize, usize)> {
    if rows == 0 || cols == 0 {
        return Err(param("grid dimensions must be at least 1"));
    }
    let (da, db) = normalize_coords(space, loc)?;
    let idx = |v: T, n: usize| {
        let n_t = T::from_usize(n).expect("grid size fits the scalar type");
        (v * n_t).floor().to_usize().unwrap_or(0).min(n - 1)
    };
    Ok((idx(db.value(), rows), idx(da.value(), cols)))
}

pub fn grid_cell_center<T: Scalar>(
    space: &RectSpace<T>,
    rows: usize,
    cols: usize,
    (row, col): (usize, usize),
) -> Location<T> {
    let half = T::lit(0.5);
    let frac = |i: usize, n: usize| {
        (T::from_usize(i).expect("index fits") + half) / T::from_usize(n).expect("size fits")
    };
    Location::new(
        space.a_sta() + frac(col, cols) * space.width(),
        space.b_sta() + frac(row, rows) * space.height(),
    )
}

/// Index of the nearest point by Euclidean distance, lowest index on ties.
pub fn nearest_point_index<T: Scalar>(loc: &Location<T>, points: &[Location<T>]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, p) in points.iter().enumerate() {
        let da = p.a - loc.a;
        let db = p.b - loc.b;
        let d2 = da * da + db * db;
        match best {
            Some((_, bd)) if !(d2 < bd) => {}
            _ => best = Some((i, d2)),
        }
    }
    best.map(|(i, _)| i)
}

pub fn round_to_points<T: Scalar>(loc: &Location<T>, points: &[Location<T>]) -> Result<Location<T>> {
    nearest_point_index(loc, points)
        .map(|i| points[i])
        .ok_or(Error::Empty("discrete point set"))
}

/// A discretization of the location space that perturbed outputs are
/// rounded onto.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DiscreteSpace<T = f64> {
    Grid {
        space: RectSpace<T>,
        rows: usize,
        cols: usize,
    },
    Points(Vec<Location<T>>),
}

impl<T: Scalar> DiscreteSpace<T> {
    pub fn grid(space: RectSpace<T>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(param("grid dimensions must be at least 1"));
        }
        Ok(DiscreteSpace::Grid { space, rows, cols })
    }

    pub fn points(points: Vec<Location<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("discrete point set"));
        }
        Ok(DiscreteSpace::Points(points))
    }

    /// Number of discrete locations.
    pub fn size(&self) -> usize {
        match self {
            DiscreteSpace::Grid { rows, cols, .. } => rows * cols,
            DiscreteSpace::Points(p) => p.len(),
        }
    }

    /// Cell centre or nearest listed point.
    pub fn round(&self, loc: &Location<T>) -> Result<Location<T>> {
        match self {
            DiscreteSpace::Grid { space, rows, cols } => {
                let cell = round_to_grid(space, loc, *rows, *cols)?;
                Ok(grid_cell_center(space, *rows, *cols, cell))
            }
            DiscreteSpace::Points(points) => round_to_points(loc, points),
        }
    }

    pub fn round_trajectory(&self, traj: &Trajectory<T>) -> Result<Trajectory<T>> {
        let pts = traj
            .points()
            .iter()
            .map(|p| self.round(p))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(pts)
    }
}
