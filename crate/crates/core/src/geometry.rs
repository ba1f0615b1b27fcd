//! Location-space decompositions.
//!
//! A rectangular space can be viewed from a reference location as a
//! direction in `[0, 2π)` plus a distance along that direction up to the
//! boundary, or as a pair of independent coordinates normalized into
//! `[0, 1)`. This module holds both views and the conversions between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Location<T = f64> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Location<T> {
    pub fn new(a: T, b: T) -> Self {
        Location { a, b }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Self) -> T {
        (self.a - other.a).hypot(self.b - other.b)
    }

    pub(crate) fn to_f64_pair(self) -> (f64, f64) {
        (
            self.a.to_f64().unwrap_or(f64::NAN),
            self.b.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// The bounded rectangle `[a_sta, a_end) × [b_sta, b_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectSpace<T = f64> {
    a_sta: T,
    a_end: T,
    b_sta: T,
    b_end: T,
}

impl<T: Scalar> RectSpace<T> {
    pub fn new(a_sta: T, a_end: T, b_sta: T, b_end: T) -> Result<Self> {
        let finite = [a_sta, a_end, b_sta, b_end].iter().all(|v| v.is_finite());
        if !finite || !(a_sta < a_end) || !(b_sta < b_end) {
            return Err(Error::Parameter(format!(
                "degenerate space [{a_sta}, {a_end}) x [{b_sta}, {b_end})"
            )));
        }
        Ok(RectSpace {
            a_sta,
            a_end,
            b_sta,
            b_end,
        })
    }

    /// `[0, 1) × [0, 1)`.
    pub fn unit() -> Self {
        RectSpace {
            a_sta: T::zero(),
            a_end: T::one(),
            b_sta: T::zero(),
            b_end: T::one(),
        }
    }

    pub fn a_sta(&self) -> T {
        self.a_sta
    }
    pub fn a_end(&self) -> T {
        self.a_end
    }
    pub fn b_sta(&self) -> T {
        self.b_sta
    }
    pub fn b_end(&self) -> T {
        self.b_end
    }

    pub fn width(&self) -> T {
        self.a_end - self.a_sta
    }

    pub fn height(&self) -> T {
        self.b_end - self.b_sta
    }

    pub fn diagonal(&self) -> T {
        self.width().hypot(self.height())
    }

    pub fn start(&self) -> Location<T> {
        Location::new(self.a_sta, self.b_sta)
    }

    pub fn center(&self) -> Location<T> {
        let half = T::lit(0.5);
        Location::new(
            self.a_sta + half * self.width(),
            self.b_sta + half * self.height(),
        )
    }

    /// Membership in the closed rectangle. Input locations are accepted on
    /// the far edges and mapped into the half-open domain on normalization.
    pub fn contains(&self, loc: &Location<T>) -> bool {
        loc.a >= self.a_sta && loc.a <= self.a_end && loc.b >= self.b_sta && loc.b <= self.b_end
    }

    /// Membership in the half-open rectangle that perturbed outputs live in.
    pub fn contains_half_open(&self, loc: &Location<T>) -> bool {
        loc.a >= self.a_sta && loc.a < self.a_end && loc.b >= self.b_sta && loc.b < self.b_end
    }

    pub fn is_interior(&self, loc: &Location<T>) -> bool {
        loc.a > self.a_sta && loc.a < self.a_end && loc.b > self.b_sta && loc.b < self.b_end
    }

    pub fn check_contains(&self, loc: &Location<T>) -> Result<()> {
        if loc.is_finite() && self.contains(loc) {
            Ok(())
        } else {
            let (a, b) = loc.to_f64_pair();
            Err(Error::OutsideSpace { a, b })
        }
    }

    /// Pulls a location into the half-open rectangle. Coordinates at or past
    /// the far edge land one representable step below it.
    pub fn clamp_half_open(&self, loc: Location<T>) -> Location<T> {
        let clamp = |v: T, lo: T, hi: T| {
            if v < lo {
                lo
            } else if v >= hi {
                hi.step_down()
            } else {
                v
            }
        };
        Location::new(
            clamp(loc.a, self.a_sta, self.a_end),
            clamp(loc.b, self.b_sta, self.b_end),
        )
    }

    /// Moves a reference location lying on the boundary one representable
    /// step inward on each offending axis.
    pub fn nudge_inside(&self, loc: Location<T>) -> Location<T> {
        let nudge = |v: T, lo: T, hi: T| {
            if v <= lo {
                lo.step_up()
            } else if v >= hi {
                hi.step_down()
            } else {
                v
            }
        };
        Location::new(
            nudge(loc.a, self.a_sta, self.a_end),
            nudge(loc.b, self.b_sta, self.b_end),
        )
    }
}

/// An angle reduced into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Angle<T = f64>(T);

impl<T: Scalar> Angle<T> {
    /// Reduces any finite value modulo 2π.
    pub fn new(value: T) -> Self {
        Angle(wrap_angle(value))
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// A value in the half-open unit interval `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct UnitValue<T = f64>(T);

impl<T: Scalar> UnitValue<T> {
    /// Accepts values in the closed unit interval; an exact 1 maps to the
    /// largest representable value below 1.
    pub fn new(value: T) -> Result<Self> {
        if !(value >= T::zero() && value <= T::one()) {
            return Err(Error::Parameter(format!("{value} is outside [0, 1]")));
        }
        Ok(Self::clamped(value))
    }

    /// Saturating constructor for values that may drift out of `[0, 1)`
    /// through rounding.
    pub fn clamped(value: T) -> Self {
        if value.is_nan() || value <= T::zero() {
            UnitValue(T::zero())
        } else if value >= T::one() {
            UnitValue(T::below_one())
        } else {
            UnitValue(value)
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Directions from a reference location to the four corners of the space,
/// counter-clockwise from the `(a_end, b_end)` corner. `phi3` and `phi4`
/// are lifted by 2π so that the four values increase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerAngles<T = f64> {
    pub phi1: T,
    pub phi2: T,
    pub phi3: T,
    pub phi4: T,
}

/// Direction from `reference` to `target` in `[0, 2π)`; 0 when they coincide.
pub fn direction_between<T: Scalar>(reference: &Location<T>, target: &Location<T>) -> Angle<T> {
    let db = target.b - reference.b;
    let da = target.a - reference.a;
    if da == T::zero() && db == T::zero() {
        return Angle(T::zero());
    }
    Angle::new(db.atan2(da))
}

pub fn corner_angles<T: Scalar>(
    space: &RectSpace<T>,
    reference: &Location<T>,
) -> Result<CornerAngles<T>> {
    if !space.is_interior(reference) {
        let (a, b) = reference.to_f64_pair();
        return Err(Error::BoundaryReference { a, b });
    }
    Ok(corners_unchecked(space, reference))
}

fn corners_unchecked<T: Scalar>(space: &RectSpace<T>, r: &Location<T>) -> CornerAngles<T> {
    let two_pi = T::two_pi();
    CornerAngles {
        phi1: (space.b_end - r.b).atan2(space.a_end - r.a),
        phi2: (space.b_end - r.b).atan2(space.a_sta - r.a),
        phi3: (space.b_sta - r.b).atan2(space.a_sta - r.a) + two_pi,
        phi4: (space.b_sta - r.b).atan2(space.a_end - r.a) + two_pi,
    }
}

/// Length of the ray from `reference` to the boundary along `phi`.
///
/// A reference on the boundary is first moved one representable step
/// inward, since the corner decomposition degenerates there.
pub fn distance_space_size<T: Scalar>(
    space: &RectSpace<T>,
    reference: &Location<T>,
    phi: Angle<T>,
) -> Result<T> {
    space.check_contains(reference)?;
    let r = space.nudge_inside(*reference);
    Ok(boundary_distance(space, &r, phi.value()))
}

/// Four-branch boundary distance for an interior reference.
pub(crate) fn boundary_distance<T: Scalar>(space: &RectSpace<T>, r: &Location<T>, phi: T) -> T {
    let c = corners_unchecked(space, r);
    let (sin, cos) = phi.sin_cos();
    if phi < c.phi1 || phi >= c.phi4 {
        (space.a_end - r.a) / cos
    } else if phi < c.phi2 {
        (space.b_end - r.b) / sin
    } else if phi < c.phi3 {
        (r.a - space.a_sta) / -cos
    } else {
        (r.b - space.b_sta) / -sin
    }
}

/// Coordinates relative to the lower-left corner, scaled into `[0, 1)`.
pub fn normalize_coords<T: Scalar>(
    space: &RectSpace<T>,
    loc: &Location<T>,
) -> Result<(UnitValue<T>, UnitValue<T>)> {
    space.check_contains(loc)?;
    Ok((
        UnitValue::clamped((loc.a - space.a_sta) / space.width()),
        UnitValue::clamped((loc.b - space.b_sta) / space.height()),
    ))
}

pub fn denormalize_coords<T: Scalar>(
    space: &RectSpace<T>,
    (da, db): (UnitValue<T>, UnitValue<T>),
) -> Location<T> {
    Location::new(
        space.a_sta + da.value() * space.width(),
        space.b_sta + db.value() * space.height(),
    )
}

/// `reference` displaced by `dist` along `phi`. No clamping.
pub fn advance<T: Scalar>(reference: &Location<T>, phi: Angle<T>, dist: T) -> Location<T> {
    let (sin, cos) = phi.value().sin_cos();
    Location::new(reference.a + dist * cos, reference.b + dist * sin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit() -> RectSpace<f64> {
        RectSpace::unit()
    }

    fn tall() -> RectSpace<f64> {
        RectSpace::new(0.0, 2.0, 0.0, 10.0).unwrap()
    }

    /// Smallest positive `t` where the ray leaves the rectangle.
    fn ray_exit_oracle(space: &RectSpace<f64>, r: &Location<f64>, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let mut best = f64::INFINITY;
        for (num, den) in [
            (space.a_end() - r.a, c),
            (space.a_sta() - r.a, c),
            (space.b_end() - r.b, s),
            (space.b_sta() - r.b, s),
        ] {
            if den != 0.0 {
                let t = num / den;
                if t > 0.0 {
                    best = best.min(t);
                }
            }
        }
        best
    }

    #[test]
    fn rejects_degenerate_space() {
        assert!(RectSpace::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(RectSpace::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(RectSpace::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn direction_examples() {
        let o = Location::new(0.0, 0.0);
        assert_eq!(direction_between(&o, &Location::new(1.0, 0.0)).value(), 0.0);
        assert_relative_eq!(
            direction_between(&o, &Location::new(0.0, 1.0)).value(),
            PI / 2.0
        );
        assert_relative_eq!(
            direction_between(&o, &Location::new(-1.0, -1.0)).value(),
            5.0 * PI / 4.0,
            epsilon = 1e-15
        );
        assert_eq!(direction_between(&o, &o).value(), 0.0);
    }

    #[test]
    fn corner_examples() {
        let c = corner_angles(&unit(), &Location::new(0.5, 0.5)).unwrap();
        assert_relative_eq!(c.phi1, PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(c.phi2, 3.0 * PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(c.phi3, 5.0 * PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(c.phi4, 7.0 * PI / 4.0, epsilon = 1e-15);

        let c = corner_angles(&unit(), &Location::new(0.3, 0.4)).unwrap();
        assert!((c.phi2 - 2.0344).abs() < 1e-4);

        let c = corner_angles(&tall(), &Location::new(1.0, 5.0)).unwrap();
        assert!((c.phi1 - 1.3734).abs() < 1e-4);
    }

    #[test]
    fn corner_angles_reject_boundary_reference() {
        assert!(matches!(
            corner_angles(&unit(), &Location::new(0.0, 0.5)),
            Err(Error::BoundaryReference { .. })
        ));
        assert!(corner_angles(&unit(), &Location::new(2.0, 0.5)).is_err());
    }

    #[test]
    fn distance_space_examples() {
        let d = distance_space_size(&unit(), &Location::new(1e-9, 1e-9), Angle::new(0.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-8);

        let d = distance_space_size(&unit(), &Location::new(0.3, 0.4), Angle::new(2.0)).unwrap();
        assert_relative_eq!(d, 0.6 / 2.0_f64.sin(), max_relative = 1e-12);
        assert!((d - 0.6599).abs() < 1e-4);

        let d = distance_space_size(&tall(), &Location::new(1.0, 5.0), Angle::new(PI / 2.0)).unwrap();
        assert_relative_eq!(d, 5.0, max_relative = 1e-12);
    }

    #[test]
    fn distance_space_from_corner_reference() {
        // The lower-left corner sees the whole square between 0 and π/2 and
        // almost nothing elsewhere.
        let s = unit();
        let corner = Location::new(0.0, 0.0);
        let d = distance_space_size(&s, &corner, Angle::new(PI / 4.0)).unwrap();
        assert_relative_eq!(d, 2.0_f64.sqrt(), max_relative = 1e-12);
        let d = distance_space_size(&s, &corner, Angle::new(PI)).unwrap();
        assert!((0.0..1e-300).contains(&d));
        assert!(distance_space_size(&s, &Location::new(-0.1, 0.0), Angle::new(0.0)).is_err());
    }

    #[test]
    fn normalization_examples() {
        let (x, y) = normalize_coords(&unit(), &Location::new(0.0, 0.0)).unwrap();
        assert_eq!((x.value(), y.value()), (0.0, 0.0));
        let (x, y) = normalize_coords(&tall(), &Location::new(1.0, 5.0)).unwrap();
        assert_eq!((x.value(), y.value()), (0.5, 0.5));
        let (x, y) = normalize_coords(&unit(), &Location::new(0.25, 0.75)).unwrap();
        assert_eq!((x.value(), y.value()), (0.25, 0.75));
        let (x, _) = normalize_coords(&unit(), &Location::new(1.0, 0.75)).unwrap();
        assert!(x.value() < 1.0);
        assert!(normalize_coords(&unit(), &Location::new(1.5, 0.5)).is_err());

        let back = denormalize_coords(&tall(), (UnitValue::clamped(0.5), UnitValue::clamped(0.5)));
        assert_eq!(back, Location::new(1.0, 5.0));
        let back = denormalize_coords(&unit(), (UnitValue::clamped(0.0), UnitValue::clamped(0.0)));
        assert_eq!(back, Location::new(0.0, 0.0));
    }

    #[test]
    fn unit_value_bounds() {
        assert!(UnitValue::new(-0.1).is_err());
        assert!(UnitValue::new(1.1).is_err());
        assert!(UnitValue::new(f64::NAN).is_err());
        assert!(UnitValue::new(1.0).unwrap().value() < 1.0);
    }

    #[test]
    fn advance_examples() {
        let o = Location::new(0.0, 0.0);
        let p = advance(&o, Angle::new(0.0), 1.0);
        assert_eq!(p, Location::new(1.0, 0.0));
        let p = advance(&o, Angle::new(PI / 2.0), 2.0);
        assert!(p.a.abs() < 1e-15 && (p.b - 2.0).abs() < 1e-15);
        let p = advance(&Location::new(0.3_f64, 0.4), Angle::new(2.0), 0.6599);
        assert!((p.b - 1.0).abs() < 1e-4);
        let exact = 0.6 / 2.0_f64.sin();
        let p = advance(&Location::new(0.3, 0.4), Angle::new(2.0), exact);
        assert!((p.b - 1.0).abs() < 1e-6);
    }

    #[test]
    fn works_in_single_precision() {
        let s = RectSpace::<f32>::unit();
        let d = distance_space_size(&s, &Location::new(0.3f32, 0.4), Angle::new(2.0f32)).unwrap();
        assert!((d - 0.6599).abs() < 1e-4);
    }

    fn interior(space: RectSpace<f64>) -> impl Strategy<Value = Location<f64>> {
        (0.001..0.999f64, 0.001..0.999f64).prop_map(move |(x, y)| {
            Location::new(
                space.a_sta() + x * space.width(),
                space.b_sta() + y * space.height(),
            )
        })
    }

    proptest! {
        #[test]
        fn advance_to_boundary_lands_on_boundary(r in interior(tall()), phi in 0.0..(2.0 * PI)) {
            let s = tall();
            let d = distance_space_size(&s, &r, Angle::new(phi)).unwrap();
            prop_assert!(d > 0.0 && d <= s.diagonal() * (1.0 + 1e-12));
            let oracle = ray_exit_oracle(&s, &r, phi);
            prop_assert!((d - oracle).abs() <= 1e-9 * oracle);
            let p = advance(&r, Angle::new(phi), d);
            let gap = [
                (p.a - s.a_sta()).abs(),
                (p.a - s.a_end()).abs(),
                (p.b - s.b_sta()).abs(),
                (p.b - s.b_end()).abs(),
            ]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
            prop_assert!(gap <= 1e-9 * s.diagonal());
        }

        #[test]
        fn branches_agree_at_corners(r in interior(unit())) {
            let s = unit();
            let c = corner_angles(&s, &r).unwrap();
            let right = |p: f64| (s.a_end() - r.a) / p.cos();
            let top = |p: f64| (s.b_end() - r.b) / p.sin();
            let left = |p: f64| (r.a - s.a_sta()) / -p.cos();
            let bottom = |p: f64| (r.b - s.b_sta()) / -p.sin();
            for (phi, f, g) in [
                (c.phi1, &right as &dyn Fn(f64) -> f64, &top as &dyn Fn(f64) -> f64),
                (c.phi2, &top, &left),
                (c.phi3, &left, &bottom),
                (c.phi4, &bottom, &right),
            ] {
                let (x, y) = (f(phi), g(phi));
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(y.abs()));
            }
            prop_assert!(c.phi1 < c.phi2 && c.phi2 < c.phi3 && c.phi3 < c.phi4);
        }

        #[test]
        fn normalize_round_trip(r in interior(tall())) {
            let s = tall();
            let back = denormalize_coords(&s, normalize_coords(&s, &r).unwrap());
            prop_assert!((back.a - r.a).abs() <= 1e-12 && (back.b - r.b).abs() <= 1e-12);
        }

        #[test]
        fn direction_recovers_advance(r in interior(unit()), phi in 0.0..(2.0 * PI), d in 1e-6..2.0f64) {
            let p = advance(&r, Angle::new(phi), d);
            let back = direction_between(&r, &p).value();
            prop_assert!(crate::scalar::circular_distance(back, phi) <= 1e-9);
        }
    }
}
