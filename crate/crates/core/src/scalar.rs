//! Floating point abstraction shared by the geometry, mechanism and
//! trajectory modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;

/// Real scalar the perturbation math is written against: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// One uniform draw from `[0, 1)`, consuming exactly one call into the generator.
    fn unit_draw<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Smallest representable value strictly greater than `self`.
    fn step_up(self) -> Self;

    /// Largest representable value strictly less than `self`.
    fn step_down(self) -> Self;

    /// Converts an `f64` literal. Every value used by this crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    /// The largest value below one, used to close half-open unit domains.
    #[inline]
    fn below_one() -> Self {
        Self::one().step_down()
    }
}

impl Scalar for f64 {
    #[inline]
    fn unit_draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f64>()
    }

    #[inline]
    fn step_up(self) -> Self {
        self.next_up()
    }

    #[inline]
    fn step_down(self) -> Self {
        self.next_down()
    }
}

impl Scalar for f32 {
    #[inline]
    fn unit_draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.random::<f32>()
    }

    #[inline]
    fn step_up(self) -> Self {
        self.next_up()
    }

    #[inline]
    fn step_down(self) -> Self {
        self.next_down()
    }
}

/// Reduces `x` into `[0, 2π)`.
#[inline]
pub fn wrap_angle<T: Scalar>(x: T) -> T {
    let two_pi = T::two_pi();
    let mut r = x % two_pi;
    if r < T::zero() {
        r = r + two_pi;
    }
    // `-tiny + 2π` rounds to 2π.
    if r >= two_pi {
        r = T::zero();
    }
    r
}

/// Arc length between two angles, in `[0, π]`.
#[inline]
pub fn circular_distance<T: Scalar>(x: T, y: T) -> T {
    let d = wrap_angle(x - y);
    d.min(T::two_pi() - d)
}
