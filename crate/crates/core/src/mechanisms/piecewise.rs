//! Three-piece densities on the circle `[0, 2π)` and the unit interval `[0, 1)`.
//!
//! Every mechanism here outputs a density that takes a high value `p` on a
//! central interval around the private input and `p / e^ε` everywhere
//! else, so the ratio of output densities for any two inputs is at most
//! `e^ε`. The families differ only in how `p` and the interval width are
//! chosen.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::geometry::{Angle, UnitValue};
use crate::scalar::{wrap_angle, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    /// `[0, 2π)`, with the high interval allowed to wrap through 0.
    Circular,
    /// `[0, 1)`.
    Linear,
}

impl DomainKind {
    pub fn length<T: Scalar>(self) -> T {
        match self {
            DomainKind::Circular => T::two_pi(),
            DomainKind::Linear => T::one(),
        }
    }
}

/// Which parameterization of the piecewise density to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `p = e^{ε/2} / |domain|`, interval width `|domain| / (e^{ε/2} + 1)`.
    Tracs,
    /// Square-wave parameters re-derived for the circle and the unit interval.
    RedesignedSw,
}

/// A two-valued density: `high` on `[lo, lo + width)` (taken modulo 2π on
/// the circle), `low = high / e^ε` on the rest of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePdf<T = f64> {
    kind: DomainKind,
    high: T,
    low: T,
    lo: T,
    width: T,
}

impl<T: Scalar> PiecewisePdf<T> {
    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn high_density(&self) -> T {
        self.high
    }

    pub fn low_density(&self) -> T {
        self.low
    }

    pub fn width(&self) -> T {
        self.width
    }

    /// `(lo, hi)` of the high-density interval. On the circle `hi` is
    /// reduced modulo 2π, so `hi < lo` when the interval wraps.
    pub fn high_interval(&self) -> (T, T) {
        match self.kind {
            DomainKind::Circular => (self.lo, wrap_angle(self.lo + self.width)),
            DomainKind::Linear => (self.lo, self.lo + self.width),
        }
    }

    pub fn in_high_interval(&self, y: T) -> bool {
        match self.kind {
            DomainKind::Circular => wrap_angle(y - self.lo) < self.width,
            DomainKind::Linear => y >= self.lo && y < self.lo + self.width,
        }
    }

    /// Density at `y`; zero outside the domain.
    pub fn density(&self, y: T) -> T {
        let len = self.kind.length::<T>();
        if !(y >= T::zero() && y < len) {
            return T::zero();
        }
        if self.in_high_interval(y) {
            self.high
        } else {
            self.low
        }
    }

    /// Probability of landing in the high-density interval.
    pub fn high_mass(&self) -> T {
        self.high * self.width
    }

    /// Sum of the analytic piece masses. Equals one for every well-formed pdf.
    pub fn total_mass(&self) -> T {
        self.high_mass() + self.low * (self.kind.length::<T>() - self.width)
    }

    /// Inverse-CDF draw from one uniform variate in `[0, 1)`.
    pub fn quantile(&self, u: T) -> T {
        let len = self.kind.length::<T>();
        let u = u * self.total_mass();
        match self.kind {
            DomainKind::Circular => {
                // CDF unrolled from `lo`: the high piece first, then the rest.
                let m_high = self.high_mass();
                let s = if u < m_high {
                    u / self.high
                } else {
                    self.width + (u - m_high) / self.low
                };
                wrap_angle(self.lo + s.min(len.step_down()))
            }
            DomainKind::Linear => {
                let m_left = self.lo * self.low;
                let m_high = self.high_mass();
                let hi = self.lo + self.width;
                let y = if u < m_left {
                    (u / self.low).min(self.lo)
                } else if u < m_left + m_high {
                    (self.lo + (u - m_left) / self.high).min(hi)
                } else {
                    hi + (u - m_left - m_high) / self.low
                };
                y.max(T::zero()).min(T::below_one())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        self.quantile(T::unit_draw(rng))
    }
}

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if eps > T::zero() && eps.is_finite() {
        Ok(())
    } else {
        Err(param(format!("privacy parameter must be positive and finite, got {eps}")))
    }
}

/// `e^ε (ε − 1) + 1`, summed as a series near zero where the closed form cancels.
fn sw_numerator<T: Scalar>(eps: T) -> T {
    if eps < T::lit(1e-2) {
        // sum_{n>=2} (n - 1) ε^n / n!
        let mut term = eps; // ε^n / n!, starting at n = 1
        let mut acc = T::zero();
        for n in 2..14 {
            term = term * eps / T::lit(n as f64);
            acc = acc + T::lit((n - 1) as f64) * term;
        }
        acc
    } else {
        eps * eps.exp() - eps.exp_m1()
    }
}

fn circular<T: Scalar>(center: T, high: T, half_width: T, eps: T) -> PiecewisePdf<T> {
    PiecewisePdf {
        kind: DomainKind::Circular,
        high,
        low: high * (-eps).exp(),
        lo: wrap_angle(center - half_width),
        width: half_width + half_width,
    }
}

fn linear<T: Scalar>(x: T, high: T, half_width: T, eps: T) -> PiecewisePdf<T> {
    let width = half_width + half_width;
    let lo = if x < half_width {
        T::zero()
    } else if x < T::one() - half_width {
        x - half_width
    } else {
        T::one() - width
    };
    PiecewisePdf {
        kind: DomainKind::Linear,
        high,
        low: high * (-eps).exp(),
        lo,
        width,
    }
}

/// Direction perturbation density centred on `phi`.
pub fn mcirc_pdf<T: Scalar>(phi: Angle<T>, eps: T) -> Result<PiecewisePdf<T>> {
    check_eps(eps)?;
    let q = (eps / T::lit(2.0)).exp();
    // π (e^{ε/2} - 1) / (e^ε - 1) simplifies to π / (e^{ε/2} + 1).
    let half = T::PI() / (q + T::one());
    Ok(circular(phi.value(), q / T::two_pi(), half, eps))
}

/// Normalized distance perturbation density for `rbar`.
pub fn mdist_pdf<T: Scalar>(rbar: UnitValue<T>, eps: T) -> Result<PiecewisePdf<T>> {
    check_eps(eps)?;
    let q = (eps / T::lit(2.0)).exp();
    // (e^{ε/2} - 1) / (2 e^ε - 2) simplifies to 1 / (2 (e^{ε/2} + 1)).
    let c = T::one() / (T::lit(2.0) * (q + T::one()));
    Ok(linear(rbar.value(), q, c, eps))
}

pub fn sw_direction_pdf<T: Scalar>(phi: Angle<T>, eps: T) -> Result<PiecewisePdf<T>> {
    check_eps(eps)?;
    let em1 = eps.exp_m1();
    let high = em1 / (T::two_pi() * eps);
    let half = T::PI() * sw_numerator(eps) / (em1 * em1);
    Ok(circular(phi.value(), high, half, eps))
}

pub fn sw_distance_pdf<T: Scalar>(rbar: UnitValue<T>, eps: T) -> Result<PiecewisePdf<T>> {
    check_eps(eps)?;
    let em1 = eps.exp_m1();
    let high = em1 / eps;
    let c = sw_numerator(eps) / (T::lit(2.0) * em1 * em1);
    Ok(linear(rbar.value(), high, c, eps))
}

pub fn direction_pdf<T: Scalar>(family: Family, phi: Angle<T>, eps: T) -> Result<PiecewisePdf<T>> {
    match family {
        Family::Tracs => mcirc_pdf(phi, eps),
        Family::RedesignedSw => sw_direction_pdf(phi, eps),
    }
}

pub fn distance_pdf<T: Scalar>(
    family: Family,
    rbar: UnitValue<T>,
    eps: T,
) -> Result<PiecewisePdf<T>> {
    match family {
        Family::Tracs => mdist_pdf(rbar, eps),
        Family::RedesignedSw => sw_distance_pdf(rbar, eps),
    }
}

pub fn sample_mcirc<T: Scalar, R: Rng + ?Sized>(
    phi: Angle<T>,
    eps: T,
    rng: &mut R,
) -> Result<Angle<T>> {
    Ok(Angle::new(mcirc_pdf(phi, eps)?.sample(rng)))
}

pub fn sample_mdist<T: Scalar, R: Rng + ?Sized>(
    rbar: UnitValue<T>,
    eps: T,
    rng: &mut R,
) -> Result<UnitValue<T>> {
    Ok(UnitValue::clamped(mdist_pdf(rbar, eps)?.sample(rng)))
}

pub fn sample_direction<T: Scalar, R: Rng + ?Sized>(
    family: Family,
    phi: Angle<T>,
    eps: T,
    rng: &mut R,
) -> Result<Angle<T>> {
    Ok(Angle::new(direction_pdf(family, phi, eps)?.sample(rng)))
}

pub fn sample_distance<T: Scalar, R: Rng + ?Sized>(
    family: Family,
    rbar: UnitValue<T>,
    eps: T,
    rng: &mut R,
) -> Result<UnitValue<T>> {
    Ok(UnitValue::clamped(distance_pdf(family, rbar, eps)?.sample(rng)))
}

/// Width and probability mass of the direction mechanism's high interval.
pub fn dominant_sector<T: Scalar>(eps: T) -> Result<(T, T)> {
    check_eps(eps)?;
    let q = (eps / T::lit(2.0)).exp();
    Ok((T::two_pi() / (q + T::one()), q / (q + T::one())))
}

/// Worst-case (input at an endpoint) mean squared error of the distance
/// mechanism: `8C³p/3 + (1 − 8C³)p / (3e^ε)`.
pub fn worst_case_mse_closed_form<T: Scalar>(eps: T) -> Result<T> {
    check_eps(eps)?;
    let q = (eps / T::lit(2.0)).exp();
    let c = T::one() / (T::lit(2.0) * (q + T::one()));
    let c3 = T::lit(8.0) * c * c * c;
    let three = T::lit(3.0);
    Ok(c3 * q / three + (T::one() - c3) * q * (-eps).exp() / three)
}
