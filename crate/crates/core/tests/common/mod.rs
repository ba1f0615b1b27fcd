//! Reference formulas written straight from the mechanism definitions, kept
//! apart from the library so the two can be checked against each other.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mech {
    Mcirc,
    Mdist,
    SwDirection,
    SwDistance,
}

pub const ALL_MECHS: [Mech; 4] = [Mech::Mcirc, Mech::Mdist, Mech::SwDirection, Mech::SwDistance];

impl Mech {
    pub fn circular(self) -> bool {
        matches!(self, Mech::Mcirc | Mech::SwDirection)
    }

    pub fn domain(self) -> f64 {
        if self.circular() {
            TAU
        } else {
            1.0
        }
    }
}

/// Piecewise-constant density: `high` on `[lo, lo + width)` (taken modulo
/// the domain on the circle), `low` elsewhere.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub circular: bool,
    pub domain: f64,
    pub high: f64,
    pub low: f64,
    pub lo: f64,
    pub width: f64,
}

pub fn oracle(mech: Mech, x: f64, eps: f64) -> Oracle {
    let e = eps.exp();
    match mech {
        Mech::Mcirc => {
            let high = (eps / 2.0).exp() / (2.0 * PI);
            let half = PI * ((eps / 2.0).exp() - 1.0) / (e - 1.0);
            circ(x, high, half, eps)
        }
        Mech::SwDirection => {
            let high = (e - 1.0) / (2.0 * PI * eps);
            let half = PI * (e * (eps - 1.0) + 1.0) / ((e - 1.0) * (e - 1.0));
            circ(x, high, half, eps)
        }
        Mech::Mdist => {
            let high = (eps / 2.0).exp();
            let c = ((eps / 2.0).exp() - 1.0) / (2.0 * (e - 1.0));
            line(x, high, c, eps)
        }
        Mech::SwDistance => {
            let high = (e - 1.0) / eps;
            let c = (e * (eps - 1.0) + 1.0) / (2.0 * (e - 1.0) * (e - 1.0));
            line(x, high, c, eps)
        }
    }
}

fn circ(phi: f64, high: f64, half: f64, eps: f64) -> Oracle {
    Oracle {
        circular: true,
        domain: TAU,
        high,
        low: high / eps.exp(),
        lo: (phi - half).rem_euclid(TAU),
        width: 2.0 * half,
    }
}

fn line(x: f64, high: f64, c: f64, eps: f64) -> Oracle {
    let lo = if x < c {
        0.0
    } else if x < 1.0 - c {
        x - c
    } else {
        1.0 - 2.0 * c
    };
    Oracle {
        circular: false,
        domain: 1.0,
        high,
        low: high / eps.exp(),
        lo,
        width: 2.0 * c,
    }
}

impl Oracle {
    /// Offset of `y` from the start of the high interval, on the circle
    /// measured counterclockwise.
    fn offset(&self, y: f64) -> f64 {
        if self.circular {
            (y - self.lo).rem_euclid(TAU)
        } else {
            y - self.lo
        }
    }

    pub fn density(&self, y: f64) -> f64 {
        if !(0.0..self.domain).contains(&y) {
            return 0.0;
        }
        let o = self.offset(y);
        if (0.0..self.width).contains(&o) {
            self.high
        } else {
            self.low
        }
    }

    /// Distance from `y` to the nearest edge of the high interval.
    pub fn edge_gap(&self, y: f64) -> f64 {
        let o = self.offset(y);
        let d = o.abs().min((o - self.width).abs());
        if self.circular {
            d.min((TAU - o).abs())
        } else {
            d
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.high * self.width + self.low * (self.domain - self.width)
    }

    pub fn high_mass(&self) -> f64 {
        self.high * self.width
    }

    /// Probability of `[a, b)` with `0 <= a <= b <= domain`.
    pub fn prob(&self, a: f64, b: f64) -> f64 {
        self.cdf(b) - self.cdf(a)
    }

    pub fn cdf(&self, y: f64) -> f64 {
        let y = y.clamp(0.0, self.domain);
        // Overlap of [0, y) with the high interval, unrolled on the circle.
        let overlap = |s: f64, e: f64| (e.min(y) - s.max(0.0)).max(0.0);
        let hi = if self.circular && self.lo + self.width > TAU {
            overlap(self.lo, TAU) + overlap(0.0, self.lo + self.width - TAU)
        } else {
            overlap(self.lo, self.lo + self.width)
        };
        self.low * y + (self.high - self.low) * hi
    }
}

/// `∫ (y − x)² f(y) dy` for the distance mechanisms, with `f` piecewise
/// constant, by exact antiderivatives.
pub fn mse_exact(o: &Oracle, x: f64) -> f64 {
    let seg = |a: f64, b: f64| ((b - x).powi(3) - (a - x).powi(3)) / 3.0;
    let (l, r) = (o.lo, o.lo + o.width);
    o.low * seg(0.0, l) + o.high * seg(l, r) + o.low * seg(r, 1.0)
}

pub fn circular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Two-sided Kolmogorov tail `P(K > λ)`.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(mut xs: Vec<f64>, mut ys: Vec<f64>) -> (f64, f64) {
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let ne = n * m / (n + m);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_tail(lambda))
}

pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
