//! Randomized primitives and their exact densities.

mod discrete;
mod piecewise;

pub use discrete::{
    exponential_mechanism, exponential_mechanism_index, exponential_probabilities,
    krr_probabilities, krr_sample, sector_of, strawman_direction,
};
pub use piecewise::{
    direction_pdf, distance_pdf, dominant_sector, mcirc_pdf, mdist_pdf, sample_direction,
    sample_distance, sample_mcirc, sample_mdist, sw_direction_pdf, sw_distance_pdf,
    worst_case_mse_closed_form, DomainKind, Family, PiecewisePdf,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::scalar::Scalar;

/// Per-location budget `ε` and the share `ε_d` spent on the direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget<T = f64> {
    eps: T,
    eps_d: T,
}

impl<T: Scalar> PrivacyBudget<T> {
    pub fn new(eps: T, eps_d: T) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(param(format!("ε must be positive and finite, got {eps}")));
        }
        if !(eps_d > T::zero() && eps_d < eps) {
            return Err(param(format!("ε_d must lie in (0, {eps}), got {eps_d}")));
        }
        Ok(PrivacyBudget { eps, eps_d })
    }

    /// Splits `ε` in proportion to the domain sizes `2π : 1`, i.e. `ε_d = επ/(π+1)`.
    pub fn heuristic(eps: T) -> Result<Self> {
        let pi = T::PI();
        Self::new(eps, eps * pi / (pi + T::one()))
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn direction_eps(&self) -> T {
        self.eps_d
    }

    pub fn distance_eps(&self) -> T {
        self.eps - self.eps_d
    }
}

/// Seed for a reproducible generator stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent stream `stream` under the same seed. Used to hand each
    /// trajectory its own generator so parallel and serial runs agree.
    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(stream);
        rng
    }

    /// A child seed determined by `self` and `parts`, mixed with SplitMix64.
    pub fn derive(self, parts: &[u64]) -> RngSeed {
        let mut state = self.0;
        for &p in parts {
            state = splitmix64(state ^ splitmix64(p.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        RngSeed(state)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
