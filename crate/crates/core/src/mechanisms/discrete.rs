//! Discrete-output mechanisms: k-ary randomized response, the sector-based
//! strawman for directions, and the exponential mechanism over a finite
//! candidate set.

use rand::Rng;

use crate::error::{param, Error, Result};
use crate::geometry::{Angle, Location};
use crate::scalar::Scalar;

/// `(keep, other)` probabilities of k-RR: the true index is kept with
/// probability `e^ε / (k − 1 + e^ε)`, every other index has `1 / (k − 1 + e^ε)`.
pub fn krr_probabilities<T: Scalar>(k: usize, eps: T) -> Result<(T, T)> {
    if k < 2 {
        return Err(param(format!("k-RR needs at least two values, got k = {k}")));
    }
    if !(eps >= T::zero()) || eps.is_infinite() {
        return Err(param(format!("k-RR privacy parameter must be finite and >= 0, got {eps}")));
    }
    let others = T::from_usize(k - 1).ok_or_else(|| param("k too large"))?;
    // Divide through by e^ε so large ε does not overflow.
    let tail = others * (-eps).exp();
    let keep = T::one() / (T::one() + tail);
    let other = (-eps).exp() / (T::one() + tail);
    Ok((keep, other))
}

pub fn krr_sample<T: Scalar, R: Rng + ?Sized>(j: usize, k: usize, eps: T, rng: &mut R) -> Result<usize> {
    let (keep, _) = krr_probabilities(k, eps)?;
    if j >= k {
        return Err(param(format!("index {j} out of range for k = {k}")));
    }
    if T::unit_draw(rng) < keep {
        return Ok(j);
    }
    let i = rng.random_range(0..k - 1);
    Ok(if i >= j { i + 1 } else { i })
}

/// Sector index of `phi` when the circle is cut into `k` equal sectors.
pub fn sector_of<T: Scalar>(phi: Angle<T>, k: usize) -> usize {
    let kf = T::from_usize(k).expect("sector count fits the scalar type");
    let idx = (phi.value() / T::two_pi() * kf).floor().to_usize().unwrap_or(0);
    idx.min(k - 1)
}

/// k-RR over `k` equal sectors of the circle, then a uniform draw inside
/// the reported sector.
pub fn strawman_direction<T: Scalar, R: Rng + ?Sized>(
    phi: Angle<T>,
    k: usize,
    eps: T,
    rng: &mut R,
) -> Result<Angle<T>> {
    if !(eps > T::zero()) {
        return Err(param(format!("privacy parameter must be positive, got {eps}")));
    }
    if k < 2 {
        return Err(param(format!("strawman needs at least two sectors, got k = {k}")));
    }
    let j = sector_of(phi, k);
    let i = krr_sample(j, k, eps, rng)?;
    let kf = T::from_usize(k).expect("sector count fits the scalar type");
    let width = T::two_pi() / kf;
    let start = T::from_usize(i).expect("sector index fits") * width;
    Ok(Angle::new(start + T::unit_draw(rng) * width))
}

/// Output distribution of the exponential mechanism with score
/// `−‖x − y‖₂`. The sensitivity is the spread of scores over the
/// candidates; a zero spread yields the uniform distribution.
pub fn exponential_probabilities<T: Scalar>(
    x: &Location<T>,
    candidates: &[Location<T>],
    eps: T,
) -> Result<Vec<T>> {
    let weights = exponential_weights(x, candidates, eps)?;
    let total = weights.iter().fold(T::zero(), |acc, &w| acc + w);
    Ok(weights.into_iter().map(|w| w / total).collect())
}

fn exponential_weights<T: Scalar>(x: &Location<T>, candidates: &[Location<T>], eps: T) -> Result<Vec<T>> {
    if candidates.is_empty() {
        return Err(Error::Empty("exponential mechanism candidates"));
    }
    if !(eps > T::zero()) || eps.is_infinite() {
        return Err(param(format!("privacy parameter must be positive and finite, got {eps}")));
    }
    let scores: Vec<T> = candidates.iter().map(|y| -x.distance(y)).collect();
    let (min, max) = scores
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let spread = max - min;
    if spread == T::zero() {
        return Ok(vec![T::one(); candidates.len()]);
    }
    let scale = eps / (T::lit(2.0) * spread);
    // Shifting by the best score leaves the normalized distribution unchanged.
    Ok(scores.into_iter().map(|s| ((s - max) * scale).exp()).collect())
}

/// Index of the sampled candidate. Evaluates every score, so the cost is
/// linear in the number of candidates.
pub fn exponential_mechanism_index<T: Scalar, R: Rng + ?Sized>(
    x: &Location<T>,
    candidates: &[Location<T>],
    eps: T,
    rng: &mut R,
) -> Result<usize> {
    let weights = exponential_weights(x, candidates, eps)?;
    let total = weights.iter().fold(T::zero(), |acc, &w| acc + w);
    let target = T::unit_draw(rng) * total;
    let mut acc = T::zero();
    for (i, w) in weights.iter().enumerate() {
        acc = acc + *w;
        if target < acc {
            return Ok(i);
        }
    }
    Ok(weights.len() - 1)
}

pub fn exponential_mechanism<T: Scalar, R: Rng + ?Sized>(
    x: &Location<T>,
    candidates: &[Location<T>],
    eps: T,
    rng: &mut R,
) -> Result<Location<T>> {
    exponential_mechanism_index(x, candidates, eps, rng).map(|i| candidates[i])
}
