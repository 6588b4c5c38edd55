//! Probability mass functions over dense integer alphabets.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::math::{exp, fabs, ln, log_sum_exp, neg_xlogx, neumaier_sum};
use crate::INPUT_MASS_TOL;

/// A distribution on `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates entries (finite, nonnegative, mass within `1e-9` of 1) and
    /// renormalizes so the stored mass is 1 to rounding.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("empty alphabet".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Validation(format!("entry {i} is {p}")));
            }
        }
        let total = neumaier_sum(probs.iter().copied());
        if fabs(total - 1.0) > INPUT_MASS_TOL {
            return Err(Error::Validation(format!("total mass {total} is not 1")));
        }
        Ok(Self::renormalized(probs))
    }

    /// Scales nonnegative weights to unit mass. Panics-free: an all-zero
    /// vector is rejected by callers before reaching here.
    pub(crate) fn renormalized(mut probs: Vec<f64>) -> Self {
        let total = neumaier_sum(probs.iter().copied());
        if total != 1.0 {
            for p in probs.iter_mut() {
                *p /= total;
            }
        }
        Self { probs }
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("empty alphabet".into()));
        }
        Ok(Self { probs: alloc::vec![1.0 / k as f64; k] })
    }

    pub fn point(k: usize, at: usize) -> Result<Self> {
        if at >= k {
            return Err(param(format!("atom {at} outside alphabet of size {k}")));
        }
        let mut probs = alloc::vec![0.0; k];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, a: usize) -> f64 {
        self.probs[a]
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|p| **p > 0.0).count()
    }

    /// True when all atoms in the support carry equal mass (to 1e-12 relative).
    pub fn is_uniform_on_support(&self) -> bool {
        let mut it = self.probs.iter().copied().filter(|p| *p > 0.0);
        let first = match it.next() {
            Some(p) => p,
            None => return true,
        };
        it.all(|p| fabs(p - first) <= 1e-12 * first)
    }

    /// Shannon entropy in nats.
    pub fn shannon(&self) -> f64 {
        neumaier_sum(self.probs.iter().map(|&p| neg_xlogx(p)))
    }

    /// `ln Σ p^{1+t}` over the support.
    pub fn log_power_sum(&self, t: f64) -> f64 {
        log_sum_exp(self.probs.iter().filter(|p| **p > 0.0).map(|&p| (1.0 + t) * ln(p)))
    }

    /// Rényi entropy of order `1+s`; `|s| < 1e-9` gives the Shannon value.
    pub fn renyi(&self, s: f64) -> f64 {
        if fabs(s) < crate::SHANNON_SWITCH {
            return self.shannon();
        }
        -self.log_power_sum(s) / s
    }

    /// The tilted distribution `p^{1+t} / Σ p^{1+t}`. Support is preserved.
    pub fn tilt(&self, t: f64) -> Result<Self> {
        if !(t > -1.0) || !t.is_finite() {
            return Err(param(format!("tilt parameter t={t} must exceed -1")));
        }
        let z = self.log_power_sum(t);
        let probs = self
            .probs
            .iter()
            .map(|&p| if p > 0.0 { exp((1.0 + t) * ln(p) - z) } else { 0.0 })
            .collect();
        Ok(Self::renormalized(probs))
    }

    /// `γ(t) = -ln Σ p^{1+t}`.
    pub fn gamma(&self, t: f64) -> f64 {
        -self.log_power_sum(t)
    }

    /// `γ'(t) = -Σ p^{(t)} ln p`, the cross entropy of the tilt against `p`.
    pub fn gamma_prime(&self, t: f64) -> Result<f64> {
        let tilted = self.tilt(t)?;
        Ok(neumaier_sum(
            tilted
                .probs
                .iter()
                .zip(&self.probs)
                .filter(|(_, p)| **p > 0.0)
                .map(|(q, p)| -q * ln(*p)),
        ))
    }
}

/// Relative entropy `D(p||q)` in nats; `+inf` when `p` is not dominated by `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    let mut terms = Vec::with_capacity(p.len());
    for (&pa, &qa) in p.iter().zip(q) {
        if pa > 0.0 {
            if qa <= 0.0 {
                return f64::INFINITY;
            }
            terms.push(pa * (ln(pa) - ln(qa)));
        }
    }
    neumaier_sum(terms)
}
