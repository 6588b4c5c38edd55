//! Divergences and the conditional entropy family.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::math::{exp, fabs, ln, log_sum_exp, neumaier_sum};
use crate::pmf::{kl_divergence, Pmf};
use crate::source::JointSource;
use crate::SHANNON_SWITCH;

/// Which conditional entropy to compute. `s` is the order offset (order
/// `1+s`); `t` is the second order offset of the two-parameter family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiOrderSpec {
    Shannon,
    Plain { s: f64 },
    Gallager { s: f64 },
    TwoParam { s: f64, t: f64 },
    Min,
    MinGallager,
}

impl core::fmt::Display for RenyiOrderSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::Shannon => write!(f, "shannon"),
            Self::Plain { s } => write!(f, "plain(s={s})"),
            Self::Gallager { s } => write!(f, "gallager(s={s})"),
            Self::TwoParam { s, t } => write!(f, "two_param(s={s},t={t})"),
            Self::Min => write!(f, "min"),
            Self::MinGallager => write!(f, "min_gallager"),
        }
    }
}

/// `D_{1+s}(p||q)` in nats; `s` near 0 gives the relative entropy. `q` may be
/// any nonnegative vector.
pub fn renyi_divergence(p: &Pmf, q: &[f64], s: f64) -> f64 {
    divergence_raw(p.probs(), q, s)
}

pub(crate) fn divergence_raw(p: &[f64], q: &[f64], s: f64) -> f64 {
    if fabs(s) < SHANNON_SWITCH {
        return kl_divergence(p, q);
    }
    let mut terms = Vec::with_capacity(p.len());
    for (&pa, &qa) in p.iter().zip(q) {
        if pa <= 0.0 {
            continue;
        }
        if qa <= 0.0 {
            if s > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        terms.push((1.0 + s) * ln(pa) - s * ln(qa));
    }
    log_sum_exp(terms) / s
}

/// Log-probabilities of one live side-information symbol.
#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub ln_pe: f64,
    /// `ln P(a|e)` over the support of the conditional.
    pub ln_p: Vec<f64>,
}

impl Row {
    /// `A_e(x) = ln Σ_a P(a|e)^{1+x}`.
    pub fn a(&self, x: f64) -> f64 {
        log_sum_exp(self.ln_p.iter().map(|l| (1.0 + x) * l))
    }

    /// `A_e'(x) = Σ_a P^{(x)}(a|e) ln P(a|e)` where `P^{(x)}` is the tilt.
    pub fn a_prime(&self, x: f64) -> f64 {
        let z = self.a(x);
        neumaier_sum(self.ln_p.iter().map(|l| exp((1.0 + x) * l - z) * l))
    }

    pub fn shannon(&self) -> f64 {
        neumaier_sum(self.ln_p.iter().map(|l| -exp(*l) * l))
    }

    pub fn max_ln(&self) -> f64 {
        self.ln_p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Conditionals of a source in log form, skipping zero-mass symbols.
#[derive(Debug, Clone)]
pub(crate) struct Profile {
    pub rows: Vec<Row>,
}

impl Profile {
    pub fn new(src: &JointSource) -> Self {
        let rows = src
            .live_e()
            .map(|e| {
                let pe = src.p_e(e);
                let ln_pe = ln(pe);
                let ln_p = src
                    .column(e)
                    .iter()
                    .filter(|p| **p > 0.0)
                    .map(|p| ln(*p) - ln_pe)
                    .collect();
                Row { ln_pe, ln_p }
            })
            .collect();
        Self { rows }
    }

    /// `ln Z(t)`, `Z(t) = Σ_e P_E Σ_a P(a|e)^{1+t}`.
    pub fn ln_z(&self, t: f64) -> f64 {
        log_sum_exp(self.rows.iter().map(|r| r.ln_pe + r.a(t)))
    }

    /// `ln W_s(t)`, `W_s(t) = Σ_e P_E (Σ_a P^{1+t}) (Σ_a P^{1+s})^{-t/(1+s)}`.
    pub fn ln_w(&self, s: f64, t: f64) -> f64 {
        log_sum_exp(self.rows.iter().map(|r| r.ln_pe + r.a(t) - t * r.a(s) / (1.0 + s)))
    }

    /// `ln Σ_e P_E (Σ_a P^{1+s})^{1/(1+s)}`.
    pub fn ln_gallager(&self, s: f64) -> f64 {
        log_sum_exp(self.rows.iter().map(|r| r.ln_pe + r.a(s) / (1.0 + s)))
    }

    pub fn shannon(&self) -> f64 {
        neumaier_sum(self.rows.iter().map(|r| exp(r.ln_pe) * r.shannon()))
    }

    pub fn plain(&self, s: f64) -> f64 {
        if fabs(s) < SHANNON_SWITCH {
            return self.shannon();
        }
        -self.ln_z(s) / s
    }

    pub fn gallager(&self, s: f64) -> f64 {
        if fabs(s) < SHANNON_SWITCH {
            return self.shannon();
        }
        -(1.0 + s) / s * self.ln_gallager(s)
    }

    pub fn two_param(&self, s: f64, t: f64) -> f64 {
        if fabs(s) < SHANNON_SWITCH {
            return neumaier_sum(
                self.rows
                    .iter()
                    .map(|r| exp(r.ln_pe) * ((1.0 + t) * r.shannon() + r.a(t))),
            );
        }
        -(1.0 + t) / s * self.ln_w(t, s)
    }

    pub fn min(&self) -> f64 {
        -self.rows.iter().map(Row::max_ln).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_gallager(&self) -> f64 {
        -log_sum_exp(self.rows.iter().map(|r| r.ln_pe + r.max_ln()))
    }
}

fn check_order(name: &str, x: f64) -> Result<()> {
    if !(x > -1.0) || !x.is_finite() {
        return Err(param(format!("{name}={x} must be a finite value above -1")));
    }
    Ok(())
}

/// The conditional entropy selected by `spec`, in nats.
///
/// With `relative_q` the value is `-D_{1+s}(P_AE || I_A x Q_E)`; only the
/// Shannon and plain variants accept it.
pub fn conditional_entropy(src: &JointSource, spec: RenyiOrderSpec, relative_q: Option<&Pmf>) -> Result<f64> {
    if let Some(q) = relative_q {
        if q.len() != src.e_size() {
            return Err(param(format!("Q has {} entries but |E| = {}", q.len(), src.e_size())));
        }
        let s = match spec {
            RenyiOrderSpec::Shannon => 0.0,
            RenyiOrderSpec::Plain { s } => {
                check_order("s", s)?;
                s
            }
            other => {
                return Err(Error::Usage(format!("relative Q is not supported for {other}")));
            }
        };
        let mut p = Vec::with_capacity(src.a_size() * src.e_size());
        let mut qq = Vec::with_capacity(p.capacity());
        for e in 0..src.e_size() {
            for &cell in src.column(e) {
                p.push(cell);
                qq.push(q.get(e));
            }
        }
        return Ok(-divergence_raw(&p, &qq, s));
    }
    let prof = Profile::new(src);
    match spec {
        RenyiOrderSpec::Shannon => Ok(prof.shannon()),
        RenyiOrderSpec::Plain { s } => {
            check_order("s", s)?;
            Ok(prof.plain(s))
        }
        RenyiOrderSpec::Gallager { s } => {
            check_order("s", s)?;
            Ok(prof.gallager(s))
        }
        RenyiOrderSpec::TwoParam { s, t } => {
            check_order("s", s)?;
            check_order("t", t)?;
            Ok(prof.two_param(s, t))
        }
        RenyiOrderSpec::Min => Ok(prof.min()),
        RenyiOrderSpec::MinGallager => Ok(prof.min_gallager()),
    }
}

/// `φ(s) = ln Σ_e P_E (Σ_a P(a|e)^{1/(1-s)})^{1-s}` for `s < 1`.
pub fn gallager_phi(src: &JointSource, s: f64) -> Result<f64> {
    if !(s < 1.0) || !s.is_finite() {
        return Err(param(format!("Gallager function needs s < 1, got {s}")));
    }
    let prof = Profile::new(src);
    let x = s / (1.0 - s);
    Ok(log_sum_exp(prof.rows.iter().map(|r| r.ln_pe + (1.0 - s) * r.a(x))))
}

/// The `Q_E` maximizing `-D_{1+s}(P_AE || I_A x Q_E)`:
/// `Q(e) ∝ (Σ_a P_AE(a,e)^{1+s})^{1/(1+s)}`.
pub fn optimizer_q(src: &JointSource, s: f64) -> Result<Pmf> {
    check_order("s", s)?;
    if fabs(s) < SHANNON_SWITCH {
        return Err(param("s = 0 has no tilted optimizer; the limit is P_E itself"));
    }
    let logs: Vec<f64> = (0..src.e_size())
        .map(|e| {
            let col = src.column(e);
            log_sum_exp(col.iter().filter(|p| **p > 0.0).map(|p| (1.0 + s) * ln(*p))) / (1.0 + s)
        })
        .collect();
    let z = log_sum_exp(logs.iter().copied());
    Ok(Pmf::renormalized(logs.iter().map(|l| exp(l - z)).collect()))
}

/// Which critical rate to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    /// `d/dt [t H_{1+t}]` at `t = s`.
    Plain,
    /// `d/dt [t H_{1+t|1+s}]` at `t = s`.
    Up,
}

pub fn critical_rate(src: &JointSource, s: f64, kind: CriticalKind) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(param(format!("critical rates need s > 0, got {s}")));
    }
    let prof = Profile::new(src);
    Ok(match kind {
        CriticalKind::Plain => prof.crit_plain(s),
        CriticalKind::Up => prof.crit_up(s, s),
    })
}

impl Profile {
    /// `-Z'(t)/Z(t)`.
    pub fn crit_plain(&self, t: f64) -> f64 {
        let terms: Vec<f64> = self.rows.iter().map(|r| r.ln_pe + r.a(t)).collect();
        let z = log_sum_exp(terms.iter().copied());
        neumaier_sum(self.rows.iter().zip(&terms).map(|(r, l)| -exp(l - z) * r.a_prime(t)))
    }

    /// `d/dt [-(1+s) ln W_s(t)]`.
    pub fn crit_up(&self, s: f64, t: f64) -> f64 {
        let terms: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r.ln_pe + r.a(t) - t * r.a(s) / (1.0 + s))
            .collect();
        let w = log_sum_exp(terms.iter().copied());
        let d = neumaier_sum(
            self.rows
                .iter()
                .zip(&terms)
                .map(|(r, l)| exp(l - w) * (r.a_prime(t) - r.a(s) / (1.0 + s))),
        );
        -(1.0 + s) * d
    }
}
