//! Remaining-uncertainty bounds, exponents, optimal-rate thresholds and the
//! tilted-type exponent, all as functions of the rate `R` (nats/symbol).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{param, Error, Result};
use crate::math::{fabs, ln};
use crate::measures::Profile;
use crate::optimize::{bisect, golden_max};
use crate::pmf::{kl_divergence, Pmf};
use crate::source::JointSource;

const GOLDEN_TOL: f64 = 1e-10;

/// Boundary offset for `t -> -1` in [`t_r_solve`].
pub const T_R_DELTA: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    GMinus,
    GupMinus,
    GPlus,
    GupPlus,
    EMinus,
    EupMinus,
    EPlus,
    EupPlus,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        Self::GMinus,
        Self::GupMinus,
        Self::GPlus,
        Self::GupPlus,
        Self::EMinus,
        Self::EupMinus,
        Self::EPlus,
        Self::EupPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GMinus => "g_minus",
            Self::GupMinus => "gup_minus",
            Self::GPlus => "g_plus",
            Self::GupPlus => "gup_plus",
            Self::EMinus => "e_minus",
            Self::EupMinus => "eup_minus",
            Self::EPlus => "e_plus",
            Self::EupPlus => "eup_plus",
        }
    }

    /// Remaining-uncertainty upper bounds (as opposed to exponents).
    pub fn is_uncertainty(self) -> bool {
        matches!(self, Self::GMinus | Self::GupMinus | Self::GPlus | Self::GupPlus)
    }

    fn check_s(self, s: f64) -> Result<()> {
        let ok = match self {
            Self::GMinus | Self::EMinus => (0.0..=1.0).contains(&s),
            Self::GupMinus | Self::EupMinus => (0.0..=0.5).contains(&s),
            Self::GPlus | Self::GupPlus => s > 0.0 && s.is_finite(),
            Self::EPlus | Self::EupPlus => s >= 0.0 && s.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(param(format!("s={s} is outside the domain of {}", self.name())))
        }
    }
}

impl core::fmt::Display for BoundKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown bound kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundQuery<'a> {
    pub source: &'a JointSource,
    pub kind: BoundKind,
    pub s: f64,
    pub rate: f64,
}

fn check_rate(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(param(format!("rate {r} must be a finite nonnegative number")))
    }
}

/// Evaluates one bound with a precomputed profile. Domains are checked by the
/// callers.
fn eval(prof: &Profile, kind: BoundKind, s: f64, r: f64) -> f64 {
    match kind {
        BoundKind::GMinus => (prof.plain(-s) - r).max(0.0),
        BoundKind::GupMinus => (prof.gallager(-s) - r).max(0.0),
        BoundKind::GPlus => g_plus(prof, s, r),
        BoundKind::GupPlus => gup_plus(prof, s, r),
        BoundKind::EMinus => {
            let f = |t: f64| if t == 0.0 { 0.0 } else { t * r - prof.ln_z(-t) };
            golden_max(f, s, 1.0, GOLDEN_TOL).1.max(0.0)
        }
        BoundKind::EupMinus => golden_max(|t| eup_objective(prof, t, r), s, 0.5, GOLDEN_TOL).1.max(0.0),
        BoundKind::EPlus | BoundKind::EupPlus => {
            golden_max(|t| eup_objective(prof, t, r), 0.0, 0.5, GOLDEN_TOL).1.max(0.0)
        }
    }
}

/// `(t/(1-t)) (R - H↑_{1-t})`. With `ρ = t/(1-t)` this is `ρR` minus a
/// log-sum-exp of convex functions of `ρ`, so it is unimodal in `t`.
fn eup_objective(prof: &Profile, t: f64, r: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t / (1.0 - t) * r - prof.ln_gallager(-t)
}

fn g_plus(prof: &Profile, s: f64, r: f64) -> f64 {
    // The objective t(H_{1+t} - R) is concave with slope H(A|E) - R at 0.
    if r >= prof.shannon() {
        return 0.0;
    }
    if r <= prof.crit_plain(s) {
        return (prof.plain(s) - r).max(0.0);
    }
    let f = |t: f64| if t == 0.0 { 0.0 } else { -prof.ln_z(t) - t * r };
    (golden_max(f, 0.0, s, GOLDEN_TOL).1 / s).max(0.0)
}

/// `lim_{t->0} H_{1+t|1+s}`, where `t H_{1+t|1+s}` leaves zero.
fn gup_plus_zero_rate(prof: &Profile, s: f64) -> f64 {
    prof.two_param(0.0, s)
}

fn gup_plus(prof: &Profile, s: f64, r: f64) -> f64 {
    if r >= gup_plus_zero_rate(prof, s) {
        return 0.0;
    }
    if r <= prof.crit_up(s, s) {
        return (prof.gallager(s) - r).max(0.0);
    }
    let f = |t: f64| if t == 0.0 { 0.0 } else { -(1.0 + s) * prof.ln_w(s, t) - t * r };
    (golden_max(f, 0.0, s, GOLDEN_TOL).1 / s).max(0.0)
}

/// The rate at which a plus-kind bound first reaches zero: `H(A|E)` for
/// `g_plus` and `lim_{t->0} H_{1+t|1+s}` for `gup_plus`.
pub fn plus_zero_rate(src: &JointSource, kind: BoundKind, s: f64) -> Result<f64> {
    kind.check_s(s)?;
    let prof = Profile::new(src);
    match kind {
        BoundKind::GPlus => Ok(prof.shannon()),
        BoundKind::GupPlus => Ok(gup_plus_zero_rate(&prof, s)),
        other => Err(Error::Usage(format!("{other} is not a plus-kind uncertainty bound"))),
    }
}

/// Remaining-uncertainty upper bound for the four `g` kinds.
pub fn g_bound(q: &BoundQuery<'_>) -> Result<f64> {
    if !q.kind.is_uncertainty() {
        return Err(Error::Usage(format!("{} is an exponent; use e_bound", q.kind)));
    }
    q.kind.check_s(q.s)?;
    check_rate(q.rate)?;
    Ok(eval(&Profile::new(q.source), q.kind, q.s, q.rate))
}

/// Exponent lower bound for the four `e` kinds.
pub fn e_bound(q: &BoundQuery<'_>) -> Result<f64> {
    if q.kind.is_uncertainty() {
        return Err(Error::Usage(format!("{} is an uncertainty bound; use g_bound", q.kind)));
    }
    q.kind.check_s(q.s)?;
    check_rate(q.rate)?;
    Ok(eval(&Profile::new(q.source), q.kind, q.s, q.rate))
}

/// Both clauses of the `gup_plus` bound at rate `r`, for checking agreement
/// at the critical rate: `(H↑_{1+s} - R, (1/s) max_t [t H_{1+t|1+s} - tR])`.
pub fn gup_plus_clauses(src: &JointSource, s: f64, r: f64) -> Result<(f64, f64)> {
    BoundKind::GupPlus.check_s(s)?;
    let prof = Profile::new(src);
    let f = |t: f64| if t == 0.0 { 0.0 } else { -(1.0 + s) * prof.ln_w(s, t) - t * r };
    Ok((prof.gallager(s) - r, golden_max(f, 0.0, s, GOLDEN_TOL).1 / s))
}

/// Sampled `(R, value)` rows for one kind at fixed `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub s: f64,
    pub rows: Vec<(f64, f64)>,
}

/// `R_i = r_min + i (r_max - r_min) / (steps - 1)`.
pub fn rate_grid(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(r_min < r_max) || steps < 2 {
        return Err(param(format!("need r_min < r_max and steps >= 2 (got {r_min}, {r_max}, {steps})")));
    }
    check_rate(r_min)?;
    check_rate(r_max)?;
    let span = r_max - r_min;
    Ok((0..steps)
        .map(|i| if i == steps - 1 { r_max } else { r_min + span * i as f64 / (steps - 1) as f64 })
        .collect())
}

pub fn bound_curve(
    src: &JointSource,
    kind: BoundKind,
    s: f64,
    r_min: f64,
    r_max: f64,
    steps: usize,
) -> Result<BoundCurve> {
    kind.check_s(s)?;
    let grid = rate_grid(r_min, r_max, steps)?;
    let prof = Profile::new(src);
    let rows = grid.into_iter().map(|r| (r, eval(&prof, kind, s, r))).collect();
    Ok(BoundCurve { kind, s, rows })
}

/// `s0(A|P_A)`: the root of `H_{1-s}(p) = H(p^{(s-1)})` on `[0, 1]`, and 1
/// when `p` is uniform on its support.
pub fn s0_single(p: &Pmf) -> f64 {
    if p.is_uniform_on_support() {
        return 1.0;
    }
    let log_supp = ln(p.support_size() as f64);
    let f = |s: f64| {
        if s <= 0.0 {
            return p.shannon() - log_supp;
        }
        let tilted = p.tilt(s - 1.0).map(|q| q.shannon()).unwrap_or(log_supp);
        p.renyi(-s) - tilted
    };
    bisect(f, 0.0, 1.0, 1e-10)
}

/// Minimum of [`s0_single`] over the conditionals `P_{A|E=e}`.
pub fn s0_joint(src: &JointSource) -> f64 {
    src.live_e()
        .filter_map(|e| src.conditional_given_e(e).ok())
        .map(|c| s0_single(&c))
        .fold(1.0, f64::min)
}

/// Optimal-rate thresholds at one `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub s: f64,
    pub s0: f64,
    /// Upper bound on the rate threshold for order `1-s`: `H_{1-s}`.
    pub t_minus_upper: f64,
    /// Strongly-universal converse rate, `H_{1-s}`; valid when `s <= s0`.
    pub t_minus_strong_lower: f64,
    pub strong_lower_valid: bool,
    /// `H(A|E)`.
    pub t_plus: f64,
    /// `H↑_{1-s}`; valid when `s <= 1/2`.
    pub t_up_minus: f64,
    pub up_minus_valid: bool,
    /// `H(A|E)`.
    pub t_up_plus: f64,
}

pub fn thresholds(src: &JointSource, s: f64) -> Result<Thresholds> {
    if !(0.0..=1.0).contains(&s) {
        return Err(param(format!("thresholds need s in [0,1], got {s}")));
    }
    let prof = Profile::new(src);
    let s0 = s0_joint(src);
    let h_minus = prof.plain(-s);
    let shannon = prof.shannon();
    Ok(Thresholds {
        s,
        s0,
        t_minus_upper: h_minus,
        t_minus_strong_lower: h_minus,
        strong_lower_valid: s <= s0,
        t_plus: shannon,
        t_up_minus: prof.gallager(-s),
        up_minus_valid: s <= 0.5,
        t_up_plus: shannon,
    })
}

/// `t_R` with `H(p^{(t_R)}) = R`. The achievable interval is
/// `(ln #argmax p, ln |supp p|]`.
pub fn t_r_solve(p: &Pmf, r: f64) -> Result<f64> {
    let supp = p.support_size();
    let hi = ln(supp as f64);
    let max = p.probs().iter().copied().fold(0.0, f64::max);
    let n_max = p.probs().iter().filter(|x| **x >= max * (1.0 - 1e-12)).count();
    let lo = ln(n_max as f64);
    if p.is_uniform_on_support() {
        if fabs(r - hi) <= 1e-12 {
            return Ok(0.0);
        }
        return Err(Error::Range { rate: r, lo, hi });
    }
    if !(r > lo) || r > hi + 1e-12 {
        return Err(Error::Range { rate: r, lo, hi });
    }
    let h = |t: f64| p.tilt(t).map(|q| q.shannon()).unwrap_or(hi);
    let floor = -1.0 + T_R_DELTA;
    if r >= h(floor) {
        return Ok(floor);
    }
    let mut top = 1.0;
    while h(top) > r {
        top *= 2.0;
        if top > 1e12 {
            return Err(Error::Range { rate: r, lo, hi });
        }
    }
    Ok(bisect(|t| h(t) - r, floor, top, 1e-12))
}

/// `Λ(s, R)`: `s (R + D(p^{(t_R)} || p))` when `s - 1 <= t_R`, otherwise
/// `R + γ(s - 1)`.
pub fn lambda_exponent(p: &Pmf, s: f64, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(param(format!("Λ needs s in [0,1], got {s}")));
    }
    let t = t_r_solve(p, r)?;
    if s - 1.0 <= t {
        let tilted = p.tilt(t)?;
        Ok(s * (r + kl_divergence(tilted.probs(), p.probs())))
    } else {
        Ok(r + p.gamma(s - 1.0))
    }
}

/// `D(p^{(t)} || p) = γ(t) - t γ'(t)`.
pub fn tilted_divergence(p: &Pmf, t: f64) -> Result<f64> {
    Ok(p.gamma(t) - t * p.gamma_prime(t)?)
}

/// `H(p^{(t)}) = (1+t) γ'(t) - γ(t)`.
pub fn tilted_entropy(p: &Pmf, t: f64) -> Result<f64> {
    Ok((1.0 + t) * p.gamma_prime(t)? - p.gamma(t))
}

/// Human-readable summary line for a threshold record.
pub fn describe_thresholds(t: &Thresholds) -> String {
    format!(
        "s={} s0={} t_minus_upper={} t_minus_strong_lower={} (valid={}) t_plus={} t_up_minus={} (valid={}) t_up_plus={}",
        t.s,
        t.s0,
        t.t_minus_upper,
        t.t_minus_strong_lower,
        t.strong_lower_valid,
        t.t_plus,
        t.t_up_minus,
        t.up_minus_valid,
        t.t_up_plus
    )
}
