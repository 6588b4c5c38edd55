//! Verification records and their line-oriented text form.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Outcome of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The hash family did not certify for the level the check assumes.
    PreconditionFailed,
    /// Both sides are infinite or otherwise not comparable.
    Degenerate,
    /// Sampled rather than exact; `slack` holds a confidence half-width.
    Estimate,
}

impl Verdict {
    pub fn token(self) -> &'static str {
        match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::PreconditionFailed => "PRECONDITION_FAILED",
            Self::Degenerate => "DEGENERATE",
            Self::Estimate => "ESTIMATE",
        }
    }

    /// `PASS` when `slack >= -tol`, else `FAIL`. NaN slack fails.
    pub fn from_slack(slack: f64, tol: f64) -> Self {
        if slack >= -tol {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.token())
    }
}

/// One inequality or identity check: `slack = rhs - lhs` for `lhs <= rhs`
/// checks, `lhs - rhs` for `lhs >= rhs` checks, `-|lhs - rhs|` for identities.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub verdict: Verdict,
}

/// Slack tolerance used by every inequality check.
pub const SLACK_TOL: f64 = 1e-12;

impl CheckRecord {
    /// Record for `lhs <= rhs`.
    pub fn le(id: &str, instance: &str, lhs: f64, rhs: f64) -> Self {
        Self::with_slack(id, instance, lhs, rhs, rhs - lhs, SLACK_TOL)
    }

    /// Record for `lhs >= rhs`.
    pub fn ge(id: &str, instance: &str, lhs: f64, rhs: f64) -> Self {
        Self::with_slack(id, instance, lhs, rhs, lhs - rhs, SLACK_TOL)
    }

    /// Record for `|lhs - rhs| <= tol`.
    pub fn eq(id: &str, instance: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = if lhs == rhs { 0.0 } else { -(lhs - rhs).abs() };
        Self::with_slack(id, instance, lhs, rhs, slack, tol)
    }

    pub fn with_slack(id: &str, instance: &str, lhs: f64, rhs: f64, slack: f64, tol: f64) -> Self {
        Self {
            id: id.into(),
            instance: instance.into(),
            lhs,
            rhs,
            slack,
            verdict: Verdict::from_slack(slack, tol),
        }
    }

    pub fn with_verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        self
    }

    /// `CHECK <id> instance=<desc> lhs=<v> rhs=<v> slack=<v> verdict=<V>` with
    /// `digits` significant digits.
    pub fn render(&self, digits: usize) -> String {
        format!(
            "CHECK {} instance={} lhs={} rhs={} slack={} verdict={}",
            self.id,
            self.instance,
            fmt_sig(self.lhs, digits),
            fmt_sig(self.rhs, digits),
            fmt_sig(self.slack, digits),
            self.verdict
        )
    }
}

impl core::fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.render(17))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
    /// Notes that qualify the whole report, such as `pairwise-only`.
    pub flags: Vec<String>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, rec: CheckRecord) {
        self.records.push(rec);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.records.extend(other.records);
        for f in other.flags {
            if !self.flags.contains(&f) {
                self.flags.push(f);
            }
        }
    }

    pub fn flag(&mut self, f: &str) {
        if !self.flags.iter().any(|x| x == f) {
            self.flags.push(f.into());
        }
    }

    pub fn has_flag(&self, f: &str) -> bool {
        self.flags.iter().any(|x| x == f)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == v).count()
    }

    /// No record failed.
    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }

    /// Every record is an outright pass.
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn min_slack(&self) -> f64 {
        self.records.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn render(&self, digits: usize) -> String {
        let mut out = String::new();
        for f in &self.flags {
            out.push_str(&format!("# flag: {f}\n"));
        }
        for r in &self.records {
            out.push_str(&r.render(digits));
            out.push('\n');
        }
        out
    }
}

/// `%g`-style formatting with `digits` significant digits.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if exp < -5 || exp >= digits as i32 {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).into()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
