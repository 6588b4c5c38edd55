//! Seeded hash families `{f_x : A -> {1..M}}` and exact certification of
//! their universality level.
//!
//! Buckets are `0..M` internally; text output adds one.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::gf2m::Gf2mField;
use crate::math::{fabs, neumaier_sum};
use crate::report::{CheckRecord, VerificationReport, SLACK_TOL};
use crate::DEFAULT_SEED_CAP;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// Every function `A -> {1..M}` with equal probability. With `explicit`
    /// the seed is the base-`M` encoding of the function table; otherwise the
    /// seed keys a mixing function and the family can only be sampled.
    Binning { explicit: bool, key: u64 },
    /// `x -> piece j (l bits, most significant first) of X·a`, `X != 0`.
    Gf2mPiece { field: Gf2mField, l: u32, j: u32 },
    /// `((k a + b) mod p) mod M` with `k != 0`.
    AffinePrime { p: u64 },
    /// Explicit seed probabilities and bucket table `table[x][a]`.
    CustomTable { probs: Vec<f64>, table: Vec<Vec<u32>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HashFamily {
    pub domain_size: usize,
    pub range_size: usize,
    pub kind: FamilyKind,
    pub epsilon_claim: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

impl HashFamily {
    /// Number of seeds when the family is enumerable.
    pub fn seed_count(&self) -> Option<u64> {
        match &self.kind {
            FamilyKind::Binning { explicit: true, .. } => checked_pow(self.range_size as u64, self.domain_size),
            FamilyKind::Binning { explicit: false, .. } => None,
            FamilyKind::Gf2mPiece { field, .. } => Some(field.order() as u64 - 1),
            FamilyKind::AffinePrime { p } => Some(p * (p - 1)),
            FamilyKind::CustomTable { probs, .. } => Some(probs.len() as u64),
        }
    }

    pub fn is_enumerable(&self) -> bool {
        self.seed_count().is_some()
    }

    /// True when all seeds are equally likely.
    pub fn uniform_seeds(&self) -> bool {
        match &self.kind {
            FamilyKind::CustomTable { probs, .. } => probs.iter().all(|p| *p == probs[0]),
            _ => true,
        }
    }

    pub fn seed_prob(&self, x: u64) -> f64 {
        match &self.kind {
            FamilyKind::CustomTable { probs, .. } => probs[x as usize],
            _ => match self.seed_count() {
                Some(n) => 1.0 / n as f64,
                None => 0.0,
            },
        }
    }

    /// Bucket of `a` under seed `x`, in `0..M`.
    pub fn eval(&self, x: u64, a: usize) -> usize {
        let m = self.range_size as u64;
        match &self.kind {
            FamilyKind::Binning { explicit: true, .. } => ((x / m.pow(a as u32)) % m) as usize,
            FamilyKind::Binning { explicit: false, key } => {
                let h = splitmix64(splitmix64(key ^ x).wrapping_add(a as u64));
                ((h as u128 * m as u128) >> 64) as usize
            }
            FamilyKind::Gf2mPiece { field, l, j } => {
                let y = field.mul(x as u32 + 1, a as u32);
                let shift = field.m() - j * l;
                ((y >> shift) & ((1 << l) - 1)) as usize
            }
            FamilyKind::AffinePrime { p } => {
                let k = x / p + 1;
                let b = x % p;
                (((k as u128 * a as u128 + b as u128) % *p as u128) as u64 % m) as usize
            }
            FamilyKind::CustomTable { table, .. } => table[x as usize][a] as usize,
        }
    }

    /// The whole function table of seed `x`.
    pub fn table(&self, x: u64) -> Vec<usize> {
        (0..self.domain_size).map(|a| self.eval(x, a)).collect()
    }

    pub fn describe(&self) -> String {
        let kind = match &self.kind {
            FamilyKind::Binning { explicit, .. } => {
                if *explicit {
                    String::from("binning")
                } else {
                    String::from("binning-lazy")
                }
            }
            FamilyKind::Gf2mPiece { field, l, j } => format!("gf2m(m={},l={l},j={j})", field.m()),
            FamilyKind::AffinePrime { p } => format!("affine(p={p})"),
            FamilyKind::CustomTable { probs, .. } => format!("table(seeds={})", probs.len()),
        };
        format!("{kind},A={},M={}", self.domain_size, self.range_size)
    }
}

/// Random binning with every function enumerated; errors when `M^|A|`
/// exceeds the seed cap.
pub fn make_binning_family(a_size: usize, m: usize) -> Result<HashFamily> {
    make_binning_family_capped(a_size, m, DEFAULT_SEED_CAP)
}

pub fn make_binning_family_capped(a_size: usize, m: usize, cap: u64) -> Result<HashFamily> {
    if a_size == 0 || m == 0 {
        return Err(param("binning needs |A| >= 1 and M >= 1"));
    }
    match checked_pow(m as u64, a_size) {
        Some(n) if n <= cap => Ok(HashFamily {
            domain_size: a_size,
            range_size: m,
            kind: FamilyKind::Binning { explicit: true, key: 0 },
            epsilon_claim: 1.0,
        }),
        _ => Err(Error::Resource(format!("{m}^{a_size} binning seeds exceed the cap of {cap}"))),
    }
}

/// Random binning over a seeded mixing function, for sampling only.
pub fn make_binning_family_lazy(a_size: usize, m: usize, key: u64) -> Result<HashFamily> {
    if a_size == 0 || m == 0 {
        return Err(param("binning needs |A| >= 1 and M >= 1"));
    }
    Ok(HashFamily {
        domain_size: a_size,
        range_size: m,
        kind: FamilyKind::Binning { explicit: false, key },
        epsilon_claim: 1.0,
    })
}

/// Piece `j` (1-based, most significant first) of width `l` of `X·a`.
pub fn make_gf2m_family(field: Gf2mField, l: u32, j: u32) -> Result<HashFamily> {
    let m = field.m();
    if l == 0 || !m.is_multiple_of(l) {
        return Err(param(format!("piece width l={l} must divide m={m}")));
    }
    if j == 0 || j > m / l {
        return Err(param(format!("piece index j={j} must be in 1..={}", m / l)));
    }
    Ok(HashFamily {
        domain_size: 1 << m,
        range_size: 1 << l,
        kind: FamilyKind::Gf2mPiece { field, l, j },
        epsilon_claim: 1.0,
    })
}

/// `((k a + b) mod p) mod M` over `k in 1..p`, `b in 0..p`; needs `|A| <= p`.
pub fn make_affine_prime_family(a_size: usize, m: usize, p: u64) -> Result<HashFamily> {
    if !is_prime(p) || (a_size as u64) > p || m == 0 {
        return Err(param(format!("affine family needs a prime p >= |A|; got p={p}, |A|={a_size}")));
    }
    Ok(HashFamily { domain_size: a_size, range_size: m, kind: FamilyKind::AffinePrime { p }, epsilon_claim: 1.0 })
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A family from an explicit table with 0-based buckets.
pub fn make_custom_family(
    a_size: usize,
    m: usize,
    probs: Vec<f64>,
    table: Vec<Vec<u32>>,
    epsilon_claim: f64,
) -> Result<HashFamily> {
    if probs.is_empty() || probs.len() != table.len() {
        return Err(Error::Validation("seed probabilities and table rows must match".into()));
    }
    if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::Validation("seed probabilities must be nonnegative".into()));
    }
    let total = neumaier_sum(probs.iter().copied());
    if fabs(total - 1.0) > crate::INPUT_MASS_TOL {
        return Err(Error::Validation(format!("seed probabilities sum to {total}")));
    }
    for (x, row) in table.iter().enumerate() {
        if row.len() != a_size {
            return Err(Error::Validation(format!("seed {x} has {} entries, expected {a_size}", row.len())));
        }
        if row.iter().any(|b| *b as usize >= m) {
            return Err(Error::Validation(format!("seed {x} maps outside 1..={m}")));
        }
    }
    let probs = probs.iter().map(|p| p / total).collect();
    Ok(HashFamily { domain_size: a_size, range_size: m, kind: FamilyKind::CustomTable { probs, table }, epsilon_claim })
}

/// Parses `M=<int> seeds=<int>` followed by one line per seed: a probability
/// and `|A|` buckets in `1..=M`. `#` starts a comment.
pub fn parse_custom_table(text: &str, epsilon_claim: f64) -> Result<HashFamily> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty table".into() })?;
    let mut m = None;
    let mut seeds = None;
    for tok in header.split_whitespace() {
        let bad = || Error::Parse { line: hline, msg: format!("bad header token `{tok}`") };
        let (k, v) = tok.split_once('=').ok_or_else(bad)?;
        let v: usize = v.parse().map_err(|_| bad())?;
        match k {
            "M" => m = Some(v),
            "seeds" => seeds = Some(v),
            _ => return Err(bad()),
        }
    }
    let (m, seeds) = match (m, seeds) {
        (Some(m), Some(s)) if m > 0 && s > 0 => (m, s),
        _ => return Err(Error::Parse { line: hline, msg: "header must be `M=<int> seeds=<int>`".into() }),
    };
    let mut probs = Vec::with_capacity(seeds);
    let mut table = Vec::with_capacity(seeds);
    let mut a_size = None;
    for (line, body) in lines {
        let mut toks = body.split_whitespace();
        let p: f64 = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(Error::Parse { line, msg: "expected a seed probability".into() })?;
        let mut row = Vec::new();
        for t in toks {
            let b: u32 = t.parse().map_err(|_| Error::Parse { line, msg: format!("bad bucket `{t}`") })?;
            if b == 0 || b as usize > m {
                return Err(Error::Parse { line, msg: format!("bucket {b} outside 1..={m}") });
            }
            row.push(b - 1);
        }
        match a_size {
            None => a_size = Some(row.len()),
            Some(n) if n != row.len() => {
                return Err(Error::Parse { line, msg: format!("expected {n} buckets, found {}", row.len()) })
            }
            _ => {}
        }
        probs.push(p);
        table.push(row);
    }
    if probs.len() != seeds {
        return Err(Error::Parse { line: hline, msg: format!("header says {seeds} seeds, found {}", probs.len()) });
    }
    make_custom_family(a_size.unwrap_or(0), m, probs, table, epsilon_claim)
}

/// A collision probability, exact when seeds are uniform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Collision {
    Exact { num: u64, den: u64 },
    Real(f64),
}

impl Collision {
    pub fn value(self) -> f64 {
        match self {
            Self::Exact { num, den } => num as f64 / den as f64,
            Self::Real(v) => v,
        }
    }

    /// `self <= eps / M`, exactly when possible.
    pub fn at_most(self, eps: f64, m: usize) -> bool {
        match self {
            Self::Exact { num, den } if eps == 1.0 => (num as u128) * (m as u128) <= den as u128,
            other => other.value() <= eps / m as f64 + SLACK_TOL,
        }
    }
}

fn require_enumerable(fam: &HashFamily) -> Result<u64> {
    fam.seed_count()
        .filter(|n| *n <= DEFAULT_SEED_CAP)
        .ok_or_else(|| Error::Unsupported(format!("{} is not enumerable", fam.describe())))
}

/// `Pr_X(f_X(a1) = f_X(a2))` by enumeration.
pub fn collision_probability(fam: &HashFamily, a1: usize, a2: usize) -> Result<Collision> {
    let n = require_enumerable(fam)?;
    if a1 == a2 || a1 >= fam.domain_size || a2 >= fam.domain_size {
        return Err(param(format!("need distinct symbols inside the domain, got {a1} and {a2}")));
    }
    if fam.uniform_seeds() {
        let hits = (0..n).filter(|&x| fam.eval(x, a1) == fam.eval(x, a2)).count() as u64;
        Ok(Collision::Exact { num: hits, den: n })
    } else {
        let p = neumaier_sum((0..n).filter(|&x| fam.eval(x, a1) == fam.eval(x, a2)).map(|x| fam.seed_prob(x)));
        Ok(Collision::Real(p))
    }
}

/// Collision probabilities of all distinct pairs `a1 < a2`, row-major.
pub fn all_collisions(fam: &HashFamily) -> Result<Vec<Collision>> {
    let n = require_enumerable(fam)?;
    let k = fam.domain_size;
    let uniform = fam.uniform_seeds();
    let mut counts = alloc::vec![0u64; k * k];
    let mut weights = alloc::vec![0.0f64; k * k];
    let mut by_bucket: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        by_bucket.clear();
        for a in 0..k {
            by_bucket.entry(fam.eval(x, a)).or_default().push(a);
        }
        let w = fam.seed_prob(x);
        for members in by_bucket.values() {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    counts[a * k + b] += 1;
                    weights[a * k + b] += w;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            out.push(if uniform {
                Collision::Exact { num: counts[a * k + b], den: n }
            } else {
                Collision::Real(weights[a * k + b])
            });
        }
    }
    Ok(out)
}

/// The largest collision probability over distinct pairs (0 for `|A| = 1`).
pub fn max_collision(fam: &HashFamily) -> Result<Collision> {
    let all = all_collisions(fam)?;
    Ok(all
        .into_iter()
        .fold(None, |best: Option<Collision>, c| match best {
            Some(b) if b.value() >= c.value() => Some(b),
            _ => Some(c),
        })
        .unwrap_or(Collision::Exact { num: 0, den: 1 }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UniversalityLevel {
    AlmostUniversal2(f64),
    Universal2,
    StronglyUniversal,
}

impl core::fmt::Display for UniversalityLevel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::AlmostUniversal2(e) => write!(f, "almost_universal2(eps={e})"),
            Self::Universal2 => write!(f, "universal2"),
            Self::StronglyUniversal => write!(f, "strongly_universal"),
        }
    }
}

/// Report flag set when only pairwise independence could be checked.
pub const PAIRWISE_ONLY: &str = "pairwise-only";

/// Certifies `fam` at `level`. Failures are verdicts, not errors; only a
/// non-enumerable family is an error.
pub fn verify_universality(fam: &HashFamily, level: UniversalityLevel) -> Result<VerificationReport> {
    verify_universality_capped(fam, level, DEFAULT_SEED_CAP)
}

/// As [`verify_universality`], with `joint_cap` bounding the `M^|A|` cells of
/// the full joint law for the strongly universal check.
pub fn verify_universality_capped(
    fam: &HashFamily,
    level: UniversalityLevel,
    joint_cap: u64,
) -> Result<VerificationReport> {
    let n = require_enumerable(fam)?;
    let desc = fam.describe();
    let mut rep = VerificationReport::new();
    let m = fam.range_size;
    match level {
        UniversalityLevel::AlmostUniversal2(eps) => {
            let c = max_collision(fam)?;
            let rhs = eps / m as f64;
            let mut rec = CheckRecord::le("collision-max", &desc, c.value(), rhs);
            rec.verdict = if c.at_most(eps, m) { crate::Verdict::Pass } else { crate::Verdict::Fail };
            rep.push(rec);
        }
        UniversalityLevel::Universal2 => {
            let c = max_collision(fam)?;
            let mut rec = CheckRecord::le("collision-max", &desc, c.value(), 1.0 / m as f64);
            rec.verdict = if c.at_most(1.0, m) { crate::Verdict::Pass } else { crate::Verdict::Fail };
            rep.push(rec);
        }
        UniversalityLevel::StronglyUniversal => {
            let k = fam.domain_size;
            let cells = checked_pow(m as u64, k).filter(|c| *c <= joint_cap);
            match cells {
                Some(cells) => {
                    // Joint law of (f_X(a))_a against the product of uniforms.
                    let mut hist: BTreeMap<u64, f64> = BTreeMap::new();
                    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
                    for x in 0..n {
                        let mut idx = 0u64;
                        for a in (0..k).rev() {
                            idx = idx * m as u64 + fam.eval(x, a) as u64;
                        }
                        *hist.entry(idx).or_default() += fam.seed_prob(x);
                        *counts.entry(idx).or_default() += 1;
                    }
                    let target = 1.0 / cells as f64;
                    let (dev, exact_ok) = if fam.uniform_seeds() {
                        let ok = hist.len() as u64 == cells
                            && counts.values().all(|c| (*c as u128) * (cells as u128) == n as u128);
                        let worst = if hist.len() as u64 == cells {
                            counts.values().map(|c| fabs(*c as f64 / n as f64 - target)).fold(0.0, f64::max)
                        } else {
                            target
                        };
                        (worst, ok)
                    } else {
                        let mut worst = if (hist.len() as u64) < cells { target } else { 0.0 };
                        for w in hist.values() {
                            worst = f64::max(worst, fabs(w - target));
                        }
                        (worst, worst <= SLACK_TOL)
                    };
                    let mut rec = CheckRecord::le("joint-uniform", &desc, dev, 0.0);
                    rec.verdict = if exact_ok { crate::Verdict::Pass } else { crate::Verdict::Fail };
                    rep.push(rec);
                }
                None => {
                    rep.flag(PAIRWISE_ONLY);
                    let dev = pairwise_deviation(fam, n);
                    rep.push(CheckRecord::le("pairwise-uniform", &desc, dev, 0.0));
                }
            }
        }
    }
    Ok(rep)
}

/// Largest deviation of any marginal or pair law from uniform.
fn pairwise_deviation(fam: &HashFamily, n: u64) -> f64 {
    let (k, m) = (fam.domain_size, fam.range_size);
    let mut marg = alloc::vec![0.0; k * m];
    let mut pair = alloc::vec![0.0; k * k * m * m];
    for x in 0..n {
        let w = fam.seed_prob(x);
        let t = fam.table(x);
        for a in 0..k {
            marg[a * m + t[a]] += w;
            for b in a + 1..k {
                pair[((a * k + b) * m + t[a]) * m + t[b]] += w;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for v in &marg {
        worst = worst.max(fabs(v - 1.0 / m as f64));
    }
    for a in 0..k {
        for b in a + 1..k {
            for i in 0..m * m {
                worst = worst.max(fabs(pair[(a * k + b) * m * m + i] - 1.0 / (m * m) as f64));
            }
        }
    }
    worst
}
