//! Randomized verification suites. Each trial draws from its own ChaCha
//! stream, `(seed, trial)`, so results do not depend on scheduling; trials run
//! on a rayon pool capped by `RUQ_THREADS` and are reported in trial order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ruq_core::gf2m::Gf2mField;
use ruq_core::hash::{
    make_affine_prime_family, make_binning_family, make_binning_family_lazy, make_gf2m_family,
    verify_universality, HashFamily, UniversalityLevel,
};
use ruq_core::oneshot::{
    binomial_moment_check, certify, expected_preimage_mass_check, fehr_berens_check, lower_gallager, lower_renyi,
    upper_gallager, upper_renyi, BinomialMomentQuery, OneShotInstance,
};
use ruq_core::slepian_wolf::SwSystem;
use ruq_core::source::iid_extend;
use ruq_core::{JointSource, VerificationReport};

use crate::CliResult;

/// Order offsets per one-shot inequality, inside each one's stated range.
pub const UPPER_RENYI_S: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 1.0];
pub const UPPER_GALLAGER_S: [f64; 4] = [0.05, 0.2, 0.35, 0.5];
pub const LOWER_RENYI_S: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 1.0];
pub const LOWER_GALLAGER_S: [f64; 5] = [0.05, 0.5, 1.0, 2.0, 5.0];
/// Order `1 - s` of the chain-rule window check.
pub const WINDOW_S: f64 = 0.4;

/// The RNG for one trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Worker count from `RUQ_THREADS`, else the hardware count.
pub fn thread_count() -> usize {
    std::env::var("RUQ_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs `f(trial, rng)` for every trial and returns the results in order.
pub fn run_trials<T, F>(trials: usize, seed: u64, f: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> CliResult<T> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| crate::CliError::Input(format!("thread pool: {e}")))?;
    pool.install(|| (0..trials).into_par_iter().map(|t| f(t, &mut trial_rng(seed, t))).collect())
}

/// A random joint law on `a_size x e_size`, with at most `support_max` live
/// symbols of `A` placed at random positions and about a fifth of the live
/// cells zeroed.
pub fn random_source(rng: &mut ChaCha8Rng, a_size: usize, e_size: usize, support_max: usize) -> JointSource {
    let live = a_size.min(support_max.max(2)).min(a_size);
    let mut slots: Vec<usize> = (0..a_size).collect();
    slots.shuffle(rng);
    loop {
        let mut cells = vec![0.0; a_size * e_size];
        for &a in &slots[..live] {
            for e in 0..e_size {
                if !rng.gen_bool(0.2) {
                    cells[a * e_size + e] = -rng.gen_range(1e-6f64..1.0).ln();
                }
            }
        }
        let total: f64 = cells.iter().sum();
        if total > 0.0 {
            cells.iter_mut().for_each(|c| *c /= total);
            if let Ok(src) = JointSource::new(a_size, e_size, cells) {
                return src;
            }
        }
    }
}

/// Which family a suite hashes with.
#[derive(Debug, Clone)]
pub enum FamilySpec {
    Binning { a_size: usize, m: usize },
    Gf2m { m: u32, l: u32, j: u32 },
    Affine { a_size: usize, m: usize, p: u64 },
    Table(HashFamily),
}

impl FamilySpec {
    pub fn build(&self) -> CliResult<HashFamily> {
        Ok(match self {
            FamilySpec::Binning { a_size, m } => make_binning_family(*a_size, *m)?,
            FamilySpec::Gf2m { m, l, j } => make_gf2m_family(Gf2mField::new(*m)?, *l, *j)?,
            FamilySpec::Affine { a_size, m, p } => make_affine_prime_family(*a_size, *m, *p)?,
            FamilySpec::Table(f) => f.clone(),
        })
    }
}

/// Where suite sources come from.
#[derive(Debug, Clone)]
pub enum SourceSpec {
    /// Fresh random source per trial with `|E|` drawn from `1..=e_max`.
    Random { e_max: usize, support_max: usize },
    Fixed(JointSource),
}

impl SourceSpec {
    fn draw(&self, rng: &mut ChaCha8Rng, a_size: usize) -> CliResult<JointSource> {
        match self {
            SourceSpec::Random { e_max, support_max } => {
                let ne = rng.gen_range(1..=(*e_max).max(1));
                Ok(random_source(rng, a_size, ne, *support_max))
            }
            SourceSpec::Fixed(src) if src.a_size() == a_size => Ok(src.clone()),
            SourceSpec::Fixed(src) => Err(crate::CliError::Usage(format!(
                "source alphabet {} does not match the family domain {a_size}",
                src.a_size()
            ))),
        }
    }
}

/// Every one-shot inequality on its order grid plus the chain-rule window,
/// for each trial.
pub fn oneshot_suite(family: &FamilySpec, source: &SourceSpec, trials: usize, seed: u64) -> CliResult<VerificationReport> {
    let fam = family.build()?;
    let certified = certify(&fam)?;
    let parts = run_trials(trials, seed, |_, rng| {
        let src = source.draw(rng, fam.domain_size)?;
        let mut rep = VerificationReport::new();
        let inst = |s| OneShotInstance::new(src.clone(), fam.clone(), s);
        for s in UPPER_RENYI_S {
            rep.push(upper_renyi(&inst(s)?, certified)?);
        }
        for s in UPPER_GALLAGER_S {
            rep.push(upper_gallager(&inst(s)?, certified)?);
        }
        for s in LOWER_RENYI_S {
            rep.push(lower_renyi(&inst(s)?, certified)?);
        }
        for s in LOWER_GALLAGER_S {
            rep.push(lower_gallager(&inst(s)?, certified)?);
        }
        rep.extend(fehr_berens_check(&inst(0.0)?, WINDOW_S)?);
        Ok(rep)
    })?;
    let mut out = VerificationReport::new();
    if !certified {
        out.flag("family-not-certified");
    }
    parts.into_iter().for_each(|p| out.extend(p));
    Ok(out)
}

/// Strong-converse identity and the error chain on random block systems:
/// `n` from `1..=n_max`, encoder one seed of a lazily evaluated binning.
pub fn sw_suite(
    source: &SourceSpec,
    a_max: usize,
    n_max: usize,
    orders: &[f64],
    trials: usize,
    seed: u64,
) -> CliResult<VerificationReport> {
    let parts = run_trials(trials, seed, |_, rng| {
        let src = match source {
            SourceSpec::Fixed(s) => s.clone(),
            SourceSpec::Random { .. } => {
                let na = rng.gen_range(2..=a_max.max(2));
                source.draw(rng, na)?
            }
        };
        let n = rng.gen_range(1..=n_max.max(1));
        let prod = iid_extend(&src, n)?;
        let m = rng.gen_range(1..=prod.a_blocks().min(8));
        let fam = make_binning_family_lazy(prod.a_blocks(), m, rng.gen())?;
        let sys = SwSystem::from_family_seed(prod, &fam, rng.gen())?;
        let mut rep = sys.verify_strong_converse_identity()?;
        for &s in orders {
            rep.extend(sys.verify_prop1_chain(s)?);
        }
        Ok(rep)
    })?;
    let mut out = VerificationReport::new();
    parts.into_iter().for_each(|p| out.extend(p));
    Ok(out)
}

/// Universality at `level`, then the expected-preimage-mass chain on
/// `trials` random sources.
pub fn hash_suite(
    family: &FamilySpec,
    level: UniversalityLevel,
    source: &SourceSpec,
    trials: usize,
    seed: u64,
) -> CliResult<VerificationReport> {
    let fam = family.build()?;
    let mut out = verify_universality(&fam, level)?;
    let parts = run_trials(trials, seed, |_, rng| {
        let src = source.draw(rng, fam.domain_size)?;
        Ok(expected_preimage_mass_check(&src, &fam)?)
    })?;
    parts.into_iter().for_each(|p| out.extend(p));
    Ok(out)
}

/// The 120-cell grid of block lengths, probabilities, orders and deviations.
pub fn binomial_grid() -> Vec<BinomialMomentQuery> {
    let mut out = Vec::with_capacity(120);
    for l in [1u64, 10, 100, 1000, 10_000] {
        for p in [0.01, 0.1, 0.5, 0.9] {
            for s in [0.25, 0.5, 1.0] {
                for eps in [0.1, 0.5] {
                    out.push(BinomialMomentQuery { l, p, s, eps });
                }
            }
        }
    }
    out
}

pub fn binomial_suite(queries: &[BinomialMomentQuery]) -> CliResult<VerificationReport> {
    let mut out = VerificationReport::new();
    for q in queries {
        out.extend(binomial_moment_check(q)?);
    }
    Ok(out)
}

/// One row of an error-exponent trend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendRow {
    pub n: usize,
    pub m: usize,
    pub error: f64,
    pub exponent: f64,
}

/// Deals blocks to messages in order of decreasing marginal probability, so
/// the `M` most likely blocks never share a message.
pub fn ranked_encoder(src: &JointSource, n: usize, m: usize) -> CliResult<SwSystem> {
    let prod = iid_extend(src, n)?;
    let marg: Vec<f64> = (0..prod.a_blocks())
        .map(|a| (0..prod.e_blocks()).map(|e| prod.prob(a, e)).sum())
        .collect();
    let mut order: Vec<usize> = (0..prod.a_blocks()).collect();
    order.sort_by(|a, b| marg[*b].total_cmp(&marg[*a]).then(a.cmp(b)));
    let mut enc = vec![0; prod.a_blocks()];
    for (rank, a) in order.into_iter().enumerate() {
        enc[a] = rank % m;
    }
    Ok(SwSystem::new(prod, enc, m)?)
}

/// `-(1/n) ln P_e` for `n` in `ns` at `M = ceil(e^{nR})`. A trend, not a
/// limit.
pub fn exponent_trend(src: &JointSource, rate: f64, ns: std::ops::RangeInclusive<usize>) -> CliResult<Vec<TrendRow>> {
    ns.map(|n| {
        let m = ((rate * n as f64).exp().ceil() as usize).max(1);
        let sys = ranked_encoder(src, n, m)?;
        let error = sys.correct_probability().error;
        Ok(TrendRow { n, m, error, exponent: sys.error_exponent() })
    })
    .collect()
}
