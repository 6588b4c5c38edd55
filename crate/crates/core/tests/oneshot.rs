mod common;

use common::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruq_core::gf2m::Gf2mField;
use ruq_core::hash::{make_binning_family, make_gf2m_family, HashFamily};
use ruq_core::oneshot::{
    binomial_moment, binomial_moment_check, fehr_berens_check, hashed_conditional_entropy,
    hashed_conditional_entropy_sampled, hashed_entropy_direct, lower_gallager, lower_renyi, upper_gallager,
    upper_renyi, BinomialMomentQuery, OneShotInstance,
};
use ruq_core::{JointSource, RenyiOrderSpec as Spec, Verdict};

fn tables_of(fam: &HashFamily) -> Vec<(f64, Vec<usize>)> {
    (0..fam.seed_count().unwrap()).map(|x| (fam.seed_prob(x), fam.table(x))).collect()
}

fn naive(t: &Table, spec: Spec) -> f64 {
    match spec {
        Spec::Shannon => shannon(t),
        Spec::Plain { s } => plain(t, s),
        Spec::Gallager { s } => gallager(t, s),
        Spec::TwoParam { s, t: tt } => two_param(t, s, tt),
        Spec::Min => min_entropy(t),
        Spec::MinGallager => min_gallager(t),
    }
}

/// `E_X g(H(A | f_X(A), E))` with the per-seed entropy from the naive oracle.
fn seed_mean(t: &Table, fam: &HashFamily, spec: Spec, g: impl Fn(f64) -> f64) -> f64 {
    tables_of(fam)
        .iter()
        .map(|(w, f)| w * g(naive(&hashed_table(t, f, fam.range_size), spec)))
        .sum()
}

/// A source with at most five live symbols placed at random points of a
/// `2^m` alphabet.
fn embedded(rng: &mut ChaCha8Rng, m: u32) -> Table {
    let na = rng.gen_range(2..=5);
    let ne = rng.gen_range(1..=3);
    let small = random_table(rng, na, ne);
    let mut slots: Vec<usize> = (0..1usize << m).collect();
    slots.shuffle(rng);
    let mut t = vec![vec![0.0; ne]; 1 << m];
    for (a, row) in small.into_iter().enumerate() {
        t[slots[a]] = row;
    }
    t
}

const SPECS: [Spec; 9] = [
    Spec::Shannon,
    Spec::Plain { s: -0.5 },
    Spec::Plain { s: 0.7 },
    Spec::Gallager { s: -0.3 },
    Spec::Gallager { s: 2.0 },
    Spec::TwoParam { s: 0.5, t: 1.5 },
    Spec::TwoParam { s: -0.4, t: 0.3 },
    Spec::Min,
    Spec::MinGallager,
];

#[test]
fn expectation_and_enlarged_joint_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..30 {
        let (fam, t) = if trial % 2 == 0 {
            let fam = make_binning_family(rng.gen_range(2..=4), rng.gen_range(2..=3)).unwrap();
            let ne = rng.gen_range(1..=3);
            let t = random_table(&mut rng, fam.domain_size, ne);
            (fam, t)
        } else {
            let fam = make_gf2m_family(Gf2mField::new(4).unwrap(), 2, rng.gen_range(1..=2)).unwrap();
            (fam, embedded(&mut rng, 4))
        };
        let inst = OneShotInstance::new(source_of(&t), fam.clone(), 0.0).unwrap();
        let big = enlarged_table(&t, &tables_of(&fam), fam.range_size);
        for spec in SPECS {
            let via_seeds = hashed_conditional_entropy(&inst, spec).unwrap();
            let direct = hashed_entropy_direct(&inst, spec).unwrap();
            let oracle = naive(&big, spec);
            assert!((via_seeds - direct).abs() < 1e-10, "{spec}: {via_seeds} vs {direct}");
            assert!((via_seeds - oracle).abs() < 1e-10, "{spec}: {via_seeds} vs {oracle}");
        }
    }
}

#[test]
fn sampled_estimate_covers_the_exact_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t = random_table(&mut rng, 4, 2);
    let inst = OneShotInstance::new(source_of(&t), make_binning_family(4, 2).unwrap(), 0.0).unwrap();
    for spec in [Spec::Shannon, Spec::Plain { s: 0.5 }, Spec::Gallager { s: -0.3 }] {
        let exact = hashed_conditional_entropy(&inst, spec).unwrap();
        let est = hashed_conditional_entropy_sampled(&inst, spec, 20_000, &mut rng).unwrap();
        assert!((est.value - exact).abs() <= 3.0 * est.half_width + 1e-9, "{spec}: {est:?} vs {exact}");
    }
    assert!(hashed_conditional_entropy_sampled(&inst, Spec::Min, 10, &mut rng).is_err());
}

fn corpus_family(rng: &mut ChaCha8Rng, i: usize) -> (HashFamily, Table) {
    match i % 4 {
        0 | 1 => {
            let na = rng.gen_range(2..=5);
            let ne = rng.gen_range(1..=3);
            let fam = make_binning_family(na, 2 + i % 2).unwrap();
            (fam, random_table(rng, na, ne))
        }
        2 => (make_gf2m_family(Gf2mField::new(4).unwrap(), 2, rng.gen_range(1..=2)).unwrap(), embedded(rng, 4)),
        _ => (make_gf2m_family(Gf2mField::new(6).unwrap(), 3, rng.gen_range(1..=2)).unwrap(), embedded(rng, 6)),
    }
}

#[test]
fn inequality_corpus_has_no_failures() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for i in 0..200 {
        let (fam, t) = corpus_family(&mut rng, i);
        let src: JointSource = source_of(&t);
        for s in [0.05, 0.25, 0.5, 0.75, 1.0] {
            let inst = OneShotInstance::new(src.clone(), fam.clone(), s).unwrap();
            let rec = upper_renyi(&inst, true).unwrap();
            let want = seed_mean(&t, &fam, Spec::Plain { s: -s }, |h| (s * h).exp());
            assert!((rec.lhs - want).abs() <= 1e-10 * want, "{}", rec.render(12));
            assert!(rec.slack >= -1e-12, "{}", rec.render(12));
            let rec = lower_renyi(&inst, true).unwrap();
            let want = seed_mean(&t, &fam, Spec::Plain { s }, |h| (-s * h).exp());
            assert!((rec.lhs - want).abs() <= 1e-10 * want, "{}", rec.render(12));
            assert!(rec.slack >= -1e-12, "{}", rec.render(12));
            checked += 2;
        }
        for s in [0.05, 0.2, 0.35, 0.5] {
            let inst = OneShotInstance::new(src.clone(), fam.clone(), s).unwrap();
            let rec = upper_gallager(&inst, true).unwrap();
            let want = seed_mean(&t, &fam, Spec::Gallager { s: -s }, |h| (s / (1.0 - s) * h).exp());
            assert!((rec.lhs - want).abs() <= 1e-10 * want, "{}", rec.render(12));
            assert!(rec.slack >= -1e-12, "{}", rec.render(12));
            checked += 1;
        }
        for s in [0.05, 0.5, 1.0, 2.0, 5.0] {
            let inst = OneShotInstance::new(src.clone(), fam.clone(), s).unwrap();
            let rec = lower_gallager(&inst, true).unwrap();
            let want = seed_mean(&t, &fam, Spec::Gallager { s }, |h| (-s / (1.0 + s) * h).exp());
            assert!((rec.lhs - want).abs() <= 1e-10 * want, "{}", rec.render(12));
            assert!(rec.slack >= -1e-12, "{}", rec.render(12));
            checked += 1;
        }
        let fb = fehr_berens_check(&OneShotInstance::new(src, fam, 0.0).unwrap(), 0.4).unwrap();
        assert!(fb.all_pass(), "{}", fb.render(12));
    }
    assert_eq!(checked, 200 * 19);
}

/// `E[N^s]` from log-gamma weights, summed directly.
fn naive_moment(l: u64, p: f64, s: f64) -> f64 {
    let lf = libm::lgamma(l as f64 + 1.0);
    (1..=l)
        .map(|k| {
            let k_f = k as f64;
            let lw = lf - libm::lgamma(k_f + 1.0) - libm::lgamma((l - k) as f64 + 1.0)
                + k_f * p.ln()
                + (l - k) as f64 * (1.0 - p).ln();
            (lw + s * k_f.ln()).exp()
        })
        .sum()
}

#[test]
fn binomial_grid() {
    let mut cells = 0;
    for l in [1u64, 10, 100, 1000, 10_000] {
        for p in [0.01, 0.1, 0.5, 0.9] {
            for s in [0.25, 0.5, 1.0] {
                let exact = binomial_moment(l, p, s).unwrap();
                let oracle = naive_moment(l, p, s);
                assert!((exact - oracle).abs() <= 1e-9 * oracle.max(1e-300), "L={l} p={p} s={s}");
                if s == 1.0 {
                    assert!((exact - l as f64 * p).abs() <= 1e-9 * l as f64 * p);
                }
                for eps in [0.1, 0.5] {
                    let rep = binomial_moment_check(&BinomialMomentQuery { l, p, s, eps }).unwrap();
                    assert!(rep.records.iter().all(|r| r.slack >= -1e-12), "{}", rep.render(12));
                    cells += 1;
                }
            }
        }
    }
    assert_eq!(cells, 120);
    assert_eq!(binomial_moment(7, 1.0, 0.5).unwrap(), 7f64.sqrt());
}

#[test]
fn uncertified_family_gets_precondition_verdict() {
    let src = reference();
    let fam = ruq_core::hash::make_custom_family(2, 2, vec![1.0], vec![vec![0, 0]], 1.0).unwrap();
    let inst = OneShotInstance::new(src, fam, 0.5).unwrap();
    let rec = upper_renyi(&inst, false).unwrap();
    assert_eq!(rec.verdict, Verdict::PreconditionFailed);
}
