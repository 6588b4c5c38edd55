//! Naive oracles and random instance generators shared by the integration
//! tests. Everything here works on plain nested vectors and never calls the
//! library's own entropy code.

#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ruq_core::JointSource;

/// `p[a][e]`.
pub type Table = Vec<Vec<f64>>;

pub fn table_of(src: &JointSource) -> Table {
    (0..src.a_size())
        .map(|a| (0..src.e_size()).map(|e| src.p(a, e)).collect())
        .collect()
}

pub fn source_of(t: &Table) -> JointSource {
    let ne = t[0].len();
    let flat: Vec<f64> = t.iter().flat_map(|row| row.iter().copied()).collect();
    JointSource::new(t.len(), ne, flat).unwrap()
}

/// The reference source: `P(0,0) = 0.7`, every other cell `0.1`.
pub fn reference() -> JointSource {
    JointSource::new(2, 2, vec![0.7, 0.1, 0.1, 0.1]).unwrap()
}

fn p_e(t: &Table, e: usize) -> f64 {
    t.iter().map(|row| row[e]).sum()
}

/// Conditional power sum `Σ_a P(a|e)^alpha` over the support.
fn power_sum(t: &Table, e: usize, alpha: f64) -> f64 {
    let pe = p_e(t, e);
    t.iter()
        .map(|row| row[e] / pe)
        .filter(|c| *c > 0.0)
        .map(|c| c.powf(alpha))
        .sum()
}

fn live(t: &Table) -> Vec<usize> {
    (0..t[0].len()).filter(|&e| p_e(t, e) > 0.0).collect()
}

pub fn shannon(t: &Table) -> f64 {
    let mut h = 0.0;
    for e in live(t) {
        let pe = p_e(t, e);
        for row in t {
            let c = row[e] / pe;
            if c > 0.0 {
                h -= pe * c * c.ln();
            }
        }
    }
    h
}

pub fn plain(t: &Table, s: f64) -> f64 {
    let z: f64 = live(t).into_iter().map(|e| p_e(t, e) * power_sum(t, e, 1.0 + s)).sum();
    -z.ln() / s
}

pub fn gallager(t: &Table, s: f64) -> f64 {
    let z: f64 = live(t)
        .into_iter()
        .map(|e| p_e(t, e) * power_sum(t, e, 1.0 + s).powf(1.0 / (1.0 + s)))
        .sum();
    -(1.0 + s) / s * z.ln()
}

pub fn two_param(t: &Table, s: f64, tt: f64) -> f64 {
    let z: f64 = live(t)
        .into_iter()
        .map(|e| p_e(t, e) * power_sum(t, e, 1.0 + s) * power_sum(t, e, 1.0 + tt).powf(-s / (1.0 + tt)))
        .sum();
    -(1.0 + tt) / s * z.ln()
}

pub fn min_entropy(t: &Table) -> f64 {
    let mut best: f64 = 0.0;
    for e in live(t) {
        let pe = p_e(t, e);
        for row in t {
            best = best.max(row[e] / pe);
        }
    }
    -best.ln()
}

pub fn min_gallager(t: &Table) -> f64 {
    let z: f64 = live(t)
        .into_iter()
        .map(|e| t.iter().map(|row| row[e]).fold(0.0, f64::max))
        .sum();
    -z.ln()
}

/// `H(A | f(A), E)` built cell by cell: side symbol `(e, f(a))`.
pub fn hashed_table(t: &Table, f: &[usize], m: usize) -> Table {
    let ne = t[0].len();
    let mut out = vec![vec![0.0; ne * m]; t.len()];
    for (a, row) in t.iter().enumerate() {
        for e in 0..ne {
            out[a][e * m + f[a]] = row[e];
        }
    }
    out
}

/// `(A; f_X(A), E, X)` as one table, side symbol `(x, e, f_x(a))`.
pub fn enlarged_table(t: &Table, tables: &[(f64, Vec<usize>)], m: usize) -> Table {
    let ne = t[0].len();
    let mut out = vec![vec![0.0; tables.len() * ne * m]; t.len()];
    for (x, (w, f)) in tables.iter().enumerate() {
        for (a, row) in t.iter().enumerate() {
            for e in 0..ne {
                out[a][(x * ne + e) * m + f[a]] = w * row[e];
            }
        }
    }
    out
}

/// A random joint law on `na x ne` with roughly a fifth of the cells zeroed.
pub fn random_table(rng: &mut ChaCha8Rng, na: usize, ne: usize) -> Table {
    loop {
        let mut t: Table = (0..na)
            .map(|_| {
                (0..ne)
                    .map(|_| {
                        if rng.gen_bool(0.2) {
                            0.0
                        } else {
                            -rng.gen_range(1e-6f64..1.0).ln()
                        }
                    })
                    .collect()
            })
            .collect();
        let total: f64 = t.iter().flatten().sum();
        if total > 0.0 {
            for v in t.iter_mut().flatten() {
                *v /= total;
            }
            return t;
        }
    }
}

pub fn random_source(rng: &mut ChaCha8Rng, max_a: usize, max_e: usize) -> JointSource {
    let na = rng.gen_range(2..=max_a);
    let ne = rng.gen_range(1..=max_e);
    source_of(&random_table(rng, na, ne))
}

/// Random sources of bounded shape for proptest.
pub fn arb_source(max_a: usize, max_e: usize) -> impl Strategy<Value = JointSource> {
    (2..=max_a, 1..=max_e)
        .prop_flat_map(|(na, ne)| {
            let cell = prop_oneof![1 => Just(0.0), 4 => 0.001f64..1.0];
            (Just(na), Just(ne), proptest::collection::vec(cell, na * ne))
        })
        .prop_filter("needs mass", |(_, _, cells)| cells.iter().sum::<f64>() > 0.0)
        .prop_map(|(na, ne, cells)| {
            let total: f64 = cells.iter().sum();
            JointSource::new(na, ne, cells.iter().map(|c| c / total).collect()).unwrap()
        })
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}
