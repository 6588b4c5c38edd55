//! Small numeric helpers shared by the measure code.

pub(crate) use libm::{exp, fabs, floor, log, pow, sqrt};

/// `log Σ exp(x_i)`, skipping `-inf` entries. Returns `-inf` on empty input.
pub(crate) fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut buf: alloc::vec::Vec<f64> = xs.into_iter().filter(|x| *x != f64::NEG_INFINITY).collect();
    if buf.is_empty() {
        return f64::NEG_INFINITY;
    }
    let max = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    for x in buf.iter_mut() {
        *x = exp(*x - max);
    }
    max + log(neumaier_sum(buf))
}

/// Compensated summation.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if fabs(sum) >= fabs(x) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `-p ln p` with the `0 ln 0 = 0` convention.
pub(crate) fn neg_xlogx(p: f64) -> f64 {
    if p > 0.0 {
        -p * log(p)
    } else {
        0.0
    }
}

pub(crate) fn ln(x: f64) -> f64 {
    log(x)
}
