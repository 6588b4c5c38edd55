//! Joint sources `P_AE` and their i.i.d. extensions.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{fabs, neumaier_sum};
use crate::pmf::Pmf;
use crate::{DEFAULT_CELL_CAP, INPUT_MASS_TOL};

/// A joint pmf on `{0..a_size} x {0..e_size}`.
///
/// Cells are stored column by column (all `a` for one `e` are contiguous),
/// which is the access pattern of every conditional measure.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSource {
    a_size: usize,
    e_size: usize,
    cells: Vec<f64>,
    p_e: Vec<f64>,
}

impl JointSource {
    /// Builds a source from `joint[a * e_size + e] = P_AE(a, e)`.
    pub fn new(a_size: usize, e_size: usize, joint: Vec<f64>) -> Result<Self> {
        if a_size == 0 || e_size == 0 {
            return Err(Error::Validation("alphabets must be nonempty".into()));
        }
        if joint.len() != a_size * e_size {
            return Err(Error::Validation(format!(
                "expected {} cells, got {}",
                a_size * e_size,
                joint.len()
            )));
        }
        let mut cells = alloc::vec![0.0; a_size * e_size];
        for a in 0..a_size {
            for e in 0..e_size {
                let p = joint[a * e_size + e];
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::Validation(format!("P({a},{e}) = {p}")));
                }
                cells[e * a_size + a] = p;
            }
        }
        let total = neumaier_sum(cells.iter().copied());
        if fabs(total - 1.0) > INPUT_MASS_TOL {
            return Err(Error::Validation(format!("total mass {total} is not 1")));
        }
        Ok(Self::from_columns_unchecked(a_size, e_size, cells))
    }

    /// Column-major constructor without validation; rescales to unit mass.
    pub(crate) fn from_columns_unchecked(a_size: usize, e_size: usize, mut cells: Vec<f64>) -> Self {
        let total = neumaier_sum(cells.iter().copied());
        if total != 1.0 && total > 0.0 {
            for c in cells.iter_mut() {
                *c /= total;
            }
        }
        let p_e = (0..e_size)
            .map(|e| neumaier_sum(cells[e * a_size..(e + 1) * a_size].iter().copied()))
            .collect();
        Self { a_size, e_size, cells, p_e }
    }

    /// `P_A x P_E`.
    pub fn independent(pa: &Pmf, pe: &Pmf) -> Self {
        let (na, ne) = (pa.len(), pe.len());
        let mut cells = Vec::with_capacity(na * ne);
        for e in 0..ne {
            for a in 0..na {
                cells.push(pa.get(a) * pe.get(e));
            }
        }
        Self::from_columns_unchecked(na, ne, cells)
    }

    pub fn uniform(a_size: usize, e_size: usize) -> Result<Self> {
        Ok(Self::independent(&Pmf::uniform(a_size)?, &Pmf::uniform(e_size)?))
    }

    /// Parses the line format `a e p` with `#` comments. Unlisted cells are 0;
    /// alphabet sizes are one past the largest symbol seen.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `a e p`, found {} fields", fields.len()),
                });
            }
            let sym = |s: &str, what: &str| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("{what} symbol `{s}` is not a nonnegative integer"),
                })
            };
            let a = sym(fields[0], "a")?;
            let e = sym(fields[1], "e")?;
            let p: f64 = fields[2].parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("probability `{}` is not a number", fields[2]),
            })?;
            if !p.is_finite() {
                return Err(Error::Parse { line: line_no, msg: "probability is not finite".to_string() });
            }
            if p < 0.0 {
                return Err(Error::Validation(format!("line {line_no}: negative probability {p}")));
            }
            if entries.iter().any(|&(a2, e2, _)| a2 == a && e2 == e) {
                return Err(Error::Parse { line: line_no, msg: format!("duplicate cell ({a},{e})") });
            }
            entries.push((a, e, p));
        }
        if entries.is_empty() {
            return Err(Error::Validation("source has no entries".into()));
        }
        let a_size = entries.iter().map(|x| x.0).max().unwrap_or(0) + 1;
        let e_size = entries.iter().map(|x| x.1).max().unwrap_or(0) + 1;
        if (a_size as u64).saturating_mul(e_size as u64) > DEFAULT_CELL_CAP {
            return Err(Error::Resource(format!("{a_size}x{e_size} source exceeds the cell cap")));
        }
        let mut joint = alloc::vec![0.0; a_size * e_size];
        for (a, e, p) in entries {
            joint[a * e_size + e] = p;
        }
        Self::new(a_size, e_size, joint)
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn e_size(&self) -> usize {
        self.e_size
    }

    pub fn p(&self, a: usize, e: usize) -> f64 {
        self.cells[e * self.a_size + a]
    }

    pub fn p_e(&self, e: usize) -> f64 {
        self.p_e[e]
    }

    /// `P_AE(., e)` as a slice (not normalized).
    pub fn column(&self, e: usize) -> &[f64] {
        &self.cells[e * self.a_size..(e + 1) * self.a_size]
    }

    /// Side-information symbols with positive mass.
    pub fn live_e(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.e_size).filter(move |&e| self.p_e[e] > 0.0)
    }

    pub fn marginal_e(&self) -> Pmf {
        Pmf::renormalized(self.p_e.clone())
    }

    pub fn marginal_a(&self) -> Pmf {
        let pa = (0..self.a_size)
            .map(|a| neumaier_sum((0..self.e_size).map(|e| self.p(a, e))))
            .collect();
        Pmf::renormalized(pa)
    }

    pub fn conditional_given_e(&self, e: usize) -> Result<Pmf> {
        if e >= self.e_size || self.p_e[e] <= 0.0 {
            return Err(Error::UndefinedConditional(e));
        }
        let pe = self.p_e[e];
        Ok(Pmf::renormalized(self.column(e).iter().map(|p| p / pe).collect()))
    }
}

/// `P_AE^n`, evaluated lazily.
///
/// Blocks are indexed in mixed radix with the first letter most significant,
/// so index order is lexicographic order of blocks.
#[derive(Debug, Clone)]
pub struct ProductSource {
    base: JointSource,
    n: usize,
    a_blocks: usize,
    e_blocks: usize,
}

impl ProductSource {
    pub fn base(&self) -> &JointSource {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_blocks(&self) -> usize {
        self.a_blocks
    }

    pub fn e_blocks(&self) -> usize {
        self.e_blocks
    }

    /// Letters of block `idx` over an alphabet of size `k`.
    pub fn digits(&self, mut idx: usize, k: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = idx % k;
            idx /= k;
        }
        out
    }

    pub fn a_block(&self, idx: usize) -> Vec<usize> {
        self.digits(idx, self.base.a_size)
    }

    pub fn e_block(&self, idx: usize) -> Vec<usize> {
        self.digits(idx, self.base.e_size)
    }

    /// `Π P_AE(a_i, e_i)` for block indices.
    pub fn prob(&self, a_idx: usize, e_idx: usize) -> f64 {
        let (ka, ke) = (self.base.a_size, self.base.e_size);
        let (mut ai, mut ei) = (a_idx, e_idx);
        let mut p = 1.0;
        for _ in 0..self.n {
            p *= self.base.p(ai % ka, ei % ke);
            ai /= ka;
            ei /= ke;
        }
        p
    }

    /// Enumerates the product into an ordinary joint source over block indices.
    pub fn materialize(&self) -> JointSource {
        let (na, ne) = (self.a_blocks, self.e_blocks);
        let mut cells = Vec::with_capacity(na * ne);
        for e in 0..ne {
            for a in 0..na {
                cells.push(self.prob(a, e));
            }
        }
        JointSource::from_columns_unchecked(na, ne, cells)
    }
}

/// `iid_extend` under the default cell cap.
pub fn iid_extend(src: &JointSource, n: usize) -> Result<ProductSource> {
    iid_extend_capped(src, n, DEFAULT_CELL_CAP)
}

pub fn iid_extend_capped(src: &JointSource, n: usize, cap: u64) -> Result<ProductSource> {
    if n == 0 {
        return Err(Error::Parameter("blocklength must be positive".into()));
    }
    let pow = |k: usize| -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..n {
            acc = acc.checked_mul(k as u64)?;
        }
        Some(acc)
    };
    let cells = pow(src.a_size).zip(pow(src.e_size)).and_then(|(a, e)| a.checked_mul(e));
    match cells {
        Some(c) if c <= cap => Ok(ProductSource {
            base: src.clone(),
            n,
            a_blocks: pow(src.a_size).unwrap_or(0) as usize,
            e_blocks: pow(src.e_size).unwrap_or(0) as usize,
        }),
        _ => Err(Error::Resource(format!(
            "{}^{n} x {}^{n} cells exceed the cap of {cap}",
            src.a_size, src.e_size
        ))),
    }
}

#[cfg(test)]
pub(crate) fn reference_source() -> JointSource {
    JointSource::parse("0 0 0.7\n0 1 0.1\n1 0 0.1\n1 1 0.1\n").unwrap()
}
