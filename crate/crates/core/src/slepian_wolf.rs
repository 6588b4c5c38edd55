//! Block encoders with side information at the decoder: MAP decoding, exact
//! correct-decoding probability and the entropy identities around it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{param, Result};
use crate::hash::HashFamily;
use crate::math::{ln, neumaier_sum};
use crate::measures::{conditional_entropy, RenyiOrderSpec};
use crate::oneshot::hashed_joint;
use crate::report::{CheckRecord, Verdict, VerificationReport};
use crate::source::{JointSource, ProductSource};

/// Report flag for encoders with messages that no block maps to.
pub const EMPTY_PREIMAGE: &str = "empty-preimage";

/// A deterministic encoder `f: A^n -> {1..M}` on a product source. The
/// encoder is indexed by block index (first letter most significant).
#[derive(Debug, Clone)]
pub struct SwSystem {
    product: ProductSource,
    joint: JointSource,
    encoder: Vec<usize>,
    m: usize,
}

/// Correct and error probabilities of MAP decoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodingProbabilities {
    pub correct: f64,
    pub error: f64,
}

impl SwSystem {
    pub fn new(product: ProductSource, encoder: Vec<usize>, m: usize) -> Result<Self> {
        if encoder.len() != product.a_blocks() {
            return Err(param(format!(
                "encoder covers {} blocks, source has {}",
                encoder.len(),
                product.a_blocks()
            )));
        }
        if m == 0 || encoder.iter().any(|b| *b >= m) {
            return Err(param(format!("encoder outputs must lie in 1..={m}")));
        }
        let joint = product.materialize();
        Ok(Self { product, joint, encoder, m })
    }

    /// The encoder given by seed `x` of a family on `A^n`.
    pub fn from_family_seed(product: ProductSource, fam: &HashFamily, x: u64) -> Result<Self> {
        if fam.domain_size != product.a_blocks() {
            return Err(param(format!(
                "family domain {} does not match {} blocks",
                fam.domain_size,
                product.a_blocks()
            )));
        }
        let enc = fam.table(x);
        Self::new(product, enc, fam.range_size)
    }

    pub fn product(&self) -> &ProductSource {
        &self.product
    }

    pub fn encoder(&self) -> &[usize] {
        &self.encoder
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.product.n()
    }

    /// Messages that no block maps to.
    pub fn empty_messages(&self) -> usize {
        let mut used = alloc::vec![false; self.m];
        for &b in &self.encoder {
            used[b] = true;
        }
        used.iter().filter(|u| !**u).count()
    }

    /// The MAP estimate of the block given message `msg` and side-information
    /// block index `e`; ties go to the lexicographically smallest block.
    /// `None` for an empty preimage or a side-information block of mass 0.
    pub fn map_decode(&self, msg: usize, e: usize) -> Option<usize> {
        if self.joint.p_e(e) <= 0.0 {
            return None;
        }
        let col = self.joint.column(e);
        let mut best: Option<(usize, f64)> = None;
        for (a, &enc) in self.encoder.iter().enumerate() {
            if enc != msg {
                continue;
            }
            match best {
                Some((_, p)) if col[a] <= p => {}
                _ => best = Some((a, col[a])),
            }
        }
        best.map(|(a, _)| a)
    }

    /// `g(m, e)` for every message and side-information block, indexed
    /// `e * M + m`.
    pub fn decoder_table(&self) -> Vec<Option<usize>> {
        let mut out = alloc::vec![None; self.joint.e_size() * self.m];
        for e in 0..self.joint.e_size() {
            if self.joint.p_e(e) <= 0.0 {
                continue;
            }
            let col = self.joint.column(e);
            for (a, &msg) in self.encoder.iter().enumerate() {
                let slot = &mut out[e * self.m + msg];
                match *slot {
                    Some(b) if col[a] <= col[b] => {}
                    _ => *slot = Some(a),
                }
            }
        }
        out
    }

    /// `P_c = Σ_{m,e} max_{a: f(a)=m} P^n(a, e)` and `P_e = 1 - P_c`.
    pub fn correct_probability(&self) -> DecodingProbabilities {
        let table = self.decoder_table();
        let mut terms = Vec::with_capacity(table.len());
        for e in 0..self.joint.e_size() {
            let col = self.joint.column(e);
            for msg in 0..self.m {
                if let Some(a) = table[e * self.m + msg] {
                    terms.push(col[a]);
                }
            }
        }
        let correct = neumaier_sum(terms).min(1.0);
        DecodingProbabilities { correct, error: 1.0 - correct }
    }

    /// Probability of correct decoding under an arbitrary decoder table.
    pub fn correct_probability_with(&self, decoder: &[Option<usize>]) -> f64 {
        let mut terms = Vec::new();
        for e in 0..self.joint.e_size() {
            let col = self.joint.column(e);
            for msg in 0..self.m {
                if let Some(a) = decoder[e * self.m + msg] {
                    if self.encoder[a] == msg {
                        terms.push(col[a]);
                    }
                }
            }
        }
        neumaier_sum(terms)
    }

    /// `(A^n; (f(A^n), E^n))` as one explicit source.
    pub fn enlarged_joint(&self) -> JointSource {
        hashed_joint(&self.joint, &self.encoder, self.m)
    }

    /// `Σ_{m,e} P(m,e) [Σ_{a != g(m,e)} Q(a|m,e)]^2`.
    pub fn quadratic_term(&self) -> f64 {
        let big = self.enlarged_joint();
        let terms = big.live_e().map(|side| {
            let pm = big.p_e(side);
            let top = big.column(side).iter().copied().fold(0.0, f64::max);
            let miss = 1.0 - top / pm;
            pm * miss * miss
        });
        neumaier_sum(terms.collect::<Vec<_>>())
    }

    fn describe(&self) -> String {
        let base = self.product.base();
        format!("n={},M={},src={}x{}", self.n(), self.m, base.a_size(), base.e_size())
    }

    fn base_report(&self) -> VerificationReport {
        let mut rep = VerificationReport::new();
        if self.empty_messages() > 0 {
            rep.flag(EMPTY_PREIMAGE);
        }
        rep
    }

    /// `-ln P_c = H↑_∞(A^n | f(A^n), E^n)` within `1e-10`.
    pub fn verify_strong_converse_identity(&self) -> Result<VerificationReport> {
        let pc = self.correct_probability().correct;
        let rhs = conditional_entropy(&self.enlarged_joint(), RenyiOrderSpec::MinGallager, None)?;
        let mut rep = self.base_report();
        let lhs = -ln(pc);
        let rec = CheckRecord::eq("strong-converse-identity", &self.describe(), lhs, rhs, 1e-10);
        rep.push(if pc <= 0.0 { rec.with_verdict(Verdict::Degenerate) } else { rec });
        Ok(rep)
    }

    /// The error-probability chain for `s >= 1`:
    ///
    /// - `(s/(1+s)) H↑_{1+s} <= -ln(1 - P_e)`
    /// - `H↑_{1+s} >= H_{1+s}`
    /// - `s H_{1+s} >= -ln(1 - s P_e + s(1+s)/2 · quad)`
    pub fn verify_prop1_chain(&self, s: f64) -> Result<VerificationReport> {
        if !(s >= 1.0) || !s.is_finite() {
            return Err(param(format!("the chain needs s >= 1, got {s}")));
        }
        let big = self.enlarged_joint();
        let probs = self.correct_probability();
        let h_up = conditional_entropy(&big, RenyiOrderSpec::Gallager { s }, None)?;
        let h = conditional_entropy(&big, RenyiOrderSpec::Plain { s }, None)?;
        let quad = self.quadratic_term();
        let desc = format!("{}|s={s}", self.describe());
        let mut rep = self.base_report();
        rep.push(CheckRecord::le("chain-gallager-vs-correct", &desc, s / (1.0 + s) * h_up, -ln(probs.correct)));
        rep.push(CheckRecord::ge("chain-gallager-vs-plain", &desc, h_up, h));
        let inner = 1.0 - s * probs.error + s * (1.0 + s) / 2.0 * quad;
        rep.push(CheckRecord::ge("chain-plain-vs-taylor", &desc, s * h, -ln(inner)));
        Ok(rep)
    }

    /// `-(1/n) ln P_e`; infinite for an error-free system.
    pub fn error_exponent(&self) -> f64 {
        -ln(self.correct_probability().error.max(0.0)) / self.n() as f64
    }
}
