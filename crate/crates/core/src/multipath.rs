//! Masking a message with a field multiplication and splitting the result
//! over `k = m / l` paths.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{param, Error, Result};
use crate::gf2m::Gf2mField;
use crate::hash::make_gf2m_family;
use crate::measures::RenyiOrderSpec;
use crate::oneshot::{hashed_conditional_entropy, OneShotInstance};
use crate::source::JointSource;

/// Widest field for which the eavesdropper accounting is enumerated.
pub const MAX_ACCOUNTING_BITS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultipathConfig {
    pub m: u32,
    pub l: u32,
    /// Tapped piece, 1-based, most significant first.
    pub j: u32,
    pub field: Gf2mField,
}

impl MultipathConfig {
    pub fn new(m: u32, l: u32, j: u32) -> Result<Self> {
        let field = Gf2mField::new(m)?;
        if l == 0 || !m.is_multiple_of(l) {
            return Err(param(format!("path width l={l} must divide m={m}")));
        }
        if j == 0 || j > m / l {
            return Err(param(format!("tapped piece j={j} must be in 1..={}", m / l)));
        }
        Ok(Self { m, l, j, field })
    }

    pub fn k(&self) -> u32 {
        self.m / self.l
    }

    fn check_word(&self, w: u32, what: &str) -> Result<()> {
        if w >= self.field.order() {
            return Err(param(format!("{what}={w:#x} does not fit in {} bits", self.m)));
        }
        Ok(())
    }
}

/// The `l`-bit slices of `X·A`, most significant first.
pub fn encode(cfg: &MultipathConfig, a: u32, x: u32) -> Result<Vec<u32>> {
    if x == 0 {
        return Err(Error::InvalidMask);
    }
    cfg.check_word(a, "A")?;
    cfg.check_word(x, "X")?;
    let y = cfg.field.mul(x, a);
    let mask = (1u32 << cfg.l) - 1;
    Ok((1..=cfg.k()).map(|i| (y >> (cfg.m - i * cfg.l)) & mask).collect())
}

/// Reassembles the pieces and unmasks with `X^{-1}`.
pub fn decode(cfg: &MultipathConfig, pieces: &[u32], x: u32) -> Result<u32> {
    if x == 0 {
        return Err(Error::InvalidMask);
    }
    cfg.check_word(x, "X")?;
    if pieces.len() != cfg.k() as usize {
        return Err(param(format!("expected {} pieces, got {}", cfg.k(), pieces.len())));
    }
    let mut y = 0u32;
    for &p in pieces {
        if p >> cfg.l != 0 {
            return Err(param(format!("piece {p:#x} is wider than {} bits", cfg.l)));
        }
        y = (y << cfg.l) | p;
    }
    Ok(cfg.field.mul(cfg.field.inv(x)?, y))
}

/// `A=<hex> X=<hex> pieces=<hex,...> decoded=<hex>`.
pub fn demo_line(cfg: &MultipathConfig, a: u32, x: u32) -> Result<String> {
    let pieces = encode(cfg, a, x)?;
    let decoded = decode(cfg, &pieces, x)?;
    let hex: Vec<String> = pieces.iter().map(|p| format!("{p:x}")).collect();
    Ok(format!("A={a:x} X={x:x} pieces={} decoded={decoded:x}", hex.join(",")))
}

/// Uncertainty of `A` given the tapped piece, `E` and the mask, with the mask
/// uniform over nonzero field elements.
pub fn eavesdropper_uncertainty(cfg: &MultipathConfig, src: &JointSource, spec: RenyiOrderSpec) -> Result<f64> {
    if cfg.m > MAX_ACCOUNTING_BITS {
        return Err(Error::Resource(format!(
            "m={} exceeds the enumeration limit of {MAX_ACCOUNTING_BITS} bits",
            cfg.m
        )));
    }
    if src.a_size() != cfg.field.order() as usize {
        return Err(param(format!("source alphabet {} is not 2^{}", src.a_size(), cfg.m)));
    }
    let fam = make_gf2m_family(cfg.field, cfg.l, cfg.j)?;
    hashed_conditional_entropy(&OneShotInstance::new(src.clone(), fam, 0.0)?, spec)
}
