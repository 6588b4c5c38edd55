//! Arithmetic in `GF(2^m)` for `1 <= m <= 16`.

use alloc::format;

use crate::error::{param, Error, Result};

/// Lowest-weight irreducible polynomial of each degree, smallest value first
/// among equal weights. Index `m - 1`.
pub const IRREDUCIBLE: [u32; 16] = [
    0x2, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021, 0x8003,
    0x1002b,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gf2mField {
    m: u32,
    poly: u32,
}

impl Gf2mField {
    /// The field of width `m` with the tabulated reduction polynomial.
    pub fn new(m: u32) -> Result<Self> {
        if !(1..=16).contains(&m) {
            return Err(param(format!("field width m={m} must be in 1..=16")));
        }
        Ok(Self { m, poly: IRREDUCIBLE[m as usize - 1] })
    }

    pub fn with_poly(m: u32, poly: u32) -> Result<Self> {
        if !verify_irreducible(m, poly) {
            return Err(param(format!("{poly:#x} is not an irreducible polynomial of degree {m}")));
        }
        Ok(Self { m, poly })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn order(&self) -> u32 {
        1 << self.m
    }

    /// Carry-less product reduced modulo the field polynomial.
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let top = 1u32 << self.m;
        let (mut a, mut b) = (a, b);
        let mut acc = 0;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.poly;
            }
        }
        acc
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 != 0 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// `a^{2^m - 2}`.
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::NoInverse);
        }
        Ok(self.pow(a, (1u64 << self.m) - 2))
    }
}

fn degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, b: u64) -> u64 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

/// True iff `poly` has degree `m` and no factor of degree `1..=m/2`.
pub fn verify_irreducible(m: u32, poly: u32) -> bool {
    if !(1..=16).contains(&m) || degree(poly as u64) != m as i32 {
        return false;
    }
    let p = poly as u64;
    for d in 1..=(m / 2) {
        for q in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_mod(p, q) == 0 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_irreducible() {
        for m in 1..=16u32 {
            assert!(verify_irreducible(m, IRREDUCIBLE[m as usize - 1]), "m={m}");
        }
        assert!(!verify_irreducible(2, 0b101));
        assert!(verify_irreducible(3, 0b1011));
        assert!(!verify_irreducible(3, 0b111));
    }

    #[test]
    fn hand_product() {
        let f = Gf2mField::new(3).unwrap();
        assert_eq!(f.poly(), 0b1011);
        assert_eq!(f.mul(0b010, 0b100), 0b011);
        for x in 0..8 {
            assert_eq!(f.mul(x, 1), x);
        }
    }

    #[test]
    fn inverses_exhaustive() {
        for m in 1..=8 {
            let f = Gf2mField::new(m).unwrap();
            for a in 1..f.order() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "m={m} a={a}");
            }
            assert_eq!(f.inv(0), Err(Error::NoInverse));
            assert_eq!(f.inv(1).unwrap(), 1);
        }
    }

    #[test]
    fn multiplicative_group_order() {
        let f = Gf2mField::new(5).unwrap();
        for a in 1..f.order() {
            assert_eq!(f.pow(a, f.order() as u64 - 1), 1);
        }
    }
}
