//! Arithmetic in GF(2^v) through log/antilog tables.
//!
//! Elements are stored as `u16` bit patterns over the polynomial basis
//! (bit i = coefficient of x^i). Multiplication and division go through
//! the discrete-log tables of a primitive element alpha, so they cost two
//! lookups and one modular add. Extension degrees up to 16 are supported;
//! the component-code search space only uses 8..=12, and the toy codes in
//! the tests use 4.

use crate::{invalid, Result};

/// Default primitive polynomial per extension degree v (bit i = coeff of x^i).
///
/// Standard minimum-weight primitive polynomials; index by v - 2.
const DEFAULT_PRIMITIVE: [u32; 15] = [
    0x7,     // v=2:  x^2 + x + 1
    0xB,     // v=3:  x^3 + x + 1
    0x13,    // v=4:  x^4 + x + 1
    0x25,    // v=5:  x^5 + x^2 + 1
    0x43,    // v=6:  x^6 + x + 1
    0x89,    // v=7:  x^7 + x^3 + 1
    0x11D,   // v=8:  x^8 + x^4 + x^3 + x^2 + 1
    0x211,   // v=9:  x^9 + x^4 + 1
    0x409,   // v=10: x^10 + x^3 + 1
    0x805,   // v=11: x^11 + x^2 + 1
    0x1053,  // v=12: x^12 + x^6 + x^4 + x + 1
    0x201B,  // v=13: x^13 + x^4 + x^3 + x + 1
    0x4443,  // v=14: x^14 + x^10 + x^6 + x + 1
    0x8003,  // v=15: x^15 + x + 1
    0x1100B, // v=16: x^16 + x^12 + x^3 + x + 1
];

/// GF(2^v) with precomputed discrete-log tables for a primitive alpha.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    v: u32,
    /// Multiplicative group order, 2^v - 1.
    order: u32,
    /// Defining primitive polynomial (bit i = coefficient of x^i).
    primitive_poly: u32,
    /// log[x] = discrete log of x to base alpha, for x in 1..=order.
    log: Vec<u16>,
    /// antilog[i] = alpha^i for i in 0..order.
    antilog: Vec<u16>,
}

impl GaloisField {
    /// Builds GF(2^v) with the default primitive polynomial for v.
    pub fn new(v: u32) -> Result<Self> {
        if !(2..=16).contains(&v) {
            return Err(invalid(format!("field degree v={v} outside 2..=16")));
        }
        Self::with_primitive_poly(v, DEFAULT_PRIMITIVE[(v - 2) as usize])
    }

    /// Builds GF(2^v) from an explicit primitive polynomial.
    ///
    /// The polynomial must have degree exactly v and x must generate the
    /// full multiplicative group under it, otherwise construction fails.
    pub fn with_primitive_poly(v: u32, primitive_poly: u32) -> Result<Self> {
        if !(2..=16).contains(&v) {
            return Err(invalid(format!("field degree v={v} outside 2..=16")));
        }
        if primitive_poly >> v != 1 {
            return Err(invalid(format!(
                "polynomial {primitive_poly:#x} does not have degree {v}"
            )));
        }
        let order = (1u32 << v) - 1;
        let mut log = vec![0u16; (order + 1) as usize];
        let mut antilog = vec![0u16; order as usize];
        let mut elem: u32 = 1;
        for i in 0..order {
            antilog[i as usize] = elem as u16;
            if elem == 1 && i > 0 {
                return Err(invalid(format!(
                    "polynomial {primitive_poly:#x} is not primitive: x has order {i}"
                )));
            }
            if log[elem as usize] == 0 && elem != 1 {
                log[elem as usize] = i as u16;
            }
            // Multiply by x and reduce.
            elem <<= 1;
            if elem >> v != 0 {
                elem ^= primitive_poly;
            }
        }
        if elem != 1 {
            return Err(invalid(format!(
                "polynomial {primitive_poly:#x} is not primitive over GF(2^{v})"
            )));
        }
        log[1] = 0;
        Ok(GaloisField {
            v,
            order,
            primitive_poly,
            log,
            antilog,
        })
    }

    /// Extension degree v.
    pub fn v(&self) -> u32 {
        self.v
    }

    /// Multiplicative group order 2^v - 1 (= the mother-code length).
    pub fn order(&self) -> u32 {
        self.order
    }

    /// The defining primitive polynomial (bit i = coefficient of x^i).
    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// alpha^e for any integer exponent (reduced mod the group order).
    pub fn alpha_pow(&self, e: i64) -> u16 {
        let m = self.order as i64;
        let r = e.rem_euclid(m);
        self.antilog[r as usize]
    }

    /// Discrete log of a nonzero element.
    ///
    /// Panics on zero, which has no logarithm.
    pub fn log(&self, a: u16) -> u32 {
        assert!(a != 0, "log of zero");
        self.log[a as usize] as u32
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let mut s = self.log[a as usize] as u32 + self.log[b as usize] as u32;
        if s >= self.order {
            s -= self.order;
        }
        self.antilog[s as usize]
    }

    /// Multiplies a nonzero accumulator by alpha^logb where logb is a
    /// precomputed discrete log. Hot path of syndrome and Chien loops.
    #[inline]
    pub fn mul_by_log(&self, a: u16, logb: u32) -> u16 {
        if a == 0 {
            return 0;
        }
        let mut s = self.log[a as usize] as u32 + logb;
        if s >= self.order {
            s -= self.order;
        }
        self.antilog[s as usize]
    }

    pub fn inv(&self, a: u16) -> u16 {
        assert!(a != 0, "inverse of zero");
        let l = self.log[a as usize] as u32;
        self.antilog[((self.order - l) % self.order) as usize]
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        assert!(b != 0, "division by zero");
        if a == 0 {
            return 0;
        }
        let la = self.log[a as usize] as u32;
        let lb = self.log[b as usize] as u32;
        let s = (la + self.order - lb) % self.order;
        self.antilog[s as usize]
    }

    /// Field addition (= subtraction): carryless xor.
    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_all_supported_degrees() {
        for v in 2..=16 {
            let f = GaloisField::new(v).unwrap();
            assert_eq!(f.order(), (1 << v) - 1);
            // alpha generates the whole group: antilog table is a bijection.
            let mut seen = vec![false; (f.order() + 1) as usize];
            for i in 0..f.order() {
                let e = f.alpha_pow(i as i64);
                assert!(!seen[e as usize], "alpha^{i} repeats in GF(2^{v})");
                seen[e as usize] = true;
            }
        }
    }

    #[test]
    fn log_antilog_round_trip() {
        let f = GaloisField::new(8).unwrap();
        for x in 1..=f.order() as u16 {
            assert_eq!(f.alpha_pow(f.log(x) as i64), x);
        }
    }

    #[test]
    fn mul_matches_carryless_reference() {
        // Reference: schoolbook polynomial multiply + reduce.
        fn slow_mul(v: u32, poly: u32, a: u16, b: u16) -> u16 {
            let mut acc: u32 = 0;
            let mut a = a as u32;
            let mut b = b as u32;
            while b != 0 {
                if b & 1 != 0 {
                    acc ^= a;
                }
                b >>= 1;
                a <<= 1;
                if a >> v != 0 {
                    a ^= poly;
                }
            }
            acc as u16
        }
        for v in [4u32, 8, 10] {
            let f = GaloisField::new(v).unwrap();
            let poly = f.primitive_poly();
            // Deterministic sample over the full table for small fields.
            let step = if v <= 8 { 1 } else { 7 };
            let mut a = 0u32;
            while a <= f.order() {
                let mut b = 0u32;
                while b <= f.order() {
                    assert_eq!(f.mul(a as u16, b as u16), slow_mul(v, poly, a as u16, b as u16));
                    b += step;
                }
                a += step;
            }
        }
    }

    #[test]
    fn inverse_and_division() {
        let f = GaloisField::new(9).unwrap();
        for x in 1..=f.order() as u16 {
            assert_eq!(f.mul(x, f.inv(x)), 1);
            assert_eq!(f.div(x, x), 1);
        }
    }

    #[test]
    fn rejects_non_primitive_polynomial() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5, not 15.
        assert!(GaloisField::with_primitive_poly(4, 0x1F).is_err());
        // Wrong degree.
        assert!(GaloisField::with_primitive_poly(4, 0x7).is_err());
        // Out-of-range degree.
        assert!(GaloisField::new(1).is_err());
        assert!(GaloisField::new(17).is_err());
    }
}
