//! Shortened binary BCH component codes.
//!
//! A component code is a narrow-sense binary BCH code over GF(2^v) with
//! designed correction radius t, shortened by s positions: length
//! n = 2^v - 1 - s, dimension k = n - deg(g). For the parameter search
//! space (v in 8..=12, t in {3,4}) the generator degree equals v*t, so
//! k = 2^v - v*t - 1 - s; small toy codes such as (15,5) have repeated
//! cyclotomic-coset collapses and a lower generator degree, which the
//! constructor reports faithfully.
//!
//! Bit/position convention used throughout: `word[i]` is the coefficient
//! of x^i. Parity occupies the low-order block 0..n-k, systematic message
//! bits occupy the high-order block n-k..n. Shortening removes the s
//! highest-order mother-code positions (always message positions), so a
//! shortened word zero-padded back to length 2^v - 1 is a mother codeword.

use crate::gf::GaloisField;
use crate::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Component-code parameters: field degree, correction radius, shortening.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    /// Galois field extension degree; mother length is 2^v - 1.
    pub v: u32,
    /// Bounded-distance correction radius of the component decoder.
    pub t: u32,
    /// Number of shortened (removed) information positions.
    pub s: u32,
}

impl CodeParams {
    pub fn new(v: u32, t: u32, s: u32) -> Self {
        CodeParams { v, t, s }
    }

    /// Mother-code length 2^v - 1.
    pub fn mother_n(&self) -> usize {
        (1usize << self.v) - 1
    }

    /// Shortened length n = 2^v - 1 - s.
    pub fn n(&self) -> usize {
        self.mother_n() - self.s as usize
    }

    /// Design dimension 2^v - v*t - 1 - s.
    ///
    /// Valid whenever the generator has full degree v*t, which holds for
    /// the entire search space; `ComponentCode::k()` is the realized value.
    pub fn design_k(&self) -> i64 {
        (1i64 << self.v) - (self.v as i64) * (self.t as i64) - 1 - self.s as i64
    }

    pub fn validate(&self) -> Result<()> {
        if !(3..=16).contains(&self.v) {
            return Err(invalid(format!("v={} outside 3..=16", self.v)));
        }
        if self.t == 0 || 2 * self.t as usize >= self.mother_n() {
            return Err(invalid(format!("t={} out of range for v={}", self.t, self.v)));
        }
        if self.s as usize >= self.mother_n() {
            return Err(invalid(format!(
                "s={} leaves no code length for v={}",
                self.s, self.v
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for CodeParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(v={}, t={}, s={})", self.v, self.t, self.s)
    }
}

/// Outcome of one bounded-distance decode attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BddOutcome {
    /// A codeword within Hamming distance t of the input. May differ from
    /// the transmitted codeword (miscorrection): that is still `Decoded`.
    Decoded(Vec<u8>),
    /// No codeword within distance t was found; input left unchanged.
    Failure,
}

/// In-place decode status for the product-decoder hot path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    /// Input was already a codeword; nothing changed.
    AlreadyCodeword,
    /// Bits were flipped; the word is now a codeword within distance t.
    Corrected,
    /// Bounded-distance failure; the word is unchanged.
    Failed,
}

/// A constructed shortened BCH code with its generator and field tables.
#[derive(Debug, Clone)]
pub struct ComponentCode {
    params: CodeParams,
    field: GaloisField,
    /// Generator polynomial over GF(2), low-order coefficient first.
    generator: Vec<u8>,
    n: usize,
    k: usize,
}

impl ComponentCode {
    /// Constructs the code: generator = lcm of the minimal polynomials of
    /// alpha^1..alpha^2t, then shortening bookkeeping.
    pub fn new(params: CodeParams) -> Result<Self> {
        params.validate()?;
        let field = GaloisField::new(params.v)?;
        let generator = generator_poly(&field, params.t)?;
        let r = generator.len() - 1;
        let mother_n = params.mother_n();
        let mother_k = mother_n - r;
        if params.s as usize >= mother_k {
            return Err(invalid(format!(
                "shortening s={} leaves no information bits (mother k={mother_k})",
                params.s
            )));
        }
        let n = params.n();
        let k = mother_k - params.s as usize;
        // x^(2^v - 1) + 1 must be divisible by the generator.
        let mut xn1 = vec![0u8; mother_n + 1];
        xn1[0] = 1;
        xn1[mother_n] = 1;
        if !poly_rem_is_zero(&xn1, &generator) {
            return Err(invalid("generator does not divide x^(2^v - 1) + 1"));
        }
        Ok(ComponentCode {
            params,
            field,
            generator,
            n,
            k,
        })
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    /// Shortened block length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Realized dimension n - deg(g).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Mother-code (unshortened) length 2^v - 1.
    pub fn mother_n(&self) -> usize {
        self.params.mother_n()
    }

    pub fn t(&self) -> usize {
        self.params.t as usize
    }

    /// Generator polynomial over GF(2), low-order coefficient first.
    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    /// True when deg(g) = v*t, i.e. the design dimension formula holds.
    pub fn has_full_degree_generator(&self) -> bool {
        self.generator.len() - 1 == (self.params.v * self.params.t) as usize
    }

    /// Systematic encode: parity in positions 0..n-k, msg in n-k..n.
    pub fn encode(&self, msg: &[u8]) -> Result<Vec<u8>> {
        if msg.len() != self.k {
            return Err(invalid(format!(
                "message length {} != k {}",
                msg.len(),
                self.k
            )));
        }
        let r = self.n - self.k;
        let mut word = vec![0u8; self.n];
        word[r..].copy_from_slice(msg);
        self.fill_parity(&mut word);
        Ok(word)
    }

    /// Computes parity for the message already placed in word[n-k..n].
    ///
    /// CRC-style LFSR division of m(x)*x^(n-k) by g(x); remainder is the
    /// parity block.
    pub fn fill_parity(&self, word: &mut [u8]) {
        let r = self.n - self.k;
        let g = &self.generator;
        let mut reg = vec![0u8; r];
        for j in (r..self.n).rev() {
            let feedback = word[j] ^ reg[r - 1];
            for i in (1..r).rev() {
                reg[i] = reg[i - 1] ^ (feedback & g[i]);
            }
            reg[0] = feedback & g[0];
        }
        word[..r].copy_from_slice(&reg);
    }

    /// True iff the word is a codeword (all 2t syndromes vanish).
    pub fn is_codeword(&self, word: &[u8]) -> bool {
        debug_assert_eq!(word.len(), self.n);
        self.syndromes(word).iter().all(|&s| s == 0)
    }

    /// Syndromes S_i = w(alpha^i) for i = 1..=2t.
    fn syndromes(&self, word: &[u8]) -> Vec<u16> {
        let two_t = 2 * self.t();
        let mut syn = vec![0u16; two_t];
        for (i, s) in syn.iter_mut().enumerate() {
            let logstep = (i + 1) as u32; // log of alpha^(i+1)
            let mut acc: u16 = 0;
            for j in (0..self.n).rev() {
                acc = self.field.mul_by_log(acc, logstep) ^ word[j] as u16;
            }
            *s = acc;
        }
        syn
    }

    /// Bounded-distance decode, returning the corrected codeword or Failure.
    ///
    /// Guarantees: `Decoded(c)` implies c is a codeword with
    /// d(word, c) <= t; if any codeword lies within distance t of the
    /// input (necessarily unique, d_min >= 2t+1) it is returned.
    pub fn bdd_decode(&self, word: &[u8]) -> Result<BddOutcome> {
        if word.len() != self.n {
            return Err(invalid(format!(
                "word length {} != n {}",
                word.len(),
                self.n
            )));
        }
        let mut out = word.to_vec();
        Ok(match self.decode_in_place(&mut out) {
            DecodeStatus::Failed => BddOutcome::Failure,
            _ => BddOutcome::Decoded(out),
        })
    }

    /// In-place bounded-distance decode; on failure the word is unchanged.
    pub fn decode_in_place(&self, word: &mut [u8]) -> DecodeStatus {
        debug_assert_eq!(word.len(), self.n);
        let syn = self.syndromes(word);
        if syn.iter().all(|&s| s == 0) {
            return DecodeStatus::AlreadyCodeword;
        }
        let sigma = berlekamp_massey(&self.field, &syn);
        let deg = sigma.len() - 1;
        if deg == 0 || deg > self.t() {
            return DecodeStatus::Failed;
        }
        // Chien search over mother positions; roots at alpha^(-j) mark an
        // error at position j. A root in a shortened position (j >= n) or a
        // root count below deg means the locator is spurious.
        let mut positions = Vec::with_capacity(deg);
        let order = self.field.order();
        let mut terms: Vec<u16> = sigma.clone();
        for j in 0..self.mother_n() {
            if j > 0 {
                for (i, term) in terms.iter_mut().enumerate().skip(1) {
                    // term_i *= alpha^(-i)
                    *term = self.field.mul_by_log(*term, order - i as u32);
                }
            }
            let mut sum: u16 = 0;
            for &term in &terms {
                sum ^= term;
            }
            if sum == 0 {
                if j >= self.n {
                    return DecodeStatus::Failed;
                }
                positions.push(j);
                if positions.len() == deg {
                    break;
                }
            }
        }
        if positions.len() != deg {
            return DecodeStatus::Failed;
        }
        // Binary BCH: error magnitudes are 1, but a weight > t input can
        // yield a locator whose flips do not restore a codeword. Verify by
        // updating the syndromes incrementally with the flipped positions.
        for (i, &s) in syn.iter().enumerate() {
            let mut upd = s;
            for &j in &positions {
                upd ^= self.field.alpha_pow((i as i64 + 1) * j as i64);
            }
            if upd != 0 {
                return DecodeStatus::Failed;
            }
        }
        for &j in &positions {
            word[j] ^= 1;
        }
        DecodeStatus::Corrected
    }
}

/// Generator polynomial: product of the distinct minimal polynomials of
/// alpha^1..alpha^2t, computed from cyclotomic cosets.
fn generator_poly(field: &GaloisField, t: u32) -> Result<Vec<u8>> {
    let order = field.order() as usize;
    let mut covered = vec![false; order + 1];
    let mut g = vec![1u8];
    for e in 1..=(2 * t) as usize {
        if covered[e] {
            continue;
        }
        // Cyclotomic coset of e under doubling mod (2^v - 1).
        let mut coset = Vec::new();
        let mut c = e;
        loop {
            coset.push(c);
            covered[c] = true;
            c = (c * 2) % order;
            if c == e {
                break;
            }
        }
        // Minimal polynomial: product of (x + alpha^c) over the coset.
        // Coefficients live in GF(2^v) during the product and must land
        // in {0, 1} at the end.
        let mut m: Vec<u16> = vec![1];
        for &c in &coset {
            let root = field.alpha_pow(c as i64);
            let mut next = vec![0u16; m.len() + 1];
            for (i, &coeff) in m.iter().enumerate() {
                next[i + 1] ^= coeff;
                next[i] ^= field.mul(coeff, root);
            }
            m = next;
        }
        let mut m2 = Vec::with_capacity(m.len());
        for &coeff in &m {
            if coeff > 1 {
                return Err(invalid(
                    "minimal polynomial has a coefficient outside GF(2)",
                ));
            }
            m2.push(coeff as u8);
        }
        g = poly_mul_gf2(&g, &m2);
    }
    Ok(g)
}

fn poly_mul_gf2(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] ^= bj;
        }
    }
    out
}

/// True iff b divides a over GF(2).
fn poly_rem_is_zero(a: &[u8], b: &[u8]) -> bool {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    for i in (db..rem.len()).rev() {
        if rem[i] != 0 {
            for (j, &bj) in b.iter().enumerate() {
                rem[i - db + j] ^= bj;
            }
        }
    }
    rem.iter().all(|&c| c == 0)
}

/// Berlekamp-Massey over GF(2^v): minimal LFSR for the syndrome sequence.
/// Returns the error-locator polynomial, low-order coefficient first.
fn berlekamp_massey(field: &GaloisField, syn: &[u16]) -> Vec<u16> {
    let n = syn.len();
    let mut sigma: Vec<u16> = vec![1];
    let mut prev: Vec<u16> = vec![1];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut b: u16 = 1;
    for r in 0..n {
        let mut d = syn[r];
        for i in 1..=l.min(sigma.len() - 1) {
            d ^= field.mul(sigma[i], syn[r - i]);
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = field.div(d, b);
        let mut next = sigma.clone();
        if next.len() < prev.len() + m {
            next.resize(prev.len() + m, 0);
        }
        for (i, &pi) in prev.iter().enumerate() {
            next[i + m] ^= field.mul(coef, pi);
        }
        if 2 * l <= r {
            prev = sigma;
            sigma = next;
            l = r + 1 - l;
            b = d;
            m = 1;
        } else {
            sigma = next;
            m += 1;
        }
    }
    sigma.truncate(l + 1);
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn toy_15_5() -> ComponentCode {
        ComponentCode::new(CodeParams::new(4, 3, 0)).unwrap()
    }

    #[test]
    fn textbook_15_5_generator() {
        // The (15,5) t=3 code: g(x) = x^10 + x^8 + x^5 + x^4 + x^2 + x + 1.
        let code = toy_15_5();
        assert_eq!(code.n(), 15);
        assert_eq!(code.k(), 5);
        assert_eq!(code.generator(), &[1, 1, 1, 0, 1, 1, 0, 0, 1, 0, 1]);
        // Cyclotomic collapse (coset of 5 has size 2), so deg g = 10 < v*t.
        assert!(!code.has_full_degree_generator());
    }

    #[test]
    fn search_space_generator_degree_is_v_times_t() {
        for v in 8..=12 {
            for t in 3..=4 {
                let code = ComponentCode::new(CodeParams::new(v, t, 0)).unwrap();
                assert!(
                    code.has_full_degree_generator(),
                    "deg g != v*t for (v={v}, t={t})"
                );
                assert_eq!(code.k() as i64, code.params().design_k());
            }
        }
    }

    #[test]
    fn encode_of_unit_message_is_generator() {
        // m(x) = 1 encodes to g(x) itself when deg g = n - k.
        let code = toy_15_5();
        let mut msg = vec![0u8; 5];
        msg[0] = 1;
        let cw = code.encode(&msg).unwrap();
        let mut expected = vec![0u8; 15];
        expected[..11].copy_from_slice(code.generator());
        assert_eq!(cw, expected);
    }

    #[test]
    fn encoded_words_vanish_at_all_bch_roots() {
        // Root-property oracle, independent of the division code path:
        // c(alpha^i) = 0 for i = 1..=2t for random messages.
        for params in [
            CodeParams::new(4, 3, 0),
            CodeParams::new(8, 3, 0),
            CodeParams::new(8, 4, 16),
            CodeParams::new(9, 3, 93),
        ] {
            let code = ComponentCode::new(params).unwrap();
            let f = code.field();
            let mut rng = CounterRng::new(0x9d0c_23e1);
            for _ in 0..50 {
                let msg: Vec<u8> = (0..code.k()).map(|_| (rng.next_u64() & 1) as u8).collect();
                let cw = code.encode(&msg).unwrap();
                // Systematic block carries the message.
                assert_eq!(&cw[code.n() - code.k()..], &msg[..]);
                for i in 1..=2 * code.t() {
                    let mut acc: u16 = 0;
                    for j in (0..code.n()).rev() {
                        acc = f.mul_by_log(acc, i as u32) ^ cw[j] as u16;
                    }
                    assert_eq!(acc, 0, "c(alpha^{i}) != 0 for {params}");
                }
            }
        }
    }

    #[test]
    fn decodes_up_to_t_errors_exactly() {
        let code = toy_15_5();
        let mut rng = CounterRng::new(0x51a7);
        for trial in 0..2000 {
            let msg: Vec<u8> = (0..5).map(|_| (rng.next_u64() & 1) as u8).collect();
            let cw = code.encode(&msg).unwrap();
            let nerr = (trial % 4) as usize; // 0..=3 = t
            let mut word = cw.clone();
            let mut picked = Vec::new();
            while picked.len() < nerr {
                let p = (rng.next_u64() % 15) as usize;
                if !picked.contains(&p) {
                    picked.push(p);
                    word[p] ^= 1;
                }
            }
            match code.bdd_decode(&word).unwrap() {
                BddOutcome::Decoded(out) => assert_eq!(out, cw),
                BddOutcome::Failure => panic!("failed on {nerr} errors"),
            }
        }
    }

    #[test]
    fn exhaustive_ball_oracle_15_5() {
        // d_min = 7, so Hamming balls of radius t=3 around codewords are
        // disjoint: each 15-bit word decodes to the unique codeword within
        // distance 3 if one exists, otherwise decoding must fail. Checked
        // against exhaustive enumeration of all 2^15 inputs.
        let code = toy_15_5();
        let mut codewords = Vec::with_capacity(32);
        for m in 0u16..32 {
            let msg: Vec<u8> = (0..5).map(|j| ((m >> j) & 1) as u8).collect();
            let cw = code.encode(&msg).unwrap();
            let mask = cw
                .iter()
                .enumerate()
                .fold(0u16, |acc, (j, &b)| acc | ((b as u16) << j));
            codewords.push(mask);
        }
        let mut decoded_count = 0u32;
        for w in 0u16..=0x7FFF {
            let near = codewords
                .iter()
                .find(|&&c| (c ^ w).count_ones() <= 3)
                .copied();
            let word: Vec<u8> = (0..15).map(|j| ((w >> j) & 1) as u8).collect();
            match code.bdd_decode(&word).unwrap() {
                BddOutcome::Decoded(out) => {
                    let out_mask = out
                        .iter()
                        .enumerate()
                        .fold(0u16, |acc, (j, &b)| acc | ((b as u16) << j));
                    assert_eq!(Some(out_mask), near, "word {w:#06x} decoded wrongly");
                    decoded_count += 1;
                }
                BddOutcome::Failure => {
                    assert_eq!(near, None, "word {w:#06x} should have decoded");
                }
            }
        }
        // |B(0,3)| * 32 = (1 + 15 + 105 + 455) * 32 = 18432 decodable words.
        assert_eq!(decoded_count, 18432);
    }

    #[test]
    fn shortened_decode_matches_mother_decode_restriction() {
        // Decoding a shortened word must agree with decoding its zero-pad
        // in the mother code, declaring failure when the mother decoder
        // would flip a shortened (known-zero) position.
        let shortened = ComponentCode::new(CodeParams::new(4, 3, 3)).unwrap();
        let mother = ComponentCode::new(CodeParams::new(4, 3, 0)).unwrap();
        assert_eq!(shortened.n(), 12);
        assert_eq!(shortened.k(), 2);
        let mut rng = CounterRng::new(0xbead);
        let mut shortened_failures = 0u32;
        for _ in 0..4000 {
            let word: Vec<u8> = (0..12).map(|_| (rng.next_u64() & 1) as u8).collect();
            let mut padded = word.clone();
            padded.extend_from_slice(&[0, 0, 0]);
            let got = shortened.bdd_decode(&word).unwrap();
            match mother.bdd_decode(&padded).unwrap() {
                BddOutcome::Decoded(out) => {
                    if out[12..] == [0, 0, 0] {
                        assert_eq!(got, BddOutcome::Decoded(out[..12].to_vec()));
                    } else {
                        assert_eq!(got, BddOutcome::Failure);
                        shortened_failures += 1;
                    }
                }
                BddOutcome::Failure => assert_eq!(got, BddOutcome::Failure),
            }
        }
        // The interesting branch (mother flips a shortened position) must
        // actually occur for this test to mean anything.
        assert!(shortened_failures > 0);
    }

    #[test]
    fn miscorrection_is_a_valid_decode() {
        // Weight t+1 error patterns can land within distance t of a wrong
        // codeword; the decoder reports Decoded in that case. Find one.
        let code = toy_15_5();
        let cw = code.encode(&[0, 0, 0, 0, 0]).unwrap();
        let mut rng = CounterRng::new(0x7777);
        let mut saw_miscorrection = false;
        for _ in 0..3000 {
            let mut word = cw.clone();
            let mut picked = Vec::new();
            while picked.len() < 4 {
                let p = (rng.next_u64() % 15) as usize;
                if !picked.contains(&p) {
                    picked.push(p);
                    word[p] ^= 1;
                }
            }
            if let BddOutcome::Decoded(out) = code.bdd_decode(&word).unwrap() {
                assert!(code.is_codeword(&out));
                assert_ne!(out, cw, "4 errors cannot decode back to the sent word");
                let dist: u32 = out
                    .iter()
                    .zip(&word)
                    .map(|(a, b)| (a ^ b) as u32)
                    .sum();
                assert!(dist <= 3);
                saw_miscorrection = true;
            }
        }
        assert!(saw_miscorrection);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ComponentCode::new(CodeParams::new(2, 1, 0)).is_err());
        assert!(ComponentCode::new(CodeParams::new(8, 0, 0)).is_err());
        // Shortening that consumes all information bits.
        assert!(ComponentCode::new(CodeParams::new(8, 3, 231)).is_err());
        let code = ComponentCode::new(CodeParams::new(8, 3, 230)).unwrap();
        assert_eq!(code.k(), 1);
        // Wrong buffer lengths surface as errors, not panics.
        assert!(code.encode(&[1, 0]).is_err());
        assert!(code.bdd_decode(&[0u8; 7]).is_err());
    }
}
