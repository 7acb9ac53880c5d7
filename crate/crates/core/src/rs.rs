//! Shortened systematic Reed–Solomon codes over GF(2^s).
//!
//! A code carries `k` message and `r` parity symbols. The full-length code has
//! 2^s − 1 symbols; the `z = 2^s − 1 − k − r` leading symbols are virtual zeros
//! that are neither transmitted nor received.
//!
//! Transmitted words are ordered highest degree first: symbol `j` of a word of
//! length `n` is the coefficient of `X^(n−1−j)`. The message occupies the first
//! `k` symbols and the parity `CK(X) = X^r·M(X) mod g(X)` the last `r`.
//!
//! Decoding is errors-only: syndromes, Berlekamp–Massey for the error locator,
//! Chien search over the transmitted positions, Forney for the error values,
//! then correction. Anything inconsistent is reported as
//! [`RsError::DecodeFailure`]; a decoded word always passes every syndrome
//! check, but beyond `t` errors it may be a different codeword.

use alloc::vec;
use alloc::vec::Vec;

use crate::gf::{Element, Field, FieldError, Poly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("k + r = {len} exceeds the maximum codeword length {max}")]
    TooLong { len: usize, max: usize },
    #[error("parity length {0} must be even and at least 2")]
    Parity(usize),
    #[error("message length must be at least 1")]
    EmptyMessage,
    #[error("expected {expected} symbols, got {got}")]
    Length { expected: usize, got: usize },
    #[error("symbol {value:#x} at index {index} is not in GF(2^{bits})")]
    Symbol { index: usize, value: Element, bits: u32 },
    #[error("uncorrectable word")]
    DecodeFailure,
}

/// A decoded word and how many symbols were corrected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsDecoded {
    pub codeword: Vec<Element>,
    pub errors: usize,
    k: usize,
}

impl RsDecoded {
    pub fn message(&self) -> &[Element] {
        &self.codeword[..self.k]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsCode {
    field: Field,
    k: usize,
    r: usize,
    first_root: u32,
    generator: Poly,
}

impl RsCode {
    /// Code with generator roots α^1 … α^r.
    pub fn new(field: Field, k: usize, r: usize) -> Result<Self, RsError> {
        Self::with_first_root(field, k, r, 1)
    }

    /// Code with generator roots α^b … α^(b+r−1).
    pub fn with_first_root(field: Field, k: usize, r: usize, first_root: u32) -> Result<Self, RsError> {
        if r < 2 || !r.is_multiple_of(2) {
            return Err(RsError::Parity(r));
        }
        if k == 0 {
            return Err(RsError::EmptyMessage);
        }
        if k + r > field.order() {
            return Err(RsError::TooLong { len: k + r, max: field.order() });
        }
        let mut generator = Poly::one();
        for i in 0..r {
            let root = field.alpha_pow(first_root as i64 + i as i64);
            generator = field.poly_mul(&generator, &Poly::from_coeffs(vec![root, 1]));
        }
        Ok(Self { field, k, r, first_root, generator })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn bits(&self) -> u32 {
        self.field.bits()
    }

    /// Transmitted codeword length in symbols.
    pub fn n(&self) -> usize {
        self.k + self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of virtual zero symbols.
    pub fn z_pad(&self) -> usize {
        self.field.order() - self.n()
    }

    /// Correctable symbol errors, r/2.
    pub fn t(&self) -> usize {
        self.r / 2
    }

    pub fn min_distance(&self) -> usize {
        self.r + 1
    }

    pub fn first_root(&self) -> u32 {
        self.first_root
    }

    /// Monic generator, lowest degree first.
    pub fn generator(&self) -> &Poly {
        &self.generator
    }

    fn check_symbols(&self, word: &[Element], expected: usize) -> Result<(), RsError> {
        if word.len() != expected {
            return Err(RsError::Length { expected, got: word.len() });
        }
        match word.iter().position(|&v| !self.field.contains(v)) {
            Some(index) => Err(RsError::Symbol { index, value: word[index], bits: self.bits() }),
            None => Ok(()),
        }
    }

    /// Parity symbols for `msg`, highest degree first.
    pub fn encode(&self, msg: &[Element]) -> Result<Vec<Element>, RsError> {
        self.check_symbols(msg, self.k)?;
        let g = self.generator.coeffs();
        // LFSR division by g; the padding zeros would only shift zeros through.
        let mut reg = vec![0 as Element; self.r];
        for &m in msg {
            let feedback = m ^ reg[self.r - 1];
            for j in (1..self.r).rev() {
                reg[j] = reg[j - 1] ^ self.field.mul(feedback, g[j]);
            }
            reg[0] = self.field.mul(feedback, g[0]);
        }
        reg.reverse();
        Ok(reg)
    }

    /// Message followed by its parity.
    pub fn encode_codeword(&self, msg: &[Element]) -> Result<Vec<Element>, RsError> {
        let mut word = msg.to_vec();
        word.extend(self.encode(msg)?);
        Ok(word)
    }

    /// `S_i = C(α^(b+i))` for i in 0..r.
    pub fn syndromes(&self, word: &[Element]) -> Result<Vec<Element>, RsError> {
        self.check_symbols(word, self.n())?;
        Ok(self.syndromes_unchecked(word))
    }

    fn syndromes_unchecked(&self, word: &[Element]) -> Vec<Element> {
        (0..self.r)
            .map(|i| {
                let x = self.field.alpha_pow(self.first_root as i64 + i as i64);
                word.iter().fold(0, |acc, &c| self.field.mul(acc, x) ^ c)
            })
            .collect()
    }

    pub fn is_codeword(&self, word: &[Element]) -> bool {
        self.syndromes(word).is_ok_and(|s| s.iter().all(|&v| v == 0))
    }

    pub fn decode(&self, received: &[Element]) -> Result<RsDecoded, RsError> {
        let syndromes = self.syndromes(received)?;
        if syndromes.iter().all(|&v| v == 0) {
            return Ok(RsDecoded { codeword: received.to_vec(), errors: 0, k: self.k });
        }
        let f = &self.field;
        let n = self.n();

        let (locator, num_errors) = self.berlekamp_massey(&syndromes);
        if num_errors > self.t() || locator.degree() != Some(num_errors) {
            return Err(RsError::DecodeFailure);
        }

        // Chien search; X_j = α^(n−1−j) is the locator of position j.
        let positions: Vec<usize> =
            (0..n).filter(|&j| f.poly_eval(&locator, f.alpha_pow(-((n - 1 - j) as i64))) == 0).collect();
        if positions.len() != num_errors {
            return Err(RsError::DecodeFailure);
        }

        // Ω(x) = S(x)·Λ(x) mod x^r
        let syndrome_poly = Poly::from_coeffs(syndromes);
        let mut omega = f.poly_mul(&syndrome_poly, &locator).coeffs().to_vec();
        omega.truncate(self.r);
        let omega = Poly::from_coeffs(omega);
        // Formal derivative: only odd powers survive in characteristic 2.
        let derivative = Poly::from_coeffs(
            locator.coeffs().iter().enumerate().skip(1).map(|(i, &c)| if i % 2 == 1 { c } else { 0 }).collect(),
        );

        let mut codeword = received.to_vec();
        for &j in &positions {
            let power = (n - 1 - j) as i64;
            let x_inv = f.alpha_pow(-power);
            let denom = f.poly_eval(&derivative, x_inv);
            if denom == 0 {
                return Err(RsError::DecodeFailure);
            }
            let scale = f.alpha_pow(power * (1 - self.first_root as i64));
            let value = f.mul(scale, f.mul(f.poly_eval(&omega, x_inv), f.inv_nonzero(denom)));
            if value == 0 {
                return Err(RsError::DecodeFailure);
            }
            codeword[j] ^= value;
        }
        if self.syndromes_unchecked(&codeword).iter().any(|&v| v != 0) {
            return Err(RsError::DecodeFailure);
        }
        Ok(RsDecoded { codeword, errors: num_errors, k: self.k })
    }

    /// Returns the error locator Λ(x) = Π(1 − X_i·x) and its register length.
    fn berlekamp_massey(&self, syndromes: &[Element]) -> (Poly, usize) {
        let f = &self.field;
        let mut lambda = vec![0 as Element; self.r + 1];
        lambda[0] = 1;
        let mut prev = lambda.clone();
        let mut len = 0usize;
        let mut shift = 1usize;
        let mut prev_discrepancy: Element = 1;

        for k in 0..syndromes.len() {
            let mut d = syndromes[k];
            for i in 1..=len {
                d ^= f.mul(lambda[i], syndromes[k - i]);
            }
            if d == 0 {
                shift += 1;
                continue;
            }
            let coef = f.mul(d, f.inv_nonzero(prev_discrepancy));
            let snapshot = lambda.clone();
            for (i, &p) in prev.iter().enumerate() {
                if i + shift <= self.r {
                    lambda[i + shift] ^= f.mul(coef, p);
                }
            }
            if 2 * len <= k {
                len = k + 1 - len;
                prev = snapshot;
                prev_discrepancy = d;
                shift = 1;
            } else {
                shift += 1;
            }
        }
        (Poly::from_coeffs(lambda), len)
    }
}
