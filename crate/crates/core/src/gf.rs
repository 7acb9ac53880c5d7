//! Arithmetic over GF(2^s) for 2 <= s <= 16.
//!
//! Elements are unsigned integers below 2^s whose bits are the coefficients
//! of a binary polynomial; addition is XOR. Multiplication goes through
//! log/antilog tables generated from a primitive polynomial, and the field
//! generator `α` is the class of `x`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A field element. Only the low `s` bits may be set.
pub type Element = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("symbol size {0} is outside 2..=16")]
    SymbolSize(u32),
    #[error("polynomial {poly:#x} does not have degree {s}")]
    Degree { s: u32, poly: u32 },
    #[error("polynomial {poly:#x} is not primitive: x has order {cycle}, expected {expected}")]
    NotPrimitive { poly: u32, cycle: u32, expected: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
}

/// Conventional primitive polynomials, indexed by `s - 2`.
const DEFAULT_POLYS: [u32; 15] =
    [0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B];

/// Returns the default primitive polynomial for `s` bits per symbol
/// (`0x11D`, i.e. x^8+x^4+x^3+x^2+1, for s = 8).
pub fn default_primitive_poly(s: u32) -> Option<u32> {
    (2..=16).contains(&s).then(|| DEFAULT_POLYS[(s - 2) as usize])
}

/// GF(2^s) with precomputed exponent and logarithm tables.
///
/// Immutable after construction and cheap to share between threads.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    s: u32,
    poly: u32,
    // exp has 2·(q−1) entries so a sum of two logs indexes it directly.
    exp: Vec<Element>,
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("s", &self.s).field("primitive_poly", &format_args!("{:#x}", self.poly)).finish()
    }
}

impl Field {
    /// Builds GF(2^s) from `primitive_poly`, given as a bitmask with bit `s` set.
    ///
    /// The polynomial is accepted only if the powers of `x` cycle through all
    /// 2^s − 1 nonzero residues, which holds iff it is primitive.
    pub fn new(s: u32, primitive_poly: u32) -> Result<Self, FieldError> {
        if !(2..=16).contains(&s) {
            return Err(FieldError::SymbolSize(s));
        }
        if primitive_poly >> s != 1 {
            return Err(FieldError::Degree { s, poly: primitive_poly });
        }
        let size = 1u32 << s;
        let order = size - 1;
        let mut exp = vec![0 as Element; 2 * order as usize];
        let mut log = vec![u32::MAX; size as usize];

        let mut x: u32 = 1;
        for i in 0..order {
            if x == 0 || log[x as usize] != u32::MAX {
                return Err(FieldError::NotPrimitive { poly: primitive_poly, cycle: i, expected: order });
            }
            exp[i as usize] = x as Element;
            log[x as usize] = i;
            x <<= 1;
            if x & size != 0 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(FieldError::NotPrimitive { poly: primitive_poly, cycle: order + 1, expected: order });
        }
        for i in order as usize..exp.len() {
            exp[i] = exp[i - order as usize];
        }
        log[0] = 0;
        Ok(Self { s, poly: primitive_poly, exp, log })
    }

    /// GF(2^s) over [`default_primitive_poly`].
    pub fn with_default_poly(s: u32) -> Result<Self, FieldError> {
        let poly = default_primitive_poly(s).ok_or(FieldError::SymbolSize(s))?;
        Self::new(s, poly)
    }

    /// Bits per symbol.
    pub fn bits(&self) -> u32 {
        self.s
    }

    pub fn primitive_poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements, 2^s.
    pub fn size(&self) -> usize {
        1 << self.s
    }

    /// Order of the multiplicative group, 2^s − 1.
    pub fn order(&self) -> usize {
        self.size() - 1
    }

    #[inline]
    pub fn contains(&self, a: Element) -> bool {
        (a as usize) < self.size()
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Element) -> Result<Element, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.inv_nonzero(a))
    }

    pub fn div(&self, a: Element, b: Element) -> Result<Element, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    #[inline]
    pub(crate) fn inv_nonzero(&self, a: Element) -> Element {
        debug_assert!(a != 0);
        let order = self.order() as u32;
        self.exp[((order - self.log[a as usize]) % order) as usize]
    }

    /// α^e for any integer exponent, reduced modulo 2^s − 1.
    #[inline]
    pub fn alpha_pow(&self, e: i64) -> Element {
        self.exp[e.rem_euclid(self.order() as i64) as usize]
    }

    /// Discrete logarithm to base α; `None` for zero.
    pub fn log(&self, a: Element) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn pow(&self, a: Element, e: u64) -> Element {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = self.order() as u64;
        let l = (self.log[a as usize] as u64 * (e % order)) % order;
        self.exp[l as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Element) -> Option<u32> {
        let l = self.log(a)? as u64;
        let order = self.order() as u64;
        Some((order / gcd(l, order)) as u32)
    }

    pub fn poly_add(&self, p: &Poly, q: &Poly) -> Poly {
        let (long, short) = if p.0.len() >= q.0.len() { (p, q) } else { (q, p) };
        let mut out = long.0.clone();
        for (o, &c) in out.iter_mut().zip(&short.0) {
            *o ^= c;
        }
        Poly::from_coeffs(out)
    }

    pub fn poly_mul(&self, p: &Poly, q: &Poly) -> Poly {
        if p.is_zero() || q.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; p.0.len() + q.0.len() - 1];
        for (i, &a) in p.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in q.0.iter().enumerate() {
                out[i + j] ^= self.mul(a, b);
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn poly_scale(&self, p: &Poly, c: Element) -> Poly {
        Poly::from_coeffs(p.0.iter().map(|&a| self.mul(a, c)).collect())
    }

    /// Horner evaluation.
    pub fn poly_eval(&self, p: &Poly, x: Element) -> Element {
        p.0.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }

    /// Long division, returning `(quotient, remainder)` with
    /// `deg(remainder) < deg(divisor)`.
    pub fn poly_divmod(&self, p: &Poly, divisor: &Poly) -> Result<(Poly, Poly), FieldError> {
        let dd = divisor.degree().ok_or(FieldError::ZeroDivisor)?;
        let Some(pd) = p.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if pd < dd {
            return Ok((Poly::zero(), p.clone()));
        }
        let lead_inv = self.inv_nonzero(divisor.0[dd]);
        let mut rem = p.0.clone();
        let mut quot = vec![0; pd - dd + 1];
        for i in (dd..=pd).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let f = self.mul(c, lead_inv);
            quot[i - dd] = f;
            for (j, &d) in divisor.0.iter().enumerate() {
                rem[i - dd + j] ^= self.mul(f, d);
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn poly_mod(&self, p: &Poly, divisor: &Poly) -> Result<Poly, FieldError> {
        self.poly_divmod(p, divisor).map(|(_, r)| r)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Polynomial with field coefficients, lowest degree first.
///
/// Always stored normalized: no trailing zero coefficients, and the zero
/// polynomial is the empty sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly(Vec<Element>);

impl Poly {
    pub fn from_coeffs(mut coeffs: Vec<Element>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn one() -> Self {
        Self(vec![1])
    }

    /// `c · x^degree`.
    pub fn monomial(c: Element, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.0
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Element {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Shift-and-add multiply with reduction; independent of the tables.
    fn clmul_reduce(mut a: u32, mut b: u32, s: u32, poly: u32) -> u32 {
        let mut r = 0;
        while b != 0 {
            if b & 1 != 0 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & (1 << s) != 0 {
                a ^= poly;
            }
        }
        r
    }

    #[test]
    fn gf256_has_full_cycle() {
        let f = Field::new(8, 0x11D).unwrap();
        assert_eq!(f.size(), 256);
        assert_eq!(f.order(), 255);
        // brute force: powers of 2 under carry-less multiplication
        let mut x = 1u32;
        let mut len = 0;
        loop {
            x = clmul_reduce(x, 2, 8, 0x11D);
            len += 1;
            if x == 1 {
                break;
            }
        }
        assert_eq!(len, 255);
        assert_eq!(f.element_order(2), Some(255));
    }

    #[test]
    fn gf4_and_rejections() {
        let f = Field::new(2, 0b111).unwrap();
        assert_eq!(f.size(), 4);
        assert_eq!(f.mul(2, 2), 3);
        assert!(matches!(Field::new(8, 0x100), Err(FieldError::NotPrimitive { .. })));
        // x^4+x^3+x^2+x+1 is irreducible but x has order 5
        assert!(matches!(Field::new(4, 0x1F), Err(FieldError::NotPrimitive { cycle: 5, .. })));
        assert!(matches!(Field::new(8, 0x1D), Err(FieldError::Degree { .. })));
        assert_eq!(Field::new(17, 0x20009), Err(FieldError::SymbolSize(17)));
        assert_eq!(Field::new(1, 0b11), Err(FieldError::SymbolSize(1)));
    }

    #[test]
    fn all_default_polys_are_primitive() {
        for s in 2..=16 {
            let f = Field::with_default_poly(s).unwrap();
            assert_eq!(f.bits(), s);
            assert_eq!(f.element_order(2), Some((1 << s) - 1));
        }
    }

    #[test]
    fn mul_examples() {
        let f = Field::new(8, 0x11D).unwrap();
        assert_eq!(f.mul(2, 3), 6);
        assert_eq!(f.mul(0x80, 2), 0x1D);
        assert_eq!(f.mul(0x80, 2), clmul_reduce(0x80, 2, 8, 0x11D) as Element);
        for a in 0..256 {
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.mul(a, 0), 0);
        }
    }

    #[test]
    fn mul_matches_clmul_exhaustively() {
        let f = Field::new(8, 0x11D).unwrap();
        for a in 0..256u32 {
            for b in 0..256u32 {
                assert_eq!(f.mul(a as Element, b as Element) as u32, clmul_reduce(a, b, 8, 0x11D));
            }
        }
    }

    #[test]
    fn inverse() {
        let f = Field::new(8, 0x11D).unwrap();
        assert_eq!(f.inv(1), Ok(1));
        let brute = (1..256u32).find(|&b| clmul_reduce(2, b, 8, 0x11D) == 1).unwrap();
        assert_eq!(brute, 0x8E);
        assert_eq!(f.inv(2), Ok(0x8E));
        assert_eq!(f.inv(0), Err(FieldError::ZeroInverse));
        for a in 1..256 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn every_element_order_divides_group_order() {
        for s in [3, 4, 8] {
            let f = Field::with_default_poly(s).unwrap();
            for a in 1..f.size() as Element {
                let o = f.element_order(a).unwrap();
                assert_eq!(f.order() as u32 % o, 0);
                assert_eq!(f.pow(a, o as u64), 1);
            }
        }
    }

    #[test]
    fn poly_examples() {
        let f4 = Field::new(2, 0b111).unwrap();
        assert_eq!(f4.poly_eval(&Poly::zero(), 3), 0);
        let p = Poly::from_coeffs(vec![1, 1]);
        assert_eq!(f4.poly_mul(&p, &p).coeffs(), &[1, 0, 1]);
        assert_eq!(f4.poly_divmod(&p, &Poly::zero()), Err(FieldError::ZeroDivisor));
        assert_eq!(Poly::from_coeffs(vec![0, 0]), Poly::zero());

        // X^2 mod (X^2 + g1 X + g0) = g1 X + g0
        let f = Field::new(8, 0x11D).unwrap();
        let g = Poly::from_coeffs(vec![0x37, 0xA2, 1]);
        let x2 = Poly::monomial(1, 2);
        let (q, r) = f.poly_divmod(&x2, &g).unwrap();
        assert_eq!(r.coeffs(), &[0x37, 0xA2]);
        assert_eq!(q, Poly::one());
        assert_eq!(f.poly_add(&f.poly_mul(&g, &q), &r), x2);
    }

    fn element(s: u32) -> impl Strategy<Value = Element> {
        0..=((1u32 << s) - 1) as Element
    }

    fn poly_strategy(max_len: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(0..=255u16, 0..max_len).prop_map(Poly::from_coeffs)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn gf256_axioms(a in element(8), b in element(8), c in element(8)) {
            let f = Field::new(8, 0x11D).unwrap();
            prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
        }

        #[test]
        fn gf65536_axioms(a in element(16), b in element(16), c in element(16)) {
            let f = Field::with_default_poly(16).unwrap();
            prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
            prop_assert_eq!(f.mul(a, b) as u32, clmul_reduce(a as u32, b as u32, 16, 0x1100B));
        }
    }

    proptest! {
        #[test]
        fn divmod_reconstructs(p in poly_strategy(12), q in poly_strategy(6)) {
            prop_assume!(!q.is_zero());
            let f = Field::new(8, 0x11D).unwrap();
            let (quot, rem) = f.poly_divmod(&p, &q).unwrap();
            let dq = q.degree().unwrap();
            prop_assert!(rem.degree().is_none_or(|d| d < dq));
            prop_assert_eq!(f.poly_add(&f.poly_mul(&q, &quot), &rem), p);
        }

        #[test]
        fn eval_is_ring_homomorphism(p in poly_strategy(8), q in poly_strategy(8), x in element(8)) {
            let f = Field::new(8, 0x11D).unwrap();
            prop_assert_eq!(f.poly_eval(&f.poly_mul(&p, &q), x), f.mul(f.poly_eval(&p, x), f.poly_eval(&q, x)));
            prop_assert_eq!(f.poly_eval(&f.poly_add(&p, &q), x), f.poly_eval(&p, x) ^ f.poly_eval(&q, x));
        }
    }
}
