//! Arithmetic in the small binary fields GF(2^e), 1 ≤ e ≤ 5.
//!
//! Elements are stored as the bitmask of their polynomial coefficients over
//! GF(2), constant term in bit 0. With the default modulus X³+X+1 the powers
//! z⁰..z⁶ of the class z of X have codes 1, 2, 4, 3, 6, 7, 5.

use std::fmt;

use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("unsupported characteristic {0}: only p = 2 is implemented")]
    UnsupportedCharacteristic(u32),
    #[error("unsupported extension degree {0} (expected 1..={MAX_DEGREE})")]
    UnsupportedDegree(u32),
    #[error("modulus {modulus:#b} does not have degree {degree}")]
    WrongDegree { modulus: u32, degree: u32 },
    #[error("modulus {0:#b} is reducible over GF(2)")]
    Reducible(u32),
    #[error("element code {code} out of range for GF({order})")]
    OutOfRange { code: u32, order: usize },
    #[error("division by zero")]
    DivisionByZero,
}

/// A field element, identified by its coefficient bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parameters of GF(2^e) together with precomputed multiplication and
/// inversion tables.
#[derive(Clone)]
pub struct FieldParams {
    degree: u32,
    modulus: u32,
    mul: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldParams")
            .field("q", &self.order())
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldParams {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.modulus == other.modulus
    }
}

impl Eq for FieldParams {}

fn poly_degree(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b).expect("nonzero divisor");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division by every polynomial of degree 1..deg(p).
pub fn is_irreducible(p: u32) -> bool {
    let Some(d) = poly_degree(p) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    (2u32..(1 << d)).all(|divisor| poly_rem(p, divisor) != 0)
}

fn shift_and_reduce(a: u32, b: u32, degree: u32, modulus: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> degree & 1 == 1 {
            a ^= modulus;
        }
    }
    acc
}

/// The modulus used when none is given: the lexicographically first
/// irreducible polynomial of the requested degree with a nonzero constant
/// term (X³+X+1 for e = 3).
pub fn default_modulus(degree: u32) -> Result<u32, FieldError> {
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(FieldError::UnsupportedDegree(degree));
    }
    let lo = 1u32 << degree;
    (lo..lo << 1)
        .find(|&m| m & 1 == 1 && is_irreducible(m))
        .ok_or(FieldError::UnsupportedDegree(degree))
}

impl FieldParams {
    pub fn new(characteristic: u32, degree: u32, modulus: u32) -> Result<Self, FieldError> {
        if characteristic != 2 {
            return Err(FieldError::UnsupportedCharacteristic(characteristic));
        }
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(FieldError::UnsupportedDegree(degree));
        }
        if poly_degree(modulus) != Some(degree) {
            return Err(FieldError::WrongDegree { modulus, degree });
        }
        if !is_irreducible(modulus) {
            return Err(FieldError::Reducible(modulus));
        }
        let q = 1usize << degree;
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                mul[a * q + b] = shift_and_reduce(a as u32, b as u32, degree, modulus) as u8;
            }
        }
        let mut inv = vec![0u8; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).expect("field has inverses") as u8;
        }
        Ok(FieldParams { degree, modulus, mul, inv })
    }

    pub fn with_degree(degree: u32) -> Result<Self, FieldError> {
        Self::new(2, degree, default_modulus(degree)?)
    }

    /// GF(8) with modulus X³+X+1.
    pub fn gf8() -> Self {
        Self::new(2, 3, 0b1011).expect("X^3+X+1 is irreducible")
    }

    /// Field order q = 2^e.
    pub fn order(&self) -> usize {
        1 << self.degree
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn element(&self, code: u32) -> Result<FieldElement, FieldError> {
        if (code as usize) < self.order() {
            Ok(FieldElement(code as u8))
        } else {
            Err(FieldError::OutOfRange { code, order: self.order() })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order()).map(|c| FieldElement(c as u8))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul[a.0 as usize * self.order() + b.0 as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(FieldElement(self.inv[a.0 as usize]))
        }
    }

    pub fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// a^(2^k), the k-th power of the Frobenius map x ↦ x².
    pub fn frobenius(&self, a: FieldElement, k: u32) -> FieldElement {
        (0..k % self.degree).fold(a, |x, _| self.mul(x, x))
    }

    /// The class z of X in GF(2)[X]/(modulus), i.e. code 2 (code 1 when e = 1).
    pub fn generator(&self) -> FieldElement {
        if self.degree == 1 {
            FieldElement::ONE
        } else {
            FieldElement(2)
        }
    }

    /// z^k for the class z of X.
    pub fn z_power(&self, k: u64) -> FieldElement {
        self.pow(self.generator(), k)
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: FieldElement) -> Result<usize, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let mut x = a;
        let mut n = 1;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            n += 1;
        }
        Ok(n)
    }

    /// True iff X² + tX + d has no root in the field (signs are immaterial in
    /// characteristic 2). Decided by evaluating at every element.
    pub fn discriminant_check(&self, d: FieldElement, t: FieldElement) -> bool {
        self.elements()
            .all(|x| !self.add(self.add(self.mul(x, x), self.mul(t, x)), d).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(f: &FieldParams, c: u32) -> FieldElement {
        f.element(c).unwrap()
    }

    #[test]
    fn published_power_table() {
        let f = FieldParams::gf8();
        let codes: Vec<u8> = (0..7).map(|k| f.z_power(k).code()).collect();
        assert_eq!(codes, vec![1, 2, 4, 3, 6, 7, 5]);
        assert_eq!(f.z_power(7), FieldElement::ONE);
    }

    #[test]
    fn add_examples() {
        let f = FieldParams::gf8();
        for x in f.elements() {
            assert_eq!(f.add(x, x), FieldElement::ZERO);
        }
        // z + 1 = z^3
        assert_eq!(f.add(e(&f, 2), e(&f, 1)), e(&f, 3));
        assert_eq!(f.add(e(&f, 6), e(&f, 5)), e(&f, 3));
    }

    #[test]
    fn mul_examples() {
        let f = FieldParams::gf8();
        for x in f.elements() {
            assert_eq!(f.mul(x, FieldElement::ONE), x);
        }
        assert_eq!(f.mul(e(&f, 2), e(&f, 4)), e(&f, 3));
        assert_eq!(f.mul(e(&f, 7), e(&f, 7)), e(&f, 3));
    }

    #[test]
    fn mul_matches_schoolbook_oracle() {
        // carry-less product then long division, independent of the table path
        let f = FieldParams::gf8();
        for a in 0u32..8 {
            for b in 0u32..8 {
                let mut prod = 0u32;
                for i in 0..3 {
                    if b >> i & 1 == 1 {
                        prod ^= a << i;
                    }
                }
                assert_eq!(f.mul(e(&f, a), e(&f, b)).code() as u32, poly_rem(prod, 0b1011));
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let f = FieldParams::gf8();
        assert_eq!(f.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
        assert_eq!(f.inv(e(&f, 2)).unwrap(), e(&f, 5));
        assert_eq!(f.inv(FieldElement::ZERO), Err(FieldError::DivisionByZero));
        assert_eq!(FieldError::DivisionByZero.to_string(), "division by zero");
        for x in f.elements().skip(1) {
            assert_eq!(f.mul(x, f.inv(x).unwrap()), FieldElement::ONE);
        }
    }

    #[test]
    fn frobenius_examples() {
        let f = FieldParams::gf8();
        assert_eq!(f.frobenius(FieldElement::ZERO, 1), FieldElement::ZERO);
        assert_eq!(f.frobenius(FieldElement::ONE, 1), FieldElement::ONE);
        assert_eq!(f.frobenius(e(&f, 2), 1), e(&f, 4));
        for x in f.elements() {
            assert_eq!(f.frobenius(x, 3), x);
        }
    }

    #[test]
    fn frobenius_is_field_automorphism() {
        let f = FieldParams::gf8();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
                assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
            }
        }
    }

    #[test]
    fn distributivity_exhaustive() {
        let f = FieldParams::gf8();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_is_cyclic_generated_by_z() {
        let f = FieldParams::gf8();
        assert_eq!(f.multiplicative_order(e(&f, 2)).unwrap(), 7);
        let powers: std::collections::HashSet<_> = (0..7).map(|k| f.z_power(k)).collect();
        assert_eq!(powers.len(), 7);
    }

    #[test]
    fn discriminant_examples() {
        let f = FieldParams::gf8();
        assert!(f.discriminant_check(FieldElement::ONE, FieldElement::ONE));
        assert!(!f.discriminant_check(FieldElement::ONE, FieldElement::ZERO));
        // X^2 + X + z^3: roots are decided by evaluating all eight elements
        let brute = f
            .elements()
            .all(|x| f.add(f.add(f.mul(x, x), x), e(&f, 3)) != FieldElement::ZERO);
        assert_eq!(f.discriminant_check(e(&f, 3), FieldElement::ONE), brute);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldParams::new(3, 3, 0b1011), Err(FieldError::UnsupportedCharacteristic(3)));
        assert_eq!(FieldParams::new(2, 3, 0b1001), Err(FieldError::Reducible(0b1001)));
        assert!(matches!(FieldParams::new(2, 3, 0b111), Err(FieldError::WrongDegree { .. })));
        assert_eq!(FieldParams::new(2, 6, 0b1000011), Err(FieldError::UnsupportedDegree(6)));
        assert!(FieldParams::gf8().element(8).is_err());
    }

    #[test]
    fn default_moduli_are_irreducible() {
        assert_eq!(default_modulus(3).unwrap(), 0b1011);
        for d in 1..=MAX_DEGREE {
            let m = default_modulus(d).unwrap();
            assert!(is_irreducible(m));
            FieldParams::with_degree(d).unwrap();
        }
    }
}
