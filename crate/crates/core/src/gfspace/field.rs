//! Arithmetic in GF(q).
//!
//! Prime fields are residues mod `p`. Prime-power fields are polynomials over
//! GF(p) reduced modulo a monic irreducible polynomial of degree `e`. An element
//! is stored as the integer whose base-`p` digits are its coefficients, constant
//! term first, so `0` and `1` are the additive and multiplicative identities in
//! every case.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The parameters of a finite field GF(p^e).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u64,
    e: u32,
    /// Monic modulus, coefficients from the constant term up; `len == e + 1`.
    /// Empty for prime fields.
    modulus: Vec<u64>,
    q: u64,
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    pub fn extension(p: u64, e: u32, modulus: Vec<u64>) -> Result<Self> {
        Self::new(p, e, Some(modulus))
    }

    /// Validates `p` prime, `e >= 1`, and (for `e > 1`) that `modulus` is a
    /// monic irreducible polynomial of degree `e` over GF(p).
    pub fn new(p: u64, e: u32, modulus: Option<Vec<u64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or(Error::FieldTooLarge { p, e })?;
        let modulus = match (e, modulus) {
            (1, None) => Vec::new(),
            (1, Some(_)) => return Err(Error::UnexpectedModulus),
            (e, None) => return Err(Error::MissingModulus(e)),
            (e, Some(m)) => {
                check_modulus(p, e, &m)?;
                m
            }
        };
        Ok(FieldSpec { p, e, modulus, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_modulus(p: u64, e: u32, m: &[u64]) -> Result<()> {
    if m.len() != e as usize + 1 {
        return Err(Error::InvalidModulus(format!(
            "expected {} coefficients (constant term first), got {}",
            e + 1,
            m.len()
        )));
    }
    if let Some(c) = m.iter().find(|&&c| c >= p) {
        return Err(Error::InvalidModulus(format!("coefficient {c} is not reduced mod {p}")));
    }
    if m[e as usize] != 1 {
        return Err(Error::InvalidModulus("polynomial is not monic".into()));
    }
    for deg in 1..=(e / 2) {
        for tail in 0..p.pow(deg) {
            let mut divisor = digits(tail, p, deg as usize);
            divisor.push(1);
            if poly_rem(m, &divisor, p).iter().all(|&c| c == 0) {
                return Err(Error::InvalidModulus(format!(
                    "polynomial is divisible by {}",
                    render_poly(&divisor)
                )));
            }
        }
    }
    Ok(())
}

fn render_poly(c: &[u64]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &a)| a != 0)
        .map(|(k, &a)| match (k, a) {
            (0, a) => a.to_string(),
            (1, 1) => "x".to_string(),
            (1, a) => format!("{a}x"),
            (k, 1) => format!("x^{k}"),
            (k, a) => format!("{a}x^{k}"),
        })
        .collect();
    terms.join(" + ")
}

fn digits(mut n: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(n % p);
        n /= p;
    }
    out
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        k >>= 1;
    }
    acc
}

/// Remainder of `a` modulo the monic polynomial `b` over GF(p).
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (k, &bk) in b.iter().enumerate() {
                let t = &mut r[shift + k];
                *t = (*t + p - lead * bk % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// An element of GF(q), encoded as an integer in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Coefficient vector over GF(p), constant term first.
    pub fn coeffs(self, spec: &FieldSpec) -> Vec<u64> {
        digits(self.0 as u64, spec.p, spec.e as usize)
    }
}

/// Field operations for a validated [`FieldSpec`].
#[derive(Debug, Clone)]
pub struct GaloisField {
    spec: FieldSpec,
}

impl GaloisField {
    pub fn new(spec: FieldSpec) -> Self {
        GaloisField { spec }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn q(&self) -> u64 {
        self.spec.q
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.spec.q {
            return Err(Error::OutOfRange { index: index as usize, max: self.spec.q as usize - 1 });
        }
        Ok(FieldElement(index as u32))
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        let p = self.spec.p;
        let idx = coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c % p);
        FieldElement(idx as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.spec.q as u32).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.spec.p;
        if self.spec.e == 1 {
            return FieldElement(((a.0 as u64 + b.0 as u64) % p) as u32);
        }
        let (ca, cb) = (a.coeffs(&self.spec), b.coeffs(&self.spec));
        let sum: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
        self.from_coeffs(&sum)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.spec.p;
        if self.spec.e == 1 {
            return FieldElement(((p - a.0 as u64) % p) as u32);
        }
        let c: Vec<u64> = a.coeffs(&self.spec).iter().map(|x| (p - x) % p).collect();
        self.from_coeffs(&c)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.spec.p;
        if self.spec.e == 1 {
            return FieldElement((a.0 as u64 * b.0 as u64 % p) as u32);
        }
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let (ca, cb) = (a.coeffs(&self.spec), b.coeffs(&self.spec));
        let mut prod = vec![0u64; ca.len() + cb.len() - 1];
        for (i, x) in ca.iter().enumerate() {
            for (j, y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        self.from_coeffs(&poly_rem(&prod, &self.spec.modulus, p))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        if self.spec.e == 1 {
            return Some(FieldElement(inv_mod(a.0 as u64, self.spec.p) as u32));
        }
        // a^(q-2) by square-and-multiply
        let mut k = self.spec.q - 2;
        let (mut base, mut acc) = (a, FieldElement::ONE);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> GaloisField {
        GaloisField::new(FieldSpec::extension(2, 2, vec![1, 1, 1]).unwrap())
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FieldSpec::prime(4), Err(Error::NotPrime(4)));
        assert_eq!(FieldSpec::prime(1), Err(Error::NotPrime(1)));
        assert_eq!(FieldSpec::new(2, 2, None), Err(Error::MissingModulus(2)));
        assert_eq!(FieldSpec::new(3, 1, Some(vec![0, 1])), Err(Error::UnexpectedModulus));
        assert!(matches!(FieldSpec::new(2, 0, None), Err(Error::ZeroDegree)));
    }

    #[test]
    fn rejects_reducible_or_malformed_modulus() {
        // x^2 + 1 = (x + 1)^2 over GF(2)
        assert!(matches!(FieldSpec::extension(2, 2, vec![1, 0, 1]), Err(Error::InvalidModulus(_))));
        // x^2 + x = x (x + 1)
        assert!(matches!(FieldSpec::extension(2, 2, vec![0, 1, 1]), Err(Error::InvalidModulus(_))));
        // not monic
        assert!(matches!(FieldSpec::extension(3, 2, vec![1, 0, 2]), Err(Error::InvalidModulus(_))));
        // wrong length
        assert!(matches!(FieldSpec::extension(2, 2, vec![1, 1]), Err(Error::InvalidModulus(_))));
        // x^2 + 1 is irreducible over GF(3)
        assert!(FieldSpec::extension(3, 2, vec![1, 0, 1]).is_ok());
        // x^3 + x + 1 over GF(2)
        assert!(FieldSpec::extension(2, 3, vec![1, 1, 0, 1]).is_ok());
    }

    #[test]
    fn gf4_is_a_field() {
        let f = gf4();
        let elems: Vec<_> = f.elements().collect();
        assert_eq!(elems.len(), 4);
        for &a in &elems {
            assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
            for &b in &elems {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for &c in &elems {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                }
            }
        }
        // x * x = x + 1 modulo x^2 + x + 1
        let x = f.from_coeffs(&[0, 1]);
        assert_eq!(f.mul(x, x), f.from_coeffs(&[1, 1]));
    }

    #[test]
    fn prime_field_inverses() {
        let f = GaloisField::new(FieldSpec::prime(7).unwrap());
        for a in f.elements().skip(1) {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
        }
        assert_eq!(f.inv(FieldElement::ZERO), None);
    }
}
