//! Coefficient fields.
//!
//! A [`Field`] is a small context value (zero-sized for the rationals and the
//! complex doubles, the modulus for prime fields) that performs arithmetic on
//! its element type. Polynomials and matrices carry their field along.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative rank threshold for complex-double linear algebra.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Smallest admissible prime modulus.
pub const MIN_PRIME: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldTag {
    ExactRational,
    PrimeField { p: u64 },
    ComplexDouble,
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::ExactRational => write!(f, "QQ"),
            FieldTag::PrimeField { p } => write!(f, "ZZ/{p}"),
            FieldTag::ComplexDouble => write!(f, "CC"),
        }
    }
}

pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// `None` when the denominator vanishes in this field.
    fn from_rational(&self, q: &BigRational) -> Option<Self::Elem>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Size used for pivot selection and residual norms.
    fn magnitude(&self, a: &Self::Elem) -> f64;
    fn is_exact(&self) -> bool;
    fn tag(&self) -> FieldTag;
    fn to_complex(&self, a: &Self::Elem) -> Option<Complex64>;
    fn from_complex(&self, c: Complex64) -> Option<Self::Elem>;
    fn format(&self, a: &Self::Elem) -> String;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Rank threshold relative to the largest singular value (floating fields only).
    fn rank_tol(&self) -> f64 {
        DEFAULT_RANK_TOL
    }

    /// Bit size of an element, for coefficient growth guards.
    fn size_bits(&self, _a: &Self::Elem) -> u64 {
        0
    }

    /// Image in a prime field, when this field maps there.
    fn reduce_mod(&self, _a: &Self::Elem, _fp: &PrimeField) -> Option<u64> {
        None
    }
}

/// The rationals, stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(&self, q: &BigRational) -> Option<BigRational> {
        Some(q.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn magnitude(&self, a: &BigRational) -> f64 {
        rational_to_f64(a).abs()
    }
    fn is_exact(&self) -> bool {
        true
    }
    fn tag(&self) -> FieldTag {
        FieldTag::ExactRational
    }
    fn to_complex(&self, a: &BigRational) -> Option<Complex64> {
        Some(Complex64::new(rational_to_f64(a), 0.0))
    }
    fn from_complex(&self, _c: Complex64) -> Option<BigRational> {
        None
    }
    fn format(&self, a: &BigRational) -> String {
        a.to_string()
    }
    fn reduce_mod(&self, a: &BigRational, fp: &PrimeField) -> Option<u64> {
        fp.from_rational(a)
    }

    fn size_bits(&self, a: &BigRational) -> u64 {
        a.numer().bits() + a.denom().bits()
    }
}

/// Converts a rational to the nearest double, robust to huge numerators and denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        BigRational::new(q.numer().clone(), q.denom() << (shift as usize))
    } else {
        BigRational::new(q.numer() << ((-shift) as usize), q.denom().clone())
    };
    let v = scaled.to_integer().to_f64().unwrap_or(0.0);
    v * 2f64.powi(shift as i32)
}

/// Integers modulo a prime `p` with `MIN_PRIME < p < 2^32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p <= MIN_PRIME || p >= (1 << 32) || !is_prime(p) {
            return Err(Error::InvalidArgument(format!(
                "modulus {p} must be a prime in ({MIN_PRIME}, 2^32)"
            )));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        let r = v.mod_floor(&m);
        r.to_u64().unwrap()
    }

    /// Symmetric lift to (-p/2, p/2].
    pub fn lift(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    // deterministic Miller-Rabin for 64-bit inputs
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn reduce_mod(&self, a: &u64, fp: &PrimeField) -> Option<u64> {
        (fp.p == self.p).then_some(*a)
    }

    fn from_rational(&self, q: &BigRational) -> Option<u64> {
        let d = self.reduce_bigint(q.denom());
        let n = self.reduce_bigint(q.numer());
        self.inv(&d).map(|di| self.mul(&n, &di))
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.p
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (self.p as i64, *a as i64);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        Some(t.rem_euclid(self.p as i64) as u64)
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn magnitude(&self, a: &u64) -> f64 {
        if *a == 0 {
            0.0
        } else {
            1.0
        }
    }
    fn is_exact(&self) -> bool {
        true
    }
    fn tag(&self) -> FieldTag {
        FieldTag::PrimeField { p: self.p }
    }
    fn to_complex(&self, _a: &u64) -> Option<Complex64> {
        None
    }
    fn from_complex(&self, _c: Complex64) -> Option<u64> {
        None
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// Complex numbers in double precision, with the relative rank threshold used
/// by every rank and nullspace computation over this field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDouble {
    pub tol: f64,
}

impl Default for ComplexDouble {
    fn default() -> Self {
        ComplexDouble { tol: DEFAULT_RANK_TOL }
    }
}

impl ComplexDouble {
    pub fn with_tol(tol: f64) -> Self {
        ComplexDouble { tol }
    }
}

impl Field for ComplexDouble {
    type Elem = Complex64;

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(&self, v: i64) -> Complex64 {
        Complex64::new(v as f64, 0.0)
    }
    fn from_rational(&self, q: &BigRational) -> Option<Complex64> {
        Some(Complex64::new(rational_to_f64(q), 0.0))
    }
    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }
    fn sub(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a - b
    }
    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }
    fn neg(&self, a: &Complex64) -> Complex64 {
        -a
    }
    fn inv(&self, a: &Complex64) -> Option<Complex64> {
        if a.norm() == 0.0 {
            None
        } else {
            Some(a.inv())
        }
    }
    fn is_zero(&self, a: &Complex64) -> bool {
        a.re == 0.0 && a.im == 0.0
    }
    fn magnitude(&self, a: &Complex64) -> f64 {
        a.norm()
    }
    fn is_exact(&self) -> bool {
        false
    }
    fn tag(&self) -> FieldTag {
        FieldTag::ComplexDouble
    }
    fn to_complex(&self, a: &Complex64) -> Option<Complex64> {
        Some(*a)
    }
    fn from_complex(&self, c: Complex64) -> Option<Complex64> {
        Some(c)
    }
    fn format(&self, a: &Complex64) -> String {
        if a.im == 0.0 {
            format!("{}", a.re)
        } else {
            format!("({}{:+}i)", a.re, a.im)
        }
    }
    fn rank_tol(&self) -> f64 {
        self.tol
    }
}

/// Builds a rational `n/d`.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational reconstruction of `a mod m` with |num|, den below sqrt(m/2).
pub fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound: BigInt = (m >> 1usize).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let qt = &r0 / &r1;
        let r2 = &r0 - &qt * &r1;
        let t2 = &t0 - &qt * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rejects_small_or_composite() {
        assert!(PrimeField::new(101).is_err());
        assert!(PrimeField::new(32001).is_err());
        assert!(PrimeField::new(32003).is_ok());
        assert!(PrimeField::new(65537).is_ok());
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(32003).unwrap();
        for a in 1..200u64 {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
        assert_eq!(f.from_i64(-1), 32002);
        assert_eq!(f.from_rational(&q(1, 2)), Some(16002));
    }

    #[test]
    fn rationals_lowest_terms() {
        let r = q(6, -4);
        assert_eq!(r, q(-3, 2));
        assert!(r.denom() > &BigInt::zero());
    }

    #[test]
    fn reconstruct_small_fraction() {
        let m = BigInt::from(32003u64) * BigInt::from(65537u64);
        let f = q(-17, 23);
        // a = -17 * 23^{-1} mod m
        let inv = {
            let e = BigInt::from(23).extended_gcd(&m);
            e.x.mod_floor(&m)
        };
        let a = (BigInt::from(-17) * inv).mod_floor(&m);
        assert_eq!(rational_reconstruct(&a, &m), Some(f));
    }

    #[test]
    fn huge_rational_to_float() {
        let big = BigInt::from(10).pow(400u32);
        let r = BigRational::new(big.clone() * 3, big);
        assert!((rational_to_f64(&r) - 3.0).abs() < 1e-12);
    }
}
