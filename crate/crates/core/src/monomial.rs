//! Exponent vectors under the graded reverse lexicographic order.

use std::cmp::Ordering;
use std::fmt;

/// Maximum number of variables a polynomial may have.
pub const MAX_VARS: usize = 8;

/// An exponent vector. Unused trailing slots are zero, so comparisons do not
/// depend on the variable count.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    deg: u32,
    e: [u16; MAX_VARS],
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn new(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables are supported");
        let mut e = [0u16; MAX_VARS];
        let mut deg = 0;
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u16::try_from(x).expect("exponent overflow");
            deg += x;
        }
        Monomial { deg, e }
    }

    pub fn var(i: usize) -> Self {
        let mut m = Monomial::one();
        m.e[i] = 1;
        m.deg = 1;
        m
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.deg
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.e[i] as u32
    }

    pub fn exps(&self, nvars: usize) -> Vec<u32> {
        self.e[..nvars].iter().map(|&x| x as u32).collect()
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.e;
        for (a, b) in e.iter_mut().zip(other.e.iter()) {
            *a += *b;
        }
        Monomial { deg: self.deg + other.deg, e }
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.deg <= other.deg && self.e.iter().zip(other.e.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    #[inline]
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut e = other.e;
        for (a, b) in e.iter_mut().zip(self.e.iter()) {
            *a -= *b;
        }
        Monomial { deg: other.deg - self.deg, e }
    }

    pub fn checked_div(&self, divisor: &Monomial) -> Option<Monomial> {
        divisor.divides(self).then(|| divisor.quotient_of(self))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut e = [0u16; MAX_VARS];
        let mut deg = 0;
        for i in 0..MAX_VARS {
            e[i] = self.e[i].max(other.e[i]);
            deg += e[i] as u32;
        }
        Monomial { deg, e }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.e.iter().zip(other.e.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Drops variable `k`, shifting later variables down.
    pub fn remove_var(&self, k: usize) -> Monomial {
        let mut e = [0u16; MAX_VARS];
        let mut j = 0;
        for i in 0..MAX_VARS {
            if i != k {
                e[j] = self.e[i];
                j += 1;
            }
        }
        Monomial { deg: self.deg - self.e[k] as u32, e }
    }

    /// Inserts variable `k` with exponent `x`, shifting later variables up.
    pub fn insert_var(&self, k: usize, x: u32) -> Monomial {
        let mut e = [0u16; MAX_VARS];
        let mut j = 0;
        for (i, slot) in e.iter_mut().enumerate() {
            if i == k {
                *slot = x as u16;
            } else {
                *slot = self.e[j];
                j += 1;
            }
        }
        Monomial { deg: self.deg + x, e }
    }

    /// Multinomial factorial product `a_0! a_1! ... a_n!`.
    pub fn factorial_product(&self) -> u128 {
        self.e.iter().map(|&a| factorial(a as u32)).product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.deg.cmp(&other.deg) {
            Ordering::Equal => {}
            o => return o,
        }
        for i in (0..MAX_VARS).rev() {
            if self.e[i] != other.e[i] {
                // smaller exponent in the last differing variable is larger
                return other.e[i].cmp(&self.e[i]);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.e.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.e[..last])
    }
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// `C(n, k)` as a machine integer (0 when `k > n`).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Dimension of the space of forms of degree `d` in `nvars` variables.
pub fn forms_dim(nvars: usize, d: u32) -> usize {
    if nvars == 0 {
        return usize::from(d == 0);
    }
    binomial(nvars as u64 - 1 + d as u64, d as u64) as usize
}

/// All monomials of degree `d` in `nvars` variables, in descending grevlex order.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    exponents_of_degree(nvars, d).iter().map(|e| Monomial::new(e)).collect()
}

/// Exponent vectors of degree `d` in `nvars` variables, in the same descending
/// order as [`monomials_of_degree`] but with no bound on `nvars`.
pub fn exponents_of_degree(nvars: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for x in (0..=left).rev() {
            cur[i] = x;
            rec(i + 1, left - x, cur, out);
        }
        cur[i] = 0;
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    // Same degree throughout, so descending grevlex is ascending in the reversed exponents.
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// All monomials of degree at most `d`, descending.
pub fn monomials_up_to_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = (0..=d).rev().flat_map(|k| monomials_of_degree(nvars, k)).collect();
    out.sort_by(|a, b| b.cmp(a));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_examples() {
        // x0 > x1 > x2 in degree 1; x0*x2 < x1^2 in degree 2 under grevlex
        let x = |a: &[u32]| Monomial::new(a);
        assert!(x(&[1, 0, 0]) > x(&[0, 1, 0]));
        assert!(x(&[0, 1, 0]) > x(&[0, 0, 1]));
        assert!(x(&[0, 2, 0]) > x(&[1, 0, 1]));
        assert!(x(&[2, 0, 0]) > x(&[1, 1, 0]));
        assert!(x(&[0, 0, 2]) < x(&[5, 0, 0]));
    }

    #[test]
    fn counts() {
        assert_eq!(monomials_of_degree(3, 3).len(), 10);
        assert_eq!(monomials_of_degree(4, 2).len(), 10);
        assert_eq!(monomials_of_degree(6, 2).len(), 21);
        assert_eq!(forms_dim(3, 4), 15);
        assert_eq!(monomials_up_to_degree(2, 2).len(), 6);
        let m = monomials_of_degree(3, 2);
        assert_eq!(m[0], Monomial::new(&[2, 0, 0]));
        assert_eq!(*m.last().unwrap(), Monomial::new(&[0, 0, 2]));
    }

    #[test]
    fn insert_remove_roundtrip() {
        let m = Monomial::new(&[1, 2, 3]);
        let r = m.remove_var(1);
        assert_eq!(r.exps(2), vec![1, 3]);
        assert_eq!(r.insert_var(1, 2), m);
    }
}
