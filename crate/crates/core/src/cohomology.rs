//! Intersection numbers on symmetric products of an elliptic curve.
//!
//! `H*(E^(m))` is handled inside the subring generated by `ξ` and `η`
//! (`η² = 0`, `ξ^m = ξ^{m-1}η`); on `E^(m) × E` we add `τ`, the point class
//! of the second factor, and `γ`, with `γ² = -2ητ` and `γτ = γη = τ² = 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::apolarity::expected_perp_dim;
use crate::error::{Error, Result};
use crate::monomial::binomial;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `Σ_k (a_k + b_k η) ξ^k` in `H*(E^(m))`, with `k < m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymProdClass {
    m: usize,
    a: Vec<BigRational>,
    b: Vec<BigRational>,
}

impl SymProdClass {
    pub fn zero(m: usize) -> Self {
        assert!(m >= 1, "symmetric power index must be positive");
        SymProdClass { m, a: vec![BigRational::zero(); m], b: vec![BigRational::zero(); m] }
    }

    pub fn one(m: usize) -> Self {
        Self::monomial(m, 0, false, rat(1))
    }

    pub fn xi(m: usize) -> Self {
        Self::monomial(m, 1, false, rat(1))
    }

    pub fn eta(m: usize) -> Self {
        Self::monomial(m, 0, true, rat(1))
    }

    /// `c · ξ^k η^e`, normalized.
    pub fn monomial(m: usize, k: usize, eta: bool, c: BigRational) -> Self {
        let mut s = Self::zero(m);
        s.add_term(k, eta, c);
        s
    }

    /// The point class `ξ^{m-1} η`.
    pub fn point(m: usize) -> Self {
        Self::monomial(m, m - 1, true, rat(1))
    }

    fn add_term(&mut self, k: usize, eta: bool, c: BigRational) {
        let m = self.m;
        match (k.cmp(&m), eta) {
            (std::cmp::Ordering::Less, false) => self.a[k] += c,
            (std::cmp::Ordering::Less, true) => self.b[k] += c,
            (std::cmp::Ordering::Equal, false) => self.b[m - 1] += c,
            _ => {}
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().chain(&self.b).all(Zero::is_zero)
    }

    /// Coefficients `(a_k, b_k)`.
    pub fn coefficient(&self, k: usize) -> (&BigRational, &BigRational) {
        (&self.a[k], &self.b[k])
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for k in 0..self.m {
            s.a[k] += &o.a[k];
            s.b[k] += &o.b[k];
        }
        s
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        SymProdClass {
            m: self.m,
            a: self.a.iter().map(|x| x * c).collect(),
            b: self.b.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = Self::zero(self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                if !self.a[i].is_zero() && !o.a[j].is_zero() {
                    s.add_term(i + j, false, &self.a[i] * &o.a[j]);
                }
                if !self.a[i].is_zero() && !o.b[j].is_zero() {
                    s.add_term(i + j, true, &self.a[i] * &o.b[j]);
                }
                if !self.b[i].is_zero() && !o.a[j].is_zero() {
                    s.add_term(i + j, true, &self.b[i] * &o.a[j]);
                }
            }
        }
        s
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.m), |acc, _| acc.mul(self))
    }

    /// Codimension-`c` part.
    pub fn graded(&self, c: usize) -> Self {
        let mut s = Self::zero(self.m);
        if c < self.m {
            s.a[c] = self.a[c].clone();
        }
        if c >= 1 && c - 1 < self.m {
            s.b[c - 1] = self.b[c - 1].clone();
        }
        s
    }

    /// Coefficient of the point class.
    pub fn degree(&self) -> BigRational {
        self.b[self.m - 1].clone()
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().chain(&self.b).all(|c| c.is_integer())
    }
}

fn format_term(c: &BigRational, body: &str, first: bool, out: &mut String) {
    let neg = c.is_negative();
    let abs = c.abs();
    if !first {
        out.push_str(if neg { " - " } else { " + " });
    } else if neg {
        out.push('-');
    }
    let one = abs.is_one();
    if body.is_empty() {
        out.push_str(&abs.to_string());
    } else if one {
        out.push_str(body);
    } else {
        out.push_str(&format!("{abs}{body}"));
    }
}

fn power_str(sym: &str, k: usize) -> String {
    const SUP: [&str; 10] = ["⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"];
    match k {
        0 => String::new(),
        1 => sym.to_string(),
        _ => format!("{sym}{}", k.to_string().chars().map(|c| SUP[c as usize - '0' as usize]).collect::<String>()),
    }
}

impl fmt::Display for SymProdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut first = true;
        for k in (0..self.m).rev() {
            for (c, eta) in [(&self.a[k], false), (&self.b[k], true)] {
                if c.is_zero() {
                    continue;
                }
                let body = format!("{}{}", power_str("ξ", k), if eta { "η" } else { "" });
                format_term(c, &body, first, &mut out);
                first = false;
            }
        }
        if first {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Key `(ξ exponent, η, τ, γ)`.
type ProductKey = (usize, bool, bool, bool);

/// Classes on `E^(m) × E` in the subring generated by `ξ, η, τ, γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductClass {
    m: usize,
    terms: BTreeMap<ProductKey, BigRational>,
}

impl ProductClass {
    pub fn zero(m: usize) -> Self {
        ProductClass { m, terms: BTreeMap::new() }
    }

    pub fn term(m: usize, key: ProductKey, c: BigRational) -> Self {
        let mut s = Self::zero(m);
        s.add_term(key, c);
        s
    }

    pub fn one(m: usize) -> Self {
        Self::term(m, (0, false, false, false), rat(1))
    }
    pub fn xi(m: usize) -> Self {
        Self::term(m, (1, false, false, false), rat(1))
    }
    pub fn eta(m: usize) -> Self {
        Self::term(m, (0, true, false, false), rat(1))
    }
    pub fn tau(m: usize) -> Self {
        Self::term(m, (0, false, true, false), rat(1))
    }
    pub fn gamma(m: usize) -> Self {
        Self::term(m, (0, false, false, true), rat(1))
    }

    fn add_term(&mut self, (k, e, t, g): ProductKey, c: BigRational) {
        if c.is_zero() || (g && (e || t)) {
            return;
        }
        let key = if k < self.m {
            (k, e, t, g)
        } else if k == self.m && !e {
            (k - 1, true, t, g)
        } else {
            return;
        };
        if g && key.1 {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ProductKey, &BigRational)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut s = self.clone();
        for (k, c) in &o.terms {
            s.add_term(*k, c.clone());
        }
        s
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut s = Self::zero(self.m);
        for (k, x) in &self.terms {
            s.add_term(*k, x * c);
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut s = Self::zero(self.m);
        for (&(k1, e1, t1, g1), c1) in &self.terms {
            for (&(k2, e2, t2, g2), c2) in &o.terms {
                let mut c = c1 * c2;
                let (mut e, mut t) = (e1 as u8 + e2 as u8, t1 as u8 + t2 as u8);
                let g = if g1 && g2 {
                    c *= rat(-2);
                    e += 1;
                    t += 1;
                    false
                } else {
                    g1 || g2
                };
                if e > 1 || t > 1 {
                    continue;
                }
                s.add_term((k1 + k2, e == 1, t == 1, g), c);
            }
        }
        s
    }

    /// `exp` of a nilpotent class.
    pub fn exp(&self) -> Self {
        let mut acc = Self::one(self.m);
        let mut power = Self::one(self.m);
        let mut fact = rat(1);
        for j in 1..=self.m + 3 {
            power = power.mul(self);
            fact *= rat(j as i64);
            if power.terms.is_empty() {
                break;
            }
            acc = acc.add(&power.scale(&(rat(1) / &fact)));
        }
        acc
    }

    /// Fiber integration along `E`: the `τ` coefficient.
    pub fn pushforward(&self) -> SymProdClass {
        let mut s = SymProdClass::zero(self.m);
        for (&(k, e, t, g), c) in &self.terms {
            if t && !g {
                s.add_term(k, e, c.clone());
            }
        }
        s
    }
}

impl fmt::Display for ProductClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut first = true;
        let mut keys: Vec<_> = self.terms.iter().collect();
        keys.sort_by_key(|(&(k, e, t, g), _)| std::cmp::Reverse((k, e, g, t)));
        for (&(k, e, t, g), c) in keys {
            let body = format!(
                "{}{}{}{}",
                power_str("ξ", k),
                if e { "η" } else { "" },
                if t { "τ" } else { "" },
                if g { "γ" } else { "" }
            );
            format_term(c, &body, first, &mut out);
            first = false;
        }
        if first {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// `c_1(M) = -ξ - γ + (D - m)τ`.
pub fn c1_of_m(m: usize, big_d: usize) -> Result<ProductClass> {
    if m == 0 || big_d <= m {
        return Err(Error::InvalidArgument(format!("need D > m >= 1, got m={m}, D={big_d}")));
    }
    Ok(ProductClass::xi(m)
        .scale(&rat(-1))
        .add(&ProductClass::gamma(m).scale(&rat(-1)))
        .add(&ProductClass::tau(m).scale(&rat((big_d - m) as i64))))
}

/// Chern character of the pushforward: graded pieces `ch_0, …, ch_{m}`.
pub fn grr_pushforward(exp_c1: &ProductClass, m: usize) -> Vec<SymProdClass> {
    let ch = exp_c1.pushforward();
    (0..=m).map(|c| ch.graded(c)).collect()
}

fn factorial_rat(i: usize) -> BigRational {
    (1..=i).fold(rat(1), |acc, j| acc * rat(j as i64))
}

/// Newton classes `n_i = i! ch_i`.
pub fn newton_classes(ch: &[SymProdClass]) -> Vec<SymProdClass> {
    ch.iter().enumerate().map(|(i, c)| c.scale(&factorial_rat(i))).collect()
}

/// Rank, Newton and Chern classes of a bundle and of its dual.
#[derive(Clone, Debug)]
pub struct ChernData {
    pub rank: usize,
    pub newton: Vec<SymProdClass>,
    pub chern: Vec<SymProdClass>,
    pub dual_chern: Vec<SymProdClass>,
}

fn newton_identities(k: usize, newton: &[SymProdClass], m: usize) -> Result<Vec<SymProdClass>> {
    let mut c = vec![SymProdClass::one(m)];
    for i in 1..=k {
        let mut acc = SymProdClass::zero(m);
        for j in 1..=i {
            let p = newton.get(j).cloned().unwrap_or_else(|| SymProdClass::zero(m));
            let term = c[i - j].mul(&p);
            acc = if j % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        let ci = acc.scale(&(rat(1) / rat(i as i64)));
        if !ci.is_integral() {
            return Err(Error::Numerical(format!("non-integral Chern class c_{i} = {ci}")));
        }
        c.push(ci);
    }
    Ok(c)
}

/// Chern classes `c_0..c_k` of a rank-`k` bundle from its Newton classes,
/// together with those of the dual.
pub fn newton_to_chern(k: usize, newton: &[SymProdClass]) -> Result<ChernData> {
    let m = newton.first().map(|n| n.m()).ok_or_else(|| Error::InvalidArgument("no Newton classes".into()))?;
    let chern = newton_identities(k, newton, m)?;
    let dual_newton: Vec<SymProdClass> =
        newton.iter().enumerate().map(|(i, n)| if i % 2 == 1 { n.scale(&rat(-1)) } else { n.clone() }).collect();
    let dual_chern = newton_identities(k, &dual_newton, m)?;
    Ok(ChernData { rank: k, newton: newton.to_vec(), chern, dual_chern })
}

/// Power sums from Chern classes, the inverse of [`newton_to_chern`].
pub fn chern_to_newton(k: usize, chern: &[SymProdClass]) -> Vec<SymProdClass> {
    let m = chern[0].m();
    let mut p: Vec<SymProdClass> = vec![SymProdClass::one(m).scale(&rat(k as i64))];
    let get = |i: usize| chern.get(i).cloned().unwrap_or_else(|| SymProdClass::zero(m));
    for i in 1..m + 1 {
        // p_i = (-1)^{i-1} i c_i + Σ_{j=1}^{i-1} (-1)^{j-1} c_j p_{i-j}
        let mut acc = get(i).scale(&rat(if i % 2 == 1 { i as i64 } else { -(i as i64) }));
        for j in 1..i {
            let t = get(j).mul(&p[i - j]);
            acc = if j % 2 == 1 { acc.add(&t) } else { acc.sub(&t) };
        }
        p.push(acc);
    }
    p
}

/// Every class computed while counting, as display strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CountTrace {
    pub m: usize,
    #[serde(rename = "D")]
    pub big_d: usize,
    pub q: usize,
    pub rank: usize,
    pub c1_m: String,
    pub newton: Vec<String>,
    pub chern: Vec<String>,
    pub dual_chern: Vec<String>,
    pub locus_class: String,
    pub count: i64,
}

/// Degree of `c_k(G*)^q` on `E^(m)`, with `k = D - m` and `kq = m`.
pub fn count_on_curve(m: usize, big_d: usize, q: usize) -> Result<i64> {
    Ok(count_trace(m, big_d, q)?.count)
}

pub fn count_trace(m: usize, big_d: usize, q: usize) -> Result<CountTrace> {
    let c1 = c1_of_m(m, big_d)?;
    let k = big_d - m;
    if q == 0 || k * q != m {
        return Err(Error::InvalidArgument(format!("need k·q = m, got k={k}, q={q}, m={m}")));
    }
    let ch = grr_pushforward(&c1.exp(), m);
    let newton = newton_classes(&ch);
    let data = newton_to_chern(k, &newton)?;
    let locus = data.dual_chern[k].pow(q as u32);
    let deg = locus.degree();
    if !deg.is_integer() {
        return Err(Error::Numerical(format!("non-integral count {deg}")));
    }
    let count = deg.to_integer().to_i64().ok_or_else(|| Error::Numerical("count overflow".into()))?;
    Ok(CountTrace {
        m,
        big_d,
        q,
        rank: k,
        c1_m: c1.to_string(),
        newton: newton.iter().take(k + 1).map(|n| n.to_string()).collect(),
        chern: data.chern.iter().map(|c| c.to_string()).collect(),
        dual_chern: data.dual_chern.iter().map(|c| c.to_string()).collect(),
        locus_class: locus.to_string(),
        count,
    })
}

/// The elliptic cases handled by [`quadruple_to_symprod`].
pub const ELLIPTIC_QUADRUPLES: [(usize, u32, usize, usize); 5] =
    [(2, 4, 3, 9), (3, 3, 2, 8), (2, 3, 2, 6), (2, 4, 2, 8), (5, 2, 3, 9)];

/// Dimension bookkeeping for an apolar elliptic normal curve.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SymProdParams {
    pub quadruple: (usize, u32, usize, usize),
    pub curve_degree: usize,
    /// `dim R_d / (I_E)_d = h^0(E, dH)`.
    pub dim_u: usize,
    /// `dim Λ^⊥_d / (I_E)_d`.
    pub dim_w: usize,
    pub dim_ideal: usize,
    pub m: usize,
    #[serde(rename = "D")]
    pub big_d: usize,
    pub q: usize,
}

pub fn quadruple_to_symprod(n: usize, d: u32, r: usize, s: usize, curve_degree: usize) -> Result<SymProdParams> {
    if !ELLIPTIC_QUADRUPLES.contains(&(n, d, r, s)) {
        return Err(Error::Unsupported(format!("({n},{d},{r},{s}) is not an elliptic case")));
    }
    if curve_degree != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "an elliptic normal curve in P^{n} has degree {}, got {curve_degree}",
            n + 1
        )));
    }
    let big_d = d as usize * curve_degree;
    let forms = binomial((n + d as usize) as u64, n as u64) as usize;
    let dim_u = big_d;
    let dim_ideal = forms - dim_u;
    let perp = expected_perp_dim(n as i64, i64::from(d), r as i64, i64::from(d))?;
    let dim_w = perp - dim_ideal;
    Ok(SymProdParams {
        quadruple: (n, d, r, s),
        curve_degree,
        dim_u,
        dim_w,
        dim_ideal,
        m: s,
        big_d,
        q: dim_u - dim_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exterior algebra on four odd symbols, indexed by bitmask.
    #[derive(Clone, Debug, PartialEq)]
    struct Ext(BTreeMap<u8, i64>);

    impl Ext {
        fn gen(i: u8) -> Self {
            Ext([(1 << i, 1)].into_iter().collect())
        }
        fn mul(&self, o: &Self) -> Self {
            let mut out = BTreeMap::new();
            for (&a, &x) in &self.0 {
                for (&b, &y) in &o.0 {
                    if a & b != 0 {
                        continue;
                    }
                    // sign of moving each generator of b past the higher ones in a
                    let mut sign = 1;
                    for j in 0..4 {
                        if b & (1 << j) != 0 {
                            let above = (a >> (j + 1)).count_ones();
                            if above % 2 == 1 {
                                sign = -sign;
                            }
                        }
                    }
                    *out.entry(a | b).or_insert(0) += sign * x * y;
                }
            }
            out.retain(|_, v| *v != 0);
            Ext(out)
        }
        fn sub(&self, o: &Self) -> Self {
            let mut out = self.0.clone();
            for (&k, &v) in &o.0 {
                *out.entry(k).or_insert(0) -= v;
            }
            out.retain(|_, v| *v != 0);
            Ext(out)
        }
        fn scale(&self, c: i64) -> Self {
            Ext(self.0.iter().map(|(k, v)| (*k, v * c)).collect())
        }
    }

    #[test]
    fn gamma_relations_from_exterior_algebra() {
        let (a1, a2, b1, b2) = (Ext::gen(0), Ext::gen(1), Ext::gen(2), Ext::gen(3));
        let gamma = a2.mul(&b1).sub(&a1.mul(&b2));
        let eta = a1.mul(&a2);
        let tau = b1.mul(&b2);
        assert_eq!(gamma.mul(&gamma), eta.mul(&tau).scale(-2));
        assert!(gamma.mul(&tau).0.is_empty());
        assert!(gamma.mul(&eta).0.is_empty());
        let m = 4;
        let g = ProductClass::gamma(m);
        assert_eq!(g.mul(&g), ProductClass::eta(m).mul(&ProductClass::tau(m)).scale(&rat(-2)));
    }

    #[test]
    fn ring_sanity() {
        let m = 9;
        let xi = SymProdClass::xi(m);
        assert!(SymProdClass::point(m).mul(&xi).is_zero());
        assert!(xi.pow(9).sub(&xi.pow(8).mul(&SymProdClass::eta(m))).is_zero());
        assert_eq!(xi.pow(9), SymProdClass::point(m));
        assert!(xi.pow(10).is_zero());
    }

    #[test]
    fn c1_display() {
        assert_eq!(c1_of_m(9, 12).unwrap().to_string(), "-ξ - γ + 3τ");
        assert!(c1_of_m(9, 9).is_err());
    }

    fn closed_form(m: usize, k: usize) -> SymProdClass {
        // (k - η) e^{-ξ}
        let base = SymProdClass::one(m).scale(&rat(k as i64)).sub(&SymProdClass::eta(m));
        let mut e = SymProdClass::zero(m);
        for i in 0..=m {
            e = e.add(&SymProdClass::xi(m).scale(&rat(-1)).pow(i as u32).scale(&(rat(1) / factorial_rat(i))));
        }
        base.mul(&e)
    }

    #[test]
    fn grr_closed_form() {
        for (m, d) in [(9, 12), (8, 12), (6, 9), (4, 6), (10, 15)] {
            let ch = grr_pushforward(&c1_of_m(m, d).unwrap().exp(), m);
            let total = ch.iter().fold(SymProdClass::zero(m), |a, b| a.add(b));
            assert_eq!(total, closed_form(m, d - m), "m={m} D={d}");
        }
    }

    #[test]
    fn dual_top_chern_pattern() {
        for (m, k) in [(9, 3), (8, 4), (6, 2), (10, 5)] {
            let ch = grr_pushforward(&c1_of_m(m, m + k).unwrap().exp(), m);
            let data = newton_to_chern(k, &newton_classes(&ch)).unwrap();
            let xi = SymProdClass::xi(m);
            let expect = xi.pow(k as u32).add(&xi.pow(k as u32 - 1).mul(&SymProdClass::eta(m)));
            assert_eq!(data.dual_chern[k], expect, "k={k}");
        }
    }

    #[test]
    fn counts() {
        assert_eq!(count_on_curve(9, 12, 3).unwrap(), 4);
        assert_eq!(count_on_curve(8, 12, 2).unwrap(), 3);
        assert_eq!(count_on_curve(6, 9, 2).unwrap(), 3);
        assert!(count_on_curve(6, 9, 3).is_err());
    }

    #[test]
    fn bookkeeping() {
        let p = quadruple_to_symprod(2, 4, 3, 9, 3).unwrap();
        assert_eq!((p.dim_u, p.dim_w, p.m, p.big_d, p.q), (12, 9, 9, 12, 3));
        let p = quadruple_to_symprod(3, 3, 2, 8, 4).unwrap();
        assert_eq!((p.dim_u, p.dim_w, p.m, p.big_d, p.q), (12, 10, 8, 12, 2));
        let p = quadruple_to_symprod(2, 3, 2, 6, 3).unwrap();
        assert_eq!((p.m, p.big_d, p.q), (6, 9, 2));
        assert!(quadruple_to_symprod(2, 3, 2, 7, 3).is_err());
    }
}
