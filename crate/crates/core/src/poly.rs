//! Sparse multivariate polynomials and homogeneous forms.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::{ComplexDouble, Field, PrimeField, Rationals};
use crate::monomial::{monomials_of_degree, Monomial, MAX_VARS};

/// A polynomial with terms sorted by descending grevlex order and no zero
/// coefficients.
#[derive(Clone, PartialEq)]
pub struct Poly<F: Field> {
    field: F,
    nvars: usize,
    terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> Poly<F> {
    pub fn zero(field: &F, nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        Poly { field: field.clone(), nvars, terms: Vec::new() }
    }

    pub fn constant(field: &F, nvars: usize, c: F::Elem) -> Self {
        Self::term(field, nvars, Monomial::one(), c)
    }

    pub fn term(field: &F, nvars: usize, m: Monomial, c: F::Elem) -> Self {
        let mut p = Self::zero(field, nvars);
        if !field.is_zero(&c) {
            p.terms.push((m, c));
        }
        p
    }

    pub fn var(field: &F, nvars: usize, i: usize) -> Self {
        Self::term(field, nvars, Monomial::var(i), field.one())
    }

    /// Builds a polynomial from arbitrary (monomial, coefficient) pairs,
    /// merging duplicates and dropping zeros.
    pub fn from_terms(field: &F, nvars: usize, terms: impl IntoIterator<Item = (Monomial, F::Elem)>) -> Self {
        let mut acc: BTreeMap<Monomial, F::Elem> = BTreeMap::new();
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(v) => *v = field.add(v, &c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let terms = acc.into_iter().rev().filter(|(_, c)| !field.is_zero(c)).collect();
        Poly { field: field.clone(), nvars, terms }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, F::Elem)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<&(Monomial, F::Elem)> {
        self.terms.first()
    }

    pub fn lead_monomial(&self) -> Option<Monomial> {
        self.terms.first().map(|t| t.0)
    }

    pub fn coefficient(&self, m: &Monomial) -> F::Elem {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| self.field.zero())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// The common degree of all terms, if homogeneous (zero counts as homogeneous of any degree).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first()?.0.degree();
        self.terms.iter().all(|(m, _)| m.degree() == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.is_empty() || self.homogeneous_degree().is_some()
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        assert_eq!(self.field, other.field, "field mismatch");
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        self.check_compatible(other);
        let f = &self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate_other { f.neg(&b[j].1) } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other { f.sub(&a[i].1, &b[j].1) } else { f.add(&a[i].1, &b[j].1) };
                    if !f.is_zero(&c) {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate_other { f.neg(&t.1) } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly { field: f.clone(), nvars: self.nvars, terms: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Poly { field: f.clone(), nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (*m, f.neg(c))).collect() }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let f = &self.field;
        if f.is_zero(c) {
            return Self::zero(f, self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (*m, f.mul(a, c)))
            .filter(|(_, a)| !f.is_zero(a))
            .collect();
        Poly { field: f.clone(), nvars: self.nvars, terms }
    }

    pub fn mul_term(&self, m: &Monomial, c: &F::Elem) -> Self {
        let f = &self.field;
        if f.is_zero(c) {
            return Self::zero(f, self.nvars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(t, a)| (t.mul(m), f.mul(a, c)))
            .filter(|(_, a)| !f.is_zero(a))
            .collect();
        Poly { field: f.clone(), nvars: self.nvars, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let f = &self.field;
        let mut acc: BTreeMap<Monomial, F::Elem> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = f.mul(ca, cb);
                match acc.get_mut(&m) {
                    Some(v) => *v = f.add(v, &c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let terms = acc.into_iter().rev().filter(|(_, c)| !f.is_zero(c)).collect();
        Poly { field: f.clone(), nvars: self.nvars, terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(&self.field, self.nvars, self.field.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Divides through by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.field.inv(c).expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    pub fn eval(&self, point: &[F::Elem]) -> F::Elem {
        assert_eq!(point.len(), self.nvars);
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    v = f.mul(&v, &f.pow(x, e));
                }
            }
            acc = f.add(&acc, &v);
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let f = &self.field;
        let terms = self.terms.iter().filter(|(m, _)| m.exp(var) > 0).map(|(m, c)| {
            let e = m.exp(var);
            (Monomial::var(var).quotient_of(m), f.mul(c, &f.from_i64(e as i64)))
        });
        Self::from_terms(f, self.nvars, terms)
    }

    /// Substitutes `x_k = sum_j a[k][j] * y_j` where `a` has `nvars` rows and
    /// `new_nvars` columns.
    pub fn linear_substitute(&self, a: &[Vec<F::Elem>], new_nvars: usize) -> Self {
        assert_eq!(a.len(), self.nvars);
        let f = &self.field;
        let images: Vec<Poly<F>> = a
            .iter()
            .map(|row| {
                Self::from_terms(f, new_nvars, row.iter().enumerate().map(|(j, c)| (Monomial::var(j), c.clone())))
            })
            .collect();
        let mut out = Self::zero(f, new_nvars);
        // cache powers of each image
        let maxdeg = self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0);
        let mut powers: Vec<Vec<Poly<F>>> = Vec::with_capacity(self.nvars);
        for img in &images {
            let mut pw = vec![Self::constant(f, new_nvars, f.one())];
            for e in 1..=maxdeg {
                let next = pw[e as usize - 1].mul(img);
                pw.push(next);
            }
            powers.push(pw);
        }
        for (m, c) in &self.terms {
            let mut t = Self::constant(f, new_nvars, c.clone());
            for (k, pw) in powers.iter().enumerate() {
                let e = m.exp(k) as usize;
                if e > 0 {
                    t = t.mul(&pw[e]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Sets variable `k` to the constant `v`, removing it from the ring.
    pub fn specialize(&self, k: usize, v: &F::Elem) -> Self {
        let f = &self.field;
        let terms = self.terms.iter().map(|(m, c)| {
            let e = m.exp(k);
            (m.remove_var(k), f.mul(c, &f.pow(v, e)))
        });
        Self::from_terms(f, self.nvars - 1, terms)
    }

    /// Homogenizes with a new variable inserted at position `k`.
    pub fn homogenize(&self, k: usize) -> Self {
        let d = self.total_degree().unwrap_or(0);
        let terms = self.terms.iter().map(|(m, c)| (m.insert_var(k, d - m.degree()), c.clone()));
        Self::from_terms(&self.field, self.nvars + 1, terms)
    }

    pub fn map_field<G: Field>(&self, target: &G, mut conv: impl FnMut(&F::Elem) -> G::Elem) -> Poly<G> {
        Poly::from_terms(target, self.nvars, self.terms.iter().map(|(m, c)| (*m, conv(c))))
    }

    /// Coefficients in the listed monomial basis.
    pub fn coords(&self, basis: &[Monomial]) -> Vec<F::Elem> {
        basis.iter().map(|m| self.coefficient(m)).collect()
    }

    pub fn from_coords(field: &F, nvars: usize, basis: &[Monomial], coords: &[F::Elem]) -> Self {
        Self::from_terms(field, nvars, basis.iter().copied().zip(coords.iter().cloned()))
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(|(_, c)| self.field.magnitude(c)).fold(0.0, f64::max)
    }
}

impl Poly<Rationals> {
    pub fn to_prime(&self, fp: &PrimeField) -> Option<Poly<PrimeField>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((*m, fp.from_rational(c)?));
        }
        Some(Poly::from_terms(fp, self.nvars, terms))
    }

    pub fn to_complex(&self, cc: &ComplexDouble) -> Poly<ComplexDouble> {
        self.map_field(cc, |c| Rationals.to_complex(c).unwrap())
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(self, "x"))
    }
}

pub fn format_poly<F: Field>(p: &Poly<F>, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in p.terms.iter().enumerate() {
        if i > 0 {
            s.push_str(" + ");
        }
        let mono: Vec<String> = (0..p.nvars)
            .filter(|&k| m.exp(k) > 0)
            .map(|k| if m.exp(k) == 1 { format!("{var}{k}") } else { format!("{var}{k}^{}", m.exp(k)) })
            .collect();
        let cs = p.field.format(c);
        if mono.is_empty() {
            s.push_str(&cs);
        } else {
            s.push_str(&format!("{cs}*{}", mono.join("*")));
        }
    }
    s
}

/// Which of the two dual polynomial rings a form lives in: `R` holds the
/// differential operators (variables `u`), `S` the forms (variables `x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    R,
    S,
}

impl Side {
    pub fn var_name(&self) -> &'static str {
        match self {
            Side::R => "u",
            Side::S => "x",
        }
    }
}

/// A homogeneous polynomial tagged with its ring side and degree.
#[derive(Clone, PartialEq)]
pub struct GradedForm<F: Field> {
    side: Side,
    degree: u32,
    poly: Poly<F>,
}

impl<F: Field> GradedForm<F> {
    pub fn new(side: Side, degree: u32, poly: Poly<F>) -> Result<Self> {
        if poly.terms.iter().any(|(m, _)| m.degree() != degree) {
            return Err(Error::NotHomogeneous(degree));
        }
        Ok(GradedForm { side, degree, poly })
    }

    pub fn zero(field: &F, side: Side, nvars: usize, degree: u32) -> Self {
        GradedForm { side, degree, poly: Poly::zero(field, nvars) }
    }

    /// Builds a form of degree `degree` from coordinates in the grevlex monomial basis.
    pub fn from_coords(field: &F, side: Side, nvars: usize, degree: u32, coords: &[F::Elem]) -> Self {
        let basis = monomials_of_degree(nvars, degree);
        assert_eq!(basis.len(), coords.len());
        GradedForm { side, degree, poly: Poly::from_coords(field, nvars, &basis, coords) }
    }

    pub fn from_int_terms(field: &F, side: Side, terms: &[(&[u32], i64)]) -> Result<Self> {
        let nvars = terms.first().map(|t| t.0.len()).unwrap_or(0);
        let degree = terms.first().map(|t| t.0.iter().sum()).unwrap_or(0);
        let poly = Poly::from_terms(field, nvars, terms.iter().map(|(e, c)| (Monomial::new(e), field.from_i64(*c))));
        Self::new(side, degree, poly)
    }

    pub fn side(&self) -> Side {
        self.side
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn nvars(&self) -> usize {
        self.poly.nvars
    }
    pub fn poly(&self) -> &Poly<F> {
        &self.poly
    }
    pub fn into_poly(self) -> Poly<F> {
        self.poly
    }
    pub fn field(&self) -> &F {
        &self.poly.field
    }
    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.side != other.side {
            return Err(Error::SideMismatch);
        }
        if self.nvars() != other.nvars() {
            return Err(Error::NvarsMismatch(self.nvars(), other.nvars()));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field().tag().to_string(), other.field().tag().to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::NotHomogeneous(self.degree));
        }
        Ok(GradedForm { side: self.side, degree: self.degree, poly: self.poly.add(&other.poly) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&self.field().neg(&self.field().one())))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        GradedForm { side: self.side, degree: self.degree, poly: self.poly.scale(c) }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(GradedForm { side: self.side, degree: self.degree + other.degree, poly: self.poly.mul(&other.poly) })
    }

    pub fn coords(&self) -> Vec<F::Elem> {
        self.poly.coords(&monomials_of_degree(self.nvars(), self.degree))
    }

    pub fn eval(&self, point: &[F::Elem]) -> F::Elem {
        self.poly.eval(point)
    }

    /// `F(A y)`: the form composed with a linear change of variables.
    pub fn linear_substitute(&self, a: &[Vec<F::Elem>]) -> Self {
        let n = a.first().map_or(0, |r| r.len());
        GradedForm { side: self.side, degree: self.degree, poly: self.poly.linear_substitute(a, n) }
    }

    pub fn map_field<G: Field>(&self, target: &G, conv: impl FnMut(&F::Elem) -> G::Elem) -> GradedForm<G> {
        GradedForm { side: self.side, degree: self.degree, poly: self.poly.map_field(target, conv) }
    }

    pub fn max_coeff(&self) -> f64 {
        self.poly.max_coeff()
    }
}

impl GradedForm<Rationals> {
    pub fn to_complex(&self, cc: &ComplexDouble) -> GradedForm<ComplexDouble> {
        self.map_field(cc, |c| Rationals.to_complex(c).unwrap())
    }

    pub fn to_prime(&self, fp: &PrimeField) -> Option<GradedForm<PrimeField>> {
        Some(GradedForm { side: self.side, degree: self.degree, poly: self.poly.to_prime(fp)? })
    }
}

impl<F: Field> fmt::Debug for GradedForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(&self.poly, self.side.var_name()))
    }
}

impl<F: Field> fmt::Display for GradedForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(&self.poly, self.side.var_name()))
    }
}

/// Converts a rational vector to complex doubles.
pub fn rational_vec_to_complex(v: &[BigRational]) -> Vec<Complex64> {
    v.iter().map(|c| Rationals.to_complex(c).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;

    fn p(terms: &[(&[u32], i64)]) -> Poly<Rationals> {
        Poly::from_terms(&Rationals, terms[0].0.len(), terms.iter().map(|(e, c)| (Monomial::new(e), q(*c, 1))))
    }

    #[test]
    fn arithmetic() {
        let a = p(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let sq = a.mul(&a);
        assert_eq!(sq, p(&[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.pow(3).len(), 4);
    }

    #[test]
    fn derivative_and_eval() {
        let f = p(&[(&[3, 0], 1), (&[1, 2], -2)]);
        let d = f.derivative(0);
        assert_eq!(d, p(&[(&[2, 0], 3), (&[0, 2], -2)]));
        assert_eq!(f.eval(&[q(2, 1), q(1, 1)]), q(4, 1));
    }

    #[test]
    fn substitution() {
        // (x0 + x1)^2 under x0 -> y0 + y1, x1 -> y0 - y1 gives 4 y0^2
        let f = p(&[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]);
        let a = vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]];
        assert_eq!(f.linear_substitute(&a, 2), p(&[(&[2, 0], 4)]));
    }

    #[test]
    fn graded_rejects_inhomogeneous() {
        let f = p(&[(&[2, 0], 1), (&[1, 0], 1)]);
        assert!(GradedForm::new(Side::S, 2, f).is_err());
    }

    #[test]
    fn homogenize_specialize() {
        let f = p(&[(&[2, 0], 1), (&[1, 0], 3), (&[0, 0], 5)]);
        let h = f.homogenize(0);
        assert_eq!(h.homogeneous_degree(), Some(2));
        assert_eq!(h.specialize(0, &q(1, 1)), f);
    }
}
