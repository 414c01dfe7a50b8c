//! The apolarity pairing between operators in `R` and forms in `S`,
//! catalecticant maps and perp spaces.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};
use crate::monomial::{binomial, exponents_of_degree, forms_dim, monomials_of_degree, Monomial};
use crate::poly::{GradedForm, Poly, Side};

/// A linearly independent system of `r` forms of degree `d` in `n + 1` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct FormSystem<F: Field> {
    n: usize,
    d: u32,
    basis: Vec<GradedForm<F>>,
}

impl<F: Field> FormSystem<F> {
    pub fn new(basis: Vec<GradedForm<F>>) -> Result<Self> {
        let first = basis.first().ok_or_else(|| Error::InvalidArgument("empty form system".into()))?;
        let (nvars, d, field) = (first.nvars(), first.degree(), first.field().clone());
        if nvars == 0 {
            return Err(Error::InvalidArgument("forms need at least one variable".into()));
        }
        for f in &basis {
            if f.side() != Side::S {
                return Err(Error::SideMismatch);
            }
            if f.nvars() != nvars {
                return Err(Error::NvarsMismatch(nvars, f.nvars()));
            }
            if f.degree() != d {
                return Err(Error::NotHomogeneous(d));
            }
            if *f.field() != field {
                return Err(Error::FieldMismatch(field.tag().to_string(), f.field().tag().to_string()));
            }
        }
        let rows: Vec<_> = basis.iter().map(|f| f.coords()).collect();
        let rank = Matrix::from_rows(&field, forms_dim(nvars, d), &rows).rank();
        if rank != basis.len() {
            return Err(Error::Degenerate(format!("basis has rank {rank} < {}", basis.len())));
        }
        Ok(FormSystem { n: nvars - 1, d, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn r(&self) -> usize {
        self.basis.len()
    }
    pub fn nvars(&self) -> usize {
        self.n + 1
    }
    pub fn basis(&self) -> &[GradedForm<F>] {
        &self.basis
    }
    pub fn field(&self) -> &F {
        self.basis[0].field()
    }

    pub fn max_coeff(&self) -> f64 {
        self.basis.iter().map(|f| f.max_coeff()).fold(0.0, f64::max)
    }

    pub fn map_field<G: Field>(&self, target: &G, mut conv: impl FnMut(&F::Elem) -> G::Elem) -> FormSystem<G> {
        FormSystem { n: self.n, d: self.d, basis: self.basis.iter().map(|f| f.map_field(target, &mut conv)).collect() }
    }

    /// The system `{F(A y)}` for a linear substitution `x = A y`.
    pub fn linear_substitute(&self, a: &[Vec<F::Elem>]) -> Self {
        FormSystem { n: self.n, d: self.d, basis: self.basis.iter().map(|f| f.linear_substitute(a)).collect() }
    }
}

/// `γ! / (γ − α)!`.
pub(crate) fn falling(alpha: &Monomial, gamma: &Monomial, nvars: usize) -> BigInt {
    (0..nvars).flat_map(|k| gamma.exp(k) - alpha.exp(k) + 1..=gamma.exp(k)).fold(BigInt::from(1), |acc, t| acc * t)
}

pub(crate) fn int_elem<F: Field>(field: &F, v: BigInt) -> F::Elem {
    match i64::try_from(&v) {
        Ok(x) => field.from_i64(x),
        Err(_) => field.from_rational(&BigRational::from_integer(v)).expect("integer embeds"),
    }
}

/// Plain differentiation `φ(∂/∂x) F`.
pub fn apolar_pair<F: Field>(phi: &GradedForm<F>, f: &GradedForm<F>) -> Result<GradedForm<F>> {
    if phi.side() != Side::R || f.side() != Side::S {
        return Err(Error::SideMismatch);
    }
    if phi.nvars() != f.nvars() {
        return Err(Error::NvarsMismatch(phi.nvars(), f.nvars()));
    }
    if phi.field() != f.field() {
        return Err(Error::FieldMismatch(phi.field().tag().to_string(), f.field().tag().to_string()));
    }
    let field = f.field();
    let nvars = f.nvars();
    if phi.degree() > f.degree() {
        return Ok(GradedForm::zero(field, Side::S, nvars, 0));
    }
    let mut terms = Vec::new();
    for (a, ca) in phi.poly().terms() {
        for (g, cg) in f.poly().terms() {
            if let Some(q) = g.checked_div(a) {
                let k = int_elem(field, falling(a, g, nvars));
                terms.push((q, field.mul(&field.mul(ca, cg), &k)));
            }
        }
    }
    GradedForm::new(Side::S, f.degree() - phi.degree(), Poly::from_terms(field, nvars, terms))
}

/// `L^d` for the linear form with coordinate vector `l`.
pub fn power_form<F: Field>(field: &F, l: &[F::Elem], d: u32) -> Result<GradedForm<F>> {
    if l.iter().all(|c| field.is_zero(c)) {
        return Err(Error::InvalidArgument("zero linear form".into()));
    }
    let lin = Poly::from_terms(field, l.len(), l.iter().enumerate().map(|(i, c)| (Monomial::var(i), c.clone())));
    GradedForm::new(Side::S, d, lin.pow(d))
}

/// The operator-side linear form `Σ l_i u_i`.
pub fn linear_operator<F: Field>(field: &F, l: &[F::Elem]) -> GradedForm<F> {
    let p = Poly::from_terms(field, l.len(), l.iter().enumerate().map(|(i, c)| (Monomial::var(i), c.clone())));
    GradedForm::new(Side::R, 1, p).expect("linear")
}

/// Matrix of `R_i → Hom(Λ, S_{d−i})`: columns indexed by monomials of
/// `R_i`, rows by (form, monomial of `S_{d−i}`).
pub fn catalecticant<F: Field>(lambda: &FormSystem<F>, i: u32) -> Matrix<F> {
    let field = lambda.field();
    let nvars = lambda.nvars();
    let d = lambda.d;
    let cols = monomials_of_degree(nvars, i);
    if i > d {
        return Matrix::zeros(field, 0, cols.len());
    }
    let rows_mon = monomials_of_degree(nvars, d - i);
    let mut m = Matrix::zeros(field, lambda.r() * rows_mon.len(), cols.len());
    for (k, form) in lambda.basis.iter().enumerate() {
        for (bi, beta) in rows_mon.iter().enumerate() {
            for (ai, alpha) in cols.iter().enumerate() {
                let g = alpha.mul(beta);
                let c = form.poly().coefficient(&g);
                if field.is_zero(&c) {
                    continue;
                }
                let w = int_elem(field, falling(alpha, &g, nvars));
                m.set(k * rows_mon.len() + bi, ai, field.mul(&c, &w));
            }
        }
    }
    m
}

/// `Λ^⊥_i ⊆ R_i` in coordinates of the grevlex monomial basis.
pub fn perp_space<F: Field>(lambda: &FormSystem<F>, i: u32) -> Subspace<F> {
    let field = lambda.field();
    let dim = forms_dim(lambda.nvars(), i);
    if i > lambda.d {
        return Subspace::whole(field, dim);
    }
    let m = catalecticant(lambda, i);
    Subspace::from_basis(field, dim, m.nullspace())
}

/// Forms of `Λ^⊥_i` as operators.
pub fn perp_forms<F: Field>(lambda: &FormSystem<F>, i: u32) -> Vec<GradedForm<F>> {
    perp_space(lambda, i)
        .basis()
        .iter()
        .map(|v| GradedForm::from_coords(lambda.field(), Side::R, lambda.nvars(), i, v))
        .collect()
}

/// `max(0, C(n+i, i) − r·C(n+d−i, d−i))`.
pub fn expected_perp_dim(n: i64, d: i64, r: i64, i: i64) -> Result<usize> {
    if n < 0 || d < 0 || r < 0 || i < 0 {
        return Err(Error::InvalidArgument("negative argument".into()));
    }
    if i > d {
        return Err(Error::InvalidArgument(format!("degree {i} exceeds {d}")));
    }
    let (n, d, r, i) = (n as u64, d as u64, r as u64, i as u64);
    let total = binomial(n + i, i) as i128;
    let used = r as i128 * binomial(n + d - i, d - i) as i128;
    Ok((total - used).max(0) as usize)
}

/// Rank and nullspace basis of a matrix.
pub fn rank_nullspace<F: Field>(m: &Matrix<F>) -> (usize, Vec<Vec<F::Elem>>) {
    (m.rank(), m.nullspace())
}

/// Matrix of the pairing `R_d × S_d → S_0` in monomial bases. Works for any
/// number of variables, including more than forms can carry.
pub fn pairing_matrix<F: Field>(field: &F, nvars: usize, d: u32) -> Matrix<F> {
    let exps = exponents_of_degree(nvars, d);
    let mut m = Matrix::zeros(field, exps.len(), exps.len());
    for (i, a) in exps.iter().enumerate() {
        for (j, g) in exps.iter().enumerate() {
            if a.iter().zip(g).all(|(x, y)| x <= y) {
                let v = a.iter().zip(g).flat_map(|(&x, &y)| y - x + 1..=y).fold(BigInt::from(1), |acc, t| acc * t);
                m.set(i, j, int_elem(field, v));
            }
        }
    }
    m
}

/// `φ ↦ φ∘F` applied to each form of `Λ`, as a list of forms.
pub fn apply_to_system<F: Field>(phi: &GradedForm<F>, lambda: &FormSystem<F>) -> Result<Vec<GradedForm<F>>> {
    lambda.basis.iter().map(|f| apolar_pair(phi, f)).collect()
}

/// Whether `φ` annihilates every form of `Λ` (exactly, or to the field tolerance
/// relative to the coefficient scale).
pub fn annihilates<F: Field>(phi: &GradedForm<F>, lambda: &FormSystem<F>) -> Result<bool> {
    let field = lambda.field();
    let images = apply_to_system(phi, lambda)?;
    if field.is_exact() {
        return Ok(images.iter().all(|g| g.is_zero()));
    }
    let scale = phi.max_coeff() * lambda.max_coeff() * factorial_scale(lambda.d);
    Ok(images.iter().all(|g| g.max_coeff() <= field.rank_tol() * scale.max(f64::MIN_POSITIVE) * 10.0))
}

fn factorial_scale(d: u32) -> f64 {
    (1..=d).map(f64::from).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, PrimeField, Rationals};

    fn r_form(terms: &[(&[u32], i64)]) -> GradedForm<Rationals> {
        GradedForm::from_int_terms(&Rationals, Side::R, terms).unwrap()
    }
    fn s_form(terms: &[(&[u32], i64)]) -> GradedForm<Rationals> {
        GradedForm::from_int_terms(&Rationals, Side::S, terms).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let out = apolar_pair(&r_form(&[(&[2, 0], 1)]), &s_form(&[(&[4, 0], 1)])).unwrap();
        assert_eq!(out, s_form(&[(&[2, 0], 12)]));
        let out = apolar_pair(&r_form(&[(&[1, 1], 1)]), &s_form(&[(&[3, 0], 1)])).unwrap();
        assert!(out.is_zero());
        let out = apolar_pair(&r_form(&[(&[1, 1], 1)]), &s_form(&[(&[2, 1], 1)])).unwrap();
        assert_eq!(out, s_form(&[(&[1, 0], 2)]));
    }

    #[test]
    fn pairing_rejects_wrong_sides() {
        let f = s_form(&[(&[1, 0], 1)]);
        assert_eq!(apolar_pair(&f, &f), Err(Error::SideMismatch));
    }

    #[test]
    fn power_form_examples() {
        let p = power_form(&Rationals, &[q(1, 1), q(1, 1)], 2).unwrap();
        assert_eq!(p, s_form(&[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]));
        let p = power_form(&Rationals, &[q(1, 1), q(-2, 1), q(3, 1)], 3).unwrap();
        assert_eq!(p.poly().coefficient(&Monomial::new(&[0, 3, 0])), q(-8, 1));
        assert_eq!(p.poly().coefficient(&Monomial::new(&[1, 1, 1])), q(-36, 1));
        assert!(power_form(&Rationals, &[q(0, 1), q(0, 1)], 2).is_err());
    }

    #[test]
    fn expected_dims() {
        assert_eq!(expected_perp_dim(2, 4, 2, 3).unwrap(), 4);
        assert_eq!(expected_perp_dim(2, 3, 2, 3).unwrap(), 8);
        assert_eq!(expected_perp_dim(3, 2, 6, 2).unwrap(), 4);
        assert!(expected_perp_dim(-1, 2, 1, 1).is_err());
    }

    #[test]
    fn perp_above_degree_is_everything() {
        let lam = FormSystem::new(vec![s_form(&[(&[2, 0, 0], 1)])]).unwrap();
        assert_eq!(perp_space(&lam, 3).dim(), 10);
        assert_eq!(perp_space(&lam, 1).dim(), 2);
    }

    #[test]
    fn pairing_matrix_is_diagonal() {
        let f = PrimeField::new(32003).unwrap();
        let m = pairing_matrix(&f, 3, 3);
        assert_eq!(m.rank(), 10);
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(i == j, *m.get(i, j) != 0);
            }
        }
    }
}
