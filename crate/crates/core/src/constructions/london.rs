use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::base_locus::check_shape;
use super::{complex_system, verify_candidate, PolyhedronJson, Verified};
use crate::apolarity::{annihilates, apolar_pair, expected_perp_dim, linear_operator, perp_space, FormSystem};
use crate::error::{Error, Result};
use crate::field::{ComplexDouble, Field, PrimeField, Rationals};
use crate::json::{complex_vec_json, CoeffJson};
use crate::groebner::{quotient_dimension, GroebnerBasis};
use crate::linalg::{complex_nullspace, Matrix};
use crate::monomial::{monomials_of_degree, Monomial};
use crate::points::{projective_distance, PointSet, Quadruple};
use crate::poly::{GradedForm, Poly, Side};
use crate::random::{random_prime_vec, rng, Rng64};
use crate::solve::{intersect_plane_curves, univariate_roots};

type C = Complex64;

/// Pairs found by the numeric search are accepted below this relative residual.
const PAIR_TOL: f64 = 1e-10;

/// `(u^β u_i)∘F_j`, indexed `[β][i][j]` with `β` over quadratic monomials.
fn pairing_table<F: Field>(lambda: &FormSystem<F>) -> Vec<Vec<Vec<F::Elem>>> {
    let field = lambda.field();
    monomials_of_degree(3, 2)
        .iter()
        .map(|beta| {
            (0..3)
                .map(|i| {
                    let op = GradedForm::new(Side::R, 3, Poly::term(field, 3, beta.mul(&Monomial::var(i)), field.one()))
                        .expect("cubic");
                    lambda
                        .basis()
                        .iter()
                        .map(|f| apolar_pair(&op, f).expect("sides").poly().coefficient(&Monomial::one()))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Linear coefficients of the entries of `f₁₃`: `[β][3k + j][m]` is the
/// coefficient of `a_m` in `(u^β l_k)∘F_j`, with `l₀ = a₁u₀ − a₀u₁` and
/// `l₁ = a₂u₀ − a₀u₂` spanning `L^⊥`.
fn f13_linear<F: Field>(field: &F, table: &[Vec<Vec<F::Elem>>]) -> Vec<Vec<[F::Elem; 3]>> {
    table
        .iter()
        .map(|t| {
            let mut row = Vec::with_capacity(6);
            for k in 0..2 {
                for j in 0..3 {
                    let mut c = [field.zero(), field.zero(), field.zero()];
                    c[k + 1] = t[0][j].clone();
                    c[0] = field.neg(&t[k + 1][j]);
                    row.push(c);
                }
            }
            row
        })
        .collect()
}

fn f13_eval<F: Field>(field: &F, lin: &[Vec<[F::Elem; 3]>], a: &[F::Elem]) -> Matrix<F> {
    let rows: Vec<Vec<F::Elem>> = lin
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| (0..3).fold(field.zero(), |acc, m| field.add(&acc, &field.mul(&c[m], &a[m]))))
                .collect()
        })
        .collect();
    Matrix::from_rows(field, 6, &rows)
}

/// The 6×6 matrix of `f₁₃ : U ⊗ Λ → S₂` at `L`, in the pairing coordinates of
/// `R₂` (rows) against the basis `{l₀, l₁} × {F_j}` (columns).
pub fn f13_matrix<F: Field>(lambda: &FormSystem<F>, l: &[F::Elem]) -> Result<Matrix<F>> {
    check_net(lambda)?;
    let field = lambda.field();
    Ok(f13_eval(field, &f13_linear(field, &pairing_table(lambda)), l))
}

fn check_net<F: Field>(lambda: &FormSystem<F>) -> Result<()> {
    if (lambda.n(), lambda.d(), lambda.r()) != (2, 3, 3) {
        return Err(Error::InvalidArgument("expected a net of ternary cubics".into()));
    }
    Ok(())
}

fn sample_points<F: Field>(field: &F, count: usize, seed: u64) -> Vec<Vec<F::Elem>> {
    let mut g = rng(seed);
    (0..count).map(|_| (0..3).map(|_| field.from_i64(g.gen_range(-40..=40))).collect()).collect()
}

fn smooth_cubic<F: Field>(g: &Poly<F>) -> Result<bool> {
    let partials: Vec<Poly<F>> = (0..3).map(|k| g.derivative(k)).collect();
    let gb = GroebnerBasis::new(g.field(), 3, &partials)?;
    Ok(gb.hilbert_function(4) == 0)
}

/// The cubic `E = det f₁₃ / a₀³` on the plane of linear forms.
#[allow(non_snake_case)]
pub fn london_curve_E<F: Field>(lambda: &FormSystem<F>) -> Result<GradedForm<F>> {
    check_net(lambda)?;
    let field = lambda.field();
    if !field.is_exact() {
        return Err(Error::Unsupported("the curve is computed over exact fields".into()));
    }
    let lin = f13_linear(field, &pairing_table(lambda));
    let mons = monomials_of_degree(3, 6);
    let pts = sample_points(field, mons.len() + 12, 0xe0);
    let rows: Vec<Vec<F::Elem>> =
        pts.iter().map(|p| mons.iter().map(|m| Poly::term(field, 3, *m, field.one()).eval(p)).collect()).collect();
    let rhs: Vec<F::Elem> = pts.iter().map(|p| f13_eval(field, &lin, p).det()).collect();
    let coeffs = Matrix::from_rows(field, mons.len(), &rows)
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("determinant interpolation is inconsistent".into()))?;
    let mut terms = Vec::new();
    for (m, c) in mons.iter().zip(coeffs) {
        if field.is_zero(&c) {
            continue;
        }
        if m.exp(0) < 3 {
            return Err(Error::Numerical("determinant is not divisible by a0^3".into()));
        }
        terms.push((Monomial::new(&[m.exp(0) - 3, m.exp(1), m.exp(2)]), c));
    }
    let g = Poly::from_terms(field, 3, terms);
    if g.is_zero() {
        return Err(Error::Degenerate("f13 is singular everywhere".into()));
    }
    if g.terms().iter().all(|(m, _)| m.exp(0) > 0) {
        return Err(Error::Degenerate("cubic keeps a factor a0".into()));
    }
    if !smooth_cubic(&g)? {
        return Err(Error::Degenerate("the curve E is singular; resample the net".into()));
    }
    GradedForm::new(Side::R, 3, g.monic())
}

/// Cubics `α_β(a)` such that `Σ_β α_β(L) u^β` spans the annihilator of
/// `f₁₃(U ⊗ Λ)` at every `L ∈ E` where it does not vanish. The solutions
/// modulo `E` form a three-dimensional space whose common zeros on `E` are
/// empty, so a basis of three sections is returned.
pub fn london_alpha_map<F: Field>(lambda: &FormSystem<F>, e: &GradedForm<F>) -> Result<Vec<Vec<Poly<F>>>> {
    check_net(lambda)?;
    let field = lambda.field();
    let lin = f13_linear(field, &pairing_table(lambda));
    let cubics = monomials_of_degree(3, 3);
    let quartics = monomials_of_degree(3, 4);
    let quartic_idx = |m: &Monomial| quartics.iter().position(|x| x == m).expect("quartic monomial");
    let nq = quartics.len();
    let mu = 6 * cubics.len();
    let nunk = mu + 18;
    let mut mat = Matrix::zeros(field, 6 * nq + 6, nunk);
    let add = |mat: &mut Matrix<F>, r: usize, col: usize, v: &F::Elem| {
        let x = field.add(mat.get(r, col), v);
        mat.set(r, col, x);
    };
    for c in 0..6 {
        for (b, row) in lin.iter().enumerate() {
            for (gi, gamma) in cubics.iter().enumerate() {
                for (i, coef) in row[c].iter().enumerate() {
                    if !field.is_zero(coef) {
                        add(&mut mat, c * nq + quartic_idx(&gamma.mul(&Monomial::var(i))), b * cubics.len() + gi, coef);
                    }
                }
            }
        }
        for (m, gc) in e.poly().terms() {
            for i in 0..3 {
                add(&mut mat, c * nq + quartic_idx(&m.mul(&Monomial::var(i))), mu + 3 * c + i, &field.neg(gc));
            }
        }
    }
    // Fixing one coefficient of every α_β removes the multiples of E.
    let pivot = e.poly().terms()[0].0;
    let pi = cubics.iter().position(|x| *x == pivot).expect("cubic monomial");
    for b in 0..6 {
        mat.set(6 * nq + b, b * cubics.len() + pi, field.one());
    }
    let null = mat.nullspace();
    if null.len() != 3 {
        return Err(Error::Degenerate(format!("annihilator map space has dimension {}", null.len())));
    }
    Ok(null
        .iter()
        .map(|v| (0..6).map(|b| Poly::from_coords(field, 3, &cubics, &v[b * cubics.len()..(b + 1) * cubics.len()])).collect())
        .collect())
}

/// `α(L)`: the conic annihilating `f₁₃(U ⊗ Λ)` at `L ∈ E`.
pub fn london_alpha<F: Field>(lambda: &FormSystem<F>, l: &[F::Elem]) -> Result<GradedForm<F>> {
    let field = lambda.field();
    let m = f13_matrix(lambda, l)?;
    let null = m.transpose().nullspace();
    if null.len() != 1 {
        return Err(Error::Degenerate(format!("annihilator has dimension {}", null.len())));
    }
    let form = GradedForm::from_coords(field, Side::R, 3, 2, &null[0]);
    let pivot = if field.is_exact() {
        form.poly().terms()[0].1.clone()
    } else {
        form.poly().terms().iter().max_by(|a, b| field.magnitude(&a.1).total_cmp(&field.magnitude(&b.1))).unwrap().1.clone()
    };
    Ok(form.scale(&field.inv(&pivot).expect("nonzero")))
}

/// Rank of `f₂₃(φ ⊗ Λ) = span{φ∘F_j}` for a conic `φ`.
pub fn f23_rank<F: Field>(lambda: &FormSystem<F>, phi: &GradedForm<F>) -> Result<usize> {
    let rows: Vec<Vec<F::Elem>> = lambda.basis().iter().map(|f| apolar_pair(phi, f).map(|g| g.coords())).collect::<Result<_>>()?;
    Ok(Matrix::from_rows(lambda.field(), 3, &rows).rank())
}

fn embed<F: Field>(p: &Poly<F>, offset: usize) -> Poly<F> {
    let terms = p.terms().iter().map(|(m, c)| {
        let mut e = [0u32; 6];
        for k in 0..3 {
            e[offset + k] = m.exp(k);
        }
        (Monomial::new(&e), c.clone())
    });
    Poly::from_terms(p.field(), 6, terms)
}

/// `ψ_L(M) = Σ_β α_β(L) M^β` in the six variables `(L, M)`.
fn psi_poly<F: Field>(alpha: &[Poly<F>], l_off: usize, m_off: usize) -> Poly<F> {
    let field = alpha[0].field();
    monomials_of_degree(3, 2).iter().zip(alpha).fold(Poly::zero(field, 6), |acc, (beta, a)| {
        acc.add(&embed(a, l_off).mul(&embed(&Poly::term(field, 3, *beta, field.one()), m_off)))
    })
}

fn random_chart(fp: &PrimeField, g: &mut Rng64) -> Vec<Vec<u64>> {
    loop {
        let rows: Vec<Vec<u64>> = (0..3).map(|_| random_prime_vec(g, fp, 3)).collect();
        if !fp.is_zero(&Matrix::from_rows(fp, 3, &rows).det()) {
            return rows;
        }
    }
}

/// Block-diagonal chart `(L, M) = (H_L (1, x), H_M (1, y))` applied to polynomials in six variables.
fn to_chart(fp: &PrimeField, p: &Poly<PrimeField>, hl: &[Vec<u64>], hm: &[Vec<u64>]) -> Poly<PrimeField> {
    let mut a = vec![vec![0u64; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = hl[i][j];
            a[3 + i][3 + j] = hm[i][j];
        }
    }
    p.linear_substitute(&a, 6).specialize(3, &fp.one()).specialize(0, &fp.one())
}

/// Exact counts for the mutual-incidence system of a net of cubics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LondonCount {
    pub prime: u64,
    pub seed: u64,
    pub common: usize,
    pub united: usize,
    pub offdiag: usize,
    pub hexahedra: usize,
}

fn reduce_net(lambda: &FormSystem<Rationals>, fp: &PrimeField) -> Result<FormSystem<PrimeField>> {
    let lp = crate::random::reduce_system(lambda, fp)
        .ok_or_else(|| Error::Degenerate("the net does not survive reduction mod p".into()))?;
    for i in 0..=3 {
        let expect = expected_perp_dim(2, 3, 3, i64::from(i))?;
        if perp_space(&lp, i).dim() != expect {
            return Err(Error::Degenerate(format!("perp space in degree {i} is not general mod p")));
        }
    }
    Ok(lp)
}

/// Counts over `F_p`: common points of `T` and `T⁻¹`, those on the diagonal,
/// and the number of hexahedra `(common − united) / 30`.
pub fn london_count(lambda: &FormSystem<Rationals>, p: u64, seed: u64) -> Result<LondonCount> {
    check_shape(lambda, Quadruple { n: 2, d: 3, r: 3, s: 6 })?;
    let fp = PrimeField::new(p)?;
    let lp = reduce_net(lambda, &fp)?;
    let e = london_curve_E(&lp)?;
    let alpha = london_alpha_map(&lp, &e)?;
    let mut base = vec![embed(e.poly(), 0), embed(e.poly(), 3)];
    for section in &alpha {
        base.push(psi_poly(section, 0, 3));
        base.push(psi_poly(section, 3, 0));
    }
    let minors: Vec<Poly<PrimeField>> = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| {
            let v = |k: usize| Poly::var(&fp, 6, k);
            v(i).mul(&v(3 + j)).sub(&v(j).mul(&v(3 + i)))
        })
        .collect();
    let mut g = rng(seed);
    let mut last = None;
    for _ in 0..3 {
        let (hl, hm) = (random_chart(&fp, &mut g), random_chart(&fp, &mut g));
        let gens: Vec<_> = base.iter().map(|q| to_chart(&fp, q, &hl, &hm)).collect();
        let common = quotient_dimension(&fp, 4, &gens)?;
        let mut with_diag = gens.clone();
        with_diag.extend(minors.iter().map(|q| to_chart(&fp, q, &hl, &hm)));
        let united = quotient_dimension(&fp, 4, &with_diag)?;
        let offdiag = common - united;
        let count = LondonCount { prime: p, seed, common, united, offdiag, hexahedra: offdiag / 30 };
        if offdiag % 30 == 0 {
            return Ok(count);
        }
        last = Some(count);
    }
    let c = last.unwrap();
    Err(Error::Degenerate(format!("{} off-diagonal points is not a multiple of 30", c.offdiag)))
}

/// A point of `E(F_p)` on a random line, by search over the line.
fn point_on_curve(fp: &PrimeField, e: &Poly<PrimeField>, g: &mut Rng64) -> Vec<u64> {
    loop {
        let (c, d) = (random_prime_vec(g, fp, 3), random_prime_vec(g, fp, 3));
        let rows: Vec<Vec<u64>> = (0..3).map(|i| vec![c[i], d[i]]).collect();
        let uni = e.linear_substitute(&rows, 2).specialize(0, &fp.one());
        for s in 0..fp.modulus() {
            if fp.is_zero(&uni.eval(&[s])) {
                return (0..3).map(|i| fp.add(&c[i], &fp.mul(&s, &d[i]))).collect();
            }
        }
    }
}

/// Degrees of `T` over `F_p`: the number of `M` with `(L, M) ∈ T` for a
/// random `L ∈ E`, and of `L` with `(L, M) ∈ T` for a random `M ∈ E`.
pub fn t_degree(lambda: &FormSystem<Rationals>, p: u64, seed: u64) -> Result<(usize, usize)> {
    let fp = PrimeField::new(p)?;
    let lp = reduce_net(lambda, &fp)?;
    let e = london_curve_E(&lp)?;
    let alpha = london_alpha_map(&lp, &e)?;
    let mut g = rng(seed);
    let quads = monomials_of_degree(3, 2);
    let chart = |poly: &Poly<PrimeField>, h: &[Vec<u64>]| poly.linear_substitute(h, 3).specialize(0, &fp.one());
    let l = point_on_curve(&fp, e.poly(), &mut g);
    let conic = london_alpha(&lp, &l)?;
    let h = random_chart(&fp, &mut g);
    let forward = quotient_dimension(&fp, 2, &[chart(e.poly(), &h), chart(conic.poly(), &h)])?;
    let m = point_on_curve(&fp, e.poly(), &mut g);
    let mvals: Vec<u64> = quads.iter().map(|b| Poly::term(&fp, 3, *b, fp.one()).eval(&m)).collect();
    let mut back = vec![chart(e.poly(), &h)];
    for section in &alpha {
        let c = section.iter().zip(&mvals).fold(Poly::zero(&fp, 3), |acc, (a, v)| acc.add(&a.scale(v)));
        back.push(chart(&c, &h));
    }
    let backward = quotient_dimension(&fp, 2, &back)?;
    Ok((forward, backward))
}

/// An ordered pair `(L, M)` of distinct points of `E` with `M ∈ α(L)` and `L ∈ α(M)`.
#[derive(Clone, Debug, Serialize)]
pub struct MutualPair {
    pub l: Vec<CoeffJson>,
    pub m: Vec<CoeffJson>,
    pub residual: f64,
}

/// A validated hexahedron with the checks specific to nets of cubics.
#[derive(Clone, Debug)]
pub struct Hexahedron {
    pub result: Verified,
    /// Ordered pairs of distinct vertices that solve the mutual-incidence system.
    pub mutual_pairs: usize,
    /// Whether `l α(L), l′ α(L), m α(M), m′ α(M)` annihilate `Λ`.
    pub generators_annihilate: bool,
}

/// The curve, the map `α` and the numerically exhibited hexahedra of a net of cubics.
#[derive(Clone, Debug)]
pub struct LondonData {
    pub lambda: FormSystem<Rationals>,
    pub e: GradedForm<Rationals>,
    /// Three sections `α_β^{(k)}`, cubic in `L`.
    pub alpha: Vec<Vec<Poly<Rationals>>>,
    pub pairs: Vec<MutualPair>,
    pub hexahedra: Vec<Hexahedron>,
    /// Candidates that failed validation, with the reason.
    pub failures: Vec<String>,
    pub method: String,
    pub starts: usize,
    pub seed: u64,
}

impl LondonData {
    pub fn to_json(&self) -> Value {
        json!({
            "E": crate::poly::format_poly(self.e.poly(), "a"),
            "method": self.method,
            "seed": self.seed,
            "starts": self.starts,
            "pairs_found": self.pairs.len(),
            "hexahedra": self.hexahedra.iter().map(|h| json!({
                "polyhedron": PolyhedronJson::from(&h.result),
                "mutual_pairs": h.mutual_pairs,
                "generators_annihilate": h.generators_annihilate,
            })).collect::<Vec<_>>(),
            "failures": self.failures,
        })
    }
}

/// The curve `E` and the map `α` over the rationals.
pub fn london_data(lambda: &FormSystem<Rationals>) -> Result<LondonData> {
    check_shape(lambda, Quadruple { n: 2, d: 3, r: 3, s: 6 })?;
    if perp_space(lambda, 2).dim() != 0 {
        return Err(Error::Degenerate("the net has quadrics in its perp space".into()));
    }
    let e = london_curve_E(lambda)?;
    let alpha = london_alpha_map(lambda, &e)?;
    Ok(LondonData {
        lambda: lambda.clone(),
        e,
        alpha,
        pairs: Vec::new(),
        hexahedra: Vec::new(),
        failures: Vec::new(),
        method: "newton-sampling".into(),
        starts: 0,
        seed: 0,
    })
}

/// Complex evaluation of `E`, `α` and their derivatives. Newton runs on a
/// random combination of the three sections; residuals use all of them.
struct Numeric {
    e: Poly<ComplexDouble>,
    de: Vec<Poly<ComplexDouble>>,
    sections: Vec<Vec<Poly<ComplexDouble>>>,
    alpha: Vec<Poly<ComplexDouble>>,
    dalpha: Vec<Vec<Poly<ComplexDouble>>>,
    quads: Vec<Monomial>,
}

impl Numeric {
    fn new(data: &LondonData, g: &mut Rng64) -> Self {
        let cc = ComplexDouble::default();
        let scale = |ps: &[Poly<Rationals>]| -> Vec<Poly<ComplexDouble>> {
            let cs: Vec<Poly<ComplexDouble>> = ps.iter().map(|p| p.to_complex(&cc)).collect();
            let m = cs.iter().map(|p| p.max_coeff()).fold(0.0, f64::max);
            cs.iter().map(|p| p.scale(&C::new(1.0 / m, 0.0))).collect()
        };
        let e = scale(std::slice::from_ref(data.e.poly())).remove(0);
        let sections: Vec<Vec<Poly<ComplexDouble>>> = data.alpha.iter().map(|s| scale(s)).collect();
        let w = random_complex(g, sections.len());
        let alpha: Vec<Poly<ComplexDouble>> = (0..6)
            .map(|b| sections.iter().zip(&w).fold(Poly::zero(&cc, 3), |acc, (s, c)| acc.add(&s[b].scale(c))))
            .collect();
        Numeric {
            de: (0..3).map(|k| e.derivative(k)).collect(),
            dalpha: alpha.iter().map(|a| (0..3).map(|k| a.derivative(k)).collect()).collect(),
            e,
            sections,
            alpha,
            quads: monomials_of_degree(3, 2),
        }
    }

    /// The section with the largest value at `l`, as coordinates of a conic.
    fn alpha_at(&self, l: &[C]) -> Vec<C> {
        self.sections
            .iter()
            .map(|s| s.iter().map(|a| a.eval(l)).collect::<Vec<C>>())
            .max_by(|a, b| vec_norm(a).total_cmp(&vec_norm(b)))
            .expect("three sections")
    }

    fn mono(m: &Monomial, x: &[C]) -> C {
        (0..3).map(|k| x[k].powu(m.exp(k))).product()
    }

    fn dmono(m: &Monomial, x: &[C], i: usize) -> C {
        let e = m.exp(i);
        if e == 0 {
            return C::new(0.0, 0.0);
        }
        (0..3).map(|k| if k == i { x[k].powu(e - 1) * e as f64 } else { x[k].powu(m.exp(k)) }).product()
    }

    fn psi(&self, l: &[C], m: &[C]) -> C {
        self.alpha.iter().zip(&self.quads).map(|(a, b)| a.eval(l) * Self::mono(b, m)).sum()
    }

    fn conic(&self, l: &[C]) -> GradedForm<ComplexDouble> {
        let coords = self.alpha_at(l);
        GradedForm::from_coords(&ComplexDouble::default(), Side::R, 3, 2, &coords)
    }

    fn curve(&self) -> GradedForm<ComplexDouble> {
        GradedForm::new(Side::R, 3, self.e.clone()).expect("cubic")
    }

    fn residual(&self, l: &[C], m: &[C]) -> f64 {
        let unit = |x: &[C]| {
            let n = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            x.iter().map(|c| c / n).collect::<Vec<_>>()
        };
        let (l, m) = (unit(l), unit(m));
        let incidence = |a: &[C], b: &[C]| {
            let coords = self.alpha_at(a);
            let v: C = coords.iter().zip(&self.quads).map(|(c, q)| c * Self::mono(q, b)).sum();
            v.norm() / vec_norm(&coords)
        };
        [self.e.eval(&l).norm(), self.e.eval(&m).norm(), incidence(&l, &m), incidence(&m, &l)].into_iter().fold(0.0, f64::max)
    }

    fn newton(&self, l0: &[C], m0: &[C]) -> Option<(Vec<C>, Vec<C>)> {
        let cl: Vec<C> = {
            let n: f64 = l0.iter().map(|c| c.norm_sqr()).sum();
            l0.iter().map(|c| c.conj() / n).collect()
        };
        let cm: Vec<C> = {
            let n: f64 = m0.iter().map(|c| c.norm_sqr()).sum();
            m0.iter().map(|c| c.conj() / n).collect()
        };
        let mut x: Vec<C> = l0.iter().chain(m0).copied().collect();
        for _ in 0..60 {
            let (l, m) = (&x[..3], &x[3..]);
            let mut f = DVector::from_element(6, C::new(0.0, 0.0));
            let mut j = DMatrix::from_element(6, 6, C::new(0.0, 0.0));
            f[0] = self.e.eval(l);
            f[1] = self.e.eval(m);
            f[2] = self.psi(l, m);
            f[3] = self.psi(m, l);
            f[4] = cl.iter().zip(l).map(|(a, b)| a * b).sum::<C>() - 1.0;
            f[5] = cm.iter().zip(m).map(|(a, b)| a * b).sum::<C>() - 1.0;
            for k in 0..3 {
                j[(0, k)] = self.de[k].eval(l);
                j[(1, 3 + k)] = self.de[k].eval(m);
                let mut dl = C::new(0.0, 0.0);
                let mut dm = C::new(0.0, 0.0);
                let mut dl2 = C::new(0.0, 0.0);
                let mut dm2 = C::new(0.0, 0.0);
                for (b, beta) in self.quads.iter().enumerate() {
                    dl += self.dalpha[b][k].eval(l) * Self::mono(beta, m);
                    dm += self.alpha[b].eval(l) * Self::dmono(beta, m, k);
                    dm2 += self.dalpha[b][k].eval(m) * Self::mono(beta, l);
                    dl2 += self.alpha[b].eval(m) * Self::dmono(beta, l, k);
                }
                j[(2, k)] = dl;
                j[(2, 3 + k)] = dm;
                j[(3, k)] = dl2;
                j[(3, 3 + k)] = dm2;
                j[(4, k)] = cl[k];
                j[(5, 3 + k)] = cm[k];
            }
            let step = j.lu().solve(&(-f))?;
            for (xi, s) in x.iter_mut().zip(step.iter()) {
                *xi += s;
            }
            let xn: f64 = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if !xn.is_finite() || xn > 1e8 {
                return None;
            }
            if step.norm() <= 1e-14 * xn {
                break;
            }
        }
        let (l, m) = (x[..3].to_vec(), x[3..].to_vec());
        (self.residual(&l, &m) <= PAIR_TOL).then_some((l, m))
    }
}

fn vec_norm(x: &[C]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn random_complex(g: &mut Rng64, n: usize) -> Vec<C> {
    (0..n).map(|_| C::new(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0))).collect()
}

/// Points of `E` on a random line.
fn points_on_line(num: &Numeric, g: &mut Rng64) -> Vec<Vec<C>> {
    let (c, d) = (random_complex(g, 3), random_complex(g, 3));
    let rows: Vec<Vec<C>> = (0..3).map(|i| vec![c[i], d[i]]).collect();
    let uni = num.e.linear_substitute(&rows, 2).specialize(0, &C::new(1.0, 0.0));
    let mut coeffs = vec![C::new(0.0, 0.0); 4];
    for (m, v) in uni.terms() {
        coeffs[m.exp(0) as usize] = *v;
    }
    univariate_roots(&coeffs).into_iter().map(|s| (0..3).map(|i| c[i] + s * d[i]).collect()).collect()
}

fn build_hexahedron(
    num: &Numeric,
    lam_c: &FormSystem<ComplexDouble>,
    l: &[C],
    m: &[C],
) -> Result<Hexahedron> {
    let rep = intersect_plane_curves(&num.conic(l), &num.conic(m))?;
    if rep.points.len() != 4 {
        return Err(Error::Degenerate(format!("conics meet in {} points", rep.points.len())));
    }
    let mut pts = vec![l.to_vec(), m.to_vec()];
    pts.extend(rep.points.points().iter().cloned());
    let z = PointSet::new(&ComplexDouble::default(), 2, pts)?;
    let result = verify_candidate(z, lam_c)?;
    let verts = result.polyhedron.points.points().to_vec();
    let mut mutual = 0;
    for i in 0..6 {
        for j in 0..6 {
            if i != j && num.residual(&verts[i], &verts[j]) <= 1e-8 {
                mutual += 1;
            }
        }
    }
    let cc = ComplexDouble::default();
    let mut annihilate = true;
    for v in [l, m] {
        let conic = num.conic(v);
        let row = DMatrix::from_row_slice(1, 3, v);
        for perp in complex_nullspace(&row, 1e-10) {
            let op = linear_operator(&cc, &perp).mul(&conic)?;
            annihilate &= annihilates(&op, lam_c)?;
        }
    }
    Ok(Hexahedron { result, mutual_pairs: mutual, generators_annihilate: annihilate })
}

/// Hexahedra of a net of cubics found numerically: Newton's method on the
/// mutual-incidence system started from points `(L, M)` with `M ∈ T(L)`,
/// then the reconstruction `Z = {L, M} ∪ (α(L) ∩ α(M))` for each new pair.
pub fn london_hexahedra(lambda: &FormSystem<Rationals>, seed: u64, starts: usize) -> Result<LondonData> {
    let mut data = london_data(lambda)?;
    let mut g = rng(seed);
    let num = Numeric::new(&data, &mut g);
    let lam_c = complex_system(lambda);
    let curve = num.curve();
    let mut pairs: Vec<(Vec<C>, Vec<C>)> = Vec::new();
    let mut sampled = 0;
    while sampled < starts {
        for l in points_on_line(&num, &mut g) {
            if sampled >= starts {
                break;
            }
            sampled += 1;
            let Ok(t) = intersect_plane_curves(&curve, &num.conic(&l)) else { continue };
            for m in t.points.points() {
                if projective_distance(&l, m) < 1e-6 {
                    continue;
                }
                let Some((l1, m1)) = num.newton(&l, m) else { continue };
                if projective_distance(&l1, &m1) < 1e-6 {
                    continue;
                }
                let known = pairs.iter().any(|(a, b)| projective_distance(a, &l1) < 1e-6 && projective_distance(b, &m1) < 1e-6);
                if known {
                    continue;
                }
                let explained = data.hexahedra.iter().any(|h| {
                    let z = &h.result.polyhedron.points;
                    z.position(&l1).is_some() && z.position(&m1).is_some()
                });
                pairs.push((l1.clone(), m1.clone()));
                if explained {
                    continue;
                }
                match build_hexahedron(&num, &lam_c, &l1, &m1) {
                    Ok(h) if h.result.verification.passed() => {
                        if !data.hexahedra.iter().any(|x| x.result.polyhedron.points.same_set(&h.result.polyhedron.points)) {
                            data.hexahedra.push(h);
                        }
                    }
                    Ok(h) => data.failures.push(format!("candidate failed verification: {:?}", h.result.verification)),
                    Err(e) => data.failures.push(e.to_string()),
                }
            }
        }
    }
    data.pairs = pairs
        .iter()
        .map(|(l, m)| MutualPair { l: complex_vec_json(l), m: complex_vec_json(m), residual: num.residual(l, m) })
        .collect();
    data.starts = sampled;
    data.seed = seed;
    Ok(data)
}

/// A general net inside the span of the six cubes `x₀³, x₁³, x₂³,
/// (x₀+x₁+x₂)³, (x₀−x₁+x₂)³, (x₀−2x₁+3x₂)³`.
pub fn six_cube_net(seed: u64) -> Result<FormSystem<Rationals>> {
    let f = Rationals;
    let lines: [[i64; 3]; 6] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, -1, 1], [1, -2, 3]];
    let cubes: Vec<GradedForm<Rationals>> = lines
        .iter()
        .map(|l| crate::apolarity::power_form(&f, &l.iter().map(|&x| f.from_i64(x)).collect::<Vec<BigRational>>(), 3))
        .collect::<Result<_>>()?;
    let mut g = rng(seed);
    for _ in 0..crate::random::MAX_RESAMPLES {
        let basis: Vec<GradedForm<Rationals>> = (0..3)
            .map(|_| {
                cubes.iter().fold(GradedForm::zero(&f, Side::S, 3, 3), |acc, c| {
                    acc.add(&c.scale(&f.from_i64(g.gen_range(-9..=9)))).unwrap()
                })
            })
            .collect();
        if let Ok(sys) = FormSystem::new(basis) {
            if perp_space(&sys, 2).dim() == 0 {
                return Ok(sys);
            }
        }
    }
    Err(Error::Degenerate("no general net in the span of the cubes".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_general_system;

    fn net(seed: u64) -> FormSystem<Rationals> {
        random_general_system(&mut rng(seed), 2, 3, 3).unwrap()
    }

    #[test]
    fn curve_is_a_smooth_cubic() {
        let lam = net(1);
        let e = london_curve_E(&lam).unwrap();
        assert_eq!(e.degree(), 3);
        assert_eq!(perp_space(&lam, 2).dim(), 0);
    }

    #[test]
    fn counts_mod_p() {
        let c = london_count(&net(2), 32003, 0).unwrap();
        assert_eq!((c.common, c.united, c.offdiag, c.hexahedra), (72, 12, 60, 2));
        assert_eq!(t_degree(&net(2), 32003, 1).unwrap(), (6, 6));
    }

    #[test]
    fn six_cubes_give_the_same_counts() {
        let lam = six_cube_net(0).unwrap();
        let c = london_count(&lam, 32003, 0).unwrap();
        assert_eq!((c.common, c.united, c.hexahedra), (72, 12, 2));
    }

    #[test]
    fn numeric_hexahedra() {
        let lam = net(3);
        let data = london_hexahedra(&lam, 0, 40).unwrap();
        assert_eq!(data.hexahedra.len(), 2, "{:?}", data.failures);
        let num = Numeric::new(&data, &mut rng(0));
        let lam_c = complex_system(&lam);
        for h in &data.hexahedra {
            assert!(h.generators_annihilate);
            assert_eq!(h.mutual_pairs, 30);
            assert!(h.result.verification.passed());
            let verts = h.result.polyhedron.points.points();
            for (i, v) in verts.iter().enumerate() {
                let conic = london_alpha(&lam_c, v).unwrap();
                let scale = conic.max_coeff();
                for (k, w) in verts.iter().enumerate() {
                    if k != i {
                        assert!(conic.eval(w).norm() <= 1e-7 * scale);
                    }
                }
                assert_eq!(f23_rank(&lam_c, &conic).unwrap(), 1);
                assert!(projective_distance(&num.conic(v).coords(), &conic.coords()) < 1e-7);
            }
        }
    }

    #[test]
    fn f13_has_rank_five_on_the_curve() {
        let lam = net(4);
        let data = london_data(&lam).unwrap();
        let num = Numeric::new(&data, &mut rng(1));
        let lam_c = complex_system(&lam);
        let mut g = rng(9);
        let mut seen = 0;
        while seen < 10 {
            for l in points_on_line(&num, &mut g) {
                let info = f13_matrix(&lam_c, &l).unwrap().rank_info();
                assert_eq!(info.rank, 5);
                let t = intersect_plane_curves(&num.curve(), &num.conic(&l)).unwrap();
                assert_eq!(t.points.len(), 6);
                seen += 1;
            }
        }
    }
}

