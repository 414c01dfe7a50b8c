use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use serde_json::{json, Value};

use super::base_locus::check_shape;
use super::{complex_system, normalized_error, solve_reduced, verify_candidate, PolyhedronJson, Verified};
use crate::apolarity::{apolar_pair, linear_operator, FormSystem};
use crate::error::{Error, Result};
use crate::field::{rational_to_f64, ComplexDouble, Field, Rationals};
use crate::linalg::{Matrix, Subspace};
use crate::monomial::forms_dim;
use crate::points::{associated_point, AssociatedCase, PointSet, Quadruple};
use crate::poly::{rational_vec_to_complex, GradedForm, Side};
use crate::random::rng;
use crate::solve::SolveSummary;

fn var<F: Field>(field: &F, i: usize) -> GradedForm<F> {
    let mut e = vec![field.zero(); 3];
    e[i] = field.one();
    linear_operator(field, &e)
}

/// A 2×2 block `[[q₁, q₂], [q₃, q₄]]` of quadratic operators in three
/// variables. The derived forms `θ = u₁q₁ − u₀q₃`, `θ′ = u₁q₂ − u₀q₄` and
/// `ω = q₁q₄ − q₂q₃` are recomputed on every call.
#[derive(Clone, Debug, PartialEq)]
pub struct HBMatrix<F: Field> {
    q: [GradedForm<F>; 4],
}

impl<F: Field> HBMatrix<F> {
    pub fn new(q: [GradedForm<F>; 4]) -> Result<Self> {
        for f in &q {
            if f.side() != Side::R {
                return Err(Error::SideMismatch);
            }
            if f.nvars() != 3 {
                return Err(Error::NvarsMismatch(3, f.nvars()));
            }
            if f.degree() != 2 {
                return Err(Error::NotHomogeneous(2));
            }
        }
        Ok(HBMatrix { q })
    }

    /// The block with columns `(q₁, q₃)` and `(q₂, q₄)`.
    pub fn from_columns(c1: [GradedForm<F>; 2], c2: [GradedForm<F>; 2]) -> Result<Self> {
        let [q1, q3] = c1;
        let [q2, q4] = c2;
        Self::new([q1, q2, q3, q4])
    }

    pub fn entries(&self) -> &[GradedForm<F>; 4] {
        &self.q
    }

    fn field(&self) -> &F {
        self.q[0].field()
    }

    pub fn theta(&self) -> GradedForm<F> {
        let f = self.field();
        var(f, 1).mul(&self.q[0]).unwrap().sub(&var(f, 0).mul(&self.q[2]).unwrap()).unwrap()
    }

    pub fn theta_prime(&self) -> GradedForm<F> {
        let f = self.field();
        var(f, 1).mul(&self.q[1]).unwrap().sub(&var(f, 0).mul(&self.q[3]).unwrap()).unwrap()
    }

    pub fn omega(&self) -> GradedForm<F> {
        self.q[0].mul(&self.q[3]).unwrap().sub(&self.q[1].mul(&self.q[2]).unwrap()).unwrap()
    }

    /// `N g` for `g = [[α, β], [γ, δ]]`.
    pub fn right_mul(&self, g: [[F::Elem; 2]; 2]) -> Self {
        let [q1, q2, q3, q4] = &self.q;
        let comb = |x: &GradedForm<F>, y: &GradedForm<F>, a: &F::Elem, b: &F::Elem| x.scale(a).add(&y.scale(b)).unwrap();
        HBMatrix {
            q: [
                comb(q1, q2, &g[0][0], &g[1][0]),
                comb(q1, q2, &g[0][1], &g[1][1]),
                comb(q3, q4, &g[0][0], &g[1][0]),
                comb(q3, q4, &g[0][1], &g[1][1]),
            ],
        }
    }

    /// `N + [[a u₀, b u₀], [a u₁, b u₁]]` for linear operators `a, b`.
    pub fn add_trivial(&self, a: &GradedForm<F>, b: &GradedForm<F>) -> Result<Self> {
        let f = self.field();
        let (u0, u1) = (var(f, 0), var(f, 1));
        let [q1, q2, q3, q4] = &self.q;
        Self::new([
            q1.add(&a.mul(&u0)?)?,
            q2.add(&b.mul(&u0)?)?,
            q3.add(&a.mul(&u1)?)?,
            q4.add(&b.mul(&u1)?)?,
        ])
    }
}

/// Matrix of a linear map given by its action on standard basis vectors.
fn map_matrix(rows: usize, cols: usize, f: impl Fn(&[BigRational]) -> Vec<BigRational>) -> Matrix<Rationals> {
    let columns: Vec<Vec<BigRational>> = (0..cols)
        .map(|j| {
            let mut e = vec![Rationals.zero(); cols];
            e[j] = Rationals.one();
            f(&e)
        })
        .collect();
    Matrix::from_columns(&Rationals, rows, &columns)
}

fn quadric(c: &[BigRational]) -> GradedForm<Rationals> {
    GradedForm::from_coords(&Rationals, Side::R, 3, 2, c)
}

fn apply_all(op: &GradedForm<Rationals>, lambda: &FormSystem<Rationals>) -> Vec<BigRational> {
    lambda.basis().iter().flat_map(|f| apolar_pair(op, f).expect("sides match").coords()).collect()
}

/// Extends `fixed` by vectors of `pool` (in order) until the span has `target` dimensions.
fn complement(fixed: &[Vec<BigRational>], pool: &[Vec<BigRational>], target: usize) -> Vec<Vec<BigRational>> {
    let ambient = pool.first().map_or(0, |v| v.len());
    let mut acc = fixed.to_vec();
    let mut out = Vec::new();
    for v in pool {
        if acc.len() == target {
            break;
        }
        let mut trial = acc.clone();
        trial.push(v.clone());
        if Matrix::from_rows(&Rationals, ambient, &trial).rank() == trial.len() {
            acc = trial;
            out.push(v.clone());
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct HbReport {
    pub t: Vec<BigRational>,
    pub solution_dim: usize,
    pub trivial_contained: bool,
    pub solve: SolveSummary,
    pub result: Verified,
}

impl HbReport {
    pub fn passed(&self) -> bool {
        self.solution_dim == 6 && self.trivial_contained && self.result.verification.passed()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": Quadruple { n: 2, d: 3, r: 4, s: 7 },
            "t": self.t.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "solution_dim": self.solution_dim,
            "trivial_contained": self.trivial_contained,
            "solve": self.solve,
            "polyhedron": PolyhedronJson::from(&self.result),
        })
    }
}

/// Polar heptagons of a web of plane cubics: the 2-plane cut out by the
/// twelve conditions `(u_i q_j − u_j q_i)∘Λ = 0` on quadric triples, modulo the
/// trivial triples `(a u₀, a u₁, a u₂)`, parameterizes them; `t` picks the point.
pub fn hb_plane_construct_2347(lambda: &FormSystem<Rationals>, t: &[BigRational]) -> Result<HbReport> {
    check_shape(lambda, Quadruple { n: 2, d: 3, r: 4, s: 7 })?;
    if t.len() != 3 || t.iter().all(|c| Rationals.is_zero(c)) {
        return Err(Error::InvalidArgument("parameter must be a nonzero point of P^2".into()));
    }
    let f = Rationals;
    let u: Vec<_> = (0..3).map(|i| var(&f, i)).collect();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let minors = |v: &[BigRational]| -> Vec<GradedForm<Rationals>> {
        let q: Vec<_> = (0..3).map(|k| quadric(&v[6 * k..6 * k + 6])).collect();
        pairs.iter().map(|&(i, j)| u[i].mul(&q[j]).unwrap().sub(&u[j].mul(&q[i]).unwrap()).unwrap()).collect()
    };
    let eqs = map_matrix(12, 18, |v| minors(v).iter().flat_map(|m| apply_all(m, lambda)).collect());
    let null = eqs.nullspace();
    let solution_dim = null.len();
    if solution_dim != 6 {
        return Err(Error::Degenerate(format!("solution space has dimension {solution_dim}, expected 6")));
    }
    let trivial: Vec<Vec<BigRational>> =
        (0..3).map(|a| (0..3).flat_map(|k| u[a].mul(&u[k]).unwrap().coords()).collect()).collect();
    let space = Subspace::from_basis(&f, 18, null.clone());
    let trivial_contained = space.contains(&Subspace::span(&f, 18, trivial.clone()));
    if !trivial_contained {
        return Err(Error::Degenerate("trivial triples are not solutions".into()));
    }
    let comp = complement(&trivial, &null, 6);
    let v: Vec<BigRational> = (0..18).map(|i| (0..3).fold(f.zero(), |acc, k| &acc + &t[k] * &comp[k][i])).collect();
    let gens = minors(&v);
    let report = solve_reduced(&gens, 7, "maximal minors")?;
    let result = verify_candidate(report.points.clone(), &complex_system(lambda))?;
    Ok(HbReport { t: t.to_vec(), solution_dim, trivial_contained, solve: SolveSummary::from(&report), result })
}

#[derive(Clone, Debug)]
pub struct Hb2428Report {
    pub point: Vec<BigRational>,
    pub seed: u64,
    /// `(V₁, V₂, V₃, W)`.
    pub dims: [usize; 4],
    /// The block over the transformed coordinates where `P = [0, 0, 1]`.
    pub matrix: HBMatrix<Rationals>,
    pub solve: SolveSummary,
    pub result: Verified,
    pub associated: Vec<Complex64>,
    pub associated_error: f64,
}

impl Hb2428Report {
    pub fn passed(&self) -> bool {
        self.result.verification.passed() && self.associated_error <= 1e-6
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": Quadruple { n: 2, d: 4, r: 2, s: 8 },
            "point": self.point.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "seed": self.seed,
            "dims": {"V1": self.dims[0], "V2": self.dims[1], "V3": self.dims[2], "W": self.dims[3]},
            "solve": self.solve,
            "polyhedron": PolyhedronJson::from(&self.result),
            "associated": crate::json::complex_vec_json(&self.associated),
            "associated_error": self.associated_error,
        })
    }
}

/// Integer matrix with last column `P`, invertible.
fn chart_with_last_column(p: &[BigRational], seed: u64) -> Matrix<Rationals> {
    let mut g = rng(seed);
    loop {
        let mut rows: Vec<Vec<BigRational>> = (0..3)
            .map(|_| (0..2).map(|_| Rationals.from_i64(g.gen_range(-3..=3))).collect())
            .collect();
        for (r, c) in rows.iter_mut().zip(p) {
            r.push(c.clone());
        }
        let h = Matrix::from_rows(&Rationals, 3, &rows);
        if !Rationals.is_zero(&h.det()) {
            return h;
        }
    }
}

/// An octagon of a pencil of plane quartics whose associated point is `P`.
///
/// In coordinates where `P = [0, 0, 1]`, the pairs `(q₁, q₃)` with `θ∘Λ = 0`
/// form a 6-dimensional space containing the trivial pairs `(a u₀, a u₁)`.
/// On the 3-dimensional quotient the forms `ω(·,·)∘F` are alternating, and
/// the plane spanned by their kernels is isotropic for both forms of the
/// pencil; its basis gives the two columns of `N`. The seed picks the chart
/// and the complement of the trivial pairs; the output does not depend on it.
pub fn inverse_associated_2428(lambda: &FormSystem<Rationals>, p: &[BigRational], seed: u64) -> Result<Hb2428Report> {
    check_shape(lambda, Quadruple { n: 2, d: 4, r: 2, s: 8 })?;
    if p.len() != 3 || p.iter().all(|c| Rationals.is_zero(c)) {
        return Err(Error::InvalidArgument("P must be a nonzero point of P^2".into()));
    }
    let f = Rationals;
    let h = chart_with_last_column(p, seed);
    let h_inv_t = h.inverse()?.transpose();
    let lam = lambda.linear_substitute(&h_inv_t.row_vecs());
    let u: Vec<_> = (0..3).map(|i| var(&f, i)).collect();
    let nq = forms_dim(3, 2);
    let theta_of = |v: &[BigRational]| -> GradedForm<Rationals> {
        u[1].mul(&quadric(&v[..nq])).unwrap().sub(&u[0].mul(&quadric(&v[nq..])).unwrap()).unwrap()
    };
    let eqs = map_matrix(2 * 3, 2 * nq, |v| apply_all(&theta_of(v), &lam));
    let null = eqs.nullspace();
    if null.len() != 6 {
        return Err(Error::Degenerate(format!("theta conditions leave {} dimensions, expected 6", null.len())));
    }
    let trivial: Vec<Vec<BigRational>> = (0..3)
        .map(|a| {
            let mut v = u[a].mul(&u[0]).unwrap().coords();
            v.extend(u[a].mul(&u[1]).unwrap().coords());
            v
        })
        .collect();
    if !Subspace::from_basis(&f, 2 * nq, null.clone()).contains(&Subspace::span(&f, 2 * nq, trivial.clone())) {
        return Err(Error::Degenerate("trivial pairs do not satisfy the theta conditions".into()));
    }
    let mut g = rng(seed ^ 0x2428);
    let pool: Vec<Vec<BigRational>> = (0..12)
        .map(|_| {
            let c: Vec<i64> = (0..6).map(|_| g.gen_range(-5..=5)).collect();
            (0..2 * nq).map(|i| null.iter().zip(&c).fold(f.zero(), |acc, (v, &x)| &acc + &v[i] * f.from_i64(x))).collect()
        })
        .collect();
    let e = complement(&trivial, &pool, 6);
    if e.len() != 3 {
        return Err(Error::Degenerate("no complement to the trivial pairs".into()));
    }
    let column = |v: &[BigRational]| [quadric(&v[..nq]), quadric(&v[nq..])];
    let omega = |a: &[BigRational], b: &[BigRational]| HBMatrix::from_columns(column(a), column(b)).unwrap().omega();
    let kernels: Vec<Vec<BigRational>> = lam
        .basis()
        .iter()
        .map(|form| {
            let b = |k: usize, l: usize| apolar_pair(&omega(&e[k], &e[l]), form).unwrap().coords()[0].clone();
            vec![b(1, 2), -b(0, 2), b(0, 1)]
        })
        .collect();
    let cols: Vec<Vec<BigRational>> = kernels
        .iter()
        .map(|w| (0..2 * nq).map(|i| (0..3).fold(f.zero(), |acc, k| &acc + &w[k] * &e[k][i])).collect())
        .collect();
    if Matrix::from_rows(&f, 2 * nq, &cols).rank() < 2 {
        return Err(Error::Degenerate("isotropic kernels coincide".into()));
    }
    let n = HBMatrix::from_columns(column(&cols[0]), column(&cols[1]))?;
    let (theta, theta_p, om) = (n.theta(), n.theta_prime(), n.omega());
    for op in [&theta, &theta_p, &om] {
        if apply_all(op, &lam).iter().any(|c| !f.is_zero(c)) {
            return Err(Error::Degenerate("block does not annihilate the pencil".into()));
        }
    }
    if f.is_zero(&om.eval(&[f.zero(), f.zero(), f.one()])) {
        return Err(Error::Degenerate("omega vanishes at P".into()));
    }
    let report = solve_reduced(&[theta, theta_p, om], 8, "Hilbert-Burch minors")?;
    let hc: Vec<Vec<Complex64>> =
        h.row_vecs().iter().map(|r| r.iter().map(|c| Complex64::new(rational_to_f64(c), 0.0)).collect()).collect();
    let back: Vec<Vec<Complex64>> = report
        .points
        .points()
        .iter()
        .map(|z| (0..3).map(|i| (0..3).map(|j| hc[i][j] * z[j]).sum()).collect())
        .collect();
    let z = PointSet::new(&ComplexDouble::default(), 2, back)?;
    let result = verify_candidate(z, &complex_system(lambda))?;
    let associated = associated_point(&result.polyhedron.points, AssociatedCase::Planar8)?;
    let associated_error = normalized_error(&associated, &rational_vec_to_complex(p));
    Ok(Hb2428Report {
        point: p.to_vec(),
        seed,
        dims: [4 * nq, 2 * null.len(), 2 * trivial.len(), 2 * null.len() - 2 * trivial.len()],
        matrix: n,
        solve: SolveSummary::from(&report),
        result,
        associated,
        associated_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_form, random_general_system, random_rational_vec};

    fn random_block(seed: u64) -> HBMatrix<Rationals> {
        let mut g = rng(seed);
        HBMatrix::new(std::array::from_fn(|_| random_form(&mut g, Side::R, 3, 2))).unwrap()
    }

    #[test]
    fn transformation_laws() {
        let n = random_block(1);
        let mut g = rng(2);
        let r = |g: &mut crate::random::Rng64| Rationals.from_i64(g.gen_range(-7..=7));
        let m = [[r(&mut g), r(&mut g)], [r(&mut g), r(&mut g)]];
        let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
        let ng = n.right_mul(m.clone());
        let (t, tp) = (n.theta(), n.theta_prime());
        assert_eq!(ng.theta(), t.scale(&m[0][0]).add(&tp.scale(&m[1][0])).unwrap());
        assert_eq!(ng.theta_prime(), t.scale(&m[0][1]).add(&tp.scale(&m[1][1])).unwrap());
        assert_eq!(ng.omega(), n.omega().scale(&det));
        let a = random_form(&mut g, Side::R, 3, 1);
        let b = random_form(&mut g, Side::R, 3, 1);
        let nq = n.add_trivial(&a, &b).unwrap();
        let expect = n.omega().sub(&a.mul(&tp).unwrap()).unwrap().add(&b.mul(&t).unwrap()).unwrap();
        assert_eq!(nq.omega(), expect);
        assert_eq!(nq.theta(), t);
        assert_eq!(nq.theta_prime(), tp);
    }

    #[test]
    fn heptagon_from_plane_point() {
        let mut g = rng(21);
        let lam = random_general_system(&mut g, 2, 3, 4).unwrap();
        let t = random_rational_vec(&mut g, 3);
        let rep = hb_plane_construct_2347(&lam, &t).unwrap();
        assert_eq!(rep.result.polyhedron.points.len(), 7);
        assert!(rep.passed(), "{:?}", rep.result.verification);
        let t2 = random_rational_vec(&mut g, 3);
        let rep2 = hb_plane_construct_2347(&lam, &t2).unwrap();
        assert!(!rep.result.polyhedron.points.same_set(&rep2.result.polyhedron.points));
    }

    #[test]
    fn octagon_with_prescribed_point() {
        let mut g = rng(22);
        let lam = random_general_system(&mut g, 2, 4, 2).unwrap();
        let p = random_rational_vec(&mut g, 3);
        let rep = inverse_associated_2428(&lam, &p, 1).unwrap();
        assert_eq!(rep.dims, [24, 12, 6, 6]);
        assert_eq!(rep.result.polyhedron.points.len(), 8);
        assert!(rep.passed(), "{:?} {}", rep.result.verification, rep.associated_error);
        let other = inverse_associated_2428(&lam, &p, 2).unwrap();
        assert!(rep.result.polyhedron.points.same_set(&other.result.polyhedron.points));
    }
}
