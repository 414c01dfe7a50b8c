//! Reduced zero-dimensional schemes: ideal pieces by interpolation,
//! apolarity, Reye decompositions and associated points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::apolarity::{perp_space, power_form, FormSystem};
use crate::error::{Error, Result};
use crate::field::{ComplexDouble, Field, PrimeField, Rationals};
use crate::linalg::{Matrix, Subspace};
use crate::monomial::{binomial, monomials_of_degree};
use crate::poly::{GradedForm, Side};
use crate::solve::{intersect_plane_curves, solve_system_numeric, DEDUPE_TOL};

/// A finite set of distinct points of `P^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<F: Field> {
    field: F,
    n: usize,
    points: Vec<Vec<F::Elem>>,
}

/// Scales a point so its first nonzero coordinate (exact fields) or its
/// largest-modulus coordinate (floating fields) is 1.
pub fn normalize_point<F: Field>(field: &F, p: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let pivot = if field.is_exact() {
        p.iter().position(|c| !field.is_zero(c))?
    } else {
        let (idx, best) = p
            .iter()
            .enumerate()
            .map(|(i, c)| (i, field.magnitude(c)))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return None;
        }
        idx
    };
    let inv = field.inv(&p[pivot])?;
    Some(p.iter().map(|c| field.mul(c, &inv)).collect())
}

/// Projective distance `sqrt(1 − |<a,b>|² / (|a|²|b|²))` between complex points.
pub fn projective_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    (1.0 - dot.norm_sqr() / (na * nb)).max(0.0).sqrt()
}

impl<F: Field> PointSet<F> {
    pub fn new(field: &F, n: usize, points: Vec<Vec<F::Elem>>) -> Result<Self> {
        let mut out: Vec<Vec<F::Elem>> = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != n + 1 {
                return Err(Error::NvarsMismatch(n + 1, p.len()));
            }
            let q = normalize_point(field, &p).ok_or_else(|| Error::InvalidArgument("zero point".into()))?;
            out.push(q);
        }
        let set = PointSet { field: field.clone(), n, points: out };
        if !set.pairwise_distinct() {
            return Err(Error::Degenerate("repeated point".into()));
        }
        Ok(set)
    }

    fn pairwise_distinct(&self) -> bool {
        for i in 0..self.points.len() {
            for j in 0..i {
                if self.same_point(&self.points[i], &self.points[j]) {
                    return false;
                }
            }
        }
        true
    }

    fn same_point(&self, a: &[F::Elem], b: &[F::Elem]) -> bool {
        if self.field.is_exact() {
            a == b
        } else {
            let ac: Vec<Complex64> = a.iter().map(|c| self.field.to_complex(c).unwrap()).collect();
            let bc: Vec<Complex64> = b.iter().map(|c| self.field.to_complex(c).unwrap()).collect();
            projective_distance(&ac, &bc) <= DEDUPE_TOL
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn points(&self) -> &[Vec<F::Elem>] {
        &self.points
    }

    /// Index of a point equal to `p` (projectively, to tolerance for floating fields).
    pub fn position(&self, p: &[F::Elem]) -> Option<usize> {
        let q = normalize_point(&self.field, p)?;
        self.points.iter().position(|x| self.same_point(x, &q))
    }

    pub fn subset(&self, keep: impl Fn(usize) -> bool) -> Self {
        let points = self.points.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, p)| p.clone()).collect();
        PointSet { field: self.field.clone(), n: self.n, points }
    }

    pub fn to_complex(&self) -> PointSet<ComplexDouble> {
        let cc = ComplexDouble::default();
        let points = self
            .points
            .iter()
            .map(|p| normalize_point(&cc, &p.iter().map(|c| self.field.to_complex(c).unwrap()).collect::<Vec<_>>()).unwrap())
            .collect();
        PointSet { field: cc, n: self.n, points }
    }

    pub fn complex_points(&self) -> Vec<Vec<Complex64>> {
        self.points.iter().map(|p| p.iter().map(|c| self.field.to_complex(c).unwrap()).collect()).collect()
    }

    /// Whether the two sets agree as sets of projective points.
    pub fn same_set(&self, other: &PointSet<F>) -> bool {
        self.len() == other.len() && other.points.iter().all(|p| self.position(p).is_some())
    }
}

impl PointSet<Rationals> {
    /// Reduction modulo a prime; `None` if a denominator vanishes or points collide.
    pub fn to_prime(&self, fp: &PrimeField) -> Option<PointSet<PrimeField>> {
        let pts: Option<Vec<Vec<u64>>> =
            self.points.iter().map(|p| p.iter().map(|c| fp.from_rational(c)).collect()).collect();
        PointSet::new(fp, self.n, pts?).ok()
    }
}

/// Values of the monomials of `R_i` at the points, one row per point.
pub fn evaluation_matrix<F: Field>(z: &PointSet<F>, i: u32) -> Matrix<F> {
    let f = z.field();
    let mons = monomials_of_degree(z.n + 1, i);
    let rows: Vec<Vec<F::Elem>> = z
        .points
        .iter()
        .map(|p| {
            mons.iter()
                .map(|m| (0..=z.n).fold(f.one(), |acc, k| f.mul(&acc, &f.pow(&p[k], m.exp(k)))))
                .collect()
        })
        .collect();
    let mut m = Matrix::from_rows(f, mons.len(), &rows);
    if !f.is_exact() {
        // balance row scales so that the rank threshold is meaningful
        for r in 0..m.rows() {
            let norm = m.row(r).iter().map(|c| f.magnitude(c)).fold(0.0, f64::max);
            if norm > 0.0 {
                let s = f.from_complex(Complex64::new(1.0 / norm, 0.0)).unwrap();
                for c in 0..m.cols() {
                    let v = f.mul(m.get(r, c), &s);
                    m.set(r, c, v);
                }
            }
        }
    }
    m
}

/// `(I_Z)_i ⊆ R_i`.
pub fn ideal_piece<F: Field>(z: &PointSet<F>, i: u32) -> Subspace<F> {
    let m = evaluation_matrix(z, i);
    let dim = m.cols();
    if z.is_empty() {
        return Subspace::whole(z.field(), dim);
    }
    Subspace::from_basis(z.field(), dim, m.nullspace())
}

/// The forms spanning `(I_Z)_i`.
pub fn ideal_forms<F: Field>(z: &PointSet<F>, i: u32) -> Vec<GradedForm<F>> {
    ideal_piece(z, i)
        .basis()
        .iter()
        .map(|v| GradedForm::from_coords(z.field(), Side::R, z.n + 1, i, v))
        .collect()
}

pub fn hilbert_function<F: Field>(z: &PointSet<F>, i: u32) -> usize {
    if z.is_empty() {
        return 0;
    }
    evaluation_matrix(z, i).rank()
}

/// `I_Z ⊆ Λ^⊥`, tested in every degree up to `d`.
pub fn is_apolar<F: Field>(z: &PointSet<F>, lambda: &FormSystem<F>) -> Result<bool> {
    if z.n != lambda.n() {
        return Err(Error::NvarsMismatch(z.n + 1, lambda.nvars()));
    }
    for i in 0..=lambda.d() {
        let ideal = ideal_piece(z, i);
        let perp = perp_space(lambda, i);
        if !perp.contains(&ideal) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of solving `F_i = Σ_j c_ij L_j^d`.
#[derive(Clone, Debug)]
pub struct ReyeOutcome<F: Field> {
    pub holds: bool,
    /// `r × s` weights (least squares for floating fields).
    pub weights: Option<Matrix<F>>,
    /// Max-norm of the defect.
    pub residual: f64,
    pub tolerance: f64,
}

/// Relative tolerance on the Reye defect for floating fields.
pub const REYE_TOL: f64 = 1e-8;

pub fn reye_check<F: Field>(z: &PointSet<F>, lambda: &FormSystem<F>) -> Result<ReyeOutcome<F>> {
    if z.n != lambda.n() {
        return Err(Error::NvarsMismatch(z.n + 1, lambda.nvars()));
    }
    let f = z.field();
    let d = lambda.d();
    let cols: Vec<Vec<F::Elem>> =
        z.points.iter().map(|p| power_form(f, p, d).map(|g| g.coords())).collect::<Result<_>>()?;
    let nmon = monomials_of_degree(z.n + 1, d).len();
    let a = Matrix::from_columns(f, nmon, &cols);
    let tolerance = if f.is_exact() { 0.0 } else { REYE_TOL * lambda.max_coeff() };
    let mut weights = Matrix::zeros(f, lambda.r(), z.len());
    let mut residual: f64 = 0.0;
    for (i, form) in lambda.basis().iter().enumerate() {
        let target = form.coords();
        let Some(c) = a.solve(&target) else {
            return Ok(ReyeOutcome { holds: false, weights: None, residual: f64::INFINITY, tolerance });
        };
        let image = a.mul_vec(&c);
        for (x, y) in image.iter().zip(&target) {
            residual = residual.max(f.magnitude(&f.sub(x, y)));
        }
        for (j, v) in c.into_iter().enumerate() {
            weights.set(i, j, v);
        }
    }
    Ok(ReyeOutcome { holds: residual <= tolerance, weights: Some(weights), residual, tolerance })
}

/// A polar polyhedron: points with the weights of the decomposition.
#[derive(Clone, Debug)]
pub struct PolarPolyhedron<F: Field> {
    pub points: PointSet<F>,
    pub weights: Matrix<F>,
    pub residual: f64,
}

impl<F: Field> PolarPolyhedron<F> {
    /// Validates the decomposition of `Λ` over `Z`.
    pub fn from_reye(z: PointSet<F>, lambda: &FormSystem<F>) -> Result<Self> {
        let out = reye_check(&z, lambda)?;
        if !out.holds {
            return Err(Error::Degenerate(format!("decomposition residual {:e} exceeds {:e}", out.residual, out.tolerance)));
        }
        let weights = out.weights.unwrap();
        let f = z.field().clone();
        let colmax: Vec<f64> = (0..weights.cols())
            .map(|j| (0..weights.rows()).map(|i| f.magnitude(weights.get(i, j))).fold(0.0, f64::max))
            .collect();
        let scale = colmax.iter().copied().fold(0.0, f64::max);
        let zero_col = colmax.iter().any(|&m| if f.is_exact() { m == 0.0 } else { m <= 1e-10 * scale });
        if zero_col {
            return Err(Error::Degenerate("a vertex carries no weight".into()));
        }
        Ok(PolarPolyhedron { points: z, weights, residual: out.residual })
    }
}

/// The two cases where the associated point is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssociatedCase {
    /// 8 points in the plane; residual of the cubic pencil.
    Planar8,
    /// 7 points in space; residual of the quadric net.
    Spatial7,
}

/// The residual base point of the low-degree part of `I_Z`.
pub fn associated_point<F: Field>(z: &PointSet<F>, case: AssociatedCase) -> Result<Vec<Complex64>> {
    let zc = z.to_complex();
    let (n, s, deg, ngens, total) = match case {
        AssociatedCase::Planar8 => (2, 8, 3, 2, 9),
        AssociatedCase::Spatial7 => (3, 7, 2, 3, 8),
    };
    if z.n != n || z.len() != s {
        return Err(Error::InvalidArgument(format!("expected {s} points in P^{n}")));
    }
    let gens = ideal_forms(&zc, deg);
    if gens.len() != ngens {
        return Err(Error::Degenerate(format!("(I_Z)_{deg} has dimension {} instead of {ngens}", gens.len())));
    }
    let report = match case {
        AssociatedCase::Planar8 => intersect_plane_curves(&gens[0], &gens[1])?,
        AssociatedCase::Spatial7 => solve_system_numeric(&gens, Some(total))?,
    };
    if report.points.len() != total || report.flags.iter().any(|f| f.starts_with("multiple")) {
        return Err(Error::Degenerate(format!("base locus has {} points, expected {total}", report.points.len())));
    }
    let extra: Vec<&Vec<Complex64>> = report
        .points
        .points()
        .iter()
        .filter(|p| zc.points().iter().all(|q| projective_distance(p, q) > 1e-6))
        .collect();
    if extra.len() != 1 {
        return Err(Error::Degenerate(format!("{} residual points instead of 1", extra.len())));
    }
    Ok(extra[0].clone())
}

/// A quadruple `(n, d, r, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruple {
    pub n: u32,
    pub d: u32,
    pub r: u32,
    pub s: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Numerology {
    pub admissible: bool,
    pub expected_dim: i64,
    pub known_degenerate: bool,
}

/// Dimension count `s(n + r) − r·C(n+d, d)` and the lookup of known exceptions.
pub fn quadruple_numerology(q: Quadruple) -> Result<Numerology> {
    if q.n == 0 || q.d == 0 || q.r == 0 || q.s == 0 {
        return Err(Error::InvalidArgument("quadruple entries must be positive".into()));
    }
    let c = binomial((q.n + q.d) as u64, q.d as u64) as i64;
    let expected_dim = q.s as i64 * (q.n + q.r) as i64 - q.r as i64 * c;
    let admissible = (q.s as i64) * (q.n + q.r) as i64 >= q.r as i64 * c;
    let known = [(2, 4, 1, 5), (3, 4, 1, 9), (4, 4, 1, 14), (4, 3, 1, 7), (2, 3, 2, 5)];
    let known_degenerate = known.contains(&(q.n, q.d, q.r, q.s));
    Ok(Numerology { admissible, expected_dim, known_degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::q;
    use crate::poly::GradedForm;

    fn rat_points(n: usize, pts: &[&[i64]]) -> PointSet<Rationals> {
        PointSet::new(&Rationals, n, pts.iter().map(|p| p.iter().map(|&x| q(x, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn single_point_ideal() {
        let z = rat_points(2, &[&[1, 0, 0]]);
        let lin = ideal_piece(&z, 1);
        assert_eq!(lin.dim(), 2);
        // u1 and u2
        let expect = Subspace::span(&Rationals, 3, vec![vec![q(0, 1), q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1), q(1, 1)]]);
        assert!(lin.same_as(&expect));
        assert_eq!(hilbert_function(&z, 0), 1);
    }

    #[test]
    fn normalization_conventions() {
        let z = rat_points(2, &[&[0, 2, 4]]);
        assert_eq!(z.points()[0], vec![q(0, 1), q(1, 1), q(2, 1)]);
        let cc = ComplexDouble::default();
        let p = normalize_point(&cc, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, -3.0)]).unwrap();
        assert!((p[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn apolar_pair_of_coordinate_points() {
        let z = rat_points(2, &[&[1, 0, 0], &[0, 1, 0]]);
        let f1 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[3, 0, 0], 1), (&[0, 3, 0], 1)]).unwrap();
        let f2 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[3, 0, 0], 1), (&[0, 3, 0], -1)]).unwrap();
        let lam = FormSystem::new(vec![f1, f2]).unwrap();
        assert!(is_apolar(&z, &lam).unwrap());
        assert!(reye_check(&z, &lam).unwrap().holds);
        let z1 = rat_points(2, &[&[1, 0, 0]]);
        let g = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[0, 3, 0], 1)]).unwrap();
        let lam1 = FormSystem::new(vec![g]).unwrap();
        assert!(!is_apolar(&z1, &lam1).unwrap());
        assert!(!reye_check(&z1, &lam1).unwrap().holds);
    }

    #[test]
    fn intro_pair_weights() {
        let z = rat_points(1, &[&[1, 0], &[0, 1]]);
        let f1 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[2, 0], 1), (&[0, 2], 1)]).unwrap();
        let f2 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[2, 0], 2), (&[0, 2], 3)]).unwrap();
        let lam = FormSystem::new(vec![f1, f2]).unwrap();
        let poly = PolarPolyhedron::from_reye(z, &lam).unwrap();
        assert_eq!(poly.weights.row_vecs(), vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(3, 1)]]);
    }

    #[test]
    fn numerology_examples() {
        let e = |n, d, r, s| quadruple_numerology(Quadruple { n, d, r, s }).unwrap();
        assert_eq!(e(2, 4, 2, 8).expected_dim, 2);
        assert_eq!(e(2, 3, 3, 6).expected_dim, 0);
        assert_eq!(e(2, 3, 2, 6).expected_dim, 4);
        assert!(e(2, 3, 2, 5).known_degenerate);
        assert!(e(2, 4, 1, 5).known_degenerate);
        assert!(!e(2, 3, 3, 5).admissible);
    }

    #[test]
    fn repeated_points_are_rejected() {
        let r = PointSet::new(&Rationals, 1, vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]]);
        assert!(r.is_err());
    }
}
