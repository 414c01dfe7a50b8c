use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{verify_candidate, Verified};
use crate::json::CoeffJson;
use crate::apolarity::FormSystem;
use crate::error::{Error, Result};
use crate::field::{ComplexDouble, Field};
use crate::linalg::singular_values;
use crate::points::PointSet;
use crate::poly::{GradedForm, Side};
use crate::random::rng;
use crate::solve::eigenvalues;

type C = Complex64;

/// Simultaneous diagonalization of a pencil of quadrics.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub result: Verified,
    /// Vertices of the singular members, as columns.
    pub vertices: Vec<Vec<C>>,
    /// `λ_k` with `(A₁ + λ_k A₂) v_k = 0`; `None` when `A₂ v_k = 0`.
    pub eigenvalues: Vec<Option<C>>,
    /// Max over `k` of the relative defect of `(A₁ + λ_k A₂) v_k = 0`.
    pub vertex_residual: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagonalizationJson {
    pub seed: u64,
    pub forms: Vec<Vec<CoeffJson>>,
    pub weights: Vec<Vec<CoeffJson>>,
    pub vertex_residual: f64,
    pub verification: super::Verification,
}

impl From<&Diagonalization> for DiagonalizationJson {
    fn from(d: &Diagonalization) -> Self {
        let p = super::PolyhedronJson::from(&d.result);
        DiagonalizationJson {
            seed: d.seed,
            forms: p.points.points,
            weights: p.weights,
            vertex_residual: d.vertex_residual,
            verification: p.verification,
        }
    }
}

fn symmetric_matrix<F: Field>(f: &GradedForm<F>) -> Result<DMatrix<C>> {
    if f.side() != Side::S || f.degree() != 2 {
        return Err(Error::InvalidArgument("expected a quadric in S".into()));
    }
    let n = f.nvars();
    let field = f.field();
    let mut a = DMatrix::zeros(n, n);
    for (m, c) in f.poly().terms() {
        let c = field.to_complex(c).ok_or_else(|| Error::Unsupported("coefficients have no complex image".into()))?;
        let idx: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat(i).take(m.exp(i) as usize)).collect();
        if idx[0] == idx[1] {
            a[(idx[0], idx[0])] += c;
        } else {
            a[(idx[0], idx[1])] += c / 2.0;
            a[(idx[1], idx[0])] += c / 2.0;
        }
    }
    Ok(a)
}

fn smallest_singular_vector(m: &DMatrix<C>) -> Vec<C> {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let k = (0..svd.singular_values.len())
        .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))
        .unwrap();
    (0..m.ncols()).map(|j| vt[(k, j)].conj()).collect()
}

/// Diagonalizes `F1, F2` simultaneously: the vertices of the singular members
/// of the pencil are the generalized eigenvectors, and the linear forms are the
/// rows of the inverse vertex matrix. The seed picks the pencil basis used for
/// the eigenproblem, so runs with different seeds are independent.
pub fn diagonalize_quadric_pencil<F: Field>(f1: &GradedForm<F>, f2: &GradedForm<F>, seed: u64) -> Result<Diagonalization> {
    if f1.nvars() != f2.nvars() {
        return Err(Error::NvarsMismatch(f1.nvars(), f2.nvars()));
    }
    let n = f1.nvars();
    let (a1, a2) = (symmetric_matrix(f1)?, symmetric_matrix(f2)?);
    let mut gen = rng(seed);
    let mut basis = None;
    for attempt in 0..8 {
        let (s, t) = if seed == 0 && attempt == 0 {
            (0.0, 1.0)
        } else {
            (gen.gen_range(-1.0..1.0), gen.gen_range(0.5..1.5))
        };
        let b = &a2 * C::new(t, 0.0) + &a1 * C::new(s, 0.0);
        let sv = singular_values(&b);
        let smax = sv.iter().copied().fold(0.0, f64::max);
        if smax > 0.0 && sv.iter().copied().fold(f64::INFINITY, f64::min) > 1e-8 * smax {
            basis = Some(b);
            break;
        }
    }
    let b = basis.ok_or_else(|| Error::Degenerate("every member of the pencil sampled is singular".into()))?;
    let m = b.clone().try_inverse().ok_or_else(|| Error::Numerical("pencil member not invertible".into()))? * &a1;
    let evs = eigenvalues(&m);
    let scale = evs.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for i in 0..evs.len() {
        for j in 0..i {
            if (evs[i] - evs[j]).norm() <= 1e-7 * scale {
                return Err(Error::Degenerate("repeated eigenvalue in the pencil".into()));
            }
        }
    }
    let vertices: Vec<Vec<C>> = evs
        .iter()
        .map(|&lam| smallest_singular_vector(&(&m - DMatrix::<C>::identity(n, n) * lam)))
        .collect();
    let vmat = DMatrix::from_fn(n, n, |i, k| vertices[k][i]);
    let inv = vmat.try_inverse().ok_or_else(|| Error::Degenerate("vertices are dependent".into()))?;
    let forms: Vec<Vec<C>> = (0..n).map(|j| (0..n).map(|i| inv[(j, i)]).collect()).collect();

    let scale1 = singular_values(&a1).into_iter().fold(0.0, f64::max);
    let scale2 = singular_values(&a2).into_iter().fold(0.0, f64::max);
    let mut vertex_residual: f64 = 0.0;
    let mut lambdas = Vec::with_capacity(n);
    for v in &vertices {
        let v = nalgebra::DVector::from_vec(v.clone());
        let (x1, x2) = (&a1 * &v, &a2 * &v);
        let n2 = x2.norm_squared();
        if n2 <= 1e-20 * scale2 * scale2 {
            lambdas.push(None);
            vertex_residual = vertex_residual.max(x2.norm() / scale2.max(f64::MIN_POSITIVE));
            continue;
        }
        let lam = -x2.dotc(&x1) / n2;
        let defect = (&x1 + &x2 * lam).norm() / (scale1 + lam.norm() * scale2);
        vertex_residual = vertex_residual.max(defect);
        lambdas.push(Some(lam));
    }

    let cc = ComplexDouble::default();
    let conv = |f: &GradedForm<F>| f.map_field(&cc, |c| f.field().to_complex(c).unwrap());
    let lambda = FormSystem::new(vec![conv(f1), conv(f2)])?;
    let z = PointSet::new(&cc, n - 1, forms)?;
    let result = verify_candidate(z, &lambda)?;
    Ok(Diagonalization { result, vertices, eigenvalues: lambdas, vertex_residual, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;
    use crate::random::random_form;

    #[test]
    fn already_diagonal_pair() {
        let f1 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[2, 0], 1), (&[0, 2], 1)]).unwrap();
        let f2 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[2, 0], 2), (&[0, 2], 3)]).unwrap();
        let d = diagonalize_quadric_pencil(&f1, &f2, 0).unwrap();
        let poly = &d.result.polyhedron;
        for (k, p) in poly.points.complex_points().iter().enumerate() {
            let lead = p.iter().position(|c| c.norm() > 0.5).unwrap();
            assert!(p.iter().enumerate().all(|(i, c)| i == lead || c.norm() < 1e-12));
            let expect = [[1.0, 2.0], [1.0, 3.0]][lead];
            for (i, e) in expect.iter().enumerate() {
                assert!((poly.weights.get(i, k) - C::new(*e, 0.0)).norm() < 1e-12);
            }
        }
        assert!(d.result.verification.passed());
    }

    #[test]
    fn random_pencils_are_unique_up_to_scale() {
        let mut g = rng(31);
        for nvars in 2..=5 {
            let f1 = random_form(&mut g, Side::S, nvars, 2);
            let f2 = random_form(&mut g, Side::S, nvars, 2);
            let a = diagonalize_quadric_pencil(&f1, &f2, 1).unwrap();
            let b = diagonalize_quadric_pencil(&f1, &f2, 2).unwrap();
            assert!(a.result.verification.reye_residual <= 1e-10, "{}", a.result.verification.reye_residual);
            assert!(a.vertex_residual <= 1e-10);
            assert!(a.result.polyhedron.points.same_set(&b.result.polyhedron.points));
        }
    }

    #[test]
    fn repeated_eigenvalue_is_degenerate() {
        let f1 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]).unwrap();
        let f2 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 2)]).unwrap();
        assert!(matches!(diagonalize_quadric_pencil(&f1, &f2, 0), Err(Error::Degenerate(_))));
    }
}
