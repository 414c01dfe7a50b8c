use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::base_locus::check_shape;
use super::{complex_system, normalized_error, solve_reduced, verify_candidate, PolyhedronJson, Verified};
use crate::apolarity::{perp_forms, FormSystem};
use crate::error::{Error, Result};
use crate::field::{Field, Rationals};
use crate::linalg::Matrix;
use crate::points::{associated_point, projective_distance, AssociatedCase, Quadruple};
use crate::poly::{rational_vec_to_complex, GradedForm};
use crate::solve::SolveSummary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualCase {
    /// `(3,2,6,7)`: the net of quadrics through `P` has eight base points.
    Spatial,
    /// `(2,3,7,8)`: the pencil of cubics through `P` has nine base points.
    Planar,
}

impl ResidualCase {
    pub fn quadruple(self) -> Quadruple {
        match self {
            ResidualCase::Spatial => Quadruple { n: 3, d: 2, r: 6, s: 7 },
            ResidualCase::Planar => Quadruple { n: 2, d: 3, r: 7, s: 8 },
        }
    }

    pub fn from_quadruple(q: Quadruple) -> Option<Self> {
        [ResidualCase::Spatial, ResidualCase::Planar].into_iter().find(|c| c.quadruple() == q)
    }

    fn associated(self) -> AssociatedCase {
        match self {
            ResidualCase::Spatial => AssociatedCase::Spatial7,
            ResidualCase::Planar => AssociatedCase::Planar8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub case: ResidualCase,
    pub point: Vec<BigRational>,
    pub w_dim: usize,
    pub solve: SolveSummary,
    /// Distance from `P` to the nearest solved base point.
    pub point_distance: f64,
    pub result: Verified,
    pub associated: Vec<Complex64>,
    pub associated_error: f64,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.result.verification.passed() && self.associated_error <= 1e-6
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.quadruple(),
            "point": self.point.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "w_dim": self.w_dim,
            "solve": self.solve,
            "point_distance": self.point_distance,
            "polyhedron": PolyhedronJson::from(&self.result),
            "associated": crate::json::complex_vec_json(&self.associated),
            "associated_error": self.associated_error,
        })
    }
}

/// Forms of `Λ^⊥_d` vanishing at `P`.
pub(super) fn perp_through(lambda: &FormSystem<Rationals>, p: &[BigRational]) -> Vec<GradedForm<Rationals>> {
    let forms = perp_forms(lambda, lambda.d());
    let values: Vec<BigRational> = forms.iter().map(|f| f.eval(p)).collect();
    let null = Matrix::from_rows(&Rationals, forms.len(), &[values]).nullspace();
    null.iter()
        .map(|c| {
            forms.iter().zip(c).fold(GradedForm::zero(&Rationals, forms[0].side(), lambda.nvars(), lambda.d()), |acc, (f, x)| {
                acc.add(&f.scale(x)).expect("same degree")
            })
        })
        .collect()
}

/// The polyhedron residual to `P` in the base locus of the forms of `Λ^⊥_d`
/// through `P`.
pub fn residual_construct(lambda: &FormSystem<Rationals>, p: &[BigRational], case: ResidualCase) -> Result<ResidualReport> {
    let q = case.quadruple();
    check_shape(lambda, q)?;
    if p.len() != lambda.nvars() || p.iter().all(|c| Rationals.is_zero(c)) {
        return Err(Error::InvalidArgument("point has the wrong length or is zero".into()));
    }
    let w = perp_through(lambda, p);
    let expected_w = match case {
        ResidualCase::Spatial => 3,
        ResidualCase::Planar => 2,
    };
    if w.len() != expected_w {
        return Err(Error::Degenerate(format!("forms through P span {} dimensions, expected {expected_w}", w.len())));
    }
    let report = solve_reduced(&w, q.s as usize + 1, "base locus through P")?;
    let pc = rational_vec_to_complex(p);
    let (nearest, point_distance) = report
        .points
        .points()
        .iter()
        .enumerate()
        .map(|(i, x)| (i, projective_distance(x, &pc)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    if point_distance > 1e-6 {
        return Err(Error::Numerical(format!("P is not among the base points (distance {point_distance:e})")));
    }
    let z = report.points.subset(|i| i != nearest);
    let result = verify_candidate(z, &complex_system(lambda))?;
    let associated = associated_point(&result.polyhedron.points, case.associated())?;
    let associated_error = normalized_error(&associated, &pc);
    Ok(ResidualReport {
        case,
        point: p.to_vec(),
        w_dim: w.len(),
        solve: SolveSummary::from(&report),
        point_distance,
        result,
        associated,
        associated_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_general_system, random_rational_vec, rng};

    #[test]
    fn spatial_round_trip() {
        let mut g = rng(5);
        let lam = random_general_system(&mut g, 3, 2, 6).unwrap();
        let p = random_rational_vec(&mut g, 4);
        let rep = residual_construct(&lam, &p, ResidualCase::Spatial).unwrap();
        assert_eq!(rep.result.polyhedron.points.len(), 7);
        assert!(rep.passed(), "{:?} {}", rep.result.verification, rep.associated_error);
        let p2 = random_rational_vec(&mut g, 4);
        let rep2 = residual_construct(&lam, &p2, ResidualCase::Spatial).unwrap();
        let a = rep.result.polyhedron.points.complex_points();
        let b = rep2.result.polyhedron.points.complex_points();
        assert!(a.iter().all(|x| b.iter().all(|y| projective_distance(x, y) > 1e-6)));
    }

    #[test]
    fn planar_residual() {
        let mut g = rng(6);
        let lam = random_general_system(&mut g, 2, 3, 7).unwrap();
        let p = random_rational_vec(&mut g, 3);
        let rep = residual_construct(&lam, &p, ResidualCase::Planar).unwrap();
        assert_eq!(rep.result.polyhedron.points.len(), 8);
        assert!(rep.passed(), "{:?} {}", rep.result.verification, rep.associated_error);
    }
}
