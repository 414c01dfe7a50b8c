use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{complex_system, solve_reduced, verify_candidate, PolyhedronJson, Verified};
use crate::json::points_to_json;
use crate::apolarity::{perp_forms, FormSystem};
use crate::error::{Error, Result};
use crate::field::{ComplexDouble, Rationals};
use crate::points::{PointSet, Quadruple};
use crate::solve::SolveSummary;

/// The two quadruples whose polyhedra are all found inside one base locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseLocusCase {
    /// `(2,3,8,8)`: nine base points of a pencil of cubics.
    Plane,
    /// `(3,2,7,7)`: eight base points of a net of quadrics.
    Space,
}

impl BaseLocusCase {
    pub fn quadruple(self) -> Quadruple {
        match self {
            BaseLocusCase::Plane => Quadruple { n: 2, d: 3, r: 8, s: 8 },
            BaseLocusCase::Space => Quadruple { n: 3, d: 2, r: 7, s: 7 },
        }
    }

    pub fn from_quadruple(q: Quadruple) -> Option<Self> {
        [BaseLocusCase::Plane, BaseLocusCase::Space].into_iter().find(|c| c.quadruple() == q)
    }

    fn perp_dim(self) -> usize {
        match self {
            BaseLocusCase::Plane => 2,
            BaseLocusCase::Space => 3,
        }
    }

    fn base_points(self) -> usize {
        match self {
            BaseLocusCase::Plane => 9,
            BaseLocusCase::Space => 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BaseLocusReport {
    pub case: BaseLocusCase,
    pub perp_dim: usize,
    pub solve: SolveSummary,
    pub base_points: PointSet<ComplexDouble>,
    pub polyhedra: Vec<Verified>,
    /// Omitted base point and the reason its complement was rejected.
    pub rejected: Vec<(usize, String)>,
}

impl BaseLocusReport {
    pub fn passed(&self) -> bool {
        self.polyhedra.len() == self.case.base_points() && self.polyhedra.iter().all(|p| p.verification.passed())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.quadruple(),
            "perp_dim": self.perp_dim,
            "solve": self.solve,
            "base_points": points_to_json(&self.base_points),
            "count": self.polyhedra.len(),
            "polyhedra": self.polyhedra.iter().map(PolyhedronJson::from).collect::<Vec<_>>(),
            "rejected": self.rejected.iter().map(|(i, r)| json!({"omitted": i, "reason": r})).collect::<Vec<_>>(),
        })
    }
}

pub(super) fn check_shape(lambda: &FormSystem<Rationals>, q: Quadruple) -> Result<()> {
    if (lambda.n() as u32, lambda.d(), lambda.r() as u32) != (q.n, q.d, q.r) {
        return Err(Error::InvalidArgument(format!(
            "system has shape ({},{},{}), expected ({},{},{})",
            lambda.n(),
            lambda.d(),
            lambda.r(),
            q.n,
            q.d,
            q.r
        )));
    }
    Ok(())
}

/// Every polyhedron of the case: the base locus of `Λ^⊥_d` minus one point,
/// kept when it passes all verifications.
pub fn base_locus_polyhedra(lambda: &FormSystem<Rationals>, case: BaseLocusCase) -> Result<BaseLocusReport> {
    let q = case.quadruple();
    check_shape(lambda, q)?;
    let gens = perp_forms(lambda, q.d);
    if gens.len() != case.perp_dim() {
        return Err(Error::Degenerate(format!("perp space has dimension {} instead of {}", gens.len(), case.perp_dim())));
    }
    let report = solve_reduced(&gens, case.base_points(), "base locus")?;
    let lam_c = complex_system(lambda);
    let mut polyhedra = Vec::new();
    let mut rejected = Vec::new();
    for omit in 0..report.points.len() {
        let z = report.points.subset(|i| i != omit);
        match verify_candidate(z, &lam_c) {
            Ok(v) if v.verification.passed() => polyhedra.push(v),
            Ok(v) => rejected.push((omit, format!("verification failed: {:?}", v.verification))),
            Err(e) => rejected.push((omit, e.to_string())),
        }
    }
    Ok(BaseLocusReport {
        case,
        perp_dim: gens.len(),
        solve: SolveSummary::from(&report),
        base_points: report.points,
        polyhedra,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_general_system, rng};

    #[test]
    fn plane_case_has_nine() {
        let lam = random_general_system(&mut rng(11), 2, 3, 8).unwrap();
        let rep = base_locus_polyhedra(&lam, BaseLocusCase::Plane).unwrap();
        assert_eq!(rep.polyhedra.len(), 9, "{:?}", rep.rejected);
        assert!(rep.passed());
    }

    #[test]
    fn space_case_has_eight() {
        let lam = random_general_system(&mut rng(12), 3, 2, 7).unwrap();
        let rep = base_locus_polyhedra(&lam, BaseLocusCase::Space).unwrap();
        assert_eq!(rep.polyhedra.len(), 8, "{:?}", rep.rejected);
        assert!(rep.passed());
    }
}
