//! Quadruple-specific constructions of polar polyhedra, each followed by
//! the same verification: apolarity, the Reye decomposition and the Betti
//! shape of general points.

mod base_locus;
mod diagonalize;
mod grove;
mod hilbert_burch;
mod london;
mod residual;

pub use base_locus::{base_locus_polyhedra, BaseLocusCase, BaseLocusReport};
pub use diagonalize::{diagonalize_quadric_pencil, Diagonalization, DiagonalizationJson};
pub use grove::{grove_case1_rank, grove_points, grove_quadrics, random_octuple, GroveReport};
pub use hilbert_burch::{hb_plane_construct_2347, inverse_associated_2428, HBMatrix, HbReport, Hb2428Report};
pub use london::{
    f13_matrix, f23_rank, london_alpha, london_alpha_map, london_count, london_curve_E, london_data, london_hexahedra,
    six_cube_net, t_degree, Hexahedron, LondonCount, LondonData, MutualPair,
};
pub use residual::{residual_construct, ResidualCase, ResidualReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::apolarity::FormSystem;
use crate::betti::is_resolution_general;
use crate::error::{Error, Result};
use crate::field::{rational_to_f64, ComplexDouble, Rationals};
use crate::json::{points_to_json, CoeffJson, JsonField, PointsJson};
use crate::points::{is_apolar, reye_check, PointSet, PolarPolyhedron};
use crate::poly::GradedForm;
use crate::solve::{solve_system, SolveReport};

/// Relative Reye residual accepted for constructed polyhedra.
pub const CONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generality {
    General,
    Special,
    Indeterminate,
}

/// Outcome of the three checks every construction runs on its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub apolar: bool,
    /// Max-norm defect of `F_i = Σ c_ij L_j^d`, relative to the largest coefficient of `Λ`.
    pub reye_residual: f64,
    pub resolution: Generality,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.apolar && self.reye_residual <= CONSTRUCTION_TOL && self.resolution == Generality::General
    }
}

/// A polyhedron together with its verification record.
#[derive(Clone, Debug)]
pub struct Verified {
    pub polyhedron: PolarPolyhedron<ComplexDouble>,
    pub verification: Verification,
}

pub fn complex_system(lambda: &FormSystem<Rationals>) -> FormSystem<ComplexDouble> {
    lambda.map_field(&ComplexDouble::default(), |q| Complex64::new(rational_to_f64(q), 0.0))
}

pub fn verify(z: &PointSet<ComplexDouble>, lambda: &FormSystem<ComplexDouble>) -> Result<Verification> {
    let apolar = is_apolar(z, lambda)?;
    let reye = reye_check(z, lambda)?;
    let resolution = match is_resolution_general(z) {
        Ok(true) => Generality::General,
        Ok(false) => Generality::Special,
        Err(Error::Indeterminate { .. }) => Generality::Indeterminate,
        Err(e) => return Err(e),
    };
    Ok(Verification { apolar, reye_residual: reye.residual / lambda.max_coeff().max(f64::MIN_POSITIVE), resolution })
}

/// Verifies `Z` and, when the decomposition holds, attaches its weights.
pub fn verify_candidate(z: PointSet<ComplexDouble>, lambda: &FormSystem<ComplexDouble>) -> Result<Verified> {
    let verification = verify(&z, lambda)?;
    let polyhedron = PolarPolyhedron::from_reye(z, lambda)?;
    Ok(Verified { polyhedron, verification })
}

/// Solves a rational system whose solutions must be `expected` simple points.
pub(crate) fn solve_reduced(gens: &[GradedForm<Rationals>], expected: usize, what: &str) -> Result<SolveReport> {
    let report = solve_system(gens)?;
    if report.multiplicity.iter().any(|&m| m) || report.flags.iter().any(|f| f.starts_with("multiple")) {
        return Err(Error::Degenerate(format!("non-reduced {what}")));
    }
    if !report.is_clean() || report.points.len() != expected {
        return Err(Error::Numerical(format!(
            "{what}: {} points of {expected}, flags {:?}",
            report.points.len(),
            report.flags
        )));
    }
    Ok(report)
}

/// Largest coordinate difference after scaling both points so that the
/// largest coordinate of `b` is 1.
pub fn normalized_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let k = (0..b.len()).max_by(|&i, &j| b[i].norm().total_cmp(&b[j].norm())).unwrap_or(0);
    if a[k].norm() == 0.0 {
        return f64::INFINITY;
    }
    let (sa, sb) = (a[k], b[k]);
    a.iter().zip(b).map(|(x, y)| (x / sa - y / sb).norm()).fold(0.0, f64::max)
}

/// Serializable polyhedron: vertices, weights, decomposition residual and verification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyhedronJson {
    pub points: PointsJson,
    /// `r × s` weights.
    pub weights: Vec<Vec<CoeffJson>>,
    pub residual: f64,
    pub verification: Verification,
}

impl From<&Verified> for PolyhedronJson {
    fn from(v: &Verified) -> Self {
        let cc = ComplexDouble::default();
        PolyhedronJson {
            points: points_to_json(&v.polyhedron.points),
            weights: v.polyhedron.weights.row_vecs().iter().map(|r| r.iter().map(|c| cc.encode(c)).collect()).collect(),
            residual: v.polyhedron.residual,
            verification: v.verification.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_error_is_scale_free() {
        let a = vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 4.0)];
        let b = vec![Complex64::new(0.0, 1.0), Complex64::new(-2.0, 0.0)];
        assert!(normalized_error(&a, &b) < 1e-15);
        let c = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(normalized_error(&a, &c) > 0.1);
    }
}
