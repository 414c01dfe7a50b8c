use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Rationals};
use crate::linalg::Matrix;
use crate::poly::{GradedForm, Side};
use crate::random::rng;

/// The quadrics `G₁ = wx + xy + yz + zw` and `G₂ = wy + xz` in `(w, x, y, z)`.
pub fn grove_quadrics() -> [GradedForm<Rationals>; 2] {
    let g1 = GradedForm::from_int_terms(
        &Rationals,
        Side::S,
        &[(&[1, 1, 0, 0], 1), (&[0, 1, 1, 0], 1), (&[0, 0, 1, 1], 1), (&[1, 0, 0, 1], 1)],
    )
    .expect("quadric");
    let g2 = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[1, 0, 1, 0], 1), (&[0, 1, 0, 1], 1)]).expect("quadric");
    [g1, g2]
}

/// The eight base points `Q₁, …, Q₈` on the curve `G₁ = G₂ = 0`.
pub fn grove_points() -> [[i64; 4]; 8] {
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [-1, 1, 1, 1],
        [1, -1, 1, 1],
        [1, 1, -1, 1],
        [1, 1, 1, -1],
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct GroveReport {
    pub rank: usize,
    pub grove_free: bool,
    /// Whether the eight points of `P¹` are pairwise distinct.
    pub distinct: bool,
    /// The `p_i` as `"a:b"` strings.
    pub p: Vec<String>,
    pub scope: &'static str,
}

/// Random octuple of distinct points of `P¹` with small integer coordinates.
pub fn random_octuple(seed: u64) -> Vec<[BigRational; 2]> {
    let mut g = rng(seed);
    let mut pts: Vec<(i64, i64)> = Vec::with_capacity(8);
    while pts.len() < 8 {
        let (a, b): (i64, i64) = (g.gen_range(-30..=30), g.gen_range(-30..=30));
        if (a != 0 || b != 0) && pts.iter().all(|&(c, d)| a * d != b * c) {
            pts.push((a, b));
        }
    }
    pts.into_iter().map(|(a, b)| [Rationals.from_i64(a), Rationals.from_i64(b)]).collect()
}

/// Rank of the conditions that `p_{i1} C₁ + p_{i2} C₂` be singular at every
/// `Q_i`, where `C₁ = L₁G₁ + L₂G₂` and `C₂ = L₁′G₁ + L₂′G₂`, as a linear
/// system in the sixteen coefficients of `L₁, L₂, L₁′, L₂′`.
pub fn grove_case1_rank(p: &[[BigRational; 2]]) -> Result<GroveReport> {
    if p.len() != 8 {
        return Err(Error::InvalidArgument(format!("expected 8 points of P^1, got {}", p.len())));
    }
    if p.iter().any(|q| q[0] == Rationals.zero() && q[1] == Rationals.zero()) {
        return Err(Error::InvalidArgument("zero point of P^1".into()));
    }
    let f = Rationals;
    let gs = grove_quadrics();
    let grads: Vec<_> = gs.iter().map(|g| (0..4).map(|k| g.poly().derivative(k)).collect::<Vec<_>>()).collect();
    let mut rows = Vec::with_capacity(32);
    for (q, pi) in grove_points().iter().zip(p) {
        let qv: Vec<BigRational> = q.iter().map(|&x| f.from_i64(x)).collect();
        for k in 0..4 {
            let dg: Vec<BigRational> = grads.iter().map(|g| g[k].eval(&qv)).collect();
            let mut row = Vec::with_capacity(16);
            for (weight, grad) in [(&pi[0], &dg[0]), (&pi[0], &dg[1]), (&pi[1], &dg[0]), (&pi[1], &dg[1])] {
                for qj in &qv {
                    row.push(weight * grad * qj);
                }
            }
            rows.push(row);
        }
    }
    let rank = Matrix::from_rows(&f, 16, &rows).rank();
    let distinct = (0..8).all(|i| (0..i).all(|j| &p[i][0] * &p[j][1] != &p[i][1] * &p[j][0]));
    Ok(GroveReport {
        rank,
        grove_free: rank == 16,
        distinct,
        p: p.iter().map(|q| format!("{}:{}", q[0], q[1])).collect(),
        scope: "case 1 rank condition only",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_points_lie_on_both_quadrics() {
        let gs = grove_quadrics();
        for q in grove_points() {
            let qv: Vec<BigRational> = q.iter().map(|&x| Rationals.from_i64(x)).collect();
            for g in &gs {
                assert_eq!(g.eval(&qv), Rationals.zero());
            }
        }
    }

    #[test]
    fn general_octuples_are_grove_free() {
        for seed in 0..5 {
            let r = grove_case1_rank(&random_octuple(seed)).unwrap();
            assert!(r.distinct);
            assert_eq!(r.rank, 16);
        }
    }

    #[test]
    fn equal_points_drop_rank() {
        let p: Vec<[BigRational; 2]> = (0..8).map(|_| [Rationals.from_i64(1), Rationals.from_i64(1)]).collect();
        let r = grove_case1_rank(&p).unwrap();
        assert!(!r.grove_free);
        assert!(r.rank < 16);
    }
}
