//! Seeded generation of "general" instances.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apolarity::{expected_perp_dim, perp_space, FormSystem};
use crate::error::{Error, Result};
use crate::field::{Field, PrimeField, Rationals};
use crate::monomial::forms_dim;
use crate::poly::{GradedForm, Side};

pub type Rng64 = ChaCha8Rng;

/// Coefficient range for random integer data.
pub const COEFF_BOUND: i64 = 50;

/// Maximum number of resampling attempts for general instances.
pub const MAX_RESAMPLES: usize = 20;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_int(rng: &mut Rng64) -> i64 {
    rng.gen_range(-COEFF_BOUND..=COEFF_BOUND)
}

pub fn random_ints(rng: &mut Rng64, len: usize) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..len).map(|_| random_int(rng)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

pub fn random_rational_vec(rng: &mut Rng64, len: usize) -> Vec<BigRational> {
    random_ints(rng, len).into_iter().map(|x| Rationals.from_i64(x)).collect()
}

pub fn random_prime_vec(rng: &mut Rng64, fp: &PrimeField, len: usize) -> Vec<u64> {
    loop {
        let v: Vec<u64> = (0..len).map(|_| rng.gen_range(0..fp.modulus())).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

pub fn random_form(rng: &mut Rng64, side: Side, nvars: usize, d: u32) -> GradedForm<Rationals> {
    let coords = random_rational_vec(rng, forms_dim(nvars, d));
    GradedForm::from_coords(&Rationals, side, nvars, d, &coords)
}

/// `r` random forms of degree `d` in `n + 1` variables, resampled until independent.
pub fn random_system(rng: &mut Rng64, n: usize, d: u32, r: usize) -> Result<FormSystem<Rationals>> {
    for _ in 0..MAX_RESAMPLES {
        let basis = (0..r).map(|_| random_form(rng, Side::S, n + 1, d)).collect();
        match FormSystem::new(basis) {
            Ok(s) => return Ok(s),
            Err(e) if e.is_degenerate() => log::info!("resampling dependent system"),
            Err(e) => return Err(e),
        }
    }
    Err(Error::Degenerate("could not sample an independent system".into()))
}

/// A random system whose perp dimensions match the expected ones in every
/// degree `i ≤ d`, checked modulo a large prime.
pub fn random_general_system(rng: &mut Rng64, n: usize, d: u32, r: usize) -> Result<FormSystem<Rationals>> {
    let fp = PrimeField::new(32003)?;
    for _ in 0..MAX_RESAMPLES {
        let sys = random_system(rng, n, d, r)?;
        let Some(red) = reduce_system(&sys, &fp) else { continue };
        let ok = (0..=d).all(|i| {
            perp_space(&red, i).dim() == expected_perp_dim(n as i64, d as i64, r as i64, i as i64).unwrap()
        });
        if ok {
            return Ok(sys);
        }
        log::info!("resampling non-general ({n},{d},{r}) system");
    }
    Err(Error::Degenerate(format!("no general ({n},{d},{r}) system after {MAX_RESAMPLES} samples")))
}

pub fn reduce_system(sys: &FormSystem<Rationals>, fp: &PrimeField) -> Option<FormSystem<PrimeField>> {
    let basis: Option<Vec<_>> = sys.basis().iter().map(|f| f.to_prime(fp)).collect();
    FormSystem::new(basis?).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_systems_are_reproducible() {
        let a = random_system(&mut rng(5), 2, 3, 3).unwrap();
        let b = random_system(&mut rng(5), 2, 3, 3).unwrap();
        assert_eq!(a, b);
        let c = random_system(&mut rng(6), 2, 3, 3).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn ints_in_range() {
        let mut g = rng(1);
        for _ in 0..1000 {
            let x = random_int(&mut g);
            assert!((-COEFF_BOUND..=COEFF_BOUND).contains(&x));
        }
    }
}
