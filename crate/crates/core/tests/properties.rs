use apolar::apolarity::{apolar_pair, expected_perp_dim, perp_space, power_form, FormSystem};
use apolar::betti::{generic_betti_mod, points_betti, points_resolution};
use apolar::cohomology::{chern_to_newton, newton_to_chern, SymProdClass};
use apolar::constructions::{inverse_associated_2428, normalized_error, t_degree, HBMatrix};
use apolar::field::{ComplexDouble, Field, PrimeField, Rationals};
use apolar::groebner::quotient_dimension;
use apolar::json::{points_from_json, points_to_json, read_system, system_from_json, system_to_json, write_system};
use apolar::monomial::binomial;
use apolar::points::{associated_point, hilbert_function, ideal_piece, is_apolar, reye_check, AssociatedCase, PointSet};
use apolar::poly::{GradedForm, Side};
use apolar::random::{random_form, random_general_system, random_rational_vec, random_system, rng, Rng64};
use apolar::solve::{intersect_plane_curves, solve_system};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::Rng;

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn random_points(g: &mut Rng64, n: usize, s: usize) -> PointSet<Rationals> {
    loop {
        let pts: Vec<Vec<BigRational>> = (0..s).map(|_| random_rational_vec(g, n + 1)).collect();
        if let Ok(z) = PointSet::new(&Rationals, n, pts) {
            return z;
        }
    }
}

/// Span of random combinations of `L_j^d` over the points of `Z`.
fn apolar_system(g: &mut Rng64, z: &PointSet<Rationals>, d: u32, r: usize) -> Option<FormSystem<Rationals>> {
    let powers: Vec<GradedForm<Rationals>> = z.points().iter().map(|p| power_form(&Rationals, p, d).unwrap()).collect();
    let basis: Vec<GradedForm<Rationals>> = (0..r)
        .map(|_| {
            powers.iter().fold(GradedForm::zero(&Rationals, Side::S, z.n() + 1, d), |acc, f| {
                acc.add(&f.scale(&q(g.gen_range(-9..=9)))).unwrap()
            })
        })
        .collect();
    FormSystem::new(basis).ok()
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn pairing_is_bilinear_and_contravariant(seed in any::<u64>(), n in 1usize..=3, i in 1u32..=2, j in 0u32..=2, extra in 0u32..=2) {
        let mut g = rng(seed);
        let nv = n + 1;
        let d = i + j + extra;
        let (p1, p2) = (random_form(&mut g, Side::R, nv, i), random_form(&mut g, Side::R, nv, i));
        let psi = random_form(&mut g, Side::R, nv, j);
        let f = random_form(&mut g, Side::S, nv, d);
        let sum = apolar_pair(&p1.add(&p2).unwrap(), &f).unwrap();
        prop_assert_eq!(sum, apolar_pair(&p1, &f).unwrap().add(&apolar_pair(&p2, &f).unwrap()).unwrap());
        let lhs = apolar_pair(&p1.mul(&psi).unwrap(), &f).unwrap();
        prop_assert_eq!(lhs, apolar_pair(&p1, &apolar_pair(&psi, &f).unwrap()).unwrap());
    }

    #[test]
    fn operators_act_on_powers_by_evaluation(seed in any::<u64>(), n in 1usize..=3, d in 1u32..=6, i_frac in 0u32..=6) {
        let mut g = rng(seed);
        let i = i_frac.min(d);
        let phi = random_form(&mut g, Side::R, n + 1, i);
        let l = random_rational_vec(&mut g, n + 1);
        let lhs = apolar_pair(&phi, &power_form(&Rationals, &l, d).unwrap()).unwrap();
        let falling: i64 = ((d - i + 1)..=d).map(i64::from).product();
        let rhs = power_form(&Rationals, &l, d - i).unwrap().scale(&(q(falling) * phi.eval(&l)));
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(lhs.is_zero(), Rationals.is_zero(&phi.eval(&l)));
    }

    #[test]
    fn perp_dimensions_are_expected(seed in any::<u64>(), n in 1usize..=3, d in 2u32..=4, r_frac in 0.0f64..1.0) {
        let max_r = binomial((n as u64) + u64::from(d), u64::from(d)) as usize;
        let r = 1 + ((r_frac * (max_r.min(8) as f64)) as usize).min(max_r.min(8) - 1);
        let lam = random_system(&mut rng(seed), n, d, r).unwrap();
        for i in 0..=d {
            let expect = expected_perp_dim(n as i64, i64::from(d), r as i64, i64::from(i)).unwrap();
            prop_assert_eq!(perp_space(&lam, i).dim(), expect, "n={} d={} r={} i={}", n, d, r, i);
        }
    }

    #[test]
    fn reye_agrees_with_apolarity(seed in any::<u64>(), n in 1usize..=3, d in 2u32..=4, s in 2usize..=7, build_apolar in any::<bool>()) {
        let mut g = rng(seed);
        let z = random_points(&mut g, n, s);
        let lam = if build_apolar { apolar_system(&mut g, &z, d, 1.max(s / 2)) } else { random_system(&mut g, n, d, 2).ok() };
        prop_assume!(lam.is_some());
        let lam = lam.unwrap();
        prop_assert_eq!(is_apolar(&z, &lam).unwrap(), reye_check(&z, &lam).unwrap().holds);
        if build_apolar {
            prop_assert!(is_apolar(&z, &lam).unwrap());
        }
    }

    #[test]
    fn ideal_pieces_shrink_as_points_are_added(seed in any::<u64>(), n in 1usize..=3, s in 1usize..=6, extra in 1usize..=4, i in 1u32..=4) {
        let mut g = rng(seed);
        let big = random_points(&mut g, n, s + extra);
        let small = big.subset(|k| k < s);
        prop_assert!(ideal_piece(&small, i).contains(&ideal_piece(&big, i)));
    }

    #[test]
    fn general_points_impose_independent_conditions(seed in any::<u64>(), n in 1usize..=3, s in 1usize..=12) {
        let z = random_points(&mut rng(seed), n, s);
        for i in 0..=5u32 {
            let expect = s.min(binomial(n as u64 + u64::from(i), u64::from(i)) as usize);
            prop_assert_eq!(hilbert_function(&z, i), expect);
        }
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 1usize..=3, d in 1u32..=4, s in 1usize..=6) {
        let mut g = rng(seed);
        let lam = random_system(&mut g, n, d, 1).unwrap();
        prop_assert_eq!(read_system(&write_system(&lam)).unwrap(), lam.clone());
        let cc = ComplexDouble::default();
        let lam_c = apolar::constructions::complex_system(&lam);
        let back = system_from_json(&cc, &system_to_json(&lam_c)).unwrap();
        prop_assert_eq!(back, lam_c);
        let z = random_points(&mut g, n, s);
        prop_assert_eq!(points_from_json(&Rationals, &points_to_json(&z)).unwrap(), z.clone());
        let zc = z.to_complex();
        let text = serde_json::to_string(&points_to_json(&zc)).unwrap();
        prop_assert!(points_from_json(&cc, &serde_json::from_str(&text).unwrap()).unwrap().same_set(&zc));
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn associated_point_ignores_order_and_scaling(seed in any::<u64>(), planar in any::<bool>(), shift in 1usize..7) {
        let mut g = rng(seed);
        let (n, s, case) = if planar { (2, 8, AssociatedCase::Planar8) } else { (3, 7, AssociatedCase::Spatial7) };
        let z = random_points(&mut g, n, s);
        let a = associated_point(&z, case).unwrap();
        let moved: Vec<Vec<BigRational>> = (0..s)
            .map(|k| {
                let scale = q(g.gen_range(1..=9) * if k % 2 == 0 { 1 } else { -1 });
                z.points()[(k + shift) % s].iter().map(|c| c * &scale).collect()
            })
            .collect();
        let b = associated_point(&PointSet::new(&Rationals, n, moved).unwrap(), case).unwrap();
        prop_assert!(normalized_error(&a, &b) <= 1e-6);
    }

    #[test]
    fn betti_tables_do_not_depend_on_prime_or_seed(n in 2usize..=3, s in 4usize..=10, seed in 0u64..1000) {
        let base = generic_betti_mod(n, s, seed, 32003).unwrap();
        prop_assert_eq!(&generic_betti_mod(n, s, seed, 65537).unwrap(), &base);
        prop_assert_eq!(&generic_betti_mod(n, s, seed + 1, 32003).unwrap(), &base);
    }

    #[test]
    fn resolutions_are_minimal_and_match_hilbert(seed in any::<u64>(), n in 2usize..=3, s in 3usize..=10) {
        let fp = PrimeField::new(32003).unwrap();
        let z = random_points(&mut rng(seed), n, s).to_prime(&fp).unwrap();
        let res = points_resolution(&z).unwrap();
        prop_assert!(!res.has_constant_entries());
        let table = points_betti(&z).unwrap();
        for k in 0..=6u32 {
            prop_assert_eq!(table.hilbert_function(k), hilbert_function(&z, k) as i64, "degree {}", k);
        }
    }

    #[test]
    fn plane_curves_meet_in_the_bezout_number(seed in any::<u64>(), a in 1u32..=4, b in 1u32..=4) {
        let mut g = rng(seed);
        let f = random_form(&mut g, Side::S, 3, a);
        let h = random_form(&mut g, Side::S, 3, b);
        let rep = intersect_plane_curves(&f, &h).unwrap();
        prop_assert_eq!(rep.points.len(), (a * b) as usize);
        let fp = PrimeField::new(32003).unwrap();
        let chart = |p: &GradedForm<Rationals>| p.to_prime(&fp).unwrap().poly().specialize(0, &1);
        prop_assert_eq!(quotient_dimension(&fp, 2, &[chart(&f), chart(&h)]).unwrap(), (a * b) as usize);
    }

    #[test]
    fn solutions_do_not_depend_on_the_chart(seed in any::<u64>()) {
        let mut g = rng(seed);
        let gens: Vec<GradedForm<Rationals>> = (0..2).map(|_| random_form(&mut g, Side::S, 3, 2)).collect();
        let base = solve_system(&gens).unwrap();
        for _ in 0..3 {
            let h: Vec<Vec<BigRational>> = (0..3).map(|_| random_rational_vec(&mut g, 3)).collect();
            let hm = apolar::linalg::Matrix::from_rows(&Rationals, 3, &h);
            prop_assume!(!Rationals.is_zero(&hm.det()));
            let moved: Vec<GradedForm<Rationals>> = gens.iter().map(|f| f.linear_substitute(&h)).collect();
            let rep = solve_system(&moved).unwrap();
            let hc: Vec<Vec<num_complex::Complex64>> = h.iter().map(|r| apolar::poly::rational_vec_to_complex(r)).collect();
            let back: Vec<Vec<num_complex::Complex64>> = rep
                .points
                .points()
                .iter()
                .map(|y| (0..3).map(|i| (0..3).map(|j| hc[i][j] * y[j]).sum()).collect())
                .collect();
            let zb = PointSet::new(&ComplexDouble::default(), 2, back).unwrap();
            prop_assert!(zb.same_set(&base.points));
        }
    }

    #[test]
    fn chern_newton_round_trip(seed in any::<u64>(), k in 1usize..=4, m in 2usize..=8) {
        let mut g = rng(seed);
        let mut chern = vec![SymProdClass::one(m)];
        for i in 1..=k.min(m) {
            let a = SymProdClass::monomial(m, i, false, q(g.gen_range(-5..=5)));
            let b = SymProdClass::monomial(m, i - 1, true, q(g.gen_range(-5..=5)));
            chern.push(a.add(&b));
        }
        let newton = chern_to_newton(k, &chern);
        let back = newton_to_chern(k, &newton).unwrap();
        for (i, c) in chern.iter().enumerate() {
            prop_assert_eq!(&back.chern[i], c);
        }
    }

    #[test]
    fn symmetric_product_relations(m in 2usize..=12) {
        let xi = SymProdClass::xi(m);
        let top = xi.pow(m as u32 - 1).mul(&SymProdClass::eta(m));
        prop_assert!(top.mul(&xi).is_zero());
        prop_assert_eq!(xi.pow(m as u32), top);
    }

    #[test]
    fn block_transformation_laws(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = HBMatrix::new(std::array::from_fn(|_| random_form(&mut g, Side::R, 3, 2))).unwrap();
        let e: [[BigRational; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| q(g.gen_range(-9..=9))));
        let ng = n.right_mul(e.clone());
        let (t, tp) = (n.theta(), n.theta_prime());
        prop_assert_eq!(ng.theta(), t.scale(&e[0][0]).add(&tp.scale(&e[1][0])).unwrap());
        prop_assert_eq!(ng.theta_prime(), t.scale(&e[0][1]).add(&tp.scale(&e[1][1])).unwrap());
    }
}

proptest! {
    #![proptest_config(config(4))]

    #[test]
    fn theta_conditions_have_twelve_dimensions(seed in any::<u64>()) {
        let mut g = rng(seed);
        let lam = random_general_system(&mut g, 2, 4, 2).unwrap();
        let p = random_rational_vec(&mut g, 3);
        let rep = inverse_associated_2428(&lam, &p, seed).unwrap();
        prop_assert_eq!(rep.dims[1], 12);
    }

    #[test]
    fn correspondence_has_degree_six_six(seed in any::<u64>()) {
        let lam = random_general_system(&mut rng(seed), 2, 3, 3).unwrap();
        prop_assert_eq!(t_degree(&lam, 32003, seed).unwrap(), (6, 6));
    }
}
