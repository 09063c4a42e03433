use proptest::prelude::*;
use tvgap_core::coprime::{factorize, normalized_lcf, normalized_rcf};
use tvgap_core::gap::plant_gap;
use tvgap_core::linalg::frobenius_distance;
use tvgap_core::margin::{margin_profile, r_o, r_upper_alt};
use tvgap_core::nehari::{distance_to_causal, flatten_hankel, hankel_apply};
use tvgap_core::random::{random_causal, random_operator, random_plant, random_space, random_unit_vectors, rng};
use tvgap_core::{LtvOperator, NestIndex, Side};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn truncations_are_orthogonal_projections(seed in any::<u64>(), t in 1usize..6, a in 0usize..7, b in 0usize..7) {
        let mut r = rng(seed);
        let s = random_space(&mut r, t, 2);
        let x = random_operator(&mut r, s.clone(), s.clone(), 1.0);
        let na = NestIndex::from_signed(a as i64 % (t as i64 + 1) - 1).unwrap();
        let nb = NestIndex::from_signed(b as i64 % (t as i64 + 1) - 1).unwrap();
        let p = LtvOperator::identity(s.clone()).truncate(na, Side::Left, false);
        prop_assert!(frobenius_distance(&(p.matrix() * p.matrix()), p.matrix()) < 1e-12);
        prop_assert!(frobenius_distance(&p.matrix().transpose(), p.matrix()) < 1e-12);
        let lhs = x.truncate(na, Side::Left, false).truncate(nb, Side::Left, false);
        let kept = na.steps_kept(t).min(nb.steps_kept(t));
        let both = if kept == 0 { NestIndex::Empty } else { NestIndex::Through(kept - 1) };
        let rhs = x.truncate(both, Side::Left, false);
        prop_assert!(frobenius_distance(lhs.matrix(), rhs.matrix()) < 1e-12);
    }

    #[test]
    fn causality_means_fixed_by_the_projection(seed in any::<u64>(), t in 1usize..6, make_causal in any::<bool>()) {
        let mut r = rng(seed);
        let (d, c) = (random_space(&mut r, t, 2), random_space(&mut r, t, 2));
        let mut x = random_operator(&mut r, d, c, 1.0);
        if make_causal {
            x = x.nest_project();
        }
        prop_assert_eq!(x.is_causal(0.0), x.nest_project().matrix() == x.matrix());
    }

    #[test]
    fn causal_algebra_is_closed(seed in any::<u64>(), t in 1usize..6) {
        let mut r = rng(seed);
        let s = random_space(&mut r, t, 2);
        let a = random_causal(&mut r, s.clone(), s.clone(), 1.0);
        let b = random_causal(&mut r, s.clone(), s.clone(), 1.0);
        prop_assert!(a.compose(&b).unwrap().is_causal(1e-13));
        prop_assert!(a.add(&b).unwrap().scale(-2.5).is_causal(0.0));
        if let Ok(inv) = a.add(&LtvOperator::identity(s).scale(3.0)).unwrap().solve_causal_inverse() {
            prop_assert!(inv.is_causal(1e-12));
        }
    }

    #[test]
    fn adjoint_reverses_composition(seed in any::<u64>(), t in 1usize..6) {
        let mut r = rng(seed);
        let (s1, s2, s3) = (random_space(&mut r, t, 2), random_space(&mut r, t, 2), random_space(&mut r, t, 2));
        let a = random_operator(&mut r, s2.clone(), s3, 1.0);
        let b = random_operator(&mut r, s1, s2, 1.0);
        let lhs = a.compose(&b).unwrap().adjoint();
        let rhs = b.adjoint().compose(&a.adjoint()).unwrap();
        prop_assert!(frobenius_distance(lhs.matrix(), rhs.matrix()) < 1e-12);
    }

    #[test]
    fn graph_column_is_isometric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_plant(&mut r, 6, 2);
        let f = factorize(&p).unwrap();
        let g = f.right_graph();
        for v in random_unit_vectors(&mut r, g.ncols(), 40) {
            prop_assert!(((&g * &v).norm_squared() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn factorization_is_deterministic(seed in any::<u64>()) {
        let p = random_plant(&mut rng(seed), 5, 2);
        let (m1, n1) = normalized_rcf(&p).unwrap();
        let (m2, n2) = normalized_rcf(&p).unwrap();
        prop_assert_eq!(m1.matrix(), m2.matrix());
        prop_assert_eq!(n1.matrix(), n2.matrix());
    }

    #[test]
    fn left_factors_are_reversed_right_factors(seed in any::<u64>()) {
        let p = random_plant(&mut rng(seed), 6, 2);
        let (mh, nh) = normalized_lcf(&p).unwrap();
        let (m, n) = normalized_rcf(&p.adjoint().time_reversed()).unwrap();
        prop_assert!(frobenius_distance(mh.matrix(), m.adjoint().time_reversed().matrix()) < 1e-10);
        prop_assert!(frobenius_distance(nh.matrix(), n.adjoint().time_reversed().matrix()) < 1e-10);
    }

    #[test]
    fn hankel_depends_only_on_the_anticausal_part(seed in any::<u64>(), t in 1usize..6) {
        let mut r = rng(seed);
        let (d, c) = (random_space(&mut r, t, 2), random_space(&mut r, t, 2));
        let sym = random_operator(&mut r, d.clone(), c.clone(), 1.0);
        let q = random_causal(&mut r, d, c, 1.0);
        prop_assert_eq!(flatten_hankel(&sym).matrix, flatten_hankel(&sym.add(&q).unwrap()).matrix);
    }

    #[test]
    fn hankel_is_bounded_by_the_distance(seed in any::<u64>(), t in 1usize..6) {
        let mut r = rng(seed);
        let (d, c) = (random_space(&mut r, t, 2), random_space(&mut r, t, 2));
        let sym = random_operator(&mut r, d.clone(), c, 1.0);
        let a = random_causal(&mut r, d.clone(), d, 1.0);
        let h = hankel_apply(&sym, &a).unwrap();
        prop_assert!(h.hs_norm() <= distance_to_causal(&sym) * a.hs_norm() + 1e-12);
    }

    #[test]
    fn gap_is_a_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = 1 + (seed % 4) as usize;
        let (d, c) = (random_space(&mut r, t, 2), random_space(&mut r, t, 2));
        let p: Vec<LtvOperator> = (0..3).map(|_| random_causal(&mut r, d.clone(), c.clone(), 1.5)).collect();
        let a = |i: usize, j: usize| plant_gap(&p[i], &p[j]).unwrap();
        let (g01, g10, g12, g02) = (a(0, 1), a(1, 0), a(1, 2), a(0, 2));
        prop_assert!((g01.alpha - g10.alpha).abs() < 1e-12);
        prop_assert!(g02.alpha <= g01.alpha + g12.alpha + 1e-9);
        prop_assert!(a(0, 0).alpha < 1e-10);
        for e in &g01.per_n {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&e.directed_12));
        }
    }

    #[test]
    fn margin_ignores_the_completion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = factorize(&random_plant(&mut r, 6, 2)).unwrap();
        let q = random_causal(&mut r, f.u.domain().clone(), f.u.codomain().clone(), 1.0);
        let g = f.with_youla_shift(&q).unwrap();
        prop_assert!(g.residuals.max() < 1e-8);
        prop_assert!((r_o(&f).unwrap() - r_o(&g).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn margin_range_and_bracket(seed in any::<u64>()) {
        let f = factorize(&random_plant(&mut rng(seed), 5, 2)).unwrap();
        let ro = r_o(&f).unwrap();
        prop_assert!(ro > 0.0 && ro <= 1.0);
        let alt = r_upper_alt(&f).unwrap();
        prop_assert!((0.0..1.0).contains(&alt.upsilon_norm));
        let profile = margin_profile(&f).unwrap();
        for e in &profile.entries {
            prop_assert!(ro <= e.value.recip() + 1e-10);
        }
        prop_assert!((profile.entries[0].value.recip() - ro).abs() < 1e-8);
    }

    #[test]
    fn static_gap_is_constant_along_the_nest(g1 in -3.0f64..3.0, g2 in -3.0f64..3.0, t in 1usize..5) {
        let lift = |g: f64| tvgap_core::lift::toeplitz_lift_scalar(&[g], 1, t).unwrap();
        let rep = plant_gap(&lift(g1), &lift(g2)).unwrap();
        let first = rep.per_n[0].two_sided;
        // n = T - 1 compares two zero subspaces
        for e in rep.per_n.iter().filter(|e| e.n < t as i64 - 1) {
            prop_assert!((e.two_sided - first).abs() < 1e-9);
            prop_assert!((e.directed_12 - first).abs() < 1e-9);
        }
    }
}
