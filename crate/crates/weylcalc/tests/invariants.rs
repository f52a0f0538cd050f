//! Property tests for the algebraic laws the engine relies on. Everything
//! is exact arithmetic, so all comparisons are literal equality.

use proptest::prelude::*;

use weylcalc::autos::{conjugation_c, exp_omega_bar, omega_bar, u_kappa};
use weylcalc::classical::{
    hamiltonian_apply, poisson_bracket, symbol_compat_check, PolySymbol,
};
use weylcalc::ratpoly::{poly_potential, rat, RationalPoly};
use weylcalc::sample;
use weylcalc::weyl::{lie_derivative, lie_derivative_symbolic, DiffOp};

fn seeded() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 1usize..=3)
}

proptest! {
    #[test]
    fn ring_axioms((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 0);
        let p = sample::random_poly(&mut rng, n, 4, 4);
        let q = sample::random_poly(&mut rng, n, 4, 4);
        let r = sample::random_poly(&mut rng, n, 4, 4);
        prop_assert_eq!(
            p.add(&q).unwrap().add(&r).unwrap(),
            p.add(&q.add(&r).unwrap()).unwrap()
        );
        prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap());
        prop_assert_eq!(
            p.mul(&q.add(&r).unwrap()).unwrap(),
            p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap()
        );
        prop_assert_eq!(
            p.mul(&q).unwrap().mul(&r).unwrap(),
            p.mul(&q.mul(&r).unwrap()).unwrap()
        );
        // exact cancellation leaves the canonical empty form
        prop_assert!(p.add(&p.scale(&rat(-1, 1))).unwrap().is_zero());
    }

    #[test]
    fn partials_commute((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 1);
        let p = sample::random_poly(&mut rng, n, 5, 5);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(
                    p.partial(i).unwrap().partial(j).unwrap(),
                    p.partial(j).unwrap().partial(i).unwrap()
                );
            }
        }
    }

    #[test]
    fn potential_gradient_round_trip((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 2);
        let omega = sample::random_oneform(&mut rng, n, 4);
        let f = poly_potential(omega.components()).unwrap();
        for i in 0..n {
            prop_assert_eq!(&f.partial(i).unwrap(), &omega.components()[i]);
        }
    }

    #[test]
    fn commutator_jacobi_and_filtration((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 3);
        let a = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let b = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let c = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let br = |x: &DiffOp, y: &DiffOp| x.bracket(y).unwrap();
        let jac = br(&a, &br(&b, &c))
            .add(&br(&b, &br(&c, &a)))
            .unwrap()
            .add(&br(&c, &br(&a, &b)))
            .unwrap();
        prop_assert!(jac.is_zero());

        if let (Some(oa), Some(ob)) = (a.order(), b.order()) {
            let bound = oa as isize + ob as isize - 1;
            prop_assert!(br(&a, &b).order_at_most(bound));
        }
    }

    #[test]
    fn application_respects_composition((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 4);
        let a = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let b = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let f = sample::random_poly(&mut rng, n, 3, 3);
        prop_assert_eq!(
            a.compose(&b).unwrap().apply(&f).unwrap(),
            a.apply(&b.apply(&f).unwrap()).unwrap()
        );
    }

    #[test]
    fn adjoint_is_an_involutive_antihomomorphism((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 5);
        let a = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let b = sample::random_diffop(&mut rng, n, 3, 2, 3);
        prop_assert_eq!(a.formal_adjoint().formal_adjoint(), a.clone());
        prop_assert_eq!(
            a.compose(&b).unwrap().formal_adjoint(),
            b.formal_adjoint().compose(&a.formal_adjoint()).unwrap()
        );
    }

    #[test]
    fn lie_derivative_agrees_with_shift_evaluator((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 6);
        let x = sample::random_vector_field(&mut rng, n, 3);
        let d = sample::random_diffop(&mut rng, n, 3, 2, 3);
        prop_assert_eq!(
            lie_derivative(&x, &d).unwrap(),
            lie_derivative_symbolic(&x, &d).unwrap()
        );
    }

    #[test]
    fn poisson_axioms_and_grading((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 7);
        let p = sample::random_symbol(&mut rng, n, 3, 3, 3);
        let q = sample::random_symbol(&mut rng, n, 3, 3, 3);
        let r = sample::random_symbol(&mut rng, n, 3, 3, 3);
        let pb = |x: &PolySymbol, y: &PolySymbol| poisson_bracket(x, y).unwrap();
        prop_assert_eq!(pb(&p, &q), pb(&q, &p).neg());
        let jac = pb(&p, &pb(&q, &r))
            .add(&pb(&q, &pb(&r, &p)))
            .unwrap()
            .add(&pb(&r, &pb(&p, &q)))
            .unwrap();
        prop_assert!(jac.is_zero());
        prop_assert_eq!(
            pb(&p, &q.mul(&r).unwrap()),
            pb(&p, &q).mul(&r).unwrap().add(&q.mul(&pb(&p, &r)).unwrap()).unwrap()
        );

        // grading: homogeneous degrees i and j bracket into i + j - 1
        for i in 0..=3usize {
            for j in 1..=3usize {
                let b = pb(&p.graded_component(i), &q.graded_component(j));
                prop_assert!(b.is_zero() || b.xi_degree() == Some(i + j - 1));
            }
        }
    }

    #[test]
    fn principal_symbol_is_compatible((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 8);
        let mut a = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let mut b = sample::random_diffop(&mut rng, n, 3, 2, 3);
        if a.is_zero() {
            a = DiffOp::partial(n, 0);
        }
        if b.is_zero() {
            b = DiffOp::from_function(RationalPoly::var(n, 0));
        }
        let report = symbol_compat_check(&a, &b).unwrap();
        prop_assert!(report.product_ok);
        prop_assert!(report.bracket_ok);
    }

    #[test]
    fn hamiltonian_apply_matches_iterated_brackets((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 9);
        let mut p = sample::random_symbol(&mut rng, n, 3, 2, 3);
        if p.is_zero() {
            p = PolySymbol::xi(n, 0);
        }
        let f = sample::random_poly(&mut rng, n, 3, 3);
        let mut cur = PolySymbol::from_function(f.clone());
        for k in 0..=3usize {
            prop_assert_eq!(&hamiltonian_apply(&p, &f, k).unwrap(), &cur);
            cur = poisson_bracket(&p, &cur).unwrap();
        }
    }

    #[test]
    fn conjugation_is_a_bracket_involution((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 10);
        let a = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let b = sample::random_diffop(&mut rng, n, 3, 2, 3);
        prop_assert_eq!(conjugation_c(&conjugation_c(&a)), a.clone());
        prop_assert_eq!(
            conjugation_c(&a.bracket(&b).unwrap()),
            conjugation_c(&a).bracket(&conjugation_c(&b)).unwrap()
        );
    }

    #[test]
    fn lowering_derivation_and_its_exponential((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 11);
        let omega = sample::random_oneform(&mut rng, n, 3);
        let a = sample::random_diffop(&mut rng, n, 3, 2, 3);
        let b = sample::random_diffop(&mut rng, n, 3, 2, 3);

        // omega_bar is a derivation of the bracket
        let lhs = omega_bar(&omega, &a.bracket(&b).unwrap()).unwrap();
        let rhs = omega_bar(&omega, &a)
            .unwrap()
            .bracket(&b)
            .unwrap()
            .add(&a.bracket(&omega_bar(&omega, &b).unwrap()).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);

        // its exponential is the ad-series of the potential
        let f = DiffOp::from_function(omega.potential());
        let mut term = a.clone();
        let mut series = a.clone();
        let mut factorial: i64 = 1;
        for k in 1..=a.order().unwrap_or(0) {
            term = term.bracket(&f).unwrap();
            factorial *= k as i64;
            series = series.add(&term.scale(&rat(1, factorial))).unwrap();
        }
        prop_assert_eq!(exp_omega_bar(&omega, &a).unwrap(), series);
    }

    #[test]
    fn grading_twist_preserves_poisson_brackets((seed, n) in seeded()) {
        let mut rng = sample::rng_for(seed, 12);
        let p = sample::random_symbol(&mut rng, n, 3, 2, 3);
        let q = sample::random_symbol(&mut rng, n, 3, 2, 3);
        for kappa in [rat(1, 1), rat(-1, 1), rat(2, 1), rat(-2, 1), rat(1, 2), rat(3, 1)] {
            let lhs = u_kappa(&kappa, &poisson_bracket(&p, &q).unwrap()).unwrap();
            let rhs = poisson_bracket(
                &u_kappa(&kappa, &p).unwrap(),
                &u_kappa(&kappa, &q).unwrap(),
            )
            .unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
