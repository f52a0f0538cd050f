//! End-to-end acceptance checks. Each test prints as one pass/fail line;
//! all arithmetic is exact, so every comparison is literal equality.

use assert_cmd::Command;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use weylcalc::autos::{
    conjugation_c, conjugation_c_shift, d1_automorphism, d1_recover_parameters,
    d_automorphism, d_recover_parameters, phase_lift, s_automorphism,
    s_recover_parameters, translate_covector, u_kappa,
};
use weylcalc::classical::{poisson_bracket, principal_symbol, PolySymbol};
use weylcalc::classify::{solve_admissible, AdmissibleTuple, TruncatedSpace};
use weylcalc::ratpoly::{rat, MultiIndex, Rational, RationalPoly};
use weylcalc::sample;
use weylcalc::verify;
use weylcalc::weyl::{
    indices_up_to_degree, lie_derivative, lie_derivative_symbolic, DiffOp,
};

fn dims() -> impl Iterator<Item = usize> {
    (0..).map(|t| 1 + t % 3)
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = sample::random_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

#[test]
fn c01_conjugation_identities() {
    let report = verify::lemma_c_suite(300, 11);
    assert!(report.passed, "failures: {:?}", report.failures);
}

#[test]
fn c02_adjoint_consistency() {
    for (trial, n) in dims().take(300).enumerate() {
        let mut rng = sample::rng_for(23, trial as u64);
        let d = sample::random_diffop(&mut rng, n, 4, 3, 4);
        assert_eq!(conjugation_c(&d), d.formal_adjoint().neg());

        let coeff = sample::random_nonzero_poly(&mut rng, n, 3, 2);
        let alpha = MultiIndex::new((0..n).map(|_| rng.gen_range(0..=3)).collect());
        let single = DiffOp::term(coeff, alpha);
        assert_eq!(conjugation_c(&single), conjugation_c_shift(&single));
    }
}

#[test]
fn c03_symbol_compatibility() {
    let report = verify::theorem1_suite(300, 31);
    assert!(report.passed, "failures: {:?}", report.failures);
}

#[test]
fn c04_exponentiated_lowering() {
    let report = verify::exp_omega_suite(300, 41);
    assert!(report.passed, "failures: {:?}", report.failures);
}

#[test]
fn c05_order_one_family_and_recovery() {
    for draw in 0..20u64 {
        let n = 1 + (draw as usize) % 3;
        let mut rng = sample::rng_for(53, draw);
        let kappa = nonzero_rational(&mut rng);
        let lambda = sample::random_rational(&mut rng);
        let omega = sample::random_oneform(&mut rng, n, 3);
        let phi = sample::random_polydiffeo(&mut rng, n);
        let map =
            |d: &DiffOp| d1_automorphism(&kappa, &lambda, &omega, &phi, d).unwrap();

        for _ in 0..100 {
            let a = sample::random_diffop(&mut rng, n, 1, 2, 3);
            let b = sample::random_diffop(&mut rng, n, 1, 2, 3);
            let lhs = map(&a.bracket(&b).unwrap());
            let rhs = map(&a).bracket(&map(&b)).unwrap();
            assert_eq!(lhs, rhs, "draw {} bracket preservation", draw);
        }

        let rec = d1_recover_parameters(map, n).unwrap();
        assert_eq!(rec.kappa, kappa);
        assert_eq!(rec.lambda, lambda);
        assert_eq!(rec.phi_inverse, phi.inverse().to_vec());
        for i in 0..n {
            let image = omega.components()[i].compose(phi.inverse()).unwrap();
            assert_eq!(rec.omega_images[i], image);
        }
    }
}

#[test]
fn c06_symbol_family_and_restriction() {
    for draw in 0..20u64 {
        let n = 1 + (draw as usize) % 3;
        let mut rng = sample::rng_for(61, draw);
        let kappa = nonzero_rational(&mut rng);
        let omega = sample::random_oneform(&mut rng, n, 3);
        let phi = sample::random_polydiffeo(&mut rng, n);
        let map = |p: &PolySymbol| s_automorphism(&kappa, &omega, &phi, p).unwrap();

        for _ in 0..100 {
            let p = sample::random_symbol(&mut rng, n, 3, 2, 3);
            let q = sample::random_symbol(&mut rng, n, 3, 2, 3);
            let lhs = map(&poisson_bracket(&p, &q).unwrap());
            let rhs = poisson_bracket(&map(&p), &map(&q)).unwrap();
            assert_eq!(lhs, rhs, "draw {} Poisson preservation", draw);
        }

        // restriction to functions is kappa * (f o phi^-1)
        let f = sample::random_nonzero_poly(&mut rng, n, 3, 3);
        let expected = phi.push_function(&f).unwrap().scale(&kappa);
        assert_eq!(map(&PolySymbol::from_function(f)).as_function(), Some(expected));

        // covector translation on the first generator
        let xi1 = PolySymbol::xi(n, 0);
        let shifted = translate_covector(&omega, &xi1).unwrap();
        let expected = xi1
            .add(&PolySymbol::from_function(omega.components()[0].clone()))
            .unwrap();
        assert_eq!(shifted, expected);

        let rec = s_recover_parameters(map, n).unwrap();
        assert_eq!(rec.kappa, kappa);
        assert_eq!(rec.phi_inverse, phi.inverse().to_vec());
        assert_eq!(rec.omega, omega.components().to_vec());
    }
}

#[test]
fn c07_full_family_and_induced_symbol_map() {
    for a in 0u8..=1 {
        for draw in 0..10u64 {
            let n = 1 + (draw as usize) % 3;
            let mut rng = sample::rng_for(71 + a as u64, draw);
            let omega = sample::random_oneform(&mut rng, n, 3);
            let phi = sample::random_polydiffeo(&mut rng, n);
            let map = |d: &DiffOp| d_automorphism(a, &omega, &phi, d).unwrap();

            for _ in 0..100 {
                let d1 = sample::random_diffop(&mut rng, n, 3, 2, 3);
                let d2 = sample::random_diffop(&mut rng, n, 3, 2, 3);
                let lhs = map(&d1.bracket(&d2).unwrap());
                let rhs = map(&d1).bracket(&map(&d2)).unwrap();
                assert_eq!(lhs, rhs, "a={} draw {} bracket preservation", a, draw);
            }

            let rec = d_recover_parameters(map, n).unwrap();
            assert_eq!(rec.a, a);
            assert_eq!(rec.phi_inverse, phi.inverse().to_vec());
            for i in 0..n {
                let image = omega.components()[i].compose(phi.inverse()).unwrap();
                assert_eq!(rec.omega_images[i], image);
            }

            // induced symbol map is the lifted grading sign flip
            let d = sample::random_diffop(&mut rng, n, 3, 2, 3);
            if d.is_zero() {
                continue;
            }
            let kappa = if a == 0 { Rational::one() } else { -Rational::one() };
            let lhs = principal_symbol(&map(&d)).unwrap();
            let scaled = u_kappa(&kappa, &principal_symbol(&d).unwrap()).unwrap();
            let lifted = phase_lift(&phi, &scaled).unwrap();
            assert_eq!(lhs, lifted.graded_component(d.order().unwrap()));
        }
    }
}

#[test]
fn c08_classification_is_stable() {
    let expected = vec![
        AdmissibleTuple {
            kappa: -Rational::one(),
            lambda: Rational::one(),
            c1: Rational::one(),
            c2: -Rational::one(),
        },
        AdmissibleTuple {
            kappa: Rational::one(),
            lambda: Rational::zero(),
            c1: Rational::zero(),
            c2: Rational::zero(),
        },
    ];
    let grid = [rat(1, 1), rat(-1, 1), rat(2, 1), rat(1, 2), rat(-2, 1)];
    for n in 1..=3 {
        for d in 2..=4 {
            let space = TruncatedSpace::new(n, d);
            let mut found = solve_admissible(&space, &grid);
            found.sort();
            assert_eq!(found, expected, "dim {} coeff degree {}", n, d);
        }
    }
}

#[test]
fn c09_lie_derivative_cross_check() {
    for (trial, n) in dims().take(300).enumerate() {
        let mut rng = sample::rng_for(97, trial as u64);
        let x = sample::random_vector_field(&mut rng, n, 3);
        let d = sample::random_diffop(&mut rng, n, 3, 2, 3);
        assert_eq!(
            lie_derivative(&x, &d).unwrap(),
            lie_derivative_symbolic(&x, &d).unwrap()
        );
    }
}

#[test]
fn c10_polynomial_ad_nilpotency() {
    // ad_{d1} kills every coefficient polynomial of degree <= m at depth
    // m+1, so the ad-nilpotency criterion cannot separate functions from
    // higher-order operators over polynomial coefficients.
    for n in 1..=2usize {
        let d1 = DiffOp::partial(n, 0);
        for m in 0..=5usize {
            for idx in indices_up_to_degree(n, m) {
                let f = DiffOp::from_function(RationalPoly::monomial(
                    n,
                    idx,
                    Rational::one(),
                ));
                assert!(d1.ad_power(&f, m + 1).unwrap().is_zero());
            }
            // sharp: x1^m survives m applications
            let probe = DiffOp::from_function(RationalPoly::monomial(
                n,
                MultiIndex::new(vec![m as u32; 1].into_iter().chain(vec![0; n - 1]).collect()),
                Rational::one(),
            ));
            assert!(!d1.ad_power(&probe, m).unwrap().is_zero());
        }
    }
}

#[test]
fn c11_bracket_axioms() {
    let report = verify::poisson_axioms_suite(300, 101);
    assert!(report.passed, "failures: {:?}", report.failures);
}

#[test]
fn c12_cli_round_trip_and_json() {
    let bin = || Command::cargo_bin("weylcalc").unwrap();

    let out = bin().args(["bracket", "d1", "x1"]).assert().success();
    assert_eq!(String::from_utf8_lossy(&out.get_output().stdout), "1\n");

    // parse/print round trip: composing with 1 echoes the normal form
    for (trial, n) in dims().take(200).enumerate() {
        let mut rng = sample::rng_for(113, trial as u64);
        let d = sample::random_diffop(&mut rng, n, 3, 2, 4);
        let text = d.to_string();
        let out = bin()
            .args(["--dim", &n.to_string(), "compose", &text, "1"])
            .assert()
            .success();
        let echoed = String::from_utf8_lossy(&out.get_output().stdout);
        assert_eq!(echoed.trim_end(), text, "round trip failed for '{}'", text);
    }

    // JSON outputs deserialize back into the engine's own types
    let out = bin()
        .args(["--json", "compose", "x1*d1", "d1 + x2"])
        .assert()
        .success();
    let parsed: DiffOp =
        serde_json::from_slice(&out.get_output().stdout).expect("operator JSON");
    assert_eq!(parsed.dim(), 2);

    let out = bin()
        .args(["--json", "symbol", "x1*d1^2 + d2"])
        .assert()
        .success();
    let parsed: PolySymbol =
        serde_json::from_slice(&out.get_output().stdout).expect("symbol JSON");
    assert_eq!(parsed.xi_degree(), Some(2));

    let out = bin()
        .args(["--dim", "2", "classify", "--coeff-deg", "3"])
        .assert()
        .success();
    let v: Value = serde_json::from_slice(&out.get_output().stdout).expect("classify JSON");
    let admissible = v["admissible"].as_array().expect("admissible array");
    assert_eq!(admissible.len(), 2);
    assert_eq!(v["n"], 2);
}
