//! Seeded random generators for desk-scale test objects. All randomness in
//! the crate flows through `rng_for`, so every trial is reproducible from
//! a (seed, trial) pair.

use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::autos::{OneForm, PolyDiffeo};
use crate::classical::PolySymbol;
use crate::ratpoly::{rat, MultiIndex, Rational, RationalPoly};
use crate::weyl::{DiffOp, VectorField};

/// Deterministic per-trial stream: one base seed, one stream per trial.
pub fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Small rational with numerator in [-6, 6] and denominator in {1, 2, 3}.
pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = rng.gen_range(-6i64..=6);
    let den = rng.gen_range(1i64..=3);
    rat(num, den)
}

fn random_index(rng: &mut ChaCha8Rng, dim: usize, max_degree: usize) -> MultiIndex {
    let mut exps = vec![0u32; dim];
    let degree = rng.gen_range(0..=max_degree);
    for _ in 0..degree {
        exps[rng.gen_range(0..dim)] += 1;
    }
    MultiIndex::new(exps)
}

/// Sparse polynomial with up to `max_terms` monomials of degree <= `max_degree`.
pub fn random_poly(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_degree: usize,
    max_terms: usize,
) -> RationalPoly {
    let mut out = RationalPoly::zero(dim);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let m = RationalPoly::monomial(
            dim,
            random_index(rng, dim, max_degree),
            random_rational(rng),
        );
        out = out.add(&m).expect("dims agree");
    }
    out
}

/// Like `random_poly` but never returns zero.
pub fn random_nonzero_poly(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_degree: usize,
    max_terms: usize,
) -> RationalPoly {
    loop {
        let p = random_poly(rng, dim, max_degree, max_terms);
        if !p.is_zero() {
            return p;
        }
    }
}

/// Operator with up to `max_terms` normal-form terms of order <= `max_order`
/// and coefficients of degree <= `coeff_degree`.
pub fn random_diffop(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_order: usize,
    coeff_degree: usize,
    max_terms: usize,
) -> DiffOp {
    let mut out = DiffOp::zero(dim);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let alpha = random_index(rng, dim, max_order);
        let coeff = random_poly(rng, dim, coeff_degree, 2);
        out = out.add(&DiffOp::term(coeff, alpha)).expect("dims agree");
    }
    out
}

/// Symbol with up to `max_terms` terms of xi-degree <= `max_xi_degree`.
pub fn random_symbol(
    rng: &mut ChaCha8Rng,
    dim: usize,
    max_xi_degree: usize,
    coeff_degree: usize,
    max_terms: usize,
) -> PolySymbol {
    let mut out = PolySymbol::zero(dim);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let alpha = random_index(rng, dim, max_xi_degree);
        let coeff = random_poly(rng, dim, coeff_degree, 2);
        out = out.add(&PolySymbol::term(coeff, alpha)).expect("dims agree");
    }
    out
}

pub fn random_vector_field(
    rng: &mut ChaCha8Rng,
    dim: usize,
    coeff_degree: usize,
) -> VectorField {
    VectorField::new(
        (0..dim)
            .map(|_| random_poly(rng, dim, coeff_degree, 3))
            .collect(),
    )
}

/// Closed 1-form drawn as the differential of a random potential, so
/// closedness holds exactly by construction.
pub fn random_oneform(rng: &mut ChaCha8Rng, dim: usize, potential_degree: usize) -> OneForm {
    let f = random_poly(rng, dim, potential_degree, 4);
    OneForm::differential_of(&f)
}

/// Polynomial diffeomorphism built from a few elementary pieces with exact
/// inverses: translations, unimodular shears between axes, and (for n > 1)
/// triangular polynomial shears x_i -> x_i + p(x_j).
pub fn random_polydiffeo(rng: &mut ChaCha8Rng, dim: usize) -> PolyDiffeo {
    let mut out = PolyDiffeo::identity(dim);
    let pieces = rng.gen_range(1..=3);
    for _ in 0..pieces {
        let piece = match rng.gen_range(0..3) {
            0 => {
                // translation
                let shift: Vec<Rational> =
                    (0..dim).map(|_| random_rational(rng)).collect();
                let mut matrix = vec![vec![Rational::from(num_bigint::BigInt::from(0)); dim]; dim];
                for (i, row) in matrix.iter_mut().enumerate() {
                    row[i] = Rational::one();
                }
                PolyDiffeo::affine(&matrix, &shift).expect("identity matrix")
            }
            1 if dim > 1 => {
                // linear shear x_i += c x_j, i != j
                let i = rng.gen_range(0..dim);
                let mut j = rng.gen_range(0..dim - 1);
                if j >= i {
                    j += 1;
                }
                let c = random_rational(rng);
                let mut matrix = vec![vec![Rational::from(num_bigint::BigInt::from(0)); dim]; dim];
                for (k, row) in matrix.iter_mut().enumerate() {
                    row[k] = Rational::one();
                }
                matrix[i][j] = c;
                let shift = vec![Rational::from(num_bigint::BigInt::from(0)); dim];
                PolyDiffeo::affine(&matrix, &shift).expect("unit determinant")
            }
            _ if dim > 1 => {
                // polynomial shear x_i -> x_i + p(x_j), inverse subtracts p
                let i = rng.gen_range(0..dim);
                let mut j = rng.gen_range(0..dim - 1);
                if j >= i {
                    j += 1;
                }
                let c = random_rational(rng);
                let e = rng.gen_range(1..=2u32);
                let p = RationalPoly::var(dim, j).pow(e).scale(&c);
                let mut forward: Vec<RationalPoly> =
                    (0..dim).map(|k| RationalPoly::var(dim, k)).collect();
                let mut inverse = forward.clone();
                forward[i] = forward[i].add(&p).expect("dims agree");
                inverse[i] = inverse[i].sub(&p).expect("dims agree");
                PolyDiffeo::new(forward, inverse).expect("triangular shear")
            }
            _ => {
                // n = 1 fallback: scaling by a non-zero rational
                let mut c = random_rational(rng);
                if c == Rational::from(num_bigint::BigInt::from(0)) {
                    c = Rational::one();
                }
                PolyDiffeo::affine(&[vec![c]], &[Rational::from(num_bigint::BigInt::from(0))])
                    .expect("non-zero scaling")
            }
        };
        out = out.compose(&piece).expect("dims agree");
    }
    out
}
