//! The automorphism families of the operator and symbol Lie algebras:
//! the lowering derivation attached to a closed 1-form and its exponential,
//! the conjugation C, the grading maps U_kappa, pushforward along a
//! polynomial diffeomorphism, the order-1 family, the symbol family, the
//! full operator family, parameter recovery, and exact verification.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classical::{poisson_bracket, PolySymbol, SymbolError};
use crate::ratpoly::{poly_potential, MultiIndex, PolyError, Rational, RationalPoly};
use crate::weyl::{rational_pow, DiffOp, OpError, VectorField};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutoError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("kappa must be non-zero")]
    ZeroKappa,
    #[error("operator order exceeds 1")]
    OrderTooHigh,
    #[error("maps are not mutually inverse")]
    NotInverse,
    #[error("map is not in the family: {0}")]
    NotInFamily(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// A closed polynomial 1-form; closedness is verified at construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OneForm {
    components: Vec<RationalPoly>,
}

impl OneForm {
    pub fn new(components: Vec<RationalPoly>) -> Result<Self, AutoError> {
        let n = components.len();
        for c in &components {
            if c.dim() != n {
                return Err(AutoError::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if components[j].partial(i)? != components[i].partial(j)? {
                    return Err(AutoError::Poly(PolyError::NotClosed));
                }
            }
        }
        Ok(OneForm { components })
    }

    pub fn zero(dim: usize) -> Self {
        OneForm {
            components: vec![RationalPoly::zero(dim); dim],
        }
    }

    /// The exact form df.
    pub fn differential_of(f: &RationalPoly) -> Self {
        let n = f.dim();
        OneForm {
            components: (0..n).map(|i| f.partial(i).expect("axis in range")).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[RationalPoly] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// Primitive with f(0) = 0 (every closed polynomial form on R^n is exact).
    pub fn potential(&self) -> RationalPoly {
        poly_potential(&self.components).expect("closed by construction")
    }

    /// Evaluation omega(X) = sum_i omega_i X^i.
    pub fn apply(&self, x: &VectorField) -> Result<RationalPoly, AutoError> {
        if x.dim() != self.dim() {
            return Err(AutoError::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let mut out = RationalPoly::zero(self.dim());
        for (w, c) in self.components.iter().zip(x.components()) {
            out = out.add(&w.mul(c)?)?;
        }
        Ok(out)
    }
}

/// A polynomial diffeomorphism of R^n given by mutually inverse polynomial
/// maps; the pair is verified exactly at construction.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PolyDiffeo {
    forward: Vec<RationalPoly>,
    inverse: Vec<RationalPoly>,
}

impl PolyDiffeo {
    pub fn new(
        forward: Vec<RationalPoly>,
        inverse: Vec<RationalPoly>,
    ) -> Result<Self, AutoError> {
        let n = forward.len();
        if inverse.len() != n {
            return Err(AutoError::DimensionMismatch {
                expected: n,
                found: inverse.len(),
            });
        }
        for m in forward.iter().chain(&inverse) {
            if m.dim() != n {
                return Err(AutoError::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
        }
        let d = PolyDiffeo { forward, inverse };
        for axis in 0..n {
            let id = RationalPoly::var(n, axis);
            if d.forward[axis].compose(&d.inverse)? != id
                || d.inverse[axis].compose(&d.forward)? != id
            {
                return Err(AutoError::NotInverse);
            }
        }
        Ok(d)
    }

    pub fn identity(dim: usize) -> Self {
        let id: Vec<_> = (0..dim).map(|i| RationalPoly::var(dim, i)).collect();
        PolyDiffeo {
            forward: id.clone(),
            inverse: id,
        }
    }

    /// Affine map x -> Mx + b with an exactly inverted rational matrix.
    pub fn affine(matrix: &[Vec<Rational>], shift: &[Rational]) -> Result<Self, AutoError> {
        let n = shift.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(AutoError::DimensionMismatch {
                expected: n,
                found: matrix.len(),
            });
        }
        let inv = invert_matrix(matrix).ok_or(AutoError::NotInverse)?;
        let forward: Vec<RationalPoly> = (0..n)
            .map(|i| {
                let mut p = RationalPoly::constant(n, shift[i].clone());
                for j in 0..n {
                    p = p
                        .add(&RationalPoly::var(n, j).scale(&matrix[i][j]))
                        .expect("dims agree");
                }
                p
            })
            .collect();
        // inverse: x -> M^-1 (x - b)
        let inverse: Vec<RationalPoly> = (0..n)
            .map(|i| {
                let mut p = RationalPoly::zero(n);
                for j in 0..n {
                    let shifted = RationalPoly::var(n, j)
                        .sub(&RationalPoly::constant(n, shift[j].clone()))
                        .expect("dims agree");
                    p = p.add(&shifted.scale(&inv[i][j])).expect("dims agree");
                }
                p
            })
            .collect();
        PolyDiffeo::new(forward, inverse)
    }

    /// Composition: (self after other)(x) = self(other(x)).
    pub fn compose(&self, other: &PolyDiffeo) -> Result<PolyDiffeo, AutoError> {
        let forward = self
            .forward
            .iter()
            .map(|c| c.compose(&other.forward))
            .collect::<Result<Vec<_>, _>>()?;
        let inverse = other
            .inverse
            .iter()
            .map(|c| c.compose(&self.inverse))
            .collect::<Result<Vec<_>, _>>()?;
        PolyDiffeo::new(forward, inverse)
    }

    pub fn dim(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[RationalPoly] {
        &self.forward
    }

    pub fn inverse(&self) -> &[RationalPoly] {
        &self.inverse
    }

    /// f -> f o phi^-1 (the algebra automorphism A implemented by phi).
    pub fn push_function(&self, f: &RationalPoly) -> Result<RationalPoly, AutoError> {
        Ok(f.compose(&self.inverse)?)
    }

    /// f -> f o phi.
    pub fn pull_function(&self, f: &RationalPoly) -> Result<RationalPoly, AutoError> {
        Ok(f.compose(&self.forward)?)
    }
}

fn invert_matrix(matrix: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = matrix.len();
    // Gauss-Jordan on [M | I] with exact pivoting.
    let mut aug: Vec<Vec<Rational>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                });
            }
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for v in aug[col].iter_mut() {
            *v /= &p;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in 0..2 * n {
                    let delta = &aug[col][c] * &factor;
                    aug[r][c] -= delta;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// The lowering derivation attached to a closed 1-form: D -> [D, f] with
/// f the primitive of omega. Order drops by at least one.
pub fn omega_bar(omega: &OneForm, d: &DiffOp) -> Result<DiffOp, AutoError> {
    if omega.dim() != d.dim() {
        return Err(AutoError::DimensionMismatch {
            expected: d.dim(),
            found: omega.dim(),
        });
    }
    let f = DiffOp::from_function(omega.potential());
    Ok(d.bracket(&f)?)
}

/// Exponential of the lowering derivation: sum_{j<=order(d)} omega_bar^j(d)/j!.
/// Exact because the derivation is lowering; identity on functions.
pub fn exp_omega_bar(omega: &OneForm, d: &DiffOp) -> Result<DiffOp, AutoError> {
    let order = match d.order() {
        None => return Ok(d.clone()),
        Some(o) => o,
    };
    let mut out = DiffOp::zero(d.dim());
    let mut cur = d.clone();
    let mut factorial = Rational::one();
    for j in 0..=order {
        if j > 0 {
            factorial *= Rational::from(num_bigint::BigInt::from(j as u32));
            cur = omega_bar(omega, &cur)?;
        }
        if cur.is_zero() {
            break;
        }
        out = out.add(&cur.scale(&(Rational::one() / &factorial)))?;
    }
    Ok(out)
}

/// The conjugation automorphism: C = -(formal adjoint) for the flat volume.
/// C(f) = -f, C(X) = X + div X, C^2 = id.
pub fn conjugation_c(d: &DiffOp) -> DiffOp {
    d.formal_adjoint().neg()
}

/// Independent evaluator for C on a single term f d^alpha via the covector
/// shift form: with k = |alpha|, the term's polynomial P_k(xi) = xi^alpha is
/// replaced by (-1)^(k+1) P_k(xi + eta), where eta marks derivatives of f.
/// Expanded in a 2n-variable ring and read back into normal form.
pub fn conjugation_c_shift_term(coeff: &RationalPoly, alpha: &MultiIndex) -> DiffOp {
    let n = coeff.dim();
    let k = alpha.degree();
    let sign = if (k + 1) % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    };
    // P_k(xi) as a polynomial in 2n variables (xi_1..xi_n, eta_1..eta_n)
    let mut padded = alpha.exponents().to_vec();
    padded.extend(std::iter::repeat(0).take(n));
    let p = RationalPoly::monomial(2 * n, MultiIndex::new(padded), Rational::one());
    // substitute xi_i -> xi_i + eta_i
    let maps: Vec<RationalPoly> = (0..2 * n)
        .map(|i| {
            if i < n {
                RationalPoly::var(2 * n, i)
                    .add(&RationalPoly::var(2 * n, n + i))
                    .expect("dims agree")
            } else {
                RationalPoly::var(2 * n, i)
            }
        })
        .collect();
    let shifted = p.compose(&maps).expect("dims agree");
    let mut out = DiffOp::zero(n);
    for (idx, c) in shifted.terms() {
        let exps = idx.exponents();
        let xi_part = MultiIndex::new(exps[..n].to_vec());
        let eta_part = MultiIndex::new(exps[n..].to_vec());
        let df = coeff.partial_multi(&eta_part);
        if df.is_zero() {
            continue;
        }
        let term = DiffOp::term(df.scale(&(c * &sign)), xi_part);
        out = out.add(&term).expect("dims agree");
    }
    out
}

/// C evaluated term by term through the covector-shift form.
pub fn conjugation_c_shift(d: &DiffOp) -> DiffOp {
    let mut out = DiffOp::zero(d.dim());
    for (alpha, coeff) in d.terms() {
        out = out
            .add(&conjugation_c_shift_term(coeff, alpha))
            .expect("dims agree");
    }
    out
}

/// Grading automorphism of the symbol algebra: kappa^(1-i) on grade i.
pub fn u_kappa(kappa: &Rational, p: &PolySymbol) -> Result<PolySymbol, AutoError> {
    if kappa.is_zero() {
        return Err(AutoError::ZeroKappa);
    }
    let mut out = PolySymbol::zero(p.dim());
    let top = p.xi_degree().unwrap_or(0);
    for i in 0..=top {
        let comp = p.graded_component(i);
        if comp.is_zero() {
            continue;
        }
        let factor = rational_pow(kappa, 1 - i as i64);
        out = out.add(&comp.scale(&factor))?;
    }
    Ok(out)
}

/// Pushforward of an operator along a polynomial diffeomorphism:
/// A_*(D) = A o D o A^-1 with A(f) = f o phi^-1. Computed on the normal
/// form through the images of the coordinate derivatives.
pub fn pushforward(phi: &PolyDiffeo, d: &DiffOp) -> Result<DiffOp, AutoError> {
    if phi.dim() != d.dim() {
        return Err(AutoError::DimensionMismatch {
            expected: d.dim(),
            found: phi.dim(),
        });
    }
    let n = d.dim();
    // phi_*(d_i) = sum_j ((d_i phi^j) o phi^-1) d_j; these commute pairwise.
    let pushed_partials: Vec<DiffOp> = (0..n)
        .map(|i| {
            let comps = (0..n)
                .map(|j| phi.push_function(&phi.forward()[j].partial(i)?))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(VectorField::new(comps).as_diffop())
        })
        .collect::<Result<Vec<_>, AutoError>>()?;
    let mut out = DiffOp::zero(n);
    for (alpha, coeff) in d.terms() {
        let mut term = DiffOp::from_function(phi.push_function(coeff)?);
        for axis in 0..n {
            for _ in 0..alpha.get(axis) {
                term = term.compose(&pushed_partials[axis])?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Pushforward of a vector field; stays a vector field.
pub fn pushforward_field(phi: &PolyDiffeo, x: &VectorField) -> Result<VectorField, AutoError> {
    Ok(pushforward(phi, &x.as_diffop())?
        .as_vector_field()
        .expect("pushforward preserves D^1_c"))
}

/// Phase lift of a diffeomorphism acting on symbols: the induced map of the
/// operator pushforward. Restricts to f -> f o phi^-1 on grade 0 and sends
/// xi_i to sum_j ((d_i phi^j) o phi^-1) xi_j; a Poisson automorphism.
pub fn phase_lift(phi: &PolyDiffeo, p: &PolySymbol) -> Result<PolySymbol, AutoError> {
    if phi.dim() != p.dim() {
        return Err(AutoError::DimensionMismatch {
            expected: p.dim(),
            found: phi.dim(),
        });
    }
    let n = p.dim();
    let xi_images: Vec<PolySymbol> = (0..n)
        .map(|i| {
            let mut img = PolySymbol::zero(n);
            for j in 0..n {
                let c = phi.push_function(&phi.forward()[j].partial(i)?)?;
                img = img.add(&PolySymbol::term(c, MultiIndex::unit(n, j)))?;
            }
            Ok(img)
        })
        .collect::<Result<Vec<_>, AutoError>>()?;
    let moved = p.map_coeffs(|f| {
        phi.push_function(f)
            .map_err(|_| SymbolError::DimensionMismatch {
                expected: n,
                found: n,
            })
    })?;
    Ok(moved.substitute_xi(&xi_images)?)
}

/// Covector translation xi_i -> xi_i + omega_i(x); the vertical
/// symplectomorphism attached to a closed 1-form, acting on symbols.
pub fn translate_covector(omega: &OneForm, p: &PolySymbol) -> Result<PolySymbol, AutoError> {
    if omega.dim() != p.dim() {
        return Err(AutoError::DimensionMismatch {
            expected: p.dim(),
            found: omega.dim(),
        });
    }
    let n = p.dim();
    let subs: Vec<PolySymbol> = (0..n)
        .map(|i| {
            PolySymbol::xi(n, i)
                .add(&PolySymbol::from_function(omega.components()[i].clone()))
                .expect("dims agree")
        })
        .collect();
    Ok(p.substitute_xi(&subs)?)
}

/// The order-1 automorphism family: with d = X + f,
/// Phi(d) = phi_*(X) + (kappa f + lambda div X + omega(X)) o phi^-1.
pub fn d1_automorphism(
    kappa: &Rational,
    lambda: &Rational,
    omega: &OneForm,
    phi: &PolyDiffeo,
    d: &DiffOp,
) -> Result<DiffOp, AutoError> {
    if kappa.is_zero() {
        return Err(AutoError::ZeroKappa);
    }
    if !d.order_at_most(1) {
        return Err(AutoError::OrderTooHigh);
    }
    let (f, dc) = d.split();
    let x = dc
        .as_vector_field()
        .expect("order <= 1 and constant-free");
    let scalar = f
        .scale(kappa)
        .add(&x.divergence().scale(lambda))?
        .add(&omega.apply(&x)?)?;
    let moved = phi.push_function(&scalar)?;
    Ok(pushforward_field(phi, &x)?
        .as_diffop()
        .add(&DiffOp::from_function(moved))?)
}

/// The symbol automorphism family of the classical algebra:
/// U_kappa, then the phase lift of phi, then translation by omega.
pub fn s_automorphism(
    kappa: &Rational,
    omega: &OneForm,
    phi: &PolyDiffeo,
    p: &PolySymbol,
) -> Result<PolySymbol, AutoError> {
    if kappa.is_zero() {
        return Err(AutoError::ZeroKappa);
    }
    let scaled = u_kappa(kappa, p)?;
    let lifted = phase_lift(phi, &scaled)?;
    translate_covector(omega, &lifted)
}

/// The full operator automorphism family: pushforward after C^a after the
/// exponential of the lowering derivation.
pub fn d_automorphism(
    a: u8,
    omega: &OneForm,
    phi: &PolyDiffeo,
    d: &DiffOp,
) -> Result<DiffOp, AutoError> {
    assert!(a <= 1, "a must be 0 or 1");
    let mut out = exp_omega_bar(omega, d)?;
    if a == 1 {
        out = conjugation_c(&out);
    }
    pushforward(phi, &out)
}

/// Parameters recovered from an order-1 automorphism oracle. The 1-form and
/// the diffeomorphism are recovered through their images under the pullback:
/// `phi_inverse` holds the components of phi^-1 and `omega_images` holds
/// omega_i o phi^-1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredD1 {
    pub kappa: Rational,
    pub lambda: Rational,
    pub phi_inverse: Vec<RationalPoly>,
    pub omega_images: Vec<RationalPoly>,
}

fn expect_function(d: &DiffOp, what: &str) -> Result<RationalPoly, AutoError> {
    let (f, dc) = d.split();
    if !dc.is_zero() {
        return Err(AutoError::NotInFamily(format!(
            "{} should be a multiplication operator",
            what
        )));
    }
    Ok(f)
}

/// Probe operators used for residual homomorphism checks on D^1.
fn d1_probes(dim: usize) -> Vec<DiffOp> {
    let mut probes = vec![DiffOp::identity(dim)];
    for i in 0..dim {
        probes.push(DiffOp::from_function(RationalPoly::var(dim, i)));
        probes.push(DiffOp::partial(dim, i));
        for j in 0..dim {
            probes.push(
                DiffOp::from_function(RationalPoly::var(dim, i))
                    .compose(&DiffOp::partial(dim, j))
                    .expect("dims agree"),
            );
            probes.push(DiffOp::from_function(
                RationalPoly::var(dim, i)
                    .mul(&RationalPoly::var(dim, j))
                    .expect("dims agree"),
            ));
        }
    }
    probes
}

/// Recovers (kappa, lambda, omega, phi) from an oracle for a member of the
/// order-1 family; all objects are uniquely determined by the map.
pub fn d1_recover_parameters<F>(oracle: F, dim: usize) -> Result<RecoveredD1, AutoError>
where
    F: Fn(&DiffOp) -> DiffOp,
{
    // kappa = Phi(1)
    let kappa = expect_function(&oracle(&DiffOp::identity(dim)), "Phi(1)")?
        .as_constant()
        .ok_or_else(|| AutoError::NotInFamily("Phi(1) is not constant".into()))?;
    if kappa.is_zero() {
        return Err(AutoError::NotInFamily("Phi(1) = 0".into()));
    }
    // phi^-1 from the coordinate functions: Phi(x^i) = kappa x^i o phi^-1
    let inv_kappa = Rational::one() / &kappa;
    let phi_inverse: Vec<RationalPoly> = (0..dim)
        .map(|i| {
            let img = expect_function(
                &oracle(&DiffOp::from_function(RationalPoly::var(dim, i))),
                "Phi(x^i)",
            )?;
            Ok(img.scale(&inv_kappa))
        })
        .collect::<Result<_, AutoError>>()?;
    // omega_i o phi^-1 from the zero-order parts of Phi(d_i)
    let omega_images: Vec<RationalPoly> = (0..dim)
        .map(|i| oracle(&DiffOp::partial(dim, i)).function_part())
        .collect();
    // lambda from Phi(x^1 d_1): its zero-order part is
    // (lambda + x^1 omega_1) o phi^-1 and (x^1 omega_1) o phi^-1 factors
    // through already recovered data.
    let xd = DiffOp::from_function(RationalPoly::var(dim, 0))
        .compose(&DiffOp::partial(dim, 0))?;
    let correction = phi_inverse[0].mul(&omega_images[0])?;
    let lambda_poly = oracle(&xd).function_part().sub(&correction)?;
    let lambda = lambda_poly
        .as_constant()
        .ok_or_else(|| AutoError::NotInFamily("divergence coefficient is not constant".into()))?;

    // residual check: the oracle must be a bracket homomorphism on probes
    // and act as kappa (f o phi^-1) on functions
    for f in [
        RationalPoly::var(dim, 0),
        RationalPoly::var(dim, 0).pow(2),
    ] {
        let img = expect_function(&oracle(&DiffOp::from_function(f.clone())), "Phi(f)")?;
        let expected = f.compose(&phi_inverse)?.scale(&kappa);
        if img != expected {
            return Err(AutoError::NotInFamily(
                "action on functions is not kappa (f o phi^-1)".into(),
            ));
        }
    }
    let probes = d1_probes(dim);
    for a in &probes {
        for b in &probes {
            let lhs = oracle(&a.bracket(b)?);
            let rhs = oracle(a).bracket(&oracle(b))?;
            if lhs != rhs {
                return Err(AutoError::NotInFamily(format!(
                    "bracket homomorphism fails on [{}, {}]",
                    a, b
                )));
            }
        }
    }

    Ok(RecoveredD1 {
        kappa,
        lambda,
        phi_inverse,
        omega_images,
    })
}

/// Parameters recovered from a full operator-algebra automorphism oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredD {
    pub a: u8,
    pub phi_inverse: Vec<RationalPoly>,
    pub omega_images: Vec<RationalPoly>,
}

/// Recovers (a, omega, phi) from an oracle for a member of the operator
/// family.
pub fn d_recover_parameters<F>(oracle: F, dim: usize) -> Result<RecoveredD, AutoError>
where
    F: Fn(&DiffOp) -> DiffOp,
{
    let v = expect_function(&oracle(&DiffOp::identity(dim)), "Phi(1)")?
        .as_constant()
        .ok_or_else(|| AutoError::NotInFamily("Phi(1) is not constant".into()))?;
    let a = if v == Rational::one() {
        0u8
    } else if v == -Rational::one() {
        1u8
    } else {
        return Err(AutoError::NotInFamily("Phi(1) is not +-1".into()));
    };
    let sign = if a == 0 {
        Rational::one()
    } else {
        -Rational::one()
    };
    let phi_inverse: Vec<RationalPoly> = (0..dim)
        .map(|i| {
            let img = expect_function(
                &oracle(&DiffOp::from_function(RationalPoly::var(dim, i))),
                "Phi(x^i)",
            )?;
            Ok(img.scale(&sign))
        })
        .collect::<Result<_, AutoError>>()?;
    // Phi(d_i) = phi_*(d_i) + (-1)^a omega_i o phi^-1
    let omega_images: Vec<RationalPoly> = (0..dim)
        .map(|i| oracle(&DiffOp::partial(dim, i)).function_part().scale(&sign))
        .collect();

    // residual checks
    for f in [
        RationalPoly::var(dim, 0),
        RationalPoly::var(dim, 0).pow(2),
    ] {
        let img = expect_function(&oracle(&DiffOp::from_function(f.clone())), "Phi(f)")?;
        let expected = f.compose(&phi_inverse)?.scale(&sign);
        if img != expected {
            return Err(AutoError::NotInFamily(
                "action on functions is not (-1)^a (f o phi^-1)".into(),
            ));
        }
    }
    let mut probes = d1_probes(dim);
    for i in 0..dim {
        // a couple of order-2 probes
        probes.push(DiffOp::partial(dim, i).compose(&DiffOp::partial(dim, i))?);
        probes.push(
            DiffOp::from_function(RationalPoly::var(dim, i))
                .compose(&DiffOp::partial(dim, i))?
                .compose(&DiffOp::partial(dim, i))?,
        );
    }
    for a_op in &probes {
        for b_op in &probes {
            let lhs = oracle(&a_op.bracket(b_op)?);
            let rhs = oracle(a_op).bracket(&oracle(b_op))?;
            if lhs != rhs {
                return Err(AutoError::NotInFamily(format!(
                    "bracket homomorphism fails on [{}, {}]",
                    a_op, b_op
                )));
            }
        }
    }

    Ok(RecoveredD {
        a,
        phi_inverse,
        omega_images,
    })
}

/// Parameters recovered from a symbol-algebra automorphism oracle. Here the
/// 1-form comes back in plain coordinates (no pullback): it is read off the
/// grade-0 parts of the images of the fibre generators through the inverse
/// Jacobian, which is polynomial once phi^-1 is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveredS {
    pub kappa: Rational,
    pub phi_inverse: Vec<RationalPoly>,
    pub omega: Vec<RationalPoly>,
}

/// Recovers (kappa, omega, phi) from an oracle for a member of the symbol
/// family.
pub fn s_recover_parameters<F>(oracle: F, dim: usize) -> Result<RecoveredS, AutoError>
where
    F: Fn(&PolySymbol) -> PolySymbol,
{
    let kappa = oracle(&PolySymbol::one(dim))
        .as_function()
        .and_then(|f| f.as_constant())
        .ok_or_else(|| AutoError::NotInFamily("Phi(1) is not a constant".into()))?;
    if kappa.is_zero() {
        return Err(AutoError::NotInFamily("Phi(1) = 0".into()));
    }
    let inv_kappa = Rational::one() / &kappa;
    let phi_inverse: Vec<RationalPoly> = (0..dim)
        .map(|i| {
            let img = oracle(&PolySymbol::from_function(RationalPoly::var(dim, i)))
                .as_function()
                .ok_or_else(|| {
                    AutoError::NotInFamily("Phi(x^i) is not of grade 0".into())
                })?;
            Ok(img.scale(&inv_kappa))
        })
        .collect::<Result<_, AutoError>>()?;
    // images of the fibre generators: grade 1 gives the lifted Jacobian,
    // grade 0 gives its product with the translation form
    let mut v = Vec::with_capacity(dim);
    for i in 0..dim {
        let img = oracle(&PolySymbol::xi(dim, i));
        if img.xi_degree() > Some(1) {
            return Err(AutoError::NotInFamily(
                "Phi(xi_i) has grade above 1".into(),
            ));
        }
        v.push(img.graded_component(0).as_function().expect("grade 0"));
    }
    // omega_j = sum_k d_j (phi^-1)^k * v_k, the inverse-Jacobian contraction
    let omega: Vec<RationalPoly> = (0..dim)
        .map(|j| {
            let mut acc = RationalPoly::zero(dim);
            for (k, vk) in v.iter().enumerate() {
                acc = acc.add(&phi_inverse[k].partial(j)?.mul(vk)?)?;
            }
            Ok(acc)
        })
        .collect::<Result<_, AutoError>>()?;
    // the recovered form must be closed
    let _ = OneForm::new(omega.clone())?;

    // residual check: Poisson-bracket homomorphism on probes
    let mut probes = vec![PolySymbol::one(dim)];
    for i in 0..dim {
        probes.push(PolySymbol::from_function(RationalPoly::var(dim, i)));
        probes.push(PolySymbol::xi(dim, i));
        for j in 0..dim {
            probes.push(
                PolySymbol::from_function(RationalPoly::var(dim, i))
                    .mul(&PolySymbol::xi(dim, j))
                    .expect("dims agree"),
            );
        }
    }
    for a in &probes {
        for b in &probes {
            let lhs = oracle(&poisson_bracket(a, b)?);
            let rhs = poisson_bracket(&oracle(a), &oracle(b))?;
            if lhs != rhs {
                return Err(AutoError::NotInFamily(format!(
                    "Poisson homomorphism fails on {{{}, {}}}",
                    a, b
                )));
            }
        }
    }

    Ok(RecoveredS {
        kappa,
        phi_inverse,
        omega,
    })
}

/// Which Lie algebra a verification run samples from.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AlgebraKind {
    D,
    D1,
    S,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub algebra: AlgebraKind,
    pub trials: usize,
    pub failures: Vec<TrialFailure>,
    pub passed: bool,
}

impl VerifyReport {
    fn new(algebra: AlgebraKind, trials: usize, failures: Vec<TrialFailure>) -> Self {
        let passed = failures.is_empty();
        VerifyReport {
            algebra,
            trials,
            failures,
            passed,
        }
    }
}

/// Checks that an operator map is a bracket homomorphism on random pairs.
/// For D^1, the homomorphism identity is additionally split into its four
/// projections onto functions and the constant-free part (written for the
/// pairs (D_c, f) and (D_c, Delta_c)), and the first failing projection is
/// reported.
pub fn verify_operator_automorphism<F>(
    map: F,
    algebra: AlgebraKind,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport, AutoError>
where
    F: Fn(&DiffOp) -> DiffOp,
{
    assert!(trials >= 1);
    let mut failures = Vec::new();
    for trial in 0..trials {
        let mut rng = crate::sample::rng_for(seed, trial as u64);
        let (a, b) = match algebra {
            AlgebraKind::D => (
                crate::sample::random_diffop(&mut rng, dim, 3, 2, 3),
                crate::sample::random_diffop(&mut rng, dim, 3, 2, 3),
            ),
            AlgebraKind::D1 => (
                crate::sample::random_diffop(&mut rng, dim, 1, 2, 3),
                crate::sample::random_diffop(&mut rng, dim, 1, 2, 3),
            ),
            AlgebraKind::S => panic!("use verify_symbol_automorphism for S"),
        };
        let lhs = map(&a.bracket(&b)?);
        let rhs = map(&a).bracket(&map(&b))?;
        if lhs != rhs {
            failures.push(TrialFailure {
                trial,
                detail: format!("Phi[a,b] != [Phi a, Phi b] for a = {}, b = {}", a, b),
            });
            continue;
        }
        if algebra == AlgebraKind::D1 {
            if let Some(detail) = d1_projection_failure(&map, &a, &b)? {
                failures.push(TrialFailure { trial, detail });
            }
        }
    }
    Ok(VerifyReport::new(algebra, trials, failures))
}

/// First failing projection of the homomorphism identity on D^1, if any.
/// H1/H2 are the function and constant-free projections for a pair
/// (D_c, f); H3/H4 the same projections for a pair (D_c, Delta_c).
fn d1_projection_failure<F>(
    map: &F,
    a: &DiffOp,
    b: &DiffOp,
) -> Result<Option<String>, AutoError>
where
    F: Fn(&DiffOp) -> DiffOp,
{
    let dc = a.constant_free_part();
    let f = DiffOp::from_function(b.function_part());
    let delta_c = b.constant_free_part();

    // (D_c, f) pair
    let lhs = map(&dc.bracket(&f)?);
    let rhs = map(&dc).bracket(&map(&f))?;
    let (l0, lc) = lhs.split();
    let (r0, rc) = rhs.split();
    if l0 != r0 {
        return Ok(Some("H1: function projection of Phi[D_c, f] mismatch".into()));
    }
    if lc != rc {
        return Ok(Some("H2: D_c projection of Phi[D_c, f] mismatch".into()));
    }

    // (D_c, Delta_c) pair
    let lhs = map(&dc.bracket(&delta_c)?);
    let rhs = map(&dc).bracket(&map(&delta_c))?;
    let (l0, lc) = lhs.split();
    let (r0, rc) = rhs.split();
    if l0 != r0 {
        return Ok(Some(
            "H3: function projection of Phi[D_c, Delta_c] mismatch".into(),
        ));
    }
    if lc != rc {
        return Ok(Some(
            "H4: D_c projection of Phi[D_c, Delta_c] mismatch".into(),
        ));
    }
    Ok(None)
}

/// Checks that a symbol map preserves the Poisson bracket on random pairs.
pub fn verify_symbol_automorphism<F>(
    map: F,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport, AutoError>
where
    F: Fn(&PolySymbol) -> PolySymbol,
{
    assert!(trials >= 1);
    let mut failures = Vec::new();
    for trial in 0..trials {
        let mut rng = crate::sample::rng_for(seed, trial as u64);
        let a = crate::sample::random_symbol(&mut rng, dim, 3, 2, 3);
        let b = crate::sample::random_symbol(&mut rng, dim, 3, 2, 3);
        let lhs = map(&poisson_bracket(&a, &b)?);
        let rhs = poisson_bracket(&map(&a), &map(&b))?;
        if lhs != rhs {
            failures.push(TrialFailure {
                trial,
                detail: format!("Phi{{a,b}} != {{Phi a, Phi b}} for a = {}, b = {}", a, b),
            });
        }
    }
    Ok(VerifyReport::new(AlgebraKind::S, trials, failures))
}

/// Which automorphism family a serialized descriptor refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum AutoFamily {
    D1,
    S,
    D,
}

/// Serializable descriptor of an automorphism: family tag plus parameters,
/// separate from its action. Absent fields default to identity/zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutoSpec {
    pub family: AutoFamily,
    pub dim: usize,
    #[serde(default)]
    pub a: Option<u8>,
    #[serde(default)]
    pub kappa: Option<String>,
    #[serde(default)]
    pub lambda: Option<String>,
    #[serde(default)]
    pub omega: Option<Vec<RationalPoly>>,
    #[serde(default)]
    pub phi: Option<PolyDiffeo>,
}

/// Parse a rational from "p", "-p" or "p/q" text.
pub fn parse_rational(text: &str) -> Result<Rational, AutoError> {
    let parse_int = |s: &str| {
        s.trim()
            .parse::<num_bigint::BigInt>()
            .map_err(|e| AutoError::NotInFamily(format!("bad rational '{}': {}", text, e)))
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(AutoError::NotInFamily("zero denominator".into()));
            }
            Ok(Rational::new(parse_int(num)?, d))
        }
        None => Ok(Rational::from(parse_int(text)?)),
    }
}

impl AutoSpec {
    pub fn kappa_value(&self) -> Result<Rational, AutoError> {
        match (&self.kappa, self.family, self.a.unwrap_or(0)) {
            (Some(text), _, _) => parse_rational(text),
            (None, AutoFamily::D, 1) => Ok(-Rational::one()),
            _ => Ok(Rational::one()),
        }
    }

    pub fn lambda_value(&self) -> Result<Rational, AutoError> {
        match &self.lambda {
            Some(text) => parse_rational(text),
            None => Ok(Rational::zero()),
        }
    }

    pub fn omega_value(&self) -> Result<OneForm, AutoError> {
        match &self.omega {
            Some(components) => OneForm::new(components.clone()),
            None => Ok(OneForm::zero(self.dim)),
        }
    }

    pub fn phi_value(&self) -> Result<PolyDiffeo, AutoError> {
        match &self.phi {
            Some(d) => PolyDiffeo::new(d.forward.clone(), d.inverse.clone()),
            None => Ok(PolyDiffeo::identity(self.dim)),
        }
    }

    /// Consistency: for the D family, kappa = (-1)^a.
    pub fn validate(&self) -> Result<(), AutoError> {
        let kappa = self.kappa_value()?;
        if kappa.is_zero() {
            return Err(AutoError::ZeroKappa);
        }
        if self.family == AutoFamily::D {
            let a = self.a.unwrap_or(0);
            let expected = if a == 0 { Rational::one() } else { -Rational::one() };
            if kappa != expected {
                return Err(AutoError::NotInFamily(
                    "family D requires kappa = (-1)^a".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn apply_op(&self, d: &DiffOp) -> Result<DiffOp, AutoError> {
        self.validate()?;
        match self.family {
            AutoFamily::D1 => d1_automorphism(
                &self.kappa_value()?,
                &self.lambda_value()?,
                &self.omega_value()?,
                &self.phi_value()?,
                d,
            ),
            AutoFamily::D => d_automorphism(
                self.a.unwrap_or(0),
                &self.omega_value()?,
                &self.phi_value()?,
                d,
            ),
            AutoFamily::S => Err(AutoError::NotInFamily(
                "family S acts on symbols, not operators".into(),
            )),
        }
    }

    pub fn apply_symbol(&self, p: &PolySymbol) -> Result<PolySymbol, AutoError> {
        self.validate()?;
        match self.family {
            AutoFamily::S => s_automorphism(
                &self.kappa_value()?,
                &self.omega_value()?,
                &self.phi_value()?,
                p,
            ),
            _ => Err(AutoError::NotInFamily(
                "families D1 and D act on operators, not symbols".into(),
            )),
        }
    }
}
