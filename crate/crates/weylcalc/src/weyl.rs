//! The filtered associative algebra of linear differential operators with
//! polynomial coefficients: composition via the closed Leibniz expansion,
//! commutator bracket, the A + D_c splitting, divergence, Lie derivative,
//! and the formal adjoint with respect to the flat volume.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ratpoly::{fmt_monomial, MultiIndex, PolyError, Rational, RationalPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a vector field: {0}")]
    NotVectorField(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A differential operator sum_alpha f_alpha(x) d^alpha in normal form:
/// a finite map from the derivative multi-index alpha to its polynomial
/// coefficient, with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffOp {
    dim: usize,
    terms: BTreeMap<MultiIndex, RationalPoly>,
}

impl DiffOp {
    pub fn zero(dim: usize) -> Self {
        DiffOp {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_function(RationalPoly::one(dim))
    }

    /// Multiplication operator by a polynomial.
    pub fn from_function(f: RationalPoly) -> Self {
        let dim = f.dim();
        let mut op = DiffOp::zero(dim);
        op.add_term(MultiIndex::zero(dim), f);
        op
    }

    /// The coordinate derivative d_axis (0-based).
    pub fn partial(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis out of range");
        let mut op = DiffOp::zero(dim);
        op.add_term(MultiIndex::unit(dim, axis), RationalPoly::one(dim));
        op
    }

    /// The single-term operator f d^alpha.
    pub fn term(coeff: RationalPoly, alpha: MultiIndex) -> Self {
        assert_eq!(coeff.dim(), alpha.len(), "coefficient/index dimension");
        let mut op = DiffOp::zero(coeff.dim());
        op.add_term(alpha, coeff);
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &RationalPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> RationalPoly {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| RationalPoly::zero(self.dim))
    }

    /// Order of the operator: max |alpha| over stored terms. The zero
    /// operator has no order (sentinel below every integer).
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|a| a.degree()).max()
    }

    /// True when order(self) <= i, with order(0) below every integer.
    pub fn order_at_most(&self, i: isize) -> bool {
        match self.order() {
            None => true,
            Some(o) => (o as isize) <= i,
        }
    }

    fn add_term(&mut self, alpha: MultiIndex, coeff: RationalPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_dim(&self, other: &DiffOp) -> Result<(), OpError> {
        if self.dim != other.dim {
            return Err(OpError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp, OpError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOp) -> Result<DiffOp, OpError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> DiffOp {
        if factor.is_zero() {
            return DiffOp::zero(self.dim);
        }
        DiffOp {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.scale(factor)))
                .collect(),
        }
    }

    /// Composition in normal form via the Leibniz expansion
    /// (f d^alpha)(g d^beta) = sum_{gamma <= alpha} C(alpha,gamma)
    /// f (d^gamma g) d^(alpha - gamma + beta).
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp, OpError> {
        self.check_dim(other)?;
        let mut out = DiffOp::zero(self.dim);
        for (alpha, f) in &self.terms {
            for (beta, g) in &other.terms {
                for gamma in alpha.sub_indices() {
                    let dg = g.partial_multi(&gamma);
                    if dg.is_zero() {
                        continue;
                    }
                    let binom = Rational::from(alpha.binomial(&gamma));
                    let coeff = f.mul(&dg)?.scale(&binom);
                    let rest = alpha.checked_sub(&gamma).expect("gamma <= alpha");
                    out.add_term(rest.add(beta), coeff);
                }
            }
        }
        Ok(out)
    }

    /// Commutator [self, other] = self other - other self.
    pub fn bracket(&self, other: &DiffOp) -> Result<DiffOp, OpError> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        ab.sub(&ba)
    }

    /// k-fold nested bracket [self, [self, ..., [self, target]...]].
    pub fn ad_power(&self, target: &DiffOp, k: usize) -> Result<DiffOp, OpError> {
        let mut out = target.clone();
        for _ in 0..k {
            out = self.bracket(&out)?;
        }
        Ok(out)
    }

    /// Apply the operator to a polynomial: sum_alpha f_alpha d^alpha f.
    pub fn apply(&self, f: &RationalPoly) -> Result<RationalPoly, OpError> {
        if f.dim() != self.dim {
            return Err(OpError::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        let mut out = RationalPoly::zero(self.dim);
        for (alpha, c) in &self.terms {
            let df = f.partial_multi(alpha);
            out = out.add(&c.mul(&df)?)?;
        }
        Ok(out)
    }

    /// Split D = D(1) + D_c with D_c vanishing on constants.
    pub fn split(&self) -> (RationalPoly, DiffOp) {
        let f = self.coeff(&MultiIndex::zero(self.dim));
        let mut dc = self.clone();
        dc.terms.remove(&MultiIndex::zero(self.dim));
        (f, dc)
    }

    /// The function part D(1).
    pub fn function_part(&self) -> RationalPoly {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// The part vanishing on constants, D - D(1).
    pub fn constant_free_part(&self) -> DiffOp {
        self.split().1
    }

    /// Formal adjoint with respect to the flat volume:
    /// (f d^alpha)* : g -> (-1)^|alpha| d^alpha (f g), expanded to normal
    /// form (f d^alpha)* = (-1)^|alpha| sum_{gamma <= alpha}
    /// C(alpha,gamma) (d^gamma f) d^(alpha-gamma).
    pub fn formal_adjoint(&self) -> DiffOp {
        let mut out = DiffOp::zero(self.dim);
        for (alpha, f) in &self.terms {
            let sign = if alpha.degree() % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            for gamma in alpha.sub_indices() {
                let df = f.partial_multi(&gamma);
                if df.is_zero() {
                    continue;
                }
                let binom = Rational::from(alpha.binomial(&gamma));
                let rest = alpha.checked_sub(&gamma).expect("gamma <= alpha");
                out.add_term(rest, df.scale(&(&binom * &sign)));
            }
        }
        out
    }

    /// View the operator as a vector field, if it lies in D^1_c.
    pub fn as_vector_field(&self) -> Result<VectorField, OpError> {
        if !self.function_part().is_zero() {
            return Err(OpError::NotVectorField(
                "operator does not vanish on constants".into(),
            ));
        }
        if !self.order_at_most(1) {
            return Err(OpError::NotVectorField("order exceeds 1".into()));
        }
        let components = (0..self.dim)
            .map(|axis| self.coeff(&MultiIndex::unit(self.dim, axis)))
            .collect();
        Ok(VectorField::new(components))
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut entries: Vec<_> = self.terms.iter().collect();
        entries.sort_by(|(a, _), (b, _)| a.grlex_cmp(b));
        let mut first = true;
        for (alpha, coeff) in entries {
            let dpart = fmt_monomial(alpha, "d");
            for (i, (idx, c)) in coeff.grlex_terms().into_iter().enumerate() {
                let xpart = fmt_monomial(idx, "x");
                let sep = if first {
                    if c.is_negative() {
                        "-"
                    } else {
                        ""
                    }
                } else if c.is_negative() {
                    " - "
                } else {
                    " + "
                };
                write!(f, "{}", sep)?;
                let _ = i;
                let mut factors = Vec::new();
                let mag = c.abs();
                if !mag.is_one() || (xpart.is_empty() && dpart.is_empty()) {
                    factors.push(mag.to_string());
                }
                if !xpart.is_empty() {
                    factors.push(xpart);
                }
                if !dpart.is_empty() {
                    factors.push(dpart.clone());
                }
                write!(f, "{}", factors.join("*"))?;
                first = false;
            }
        }
        Ok(())
    }
}

/// A polynomial vector field X = sum_i X^i d_i; as an operator it lies in
/// D^1_c (order at most 1, vanishing on constants).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    components: Vec<RationalPoly>,
}

impl VectorField {
    pub fn new(components: Vec<RationalPoly>) -> Self {
        let n = components.len();
        for c in &components {
            assert_eq!(c.dim(), n, "component dimension mismatch");
        }
        VectorField { components }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField::new(vec![RationalPoly::zero(dim); dim])
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[RationalPoly] {
        &self.components
    }

    pub fn as_diffop(&self) -> DiffOp {
        let n = self.dim();
        let mut op = DiffOp::zero(n);
        for (axis, c) in self.components.iter().enumerate() {
            op.add_term(MultiIndex::unit(n, axis), c.clone());
        }
        op
    }

    /// X(f) = sum_i X^i d_i f.
    pub fn apply(&self, f: &RationalPoly) -> Result<RationalPoly, OpError> {
        self.as_diffop().apply(f)
    }

    /// Flat divergence sum_i d_i X^i.
    pub fn divergence(&self) -> RationalPoly {
        let n = self.dim();
        let mut out = RationalPoly::zero(n);
        for (axis, c) in self.components.iter().enumerate() {
            out = out.add(&c.partial(axis).expect("axis in range")).unwrap();
        }
        out
    }
}

/// Lie derivative L_X D = [X, D].
pub fn lie_derivative(x: &VectorField, d: &DiffOp) -> Result<DiffOp, OpError> {
    x.as_diffop().bracket(d)
}

/// Independent evaluator for the Lie derivative in normal-ordering form:
///
///   (L_X D)(f) = <X,eta> D(xi) - <X,xi> tau_zeta D(xi),
///   tau_zeta D(xi) = D(xi + zeta) - D(xi),
///
/// where eta marks derivatives of the coefficients of D and zeta marks
/// derivatives of the components of X. Expanded into operator terms:
///
///   L_X D = sum_{alpha,i} X^i (d_i f_alpha) d^alpha
///         - sum_alpha sum_{0 < gamma <= alpha} C(alpha,gamma)
///             sum_i f_alpha (d^gamma X^i) d^(alpha - gamma + e_i).
pub fn lie_derivative_symbolic(x: &VectorField, d: &DiffOp) -> Result<DiffOp, OpError> {
    if x.dim() != d.dim() {
        return Err(OpError::DimensionMismatch {
            expected: d.dim(),
            found: x.dim(),
        });
    }
    let n = d.dim();
    let mut out = DiffOp::zero(n);
    for (alpha, f) in d.terms() {
        // <X,eta> D(xi): X differentiates the coefficient.
        let mut first = RationalPoly::zero(n);
        for (i, xi) in x.components().iter().enumerate() {
            first = first.add(&xi.mul(&f.partial(i)?)?)?;
        }
        out.add_term(alpha.clone(), first);
        // <X,xi> tau_zeta D(xi): derivatives transferred onto X.
        for gamma in alpha.sub_indices() {
            if gamma.is_zero() {
                continue;
            }
            let binom = Rational::from(alpha.binomial(&gamma));
            let rest = alpha.checked_sub(&gamma).expect("gamma <= alpha");
            for (i, xi) in x.components().iter().enumerate() {
                let dx = xi.partial_multi(&gamma);
                if dx.is_zero() {
                    continue;
                }
                let coeff = f.mul(&dx)?.scale(&binom).neg();
                out.add_term(rest.add(&MultiIndex::unit(n, i)), coeff);
            }
        }
    }
    Ok(out)
}

/// Monomials spanning enough test functions to separate operators of a given
/// order: all x^m with |m| <= max_degree.
pub fn monomial_family(dim: usize, max_degree: usize) -> Vec<RationalPoly> {
    let mut indices = vec![MultiIndex::zero(dim)];
    let mut out = Vec::new();
    // breadth-first enumeration by degree
    let mut frontier = indices.clone();
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for idx in &frontier {
            for axis in 0..dim {
                let raised = idx.add(&MultiIndex::unit(dim, axis));
                if !next.contains(&raised) && !indices.contains(&raised) {
                    next.push(raised);
                }
            }
        }
        indices.extend(next.iter().cloned());
        frontier = next;
    }
    for idx in indices {
        out.push(RationalPoly::monomial(dim, idx, Rational::one()));
    }
    out
}

/// All multi-indices of length `dim` with total degree exactly `degree`.
pub fn indices_of_degree(dim: usize, degree: usize) -> Vec<MultiIndex> {
    fn rec(dim: usize, degree: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == dim - 1 {
            prefix.push(degree as u32);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in 0..=degree {
            prefix.push(e as u32);
            rec(dim, degree - e, prefix, out);
            prefix.pop();
        }
    }
    if dim == 0 {
        return if degree == 0 {
            vec![MultiIndex::new(vec![])]
        } else {
            vec![]
        };
    }
    let mut out = Vec::new();
    rec(dim, degree, &mut Vec::new(), &mut out);
    out
}

/// All multi-indices with total degree at most `degree`.
pub fn indices_up_to_degree(dim: usize, degree: usize) -> Vec<MultiIndex> {
    (0..=degree)
        .flat_map(|d| indices_of_degree(dim, d))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct OpTermJson {
    alpha: Vec<u32>,
    coeff: RationalPoly,
}

#[derive(Serialize, Deserialize)]
struct DiffOpJson {
    dim: usize,
    ops: Vec<OpTermJson>,
}

impl Serialize for DiffOp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut entries: Vec<_> = self.terms.iter().collect();
        entries.sort_by(|(a, _), (b, _)| a.grlex_cmp(b));
        DiffOpJson {
            dim: self.dim,
            ops: entries
                .into_iter()
                .map(|(alpha, coeff)| OpTermJson {
                    alpha: alpha.exponents().to_vec(),
                    coeff: coeff.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiffOp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = DiffOpJson::deserialize(deserializer)?;
        let mut op = DiffOp::zero(raw.dim);
        for t in raw.ops {
            if t.alpha.len() != raw.dim || t.coeff.dim() != raw.dim {
                return Err(D::Error::custom("operator term dimension mismatch"));
            }
            op.add_term(MultiIndex::new(t.alpha), t.coeff);
        }
        Ok(op)
    }
}

/// Integer power helper for rational scalars (negative exponents allowed).
pub fn rational_pow(base: &Rational, exp: i64) -> Rational {
    assert!(!base.is_zero() || exp >= 0, "zero to a negative power");
    let mut out = Rational::one();
    for _ in 0..exp.unsigned_abs() {
        out *= base;
    }
    if exp < 0 {
        out = Rational::from(BigInt::one()) / out;
    }
    out
}
