//! Exact multivariate polynomial arithmetic over arbitrary-precision
//! rationals: the coefficient ring Q[x^1,...,x^n] underlying everything else
//! in this crate.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational number, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("1-form is not closed: d(omega) != 0")]
    NotClosed,
    #[error("invalid polynomial data: {0}")]
    InvalidData(String),
}

/// Exponent vector of a monomial x^alpha. The length is the ambient
/// dimension n.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The i-th standard basis index (0-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// Total degree |alpha|.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise difference; `None` unless `other <= self` everywhere.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut out = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if b > a {
                return None;
            }
            out.push(a - b);
        }
        Some(MultiIndex(out))
    }

    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// All gamma with 0 <= gamma <= alpha componentwise.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(Vec::with_capacity(self.len()))];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for v in 0..=e {
                    let mut p = prefix.0.clone();
                    p.push(v);
                    next.push(MultiIndex(p));
                }
            }
            out = next;
        }
        out
    }

    /// Product of per-axis binomial coefficients C(alpha_k, gamma_k).
    pub fn binomial(&self, gamma: &MultiIndex) -> BigInt {
        let mut result = BigInt::one();
        for (&a, &g) in self.0.iter().zip(&gamma.0) {
            result *= binomial_u32(a, g);
        }
        result
    }

    /// Graded lexicographic comparison; used for display ordering.
    pub fn grlex_cmp(&self, other: &MultiIndex) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

fn binomial_u32(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut result = BigInt::one();
    for i in 0..k {
        result = result * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    result
}

/// Polynomial in Q[x^1,...,x^n], stored as a canonical term map with no zero
/// coefficients. Two equal polynomials always have identical term maps.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl RationalPoly {
    pub fn zero(dim: usize) -> Self {
        RationalPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn constant(dim: usize, value: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(MultiIndex::zero(dim), value);
        }
        RationalPoly { dim, terms }
    }

    /// The coordinate function x^axis (0-based).
    pub fn var(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis out of range");
        Self::monomial(dim, MultiIndex::unit(dim, axis), Rational::one())
    }

    pub fn monomial(dim: usize, index: MultiIndex, coeff: Rational) -> Self {
        assert_eq!(index.len(), dim, "multi-index length must equal dimension");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(index, coeff);
        }
        RationalPoly { dim, terms }
    }

    pub fn from_terms(
        dim: usize,
        entries: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Result<Self, PolyError> {
        let mut poly = RationalPoly::zero(dim);
        for (idx, c) in entries {
            if idx.len() != dim {
                return Err(PolyError::DimensionMismatch {
                    expected: dim,
                    found: idx.len(),
                });
            }
            poly.add_term(idx, c);
        }
        Ok(poly)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.is_zero())
    }

    /// The constant term (coefficient of x^0).
    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// As a constant rational, if the polynomial has degree <= 0.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn coeff(&self, index: &MultiIndex) -> Rational {
        self.terms.get(index).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.degree()).max()
    }

    fn add_term(&mut self, index: MultiIndex, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(index) {
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

    fn check_dim(&self, other: &RationalPoly) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &RationalPoly) -> Result<RationalPoly, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RationalPoly) -> Result<RationalPoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalPoly {
        RationalPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> RationalPoly {
        if factor.is_zero() {
            return RationalPoly::zero(self.dim);
        }
        RationalPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * factor))
                .collect(),
        }
    }

    pub fn mul(&self, other: &RationalPoly) -> Result<RationalPoly, PolyError> {
        self.check_dim(other)?;
        let mut out = RationalPoly::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> RationalPoly {
        let mut out = RationalPoly::one(self.dim);
        for _ in 0..exp {
            out = out.mul(self).expect("dimensions agree");
        }
        out
    }

    /// Formal partial derivative with respect to x^axis (0-based).
    pub fn partial(&self, axis: usize) -> Result<RationalPoly, PolyError> {
        if axis >= self.dim {
            return Err(PolyError::AxisOutOfRange {
                axis,
                dim: self.dim,
            });
        }
        let mut out = RationalPoly::zero(self.dim);
        for (idx, c) in &self.terms {
            let e = idx.get(axis);
            if e == 0 {
                continue;
            }
            let mut lowered = idx.exponents().to_vec();
            lowered[axis] = e - 1;
            out.add_term(
                MultiIndex::new(lowered),
                c * Rational::from(BigInt::from(e)),
            );
        }
        Ok(out)
    }

    /// Iterated partial derivative d^alpha.
    pub fn partial_multi(&self, alpha: &MultiIndex) -> RationalPoly {
        let mut out = self.clone();
        for axis in 0..alpha.len() {
            for _ in 0..alpha.get(axis) {
                out = out.partial(axis).expect("axis in range");
            }
        }
        out
    }

    /// Substitution p(maps[0], ..., maps[n-1]). Every map must live in the
    /// same target ring (all maps share one dimension, not necessarily n).
    pub fn compose(&self, maps: &[RationalPoly]) -> Result<RationalPoly, PolyError> {
        if maps.len() != self.dim {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim,
                found: maps.len(),
            });
        }
        let target_dim = maps.first().map(|m| m.dim()).unwrap_or(0);
        for m in maps {
            if m.dim() != target_dim {
                return Err(PolyError::DimensionMismatch {
                    expected: target_dim,
                    found: m.dim(),
                });
            }
        }
        // Cache powers of each map up to the largest exponent used.
        let mut max_exp = vec![0u32; self.dim];
        for idx in self.terms.keys() {
            for axis in 0..self.dim {
                max_exp[axis] = max_exp[axis].max(idx.get(axis));
            }
        }
        let powers: Vec<Vec<RationalPoly>> = maps
            .iter()
            .enumerate()
            .map(|(axis, m)| {
                let mut pw = vec![RationalPoly::one(target_dim)];
                for e in 1..=max_exp[axis] {
                    let next = pw[(e - 1) as usize].mul(m).expect("dims agree");
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut out = RationalPoly::zero(target_dim);
        for (idx, c) in &self.terms {
            let mut term = RationalPoly::constant(target_dim, c.clone());
            for axis in 0..self.dim {
                let e = idx.get(axis);
                if e > 0 {
                    term = term.mul(&powers[axis][e as usize]).expect("dims agree");
                }
            }
            out = out.add(&term).expect("dims agree");
        }
        Ok(out)
    }

    /// Evaluate at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.dim {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        let mut total = Rational::zero();
        for (idx, c) in &self.terms {
            let mut v = c.clone();
            for axis in 0..self.dim {
                for _ in 0..idx.get(axis) {
                    v *= &point[axis];
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Terms sorted in graded lexicographic order (presentation only).
    pub fn grlex_terms(&self) -> Vec<(&MultiIndex, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| a.grlex_cmp(b));
        v
    }
}

/// Primitive of a closed 1-form with polynomial components, normalized by
/// f(0) = 0. On R^n every closed polynomial form is exact; the primitive is
/// computed by the line-integral formula f(x) = int_0^1 sum_i w_i(tx) x^i dt,
/// which is exact term by term: a monomial c x^alpha in w_i contributes
/// c x^alpha x^i / (|alpha| + 1).
pub fn poly_potential(components: &[RationalPoly]) -> Result<RationalPoly, PolyError> {
    let n = components.len();
    for c in components {
        if c.dim() != n {
            return Err(PolyError::DimensionMismatch {
                expected: n,
                found: c.dim(),
            });
        }
    }
    // Exact closedness check: d_i w_j = d_j w_i.
    for i in 0..n {
        for j in (i + 1)..n {
            if components[j].partial(i)? != components[i].partial(j)? {
                return Err(PolyError::NotClosed);
            }
        }
    }
    let mut f = RationalPoly::zero(n);
    for (i, comp) in components.iter().enumerate() {
        for (idx, c) in comp.terms() {
            let deg = idx.degree();
            let raised = idx.add(&MultiIndex::unit(n, i));
            f.add_term(raised, c / Rational::from(BigInt::from(deg as u32 + 1)));
        }
    }
    Ok(f)
}

impl std::ops::Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        RationalPoly::add(self, rhs).expect("dimension mismatch in +")
    }
}

impl std::ops::Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        RationalPoly::sub(self, rhs).expect("dimension mismatch in -")
    }
}

impl std::ops::Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        RationalPoly::mul(self, rhs).expect("dimension mismatch in *")
    }
}

impl std::ops::Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::neg(self)
    }
}

fn fmt_coeff_times(f: &mut fmt::Formatter<'_>, c: &Rational, tail: &str) -> fmt::Result {
    if tail.is_empty() {
        write!(f, "{}", c)
    } else if c.is_one() {
        write!(f, "{}", tail)
    } else {
        write!(f, "{}*{}", c, tail)
    }
}

pub(crate) fn fmt_monomial(idx: &MultiIndex, var: &str) -> String {
    let mut parts = Vec::new();
    for axis in 0..idx.len() {
        let e = idx.get(axis);
        if e == 1 {
            parts.push(format!("{}{}", var, axis + 1));
        } else if e > 1 {
            parts.push(format!("{}{}^{}", var, axis + 1, e));
        }
    }
    parts.join("*")
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (idx, c)) in self.grlex_terms().into_iter().enumerate() {
            let tail = fmt_monomial(idx, "x");
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            fmt_coeff_times(f, &c.abs(), &tail)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .grlex_terms()
            .into_iter()
            .map(|(idx, c)| TermJson {
                exp: idx.exponents().to_vec(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect();
        PolyJson {
            dim: self.dim,
            terms,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(deserializer)?;
        let mut poly = RationalPoly::zero(raw.dim);
        for t in raw.terms {
            if t.exp.len() != raw.dim {
                return Err(D::Error::custom(format!(
                    "exponent length {} does not match dim {}",
                    t.exp.len(),
                    raw.dim
                )));
            }
            let num: BigInt = t.num.parse().map_err(D::Error::custom)?;
            let den: BigInt = t.den.parse().map_err(D::Error::custom)?;
            if den <= BigInt::zero() {
                return Err(D::Error::custom("denominator must be positive"));
            }
            poly.add_term(MultiIndex::new(t.exp), Rational::new(num, den));
        }
        Ok(poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(dim: usize, axis: usize) -> RationalPoly {
        RationalPoly::var(dim, axis)
    }

    #[test]
    fn add_inverse_cancels() {
        let p = x(2, 0);
        let sum = p.add(&p.neg()).unwrap();
        assert!(sum.is_zero());
        assert_eq!(sum.num_terms(), 0);
    }

    #[test]
    fn add_collects_terms() {
        let p = &x(2, 0) * &x(2, 1);
        assert_eq!(p.add(&p).unwrap(), p.scale(&rat(2, 1)));
    }

    #[test]
    fn add_rational_constants() {
        // (x1 + 1/2) + 1/3 = x1 + 5/6
        let p = x(1, 0).add(&RationalPoly::constant(1, rat(1, 2))).unwrap();
        let q = RationalPoly::constant(1, rat(1, 3));
        let expected = x(1, 0).add(&RationalPoly::constant(1, rat(5, 6))).unwrap();
        assert_eq!(p.add(&q).unwrap(), expected);
    }

    #[test]
    fn mul_unit_and_square() {
        let p = &x(2, 0) + &x(2, 1);
        assert_eq!(RationalPoly::one(2).mul(&p).unwrap(), p);
        let sq = x(2, 0).mul(&x(2, 0)).unwrap();
        assert_eq!(sq, x(2, 0).pow(2));
    }

    #[test]
    fn mul_difference_of_squares() {
        let sum = &x(2, 0) + &x(2, 1);
        let diff = &x(2, 0) - &x(2, 1);
        let expected = &x(2, 0).pow(2) - &x(2, 1).pow(2);
        assert_eq!(sum.mul(&diff).unwrap(), expected);
    }

    #[test]
    fn degree_additivity() {
        let p = &(&x(2, 0).pow(2) + &x(2, 1)) * &x(2, 0);
        let q = &x(2, 1).pow(3) + &RationalPoly::one(2);
        let prod = p.mul(&q).unwrap();
        assert_eq!(
            prod.total_degree(),
            Some(p.total_degree().unwrap() + q.total_degree().unwrap())
        );
    }

    #[test]
    fn partial_basic() {
        assert_eq!(x(1, 0).pow(2).partial(0).unwrap(), x(1, 0).scale(&rat(2, 1)));
        assert!(x(2, 0).partial(1).unwrap().is_zero());
        // d_1 (x1 x2 + x1^3) = x2 + 3 x1^2
        let p = (&x(2, 0) * &x(2, 1)).add(&x(2, 0).pow(3)).unwrap();
        let expected = x(2, 1).add(&x(2, 0).pow(2).scale(&rat(3, 1))).unwrap();
        assert_eq!(p.partial(0).unwrap(), expected);
    }

    #[test]
    fn partial_axis_out_of_range() {
        assert_eq!(
            x(2, 0).partial(2),
            Err(PolyError::AxisOutOfRange { axis: 2, dim: 2 })
        );
    }

    #[test]
    fn compose_identity_and_shift() {
        let p = (&x(2, 0) * &x(2, 1)).add(&x(2, 0).pow(3)).unwrap();
        let id = [x(2, 0), x(2, 1)];
        assert_eq!(p.compose(&id).unwrap(), p);

        // (x1)^2 at x1 -> x1 + 1 gives x1^2 + 2 x1 + 1
        let shifted = x(1, 0)
            .pow(2)
            .compose(&[x(1, 0).add(&RationalPoly::one(1)).unwrap()])
            .unwrap();
        let expected = x(1, 0)
            .pow(2)
            .add(&x(1, 0).scale(&rat(2, 1)))
            .unwrap()
            .add(&RationalPoly::one(1))
            .unwrap();
        assert_eq!(shifted, expected);
    }

    #[test]
    fn compose_swap_symmetry() {
        let p = &x(2, 0) * &x(2, 1);
        assert_eq!(p.compose(&[x(2, 1), x(2, 0)]).unwrap(), p);
    }

    #[test]
    fn potential_examples() {
        // omega = (1, 0) -> f = x1
        let f = poly_potential(&[RationalPoly::one(2), RationalPoly::zero(2)]).unwrap();
        assert_eq!(f, x(2, 0));

        // omega = (x2, x1) -> f = x1 x2
        let f = poly_potential(&[x(2, 1), x(2, 0)]).unwrap();
        assert_eq!(f, &x(2, 0) * &x(2, 1));

        // omega = (x2, -x1) is not closed
        assert_eq!(
            poly_potential(&[x(2, 1), x(2, 0).neg()]),
            Err(PolyError::NotClosed)
        );
    }

    #[test]
    fn potential_vanishes_at_origin() {
        let omega = [
            (&x(2, 0) * &x(2, 1)).add(&RationalPoly::one(2)).unwrap(),
            x(2, 0).pow(2).scale(&rat(1, 2)),
        ];
        let f = poly_potential(&omega).unwrap();
        assert!(f.constant_term().is_zero());
        for (i, w) in omega.iter().enumerate() {
            assert_eq!(&f.partial(i).unwrap(), w);
        }
    }

    #[test]
    fn json_round_trip() {
        let p = x(2, 0)
            .pow(2)
            .scale(&rat(-7, 3))
            .add(&(&x(2, 0) * &x(2, 1)))
            .unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: RationalPoly = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn display_graded_lex() {
        let p = x(2, 0)
            .add(&(&x(2, 0) * &x(2, 1)).scale(&rat(-1, 2)))
            .unwrap()
            .add(&RationalPoly::constant(2, rat(1, 3)))
            .unwrap();
        assert_eq!(p.to_string(), "1/3 + x1 - 1/2*x1*x2");
    }
}
