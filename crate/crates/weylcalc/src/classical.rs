//! The classical limit: polynomial symbols on T*R^n graded by fiber degree,
//! the principal-symbol map, the canonical Poisson bracket, Hamiltonian
//! fields, and the algebraic probes for nilpotency and the filtration
//! characterization.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ratpoly::{fmt_monomial, MultiIndex, PolyError, Rational, RationalPoly};
use crate::weyl::{indices_up_to_degree, DiffOp, OpError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero operator has no principal symbol")]
    ZeroOperator,
    #[error("argument is not a function (xi-degree 0 required)")]
    NotFunction,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Op(#[from] OpError),
}

/// A polynomial on T*R^n: finite map from the xi multi-index to its
/// x-coefficient. The grade-i component collects the terms of xi-degree
/// exactly i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySymbol {
    dim: usize,
    terms: BTreeMap<MultiIndex, RationalPoly>,
}

impl PolySymbol {
    pub fn zero(dim: usize) -> Self {
        PolySymbol {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::from_function(RationalPoly::one(dim))
    }

    /// Embed a function as a grade-0 symbol.
    pub fn from_function(f: RationalPoly) -> Self {
        let dim = f.dim();
        let mut s = PolySymbol::zero(dim);
        s.add_term(MultiIndex::zero(dim), f);
        s
    }

    /// The fiber coordinate xi_axis (0-based).
    pub fn xi(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis out of range");
        let mut s = PolySymbol::zero(dim);
        s.add_term(MultiIndex::unit(dim, axis), RationalPoly::one(dim));
        s
    }

    pub fn term(coeff: RationalPoly, xi_index: MultiIndex) -> Self {
        assert_eq!(coeff.dim(), xi_index.len());
        let mut s = PolySymbol::zero(coeff.dim());
        s.add_term(xi_index, coeff);
        s
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

    pub fn coeff(&self, xi_index: &MultiIndex) -> RationalPoly {
        self.terms
            .get(xi_index)
            .cloned()
            .unwrap_or_else(|| RationalPoly::zero(self.dim))
    }

    /// Highest xi-degree present; `None` for zero.
    pub fn xi_degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.degree()).max()
    }

    /// True when every term has xi-degree 0.
    pub fn is_function(&self) -> bool {
        self.terms.keys().all(|k| k.is_zero())
    }

    /// The x-only part, if the symbol lies in S_0.
    pub fn as_function(&self) -> Option<RationalPoly> {
        if self.is_function() {
            Some(self.coeff(&MultiIndex::zero(self.dim)))
        } else {
            None
        }
    }

    /// The grade-k component (terms of xi-degree exactly k).
    pub fn graded_component(&self, k: usize) -> PolySymbol {
        PolySymbol {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(idx, _)| idx.degree() == k)
                .map(|(idx, c)| (idx.clone(), c.clone()))
                .collect(),
        }
    }

    /// True when the symbol is homogeneous of xi-degree k.
    pub fn is_homogeneous_of_degree(&self, k: usize) -> bool {
        self.terms.keys().all(|idx| idx.degree() == k)
    }

    fn add_term(&mut self, xi_index: MultiIndex, coeff: RationalPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(xi_index) {
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

    fn check_dim(&self, other: &PolySymbol) -> Result<(), SymbolError> {
        if self.dim != other.dim {
            return Err(SymbolError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &PolySymbol) -> Result<PolySymbol, SymbolError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolySymbol) -> Result<PolySymbol, SymbolError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolySymbol {
        PolySymbol {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> PolySymbol {
        if factor.is_zero() {
            return PolySymbol::zero(self.dim);
        }
        PolySymbol {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.scale(factor)))
                .collect(),
        }
    }

    /// Commutative product; grades add.
    pub fn mul(&self, other: &PolySymbol) -> Result<PolySymbol, SymbolError> {
        self.check_dim(other)?;
        let mut out = PolySymbol::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.add(b), ca.mul(cb)?);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> PolySymbol {
        let mut out = PolySymbol::one(self.dim);
        for _ in 0..exp {
            out = out.mul(self).expect("dims agree");
        }
        out
    }

    /// Partial derivative in the base direction x^axis.
    pub fn partial_x(&self, axis: usize) -> Result<PolySymbol, SymbolError> {
        let mut out = PolySymbol::zero(self.dim);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), c.partial(axis)?);
        }
        Ok(out)
    }

    /// Partial derivative in the fiber direction xi_axis.
    pub fn partial_xi(&self, axis: usize) -> Result<PolySymbol, SymbolError> {
        if axis >= self.dim {
            return Err(SymbolError::Poly(PolyError::AxisOutOfRange {
                axis,
                dim: self.dim,
            }));
        }
        let mut out = PolySymbol::zero(self.dim);
        for (idx, c) in &self.terms {
            let e = idx.get(axis);
            if e == 0 {
                continue;
            }
            let mut lowered = idx.exponents().to_vec();
            lowered[axis] = e - 1;
            out.add_term(
                MultiIndex::new(lowered),
                c.scale(&Rational::from(num_bigint::BigInt::from(e))),
            );
        }
        Ok(out)
    }

    /// Substitute xi_i -> subs[i], x untouched. Used by the automorphism
    /// families (phase lift, covector translation).
    pub fn substitute_xi(&self, subs: &[PolySymbol]) -> Result<PolySymbol, SymbolError> {
        if subs.len() != self.dim {
            return Err(SymbolError::DimensionMismatch {
                expected: self.dim,
                found: subs.len(),
            });
        }
        let mut out = PolySymbol::zero(self.dim);
        for (idx, c) in &self.terms {
            let mut term = PolySymbol::from_function(c.clone());
            for axis in 0..self.dim {
                for _ in 0..idx.get(axis) {
                    term = term.mul(&subs[axis])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Apply a map to every x-coefficient.
    pub fn map_coeffs<F>(&self, mut f: F) -> Result<PolySymbol, SymbolError>
    where
        F: FnMut(&RationalPoly) -> Result<RationalPoly, SymbolError>,
    {
        let mut out = PolySymbol::zero(self.dim);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), f(c)?);
        }
        Ok(out)
    }
}

/// Principal symbol: the top-order part of a non-zero operator with d^alpha
/// replaced by xi^alpha. Homogeneous of xi-degree order(d); restricted to
/// functions it is the identity.
pub fn principal_symbol(d: &DiffOp) -> Result<PolySymbol, SymbolError> {
    let order = d.order().ok_or(SymbolError::ZeroOperator)?;
    let mut out = PolySymbol::zero(d.dim());
    for (alpha, coeff) in d.terms() {
        if alpha.degree() == order {
            out.add_term(alpha.clone(), coeff.clone());
        }
    }
    Ok(out)
}

/// Full symbol: every term f_alpha d^alpha mapped to f_alpha xi^alpha.
/// Linear, grade-preserving; not an algebra map, used for induced-map checks.
pub fn full_symbol(d: &DiffOp) -> PolySymbol {
    let mut out = PolySymbol::zero(d.dim());
    for (alpha, coeff) in d.terms() {
        out.add_term(alpha.clone(), coeff.clone());
    }
    out
}

/// Canonical Poisson bracket
/// {P,Q} = sum_i (dP/dxi_i dQ/dx^i - dP/dx^i dQ/dxi_i).
pub fn poisson_bracket(p: &PolySymbol, q: &PolySymbol) -> Result<PolySymbol, SymbolError> {
    p.check_dim(q)?;
    let mut out = PolySymbol::zero(p.dim);
    for i in 0..p.dim {
        let a = p.partial_xi(i)?.mul(&q.partial_x(i)?)?;
        let b = p.partial_x(i)?.mul(&q.partial_xi(i)?)?;
        out = out.add(&a.sub(&b)?)?;
    }
    Ok(out)
}

/// Hamiltonian vector field of a generating symbol, stored through its exact
/// partials.
#[derive(Clone, Debug)]
pub struct HamiltonianField {
    d_xi: Vec<PolySymbol>,
    d_x: Vec<PolySymbol>,
}

impl HamiltonianField {
    pub fn new(p: &PolySymbol) -> Result<Self, SymbolError> {
        let d_xi = (0..p.dim()).map(|i| p.partial_xi(i)).collect::<Result<_, _>>()?;
        let d_x = (0..p.dim()).map(|i| p.partial_x(i)).collect::<Result<_, _>>()?;
        Ok(HamiltonianField { d_xi, d_x })
    }

    pub fn dim(&self) -> usize {
        self.d_xi.len()
    }

    pub fn d_xi(&self) -> &[PolySymbol] {
        &self.d_xi
    }

    pub fn d_x(&self) -> &[PolySymbol] {
        &self.d_x
    }

    /// H_P.Q = sum_i (d_xi_i P d_i Q - d_i P d_xi_i Q).
    pub fn apply(&self, q: &PolySymbol) -> Result<PolySymbol, SymbolError> {
        let mut out = PolySymbol::zero(q.dim());
        for i in 0..self.dim() {
            let a = self.d_xi[i].mul(&q.partial_x(i)?)?;
            let b = self.d_x[i].mul(&q.partial_xi(i)?)?;
            out = out.add(&a.sub(&b)?)?;
        }
        Ok(out)
    }
}

/// Which branch of the symbol/bracket compatibility held.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketBranch {
    /// {sigma(D1), sigma(D2)} = sigma([D1, D2]) with [D1, D2] != 0.
    Equal,
    /// {sigma(D1), sigma(D2)} = 0 (the bracket order drops further).
    Zero,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompatReport {
    pub product_ok: bool,
    pub bracket_ok: bool,
    pub branch: BracketBranch,
}

/// Checks the two compatibility identities between the operator algebra and
/// its classical limit: the product of principal symbols against the top
/// component of the symbol of the composition, and the Poisson bracket
/// against the symbol of the commutator (or 0 when the order drops).
pub fn symbol_compat_check(d1: &DiffOp, d2: &DiffOp) -> Result<CompatReport, SymbolError> {
    let s1 = principal_symbol(d1)?;
    let s2 = principal_symbol(d2)?;
    let deg = d1.order().unwrap() + d2.order().unwrap();

    let prod = s1.mul(&s2)?;
    let comp = d1.compose(d2)?;
    let comp_component = if comp.is_zero() {
        PolySymbol::zero(d1.dim())
    } else {
        full_symbol(&comp).graded_component(deg)
    };
    let product_ok = prod == comp_component;

    let pb = poisson_bracket(&s1, &s2)?;
    let br = d1.bracket(d2)?;
    let (branch, bracket_ok) = if pb.is_zero() {
        (BracketBranch::Zero, true)
    } else {
        let ok = !br.is_zero() && pb == principal_symbol(&br)?;
        (BracketBranch::Equal, ok)
    };

    Ok(CompatReport {
        product_ok,
        bracket_ok,
        branch,
    })
}

/// k-fold application of the Hamiltonian field of `p` to an x-only function.
pub fn hamiltonian_apply(
    p: &PolySymbol,
    f: &RationalPoly,
    k: usize,
) -> Result<PolySymbol, SymbolError> {
    let field = HamiltonianField::new(p)?;
    let mut cur = PolySymbol::from_function(f.clone());
    if !cur.is_function() {
        return Err(SymbolError::NotFunction);
    }
    for _ in 0..k {
        cur = field.apply(&cur)?;
    }
    Ok(cur)
}

/// Outcome of probing ad_D against one element of the probe family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NilpotencyEntry {
    pub probe: String,
    /// Least k <= max_depth with ad_D^k(probe) = 0, if any.
    pub vanishes_at: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NilpotencyReport {
    pub max_depth: usize,
    pub entries: Vec<NilpotencyEntry>,
    /// True when every probe vanished within the depth bound. In the
    /// polynomial model this holds for every operator (the distinguishing
    /// property of the smooth theory fails here), provided the depth is
    /// large enough for the probe degrees.
    pub locally_nilpotent_on_probes: bool,
}

/// Probes local nilpotency of ad_D against monomials of degree < max_depth
/// and the coordinate derivative fields, reporting the least vanishing depth
/// for each probe (searched up to max_depth inclusive).
pub fn ad_nilpotency_probe(d: &DiffOp, max_depth: usize) -> Result<NilpotencyReport, SymbolError> {
    assert!(max_depth >= 1, "max_depth must be at least 1");
    let n = d.dim();
    let mut probes: Vec<(String, DiffOp)> = Vec::new();
    for idx in indices_up_to_degree(n, max_depth - 1) {
        let mono = RationalPoly::monomial(n, idx, Rational::one());
        probes.push((mono.to_string(), DiffOp::from_function(mono)));
    }
    for axis in 0..n {
        probes.push((format!("d{}", axis + 1), DiffOp::partial(n, axis)));
    }

    let mut entries = Vec::new();
    let mut all_vanish = true;
    for (name, probe) in probes {
        let mut cur = probe;
        let mut vanishes_at = None;
        for k in 0..=max_depth {
            if cur.is_zero() {
                vanishes_at = Some(k);
                break;
            }
            cur = d.bracket(&cur)?;
        }
        if vanishes_at.is_none() {
            all_vanish = false;
        }
        entries.push(NilpotencyEntry {
            probe: name,
            vanishes_at,
        });
    }
    Ok(NilpotencyReport {
        max_depth,
        entries,
        locally_nilpotent_on_probes: all_vanish,
    })
}

/// Whether [d, f] lies in D^i for every monomial f of degree up to
/// order(d) + 1. The forward inclusion (order(d) <= i+1 implies the answer
/// is yes) always holds in this model and is asserted.
pub fn bracket_filtration_probe(d: &DiffOp, i: isize) -> Result<bool, SymbolError> {
    assert!(i >= -1, "filtration level must be >= -1");
    let n = d.dim();
    let max_deg = d.order().unwrap_or(0) + 1;
    let mut all_in = true;
    for idx in indices_up_to_degree(n, max_deg) {
        let f = DiffOp::from_function(RationalPoly::monomial(n, idx, Rational::one()));
        let br = d.bracket(&f)?;
        if !br.order_at_most(i) {
            all_in = false;
            break;
        }
    }
    if d.order_at_most(i + 1) {
        assert!(all_in, "forward filtration inclusion must hold");
    }
    Ok(all_in)
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut entries: Vec<_> = self.terms.iter().collect();
        entries.sort_by(|(a, _), (b, _)| a.grlex_cmp(b));
        let mut first = true;
        for (xi_idx, coeff) in entries {
            let xipart = fmt_monomial(xi_idx, "xi");
            for (idx, c) in coeff.grlex_terms() {
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
                let mut factors = Vec::new();
                let mag = c.abs();
                if !mag.is_one() || (xpart.is_empty() && xipart.is_empty()) {
                    factors.push(mag.to_string());
                }
                if !xpart.is_empty() {
                    factors.push(xpart);
                }
                if !xipart.is_empty() {
                    factors.push(xipart.clone());
                }
                write!(f, "{}", factors.join("*"))?;
                first = false;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SymTermJson {
    xi: Vec<u32>,
    coeff: RationalPoly,
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    dim: usize,
    ops: Vec<SymTermJson>,
}

impl Serialize for PolySymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut entries: Vec<_> = self.terms.iter().collect();
        entries.sort_by(|(a, _), (b, _)| a.grlex_cmp(b));
        SymbolJson {
            dim: self.dim,
            ops: entries
                .into_iter()
                .map(|(xi, coeff)| SymTermJson {
                    xi: xi.exponents().to_vec(),
                    coeff: coeff.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PolySymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SymbolJson::deserialize(deserializer)?;
        let mut s = PolySymbol::zero(raw.dim);
        for t in raw.ops {
            if t.xi.len() != raw.dim || t.coeff.dim() != raw.dim {
                return Err(D::Error::custom("symbol term dimension mismatch"));
            }
            s.add_term(MultiIndex::new(t.xi), t.coeff);
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::rat;

    fn x(dim: usize, axis: usize) -> RationalPoly {
        RationalPoly::var(dim, axis)
    }

    #[test]
    fn principal_symbol_examples() {
        // sigma(x1 d1^2 + d2) = x1 xi1^2
        let op = DiffOp::term(x(2, 0), MultiIndex::new(vec![2, 0]))
            .add(&DiffOp::partial(2, 1))
            .unwrap();
        let s = principal_symbol(&op).unwrap();
        assert_eq!(s, PolySymbol::term(x(2, 0), MultiIndex::new(vec![2, 0])));
        assert!(s.is_homogeneous_of_degree(2));

        // sigma(f) = f on functions
        let f = (&x(2, 0) * &x(2, 1)).add(&RationalPoly::one(2)).unwrap();
        assert_eq!(
            principal_symbol(&DiffOp::from_function(f.clone())).unwrap(),
            PolySymbol::from_function(f)
        );

        // sigma(d1 x1) = x1 xi1
        let op = DiffOp::partial(1, 0)
            .compose(&DiffOp::from_function(x(1, 0)))
            .unwrap();
        assert_eq!(
            principal_symbol(&op).unwrap(),
            PolySymbol::term(x(1, 0), MultiIndex::new(vec![1]))
        );

        assert_eq!(
            principal_symbol(&DiffOp::zero(2)),
            Err(SymbolError::ZeroOperator)
        );
    }

    #[test]
    fn poisson_canonical_pair() {
        let p = PolySymbol::xi(1, 0);
        let q = PolySymbol::from_function(x(1, 0));
        assert_eq!(poisson_bracket(&p, &q).unwrap(), PolySymbol::one(1));
        // {xi1^2, x1} = 2 xi1
        assert_eq!(
            poisson_bracket(&p.pow(2), &q).unwrap(),
            PolySymbol::xi(1, 0).scale(&rat(2, 1))
        );
        // antisymmetry on the nose
        let r = p.pow(2).mul(&q).unwrap().add(&p).unwrap();
        assert!(poisson_bracket(&r, &r).unwrap().is_zero());
    }

    #[test]
    fn grading_drop() {
        let p = PolySymbol::term(x(2, 0), MultiIndex::new(vec![2, 0]));
        let q = PolySymbol::term(x(2, 0), MultiIndex::new(vec![0, 1]));
        let pb = poisson_bracket(&p, &q).unwrap();
        // {S_2, S_1} subset S_2: here {x1 xi1^2, x1 xi2} = 2 x1 xi1 xi2
        assert!(!pb.is_zero());
        assert!(pb.is_homogeneous_of_degree(2));
    }

    #[test]
    fn compat_check_branches() {
        let n = 1;
        // d1^2 vs x1: bracket branch Equal
        let d2 = DiffOp::partial(n, 0).compose(&DiffOp::partial(n, 0)).unwrap();
        let xop = DiffOp::from_function(x(n, 0));
        let rep = symbol_compat_check(&d2, &xop).unwrap();
        assert!(rep.product_ok && rep.bracket_ok);
        assert_eq!(rep.branch, BracketBranch::Equal);

        // d1 vs d2 in dimension 2: commuting, branch Zero
        let rep = symbol_compat_check(&DiffOp::partial(2, 0), &DiffOp::partial(2, 1)).unwrap();
        assert!(rep.product_ok && rep.bracket_ok);
        assert_eq!(rep.branch, BracketBranch::Zero);

        // two functions: products match, bracket zero
        let f = DiffOp::from_function(x(2, 0));
        let g = DiffOp::from_function(x(2, 1).pow(2));
        let rep = symbol_compat_check(&f, &g).unwrap();
        assert!(rep.product_ok && rep.bracket_ok);
        assert_eq!(rep.branch, BracketBranch::Zero);
    }

    #[test]
    fn hamiltonian_apply_examples() {
        let p = PolySymbol::xi(1, 0);
        let f = x(1, 0).pow(3);
        let r3 = hamiltonian_apply(&p, &f, 3).unwrap();
        assert_eq!(
            r3,
            PolySymbol::from_function(RationalPoly::constant(1, rat(6, 1)))
        );
        assert!(hamiltonian_apply(&p, &f, 4).unwrap().is_zero());
        assert_eq!(
            hamiltonian_apply(&p, &f, 0).unwrap(),
            PolySymbol::from_function(f)
        );
    }

    #[test]
    fn hamiltonian_apply_matches_poisson_iteration() {
        let p = PolySymbol::term(x(2, 1), MultiIndex::new(vec![2, 0]))
            .add(&PolySymbol::xi(2, 1))
            .unwrap();
        let f = (&x(2, 0) * &x(2, 1)).add(&x(2, 0).pow(2)).unwrap();
        let mut expected = PolySymbol::from_function(f.clone());
        for k in 0..4 {
            assert_eq!(hamiltonian_apply(&p, &f, k).unwrap(), expected);
            expected = poisson_bracket(&p, &expected).unwrap();
        }
    }

    #[test]
    fn nilpotency_probe_function() {
        // d = x1: brackets with functions vanish at depth 1
        let report = ad_nilpotency_probe(&DiffOp::from_function(x(1, 0)), 3).unwrap();
        assert!(report.locally_nilpotent_on_probes);
        for e in &report.entries {
            if e.probe == "d1" {
                assert_eq!(e.vanishes_at, Some(2));
            } else {
                assert_eq!(e.vanishes_at, Some(1));
            }
        }
    }

    #[test]
    fn nilpotency_probe_derivative() {
        // d = d1, probe (x1)^3 vanishes exactly at depth 4
        let report = ad_nilpotency_probe(&DiffOp::partial(1, 0), 4).unwrap();
        let cube = report
            .entries
            .iter()
            .find(|e| e.probe == "x1^3")
            .expect("cube probe present");
        assert_eq!(cube.vanishes_at, Some(4));
        assert!(report.locally_nilpotent_on_probes);
    }

    #[test]
    fn filtration_probe_examples() {
        let d2 = DiffOp::partial(1, 0).compose(&DiffOp::partial(1, 0)).unwrap();
        assert!(bracket_filtration_probe(&d2, 1).unwrap());
        assert!(!bracket_filtration_probe(&d2, 0).unwrap());
        let f = DiffOp::from_function(x(2, 0).pow(2));
        assert!(bracket_filtration_probe(&f, -1).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let s = PolySymbol::term(x(2, 0).scale(&rat(5, 3)), MultiIndex::new(vec![1, 2]))
            .add(&PolySymbol::one(2))
            .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: PolySymbol = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}
