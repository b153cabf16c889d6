//! Truncated power series in (z_1..z_n) and their conjugates (zb_1..zb_n).
//!
//! A `BiSeries` stores the coefficient of z^j zb^k for multi-indices (j, k),
//! truncated by TOTAL degree |j|+|k| <= order, in canonical sparse form
//! (no zero coefficients, graded-lex key order). This is the substrate for
//! potentials, diastases, and all scalar jets.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::complex::Complex64;

use crate::error::{KErr, KResult};
use crate::holomap::HoloMap;
use crate::multi_index::MultiIndex;
use crate::scalar::Scalar;

/// Bidegree term key. Ordered graded-lexicographically: total degree
/// |j|+|k| first, then |j|, then j lex, then k lex. BTreeMap iteration in
/// this order is also the serialization order.
#[derive(Clone, PartialEq, Eq)]
pub struct TermKey {
    pub j: MultiIndex,
    pub k: MultiIndex,
}

impl TermKey {
    pub fn new(j: MultiIndex, k: MultiIndex) -> Self {
        TermKey { j, k }
    }

    pub fn total_deg(&self) -> u32 {
        self.j.deg() + self.k.deg()
    }

    /// Pure terms (j = 0 or k = 0, constant included) are exactly the ones a
    /// diastasis must not contain.
    pub fn is_pure(&self) -> bool {
        self.j.is_zero() || self.k.is_zero()
    }

    /// The key of the conjugate term.
    pub fn swapped(&self) -> TermKey {
        TermKey {
            j: self.k.clone(),
            k: self.j.clone(),
        }
    }
}

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_deg()
            .cmp(&other.total_deg())
            .then_with(|| self.j.cmp(&other.j))
            .then_with(|| self.k.cmp(&other.k))
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z^{:?} zb^{:?}", self.j, self.k)
    }
}

#[derive(Clone, PartialEq)]
pub struct BiSeries<C: Scalar> {
    dim: usize,
    order: u32,
    terms: BTreeMap<TermKey, C>,
}

impl<C: Scalar> BiSeries<C> {
    pub fn zero(dim: usize, order: u32) -> Self {
        BiSeries {
            dim,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, order: u32, c: C) -> Self {
        let mut s = Self::zero(dim, order);
        s.add_term(MultiIndex::zero(dim), MultiIndex::zero(dim), c);
        s
    }

    pub fn one(dim: usize, order: u32) -> Self {
        Self::constant(dim, order, C::one())
    }

    /// c * z^j zb^k. Terms beyond the truncation order are dropped (the
    /// series represents a jet, not a polynomial).
    pub fn monomial(dim: usize, order: u32, j: &[u32], k: &[u32], c: C) -> Self {
        assert_eq!(j.len(), dim, "j length != dim");
        assert_eq!(k.len(), dim, "k length != dim");
        let mut s = Self::zero(dim, order);
        s.add_term(MultiIndex::new(j), MultiIndex::new(k), c);
        s
    }

    pub fn from_terms(dim: usize, order: u32, terms: &[(&[u32], &[u32], C)]) -> Self {
        let mut s = Self::zero(dim, order);
        for (j, k, c) in terms {
            assert_eq!(j.len(), dim);
            assert_eq!(k.len(), dim);
            s.add_term(MultiIndex::new(j), MultiIndex::new(k), c.clone());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero_series(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter_terms(&self) -> impl Iterator<Item = (&TermKey, &C)> {
        self.terms.iter()
    }

    /// Accumulate c into the (j, k) slot, keeping canonical form: drop
    /// beyond-order terms, prune exact zeros.
    pub(crate) fn add_term(&mut self, j: MultiIndex, k: MultiIndex, c: C) {
        debug_assert_eq!(j.len(), self.dim);
        debug_assert_eq!(k.len(), self.dim);
        if c.is_zero() || j.deg() + k.deg() > self.order {
            return;
        }
        let key = TermKey::new(j, k);
        match self.terms.remove(&key) {
            None => {
                self.terms.insert(key, c);
            }
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
        }
    }

    pub fn coeff(&self, j: &[u32], k: &[u32]) -> C {
        let key = TermKey::new(MultiIndex::new(j), MultiIndex::new(k));
        self.coeff_key(&key)
    }

    pub fn coeff_key(&self, key: &TermKey) -> C {
        self.terms.get(key).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff_key(&TermKey::new(
            MultiIndex::zero(self.dim),
            MultiIndex::zero(self.dim),
        ))
    }

    /// Same coefficients re-truncated at a (usually lower) order.
    pub fn truncated(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mut out = Self::zero(self.dim, order);
        for (key, c) in &self.terms {
            if key.total_deg() <= order {
                out.terms.insert(key.clone(), c.clone());
            }
        }
        out
    }

    /// Copy with the (0,0) coefficient removed.
    pub fn without_constant_term(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&TermKey::new(
            MultiIndex::zero(self.dim),
            MultiIndex::zero(self.dim),
        ));
        out
    }

    fn assert_same_dim(&self, o: &Self, what: &str) {
        assert_eq!(
            self.dim, o.dim,
            "{what}: dimension mismatch {} vs {}",
            self.dim, o.dim
        );
    }

    /// Coefficientwise sum; result order = min of the operand orders.
    pub fn add(&self, o: &Self) -> Self {
        self.assert_same_dim(o, "add");
        let order = self.order.min(o.order);
        let mut out = Self::zero(self.dim, order);
        for (key, c) in self.terms.iter().chain(o.terms.iter()) {
            out.add_term(key.j.clone(), key.k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        if c.is_zero() {
            return out;
        }
        for (key, v) in &self.terms {
            let w = v.clone() * c.clone();
            if !w.is_zero() {
                out.terms.insert(key.clone(), w);
            }
        }
        out
    }

    /// Cauchy product truncated at min order. Time: O(T_a * T_b) coefficient
    /// multiplies; exact in exact mode.
    pub fn mul(&self, o: &Self) -> Self {
        self.assert_same_dim(o, "mul");
        let order = self.order.min(o.order);
        let mut out = Self::zero(self.dim, order);
        for (ka, ca) in &self.terms {
            let da = ka.total_deg();
            if da > order {
                continue;
            }
            for (kb, cb) in &o.terms {
                if da + kb.total_deg() > order {
                    continue;
                }
                out.add_term(
                    ka.j.add(&kb.j),
                    ka.k.add(&kb.k),
                    ca.clone() * cb.clone(),
                );
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one(self.dim, self.order);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    fn require_zero_constant(&self, what: &str) -> KResult<()> {
        let c = self.constant_term();
        if c.is_zero() {
            Ok(())
        } else {
            Err(KErr::NonzeroConstantTerm(format!("{what}: constant = {c}")))
        }
    }

    /// log(1 + s) = sum_{m>=1} (-1)^{m+1} s^m / m, truncated. Requires zero
    /// constant term; s^m vanishes below total degree m, so m <= order terms
    /// suffice.
    pub fn log1p(&self) -> KResult<Self> {
        self.require_zero_constant("log1p")?;
        let mut acc = Self::zero(self.dim, self.order);
        let mut p = self.clone();
        for m in 1..=self.order.max(1) as i64 {
            if p.is_zero_series() {
                break;
            }
            let c = C::from_fraction(if m % 2 == 1 { 1 } else { -1 }, m);
            acc = acc.add(&p.scale(&c));
            if (m as u32) < self.order {
                p = p.mul(self);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    /// exp(s) = sum_{m>=0} s^m / m!, truncated. Requires zero constant term
    /// (a general constant factors out as a scalar multiply). Terms are built
    /// incrementally (t <- t*s/m) so no factorial is ever materialized.
    pub fn exp(&self) -> KResult<Self> {
        self.require_zero_constant("exp")?;
        let mut acc = Self::one(self.dim, self.order);
        let mut term = Self::one(self.dim, self.order);
        for m in 1..=self.order.max(1) as i64 {
            term = term.mul(self).scale(&C::from_fraction(1, m));
            if term.is_zero_series() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Formal partial derivative in z_i (conjugate = false) or zb_i
    /// (conjugate = true); the truncation order drops by one.
    pub fn diff(&self, var: usize, conjugate: bool) -> KResult<Self> {
        if var >= self.dim {
            return Err(KErr::IndexOutOfRange {
                index: var,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(self.dim, self.order.saturating_sub(1));
        for (key, c) in &self.terms {
            let (src, other) = if conjugate {
                (&key.k, &key.j)
            } else {
                (&key.j, &key.k)
            };
            let e = src.get(var);
            if e == 0 {
                continue;
            }
            let lowered = src.lowered(var).expect("positive exponent");
            let scaled = c.clone() * C::from_int(e as i64);
            if conjugate {
                out.add_term(other.clone(), lowered, scaled);
            } else {
                out.add_term(lowered, other.clone(), scaled);
            }
        }
        Ok(out)
    }

    /// Series with j and k swapped: the formal conjugate. Coefficients are
    /// real in both modes, so no coefficient conjugation is involved.
    pub fn conj_series(&self) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for (key, c) in &self.terms {
            out.terms.insert(key.swapped(), c.clone());
        }
        out
    }

    /// Real-valued series test: coeff(j,k) = coeff(k,j) (exact mode) or equal
    /// within tol (float mode).
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.iter().all(|(key, c)| {
            let mirror = self.coeff_key(&key.swapped());
            (c.clone() - mirror).approx_zero(tol)
        })
    }

    /// Terms with j = 0 or k = 0 (constant included): exactly what the
    /// diastasis characterization forbids.
    pub fn pure_part(&self) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for (key, c) in &self.terms {
            if key.is_pure() {
                out.terms.insert(key.clone(), c.clone());
            }
        }
        out
    }

    /// Terms with j != 0 and k != 0.
    pub fn mixed_part(&self) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for (key, c) in &self.terms {
            if !key.is_pure() {
                out.terms.insert(key.clone(), c.clone());
            }
        }
        out
    }

    pub fn has_pure_terms(&self) -> bool {
        self.terms.keys().any(|key| key.is_pure())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    pub fn is_approx_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.approx_zero(tol))
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.sub(o).is_approx_zero(tol)
    }

    /// Substitute z := m(Z), zb := conj(m)(Zb). The conjugate substitution
    /// uses the componentwise conjugated map (real coefficients: j/k swap).
    /// Requires zero constant terms on m so truncation is consistent; result
    /// order = min(self.order, m.order), result dim = m.dim_in.
    pub fn compose(&self, m: &HoloMap<C>) -> KResult<Self> {
        if m.dim_out() != self.dim {
            return Err(KErr::DimensionMismatch(format!(
                "compose: series dim {} vs map output dim {}",
                self.dim,
                m.dim_out()
            )));
        }
        for (i, comp) in m.components().iter().enumerate() {
            if !comp.constant_term().is_zero() {
                return Err(KErr::NonzeroConstantTerm(format!("map component {i}")));
            }
        }
        let order = self.order.min(m.order());
        let dim_in = m.dim_in();

        // Power caches per component and side; components have zero constant
        // term, so a bidegree-(j,k) source term only produces total degree
        // >= |j|+|k| and the min-order cutoff is sound.
        let mut max_j = vec![0u32; self.dim];
        let mut max_k = vec![0u32; self.dim];
        for key in self.terms.keys() {
            if key.total_deg() > order {
                continue;
            }
            for i in 0..self.dim {
                max_j[i] = max_j[i].max(key.j.get(i));
                max_k[i] = max_k[i].max(key.k.get(i));
            }
        }
        let pow_table = |base: BiSeries<C>, hi: u32| -> Vec<BiSeries<C>> {
            let mut t = Vec::with_capacity(hi as usize + 1);
            t.push(BiSeries::one(dim_in, order));
            for p in 1..=hi {
                let prev = &t[(p - 1) as usize];
                t.push(prev.mul(&base));
            }
            t
        };
        let mut pw = Vec::with_capacity(self.dim);
        let mut pwc = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let comp = m.components()[i].truncated(order);
            pw.push(pow_table(comp.clone(), max_j[i]));
            pwc.push(pow_table(comp.conj_series(), max_k[i]));
        }

        let mut acc = Self::zero(dim_in, order);
        for (key, c) in &self.terms {
            if key.total_deg() > order {
                continue;
            }
            let mut prod = BiSeries::constant(dim_in, order, c.clone());
            for i in 0..self.dim {
                let e = key.j.get(i);
                if e > 0 {
                    prod = prod.mul(&pw[i][e as usize]);
                }
                let e = key.k.get(i);
                if e > 0 {
                    prod = prod.mul(&pwc[i][e as usize]);
                }
            }
            acc = acc.add(&prod);
        }
        Ok(acc)
    }

    /// Numeric evaluation at a point (truncated-jet value). Deterministic
    /// summation order (graded-lex).
    pub fn eval(&self, pt: &[Complex64]) -> Complex64 {
        assert_eq!(pt.len(), self.dim, "eval: point dimension mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for (key, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64(), 0.0);
            for i in 0..self.dim {
                let e = key.j.get(i);
                if e > 0 {
                    t *= pt[i].powu(e);
                }
                let e = key.k.get(i);
                if e > 0 {
                    t *= pt[i].conj().powu(e);
                }
            }
            acc += t;
        }
        acc
    }
}

impl<C: Scalar> fmt::Debug for BiSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiSeries(dim={}, order={})[", self.dim, self.order)?;
        for (i, (key, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*z^{:?}*zb^{:?}", key.j, key.k)?;
        }
        write!(f, "]")
    }
}
