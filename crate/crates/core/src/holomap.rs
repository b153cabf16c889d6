//! Tuples of truncated holomorphic series: coordinate changes and embeddings.

use num::complex::Complex64;

use crate::error::{KErr, KResult};
use crate::matrix::{mat_inv, Mat};
use crate::multi_index::MultiIndex;
use crate::scalar::Scalar;
use crate::series::BiSeries;

/// phi: C^{dim_in} -> C^{dim_out}, each component a series in the z-variables
/// only (every stored term has k = 0). An invertible coordinate change
/// additionally has zero constant term and invertible linear part.
#[derive(Clone, PartialEq, Debug)]
pub struct HoloMap<C: Scalar> {
    dim_in: usize,
    dim_out: usize,
    order: u32,
    comps: Vec<BiSeries<C>>,
}

impl<C: Scalar> HoloMap<C> {
    pub fn from_components(comps: Vec<BiSeries<C>>) -> KResult<Self> {
        assert!(!comps.is_empty(), "map needs at least one component");
        let dim_in = comps[0].dim();
        let order = comps.iter().map(|c| c.order()).min().unwrap();
        for (i, comp) in comps.iter().enumerate() {
            if comp.dim() != dim_in {
                return Err(KErr::DimensionMismatch(format!(
                    "component {i} has dim {} (expected {dim_in})",
                    comp.dim()
                )));
            }
            if comp.iter_terms().any(|(key, _)| !key.k.is_zero()) {
                return Err(KErr::NotHolomorphic(i));
            }
        }
        let dim_out = comps.len();
        let comps = comps.iter().map(|c| c.truncated(order)).collect();
        Ok(HoloMap {
            dim_in,
            dim_out,
            order,
            comps,
        })
    }

    pub fn identity(n: usize, order: u32) -> Self {
        let comps = (0..n)
            .map(|i| {
                BiSeries::monomial(
                    n,
                    order,
                    MultiIndex::unit(n, i).exps(),
                    MultiIndex::zero(n).exps(),
                    C::one(),
                )
            })
            .collect();
        HoloMap {
            dim_in: n,
            dim_out: n,
            order,
            comps,
        }
    }

    /// Linear map from a dim_out x dim_in matrix: component a = sum_i m[a][i] z_i.
    pub fn linear(m: &Mat<C>, order: u32) -> Self {
        let dim_out = m.len();
        let dim_in = m[0].len();
        let comps = m
            .iter()
            .map(|row| {
                let mut s = BiSeries::zero(dim_in, order);
                for (i, c) in row.iter().enumerate() {
                    s = s.add(&BiSeries::monomial(
                        dim_in,
                        order,
                        MultiIndex::unit(dim_in, i).exps(),
                        MultiIndex::zero(dim_in).exps(),
                        c.clone(),
                    ));
                }
                s
            })
            .collect();
        HoloMap {
            dim_in,
            dim_out,
            order,
            comps,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn components(&self) -> &[BiSeries<C>] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &BiSeries<C> {
        &self.comps[i]
    }

    pub fn preserves_center(&self) -> bool {
        self.comps.iter().all(|c| c.constant_term().is_zero())
    }

    /// The dim_out x dim_in matrix of degree-1 coefficients.
    pub fn linear_part(&self) -> Mat<C> {
        (0..self.dim_out)
            .map(|a| {
                (0..self.dim_in)
                    .map(|i| {
                        self.comps[a].coeff(
                            MultiIndex::unit(self.dim_in, i).exps(),
                            MultiIndex::zero(self.dim_in).exps(),
                        )
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_linear(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter_terms().all(|(key, _)| key.total_deg() <= 1))
    }

    /// (self o inner)(z) = self(inner(z)). Requires inner.dim_out = self.dim_in
    /// and zero constant terms on inner.
    pub fn compose_map(&self, inner: &HoloMap<C>) -> KResult<HoloMap<C>> {
        if inner.dim_out != self.dim_in {
            return Err(KErr::DimensionMismatch(format!(
                "compose_map: inner output dim {} vs outer input dim {}",
                inner.dim_out, self.dim_in
            )));
        }
        let comps: KResult<Vec<_>> = self.comps.iter().map(|c| c.compose(inner)).collect();
        HoloMap::from_components(comps?)
    }

    /// Formal inverse to the truncation order: compose(self, invert_map(self))
    /// is the identity jet. Requires zero constant term and invertible linear
    /// part. Newton-style order-by-order: g_{s+1}(w) = L^{-1}(w - h(g_s(w)))
    /// with self = L + h, h of degree >= 2; each sweep gains one degree.
    pub fn invert(&self) -> KResult<HoloMap<C>> {
        if self.dim_in != self.dim_out {
            return Err(KErr::DimensionMismatch(format!(
                "invert: map is {} -> {}",
                self.dim_in, self.dim_out
            )));
        }
        if !self.preserves_center() {
            return Err(KErr::NonzeroConstantTerm("invert_map input".into()));
        }
        let n = self.dim_in;
        let linv = mat_inv(&self.linear_part()).map_err(|_| KErr::SingularLinearPart)?;

        // higher-degree part h_a = self_a - (linear part)_a
        let lin_map = HoloMap::linear(&self.linear_part(), self.order);
        let higher: Vec<BiSeries<C>> = (0..n)
            .map(|a| self.comps[a].sub(&lin_map.comps[a]))
            .collect();

        let apply_linv = |v: &[BiSeries<C>]| -> Vec<BiSeries<C>> {
            (0..n)
                .map(|a| {
                    let mut acc = BiSeries::zero(n, self.order);
                    for (i, vi) in v.iter().enumerate() {
                        acc = acc.add(&vi.scale(&linv[a][i]));
                    }
                    acc
                })
                .collect()
        };

        let id = HoloMap::<C>::identity(n, self.order);
        let mut g = HoloMap::from_components(apply_linv(&id.comps))?;
        for _ in 1..self.order {
            let h_of_g: KResult<Vec<_>> = higher.iter().map(|h| h.compose(&g)).collect();
            let rhs: Vec<BiSeries<C>> = id
                .comps
                .iter()
                .zip(h_of_g?)
                .map(|(w, hg)| w.sub(&hg))
                .collect();
            g = HoloMap::from_components(apply_linv(&rhs))?;
        }
        Ok(g)
    }

    pub fn eval(&self, pt: &[Complex64]) -> Vec<Complex64> {
        self.comps.iter().map(|c| c.eval(pt)).collect()
    }

    /// Jacobian dim_out x dim_in evaluated at a point. Intended for exact
    /// polynomial maps (embeddings, polynomial Bochner changes), where the
    /// truncation order never bites.
    pub fn jacobian_eval(&self, pt: &[Complex64]) -> Vec<Vec<Complex64>> {
        (0..self.dim_out)
            .map(|a| {
                (0..self.dim_in)
                    .map(|i| self.comps[a].diff(i, false).expect("index in range").eval(pt))
                    .collect()
            })
            .collect()
    }

    pub fn approx_eq(&self, o: &HoloMap<C>, tol: f64) -> bool {
        self.dim_in == o.dim_in
            && self.dim_out == o.dim_out
            && self
                .comps
                .iter()
                .zip(&o.comps)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}
