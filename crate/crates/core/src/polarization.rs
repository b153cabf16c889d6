//! Section spaces of O(k) on CP^n: monomial bases with closed-form L^2
//! norms, Kodaira maps, the Bergman diastasis D^k, and the basepoint /
//! orthogonality condition checkers.
//!
//! All norm constants are stored relative to vol(CP^n), so the overall
//! volume normalization cancels: <Z^a, Z^a> / vol = n! (prod_i a_i!) / (k+n)!
//! by the Dirichlet integral, a positive rational.

use num::complex::Complex64;

use crate::error::{KErr, KResult};
use crate::exec::Exec;
use crate::holomap::HoloMap;
use crate::quadrature::raw_inner_products;
use crate::scalar::Scalar;
use crate::series::BiSeries;

/// One monomial section Z^a of O(k): homogeneous exponents over
/// (Z_0, ..., Z_n) summing to k, plus its squared L^2 norm relative to
/// vol(CP^n).
#[derive(Clone, Debug, PartialEq)]
pub struct Section<C: Scalar> {
    pub exps: Vec<u32>,
    pub norm_sq: C,
}

#[derive(Clone, Debug)]
pub struct SectionBasis<C: Scalar> {
    pub n: usize,
    pub k: u32,
    /// First section is Z_0^k by construction of monomial_basis.
    pub sections: Vec<Section<C>>,
}

impl<C: Scalar> SectionBasis<C> {
    pub fn d_k(&self) -> usize {
        self.sections.len() - 1
    }

    /// Invariants: distinct exponent vectors of total degree exactly k with
    /// strictly positive normalization scalars.
    pub fn is_valid(&self) -> bool {
        let deg_ok = self
            .sections
            .iter()
            .all(|s| s.exps.len() == self.n + 1 && s.exps.iter().sum::<u32>() == self.k);
        let positive = self.sections.iter().all(|s| s.norm_sq.is_positive());
        let mut seen: Vec<&Vec<u32>> = self.sections.iter().map(|s| &s.exps).collect();
        seen.sort();
        let distinct = seen.windows(2).all(|w| w[0] != w[1]);
        deg_ok && positive && distinct
    }
}

/// L^2 inner product of two degree-k monomial sections relative to
/// vol(CP^n): zero off-diagonal (the phase torus integrates any nontrivial
/// character to zero), and n! (prod a_i!) / (k+n)! on the diagonal.
pub fn monomial_inner<C: Scalar>(n: usize, k: u32, a: &[u32], b: &[u32]) -> KResult<C> {
    if a.len() != n + 1
        || b.len() != n + 1
        || a.iter().sum::<u32>() != k
        || b.iter().sum::<u32>() != k
    {
        return Err(KErr::DegreeMismatch(a.to_vec(), b.to_vec(), k));
    }
    if a != b {
        return Ok(C::zero());
    }
    let mut c = C::one();
    for f in 2..=n as i64 {
        c = c * C::from_int(f);
    }
    for &ai in a {
        for f in 2..=ai as i64 {
            c = c * C::from_int(f);
        }
    }
    for f in 2..=(k as i64 + n as i64) {
        c = c / C::from_int(f);
    }
    Ok(c)
}

fn enumerate_exps(vars: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if vars == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for e in (0..=total).rev() {
        prefix.push(e);
        enumerate_exps(vars - 1, total - e, prefix, out);
        prefix.pop();
    }
}

/// All degree-k monomials over (Z_0, ..., Z_n), Z_0-exponent descending so
/// the basepoint section Z_0^k comes first, with closed-form norms.
pub fn monomial_basis<C: Scalar>(n: usize, k: u32) -> SectionBasis<C> {
    assert!(n >= 1 && k >= 1, "monomial_basis: n >= 1, k >= 1");
    let mut exps = Vec::new();
    enumerate_exps(n + 1, k, &mut Vec::new(), &mut exps);
    let sections = exps
        .into_iter()
        .map(|e| {
            let norm_sq = monomial_inner(n, k, &e, &e).expect("degrees match");
            Section { exps: e, norm_sq }
        })
        .collect();
    SectionBasis { n, k, sections }
}

/// One component of a Kodaira map in an affine chart: weight * u^exps, the
/// weight stored squared because it is the rational norm ratio
/// ||s_base||^2 / ||s||^2 = k! / prod_i a_i! whose square root is generally
/// irrational.
#[derive(Clone, Debug, PartialEq)]
pub struct KodairaComponent<C: Scalar> {
    /// Exponents of the n affine coordinates of the source chart.
    pub affine_exps: Vec<u32>,
    pub weight_sq: C,
}

#[derive(Clone, Debug)]
pub struct KodairaMap<C: Scalar> {
    pub n: usize,
    pub k: u32,
    pub chart: usize,
    pub d_k: usize,
    /// Components ordered with the basepoint section first.
    pub components: Vec<KodairaComponent<C>>,
    pub basepoint_index: usize,
}

impl<C: Scalar> KodairaMap<C> {
    /// Projective-chart value at an affine point of the source.
    pub fn eval(&self, pt: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(pt.len(), self.n, "point dim");
        self.components
            .iter()
            .map(|c| {
                let mut v = Complex64::new(c.weight_sq.to_f64().sqrt(), 0.0);
                for (z, &e) in pt.iter().zip(&c.affine_exps) {
                    v *= z.powu(e);
                }
                v
            })
            .collect()
    }

    /// The affine expression of the map into the chart of CP^{d_k} around
    /// the basepoint image: drops the constant basepoint component and takes
    /// square roots of the weights — exact only when every weight is a
    /// perfect square, otherwise rerun in float mode.
    pub fn try_to_holomap(&self, order: u32) -> KResult<HoloMap<C>> {
        let comps: KResult<Vec<_>> = self.components[1..]
            .iter()
            .map(|c| {
                let w = c.weight_sq.try_sqrt().ok_or_else(|| {
                    KErr::IrrationalSqrt(format!("Kodaira weight {}", c.weight_sq))
                })?;
                let zero = vec![0u32; self.n];
                Ok(BiSeries::monomial(self.n, order, &c.affine_exps, &zero, w))
            })
            .collect();
        HoloMap::from_components(comps?)
    }
}

/// Kodaira map of a basis in the given chart: components are the orthonormal
/// sections divided by the trivializing power Z_chart^k, i.e.
/// sqrt(||Z_chart^k||^2 / ||Z^a||^2) u^{a'} with a' the affine exponents.
pub fn kodaira_map<C: Scalar>(basis: &SectionBasis<C>, chart: usize) -> KResult<KodairaMap<C>> {
    if chart > basis.n {
        return Err(KErr::Invalid(format!(
            "chart index {chart} out of range for CP^{}",
            basis.n
        )));
    }
    let base_pos = basis
        .sections
        .iter()
        .position(|s| s.exps[chart] == basis.k)
        .ok_or_else(|| {
            KErr::Invalid(format!("basis has no pure Z_{chart}^{} section", basis.k))
        })?;
    let base_norm = basis.sections[base_pos].norm_sq.clone();
    let mut order: Vec<usize> = Vec::with_capacity(basis.sections.len());
    order.push(base_pos);
    order.extend((0..basis.sections.len()).filter(|&i| i != base_pos));
    let components = order
        .iter()
        .map(|&i| {
            let s = &basis.sections[i];
            let affine_exps: Vec<u32> = s
                .exps
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != chart)
                .map(|(_, &e)| e)
                .collect();
            KodairaComponent {
                affine_exps,
                weight_sq: base_norm.clone() / s.norm_sq.clone(),
            }
        })
        .collect();
    Ok(KodairaMap {
        n: basis.n,
        k: basis.k,
        chart,
        d_k: basis.d_k(),
        components,
        basepoint_index: 0,
    })
}

/// Bergman diastasis D^k: pullback of the Fubini-Study diastasis of
/// CP^{d_k} through the Kodaira map,
/// log(1 + sum_{a >= 1} weight_sq_a (u ubar)^{a'}) — exact, no square roots.
pub fn bergman_diastasis<C: Scalar>(map: &KodairaMap<C>, order: u32) -> KResult<BiSeries<C>> {
    let base = &map.components[0];
    if base.affine_exps.iter().any(|&e| e != 0) {
        return Err(KErr::ConditionCViolated);
    }
    if map.components[1..]
        .iter()
        .any(|c| c.affine_exps.iter().all(|&e| e == 0))
    {
        return Err(KErr::ConditionCViolated);
    }
    let mut t = BiSeries::<C>::zero(map.n, order);
    for c in &map.components[1..] {
        t = t.add(&BiSeries::monomial(
            map.n,
            order,
            &c.affine_exps,
            &c.affine_exps,
            c.weight_sq.clone(),
        ));
    }
    t.log1p()
}

/// Condition (C): all sections except the pure vertex power vanish at the
/// coordinate vertex p_* = [0,...,1,...,0]; holds iff exactly one section
/// has full degree on that vertex.
pub fn check_condition_c<C: Scalar>(basis: &SectionBasis<C>, vertex: usize) -> bool {
    if vertex > basis.n {
        return false;
    }
    basis
        .sections
        .iter()
        .filter(|s| s.exps[vertex] == basis.k)
        .count()
        == 1
}

/// Condition (D) up to k_max: for each power kk, s_0^{kk} must be
/// L^2-orthogonal to every mixed degree-(k kk) product of basis sections.
/// The product of monomial sections is the monomial with summed exponents,
/// so each pairing goes through monomial_inner on degree k*kk. Returns the
/// verdict per kk (a finite check; "for all powers" is not decidable, so the
/// caller picks the range).
pub fn check_condition_d<C: Scalar>(basis: &SectionBasis<C>, k_max: u32) -> Vec<(u32, bool)> {
    let n = basis.n;
    let mut out = Vec::new();
    for kk in 1..=k_max {
        let s0_pow: Vec<u32> = basis.sections[0]
            .exps
            .iter()
            .map(|&e| e * kk)
            .collect();
        let big_k = basis.k * kk;
        // Enumerate all size-kk multisets of sections; the all-s_0 multiset
        // is the single product allowed to pair nontrivially with s_0^{kk}.
        let mut matches = 0usize;
        let mut stack: Vec<(Vec<u32>, usize, u32)> = vec![(vec![0u32; n + 1], 0, kk)];
        while let Some((acc, start, left)) = stack.pop() {
            if left == 0 {
                let inner = monomial_inner::<C>(n, big_k, &s0_pow, &acc)
                    .expect("degrees consistent");
                if !inner.is_zero() {
                    matches += 1;
                }
                continue;
            }
            for i in start..basis.sections.len() {
                let mut next = acc.clone();
                for (t, &e) in next.iter_mut().zip(&basis.sections[i].exps) {
                    *t += e;
                }
                stack.push((next, i, left - 1));
            }
        }
        out.push((kk, matches == 1));
    }
    out
}

/// Quadrature cross-check of orthonormality: the Gram matrix of the
/// norm_sq-normalized basis, with its deviations from the identity.
#[derive(Clone, Debug)]
pub struct GramReport {
    pub n: usize,
    pub k: u32,
    pub size: usize,
    pub radial_nodes: usize,
    pub matrix: Vec<Vec<Complex64>>,
    pub max_diag_deviation: f64,
    pub max_offdiag: f64,
}

pub fn gram_by_quadrature<C: Scalar>(
    basis: &SectionBasis<C>,
    radial_nodes: usize,
    exec: Exec,
) -> GramReport {
    let n = basis.n;
    let affine: Vec<Vec<u32>> = basis
        .sections
        .iter()
        .map(|s| s.exps[1..].to_vec())
        .collect();
    let raw = raw_inner_products(n, basis.k, &affine, radial_nodes, exec);
    let norms: Vec<f64> = basis
        .sections
        .iter()
        .map(|s| s.norm_sq.to_f64().sqrt())
        .collect();
    let size = basis.sections.len();
    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let mut max_diag_deviation: f64 = 0.0;
    let mut max_offdiag: f64 = 0.0;
    for a in 0..size {
        for b in 0..size {
            let v = raw[a][b] / (norms[a] * norms[b]);
            matrix[a][b] = v;
            if a == b {
                max_diag_deviation = max_diag_deviation.max((v.re - 1.0).abs().max(v.im.abs()));
            } else {
                max_offdiag = max_offdiag.max(v.norm());
            }
        }
    }
    GramReport {
        n,
        k: basis.k,
        size,
        radial_nodes,
        matrix,
        max_diag_deviation,
        max_offdiag,
    }
}
