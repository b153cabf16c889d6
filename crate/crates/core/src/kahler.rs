//! Diastasis extraction, Bochner normal form, metric/Ricci jets, Einstein
//! verification, and the volume-form factor check.
//!
//! Conventions, fixed once: omega = (i/2) ddbar Phi, g_{ab} = d^2 Phi / dz_a
//! dzb_b, rho = -i ddbar log det g. Componentwise the Einstein condition
//! rho = lambda * omega reads -d_a dbar_b log det g = (lambda/2) g_{ab},
//! giving lambda = 2(n+1) for Fubini-Study, -4 for the hyperbolic disc and 0
//! for flat space, consistent with lambda = s/2m.

use num::complex::Complex64;

use crate::error::{KErr, KResult};
use crate::holomap::HoloMap;
use crate::matrix::{det_series, identity_mat, ldlt, mat_inv, mat_mul, transpose, Mat};
use crate::multi_index::MultiIndex;
use crate::scalar::Scalar;
use crate::series::BiSeries;

/// Jet of a Kähler metric: entry (a, b) holds g_{a bbar} = d^2 Phi / dz_a
/// dzb_b as a series of order two less than the potential.
#[derive(Clone, Debug)]
pub struct MetricJet<C: Scalar> {
    n: usize,
    order: u32,
    entries: Vec<Vec<BiSeries<C>>>,
    potential: BiSeries<C>,
}

impl<C: Scalar> MetricJet<C> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn entry(&self, a: usize, b: usize) -> &BiSeries<C> {
        &self.entries[a][b]
    }

    pub fn entries(&self) -> &Vec<Vec<BiSeries<C>>> {
        &self.entries
    }

    pub fn potential(&self) -> &BiSeries<C> {
        &self.potential
    }

    /// g(0): the metric value at the center.
    pub fn constant_matrix(&self) -> Mat<C> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|s| s.constant_term()).collect())
            .collect()
    }

    pub fn det(&self) -> BiSeries<C> {
        det_series(&self.entries)
    }

    pub fn eval(&self, pt: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|s| s.eval(pt)).collect())
            .collect()
    }

    /// Hermitian symmetry g_{ab} = conj(g_{ba}); with real coefficients the
    /// conjugate is the j/k swap.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.n).all(|a| {
            (a..self.n).all(|b| {
                self.entries[a][b].approx_eq(&self.entries[b][a].conj_series(), tol)
            })
        })
    }
}

/// Result of Bochner normalization. `change` expresses the OLD coordinates z
/// in terms of the NEW coordinates Z (old-in-terms-of-new), so that
/// `normal_form = compose(input, change)`; recompose the input as
/// `compose(normal_form, change.invert())`.
#[derive(Clone, Debug)]
pub struct BochnerResult<C: Scalar> {
    pub change: HoloMap<C>,
    pub normal_form: BiSeries<C>,
    /// True when a nontrivial linear normalization was applied; the chart
    /// returned is then one representative of the unitary orbit of Bochner
    /// coordinates.
    pub unitary_residual_flag: bool,
}

#[derive(Clone, Debug)]
pub struct EinsteinReport<C: Scalar> {
    pub is_einstein_to_order: bool,
    /// Einstein constant lambda with rho = lambda * omega, i.e. lambda = s/2m.
    pub lambda: C,
    /// s = 2 m lambda with m the complex dimension.
    pub scalar_curvature: C,
    /// Max |coefficient| of the componentwise residual
    /// -d_a dbar_b log det g - (lambda/2) g_{ab} up to the checked order.
    pub residual_norm: f64,
    pub checked_to_order: u32,
}

#[derive(Clone, Debug)]
pub struct PullbackResult<C: Scalar> {
    pub potential: BiSeries<C>,
    /// When the ambient potential is a diastasis this records the hereditary
    /// property: the pullback is again a diastasis (no constant, no pure
    /// terms). Vacuously true for non-diastasis ambient potentials.
    pub diastasis_preserved: bool,
}

/// Diastasis of a real potential centered at the chart origin: the four-term
/// combination Phi(q,qb) + Phi(p,pb) - Phi(p,qb) - Phi(q,pb) at p = 0
/// reduces to deleting every term with j = 0 or k = 0, which is exactly the
/// normalization a_{j0} = a_{0j} = 0.
pub fn diastasis_from_potential<C: Scalar>(phi: &BiSeries<C>, tol: f64) -> KResult<BiSeries<C>> {
    if !phi.is_real(tol) {
        return Err(KErr::NotReal("potential".into()));
    }
    Ok(phi.mixed_part())
}

pub fn metric_from_potential<C: Scalar>(phi: &BiSeries<C>, tol: f64) -> KResult<MetricJet<C>> {
    if !phi.is_real(tol) {
        return Err(KErr::NotReal("potential".into()));
    }
    let n = phi.dim();
    let mut entries = Vec::with_capacity(n);
    for a in 0..n {
        let da = phi.diff(a, false).expect("index in range");
        let mut row = Vec::with_capacity(n);
        for b in 0..n {
            row.push(da.diff(b, true).expect("index in range"));
        }
        entries.push(row);
    }
    let jet = MetricJet {
        n,
        order: phi.order().saturating_sub(2),
        entries,
        potential: phi.clone(),
    };
    // positive definiteness at the center (rejects degenerate input too)
    ldlt(&jet.constant_matrix())?;
    Ok(jet)
}

/// log det g as a series, normalized to zero constant term: the additive
/// constant log det g(0) is killed by ddbar anyway and is irrational in
/// general, hence inexpressible in exact mode. Callers derive Ricci
/// components as -d_a dbar_b of this series.
pub fn ricci_potential<C: Scalar>(phi: &BiSeries<C>, tol: f64) -> KResult<BiSeries<C>> {
    let g = metric_from_potential(phi, tol)?;
    ricci_potential_of(&g)
}

fn ricci_potential_of<C: Scalar>(g: &MetricJet<C>) -> KResult<BiSeries<C>> {
    let d = g.det();
    let d0 = d.constant_term();
    if d0.is_zero() {
        return Err(KErr::IndefiniteQuadraticPart(0));
    }
    let u = d.scale(&(C::one() / d0)).without_constant_term();
    u.log1p()
}

/// Einstein proportionality test, componentwise: R_{ab} = (lambda/2) g_{ab}
/// with R_{ab} = -d_a dbar_b log det g, checked through total degree
/// min(check_order, order(phi) - 4). lambda is extracted at the center as
/// 2 tr(g(0)^{-1} R(0)) / n. A failed proportionality is a report, not an
/// error.
pub fn einstein_check<C: Scalar>(
    phi: &BiSeries<C>,
    check_order: u32,
    tol: f64,
) -> KResult<EinsteinReport<C>> {
    let g = metric_from_potential(phi, tol)?;
    let logdet = ricci_potential_of(&g)?;
    let n = phi.dim();
    let checked = check_order.min(phi.order().saturating_sub(4));

    let mut ric = Vec::with_capacity(n);
    for a in 0..n {
        let da = logdet.diff(a, false).expect("index in range");
        let mut row = Vec::with_capacity(n);
        for b in 0..n {
            row.push(da.diff(b, true).expect("index in range").neg());
        }
        ric.push(row);
    }

    let g0 = g.constant_matrix();
    let g0inv = mat_inv(&g0)?;
    let r0: Mat<C> = ric
        .iter()
        .map(|row| row.iter().map(|s| s.constant_term()).collect())
        .collect();
    let k = mat_mul(&g0inv, &r0);
    let mut tr = C::zero();
    for (i, row) in k.iter().enumerate() {
        tr = tr + row[i].clone();
    }
    let lambda = tr * C::from_fraction(2, n as i64);
    let half_lambda = lambda.clone() * C::from_fraction(1, 2);

    let mut residual_norm: f64 = 0.0;
    let mut all_zero = true;
    for a in 0..n {
        for b in 0..n {
            let res = ric[a][b]
                .sub(&g.entry(a, b).scale(&half_lambda))
                .truncated(checked);
            for (_, c) in res.iter_terms() {
                residual_norm = residual_norm.max(c.abs_f64());
                if !c.approx_zero(tol) {
                    all_zero = false;
                }
            }
        }
    }

    let scalar_curvature = lambda.clone() * C::from_int(2 * n as i64);
    Ok(EinsteinReport {
        is_einstein_to_order: all_zero,
        lambda,
        scalar_curvature,
        residual_norm,
        checked_to_order: checked,
    })
}

/// Residual of the volume-form factorization omega^m/m! =
/// (i/2)^m e^{-(lambda/2) D + F + Fbar} dz ^ dzb: returns
/// log det g + (lambda/2) phi. For a Kähler-Einstein metric presented in
/// Bochner coordinates the residual vanishes identically to the computable
/// order (this is the F + Fbar = 0 claim); for non-Bochner or non-Einstein
/// input the nonzero residual is returned for inspection — pure terms expose
/// exactly the holomorphic-plus-antiholomorphic ambiguity F + Fbar.
pub fn volume_factor_check<C: Scalar>(
    phi: &BiSeries<C>,
    lambda: &C,
    tol: f64,
) -> KResult<BiSeries<C>> {
    let logdet = ricci_potential(phi, tol)?;
    let half = lambda.clone() * C::from_fraction(1, 2);
    Ok(logdet.add(&phi.scale(&half)))
}

/// Pullback compose(phi_ambient, embedding) along a center-preserving
/// holomorphic map; records Calabi's hereditary property of the diastasis.
pub fn pullback_potential<C: Scalar>(
    phi_ambient: &BiSeries<C>,
    embedding: &HoloMap<C>,
) -> KResult<PullbackResult<C>> {
    for (i, comp) in embedding.components().iter().enumerate() {
        if !comp.constant_term().is_zero() {
            return Err(KErr::CenterNotPreserved(i));
        }
    }
    if embedding.dim_out() != phi_ambient.dim() {
        return Err(KErr::DimensionMismatch(format!(
            "pullback: ambient dim {} vs embedding target dim {}",
            phi_ambient.dim(),
            embedding.dim_out()
        )));
    }
    let potential = phi_ambient.compose(embedding)?;
    let ambient_is_diastasis =
        !phi_ambient.has_pure_terms() && phi_ambient.constant_term().is_zero();
    let result_is_diastasis = !potential.has_pure_terms() && potential.constant_term().is_zero();
    Ok(PullbackResult {
        potential,
        diastasis_preserved: !ambient_is_diastasis || result_is_diastasis,
    })
}

/// Bochner normal form D = |Z|^2 + sum_{|j|,|k| >= 2} b_{jk} Z^j Zb^k of a
/// diastasis, by (i) a linear change z = L^{-T} D^{-1/2} Z turning the
/// quadratic part into the identity (exact mode requires the LDL^T pivots to
/// be rational squares, otherwise IrrationalSqrt says to rerun in float
/// mode), then (ii) for each degree delta = 2..N-1 the holomorphic
/// substitution Z_b <- Z_b + sum_{|j|=delta} c_{jb} Z^j with c_{jb} the
/// negated offending coefficient of Z^j Zb_b; the conjugate offenders vanish
/// simultaneously by reality, each round clears one degree and can only
/// touch higher ones.
pub fn bochner_normalize<C: Scalar>(d: &BiSeries<C>, tol: f64) -> KResult<BochnerResult<C>> {
    if !d.is_real(tol) {
        return Err(KErr::NotReal("diastasis".into()));
    }
    if !d.constant_term().is_zero() || d.has_pure_terms() {
        return Err(KErr::NotADiastasis(
            "constant or pure-degree terms present".into(),
        ));
    }
    let n = d.dim();
    let order = d.order();

    // quadratic part and its LDL^T
    let h: Mat<C> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    d.coeff(
                        MultiIndex::unit(n, a).exps(),
                        MultiIndex::unit(n, b).exps(),
                    )
                })
                .collect()
        })
        .collect();
    let (l, piv) = ldlt(&h)?;
    let mut a = mat_inv(&transpose(&l)).expect("unit triangular");
    for (col, p) in piv.iter().enumerate() {
        let root = p
            .try_sqrt()
            .ok_or_else(|| KErr::IrrationalSqrt(format!("quadratic pivot {p}")))?;
        let inv_root = C::one() / root;
        for row in a.iter_mut() {
            row[col] = row[col].clone() * inv_root.clone();
        }
    }
    let linear_is_identity = a == identity_mat(n);
    let mut change = HoloMap::linear(&a, order);
    let mut nf = d.compose(&change)?;

    // degree-by-degree holomorphic elimination
    for delta in 2..order.max(2) {
        let mut corrections: Vec<Vec<(MultiIndex, C)>> = vec![Vec::new(); n];
        let mut any = false;
        for (key, c) in nf.iter_terms() {
            if key.k.deg() == 1 && key.j.deg() == delta {
                let b = (0..n).find(|&i| key.k.get(i) == 1).expect("unit index");
                corrections[b].push((key.j.clone(), -c.clone()));
                any = true;
            }
        }
        if !any {
            continue;
        }
        let comps: Vec<BiSeries<C>> = (0..n)
            .map(|b| {
                let mut s = BiSeries::monomial(
                    n,
                    order,
                    MultiIndex::unit(n, b).exps(),
                    MultiIndex::zero(n).exps(),
                    C::one(),
                );
                for (j, c) in &corrections[b] {
                    s = s.add(&BiSeries::monomial(
                        n,
                        order,
                        j.exps(),
                        MultiIndex::zero(n).exps(),
                        c.clone(),
                    ));
                }
                s
            })
            .collect();
        let sub = HoloMap::from_components(comps)?;
        nf = nf.compose(&sub)?;
        change = change.compose_map(&sub)?;
    }

    Ok(BochnerResult {
        change,
        normal_form: nf,
        unitary_residual_flag: !linear_is_identity,
    })
}

/// Structural test of the Bochner invariants on a series claimed to be in
/// normal form: identity quadratic part, everything else |j| >= 2 and
/// |k| >= 2 (up to tol in float mode).
pub fn is_bochner_normal<C: Scalar>(s: &BiSeries<C>, tol: f64) -> bool {
    let n = s.dim();
    for (key, c) in s.iter_terms() {
        let (dj, dk) = (key.j.deg(), key.k.deg());
        if dj == 1 && dk == 1 {
            let diag = (0..n).any(|i| key.j.get(i) == 1 && key.k.get(i) == 1);
            let want = if diag { C::one() } else { C::zero() };
            if !(c.clone() - want).approx_zero(tol) {
                return false;
            }
        } else if (dj < 2 || dk < 2) && !c.approx_zero(tol) {
            return false;
        }
    }
    // all diagonal quadratic coefficients present and equal to one
    (0..n).all(|i| {
        let c = s.coeff(
            MultiIndex::unit(n, i).exps(),
            MultiIndex::unit(n, i).exps(),
        );
        (c - C::one()).approx_zero(tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fl, Rat, DEFAULT_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rat {
        Rat::from_fraction(n, d)
    }

    /// log(1 + sum z_i zb_i): the Fubini-Study diastasis in an affine chart.
    fn fs_diastasis(n: usize, order: u32) -> BiSeries<Rat> {
        let mut t = BiSeries::zero(n, order);
        for i in 0..n {
            let e = MultiIndex::unit(n, i);
            t = t.add(&BiSeries::monomial(n, order, e.exps(), e.exps(), r(1, 1)));
        }
        t.log1p().unwrap()
    }

    fn flat_diastasis(n: usize, order: u32) -> BiSeries<Rat> {
        let mut t = BiSeries::zero(n, order);
        for i in 0..n {
            let e = MultiIndex::unit(n, i);
            t = t.add(&BiSeries::monomial(n, order, e.exps(), e.exps(), r(1, 1)));
        }
        t
    }

    /// -log(1 - z zb), n = 1: the hyperbolic disc.
    fn hyperbolic_diastasis(order: u32) -> BiSeries<Rat> {
        BiSeries::monomial(1, order, &[1], &[1], r(-1, 1))
            .log1p()
            .unwrap()
            .neg()
    }

    #[test]
    fn diastasis_strips_pure_terms() {
        // |z|^2 + z + zb + 3 -> |z|^2
        let phi = BiSeries::from_terms(
            1,
            4,
            &[
                (&[1], &[1], r(1, 1)),
                (&[1], &[0], r(1, 1)),
                (&[0], &[1], r(1, 1)),
                (&[0], &[0], r(3, 1)),
            ],
        );
        let d = diastasis_from_potential(&phi, DEFAULT_TOL).unwrap();
        assert_eq!(d, BiSeries::monomial(1, 4, &[1], &[1], r(1, 1)));

        // |z|^2 + Re(z^2) -> |z|^2
        let phi2 = BiSeries::from_terms(
            1,
            4,
            &[
                (&[1], &[1], r(1, 1)),
                (&[2], &[0], r(1, 2)),
                (&[0], &[2], r(1, 2)),
            ],
        );
        assert_eq!(
            diastasis_from_potential(&phi2, DEFAULT_TOL).unwrap(),
            BiSeries::monomial(1, 4, &[1], &[1], r(1, 1))
        );

        // already a diastasis: unchanged, and idempotent
        let fs = fs_diastasis(2, 6);
        let once = diastasis_from_potential(&fs, DEFAULT_TOL).unwrap();
        assert_eq!(once, fs);
        assert_eq!(diastasis_from_potential(&once, DEFAULT_TOL).unwrap(), once);
    }

    #[test]
    fn diastasis_rejects_non_real() {
        let phi = BiSeries::monomial(1, 4, &[1], &[0], r(1, 1)); // z alone is not real
        assert!(matches!(
            diastasis_from_potential(&phi, DEFAULT_TOL),
            Err(KErr::NotReal(_))
        ));
    }

    #[test]
    fn diastasis_invariant_under_potential_ambiguity() {
        // D(phi + h + hbar) = D(phi) for holomorphic h
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let mut phi = fs_diastasis(2, 6);
            // random real perturbation of phi, mixed terms only
            for _ in 0..4 {
                let jj = [rng.gen_range(1..=2u32), rng.gen_range(0..=1u32)];
                let kk = [rng.gen_range(1..=2u32), rng.gen_range(0..=1u32)];
                let c = r(rng.gen_range(-3..=3), 2);
                phi = phi
                    .add(&BiSeries::monomial(2, 6, &jj, &kk, c.clone()))
                    .add(&BiSeries::monomial(2, 6, &kk, &jj, c));
            }
            let mut h_plus_hbar = BiSeries::zero(2, 6);
            for _ in 0..3 {
                let jj = [rng.gen_range(0..=3u32), rng.gen_range(0..=2u32)];
                let c = r(rng.gen_range(-4..=4), 3);
                h_plus_hbar = h_plus_hbar
                    .add(&BiSeries::monomial(2, 6, &jj, &[0, 0], c.clone()))
                    .add(&BiSeries::monomial(2, 6, &[0, 0], &jj, c));
            }
            let lhs = diastasis_from_potential(&phi.add(&h_plus_hbar), DEFAULT_TOL).unwrap();
            let rhs = diastasis_from_potential(&phi, DEFAULT_TOL).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn metric_examples() {
        // |z|^2 -> g = [1]
        let g = metric_from_potential(&flat_diastasis(1, 4), DEFAULT_TOL).unwrap();
        assert_eq!(*g.entry(0, 0), BiSeries::one(1, 2));

        // flat in n = 3 -> identity
        let g3 = metric_from_potential(&flat_diastasis(3, 4), DEFAULT_TOL).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let want = if a == b {
                    BiSeries::one(3, 2)
                } else {
                    BiSeries::zero(3, 2)
                };
                assert_eq!(*g3.entry(a, b), want);
            }
        }

        // FS n=1 at order 6: g = (1+z zb)^{-2} = 1 - 2 z zb + 3 z^2 zb^2
        let g = metric_from_potential(&fs_diastasis(1, 6), DEFAULT_TOL).unwrap();
        let want = BiSeries::from_terms(
            1,
            4,
            &[
                (&[0], &[0], r(1, 1)),
                (&[1], &[1], r(-2, 1)),
                (&[2], &[2], r(3, 1)),
            ],
        );
        assert_eq!(*g.entry(0, 0), want);
    }

    #[test]
    fn metric_rejects_indefinite_or_degenerate() {
        // z1 zb2 + z2 zb1: quadratic form with eigenvalues +-1
        let phi = BiSeries::from_terms(
            2,
            4,
            &[(&[1, 0], &[0, 1], r(1, 1)), (&[0, 1], &[1, 0], r(1, 1))],
        );
        assert!(matches!(
            metric_from_potential(&phi, DEFAULT_TOL),
            Err(KErr::IndefiniteQuadraticPart(_))
        ));
        // degenerate: potential with no quadratic part at all
        let degen = BiSeries::monomial(1, 6, &[2], &[2], r(1, 1));
        assert!(matches!(
            metric_from_potential(&degen, DEFAULT_TOL),
            Err(KErr::IndefiniteQuadraticPart(_))
        ));
    }

    #[test]
    fn metric_jet_is_hermitian_on_random_real_potentials() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let mut phi = flat_diastasis(2, 6);
            for _ in 0..5 {
                let jj = [rng.gen_range(0..=2u32), rng.gen_range(0..=2u32)];
                let kk = [rng.gen_range(0..=2u32), rng.gen_range(0..=2u32)];
                let c = r(rng.gen_range(-2..=2), 3);
                phi = phi
                    .add(&BiSeries::monomial(2, 6, &jj, &kk, c.clone()))
                    .add(&BiSeries::monomial(2, 6, &kk, &jj, c));
            }
            let g = metric_from_potential(&phi, DEFAULT_TOL);
            if let Ok(g) = g {
                assert!(g.is_hermitian(0.0));
            }
        }
    }

    #[test]
    fn det_of_fs_metric_matches_univariate_oracle() {
        // det g for FS on CP^2 is (1+t)^{-3} at t = |z|^2:
        // 1 - 3t + 6t^2 - ..., binomial series oracle
        let g = metric_from_potential(&fs_diastasis(2, 6), DEFAULT_TOL).unwrap();
        let det = g.det();
        let t = flat_diastasis(2, 4);
        let mut want = BiSeries::zero(2, 4);
        let mut tp = BiSeries::one(2, 4);
        for m in 0..=2i64 {
            // (-1)^m binom(m+2, 2)
            let c = r(if m % 2 == 0 { 1 } else { -1 } * (m + 1) * (m + 2) / 2, 1);
            want = want.add(&tp.scale(&c));
            tp = tp.mul(&t);
        }
        assert_eq!(det, want);
    }

    #[test]
    fn ricci_potential_examples() {
        // flat -> 0
        assert!(ricci_potential(&flat_diastasis(2, 6), DEFAULT_TOL)
            .unwrap()
            .is_zero_series());

        // FS: log det g = -(n+1) log(1+|z|^2)
        for n in 1..=3usize {
            let phi = fs_diastasis(n, 6);
            let got = ricci_potential(&phi, DEFAULT_TOL).unwrap();
            let want = phi.truncated(4).scale(&r(-(n as i64 + 1), 1));
            assert_eq!(got, want, "FS n={n}");
        }

        // hyperbolic n=1: log det g = 2 phi
        let phi = hyperbolic_diastasis(8);
        let got = ricci_potential(&phi, DEFAULT_TOL).unwrap();
        assert_eq!(got, phi.truncated(6).scale(&r(2, 1)));
    }

    #[test]
    fn einstein_trichotomy() {
        // flat: lambda = 0
        let rep = einstein_check(&flat_diastasis(2, 6), 6, DEFAULT_TOL).unwrap();
        assert!(rep.is_einstein_to_order);
        assert_eq!(rep.lambda, r(0, 1));
        assert_eq!(rep.residual_norm, 0.0);

        // FS: lambda = 2(n+1), s = 2 n lambda
        for n in 1..=3usize {
            let rep = einstein_check(&fs_diastasis(n, 6), 6, DEFAULT_TOL).unwrap();
            assert!(rep.is_einstein_to_order, "FS n={n}");
            assert_eq!(rep.lambda, r(2 * (n as i64 + 1), 1));
            assert_eq!(rep.scalar_curvature, r(4 * n as i64 * (n as i64 + 1), 1));
            assert_eq!(rep.checked_to_order, 2);
        }

        // hyperbolic: lambda = -4
        let rep = einstein_check(&hyperbolic_diastasis(8), 8, DEFAULT_TOL).unwrap();
        assert!(rep.is_einstein_to_order);
        assert_eq!(rep.lambda, r(-4, 1));
        assert_eq!(rep.scalar_curvature, r(-8, 1));
    }

    #[test]
    fn einstein_detects_non_einstein() {
        // phi = |z|^2 + z^2 zb^2: g = 1 + 4 z zb, Ric = -4 + 32 z zb - 192 (z zb)^2 + ...,
        // lambda = -8, residual Ric - (lambda/2) g = 48 z zb - 192 (z zb)^2 + ...
        let phi = BiSeries::from_terms(1, 8, &[(&[1], &[1], r(1, 1)), (&[2], &[2], r(1, 1))]);
        let rep = einstein_check(&phi, 8, DEFAULT_TOL).unwrap();
        assert!(!rep.is_einstein_to_order);
        assert_eq!(rep.lambda, r(-8, 1));
        assert_eq!(rep.checked_to_order, 4);
        assert_eq!(rep.residual_norm, 192.0);
    }

    #[test]
    fn volume_factor_vanishes_for_einstein_bochner_models() {
        // flat, lambda = 0
        let res = volume_factor_check(&flat_diastasis(2, 8), &r(0, 1), DEFAULT_TOL).unwrap();
        assert!(res.is_zero_series());

        // FS n=2, lambda = 6, order 8: residual 0 exactly
        let res = volume_factor_check(&fs_diastasis(2, 8), &r(6, 1), DEFAULT_TOL).unwrap();
        assert!(res.is_zero_series());

        // hyperbolic, lambda = -4
        let res = volume_factor_check(&hyperbolic_diastasis(8), &r(-4, 1), DEFAULT_TOL).unwrap();
        assert!(res.is_zero_series());
    }

    #[test]
    fn volume_factor_exposes_pure_residual_off_bochner() {
        // Recoordinatized FS (n=1) under z = w + w^2 is Einstein but NOT in
        // Bochner form; the residual must be exactly the pure-term series
        // log(1+2w) + log(1+2wb) (F + Fbar with F = log dz/dw).
        let order = 8;
        let w = BiSeries::monomial(1, order, &[1], &[0], r(1, 1));
        let m = HoloMap::from_components(vec![w.add(&w.mul(&w))]).unwrap();
        let phi = fs_diastasis(1, order).compose(&m).unwrap();
        let res = volume_factor_check(&phi, &r(4, 1), DEFAULT_TOL).unwrap();
        assert!(res.has_pure_terms());
        assert!(res.mixed_part().is_zero_series());
        // oracle: log(1+2w) coefficients (-1)^{m+1} 2^m / m
        let two_w = BiSeries::monomial(1, res.order(), &[1], &[0], r(2, 1));
        let f = two_w.log1p().unwrap();
        assert_eq!(res, f.add(&f.conj_series()));
    }

    #[test]
    fn pullback_examples() {
        // identity embedding
        let fs = fs_diastasis(2, 6);
        let id = HoloMap::identity(2, 6);
        let got = pullback_potential(&fs, &id).unwrap();
        assert_eq!(got.potential, fs);
        assert!(got.diastasis_preserved);

        // linear slice Z2 = 0 of FS on CP^2 -> FS on CP^1
        let slice = HoloMap::from_components(vec![
            BiSeries::monomial(1, 6, &[1], &[0], r(1, 1)),
            BiSeries::zero(1, 6),
        ])
        .unwrap();
        let got = pullback_potential(&fs, &slice).unwrap();
        assert_eq!(got.potential, fs_diastasis(1, 6));
        assert!(got.diastasis_preserved);

        // center not preserved
        let shifted = HoloMap::from_components(vec![
            BiSeries::one(2, 6),
            BiSeries::zero(2, 6),
        ])
        .unwrap();
        assert!(matches!(
            pullback_potential(&fs, &shifted),
            Err(KErr::CenterNotPreserved(0))
        ));
    }

    #[test]
    fn pullback_veronese_doubles_fs() {
        // u -> (sqrt2 u, u^2) into the CP^2 chart:
        // log(1 + 2 u ub + u^2 ub^2) = 2 log(1 + u ub)
        let order = 8;
        let u = BiSeries::monomial(1, order, &[1], &[0], Fl::from_int(1));
        let sqrt2 = Fl::from_int(2).try_sqrt().unwrap();
        let ver =
            HoloMap::from_components(vec![u.scale(&sqrt2), u.mul(&u)]).unwrap();
        let mut t = BiSeries::zero(2, order);
        for i in 0..2 {
            let e = MultiIndex::unit(2, i);
            t = t.add(&BiSeries::monomial(2, order, e.exps(), e.exps(), Fl::from_int(1)));
        }
        let fs2 = t.log1p().unwrap();
        let got = pullback_potential(&fs2, &ver).unwrap();
        assert!(got.diastasis_preserved);
        let uu = BiSeries::monomial(1, order, &[1], &[1], Fl::from_int(1));
        let want = uu.log1p().unwrap().scale(&Fl::from_int(2));
        assert!(got.potential.approx_eq(&want, 1e-28));
    }

    #[test]
    fn pullback_hereditary_on_random_polynomial_embeddings() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let fs = fs_diastasis(3, 6);
        for _ in 0..5 {
            let mut comps = Vec::new();
            for _ in 0..3 {
                let mut s = BiSeries::zero(2, 6);
                for _ in 0..3 {
                    let jj = [rng.gen_range(0..=2u32), rng.gen_range(0..=2u32)];
                    if jj[0] + jj[1] == 0 {
                        continue;
                    }
                    s = s.add(&BiSeries::monomial(2, 6, &jj, &[0, 0], r(rng.gen_range(-2..=2), 1)));
                }
                comps.push(s);
            }
            let m = HoloMap::from_components(comps).unwrap();
            let got = pullback_potential(&fs, &m).unwrap();
            assert!(got.diastasis_preserved);
            assert_eq!(
                diastasis_from_potential(&got.potential, DEFAULT_TOL).unwrap(),
                got.potential
            );
        }
    }

    #[test]
    fn bochner_scaling_example() {
        // 2|z|^2: exact mode cannot take sqrt(2)
        let d = BiSeries::monomial(1, 6, &[1], &[1], r(2, 1));
        assert!(matches!(
            bochner_normalize(&d, DEFAULT_TOL),
            Err(KErr::IrrationalSqrt(_))
        ));

        // float mode: change z = Z / sqrt2, normal form |Z|^2
        let df = BiSeries::monomial(1, 6, &[1], &[1], Fl::from_int(2));
        let res = bochner_normalize(&df, DEFAULT_TOL).unwrap();
        assert!(res.unitary_residual_flag);
        let a = res.change.linear_part()[0][0].to_f64();
        assert!((a - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(is_bochner_normal(&res.normal_form, 1e-15));

        // 4|z|^2 works exactly: z = Z/2
        let d4 = BiSeries::monomial(1, 6, &[1], &[1], r(4, 1));
        let res = bochner_normalize(&d4, DEFAULT_TOL).unwrap();
        assert_eq!(res.change.linear_part()[0][0], r(1, 2));
        assert_eq!(res.normal_form, BiSeries::monomial(1, 6, &[1], &[1], r(1, 1)));
    }

    #[test]
    fn bochner_fs_is_already_normal() {
        let fs = fs_diastasis(2, 8);
        let res = bochner_normalize(&fs, DEFAULT_TOL).unwrap();
        assert!(!res.unitary_residual_flag);
        assert!(res.change.approx_eq(&HoloMap::identity(2, 8), 0.0));
        assert_eq!(res.normal_form, fs);
        assert!(is_bochner_normal(&fs, 0.0));
    }

    #[test]
    fn bochner_cubic_example() {
        // d = |z|^2 + (z^2 zb + z zb^2)/2 -> z = Z - Z^2/2 + ...
        let d = BiSeries::from_terms(
            1,
            6,
            &[
                (&[1], &[1], r(1, 1)),
                (&[2], &[1], r(1, 2)),
                (&[1], &[2], r(1, 2)),
            ],
        );
        let res = bochner_normalize(&d, DEFAULT_TOL).unwrap();
        assert!(!res.unitary_residual_flag);
        assert_eq!(res.change.component(0).coeff(&[1], &[0]), r(1, 1));
        assert_eq!(res.change.component(0).coeff(&[2], &[0]), r(-1, 2));
        assert!(is_bochner_normal(&res.normal_form, 0.0));
        // recomposition reproduces the input exactly
        let back = res
            .normal_form
            .compose(&res.change.invert().unwrap())
            .unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn bochner_random_recomposition_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..5 {
            // identity quadratic part plus random real mixed noise
            let mut d = flat_diastasis(2, 7);
            for _ in 0..6 {
                let jj = [rng.gen_range(0..=3u32), rng.gen_range(0..=2u32)];
                let kk = [rng.gen_range(0..=3u32), rng.gen_range(0..=2u32)];
                if jj.iter().sum::<u32>() == 0 || kk.iter().sum::<u32>() == 0 {
                    continue;
                }
                if jj.iter().sum::<u32>() == 1 && kk.iter().sum::<u32>() == 1 {
                    continue;
                }
                let c = r(rng.gen_range(-2..=2), 4);
                d = d
                    .add(&BiSeries::monomial(2, 7, &jj, &kk, c.clone()))
                    .add(&BiSeries::monomial(2, 7, &kk, &jj, c));
            }
            let res = bochner_normalize(&d, DEFAULT_TOL).unwrap();
            assert!(is_bochner_normal(&res.normal_form, 0.0));
            let back = res
                .normal_form
                .compose(&res.change.invert().unwrap())
                .unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn bochner_rejects_bad_input() {
        let not_diastasis = BiSeries::from_terms(
            1,
            5,
            &[(&[1], &[1], r(1, 1)), (&[2], &[0], r(1, 1)), (&[0], &[2], r(1, 1))],
        );
        assert!(matches!(
            bochner_normalize(&not_diastasis, DEFAULT_TOL),
            Err(KErr::NotADiastasis(_))
        ));
        let indefinite = BiSeries::from_terms(
            2,
            5,
            &[(&[1, 0], &[0, 1], r(1, 1)), (&[0, 1], &[1, 0], r(1, 1))],
        );
        assert!(matches!(
            bochner_normalize(&indefinite, DEFAULT_TOL),
            Err(KErr::IndefiniteQuadraticPart(_))
        ));
    }

    /// Mixed second partials from the jet match central finite differences of
    /// the evaluated potential: d_a dbar_b f at p, via the 4-point stencil in
    /// the (x_a or y_a) x (x_b or y_b) planes combined into the Wirtinger
    /// derivative.
    #[test]
    fn metric_matches_finite_differences_float() {
        use num::complex::Complex64;
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        // float-mode FS potential, n = 2, high order so truncation error is
        // negligible at |z| <= 0.15
        let mut t = BiSeries::zero(2, 14);
        for i in 0..2 {
            let e = MultiIndex::unit(2, i);
            t = t.add(&BiSeries::monomial(2, 14, e.exps(), e.exps(), Fl::from_int(1)));
        }
        let phi = t.log1p().unwrap();
        let g = metric_from_potential(&phi, DEFAULT_TOL).unwrap();
        let h = 1e-4;
        let eval = |pt: &[Complex64]| phi.eval(pt).re;
        for _ in 0..10 {
            let pt: Vec<Complex64> = (0..2)
                .map(|_| {
                    Complex64::new(rng.gen_range(-0.15..0.15), rng.gen_range(-0.15..0.15))
                })
                .collect();
            for a in 0..2 {
                for b in 0..2 {
                    // d/dz_a = (d/dx_a - i d/dy_a)/2, d/dzb_b = (d/dx_b + i d/dy_b)/2
                    let second = |da: usize, db: usize| -> f64 {
                        // da, db in {0: x, 1: y} directions on coords a and b
                        let shift = |sa: f64, sb: f64| {
                            let mut q = pt.clone();
                            let step_a = if da == 0 {
                                Complex64::new(sa * h, 0.0)
                            } else {
                                Complex64::new(0.0, sa * h)
                            };
                            let step_b = if db == 0 {
                                Complex64::new(sb * h, 0.0)
                            } else {
                                Complex64::new(0.0, sb * h)
                            };
                            q[a] += step_a;
                            q[b] += step_b;
                            eval(&q)
                        };
                        (shift(1.0, 1.0) - shift(1.0, -1.0) - shift(-1.0, 1.0)
                            + shift(-1.0, -1.0))
                            / (4.0 * h * h)
                    };
                    let fd = Complex64::new(
                        (second(0, 0) + second(1, 1)) / 4.0,
                        (second(0, 1) - second(1, 0)) / 4.0,
                    );
                    let jet = g.entry(a, b).eval(&pt);
                    assert!(
                        (jet - fd).norm() < 1e-6,
                        "entry ({a},{b}) at {pt:?}: jet {jet} vs fd {fd}"
                    );
                }
            }
        }
    }
}
