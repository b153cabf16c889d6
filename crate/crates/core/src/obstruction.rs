//! Embedded-submanifold probes: induced diastases under polynomial
//! embeddings, the volume-form identity det g = e^{-(lambda/2) D} in Bochner
//! coordinates, and the Monte Carlo volume comparison between the intrinsic
//! Riemannian volume and the Euclidean volume of a coordinate projection —
//! the finite-vs-infinite tension that forces positive scalar curvature.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KErr, KResult};
use crate::exec::{pairwise_reduce, Exec};
use crate::holomap::HoloMap;
use crate::kahler::{
    bochner_normalize, einstein_check, pullback_potential, volume_factor_check, BochnerResult,
    EinsteinReport,
};
use crate::matrix::{cmat_det, rank};
use crate::models::ModelSpec;
use crate::scalar::Scalar;
use crate::series::BiSeries;

#[derive(Clone, Debug)]
pub struct EmbeddedSubmanifold<C: Scalar> {
    pub ambient: ModelSpec<C>,
    /// Polynomial, center-preserving, with injective differential at 0.
    pub embedding: HoloMap<C>,
    /// Intrinsic complex dimension.
    pub m: usize,
    /// Pullback of the ambient diastasis.
    pub induced_diastasis: BiSeries<C>,
    pub einstein: EinsteinReport<C>,
    /// Intrinsic Bochner normalization of the induced diastasis; None when
    /// exact mode hits an irrational scaling (rerun in float mode).
    pub bochner: Option<BochnerResult<C>>,
    /// volume_factor_check of the Bochner normal form at the induced lambda,
    /// present when the induced metric is Einstein and Bochner coordinates
    /// exist; the zero series is the F + conj(F) = 0 identity.
    pub factor_residual: Option<BiSeries<C>>,
}

pub fn embed_submanifold<C: Scalar>(
    ambient: &ModelSpec<C>,
    map: &HoloMap<C>,
    tol: f64,
) -> KResult<EmbeddedSubmanifold<C>> {
    let m = map.dim_in();
    if rank(&map.linear_part(), tol) < m {
        return Err(KErr::DegenerateDifferential { expected: m });
    }
    let induced = pullback_potential(&ambient.diastasis, map)?.potential;
    let einstein = einstein_check(&induced, induced.order(), tol)?;
    let bochner = match bochner_normalize(&induced, tol) {
        Ok(b) => Some(b),
        Err(KErr::IrrationalSqrt(_)) => None,
        Err(e) => return Err(e),
    };
    let factor_residual = match (&bochner, einstein.is_einstein_to_order) {
        (Some(b), true) => Some(volume_factor_check(&b.normal_form, &einstein.lambda, tol)?),
        _ => None,
    };
    Ok(EmbeddedSubmanifold {
        ambient: ambient.clone(),
        embedding: map.clone(),
        m,
        induced_diastasis: induced,
        einstein,
        bochner,
        factor_residual,
    })
}

fn bochner_change<C: Scalar>(sub: &EmbeddedSubmanifold<C>) -> KResult<&HoloMap<C>> {
    sub.bochner
        .as_ref()
        .map(|b| &b.change)
        .ok_or_else(|| {
            KErr::Invalid(
                "intrinsic Bochner coordinates need an irrational scaling; rerun in float mode"
                    .into(),
            )
        })
}

fn cmat_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let (r, mid, c) = (a.len(), b.len(), b[0].len());
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| (0..mid).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Pointwise chain evaluation at an intrinsic Bochner point Z: the ambient
/// point w = (phi . c)(Z) and the chain Jacobian J_phi(c(Z)) J_c(Z).
/// Evaluating pointwise (instead of composing jets) keeps polynomial
/// embeddings exact at every radius.
fn chain_eval<C: Scalar>(
    embedding: &HoloMap<C>,
    change: &HoloMap<C>,
    z: &[Complex64],
) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
    let u = change.eval(z);
    let w = embedding.eval(&u);
    let j = cmat_mul(&embedding.jacobian_eval(&u), &change.jacobian_eval(z));
    (w, j)
}

/// Induced metric determinant at an intrinsic point: det of
/// g_ind[a][b] = sum_{i,j} J[i][a] G_ij(w) conj(J[j][b]).
fn induced_det(gmat: &[Vec<Complex64>], j: &[Vec<Complex64>]) -> f64 {
    let (n, m) = (j.len(), j[0].len());
    let mut g_ind = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for jj in 0..n {
                    acc += j[i][a] * gmat[i][jj] * j[jj][b].conj();
                }
            }
            g_ind[a][b] = acc;
        }
    }
    cmat_det(&g_ind).re
}

fn gaussian_direction(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    loop {
        let mut v = Vec::with_capacity(m);
        let mut norm_sq = 0.0;
        for _ in 0..m {
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let t = std::f64::consts::TAU * u2;
            let z = Complex64::new(r * t.cos(), r * t.sin());
            norm_sq += z.norm_sqr();
            v.push(z);
        }
        if norm_sq > 1e-150 {
            let s = norm_sq.sqrt();
            for z in &mut v {
                *z /= s;
            }
            return v;
        }
    }
}

/// Uniform point in the annulus a < |Z| <= b of C^m: gaussian direction and
/// the inverse-CDF radius r = (a^{2m} + u (b^{2m} - a^{2m}))^{1/(2m)}.
fn sample_annulus(rng: &mut ChaCha8Rng, m: usize, a: f64, b: f64) -> Vec<Complex64> {
    let p = 2.0 * m as f64;
    let u: f64 = rng.gen();
    let r = (a.powf(p) + u * (b.powf(p) - a.powf(p))).powf(1.0 / p);
    gaussian_direction(rng, m)
        .into_iter()
        .map(|d| d * r)
        .collect()
}

/// Max of |log det g_ind + (lambda/2) D| over random intrinsic Bochner
/// points |Z| <= max_radius: in Bochner coordinates the Einstein volume
/// form is exactly e^{-(lambda/2) D} times Lebesgue, so this residual
/// vanishes identically. Uses the ambient closed-form metric through the
/// embedding chain, so the check is independent of the series engine.
pub fn verify_eqforms<C: Scalar>(
    sub: &EmbeddedSubmanifold<C>,
    n_samples: usize,
    max_radius: f64,
    seed: u64,
) -> KResult<f64> {
    if !sub.einstein.is_einstein_to_order {
        return Err(KErr::NonEinstein(sub.einstein.residual_norm));
    }
    let change = bochner_change(sub)?;
    let lam = sub.einstein.lambda.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_res: f64 = 0.0;
    for _ in 0..n_samples {
        let z = sample_annulus(&mut rng, sub.m, 0.0, max_radius);
        let (w, j) = chain_eval(&sub.embedding, change, &z);
        let det = induced_det(&sub.ambient.eval_metric(&w), &j);
        let dia = sub.ambient.eval_diastasis(&w);
        if !det.is_finite() || det <= 0.0 || !dia.is_finite() {
            return Err(KErr::NonFinite(format!(
                "induced metric determinant {det} at |Z| = {:.3}",
                z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
            )));
        }
        max_res = max_res.max((det.ln() + 0.5 * lam * dia).abs());
    }
    Ok(max_res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    BothBounded,
    VolGBoundedProjDivergent,
    /// Not part of the positive-lambda story but reachable (e.g. hyperbolic
    /// ambient with the ladder approaching the boundary); reported honestly.
    VolGDivergentProjBounded,
    BothDivergent,
}

impl ProbeVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProbeVerdict::BothBounded => "both-bounded",
            ProbeVerdict::VolGBoundedProjDivergent => "vol_g-bounded-proj-divergent",
            ProbeVerdict::VolGDivergentProjBounded => "vol_g-divergent-proj-bounded",
            ProbeVerdict::BothDivergent => "both-divergent",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VolumeProbeReport {
    pub radii: Vec<f64>,
    /// Cumulative Riemannian volume of the affine part within |Z| <= R,
    /// estimated with the Einstein volume-form weight e^{-(lambda/2) D}.
    pub vol_g: Vec<f64>,
    pub stderr_g: Vec<f64>,
    /// Cumulative Euclidean volume (with multiplicity) of the coordinate
    /// projection of the same region: integrand |det_C d(pi . phi . c)|^2.
    pub vol_eucl_proj: Vec<f64>,
    pub stderr_proj: Vec<f64>,
    pub verdict: ProbeVerdict,
    pub lambda: f64,
    pub samples_per_annulus: usize,
    pub seed: u64,
}

const PROBE_SHARDS: usize = 64;

/// Log-log slope of the last (up to) three ladder points; the sequence is
/// called divergent when the fitted power exceeds 1/2.
fn diverges(radii: &[f64], vals: &[f64]) -> bool {
    let take = radii.len().min(3);
    let xs: Vec<f64> = radii[radii.len() - take..].iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = vals[vals.len() - take..]
        .iter()
        .map(|v| v.max(1e-300).ln())
        .collect();
    let n = take as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    sxy / sxx > 0.5
}

/// Monte Carlo comparison of vol_g(M-hat within |Z| <= R) against the
/// Euclidean volume of its coordinate projection, over an increasing radius
/// ladder. Sampling is annulus-stratified with 64 fixed RNG streams per
/// annulus and pairwise-tree aggregation, so reports are byte-identical
/// across thread counts.
pub fn volume_probe<C: Scalar>(
    sub: &EmbeddedSubmanifold<C>,
    projection_coords: &[usize],
    radii: &[f64],
    samples: usize,
    seed: u64,
    exec: Exec,
) -> KResult<VolumeProbeReport> {
    let m = sub.m;
    let n = sub.ambient.n;
    if projection_coords.len() != m {
        return Err(KErr::Invalid(format!(
            "projection must select m = {m} of the {n} ambient coordinates"
        )));
    }
    let mut sorted = projection_coords.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != m || projection_coords.iter().any(|&i| i >= n) {
        return Err(KErr::Invalid(
            "projection coordinates must be distinct ambient indices".into(),
        ));
    }
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(KErr::Invalid(
            "radius ladder must be positive and strictly increasing".into(),
        ));
    }
    if samples == 0 {
        return Err(KErr::Invalid("need at least one sample per radius".into()));
    }
    if !sub.einstein.is_einstein_to_order {
        return Err(KErr::NonEinstein(sub.einstein.residual_norm));
    }
    let change = bochner_change(sub)?;
    let lam = sub.einstein.lambda.to_f64();

    // openness of the projection at 0
    let zero = vec![Complex64::new(0.0, 0.0); m];
    let (_, j0) = chain_eval(&sub.embedding, change, &zero);
    let p0: Vec<Vec<Complex64>> = projection_coords.iter().map(|&i| j0[i].clone()).collect();
    if cmat_det(&p0).norm() <= 1e-12 {
        return Err(KErr::DegenerateProjection);
    }

    let shard_samples = samples.div_ceil(PROBE_SHARDS);
    let n_tot = (shard_samples * PROBE_SHARDS) as f64;
    let mut vol_g = Vec::with_capacity(radii.len());
    let mut stderr_g = Vec::with_capacity(radii.len());
    let mut vol_p = Vec::with_capacity(radii.len());
    let mut stderr_p = Vec::with_capacity(radii.len());
    let (mut cum_g, mut cum_p, mut var_g, mut var_p) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut bounds = vec![0.0];
    bounds.extend_from_slice(radii);

    for (ai, win) in bounds.windows(2).enumerate() {
        let (a, b) = (win[0], win[1]);
        let shard_sums: Vec<KResult<[f64; 4]>> = exec.map_indexed(PROBE_SHARDS, |s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((ai * PROBE_SHARDS + s) as u64);
            let mut acc = [0.0f64; 4];
            for _ in 0..shard_samples {
                let z = sample_annulus(&mut rng, m, a, b);
                let (w, j) = chain_eval(&sub.embedding, change, &z);
                let dia = sub.ambient.eval_diastasis(&w);
                let wg = (-0.5 * lam * dia).exp();
                let pj: Vec<Vec<Complex64>> =
                    projection_coords.iter().map(|&i| j[i].clone()).collect();
                let wp = cmat_det(&pj).norm_sqr();
                if !wg.is_finite() || !wp.is_finite() {
                    return Err(KErr::NonFinite(format!(
                        "volume weight at |Z| = {:.4} (annulus {ai})",
                        z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
                    )));
                }
                acc[0] += wg;
                acc[1] += wg * wg;
                acc[2] += wp;
                acc[3] += wp * wp;
            }
            Ok(acc)
        });
        let mut oks = Vec::with_capacity(PROBE_SHARDS);
        for s in shard_sums {
            oks.push(s?);
        }
        let sums = pairwise_reduce(&oks, &|x: &[f64; 4], y: &[f64; 4]| {
            [x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]]
        })
        .expect("at least one shard");

        // Lebesgue volume of the annulus in C^m = R^{2m}
        let mut ann_vol = (b.powi(2 * m as i32) - a.powi(2 * m as i32)) * std::f64::consts::PI.powi(m as i32);
        for f in 2..=m {
            ann_vol /= f as f64;
        }
        let mean_g = sums[0] / n_tot;
        let mean_p = sums[2] / n_tot;
        cum_g += mean_g * ann_vol;
        cum_p += mean_p * ann_vol;
        var_g += (sums[1] / n_tot - mean_g * mean_g).max(0.0) / n_tot * ann_vol * ann_vol;
        var_p += (sums[3] / n_tot - mean_p * mean_p).max(0.0) / n_tot * ann_vol * ann_vol;
        vol_g.push(cum_g);
        vol_p.push(cum_p);
        stderr_g.push(var_g.sqrt());
        stderr_p.push(var_p.sqrt());
    }

    assert!(
        vol_g.windows(2).all(|w| w[1] >= w[0]) && vol_p.windows(2).all(|w| w[1] >= w[0]),
        "cumulative volumes must be non-decreasing"
    );

    let verdict = match (diverges(radii, &vol_g), diverges(radii, &vol_p)) {
        (false, false) => ProbeVerdict::BothBounded,
        (false, true) => ProbeVerdict::VolGBoundedProjDivergent,
        (true, false) => ProbeVerdict::VolGDivergentProjBounded,
        (true, true) => ProbeVerdict::BothDivergent,
    };
    Ok(VolumeProbeReport {
        radii: radii.to_vec(),
        vol_g,
        stderr_g,
        vol_eucl_proj: vol_p,
        stderr_proj: stderr_p,
        verdict,
        lambda: lam,
        samples_per_annulus: shard_samples * PROBE_SHARDS,
        seed,
    })
}

/// The (B2)-necessity witness: a flat torus quotient has a fundamental
/// domain of finite (unit) Euclidean volume, while the volume comparison
/// needs the projected volume to be infinite; the flat model is Einstein
/// with lambda = 0, so condition (B2) fails.
#[derive(Clone, Debug)]
pub struct TorusWitnessReport<C: Scalar> {
    pub n: usize,
    /// Product of the 2n unit side lengths of the cube fundamental domain.
    pub fundamental_domain_volume: C,
    pub lambda: C,
    pub condition_b2_satisfied: bool,
    pub note: String,
}

pub fn torus_witness<C: Scalar>(n: usize, order: u32, tol: f64) -> KResult<TorusWitnessReport<C>> {
    let model = crate::models::flat::<C>(n, order.max(6));
    let mut volume = C::one();
    for _ in 0..2 * n {
        volume = volume * C::one();
    }
    let einstein = einstein_check(&model.diastasis, model.diastasis.order(), tol)?;
    Ok(TorusWitnessReport {
        n,
        fundamental_domain_volume: volume,
        lambda: einstein.lambda,
        condition_b2_satisfied: false,
        note: "unit-cube fundamental domain has finite Euclidean volume, so the projected \
               volume of any candidate immersion cannot be infinite: (B2) fails"
            .to_string(),
    })
}
