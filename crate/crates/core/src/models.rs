//! Catalog of worked model metrics: Fubini-Study, products of
//! Fubini-Study factors, flat space (torus fundamental domain), and the
//! hyperbolic disc — each as a ready-made diastasis series with its Einstein
//! constant and condition-(A)/(B) status.

use num::complex::Complex64;

use crate::error::{KErr, KResult};
use crate::kahler::einstein_check;
use crate::multi_index::MultiIndex;
use crate::scalar::{Rat, Scalar, DEFAULT_TOL};
use crate::series::BiSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    FubiniStudy { n: usize },
    ProductFs { r: usize, s: usize },
    Flat { n: usize },
    Hyperbolic,
}

impl ModelKind {
    pub fn dim(&self) -> usize {
        match *self {
            ModelKind::FubiniStudy { n } | ModelKind::Flat { n } => n,
            ModelKind::ProductFs { r, s } => r + s,
            ModelKind::Hyperbolic => 1,
        }
    }

    /// Closed-form diastasis value at a point (independent of any truncation).
    pub fn eval_diastasis(&self, pt: &[Complex64]) -> f64 {
        assert_eq!(pt.len(), self.dim(), "point dim");
        let sum_sq = |ps: &[Complex64]| ps.iter().map(|z| z.norm_sqr()).sum::<f64>();
        match *self {
            ModelKind::FubiniStudy { .. } => (1.0 + sum_sq(pt)).ln(),
            ModelKind::ProductFs { r, .. } => {
                (1.0 + sum_sq(&pt[..r])).ln() + (1.0 + sum_sq(&pt[r..])).ln()
            }
            ModelKind::Flat { .. } => sum_sq(pt),
            ModelKind::Hyperbolic => -(1.0 - sum_sq(pt)).ln(),
        }
    }

    /// Closed-form metric g_{a bbar} at a point. For Fubini-Study,
    /// g_{ab} = delta_ab/(1+S) - ub_a u_b/(1+S)^2 with S = sum |u|^2;
    /// products are block-diagonal; the disc gives 1/(1-|z|^2)^2.
    pub fn eval_metric(&self, pt: &[Complex64]) -> Vec<Vec<Complex64>> {
        assert_eq!(pt.len(), self.dim(), "point dim");
        let n = self.dim();
        let fs_block = |ps: &[Complex64]| -> Vec<Vec<Complex64>> {
            let s = 1.0 + ps.iter().map(|z| z.norm_sqr()).sum::<f64>();
            (0..ps.len())
                .map(|a| {
                    (0..ps.len())
                        .map(|b| {
                            let kron = if a == b { 1.0 / s } else { 0.0 };
                            Complex64::new(kron, 0.0) - ps[a].conj() * ps[b] / (s * s)
                        })
                        .collect()
                })
                .collect()
        };
        match *self {
            ModelKind::FubiniStudy { .. } => fs_block(pt),
            ModelKind::ProductFs { r, .. } => {
                let top = fs_block(&pt[..r]);
                let bot = fs_block(&pt[r..]);
                let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
                for a in 0..r {
                    for b in 0..r {
                        g[a][b] = top[a][b];
                    }
                }
                for a in 0..n - r {
                    for b in 0..n - r {
                        g[r + a][r + b] = bot[a][b];
                    }
                }
                g
            }
            ModelKind::Flat { .. } => {
                let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
                for (a, row) in g.iter_mut().enumerate() {
                    row[a] = Complex64::new(1.0, 0.0);
                }
                g
            }
            ModelKind::Hyperbolic => {
                let s = 1.0 - pt[0].norm_sqr();
                vec![vec![Complex64::new(1.0 / (s * s), 0.0)]]
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ModelSpec<C: Scalar> {
    pub name: String,
    pub n: usize,
    pub kind: ModelKind,
    pub diastasis: BiSeries<C>,
    /// Einstein constant, present exactly when the model is Kähler-Einstein;
    /// always recomputed through einstein_check on an exact order-6 series,
    /// never hard-coded.
    pub lambda: Option<C>,
    pub condition_a: bool,
    pub condition_a_justification: String,
    pub condition_b: bool,
    pub notes: Vec<String>,
}

impl<C: Scalar> ModelSpec<C> {
    pub fn eval_diastasis(&self, pt: &[Complex64]) -> f64 {
        self.kind.eval_diastasis(pt)
    }

    pub fn eval_metric(&self, pt: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.kind.eval_metric(pt)
    }

    /// Euclidean volume of the unit fundamental domain [0,1)^{2n} in the
    /// Bochner coordinates — finite only for the quotient models, where it
    /// witnesses the failure of the infinite-euclidean-volume hypothesis.
    pub fn fundamental_domain_euclidean_volume(&self) -> Option<C> {
        match self.kind {
            ModelKind::Flat { .. } | ModelKind::Hyperbolic => Some(C::one()),
            _ => None,
        }
    }
}

/// sum z_i zb_i at the given order — the universal quadratic seed.
fn norm_sq_series<C: Scalar>(n: usize, order: u32) -> BiSeries<C> {
    let mut t = BiSeries::zero(n, order);
    for i in 0..n {
        let e = MultiIndex::unit(n, i);
        t = t.add(&BiSeries::monomial(n, order, e.exps(), e.exps(), C::one()));
    }
    t
}

fn fs_series<C: Scalar>(n: usize, order: u32) -> BiSeries<C> {
    norm_sq_series::<C>(n, order).log1p().expect("zero constant")
}

fn exact_lambda_of<C: Scalar>(d6: &BiSeries<Rat>) -> Option<C> {
    let rep = einstein_check(d6, 6, DEFAULT_TOL).ok()?;
    if !rep.is_einstein_to_order {
        return None;
    }
    let (num, den) = rep.lambda.to_num_den();
    C::from_num_den(&num, &den).ok()
}

pub fn fubini_study<C: Scalar>(n: usize, order: u32) -> ModelSpec<C> {
    assert!(n >= 1, "fubini_study: n >= 1");
    ModelSpec {
        name: format!("fubini-study(n={n})"),
        n,
        kind: ModelKind::FubiniStudy { n },
        diastasis: fs_series::<C>(n, order),
        lambda: exact_lambda_of::<C>(&fs_series::<Rat>(n, 6)),
        condition_a: true,
        condition_a_justification:
            "log(1 + |u|^2) >= 0 on the whole affine chart and the diastasis extends to CP^n"
                .into(),
        condition_b: true,
        notes: vec!["Bochner coordinates are the affine coordinates".into()],
    }
}

pub fn product_fs<C: Scalar>(r: usize, s: usize, order: u32) -> ModelSpec<C> {
    assert!(r >= 1 && s >= 1, "product_fs: factors >= 1");
    let n = r + s;
    // sum of the factor diastases (Calabi additivity for product metrics)
    let mut left = BiSeries::<C>::zero(n, order);
    for i in 0..r {
        let e = MultiIndex::unit(n, i);
        left = left.add(&BiSeries::monomial(n, order, e.exps(), e.exps(), C::one()));
    }
    let mut right = BiSeries::<C>::zero(n, order);
    for i in r..n {
        let e = MultiIndex::unit(n, i);
        right = right.add(&BiSeries::monomial(n, order, e.exps(), e.exps(), C::one()));
    }
    let d = left
        .log1p()
        .expect("zero constant")
        .add(&right.log1p().expect("zero constant"));

    let d6 = {
        let mut l = BiSeries::<Rat>::zero(n, 6);
        let mut rt = BiSeries::<Rat>::zero(n, 6);
        for i in 0..n {
            let e = MultiIndex::unit(n, i);
            let m = BiSeries::monomial(n, 6, e.exps(), e.exps(), Rat::one());
            if i < r {
                l = l.add(&m);
            } else {
                rt = rt.add(&m);
            }
        }
        l.log1p().unwrap().add(&rt.log1p().unwrap())
    };

    ModelSpec {
        name: format!("product-fs(r={r},s={s})"),
        n,
        kind: ModelKind::ProductFs { r, s },
        diastasis: d,
        lambda: exact_lambda_of::<C>(&d6),
        condition_a: true,
        condition_a_justification:
            "sum of two factor diastases, each >= 0 on its affine chart".into(),
        condition_b: true,
        notes: vec![
            "diastasis taken as the sum of the factor logarithms; the single-log display \
             formula sometimes quoted for the product is recorded as a discrepancy and not used"
                .into(),
        ],
    }
}

pub fn flat<C: Scalar>(n: usize, order: u32) -> ModelSpec<C> {
    assert!(n >= 1, "flat: n >= 1");
    ModelSpec {
        name: format!("flat(n={n})"),
        n,
        kind: ModelKind::Flat { n },
        diastasis: norm_sq_series::<C>(n, order),
        lambda: exact_lambda_of::<C>(&norm_sq_series::<Rat>(n, 6)),
        condition_a: true,
        condition_a_justification: "sum of squared moduli is >= 0 everywhere".into(),
        condition_b: true,
        notes: vec![
            "euclidean coordinates are Bochner coordinates for the torus quotient".into(),
            "fundamental domain [0,1)^{2n} has finite euclidean volume 1: the \
             infinite-volume hypothesis fails here, consistent with c_1 = 0 not positive"
                .into(),
        ],
    }
}

pub fn hyperbolic<C: Scalar>(order: u32) -> ModelSpec<C> {
    let d = BiSeries::<C>::monomial(1, order, &[1], &[1], -C::one())
        .log1p()
        .expect("zero constant")
        .neg();
    let d6 = BiSeries::<Rat>::monomial(1, 6, &[1], &[1], -Rat::one())
        .log1p()
        .unwrap()
        .neg();
    ModelSpec {
        name: "hyperbolic".into(),
        n: 1,
        kind: ModelKind::Hyperbolic,
        diastasis: d,
        lambda: exact_lambda_of::<C>(&d6),
        condition_a: true,
        condition_a_justification:
            "-log(1-t) has positive Taylor coefficients, so the diastasis is >= 0 on the disc"
                .into(),
        condition_b: true,
        notes: vec![
            "covers genus >= 2 surfaces with the hyperbolic metric; like the torus, the \
             fundamental domain has finite euclidean volume, so the infinite-volume \
             hypothesis fails (c_1 < 0)"
                .into(),
        ],
    }
}

/// Catalog lookup by the CLI's model names. `product-fs` splits the given
/// dimension into two equal factors.
pub fn by_name<C: Scalar>(name: &str, dim: usize, order: u32) -> KResult<ModelSpec<C>> {
    match name.to_ascii_lowercase().replace('_', "-").as_str() {
        "fubini-study" | "fs" => {
            if dim < 1 {
                return Err(KErr::Invalid("fubini-study needs dim >= 1".into()));
            }
            Ok(fubini_study(dim, order))
        }
        "product-fs" => {
            if dim < 2 || dim % 2 != 0 {
                return Err(KErr::Invalid(
                    "product-fs splits --dim into two equal factors; need even dim >= 2".into(),
                ));
            }
            Ok(product_fs(dim / 2, dim / 2, order))
        }
        "flat" | "torus" => {
            if dim < 1 {
                return Err(KErr::Invalid("flat needs dim >= 1".into()));
            }
            Ok(flat(dim, order))
        }
        "hyperbolic" | "disc" => {
            if dim != 1 {
                return Err(KErr::Invalid("hyperbolic model is one-dimensional".into()));
            }
            Ok(hyperbolic(order))
        }
        other => Err(KErr::Invalid(format!(
            "unknown model '{other}' (expected fubini-study, product-fs, flat, hyperbolic)"
        ))),
    }
}

pub const MODEL_NAMES: [&str; 4] = ["fubini-study", "product-fs", "flat", "hyperbolic"];
