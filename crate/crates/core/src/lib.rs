//! kahlerkit: a desk-scale symbolic-numeric toolkit for Kähler geometry in
//! Calabi's normal-coordinate style.
//!
//! The objects are truncated bidegree power series in (z, zbar) — jets of
//! real-analytic Kähler potentials around a center — over exact rational or
//! high-precision float coefficients. On top of the series ring sit:
//!
//! - diastasis extraction and the Bochner normal form ([`kahler`]),
//! - Kähler–Einstein checks and the volume-factor identity
//!   det g = e^{-(lambda/2) D} ([`kahler`]),
//! - a catalog of model metrics with closed-form evaluators ([`models`]),
//! - polarized monomial section bases of O(k) on CP^n, Kodaira maps, and the
//!   Bergman diastasis D^k = k D ([`polarization`]),
//! - independent numeric oracles: Gauss–Legendre/trapezoid quadrature for
//!   L^2 Gram matrices ([`quadrature`]) and seeded Monte Carlo volume probes
//!   for the projection-volume obstruction ([`obstruction`]).
//!
//! Conventions (fixed across the crate, printed verbatim in CLI reports):
//! omega = (i/2) partial partialbar Phi; g_{a bbar} = d^2 Phi / dz_a dzbar_b;
//! Ricci form rho = -i partial partialbar log det g; Einstein constant
//! lambda with rho = lambda omega, i.e. componentwise
//! -d_a dbar_b log det g = (lambda/2) g_{a bbar}, and scalar curvature
//! s = 2 m lambda on complex dimension m. Fubini–Study on CP^n has
//! lambda = 2(n+1); the unit-disc hyperbolic metric has lambda = -4; flat
//! space has lambda = 0.
//!
//! Everything deterministic: BTreeMap term order, seeded ChaCha streams,
//! fixed pairwise reduction trees — reports are byte-identical across runs
//! and thread counts (the `parallel` feature only changes wall time).

pub mod error;
pub mod exec;
pub mod holomap;
pub mod jsonio;
pub mod kahler;
pub mod matrix;
pub mod models;
pub mod multi_index;
pub mod obstruction;
pub mod polarization;
pub mod quadrature;
pub mod scalar;
pub mod series;

pub use error::{KErr, KResult};
pub use exec::Exec;
pub use holomap::HoloMap;
pub use kahler::{
    bochner_normalize, diastasis_from_potential, einstein_check, is_bochner_normal,
    metric_from_potential, pullback_potential, ricci_potential, volume_factor_check,
    BochnerResult, EinsteinReport, MetricJet, PullbackResult,
};
pub use models::{by_name, flat, fubini_study, hyperbolic, product_fs, ModelKind, ModelSpec};
pub use multi_index::MultiIndex;
pub use obstruction::{
    embed_submanifold, torus_witness, verify_eqforms, volume_probe, EmbeddedSubmanifold,
    ProbeVerdict, TorusWitnessReport, VolumeProbeReport,
};
pub use polarization::{
    bergman_diastasis, check_condition_c, check_condition_d, gram_by_quadrature, kodaira_map,
    monomial_basis, monomial_inner, GramReport, KodairaMap, Section, SectionBasis,
};
pub use scalar::{CoeffMode, Fl, Rat, Scalar, DEFAULT_TOL};
pub use series::BiSeries;
