//! Plumbing for the kahlerkit CLI: scenario schema, report envelope with the
//! fixed convention block, operation dispatch over both coefficient modes,
//! and the exit-code mapping.
//!
//! Exit codes: 0 success; 2 precondition violation; 3 verdict failure
//! (--expect-einstein against a non-Einstein result); 4 schema violation;
//! 5 non-finite float values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use kahlerkit::exec::Exec;
use kahlerkit::holomap::HoloMap;
use kahlerkit::jsonio::{map_from_doc, map_to_doc, series_from_doc, series_to_doc, BiSeriesDoc, HoloMapDoc};
use kahlerkit::kahler::{
    bochner_normalize, diastasis_from_potential, einstein_check, pullback_potential,
    volume_factor_check,
};
use kahlerkit::models::by_name;
use kahlerkit::obstruction::{embed_submanifold, torus_witness, volume_probe};
use kahlerkit::polarization::{
    bergman_diastasis, check_condition_c, check_condition_d, gram_by_quadrature, kodaira_map,
    monomial_basis,
};
use kahlerkit::scalar::{CoeffMode, Fl, Rat, Scalar};
use kahlerkit::series::BiSeries;
use kahlerkit::{KErr, ModelKind};

/// Normalization conventions, embedded verbatim in every report.
#[derive(Serialize)]
pub struct Conventions {
    pub kahler_form: &'static str,
    pub metric: &'static str,
    pub ricci_form: &'static str,
    pub einstein_condition: &'static str,
    pub scalar_curvature: &'static str,
    pub diastasis: &'static str,
}

pub const CONVENTIONS: Conventions = Conventions {
    kahler_form: "omega = (i/2) d dbar Phi",
    metric: "g_{a bbar} = d^2 Phi / (dz_a dzbar_b)",
    ricci_form: "rho = -i d dbar log det g",
    einstein_condition:
        "rho = lambda omega, componentwise -d_a dbar_b log det g = (lambda/2) g_{a bbar}",
    scalar_curvature: "s = 2 m lambda (m = complex dimension)",
    diastasis: "D = sum_{|j|,|k| >= 1} a_{jk} z^j zbar^k: the potential with all pure terms removed",
};

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub op: String,
    pub mode: String,
    pub tol: f64,
    pub order: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub conventions: Conventions,
    pub payload: Value,
}

#[derive(Debug)]
pub enum CliError {
    Precondition(String),
    Verdict(String),
    Schema(String),
    NonFinite(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => 2,
            CliError::Verdict(_) => 3,
            CliError::Schema(_) => 4,
            CliError::NonFinite(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Precondition(m)
            | CliError::Verdict(m)
            | CliError::Schema(m)
            | CliError::NonFinite(m) => m,
        }
    }
}

impl From<KErr> for CliError {
    fn from(e: KErr) -> Self {
        match e {
            KErr::Schema(m) => CliError::Schema(m),
            KErr::NonFinite(m) => CliError::NonFinite(m),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

/// Scenario document for `run`. Unknown keys are rejected.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: String,
    pub op: String,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub series: Option<BiSeriesDoc>,
    #[serde(default)]
    pub embedding: Option<EmbeddingSpec>,
    #[serde(default)]
    pub order: Option<u32>,
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub k: Option<u32>,
    #[serde(default)]
    pub kmax: Option<u32>,
    #[serde(default)]
    pub radial_nodes: Option<usize>,
    #[serde(default)]
    pub projection: Option<Vec<usize>>,
    #[serde(default)]
    pub expect_einstein: Option<bool>,
}

/// Either a built-in embedding by name (identity, slice, conic, cubic,
/// diagonal) or an inline HoloMap document.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum EmbeddingSpec {
    Name(String),
    Doc(HoloMapDoc),
}

/// Fully resolved work order, built either from CLI flags or a scenario file.
#[derive(Clone, Debug)]
pub struct Job {
    pub op: String,
    pub model: Option<String>,
    pub dim: Option<usize>,
    pub series: Option<BiSeriesDoc>,
    pub embedding: Option<EmbeddingSpec>,
    pub order: u32,
    pub mode: CoeffMode,
    pub tol: f64,
    pub seed: u64,
    pub radii: Vec<f64>,
    pub samples: usize,
    pub k: u32,
    pub kmax: u32,
    pub radial_nodes: usize,
    pub projection: Option<Vec<usize>>,
    pub expect_einstein: bool,
}

impl Default for Job {
    fn default() -> Self {
        Job {
            op: String::new(),
            model: None,
            dim: None,
            series: None,
            embedding: None,
            order: 8,
            mode: CoeffMode::Exact,
            tol: kahlerkit::DEFAULT_TOL,
            seed: 0,
            radii: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            samples: 100_000,
            k: 2,
            kmax: 4,
            radial_nodes: 32,
            projection: None,
            expect_einstein: false,
        }
    }
}

impl Job {
    pub fn from_scenario(s: &ScenarioFile) -> Result<Job, CliError> {
        if s.schema != "1" {
            return Err(CliError::Schema(format!(
                "unsupported scenario schema '{}' (expected \"1\")",
                s.schema
            )));
        }
        let mut job = Job {
            op: s.op.clone(),
            ..Job::default()
        };
        job.model = s.model.clone();
        job.dim = s.dim;
        job.series = s.series.clone();
        job.embedding = s.embedding.clone();
        if let Some(o) = s.order {
            job.order = o;
        }
        if let Some(m) = &s.mode {
            job.mode = CoeffMode::parse(m)?;
        }
        if let Some(t) = s.tol {
            job.tol = t;
        }
        if let Some(r) = &s.radii {
            job.radii = r.clone();
        }
        if let Some(n) = s.samples {
            job.samples = n;
        }
        if let Some(n) = s.seed {
            job.seed = n;
        }
        if let Some(v) = s.k {
            job.k = v;
        }
        if let Some(v) = s.kmax {
            job.kmax = v;
        }
        if let Some(v) = s.radial_nodes {
            job.radial_nodes = v;
        }
        job.projection = s.projection.clone();
        if let Some(v) = s.expect_einstein {
            job.expect_einstein = v;
        }
        Ok(job)
    }
}

fn fin(x: f64, what: &str) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::NonFinite(format!("{what} is {x}")))
    }
}

/// Exact scalars render as {"num","den"} strings, float scalars as numbers.
fn scalar_json<C: Scalar>(c: &C) -> Result<Value, CliError> {
    match C::MODE {
        CoeffMode::Exact => {
            let (num, den) = c.to_num_den();
            Ok(json!({ "num": num, "den": den }))
        }
        CoeffMode::Float => Ok(json!(fin(c.to_f64(), "coefficient")?)),
    }
}

fn opt_scalar_json<C: Scalar>(c: &Option<C>) -> Result<Value, CliError> {
    match c {
        Some(v) => scalar_json(v),
        None => Ok(Value::Null),
    }
}

/// Outcome of one executed job: the payload plus whether the verdict (if one
/// was requested) held.
pub struct Outcome {
    pub payload: Value,
    pub verdict_ok: bool,
    pub verdict_note: Option<String>,
}

pub fn execute(job: &Job) -> Result<Outcome, CliError> {
    match job.mode {
        CoeffMode::Exact => execute_typed::<Rat>(job),
        CoeffMode::Float => execute_typed::<Fl>(job),
    }
}

fn potential_from<C: Scalar>(job: &Job) -> Result<BiSeries<C>, CliError> {
    potential_with_margin(job, 0)
}

/// Like potential_from, but catalog models are generated `margin` orders past
/// the requested truncation so that derivative-hungry checks (the Ricci side
/// loses 4 orders) still certify the order the user asked for. Series read
/// from files carry only their own data and cannot be extended.
fn potential_with_margin<C: Scalar>(job: &Job, margin: u32) -> Result<BiSeries<C>, CliError> {
    match (&job.series, &job.model) {
        (Some(doc), _) => Ok(series_from_doc::<C>(doc)?),
        (None, Some(name)) => {
            let dim = job.dim.unwrap_or(1);
            Ok(by_name::<C>(name, dim, job.order + margin)?.diastasis)
        }
        (None, None) => Err(CliError::Precondition(
            "need --series or --model".to_string(),
        )),
    }
}

fn builtin_embedding<C: Scalar>(name: &str, n: usize, order: u32) -> Result<HoloMap<C>, CliError> {
    let mono = |e: &[u32], c: C| BiSeries::monomial(1, order, e, &[0], c);
    let map = match name {
        "identity" => HoloMap::identity(n, order),
        "slice" => {
            let mut comps = vec![mono(&[1], C::one())];
            comps.extend((1..n).map(|_| BiSeries::zero(1, order)));
            HoloMap::from_components(comps)?
        }
        "conic" => {
            if n != 2 {
                return Err(CliError::Precondition(
                    "conic embedding targets a 2-dimensional ambient".into(),
                ));
            }
            let s2 = C::from_int(2).try_sqrt().ok_or_else(|| {
                CliError::Precondition(
                    "conic needs sqrt(2): rerun with --mode float".to_string(),
                )
            })?;
            HoloMap::from_components(vec![mono(&[1], s2), mono(&[2], C::one())])?
        }
        "cubic" => {
            if n != 2 {
                return Err(CliError::Precondition(
                    "cubic embedding targets a 2-dimensional ambient".into(),
                ));
            }
            HoloMap::from_components(vec![mono(&[1], C::one()), mono(&[3], C::one())])?
        }
        "diagonal" => {
            if n != 2 {
                return Err(CliError::Precondition(
                    "diagonal embedding targets a 2-dimensional ambient".into(),
                ));
            }
            HoloMap::from_components(vec![mono(&[1], C::one()), mono(&[1], C::one())])?
        }
        other => {
            return Err(CliError::Schema(format!(
                "unknown embedding '{other}' (expected identity, slice, conic, cubic, diagonal, or an inline document)"
            )))
        }
    };
    Ok(map)
}

fn embedding_from<C: Scalar>(job: &Job, ambient_dim: usize) -> Result<HoloMap<C>, CliError> {
    match &job.embedding {
        Some(EmbeddingSpec::Doc(doc)) => Ok(map_from_doc::<C>(doc)?),
        Some(EmbeddingSpec::Name(name)) => builtin_embedding(name, ambient_dim, job.order),
        None => Err(CliError::Precondition(
            "need an embedding (--embedding-name or --embedding-file)".to_string(),
        )),
    }
}

fn einstein_payload<C: Scalar>(
    phi: &BiSeries<C>,
    job: &Job,
) -> Result<(Value, bool, Option<String>), CliError> {
    let rep = einstein_check(phi, phi.order(), job.tol)?;
    let payload = json!({
        "is_einstein_to_order": rep.is_einstein_to_order,
        "lambda": scalar_json(&rep.lambda)?,
        "scalar_curvature": scalar_json(&rep.scalar_curvature)?,
        "residual_norm": fin(rep.residual_norm, "residual norm")?,
        "checked_to_order": rep.checked_to_order,
    });
    let (ok, note) = if job.expect_einstein && !rep.is_einstein_to_order {
        (
            false,
            Some(format!(
                "expected Einstein, residual norm {} at order {}",
                rep.residual_norm, rep.checked_to_order
            )),
        )
    } else {
        (true, None)
    };
    Ok((payload, ok, note))
}

fn execute_typed<C: Scalar>(job: &Job) -> Result<Outcome, CliError> {
    let mut verdict_ok = true;
    let mut verdict_note = None;
    let payload = match job.op.as_str() {
        "expand" => {
            let s = potential_from::<C>(job)?.truncated(job.order);
            json!({
                "dim": s.dim(),
                "order": s.order(),
                "terms": s.num_terms(),
                "series": series_to_doc(&s),
            })
        }
        "diastasis" => {
            let phi = potential_from::<C>(job)?;
            let before = phi.num_terms();
            let d = diastasis_from_potential(&phi, job.tol)?;
            json!({
                "removed_terms": before - d.num_terms(),
                "diastasis": series_to_doc(&d),
            })
        }
        "bochner" => {
            let phi = potential_from::<C>(job)?;
            let b = bochner_normalize(&phi, job.tol)?;
            json!({
                "unitary_residual_flag": b.unitary_residual_flag,
                "change": map_to_doc(&b.change),
                "normal_form": series_to_doc(&b.normal_form),
            })
        }
        "einstein" => {
            let phi = potential_with_margin::<C>(job, 4)?;
            let (p, ok, note) = einstein_payload(&phi, job)?;
            verdict_ok = ok;
            verdict_note = note;
            p
        }
        "factor-check" => {
            let phi = potential_with_margin::<C>(job, 4)?;
            let rep = einstein_check(&phi, phi.order(), job.tol)?;
            let residual =
                volume_factor_check(&phi, &rep.lambda, job.tol)?.truncated(job.order);
            json!({
                "lambda": scalar_json(&rep.lambda)?,
                "is_einstein_to_order": rep.is_einstein_to_order,
                "residual_is_zero": residual.is_approx_zero(job.tol),
                "residual_pure_only": residual.mixed_part().is_approx_zero(job.tol),
                "residual": series_to_doc(&residual),
            })
        }
        "pullback" => {
            let ambient = potential_from::<C>(job)?;
            let map = embedding_from::<C>(job, ambient.dim())?;
            let res = pullback_potential(&ambient, &map)?;
            json!({
                "diastasis_preserved": res.diastasis_preserved,
                "potential": series_to_doc(&res.potential),
            })
        }
        "model" => {
            let name = job
                .model
                .clone()
                .ok_or_else(|| CliError::Precondition("need --name".to_string()))?;
            let dim = job.dim.unwrap_or(1);
            let spec = by_name::<C>(&name, dim, job.order)?;
            let witness = if matches!(spec.kind, ModelKind::Flat { .. }) {
                let w = torus_witness::<C>(spec.n, job.order, job.tol)?;
                json!({
                    "fundamental_domain_volume": scalar_json(&w.fundamental_domain_volume)?,
                    "lambda": scalar_json(&w.lambda)?,
                    "condition_b2_satisfied": w.condition_b2_satisfied,
                    "note": w.note,
                })
            } else {
                Value::Null
            };
            json!({
                "name": spec.name,
                "n": spec.n,
                "lambda": opt_scalar_json(&spec.lambda)?,
                "condition_a": spec.condition_a,
                "condition_a_justification": spec.condition_a_justification,
                "condition_b": spec.condition_b,
                "fundamental_domain_euclidean_volume":
                    opt_scalar_json(&spec.fundamental_domain_euclidean_volume())?,
                "notes": spec.notes,
                "diastasis": series_to_doc(&spec.diastasis),
                "b2_witness": witness,
            })
        }
        "bergman" => {
            let n = job
                .dim
                .ok_or_else(|| CliError::Precondition("need --dim".to_string()))?;
            let basis = monomial_basis::<C>(n, job.k);
            let map = kodaira_map(&basis, 0)?;
            let dk = bergman_diastasis(&map, job.order)?;
            let fs = by_name::<C>("fubini-study", n, job.order)?
                .diastasis
                .scale(&C::from_int(job.k as i64));
            let weights: Result<Vec<Value>, CliError> = map
                .components
                .iter()
                .map(|c| scalar_json(&c.weight_sq))
                .collect();
            json!({
                "n": n,
                "k": job.k,
                "d_k": map.d_k,
                "weights_sq": weights?,
                "equals_k_times_fs": dk.approx_eq(&fs, job.tol),
                "diastasis": series_to_doc(&dk),
            })
        }
        "conditions" => {
            let n = job
                .dim
                .ok_or_else(|| CliError::Precondition("need --dim".to_string()))?;
            let basis = monomial_basis::<C>(n, job.k);
            let cond_c = check_condition_c(&basis, 0);
            let cond_d: Vec<Value> = check_condition_d(&basis, job.kmax)
                .into_iter()
                .map(|(kk, ok)| json!({ "k": kk, "holds": ok }))
                .collect();
            let gram = gram_by_quadrature(&basis, job.radial_nodes, Exec::default());
            json!({
                "n": n,
                "k": job.k,
                "sections": basis.sections.len(),
                "condition_c": cond_c,
                "condition_d": cond_d,
                "gram": {
                    "size": gram.size,
                    "radial_nodes": gram.radial_nodes,
                    "max_diag_deviation": fin(gram.max_diag_deviation, "gram diagonal")?,
                    "max_offdiag": fin(gram.max_offdiag, "gram off-diagonal")?,
                },
            })
        }
        "probe" => {
            let name = job
                .model
                .clone()
                .ok_or_else(|| CliError::Precondition("need --model".to_string()))?;
            let dim = job.dim.unwrap_or(2);
            let spec = by_name::<C>(&name, dim, job.order)?;
            let map = embedding_from::<C>(job, spec.n)?;
            let sub = embed_submanifold(&spec, &map, job.tol)?;
            if job.expect_einstein && !sub.einstein.is_einstein_to_order {
                verdict_ok = false;
                verdict_note = Some(format!(
                    "expected Einstein, residual norm {}",
                    sub.einstein.residual_norm
                ));
            }
            let coords: Vec<usize> = job
                .projection
                .clone()
                .unwrap_or_else(|| (0..sub.m).collect());
            let rep = volume_probe(&sub, &coords, &job.radii, job.samples, job.seed, Exec::default())?;
            let mut rows = Vec::with_capacity(rep.radii.len());
            for i in 0..rep.radii.len() {
                rows.push(json!({
                    "r": rep.radii[i],
                    "vol_g": fin(rep.vol_g[i], "vol_g")?,
                    "stderr_g": fin(rep.stderr_g[i], "stderr_g")?,
                    "vol_eucl_proj": fin(rep.vol_eucl_proj[i], "vol_eucl_proj")?,
                    "stderr_proj": fin(rep.stderr_proj[i], "stderr_proj")?,
                }));
            }
            json!({
                "model": spec.name,
                "m": sub.m,
                "projection": coords,
                "lambda": fin(rep.lambda, "lambda")?,
                "is_einstein_to_order": sub.einstein.is_einstein_to_order,
                "factor_residual_is_zero": sub
                    .factor_residual
                    .as_ref()
                    .map(|r| r.is_approx_zero(job.tol)),
                "samples_per_annulus": rep.samples_per_annulus,
                "rows": rows,
                "verdict": rep.verdict.as_str(),
                "note": "divergence is a trend verdict over a finite radius ladder; the \
                         Zariski-openness of polynomial images (Chevalley) is assumed, not re-proved",
            })
        }
        other => {
            return Err(CliError::Schema(format!(
                "unknown op '{other}' (expected expand, diastasis, bochner, einstein, \
                 factor-check, pullback, model, bergman, conditions, probe)"
            )))
        }
    };
    Ok(Outcome {
        payload,
        verdict_ok,
        verdict_note,
    })
}

/// Seconds since the Unix epoch; the report timestamp unless --no-timestamp.
pub fn now_secs() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn render_report(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// True when the op consumes the RNG seed (recorded in the envelope).
pub fn op_uses_seed(op: &str) -> bool {
    matches!(op, "probe")
}

pub fn describe_error(e: &CliError) -> String {
    let mut s = String::new();
    let kind = match e {
        CliError::Precondition(_) => "precondition violation",
        CliError::Verdict(_) => "verdict failure",
        CliError::Schema(_) => "schema violation",
        CliError::NonFinite(_) => "non-finite value",
    };
    let _ = write!(s, "error ({kind}): {}", e.message());
    s
}
