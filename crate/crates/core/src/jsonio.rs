//! JSON interchange documents for series and holomorphic maps.
//!
//! A `BiSeries` document is `{dim, order, mode, terms:[{j, k, num, den}]}`
//! with terms sorted graded-lexicographically. Exact coefficients carry the
//! full numerator/denominator decimal strings; float coefficients store the
//! shortest string that round-trips the f64 value, with den = "1".

use serde::{Deserialize, Serialize};

use crate::error::{KErr, KResult};
use crate::holomap::HoloMap;
use crate::scalar::{CoeffMode, Scalar};
use crate::series::BiSeries;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermDoc {
    pub j: Vec<u32>,
    pub k: Vec<u32>,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BiSeriesDoc {
    pub dim: usize,
    pub order: u32,
    pub mode: String,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HoloMapDoc {
    pub dim_in: usize,
    pub dim_out: usize,
    pub order: u32,
    pub mode: String,
    pub components: Vec<Vec<TermDoc>>,
}

pub fn series_to_doc<C: Scalar>(s: &BiSeries<C>) -> BiSeriesDoc {
    BiSeriesDoc {
        dim: s.dim(),
        order: s.order(),
        mode: C::MODE.as_str().to_string(),
        terms: s
            .iter_terms()
            .map(|(key, c)| {
                let (num, den) = c.to_num_den();
                TermDoc {
                    j: key.j.exps().to_vec(),
                    k: key.k.exps().to_vec(),
                    num,
                    den,
                }
            })
            .collect(),
    }
}

pub fn series_from_doc<C: Scalar>(doc: &BiSeriesDoc) -> KResult<BiSeries<C>> {
    let mode = CoeffMode::parse(&doc.mode)?;
    if mode != C::MODE {
        return Err(KErr::Schema(format!(
            "document mode '{}' does not match requested mode '{}'",
            doc.mode,
            C::MODE.as_str()
        )));
    }
    if doc.dim == 0 {
        return Err(KErr::Schema("dim must be >= 1".into()));
    }
    let mut s = BiSeries::<C>::zero(doc.dim, doc.order);
    for t in &doc.terms {
        if t.j.len() != doc.dim || t.k.len() != doc.dim {
            return Err(KErr::Schema(format!(
                "term exponent length {}/{} does not match dim {}",
                t.j.len(),
                t.k.len(),
                doc.dim
            )));
        }
        let c = C::from_num_den(&t.num, &t.den)?;
        s = s.add(&BiSeries::monomial(doc.dim, doc.order, &t.j, &t.k, c));
    }
    Ok(s)
}

pub fn map_to_doc<C: Scalar>(m: &HoloMap<C>) -> HoloMapDoc {
    HoloMapDoc {
        dim_in: m.dim_in(),
        dim_out: m.dim_out(),
        order: m.order(),
        mode: C::MODE.as_str().to_string(),
        components: m
            .components()
            .iter()
            .map(|c| series_to_doc(c).terms)
            .collect(),
    }
}

pub fn map_from_doc<C: Scalar>(doc: &HoloMapDoc) -> KResult<HoloMap<C>> {
    if doc.components.len() != doc.dim_out {
        return Err(KErr::Schema(format!(
            "dim_out {} but {} components given",
            doc.dim_out,
            doc.components.len()
        )));
    }
    let comps: KResult<Vec<_>> = doc
        .components
        .iter()
        .map(|terms| {
            series_from_doc::<C>(&BiSeriesDoc {
                dim: doc.dim_in,
                order: doc.order,
                mode: doc.mode.clone(),
                terms: terms.clone(),
            })
        })
        .collect();
    HoloMap::from_components(comps?)
}
