//! File formats: point files, evaluation output and number formatting.
//!
//! Numbers are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly. Non-finite values become `null`.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::jts::{Domain, Element};
use crate::numerics::C64;

/// `d.dddddddddddddddde±x`; `None` for non-finite input.
pub fn format_number(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

/// An `f64` serialized through [`format_number`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match format_number(self.0) {
            Some(text) => RawValue::from_string(text)
                .map_err(serde::ser::Error::custom)?
                .serialize(s),
            None => s.serialize_none(),
        }
    }
}

/// One element as nested `[re, im]` pairs, column-major per block.
pub type ElementJson = Vec<Vec<[Num; 2]>>;

pub fn element_to_json(z: &Element) -> ElementJson {
    z.blocks()
        .iter()
        .map(|b| {
            b.as_slice()
                .iter()
                .map(|c| [Num(c.re), Num(c.im)])
                .collect()
        })
        .collect()
}

pub fn element_from_json(d: &Domain, blocks: &[Vec<[f64; 2]>]) -> Result<Element> {
    if blocks.len() != d.factors().len() {
        return Err(Error::Parse(format!(
            "point has {} blocks, domain {} has {}",
            blocks.len(),
            d,
            d.factors().len()
        )));
    }
    let mut coords = Vec::with_capacity(d.total_dim());
    for (i, (block, f)) in blocks.iter().zip(d.factors()).enumerate() {
        if block.len() != f.dim() {
            return Err(Error::Parse(format!(
                "block {i} has {} entries, expected {}",
                block.len(),
                f.dim()
            )));
        }
        coords.extend(block.iter().map(|[re, im]| C64::new(*re, *im)));
    }
    Element::from_vec(d, &coords).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFileIn {
    domain: String,
    points: Vec<Vec<Vec<[f64; 2]>>>,
}

/// A domain together with a list of its elements.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFile {
    pub domain: Domain,
    pub points: Vec<Element>,
}

#[derive(Serialize)]
struct PointFileOut {
    domain: String,
    points: Vec<ElementJson>,
}

impl PointFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: PointFileIn =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("point file: {e}")))?;
        let domain: Domain = raw.domain.parse()?;
        let points = raw
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                element_from_json(&domain, p).map_err(|e| Error::Parse(format!("point {k}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PointFile { domain, points })
    }

    pub fn to_json(&self) -> String {
        let out = PointFileOut {
            domain: self.domain.to_string(),
            points: self.points.iter().map(element_to_json).collect(),
        };
        let mut s = serde_json::to_string_pretty(&out).expect("point file serializes");
        s.push('\n');
        s
    }
}
