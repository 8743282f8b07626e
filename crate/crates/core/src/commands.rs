//! The `eval` and `trace` commands, independent of argument parsing and I/O.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::duality::{symplectic_duality, symplectic_duality_inv};
use crate::error::{Error, Result};
use crate::geometry::{
    dexp_fs, dexp_fs_inv, dexp_hyp, dexp_hyp_inv, diastasis_fs, diastasis_hyp, geo_exp_fs,
    geo_exp_hyp, kernel_dual, kernel_hyp,
};
use crate::io::{element_to_json, format_number, ElementJson, Num, PointFile};
use crate::jts::{Domain, Element};
use crate::spectral::{spectral_decompose, spectral_norm, DEFAULT_CLUSTER_TOL};

/// Operations accepted by `eval`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    DiastasisHyp,
    DiastasisFs,
    KernelHyp,
    KernelDual,
    DexpHyp,
    DexpFs,
    DexpHypInv,
    DexpFsInv,
    GeoExpHyp,
    GeoExpFs,
    Duality,
    DualityInv,
    Spectrum,
}

impl Op {
    pub const ALL: [(&'static str, Op); 13] = [
        ("diastasis-hyp", Op::DiastasisHyp),
        ("diastasis-fs", Op::DiastasisFs),
        ("kernel-hyp", Op::KernelHyp),
        ("kernel-dual", Op::KernelDual),
        ("dexp-hyp", Op::DexpHyp),
        ("dexp-fs", Op::DexpFs),
        ("dexp-hyp-inv", Op::DexpHypInv),
        ("dexp-fs-inv", Op::DexpFsInv),
        ("geo-exp-hyp", Op::GeoExpHyp),
        ("geo-exp-fs", Op::GeoExpFs),
        ("duality", Op::Duality),
        ("duality-inv", Op::DualityInv),
        ("spectrum", Op::Spectrum),
    ];

    pub fn name(self) -> &'static str {
        Op::ALL
            .iter()
            .find(|(_, op)| *op == self)
            .map(|(n, _)| *n)
            .unwrap()
    }

    fn element_map(self) -> Option<fn(&Domain, &Element) -> Result<Element>> {
        Some(match self {
            Op::DexpHyp => dexp_hyp,
            Op::DexpFs => dexp_fs,
            Op::DexpHypInv => dexp_hyp_inv,
            Op::DexpFsInv => dexp_fs_inv,
            Op::GeoExpHyp => geo_exp_hyp,
            Op::GeoExpFs => geo_exp_fs,
            Op::Duality => symplectic_duality,
            Op::DualityInv => symplectic_duality_inv,
            _ => return None,
        })
    }

    fn scalar_map(self, d: &Domain, z: &Element) -> Result<f64> {
        match self {
            Op::DiastasisHyp => diastasis_hyp(d, z),
            Op::DiastasisFs => diastasis_fs(d, z),
            Op::KernelHyp => Ok(kernel_hyp(d, z)?.product),
            Op::KernelDual => Ok(kernel_dual(d, z)?.product),
            _ => unreachable!("not a scalar op"),
        }
    }
}

impl FromStr for Op {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Op::ALL
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, op)| *op)
            .ok_or_else(|| Error::Invalid(format!("unknown op `{s}`")))
    }
}

#[derive(Debug, Serialize)]
pub struct PointError {
    pub index: usize,
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct Spectrum {
    eigenvalues: Vec<Num>,
    tripotents: Vec<ElementJson>,
}

#[derive(Serialize)]
#[serde(rename_all = "lowercase")]
enum Results {
    Points(Vec<Option<ElementJson>>),
    Values(Vec<Option<Num>>),
    Spectra(Vec<Option<Spectrum>>),
}

#[derive(Serialize)]
struct EvalOutput {
    domain: String,
    op: &'static str,
    #[serde(flatten)]
    results: Results,
    errors: Vec<PointError>,
}

/// Parses a point file and checks it belongs to `d`.
pub fn load_points(d: &Domain, text: &str) -> Result<PointFile> {
    let pf = PointFile::parse(text)?;
    if &pf.domain != d {
        return Err(Error::Invalid(format!(
            "point file domain {} does not match {}",
            pf.domain, d
        )));
    }
    Ok(pf)
}

fn collect<T>(
    points: &[Element],
    errors: &mut Vec<PointError>,
    f: impl Fn(&Element) -> Result<T>,
) -> Vec<Option<T>> {
    points
        .iter()
        .enumerate()
        .map(|(index, z)| match f(z) {
            Ok(v) => Some(v),
            Err(e) => {
                errors.push(PointError {
                    index,
                    code: e.code(),
                    message: e.to_string(),
                });
                None
            }
        })
        .collect()
}

/// Evaluates `op` at every point. Failing points become `null` with an entry
/// in `errors`.
pub fn cmd_eval(d: &Domain, op: Op, points: &[Element]) -> String {
    let mut errors = Vec::new();
    let results = if let Some(map) = op.element_map() {
        Results::Points(collect(points, &mut errors, |z| {
            Ok(element_to_json(&map(d, z)?))
        }))
    } else if op == Op::Spectrum {
        Results::Spectra(collect(points, &mut errors, |z| {
            let dec = spectral_decompose(d, z, DEFAULT_CLUSTER_TOL)?;
            Ok(Spectrum {
                eigenvalues: dec.eigenvalues().iter().map(|&l| Num(l)).collect(),
                tripotents: dec.tripotents().iter().map(element_to_json).collect(),
            })
        }))
    } else {
        Results::Values(collect(points, &mut errors, |z| {
            let v = op.scalar_map(d, z)?;
            if v.is_finite() {
                Ok(Num(v))
            } else {
                Err(Error::NonFinite("result"))
            }
        }))
    };
    let out = EvalOutput {
        domain: d.to_string(),
        op: op.name(),
        results,
        errors,
    };
    let mut s = serde_json::to_string_pretty(&out).expect("eval output serializes");
    s.push('\n');
    s
}

pub const TRACE_HEADER: &str = "r,d_hyp_geo_exp,d_hyp_dexp,d_hyp,psi_norm,d_fs_psi";

/// CSV table along the ray `r·direction`, `r = r_max·i/(samples−1)`.
pub fn cmd_trace(d: &Domain, direction: &Element, r_max: f64, samples: usize) -> Result<String> {
    d.check(direction)?;
    if direction.is_zero() {
        return Err(Error::Invalid("direction must be nonzero".into()));
    }
    if samples == 0 {
        return Err(Error::Invalid("samples must be positive".into()));
    }
    let norm = spectral_norm(d, direction)?;
    if !(r_max.is_finite() && r_max > 0.0) || r_max * norm >= 1.0 {
        return Err(Error::Invalid(format!(
            "rmax must lie in (0, {}) for this direction",
            1.0 / norm
        )));
    }
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for i in 0..samples {
        let r = if samples == 1 {
            r_max
        } else {
            r_max * i as f64 / (samples - 1) as f64
        };
        let v = direction * r;
        let psi = symplectic_duality(d, &v)?;
        let row = [
            r,
            diastasis_hyp(d, &geo_exp_hyp(d, &v)?)?,
            diastasis_hyp(d, &dexp_hyp(d, &v)?)?,
            diastasis_hyp(d, &v)?,
            spectral_norm(d, &psi)?,
            diastasis_fs(d, &psi)?,
        ];
        let cells: Vec<String> = row
            .iter()
            .map(|x| format_number(*x).unwrap_or_else(|| "nan".into()))
            .collect();
        writeln!(out, "{}", cells.join(",")).expect("writing to a String");
    }
    Ok(out)
}

/// The single point of a direction file.
pub fn load_direction(d: &Domain, text: &str) -> Result<Element> {
    let pf = load_points(d, text)?;
    match <[Element; 1]>::try_from(pf.points) {
        Ok([z]) => Ok(z),
        Err(v) => Err(Error::Invalid(format!(
            "direction file must hold one point, found {}",
            v.len()
        ))),
    }
}
