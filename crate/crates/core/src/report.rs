//! The verification suite behind `hpjts verify`.
//!
//! Every check sweeps random sample points (or a fixed probe) through one of
//! the library identities and records the largest error it saw. Samples are
//! drawn from per-check, per-index RNG streams and aggregated in index order,
//! so the report is independent of the worker count.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::duality::{
    f_psi, f_psi_inv, jacobian, kernel_transfer_check, pullback_2form, symplectic_duality,
    symplectic_duality_bergman, symplectic_duality_inv,
};
use crate::error::{Error, Result};
use crate::geometry::{
    dexp_fs, dexp_fs_inv, dexp_hyp, dexp_hyp_inv, diastasis_fs, diastasis_hyp, f_fs, f_fs_inv,
    f_hyp, f_hyp_inv, geo_exp_fs, geo_exp_hyp, kahler_form, kernel_hyp, metric0, PotentialField,
    PotentialKind, TwoForm,
};
use crate::io::Num;
use crate::jts::{
    bergman_factorized, bergman_operator, genus, jordan_identity_residual, q_operator, trace_form,
    Domain, Element,
};
use crate::numerics::{herm_eigen, CMatrix, FdConfig, RMatrix, C64};
use crate::sampling::{sample_direction, sample_element, sample_rng};
use crate::spectral::{
    functional_calculus, odd_series, spectral_decompose, SpectralDecomposition, DEFAULT_CLUSTER_TOL,
};

/// Radius for sample points inside the domain.
pub const DOMAIN_RADIUS: f64 = 0.95;
/// Radius for the finite-difference pullback checks.
pub const PULLBACK_RADIUS: f64 = 0.8;
/// Largest eigenvalue of sampled tangent vectors.
pub const TANGENT_RADIUS: f64 = 2.0;
/// Sample-count cap for the finite-difference checks.
pub const FD_SAMPLE_CAP: usize = 100;
/// Number of fixed directions in the quartic-decay check.
pub const DECAY_DIRECTIONS: usize = 20;
/// Lower bound on the Cauchy–Riemann residual of the hyperbolic diastatic
/// exponential at `0.5·E₁₁`.
pub const NON_HOLOMORPHY_THRESHOLD: f64 = 1e-3;

/// Truncated odd Taylor series of `tanh` through degree 9.
pub const TANH_SERIES: [f64; 5] = [1.0, -1.0 / 3.0, 2.0 / 15.0, -17.0 / 315.0, 62.0 / 2835.0];

/// Stable check names with their default tolerances, in report order.
pub const CHECKS: &[(&str, f64)] = &[
    ("algebra.jordan_identity", 1e-10),
    ("algebra.trace_form_positive", 1e-10),
    ("algebra.bergman_factorized", 1e-12),
    ("algebra.genus", 1e-10),
    ("algebra.qq_complex_linear", 1e-12),
    ("spectral.reconstruction", 1e-10),
    ("spectral.frame_preservation", 1e-8),
    ("spectral.series_agreement", 1e-9),
    ("spectral.tripotent_residual", 1e-10),
    ("spectral.orthogonality_residual", 1e-10),
    ("spectral.bergman_eigen", 1e-9),
    ("spectral.trace_metric", 1e-9),
    ("geometry.diastatic_identity_hyp", 1e-9),
    ("geometry.diastatic_identity_fs", 1e-9),
    ("geometry.identity_differential_hyp", 1e-6),
    ("geometry.identity_differential_fs", 1e-6),
    ("geometry.kernel_eigenvalue_consistency", 1e-9),
    ("geometry.dexp_hyp_roundtrip", 1e-9),
    ("geometry.dexp_fs_roundtrip", 1e-9),
    ("geometry.geodesic_quartic_decay", 1.0),
    ("geometry.non_holomorphy", 1.0),
    ("geometry.frame_preservation", 1e-8),
    ("geometry.polydisk_restriction", 1e-12),
    ("duality.composition_identity", 1e-10),
    ("duality.route_agreement", 1e-9),
    ("duality.bijectivity", 1e-9),
    ("duality.symplectomorphism_fs", 1e-5),
    ("duality.symplectomorphism_hyp", 1e-5),
    ("duality.kernel_transfer", 1e-9),
    ("duality.subblock_restriction", 1e-12),
];

pub fn default_tolerance(name: &str) -> Option<f64> {
    CHECKS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub domain: Domain,
    pub samples: usize,
    pub seed: u64,
    pub threads: usize,
    pub fd: FdConfig,
    tolerances: BTreeMap<String, f64>,
}

impl VerifyConfig {
    pub fn new(domain: Domain, samples: usize, seed: u64) -> Self {
        VerifyConfig {
            domain,
            samples,
            seed,
            threads: 1,
            fd: FdConfig::default(),
            tolerances: BTreeMap::new(),
        }
    }

    /// Overrides the tolerance of a named check.
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<()> {
        if default_tolerance(name).is_none() {
            return Err(Error::Invalid(format!("unknown check `{name}`")));
        }
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Invalid(format!(
                "tolerance for `{name}` must be finite and >= 0"
            )));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances
            .get(name)
            .copied()
            .or_else(|| default_tolerance(name))
            .expect("known check")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub samples: usize,
    pub max_abs_error: Num,
    pub tolerance: Num,
    pub pass: bool,
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FdEcho {
    pub hessian_step: Num,
    pub jacobian_step: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub tool: String,
    pub version: String,
    pub domain: String,
    pub seed: u64,
    pub sample_count: usize,
    pub cluster_tol: Num,
    pub fd: FdEcho,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Ctx<'a> {
    d: &'a Domain,
    seed: u64,
    stream: u64,
    fd: FdConfig,
}

impl Ctx<'_> {
    /// Max of `f` over `n` samples; the first failing index wins.
    fn sweep<F>(&self, n: usize, f: F) -> Result<f64>
    where
        F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
    {
        let results: Vec<Result<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(self.seed, (self.stream << 32) | i as u64);
                f(&mut rng)
            })
            .collect();
        let mut worst: f64 = 0.0;
        for r in results {
            let e = r?;
            worst = if e.is_nan() {
                f64::INFINITY
            } else {
                worst.max(e)
            };
        }
        Ok(worst)
    }

    fn point(&self, rng: &mut ChaCha8Rng, r: f64) -> Element {
        sample_element(self.d, rng, r)
    }

    fn direction(&self, rng: &mut ChaCha8Rng) -> Element {
        sample_direction(self.d, rng)
    }
}

fn rel(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

/// Largest eigenvalue/tripotent mismatch between two decompositions, or
/// infinity if their cluster structure differs.
pub fn frame_distance(a: &SpectralDecomposition, b: &SpectralDecomposition) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for j in 0..a.len() {
        worst = worst.max((a.eigenvalues()[j] - b.eigenvalues()[j]).abs());
        worst = worst.max((&a.tripotents()[j] - &b.tripotents()[j]).norm());
    }
    worst
}

/// `Σ_k f(|z_k|) z_k / |z_k|` on the diagonal of every block.
fn diagonal_map(z: &Element, f: impl Fn(f64) -> f64) -> Element {
    let blocks = z
        .blocks()
        .iter()
        .map(|b| {
            let mut out = CMatrix::zeros(b.nrows(), b.ncols());
            for k in 0..b.nrows().min(b.ncols()) {
                let v = b[(k, k)];
                let r = v.norm();
                if r > 0.0 {
                    out[(k, k)] = v * (f(r) / r);
                }
            }
            out
        })
        .collect();
    Element::from_blocks_unchecked(blocks)
}

fn random_diagonal(d: &Domain, rng: &mut ChaCha8Rng, r_max: f64) -> Element {
    let mut z = Element::zeros(d);
    for (i, f) in d.factors().iter().enumerate() {
        for k in 0..f.rank() {
            let r = rng.random::<f64>() * r_max;
            let th = rng.random::<f64>() * std::f64::consts::TAU;
            z.block_mut(i)[(k, k)] = C64::from_polar(r, th);
        }
    }
    z
}

/// Max modulus of `∂F/∂z̄_j` read off a real Jacobian.
pub fn cauchy_riemann_residual(jac: &RMatrix) -> f64 {
    let n = jac.ncols() / 2;
    let m = jac.nrows() / 2;
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for j in 0..n {
            let dx = C64::new(jac[(2 * a, 2 * j)], jac[(2 * a + 1, 2 * j)]);
            let dy = C64::new(jac[(2 * a, 2 * j + 1)], jac[(2 * a + 1, 2 * j + 1)]);
            worst = worst.max(((dx + C64::i() * dy) * 0.5).norm());
        }
    }
    worst
}

/// `|D_hyp(Exp_geo(v)) − g_0(v,v)|` along `r·dir`.
pub fn geodesic_diastasis_error(d: &Domain, dir: &Element, r: f64) -> Result<f64> {
    let v = dir * r;
    Ok((diastasis_hyp(d, &geo_exp_hyp(d, &v)?)? - metric0(d, &v, &v)?).abs())
}

fn run_check(name: &str, ctx: &Ctx, samples: usize) -> Result<(usize, f64)> {
    let d = ctx.d;
    let n = samples;
    let n_fd = samples.min(FD_SAMPLE_CAP);
    let once = usize::from(samples > 0);
    let err = match name {
        "algebra.jordan_identity" => ctx.sweep(n, |rng| {
            let e: Vec<Element> = (0..5).map(|_| ctx.direction(rng)).collect();
            jordan_identity_residual(d, &e[0], &e[1], &e[2], &e[3], &e[4])
        })?,
        "algebra.trace_form_positive" => {
            let sampled = ctx.sweep(n, |rng| {
                let (u, v) = (ctx.direction(rng), ctx.direction(rng));
                let herm = (trace_form(d, &u, &v)? - trace_form(d, &v, &u)?.conj()).norm();
                let uu = trace_form(d, &u, &u)?;
                Ok(if uu.re > 0.0 {
                    herm.max(uu.im.abs())
                } else {
                    f64::INFINITY
                })
            })?;
            let gram_err = if once == 1 {
                let m = d.total_dim();
                let basis: Vec<Element> = (0..m).map(|k| Element::basis(d, k)).collect();
                let mut gram = CMatrix::zeros(m, m);
                for k in 0..m {
                    for l in 0..m {
                        gram[(k, l)] = trace_form(d, &basis[k], &basis[l])?;
                    }
                }
                let herm = (&gram - gram.adjoint())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                let (vals, _) = herm_eigen(&gram)?;
                if vals[0] > 0.0 {
                    herm
                } else {
                    f64::INFINITY
                }
            } else {
                0.0
            };
            sampled.max(gram_err)
        }
        "algebra.bergman_factorized" => ctx.sweep(n, |rng| {
            let (x, y, w) = (
                ctx.point(rng, DOMAIN_RADIUS),
                ctx.point(rng, DOMAIN_RADIUS),
                ctx.direction(rng),
            );
            let lhs = bergman_operator(d, &x, &y)?.apply(&w);
            Ok((&lhs - &bergman_factorized(d, &x, &y, &w)?).norm())
        })?,
        "algebra.genus" => {
            let mut worst: f64 = 0.0;
            if once == 1 {
                for (i, g) in genus(d).into_iter().enumerate() {
                    let c = Element::unit(d, i, 0, 0);
                    worst = worst.max((trace_form(d, &c, &c)? - C64::new(g as f64, 0.0)).norm());
                }
            }
            worst
        }
        "algebra.qq_complex_linear" => ctx.sweep(n, |rng| {
            let (x, y, w) = (
                ctx.point(rng, DOMAIN_RADIUS),
                ctx.point(rng, DOMAIN_RADIUS),
                ctx.direction(rng),
            );
            let alpha = C64::new(
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            );
            let qq = q_operator(d, &x)?.compose(&q_operator(d, &y)?);
            Ok((&qq.apply(&w.scale(alpha)) - &qq.apply(&w).scale(alpha)).norm())
        })?,
        "spectral.reconstruction" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, TANGENT_RADIUS);
            let dec = spectral_decompose(d, &z, DEFAULT_CLUSTER_TOL)?;
            Ok(rel((&dec.reconstruct(d) - &z).norm(), z.norm()))
        })?,
        "spectral.frame_preservation" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, TANGENT_RADIUS);
            let f = |t: f64| t + t * t * t;
            let expected =
                spectral_decompose(d, &z, DEFAULT_CLUSTER_TOL)?.map(d, f, DEFAULT_CLUSTER_TOL)?;
            let image = functional_calculus(d, f, &z)?;
            Ok(frame_distance(
                &expected,
                &spectral_decompose(d, &image, DEFAULT_CLUSTER_TOL)?,
            ))
        })?,
        "spectral.series_agreement" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, 0.2);
            Ok(
                (&odd_series(d, &TANH_SERIES, &z)? - &functional_calculus(d, f64::tanh, &z)?)
                    .norm(),
            )
        })?,
        "spectral.tripotent_residual" => ctx.sweep(n, |rng| {
            spectral_decompose(d, &ctx.point(rng, TANGENT_RADIUS), DEFAULT_CLUSTER_TOL)?
                .tripotent_residual(d)
        })?,
        "spectral.orthogonality_residual" => ctx.sweep(n, |rng| {
            spectral_decompose(d, &ctx.point(rng, TANGENT_RADIUS), DEFAULT_CLUSTER_TOL)?
                .orthogonality_residual(d)
        })?,
        "spectral.bergman_eigen" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, DOMAIN_RADIUS);
            let b = bergman_operator(d, &z, &z)?;
            let dec = spectral_decompose(d, &z, DEFAULT_CLUSTER_TOL)?;
            let mut worst: f64 = 0.0;
            for (lam, c) in dec.eigenvalues().iter().zip(dec.tripotents()) {
                let expected = c * (1.0 - lam * lam).powi(2);
                worst = worst.max(rel((&b.apply(c) - &expected).norm(), c.norm()));
            }
            Ok(worst)
        })?,
        "spectral.trace_metric" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, TANGENT_RADIUS);
            let dec = spectral_decompose(d, &z, DEFAULT_CLUSTER_TOL)?;
            // each tripotent contributes its rank times λ²
            let sum: f64 = dec
                .eigenvalues()
                .iter()
                .zip(dec.tripotents())
                .map(|(l, c)| l * l * c.norm().powi(2))
                .sum();
            Ok(rel((metric0(d, &z, &z)? - sum).abs(), sum))
        })?,
        "geometry.diastatic_identity_hyp" => ctx.sweep(n, |rng| {
            let v = ctx.point(rng, TANGENT_RADIUS);
            Ok((diastasis_hyp(d, &dexp_hyp(d, &v)?)? - metric0(d, &v, &v)?).abs())
        })?,
        "geometry.diastatic_identity_fs" => ctx.sweep(n, |rng| {
            let v = ctx.point(rng, TANGENT_RADIUS);
            Ok((diastasis_fs(d, &dexp_fs(d, &v)?)? - metric0(d, &v, &v)?).abs())
        })?,
        "geometry.identity_differential_hyp" | "geometry.identity_differential_fs" => {
            if once == 1 {
                let zero = Element::zeros(d);
                let jac = if name.ends_with("hyp") {
                    jacobian(d, |v| dexp_hyp(d, v), &zero, ctx.fd.jacobian_step)?
                } else {
                    jacobian(d, |v| dexp_fs(d, v), &zero, ctx.fd.jacobian_step)?
                };
                let m = jac.nrows();
                (jac - RMatrix::identity(m, m)).abs().max()
            } else {
                0.0
            }
        }
        "geometry.kernel_eigenvalue_consistency" => ctx.sweep(n, |rng| {
            let k = kernel_hyp(d, &ctx.point(rng, DOMAIN_RADIUS))?;
            Ok(k.per_factor
                .iter()
                .zip(&k.per_factor_spectral)
                .map(|(a, b)| rel((a - b).abs(), b.abs()))
                .fold(0.0, f64::max))
        })?,
        "geometry.dexp_hyp_roundtrip" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, DOMAIN_RADIUS);
            let v = ctx.point(rng, TANGENT_RADIUS);
            let a = (&dexp_hyp(d, &dexp_hyp_inv(d, &z)?)? - &z).norm();
            let b = (&dexp_hyp_inv(d, &dexp_hyp(d, &v)?)? - &v).norm();
            Ok(a.max(b))
        })?,
        "geometry.dexp_fs_roundtrip" => ctx.sweep(n, |rng| {
            let w = ctx.point(rng, TANGENT_RADIUS);
            let v = ctx.point(rng, TANGENT_RADIUS);
            let a = (&dexp_fs(d, &dexp_fs_inv(d, &w)?)? - &w).norm();
            let b = (&dexp_fs_inv(d, &dexp_fs(d, &v)?)? - &v).norm();
            Ok(a.max(b))
        })?,
        "geometry.geodesic_quartic_decay" => {
            let dirs = samples.min(DECAY_DIRECTIONS);
            let worst = ctx.sweep(dirs, |rng| {
                let dir = ctx.direction(rng);
                let mut ratio: f64 = 0.0;
                for r in [0.2, 0.1] {
                    let big = geodesic_diastasis_error(d, &dir, r)?;
                    let small = geodesic_diastasis_error(d, &dir, r / 2.0)?;
                    ratio = ratio.max(8.0 * small / big);
                }
                Ok(ratio)
            })?;
            return Ok((dirs, worst));
        }
        "geometry.non_holomorphy" => {
            if once == 1 {
                let v = &Element::unit(d, 0, 0, 0) * 0.5;
                let jac = jacobian(d, |x| dexp_hyp(d, x), &v, ctx.fd.jacobian_step)?;
                NON_HOLOMORPHY_THRESHOLD / cauchy_riemann_residual(&jac)
            } else {
                0.0
            }
        }
        "geometry.frame_preservation" => ctx.sweep(n, |rng| {
            let v = ctx.point(rng, TANGENT_RADIUS);
            let expected = spectral_decompose(d, &v, DEFAULT_CLUSTER_TOL)?.map(
                d,
                f_hyp,
                DEFAULT_CLUSTER_TOL,
            )?;
            let image = spectral_decompose(d, &dexp_hyp(d, &v)?, DEFAULT_CLUSTER_TOL)?;
            Ok(frame_distance(&expected, &image))
        })?,
        "geometry.polydisk_restriction" => ctx.sweep(n, |rng| {
            let z = random_diagonal(d, rng, 0.9);
            let cases: [(Element, Element); 8] = [
                (dexp_hyp(d, &z)?, diagonal_map(&z, f_hyp)),
                (dexp_fs(d, &z)?, diagonal_map(&z, f_fs)),
                (geo_exp_hyp(d, &z)?, diagonal_map(&z, f64::tanh)),
                (geo_exp_fs(d, &z)?, diagonal_map(&z, f64::tan)),
                (dexp_hyp_inv(d, &z)?, diagonal_map(&z, f_hyp_inv)),
                (dexp_fs_inv(d, &z)?, diagonal_map(&z, f_fs_inv)),
                (symplectic_duality(d, &z)?, diagonal_map(&z, f_psi)),
                (symplectic_duality_inv(d, &z)?, diagonal_map(&z, f_psi_inv)),
            ];
            Ok(cases
                .iter()
                .map(|(a, b)| (a - b).max_abs())
                .fold(0.0, f64::max))
        })?,
        "duality.composition_identity" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, DOMAIN_RADIUS);
            Ok((&symplectic_duality(d, &z)? - &dexp_fs(d, &dexp_hyp_inv(d, &z)?)?).norm())
        })?,
        "duality.route_agreement" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, DOMAIN_RADIUS);
            Ok((&symplectic_duality(d, &z)? - &symplectic_duality_bergman(d, &z)?).norm())
        })?,
        "duality.bijectivity" => ctx.sweep(n, |rng| {
            let z = ctx.point(rng, DOMAIN_RADIUS);
            let w = ctx.point(rng, TANGENT_RADIUS);
            let a = (&symplectic_duality_inv(d, &symplectic_duality(d, &z)?)? - &z).norm();
            let b = (&symplectic_duality(d, &symplectic_duality_inv(d, &w)?)? - &w).norm();
            Ok(a.max(b))
        })?,
        "duality.symplectomorphism_fs" => {
            let fs = PotentialField::new(d, PotentialKind::Fs);
            let flat = TwoForm::standard(d.total_dim());
            let worst = ctx.sweep(n_fd, |rng| {
                let z = ctx.point(rng, PULLBACK_RADIUS);
                let pulled = pullback_2form(d, |x| symplectic_duality(d, x), &fs, &z, ctx.fd)?;
                Ok(pulled.max_abs_diff(&flat))
            })?;
            return Ok((n_fd, worst));
        }
        "duality.symplectomorphism_hyp" => {
            let flat = PotentialField::new(d, PotentialKind::Flat);
            let hyp = PotentialField::new(d, PotentialKind::Hyp);
            let worst = ctx.sweep(n_fd, |rng| {
                let z = ctx.point(rng, PULLBACK_RADIUS);
                let pulled = pullback_2form(d, |x| symplectic_duality(d, x), &flat, &z, ctx.fd)?;
                Ok(pulled.max_abs_diff(&kahler_form(&hyp, &z, ctx.fd.hessian_step)?))
            })?;
            return Ok((n_fd, worst));
        }
        "duality.kernel_transfer" => ctx.sweep(n, |rng| {
            Ok(kernel_transfer_check(d, &ctx.point(rng, DOMAIN_RADIUS))?.max())
        })?,
        "duality.subblock_restriction" => {
            let disk = Domain::complex_hyperbolic(1)?;
            ctx.sweep(n, |rng| {
                let s = C64::from_polar(
                    rng.random::<f64>() * 0.9,
                    rng.random::<f64>() * std::f64::consts::TAU,
                );
                let mut z = Element::zeros(d);
                z.block_mut(0)[(0, 0)] = s;
                let zs = Element::from_vec(&disk, &[s])?;
                let embed = |w: &Element| {
                    let mut out = Element::zeros(d);
                    out.block_mut(0)[(0, 0)] = w.block(0)[(0, 0)];
                    out
                };
                let pairs = [
                    (
                        symplectic_duality(d, &z)?,
                        embed(&symplectic_duality(&disk, &zs)?),
                    ),
                    (dexp_hyp(d, &z)?, embed(&dexp_hyp(&disk, &zs)?)),
                    (dexp_fs(d, &z)?, embed(&dexp_fs(&disk, &zs)?)),
                ];
                Ok(pairs
                    .iter()
                    .map(|(a, b)| (a - b).max_abs())
                    .fold(0.0, f64::max))
            })?
        }
        other => return Err(Error::Invalid(format!("unknown check `{other}`"))),
    };
    let count = match name {
        "algebra.genus"
        | "geometry.identity_differential_hyp"
        | "geometry.identity_differential_fs"
        | "geometry.non_holomorphy" => once,
        _ => n,
    };
    Ok((count, err))
}

/// Runs every check on the configured domain.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerificationReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let checks = pool.install(|| {
        CHECKS
            .iter()
            .enumerate()
            .map(|(idx, (name, _))| {
                let ctx = Ctx {
                    d: &cfg.domain,
                    seed: cfg.seed,
                    stream: idx as u64,
                    fd: cfg.fd,
                };
                let tolerance = cfg.tolerance(name);
                match run_check(name, &ctx, cfg.samples) {
                    Ok((samples, err)) => CheckResult {
                        name: name.to_string(),
                        samples,
                        max_abs_error: Num(err),
                        tolerance: Num(tolerance),
                        pass: err <= tolerance,
                        skipped: samples == 0,
                        error: None,
                    },
                    Err(e) => CheckResult {
                        name: name.to_string(),
                        samples: cfg.samples,
                        max_abs_error: Num(f64::INFINITY),
                        tolerance: Num(tolerance),
                        pass: false,
                        skipped: false,
                        error: Some(format!("{}: {e}", e.code())),
                    },
                }
            })
            .collect::<Vec<_>>()
    });
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        tool: "hpjts".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        domain: cfg.domain.to_string(),
        seed: cfg.seed,
        sample_count: cfg.samples,
        cluster_tol: Num(DEFAULT_CLUSTER_TOL),
        fd: FdEcho {
            hessian_step: Num(cfg.fd.hessian_step),
            jacobian_step: Num(cfg.fd.jacobian_step),
        },
        checks,
        all_pass,
    })
}
