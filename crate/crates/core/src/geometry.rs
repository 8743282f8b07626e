//! Kähler geometry of the bounded domain `M` and of the affine chart of its
//! compact dual: reproducing kernels, diastasis at the origin, the metric at
//! the origin, radial geodesic exponentials, diastatic exponentials and
//! numerically assembled Kähler forms.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jts::{bergman_operator, trace_form, Domain, Element};
use crate::numerics::{det_c, real_hessian, svd, CMatrix, RMatrix, C64};
use crate::spectral::{apply_to_decomposition, functional_calculus, spectral_decompose};

/// Points with spectral norm at or above `1 - BOUNDARY_MARGIN` are rejected
/// where the hyperbolic potential would blow up.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

const TAYLOR_CUTOFF: f64 = 1e-4;

/// `sgn(t) √(1 − e^{−t²})`
pub fn f_hyp(t: f64) -> f64 {
    let a = t.abs();
    let v = if a < TAYLOR_CUTOFF {
        a * (1.0 - a * a / 4.0)
    } else {
        (-(-a * a).exp_m1()).sqrt()
    };
    v.copysign(t)
}

/// Inverse of [`f_hyp`] on (−1, 1): `sgn(t) √(−log(1 − t²))`.
pub fn f_hyp_inv(t: f64) -> f64 {
    let a = t.abs();
    if a >= 1.0 {
        return f64::INFINITY.copysign(t);
    }
    (-(-a * a).ln_1p()).sqrt().copysign(t)
}

/// `sgn(t) √(e^{t²} − 1)`
pub fn f_fs(t: f64) -> f64 {
    (t * t).exp_m1().sqrt().copysign(t)
}

/// Inverse of [`f_fs`]: `sgn(t) √(log(1 + t²))`.
pub fn f_fs_inv(t: f64) -> f64 {
    (t * t).ln_1p().sqrt().copysign(t)
}

/// Per-factor and total values of a reproducing kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelValue {
    /// Determinant of the assembled Bergman operator, per factor.
    pub per_factor: Vec<f64>,
    /// The same quantity from the eigenvalue product, per factor.
    pub per_factor_spectral: Vec<f64>,
    pub product: f64,
}

fn singular_values(d: &Domain, z: &Element) -> Result<Vec<Vec<f64>>> {
    d.check(z)?;
    z.blocks()
        .iter()
        .map(|b| Ok(svd(b)?.singular_values))
        .collect()
}

fn check_interior(sv: &[Vec<f64>]) -> Result<()> {
    let norm = sv.iter().flatten().copied().fold(0.0, f64::max);
    if norm >= 1.0 - BOUNDARY_MARGIN {
        return Err(Error::Boundary {
            spectral_norm: norm,
        });
    }
    Ok(())
}

fn det_real(m: &CMatrix) -> Result<f64> {
    Ok(det_c(m)?.re)
}

/// `K_M(z, z̄) = det B(z,z)` per factor.
pub fn kernel_hyp(d: &Domain, z: &Element) -> Result<KernelValue> {
    let sv = singular_values(d, z)?;
    check_interior(&sv)?;
    let mut per_factor = Vec::new();
    let mut per_factor_spectral = Vec::new();
    for (i, f) in d.factors().iter().enumerate() {
        let di = d.factor_domain(i);
        let zi = z.factor_element(i);
        per_factor.push(det_real(&bergman_operator(&di, &zi, &zi)?.matrix)?);
        let prod: f64 = sv[i].iter().map(|s| 1.0 - s * s).product();
        per_factor_spectral.push(prod.powi(f.genus() as i32));
    }
    let product = per_factor.iter().product();
    Ok(KernelValue {
        per_factor,
        per_factor_spectral,
        product,
    })
}

/// `K_{M*}(z, z̄) = 1 / det B(z, −z)` per factor.
pub fn kernel_dual(d: &Domain, z: &Element) -> Result<KernelValue> {
    let sv = singular_values(d, z)?;
    let mut per_factor = Vec::new();
    let mut per_factor_spectral = Vec::new();
    for (i, f) in d.factors().iter().enumerate() {
        let di = d.factor_domain(i);
        let zi = z.factor_element(i);
        per_factor.push(1.0 / det_real(&bergman_operator(&di, &zi, &-&zi)?.matrix)?);
        let prod: f64 = sv[i].iter().map(|s| 1.0 + s * s).product();
        per_factor_spectral.push(prod.powi(-(f.genus() as i32)));
    }
    let product = per_factor.iter().product();
    Ok(KernelValue {
        per_factor,
        per_factor_spectral,
        product,
    })
}

/// Diastasis at the origin of the hyperbolic metric, `−Σ log(1 − λ_j²)`
/// summed over all factors.
pub fn diastasis_hyp(d: &Domain, z: &Element) -> Result<f64> {
    let sv = singular_values(d, z)?;
    check_interior(&sv)?;
    Ok(sv.iter().flatten().map(|s| -(-s * s).ln_1p()).sum())
}

/// Diastasis at the origin of the Fubini–Study metric, `Σ log(1 + λ_j²)`.
pub fn diastasis_fs(d: &Domain, z: &Element) -> Result<f64> {
    let sv = singular_values(d, z)?;
    Ok(sv.iter().flatten().map(|s| (s * s).ln_1p()).sum())
}

/// `g_0(u, v) = Σ_i (1/g_i) Re tr T(u_i, v_i)`.
pub fn metric0(d: &Domain, u: &Element, v: &Element) -> Result<f64> {
    d.check(u)?;
    d.check(v)?;
    let mut acc = 0.0;
    for (i, f) in d.factors().iter().enumerate() {
        let di = d.factor_domain(i);
        acc += trace_form(&di, &u.factor_element(i), &v.factor_element(i))?.re / f.genus() as f64;
    }
    Ok(acc)
}

/// Radial geodesic exponential of the hyperbolic metric: `tanh` of the
/// spectral decomposition.
pub fn geo_exp_hyp(d: &Domain, v: &Element) -> Result<Element> {
    functional_calculus(d, f64::tanh, v)
}

/// Radial geodesic exponential of the Fubini–Study metric in the affine chart:
/// `tan` of the spectral decomposition, defined while every eigenvalue is
/// below π/2.
pub fn geo_exp_fs(d: &Domain, v: &Element) -> Result<Element> {
    let dec = spectral_decompose(d, v, 0.0)?;
    if let Some(&top) = dec.eigenvalues().last() {
        if top >= FRAC_PI_2 {
            return Err(Error::Range {
                eigenvalue: top,
                limit: FRAC_PI_2,
            });
        }
    }
    apply_to_decomposition(d, &dec, f64::tan)
}

/// Diastatic exponential of `M`: `Σ (1 − e^{−λ_j²})^{1/2} c_j`. Always lands
/// in the open unit ball.
pub fn dexp_hyp(d: &Domain, v: &Element) -> Result<Element> {
    functional_calculus(d, f_hyp, v)
}

pub fn dexp_hyp_inv(d: &Domain, z: &Element) -> Result<Element> {
    let dec = spectral_decompose(d, z, 0.0)?;
    if dec.max() >= 1.0 - BOUNDARY_MARGIN {
        return Err(Error::Boundary {
            spectral_norm: dec.max(),
        });
    }
    apply_to_decomposition(d, &dec, f_hyp_inv)
}

/// Diastatic exponential of the dual: `Σ (e^{λ_j²} − 1)^{1/2} c_j`.
pub fn dexp_fs(d: &Domain, v: &Element) -> Result<Element> {
    functional_calculus(d, f_fs, v)
}

pub fn dexp_fs_inv(d: &Domain, w: &Element) -> Result<Element> {
    functional_calculus(d, f_fs_inv, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialKind {
    /// Diastasis of the hyperbolic metric.
    Hyp,
    /// Diastasis of the Fubini–Study metric.
    Fs,
    /// `g_0(z, z)`.
    Flat,
}

/// A Kähler potential on a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub domain: Domain,
    pub kind: PotentialKind,
}

impl PotentialField {
    pub fn new(domain: &Domain, kind: PotentialKind) -> Self {
        PotentialField {
            domain: domain.clone(),
            kind,
        }
    }

    pub fn eval(&self, z: &Element) -> Result<f64> {
        match self.kind {
            PotentialKind::Hyp => diastasis_hyp(&self.domain, z),
            PotentialKind::Fs => diastasis_fs(&self.domain, z),
            PotentialKind::Flat => metric0(&self.domain, z, z),
        }
    }

    pub fn eval_real(&self, x: &[f64]) -> Result<f64> {
        self.eval(&Element::from_real(&self.domain, x)?)
    }
}

/// `H_jk = ∂²Φ / ∂z_j ∂z̄_k` by central differences in real coordinates.
pub fn complex_hessian(phi: &PotentialField, z: &Element, h: f64) -> Result<CMatrix> {
    phi.domain.check(z)?;
    let r = real_hessian(&|x: &[f64]| phi.eval_real(x), &z.to_real(), h)?;
    Ok(complex_from_real_hessian(&r))
}

fn complex_from_real_hessian(r: &RMatrix) -> CMatrix {
    let n = r.nrows() / 2;
    CMatrix::from_fn(n, n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        C64::new(r[(xj, xk)] + r[(yj, yk)], r[(xj, yk)] - r[(yj, xk)]) * 0.25
    })
}

/// A real 2-form in coordinates `(x_1, y_1, …, x_n, y_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    pub matrix: RMatrix,
}

impl TwoForm {
    /// `Σ dx_j ∧ dy_j` on `n` complex dimensions.
    pub fn standard(n: usize) -> Self {
        let mut m = RMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            m[(2 * j, 2 * j + 1)] = 1.0;
            m[(2 * j + 1, 2 * j)] = -1.0;
        }
        TwoForm { matrix: m }
    }

    /// `(i/2) Σ H_jk dz_j ∧ dz̄_k` for a Hermitian `H`.
    pub fn from_hermitian(hess: &CMatrix) -> Self {
        let n = hess.nrows();
        let mut m = RMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let hjk = hess[(j, k)];
                m[(2 * j, 2 * k)] = -hjk.im;
                m[(2 * j, 2 * k + 1)] = hjk.re;
                m[(2 * j + 1, 2 * k)] = -hess[(k, j)].re;
                m[(2 * j + 1, 2 * k + 1)] = -hjk.im;
            }
        }
        TwoForm { matrix: m }
    }

    /// `‖M + Mᵀ‖_max`.
    pub fn antisymmetry_residual(&self) -> f64 {
        (&self.matrix + self.matrix.transpose()).abs().max()
    }

    pub fn max_abs_diff(&self, other: &TwoForm) -> f64 {
        (&self.matrix - &other.matrix).abs().max()
    }

    /// `Jᵀ ω J`.
    pub fn pullback(&self, jac: &RMatrix) -> TwoForm {
        TwoForm {
            matrix: jac.transpose() * &self.matrix * jac,
        }
    }
}

/// `ω = (i/2) ∂∂̄Φ` at `z`.
pub fn kahler_form(phi: &PotentialField, z: &Element, h: f64) -> Result<TwoForm> {
    Ok(TwoForm::from_hermitian(&complex_hessian(phi, z, h)?))
}
