//! Dense numerical kernels: complex SVD, Hermitian eigendecomposition,
//! determinants, fractional powers of Hermitian positive operators and
//! central finite differences.
//!
//! Matrices are stored as `nalgebra` matrices; the SVD and Hermitian
//! eigensolvers run through `faer`.
//!
//! Everything here is stateless and deterministic: the same input produces
//! the same bits on every call.

use faer::{Mat, MatRef, Side};
use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

/// Smallest eigenvalue accepted by [`herm_frac_power`].
pub const MIN_POSITIVE_EIGENVALUE: f64 = 1e-12;

/// Thin singular value decomposition `A = U diag(sigma) V*`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// p x r, orthonormal columns.
    pub u: CMatrix,
    /// Descending, nonnegative, length r = min(p, q).
    pub singular_values: Vec<f64>,
    /// q x r, orthonormal columns.
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let r = self.singular_values.len();
        let mut us = self.u.clone();
        for j in 0..r {
            let s = self.singular_values[j];
            us.column_mut(j).scale_mut(s);
        }
        us * self.v.adjoint()
    }
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm.
pub fn fro(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn to_faer(a: &CMatrix) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn svd(a: &CMatrix) -> Result<Svd> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("svd input"));
    }
    let (p, q) = a.shape();
    let r = p.min(q);
    if r == 0 {
        return Ok(Svd {
            u: CMatrix::zeros(p, 0),
            singular_values: Vec::new(),
            v: CMatrix::zeros(q, 0),
        });
    }
    let fail = || Error::Svd {
        rows: p,
        cols: q,
        max_abs: max_abs(a),
    };
    let dec = to_faer(a).thin_svd().map_err(|_| fail())?;
    let s = dec.S().column_vector();
    let sigma: Vec<f64> = (0..r).map(|k| s[k].re.max(0.0)).collect();
    Ok(Svd {
        u: from_faer(dec.U()),
        singular_values: sigma,
        v: from_faer(dec.V()),
    })
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
///
/// The input is symmetrized as `(H + H*)/2` first so rounding noise in the
/// anti-Hermitian part does not leak into the result.
pub fn herm_eigen(h: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !h.is_square() {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", h.nrows(), h.ncols()),
        });
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("hermitian eigendecomposition input"));
    }
    let n = h.nrows();
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Invalid("hermitian eigendecomposition did not converge".into()))?;
    let s = eig.S().column_vector();
    let vals: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    let vecs = from_faer(eig.U());
    Ok((vals, vecs))
}

/// `H^alpha = U diag(lambda^alpha) U*` for Hermitian positive definite `H`.
pub fn herm_frac_power(h: &CMatrix, alpha: f64) -> Result<CMatrix> {
    let (vals, vecs) = herm_eigen(h)?;
    if let Some(&min) = vals.first() {
        if min <= MIN_POSITIVE_EIGENVALUE {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
    }
    let mut scaled = vecs.clone();
    for (j, &lam) in vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(lam.powf(alpha));
    }
    Ok(scaled * vecs.adjoint())
}

/// LU-based determinant.
pub fn det_c(a: &CMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(Error::ShapeMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    if a.nrows() == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(a.clone().lu().determinant())
}

/// Finite-difference step sizes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FdConfig {
    pub hessian_step: f64,
    pub jacobian_step: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            hessian_step: 1e-4,
            jacobian_step: 1e-6,
        }
    }
}

impl FdConfig {
    pub fn new(hessian_step: f64, jacobian_step: f64) -> Result<Self> {
        for (name, h) in [
            ("hessian_step", hessian_step),
            ("jacobian_step", jacobian_step),
        ] {
            if !(h > 1e-10 && h < 1e-2) {
                return Err(Error::Invalid(format!("{name} = {h} not in (1e-10, 1e-2)")));
            }
        }
        Ok(FdConfig {
            hessian_step,
            jacobian_step,
        })
    }
}

/// Which derivative [`central_diff`] estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axes {
    First(usize),
    Second(usize),
    Mixed(usize, usize),
}

fn eval_shifted<F>(f: &F, x: &[f64], shifts: &[(usize, f64)], buf: &mut Vec<f64>) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    buf.clear();
    buf.extend_from_slice(x);
    for &(axis, dx) in shifts {
        buf[axis] += dx;
    }
    f(buf).map_err(|e| Error::Stencil {
        axis: shifts[0].0,
        source: Box::new(e),
    })
}

/// Second-order central difference of a scalar field on real coordinates.
///
/// Mixed partials use the four-point cross stencil.
pub fn central_diff<F>(f: &F, x: &[f64], h: f64, axes: Axes) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut buf = Vec::with_capacity(x.len());
    match axes {
        Axes::First(a) => {
            let fp = eval_shifted(f, x, &[(a, h)], &mut buf)?;
            let fm = eval_shifted(f, x, &[(a, -h)], &mut buf)?;
            Ok((fp - fm) / (2.0 * h))
        }
        Axes::Second(a) => {
            let fp = eval_shifted(f, x, &[(a, h)], &mut buf)?;
            let fm = eval_shifted(f, x, &[(a, -h)], &mut buf)?;
            let f0 = f(x).map_err(|e| Error::Stencil {
                axis: a,
                source: Box::new(e),
            })?;
            Ok((fp - 2.0 * f0 + fm) / (h * h))
        }
        Axes::Mixed(a, b) if a == b => central_diff(f, x, h, Axes::Second(a)),
        Axes::Mixed(a, b) => {
            let fpp = eval_shifted(f, x, &[(a, h), (b, h)], &mut buf)?;
            let fpm = eval_shifted(f, x, &[(a, h), (b, -h)], &mut buf)?;
            let fmp = eval_shifted(f, x, &[(a, -h), (b, h)], &mut buf)?;
            let fmm = eval_shifted(f, x, &[(a, -h), (b, -h)], &mut buf)?;
            Ok((fpp - fpm - fmp + fmm) / (4.0 * h * h))
        }
    }
}

/// Real Hessian of a scalar field by central differences; symmetric by
/// construction.
pub fn real_hessian<F>(f: &F, x: &[f64], h: f64) -> Result<RMatrix>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = x.len();
    let mut hess = RMatrix::zeros(n, n);
    let f0 = f(x).map_err(|e| Error::Stencil {
        axis: 0,
        source: Box::new(e),
    })?;
    let mut buf = Vec::with_capacity(n);
    for a in 0..n {
        let fp = eval_shifted(f, x, &[(a, h)], &mut buf)?;
        let fm = eval_shifted(f, x, &[(a, -h)], &mut buf)?;
        hess[(a, a)] = (fp - 2.0 * f0 + fm) / (h * h);
        for b in 0..a {
            let d = central_diff(f, x, h, Axes::Mixed(a, b))?;
            hess[(a, b)] = d;
            hess[(b, a)] = d;
        }
    }
    Ok(hess)
}

/// Central-difference Jacobian `J[a][b] = d map_a / d x_b` of a map between
/// real coordinate spaces.
pub fn jacobian<F>(map: &F, x: &[f64], h: f64) -> Result<RMatrix>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut buf = x.to_vec();
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n);
    for b in 0..n {
        buf[b] = x[b] + h;
        let fp = map(&buf).map_err(|e| Error::Stencil {
            axis: b,
            source: Box::new(e),
        })?;
        buf[b] = x[b] - h;
        let fm = map(&buf).map_err(|e| Error::Stencil {
            axis: b,
            source: Box::new(e),
        })?;
        buf[b] = x[b];
        if fp.len() != fm.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} outputs", fp.len()),
                found: format!("{} outputs", fm.len()),
            });
        }
        cols.push(DVector::from_iterator(
            fp.len(),
            fp.iter().zip(&fm).map(|(p, m)| (p - m) / (2.0 * h)),
        ));
    }
    let m = cols.first().map_or(0, |c| c.len());
    let mut jac = RMatrix::zeros(m, n);
    for (b, col) in cols.iter().enumerate() {
        jac.set_column(b, col);
    }
    Ok(jac)
}
