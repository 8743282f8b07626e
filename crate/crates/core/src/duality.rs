//! The symplectic duality map `Ψ(z) = B(z,z)^{-1/4} z` from the bounded
//! domain onto the affine chart of its compact dual, its inverse, and the
//! finite-difference machinery used to check that it pulls `ω^FS` back to the
//! flat form and the flat form back to `ω^hyp`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    diastasis_fs, diastasis_hyp, kahler_form, kernel_dual, kernel_hyp, PotentialField, TwoForm,
    BOUNDARY_MARGIN,
};
use crate::jts::{bergman_operator, Domain, Element};
use crate::numerics::{self, herm_frac_power, FdConfig, RMatrix};
use crate::spectral::{
    apply_to_decomposition, functional_calculus, spectral_decompose, spectral_norm,
};

/// `t / √(1 − t²)`
pub fn f_psi(t: f64) -> f64 {
    t / ((1.0 - t) * (1.0 + t)).sqrt()
}

/// `μ / √(1 + μ²)`, the inverse of [`f_psi`].
pub fn f_psi_inv(mu: f64) -> f64 {
    mu / mu.hypot(1.0)
}

/// `Ψ(z) = Σ λ_j (1 − λ_j²)^{-1/2} c_j`.
pub fn symplectic_duality(d: &Domain, z: &Element) -> Result<Element> {
    let dec = spectral_decompose(d, z, 0.0)?;
    if dec.max() >= 1.0 - BOUNDARY_MARGIN {
        return Err(Error::Boundary {
            spectral_norm: dec.max(),
        });
    }
    apply_to_decomposition(d, &dec, f_psi)
}

/// `Ψ(z)` through the Hermitian positive power `B(z,z)^{-1/4}` of the
/// assembled Bergman operator.
pub fn symplectic_duality_bergman(d: &Domain, z: &Element) -> Result<Element> {
    let norm = spectral_norm(d, z)?;
    if norm >= 1.0 - BOUNDARY_MARGIN {
        return Err(Error::Boundary {
            spectral_norm: norm,
        });
    }
    let b = bergman_operator(d, z, z)?;
    let power = herm_frac_power(&b.matrix, -0.25).map_err(|e| match e {
        Error::NotPositive { .. } => Error::Boundary {
            spectral_norm: norm,
        },
        other => other,
    })?;
    Ok(z.like((power * z.to_dvector()).as_slice()))
}

/// `Ψ⁻¹(w) = Σ μ_j (1 + μ_j²)^{-1/2} c_j`, defined on the whole chart.
pub fn symplectic_duality_inv(d: &Domain, w: &Element) -> Result<Element> {
    functional_calculus(d, f_psi_inv, w)
}

/// Central-difference Jacobian of an element-valued map in real coordinates
/// `(x_1, y_1, …)`.
pub fn jacobian<F>(d: &Domain, map: F, z: &Element, h: f64) -> Result<RMatrix>
where
    F: Fn(&Element) -> Result<Element>,
{
    d.check(z)?;
    let real_map = |x: &[f64]| -> Result<Vec<f64>> {
        let e = Element::from_real(d, x)?;
        Ok(map(&e)?.to_real())
    };
    numerics::jacobian(&real_map, &z.to_real(), h)
}

/// `Jᵀ ω(map(z)) J` with `ω = (i/2)∂∂̄Φ` for the potential of `form_field`.
pub fn pullback_2form<F>(
    d: &Domain,
    map: F,
    form_field: &PotentialField,
    z: &Element,
    fd: FdConfig,
) -> Result<TwoForm>
where
    F: Fn(&Element) -> Result<Element>,
{
    let image = map(z)?;
    let jac = jacobian(d, &map, z, fd.jacobian_step)?;
    let omega = kahler_form(form_field, &image, fd.hessian_step)?;
    Ok(omega.pullback(&jac))
}

/// Residuals of `K_{M*} ∘ Ψ = K_M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelTransfer {
    /// `|D_fs(Ψ(z)) − D_hyp(z)|`
    pub diastasis: f64,
    /// Per irreducible factor, `|K_{M*}(Ψ(z)) − K_M(z)| / K_M(z)`.
    pub kernel_relative: Vec<f64>,
}

impl KernelTransfer {
    pub fn max(&self) -> f64 {
        self.kernel_relative
            .iter()
            .copied()
            .fold(self.diastasis, f64::max)
    }
}

pub fn kernel_transfer_check(d: &Domain, z: &Element) -> Result<KernelTransfer> {
    let w = symplectic_duality(d, z)?;
    let diastasis = (diastasis_fs(d, &w)? - diastasis_hyp(d, z)?).abs();
    let dual = kernel_dual(d, &w)?;
    let hyp = kernel_hyp(d, z)?;
    let kernel_relative = dual
        .per_factor
        .iter()
        .zip(&hyp.per_factor)
        .map(|(a, b)| (a - b).abs() / b.abs())
        .collect();
    Ok(KernelTransfer {
        diastasis,
        kernel_relative,
    })
}
