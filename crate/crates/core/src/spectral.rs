//! Spectral decomposition `z = λ₁c₁ + … + λ_s c_s` with pairwise strongly
//! orthogonal tripotents, the spectral norm, and the odd functional calculus
//! `F(z) = f(λ₁)c₁ + … + f(λ_s)c_s`.
//!
//! In a type-I factor the decomposition comes from the SVD `z = UΣV*`: each
//! cluster of equal singular values gives one eigenvalue with tripotent
//! `Σ u_i v_i*`. Eigenvalues that coincide across factors are merged.

use crate::error::{Error, Result};
use crate::jts::{t_operator, triple_product, Domain, Element};
use crate::numerics::{fro, svd, C64};

/// Singular values closer than this are one eigenvalue.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Singular values below this are treated as zero.
pub const ZERO_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    tripotents: Vec<Element>,
}

impl SpectralDecomposition {
    /// Ascending, strictly positive.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn tripotents(&self) -> &[Element] {
        &self.tripotents
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest eigenvalue, or 0 for the empty decomposition.
    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `Σ λ_j c_j`.
    pub fn reconstruct(&self, d: &Domain) -> Element {
        self.combine(d, |_, lam| lam)
    }

    /// `Σ f(λ_j) c_j` without re-decomposing.
    fn combine(&self, d: &Domain, f: impl Fn(usize, f64) -> f64) -> Element {
        let mut acc = Element::zeros(d);
        for (j, (lam, c)) in self.eigenvalues.iter().zip(&self.tripotents).enumerate() {
            acc = &acc + &(c * f(j, *lam));
        }
        acc
    }

    /// Applies `f` to every eigenvalue and returns the decomposition of the
    /// result. Negative values flip the sign of the tripotent, zeros drop out
    /// and values that collide are merged.
    pub fn map(&self, d: &Domain, f: impl Fn(f64) -> f64, cluster_tol: f64) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.len());
        for (lam, c) in self.eigenvalues.iter().zip(&self.tripotents) {
            let v = f(*lam);
            if !v.is_finite() {
                return Err(Error::Domain { eigenvalue: *lam });
            }
            if v.abs() < ZERO_CUTOFF {
                continue;
            }
            let c = if v < 0.0 { -c } else { c.clone() };
            terms.push((v.abs(), c));
        }
        Ok(merge_terms(d, terms, cluster_tol))
    }

    /// Max over j of `‖{c_j,c_j,c_j} − 2c_j‖`.
    pub fn tripotent_residual(&self, d: &Domain) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for c in &self.tripotents {
            let ccc = triple_product(d, c, c, c)?;
            worst = worst.max((&ccc - &(c * 2.0)).norm());
        }
        Ok(worst)
    }

    /// Max over i ≠ j of the Frobenius norm of the matrix of `T(c_i,c_j)`.
    pub fn orthogonality_residual(&self, d: &Domain) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, ci) in self.tripotents.iter().enumerate() {
            for (j, cj) in self.tripotents.iter().enumerate() {
                if i != j {
                    worst = worst.max(fro(&t_operator(d, ci, cj)?.matrix));
                }
            }
        }
        Ok(worst)
    }
}

fn merge_terms(
    d: &Domain,
    mut terms: Vec<(f64, Element)>,
    cluster_tol: f64,
) -> SpectralDecomposition {
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut eigenvalues: Vec<f64> = Vec::new();
    let mut tripotents: Vec<Element> = Vec::new();
    // (sum of values, count, smallest value) of the open cluster
    let mut open: Option<(f64, usize, f64, Element)> = None;
    for (v, c) in terms {
        match open.take() {
            Some((sum, n, first, acc)) if v - first <= cluster_tol => {
                open = Some((sum + v, n + 1, first, &acc + &c));
            }
            Some((sum, n, _, acc)) => {
                eigenvalues.push(sum / n as f64);
                tripotents.push(acc);
                open = Some((v, 1, v, c));
            }
            None => open = Some((v, 1, v, c)),
        }
    }
    if let Some((sum, n, _, acc)) = open {
        eigenvalues.push(sum / n as f64);
        tripotents.push(acc);
    }
    debug_assert!(tripotents.iter().all(|c| d.check(c).is_ok()));
    SpectralDecomposition {
        eigenvalues,
        tripotents,
    }
}

pub fn spectral_decompose(
    d: &Domain,
    z: &Element,
    cluster_tol: f64,
) -> Result<SpectralDecomposition> {
    d.check(z)?;
    if !(cluster_tol >= 0.0 && cluster_tol.is_finite()) {
        return Err(Error::Invalid(format!("cluster tolerance {cluster_tol}")));
    }
    let mut terms = Vec::new();
    for (i, block) in z.blocks().iter().enumerate() {
        let dec = svd(block)?;
        for (k, &sigma) in dec.singular_values.iter().enumerate() {
            if sigma < ZERO_CUTOFF {
                continue;
            }
            let mut c = Element::zeros(d);
            *c.block_mut(i) = dec.u.column(k) * dec.v.column(k).adjoint();
            terms.push((sigma, c));
        }
    }
    Ok(merge_terms(d, terms, cluster_tol))
}

/// Largest singular value over all factors.
pub fn spectral_norm(d: &Domain, z: &Element) -> Result<f64> {
    d.check(z)?;
    let mut best: f64 = 0.0;
    for block in z.blocks() {
        let dec = svd(block)?;
        best = best.max(dec.singular_values.first().copied().unwrap_or(0.0));
    }
    Ok(best)
}

/// Membership in the open unit ball of the spectral norm.
pub fn in_domain(d: &Domain, z: &Element) -> Result<bool> {
    Ok(spectral_norm(d, z)? < 1.0)
}

/// `F(z) = Σ f(λ_j) c_j` for an odd scalar function `f`.
///
/// Evaluated on the decomposition with zero cluster tolerance, so every
/// distinct singular value keeps its own value of `f`; merging nearly equal
/// values first would perturb `F` by `O(f' · tol)`.
///
/// A non-finite `f(λ_j)` is reported as [`Error::Domain`] with that
/// eigenvalue.
pub fn functional_calculus(d: &Domain, f: impl Fn(f64) -> f64, z: &Element) -> Result<Element> {
    let dec = spectral_decompose(d, z, 0.0)?;
    apply_to_decomposition(d, &dec, f)
}

pub fn apply_to_decomposition(
    d: &Domain,
    dec: &SpectralDecomposition,
    f: impl Fn(f64) -> f64,
) -> Result<Element> {
    for &lam in dec.eigenvalues() {
        if !f(lam).is_finite() {
            return Err(Error::Domain { eigenvalue: lam });
        }
    }
    Ok(dec.combine(d, |_, lam| f(lam)))
}

/// `Σ a_k z^(2k+1)` for the odd polynomial with coefficients `a`.
pub fn odd_series(d: &Domain, coeffs: &[f64], z: &Element) -> Result<Element> {
    d.check(z)?;
    let mut acc = Element::zeros(d);
    let mut power = z.clone();
    for (k, &a) in coeffs.iter().enumerate() {
        if k > 0 {
            power = crate::jts::q_apply(d, z, &power)?;
        }
        acc = &acc + &power.scale(C64::new(a, 0.0));
    }
    Ok(acc)
}
