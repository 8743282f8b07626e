//! Random sample points, uniform in the spectral frame.
//!
//! Every sample draws from its own ChaCha stream keyed by `(seed, index)` so a
//! sweep gives the same points regardless of how it is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::jts::{Domain, Element};
use crate::numerics::{CMatrix, C64};

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix, with the phases of `R`'s diagonal folded back into `Q`.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Eigenvalues of a sampled element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spectrum {
    /// Independent, uniform in `[0, r_max]`.
    Uniform,
    /// All eigenvalues equal to a single uniform draw.
    AllEqual,
    /// Uniform, then two of them forced equal.
    OneTie,
}

/// Random element `Σ_i U_i diag(σ_i) V_i*` per factor with eigenvalues in
/// `[0, r_max]`. One sample in four has all eigenvalues equal and one in four
/// has a tie, so clustered spectra are exercised on purpose.
pub fn sample_element(d: &Domain, rng: &mut impl Rng, r_max: f64) -> Element {
    let kind = match rng.random_range(0..4u8) {
        0 => Spectrum::AllEqual,
        1 => Spectrum::OneTie,
        _ => Spectrum::Uniform,
    };
    sample_element_with(d, rng, r_max, kind)
}

pub fn sample_element_with(d: &Domain, rng: &mut impl Rng, r_max: f64, kind: Spectrum) -> Element {
    let total_rank = d.rank();
    let mut sigma: Vec<f64> = (0..total_rank)
        .map(|_| rng.random::<f64>() * r_max)
        .collect();
    match kind {
        Spectrum::Uniform => {}
        Spectrum::AllEqual => {
            let v = sigma[0];
            sigma.iter_mut().for_each(|s| *s = v);
        }
        Spectrum::OneTie if total_rank >= 2 => {
            let a = rng.random_range(0..total_rank);
            let mut b = rng.random_range(0..total_rank - 1);
            if b >= a {
                b += 1;
            }
            sigma[b] = sigma[a];
        }
        Spectrum::OneTie => {}
    }
    let mut z = Element::zeros(d);
    let mut next = sigma.into_iter();
    for (i, f) in d.factors().iter().enumerate() {
        let u = random_unitary(f.p(), rng);
        let v = random_unitary(f.q(), rng);
        let mut block = CMatrix::zeros(f.p(), f.q());
        for k in 0..f.rank() {
            let s = next.next().unwrap_or(0.0);
            block += u.column(k) * v.column(k).adjoint() * C64::new(s, 0.0);
        }
        *z.block_mut(i) = block;
    }
    z
}

/// Unit-norm direction with i.i.d. complex Gaussian coordinates.
pub fn sample_direction(d: &Domain, rng: &mut impl Rng) -> Element {
    let v: Vec<C64> = (0..d.total_dim()).map(|_| gaussian(rng)).collect();
    let z = Element::from_vec(d, &v).expect("gaussian coordinates are finite");
    let n = z.norm();
    &z * (1.0 / n)
}
