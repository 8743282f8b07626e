use hpjts::duality::{symplectic_duality, symplectic_duality_bergman, symplectic_duality_inv};
use hpjts::geometry::{
    dexp_fs, dexp_hyp, diastasis_fs, diastasis_hyp, kahler_form, metric0, PotentialField,
    PotentialKind,
};
use hpjts::jts::{bergman_operator, jordan_identity_residual, trace_form};
use hpjts::numerics::{herm_eigen, herm_frac_power, svd, CMatrix, C64};
use hpjts::report::geodesic_diastasis_error;
use hpjts::sampling::{sample_direction, sample_element, sample_rng};
use hpjts::spectral::{spectral_decompose, spectral_norm, DEFAULT_CLUSTER_TOL};
use hpjts::{Domain, Element};
use proptest::prelude::*;

fn domains() -> Vec<Domain> {
    [
        "type1:1,1",
        "type1:1,3",
        "type1:2,2",
        "type1:2,3",
        "type1:3,3",
        "product:type1:1,1;type1:1,1;type1:1,1",
        "product:type1:2,1;type1:1,2",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

fn domain() -> impl Strategy<Value = Domain> {
    proptest::sample::select(domains())
}

fn matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let d = Domain::type1(rows, cols).unwrap();
    sample_direction(&d, &mut sample_rng(seed, 0))
        .into_blocks()
        .remove(0)
}

#[test]
fn jordan_identity_holds_on_random_tuples() {
    for d in domains() {
        for i in 0..200 {
            let mut rng = sample_rng(11, i);
            let e: Vec<Element> = (0..5).map(|_| sample_direction(&d, &mut rng)).collect();
            let r = jordan_identity_residual(&d, &e[0], &e[1], &e[2], &e[3], &e[4]).unwrap();
            assert!(r < 1e-12, "{d}: {r}");
        }
    }
}

#[test]
fn trace_form_gram_is_positive_definite() {
    for d in domains() {
        let n = d.total_dim();
        let gram = CMatrix::from_fn(n, n, |k, l| {
            trace_form(&d, &Element::basis(&d, k), &Element::basis(&d, l)).unwrap()
        });
        assert!((&gram - gram.adjoint()).norm() < 1e-14);
        let (vals, _) = herm_eigen(&gram).unwrap();
        assert!(vals[0] > 0.0, "{d}");
    }
}

#[test]
fn decompositions_are_orthogonal_frames() {
    for d in domains() {
        for i in 0..100 {
            let z = sample_element(&d, &mut sample_rng(12, i), 2.0);
            let dec = spectral_decompose(&d, &z, DEFAULT_CLUSTER_TOL).unwrap();
            assert!(dec.tripotent_residual(&d).unwrap() < 1e-12);
            assert!(dec.orthogonality_residual(&d).unwrap() < 1e-12);
            assert!(dec.len() <= d.rank());
            assert!(dec.eigenvalues().windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn bergman_operator_eigenvalues() {
    for d in domains() {
        for i in 0..100 {
            let z = sample_element(&d, &mut sample_rng(13, i), 0.95);
            let b = bergman_operator(&d, &z, &z).unwrap();
            let dec = spectral_decompose(&d, &z, DEFAULT_CLUSTER_TOL).unwrap();
            for (l, c) in dec.eigenvalues().iter().zip(dec.tripotents()) {
                let err = (&b.apply(c) - &(c * (1.0 - l * l).powi(2))).norm();
                assert!(err < 1e-12 * c.norm());
            }
        }
    }
}

#[test]
fn diastatic_identity_hyp_on_random_vectors() {
    for d in domains() {
        for i in 0..200 {
            let v = sample_element(&d, &mut sample_rng(14, i), 2.0);
            let err = diastasis_hyp(&d, &dexp_hyp(&d, &v).unwrap()).unwrap()
                - metric0(&d, &v, &v).unwrap();
            assert!(err.abs() < 1e-11, "{d}: {err}");
        }
    }
}

#[test]
fn diastatic_identity_fs_on_random_vectors() {
    for d in domains() {
        for i in 0..200 {
            let v = sample_element(&d, &mut sample_rng(15, i), 2.0);
            let err =
                diastasis_fs(&d, &dexp_fs(&d, &v).unwrap()).unwrap() - metric0(&d, &v, &v).unwrap();
            assert!(err.abs() < 1e-11, "{d}: {err}");
        }
    }
}

#[test]
fn duality_routes_agree() {
    for d in domains() {
        for i in 0..100 {
            let z = sample_element(&d, &mut sample_rng(16, i), 0.95);
            let a = symplectic_duality(&d, &z).unwrap();
            let b = symplectic_duality_bergman(&d, &z).unwrap();
            assert!((&a - &b).norm() < 1e-11);
        }
    }
}

#[test]
fn geodesic_diastasis_error_decays_quartically() {
    for d in domains() {
        for i in 0..20 {
            let dir = sample_direction(&d, &mut sample_rng(17, i));
            for r in [0.2, 0.1] {
                let big = geodesic_diastasis_error(&d, &dir, r).unwrap();
                let small = geodesic_diastasis_error(&d, &dir, r / 2.0).unwrap();
                assert!(8.0 * small <= big, "{d} r={r}: {small} vs {big}");
            }
        }
    }
}

#[test]
fn kahler_forms_are_antisymmetric() {
    let d = Domain::type1(2, 2).unwrap();
    let z = sample_element(&d, &mut sample_rng(18, 0), 0.7);
    for kind in [PotentialKind::Hyp, PotentialKind::Fs, PotentialKind::Flat] {
        let form = kahler_form(&PotentialField::new(&d, kind), &z, 1e-4).unwrap();
        assert!(form.antisymmetry_residual() <= 1e-12 * form.matrix.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_norm_is_a_norm(d in domain(), seed in any::<u64>(), s in -3.0f64..3.0) {
        let mut rng = sample_rng(seed, 0);
        let x = sample_element(&d, &mut rng, 1.5);
        let y = sample_element(&d, &mut rng, 1.5);
        let (nx, ny) = (spectral_norm(&d, &x).unwrap(), spectral_norm(&d, &y).unwrap());
        prop_assert!(spectral_norm(&d, &(&x + &y)).unwrap() <= nx + ny + 1e-12);
        prop_assert!((spectral_norm(&d, &(&x * s)).unwrap() - s.abs() * nx).abs() <= 1e-12);
    }

    #[test]
    fn reconstruction_is_relative_accurate(d in domain(), seed in any::<u64>(), r in 0.01f64..10.0) {
        let z = sample_element(&d, &mut sample_rng(seed, 1), r);
        let dec = spectral_decompose(&d, &z, DEFAULT_CLUSTER_TOL).unwrap();
        prop_assert!((&dec.reconstruct(&d) - &z).norm() <= 1e-10 * z.norm().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn duality_is_a_bijection(d in domain(), seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 2);
        let z = sample_element(&d, &mut rng, 0.95);
        let w = sample_element(&d, &mut rng, 5.0);
        prop_assert!((&symplectic_duality_inv(&d, &symplectic_duality(&d, &z).unwrap()).unwrap() - &z).norm() < 1e-9);
        prop_assert!((&symplectic_duality(&d, &symplectic_duality_inv(&d, &w).unwrap()).unwrap() - &w).norm() < 1e-9);
    }

    #[test]
    fn duality_preserves_diastasis(d in domain(), seed in any::<u64>()) {
        let z = sample_element(&d, &mut sample_rng(seed, 3), 0.95);
        let lhs = diastasis_fs(&d, &symplectic_duality(&d, &z).unwrap()).unwrap();
        prop_assert!((lhs - diastasis_hyp(&d, &z).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn svd_backward_error_is_small(rows in 1usize..=12, cols in 1usize..=12, seed in any::<u64>()) {
        let a = matrix(rows, cols, seed);
        let s = svd(&a).unwrap();
        prop_assert!((s.reconstruct() - &a).norm() <= 1e-13 * a.norm());
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn frac_power_inverts(n in 1usize..=8, seed in any::<u64>()) {
        let a = matrix(n, n, seed);
        let h = &a * a.adjoint() + CMatrix::identity(n, n) * C64::new(0.1, 0.0);
        let minus = herm_frac_power(&h, -0.25).unwrap();
        let plus = herm_frac_power(&h, 0.25).unwrap();
        let inv = minus.try_inverse().unwrap();
        prop_assert!((inv - plus).norm() <= 1e-10);
    }
}
