//! End-to-end acceptance gates. Each test prints one PASS/FAIL line.

use std::io::Write;
use std::process::Command;

use hpjts::duality::{
    kernel_transfer_check, pullback_2form, symplectic_duality, symplectic_duality_bergman,
};
use hpjts::geometry::{
    dexp_fs, dexp_fs_inv, dexp_hyp, dexp_hyp_inv, diastasis_fs, diastasis_hyp, geo_exp_hyp,
    kahler_form, kernel_hyp, metric0, PotentialField, PotentialKind, TwoForm,
};
use hpjts::jts::{bergman_operator, jordan_identity_residual, trace_form};
use hpjts::numerics::{herm_eigen, CMatrix, FdConfig, RMatrix, C64};
use hpjts::report::frame_distance;
use hpjts::sampling::{sample_direction, sample_element, sample_rng};
use hpjts::spectral::{functional_calculus, spectral_decompose, DEFAULT_CLUSTER_TOL};
use hpjts::{Domain, Element};

const SAMPLES: u64 = 1000;

const DOMAINS: [&str; 5] = [
    "type1:1,1",
    "type1:1,3",
    "type1:2,2",
    "type1:2,3",
    "product:type1:1,1;type1:1,1;type1:1,1",
];

fn domains() -> Vec<Domain> {
    DOMAINS.iter().map(|s| s.parse().unwrap()).collect()
}

/// Worst error per named quantity, checked against its tolerance.
struct Gate {
    id: u32,
    title: &'static str,
    rows: Vec<(String, f64, f64)>,
}

impl Gate {
    fn new(id: u32, title: &'static str) -> Self {
        Gate {
            id,
            title,
            rows: Vec::new(),
        }
    }

    fn record(&mut self, what: &str, err: f64, tol: f64) {
        let err = if err.is_nan() { f64::INFINITY } else { err };
        match self.rows.iter_mut().find(|r| r.0 == what) {
            Some(row) => row.1 = row.1.max(err),
            None => self.rows.push((what.to_string(), err, tol)),
        }
    }

    fn finish(self) {
        let failed: Vec<&(String, f64, f64)> = self.rows.iter().filter(|r| r.1 > r.2).collect();
        let detail: Vec<String> = self
            .rows
            .iter()
            .map(|(w, e, t)| format!("{w}={e:.2e}/{t:.0e}"))
            .collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        let line = format!(
            "acceptance {} [{}] {}: {}\n",
            self.id,
            status,
            self.title,
            detail.join(" ")
        );
        // bypass libtest output capture so the line always reaches the log
        let _ = std::io::stdout().lock().write_all(line.as_bytes());
        assert!(failed.is_empty(), "{line}");
    }
}

fn point(d: &Domain, stream: u64, i: u64, r: f64) -> Element {
    sample_element(d, &mut sample_rng(7, (stream << 32) | i), r)
}

/// Diagonal element with moduli in `(0, r_max)` and random phases.
fn diagonal(d: &Domain, i: u64, r_max: f64) -> Element {
    let mut rng = sample_rng(8, i);
    let mut z = Element::zeros(d);
    for (k, f) in d.factors().iter().enumerate() {
        for j in 0..f.rank() {
            let w = sample_direction(&Domain::complex_hyperbolic(1).unwrap(), &mut rng).block(0)
                [(0, 0)];
            let r = r_max
                * (0.05
                    + 0.9 * ((i as f64 * 0.618_033_988_75 + j as f64 * 0.414_213_562_37) % 1.0));
            z.block_mut(k)[(j, j)] = w * r;
        }
    }
    z
}

/// Largest entry mismatch between `got` and `g(|s|)·s/|s|` on the diagonal.
fn diagonal_mismatch(z: &Element, got: &Element, g: impl Fn(f64) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (zb, gb) in z.blocks().iter().zip(got.blocks()) {
        for r in 0..zb.nrows() {
            for c in 0..zb.ncols() {
                let s = zb[(r, c)];
                let expected = if r == c && s.norm() > 0.0 {
                    s * (g(s.norm()) / s.norm())
                } else {
                    C64::new(0.0, 0.0)
                };
                worst = worst.max((gb[(r, c)] - expected).norm());
            }
        }
    }
    worst
}

fn identity_jacobian_error(d: &Domain, map: impl Fn(&Element) -> hpjts::Result<Element>) -> f64 {
    let jac = hpjts::duality::jacobian(d, map, &Element::zeros(d), 1e-6).unwrap();
    let n = jac.nrows();
    (jac - RMatrix::identity(n, n)).abs().max()
}

#[test]
fn algebra_suite() {
    let mut g = Gate::new(1, "algebra suite");
    for d in domains() {
        for i in 0..SAMPLES {
            let mut rng = sample_rng(1, i);
            let e: Vec<Element> = (0..5).map(|_| sample_direction(&d, &mut rng)).collect();
            g.record(
                "jordan",
                jordan_identity_residual(&d, &e[0], &e[1], &e[2], &e[3], &e[4]).unwrap(),
                1e-10,
            );
            let herm = (trace_form(&d, &e[0], &e[1]).unwrap()
                - trace_form(&d, &e[1], &e[0]).unwrap().conj())
            .norm();
            g.record("trace_hermitian", herm, 1e-10);
            let dec = spectral_decompose(&d, &point(&d, 1, i, 2.0), DEFAULT_CLUSTER_TOL).unwrap();
            g.record("tripotent", dec.tripotent_residual(&d).unwrap(), 1e-10);
            g.record(
                "orthogonality",
                dec.orthogonality_residual(&d).unwrap(),
                1e-10,
            );
        }
        let n = d.total_dim();
        let gram = CMatrix::from_fn(n, n, |k, l| {
            trace_form(&d, &Element::basis(&d, k), &Element::basis(&d, l)).unwrap()
        });
        let (vals, _) = herm_eigen(&gram).unwrap();
        g.record(
            "gram_nonpositive",
            if vals[0] > 0.0 { 0.0 } else { f64::INFINITY },
            0.0,
        );
    }
    g.finish();
}

#[test]
fn spectral_suite() {
    let mut g = Gate::new(2, "spectral suite");
    let rel = |e: f64, s: f64| if s > 0.0 { e / s } else { e };
    for d in domains() {
        for i in 0..SAMPLES {
            let z = point(&d, 2, i, 0.95);
            let dec = spectral_decompose(&d, &z, DEFAULT_CLUSTER_TOL).unwrap();
            g.record(
                "reconstruction",
                rel((&dec.reconstruct(&d) - &z).norm(), z.norm()),
                1e-9,
            );
            let cube = |t: f64| t + t * t * t;
            let mapped = spectral_decompose(
                &d,
                &functional_calculus(&d, cube, &z).unwrap(),
                DEFAULT_CLUSTER_TOL,
            )
            .unwrap();
            g.record(
                "frame",
                frame_distance(&dec.map(&d, cube, DEFAULT_CLUSTER_TOL).unwrap(), &mapped),
                1e-9,
            );
            let b = bergman_operator(&d, &z, &z).unwrap();
            for (l, c) in dec.eigenvalues().iter().zip(dec.tripotents()) {
                let err = (&b.apply(c) - &(c * (1.0 - l * l).powi(2))).norm();
                g.record("bergman_eigen", rel(err, c.norm()), 1e-9);
            }
            for (k, f) in d.factors().iter().enumerate() {
                let zk = z.factor_element(k);
                let dk = d.factor_domain(k);
                let lam = spectral_decompose(&dk, &zk, 0.0).unwrap();
                let prod: f64 = lam
                    .eigenvalues()
                    .iter()
                    .zip(lam.tripotents())
                    .map(|(l, c)| {
                        (1.0 - l * l).powi(f.genus() as i32 * c.norm().powi(2).round() as i32)
                    })
                    .product();
                let det = kernel_hyp(&dk, &zk).unwrap().product;
                g.record("det_b", rel((det - prod).abs(), prod), 1e-9);
                let sum: f64 = lam
                    .eigenvalues()
                    .iter()
                    .zip(lam.tripotents())
                    .map(|(l, c)| l * l * c.norm().powi(2))
                    .sum();
                let trace = trace_form(&dk, &zk, &zk).unwrap().re / f.genus() as f64;
                g.record("trace_metric", rel((trace - sum).abs(), sum), 1e-9);
            }
        }
    }
    g.finish();
}

#[test]
fn hyperbolic_diastatic_exponential() {
    let mut g = Gate::new(3, "hyperbolic diastatic exponential");
    let scalar = |t: f64| (1.0 - (-t * t).exp()).sqrt();
    let scalar_inv = |t: f64| (-(1.0 - t * t).ln()).sqrt();
    for d in domains() {
        for i in 0..SAMPLES {
            let v = point(&d, 3, i, 2.0);
            let z = point(&d, 4, i, 0.95);
            let err = diastasis_hyp(&d, &dexp_hyp(&d, &v).unwrap()).unwrap()
                - metric0(&d, &v, &v).unwrap();
            g.record("diastatic_identity", err.abs(), 1e-9);
            g.record(
                "roundtrip",
                (&dexp_hyp_inv(&d, &dexp_hyp(&d, &v).unwrap()).unwrap() - &v).norm(),
                1e-9,
            );
            g.record(
                "roundtrip_inv",
                (&dexp_hyp(&d, &dexp_hyp_inv(&d, &z).unwrap()).unwrap() - &z).norm(),
                1e-9,
            );
            let w = diagonal(&d, i, 0.9);
            g.record(
                "diagonal",
                diagonal_mismatch(&w, &dexp_hyp(&d, &w).unwrap(), scalar),
                1e-12,
            );
            g.record(
                "diagonal_inv",
                diagonal_mismatch(&w, &dexp_hyp_inv(&d, &w).unwrap(), scalar_inv),
                1e-12,
            );
        }
        g.record(
            "jacobian_at_0",
            identity_jacobian_error(&d, |v| dexp_hyp(&d, v)),
            1e-6,
        );
    }
    g.finish();
}

#[test]
fn dual_diastatic_exponential() {
    let mut g = Gate::new(4, "dual diastatic exponential");
    let scalar = |t: f64| ((t * t).exp() - 1.0).sqrt();
    let scalar_inv = |t: f64| (1.0 + t * t).ln().sqrt();
    for d in domains() {
        for i in 0..SAMPLES {
            let v = point(&d, 5, i, 2.0);
            let w = point(&d, 6, i, 3.0);
            let err =
                diastasis_fs(&d, &dexp_fs(&d, &v).unwrap()).unwrap() - metric0(&d, &v, &v).unwrap();
            g.record("diastatic_identity", err.abs(), 1e-9);
            g.record(
                "roundtrip",
                (&dexp_fs_inv(&d, &dexp_fs(&d, &v).unwrap()).unwrap() - &v).norm(),
                1e-9,
            );
            g.record(
                "roundtrip_inv",
                (&dexp_fs(&d, &dexp_fs_inv(&d, &w).unwrap()).unwrap() - &w).norm(),
                1e-9,
            );
            let u = diagonal(&d, i, 1.5);
            g.record(
                "diagonal",
                diagonal_mismatch(&u, &dexp_fs(&d, &u).unwrap(), scalar),
                1e-12,
            );
            g.record(
                "diagonal_inv",
                diagonal_mismatch(&u, &dexp_fs_inv(&d, &u).unwrap(), scalar_inv),
                1e-12,
            );
        }
        g.record(
            "jacobian_at_0",
            identity_jacobian_error(&d, |v| dexp_fs(&d, v)),
            1e-6,
        );
    }
    g.finish();
}

#[test]
fn duality_composition() {
    let mut g = Gate::new(5, "duality composition");
    for d in domains() {
        for i in 0..SAMPLES {
            let z = point(&d, 7, i, 0.95);
            let psi = symplectic_duality(&d, &z).unwrap();
            let composed = dexp_fs(&d, &dexp_hyp_inv(&d, &z).unwrap()).unwrap();
            g.record("composition", (&psi - &composed).norm(), 1e-10);
            g.record(
                "route_agreement",
                (&psi - &symplectic_duality_bergman(&d, &z).unwrap()).norm(),
                1e-9,
            );
        }
    }
    g.finish();
}

#[test]
fn duality_symplectomorphism() {
    let mut g = Gate::new(6, "duality symplectomorphism");
    let fd = FdConfig::default();
    for spec in ["type1:1,2", "product:type1:1,1;type1:1,1", "type1:2,2"] {
        let d: Domain = spec.parse().unwrap();
        let fs = PotentialField::new(&d, PotentialKind::Fs);
        let flat = PotentialField::new(&d, PotentialKind::Flat);
        let hyp = PotentialField::new(&d, PotentialKind::Hyp);
        let standard = TwoForm::standard(d.total_dim());
        for i in 0..100 {
            let z = point(&d, 8, i, 0.8);
            let pulled_fs = pullback_2form(&d, |x| symplectic_duality(&d, x), &fs, &z, fd).unwrap();
            g.record("pullback_fs", pulled_fs.max_abs_diff(&standard), 1e-5);
            let pulled_flat =
                pullback_2form(&d, |x| symplectic_duality(&d, x), &flat, &z, fd).unwrap();
            let target = kahler_form(&hyp, &z, fd.hessian_step).unwrap();
            g.record("pullback_flat", pulled_flat.max_abs_diff(&target), 1e-5);
        }
    }
    g.finish();
}

#[test]
fn kernel_transfer() {
    let mut g = Gate::new(7, "kernel transfer");
    for d in domains() {
        for i in 0..SAMPLES {
            let t = kernel_transfer_check(&d, &point(&d, 9, i, 0.95)).unwrap();
            g.record("diastasis", t.diastasis, 1e-9);
            for k in t.kernel_relative {
                g.record("kernel_relative", k, 1e-9);
            }
        }
    }
    let disk = Domain::complex_hyperbolic(1).unwrap();
    let z = Element::from_vec(&disk, &[C64::new(0.6, 0.0)]).unwrap();
    let w = symplectic_duality(&disk, &z).unwrap();
    g.record(
        "anchor_psi",
        (w.block(0)[(0, 0)] - C64::new(0.75, 0.0)).norm(),
        1e-15,
    );
    g.record(
        "anchor_d_hyp",
        (diastasis_hyp(&disk, &z).unwrap() + 0.64_f64.ln()).abs(),
        1e-15,
    );
    g.record(
        "anchor_d_fs",
        (diastasis_fs(&disk, &w).unwrap() - 1.5625_f64.ln()).abs(),
        1e-15,
    );
    g.finish();
}

#[test]
fn geodesic_asymptotics() {
    let mut g = Gate::new(8, "geodesic asymptotics");
    for d in domains() {
        for i in 0..20 {
            let dir = sample_direction(&d, &mut sample_rng(10, i));
            let e = |r: f64| {
                let v = &dir * r;
                (diastasis_hyp(&d, &geo_exp_hyp(&d, &v).unwrap()).unwrap()
                    - metric0(&d, &v, &v).unwrap())
                .abs()
            };
            for r in [0.2, 0.1] {
                g.record("ratio_8e(r/2)/e(r)", 8.0 * e(r / 2.0) / e(r), 1.0);
            }
        }
    }
    g.finish();
}

fn hpjts(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hpjts"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn command_line() {
    let mut g = Gate::new(9, "command line");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut all: Vec<&str> = DOMAINS.to_vec();
    all.extend(["type1:1,2", "product:type1:1,1;type1:1,1"]);
    for (k, spec) in all.iter().enumerate() {
        let (a, b, c) = (
            path(&format!("a{k}.json")),
            path(&format!("b{k}.json")),
            path(&format!("c{k}.json")),
        );
        let (code, _) = hpjts(&[
            "verify",
            "--domain",
            spec,
            "--samples",
            "100",
            "--seed",
            "42",
            "--out",
            &a,
        ]);
        g.record("verify_exit", code as f64, 0.0);
        hpjts(&[
            "verify",
            "--domain",
            spec,
            "--samples",
            "100",
            "--seed",
            "42",
            "--out",
            &b,
        ]);
        hpjts(&[
            "verify",
            "--domain",
            spec,
            "--samples",
            "100",
            "--seed",
            "42",
            "--out",
            &c,
            "--threads",
            "4",
        ]);
        let (ra, rb, rc) = (
            std::fs::read(&a).unwrap(),
            std::fs::read(&b).unwrap(),
            std::fs::read(&c).unwrap(),
        );
        g.record("report_bytes_differ", f64::from(u8::from(ra != rb)), 0.0);
        g.record("report_threads_differ", f64::from(u8::from(ra != rc)), 0.0);
    }
    let good = path("good.json");
    std::fs::write(&good, r#"{"domain":"type1:1,1","points":[[[[0.6,0.0]]]]}"#).unwrap();
    let zero = path("zero.json");
    std::fs::write(&zero, r#"{"domain":"type1:1,1","points":[[[[0.0,0.0]]]]}"#).unwrap();
    let cases: Vec<(&str, String)> = vec![
        ("not json", "{".into()),
        (
            "wrong shape",
            r#"{"domain":"type1:1,1","points":[[[[1,0],[0,0]]]]}"#.into(),
        ),
        (
            "bad pair",
            r#"{"domain":"type1:1,1","points":[[[[1]]]]}"#.into(),
        ),
        ("bad domain", r#"{"domain":"type7:1","points":[]}"#.into()),
        (
            "nan",
            r#"{"domain":"type1:1,1","points":[[[["nan",0]]]]}"#.into(),
        ),
        (
            "extra field",
            r#"{"domain":"type1:1,1","points":[],"x":0}"#.into(),
        ),
    ];
    let out = path("out.json");
    for (label, text) in &cases {
        let file = path(&format!("{}.json", label.replace(' ', "_")));
        std::fs::write(&file, text).unwrap();
        for op in ["duality", "spectrum", "kernel-hyp"] {
            let (code, err) = hpjts(&[
                "eval",
                "--domain",
                "type1:1,1",
                "--op",
                op,
                "--points",
                &file,
                "--out",
                &out,
            ]);
            g.record("malformed_points_exit", f64::from(u8::from(code != 2)), 0.0);
            g.record(
                "panicked",
                f64::from(u8::from(err.contains("panicked"))),
                0.0,
            );
        }
    }
    let usage: Vec<Vec<&str>> = vec![
        vec![
            "verify",
            "--domain",
            "type1:0,1",
            "--samples",
            "1",
            "--seed",
            "1",
            "--out",
            &out,
        ],
        vec![
            "verify",
            "--domain",
            "product:",
            "--samples",
            "1",
            "--seed",
            "1",
            "--out",
            &out,
        ],
        vec![
            "verify",
            "--domain",
            "type1:1,1",
            "--samples",
            "-3",
            "--seed",
            "1",
            "--out",
            &out,
        ],
        vec![
            "verify",
            "--domain",
            "type1:1,1",
            "--samples",
            "1",
            "--seed",
            "1",
            "--tol",
            "bogus=1",
            "--out",
            &out,
        ],
        vec![
            "verify",
            "--domain",
            "type1:1,1",
            "--samples",
            "1",
            "--seed",
            "1",
            "--tol",
            "duality.bijectivity",
            "--out",
            &out,
        ],
        vec![
            "eval",
            "--domain",
            "type1:1,1",
            "--op",
            "tanh",
            "--points",
            &good,
            "--out",
            &out,
        ],
        vec![
            "eval",
            "--domain",
            "type1:1,2",
            "--op",
            "duality",
            "--points",
            &good,
            "--out",
            &out,
        ],
        vec![
            "eval",
            "--domain",
            "type1:1,1",
            "--op",
            "duality",
            "--points",
            "/nonexistent/p.json",
            "--out",
            &out,
        ],
        vec![
            "trace",
            "--domain",
            "type1:1,1",
            "--direction",
            &zero,
            "--rmax",
            "0.5",
            "--samples",
            "3",
            "--out",
            &out,
        ],
        vec![
            "trace",
            "--domain",
            "type1:1,1",
            "--direction",
            &good,
            "--rmax",
            "2.0",
            "--samples",
            "3",
            "--out",
            &out,
        ],
        vec!["frobnicate"],
        vec![],
    ];
    for args in &usage {
        let (code, err) = hpjts(args);
        g.record("usage_exit", f64::from(u8::from(code != 2)), 0.0);
        g.record(
            "panicked",
            f64::from(u8::from(err.contains("panicked"))),
            0.0,
        );
    }
    let (code, _) = hpjts(&[
        "verify",
        "--domain",
        "type1:1,1",
        "--samples",
        "20",
        "--seed",
        "1",
        "--tol",
        "duality.bijectivity=0",
        "--out",
        &out,
    ]);
    g.record("failing_check_exit", f64::from(u8::from(code != 1)), 0.0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    g.record(
        "failing_report_written",
        f64::from(u8::from(report["all_pass"] != false)),
        0.0,
    );
    let (code, _) = hpjts(&[
        "eval",
        "--domain",
        "type1:1,1",
        "--op",
        "duality",
        "--points",
        &good,
        "--out",
        &out,
    ]);
    g.record("eval_exit", code as f64, 0.0);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    g.record(
        "eval_anchor",
        (value["points"][0][0][0][0].as_f64().unwrap() - 0.75).abs(),
        1e-15,
    );
    g.finish();
}
