use proptest::prelude::*;
use vortex_core::fieldkit::VelocityField;
use vortex_core::flowsim::{
    disk_probe, flow_map_jacobian, flow_map_state, integrate_streamline, DiskProbeConfig, IntegratorConfig,
};
use vortex_core::{Mat3, Vec3};

fn tight() -> IntegratorConfig {
    IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..Default::default()
    }
}

/// Romberg quadrature with `levels` refinements.
fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, levels: usize) -> f64 {
    let mut r = vec![vec![0.0; levels]; levels];
    let mut h = b - a;
    r[0][0] = 0.5 * h * (f(a) + f(b));
    for i in 1..levels {
        h *= 0.5;
        let n = 1usize << (i - 1);
        let sum: f64 = (0..n).map(|k| f(a + (2 * k + 1) as f64 * h)).sum();
        r[i][0] = 0.5 * r[i - 1][0] + h * sum;
        let mut p = 4.0;
        for j in 1..=i {
            r[i][j] = r[i][j - 1] + (r[i][j - 1] - r[i - 1][j - 1]) / (p - 1.0);
            p *= 4.0;
        }
    }
    r[levels - 1][levels - 1]
}

#[test]
fn linear_flow_maps_are_exponentials() {
    let e = |s: f64| s.exp();
    for t in [0.5, 1.0, 2.0] {
        let cases = [
            ("planar_strain_paper", Mat3::diag([e(t), e(-t), 1.0])),
            ("planar_strain_stated", Mat3::diag([e(-t), e(t), 1.0])),
            ("axisym_strain", Mat3::diag([e(-t), e(-t), e(2.0 * t)])),
            ("rigid_rotation", Mat3([[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]])),
        ];
        for (name, want) in cases {
            let f = VelocityField::catalog(name, &[]).unwrap();
            let j = flow_map_jacobian(&f, &Vec3::new(0.4, 1.1, -0.2), t, &IntegratorConfig::default()).unwrap();
            assert!(j.max_abs_diff(&want) <= 1e-7, "{name} t={t}: {}", j.max_abs_diff(&want));
        }
    }
}

#[test]
fn hyperbola_arc_length_matches_quadrature() {
    let f = VelocityField::catalog("planar_strain_paper", &[]).unwrap();
    let (x0, y0) = (0.7, 1.9);
    let cfg = IntegratorConfig { t_span: 1.5, samples: 7, ..tight() };
    let line = integrate_streamline(&f, &Vec3::new(x0, y0, 0.0), &cfg).unwrap();
    for s in &line.samples {
        let speed = |t: f64| ((x0 * t.exp()).powi(2) + (y0 * (-t).exp()).powi(2)).sqrt();
        let z = romberg(speed, 0.0, s.t, 12);
        assert!((s.z - z).abs() <= 1e-9 * (1.0 + z), "t={} z={} quad={z}", s.t, s.z);
        assert!((s.x - Vec3::new(x0 * s.t.exp(), y0 * (-s.t).exp(), 0.0)).max_abs() <= 1e-9);
    }
}

#[test]
fn reversed_field_retraces_the_streamline() {
    let f = VelocityField::catalog("abc", &[1.0, 1.0, 1.0]).unwrap();
    let seed = Vec3::new(0.3, 0.7, 0.1);
    let cfg = IntegratorConfig { t_span: 2.0, ..tight() };
    let out = integrate_streamline(&f, &seed, &cfg).unwrap();
    let end = out.samples.last().unwrap();
    let back = integrate_streamline(&f.reversed(), &end.x, &cfg).unwrap();
    let home = back.samples.last().unwrap();
    assert!((home.x - seed).max_abs() <= 1e-9);
    assert!((home.z - end.z).abs() <= 1e-9);
}

#[test]
fn axis_disk_stays_perpendicular() {
    let f = VelocityField::catalog("axisym_strain", &[]).unwrap();
    let cfg = DiskProbeConfig { integrator: IntegratorConfig { samples: 41, ..Default::default() }, ring_radius: None };
    let res = disk_probe(&f, &Vec3::new(0.0, 0.0, 0.8), &cfg).unwrap();
    assert!(!res.frenet_basis);
    assert!(res.max_abs_defect() <= 1e-7);
    for w in res.series.windows(2) {
        assert!(w[1].axis_stretch > w[0].axis_stretch);
    }
    let last = res.series.last().unwrap();
    assert!((last.axis_stretch - 2f64.exp()).abs() <= 1e-7 * 2f64.exp());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn abc_flow_map_preserves_volume(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64) {
        let f = VelocityField::catalog("abc", &[1.0, 1.0, 1.0]).unwrap();
        let seed = Vec3::new(x, y, z);
        prop_assume!(f.velocity(&seed).unwrap().norm() > 1e-3);
        let st = flow_map_state(&f, &seed, 2.0, &IntegratorConfig::default()).unwrap();
        prop_assert!((st.jacobian.det() - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn helix_arc_length_grows_linearly(x in 0.1..2.0f64, y in 0.1..2.0f64, c in -1.0..1.0f64) {
        let f = VelocityField::catalog("helical", &[c]).unwrap();
        let line = integrate_streamline(&f, &Vec3::new(x, y, 0.0), &IntegratorConfig::with_span(3.0)).unwrap();
        let speed = (x * x + y * y + c * c).sqrt();
        for s in &line.samples {
            prop_assert!((s.z - speed * s.t).abs() <= 1e-8 * (1.0 + s.z));
        }
        let map = line.arc_length_map().unwrap();
        for t in [0.3, 1.7, 2.9] {
            let z = map.z_of_t(t).unwrap();
            prop_assert!((map.t_of_z(z).unwrap() - t).abs() <= 1e-10);
        }
    }
}
