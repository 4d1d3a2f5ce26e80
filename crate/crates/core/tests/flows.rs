use neckflow::flow::{
    jacobi_step, mcf_step_dt, rmcf_step, run_polar, BoundaryMode, CoordinateKind, JacobiGrid,
    PolarProfile, RadialProfile, StepperConfig, TimeScheme, TimeStamp,
};
use neckflow::spectral::{
    heat_semigroup_evolve, hermite_eval, sphere_weight, BasisKey, EigenExpansion, YMode,
};
use neckflow::CylinderParams;

#[test]
fn shrinking_cylinder_follows_radius_law() {
    for (n, k) in [(2, 1), (3, 1)] {
        let p = CylinderParams::new(n, k).unwrap();
        let r0 = 1.3;
        let mut prof = RadialProfile::from_fn(
            p,
            CoordinateKind::Axis,
            5.0,
            1000,
            TimeStamp::Flow(0.0),
            |_| r0,
        )
        .unwrap();
        let cfg = StepperConfig::new(1e-3)
            .unwrap()
            .with_boundary(BoundaryMode::Neumann);
        let half = r0 * r0 / (4.0 * (n - k) as f64);
        let dt = half / 400.0;
        for _ in 0..400 {
            prof = mcf_step_dt(&prof, &cfg, dt).unwrap();
        }
        let t = prof.time().value();
        let want = (r0 * r0 - 2.0 * (n - k) as f64 * t).sqrt();
        for v in prof.values() {
            assert!((v / want - 1.0).abs() < 1e-4, "({n},{k}) {v} vs {want}");
        }
    }
}

#[test]
fn sphere_follows_radius_law() {
    for n in [2, 3] {
        let r0 = 1.0;
        let s = PolarProfile::sphere(n, r0, 1000).unwrap();
        let lifespan = r0 * r0 / (2.0 * n as f64);
        let run = run_polar(&s, 1e-4, 0.05, (0.5f64).sqrt() * r0, TimeScheme::Ros2).unwrap();
        assert!(run.last.time() >= 0.49 * lifespan);
        for (t, r) in &run.samples {
            let want = (r0 * r0 - 2.0 * n as f64 * t).sqrt();
            assert!((r / want - 1.0).abs() < 1e-4, "n {n} t {t}: {r} vs {want}");
        }
    }
}

#[test]
fn jacobi_grid_tracks_the_semigroup() {
    let p = CylinderParams::new(2, 1).unwrap();
    let c = [
        (YMode::Hermite(1), 0.3),
        (YMode::Hermite(2), 1.0),
        (YMode::Hermite(3), -0.2),
    ];
    let f = |y: f64| c.iter().map(|(m, a)| a * m.eval(y, 1)).sum::<f64>();
    let mut grid = JacobiGrid::from_fn(p, CoordinateKind::Axis, 14.0, 1401, f).unwrap();
    let exp = EigenExpansion::new(
        p,
        c.iter()
            .map(|(m, a)| (BasisKey::theta_invariant(*m), *a))
            .collect(),
    )
    .unwrap();
    let dt = 0.005;
    for _ in 0..200 {
        grid = jacobi_step(&grid, dt, BoundaryMode::Neumann, TimeScheme::Ros2).unwrap();
    }
    // grid norms carry no sphere factor
    let want = heat_semigroup_evolve(&exp, grid.tau()).norm() / sphere_weight(&p).sqrt();
    assert!(
        (grid.weighted_norm() / want - 1.0).abs() < 1e-3,
        "{} vs {want}",
        grid.weighted_norm()
    );
}

#[test]
fn rescaled_step_linearises_to_the_jacobi_step() {
    let p = CylinderParams::new(2, 1).unwrap();
    let phi = |y: f64| hermite_eval(2, y) * (-y * y / 16.0).exp();
    let dt = 0.01;
    let lin = JacobiGrid::from_fn(p, CoordinateKind::Axis, 10.0, 201, phi).unwrap();
    let lin = jacobi_step(&lin, dt, BoundaryMode::Neumann, TimeScheme::Ros2).unwrap();
    let cfg = StepperConfig::new(dt)
        .unwrap()
        .with_boundary(BoundaryMode::Neumann);
    let defect = |eps: f64| {
        let prof = RadialProfile::from_fn(
            p,
            CoordinateKind::Axis,
            10.0,
            201,
            TimeStamp::Rescaled(0.0),
            |y| p.rho() + eps * phi(y),
        )
        .unwrap();
        let next = rmcf_step(&prof, &cfg).unwrap();
        next.values()
            .iter()
            .zip(lin.values())
            .map(|(v, l)| (v - p.rho() - eps * l).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (defect(1e-3), defect(5e-4));
    assert!((e1 / e2).log2() >= 1.8, "order {}", (e1 / e2).log2());
}
