use contraction_kit::dynsys::{make_system, DynamicalSystem, SystemConfig, CATALOG};
use contraction_kit::measure::{matrix_measure, NormSpec, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn catalog() -> Vec<DynamicalSystem> {
    let configs = [
        SystemConfig {
            matrix: Some(vec![vec![-2.0, 1.0, 0.0], vec![0.5, -1.0, 0.3], vec![0.0, -0.4, -3.0]]),
            offset: Some(vec![1.0, 0.0, -1.0]),
            ..SystemConfig::named("linear")
        },
        SystemConfig::named("scalar_cubic_contractive").param("a", 1.0).param("b", 1.0),
        SystemConfig::named("scalar_cubic_marginal"),
        SystemConfig::named("rotation").param("omega", 1.3),
        SystemConfig {
            rates: Some(vec![1.0, 2.0, 1.5, 3.0]),
            ..SystemConfig::named("diag_dominant_nl").param("epsilon", 0.25)
        },
    ];
    configs.iter().map(|c| make_system(c).unwrap()).collect()
}

fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Vector::from_fn(n, |_, _| rng.gen_range(-2.0..=2.0))).collect()
}

#[test]
fn catalog_is_covered() {
    let names: Vec<String> = catalog().iter().map(|s| s.name().to_string()).collect();
    assert_eq!(names, CATALOG);
}

#[test]
fn analytic_jacobians_are_consistent() {
    for sys in catalog() {
        let n = sys.dimension();
        let directions = random_points(n, 20, 99);
        for (x, d) in random_points(n, 20, 5).iter().zip(directions) {
            let d = &d / d.norm();
            let residual = sys.jacobian_consistency_check(x, &d, 1e-5).unwrap();
            assert!(residual <= 1e-5, "{} at {x:?}: {residual}", sys.name());
        }
    }
}

#[test]
fn finite_difference_agrees_with_analytic() {
    for sys in catalog() {
        let fd = sys.clone().with_jacobian_source(contraction_kit::dynsys::JacobianSource::finite_difference());
        for x in random_points(sys.dimension(), 20, 8) {
            let exact = sys.eval_jacobian(&x).unwrap();
            let approx = fd.eval_jacobian(&x).unwrap();
            let scale = 1.0 + sys.eval_velocity(&x).unwrap().amax() + exact.amax();
            assert!((exact - approx).amax() <= 1e-7 * scale, "{}", sys.name());
        }
    }
}

#[test]
fn cubic_measure_is_closed_form() {
    let (a, b) = (0.7, 1.9);
    let sys = make_system(&SystemConfig::named("scalar_cubic_contractive").param("a", a).param("b", b)).unwrap();
    for x in random_points(1, 200, 3) {
        let j = sys.eval_jacobian(&x).unwrap();
        let expected = -a - 3.0 * b * x[0] * x[0];
        for norm in [NormSpec::L1, NormSpec::L2, NormSpec::LInf] {
            let m = matrix_measure(&j, &norm).unwrap().value;
            assert!((m - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
            assert!(m <= -a);
        }
    }
}

#[test]
fn diag_dominant_row_bound() {
    let sys = catalog().pop().unwrap();
    let bound = -(1.0 - 0.25);
    for x in random_points(4, 500, 4) {
        let m = matrix_measure(&sys.eval_jacobian(&x).unwrap(), &NormSpec::LInf).unwrap().value;
        assert!(m <= bound + 1e-12, "{m}");
    }
}

#[test]
fn rotation_is_norm_preserving() {
    let sys = catalog()[3].clone();
    for x in random_points(2, 50, 6) {
        let j = sys.eval_jacobian(&x).unwrap();
        assert_eq!(matrix_measure(&j, &NormSpec::L2).unwrap().value, 0.0);
        assert!(sys.eval_velocity(&x).unwrap().dot(&x).abs() <= 1e-14 * (1.0 + x.norm_squared()));
    }
}

#[test]
fn invalid_catalog_parameters() {
    let bad = [
        SystemConfig::named("scalar_cubic_contractive").param("a", 0.0).param("b", 1.0),
        SystemConfig::named("scalar_cubic_contractive").param("a", 1.0),
        SystemConfig::named("rotation"),
        SystemConfig { dimension: Some(2), ..SystemConfig::named("diag_dominant_nl").param("a", 0.2).param("epsilon", 0.25) },
        SystemConfig::named("linear"),
        SystemConfig::named("lorenz"),
    ];
    for cfg in bad {
        assert!(make_system(&cfg).is_err(), "{cfg:?}");
    }
}
