use super::*;
use rand::SeedableRng;

use crate::simulate::Simulator;
use crate::spaces::{make_space, SpaceFamily};
use crate::spectral::SpatialModel;

fn pts(space: &SpaceParams, seed: u64) -> (Point, Point) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (space.sample_uniform(&mut rng).unwrap(), space.sample_uniform(&mut rng).unwrap())
}

#[test]
fn z_score_conventions() {
    assert_eq!(z_component(1.0, 0.5, 0.0), 2.0);
    assert_eq!(z_component(3.0, 0.0, 3.0), 0.0);
    assert_eq!(z_component(3.0, 0.0, 2.0), f64::INFINITY);
}

#[test]
fn funk_hecke_targets() {
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    let x = s2.base_point().unwrap();
    let y = Point::Real(vec![0.0, 1.0, 0.0]);
    let e = mc_funk_hecke(&s2, 1, 1, &x, &y, 20_000, 3).unwrap();
    assert_eq!(e.target[(0, 0)], 0.0);
    assert!(e.z_score <= Z_THRESHOLD);
    let d = mc_funk_hecke(&s2, 2, 2, &x, &x, 20_000, 4).unwrap();
    assert!((d.target[(0, 0)] - s2.volume / s2.a_squared(2)).abs() < 1e-12);
    assert!(d.z_score <= Z_THRESHOLD, "{d:?}");
    assert!(matches!(mc_funk_hecke(&s2, 1, 1, &x, &y, 10, 3), Err(Error::Usage(_))));
    let op = make_space(SpaceFamily::OctonionProjective, 16).unwrap();
    assert!(matches!(mc_funk_hecke(&op, 1, 1, &x, &y, 2000, 3), Err(Error::UnsupportedGeometry(_))));
}

#[test]
fn funk_hecke_is_deterministic() {
    let cp = make_space(SpaceFamily::ComplexProjective, 4).unwrap();
    let (x, y) = pts(&cp, 1);
    let a = mc_funk_hecke_grid(&cp, 3, &x, &y, 5000, 11, 1.0).unwrap();
    let b = mc_funk_hecke_grid(&cp, 3, &x, &y, 5000, 11, 1.0).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zonal_oracle_small() {
    let hp = make_space(SpaceFamily::QuaternionProjective, 8).unwrap();
    let (x, y) = pts(&hp, 2);
    let z = mc_zonal_covariance(&hp, 2, 1, &x, &x, 20_000, 5).unwrap();
    assert!((z.cov.target[(0, 0)] - jacobi_at_one(2, hp.geom)).abs() < 1e-12);
    for e in [&z.mean, &z.cov, &z.cross] {
        assert!(e.z_score <= Z_THRESHOLD, "{e:?}");
    }
    assert!(mc_zonal_covariance(&hp, 0, 1, &x, &y, 20_000, 5).is_err());
    assert!(mc_zonal_covariance(&hp, 2, 2, &x, &y, 20_000, 5).is_err());
}

#[test]
fn empirical_cov_checks_inputs() {
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    let model = Model::Spatial(SpatialModel::new(s2.clone(), vec![Mat::identity(2, 2)], None).unwrap());
    let (x, y) = pts(&s2, 3);
    let sim = Simulator::new(&model, vec![x, y], None, 0).unwrap();
    let reps = sim.ensemble(1, 200).unwrap();
    let e = empirical_cov(&model, &reps, (0, 0), 0.0).unwrap();
    assert_eq!(e.target, Mat::identity(2, 2));
    assert!(e.z_score <= Z_THRESHOLD);
    assert!(empirical_cov(&model, &reps, (0, 1), 1.0).is_err());
    assert!(empirical_cov(&model, &reps, (0, 5), 0.0).is_err());
    let dup = vec![reps[0].clone(), reps[0].clone()];
    assert!(empirical_cov(&model, &dup, (0, 0), 0.0).is_err());
    let other = Model::Spatial(SpatialModel::new(s2, vec![Mat::identity(2, 2) * 2.0], None).unwrap());
    assert!(empirical_cov(&other, &reps, (0, 0), 0.0).is_err());
}

#[test]
fn degree_zero_recovery_is_a_plain_average() {
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    let model = Model::Spatial(SpatialModel::new(s2, vec![Mat::identity(1, 1) * 2.0], None).unwrap());
    let real = Simulator::new(&model, vec![], None, 0).unwrap().run(8).unwrap();
    let est = mc_recover_vn(&real, 0, 2000, 1).unwrap();
    // The field is constant, so every abscissa returns W_0 exactly.
    assert!((est[0].value[(0, 0)] - real.coefficients[0][0][0]).abs() < 1e-12);
    assert_eq!(est[0].z_score, 0.0);
    let absent = mc_recover_vn(&real, 3, 20_000, 2).unwrap();
    assert!(absent[0].z_score <= Z_THRESHOLD);

    let mut stripped = real.clone();
    stripped.coefficients.clear();
    assert!(matches!(mc_recover_vn(&stripped, 0, 2000, 1), Err(Error::Usage(_))));
}

#[test]
fn identities_hold_on_every_space() {
    for space in all_spaces(MAX_CHECKED) {
        for r in check_space_identities(&space) {
            assert!(r.pass, "{r:?}");
        }
    }
}

const MAX_CHECKED: usize = 24;

#[test]
fn wrong_a_is_detected() {
    let s = make_space(SpaceFamily::ComplexProjective, 6).unwrap();
    let bad = suite_space_identities(&s, 1.05);
    assert!(bad.iter().any(|r| !r.pass && r.name.contains("a_n^2")));
}

fn suite_space_identities(space: &SpaceParams, a_scale: f64) -> Vec<CheckRecord> {
    super::suite::space_identities_for_tests(space, a_scale)
}
