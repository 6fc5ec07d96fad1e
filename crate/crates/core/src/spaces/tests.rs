use super::*;
use approx::assert_relative_eq;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::specialfn::{jacobi_at_one, jacobi_eval};

fn sampled_spaces() -> Vec<SpaceParams> {
    ["sphere:1", "sphere:2", "sphere:3", "sphere:5", "projR:2", "projR:3", "projR:6", "projC:4", "projC:6", "projH:8", "projH:12"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn all_spaces() -> Vec<SpaceParams> {
    let mut v = Vec::new();
    for d in 1..=20 {
        v.push(make_space(SpaceFamily::Sphere, d).unwrap());
    }
    for d in 2..=20 {
        v.push(make_space(SpaceFamily::RealProjective, d).unwrap());
    }
    for d in (4..=30).step_by(2) {
        v.push(make_space(SpaceFamily::ComplexProjective, d).unwrap());
    }
    for d in (8..=40).step_by(4) {
        v.push(make_space(SpaceFamily::QuaternionProjective, d).unwrap());
    }
    v.push(make_space(SpaceFamily::OctonionProjective, 16).unwrap());
    v
}

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[test]
fn table_rows() {
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    assert_eq!((s2.alpha(), s2.beta()), (0.0, 0.0));
    let o = make_space(SpaceFamily::OctonionProjective, 16).unwrap();
    assert_eq!((o.alpha(), o.beta(), o.p, o.q, o.weinstein), (7.0, 3.0, 8, 7, 39));
    let rp3 = make_space(SpaceFamily::RealProjective, 3).unwrap();
    assert_eq!((rp3.beta(), rp3.epsilon), (-0.5, 2));
    assert_eq!(rp3.lie.beta(), 0.5);
    let hp8: SpaceParams = "projH:8".parse().unwrap();
    assert_eq!((hp8.alpha(), hp8.beta(), hp8.weinstein, hp8.e), (3.0, 1.0, 7, 4));
    let cp4: SpaceParams = "projC:4".parse().unwrap();
    assert_eq!((cp4.alpha(), cp4.beta(), cp4.weinstein, cp4.e), (1.0, 0.0, 3, 2));
}

#[test]
fn dimension_constraints() {
    for (fam, d) in [
        (SpaceFamily::Sphere, 0),
        (SpaceFamily::RealProjective, 1),
        (SpaceFamily::ComplexProjective, 5),
        (SpaceFamily::ComplexProjective, 2),
        (SpaceFamily::QuaternionProjective, 10),
        (SpaceFamily::QuaternionProjective, 4),
        (SpaceFamily::OctonionProjective, 8),
        (SpaceFamily::Sphere, MAX_DIMENSION + 1),
    ] {
        assert!(matches!(make_space(fam, d), Err(Error::Config(_))), "{fam:?} {d}");
    }
    assert!("torus:2".parse::<SpaceParams>().is_err());
    assert!("sphere".parse::<SpaceParams>().is_err());
    assert!("sphere:x".parse::<SpaceParams>().is_err());
}

#[test]
fn parameter_invariants() {
    for s in all_spaces() {
        let (a, b) = (s.alpha(), s.beta());
        assert_eq!(a, (s.d as f64 - 2.0) / 2.0, "{s}");
        assert_eq!(s.d as f64, 2.0 * a + 2.0);
        assert_eq!(s.e as f64, 2.0 * b + 2.0);
        assert_eq!(s.p + s.q + 1, s.d);
        assert_eq!(s.epsilon == 2, s.family == SpaceFamily::RealProjective);
        let w = s.weinstein as f64;
        assert_relative_eq!(s.weinstein_formula(), w, max_relative = 1e-12);
        assert_relative_eq!(s.volume, w * sphere_volume(s.d), max_relative = 1e-12);
        if s.family == SpaceFamily::Sphere {
            assert_relative_eq!(s.volume, sphere_volume(s.d), max_relative = 1e-12);
        }
    }
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    assert_relative_eq!(s2.volume, 4.0 * std::f64::consts::PI, max_relative = 1e-14);
}

#[test]
fn weinstein_table_column() {
    for d in 2..=12 {
        assert_eq!(make_space(SpaceFamily::RealProjective, d).unwrap().weinstein, 1 << (d - 1));
    }
    // binom(d-1, d/2-1) and binom(d-1, d/2-1)/(d/2+1)
    assert_eq!(make_space(SpaceFamily::ComplexProjective, 6).unwrap().weinstein, 10);
    assert_eq!(make_space(SpaceFamily::ComplexProjective, 8).unwrap().weinstein, 35);
    assert_eq!(make_space(SpaceFamily::QuaternionProjective, 12).unwrap().weinstein, 66);
}

#[test]
fn a_and_dim_constants() {
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    let rp2 = make_space(SpaceFamily::RealProjective, 2).unwrap();
    for n in 0..=50 {
        assert_relative_eq!(s2.a_constant(n), ((2 * n + 1) as f64).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s2.dim_eigenspace(n), (2 * n + 1) as f64, max_relative = 1e-14);
        assert_relative_eq!(rp2.dim_eigenspace(n), (4 * n + 1) as f64, max_relative = 1e-13);
    }
    for s in all_spaces() {
        assert_eq!(s.a_constant(0), 1.0);
        assert_eq!(s.dim_eigenspace(0), 1.0);
        for n in 0..=50 {
            let lhs = s.a_squared(n) * jacobi_at_one(n, s.geom);
            assert_relative_eq!(lhs, s.dim_eigenspace(n), max_relative = 1e-12);
        }
    }
}

#[test]
fn laplace_eigenvalues() {
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    let rp2 = make_space(SpaceFamily::RealProjective, 2).unwrap();
    for n in 0..10 {
        let nf = n as f64;
        assert_eq!(s2.laplace_eigenvalue(n), -nf * (nf + 1.0));
        assert_eq!(rp2.laplace_eigenvalue(n), -2.0 * nf * (2.0 * nf + 1.0));
    }
    assert_eq!(s2.laplace_eigenvalue(0), 0.0);
}

#[test]
fn distance_examples() {
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    let x = Point::real_normalized(vec![0.3, -0.4, 0.8]).unwrap();
    let mx = Point::Real(x.ambient().iter().map(|c| -c).collect());
    assert_relative_eq!(s2.distance(&x, &mx).unwrap(), std::f64::consts::PI, max_relative = 1e-15);

    let rp3 = make_space(SpaceFamily::RealProjective, 3).unwrap();
    let y = Point::real_normalized(vec![0.3, -0.4, 0.8, 0.1]).unwrap();
    let my = Point::Real(y.ambient().iter().map(|c| -c).collect());
    assert!(rp3.distance(&y, &my).unwrap().abs() < 1e-15);

    let cp4 = make_space(SpaceFamily::ComplexProjective, 4).unwrap();
    let e0 = cp4.base_point().unwrap();
    let e1 = Point::Complex(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
    assert_relative_eq!(cp4.distance(&e0, &e1).unwrap(), std::f64::consts::PI, max_relative = 1e-15);

    let o = make_space(SpaceFamily::OctonionProjective, 16).unwrap();
    assert!(matches!(o.distance(&e0, &e1), Err(Error::UnsupportedGeometry(_))));
    assert!(matches!(o.sample_uniform(&mut rng(1)), Err(Error::UnsupportedGeometry(_))));
    assert!(matches!(s2.distance(&e0, &x), Err(Error::Usage(_))));
}

#[test]
fn zonal_examples() {
    let mut r = rng(7);
    for s in sampled_spaces() {
        let x = s.sample_uniform(&mut r).unwrap();
        for n in 0..6 {
            assert_relative_eq!(s.zonal(n, &x, &x).unwrap(), 1.0, max_relative = 1e-12);
        }
    }
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    let theta: f64 = 1.1;
    let x = s2.base_point().unwrap();
    let y = Point::Real(vec![theta.cos(), theta.sin(), 0.0]);
    assert_relative_eq!(s2.zonal(1, &x, &y).unwrap(), theta.cos(), max_relative = 1e-14);
}

#[test]
fn real_projective_zonal_matches_even_sphere_degree() {
    let mut r = rng(11);
    for d in [2usize, 3, 5] {
        let rp = make_space(SpaceFamily::RealProjective, d).unwrap();
        let a = rp.alpha();
        let sym = JacobiParams::new(a, a).unwrap();
        for _ in 0..20 {
            let x = rp.sample_uniform(&mut r).unwrap();
            let y = rp.sample_uniform(&mut r).unwrap();
            let rho = rp.distance(&x, &y).unwrap();
            for n in 0..8 {
                let lhs = jacobi_eval(2 * n, sym, (rho / 2.0).cos()).unwrap() / jacobi_at_one(2 * n, sym);
                let rhs = rp.zonal(n, &x, &y).unwrap();
                assert!((lhs - rhs).abs() < 1e-11, "d={d} n={n}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn sampled_points_are_valid() {
    let mut r = rng(3);
    for s in sampled_spaces() {
        for _ in 0..50 {
            let x = s.sample_uniform(&mut r).unwrap();
            s.check_point(&x).unwrap();
        }
    }
}

#[test]
fn sampling_is_deterministic() {
    let s = make_space(SpaceFamily::QuaternionProjective, 8).unwrap();
    let a = s.sample_uniform(&mut rng(99)).unwrap();
    let b = s.sample_uniform(&mut rng(99)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sphere_geodesic_distance_law() {
    // ρ(U, o) on S² has CDF (1 - cos θ)/2, so (1 - cos ρ)/2 is uniform.
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    let o = s2.base_point().unwrap();
    let mut r = rng(2024);
    let n = 100_000;
    let mut u: Vec<f64> = (0..n)
        .map(|_| {
            let x = s2.sample_uniform(&mut r).unwrap();
            (1.0 - s2.cos_distance(&x, &o).unwrap()) / 2.0
        })
        .collect();
    u.sort_by(|a, b| a.total_cmp(b));
    let ks = u
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / n as f64 - v).abs().max((v - i as f64 / n as f64).abs()))
        .fold(0.0, f64::max);
    // Kolmogorov critical value at significance 0.001.
    assert!(ks < 1.95 / (n as f64).sqrt(), "KS statistic {ks}");
}

#[test]
fn zonal_functions_average_to_zero() {
    let n_samples = 100_000;
    for (k, s) in sampled_spaces().into_iter().enumerate() {
        let mut r = rng(500 + k as u64);
        let x = s.sample_uniform(&mut r).unwrap();
        for n in 1..=3 {
            let vals: Vec<f64> = (0..n_samples)
                .map(|_| {
                    let u = s.sample_uniform(&mut r).unwrap();
                    s.zonal(n, &x, &u).unwrap()
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / n_samples as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_samples - 1) as f64;
            let se = (var / n_samples as f64).sqrt();
            assert!(mean.abs() <= 5.0 * se, "{s} n={n}: mean {mean} se {se}");
        }
    }
}

fn regauge(p: &Point, r: &mut ChaCha12Rng) -> Point {
    use rand::Rng;
    match p {
        Point::Real(v) => Point::Real(v.iter().map(|c| -c).collect()),
        Point::Complex(v) => {
            let ph = Complex64::from_polar(1.0, r.random_range(0.0..std::f64::consts::TAU));
            Point::Complex(v.iter().map(|c| c * ph).collect())
        }
        Point::Quaternion(v) => {
            let g = Quaternion::new(r.random(), r.random(), r.random(), r.random());
            let g = g.scale(1.0 / g.norm());
            Point::Quaternion(v.iter().map(|c| *c * g).collect())
        }
    }
}

#[test]
fn distances_are_gauge_invariant() {
    let mut r = rng(5);
    for s in sampled_spaces().into_iter().filter(|s| s.family != SpaceFamily::Sphere) {
        for _ in 0..200 {
            let x = s.sample_uniform(&mut r).unwrap();
            let y = s.sample_uniform(&mut r).unwrap();
            let d0 = s.distance(&x, &y).unwrap();
            let (xg, yg) = (regauge(&x, &mut r), regauge(&y, &mut r));
            assert!((s.distance(&xg, &yg).unwrap() - d0).abs() < 1e-12);
            assert!(s.distance(&x, &xg).unwrap() < 1e-7);
            assert!((s.cos_distance(&xg, &y).unwrap() - s.cos_distance(&x, &y).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn metric_axioms() {
    let mut r = rng(17);
    for s in sampled_spaces() {
        for _ in 0..10_000 {
            let x = s.sample_uniform(&mut r).unwrap();
            let y = s.sample_uniform(&mut r).unwrap();
            let z = s.sample_uniform(&mut r).unwrap();
            let (dxy, dyz, dxz) = (
                s.distance(&x, &y).unwrap(),
                s.distance(&y, &z).unwrap(),
                s.distance(&x, &z).unwrap(),
            );
            assert!((0.0..=std::f64::consts::PI).contains(&dxy));
            assert!((dxy - s.distance(&y, &x).unwrap()).abs() <= 1e-10);
            assert!(dxz <= dxy + dyz + 1e-10, "{s}: {dxz} > {dxy} + {dyz}");
        }
    }
}

fn random_orthogonal(n: usize, r: &mut ChaCha12Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| r.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

fn random_unitary(n: usize, r: &mut ChaCha12Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)));
    g.qr().q()
}

/// Columns orthonormal under `⟨x, y⟩ = Σ conj(x_k) y_k` (Gram–Schmidt, right scalars).
fn random_symplectic(n: usize, r: &mut ChaCha12Rng) -> Vec<Vec<Quaternion>> {
    let ip = |a: &[Quaternion], b: &[Quaternion]| {
        a.iter().zip(b).fold(Quaternion::ZERO, |acc, (p, q)| acc + p.conj() * *q)
    };
    let mut cols: Vec<Vec<Quaternion>> = Vec::new();
    for _ in 0..n {
        let mut v: Vec<Quaternion> = (0..n)
            .map(|_| Quaternion::new(r.sample(StandardNormal), r.sample(StandardNormal), r.sample(StandardNormal), r.sample(StandardNormal)))
            .collect();
        for u in &cols {
            let c = ip(u, &v);
            for (vk, uk) in v.iter_mut().zip(u) {
                *vk = *vk - *uk * c;
            }
        }
        let nrm = v.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|q| q.scale(1.0 / nrm)).collect());
    }
    cols
}

fn apply(s: &SpaceParams, x: &Point, r: &mut ChaCha12Rng) -> impl FnMut(&Point) -> Point {
    let n = s.ambient_len();
    let kind = x.kind_name();
    let (o, u, h) = match kind {
        "real" => (Some(random_orthogonal(n, r)), None, None),
        "complex" => (None, Some(random_unitary(n, r)), None),
        _ => (None, None, Some(random_symplectic(n, r))),
    };
    move |p: &Point| match p {
        Point::Real(v) => {
            let m = o.as_ref().unwrap();
            Point::Real((m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect())
        }
        Point::Complex(v) => {
            let m = u.as_ref().unwrap();
            Point::Complex((m * nalgebra::DVector::from_column_slice(v)).iter().copied().collect())
        }
        Point::Quaternion(v) => {
            let cols = h.as_ref().unwrap();
            let mut out = vec![Quaternion::ZERO; v.len()];
            for (j, col) in cols.iter().enumerate() {
                for (i, c) in col.iter().enumerate() {
                    out[i] = out[i] + *c * v[j];
                }
            }
            Point::Quaternion(out)
        }
    }
}

#[test]
fn isometry_invariance() {
    let mut r = rng(23);
    for s in sampled_spaces() {
        for _ in 0..50 {
            let x = s.sample_uniform(&mut r).unwrap();
            let y = s.sample_uniform(&mut r).unwrap();
            let mut g = apply(&s, &x, &mut r);
            let (gx, gy) = (g(&x), g(&y));
            assert!((gx.norm() - 1.0).abs() < 1e-12);
            let d0 = s.distance(&x, &y).unwrap();
            let d1 = s.distance(&gx, &gy).unwrap();
            assert!((d0 - d1).abs() < 1e-10, "{s}: {d0} vs {d1}");
        }
    }
}

#[test]
fn point_construction_errors() {
    let s2 = make_space(SpaceFamily::Sphere, 2).unwrap();
    assert!(s2.point_from_ambient(&[0.0, 0.0, 0.0]).is_err());
    assert!(s2.point_from_ambient(&[1.0, 0.0]).is_err());
    assert!(s2.check_point(&Point::Real(vec![2.0, 0.0, 0.0])).is_err());
    let hp = make_space(SpaceFamily::QuaternionProjective, 8).unwrap();
    let p = hp.point_from_ambient(&[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 3.0, 1.0, 0.0, 0.0, 0.0, 0.5]).unwrap();
    hp.check_point(&p).unwrap();
}
