//! Invariants of covariance models, checked on random inputs.

use proptest::prelude::*;

use twopoint::linalg::{eigen_range, symmetric_part};
use twopoint::rng::{stream_rng, POINTS_STREAM};
use twopoint::specialfn::{jacobi_eval, JacobiParams};
use twopoint::spectral::LagTable;
use twopoint::{eval_cov, Mat, Model, SpaceParams, SpatialModel, SpatioTemporalModel, TemporalKernel};

const SPACES: [&str; 6] = ["sphere:1", "sphere:2", "sphere:5", "projR:3", "projC:6", "projH:8"];

fn psd(entries: &[f64], m: usize) -> Mat {
    let a = Mat::from_row_slice(m, m, entries);
    &a * a.transpose()
}

fn coeffs_strategy(m: usize) -> impl Strategy<Value = Vec<Mat>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, m * m), 1..6)
        .prop_map(move |v| v.iter().map(|e| psd(e, m)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Valid coefficients give a nonnegative-definite covariance on any point set.
    #[test]
    fn covariance_matrix_on_points_is_psd(si in 0..SPACES.len(), coeffs in coeffs_strategy(2), seed in any::<u64>()) {
        let space: SpaceParams = SPACES[si].parse().unwrap();
        let n = coeffs.len() - 1;
        let model: Model = SpatialModel::new(space.clone(), coeffs, None).unwrap().into();
        let mut rng = stream_rng(seed, POINTS_STREAM);
        let pts: Vec<_> = (0..6).map(|_| space.sample_uniform(&mut rng).unwrap()).collect();
        let k = pts.len();
        let mut big = Mat::zeros(2 * k, 2 * k);
        for a in 0..k {
            for b in 0..k {
                let c = eval_cov(&model, space.distance(&pts[a], &pts[b]).unwrap(), 0.0, n).unwrap();
                big.view_mut((2 * a, 2 * b), (2, 2)).copy_from(&c);
            }
        }
        let (lo, hi) = eigen_range(&symmetric_part(&big)).unwrap();
        prop_assert!(lo >= -1e-10 * hi.max(1.0), "min eigenvalue {lo}");
    }

    /// Diagonal entries peak at distance zero.
    #[test]
    fn variance_dominates(si in 0..SPACES.len(), coeffs in coeffs_strategy(2), rho in 0.0f64..std::f64::consts::PI) {
        let space: SpaceParams = SPACES[si].parse().unwrap();
        let n = coeffs.len() - 1;
        let model: Model = SpatialModel::new(space, coeffs, None).unwrap().into();
        let c0 = eval_cov(&model, 0.0, 0.0, n).unwrap();
        let c = eval_cov(&model, rho, 0.0, n).unwrap();
        for i in 0..2 {
            prop_assert!(c[(i, i)].abs() <= c0[(i, i)] * (1.0 + 1e-12) + 1e-14);
        }
    }

    /// `C(ρ; -t) = C(ρ; t)ᵀ` for any lag table built from a symmetric pair.
    #[test]
    fn lag_table_transpose_law(
        base in coeffs_strategy(2),
        entries in prop::collection::vec(-0.3f64..0.3, 4),
        rho in 0.0f64..std::f64::consts::PI,
    ) {
        let space: SpaceParams = "sphere:2".parse().unwrap();
        let n = base.len() - 1;
        let plus: Vec<Mat> = (0..=n).map(|_| Mat::from_row_slice(2, 2, &entries)).collect();
        let minus: Vec<Mat> = plus.iter().map(|b| b.transpose()).collect();
        let table = LagTable::new(vec![1, -1], vec![plus, minus]).unwrap();
        let model: Model = SpatioTemporalModel::new(space, base, TemporalKernel::LagTable(table), None).unwrap().into();
        let a = eval_cov(&model, rho, 1.0, n).unwrap();
        let b = eval_cov(&model, rho, -1.0, n).unwrap();
        prop_assert!((a - b.transpose()).abs().max() <= 1e-14);
    }

    /// `P_n^{(α,β)}(-x) = (-1)^n P_n^{(β,α)}(x)`.
    #[test]
    fn jacobi_reflection(n in 0usize..40, a2 in -1i32..20, b2 in -1i32..20, x in -1.0f64..1.0) {
        let p = JacobiParams::new(a2 as f64 / 2.0, b2 as f64 / 2.0).unwrap();
        let lhs = jacobi_eval(n, p, -x).unwrap();
        let rhs = jacobi_eval(n, p.swapped(), x).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let scale = twopoint::specialfn::jacobi_at_one(n, p).max(twopoint::specialfn::jacobi_at_one(n, p.swapped())).max(1.0);
        prop_assert!((lhs - sign * rhs).abs() <= 1e-11 * scale);
    }
}
