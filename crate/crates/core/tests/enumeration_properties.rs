use detsum_core::asymptotics::{fit_growth, FitOptions};
use detsum_core::constructions::{builtin, BuiltinCode};
use detsum_core::enumeration::{collect_ball, enumerate_ball_with, shell_counts, EnumOptions};
use detsum_core::matrix::{c, ComplexMatrix};
use detsum_core::{build_lattice, Error, MatrixLattice};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Every nonzero `z` in the box `|z_i| ≤ M / √λ_min(G)` with `zᵀGz ≤ M²`,
/// in the enumeration's lexicographic order (last coordinate slowest).
fn box_scan(l: &MatrixLattice, gram_int: &[i64], radius: i64) -> Vec<Vec<i64>> {
    let k = l.rank();
    let g = DMatrix::from_row_slice(k, k, l.gram());
    let lmin = g.symmetric_eigenvalues().min();
    let b = (radius as f64 / lmin.sqrt()).floor() as i64 + 1;
    let mut out = Vec::new();
    let mut z = vec![-b; k];
    loop {
        if z.iter().any(|&x| x != 0) {
            let mut q = 0i64;
            for i in 0..k {
                for j in 0..k {
                    q += z[i] * gram_int[i * k + j] * z[j];
                }
            }
            if q <= radius * radius {
                out.push(z.clone());
            }
        }
        // odometer with z_0 fastest
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            if z[i] < b {
                z[i] += 1;
                break;
            }
            z[i] = -b;
            i += 1;
        }
    }
}

fn integer_lattice(entries: &[(i64, i64)], k: usize) -> Option<(MatrixLattice, Vec<i64>)> {
    let basis: Vec<ComplexMatrix> = (0..k)
        .map(|i| ComplexMatrix::from_row_major(entries[4 * i..4 * i + 4].iter().map(|&(a, b)| c(a as f64, b as f64)).collect()))
        .collect();
    let l = build_lattice(basis, None).ok()?;
    let gram: Vec<i64> = l.gram().iter().map(|x| x.round() as i64).collect();
    Some((l, gram))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn enumeration_matches_box_scan(
        k in 1usize..=4,
        entries in proptest::collection::vec((-2i64..=2, -2i64..=2), 16),
        radius in 1i64..=8,
    ) {
        let lat = integer_lattice(&entries, k);
        prop_assume!(lat.is_some());
        let (l, gram) = lat.unwrap();
        let g = DMatrix::from_row_slice(k, k, l.gram());
        let side = 2.0 * (radius as f64 / g.symmetric_eigenvalues().min().sqrt()) + 3.0;
        prop_assume!(side.powi(k as i32) < 2e6);
        let fast = collect_ball(&l, radius as f64).unwrap();
        let slow = box_scan(&l, &gram, radius);
        prop_assert_eq!(fast, slow);
    }
}

#[test]
fn gaussian_integer_circle_counts() {
    let l = builtin(BuiltinCode::Gaussian).unwrap();
    let t = shell_counts(&l, &[1.0, 5.0, 10.0]).unwrap();
    // r_2 sums: 4, 80 and 316 nonzero points
    assert_eq!(t.counts, vec![4, 80, 316]);
}

#[test]
fn alamouti_small_ball() {
    let l = builtin(BuiltinCode::Alamouti).unwrap();
    assert_eq!(collect_ball(&l, 1.5).unwrap().len(), 8);
}

#[test]
fn parallel_and_serial_agree_in_order() {
    for code in [BuiltinCode::L2, BuiltinCode::GoldenOrder] {
        let l = builtin(code).unwrap();
        let r = if l.rank() > 4 { 4.0 } else { 14.0 };
        let run = |parallel| {
            let mut v = Vec::new();
            let opts = EnumOptions { parallel, ..EnumOptions::default() };
            enumerate_ball_with(&l, r, &opts, |p| v.push(p.coeffs.to_vec())).unwrap();
            v
        };
        let a = run(true);
        assert_eq!(a, run(false));
        assert_eq!(a, run(true));
    }
}

#[test]
fn counts_are_monotone() {
    let l = builtin(BuiltinCode::L1).unwrap();
    let radii: Vec<f64> = (1..=40).map(|m| m as f64 * 0.75).collect();
    let t = shell_counts(&l, &radii).unwrap();
    assert!(t.counts.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn shell_growth_tracks_rank() {
    let l = builtin(BuiltinCode::Alamouti).unwrap();
    let radii: Vec<f64> = (0..9).map(|i| 4.0 * 2f64.powf(i as f64 / 2.0)).collect();
    let t = shell_counts(&l, &radii).unwrap();
    let counts: Vec<f64> = t.counts.iter().map(|&x| x as f64).collect();
    let f = fit_growth(&radii, &counts, &FitOptions::window(4.0, 64.0)).unwrap();
    assert!((f.slope - 4.0).abs() <= 0.2, "slope {}", f.slope);
}

#[test]
fn node_budget_is_enforced() {
    let l = builtin(BuiltinCode::GoldenOrder).unwrap();
    let opts = EnumOptions { node_budget: 1e5, ..EnumOptions::default() };
    let r = enumerate_ball_with(&l, 40.0, &opts, |_| {});
    assert!(matches!(r, Err(Error::RadiusTooLarge { .. })));
}
