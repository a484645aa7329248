use detsum_core::constructions::{builtin, cyclic_algebra_lattice, qi_over_q, BuiltinCode, CyclicAlgebraSpec};
use detsum_core::detsum::{
    dedekind_zeta_qi_truncated, inverse_det_sum, inverse_det_sum_with, unit_count, DetSumOptions, ZeroDetPolicy,
};
use detsum_core::enumeration::norm_power_sum;
use detsum_core::gaussian::GaussInt;
use detsum_core::{build_lattice, Error};

#[test]
fn normalized_sum_is_scale_free() {
    let l = builtin(BuiltinCode::L1).unwrap();
    let c = 1.7;
    let scaled = build_lattice(l.basis().iter().map(|b| b.scale(c)).collect(), None).unwrap();
    assert!((scaled.covolume() - c.powi(4) * l.covolume()).abs() < 1e-9 * scaled.covolume());
    let radii = [6.0, 11.0, 17.0];
    let a = inverse_det_sum(&l, 2, &radii).unwrap();
    let b = inverse_det_sum(&scaled, 2, &radii.map(|r| r * c)).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.count, y.count);
        assert!((x.normalized - y.normalized).abs() <= 1e-9 * x.normalized);
        let direct = l.covolume().powf(2.0 * 2.0 / 4.0) * x.sum;
        assert!((x.normalized - direct).abs() <= 1e-9 * direct);
    }
}

#[test]
fn exact_and_float_paths_give_the_same_sum() {
    let l = builtin(BuiltinCode::L2).unwrap();
    let raw = build_lattice(l.basis().to_vec(), None).unwrap();
    let a = inverse_det_sum(&l, 2, &[10.0, 20.0]).unwrap();
    let b = inverse_det_sum(&raw, 2, &[10.0, 20.0]).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!((x.sum - y.sum).abs() <= 1e-9 * x.sum);
    }
}

#[test]
fn zero_determinants_need_an_explicit_policy() {
    // γ = 1 splits the algebra: x = 1 + u has reduced norm 0
    let split = CyclicAlgebraSpec::new(qi_over_q(), GaussInt::ONE).unwrap();
    let l = cyclic_algebra_lattice(&split).unwrap();
    assert!(matches!(inverse_det_sum(&l, 2, &[3.0]), Err(Error::ZeroDeterminantEncountered { .. })));
    let opts = DetSumOptions { zero_policy: ZeroDetPolicy::Skip, ..DetSumOptions::default() };
    let t = inverse_det_sum_with(&l, 2, &[3.0], &opts).unwrap();
    assert!(t.skipped_zero > 0);
    assert!(t.rows[0].sum.is_finite());
}

#[test]
fn unit_counts_of_quaternion_codes() {
    let radii = [2.0, 8.0, 32.0];
    assert_eq!(unit_count(&builtin(BuiltinCode::Alamouti).unwrap(), &radii).unwrap(), vec![8, 8, 8]);
    assert_eq!(unit_count(&builtin(BuiltinCode::L2).unwrap(), &radii).unwrap(), vec![4, 4, 4]);
    let l1 = unit_count(&builtin(BuiltinCode::L1).unwrap(), &radii).unwrap();
    assert!(l1[0] < l1[1] && l1[1] < l1[2]);
}

/// `ζ_{ℚ(i)}(s)` truncated at norm `N`, from the four associates of every
/// nonzero Gaussian integer.
fn zeta_oracle(s: f64, n_max: i64) -> f64 {
    let r = (n_max as f64).sqrt() as i64 + 1;
    let mut terms = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let n = a * a + b * b;
            if n > 0 && n <= n_max {
                terms.push((n as f64).powf(-s));
            }
        }
    }
    terms.sort_by(|x, y| y.total_cmp(x));
    terms.iter().sum::<f64>() / 4.0
}

#[test]
fn truncated_zeta_matches_lattice_oracle() {
    let z = dedekind_zeta_qi_truncated(2.0, 10_000).unwrap();
    assert!((z - zeta_oracle(2.0, 10_000)).abs() < 1e-3);
    let z3 = dedekind_zeta_qi_truncated(3.0, 2_000).unwrap();
    assert!((z3 - zeta_oracle(3.0, 2_000)).abs() < 1e-9);
    assert!(dedekind_zeta_qi_truncated(0.5, 10).is_err());
}

#[test]
fn epstein_sum_of_gaussian_integers() {
    let l = builtin(BuiltinCode::Gaussian).unwrap();
    let s = norm_power_sum(&l, -4.0, 60.0).unwrap();
    // Σ |z|^{-4} over ℤ[i] \ 0 = 4 ζ_{ℚ(i)}(2)
    let limit = 4.0 * zeta_oracle(2.0, 1_000_000);
    assert!((s - limit).abs() / limit < 0.01);
}
