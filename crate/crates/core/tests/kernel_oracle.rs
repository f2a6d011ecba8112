mod common;

use ri2d_core::lattice::LatticePoint;
use ri2d_core::potential_kernel::{gamma_prime, PotentialKernel};
use std::f64::consts::PI;

#[test]
fn quadrature_matches_rational_recursion() {
    let exact = common::exact_kernel(12);
    let k = PotentialKernel::build(64).unwrap();
    let mut worst: f64 = 0.0;
    for (x, col) in exact.iter().enumerate() {
        for (y, v) in col.iter().enumerate() {
            let got = k.potential(LatticePoint::new(x as i64, y as i64));
            worst = worst.max((got - v.to_f64()).abs());
        }
    }
    assert!(worst < 1e-12, "worst deviation {worst:e}");
}

#[test]
fn rational_recursion_closed_forms() {
    let exact = common::exact_kernel(3);
    assert!((exact[2][0].to_f64() - (4.0 - 8.0 / PI)).abs() < 1e-15);
    assert!((exact[2][1].to_f64() - (8.0 / PI - 1.0)).abs() < 1e-15);
    assert!((exact[3][0].to_f64() - (17.0 - 48.0 / PI)).abs() < 1e-14);
}

#[test]
fn dihedral_invariance() {
    let k = PotentialKernel::build(64).unwrap();
    for x in -40..=40 {
        for y in -40..=40 {
            let p = LatticePoint::new(x, y);
            let a = k.potential(p);
            for q in p.dihedral_images() {
                assert_eq!(k.potential(q).to_bits(), a.to_bits(), "({p}) vs ({q})");
            }
        }
    }
}

#[test]
fn asymptotic_error_decays() {
    let k = PotentialKernel::build(256).unwrap();
    let err = |r: i64| {
        let p = LatticePoint::new(r, 0);
        (k.potential(p) - (2.0 / PI * (r as f64).ln() + gamma_prime())).abs()
    };
    // the leading correction is O(‖x‖^-2)
    let (e16, e32, e128) = (err(16), err(32), err(128));
    assert!(e32 < e16 / 3.0 && e128 < 1e-5, "{e16:e} {e32:e} {e128:e}");
}

#[test]
fn harmonic_off_origin_on_full_table() {
    let k = PotentialKernel::build(128).unwrap();
    let mut worst: f64 = 0.0;
    for x in -127..=127 {
        for y in -127..=127 {
            let p = LatticePoint::new(x, y);
            if p.is_origin() || p.norm_inf() >= 127 {
                continue;
            }
            let mean: f64 = p.neighbors().iter().map(|&n| k.potential(n)).sum::<f64>() / 4.0;
            worst = worst.max((mean - k.potential(p)).abs());
        }
    }
    assert!(worst < 1e-12, "{worst:e}");
}
