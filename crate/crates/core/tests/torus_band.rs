use ri2d_core::exec::Execution;
use ri2d_core::lattice::{LatticePoint, LatticeSet};
use ri2d_core::potential_kernel::PotentialKernel;
use ri2d_core::rng::RngSeed;
use ri2d_core::torus::{conditional_uncovered_estimate, predicted_excursions, t_alpha};

// P[0 uncovered at t_alpha] = n^(-2 alpha + o(1)); the o(1) is unquantified,
// so only a factor-2 band is asserted.
#[test]
fn origin_uncovered_rate_within_factor_two() {
    let k = PotentialKernel::build(64).unwrap();
    let set = LatticeSet::new(vec![LatticePoint::ORIGIN]).unwrap();
    for (n, alpha) in [(64, 0.25), (48, 0.3)] {
        let rep = conditional_uncovered_estimate(n, alpha, &set, 1500, RngSeed::new(3, n as u64), &k, Execution::Parallel)
            .unwrap();
        let target = (n as f64).powf(-2.0 * alpha);
        assert!(
            rep.acceptance_rate > target / 2.0 && rep.acceptance_rate < target * 2.0,
            "n={n}: {} vs {target}",
            rep.acceptance_rate
        );
        assert_eq!(rep.estimate.mean, 1.0);
    }
}

#[test]
fn time_and_excursion_scales() {
    let t = t_alpha(1000, 1.0) as f64;
    let want = 4.0 / std::f64::consts::PI * 1000.0f64.powi(2) * 1000.0f64.ln().powi(2);
    assert!((t / want - 1.0).abs() < 1e-9);
    assert!((predicted_excursions(1000, 1.0) - 49.38).abs() < 0.01);
}
