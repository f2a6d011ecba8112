//! Exit distribution of `Ŝ` from a ball, computed two ways.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::lattice::{LatticePoint, LatticeSet};
use crate::potential_kernel::PotentialKernel;

/// Agreement required between the two routes.
pub const ROUTE_TOLERANCE: f64 = 1e-10;

/// Exit law of `Ŝ` started at `start` from `B(R)`, over the outer boundary.
#[derive(Debug, Clone, Serialize)]
pub struct ExitKernel {
    pub start: LatticePoint,
    pub radius: i64,
    pub exits: Vec<LatticePoint>,
    /// Route (a): linear algebra on the sub-stochastic `Ŝ` kernel.
    pub hat_route: Vec<f64>,
    /// Route (b): `a(z) P_x[exit at z, avoid 0] / a(x)` from simple random walk.
    pub srw_route: Vec<f64>,
    pub max_route_gap: f64,
}

/// Exit kernels for every start in `B(R) \ {0}`.
pub fn exit_kernels(radius: i64, kernel: &PotentialKernel) -> Result<Vec<ExitKernel>> {
    if radius < 1 || radius > kernel.exact_radius() / 2 {
        return domain(format!(
            "radius must lie in [1, {}], got {radius}",
            kernel.exact_radius() / 2
        ));
    }
    let ball = LatticeSet::ball(LatticePoint::ORIGIN, radius as f64)?;
    let states: Vec<LatticePoint> = ball.points().iter().copied().filter(|p| !p.is_origin()).collect();
    let exits = ball.outer_boundary();
    let n = states.len();
    let m = exits.len();
    let state_of = |q: LatticePoint| states.iter().position(|&s| s == q);
    let exit_of = |q: LatticePoint| exits.iter().position(|&s| s == q);

    let mut hat_q = DMatrix::<f64>::identity(n, n);
    let mut hat_r = DMatrix::<f64>::zeros(n, m);
    let mut srw_q = DMatrix::<f64>::identity(n, n);
    let mut srw_r = DMatrix::<f64>::zeros(n, m);
    for (i, &x) in states.iter().enumerate() {
        let ax = kernel.potential(x);
        for y in x.neighbors() {
            let hat = kernel.potential(y) / (4.0 * ax);
            if let Some(j) = state_of(y) {
                hat_q[(i, j)] -= hat;
                srw_q[(i, j)] -= 0.25;
            } else if let Some(j) = exit_of(y) {
                hat_r[(i, j)] += hat;
                srw_r[(i, j)] += 0.25;
            }
            // the remaining neighbour is the origin: Ŝ never goes there, SRW is killed
        }
    }
    let solve = |q: DMatrix<f64>, r: DMatrix<f64>| {
        q.full_piv_lu().solve(&r).ok_or_else(|| Error::Degenerate {
            set: format!("B({radius}) \\ {{0}}"),
            reason: "singular exit system".into(),
        })
    };
    let hat = solve(hat_q, hat_r)?;
    let srw = solve(srw_q, srw_r)?;

    let mut out = Vec::with_capacity(n);
    for (i, &x) in states.iter().enumerate() {
        let ax = kernel.potential(x);
        let hat_route: Vec<f64> = (0..m).map(|j| hat[(i, j)]).collect();
        let srw_route: Vec<f64> = (0..m).map(|j| kernel.potential(exits[j]) * srw[(i, j)] / ax).collect();
        let gap = hat_route
            .iter()
            .zip(&srw_route)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        out.push(ExitKernel {
            start: x,
            radius,
            exits: exits.clone(),
            hat_route,
            srw_route,
            max_route_gap: gap,
        });
    }
    Ok(out)
}

/// Exit law of `Ŝ` from `B(R)` started at `x`, checked against the
/// reweighted simple-random-walk route to [`ROUTE_TOLERANCE`].
pub fn conditioned_exit_kernel(x: LatticePoint, radius: i64, kernel: &PotentialKernel) -> Result<ExitKernel> {
    if x.is_origin() || x.norm_sq() >= radius * radius {
        return domain(format!("need 0 < ‖x‖ < R, got x=({x}), R={radius}"));
    }
    let k = exit_kernels(radius, kernel)?
        .into_iter()
        .find(|k| k.start == x)
        .expect("start is a state of the ball");
    if !(k.max_route_gap <= ROUTE_TOLERANCE) {
        return Err(Error::Domain(format!(
            "exit routes disagree by {:e} at start ({x})",
            k.max_route_gap
        )));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_agree_and_mass_is_one() {
        let kernel = PotentialKernel::build(16).unwrap();
        let k = conditioned_exit_kernel(LatticePoint::new(1, 0), 3, &kernel).unwrap();
        assert!(k.max_route_gap < 1e-10);
        assert!((k.hat_route.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(conditioned_exit_kernel(LatticePoint::new(0, 0), 3, &kernel).is_err());
        assert!(conditioned_exit_kernel(LatticePoint::new(3, 0), 3, &kernel).is_err());
    }
}
