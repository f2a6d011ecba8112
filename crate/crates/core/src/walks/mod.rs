//! Simple random walk and the walk `Ŝ` conditioned never to hit the origin.
//!
//! `Ŝ` jumps from `x ≠ 0` to a neighbour `y` with probability
//! `a(y) / (4 a(x))`; it is the Doob transform of simple random walk by the
//! potential kernel, reversible with respect to `a²`.

mod dirichlet;
mod exit_kernel;
mod tracer;

pub use dirichlet::{dirichlet_hit_prob, escape_probabilities, hm_via_escape, DirichletProblem, DirichletSolution};
pub use exit_kernel::{conditioned_exit_kernel, exit_kernels, ExitKernel};
pub use tracer::BallTracer;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::lattice::LatticePoint;
use crate::potential_kernel::{potential_real, PotentialKernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Srw,
    Hat,
}

/// A nearest-neighbour path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkPath {
    pub steps: Vec<LatticePoint>,
    pub kind: WalkKind,
}

impl WalkPath {
    pub fn new(kind: WalkKind) -> Self {
        Self {
            steps: Vec::new(),
            kind,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_nearest_neighbor(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].is_neighbor(w[1]))
    }

    pub fn visits_origin(&self) -> bool {
        self.steps.iter().any(|p| p.is_origin())
    }
}

/// A path stopped at a kill radius, with the omission bound it carries.
#[derive(Debug, Clone, Serialize)]
pub struct TruncatedRun {
    pub path: WalkPath,
    pub window_radius: f64,
    pub kill_radius: f64,
    /// `a(r)/a(R_k)`: the chance that the walk, killed on leaving `B(R_k)`,
    /// would have come back to the window.
    pub bias_bound: f64,
}

pub fn srw_step<R: Rng + ?Sized>(x: LatticePoint, rng: &mut R) -> LatticePoint {
    x.neighbors()[rng.random_range(0..4)]
}

/// Transition probabilities of `Ŝ` from `x` to its neighbours (east, west,
/// north, south). Inside the exact window they equal `a(y)/(4a(x))` to
/// round-off; the row is normalised so that the asymptotic branch also
/// yields a proper distribution.
pub fn hat_transition(x: LatticePoint, kernel: &PotentialKernel) -> Result<[f64; 4]> {
    if x.is_origin() {
        return domain("the conditioned walk is not defined at the origin");
    }
    let mut w = x.neighbors().map(|y| kernel.potential(y));
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    Ok(w)
}

pub fn hat_step<R: Rng + ?Sized>(x: LatticePoint, kernel: &PotentialKernel, rng: &mut R) -> Result<LatticePoint> {
    let probs = hat_transition(x, kernel)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let nbrs = x.neighbors();
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc && *p > 0.0 {
            return Ok(nbrs[i]);
        }
    }
    // u landed in the round-off gap above the last cumulative sum
    Ok(nbrs[probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)])
}

/// Runs `Ŝ` from `x0` until it first leaves `B(kill_radius)`.
pub fn hat_run_until_escape<R: Rng + ?Sized>(
    x0: LatticePoint,
    window_radius: f64,
    kill_radius: f64,
    kernel: &PotentialKernel,
    rng: &mut R,
) -> Result<TruncatedRun> {
    if x0.is_origin() {
        return domain("the conditioned walk cannot start at the origin");
    }
    if !(window_radius >= 1.0) || !(kill_radius > 2.0 * window_radius) {
        return domain(format!(
            "need kill radius > 2 × window radius >= 2, got r={window_radius}, R_k={kill_radius}"
        ));
    }
    let k2 = kill_radius * kill_radius;
    let mut path = WalkPath::new(WalkKind::Hat);
    let mut x = x0;
    path.steps.push(x);
    while (x.norm_sq() as f64) <= k2 {
        x = hat_step(x, kernel, rng)?;
        path.steps.push(x);
    }
    Ok(TruncatedRun {
        path,
        window_radius,
        kill_radius,
        bias_bound: potential_real(window_radius)? / potential_real(kill_radius)?,
    })
}

/// Runs simple random walk from `x0` until it first leaves `B(radius)`.
pub fn srw_run_until_exit<R: Rng + ?Sized>(x0: LatticePoint, radius: f64, rng: &mut R) -> Result<WalkPath> {
    if !(radius >= 1.0) || !radius.is_finite() {
        return domain(format!("radius must be finite and >= 1, got {radius}"));
    }
    let r2 = radius * radius;
    let mut path = WalkPath::new(WalkKind::Srw);
    let mut x = x0;
    path.steps.push(x);
    while (x.norm_sq() as f64) <= r2 {
        x = srw_step(x, rng);
        path.steps.push(x);
    }
    Ok(path)
}

/// `P̂_x[Ŝ ever hits y] = (a(x) + a(y) − a(x − y)) / (2a(x))`.
pub fn hat_hit_point_prob(x: LatticePoint, y: LatticePoint, kernel: &PotentialKernel) -> Result<f64> {
    if x == y || x.is_origin() || y.is_origin() {
        return domain(format!("need distinct non-zero points, got ({x}) and ({y})"));
    }
    let ax = kernel.potential(x);
    Ok((ax + kernel.potential(y) - kernel.potential(x - y)) / (2.0 * ax))
}

/// `P̂_x[Ŝ returns to x] = 1 − 1/(2a(x))`.
pub fn hat_return_prob(x: LatticePoint, kernel: &PotentialKernel) -> Result<f64> {
    if x.is_origin() {
        return domain("the conditioned walk cannot start at the origin");
    }
    Ok(1.0 - 0.5 / kernel.potential(x))
}

/// `P̂_x[Ŝ never hits B(r)] ≈ 1 − a(r)/a(x)`, clamped to `[0, 1]`; the
/// `O(1/r)` correction in the numerator is dropped.
pub fn hat_escape_ball_prob(x: LatticePoint, r: f64, kernel: &PotentialKernel) -> Result<f64> {
    if !(r >= 1.0) || !(x.norm() >= r + 1.0) {
        return domain(format!("need ‖x‖ >= r + 1 >= 2, got x=({x}), r={r}"));
    }
    Ok((1.0 - potential_real(r)? / kernel.potential(x)).clamp(0.0, 1.0))
}
