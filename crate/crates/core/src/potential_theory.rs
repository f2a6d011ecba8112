//! Harmonic measure, capacity and equilibrium measure of finite sets, and
//! hitting distributions from outside points.
//!
//! Everything here rests on the potential-kernel matrix `M_ij = a(x_i − x_j)`
//! of a finite set `A`: the harmonic measure satisfies
//! `Σ_j M_ij hm(x_j) = cap(A)` for all `i`, so
//! `cap(A) = 1 / Σ_ij M⁻¹_ij` and `hm = cap · M⁻¹ 1`. More generally, for
//! `z ∉ A` the hitting distribution `H_A(z, ·)` of simple random walk solves
//!
//! ```text
//! Σ_y H_A(z, y) a(y − w) + e_A(z) = a(z − w)   for all w ∈ A,   Σ_y H_A(z, y) = 1,
//! ```
//!
//! with an unknown scalar `e_A(z)` (optional stopping applied to the martingale
//! `a(S_k − w)`). Harmonic measure is supported on the inner boundary, so all
//! systems are assembled on `∂A` only.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::lattice::{LatticePoint, LatticeSet};
use crate::potential_kernel::{potential_real, PotentialKernel};

/// Condition numbers above this are treated as degenerate.
pub const MAX_CONDITION: f64 = 1e12;

/// Harmonic-measure entries below `-NEGATIVE_TOLERANCE` are reported as degeneracy.
const NEGATIVE_TOLERANCE: f64 = 1e-10;

/// Potential-theoretic profile of a finite set.
#[derive(Debug, Clone, Serialize)]
pub struct PotentialProfile {
    pub set: LatticeSet,
    /// Shift applied before analysis (zero when the set contains the origin).
    pub translation: LatticePoint,
    /// Harmonic measure, aligned with `set.points()`.
    pub hm: Vec<f64>,
    /// Capacity from the inverse-matrix route, `1/Σ M⁻¹_ij`.
    pub cap: f64,
    /// Capacity from `Σ_x a(x) hm(x)` on the (translated) set.
    pub cap_from_potential: f64,
    /// `a(x) hm(x)` on the translated set; sums to `cap`.
    pub equilibrium: Vec<f64>,
    /// 1-norm condition number of the boundary matrix (1 for singletons).
    pub condition: f64,
}

impl PotentialProfile {
    pub fn hm_of(&self, p: LatticePoint) -> Option<f64> {
        self.set.points().iter().position(|&q| q == p).map(|i| self.hm[i])
    }
}

/// Factorised potential-kernel matrix of the inner boundary of a set.
struct BoundarySystem {
    points: Vec<LatticePoint>,
    inverse: DMatrix<f64>,
    /// `M⁻¹ 1`.
    row_sums: DVector<f64>,
    total: f64,
    condition: f64,
}

impl BoundarySystem {
    fn new(points: Vec<LatticePoint>, label: &dyn Fn() -> String, kernel: &PotentialKernel) -> Result<Self> {
        let n = points.len();
        let m = DMatrix::from_fn(n, n, |i, j| kernel.potential(points[i] - points[j]));
        let lu = m.clone().full_piv_lu();
        let inverse = lu.try_inverse().ok_or_else(|| Error::Degenerate {
            set: label(),
            reason: "potential-kernel matrix is singular".into(),
        })?;
        let norm1 = |a: &DMatrix<f64>| {
            a.column_iter()
                .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let condition = norm1(&m) * norm1(&inverse);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::Degenerate {
                set: label(),
                reason: format!("condition number {condition:.3e} exceeds {MAX_CONDITION:e}"),
            });
        }
        let row_sums = &inverse * DVector::from_element(n, 1.0);
        let total = row_sums.sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate {
                set: label(),
                reason: format!("sum of inverse entries is {total:e}, not positive"),
            });
        }
        Ok(Self {
            points,
            inverse,
            row_sums,
            total,
            condition,
        })
    }

    fn capacity(&self) -> f64 {
        1.0 / self.total
    }

    fn harmonic_measure(&self) -> Vec<f64> {
        self.row_sums.iter().map(|v| v / self.total).collect()
    }

    /// Hitting distribution from `z` over `self.points`.
    fn hitting_distribution(&self, z: LatticePoint, kernel: &PotentialKernel) -> Vec<f64> {
        if let Some(i) = self.points.iter().position(|&p| p == z) {
            let mut h = vec![0.0; self.points.len()];
            h[i] = 1.0;
            return h;
        }
        let rhs = DVector::from_iterator(self.points.len(), self.points.iter().map(|&w| kernel.potential(z - w)));
        let v = &self.inverse * rhs;
        let shift = (v.sum() - 1.0) / self.total;
        v.iter()
            .zip(self.row_sums.iter())
            .map(|(vi, ui)| vi - shift * ui)
            .collect()
    }
}

/// Harmonic measure, capacity and equilibrium measure of `set`.
///
/// Sets without the origin are first translated so that their first point
/// sits at the origin. Interior points get zero harmonic measure.
pub fn analyze(set: &LatticeSet, kernel: &PotentialKernel) -> Result<PotentialProfile> {
    let translation = if set.contains_origin() {
        LatticePoint::ORIGIN
    } else {
        -set.points()[0]
    };
    if set.len() == 1 {
        return Ok(PotentialProfile {
            set: set.clone(),
            translation,
            hm: vec![1.0],
            cap: 0.0,
            cap_from_potential: 0.0,
            equilibrium: vec![0.0],
            condition: 1.0,
        });
    }
    let moved = set.translate(translation);
    let boundary = moved.inner_boundary();
    let label = || set.to_string();
    let system = BoundarySystem::new(boundary, &label, kernel)?;
    let cap = system.capacity();
    let hm_boundary = system.harmonic_measure();
    if let Some(min) = hm_boundary.iter().copied().reduce(f64::min) {
        if min < -NEGATIVE_TOLERANCE {
            return Err(Error::Degenerate {
                set: set.to_string(),
                reason: format!("negative harmonic measure {min:e}"),
            });
        }
    }

    let mut hm = vec![0.0; set.len()];
    let mut equilibrium = vec![0.0; set.len()];
    let mut bi = 0;
    for (i, &p) in moved.points().iter().enumerate() {
        if bi < system.points.len() && system.points[bi] == p {
            let h = hm_boundary[bi].max(0.0);
            hm[i] = h;
            equilibrium[i] = kernel.potential(p) * h;
            bi += 1;
        }
    }
    let cap_from_potential = equilibrium.iter().sum();

    Ok(PotentialProfile {
        set: set.clone(),
        translation,
        hm,
        cap,
        cap_from_potential,
        equilibrium,
        condition: system.condition,
    })
}

/// Closed-form capacity of a three-point set.
pub fn capacity_three_point(
    x1: LatticePoint,
    x2: LatticePoint,
    x3: LatticePoint,
    kernel: &PotentialKernel,
) -> Result<f64> {
    if x1 == x2 || x2 == x3 || x1 == x3 {
        return domain(format!(
            "three-point capacity needs distinct points, got ({x1}), ({x2}), ({x3})"
        ));
    }
    let a1 = kernel.potential(x2 - x1);
    let a2 = kernel.potential(x3 - x2);
    let a3 = kernel.potential(x1 - x3);
    Ok(triangle_formula(a1, a2, a3))
}

/// `a1 a2 a3 / (a1 a2 + a1 a3 + a2 a3 − (a1² + a2² + a3²)/2)`.
pub(crate) fn triangle_formula(a1: f64, a2: f64, a3: f64) -> f64 {
    // sorted so the result is bitwise symmetric in its arguments
    let mut v = [a1, a2, a3];
    v.sort_by(f64::total_cmp);
    let [a1, a2, a3] = v;
    let denom = a1 * a2 + a1 * a3 + a2 * a3 - 0.5 * (a1 * a1 + a2 * a2 + a3 * a3);
    a1 * a2 * a3 / denom
}

/// Asymptotic capacity of the ball `B(r)`: `a(r)`, accurate to `O(1/r)`.
pub fn capacity_ball(r: f64, _kernel: &PotentialKernel) -> Result<f64> {
    potential_real(r)
}

/// Leading-order capacity of `{0} ∪ B(y, r)` for a distant ball:
/// `a(y)² / (2a(y) − a(r))`. The `O(r⁻¹)` and `O(r/‖y‖)` corrections are dropped.
pub fn capacity_distant_union(y: LatticePoint, r: f64, kernel: &PotentialKernel) -> Result<f64> {
    if !(r >= 0.5) || !(y.norm() > 2.0 * r) {
        return domain(format!("capacity_distant_union needs ‖y‖ > 2r ≥ 1, got y=({y}), r={r}"));
    }
    let ay = kernel.potential(y);
    let ar = potential_real(r)?;
    Ok(ay * ay / (2.0 * ay - ar))
}

/// Entrance law into a finite set for simple random walk and for the
/// conditioned walk `Ŝ`.
///
/// The origin is always added to the set, so that walks entering the set
/// cannot have visited the origin before; `Ŝ` entrance weights then follow
/// from the h-transform: `P̂_z[enter at y] = H(z, y) a(y) / a(z)`.
pub struct EntranceLaw {
    system: BoundarySystem,
    members: std::collections::HashSet<LatticePoint>,
}

impl EntranceLaw {
    pub fn new(set: &LatticeSet, kernel: &PotentialKernel) -> Result<Self> {
        let mut points = set.points().to_vec();
        if !set.contains_origin() {
            points.push(LatticePoint::ORIGIN);
        }
        let full = LatticeSet::new(points)?;
        if full.len() < 2 {
            return domain("entrance law needs a set with at least one non-origin point");
        }
        let members = full.points().iter().copied().collect();
        let label = || full.to_string();
        let system = BoundarySystem::new(full.inner_boundary(), &label, kernel)?;
        Ok(Self { system, members })
    }

    /// Points carrying the entrance distribution (inner boundary of the set with the origin).
    pub fn points(&self) -> &[LatticePoint] {
        &self.system.points
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.members.contains(&p)
    }

    /// Capacity of the set with the origin added.
    pub fn capacity(&self) -> f64 {
        self.system.capacity()
    }

    /// Harmonic measure over [`EntranceLaw::points`].
    pub fn harmonic_measure(&self) -> Vec<f64> {
        self.system.harmonic_measure()
    }

    /// Simple-random-walk hitting distribution from `z` over [`EntranceLaw::points`].
    pub fn srw_hitting(&self, z: LatticePoint, kernel: &PotentialKernel) -> Vec<f64> {
        self.system.hitting_distribution(z, kernel)
    }

    /// Sub-probability entrance distribution of `Ŝ` started at `z ≠ 0`;
    /// its mass is `P̂_z[Ŝ ever enters the set]`. Tiny negative round-off is
    /// clipped to zero.
    pub fn hat_entrance(&self, z: LatticePoint, kernel: &PotentialKernel) -> Result<Vec<f64>> {
        if z.is_origin() {
            return domain("the conditioned walk cannot start at the origin");
        }
        let az = kernel.potential(z);
        let h = self.system.hitting_distribution(z, kernel);
        Ok(h.iter()
            .zip(&self.system.points)
            .map(|(&hy, &y)| (hy * kernel.potential(y) / az).max(0.0))
            .collect())
    }

    /// `P̂_z[Ŝ ever enters the set]`, clamped to `[0, 1]`.
    pub fn hat_hit_probability(&self, z: LatticePoint, kernel: &PotentialKernel) -> Result<f64> {
        if self.contains(z) {
            return Ok(1.0);
        }
        Ok(self.hat_entrance(z, kernel)?.iter().sum::<f64>().clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::OnceLock;

    fn kernel() -> &'static PotentialKernel {
        static K: OnceLock<PotentialKernel> = OnceLock::new();
        K.get_or_init(|| PotentialKernel::build(64).unwrap())
    }

    fn p(x: i64, y: i64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    fn set(pts: &[(i64, i64)]) -> LatticeSet {
        LatticeSet::new(pts.iter().map(|&q| q.into()).collect()).unwrap()
    }

    #[test]
    fn singleton_has_zero_capacity() {
        let prof = analyze(&set(&[(0, 0)]), kernel()).unwrap();
        assert_eq!(prof.cap, 0.0);
        assert_eq!(prof.hm, vec![1.0]);
    }

    #[test]
    fn two_points() {
        let prof = analyze(&set(&[(0, 0), (1, 0)]), kernel()).unwrap();
        assert!((prof.cap - 0.5).abs() < 1e-12);
        assert_eq!(prof.hm[0], prof.hm[1]);
        assert!((prof.hm[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn triangle_routes_agree() {
        let k = kernel();
        let prof = analyze(&set(&[(0, 0), (1, 0), (0, 1)]), k).unwrap();
        let expected = PI / (2.0 * (PI - 1.0));
        assert!((prof.cap - expected).abs() < 1e-12);
        let closed = capacity_three_point(p(0, 0), p(1, 0), p(0, 1), k).unwrap();
        assert!((closed - expected).abs() < 1e-12);
        let line = analyze(&set(&[(0, 0), (1, 0), (2, 0)]), k).unwrap();
        let closed = capacity_three_point(p(0, 0), p(1, 0), p(2, 0), k).unwrap();
        assert!((line.cap - closed).abs() < 1e-9);
        assert!(capacity_three_point(p(0, 0), p(0, 0), p(2, 0), k).is_err());
    }

    #[test]
    fn translated_sets() {
        let k = kernel();
        let a = analyze(&set(&[(3, 4), (4, 4), (3, 6)]), k).unwrap();
        let b = analyze(&set(&[(0, 0), (1, 0), (0, 2)]), k).unwrap();
        assert_eq!(a.translation, p(-3, -4));
        assert!((a.cap - b.cap).abs() < 1e-12);
    }

    #[test]
    fn ball_interior_gets_no_harmonic_measure() {
        let k = kernel();
        let ball = LatticeSet::ball(LatticePoint::ORIGIN, 5.0).unwrap();
        let prof = analyze(&ball, k).unwrap();
        assert_eq!(prof.hm_of(LatticePoint::ORIGIN), Some(0.0));
        assert!((prof.hm.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((prof.cap - prof.cap_from_potential).abs() < 1e-9);
        assert!((prof.equilibrium.iter().sum::<f64>() - prof.cap).abs() < 1e-9);
    }

    #[test]
    fn distant_union_preconditions() {
        let k = kernel();
        assert!(capacity_distant_union(p(3, 0), 2.0, k).is_err());
        let c4 = capacity_distant_union(p(40, 0), 4.0, k).unwrap();
        let c5 = capacity_distant_union(p(40, 0), 5.0, k).unwrap();
        assert!(c5 > c4);
        let ay = k.potential(p(40, 0));
        let ar = potential_real(4.0).unwrap();
        assert!((c4 - ay * ay / (2.0 * ay - ar)).abs() < 1e-15);
    }

    #[test]
    fn entrance_law_two_point_closed_form() {
        // P̂_x[hit y] = (a(x) + a(y) − a(x − y)) / (2 a(x))
        let k = kernel();
        let y = p(2, -1);
        let law = EntranceLaw::new(&set(&[(2, -1)]), k).unwrap();
        for x in [p(1, 0), p(-3, 2), p(7, 7), p(0, -9)] {
            let got = law.hat_hit_probability(x, k).unwrap();
            let want = (k.potential(x) + k.potential(y) - k.potential(x - y)) / (2.0 * k.potential(x));
            assert!((got - want).abs() < 1e-12, "{x}: {got} vs {want}");
        }
    }

    #[test]
    fn srw_hitting_is_a_distribution_and_tends_to_hm() {
        let k = kernel();
        let tri = set(&[(0, 0), (2, 0), (0, 3)]);
        let law = EntranceLaw::new(&tri, k).unwrap();
        let h = law.srw_hitting(p(5, 1), k);
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(h.iter().all(|&v| v > -1e-12));
        let far = law.srw_hitting(p(60, 0), k);
        let hm = law.harmonic_measure();
        for (a, b) in far.iter().zip(&hm) {
            assert!((a - b).abs() < 0.05);
        }
    }
}
