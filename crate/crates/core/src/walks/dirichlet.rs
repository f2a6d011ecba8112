//! Exact finite-domain hitting probabilities for simple random walk.

use std::collections::HashMap;

use crate::error::{domain, Error, Result};
use crate::lattice::{BoxIndex, LatticePoint, LatticeSet};

/// Largest supported domain radius.
pub const MAX_DOMAIN_RADIUS: i64 = 512;

const TOLERANCE: f64 = 1e-12;

/// Hitting problem in `B(R)`: the walk is stopped on `absorbing ∪ ∂B(R)`
/// (inner boundary of the ball) and scores 1 if it stops on `target`.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub domain_radius: i64,
    pub absorbing: Vec<LatticePoint>,
    pub target: Vec<LatticePoint>,
}

/// Harmonic function of a solved [`DirichletProblem`].
#[derive(Debug, Clone)]
pub struct DirichletSolution {
    grid: BoxIndex,
    /// NaN outside the ball.
    values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl DirichletSolution {
    /// Value at `p`; `None` outside `B(R)`.
    pub fn value(&self, p: LatticePoint) -> Option<f64> {
        if !self.grid.contains(p) {
            return None;
        }
        let v = self.values[self.grid.index(p)];
        (!v.is_nan()).then_some(v)
    }
}

impl DirichletProblem {
    pub fn new(domain_radius: i64, absorbing: Vec<LatticePoint>, target: Vec<LatticePoint>) -> Self {
        Self {
            domain_radius,
            absorbing,
            target,
        }
    }

    /// Solves the discrete Laplace equation by conjugate gradients.
    pub fn solve(&self) -> Result<DirichletSolution> {
        let r = self.domain_radius;
        if r < 1 {
            return domain(format!("domain radius must be >= 1, got {r}"));
        }
        if r > MAX_DOMAIN_RADIUS {
            return Err(Error::Capacity(format!(
                "domain radius {r} exceeds the cap {MAX_DOMAIN_RADIUS}"
            )));
        }
        let ball = LatticeSet::ball(LatticePoint::ORIGIN, r as f64)?;
        let grid = BoxIndex::new(r);
        let in_ball = |p: LatticePoint| p.norm_sq() <= r * r;

        // 0: interior unknown, 1: absorbing with value 0, 2: target (value 1)
        let mut kind: HashMap<LatticePoint, u8> = HashMap::new();
        for p in ball.inner_boundary() {
            kind.insert(p, 1);
        }
        for &p in &self.absorbing {
            if !in_ball(p) {
                return domain(format!("absorbing point ({p}) lies outside B({r})"));
            }
            kind.insert(p, 1);
        }
        for &p in &self.target {
            match kind.get(&p) {
                Some(_) => {
                    kind.insert(p, 2);
                }
                None => {
                    return domain(format!(
                        "target point ({p}) is neither absorbing nor on the boundary of B({r})"
                    ))
                }
            }
        }

        let mut values = vec![f64::NAN; grid.len()];
        let mut unknown_of = vec![usize::MAX; grid.len()];
        let mut unknowns = Vec::new();
        for &p in ball.points() {
            let gi = grid.index(p);
            match kind.get(&p) {
                Some(2) => values[gi] = 1.0,
                Some(_) => values[gi] = 0.0,
                None => {
                    unknown_of[gi] = unknowns.len();
                    unknowns.push(p);
                }
            }
        }

        // A u = b with A = I − P restricted to unknowns (symmetric positive definite).
        let n = unknowns.len();
        let mut nbr_idx: Vec<[usize; 4]> = Vec::with_capacity(n);
        let mut b = vec![0.0; n];
        for (i, &p) in unknowns.iter().enumerate() {
            let mut idx = [usize::MAX; 4];
            for (k, q) in p.neighbors().into_iter().enumerate() {
                // interior points of the ball have all neighbours inside it
                let gi = grid.index(q);
                if unknown_of[gi] != usize::MAX {
                    idx[k] = unknown_of[gi];
                } else {
                    b[i] += 0.25 * values[gi];
                }
            }
            nbr_idx.push(idx);
        }
        let apply = |u: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let mut s = 0.0;
                for &j in &nbr_idx[i] {
                    if j != usize::MAX {
                        s += u[j];
                    }
                }
                out[i] = u[i] - 0.25 * s;
            }
        };

        let mut u = vec![0.0; n];
        let mut res = b.clone();
        let mut dir = res.clone();
        let mut ad = vec![0.0; n];
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut rr = dot(&res, &res);
        let mut iterations = 0;
        let max_iter = 20 * n + 100;
        while rr.sqrt() > TOLERANCE * 0.1 && iterations < max_iter {
            apply(&dir, &mut ad);
            let step = rr / dot(&dir, &ad);
            for i in 0..n {
                u[i] += step * dir[i];
                res[i] -= step * ad[i];
            }
            let rr_new = dot(&res, &res);
            let beta = rr_new / rr;
            for i in 0..n {
                dir[i] = res[i] + beta * dir[i];
            }
            rr = rr_new;
            iterations += 1;
        }
        // true residual, not the recursively updated one
        apply(&u, &mut ad);
        let residual = ad.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if residual > TOLERANCE {
            return Err(Error::Domain(format!(
                "Dirichlet solve stalled at residual {residual:e} after {iterations} iterations"
            )));
        }
        for (i, &p) in unknowns.iter().enumerate() {
            values[grid.index(p)] = u[i];
        }
        Ok(DirichletSolution {
            grid,
            values,
            iterations,
            residual,
        })
    }
}

/// `P_start[walk stops on target]`; boundary starts return their boundary value.
pub fn dirichlet_hit_prob(problem: &DirichletProblem, start: LatticePoint) -> Result<f64> {
    let r = problem.domain_radius;
    if start.norm_sq() > r * r {
        return domain(format!("start ({start}) lies outside B({r})"));
    }
    let sol = problem.solve()?;
    Ok(sol.value(start).expect("start inside the ball"))
}

/// `P_x[τ₁(∂B(R)) < τ₁(A)]` for every `x ∈ A`, by one-step analysis of the
/// harmonic function with target `∂B(R)` and absorbing set `A ∪ ∂B(R)`.
pub fn escape_probabilities(set: &LatticeSet, radius: i64) -> Result<Vec<f64>> {
    let ball = LatticeSet::ball(LatticePoint::ORIGIN, radius as f64)?;
    let boundary = ball.inner_boundary();
    for &p in set.points() {
        if p.norm_sq() > radius * radius || boundary.contains(&p) {
            return domain(format!("set point ({p}) must lie strictly inside B({radius})"));
        }
    }
    let problem = DirichletProblem::new(radius, set.points().to_vec(), boundary);
    let sol = problem.solve()?;
    Ok(set
        .points()
        .iter()
        .map(|&x| {
            0.25 * x
                .neighbors()
                .iter()
                .map(|&w| {
                    if set.contains(w) {
                        0.0
                    } else {
                        sol.value(w).unwrap_or(1.0)
                    }
                })
                .sum::<f64>()
        })
        .collect())
}

/// Finite-`R` harmonic measure estimate `(2/π) ln R · P_x[escape]`, together
/// with its normalised version (the `1/ln R` correction is common to all
/// points, so normalising removes it to leading order).
pub fn hm_via_escape(set: &LatticeSet, radius: i64) -> Result<(Vec<f64>, Vec<f64>)> {
    let esc = escape_probabilities(set, radius)?;
    let scale = std::f64::consts::FRAC_2_PI * (radius as f64).ln();
    let raw: Vec<f64> = esc.iter().map(|e| e * scale).collect();
    let total: f64 = esc.iter().sum();
    let normalized = esc.iter().map(|e| e / total).collect();
    Ok((raw, normalized))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential_kernel::{potential_real, PotentialKernel};

    fn p(x: i64, y: i64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    fn sphere(r: i64) -> Vec<LatticePoint> {
        LatticeSet::ball(LatticePoint::ORIGIN, r as f64)
            .unwrap()
            .inner_boundary()
    }

    #[test]
    fn boundary_starts() {
        let prob = DirichletProblem::new(6, vec![p(0, 0)], sphere(6));
        assert_eq!(dirichlet_hit_prob(&prob, p(6, 0)).unwrap(), 1.0);
        assert_eq!(dirichlet_hit_prob(&prob, p(0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_starts_agree() {
        let prob = DirichletProblem::new(10, vec![p(0, 0)], sphere(10));
        let sol = prob.solve().unwrap();
        let v = sol.value(p(3, 1)).unwrap();
        for q in p(3, 1).dihedral_images() {
            assert!((sol.value(q).unwrap() - v).abs() < 1e-11);
        }
    }

    #[test]
    fn avoid_origin_matches_potential_ratio() {
        let k = PotentialKernel::build(64).unwrap();
        let prob = DirichletProblem::new(64, vec![p(0, 0)], sphere(64));
        let sol = prob.solve().unwrap();
        for x in [p(1, 0), p(5, 3), p(20, 0)] {
            let exact = sol.value(x).unwrap();
            let approx = k.potential(x) / potential_real(64.0).unwrap();
            assert!((exact - approx).abs() / exact < 0.02, "{x}: {exact} vs {approx}");
        }
    }

    #[test]
    fn inconsistent_problems_rejected() {
        let prob = DirichletProblem::new(5, vec![p(0, 0)], vec![p(1, 1)]);
        assert!(prob.solve().is_err());
        let prob = DirichletProblem::new(5, vec![p(9, 0)], vec![]);
        assert!(prob.solve().is_err());
        let prob = DirichletProblem::new(MAX_DOMAIN_RADIUS + 1, vec![], vec![]);
        assert!(matches!(prob.solve(), Err(Error::Capacity(_))));
    }
}
