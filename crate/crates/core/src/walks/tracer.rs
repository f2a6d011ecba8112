//! Exact trace of a full `Ŝ` trajectory on a ball.
//!
//! Inside `B(R)` the walk is simulated step by step. When it steps out to a
//! point `z` of the outer boundary, the rest of its life outside the ball is
//! summarised exactly by the entrance law of `B(R)` from `z`: with
//! probability `P̂_z[Ŝ re-enters B(R)]` it re-enters at `y` with probability
//! proportional to `H_{B(R)}(z, y) a(y)`, otherwise it never comes back. No
//! kill radius is involved, so the trace on the ball has the exact law of
//! the untruncated transient walk.

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::error::{domain, Error, Result};
use crate::lattice::{BoxIndex, LatticePoint, LatticeSet};
use crate::potential_kernel::PotentialKernel;
use crate::potential_theory::EntranceLaw;
use crate::walks::{WalkKind, WalkPath};

const INSIDE: u8 = 1;
const OUTER: u8 = 2;
/// `Site::slot` of points inside the ball.
const NO_SLOT: u32 = u32::MAX;

/// Per-site step data: upper halves of the cumulative east/west/north
/// thresholds, and the exit-rule slot for outer-boundary sites.
#[derive(Clone, Copy)]
#[repr(C, align(16))]
struct Site {
    hi: [u32; 3],
    slot: u32,
}

struct ExitRule {
    reenter: f64,
    entrance: Option<WeightedAliasIndex<f64>>,
}

/// Precomputed transition and re-entry tables for `B(R)`.
pub struct BallTracer {
    radius: i64,
    grid: BoxIndex,
    kind: Vec<u8>,
    sites: Vec<Site>,
    /// Lower halves of the thresholds, consulted only on ties of the upper halves.
    lo: Vec<[u32; 3]>,
    rules: Vec<ExitRule>,
    /// Grid indices of the entrance points (inner boundary of the ball).
    entrance_sites: Vec<usize>,
    /// `a(y) hm(y)` over the entrance points; sums to the capacity.
    equilibrium: Vec<f64>,
    offsets: [isize; 4],
    capacity: f64,
}

fn to_threshold(p: f64) -> u64 {
    if p >= 1.0 {
        u64::MAX
    } else {
        (p * 18_446_744_073_709_551_616.0) as u64
    }
}

impl BallTracer {
    pub fn new(radius: i64, kernel: &PotentialKernel) -> Result<Self> {
        if radius < 1 {
            return domain(format!("tracer radius must be >= 1, got {radius}"));
        }
        if 2 * radius + 1 > kernel.exact_radius() {
            return domain(format!(
                "tracer radius {radius} needs an exact kernel window of at least {}",
                2 * radius + 1
            ));
        }
        let ball = LatticeSet::ball(LatticePoint::ORIGIN, radius as f64)?;
        let law = EntranceLaw::new(&ball, kernel)?;
        let grid = BoxIndex::new(radius + 1);
        let mut kind = vec![0u8; grid.len()];
        let mut sites = vec![
            Site {
                hi: [0; 3],
                slot: NO_SLOT
            };
            grid.len()
        ];
        let mut lo = vec![[0u32; 3]; grid.len()];
        for &p in ball.points() {
            let gi = grid.index(p);
            kind[gi] = INSIDE;
            if p.is_origin() {
                continue;
            }
            let w = p.neighbors().map(|q| kernel.potential(q));
            let total: f64 = w.iter().sum();
            let mut acc = 0.0;
            for k in 0..3 {
                acc += w[k] / total;
                let t = to_threshold(acc);
                sites[gi].hi[k] = (t >> 32) as u32;
                lo[gi][k] = t as u32;
            }
        }

        let entrance_sites: Vec<usize> = law.points().iter().map(|&p| grid.index(p)).collect();
        let mut rules = Vec::new();
        for z in ball.outer_boundary() {
            let gi = grid.index(z);
            kind[gi] = OUTER;
            sites[gi].slot = rules.len() as u32;
            let weights = law.hat_entrance(z, kernel)?;
            let reenter: f64 = weights.iter().sum();
            if !(reenter < 1.0) {
                return Err(Error::Degenerate {
                    set: format!("B({radius})"),
                    reason: format!("re-entry probability {reenter} from ({z}) is not below 1"),
                });
            }
            let entrance = if reenter > 0.0 {
                Some(WeightedAliasIndex::new(weights).map_err(|e| Error::Degenerate {
                    set: format!("B({radius})"),
                    reason: format!("entrance weights from ({z}): {e}"),
                })?)
            } else {
                None
            };
            rules.push(ExitRule { reenter, entrance });
        }

        let equilibrium = law
            .harmonic_measure()
            .iter()
            .zip(law.points())
            .map(|(&h, &y)| (h * kernel.potential(y)).max(0.0))
            .collect();
        let w = grid.width as isize;
        Ok(Self {
            radius,
            grid,
            kind,
            sites,
            lo,
            rules,
            entrance_sites,
            equilibrium,
            offsets: [1, -1, w, -w],
            capacity: law.capacity(),
        })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    /// Capacity of the ball, from the same boundary system as the entrance law.
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub(crate) fn grid(&self) -> BoxIndex {
        self.grid
    }

    /// Entrance points of the ball (its inner boundary).
    pub fn entrance_points(&self) -> Vec<LatticePoint> {
        self.entrance_sites.iter().map(|&i| self.grid.point(i)).collect()
    }

    pub(crate) fn entrance_sites(&self) -> &[usize] {
        &self.entrance_sites
    }

    /// Equilibrium measure `a(y) hm(y)` aligned with [`BallTracer::entrance_points`].
    pub fn equilibrium(&self) -> &[f64] {
        &self.equilibrium
    }

    /// Escape probability from each outer-boundary point.
    pub fn escape_probabilities(&self) -> Vec<(LatticePoint, f64)> {
        (0..self.grid.len())
            .filter(|&i| self.kind[i] == OUTER)
            .map(|i| {
                (
                    self.grid.point(i),
                    1.0 - self.rules[self.sites[i].slot as usize].reenter,
                )
            })
            .collect()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.grid.contains(p) && self.kind[self.grid.index(p)] == INSIDE
    }

    /// Follows `Ŝ` from `start` (inside the ball, not the origin) until it
    /// escapes for good, calling `visit` with the grid index of every
    /// site it occupies in the ball (with repetitions) and `on_exit` each
    /// time it leaves the ball. Returns the number of steps taken inside.
    pub fn run<R: Rng + ?Sized>(
        &self,
        start: usize,
        rng: &mut R,
        mut visit: impl FnMut(usize),
        mut on_exit: impl FnMut(),
    ) -> u64 {
        let mut site = start;
        let mut steps = 0u64;
        // two 32-bit draws per u64
        let mut pool = 0u64;
        let mut spare = false;
        loop {
            visit(site);
            let s = self.sites[site];
            let u = if spare {
                spare = false;
                (pool >> 32) as u32
            } else {
                pool = rng.next_u64();
                spare = true;
                pool as u32
            };
            let mut dir = (u > s.hi[0]) as usize + (u > s.hi[1]) as usize + (u > s.hi[2]) as usize;
            if u == s.hi[0] || u == s.hi[1] || u == s.hi[2] {
                // the draw shares its upper half with a threshold: extend it to 64 bits
                let full = ((u as u64) << 32) | (rng.next_u64() >> 32);
                let lo = &self.lo[site];
                dir = (0..3)
                    .filter(|&k| full >= (((s.hi[k] as u64) << 32) | lo[k] as u64))
                    .count();
            }
            let next = (site as isize + self.offsets[dir]) as usize;
            steps += 1;
            let slot = self.sites[next].slot;
            if slot == NO_SLOT {
                site = next;
                continue;
            }
            on_exit();
            let rule = &self.rules[slot as usize];
            if rng.random::<f64>() >= rule.reenter {
                return steps;
            }
            let dist = rule.entrance.as_ref().expect("positive re-entry mass");
            site = self.entrance_sites[dist.sample(rng)];
        }
    }

    /// Index of `p` in the tracer grid, validating the start point.
    pub fn start_index(&self, p: LatticePoint) -> Result<usize> {
        if p.is_origin() || !self.contains(p) {
            return domain(format!("start ({p}) must be a non-origin point of B({})", self.radius));
        }
        Ok(self.grid.index(p))
    }

    /// Traces `Ŝ` from `start` and returns its visits to the ball as a list
    /// of excursions, each a nearest-neighbour path.
    pub fn trace<R: Rng + ?Sized>(&self, start: LatticePoint, rng: &mut R) -> Result<Vec<WalkPath>> {
        let s = self.start_index(start)?;
        let grid = self.grid;
        let mut excursions = vec![WalkPath::new(WalkKind::Hat)];
        let cell = std::cell::RefCell::new(&mut excursions);
        self.run(
            s,
            rng,
            |i| cell.borrow_mut().last_mut().unwrap().steps.push(grid.point(i)),
            || cell.borrow_mut().push(WalkPath::new(WalkKind::Hat)),
        );
        excursions.retain(|e| !e.is_empty());
        Ok(excursions)
    }

    /// Whether `Ŝ` from `start` ever visits any of `targets` (all in the ball).
    pub fn hits_any<R: Rng + ?Sized>(
        &self,
        start: LatticePoint,
        targets: &[LatticePoint],
        rng: &mut R,
    ) -> Result<Vec<bool>> {
        let s = self.start_index(start)?;
        let idx: Vec<usize> = targets
            .iter()
            .map(|&t| {
                if self.contains(t) {
                    Ok(self.grid.index(t))
                } else {
                    domain(format!("target ({t}) lies outside B({})", self.radius))
                }
            })
            .collect::<Result<_>>()?;
        let mut hit = vec![false; targets.len()];
        self.run(
            s,
            rng,
            |i| {
                for (h, &t) in hit.iter_mut().zip(&idx) {
                    *h |= i == t;
                }
            },
            || {},
        );
        Ok(hit)
    }

    /// Number of returns to `start` after time 0 (0 if it never returns).
    pub fn returns_to_start<R: Rng + ?Sized>(&self, start: LatticePoint, rng: &mut R) -> Result<u64> {
        let s = self.start_index(start)?;
        let mut visits = 0u64;
        self.run(s, rng, |i| visits += (i == s) as u64, || {});
        Ok(visits - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;

    #[test]
    fn trace_avoids_origin_and_stays_in_ball() {
        let kernel = PotentialKernel::build(32).unwrap();
        let tracer = BallTracer::new(6, &kernel).unwrap();
        let mut rng = RngSeed::new(11, 0).rng();
        for _ in 0..200 {
            let exc = tracer.trace(LatticePoint::new(2, 1), &mut rng).unwrap();
            assert!(!exc.is_empty());
            for e in &exc {
                assert!(e.is_nearest_neighbor());
                assert!(!e.visits_origin());
                assert!(e.steps.iter().all(|&p| p.norm_sq() <= 36));
            }
        }
    }

    #[test]
    fn escape_probabilities_are_small_and_positive() {
        let kernel = PotentialKernel::build(32).unwrap();
        let tracer = BallTracer::new(8, &kernel).unwrap();
        for (z, e) in tracer.escape_probabilities() {
            assert!(e > 0.0 && e < 0.2, "{z}: {e}");
        }
    }

    #[test]
    fn rejects_bad_starts() {
        let kernel = PotentialKernel::build(32).unwrap();
        let tracer = BallTracer::new(4, &kernel).unwrap();
        let mut rng = RngSeed::new(1, 1).rng();
        assert!(tracer.trace(LatticePoint::new(0, 0), &mut rng).is_err());
        assert!(tracer.trace(LatticePoint::new(5, 0), &mut rng).is_err());
        assert!(BallTracer::new(20, &kernel).is_err());
    }
}
