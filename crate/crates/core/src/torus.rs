//! Simple random walk on the torus `Z_n²`.
//!
//! The walk starts from a uniform site and runs for
//! `t_α = round((4α/π) n² ln² n)` steps. Besides the covered set it records
//! the excursions between the inner boundaries of `A = B(n/(3 ln n))` and
//! `A' = B(n/3)`, both centred at the origin:
//! `D_0` is the first visit to `∂A'`, `J_k` the first visit to `∂A` after
//! `D_{k−1}` and `D_k` the first visit to `∂A'` after `J_k`.

use std::f64::consts::PI;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::estimators::{Estimate, DEFAULT_CI_LEVEL};
use crate::exec::{map_replicas, Execution};
use crate::interlacements::vacancy_prob;
use crate::lattice::{LatticePoint, LatticeSet};
use crate::potential_kernel::PotentialKernel;
use crate::rng::RngSeed;

/// Smallest supported side (so that `n/(3 ln n) ≥ 1`).
pub const MIN_SIDE: i64 = 16;
/// Largest side for which the full covered bitmap is kept.
pub const MAX_SIDE: i64 = 8192;
/// Largest side accepted by [`cover_time`].
pub const MAX_COVER_SIDE: i64 = 512;
/// Accepted runs required by [`conditional_uncovered_estimate`].
pub const MIN_ACCEPTED: u64 = 50;

/// `round((4α/π) n² ln² n)`.
pub fn t_alpha(n: i64, alpha: f64) -> u64 {
    let nf = n as f64;
    (4.0 * alpha / PI * nf * nf * nf.ln().powi(2)).round() as u64
}

/// Typical excursion count `2α ln²n / ln ln n` by time `t_α`.
pub fn predicted_excursions(n: i64, alpha: f64) -> f64 {
    let l = (n as f64).ln();
    2.0 * alpha * l * l / l.ln()
}

/// Which part of the torus is reported as uncovered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UncoveredWindow {
    /// Sites of the torus ball `B(0, r)`.
    Ball(f64),
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorusConfig {
    pub n: i64,
    pub alpha: f64,
    pub seed: RngSeed,
    pub window: UncoveredWindow,
}

impl TorusConfig {
    /// Configuration with the default window `B(0, n/8)`.
    pub fn new(n: i64, alpha: f64, seed: RngSeed) -> Self {
        Self {
            n,
            alpha,
            seed,
            window: UncoveredWindow::Ball(n as f64 / 8.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_SIDE {
            return Err(Error::Config(format!(
                "torus side must be >= {MIN_SIDE}, got {}",
                self.n
            )));
        }
        if self.n > MAX_SIDE {
            return Err(Error::Capacity(format!(
                "torus side {} exceeds the cap {MAX_SIDE}",
                self.n
            )));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!(
                "α must be positive and finite, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    pub fn t_alpha(&self) -> u64 {
        t_alpha(self.n, self.alpha)
    }
}

const CLASS_INNER: u8 = 1;
const CLASS_OUTER: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Before `D_0`.
    Initial,
    /// After some `D_k`, waiting for `J_{k+1}`.
    SeekInner,
    /// After some `J_k`, waiting for `D_k`.
    SeekOuter,
}

/// Resumable torus walk with covering and excursion bookkeeping.
pub struct TorusSimulation<R: RngCore> {
    n: i64,
    rng: R,
    x: i64,
    y: i64,
    time: u64,
    covered: Vec<bool>,
    uncovered: u64,
    class: Vec<u8>,
    phase: Phase,
    d0: Option<u64>,
    starts: Vec<u64>,
    ends: Vec<u64>,
    pool: u64,
    bits_left: u32,
}

/// Torus site of `p` (reduced mod `n`).
fn wrap(n: i64, p: LatticePoint) -> (i64, i64) {
    (p.x.rem_euclid(n), p.y.rem_euclid(n))
}

/// Representative of a torus site in `(−n/2, n/2]²`.
fn centred(n: i64, x: i64, y: i64) -> LatticePoint {
    let c = |v: i64| if v > n / 2 { v - n } else { v };
    LatticePoint::new(c(x), c(y))
}

/// Inner boundaries of `B(n/(3 ln n))` and `B(n/3)`.
pub fn excursion_boundaries(n: i64) -> Result<(Vec<LatticePoint>, Vec<LatticePoint>)> {
    let nf = n as f64;
    let inner = LatticeSet::ball(LatticePoint::ORIGIN, nf / (3.0 * nf.ln()))?;
    let outer = LatticeSet::ball(LatticePoint::ORIGIN, nf / 3.0)?;
    Ok((inner.inner_boundary(), outer.inner_boundary()))
}

impl<R: RngCore> TorusSimulation<R> {
    /// Places the walk at a uniform site of `Z_n²`.
    pub fn new(n: i64, mut rng: R) -> Result<Self> {
        if !(MIN_SIDE..=MAX_SIDE).contains(&n) {
            return domain(format!("torus side must lie in [{MIN_SIDE}, {MAX_SIDE}], got {n}"));
        }
        let x = rng.random_range(0..n);
        let y = rng.random_range(0..n);
        Self::with_start(n, rng, (x, y))
    }

    fn with_start(n: i64, rng: R, (x, y): (i64, i64)) -> Result<Self> {
        let cells = (n * n) as usize;
        let mut class = vec![0u8; cells];
        let (inner, outer) = excursion_boundaries(n)?;
        for p in inner {
            let (a, b) = wrap(n, p);
            class[(b * n + a) as usize] = CLASS_INNER;
        }
        for p in outer {
            let (a, b) = wrap(n, p);
            class[(b * n + a) as usize] = CLASS_OUTER;
        }
        let mut sim = Self {
            n,
            rng,
            x,
            y,
            time: 0,
            covered: vec![false; cells],
            uncovered: cells as u64,
            class,
            phase: Phase::Initial,
            d0: None,
            starts: Vec::new(),
            ends: Vec::new(),
            pool: 0,
            bits_left: 0,
        };
        sim.arrive();
        Ok(sim)
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn position(&self) -> LatticePoint {
        centred(self.n, self.x, self.y)
    }

    pub fn uncovered_count(&self) -> u64 {
        self.uncovered
    }

    pub fn is_covered(&self, p: LatticePoint) -> bool {
        let (a, b) = wrap(self.n, p);
        self.covered[(b * self.n + a) as usize]
    }

    /// Bookkeeping for the current site at the current time.
    #[inline]
    fn arrive(&mut self) {
        let i = (self.y * self.n + self.x) as usize;
        if !self.covered[i] {
            self.covered[i] = true;
            self.uncovered -= 1;
        }
        let c = self.class[i];
        if c == 0 {
            return;
        }
        match (self.phase, c) {
            (Phase::Initial, CLASS_OUTER) => {
                self.d0 = Some(self.time);
                self.phase = Phase::SeekInner;
            }
            (Phase::SeekInner, CLASS_INNER) => {
                self.starts.push(self.time);
                self.phase = Phase::SeekOuter;
            }
            (Phase::SeekOuter, CLASS_OUTER) => {
                self.ends.push(self.time);
                self.phase = Phase::SeekInner;
            }
            _ => {}
        }
    }

    #[inline]
    fn step(&mut self) {
        if self.bits_left == 0 {
            self.pool = self.rng.next_u64();
            self.bits_left = 32;
        }
        let d = self.pool & 3;
        self.pool >>= 2;
        self.bits_left -= 1;
        let n = self.n;
        match d {
            0 => self.x = if self.x + 1 == n { 0 } else { self.x + 1 },
            1 => self.x = if self.x == 0 { n - 1 } else { self.x - 1 },
            2 => self.y = if self.y + 1 == n { 0 } else { self.y + 1 },
            _ => self.y = if self.y == 0 { n - 1 } else { self.y - 1 },
        }
        self.time += 1;
        self.arrive();
    }

    /// Advances by `steps` steps.
    pub fn advance(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    /// Advances until time `t` or until `stop` holds, whichever is first.
    fn advance_until(&mut self, t: u64, stop: impl Fn(&Self) -> bool) {
        while self.time < t && !stop(self) {
            self.step();
        }
    }

    /// Uncovered sites within the window, listed row by row from the top.
    pub fn uncovered_in(&self, window: UncoveredWindow) -> Vec<LatticePoint> {
        let n = self.n;
        let mut out = Vec::new();
        match window {
            UncoveredWindow::Full => {
                for y in (0..n).rev() {
                    for x in 0..n {
                        if !self.covered[(y * n + x) as usize] {
                            out.push(centred(n, x, y));
                        }
                    }
                }
            }
            UncoveredWindow::Ball(r) => {
                if let Ok(ball) = LatticeSet::ball(LatticePoint::ORIGIN, r) {
                    let mut seen = std::collections::HashSet::new();
                    for &p in ball.points() {
                        let (a, b) = wrap(n, p);
                        if seen.insert((a, b)) && !self.covered[(b * n + a) as usize] {
                            out.push(centred(n, a, b));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Outcome of one run up to `t_α`.
#[derive(Debug, Clone, Serialize)]
pub struct TorusRun {
    pub n: i64,
    pub alpha: f64,
    pub t_alpha: u64,
    pub start: LatticePoint,
    pub window: UncoveredWindow,
    /// Uncovered sites in the window at time `t_α`.
    pub uncovered: Vec<LatticePoint>,
    /// Uncovered sites of the whole torus at time `t_α`.
    pub uncovered_total: u64,
    pub origin_uncovered: bool,
    /// `D_0`, if reached by `t_α`.
    pub initial_end: Option<u64>,
    /// `J_1, J_2, …` up to `t_α`.
    pub excursion_starts: Vec<u64>,
    /// `D_1, D_2, …` up to `t_α`.
    pub excursion_ends: Vec<u64>,
    pub n_alpha: u64,
    pub n_alpha_prime: u64,
}

pub fn run_torus(cfg: &TorusConfig) -> Result<TorusRun> {
    cfg.validate()?;
    let t = cfg.t_alpha();
    let mut sim = TorusSimulation::new(cfg.n, cfg.seed.rng())?;
    let start = sim.position();
    sim.advance(t);
    Ok(TorusRun {
        n: cfg.n,
        alpha: cfg.alpha,
        t_alpha: t,
        start,
        window: cfg.window,
        uncovered: sim.uncovered_in(cfg.window),
        uncovered_total: sim.uncovered,
        origin_uncovered: !sim.is_covered(LatticePoint::ORIGIN),
        initial_end: sim.d0,
        n_alpha: sim.starts.len() as u64,
        n_alpha_prime: sim.ends.len() as u64,
        excursion_starts: sim.starts,
        excursion_ends: sim.ends,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcursionReport {
    pub n: i64,
    pub alpha: f64,
    pub replicas: u64,
    pub predicted: f64,
    /// Estimate of `E N_α`.
    pub estimate: Estimate,
    pub relative_deviation: f64,
    /// Sample standard deviation over mean.
    pub spread: f64,
    pub counts: Vec<u64>,
    pub complete_counts: Vec<u64>,
}

/// Mean of `N_α` over replicas against `2α ln²n / ln ln n`.
pub fn excursion_count_check(
    n: i64,
    alpha: f64,
    replicas: u64,
    seed: RngSeed,
    exec: Execution,
) -> Result<ExcursionReport> {
    if replicas < 2 {
        return domain("need at least two replicas");
    }
    TorusConfig::new(n, alpha, seed).validate()?;
    let t = t_alpha(n, alpha);
    let runs = map_replicas(replicas, exec, |i| -> Result<(u64, u64)> {
        let mut sim = TorusSimulation::new(n, seed.child(i).rng())?;
        sim.advance(t);
        Ok((sim.starts.len() as u64, sim.ends.len() as u64))
    });
    let runs: Vec<(u64, u64)> = runs.into_iter().collect::<Result<_>>()?;
    let counts: Vec<u64> = runs.iter().map(|r| r.0).collect();
    let complete_counts = runs.iter().map(|r| r.1).collect();
    let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let estimate = Estimate::from_samples(&values, DEFAULT_CI_LEVEL)?;
    let predicted = predicted_excursions(n, alpha);
    let sd = estimate.stderr * (replicas as f64).sqrt();
    Ok(ExcursionReport {
        n,
        alpha,
        replicas,
        predicted,
        relative_deviation: (estimate.mean - predicted) / predicted,
        spread: if estimate.mean > 0.0 {
            sd / estimate.mean
        } else {
            f64::INFINITY
        },
        estimate,
        counts,
        complete_counts,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionalReport {
    pub n: i64,
    pub alpha: f64,
    pub set: Vec<LatticePoint>,
    pub replicas: u64,
    pub accepted: u64,
    pub acceptance_rate: f64,
    /// Frequency of `Υ_n A ⊂ U_{t_α}` among runs with `0 ∈ U_{t_α}`.
    pub estimate: Estimate,
    /// Limit `exp(−πα cap(A))`.
    pub predicted: f64,
}

/// Rejection estimate of `P[Υ_n A ⊂ U_{t_α} | 0 ∈ U_{t_α}]`.
pub fn conditional_uncovered_estimate(
    n: i64,
    alpha: f64,
    set: &LatticeSet,
    replicas: u64,
    seed: RngSeed,
    kernel: &PotentialKernel,
    exec: Execution,
) -> Result<ConditionalReport> {
    TorusConfig::new(n, alpha, seed).validate()?;
    if !set.contains_origin() {
        return domain("the set must contain the origin");
    }
    let predicted = vacancy_prob(set, alpha, kernel)?;
    let t = t_alpha(n, alpha);
    let outcomes = map_replicas(replicas, exec, |i| -> Result<Option<bool>> {
        let mut sim = TorusSimulation::new(n, seed.child(i).rng())?;
        // a run is rejected as soon as the origin is covered
        sim.advance_until(t, |s| s.is_covered(LatticePoint::ORIGIN));
        if sim.is_covered(LatticePoint::ORIGIN) {
            return Ok(None);
        }
        Ok(Some(set.points().iter().all(|&p| !sim.is_covered(p))))
    });
    let outcomes: Vec<Option<bool>> = outcomes.into_iter().collect::<Result<_>>()?;
    let accepted = outcomes.iter().flatten().count() as u64;
    if accepted < MIN_ACCEPTED {
        return Err(Error::InsufficientSamples {
            accepted,
            total: replicas,
            hint: format!(
                "need {MIN_ACCEPTED}; increase replicas or lower α (acceptance is about n^(-2α) = {:.3})",
                (n as f64).powf(-2.0 * alpha)
            ),
        });
    }
    let hits = outcomes.iter().flatten().filter(|&&b| b).count() as u64;
    Ok(ConditionalReport {
        n,
        alpha,
        set: set.points().to_vec(),
        replicas,
        accepted,
        acceptance_rate: accepted as f64 / replicas as f64,
        estimate: Estimate::binomial(hits, accepted, DEFAULT_CI_LEVEL)?,
        predicted,
    })
}

/// Steps until every site of `Z_n²` has been visited, from a uniform start.
pub fn cover_time(n: i64, seed: RngSeed) -> Result<u64> {
    if !(2..=MAX_COVER_SIDE).contains(&n) {
        return domain(format!("cover time needs 2 <= n <= {MAX_COVER_SIDE}, got {n}"));
    }
    // small sides skip the excursion tables, which need n >= MIN_SIDE
    let mut rng = seed.rng();
    let cells = (n * n) as usize;
    let mut covered = vec![false; cells];
    let (mut x, mut y) = (rng.random_range(0..n), rng.random_range(0..n));
    covered[(y * n + x) as usize] = true;
    let mut left = cells - 1;
    let mut t = 0u64;
    let mut pool = 0u64;
    let mut bits = 0u32;
    while left > 0 {
        if bits == 0 {
            pool = rng.next_u64();
            bits = 32;
        }
        match pool & 3 {
            0 => x = (x + 1) % n,
            1 => x = (x + n - 1) % n,
            2 => y = (y + 1) % n,
            _ => y = (y + n - 1) % n,
        }
        pool >>= 2;
        bits -= 1;
        t += 1;
        let i = (y * n + x) as usize;
        if !covered[i] {
            covered[i] = true;
            left -= 1;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_alpha_and_prediction() {
        let n = 1000.0f64;
        let expected = (4.0 / PI) * n * n * n.ln().powi(2);
        assert_eq!(t_alpha(1000, 1.0), expected.round() as u64);
        assert!((predicted_excursions(1000, 1.0) - 49.38).abs() < 0.01);
        assert!((predicted_excursions(1000, 2.0) - 2.0 * predicted_excursions(1000, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn config_checks() {
        assert!(TorusConfig::new(8, 1.0, RngSeed::default()).validate().is_err());
        assert!(TorusConfig::new(64, 0.0, RngSeed::default()).validate().is_err());
        assert!(TorusConfig::new(64, 0.5, RngSeed::default()).validate().is_ok());
    }

    #[test]
    fn start_is_the_only_covered_site_at_time_zero() {
        let sim = TorusSimulation::new(32, RngSeed::new(3, 0).rng()).unwrap();
        assert_eq!(sim.uncovered_count(), 32 * 32 - 1);
        assert!(sim.is_covered(sim.position()));
        assert_eq!(sim.uncovered_in(UncoveredWindow::Full).len(), 32 * 32 - 1);
    }

    #[test]
    fn covering_is_monotone() {
        let mut sim = TorusSimulation::new(48, RngSeed::new(5, 0).rng()).unwrap();
        let mut prev = sim.uncovered_in(UncoveredWindow::Full);
        for _ in 0..10 {
            sim.advance(2000);
            let now = sim.uncovered_in(UncoveredWindow::Full);
            assert!(now.iter().all(|p| prev.contains(p)));
            prev = now;
        }
    }

    #[test]
    fn excursion_times_interlace() {
        let (inner, _) = excursion_boundaries(128).unwrap();
        for s in 0..5 {
            let run = run_torus(&TorusConfig::new(128, 1.0, RngSeed::new(8, s))).unwrap();
            let (j, d) = (&run.excursion_starts, &run.excursion_ends);
            assert!(run.n_alpha >= run.n_alpha_prime && run.n_alpha <= run.n_alpha_prime + 1);
            if let (Some(d0), Some(j1)) = (run.initial_end, j.first()) {
                assert!(d0 < *j1);
            }
            for k in 0..d.len() {
                assert!(j[k] < d[k]);
                if k + 1 < j.len() {
                    assert!(d[k] < j[k + 1]);
                }
            }
            assert!(run.n_alpha > 0);
            assert!(j.iter().all(|&t| t <= run.t_alpha));
            assert!(!inner.is_empty());
        }
    }

    #[test]
    fn walker_sits_on_inner_boundary_at_excursion_starts() {
        let (inner, _) = excursion_boundaries(64).unwrap();
        let inner: Vec<(i64, i64)> = inner.iter().map(|&p| wrap(64, p)).collect();
        let mut sim = TorusSimulation::new(64, RngSeed::new(2, 2).rng()).unwrap();
        let mut seen = 0;
        while sim.time() < 2_000_000 && seen < 20 {
            let before = sim.starts.len();
            sim.step();
            if sim.starts.len() > before {
                assert!(inner.contains(&(sim.x, sim.y)));
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn cover_time_bounds() {
        for s in 0..20 {
            assert!(cover_time(4, RngSeed::new(1, s)).unwrap() >= 15);
        }
        assert!(cover_time(1024, RngSeed::default()).is_err());
    }

    #[test]
    fn uniform_start() {
        // chi-square over the 16 cells of Z_4 x Z_4 blocks of a 16-torus
        let n = 16;
        let reps = 8000u64;
        let mut counts = [0u64; 16];
        for i in 0..reps {
            let sim = TorusSimulation::new(n, RngSeed::new(77, i).rng()).unwrap();
            let (x, y) = wrap(n, sim.position());
            counts[((y / 4) * 4 + x / 4) as usize] += 1;
        }
        let e = reps as f64 / 16.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 99.9% quantile of chi-square with 15 degrees of freedom
        assert!(chi2 < 37.7, "{chi2}");
    }

    #[test]
    fn conditional_singleton_is_one() {
        let k = PotentialKernel::build(16).unwrap();
        let set = LatticeSet::new(vec![LatticePoint::ORIGIN]).unwrap();
        let rep =
            conditional_uncovered_estimate(32, 0.25, &set, 600, RngSeed::new(4, 4), &k, Execution::Parallel).unwrap();
        assert_eq!(rep.estimate.mean, 1.0);
        assert_eq!(rep.predicted, 1.0);
        let err = conditional_uncovered_estimate(32, 3.0, &set, 100, RngSeed::new(4, 4), &k, Execution::Parallel);
        assert!(matches!(err, Err(Error::InsufficientSamples { .. })));
    }
}
