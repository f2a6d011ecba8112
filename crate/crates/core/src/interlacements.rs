//! Two-dimensional random interlacements observed on a ball.
//!
//! Restricted to `B(R)`, RI(α) is a Poisson(πα cap B(R)) number of `Ŝ`
//! trajectories started from the normalised equilibrium measure of the ball.
//! Each trajectory carries a label uniform on `(0, πα_max]`; the level-α
//! configuration is the set of trajectories with label `≤ πα`, so a single
//! soup yields the whole family `V^α`, `α ≤ α_max`, nested by construction.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::lattice::{BoxIndex, LatticePoint, LatticeSet};
use crate::potential_kernel::PotentialKernel;
use crate::potential_theory::{analyze, triangle_formula, PotentialProfile};
use crate::rng::RngSeed;
use crate::walks::{hat_step, BallTracer, WalkKind, WalkPath};

/// How a trajectory's life outside the window is handled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Returns to the window are drawn from the exact entrance law; no bias.
    Exact,
    /// The walk is simulated step by step and dropped once it leaves
    /// `B(kill_radius)`; later returns are lost.
    KillRadius(i64),
}

#[derive(Debug, Clone, Serialize)]
pub struct InterlacementConfig {
    pub window_radius: i64,
    /// Ascending, non-negative.
    pub levels: Vec<f64>,
    pub truncation: Truncation,
    pub seed: RngSeed,
}

impl InterlacementConfig {
    pub fn new(window_radius: i64, levels: Vec<f64>, seed: RngSeed) -> Self {
        Self {
            window_radius,
            levels,
            truncation: Truncation::Exact,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_radius < 1 {
            return Err(Error::Config(format!(
                "window radius must be >= 1, got {}",
                self.window_radius
            )));
        }
        check_levels(&self.levels)?;
        if let Truncation::KillRadius(k) = self.truncation {
            if k <= 2 * self.window_radius {
                return Err(Error::Config(format!(
                    "kill radius {k} must exceed twice the window radius {}",
                    self.window_radius
                )));
            }
        }
        Ok(())
    }

    /// Largest level, the one the soup is sampled at.
    pub fn alpha_max(&self) -> f64 {
        self.levels.last().copied().unwrap_or(0.0)
    }
}

fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::Config("at least one level is required".into()));
    }
    if levels.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(Error::Config(format!("levels must be finite and >= 0, got {levels:?}")));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!(
            "levels must be strictly ascending, got {levels:?}"
        )));
    }
    Ok(())
}

/// One trajectory of the soup: its label, entrance point and the pieces of
/// its path inside the window.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub label: f64,
    pub start: LatticePoint,
    pub excursions: Vec<WalkPath>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySoup {
    pub window_radius: i64,
    pub alpha_max: f64,
    pub trajectories: Vec<Trajectory>,
    /// Upper bound on the probability that truncation changed the trace.
    pub bias_bound: f64,
}

impl TrajectorySoup {
    /// Trajectories present at level `alpha`.
    pub fn at_level(&self, alpha: f64) -> impl Iterator<Item = &Trajectory> {
        let cut = std::f64::consts::PI * alpha;
        self.trajectories.iter().filter(move |t| t.label <= cut)
    }
}

/// Smallest label of a trajectory visiting each site of the window; a site
/// is vacant at level α iff its entry exceeds πα.
#[derive(Debug, Clone)]
pub struct MinLabelGrid {
    radius: i64,
    grid: BoxIndex,
    labels: Vec<f64>,
}

impl MinLabelGrid {
    pub fn new(radius: i64) -> Self {
        let grid = BoxIndex::new(radius + 1);
        Self {
            radius,
            grid,
            labels: vec![f64::INFINITY; grid.len()],
        }
    }

    pub fn reset(&mut self) {
        self.labels.fill(f64::INFINITY);
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    #[inline]
    fn mark(&mut self, i: usize, label: f64) {
        let l = &mut self.labels[i];
        if label < *l {
            *l = label;
        }
    }

    /// Minimal label at `p`; `None` outside the window.
    pub fn min_label(&self, p: LatticePoint) -> Option<f64> {
        (p.norm_sq() <= self.radius * self.radius).then(|| self.labels[self.grid.index(p)])
    }

    pub fn is_vacant(&self, p: LatticePoint, alpha: f64) -> Option<bool> {
        self.min_label(p).map(|l| l > std::f64::consts::PI * alpha)
    }

    pub fn vacant_grid(&self, alpha: f64) -> VacantGrid {
        let r = self.radius;
        let side = (2 * r + 1) as usize;
        let cut = std::f64::consts::PI * alpha;
        let mut cells = vec![Cell::Outside; side * side];
        let mut vacant_count = 0;
        for y in -r..=r {
            for x in -r..=r {
                let p = LatticePoint::new(x, y);
                if p.norm_sq() > r * r {
                    continue;
                }
                let vacant = self.labels[self.grid.index(p)] > cut;
                vacant_count += vacant as u64;
                cells[((r - y) as usize) * side + (x + r) as usize] = if vacant { Cell::Vacant } else { Cell::Covered };
            }
        }
        VacantGrid {
            alpha,
            radius: r,
            cells,
            vacant_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cell {
    Vacant,
    Covered,
    Outside,
}

/// Vacant set at one level on the square `[-R, R]²`, rows listed from top
/// (`y = R`) to bottom; cells outside the disc are [`Cell::Outside`].
#[derive(Debug, Clone, Serialize)]
pub struct VacantGrid {
    pub alpha: f64,
    pub radius: i64,
    cells: Vec<Cell>,
    pub vacant_count: u64,
}

impl VacantGrid {
    pub fn side(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    fn cell(&self, p: LatticePoint) -> Cell {
        let r = self.radius;
        if p.x.abs() > r || p.y.abs() > r {
            return Cell::Outside;
        }
        self.cells[((r - p.y) as usize) * self.side() + (p.x + r) as usize]
    }

    /// `Some(true)` if vacant, `None` outside the window.
    pub fn is_vacant(&self, p: LatticePoint) -> Option<bool> {
        match self.cell(p) {
            Cell::Vacant => Some(true),
            Cell::Covered => Some(false),
            Cell::Outside => None,
        }
    }

    /// Vacant sites of `B(r)`, `r ≤ R`.
    pub fn vacant_in_ball(&self, r: f64) -> u64 {
        let r2 = r * r;
        let k = self.radius;
        let mut n = 0;
        for y in -k..=k {
            for x in -k..=k {
                let p = LatticePoint::new(x, y);
                if (p.norm_sq() as f64) <= r2 && self.cell(p) == Cell::Vacant {
                    n += 1;
                }
            }
        }
        n
    }

    /// Whether every vacant site here is vacant in `other` too.
    pub fn is_subset_of(&self, other: &VacantGrid) -> bool {
        self.radius == other.radius
            && self
                .cells
                .iter()
                .zip(&other.cells)
                .all(|(a, b)| *a != Cell::Vacant || *b == Cell::Vacant)
    }

    pub fn vacant_points(&self) -> Vec<LatticePoint> {
        let r = self.radius;
        let mut out = Vec::new();
        for y in (-r..=r).rev() {
            for x in -r..=r {
                let p = LatticePoint::new(x, y);
                if self.cell(p) == Cell::Vacant {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Binary PGM (P5): vacant 255, covered 0, outside the disc 128. The
    /// origin sits at the centre pixel; `y` grows upwards.
    pub fn to_pgm(&self) -> Vec<u8> {
        let side = self.side();
        let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
        out.extend(self.cells.iter().map(|c| match c {
            Cell::Vacant => 255u8,
            Cell::Covered => 0,
            Cell::Outside => 128,
        }));
        out
    }

    /// `x,y,vacant` rows for every site of the disc.
    pub fn to_csv(&self) -> String {
        let r = self.radius;
        let mut s = String::from("x,y,vacant\n");
        for y in (-r..=r).rev() {
            for x in -r..=r {
                if let Some(v) = self.is_vacant(LatticePoint::new(x, y)) {
                    s.push_str(&format!("{x},{y},{}\n", v as u8));
                }
            }
        }
        s
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_pgm())?;
        Ok(())
    }
}

/// Samples soups on `B(R)` for a fixed configuration.
pub struct SoupSampler<'k> {
    config: InterlacementConfig,
    kernel: &'k PotentialKernel,
    tracer: BallTracer,
    starts: WeightedAliasIndex<f64>,
    mean_count: f64,
}

impl<'k> SoupSampler<'k> {
    pub fn new(config: &InterlacementConfig, kernel: &'k PotentialKernel) -> Result<Self> {
        config.validate()?;
        let tracer = BallTracer::new(config.window_radius, kernel)?;
        let starts = WeightedAliasIndex::new(tracer.equilibrium().to_vec()).map_err(|e| Error::Degenerate {
            set: format!("B({})", config.window_radius),
            reason: format!("equilibrium measure: {e}"),
        })?;
        let mean_count = std::f64::consts::PI * config.alpha_max() * tracer.capacity();
        Ok(Self {
            config: config.clone(),
            kernel,
            tracer,
            starts,
            mean_count,
        })
    }

    pub fn config(&self) -> &InterlacementConfig {
        &self.config
    }

    /// `π α_max cap(B(R))`.
    pub fn expected_count(&self) -> f64 {
        self.mean_count
    }

    pub fn capacity(&self) -> f64 {
        self.tracer.capacity()
    }

    /// Probability bound on a truncated trace differing from the exact one.
    pub fn bias_bound(&self) -> f64 {
        match self.config.truncation {
            Truncation::Exact => 0.0,
            Truncation::KillRadius(k) => {
                let r = self.config.window_radius as f64;
                let per =
                    self.kernel.potential_real(r).unwrap_or(1.0) / self.kernel.potential_real(k as f64).unwrap_or(1.0);
                (self.mean_count * per).min(1.0)
            }
        }
    }

    fn draw_count<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.mean_count <= 0.0 {
            return 0;
        }
        let k: f64 = Poisson::new(self.mean_count).expect("positive mean").sample(rng);
        k as u64
    }

    fn draw_label_and_start<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, usize) {
        let cut = std::f64::consts::PI * self.config.alpha_max();
        // uniform on (0, cut]
        let label = cut * (1.0 - rng.random::<f64>());
        let start = self.tracer.entrance_sites()[self.starts.sample(rng)];
        (label, start)
    }

    /// Runs one trajectory from grid site `start`, reporting visited sites
    /// of the window and excursion breaks.
    fn walk<R: Rng + ?Sized>(
        &self,
        start: usize,
        rng: &mut R,
        mut visit: impl FnMut(usize),
        mut on_exit: impl FnMut(),
    ) {
        match self.config.truncation {
            Truncation::Exact => {
                self.tracer.run(start, rng, visit, on_exit);
            }
            Truncation::KillRadius(kill) => {
                let grid = self.tracer.grid();
                let r2 = self.config.window_radius.pow(2);
                let k2 = kill * kill;
                let mut x = grid.point(start);
                let mut inside = true;
                while x.norm_sq() <= k2 {
                    let now = x.norm_sq() <= r2;
                    if now {
                        visit(grid.index(x));
                    } else if inside {
                        on_exit();
                    }
                    inside = now;
                    x = hat_step(x, self.kernel, rng).expect("walk never reaches the origin");
                }
            }
        }
    }

    /// Samples a soup and folds it into `grid` (reset first). Returns the
    /// number of trajectories.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, grid: &mut MinLabelGrid) -> u64 {
        assert_eq!(
            grid.radius, self.config.window_radius,
            "grid radius must match the window"
        );
        grid.reset();
        let k = self.draw_count(rng);
        for _ in 0..k {
            let (label, start) = self.draw_label_and_start(rng);
            self.walk(start, rng, |i| grid.mark(i, label), || {});
        }
        k
    }

    /// Indicator of `set ∩ B(R)` on the sampler's grid, for [`SoupSampler::sample_into_masked`].
    pub fn mask(&self, set: &LatticeSet) -> Vec<bool> {
        let grid = self.tracer.grid();
        let mut m = vec![false; grid.len()];
        for &p in set.points() {
            if self.tracer.contains(p) {
                m[grid.index(p)] = true;
            }
        }
        m
    }

    /// Like [`SoupSampler::sample_into`], returning the labels of all
    /// trajectories and those of the trajectories visiting the masked sites.
    pub fn sample_into_masked<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        grid: &mut MinLabelGrid,
        mask: &[bool],
    ) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(
            grid.radius, self.config.window_radius,
            "grid radius must match the window"
        );
        grid.reset();
        let k = self.draw_count(rng);
        let mut labels = Vec::with_capacity(k as usize);
        let mut hitting = Vec::new();
        for _ in 0..k {
            let (label, start) = self.draw_label_and_start(rng);
            labels.push(label);
            let mut hit = false;
            self.walk(
                start,
                rng,
                |i| {
                    grid.mark(i, label);
                    hit |= mask[i];
                },
                || {},
            );
            if hit {
                hitting.push(label);
            }
        }
        (labels, hitting)
    }

    /// Samples a soup keeping every trajectory's path in the window.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TrajectorySoup {
        let grid = self.tracer.grid();
        let k = self.draw_count(rng);
        let mut trajectories = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let (label, start) = self.draw_label_and_start(rng);
            let pieces = std::cell::RefCell::new(vec![WalkPath::new(WalkKind::Hat)]);
            self.walk(
                start,
                rng,
                |i| pieces.borrow_mut().last_mut().unwrap().steps.push(grid.point(i)),
                || pieces.borrow_mut().push(WalkPath::new(WalkKind::Hat)),
            );
            let mut excursions = pieces.into_inner();
            excursions.retain(|e| !e.is_empty());
            trajectories.push(Trajectory {
                label,
                start: grid.point(start),
                excursions,
            });
        }
        TrajectorySoup {
            window_radius: self.config.window_radius,
            alpha_max: self.config.alpha_max(),
            trajectories,
            bias_bound: self.bias_bound(),
        }
    }
}

/// Samples one soup on `B(R)`. `profile` must be the profile of `B(R)`; its
/// capacity is checked against the one used for sampling.
pub fn sample_soup<R: Rng + ?Sized>(
    config: &InterlacementConfig,
    profile: &PotentialProfile,
    kernel: &PotentialKernel,
    rng: &mut R,
) -> Result<TrajectorySoup> {
    let ball = LatticeSet::ball(LatticePoint::ORIGIN, config.window_radius as f64)?;
    if profile.set.len() != ball.len() || !profile.set.points().iter().all(|&p| ball.contains(p)) {
        return domain(format!("profile is not the profile of B({})", config.window_radius));
    }
    let sampler = SoupSampler::new(config, kernel)?;
    if (sampler.capacity() - profile.cap).abs() > 1e-9 * profile.cap.max(1.0) {
        return Err(Error::Degenerate {
            set: format!("B({})", config.window_radius),
            reason: format!("capacity mismatch: {} vs {}", sampler.capacity(), profile.cap),
        });
    }
    Ok(sampler.sample(rng))
}

/// Vacant sets of `soup` at each of `levels` (ascending, `≤ α_max`).
pub fn vacant_grids(soup: &TrajectorySoup, levels: &[f64]) -> Result<Vec<VacantGrid>> {
    check_levels(levels)?;
    if levels.last().copied().unwrap_or(0.0) > soup.alpha_max {
        return domain(format!("levels exceed the soup's α_max = {}", soup.alpha_max));
    }
    let mut grid = MinLabelGrid::new(soup.window_radius);
    for t in &soup.trajectories {
        for e in &t.excursions {
            for &p in &e.steps {
                let i = grid.grid.index(p);
                grid.mark(i, t.label);
            }
        }
    }
    Ok(levels.iter().map(|&a| grid.vacant_grid(a)).collect())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return domain(format!("α must be finite and >= 0, got {alpha}"));
    }
    Ok(())
}

/// `P[A ⊂ V^α] = exp(−πα cap(A))` for `A ∋ 0`.
pub fn vacancy_prob(set: &LatticeSet, alpha: f64, kernel: &PotentialKernel) -> Result<f64> {
    check_alpha(alpha)?;
    if !set.contains_origin() {
        return domain("the vacancy formula needs a set containing the origin; use two_point_prob for pairs");
    }
    let cap = analyze(set, kernel)?.cap;
    Ok((-std::f64::consts::PI * alpha * cap).exp())
}

/// `P[{x, y} ⊂ V^α] = exp(−παΨ)`, with `Ψ` built from `a(x)`, `a(y)`, `a(x − y)`.
pub fn two_point_prob(x: LatticePoint, y: LatticePoint, alpha: f64, kernel: &PotentialKernel) -> Result<f64> {
    check_alpha(alpha)?;
    if x == y || x.is_origin() || y.is_origin() {
        return domain(format!("need distinct non-zero points, got ({x}) and ({y})"));
    }
    let psi = triangle_formula(kernel.potential(x), kernel.potential(y), kernel.potential(x - y));
    Ok((-std::f64::consts::PI * alpha * psi).exp())
}

/// Leading term of `P[A ⊂ V^α | x ∈ V^α]` for `0 ∈ A ⊂ B(r)`, `‖x‖ ≥ 2r`:
/// `exp(−(πα/4) cap(A) / (1 − cap(A)/(2a(x))))`. The error terms, of order
/// `r ln r ln‖x‖ / ‖x‖`, are dropped.
pub fn conditional_local_rate(
    set: &LatticeSet,
    r: f64,
    x: LatticePoint,
    alpha: f64,
    kernel: &PotentialKernel,
) -> Result<f64> {
    check_alpha(alpha)?;
    if !set.contains_origin() {
        return domain("the set must contain the origin");
    }
    if let Some(p) = set.points().iter().find(|p| p.norm() > r) {
        return domain(format!("set point ({p}) lies outside B({r})"));
    }
    if !(x.norm() >= 2.0 * r) || x.is_origin() {
        return domain(format!("need ‖x‖ >= 2r, got x=({x}), r={r}"));
    }
    let cap = analyze(set, kernel)?.cap;
    let denom = 1.0 - cap / (2.0 * kernel.potential(x));
    if denom <= 0.0 {
        return domain(format!("x=({x}) is too close for the leading-order formula"));
    }
    Ok((-std::f64::consts::PI * alpha / 4.0 * cap / denom).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(x: i64, y: i64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    fn kernel() -> PotentialKernel {
        PotentialKernel::build(64).unwrap()
    }

    #[test]
    fn config_validation() {
        let seed = RngSeed::default();
        assert!(InterlacementConfig::new(10, vec![0.5, 1.0], seed).validate().is_ok());
        assert!(InterlacementConfig::new(10, vec![1.0, 0.5], seed).validate().is_err());
        assert!(InterlacementConfig::new(10, vec![], seed).validate().is_err());
        assert!(InterlacementConfig::new(0, vec![1.0], seed).validate().is_err());
        let mut c = InterlacementConfig::new(10, vec![1.0], seed);
        c.truncation = Truncation::KillRadius(20);
        assert!(c.validate().is_err());
        c.truncation = Truncation::KillRadius(21);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn closed_forms() {
        let k = kernel();
        let single = LatticeSet::new(vec![p(0, 0)]).unwrap();
        assert_eq!(vacancy_prob(&single, 3.0, &k).unwrap(), 1.0);
        let pair = LatticeSet::new(vec![p(0, 0), p(1, 0)]).unwrap();
        assert!((vacancy_prob(&pair, 1.0, &k).unwrap() - (-PI / 2.0).exp()).abs() < 1e-12);
        let off = LatticeSet::new(vec![p(1, 0), p(2, 0)]).unwrap();
        assert!(vacancy_prob(&off, 1.0, &k).is_err());

        let tri = LatticeSet::new(vec![p(0, 0), p(1, 0), p(0, 1)]).unwrap();
        let v3 = vacancy_prob(&tri, 1.0, &k).unwrap();
        let v2 = two_point_prob(p(1, 0), p(0, 1), 1.0, &k).unwrap();
        assert!((v3 - v2).abs() < 1e-12);
        assert!((v2 - 0.09984).abs() < 1e-4);
        assert_eq!(
            two_point_prob(p(3, 1), p(-2, 5), 0.7, &k).unwrap(),
            two_point_prob(p(-2, 5), p(3, 1), 0.7, &k).unwrap()
        );
        assert!(two_point_prob(p(1, 0), p(1, 0), 1.0, &k).is_err());

        let rate = conditional_local_rate(&pair, 1.0, p(100, 0), 1.0, &k).unwrap();
        assert!((rate - 0.65760).abs() < 2e-4, "{rate}");
        assert!(conditional_local_rate(&pair, 1.0, p(1, 1), 1.0, &k).is_err());
    }

    #[test]
    fn soup_paths_and_nesting() {
        let k = kernel();
        let cfg = InterlacementConfig::new(12, vec![0.5, 1.0, 1.5], RngSeed::new(4, 0));
        let sampler = SoupSampler::new(&cfg, &k).unwrap();
        let mut rng = cfg.seed.rng();
        for _ in 0..20 {
            let soup = sampler.sample(&mut rng);
            assert_eq!(soup.bias_bound, 0.0);
            for t in &soup.trajectories {
                assert!(t.label > 0.0 && t.label <= 1.5 * PI);
                assert_eq!(t.excursions[0].steps[0], t.start);
                for e in &t.excursions {
                    assert!(e.is_nearest_neighbor() && !e.visits_origin());
                }
            }
            let grids = vacant_grids(&soup, &cfg.levels).unwrap();
            for g in &grids {
                assert_eq!(g.is_vacant(p(0, 0)), Some(true));
            }
            assert!(grids[1].is_subset_of(&grids[0]));
            assert!(grids[2].is_subset_of(&grids[1]));
        }
    }

    #[test]
    fn streaming_matches_stored_soup() {
        let k = kernel();
        let cfg = InterlacementConfig::new(8, vec![1.0], RngSeed::new(9, 3));
        let sampler = SoupSampler::new(&cfg, &k).unwrap();
        let soup = sampler.sample(&mut cfg.seed.rng());
        let mut grid = MinLabelGrid::new(8);
        let n = sampler.sample_into(&mut cfg.seed.rng(), &mut grid);
        assert_eq!(n as usize, soup.trajectories.len());
        let a = vacant_grids(&soup, &[1.0]).unwrap().remove(0);
        let b = grid.vacant_grid(1.0);
        assert_eq!(a.vacant_points(), b.vacant_points());
    }

    #[test]
    fn pgm_layout() {
        let mut g = MinLabelGrid::new(2);
        g.reset();
        let v = g.vacant_grid(1.0);
        let pgm = v.to_pgm();
        assert!(pgm.starts_with(b"P5\n5 5\n255\n"));
        let body = &pgm[pgm.len() - 25..];
        assert_eq!(body[12], 255); // centre is the origin
        assert_eq!(body[0], 128); // corner lies outside the disc
        assert_eq!(v.vacant_count, 13);
    }

    #[test]
    fn kill_radius_soups() {
        let k = kernel();
        let mut cfg = InterlacementConfig::new(6, vec![1.0], RngSeed::new(5, 0));
        cfg.truncation = Truncation::KillRadius(20);
        let sampler = SoupSampler::new(&cfg, &k).unwrap();
        let soup = sampler.sample(&mut cfg.seed.rng());
        assert!(soup.bias_bound > 0.0);
        for t in &soup.trajectories {
            for e in &t.excursions {
                assert!(e.is_nearest_neighbor());
                assert!(e.steps.iter().all(|q| q.norm_sq() <= 36));
            }
        }
    }

    #[test]
    fn zero_level_is_empty() {
        let k = kernel();
        let cfg = InterlacementConfig::new(5, vec![0.0], RngSeed::new(1, 0));
        let sampler = SoupSampler::new(&cfg, &k).unwrap();
        let soup = sampler.sample(&mut cfg.seed.rng());
        assert!(soup.trajectories.is_empty());
        let g = vacant_grids(&soup, &[0.0]).unwrap();
        assert_eq!(
            g[0].vacant_count as usize,
            LatticeSet::ball(p(0, 0), 5.0).unwrap().len()
        );
    }
}
