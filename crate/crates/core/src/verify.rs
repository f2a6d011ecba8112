//! Acceptance criteria as library functions, grouped into suites.
//!
//! Each criterion returns a [`CriterionOutcome`] listing its individual
//! checks. Reports contain no timings, so a fixed configuration always
//! serialises to the same JSON.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{compare, loglog_slope, paired_z_test, ComparisonReport, Estimate, THREE_SIGMA_LEVEL};
use crate::exec::{fold_replicas, map_replicas, Execution};
use crate::interlacements::{two_point_prob, InterlacementConfig, MinLabelGrid, SoupSampler};
use crate::lattice::{LatticePoint, LatticeSet};
use crate::potential_kernel::{gamma_prime, potential_real, PotentialKernel};
use crate::potential_theory::{analyze, capacity_three_point, EntranceLaw};
use crate::rng::{RngSeed, DEFAULT_SEED};
use crate::torus::{conditional_uncovered_estimate, excursion_count_check};
use crate::walks::{exit_kernels, hat_escape_ball_prob, hat_hit_point_prob, hat_return_prob, hat_step, BallTracer};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const KERNEL_TOLERANCE: f64 = 1e-9;
pub const HARMONIC_TOLERANCE: f64 = 1e-12;
pub const ASYMPTOTIC_TOLERANCE: f64 = 1e-3;
pub const CAPACITY_TOLERANCE: f64 = 1e-9;
pub const BALL_CAPACITY_TOLERANCE: f64 = 0.02;
pub const EXIT_ROUTE_TOLERANCE: f64 = 1e-10;
pub const PATH_TOLERANCE: f64 = 1e-12;
pub const ESCAPE_SLACK: f64 = 0.02;
pub const HIT_PATHS: u64 = 100_000;
pub const ESCAPE_PATHS: u64 = 10_000;
/// Walks from the far start are stopped here and closed with the exact
/// hitting probability.
pub const ESCAPE_STOP_RADIUS: i64 = 220;
pub const VACANCY_WINDOW: i64 = 50;
pub const VACANCY_SOUPS: u64 = 100_000;
pub const STATIONARITY_LEVEL: f64 = 0.01;
pub const SCALING_WINDOW: i64 = 64;
pub const SCALING_SOUPS: u64 = 3_000;
pub const SCALING_TOLERANCE: f64 = 0.25;
pub const POISSON_WINDOW: i64 = 40;
pub const POISSON_SOUPS: u64 = 10_000;
pub const DISPERSION_BAND: (f64, f64) = (0.95, 1.05);
pub const TORUS_EXCURSION_SIDE: i64 = 1000;
pub const TORUS_EXCURSION_REPLICAS: u64 = 30;
pub const EXCURSION_TOLERANCE: f64 = 0.2;
pub const CONDITIONAL_SIDE: i64 = 64;
pub const CONDITIONAL_ALPHA: f64 = 0.25;
pub const CONDITIONAL_REPLICAS: u64 = 4_000;
pub const CONDITIONAL_BAND: f64 = 0.1;
pub const CONDITIONAL_MIN_ACCEPTED: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Exact,
    Mc,
    Torus,
    All,
}

impl Suite {
    pub fn criteria(self) -> Vec<u32> {
        match self {
            Suite::Exact => vec![1, 2, 3],
            Suite::Mc => vec![4, 5, 6, 7, 8],
            Suite::Torus => vec![9, 10],
            Suite::All => (1..=11).collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Suite::Exact),
            "mc" => Ok(Suite::Mc),
            "torus" => Ok(Suite::Torus),
            "all" => Ok(Suite::All),
            _ => Err(Error::Config(format!("unknown suite {s:?} (exact, mc, torus, all)"))),
        }
    }
}

pub fn criterion_title(id: u32) -> &'static str {
    match id {
        1 => "exact potential kernel",
        2 => "capacities",
        3 => "h-transform exactness",
        4 => "closed-form hitting probabilities",
        5 => "one-site vacancy",
        6 => "two-site vacancy and conditional stationarity",
        7 => "vacant-set size scaling",
        8 => "nesting and Poisson counts",
        9 => "torus excursion counts",
        10 => "conditional uncovered set on the torus",
        11 => "determinism",
        _ => "unknown",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub exact_radius: i64,
    pub execution: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            exact_radius: crate::potential_kernel::DEFAULT_EXACT_RADIUS,
            execution: Execution::Parallel,
        }
    }
}

/// A single deterministic check: `observed` against `[low, high]`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub low: f64,
    pub high: f64,
    pub passed: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, observed: f64, low: f64, high: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            low,
            high,
            passed: observed >= low && observed <= high,
        }
    }

    /// `|observed − expected| ≤ tol`.
    pub fn close(name: impl Into<String>, observed: f64, expected: f64, tol: f64) -> Self {
        let mut c = Self::within(name, observed, expected - tol, expected + tol);
        c.passed = (observed - expected).abs() <= tol;
        c
    }

    pub fn at_most(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::within(name, observed, f64::NEG_INFINITY, bound)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub comparisons: Vec<ComparisonReport>,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl CriterionOutcome {
    fn new(id: u32) -> Self {
        Self {
            id,
            title: criterion_title(id).to_string(),
            passed: false,
            checks: Vec::new(),
            comparisons: Vec::new(),
            notes: Vec::new(),
            error: None,
        }
    }

    fn finish(mut self) -> Self {
        self.passed =
            self.error.is_none() && self.checks.iter().all(|c| c.passed) && self.comparisons.iter().all(|c| c.passed());
        self
    }

    /// Names of the failing checks and comparisons.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect();
        out.extend(self.comparisons.iter().filter(|c| !c.passed()).map(|c| c.name.clone()));
        if let Some(e) = &self.error {
            out.push(e.clone());
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub version: String,
    pub suite: Suite,
    pub config: VerifyConfig,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
}

pub fn version_string() -> String {
    format!("ri2d-core {}", env!("CARGO_PKG_VERSION"))
}

/// Tallies of the shared soup batch behind criteria 5 and 6.
#[derive(Debug, Clone, Default)]
struct VacancyTallies {
    soups: u64,
    /// `[point][level]` vacancy counts for [`VACANCY_POINTS`] × [`VACANCY_LEVELS`].
    vacant: Vec<[u64; 3]>,
    joint: u64,
    conditioned: u64,
    diff_sum: f64,
    diff_sq: f64,
    diffs: Vec<f64>,
}

const VACANCY_LEVELS: [f64; 3] = [0.5, 0.75, 1.0];
const VACANCY_POINTS: [(i64, i64); 7] = [(5, 0), (10, 0), (20, 0), (0, 5), (1, 0), (6, 2), (5, 2)];

impl VacancyTallies {
    fn empty() -> Self {
        Self {
            vacant: vec![[0; 3]; VACANCY_POINTS.len()],
            ..Default::default()
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.soups += other.soups;
        for (a, b) in self.vacant.iter_mut().zip(&other.vacant) {
            for k in 0..3 {
                a[k] += b[k];
            }
        }
        self.joint += other.joint;
        self.conditioned += other.conditioned;
        self.diff_sum += other.diff_sum;
        self.diff_sq += other.diff_sq;
        self.diffs.extend(other.diffs);
        self
    }
}

/// Start and target points for a hitting check.
type HitCase = ((i64, i64), &'static [(i64, i64)]);

/// Runs the acceptance criteria with one kernel and shared sample batches.
pub struct Verifier {
    config: VerifyConfig,
    kernel: PotentialKernel,
    vacancy: OnceLock<Result<VacancyTallies>>,
}

fn p(x: i64, y: i64) -> LatticePoint {
    LatticePoint::new(x, y)
}

fn three_sigma(e: Estimate) -> Estimate {
    e.at_level(THREE_SIGMA_LEVEL).expect("valid level")
}

impl Verifier {
    pub fn new(config: VerifyConfig) -> Result<Self> {
        let kernel = PotentialKernel::build(config.exact_radius)?;
        Ok(Self {
            config,
            kernel,
            vacancy: OnceLock::new(),
        })
    }

    pub fn kernel(&self) -> &PotentialKernel {
        &self.kernel
    }

    fn seed(&self, id: u32) -> RngSeed {
        RngSeed::new(self.config.seed, id as u64)
    }

    pub fn run_criterion(&self, id: u32) -> CriterionOutcome {
        let mut out = CriterionOutcome::new(id);
        let res = match id {
            1 => self.kernel_suite(&mut out),
            2 => self.capacity_suite(&mut out),
            3 => self.h_transform_suite(&mut out),
            4 => self.hitting_suite(&mut out),
            5 => self.one_site_suite(&mut out),
            6 => self.two_site_suite(&mut out),
            7 => self.scaling_suite(&mut out),
            8 => self.poisson_suite(&mut out),
            9 => self.excursion_suite(&mut out),
            10 => self.conditional_suite(&mut out),
            11 => self.determinism_suite(&mut out),
            _ => Err(Error::Config(format!("no criterion {id}"))),
        };
        if let Err(e) = res {
            out.error = Some(e.to_string());
        }
        out.finish()
    }

    pub fn run_suite(&self, suite: Suite) -> VerifyReport {
        let criteria: Vec<CriterionOutcome> = suite.criteria().into_iter().map(|id| self.run_criterion(id)).collect();
        VerifyReport {
            schema: SCHEMA_VERSION,
            version: version_string(),
            suite,
            config: self.config.clone(),
            passed: criteria.iter().all(|c| c.passed),
            criteria,
        }
    }

    fn kernel_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let k = &self.kernel;
        out.checks.push(Check::close("a(0,0)", k.potential(p(0, 0)), 0.0, 0.0));
        let closed = [
            ((1, 0), 1.0),
            ((1, 1), 4.0 / PI),
            ((2, 0), 4.0 - 8.0 / PI),
            ((2, 1), 8.0 / PI - 1.0),
            ((3, 3), 4.0 / PI * (1.0 + 1.0 / 3.0 + 1.0 / 5.0)),
        ];
        for ((x, y), v) in closed {
            out.checks.push(Check::close(
                format!("a({x},{y})"),
                k.potential(p(x, y)),
                v,
                KERNEL_TOLERANCE,
            ));
        }
        let mut worst: f64 = 0.0;
        let r = 200;
        for x in -r..=r {
            for y in -r..=r {
                let q = p(x, y);
                if q.norm_sq() > r * r || q.is_origin() {
                    continue;
                }
                let mean = q.neighbors().iter().map(|&n| k.potential(n)).sum::<f64>() / 4.0;
                worst = worst.max((mean - k.potential(q)).abs());
            }
        }
        out.checks.push(Check::at_most(
            "harmonicity residual on B(200)",
            worst,
            HARMONIC_TOLERANCE,
        ));
        let at_origin = p(0, 0).neighbors().iter().map(|&n| k.potential(n)).sum::<f64>() / 4.0;
        out.checks.push(Check::close(
            "mean of a over the neighbours of 0",
            at_origin,
            1.0,
            HARMONIC_TOLERANCE,
        ));
        for q in [p(100, 0), p(60, 80), p(0, -100), p(-80, 60)] {
            let asym = 2.0 / PI * q.norm().ln() + gamma_prime();
            out.checks.push(Check::at_most(
                format!("asymptotic residual at ({q})"),
                (k.potential(q) - asym).abs(),
                ASYMPTOTIC_TOLERANCE,
            ));
        }
        Ok(())
    }

    fn capacity_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let k = &self.kernel;
        let mut rng = self.seed(2).rng();
        let mut worst_pair: f64 = 0.0;
        for _ in 0..50 {
            let x = loop {
                let q = p(rng.random_range(-100..=100), rng.random_range(-100..=100));
                if !q.is_origin() {
                    break q;
                }
            };
            let cap = analyze(&LatticeSet::new(vec![p(0, 0), x])?, k)?.cap;
            worst_pair = worst_pair.max((cap - k.potential(x) / 2.0).abs());
        }
        out.checks.push(Check::at_most(
            "cap({0,x}) - a(x)/2, 50 random x",
            worst_pair,
            CAPACITY_TOLERANCE,
        ));

        let mut worst_tri: f64 = 0.0;
        let mut triples = 0;
        while triples < 100 {
            let pts: Vec<LatticePoint> = (0..3)
                .map(|_| p(rng.random_range(-20..=20), rng.random_range(-20..=20)))
                .collect();
            if pts.iter().any(|q| q.norm_sq() > 400) || pts[0] == pts[1] || pts[1] == pts[2] || pts[0] == pts[2] {
                continue;
            }
            let matrix = analyze(&LatticeSet::new(pts.clone())?, k)?.cap;
            let closed = capacity_three_point(pts[0], pts[1], pts[2], k)?;
            worst_tri = worst_tri.max((matrix - closed).abs());
            triples += 1;
        }
        out.checks.push(Check::at_most(
            "three-point formula vs matrix, 100 triples in B(20)",
            worst_tri,
            CAPACITY_TOLERANCE,
        ));

        let mut worst_routes: f64 = 0.0;
        let mut sets = 0;
        while sets < 200 {
            let size = rng.random_range(2..=10);
            let mut pts: Vec<LatticePoint> = Vec::new();
            while pts.len() < size {
                let q = p(rng.random_range(-12..=12), rng.random_range(-12..=12));
                if !pts.contains(&q) {
                    pts.push(q);
                }
            }
            let prof = match analyze(&LatticeSet::new(pts)?, k) {
                Ok(prof) => prof,
                Err(Error::Degenerate { .. }) => continue,
                Err(e) => return Err(e),
            };
            worst_routes = worst_routes.max((prof.cap - prof.cap_from_potential).abs());
            sets += 1;
        }
        out.checks.push(Check::at_most(
            "two capacity routes, 200 random sets",
            worst_routes,
            CAPACITY_TOLERANCE,
        ));

        let ball = analyze(&LatticeSet::ball(LatticePoint::ORIGIN, 100.0)?, k)?.cap;
        out.checks.push(Check::close(
            "cap(B(100)) vs a(100)",
            ball,
            potential_real(100.0)?,
            BALL_CAPACITY_TOLERANCE,
        ));
        Ok(())
    }

    fn h_transform_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let k = &self.kernel;
        for r in 3..=6 {
            let kernels = exit_kernels(r, k)?;
            let gap = kernels.iter().map(|e| e.max_route_gap).fold(0.0, f64::max);
            out.checks.push(Check::at_most(
                format!("exit-kernel route gap, R={r}"),
                gap,
                EXIT_ROUTE_TOLERANCE,
            ));
            let mass = kernels
                .iter()
                .map(|e| (e.hat_route.iter().sum::<f64>() - 1.0).abs())
                .fold(0.0, f64::max);
            out.checks.push(Check::at_most(
                format!("exit-kernel mass defect, R={r}"),
                mass,
                EXIT_ROUTE_TOLERANCE,
            ));
        }

        let (worst, paths) = enumerate_path_identity(4, 8, k);
        out.checks.push(Check::at_most(
            "path-probability identity, paths of length <= 8 in B(4)",
            worst,
            PATH_TOLERANCE,
        ));
        out.notes.push(format!("{paths} paths enumerated"));

        let mut row: f64 = 0.0;
        let mut rev: f64 = 0.0;
        let r = 100;
        for x in -r..=r {
            for y in -r..=r {
                let q = p(x, y);
                if q.norm_sq() > r * r || q.is_origin() {
                    continue;
                }
                let aq = k.potential(q);
                let probs: Vec<f64> = q.neighbors().iter().map(|&n| k.potential(n) / (4.0 * aq)).collect();
                row = row.max((probs.iter().sum::<f64>() - 1.0).abs());
                for (j, &n) in q.neighbors().iter().enumerate() {
                    if n.is_origin() {
                        continue;
                    }
                    let an = k.potential(n);
                    let back = aq / (4.0 * an);
                    rev = rev.max((aq * aq * probs[j] - an * an * back).abs() / (aq * an));
                }
            }
        }
        out.checks.push(Check::at_most(
            "row sums of the conditioned walk on B(100)",
            row,
            PATH_TOLERANCE,
        ));
        out.checks.push(Check::at_most(
            "reversibility w.r.t. a^2 on B(100)",
            rev,
            PATH_TOLERANCE,
        ));
        Ok(())
    }

    fn hitting_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let k = &self.kernel;
        let exec = self.config.execution;
        let tracer = BallTracer::new(6, k)?;
        let cases: [HitCase; 3] = [
            ((1, 0), &[(-1, 0), (0, 1)]),
            ((2, 1), &[(-1, 3), (0, -2)]),
            ((3, 2), &[(-3, -2), (4, 3)]),
        ];
        for (ci, (start, targets)) in cases.iter().enumerate() {
            let x = p(start.0, start.1);
            let s = tracer.start_index(x)?;
            let tidx: Vec<usize> = targets
                .iter()
                .map(|&(a, b)| tracer.start_index(p(a, b)))
                .collect::<Result<_>>()?;
            let seed = self.seed(4).child(ci as u64);
            let nt = tidx.len();
            let tallies = fold_replicas(
                HIT_PATHS,
                exec,
                || vec![0u64; nt + 1],
                |acc, i| {
                    let mut rng = seed.child(i).rng();
                    let mut hit = vec![false; nt];
                    let mut visits_start = 0u64;
                    tracer.run(
                        s,
                        &mut rng,
                        |site| {
                            visits_start += (site == s) as u64;
                            for (h, &t) in hit.iter_mut().zip(&tidx) {
                                *h |= site == t;
                            }
                        },
                        || {},
                    );
                    for (a, h) in acc.iter_mut().zip(&hit) {
                        *a += *h as u64;
                    }
                    acc[nt] += (visits_start > 1) as u64;
                },
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
            for (j, &(a, b)) in targets.iter().enumerate() {
                let y = p(a, b);
                let est = three_sigma(Estimate::binomial(tallies[j], HIT_PATHS, 0.99)?);
                out.comparisons.push(compare(
                    &format!("P({x})[hit ({y})]"),
                    hat_hit_point_prob(x, y, k)?,
                    est,
                    0.0,
                ));
            }
            let est = three_sigma(Estimate::binomial(tallies[nt], HIT_PATHS, 0.99)?);
            out.comparisons
                .push(compare(&format!("P({x})[return]"), hat_return_prob(x, k)?, est, 0.0));
        }

        // escape from B(10) starting at (200, 0): walk until the walk enters
        // B(10) or leaves B(220), then average the exact hitting probability
        let r = 10;
        let start = p(200, 0);
        let law = EntranceLaw::new(&LatticeSet::ball(LatticePoint::ORIGIN, r as f64)?, k)?;
        let seed = self.seed(4).child(100);
        let stop2 = ESCAPE_STOP_RADIUS * ESCAPE_STOP_RADIUS;
        let values: Vec<f64> = map_replicas(ESCAPE_PATHS, exec, |i| -> Result<f64> {
            let mut rng = seed.child(i).rng();
            let mut x = start;
            loop {
                if x.norm_sq() <= r * r {
                    return Ok(0.0);
                }
                if x.norm_sq() > stop2 {
                    return Ok(1.0 - law.hat_hit_probability(x, k)?);
                }
                x = hat_step(x, k, &mut rng)?;
            }
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let est = Estimate::from_samples(&values, THREE_SIGMA_LEVEL)?;
        out.comparisons.push(compare(
            "escape from B(10) at (200,0) vs 1 - a(10)/a(x)",
            hat_escape_ball_prob(start, r as f64, k)?,
            est,
            ESCAPE_SLACK,
        ));
        out.notes.push(format!(
            "exact escape probability {:.6}",
            1.0 - law.hat_hit_probability(start, k)?
        ));
        Ok(())
    }

    fn vacancy_tallies(&self) -> Result<&VacancyTallies> {
        let res = self.vacancy.get_or_init(|| {
            let cfg = InterlacementConfig::new(VACANCY_WINDOW, VACANCY_LEVELS.to_vec(), self.seed(5));
            let sampler = SoupSampler::new(&cfg, &self.kernel)?;
            let seed = cfg.seed;
            Ok(fold_replicas(
                VACANCY_SOUPS,
                self.config.execution,
                || (VacancyTallies::empty(), MinLabelGrid::new(VACANCY_WINDOW)),
                |(acc, grid), i| {
                    sampler.sample_into(&mut seed.child(i).rng(), grid);
                    acc.soups += 1;
                    let mut vac = [[false; 3]; VACANCY_POINTS.len()];
                    for (j, &(a, b)) in VACANCY_POINTS.iter().enumerate() {
                        for (l, &alpha) in VACANCY_LEVELS.iter().enumerate() {
                            vac[j][l] = grid.is_vacant(p(a, b), alpha).expect("point in window");
                            acc.vacant[j][l] += vac[j][l] as u64;
                        }
                    }
                    acc.joint += (vac[0][0] && vac[3][0]) as u64;
                    // A = {0, (1,0)}, x = (6,2), −A + x = {(6,2), (5,2)} at α = 0.75
                    if vac[5][1] {
                        let d = vac[4][1] as i64 as f64 - vac[6][1] as i64 as f64;
                        acc.conditioned += 1;
                        acc.diff_sum += d;
                        acc.diff_sq += d * d;
                        acc.diffs.push(d);
                    }
                },
                |(a, g), (b, _)| (a.merge(b), g),
            )
            .0)
        });
        res.as_ref().map_err(|e| Error::Config(e.to_string()))
    }

    fn one_site_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let t = self.vacancy_tallies()?;
        for (j, &(a, b)) in VACANCY_POINTS[..3].iter().enumerate() {
            let x = p(a, b);
            for (l, &alpha) in VACANCY_LEVELS.iter().enumerate() {
                if alpha == 0.75 {
                    continue;
                }
                let est = three_sigma(Estimate::binomial(t.vacant[j][l], t.soups, 0.99)?);
                let predicted = (-PI * alpha * self.kernel.potential(x) / 2.0).exp();
                out.comparisons
                    .push(compare(&format!("P[({x}) vacant], alpha={alpha}"), predicted, est, 0.0));
            }
        }
        out.notes.push(format!(
            "{} soups on B({VACANCY_WINDOW}), exact re-entry (bias 0)",
            t.soups
        ));
        Ok(())
    }

    fn two_site_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let t = self.vacancy_tallies()?;
        let est = three_sigma(Estimate::binomial(t.joint, t.soups, 0.99)?);
        let predicted = two_point_prob(p(5, 0), p(0, 5), 0.5, &self.kernel)?;
        out.comparisons
            .push(compare("P[(5,0),(0,5) vacant], alpha=0.5", predicted, est, 0.0));
        let (z, pval) = paired_z_test(&t.diffs)?;
        out.checks.push(Check::within(
            "conditional stationarity p-value, A={0,(1,0)}, x=(6,2), alpha=0.75",
            pval,
            STATIONARITY_LEVEL,
            1.0,
        ));
        out.notes.push(format!(
            "{} soups with x vacant; mean difference {:.5}, z = {z:.3}",
            t.conditioned,
            t.diff_sum / t.conditioned.max(1) as f64
        ));
        Ok(())
    }

    fn scaling_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let alpha = 0.5;
        let radii = [8.0, 16.0, 32.0, 64.0];
        let cfg = InterlacementConfig::new(SCALING_WINDOW, vec![alpha], self.seed(7));
        let sampler = SoupSampler::new(&cfg, &self.kernel)?;
        let seed = cfg.seed;
        let sums = fold_replicas(
            SCALING_SOUPS,
            self.config.execution,
            || ([0u64; 4], MinLabelGrid::new(SCALING_WINDOW)),
            |(acc, grid), i| {
                sampler.sample_into(&mut seed.child(i).rng(), grid);
                let v = grid.vacant_grid(alpha);
                for (a, &r) in acc.iter_mut().zip(&radii) {
                    *a += v.vacant_in_ball(r);
                }
            },
            |(mut a, g), (b, _)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                (a, g)
            },
        )
        .0;
        let pairs: Vec<(f64, f64)> = radii
            .iter()
            .zip(&sums)
            .map(|(&r, &s)| (r, s as f64 / SCALING_SOUPS as f64))
            .collect();
        let slope = loglog_slope(&pairs)?;
        out.checks.push(Check::close(
            "log-log slope of E|V ∩ B(r)|, alpha=0.5",
            slope,
            2.0 - alpha,
            SCALING_TOLERANCE,
        ));
        for (r, m) in &pairs {
            let exact: f64 = LatticeSet::ball(LatticePoint::ORIGIN, *r)?
                .points()
                .iter()
                .map(|&q| (-PI * alpha * self.kernel.potential(q) / 2.0).exp())
                .sum();
            out.notes
                .push(format!("r={r}: mean vacant {m:.3}, exact expectation {exact:.3}"));
        }
        Ok(())
    }

    fn poisson_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let levels = vec![0.5, 0.75, 1.0];
        let cfg = InterlacementConfig::new(POISSON_WINDOW, levels.clone(), self.seed(8));
        let sampler = SoupSampler::new(&cfg, &self.kernel)?;
        let inner = LatticeSet::ball(LatticePoint::ORIGIN, 10.0)?;
        let mask = sampler.mask(&inner);
        let seed = cfg.seed;
        let rows: Vec<(bool, [f64; 3])> = map_replicas(POISSON_SOUPS, self.config.execution, |i| {
            let mut grid = MinLabelGrid::new(POISSON_WINDOW);
            let (labels, hitting) = sampler.sample_into_masked(&mut seed.child(i).rng(), &mut grid, &mask);
            let grids: Vec<_> = levels.iter().map(|&a| grid.vacant_grid(a)).collect();
            let nested = grids.windows(2).all(|w| w[1].is_subset_of(&w[0]))
                && grids.iter().all(|g| g.is_vacant(LatticePoint::ORIGIN) == Some(true));
            let thinned = labels.iter().filter(|&&u| u <= PI * 0.5).count();
            (nested, [labels.len() as f64, thinned as f64, hitting.len() as f64])
        });
        let nested = rows.iter().filter(|r| r.0).count();
        out.checks.push(Check::within(
            "soups with nested vacant sets (levels 0.5 ⊃ 0.75 ⊃ 1)",
            nested as f64,
            POISSON_SOUPS as f64,
            POISSON_SOUPS as f64,
        ));
        let names = [
            "trajectory count",
            "trajectory count at alpha=0.5",
            "trajectories visiting B(10)",
        ];
        let cap_inner = analyze(&inner, &self.kernel)?.cap;
        let means = [sampler.expected_count(), sampler.expected_count() / 2.0, PI * cap_inner];
        for (j, name) in names.iter().enumerate() {
            let col: Vec<f64> = rows.iter().map(|r| r.1[j]).collect();
            let e = Estimate::from_samples(&col, THREE_SIGMA_LEVEL)?;
            let var = e.stderr * e.stderr * col.len() as f64;
            out.checks.push(Check::within(
                format!("{name}: variance / mean"),
                var / e.mean,
                DISPERSION_BAND.0,
                DISPERSION_BAND.1,
            ));
            out.comparisons
                .push(compare(&format!("{name}: mean"), means[j], e, 0.0));
        }
        Ok(())
    }

    fn excursion_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let rep = excursion_count_check(
            TORUS_EXCURSION_SIDE,
            1.0,
            TORUS_EXCURSION_REPLICAS,
            self.seed(9),
            self.config.execution,
        )?;
        out.checks.push(Check::close(
            "relative deviation of mean N_alpha, n=1000, alpha=1",
            rep.relative_deviation,
            0.0,
            EXCURSION_TOLERANCE,
        ));
        out.notes.push(format!(
            "mean N_alpha {:.2} (predicted {:.2}), sd/mean {:.3}",
            rep.estimate.mean, rep.predicted, rep.spread
        ));
        Ok(())
    }

    fn conditional_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let set = LatticeSet::new(vec![p(0, 0), p(1, 0)])?;
        let rep = conditional_uncovered_estimate(
            CONDITIONAL_SIDE,
            CONDITIONAL_ALPHA,
            &set,
            CONDITIONAL_REPLICAS,
            self.seed(10),
            &self.kernel,
            self.config.execution,
        )?;
        out.checks.push(Check::within(
            "accepted replicas",
            rep.accepted as f64,
            CONDITIONAL_MIN_ACCEPTED as f64,
            f64::INFINITY,
        ));
        out.checks.push(Check::close(
            "conditional frequency of A uncovered, n=64, alpha=0.25",
            rep.estimate.mean,
            rep.predicted,
            CONDITIONAL_BAND,
        ));
        out.notes.push(format!(
            "acceptance rate {:.4}; banded trend check of a limit theorem",
            rep.acceptance_rate
        ));
        Ok(())
    }

    fn determinism_suite(&self, out: &mut CriterionOutcome) -> Result<()> {
        let a = determinism_probe(&self.kernel, self.config.seed, Execution::Sequential)?;
        let b = determinism_probe(&self.kernel, self.config.seed, Execution::Sequential)?;
        let c = determinism_probe(&self.kernel, self.config.seed, Execution::Parallel)?;
        let report = |v: &serde_json::Value| serde_json::to_string(v).expect("serialisable");
        out.checks.push(Check::within(
            "repeated runs give identical JSON",
            (report(&a) == report(&b)) as u8 as f64,
            1.0,
            1.0,
        ));
        out.checks.push(Check::within(
            "parallel equals sequential",
            (report(&a) == report(&c)) as u8 as f64,
            1.0,
            1.0,
        ));
        let again = self.run_criterion(1);
        let first = self.run_criterion(1);
        out.checks.push(Check::within(
            "repeated exact criterion gives identical JSON",
            (serde_json::to_string(&again)? == serde_json::to_string(&first)?) as u8 as f64,
            1.0,
            1.0,
        ));
        Ok(())
    }
}

/// Small mixed workload whose serialised result must not depend on the
/// execution mode or on repetition.
pub fn determinism_probe(kernel: &PotentialKernel, seed: u64, exec: Execution) -> Result<serde_json::Value> {
    let base = RngSeed::new(seed, 11);
    let cfg = InterlacementConfig::new(16, vec![0.5, 1.0], base.child(0));
    let sampler = SoupSampler::new(&cfg, kernel)?;
    let soup_seed = cfg.seed;
    let (vacant, count, _) = fold_replicas(
        400,
        exec,
        || (0u64, 0u64, MinLabelGrid::new(16)),
        |(v, c, g), i| {
            *c += sampler.sample_into(&mut soup_seed.child(i).rng(), g);
            *v += g.vacant_grid(0.5).vacant_count;
        },
        |(a, b, g), (c, d, _)| (a + c, b + d, g),
    );
    let sums = fold_replicas(
        1000,
        exec,
        || 0.0f64,
        |acc, i| *acc += base.child(1).child(i).rng().random::<f64>(),
        |a, b| a + b,
    );
    let torus = excursion_count_check(128, 0.5, 8, base.child(2), exec)?;
    Ok(serde_json::json!({
        "vacant_total": vacant,
        "trajectories": count,
        "uniform_sum": sums,
        "torus_counts": torus.counts,
        "torus_mean": torus.estimate.mean,
    }))
}

/// Largest relative error of `P̂[γ] = 4^{-m} a(x_m)/a(x_0)` over all
/// nearest-neighbour paths in `B(r) \ {0}` with at most `max_len` steps,
/// and the number of paths checked.
pub fn enumerate_path_identity(r: i64, max_len: usize, kernel: &PotentialKernel) -> (f64, u64) {
    let ball = LatticeSet::ball(LatticePoint::ORIGIN, r as f64).expect("valid radius");
    let inside = |q: LatticePoint| q.norm_sq() <= r * r && !q.is_origin();
    let mut worst: f64 = 0.0;
    let mut count = 0u64;
    for &x0 in ball.points() {
        if x0.is_origin() {
            continue;
        }
        let a0 = kernel.potential(x0);
        // depth-first over (site, path probability, length)
        let mut stack = vec![(x0, 1.0f64, 0usize)];
        while let Some((x, prob, depth)) = stack.pop() {
            let ax = kernel.potential(x);
            let closed = 0.25f64.powi(depth as i32) * ax / a0;
            worst = worst.max((prob - closed).abs() / closed);
            count += 1;
            if depth < max_len {
                for y in x.neighbors() {
                    if inside(y) {
                        stack.push((y, prob * kernel.potential(y) / (4.0 * ax), depth + 1));
                    }
                }
            }
        }
    }
    (worst, count)
}

/// Human-readable summary, one line per criterion plus failing checks.
pub fn render_table(report: &VerifyReport) -> String {
    let mut s = String::new();
    for c in &report.criteria {
        s.push_str(&format!(
            "{:>2}  {:<48} {}\n",
            c.id,
            c.title,
            if c.passed { "PASS" } else { "FAIL" }
        ));
        for f in c.failures() {
            s.push_str(&format!("      failed: {f}\n"));
        }
    }
    s.push_str(&format!(
        "suite {:?}: {}\n",
        report.suite,
        if report.passed {
            "all criteria passed"
        } else {
            "FAILURES"
        }
    ));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_and_titles() {
        assert_eq!(Suite::All.criteria().len(), 11);
        assert_eq!("exact".parse::<Suite>().unwrap(), Suite::Exact);
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(criterion_title(99), "unknown");
    }

    #[test]
    fn path_identity_small() {
        let k = PotentialKernel::build(16).unwrap();
        let (worst, n) = enumerate_path_identity(2, 4, &k);
        assert!(worst < 1e-13);
        assert!(n > 12);
    }

    #[test]
    fn checks() {
        assert!(Check::close("x", 1.0, 1.05, 0.1).passed);
        assert!(!Check::close("x", 1.0, 1.2, 0.1).passed);
        assert!(Check::at_most("x", 1e-13, 1e-12).passed);
        assert!(!Check::within("x", f64::NAN, 0.0, 1.0).passed);
    }
}
