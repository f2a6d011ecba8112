//! The potential kernel `a(x)` of two-dimensional simple random walk.
//!
//! Values inside the exact window `‖x‖∞ ≤ exact_radius` come from a table
//! computed once by quadrature of the Fourier representation
//!
//! ```text
//! a(x1, x2) = (2/π) ∫_0^π [1 − cos(x1 t)·e^{−|x2| s(t)}] / sinh s(t) dt,
//! sinh(s/2) = sin(t/2),
//! ```
//!
//! which is the inner integral of the usual double integral done in closed
//! form. The integrand is split as
//! `(1 − e^{−|x2| s}) + e^{−|x2| s}·2 sin²(x1 t/2)` so that no cancellation
//! occurs; the table reaches machine precision. Outside the window the
//! asymptotic expansion `(2/π) ln‖x‖ + γ'` is used, with Euclidean norm.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// Default half-width of the exact window.
pub const DEFAULT_EXACT_RADIUS: i64 = 256;

/// Largest accepted exact radius. The table holds `(R+1)(R+2)/2` values and
/// costs `O(R³)` to build, so `R = 1024` takes a few seconds and 4 MiB.
pub const MAX_EXACT_RADIUS: i64 = 1024;

/// The constant `γ' = (2γ + ln 8)/π` of the asymptotic expansion.
pub fn gamma_prime() -> f64 {
    (2.0 * EULER_GAMMA + 8f64.ln()) / PI
}

/// Real-argument potential `a(r) = (2/π) ln r + γ'`, defined for `r ≥ 1`.
pub fn potential_real(r: f64) -> Result<f64> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain(format!("a(r) needs a finite r >= 1, got {r}")));
    }
    Ok(asymptotic(r))
}

#[inline]
fn asymptotic(norm: f64) -> f64 {
    std::f64::consts::FRAC_2_PI * norm.ln() + gamma_prime()
}

/// Tabulated potential kernel. Immutable once built.
#[derive(Debug, Clone)]
pub struct PotentialKernel {
    exact_radius: i64,
    /// One octant `0 ≤ lo ≤ hi ≤ exact_radius`, triangular layout.
    table: Vec<f64>,
    gamma_prime: f64,
}

#[inline]
fn tri(hi: usize, lo: usize) -> usize {
    hi * (hi + 1) / 2 + lo
}

impl PotentialKernel {
    /// Tabulates `a` on the octant of `[-R, R]²`.
    pub fn build(exact_radius: i64) -> Result<Self> {
        if exact_radius < 2 {
            return Err(Error::Domain(format!("exact_radius must be >= 2, got {exact_radius}")));
        }
        if exact_radius > MAX_EXACT_RADIUS {
            return Err(Error::Capacity(format!(
                "exact_radius {exact_radius} exceeds the cap {MAX_EXACT_RADIUS}"
            )));
        }
        let n = exact_radius as usize;
        let nodes = quadrature_nodes(n);

        // Per-node constants: weight·(2/π)/sinh s and s itself.
        let (theta, scaled_w, s): (Vec<f64>, Vec<f64>, Vec<f64>) = {
            let mut th = Vec::with_capacity(nodes.len());
            let mut sw = Vec::with_capacity(nodes.len());
            let mut ss = Vec::with_capacity(nodes.len());
            for &(t, w) in &nodes {
                let half = (0.5 * t).sin();
                let s_t = 2.0 * half.asinh();
                let sinh_s = 2.0 * half * (1.0 + half * half).sqrt();
                th.push(t);
                sw.push(w * std::f64::consts::FRAC_2_PI / sinh_s);
                ss.push(s_t);
            }
            (th, sw, ss)
        };

        // 2 sin²(x1 t/2) for every x1 and node.
        let k = nodes.len();
        let mut osc = vec![0.0; (n + 1) * k];
        for x1 in 0..=n {
            let row = &mut osc[x1 * k..(x1 + 1) * k];
            for (j, r) in row.iter_mut().enumerate() {
                let v = (0.5 * x1 as f64 * theta[j]).sin();
                *r = 2.0 * v * v;
            }
        }

        let mut table = vec![0.0; tri(n, n) + 1];
        let mut decay = vec![0.0; k];
        for x2 in 0..=n {
            let mut base = 0.0;
            for j in 0..k {
                let e = (-(x2 as f64) * s[j]).exp();
                decay[j] = scaled_w[j] * e;
                base += scaled_w[j] * -(-(x2 as f64) * s[j]).exp_m1();
            }
            for x1 in x2..=n {
                let row = &osc[x1 * k..(x1 + 1) * k];
                let dot: f64 = row.iter().zip(&decay).map(|(a, b)| a * b).sum();
                table[tri(x1, x2)] = base + dot;
            }
        }
        table[0] = 0.0;

        Ok(Self {
            exact_radius,
            table,
            gamma_prime: gamma_prime(),
        })
    }

    pub fn exact_radius(&self) -> i64 {
        self.exact_radius
    }

    pub fn gamma_prime(&self) -> f64 {
        self.gamma_prime
    }

    /// Whether `p` is served from the exact table.
    pub fn is_exact(&self, p: LatticePoint) -> bool {
        p.norm_inf() <= self.exact_radius
    }

    /// `a(p)`; exact inside the window, asymptotic outside.
    #[inline]
    pub fn potential(&self, p: LatticePoint) -> f64 {
        let (ax, ay) = (p.x.unsigned_abs(), p.y.unsigned_abs());
        let (hi, lo) = if ax >= ay { (ax, ay) } else { (ay, ax) };
        if hi <= self.exact_radius as u64 {
            self.table[tri(hi as usize, lo as usize)]
        } else {
            asymptotic(p.norm())
        }
    }

    /// `a(r)` for real `r ≥ 1`.
    pub fn potential_real(&self, r: f64) -> Result<f64> {
        potential_real(r)
    }
}

/// Composite Gauss–Legendre rule on `[0, π]`, fine enough to resolve the
/// oscillation `cos(x1 t)` and the decay `e^{−x2 s}` for `x1, x2 ≤ n`.
fn quadrature_nodes(n: usize) -> Vec<(f64, f64)> {
    const ORDER: usize = 16;
    let (gx, gw) = gauss_legendre(ORDER);
    // About half an oscillation period per panel.
    let panels = (n.max(16) as f64).ceil() as usize;
    let h = PI / panels as f64;
    let mut out = Vec::with_capacity(panels * ORDER);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for i in 0..ORDER {
            out.push((mid + 0.5 * h * gx[i], 0.5 * h * gw[i]));
        }
    }
    out
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((integral - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_small_values() {
        let k = PotentialKernel::build(8).unwrap();
        assert_eq!(k.potential(p(0, 0)), 0.0);
        assert!((k.potential(p(1, 0)) - 1.0).abs() < 1e-13);
        assert!((k.potential(p(1, 1)) - 4.0 / PI).abs() < 1e-13);
        assert!((k.potential(p(2, 0)) - (4.0 - 8.0 / PI)).abs() < 1e-13);
        assert!((k.potential(p(2, 1)) - (8.0 / PI - 1.0)).abs() < 1e-13);
        // a(n,n) = (4/π) Σ_{k≤n} 1/(2k−1)
        let diag5: f64 = (1..=5).map(|k| 1.0 / (2 * k - 1) as f64).sum::<f64>() * 4.0 / PI;
        assert!((k.potential(p(5, 5)) - diag5).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(PotentialKernel::build(0).is_err());
        assert!(PotentialKernel::build(1).is_err());
        assert!(matches!(
            PotentialKernel::build(MAX_EXACT_RADIUS + 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn real_argument() {
        let gp = gamma_prime();
        assert!((gp - 1.029_373_7).abs() < 1e-6);
        assert_eq!(potential_real(1.0).unwrap(), gp);
        let r = (PI / 2.0).exp();
        assert!((potential_real(r).unwrap() - (1.0 + gp)).abs() < 1e-14);
        assert!(potential_real(0.5).is_err());
        assert!(potential_real(f64::NAN).is_err());
    }

    #[test]
    fn asymptotic_branch_outside_window() {
        let k = PotentialKernel::build(16).unwrap();
        let q = p(100, 0);
        assert!(!k.is_exact(q));
        assert_eq!(k.potential(q), potential_real(100.0).unwrap());
        assert_eq!(k.potential(p(30, 40)), potential_real(50.0).unwrap());
    }

    #[test]
    fn octant_symmetry_is_bitwise() {
        let k = PotentialKernel::build(12).unwrap();
        for x in -12..=12 {
            for y in -12..=12 {
                let v = k.potential(p(x, y));
                for q in p(x, y).dihedral_images() {
                    assert_eq!(k.potential(q).to_bits(), v.to_bits());
                }
            }
        }
    }
}
