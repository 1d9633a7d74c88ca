//! Quadrature machinery shared by the error-term and moment modules.
//!
//! Composite Gauss-Legendre panels whose width tracks the local zero
//! spacing (h = min(0.25, 1.5/log t), eight nodes per panel), a cumulative
//! moment cache so that T-sweeps never re-integrate [0, T), and a dense
//! uniform sampling grid for the convolution-style smoothed-moment
//! experiments.

use crate::error::{Error, Result};
use crate::zeta;

/// Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and P_n'(x) by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const PANEL_NODES: usize = 8;

/// Panel width rule: a quarter of the zero spacing 2 pi / log(t/2pi),
/// capped at 0.25.
#[inline]
pub fn panel_width(t: f64) -> f64 {
    let l = t.max(20.0).ln();
    (1.5 / l).min(0.25)
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    GL.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// Eight-node Gauss-Legendre on [a, b].
pub fn gl8_panel(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl8();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Composite panel integration of `f` over [a, b] with the zero-spacing
/// width rule.  Panels are laid left to right; accumulation is compensated
/// and sequential, so results do not depend on call context.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut x = a;
    while x < b {
        let h = panel_width(x.max(a)).min(b - x);
        let term = gl8_panel(&mut f, x, x + h);
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        x += h;
    }
    sum
}

/// Cumulative integrals of |zeta(1/2+it)|^{2k} over [0, T] for k = 1..=4,
/// cached at fixed panel boundaries and extended monotonically.  The zeta
/// value at each node is evaluated once; the four powers share it.
pub struct MomentEngine {
    /// k = 1 integrand; the unit hook replaces it in tests
    base: fn(f64) -> f64,
    /// panel boundaries x_0 = 0 < x_1 < ...
    bounds: Vec<f64>,
    /// cum[k-1][i] = integral of base^k over [0, bounds[i]]
    cum: [Vec<f64>; 4],
    comp: [f64; 4],
    /// subsampled refinement comparisons, scaled up to a total estimate
    err_estimate: f64,
}

fn zeta_abs2(t: f64) -> f64 {
    zeta::zeta_point(t).abs2
}

impl MomentEngine {
    pub fn new() -> Self {
        Self::with_base(zeta_abs2)
    }

    /// Test hook: integrand forced to the constant 1 for every power.
    pub fn with_unit_integrand() -> Self {
        Self::with_base(|_| 1.0)
    }

    fn with_base(base: fn(f64) -> f64) -> Self {
        MomentEngine {
            base,
            bounds: vec![0.0],
            cum: [vec![0.0], vec![0.0], vec![0.0], vec![0.0]],
            comp: [0.0; 4],
            err_estimate: 0.0,
        }
    }

    fn panel_moments(&self, a: f64, b: f64) -> [f64; 4] {
        let (nodes, weights) = gl8();
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = [0.0f64; 4];
        for (x, w) in nodes.iter().zip(weights) {
            let v = (self.base)(mid + half * x);
            let mut p = v;
            for a_k in acc.iter_mut() {
                *a_k += w * p;
                p *= v;
            }
        }
        for a_k in acc.iter_mut() {
            *a_k *= half;
        }
        acc
    }

    fn extend_to(&mut self, t: f64) {
        while *self.bounds.last().unwrap() < t {
            let a = *self.bounds.last().unwrap();
            let b = a + panel_width(a);
            let vals = self.panel_moments(a, b);
            // every 64th panel, estimate the local error by bisection
            if self.bounds.len() % 64 == 0 {
                let m = 0.5 * (a + b);
                let refined = self.panel_moments(a, m)[0] + self.panel_moments(m, b)[0];
                self.err_estimate += 64.0 * (vals[0] - refined).abs();
            }
            for k in 0..4 {
                let last = *self.cum[k].last().unwrap();
                let y = vals[k] - self.comp[k];
                let s = last + y;
                self.comp[k] = (s - last) - y;
                self.cum[k].push(s);
            }
            self.bounds.push(b);
        }
    }

    /// Integral of |zeta|^{2k} over [0, t].
    pub fn integral_to(&mut self, t: f64, k: u32) -> f64 {
        assert!((1..=4).contains(&k), "k must be 1..=4");
        if t <= 0.0 {
            return 0.0;
        }
        self.extend_to(t);
        // last boundary <= t
        let idx = match self.bounds.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.cum[k as usize - 1][i],
            Err(i) => i - 1,
        };
        let a = self.bounds[idx];
        let base = self.base;
        let tail = if k == 1 {
            integrate(base, a, t)
        } else {
            integrate(|x| base(x).powi(k as i32), a, t)
        };
        self.cum[k as usize - 1][idx] + tail
    }

    /// Total quadrature error estimate accumulated so far (subsampled
    /// panel-refinement differences, scaled).
    pub fn error_estimate(&self) -> f64 {
        self.err_estimate
    }

    /// Fails when the running error estimate exceeds `target`.
    pub fn check_accuracy(&self, target: f64) -> Result<()> {
        if self.err_estimate > target {
            return Err(Error::QuadratureAccuracy {
                achieved: self.err_estimate,
                target,
            });
        }
        Ok(())
    }
}

impl Default for MomentEngine {
    fn default() -> Self {
        Self::new()
    }
}

/// |zeta(1/2+it)|^2 sampled on a uniform grid, the workhorse behind the
/// smoothed-moment sweeps, exceedance measures and large-value scans.
/// Step 0.05 resolves the fastest |zeta|^4 oscillations far beyond the
/// Gaussian cutoff of every smoothing width in play.
pub struct DenseGrid {
    pub t0: f64,
    pub step: f64,
    pub abs2: Vec<f64>,
}

pub const DENSE_STEP: f64 = 0.05;

impl DenseGrid {
    /// Sample [t_lo, t_hi] inclusive at `DENSE_STEP`, snapping t_lo down to
    /// a multiple of the step so that grids over nested ranges align.
    pub fn sample(t_lo: f64, t_hi: f64) -> Self {
        let step = DENSE_STEP;
        let i0 = (t_lo / step).floor() as i64;
        let i1 = (t_hi / step).ceil() as i64;
        let t0 = i0 as f64 * step;
        let abs2 = (i0..=i1)
            .map(|i| {
                let t = (i as f64 * step).abs();
                zeta::zeta_point(t).abs2
            })
            .collect();
        DenseGrid { t0, step, abs2 }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.abs2.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.abs2.is_empty()
    }

    #[inline]
    pub fn t_at(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.step
    }

    /// Index of the grid point nearest to t.
    #[inline]
    pub fn index_of(&self, t: f64) -> usize {
        (((t - self.t0) / self.step).round() as i64).clamp(0, self.len() as i64 - 1) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1
        for n in [2usize, 4, 8, 12] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..2 * n {
                let quad: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * xi.powi(deg as i32))
                    .sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((quad - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn integrate_smooth_function() {
        let got = integrate(|x| x.sin(), 0.0, PI);
        assert!((got - 2.0).abs() < 1e-12);
        let got = integrate(|x| (-x * x).exp(), -8.0, 8.0);
        assert!((got - PI.sqrt()).abs() < 1e-12);
        assert_eq!(integrate(|x| x, 5.0, 5.0), 0.0);
        assert_eq!(integrate(|x| x, 5.0, 3.0), 0.0);
    }

    #[test]
    fn unit_engine_is_linear() {
        let mut engine = MomentEngine::with_unit_integrand();
        for &t in &[0.5, 10.0, 123.456, 5000.0] {
            for k in 1..=4 {
                let v = engine.integral_to(t, k);
                assert!((v - t).abs() < 1e-9 * t, "t={t} k={k}: {v}");
            }
        }
        assert_eq!(engine.integral_to(0.0, 1), 0.0);
        assert_eq!(engine.integral_to(-3.0, 2), 0.0);
    }

    #[test]
    fn engine_extension_matches_fresh_computation() {
        // extending a cache must agree with a one-shot integral
        let mut warm = MomentEngine::new();
        warm.integral_to(40.0, 1);
        let extended = warm.integral_to(90.0, 1);
        let fresh = integrate(|t| zeta::zeta_point(t).abs2, 0.0, 90.0);
        assert!(
            (extended - fresh).abs() < 1e-8 * fresh,
            "{extended} vs {fresh}"
        );
        warm.check_accuracy(1e-3).unwrap();
    }

    #[test]
    fn engine_powers_consistent() {
        let mut engine = MomentEngine::new();
        let i2 = engine.integral_to(60.0, 2);
        let direct = integrate(|t| zeta::zeta_point(t).abs2.powi(2), 0.0, 60.0);
        assert!((i2 - direct).abs() < 1e-8 * direct.max(1.0));
    }

    #[test]
    fn mean_square_formula_sanity() {
        // int_0^T |zeta|^2 = T log(T/2pi) + (2 gamma - 1) T + E(T) with
        // E(T) of order T^{1/3} at most; a loose window suffices here
        let mut engine = MomentEngine::new();
        let t = 500.0;
        let i1 = engine.integral_to(t, 1);
        let main = t * (t / (2.0 * PI)).ln() + (2.0 * crate::EULER_GAMMA - 1.0) * t;
        assert!((i1 - main).abs() < 30.0, "I1={i1} main={main}");
    }

    #[test]
    fn dense_grid_alignment_and_values() {
        let g = DenseGrid::sample(99.9, 110.0);
        assert!(g.t0 <= 99.9 && (g.t0 / DENSE_STEP).fract() == 0.0);
        let i = g.index_of(105.0);
        assert!((g.t_at(i) - 105.0).abs() < 1e-9);
        let direct = zeta::zeta_point(g.t_at(i)).abs2;
        assert_eq!(g.abs2[i], direct);
    }
}
