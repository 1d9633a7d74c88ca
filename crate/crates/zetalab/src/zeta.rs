//! Evaluation of zeta(1/2+it) on the critical line.
//!
//! Two independent routes: a Riemann-Siegel evaluator with main sum of
//! length floor(sqrt(t/2pi)) and five correction terms, and an
//! Euler-Maclaurin evaluator with an explicit truncation bound that serves
//! as the slow oracle.  Phases are carried in double-double so that
//! `theta(t) - t*ln(n)` keeps its low bits at large heights.

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// One evaluation of zeta(1/2+it).
#[derive(Clone, Copy, Debug)]
pub struct ZetaPoint {
    pub t: f64,
    pub re: f64,
    pub im: f64,
    pub abs2: f64,
}

impl ZetaPoint {
    fn new(t: f64, re: f64, im: f64) -> Self {
        ZetaPoint {
            t,
            re,
            im,
            abs2: re * re + im * im,
        }
    }
}

// ---------------------------------------------------------------------------
// Riemann-Siegel theta
// ---------------------------------------------------------------------------

/// Stirling corrections 1/(48t) + 7/(5760 t^3) + 31/(80640 t^5) + ...
const THETA_CORR: [f64; 5] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
];

/// Lanczos g=7 coefficients for log Gamma, used for theta at small t where
/// the Stirling expansion has not yet converged.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn lgamma_complex(z: Complex64) -> Complex64 {
    // Recurrence to push Re(z) above 0.5, then the Lanczos formula.
    if z.re < 0.5 {
        return lgamma_complex(z + 1.0) - z.ln();
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Riemann-Siegel theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi.
pub fn rs_theta(t: f64) -> f64 {
    if t < 0.0 {
        return -rs_theta(-t);
    }
    if t < 8.0 {
        let lg = lgamma_complex(Complex64::new(0.25, 0.5 * t));
        return lg.im - 0.5 * t * PI.ln();
    }
    let mut s = 0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0;
    let t2 = t * t;
    let mut tp = t;
    for c in THETA_CORR {
        s += c / tp;
        tp *= t2;
    }
    s
}

/// theta(t) in double-double, reduced into [-pi, pi].  Only used for t >= 8
/// where the Stirling form applies.
fn rs_theta_dd_reduced(t: f64) -> Dd {
    let td = Dd::from_f64(t);
    let half_t = td.mul_f64(0.5);
    let mut s = half_t.mul(td.div(dd::TWO_PI).ln()).sub(half_t).sub(
        dd::PI.mul_f64(0.125),
    );
    let t2 = t * t;
    let mut tp = t;
    for c in THETA_CORR {
        s = s.add_f64(c / tp);
        tp *= t2;
    }
    s.mod_two_pi()
}

// ---------------------------------------------------------------------------
// ln(n) in double-double, shared by the main-sum phases
// ---------------------------------------------------------------------------

const LN_TABLE_LEN: usize = 4200;

fn ln_dd_table() -> &'static Vec<Dd> {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(LN_TABLE_LEN + 1);
        v.push(Dd::ZERO); // unused index 0
        v.push(Dd::ZERO); // ln 1
        for n in 2..=LN_TABLE_LEN as u64 {
            v.push(Dd::from_u64(n).ln());
        }
        v
    })
}

#[inline]
fn ln_dd(n: u64) -> Dd {
    let table = ln_dd_table();
    if (n as usize) < table.len() {
        table[n as usize]
    } else {
        Dd::from_u64(n).ln()
    }
}

// ---------------------------------------------------------------------------
// Truncated Taylor jets for the remainder-term coefficient functions
// ---------------------------------------------------------------------------

/// Taylor jet: coefficients of a function around a point, c[k] = f^(k)/k!.
#[derive(Clone, Copy)]
struct Jet<const N: usize> {
    c: [f64; N],
}

impl<const N: usize> Jet<N> {
    fn from_coeffs(parts: &[f64]) -> Self {
        let mut c = [0.0; N];
        c[..parts.len().min(N)].copy_from_slice(&parts[..parts.len().min(N)]);
        Jet { c }
    }

    /// sin and cos of the jet, by the standard ODE recurrences.
    fn sin_cos(&self) -> (Jet<N>, Jet<N>) {
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        let (s0, c0) = self.c[0].sin_cos();
        s[0] = s0;
        c[0] = c0;
        for k in 1..N {
            let mut sk = 0.0;
            let mut ck = 0.0;
            for j in 1..=k {
                let ju = j as f64 * self.c[j];
                sk += ju * c[k - j];
                ck -= ju * s[k - j];
            }
            s[k] = sk / k as f64;
            c[k] = ck / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    fn div(&self, den: &Jet<N>) -> Jet<N> {
        let mut q = [0.0; N];
        for k in 0..N {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= den.c[j] * q[k - j];
            }
            q[k] = acc / den.c[0];
        }
        Jet { c: q }
    }

    /// Drop the leading coefficient (divide the series by its variable);
    /// callers must know c[0] vanishes analytically.
    fn shift_down(&self) -> Jet<N> {
        let mut c = [0.0; N];
        c[..N - 1].copy_from_slice(&self.c[1..]);
        Jet { c }
    }
}

const PSI_ORDER: usize = 13; // derivatives 0..=12 feed the C_k terms
const PSI_WIDE: usize = 28; // order used at the removable singularities

/// Derivatives Psi^(k)(p), k = 0..=12, of
/// Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p).
///
/// Direct jet division is fine while cos(2 pi p) stays away from zero.  Near
/// the removable singularities p = 1/4 and p = 3/4 both numerator and
/// denominator vanish; there the jet is expanded at the singular point in
/// factored sine form (where the common zero cancels exactly) and then
/// translated to p.
fn psi_derivatives(p: f64) -> [f64; PSI_ORDER] {
    // Use the factored expansion generously: plain jet division loses
    // relative accuracy in the high orders once cos(2 pi p) shrinks.
    let near = |q: f64| (p - q).abs() < 0.16;
    psi_derivatives_via(p, near(0.25) || near(0.75))
}

fn psi_derivatives_via(p: f64, singular_path: bool) -> [f64; PSI_ORDER] {
    debug_assert!((0.0..1.0).contains(&p));
    let jet: Jet<PSI_ORDER> = if singular_path {
        let q = if (p - 0.25).abs() < (p - 0.75).abs() {
            0.25
        } else {
            0.75
        };
        let sign = if q == 0.25 { -2.0 * PI } else { 2.0 * PI };
        // at q: Psi(q+h) = sin(pi h + sign h^2) / sin(2 pi h)
        let num_arg: Jet<PSI_WIDE> = Jet::from_coeffs(&[0.0, PI, sign]);
        let den_arg: Jet<PSI_WIDE> = Jet::from_coeffs(&[0.0, 2.0 * PI]);
        let num = num_arg.sin_cos().0.shift_down();
        let den = den_arg.sin_cos().0.shift_down();
        let at_q = num.div(&den);
        // translate the polynomial from center q to center p
        let delta = p - q;
        let mut out = [0.0; PSI_ORDER];
        for (j, o) in out.iter_mut().enumerate() {
            // b_j = sum_k a_k binom(k,j) delta^(k-j), accumulated backwards
            let mut acc = 0.0;
            let mut binom = 1.0f64; // binom(k, j) maintained incrementally
            let mut dpow = 1.0f64;
            for k in j..PSI_WIDE {
                acc += at_q.c[k] * binom * dpow;
                binom *= (k + 1) as f64 / (k + 1 - j) as f64;
                dpow *= delta;
            }
            *o = acc;
        }
        Jet { c: out }
    } else {
        let u: Jet<PSI_ORDER> = Jet::from_coeffs(&[
            2.0 * PI * (p * p - p - 1.0 / 16.0),
            2.0 * PI * (2.0 * p - 1.0),
            2.0 * PI,
        ]);
        let v: Jet<PSI_ORDER> = Jet::from_coeffs(&[2.0 * PI * p, 2.0 * PI]);
        u.sin_cos().1.div(&v.sin_cos().1)
    };
    // convert Taylor coefficients to derivatives
    let mut out = [0.0; PSI_ORDER];
    let mut fact = 1.0;
    for k in 0..PSI_ORDER {
        out[k] = jet.c[k] * fact;
        fact *= (k + 1) as f64;
    }
    out
}

/// Remainder coefficients C_0..C_4 of the Riemann-Siegel expansion in terms
/// of derivatives of Psi.  This is the classical five-term set (Haselgrove's
/// coefficients, in the form tabulated by Gourdon and by Gabcke's thesis).
fn rs_correction(p: f64, inv_a: f64) -> f64 {
    let d = psi_derivatives(p);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    let c0 = d[0];
    let c1 = -d[3] / (96.0 * pi2);
    let c2 = d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi4);
    let c3 = -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi4) - d[9] / (5_308_416.0 * pi6);
    let c4 = d[0] / (128.0 * pi2)
        + d[4] / (3072.0 * pi4)
        + d[8] / (1_474_560.0 * pi6)
        + d[12] / (5_096_079_360.0 * pi8);
    (((c4 * inv_a + c3) * inv_a + c2) * inv_a + c1) * inv_a + c0
}

// ---------------------------------------------------------------------------
// Riemann-Siegel evaluator
// ---------------------------------------------------------------------------

/// Below this height the asymptotic remainder series bottoms out above the
/// 1e-6 target, so the evaluator defers to Euler-Maclaurin (which is cheap
/// there anyway).  At t = 200 the five-term remainder is already ~1e-7.
const RS_PURE_MIN: f64 = 200.0;

/// Hardy Z(t) by the Riemann-Siegel formula; caller guarantees t >= RS_PURE_MIN.
fn riemann_siegel_z(t: f64) -> f64 {
    let a = (t / (2.0 * PI)).sqrt();
    let n_len = a.floor() as u64;
    let p = a - n_len as f64;
    let theta_red = rs_theta_dd_reduced(t);
    // main sum, compensated
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=n_len {
        let phase = theta_red.sub(Dd::from_f64(t).mul(ln_dd(n)).mod_two_pi());
        let term = phase.to_f64().cos() / (n as f64).sqrt();
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    let corr = rs_correction(p, 1.0 / a) / a.sqrt();
    let sign = if n_len % 2 == 0 { -1.0 } else { 1.0 }; // (-1)^(N-1)
    2.0 * sum + sign * corr
}

/// zeta(1/2+it) by the Riemann-Siegel formula (main sum of length
/// floor(sqrt(t/2pi)) plus five remainder terms).  Absolute error stays
/// below 1e-6 for t up to 1e8.  Rejects t < 10; use `euler_maclaurin` there.
pub fn riemann_siegel(t: f64) -> Result<ZetaPoint> {
    if t < 10.0 {
        return Err(Error::RiemannSiegelRange { t });
    }
    if t < RS_PURE_MIN {
        return Ok(euler_maclaurin(t, None));
    }
    let z = riemann_siegel_z(t);
    let theta = rs_theta_dd_reduced(t).to_f64();
    // zeta = e^{-i theta} Z
    Ok(ZetaPoint::new(t, z * theta.cos(), -z * theta.sin()))
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin evaluator
// ---------------------------------------------------------------------------

/// B_{2k} / (2k)! for k = 1..=20.
const BERN_RATIO: [f64; 20] = [
    0.083333333333333333,
    -0.0013888888888888889,
    3.3068783068783069e-5,
    -8.2671957671957672e-7,
    2.0876756987868099e-8,
    -5.2841901386874932e-10,
    1.3382536530684679e-11,
    -3.3896802963225829e-13,
    8.5860620562778446e-15,
    -2.1748686985580619e-16,
    5.5090028283602295e-18,
    -1.3954464685812523e-19,
    3.5347070396294675e-21,
    -8.9535174270375469e-23,
    2.2679524523376831e-24,
    -5.7447906688722024e-26,
    1.4551724756148649e-27,
    -3.6859949406653102e-29,
    9.3367342570950447e-31,
    -2.3650224157006299e-32,
];

fn default_em_terms(t: f64) -> usize {
    // main-sum length ~ t/pi makes |s|/(2 pi N) ~ 1/2, so each Bernoulli
    // term gains two bits; 20 terms then land well under 1e-12
    ((t.abs() / PI).ceil() as usize).max(24)
}

/// Euler-Maclaurin evaluation of zeta(1/2+it) together with the truncation
/// bound |R| <= |first omitted term| * |s+2K+1| / (sigma+2K+1).
pub fn euler_maclaurin_with_bound(t: f64, terms: Option<usize>) -> (ZetaPoint, f64) {
    if t < 0.0 {
        let (z, b) = euler_maclaurin_with_bound(-t, terms);
        return (ZetaPoint::new(t, z.re, -z.im), b);
    }
    let n = terms.unwrap_or_else(|| default_em_terms(t)).max(2);
    let s = Complex64::new(0.5, t);
    let nf = n as f64;
    let td = Dd::from_f64(t);

    // sum_{m < n} m^{-s}, phases in double-double
    let mut acc = Complex64::new(1.0, 0.0); // m = 1
    let mut comp = Complex64::new(0.0, 0.0);
    for m in 2..n as u64 {
        let mf = m as f64;
        let phase = td.mul(ln_dd(m)).mod_two_pi().to_f64();
        let (sin_p, cos_p) = phase.sin_cos();
        let term = Complex64::new(cos_p, -sin_p) / mf.sqrt();
        let y = term - comp;
        let snew = acc + y;
        comp = (snew - acc) - y;
        acc = snew;
    }

    // n^{-s} and the boundary terms
    let phase_n = td.mul(ln_dd(n as u64)).mod_two_pi().to_f64();
    let (sin_n, cos_n) = phase_n.sin_cos();
    let n_pow_ms = Complex64::new(cos_n, -sin_n) / nf.sqrt(); // n^{-s}
    let mut total = acc + n_pow_ms * nf / (s - 1.0) + 0.5 * n_pow_ms;

    // Bernoulli tail: term_k = B_{2k}/(2k)! * prod_{j=0}^{2k-2}(s+j) * n^{1-2k-s}
    let mut v = s / nf; // prod * n^{-(2k-1)} for k = 1
    let mut bound = f64::INFINITY;
    let mut k_used = 0;
    for (k, &b) in BERN_RATIO.iter().enumerate() {
        let term = b * v * n_pow_ms;
        total += term;
        k_used = k + 1;
        // next v
        let j = (2 * k_used - 1) as f64;
        v = v * (s + j) * (s + j + 1.0) / (nf * nf);
        let next = (BERN_RATIO.get(k_used).copied().unwrap_or(BERN_RATIO[19])
            * v
            * n_pow_ms)
            .norm();
        let kk = 2.0 * k_used as f64 + 1.0;
        bound = next * ((s + kk).norm()) / (0.5 + kk);
        if bound < 1e-16 * total.norm() || bound < 1e-18 {
            break;
        }
    }
    let _ = k_used;
    (ZetaPoint::new(t, total.re, total.im), bound)
}

/// Euler-Maclaurin evaluation; `terms` overrides the main-sum length.
pub fn euler_maclaurin(t: f64, terms: Option<usize>) -> ZetaPoint {
    euler_maclaurin_with_bound(t, terms).0
}

// ---------------------------------------------------------------------------
// Dispatch and derived quantities
// ---------------------------------------------------------------------------

/// Preferred evaluator: Euler-Maclaurin below t = 10, Riemann-Siegel above.
pub fn zeta_point(t: f64) -> ZetaPoint {
    let at = t.abs();
    let z = if at < 10.0 {
        euler_maclaurin(at, None)
    } else {
        riemann_siegel(at).expect("t >= 10")
    };
    if t < 0.0 {
        ZetaPoint::new(t, z.re, -z.im)
    } else {
        z
    }
}

/// |zeta(1/2+it)|^{2k}.
#[inline]
pub fn abs_pow2k(t: f64, k: u32) -> f64 {
    debug_assert!(k >= 1);
    zeta_point(t).abs2.powi(k as i32)
}

/// Hardy's function Z(t) = e^{i theta(t)} zeta(1/2+it), real for real t.
pub fn hardy_z(t: f64) -> f64 {
    let z = zeta_point(t);
    let th = rs_theta(t);
    th.cos() * z.re - th.sin() * z.im
}
