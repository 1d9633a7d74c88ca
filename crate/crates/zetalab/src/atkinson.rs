//! The mean-square error term E(T), two independent ways.
//!
//! Direct route: E(T) = int_0^T |zeta(1/2+it)|^2 dt - T log(T/(2 pi))
//! - (2 gamma - 1) T, with the integral taken from the cached moment
//! engine.  Explicit route: Atkinson's formula E(T) = Sigma1(T) +
//! Sigma2(T) + O(log^2 T), two finite oscillating sums weighted by the
//! divisor function.  The residual between the routes is the object the
//! cross-check experiments study.

use crate::error::{Error, Result};
use crate::kernels::{
    atkinson_amplitude, atkinson_phase, atkinson_second_cutoff, DivisorTable,
};
use crate::quad::MomentEngine;
use crate::EULER_GAMMA;
use serde::Serialize;
use std::f64::consts::PI;

/// Validated parameters for the explicit formula: the cutoff N must sit in
/// the window A*T <= N <= A'*T with A = 1/2, A' = 2.
#[derive(Clone, Copy, Debug)]
pub struct AtkinsonParams {
    pub t: f64,
    pub n: f64,
    pub nprime: f64,
}

impl AtkinsonParams {
    pub fn new(t: f64, n: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter {
                name: "T",
                value: t,
                reason: "must be positive",
            });
        }
        if !(n >= 0.5 * t && n <= 2.0 * t) {
            return Err(Error::InvalidParameter {
                name: "N",
                value: n,
                reason: "must lie in [T/2, 2T]",
            });
        }
        Ok(AtkinsonParams {
            t,
            n,
            nprime: atkinson_second_cutoff(t, n),
        })
    }
}

/// One cross-check row: both evaluations of E(T) and their residual.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EtRecord {
    #[serde(rename = "T")]
    pub t: f64,
    pub e_direct: f64,
    pub e_atkinson: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub residual: f64,
}

/// E(T) from the defining mean-square relation, by cached quadrature.
/// The engine's running error estimate is checked against 1e-3.
pub fn e_direct(engine: &mut MomentEngine, t: f64) -> Result<f64> {
    if t < 10.0 {
        return Err(Error::InvalidParameter {
            name: "T",
            value: t,
            reason: "must be at least 10",
        });
    }
    let i1 = engine.integral_to(t, 1);
    engine.check_accuracy(1e-3)?;
    Ok(i1 - t * (t / (2.0 * PI)).ln() - (2.0 * EULER_GAMMA - 1.0) * t)
}

/// First Atkinson sum
/// Sigma1 = sqrt(2) (T/2pi)^{1/4} sum_{n<=N} (-1)^n d(n) n^{-3/4} e(T,n) cos(f(T,n)).
pub fn sigma1(t: f64, n_cutoff: f64, dtab: &DivisorTable) -> Result<f64> {
    if n_cutoff < 1.0 {
        return Ok(0.0);
    }
    let n_max = n_cutoff.floor() as u64;
    dtab.check_covers(n_max)?;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=n_max {
        let nf = n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign
            * dtab.d(n) as f64
            * nf.powf(-0.75)
            * atkinson_amplitude(t, n)
            * atkinson_phase(t, n).cos();
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    Ok(2f64.sqrt() * (t / (2.0 * PI)).powf(0.25) * sum)
}

/// Second Atkinson sum
/// Sigma2 = -2 sum_{n<=N'} d(n) n^{-1/2} (log(T/2pi n))^{-1} cos(T log(T/2pi n) - T + pi/4).
pub fn sigma2(t: f64, nprime: f64, dtab: &DivisorTable) -> Result<f64> {
    if nprime < 1.0 {
        return Ok(0.0);
    }
    let n_max = nprime.floor() as u64;
    dtab.check_covers(n_max)?;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=n_max {
        let nf = n as f64;
        let ratio = t / (2.0 * PI * nf);
        if ratio <= 1.0 {
            return Err(Error::LogArgumentOutOfRange { n, t });
        }
        let lg = ratio.ln();
        let term = dtab.d(n) as f64 / (nf.sqrt() * lg) * (t * lg - t + PI / 4.0).cos();
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    Ok(-2.0 * sum)
}

/// Both routes to E(T) with the cutoff N (defaulting callers pass N = T).
pub fn e_atkinson(
    engine: &mut MomentEngine,
    t: f64,
    n: f64,
    dtab: &DivisorTable,
) -> Result<EtRecord> {
    let params = AtkinsonParams::new(t, n)?;
    let s1 = sigma1(params.t, params.n, dtab)?;
    let s2 = sigma2(params.t, params.nprime, dtab)?;
    let direct = e_direct(engine, t)?;
    let formula = s1 + s2;
    Ok(EtRecord {
        t,
        e_direct: direct,
        e_atkinson: formula,
        sigma1: s1,
        sigma2: s2,
        residual: direct - formula,
    })
}

/// The explicit-formula side alone (no quadrature), for sweeps that only
/// study the sum behavior.
pub fn sigma_sum(t: f64, n: f64, dtab: &DivisorTable) -> Result<f64> {
    let params = AtkinsonParams::new(t, n)?;
    Ok(sigma1(params.t, params.n, dtab)? + sigma2(params.t, params.nprime, dtab)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::{self, Dd};

    #[test]
    fn gamma_constant_matches_definition() {
        // gamma = 0.577..., the f64 nearest to Euler's constant
        assert_eq!(EULER_GAMMA, 0.5772156649015329);
        assert!((EULER_GAMMA - 0.5772156649015328606).abs() < 1e-15);
    }

    #[test]
    fn unit_integrand_hook_gives_linear_e() {
        // with the integrand forced to 1: E(T) = T - T log(T/2pi) - (2g-1)T
        let mut engine = MomentEngine::with_unit_integrand();
        for &t in &[10.0, 100.0, 1234.5] {
            let got = e_direct(&mut engine, t).unwrap();
            let expect = t - t * (t / (2.0 * PI)).ln() - (2.0 * EULER_GAMMA - 1.0) * t;
            assert!(
                (got - expect).abs() < 1e-9 * t,
                "t={t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn e_direct_rejects_small_t() {
        let mut engine = MomentEngine::with_unit_integrand();
        assert!(e_direct(&mut engine, 5.0).is_err());
    }

    #[test]
    fn sigma1_empty_and_single_term() {
        let dtab = DivisorTable::build(10).unwrap();
        let t = 1000.0;
        assert_eq!(sigma1(t, 0.5, &dtab).unwrap(), 0.0);
        // N = 1: single n = 1 term, (-1)^1 = -1, d(1) = 1
        let got = sigma1(t, 1.0, &dtab).unwrap();
        let expect = -(2f64.sqrt())
            * (t / (2.0 * PI)).powf(0.25)
            * atkinson_amplitude(t, 1)
            * atkinson_phase(t, 1).cos();
        assert!((got - expect).abs() < 1e-13 * expect.abs().max(1.0));
    }

    #[test]
    fn sigma2_empty_and_single_term() {
        let dtab = DivisorTable::build(10).unwrap();
        let t = 1000.0;
        assert_eq!(sigma2(t, 0.9, &dtab).unwrap(), 0.0);
        let got = sigma2(t, 1.5, &dtab).unwrap();
        let lg = (t / (2.0 * PI)).ln();
        let expect = -2.0 / lg * (t * lg - t + PI / 4.0).cos();
        assert!((got - expect).abs() < 1e-13 * expect.abs().max(1.0));
    }

    #[test]
    fn sigma1_rejects_small_table() {
        let dtab = DivisorTable::build(10).unwrap();
        assert!(matches!(
            sigma1(100.0, 50.0, &dtab),
            Err(Error::DivisorTableTooSmall { .. })
        ));
    }

    #[test]
    fn params_window_validation() {
        assert!(AtkinsonParams::new(100.0, 100.0).is_ok());
        assert!(AtkinsonParams::new(100.0, 50.0).is_ok());
        assert!(AtkinsonParams::new(100.0, 49.0).is_err());
        assert!(AtkinsonParams::new(100.0, 201.0).is_err());
        assert!(AtkinsonParams::new(-5.0, 1.0).is_err());
        let p = AtkinsonParams::new(1e4, 1e4).unwrap();
        assert!(p.nprime > 0.0 && p.nprime < 1e4 / (2.0 * PI));
    }

    /// Double-double re-summation of Sigma1; terms are recomputed fully in
    /// extended precision, including the cosine of the phase.
    fn sigma1_dd(t: f64, n_cutoff: u64, dtab: &DivisorTable) -> f64 {
        let td = Dd::from_f64(t);
        let mut sum = Dd::ZERO;
        for n in 1..=n_cutoff {
            let nd = Dd::from_u64(n);
            let x = dd::PI.mul(nd).div(td.mul_f64(2.0)).sqrt();
            let phase = td
                .mul_f64(2.0)
                .mul(x.asinh())
                .add(
                    dd::TWO_PI
                        .mul(nd)
                        .mul(td)
                        .add(dd::PI.mul(dd::PI).mul(nd).mul(nd))
                        .sqrt(),
                )
                .sub(dd::PI_4);
            let ratio = dd::PI.mul(nd).div(td.mul_f64(2.0));
            let amp = x.div(x.asinh()).div(Dd::ONE.add(ratio).sqrt().sqrt());
            let n34 = nd.powi(3).sqrt().sqrt().recip();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let term = amp
                .mul(n34)
                .mul(phase.cos())
                .mul_f64(sign * dtab.d(n) as f64);
            sum = sum.add(term);
        }
        let front = td
            .div(dd::TWO_PI)
            .sqrt()
            .sqrt()
            .mul(Dd::from_f64(2.0).sqrt());
        front.mul(sum).to_f64()
    }

    fn sigma2_dd(t: f64, nprime: u64, dtab: &DivisorTable) -> f64 {
        let td = Dd::from_f64(t);
        let mut sum = Dd::ZERO;
        for n in 1..=nprime {
            let nd = Dd::from_u64(n);
            let lg = td.div(dd::TWO_PI.mul(nd)).ln();
            let phase = td.mul(lg).sub(td).add(dd::PI_4);
            let term = phase
                .cos()
                .div(nd.sqrt().mul(lg))
                .mul_f64(dtab.d(n) as f64);
            sum = sum.add(term);
        }
        sum.mul_f64(-2.0).to_f64()
    }

    #[test]
    fn sigma_sums_match_extended_precision_resummation() {
        let t = 1e4;
        let dtab = DivisorTable::build(11_000).unwrap();
        let s1 = sigma1(t, t, &dtab).unwrap();
        let s1_hp = sigma1_dd(t, t as u64, &dtab);
        assert!(
            ((s1 - s1_hp) / s1_hp).abs() < 1e-8,
            "sigma1 {s1} vs {s1_hp}"
        );
        let np = atkinson_second_cutoff(t, t).floor() as u64;
        let s2 = sigma2(t, np as f64 + 0.5, &dtab).unwrap();
        let s2_hp = sigma2_dd(t, np, &dtab);
        assert!(
            ((s2 - s2_hp) / s2_hp).abs() < 1e-8,
            "sigma2 {s2} vs {s2_hp}"
        );
    }

    #[test]
    fn compensated_vs_naive_summation() {
        // plain left-to-right summation for comparison
        let t = 1e5;
        let dtab = DivisorTable::build(100_000).unwrap();
        let compensated = sigma1(t, t, &dtab).unwrap();
        let mut naive = 0.0f64;
        for n in 1..=100_000u64 {
            let nf = n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            naive += sign
                * dtab.d(n) as f64
                * nf.powf(-0.75)
                * atkinson_amplitude(t, n)
                * atkinson_phase(t, n).cos();
        }
        naive *= 2f64.sqrt() * (t / (2.0 * PI)).powf(0.25);
        assert!(
            ((compensated - naive) / compensated.abs().max(1.0)).abs() < 1e-6,
            "{compensated} vs {naive}"
        );
    }

    #[test]
    fn record_invariants_and_domain() {
        // T = 2 pi 10^3: all preconditions hold, values finite
        let t = 2.0 * PI * 1e3;
        let dtab = DivisorTable::build((2.0 * t) as u64 + 2).unwrap();
        let mut engine = MomentEngine::new();
        let rec = e_atkinson(&mut engine, t, t, &dtab).unwrap();
        assert!(rec.e_direct.is_finite() && rec.e_atkinson.is_finite());
        assert_eq!(rec.e_atkinson, rec.sigma1 + rec.sigma2);
        assert_eq!(rec.residual, rec.e_direct - rec.e_atkinson);
    }

    #[test]
    fn formula_insensitive_to_cutoff_choice() {
        // Sigma1 + Sigma2 moves by at most O(log^2 T) as N sweeps [T/2, 2T]
        let t = 1e4;
        let dtab = DivisorTable::build(20_001).unwrap();
        let mut values = Vec::new();
        for &frac in &[0.5, 0.75, 1.0, 1.5, 2.0] {
            values.push(sigma_sum(t, frac * t, &dtab).unwrap());
        }
        let spread = values.iter().cloned().fold(f64::MIN, f64::max)
            - values.iter().cloned().fold(f64::MAX, f64::min);
        let log2t = t.ln().powi(2);
        assert!(
            spread / log2t < 1.0,
            "spread {spread} vs log^2 T {log2t}: ratio {}",
            spread / log2t
        );
    }

    #[test]
    fn error_term_changes_sign() {
        // E(T) is oscillatory; find a sign change on [1e3, 1e4]
        let mut engine = MomentEngine::new();
        let mut prev = e_direct(&mut engine, 1e3).unwrap();
        let mut found = false;
        let mut t = 1e3;
        while t < 1e4 {
            t += 45.0;
            let cur = e_direct(&mut engine, t).unwrap();
            if prev.signum() != cur.signum() {
                found = true;
                break;
            }
            prev = cur;
        }
        assert!(found, "no sign change of E(T) found on [1e3, 1e4]");
    }
}
