//! Shared mathematical kernels: the divisor sieve, the phase and amplitude
//! functions of Atkinson's explicit formula, the closed-form Gaussian
//! integral, and the fourth-moment main-term polynomial.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// zeta'(2), used by the cubic coefficient of the fourth-moment polynomial.
pub const ZETA_PRIME_2: f64 = -0.9375482543158438;

/// Table of the divisor function d(n) for 1 <= n <= limit.
///
/// Built with a linear sieve over smallest prime factors; one `u32` of
/// divisor count plus one `u8` of smallest-prime-factor multiplicity per
/// index, so limits up to ~1e8 stay within desk RAM.  Immutable after
/// construction and safe to share across threads.
pub struct DivisorTable {
    limit: u64,
    values: Vec<u32>,
}

impl DivisorTable {
    pub fn build(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::ZeroLimit);
        }
        let n = limit as usize;
        let mut d = vec![0u32; n + 1];
        // multiplicity of the smallest prime factor, for the multiplicative step
        let mut mult = vec![0u8; n + 1];
        let mut primes: Vec<usize> = Vec::new();
        d[1] = 1;
        for i in 2..=n {
            if d[i] == 0 {
                d[i] = 2;
                mult[i] = 1;
                primes.push(i);
            }
            for &p in &primes {
                let ip = i.checked_mul(p);
                match ip {
                    Some(ip) if ip <= n => {
                        if i % p == 0 {
                            let m = mult[i] as u32;
                            d[ip] = d[i] / (m + 1) * (m + 2);
                            mult[ip] = mult[i] + 1;
                            break;
                        } else {
                            d[ip] = d[i] * 2;
                            mult[ip] = 1;
                        }
                    }
                    _ => break,
                }
            }
        }
        Ok(DivisorTable { limit, values: d })
    }

    #[inline]
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// d(n); panics if n is 0 or beyond the limit.
    #[inline]
    pub fn d(&self, n: u64) -> u32 {
        self.values[n as usize]
    }

    pub fn check_covers(&self, needed: u64) -> Result<()> {
        if needed > self.limit {
            Err(Error::DivisorTableTooSmall {
                limit: self.limit,
                needed,
            })
        } else {
            Ok(())
        }
    }
}

/// arsinh(x) = log(x + sqrt(1+x^2)), with a short series below 1e-4 where
/// the direct form loses digits to cancellation for the tiny arguments
/// sqrt(pi*n/(2T)) that dominate the explicit-formula sums.
#[inline]
pub fn arsinh(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        x * (1.0 - x2 / 6.0 + 3.0 * x2 * x2 / 40.0)
    } else {
        (x + (1.0 + x * x).sqrt()).ln()
    }
}

/// Phase f(T,n) = 2T*arsinh(sqrt(pi*n/(2T))) + sqrt(2*pi*n*T + pi^2*n^2) - pi/4,
/// evaluated from the closed form.
#[inline]
pub fn atkinson_phase(t: f64, n: u64) -> f64 {
    debug_assert!(t > 0.0 && n >= 1);
    let nf = n as f64;
    let x = (PI * nf / (2.0 * t)).sqrt();
    2.0 * t * arsinh(x) + (2.0 * PI * nf * t + PI * PI * nf * nf).sqrt() - PI / 4.0
}

/// Amplitude e(T,n) = (1+pi*n/(2T))^{-1/4} * {(2T/(pi*n))^{1/2} arsinh(sqrt(pi*n/(2T)))}^{-1}.
#[inline]
pub fn atkinson_amplitude(t: f64, n: u64) -> f64 {
    debug_assert!(t > 0.0 && n >= 1);
    let nf = n as f64;
    let ratio = PI * nf / (2.0 * t);
    let x = ratio.sqrt();
    (1.0 + ratio).powf(-0.25) / (arsinh(x) / x)
}

/// Cutoff N'(T,N) = T/(2*pi) + N/2 - sqrt(N^2/4 + N*T/(2*pi)) for the second
/// Atkinson sum.  Always positive and below T/(2*pi).
#[inline]
pub fn atkinson_second_cutoff(t: f64, n: f64) -> f64 {
    debug_assert!(t > 0.0 && n > 0.0);
    t / (2.0 * PI) + 0.5 * n - (0.25 * n * n + n * t / (2.0 * PI)).sqrt()
}

/// The classical integral  int exp(A x - B x^2) dx = sqrt(pi/B) exp(A^2/(4B)),
/// valid for Re(B) > 0.
pub fn gaussian_integral(a: Complex64, b: Complex64) -> Result<Complex64> {
    if b.re <= 0.0 {
        return Err(Error::NonPositiveGaussian { re_b: b.re });
    }
    Ok((Complex64::new(PI, 0.0) / b).sqrt() * (a * a / (4.0 * b)).exp())
}

/// Coefficients of the quartic main-term polynomial of the fourth moment:
/// int_0^T |zeta(1/2+it)|^4 dt ~ T * P4(log T).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourthMomentPoly {
    pub a4: f64,
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl FourthMomentPoly {
    /// Leading coefficients from the classical asymptotic expansion:
    /// a4 = 1/(2 pi^2) and a3 = 2(4*gamma - 1 - log(2 pi) - 12 zeta'(2)/pi^2)/pi^2.
    /// The lower coefficients default to zero; override them from a config
    /// file or fit them with the calibration helper in `experiments`.
    pub fn with_leading_defaults() -> Self {
        let pi2 = PI * PI;
        FourthMomentPoly {
            a4: 1.0 / (2.0 * pi2),
            a3: 2.0 * (4.0 * crate::EULER_GAMMA - 1.0 - (2.0 * PI).ln() - 12.0 * ZETA_PRIME_2 / pi2)
                / pi2,
            a2: 0.0,
            a1: 0.0,
            a0: 0.0,
        }
    }

    pub fn zero() -> Self {
        FourthMomentPoly {
            a4: 0.0,
            a3: 0.0,
            a2: 0.0,
            a1: 0.0,
            a0: 0.0,
        }
    }

    /// Horner evaluation of sum a_j x^j.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (((self.a4 * x + self.a3) * x + self.a2) * x + self.a1) * x + self.a0
    }

    pub fn with_lower(mut self, a2: f64, a1: f64, a0: f64) -> Self {
        self.a2 = a2;
        self.a1 = a1;
        self.a0 = a0;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;

    fn divisor_count_bruteforce(n: u64) -> u32 {
        let mut count = 0;
        let mut k = 1;
        while k * k <= n {
            if n % k == 0 {
                count += if k * k == n { 1 } else { 2 };
            }
            k += 1;
        }
        count
    }

    #[test]
    fn divisor_table_edges() {
        assert!(matches!(DivisorTable::build(0), Err(Error::ZeroLimit)));
        let t = DivisorTable::build(1).unwrap();
        assert_eq!(t.d(1), 1);
        let t = DivisorTable::build(12).unwrap();
        assert_eq!(t.d(12), 6); // 1,2,3,4,6,12
        assert_eq!(t.d(2), 2);
        assert_eq!(t.d(11), 2);
    }

    #[test]
    fn divisor_table_against_bruteforce() {
        let t = DivisorTable::build(2000).unwrap();
        for n in 1..=2000 {
            assert_eq!(t.d(n), divisor_count_bruteforce(n), "n = {n}");
        }
    }

    #[test]
    fn divisor_table_large_spot_value() {
        let t = DivisorTable::build(1_000_000).unwrap();
        assert_eq!(t.d(720_720), divisor_count_bruteforce(720_720));
        assert_eq!(t.d(720_720), 240);
        assert_eq!(t.d(999_983), 2); // prime
    }

    #[test]
    fn divisor_sum_identity() {
        // sum_{n<=N} d(n) = sum_{k<=N} floor(N/k), exact in integers
        let n_max = 10_000u64;
        let t = DivisorTable::build(n_max).unwrap();
        let lhs: u64 = (1..=n_max).map(|n| t.d(n) as u64).sum();
        let rhs: u64 = (1..=n_max).map(|k| n_max / k).sum();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn phase_closed_form_at_2pi() {
        // f(2pi, 1) = 4pi*arsinh(1/2) + sqrt(4pi^2+pi^2) - pi/4,
        // with arsinh(1/2) = log((1+sqrt(5))/2)
        let expect = 4.0 * PI * ((1.0 + 5f64.sqrt()) / 2.0).ln() + 5f64.sqrt() * PI - PI / 4.0;
        let got = atkinson_phase(2.0 * PI, 1);
        assert!((got - expect).abs() < 1e-12, "got {got}, expect {expect}");
    }

    #[test]
    fn phase_leading_asymptotics() {
        // f(T,n) + pi/4 - sqrt(8 pi n T) -> 0 relative to sqrt(8 pi n T) as n/T -> 0
        for &t in &[1e4, 1e6, 1e8] {
            let lead = (8.0 * PI * t).sqrt();
            let rel = (atkinson_phase(t, 1) - (-PI / 4.0 + lead)) / lead;
            assert!(rel.abs() < 2.0 / t, "t={t} rel={rel}");
        }
    }

    #[test]
    fn phase_monotone_in_n() {
        for &t in &[50.0, 1e3, 1e5] {
            let mut prev = atkinson_phase(t, 1);
            for n in 2..200 {
                let cur = atkinson_phase(t, n);
                assert!(cur > prev, "t={t} n={n}");
                prev = cur;
            }
        }
    }

    /// Closed form in double-double, for the high-precision spot checks.
    fn phase_dd(t: f64, n: u64) -> Dd {
        let t = Dd::from_f64(t);
        let n = Dd::from_u64(n);
        let x = crate::dd::PI.mul(n).div(t.mul_f64(2.0)).sqrt();
        let root = crate::dd::TWO_PI
            .mul(n)
            .mul(t)
            .add(crate::dd::PI.mul(crate::dd::PI).mul(n).mul(n))
            .sqrt();
        t.mul_f64(2.0).mul(x.asinh()).add(root).sub(crate::dd::PI_4)
    }

    fn amplitude_dd(t: f64, n: u64) -> Dd {
        let t = Dd::from_f64(t);
        let n = Dd::from_u64(n);
        let ratio = crate::dd::PI.mul(n).div(t.mul_f64(2.0));
        let x = ratio.sqrt();
        let quart = Dd::ONE.add(ratio).sqrt().sqrt();
        x.div(x.asinh()).div(quart)
    }

    #[test]
    fn phase_matches_extended_precision() {
        let cases = [(1e4, 100u64), (1e3, 7), (1e5, 999), (2.0 * PI, 1)];
        for (t, n) in cases {
            let hp = phase_dd(t, n).to_f64();
            let rel = (atkinson_phase(t, n) - hp) / hp;
            assert!(rel.abs() < 1e-9, "t={t} n={n} rel={rel:e}");
        }
    }

    #[test]
    fn phase_expansion_constant_is_stable() {
        // |f(T,n) - (-pi/4 + sqrt(8 pi n T) + (sqrt(2 pi^3)/6) n^{3/2} T^{-1/2})|
        //   <= c * n^{5/2} T^{-3/2} with one c across heights.
        let c_at = |t: f64| -> f64 {
            let mut c: f64 = 0.0;
            let n_max = (t.sqrt() as u64).max(4);
            let mut n = 1u64;
            while n <= n_max {
                let approx = -PI / 4.0
                    + (8.0 * PI * n as f64 * t).sqrt()
                    + (2.0 * PI.powi(3)).sqrt() / 6.0 * (n as f64).powf(1.5) / t.sqrt();
                let err = (phase_dd(t, n).to_f64() - approx).abs();
                let scale = (n as f64).powf(2.5) * t.powf(-1.5);
                c = c.max(err / scale);
                n = (n * 5 / 4).max(n + 1);
            }
            c
        };
        let c3 = c_at(1e3);
        let c4 = c_at(1e4);
        let c5 = c_at(1e5);
        let cmax = c3.max(c4).max(c5);
        let cmin = c3.min(c4).min(c5);
        assert!(
            cmax / cmin < 3.0,
            "fitted constants not stable: {c3} {c4} {c5}"
        );
        assert!(cmax < 1.0, "constant unexpectedly large: {cmax}");
    }

    #[test]
    fn amplitude_limits_and_range() {
        // e(T,n) -> 1 as n/T -> 0
        assert!((atkinson_amplitude(1e4, 1) - 1.0).abs() < 1e-4);
        // e in (0,1] over a grid scan
        for &t in &[1e3, 1e4] {
            let mut n = 1u64;
            while (n as f64) < t {
                let e = atkinson_amplitude(t, n);
                assert!(e > 0.0 && e <= 1.0 + 1e-15, "t={t} n={n} e={e}");
                n += 1;
            }
        }
    }

    #[test]
    fn amplitude_matches_extended_precision() {
        for (t, n) in [(1e4, 1u64), (1e4, 5000), (1e3, 999)] {
            let hp = amplitude_dd(t, n).to_f64();
            let rel = (atkinson_amplitude(t, n) - hp) / hp;
            assert!(rel.abs() < 1e-12, "t={t} n={n} rel={rel:e}");
        }
    }

    #[test]
    fn second_cutoff_identities() {
        // N = T = 2pi gives N' = 1 + pi - sqrt(pi^2 + 2pi)
        let got = atkinson_second_cutoff(2.0 * PI, 2.0 * PI);
        let expect = 1.0 + PI - (PI * PI + 2.0 * PI).sqrt();
        assert!((got - expect).abs() < 1e-14);
        // decreasing in N at fixed T, positive, below T/(2pi)
        for &t in &[100.0, 1e4] {
            let mut prev = f64::INFINITY;
            let mut n = t / 2.0;
            while n <= 2.0 * t {
                let v = atkinson_second_cutoff(t, n);
                assert!(v > 0.0 && v < t / (2.0 * PI));
                assert!(v < prev, "not decreasing at t={t} n={n}");
                prev = v;
                n += t / 16.0;
            }
        }
    }

    #[test]
    fn second_cutoff_matches_extended_precision() {
        let t = Dd::from_f64(1e4);
        let n = Dd::from_f64(1e4);
        let two_pi = crate::dd::TWO_PI;
        let hp = t
            .div(two_pi)
            .add(n.mul_f64(0.5))
            .sub(n.mul(n).mul_f64(0.25).add(n.mul(t).div(two_pi)).sqrt())
            .to_f64();
        let got = atkinson_second_cutoff(1e4, 1e4);
        assert!(((got - hp) / hp).abs() < 1e-12, "got {got} hp {hp}");
    }

    #[test]
    fn gaussian_integral_closed_forms() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let v = gaussian_integral(zero, one).unwrap();
        assert!((v.re - PI.sqrt()).abs() < 1e-15 && v.im.abs() < 1e-15);
        let v = gaussian_integral(Complex64::new(2.0, 0.0), one).unwrap();
        assert!((v.re - PI.sqrt() * 1f64.exp()).abs() < 1e-13);
        assert!(gaussian_integral(one, Complex64::new(0.0, 1.0)).is_err());
        assert!(gaussian_integral(one, Complex64::new(-1.0, 0.0)).is_err());
    }

    /// Composite Simpson quadrature of exp(Ax - Bx^2) on [-20, 20].
    fn gaussian_quadrature_oracle(a: Complex64, b: Complex64) -> Complex64 {
        let f = |x: f64| (a * x - b * x * x).exp();
        let (lo, hi) = (-20.0, 20.0);
        let n = 40_000; // even
        let h = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn gaussian_integral_vs_quadrature() {
        let v = gaussian_integral(Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)).unwrap();
        let q = gaussian_quadrature_oracle(Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0));
        assert!((v - q).norm() < 1e-10, "diff {:e}", (v - q).norm());
    }

    #[test]
    fn gaussian_integral_vs_quadrature_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9a55);
        for _ in 0..100 {
            let a = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = Complex64::new(rng.gen_range(0.1..10.0), rng.gen_range(-3.0..3.0));
            let v = gaussian_integral(a, b).unwrap();
            let q = gaussian_quadrature_oracle(a, b);
            assert!((v - q).norm() < 1e-10, "a={a} b={b} diff {:e}", (v - q).norm());
        }
    }

    #[test]
    fn quartic_poly_eval() {
        assert_eq!(FourthMomentPoly::zero().eval(3.7), 0.0);
        let p = FourthMomentPoly {
            a4: 1.0,
            a3: 0.0,
            a2: 0.0,
            a1: 0.0,
            a0: 0.0,
        };
        assert_eq!(p.eval(2.0), 16.0);
    }

    #[test]
    fn quartic_poly_paper_defaults() {
        let p = FourthMomentPoly::with_leading_defaults();
        assert!((p.a4 - 1.0 / (2.0 * PI * PI)).abs() < 1e-17);
        assert_eq!(p.a2, 0.0);
        assert_eq!(p.a1, 0.0);
        assert_eq!(p.a0, 0.0);
        let x = (1e4f64).ln();
        let expect = p.a4 * x.powi(4) + p.a3 * x.powi(3);
        assert!((p.eval(x) - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn zeta_prime_2_constant_against_series_oracle() {
        // zeta'(2) = -sum ln(n)/n^2; accelerate with an Euler-Maclaurin tail:
        // -zeta'(2) = sum_{n<N} ln(n)/n^2 + (ln N + 1)/N + (ln N)/(2 N^2)
        //             + remainder, remainder ~ d/dN corrections
        let n_cut = 2_000_000u64;
        let mut s = 0.0f64;
        for n in (2..n_cut).rev() {
            let nf = n as f64;
            s += nf.ln() / (nf * nf);
        }
        let nf = n_cut as f64;
        let tail = (nf.ln() + 1.0) / nf + nf.ln() / (2.0 * nf * nf);
        let approx = -(s + tail);
        assert!(
            (approx - ZETA_PRIME_2).abs() < 1e-9,
            "series {approx} vs const {ZETA_PRIME_2}"
        );
    }
}
