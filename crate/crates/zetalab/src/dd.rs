//! Double-double arithmetic (about 32 significant digits).
//!
//! Used by the extended-precision test oracles (term-exact re-summation of
//! the explicit formulas, closed-form spot values) and by the phase
//! computations of the Riemann-Siegel evaluator, where `t*ln(n)` must be
//! reduced modulo 2*pi without losing the low bits.  Error-free transforms
//! follow Dekker and Knuth; `two_prod` relies on fused multiply-add, which
//! `f64::mul_add` guarantees to be correctly rounded.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

pub const PI: Dd = Dd::from_parts(3.141592653589793, 1.2246467991473532e-16);
pub const TWO_PI: Dd = Dd::from_parts(6.283185307179586, 2.4492935982947064e-16);
pub const PI_2: Dd = Dd::from_parts(1.5707963267948966, 6.123233995736766e-17);
pub const PI_4: Dd = Dd::from_parts(0.7853981633974483, 3.061616997868383e-17);
pub const LN2: Dd = Dd::from_parts(0.6931471805599453, 2.3190468138462996e-17);

impl Dd {
    pub const ZERO: Dd = Dd::from_parts(0.0, 0.0);
    pub const ONE: Dd = Dd::from_parts(1.0, 0.0);

    #[inline]
    pub const fn from_parts(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn from_u64(x: u64) -> Self {
        // u64 up to 2^53 is exact in the hi word; split larger ones.
        let hi = x as f64;
        let lo = if hi as u64 >= x {
            -(((hi as u128) - (x as u128)) as f64)
        } else {
            ((x as u128) - (hi as u128)) as f64
        };
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, other: f64) -> Dd {
        let (s, e) = two_sum(self.hi, other);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e) = two_prod(self.hi, other);
        let e = e + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // Karp's method: one Newton step on a double seed.
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax_dd = Dd::from_f64(ax);
        let err = self.sub(ax_dd.mul(ax_dd));
        ax_dd.add_f64(err.hi * (x * 0.5))
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    /// exp(x) by range reduction to x = k*ln2 + r, |r| <= ln2/2, then Taylor.
    pub fn exp(self) -> Dd {
        if self.hi < -709.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul_f64(k));
        // Taylor for exp(r), |r| <= 0.347: terms shrink ~4x each step.
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for i in 1..=28 {
            term = term.mul(r).mul_f64(1.0 / i as f64);
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 {
                break;
            }
        }
        // scale by 2^k
        let scale = (k as i32).clamp(-1022, 1023);
        let factor = f64::from_bits(((1023 + scale) as u64) << 52);
        Dd {
            hi: sum.hi * factor,
            lo: sum.lo * factor,
        }
    }

    /// Natural log by Newton iteration on exp: y <- y + x*exp(-y) - 1.
    pub fn ln(self) -> Dd {
        assert!(self.hi > 0.0, "ln of non-positive double-double");
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            let corr = self.mul(y.neg().exp()).add_f64(-1.0);
            y = y.add(corr);
        }
        y
    }

    /// arsinh(x) = ln(x + sqrt(1+x^2)).
    pub fn asinh(self) -> Dd {
        self.add(Dd::ONE.add(self.mul(self)).sqrt()).ln()
    }

    /// Reduce modulo 2*pi into roughly [-pi, pi].  The argument magnitude is
    /// limited by the exactness of the integer multiple: fine below ~1e15.
    pub fn mod_two_pi(self) -> Dd {
        let k = (self.hi / TWO_PI.hi).round();
        self.sub(TWO_PI.mul_f64(k))
    }

    fn sin_taylor(self) -> Dd {
        // |x| <= pi/4
        let x2 = self.mul(self);
        let mut term = self;
        let mut sum = self;
        let mut n = 1.0;
        for _ in 0..14 {
            term = term.mul(x2).mul_f64(-1.0 / ((n + 1.0) * (n + 2.0)));
            sum = sum.add(term);
            n += 2.0;
            if term.hi.abs() < 1e-35 {
                break;
            }
        }
        sum
    }

    fn cos_taylor(self) -> Dd {
        let x2 = self.mul(self);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        let mut n = 0.0;
        for _ in 0..14 {
            term = term.mul(x2).mul_f64(-1.0 / ((n + 1.0) * (n + 2.0)));
            sum = sum.add(term);
            n += 2.0;
            if term.hi.abs() < 1e-35 {
                break;
            }
        }
        sum
    }

    pub fn sin_cos(self) -> (Dd, Dd) {
        let r = self.mod_two_pi();
        // reduce to |r| <= pi/4 with quadrant bookkeeping
        let q = (r.hi / PI_2.hi).round();
        let r = r.sub(PI_2.mul_f64(q));
        let (s, c) = (r.sin_taylor(), r.cos_taylor());
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, s.neg()),
            2 => (s.neg(), c.neg()),
            _ => (c.neg(), s),
        }
    }

    pub fn sin(self) -> Dd {
        self.sin_cos().0
    }

    pub fn cos(self) -> Dd {
        self.sin_cos().1
    }
}
