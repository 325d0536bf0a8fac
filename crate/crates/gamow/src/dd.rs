//! Double-double arithmetic: an unevaluated sum of two f64 words carrying
//! roughly 31 significant decimal digits.
//!
//! The residue series lose one digit per decade of cancellation between their
//! growing alternating terms, which caps plain f64 at z of roughly 18 before the
//! result drifts past 1e-6 relative error while the trust diagnostics still read
//! "degraded" rather than "untrusted". Carrying the hot loops in double-double
//! pushes the arithmetic noise floor far below the diagnostic thresholds, so a
//! reported trust level is about the mathematics of the series, never about the
//! working precision. Only the operations the series and residue evaluators
//! need are implemented.

/// Two-word floating value. Invariant: `hi = fl(hi + lo)`, i.e. the pair is
/// normalized so `lo` is at most half an ulp of `hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum: returns (fl(a+b), exact residual).
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming |a| >= |b|.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

pub(crate) const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
pub(crate) const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

// Word pairs for the constants the series need; lo is the residual of the
// mathematical value after subtracting the nearest f64.
pub(crate) const PI: Dd = Dd {
    hi: 3.141592653589793,
    lo: 1.224646799335416e-16,
};
pub(crate) const SQRT_PI: Dd = Dd {
    hi: 1.772453850905516,
    lo: -7.666586500488904e-17,
};
pub(crate) const LN2: Dd = Dd {
    hi: 0.6931471805599453,
    lo: 2.3190468139775466e-17,
};
pub(crate) const EULER: Dd = Dd {
    hi: 0.5772156649015329,
    lo: -4.942915150827745e-18,
};

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            self.neg()
        } else {
            self
        }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, x);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi, lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * x);
        Dd { hi, lo }
    }

    /// Multiplication by a power of two; exact.
    #[inline]
    pub fn scale_pow2(self, x: f64) -> Dd {
        Dd {
            hi: self.hi * x,
            lo: self.lo * x,
        }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add_f64(q3)
    }

    #[inline]
    pub fn div_f64(self, x: f64) -> Dd {
        self.div(Dd::from_f64(x))
    }

    #[inline]
    pub fn recip(self) -> Dd {
        ONE.div(self)
    }

    pub fn sqr(self) -> Dd {
        let (p1, p2) = two_prod(self.hi, self.hi);
        let (hi, lo) = quick_two_sum(p1, p2 + 2.0 * self.hi * self.lo);
        Dd { hi, lo }
    }

    /// One Newton step on 1/sqrt refines the f64 seed to full width.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return ZERO;
        }
        debug_assert!(self.hi > 0.0, "dd sqrt of negative value");
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let err = self.sub(Dd::from_f64(ax).sqr()).hi * (x * 0.5);
        let (hi, lo) = quick_two_sum(ax, err);
        Dd { hi, lo }
    }

    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    /// exp with argument reduction r = (x - m ln2)/2^9, a short Taylor sum,
    /// nine squarings of e^r - 1, and reassembly by 2^m.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -709.0 {
            return ZERO;
        }
        let m = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul_f64(m)).scale_pow2(1.0 / 512.0);
        // e^r - 1 for |r| <= ~6.8e-4: eleven terms reach the 1e-32 floor.
        let mut term = r;
        let mut s = r;
        for k in 2..=11 {
            term = term.mul(r).div_f64(k as f64);
            s = s.add(term);
        }
        // e^(2u) - 1 = 2(e^u - 1) + (e^u - 1)^2, nine times to undo the /512.
        for _ in 0..9 {
            s = s.scale_pow2(2.0).add(s.sqr());
        }
        let s = s.add_f64(1.0);
        // |m| <= 1023 by the range guard, so 2^m is a normal f64.
        s.scale_pow2(f64::powi(2.0, m as i32))
    }

    /// Natural log by one Newton step on exp: y1 = y0 + x e^{-y0} - 1.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0, "dd ln of non-positive value");
        let y0 = self.hi.ln();
        let e = Dd::from_f64(-y0).exp();
        self.mul(e).add_f64(-1.0).add_f64(y0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_and_mul_carry_residuals() {
        let a = Dd::from_f64(1.0).div_f64(3.0);
        let three_a = a.mul_f64(3.0);
        let err = three_a.sub(ONE);
        assert!(err.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_squares_back() {
        let two = Dd::from_f64(2.0);
        let r = two.sqrt();
        let back = r.sqr().sub(two);
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn exp_and_ln_are_inverse() {
        for &x in &[0.37_f64, 1.0, 2.5, -4.2, 10.0, 300.0, -300.0] {
            let e = Dd::from_f64(x).exp();
            let back = e.ln().add_f64(-x);
            assert!(
                back.to_f64().abs() < 1e-28 * x.abs().max(1.0),
                "round trip failed at {x}: residual {}",
                back.to_f64()
            );
        }
    }

    #[test]
    fn ln2_matches_constant() {
        let l = Dd::from_f64(2.0).ln().sub(LN2);
        assert!(l.to_f64().abs() < 1e-30);
    }

    #[test]
    fn powi_matches_repeated_mul() {
        let x = Dd::from_f64(1.7);
        let mut acc = ONE;
        for _ in 0..7 {
            acc = acc.mul(x);
        }
        let d = x.powi(7).sub(acc);
        assert!(d.to_f64().abs() < 1e-28);
        let inv = x.powi(-3).mul(x.powi(3)).sub(ONE);
        assert!(inv.to_f64().abs() < 1e-30);
    }
}
