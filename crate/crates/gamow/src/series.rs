//! Convergent residue-series evaluation of the four integrals.
//!
//! Internally every sum runs in double-double arithmetic, so values stay
//! accurate well past the point where the reported cancellation diagnostics
//! would condemn a plain f64 evaluation. The diagnostics are deliberately
//! arithmetic-independent: they describe the conditioning of the series
//! itself, not of this particular implementation.

use crate::dd::{self, Dd};
use crate::error::Error;
use crate::params::IntegralParams;
use crate::quad;
use crate::special;
use crate::sum::{PartialPeak, Truncation, TERM_CAP};
use crate::Result;

/// How the summation went, independent of the final value.
#[derive(Clone, Copy, Debug)]
pub struct SeriesDiagnostics {
    /// Terms consumed across every sub-series involved.
    pub terms_used: u32,
    /// Largest magnitude seen among terms and running partial sums.
    pub max_partial_magnitude: f64,
    pub result_magnitude: f64,
    /// log10(max partial / result): decimal digits lost to cancellation.
    pub cancellation_digits: f64,
    /// False when any sub-series hit the term cap before the truncation rule.
    pub converged: bool,
}

/// Reliability grade derived from the diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trust {
    Reliable,
    Degraded,
    Untrusted,
}

impl Trust {
    pub fn from_diagnostics(d: &SeriesDiagnostics) -> Trust {
        if !d.converged || d.cancellation_digits > 13.0 {
            Trust::Untrusted
        } else if d.cancellation_digits > 9.0 {
            Trust::Degraded
        } else {
            Trust::Reliable
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Trust::Reliable => "reliable",
            Trust::Degraded => "degraded",
            Trust::Untrusted => "untrusted",
        }
    }
}

impl std::fmt::Display for Trust {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SeriesResult {
    pub value: f64,
    pub diagnostics: SeriesDiagnostics,
    pub trust: Trust,
}

/// Internal evaluation carrying the double-double value.
pub(crate) struct DdEval {
    pub value: Dd,
    pub terms: u32,
    pub peak: f64,
    pub converged: bool,
}

fn finish(e: DdEval) -> SeriesResult {
    let value = e.value.to_f64();
    let result_magnitude = value.abs();
    let max_partial_magnitude = e.peak.max(result_magnitude);
    let cancellation_digits = if result_magnitude == 0.0 {
        if max_partial_magnitude == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (max_partial_magnitude / result_magnitude).log10().max(0.0)
    };
    let diagnostics = SeriesDiagnostics {
        terms_used: e.terms,
        max_partial_magnitude,
        result_magnitude,
        cancellation_digits,
        converged: e.converged,
    };
    SeriesResult {
        value,
        diagnostics,
        trust: Trust::from_diagnostics(&diagnostics),
    }
}

fn check_z(z: f64) -> Result<()> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::invalid(format!("z must be finite and >= 0, got {z}")));
    }
    Ok(())
}

fn check_order(nu: u32) -> Result<()> {
    if nu > 170 {
        return Err(Error::invalid(format!(
            "order {nu} overflows the leading factorial; use the quadrature route"
        )));
    }
    Ok(())
}

/// Sum of the three residue groups for the uncut integral: the finite
/// polynomial part, the half-integer-pole part carrying 0F2, and the
/// logarithmic part from the double poles.
pub(crate) fn i1_dd(z: f64, nu: u32) -> Result<DdEval> {
    if z == 0.0 {
        let value = Dd::from_f64(special::factorial(nu));
        return Ok(DdEval {
            value,
            terms: 1,
            peak: value.hi.abs(),
            converged: true,
        });
    }
    let nf = nu as f64;
    // x = z^2/4 held exactly: sqr captures the full product, the scale is a
    // power of two. Every sub-series must see the same x or their mutual
    // cancellation breaks down.
    let x = Dd::from_f64(z).sqr().scale_pow2(0.25);
    let mut peak = PartialPeak::new();
    let mut total = dd::ZERO;
    let mut terms = 0_u32;

    // Polynomial part: sum_{r=0}^{nu} (nu-r)! x^r / ((1/2)_r r!).
    let mut term = Dd::from_f64(special::factorial(nu));
    total = total.add(term);
    peak.observe(term.hi.abs());
    peak.observe_dd(total);
    terms += 1;
    for r in 1..=nu {
        let rf = r as f64;
        term = term
            .mul(x)
            .div_f64(nf - rf + 1.0)
            .div_f64(rf - 0.5)
            .div_f64(rf);
        total = total.add(term);
        peak.observe(term.hi.abs());
        peak.observe_dd(total);
        terms += 1;
    }

    // Half-integer poles: -2 Gamma(nu + 1/2) sqrt(x) 0F2(-; 3/2, 1/2 - nu; -x).
    let gamma_half = special::dd_gamma_half_grid(2 * nu as i64 + 1)?;
    let (f02, n02, f02_peak) = special::dd_hyp0f2(1.5, 0.5 - nf, x.neg())?;
    let r2_scale = gamma_half.mul(x.sqrt()).scale_pow2(2.0);
    let r2 = r2_scale.mul(f02).neg();
    total = total.add(r2);
    peak.observe(f02_peak * r2_scale.hi.abs());
    peak.observe(r2.hi.abs());
    peak.observe_dd(total);
    terms += n02;

    // Logarithmic part: pi^{-1/2} x^{1+nu} sum_r x^r B_r (A_r - ln x).
    let ln_x = x.ln();
    let mut pref = x.powi(nu as i32 + 1).div(dd::SQRT_PI);
    let mut b_r = special::dd_coefficient_b0(nu);
    let mut a_r = special::dd_coefficient_a(0, nu);
    let mut stop = Truncation::new();
    let mut converged = false;
    for r in 0..=TERM_CAP {
        if r > 0 {
            let rf = r as f64;
            pref = pref.mul(x);
            b_r = b_r
                .div_f64(rf)
                .div_f64(rf + nf + 1.0)
                .div_f64(nf + rf + 0.5)
                .neg();
            a_r = a_r
                .add(dd::ONE.div_f64(rf))
                .add(dd::ONE.div_f64(rf + nf + 1.0))
                .add(dd::ONE.div_f64(nf + rf + 0.5));
        }
        let t = pref.mul(b_r).mul(a_r.sub(ln_x));
        total = total.add(t);
        peak.observe(t.hi.abs());
        peak.observe_dd(total);
        terms += 1;
        if stop.converged(t.hi.abs(), total.hi.abs()) {
            converged = true;
            break;
        }
    }

    Ok(DdEval {
        value: total,
        terms,
        peak: peak.max(),
        converged,
    })
}

/// z = 0 cutoff integral: nu! (1 - e^{-d} sum_{k<=nu} d^k/k!).
fn i2_zero_z(d: f64, nu: u32) -> DdEval {
    let e = Dd::from_f64(d).neg().exp();
    let mut s = dd::ZERO;
    let mut t = dd::ONE;
    for k in 0..=nu {
        if k > 0 {
            t = t.mul_f64(d).div_f64(k as f64);
        }
        s = s.add(t);
    }
    let fact = special::factorial(nu);
    let value = dd::ONE.sub(e.mul(s)).mul_f64(fact);
    let mut peak = PartialPeak::new();
    peak.observe(fact);
    peak.observe(e.mul(s).hi.abs() * fact);
    DdEval {
        value,
        terms: nu + 1,
        peak: peak.max(),
        converged: true,
    }
}

/// Cutoff integral: d^{nu+1} sum_r [(-d)^r / r!] (T1 + T2 + T3) with
/// w = z^2/(4d). T1 collects the half-integer poles, T2 the simple integer
/// poles (the index M = nu + r + 1 is excluded), T3 the logarithmic double
/// pole at M.
pub(crate) fn i2_dd(z: f64, d: f64, nu: u32) -> Result<DdEval> {
    if z == 0.0 {
        return Ok(i2_zero_z(d, nu));
    }
    let w = Dd::from_f64(z).sqr().div_f64(d).scale_pow2(0.25);
    let ln_w = w.ln();
    let sqrt_w = w.sqrt();
    let dpow = Dd::from_f64(d).powi(nu as i32 + 1);

    // T3 state across r.
    let mut p_r = w.powi(nu as i32 + 1).div_f64(special::factorial(nu + 1));
    for k in 0..nu {
        p_r = p_r.div_f64(1.5 + k as f64);
    }
    let mut a_r = special::dd_harmonic(nu + 1)
        .add(special::dd_harmonic_half(nu))
        .sub(dd::EULER.scale_pow2(2.0))
        .sub(dd::LN2.scale_pow2(2.0));

    let mut coef = dd::ONE;
    let mut total = dd::ZERO;
    let mut raw_peak = PartialPeak::new();
    let mut stop = Truncation::new();
    let mut terms = 0_u32;
    let mut converged = false;
    let mut inner_ok = true;

    for r in 0..=TERM_CAP {
        let m = nu + r + 1;
        let mf = m as f64;

        // T1: -2 sqrt(w) sum_l w^l / (l! (3/2)_l (M - 1/2 - l)).
        let mut t1 = dd::ZERO;
        let mut base = dd::ONE;
        let mut peak1 = PartialPeak::new();
        let mut stop1 = Truncation::new();
        let mut l = 0_u32;
        loop {
            let term = base.div_f64(mf - 0.5 - l as f64);
            t1 = t1.add(term);
            peak1.observe(term.hi.abs());
            peak1.observe_dd(t1);
            terms += 1;
            if stop1.converged(term.hi.abs(), t1.hi.abs().max(1e-300)) {
                break;
            }
            if l >= TERM_CAP {
                inner_ok = false;
                break;
            }
            l += 1;
            base = base.mul(w).div_f64(l as f64).div_f64(l as f64 + 0.5);
        }
        let t1_scale = sqrt_w.scale_pow2(2.0);
        let t1 = t1.mul(t1_scale).neg();

        // T2: sum_{l != M} w^l / (l! (1/2)_l (M - l)).
        let mut t2 = dd::ZERO;
        let mut base2 = dd::ONE;
        let mut peak2 = PartialPeak::new();
        let mut stop2 = Truncation::new();
        let mut l = 0_u32;
        loop {
            if l != m {
                let term = base2.div_f64(mf - l as f64);
                t2 = t2.add(term);
                peak2.observe(term.hi.abs());
                peak2.observe_dd(t2);
                terms += 1;
                if l > m && stop2.converged(term.hi.abs(), t2.hi.abs().max(1e-300)) {
                    break;
                }
            }
            if l >= TERM_CAP {
                inner_ok = false;
                break;
            }
            l += 1;
            base2 = base2.mul(w).div_f64(l as f64).div_f64(l as f64 - 0.5);
        }

        // T3: 2 P_r (A_r - ln w).
        let t3 = p_r.mul(a_r.sub(ln_w)).scale_pow2(2.0);
        terms += 1;

        let g = t1.add(t2).add(t3);
        let term_r = coef.mul(g);
        total = total.add(term_r);
        let cmag = coef.hi.abs();
        raw_peak.observe(peak1.max() * t1_scale.hi.abs() * cmag);
        raw_peak.observe(peak2.max() * cmag);
        raw_peak.observe(t3.hi.abs() * cmag);
        raw_peak.observe(term_r.hi.abs());
        raw_peak.observe_dd(total);
        if stop.converged(term_r.hi.abs(), total.hi.abs()) {
            converged = true;
            break;
        }
        if !inner_ok {
            break;
        }

        // Advance r-indexed state.
        let rf = (r + 1) as f64;
        coef = coef.mul_f64(-d).div_f64(rf);
        p_r = p_r.mul(w).div_f64(mf + 1.0).div_f64(mf + 0.5);
        a_r = a_r
            .add(dd::ONE.div_f64(mf + 1.0))
            .add(dd::ONE.div_f64(mf + 0.5));
    }

    Ok(DdEval {
        value: total.mul(dpow),
        terms,
        peak: raw_peak.max() * dpow.hi.abs(),
        converged: converged && inner_ok,
    })
}

/// Shifted-barrier integral via the binomial reduction
/// e^t sum_{r=0}^{nu} C(nu,r) (-t)^{nu-r} [I1(z, r) - I2(z, t, r)].
pub(crate) fn i3_dd(z: f64, t: f64, nu: u32) -> Result<DdEval> {
    if t == 0.0 {
        return i1_dd(z, nu);
    }
    let et = Dd::from_f64(t).exp();
    let mut total = dd::ZERO;
    let mut peak = PartialPeak::new();
    let mut terms = 0_u32;
    let mut converged = true;
    let mut binom = 1.0_f64;
    for r in 0..=nu {
        let e1 = i1_dd(z, r)?;
        let e2 = i2_dd(z, t, r)?;
        let coef = Dd::from_f64(-t).powi((nu - r) as i32).mul_f64(binom);
        let contrib = coef.mul(e1.value.sub(e2.value));
        total = total.add(contrib);
        let cmag = coef.hi.abs();
        peak.observe(e1.peak * cmag);
        peak.observe(e2.peak * cmag);
        peak.observe(e1.value.hi.abs() * cmag);
        peak.observe(contrib.hi.abs());
        peak.observe_dd(total);
        terms += e1.terms + e2.terms;
        converged = converged && e1.converged && e2.converged;
        binom = binom * (nu - r) as f64 / (r + 1) as f64;
    }
    Ok(DdEval {
        value: et.mul(total),
        terms,
        peak: peak.max() * et.hi,
        converged,
    })
}

/// One term's worth of I1 at a possibly fractional order: integer orders go
/// through the residue series, fractional ones through quadrature.
fn i1_any_order(z: f64, order: f64) -> Result<(Dd, u32, f64, bool)> {
    let rounded = order.round();
    if (order - rounded).abs() < 1e-9 && (0.0..=170.0).contains(&rounded) {
        let e = i1_dd(z, rounded as u32)?;
        return Ok((e.value, e.terms, e.peak, e.converged));
    }
    let p = IntegralParams::i1(z, order);
    let q = quad::oracle_eval(&p, 1e-12)?;
    Ok((Dd::from_f64(q.value), q.subdivisions, q.value.abs(), true))
}

/// Depleted-tail integral as sum_r [(-b)^r / r!] I1(z, nu + r delta). The sum
/// converges only for delta < 1; delta = 1 collapses exactly by rescaling y,
/// and delta > 1 is handled as a divergent asymptotic expansion: stop at the
/// smallest term, flag the result, and abort outright when the terms grow
/// from the start.
pub(crate) fn i4_dd(z: f64, delta: f64, b: f64, nu: u32) -> Result<DdEval> {
    if b == 0.0 {
        return i1_dd(z, nu);
    }
    if delta == 1.0 {
        // exp(-y - b y) absorbed by u = (1+b) y.
        let scale = Dd::from_f64(b).add_f64(1.0);
        let z_eff = scale.sqrt().mul_f64(z).to_f64();
        let e = i1_dd(z_eff, nu)?;
        let shrink = scale.powi(nu as i32 + 1).recip();
        return Ok(DdEval {
            value: e.value.mul(shrink),
            terms: e.terms,
            peak: e.peak * shrink.hi,
            converged: e.converged,
        });
    }

    let mut coef = dd::ONE;
    let mut total = dd::ZERO;
    let mut peak = PartialPeak::new();
    let mut stop = Truncation::new();
    let mut terms = 0_u32;
    let mut converged = false;
    let mut inner_ok = true;
    let mut term0_mag = 0.0_f64;
    let mut prev_mag = f64::INFINITY;
    let mut decreasing_seen = false;

    for r in 0..=TERM_CAP {
        let order = nu as f64 + r as f64 * delta;
        let (val, tcount, inner_peak, conv) = i1_any_order(z, order)?;
        let term = coef.mul(val);
        let mag = term.hi.abs();
        if r == 0 {
            term0_mag = mag;
        } else if mag > prev_mag {
            if !decreasing_seen {
                if mag > 10.0 * term0_mag {
                    return Err(Error::SeriesDivergence {
                        context: "depleted-tail series",
                        term_index: r,
                        ratio: mag / prev_mag,
                    });
                }
            } else {
                // Terms regrow after the minimum: the divergent tail has been
                // reached, truncate before it and report non-convergence.
                break;
            }
        } else {
            decreasing_seen = true;
        }
        total = total.add(term);
        peak.observe(mag);
        peak.observe(inner_peak * coef.hi.abs());
        peak.observe_dd(total);
        terms += tcount.max(1);
        inner_ok = inner_ok && conv;
        if stop.converged(mag, total.hi.abs()) {
            converged = true;
            break;
        }
        prev_mag = mag;
        coef = coef.mul_f64(-b).div_f64(r as f64 + 1.0);
    }

    Ok(DdEval {
        value: total,
        terms,
        peak: peak.max(),
        converged: converged && inner_ok,
    })
}

/// Uncut integral of y^nu exp(-y - z y^{-1/2}) over [0, inf).
pub fn i1_series(z: f64, nu: u32) -> Result<SeriesResult> {
    check_z(z)?;
    check_order(nu)?;
    Ok(finish(i1_dd(z, nu)?))
}

/// Cutoff integral over [0, d].
pub fn i2_series(z: f64, d: f64, nu: u32) -> Result<SeriesResult> {
    check_z(z)?;
    check_order(nu)?;
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::invalid(format!("cutoff d must be positive, got {d}")));
    }
    Ok(finish(i2_dd(z, d, nu)?))
}

/// Screened integral with the barrier argument shifted by t.
pub fn i3_series(z: f64, t: f64, nu: u32) -> Result<SeriesResult> {
    check_z(z)?;
    check_order(nu)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("shift t must be >= 0, got {t}")));
    }
    Ok(finish(i3_dd(z, t, nu)?))
}

/// Depleted-tail integral with the extra factor exp(-b y^delta).
pub fn i4_series(z: f64, delta: f64, b: f64, nu: u32) -> Result<SeriesResult> {
    check_z(z)?;
    check_order(nu)?;
    if !b.is_finite() || b < 0.0 {
        return Err(Error::invalid(format!("strength b must be >= 0, got {b}")));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::invalid(format!(
            "exponent delta must be positive, got {delta}"
        )));
    }
    let mut result = finish(i4_dd(z, delta, b, nu)?);
    // A sum that is asymptotic rather than convergent never earns full trust,
    // even when the truncation rule fired cleanly.
    if delta > 1.0 && result.trust == Trust::Reliable {
        result.trust = Trust::Degraded;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn oracle(p: &IntegralParams) -> f64 {
        quad::oracle_eval(p, 1e-12).unwrap().value
    }

    #[test]
    fn uncut_frozen_values() {
        let r = i1_series(1.0, 0).unwrap();
        assert!(rel(r.value, 0.29312676277195555086) < 1e-14, "{}", r.value);
        let r = i1_series(2.0, 1).unwrap();
        assert!(rel(r.value, 0.21464622183439996258) < 1e-14, "{}", r.value);
        let r = i1_series(10.0, 2).unwrap();
        assert!(rel(r.value, 0.0096611271715952082846) < 1e-13, "{}", r.value);
    }

    #[test]
    fn uncut_zero_tunneling_is_factorial() {
        for nu in 0..6 {
            let r = i1_series(0.0, nu).unwrap();
            assert_eq!(r.value, special::factorial(nu));
            assert!(r.diagnostics.converged);
        }
    }

    #[test]
    fn uncut_tiny_z_stays_at_factorial() {
        for nu in 0..4 {
            let r = i1_series(1e-13, nu).unwrap();
            assert!(rel(r.value, special::factorial(nu)) < 1e-12, "nu = {nu}");
            assert_eq!(r.trust, Trust::Reliable);
        }
    }

    #[test]
    fn uncut_matches_quadrature_grid() {
        for &z in &[0.3, 1.0, 2.0, 5.0, 10.0, 20.0] {
            for nu in 0..4u32 {
                let s = i1_series(z, nu).unwrap();
                let q = oracle(&IntegralParams::i1(z, nu as f64));
                assert!(
                    rel(s.value, q) < 1e-10,
                    "z = {z}, nu = {nu}: series {} vs quadrature {q}",
                    s.value
                );
            }
        }
    }

    #[test]
    fn cancellation_grows_with_z_and_flips_trust() {
        let low = i1_series(3.0, 0).unwrap();
        let mid = i1_series(20.0, 0).unwrap();
        let high = i1_series(33.0, 0).unwrap();
        assert!(low.diagnostics.cancellation_digits < mid.diagnostics.cancellation_digits);
        assert!(mid.diagnostics.cancellation_digits < high.diagnostics.cancellation_digits);
        assert_eq!(low.trust, Trust::Reliable);
        assert_eq!(mid.trust, Trust::Degraded);
        assert_eq!(high.trust, Trust::Untrusted);
        // The extended-precision value itself is still good at z = 33 even
        // though an f64 implementation would have lost every digit by now.
        let q = oracle(&IntegralParams::i1(33.0, 0.0));
        assert!(rel(high.value, q) < 1e-8);
    }

    #[test]
    fn cutoff_frozen_values() {
        let r = i2_series(2.0, 5.0, 1).unwrap();
        assert!(rel(r.value, 0.19669571267353063954) < 1e-13, "{}", r.value);
        let r = i2_series(10.0, 10.0, 2).unwrap();
        assert!(rel(r.value, 0.0093822731335393405643) < 1e-12, "{}", r.value);
    }

    #[test]
    fn cutoff_matches_quadrature_grid() {
        for &z in &[0.5, 2.0, 6.0] {
            for &d in &[0.5, 2.0, 8.0] {
                for nu in 0..3u32 {
                    let s = i2_series(z, d, nu).unwrap();
                    let q = oracle(&IntegralParams::i2(z, d, nu as f64));
                    assert!(
                        rel(s.value, q) < 1e-9,
                        "z = {z}, d = {d}, nu = {nu}: {} vs {q}",
                        s.value
                    );
                }
            }
        }
    }

    #[test]
    fn cutoff_zero_tunneling_matches_incomplete_gamma() {
        let r = i2_series(0.0, 1.0, 0).unwrap();
        assert!(rel(r.value, 1.0 - (-1.0_f64).exp()) < 1e-15);
        let r = i2_series(0.0, 2.0, 1).unwrap();
        // integral of y e^{-y} over [0,2] = 1 - 3 e^{-2}
        assert!(rel(r.value, 1.0 - 3.0 * (-2.0_f64).exp()) < 1e-15);
    }

    #[test]
    fn cutoff_grows_with_d_toward_uncut() {
        let full = i1_series(2.0, 1).unwrap().value;
        let mut prev = 0.0;
        for &d in &[1.0, 3.0, 7.0, 15.0, 30.0] {
            let v = i2_series(2.0, d, 1).unwrap().value;
            assert!(v > prev);
            assert!(v <= full * (1.0 + 1e-12));
            prev = v;
        }
        assert!(rel(prev, full) < 1e-9);
    }

    #[test]
    fn shifted_frozen_values() {
        let r = i3_series(2.0, 1.0, 1).unwrap();
        assert!(rel(r.value, 0.29902643415689643509) < 1e-12, "{}", r.value);
        let r = i3_series(2.0, 0.5, 2).unwrap();
        assert!(rel(r.value, 0.64668184978748663325) < 1e-12, "{}", r.value);
    }

    #[test]
    fn shifted_zero_t_identical_to_uncut() {
        for nu in 0..3 {
            let a = i3_series(2.0, 0.0, nu).unwrap();
            let b = i1_series(2.0, nu).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.diagnostics.terms_used, b.diagnostics.terms_used);
        }
    }

    #[test]
    fn shifted_matches_quadrature_grid() {
        for &z in &[1.0, 2.0, 5.0] {
            for &t in &[0.2, 1.0, 2.5] {
                for nu in 0..3u32 {
                    let s = i3_series(z, t, nu).unwrap();
                    let q = oracle(&IntegralParams::i3(z, t, nu as f64));
                    assert!(
                        rel(s.value, q) < 1e-9,
                        "z = {z}, t = {t}, nu = {nu}: {} vs {q}",
                        s.value
                    );
                }
            }
        }
    }

    #[test]
    fn depleted_zero_b_identical_to_uncut() {
        let a = i4_series(2.0, 0.7, 0.0, 1).unwrap();
        let b = i1_series(2.0, 1).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn depleted_linear_exponent_frozen_value() {
        let r = i4_series(1.0, 1.0, 0.5, 0).unwrap();
        assert!(rel(r.value, 0.15608543234987773319) < 1e-13, "{}", r.value);
        assert_eq!(r.trust, Trust::Reliable);
    }

    #[test]
    fn depleted_sublinear_matches_quadrature() {
        for &(z, delta, b, nu) in &[
            (2.0, 0.5, 0.1, 0u32),
            (1.0, 0.5, 0.8, 1),
            (3.0, 0.25, 0.4, 2),
            (2.0, 0.75, 0.3, 0),
        ] {
            let s = i4_series(z, delta, b, nu).unwrap();
            let q = oracle(&IntegralParams::i4(z, delta, b, nu as f64));
            assert!(
                rel(s.value, q) < 1e-9,
                "z={z} delta={delta} b={b} nu={nu}: {} vs {q}",
                s.value
            );
        }
    }

    #[test]
    fn depleted_superlinear_small_b_truncates_with_reduced_trust() {
        // delta = 2 makes the expansion asymptotic. Truncating at the
        // smallest term gives real accuracy only while the terms shrink fast,
        // i.e. for small b; either way the result must not claim full trust.
        let s = i4_series(2.0, 2.0, 0.01, 1).unwrap();
        let q = oracle(&IntegralParams::i4(2.0, 2.0, 0.01, 1.0));
        assert!(s.trust != Trust::Reliable);
        assert!(rel(s.value, q) < 1e-6, "{} vs {q}", s.value);
        // At b = 0.05 the smallest term is already at the percent scale; the
        // value is order-of-magnitude only and the grade reflects that.
        let s = i4_series(2.0, 2.0, 0.05, 1).unwrap();
        assert!(s.trust != Trust::Reliable);
        let q = oracle(&IntegralParams::i4(2.0, 2.0, 0.05, 1.0));
        assert!(rel(s.value, q) < 0.5, "{} vs {q}", s.value);
    }

    #[test]
    fn depleted_superlinear_large_b_aborts() {
        match i4_series(2.0, 3.0, 5.0, 1) {
            Err(Error::SeriesDivergence { term_index, .. }) => {
                assert!(term_index <= 3);
            }
            other => panic!("expected divergence abort, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(i1_series(-1.0, 0).is_err());
        assert!(i1_series(f64::NAN, 0).is_err());
        assert!(i2_series(1.0, 0.0, 0).is_err());
        assert!(i2_series(1.0, -2.0, 0).is_err());
        assert!(i3_series(1.0, -0.1, 0).is_err());
        assert!(i4_series(1.0, 0.0, 0.5, 0).is_err());
        assert!(i4_series(1.0, -0.5, 0.5, 0).is_err());
        assert!(i4_series(1.0, 0.5, -0.5, 0).is_err());
        assert!(i1_series(1.0, 171).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn uncut_bounded_by_factorial_and_positive(
            z in 0.01_f64..15.0,
            nu in 0u32..4,
        ) {
            let r = i1_series(z, nu).unwrap();
            prop_assert!(r.value > 0.0);
            prop_assert!(r.value < special::factorial(nu));
        }

        #[test]
        fn cutoff_below_uncut(
            z in 0.01_f64..10.0,
            d in 0.1_f64..12.0,
            nu in 0u32..3,
        ) {
            let full = i1_series(z, nu).unwrap().value;
            let cut = i2_series(z, d, nu).unwrap().value;
            prop_assert!(cut > 0.0);
            prop_assert!(cut <= full * (1.0 + 1e-10));
        }

        #[test]
        fn series_tracks_quadrature(
            z in 0.1_f64..12.0,
            nu in 0u32..4,
        ) {
            let s = i1_series(z, nu).unwrap();
            let q = quad::oracle_eval(&IntegralParams::i1(z, nu as f64), 1e-11)
                .unwrap()
                .value;
            prop_assert!(rel(s.value, q) < 1e-8, "z={z} nu={nu} {} vs {q}", s.value);
        }
    }
}
