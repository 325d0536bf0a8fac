//! Gamma-function machinery, Pochhammer symbols, harmonic sums, the 0F2
//! hypergeometric series, and the coefficient pair (A_r, B_r) of the
//! logarithmic residue series.

use crate::dd::{self, Dd};
use crate::error::Error;
use crate::sum::{Truncation, PartialPeak, TERM_CAP};
use crate::Result;

/// Euler's constant to full double precision.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_86;

// Stirling-series coefficients B_{2n} / (2n (2n-1)) as exact integer ratios.
// Applied only at x >= STIRLING_MIN, where the first omitted term is below
// 1e-20; smaller arguments are shifted up through the recurrence first.
const STIRLING_NUM_DEN: [(f64, f64); 10] = [
    (1.0, 12.0),
    (-1.0, 360.0),
    (1.0, 1260.0),
    (-1.0, 1680.0),
    (1.0, 1188.0),
    (-691.0, 360360.0),
    (1.0, 156.0),
    (-3617.0, 122400.0),
    (43867.0, 244188.0),
    (-174611.0, 125400.0),
];
const STIRLING_MIN: f64 = 10.0;

/// sin(pi x) without the precision loss of multiplying a large x by pi first.
fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (std::f64::consts::PI * r).sin();
    if (n as i64) & 1 == 0 {
        s
    } else {
        -s
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// The gamma function for real arguments away from the poles at 0, -1, -2, ...
/// Negative arguments go through the reflection formula.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("gamma argument {x} is not finite")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole { x });
    }
    Ok(gamma_unchecked(x))
}

/// ln Gamma(x) for x >= STIRLING_MIN, double-double throughout.
fn dd_ln_gamma_stirling(x: f64) -> Dd {
    let xd = Dd::from_f64(x);
    let ln_sqrt_two_pi = dd::PI.scale_pow2(2.0).ln().scale_pow2(0.5);
    let mut acc = xd
        .add_f64(-0.5)
        .mul(xd.ln())
        .sub(xd)
        .add(ln_sqrt_two_pi);
    let inv_x2 = xd.sqr().recip();
    let mut p = xd.recip();
    for &(num, den) in &STIRLING_NUM_DEN {
        acc = acc.add(p.mul_f64(num).div_f64(den));
        p = p.mul(inv_x2);
    }
    acc
}

/// Pushes x past STIRLING_MIN; returns (x + k, product of the k skipped
/// factors) so that Gamma(x) = Gamma(x + k) / product.
fn shift_up(x: f64) -> (f64, Dd) {
    let mut prod = dd::ONE;
    let mut z = x;
    while z < STIRLING_MIN {
        prod = prod.mul_f64(z);
        z += 1.0;
    }
    (z, prod)
}

fn gamma_unchecked(x: f64) -> f64 {
    if x == x.floor() && x >= 1.0 && x <= 171.0 {
        return factorial(x as u32 - 1);
    }
    if x < 0.5 {
        return std::f64::consts::PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    let (z, prod) = shift_up(x);
    dd_ln_gamma_stirling(z).exp().div(prod).to_f64()
}

/// ln |Gamma(x)| together with the sign of Gamma(x); products of many gammas
/// are assembled in log space to avoid overflow.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("gamma argument {x} is not finite")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole { x });
    }
    if x < 0.5 {
        let sp = sin_pi(x);
        let (lg, _) = ln_gamma_signed(1.0 - x)?;
        Ok((
            std::f64::consts::PI.ln() - sp.abs().ln() - lg,
            if sp > 0.0 { 1.0 } else { -1.0 },
        ))
    } else {
        let (z, prod) = shift_up(x);
        Ok((dd_ln_gamma_stirling(z).sub(prod.ln()).to_f64(), 1.0))
    }
}

/// Rising factorial (a)_r = a (a+1) ... (a+r-1), with (a)_0 = 1.
pub fn pochhammer(a: f64, r: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..r {
        acc *= a + i as f64;
    }
    acc
}

/// n! as f64; exact through 18!, correctly rounded products beyond, infinity
/// past 170!.
pub fn factorial(n: u32) -> f64 {
    let mut acc = 1.0_f64;
    for k in 2..=n.max(1) {
        acc *= k as f64;
        if !acc.is_finite() {
            break;
        }
    }
    acc
}

/// H_n = sum_{k=1}^{n} 1/k, with H_0 = 0.
pub fn harmonic(n: u32) -> f64 {
    dd_harmonic(n).to_f64()
}

pub(crate) fn dd_harmonic(n: u32) -> Dd {
    let mut s = dd::ZERO;
    for k in 1..=n {
        s = s.add(Dd::from_f64(1.0).div_f64(k as f64));
    }
    s
}

/// sum_{k=0}^{n} 1/(1/2 + k); the half-step harmonic block of A_r.
pub(crate) fn dd_harmonic_half(n: u32) -> Dd {
    let mut s = dd::ZERO;
    for k in 0..=n {
        s = s.add(Dd::from_f64(1.0).div_f64(0.5 + k as f64));
    }
    s
}

/// Gamma at a point on the half-integer grid, argument given as 2x.
/// Built by recurrence from 1! or Gamma(1/2) = sqrt(pi), so the value is
/// exact up to double-double roundoff even deep into the negative axis.
pub(crate) fn dd_gamma_half_grid(two_x: i64) -> Result<Dd> {
    if two_x % 2 == 0 {
        let n = two_x / 2;
        if n <= 0 {
            return Err(Error::GammaPole { x: n as f64 });
        }
        let mut acc = dd::ONE;
        for k in 2..n {
            acc = acc.mul_f64(k as f64);
        }
        Ok(acc)
    } else if two_x > 0 {
        // Gamma(1/2 + n)
        let n = (two_x - 1) / 2;
        let mut acc = dd::SQRT_PI;
        for k in 0..n {
            acc = acc.mul_f64(k as f64 + 0.5);
        }
        Ok(acc)
    } else {
        // Gamma(1/2 - n) = sqrt(pi) / prod_{i=1}^{n} (1/2 - i)
        let n = (1 - two_x) / 2;
        let mut acc = dd::SQRT_PI;
        for i in 1..=n {
            acc = acc.div_f64(0.5 - i as f64);
        }
        Ok(acc)
    }
}

/// Digamma on the half-integer grid, argument given as 2x. Uses
/// psi(1) = -gamma, psi(1/2) = -gamma - 2 ln 2, and the step recurrence.
pub(crate) fn dd_digamma_half_grid(two_x: i64) -> Result<Dd> {
    if two_x % 2 == 0 {
        let n = two_x / 2;
        if n <= 0 {
            return Err(Error::GammaPole { x: n as f64 });
        }
        Ok(dd::EULER.neg().add(dd_harmonic(n as u32 - 1)))
    } else {
        let base = dd::EULER.neg().sub(dd::LN2.scale_pow2(2.0));
        if two_x >= 1 {
            // psi(1/2 + n) = psi(1/2) + 2 sum_{k=1}^{n} 1/(2k-1)
            let n = (two_x - 1) / 2;
            let mut s = base;
            for k in 1..=n {
                s = s.add(Dd::from_f64(2.0).div_f64(2.0 * k as f64 - 1.0));
            }
            Ok(s)
        } else {
            // psi(1/2 - n) = psi(1/2) - sum_{k=1}^{n} 1/(1/2 - k)
            let n = (1 - two_x) / 2;
            let mut s = base;
            for k in 1..=n {
                s = s.sub(Dd::from_f64(1.0).div_f64(0.5 - k as f64));
            }
            Ok(s)
        }
    }
}

pub(crate) fn dd_coefficient_a(r: u32, nu: u32) -> Dd {
    dd_harmonic(r)
        .add(dd_harmonic(r + nu + 1))
        .add(dd_harmonic_half(nu + r))
        .sub(dd::EULER.mul_f64(3.0))
        .sub(dd::LN2.scale_pow2(2.0))
}

/// A_r: the harmonic-sum coefficient multiplying B_r in the logarithmic
/// series, A_r = H_r + H_{r+nu+1} + sum_{k=0}^{nu+r} 1/(1/2+k) - 3 gamma - 2 ln 2.
pub fn coefficient_a(r: u32, nu: u32) -> f64 {
    dd_coefficient_a(r, nu).to_f64()
}

/// B_0 = 2^{nu+1} sqrt(pi) / ((2nu+1)!! (nu+1)!), always positive; successive
/// B_r pick up the factor -1 / (r (r+nu+1) (nu+r+1/2)).
pub(crate) fn dd_coefficient_b0(nu: u32) -> Dd {
    let mut acc = dd::SQRT_PI.scale_pow2(f64::powi(2.0, nu as i32 + 1));
    for k in 0..=nu {
        acc = acc.div_f64(2.0 * k as f64 + 1.0); // (2nu+1)!!
    }
    for k in 2..=(nu + 1) {
        acc = acc.div_f64(k as f64); // (nu+1)!
    }
    acc
}

pub(crate) fn dd_coefficient_b(r: u32, nu: u32) -> Dd {
    let mut b = dd_coefficient_b0(nu);
    let nf = nu as f64;
    for i in 1..=r {
        // Divisors kept as separate exact doubles so the recurrence stays at
        // full double-double accuracy.
        let rf = i as f64;
        b = b
            .div_f64(rf)
            .div_f64(rf + nf + 1.0)
            .div_f64(nf + rf + 0.5)
            .neg();
    }
    b
}

/// B_r = (-1)^{1+nu+r} Gamma(-1/2-nu) / (r! (r+nu+1)! (3/2+nu)_r), evaluated by
/// recurrence so no large factorial is ever formed.
pub fn coefficient_b(r: u32, nu: u32) -> f64 {
    dd_coefficient_b(r, nu).to_f64()
}

/// Returns (sum, terms summed, largest magnitude seen among terms and
/// partials); the peak feeds the cancellation diagnostics upstream. The
/// argument is taken in double-double because the callers' mutual
/// cancellation is sensitive to the exact x they share.
pub(crate) fn dd_hyp0f2(a: f64, b: f64, x: Dd) -> Result<(Dd, u32, f64)> {
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Err(Error::invalid(format!(
            "0F2 lower parameter at a gamma pole: a = {a}, b = {b}"
        )));
    }
    let mut term = dd::ONE;
    let mut sum = dd::ONE;
    let mut peak = PartialPeak::new();
    peak.observe(1.0);
    let mut stop = Truncation::new();
    for r in 1..=TERM_CAP {
        let rf = r as f64;
        term = term
            .mul(x)
            .div_f64(a + rf - 1.0)
            .div_f64(b + rf - 1.0)
            .div_f64(rf);
        sum = sum.add(term);
        peak.observe(term.hi.abs());
        peak.observe_dd(sum);
        if stop.converged(term.hi.abs(), sum.hi.abs()) {
            return Ok((sum, r + 1, peak.max()));
        }
    }
    Err(Error::NonConvergence {
        context: "0F2 series",
        terms: TERM_CAP,
    })
}

/// 0F2(-; a, b; x) = sum_r x^r / ((a)_r (b)_r r!), returned with the number of
/// terms summed.
pub fn hyp0f2(a: f64, b: f64, x: f64) -> Result<(f64, u32)> {
    let (v, n, _) = dd_hyp0f2(a, b, Dd::from_f64(x))?;
    Ok((v.to_f64(), n))
}

// psi-series coefficients B_{2n}/(2n), n = 1..7; at x >= 10 the first omitted
// term is below 1e-16.
const PSI_TAIL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// The digamma function for real arguments away from the poles. Reflection
/// below 1/2, recurrence up to the Stirling range above.
pub fn digamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("digamma argument {x} is not finite")));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole { x });
    }
    if x < 0.5 {
        // psi(x) = psi(1 - x) - pi cot(pi x); cos(pi x) = sin(pi (x + 1/2)).
        let cot = sin_pi(x + 0.5) / sin_pi(x);
        return Ok(digamma(1.0 - x)? - std::f64::consts::PI * cot);
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < STIRLING_MIN {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    let mut tail = 0.0;
    for &c in PSI_TAIL.iter().rev() {
        tail = inv2 * (c + tail);
    }
    Ok(acc + y.ln() - 0.5 * inv - tail)
}

/// Relative residual of Gamma(mz) against
/// (2 pi)^{(1-m)/2} m^{mz - 1/2} prod_{j=0}^{m-1} Gamma(z + j/m).
/// Assembled in log space; m = 1 compares a value with itself and returns 0.
pub fn check_multiplication_formula(m: u32, z: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::invalid("multiplication formula needs m >= 1"));
    }
    let mf = m as f64;
    let (lhs_ln, lhs_sign) = ln_gamma_signed(mf * z)?;
    let mut rhs_ln = 0.5 * (1.0 - mf) * (2.0 * std::f64::consts::PI).ln()
        + (mf * z - 0.5) * mf.ln();
    let mut rhs_sign = 1.0;
    for j in 0..m {
        let (lg, sg) = ln_gamma_signed(z + j as f64 / mf)?;
        rhs_ln += lg;
        rhs_sign *= sg;
    }
    if m == 1 {
        return Ok(0.0);
    }
    let ratio = rhs_sign / lhs_sign * (rhs_ln - lhs_ln).exp();
    Ok((1.0 - ratio).abs())
}
