//! Large-argument approximations of the four integrals.
//!
//! Each closed form is the leading saddle-point or boundary term, so its
//! relative error shrinks algebraically as the barrier parameter grows:
//! like x^{-1/3} (x = z^2/4) for the peak-dominated integrals and like
//! w^{-1/2} (w = z^2/(4d)) for the cutoff-dominated one. The companion
//! error and cancellation models drive the method dispatcher in `eval`;
//! their constants are worst-case fits over the calibration grid.

use crate::config::Config;
use crate::error::Error;
use crate::meijer::GFunctionSpec;
use crate::params::{IntegralKind, IntegralParams};
use crate::Result;

fn check_common(z: f64, nu: f64) -> Result<()> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::invalid(format!(
            "asymptotic form needs z > 0, got {z}"
        )));
    }
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::invalid(format!("order must be >= 0, got {nu}")));
    }
    Ok(())
}

/// Peak approximation of the unbounded integral:
/// 2 sqrt(pi/3) x^{(2 nu + 1)/6} exp(-3 x^{1/3}).
///
/// Orders need not be integer here.
pub fn i1_asymptotic(z: f64, nu: f64) -> Result<f64> {
    check_common(z, nu)?;
    let x = z * z / 4.0;
    let x3 = x.cbrt();
    Ok(2.0 * (std::f64::consts::PI / 3.0).sqrt()
        * x.powf((2.0 * nu + 1.0) / 6.0)
        * (-3.0 * x3).exp())
}

/// Boundary approximation of the cut-off integral:
/// d^{nu+1} exp(-d) w^{-1/2} exp(-2 sqrt(w)), w = z^2/(4d).
///
/// Accurate only when the decay at the cutoff is barrier-dominated,
/// i.e. sqrt(w) well above d.
pub fn i2_asymptotic(z: f64, d: f64, nu: f64) -> Result<f64> {
    check_common(z, nu)?;
    if !d.is_finite() || d <= 0.0 {
        return Err(Error::invalid(format!("cutoff must be > 0, got {d}")));
    }
    let w = z * z / (4.0 * d);
    Ok(d.powf(nu + 1.0) * (-d).exp() / w.sqrt() * (-2.0 * w.sqrt()).exp())
}

/// Peak approximation of the shifted-barrier integral:
/// 2 sqrt(pi/3) e^t x^{1/6} exp(-3 x^{1/3}) (x^{1/3} - t)^nu.
///
/// Defined only while the peak location x^{1/3} stays right of the shift t.
pub fn i3_asymptotic(z: f64, t: f64, nu: f64) -> Result<f64> {
    check_common(z, nu)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("shift must be >= 0, got {t}")));
    }
    let x = z * z / 4.0;
    let x3 = x.cbrt();
    if x3 <= t {
        return Err(Error::domain(format!(
            "shifted peak approximation needs x^(1/3) > t, got {x3:.6} <= {t}"
        )));
    }
    Ok(2.0 * (std::f64::consts::PI / 3.0).sqrt()
        * t.exp()
        * x.powf(1.0 / 6.0)
        * (-3.0 * x3).exp()
        * (x3 - t).powf(nu))
}

/// Peak approximation of the depleted integral: the undepleted form times
/// the depletion factor evaluated at the peak, exp(-b x^{delta/3}).
pub fn i4_asymptotic(z: f64, delta: f64, b: f64, nu: f64) -> Result<f64> {
    check_common(z, nu)?;
    if !b.is_finite() || b < 0.0 {
        return Err(Error::invalid(format!(
            "depletion strength must be >= 0, got {b}"
        )));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::invalid(format!(
            "depletion exponent must be > 0, got {delta}"
        )));
    }
    let x = z * z / 4.0;
    Ok(i1_asymptotic(z, nu)? * (-b * x.powf(delta / 3.0)).exp())
}

/// Leading exponential-decay term of a bar-free G function of argument x:
/// (2 pi)^{(sigma-1)/2} sigma^{-1/2} exp(-sigma x^{1/sigma}) x^theta with
/// sigma = q - p and theta = ((1 - sigma)/2 + sum(b) - sum(a)) / sigma.
pub fn g_asymptotic(spec: &GFunctionSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::invalid(format!("argument must be > 0, got {x}")));
    }
    let p = spec.a.len() as f64;
    let q = spec.b.len() as f64;
    let sigma = q - p;
    let theta =
        ((1.0 - sigma) / 2.0 + spec.b.iter().sum::<f64>() - spec.a.iter().sum::<f64>()) / sigma;
    Ok((2.0 * std::f64::consts::PI).powf((sigma - 1.0) / 2.0) / sigma.sqrt()
        * (-sigma * x.powf(1.0 / sigma)).exp()
        * x.powf(theta))
}

/// Evaluates the asymptotic form matching `params.kind`.
pub fn asym_eval(params: &IntegralParams) -> Result<f64> {
    params.validate()?;
    match params.kind {
        IntegralKind::I1 => i1_asymptotic(params.z, params.nu),
        IntegralKind::I2 => i2_asymptotic(params.z, params.d_value(), params.nu),
        IntegralKind::I3 => i3_asymptotic(params.z, params.t_value(), params.nu),
        IntegralKind::I4 => {
            i4_asymptotic(params.z, params.delta_value(), params.b_value(), params.nu)
        }
    }
}

fn calibration_order(nu: f64) -> u32 {
    if nu < 0.0 {
        0
    } else {
        nu.round().min(2.0) as u32
    }
}

/// Relative-error bound of the matching `*_asymptotic` value, or None where
/// the form is outside its validity window. Calibrated coefficients come
/// from `config`; the structural factors encode how each expansion breaks
/// down (cutoff too close to the peak, shift too close to the peak, strong
/// depletion bending the peak).
pub fn asym_error_model(params: &IntegralParams, config: &Config) -> Option<f64> {
    let z = params.z;
    if z <= 0.0 {
        return None;
    }
    let x = z * z / 4.0;
    let x3 = x.cbrt();
    let nu = params.nu;
    let kind_key = params.kind.to_string();
    let c = config.calibration(&kind_key, calibration_order(nu), "asym_c");
    match params.kind {
        IntegralKind::I1 => Some(c / x3),
        IntegralKind::I2 => {
            let d = params.d_value();
            let w = z * z / (4.0 * d);
            // Boundary expansion assumes the barrier slope dominates the
            // plain exponential decay at the cutoff.
            if w.sqrt() < 3.0 * d {
                return None;
            }
            Some(c * (d + nu + 1.5) / w.sqrt())
        }
        IntegralKind::I3 => {
            let t = params.t_value();
            if x3 <= t + 2.0 {
                return None;
            }
            let squeeze = x3 / (x3 - t);
            Some(c / x3 * squeeze * squeeze)
        }
        IntegralKind::I4 => {
            let b = params.b_value();
            let delta = params.delta_value();
            // Ignoring the peak shift costs about s^2/(2 g'') with
            // s = b delta x^{(delta-1)/3} and g'' = (3/2) x^{-1/3}.
            let slope = b * delta * x.powf((delta - 1.0) / 3.0);
            let shift_err = slope * slope * x3 / 3.0;
            if shift_err > 0.5 {
                return None;
            }
            Some(c / x3 + shift_err)
        }
    }
}

/// Predicted cancellation digits of the series route, or the reason the
/// series route is unavailable. Linear models in the natural cancellation
/// scale of each series, fitted on the calibration grid.
pub fn predicted_cancellation(
    params: &IntegralParams,
    config: &Config,
) -> std::result::Result<f64, String> {
    let z = params.z;
    let x = z * z / 4.0;
    let rounded = params.nu.round();
    if (params.nu - rounded).abs() >= 1e-9 || !(0.0..=170.0).contains(&rounded) {
        return Err(format!(
            "series route needs an integer order in [0, 170], got {}",
            params.nu
        ));
    }
    let nu_int = rounded as u32;
    let kind_key = params.kind.to_string();
    let cal = |field: &str| config.calibration(&kind_key, nu_int, field);
    match params.kind {
        IntegralKind::I1 => Ok(cal("cd_a") + cal("cd_b") * x.cbrt()),
        IntegralKind::I2 => {
            let d = params.d_value();
            let w = z * z / (4.0 * d);
            Ok(cal("cd_a") + cal("cd_b") * (w.sqrt() + 0.25 * d))
        }
        IntegralKind::I3 => {
            let plain_a = config.calibration("i1", nu_int, "cd_a");
            let plain_b = config.calibration("i1", nu_int, "cd_b");
            let plain = plain_a + plain_b * x.cbrt();
            let t = params.t_value();
            if t == 0.0 {
                // Zero shift falls straight through to the plain series.
                return Ok(plain);
            }
            // Whichever loses more digits wins: the plain-series parts or
            // the cutoff-series parts evaluated at cutoff t.
            let w = z * z / (4.0 * t);
            Ok(plain.max(cal("cd_a") + cal("cd_b") * (1.5 * x.cbrt() + w.sqrt())))
        }
        IntegralKind::I4 => {
            let delta = params.delta_value();
            let b = params.b_value();
            if delta > 1.0 {
                return Err(format!(
                    "series route diverges for depletion exponent {delta} above 1"
                ));
            }
            let x_eff = if delta == 1.0 { x * (1.0 + b) } else { x };
            Ok(cal("cd_a") + cal("cd_b") * x_eff.cbrt() + 0.4343 * b)
        }
    }
}

/// Error floor reported for a dd-backed series result with the given
/// cancellation-digit count. The backing arithmetic carries about 31
/// digits; a few are reserved for truncation and rounding noise.
pub fn series_error_from_cd(cd: f64) -> f64 {
    10f64.powf(cd - 26.0).max(3e-13)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::IntegralParams;
    use crate::quad::oracle_eval;
    use crate::series::i1_series;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn i1_matches_general_form_through_its_spec() {
        for &(z, nu) in &[(5.0, 0.0), (12.0, 1.0), (40.0, 2.0), (7.0, 0.5)] {
            let x = z * z / 4.0;
            let spec = GFunctionSpec::new(vec![], vec![0.0, 0.5, 1.0 + nu]).unwrap();
            let general = g_asymptotic(&spec, x).unwrap() / std::f64::consts::PI.sqrt();
            let direct = i1_asymptotic(z, nu).unwrap();
            assert!(
                rel(general, direct) < 1e-13,
                "z={z} nu={nu}: {general:e} vs {direct:e}"
            );
        }
    }

    #[test]
    fn single_gamma_spec_is_exact() {
        // One parameter means the leading term is the whole function.
        let spec = GFunctionSpec::new(vec![], vec![1.25]).unwrap();
        for &x in &[0.5, 2.0, 7.0] {
            let got = g_asymptotic(&spec, x).unwrap();
            let want = x.powf(1.25) * (-x).exp();
            assert!(rel(got, want) < 1e-14);
        }
    }

    #[test]
    fn i1_error_decays_like_inverse_cbrt() {
        let mut scaled = Vec::new();
        for &z in &[20.0f64, 40.0, 80.0, 160.0] {
            let x3 = (z * z / 4.0).cbrt();
            let asym = i1_asymptotic(z, 0.0).unwrap();
            let exact = oracle_eval(&IntegralParams::i1(z, 0.0), 1e-12).unwrap();
            let err = rel(asym, exact.value);
            scaled.push(err * x3);
        }
        // err * x^{1/3} should be roughly flat near 0.14.
        for s in &scaled {
            assert!(
                (0.06..0.25).contains(s),
                "scaled errors not flat: {scaled:?}"
            );
        }
    }

    #[test]
    fn i1_error_against_series_small_z() {
        // Near z = 8 the series is still reliable, so it can play oracle.
        let z = 8.0;
        let s = i1_series(z, 1).unwrap();
        let a = i1_asymptotic(z, 1.0).unwrap();
        let err = rel(a, s.value);
        assert!(err < 0.6, "err {err}");
        assert!(err > 1e-3, "suspiciously good at small z: {err}");
    }

    #[test]
    fn i2_error_decays_like_inverse_sqrt_w() {
        let d = 5.0;
        let mut scaled = Vec::new();
        for &z in &[120.0, 240.0, 480.0] {
            let w = z * z / (4.0 * d);
            let asym = i2_asymptotic(z, d, 1.0).unwrap();
            let exact = oracle_eval(&IntegralParams::i2(z, d, 1.0), 1e-12).unwrap();
            scaled.push(rel(asym, exact.value) * w.sqrt());
        }
        for s in &scaled {
            assert!(
                (1.0..6.0).contains(s),
                "scaled cutoff errors not flat: {scaled:?}"
            );
        }
    }

    #[test]
    fn i3_reduces_to_i1_at_zero_shift() {
        for &(z, nu) in &[(10.0, 0.0), (25.0, 2.0)] {
            let a = i3_asymptotic(z, 0.0, nu).unwrap();
            let b = i1_asymptotic(z, nu).unwrap();
            assert!(rel(a, b) < 1e-15);
        }
    }

    #[test]
    fn i3_rejects_shift_past_peak() {
        // z = 2 puts the peak at x^{1/3} = 1.
        let err = i3_asymptotic(2.0, 1.5, 1.0).unwrap_err();
        assert!(err.is_usage());
        assert!(i3_asymptotic(2.0, 0.5, 1.0).is_ok());
    }

    #[test]
    fn i3_accuracy_at_moderate_shift() {
        let (z, t, nu) = (60.0, 1.0, 1.0);
        let asym = i3_asymptotic(z, t, nu).unwrap();
        let exact = oracle_eval(&IntegralParams::i3(z, t, nu), 1e-12).unwrap();
        let err = rel(asym, exact.value);
        assert!(err < 0.2, "err {err}");
    }

    #[test]
    fn i4_reduces_to_i1_at_zero_depletion() {
        let a = i4_asymptotic(30.0, 2.0, 0.0, 1.0).unwrap();
        let b = i1_asymptotic(30.0, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn i4_accuracy_with_weak_depletion() {
        let (z, delta, b, nu) = (40.0, 0.5, 0.1, 0.0);
        let asym = i4_asymptotic(z, delta, b, nu).unwrap();
        let exact = oracle_eval(&IntegralParams::i4(z, delta, b, nu), 1e-12).unwrap();
        let err = rel(asym, exact.value);
        assert!(err < 0.05, "err {err}");
    }

    #[test]
    fn error_models_bound_reality_on_a_grid() {
        let cfg = Config::default();
        let cases: Vec<IntegralParams> = vec![
            IntegralParams::i1(30.0, 0.0),
            IntegralParams::i1(60.0, 1.0),
            IntegralParams::i1(120.0, 2.0),
            IntegralParams::i2(150.0, 5.0, 1.0),
            IntegralParams::i2(300.0, 5.0, 0.0),
            IntegralParams::i3(60.0, 1.0, 1.0),
            IntegralParams::i3(120.0, 2.0, 0.0),
            IntegralParams::i4(60.0, 0.2, 0.5, 0.0),
            IntegralParams::i4(120.0, 0.1, 1.0, 1.0),
        ];
        for p in &cases {
            let est =
                asym_error_model(p, &cfg).unwrap_or_else(|| panic!("model refused {p:?}"));
            let asym = asym_eval(p).unwrap();
            let exact = oracle_eval(p, 1e-12).unwrap();
            let realized = rel(asym, exact.value);
            assert!(
                realized <= est,
                "{p:?}: realized {realized:e} above estimate {est:e}"
            );
            assert!(
                realized > est / 200.0,
                "{p:?}: estimate {est:e} wildly loose vs {realized:e}"
            );
        }
    }

    #[test]
    fn error_model_refuses_invalid_windows() {
        let cfg = Config::default();
        // Cutoff at the peak: boundary form invalid.
        assert!(asym_error_model(&IntegralParams::i2(10.0, 5.0, 0.0), &cfg).is_none());
        // Shift at the peak: shifted form invalid.
        assert!(asym_error_model(&IntegralParams::i3(8.0, 2.4, 0.0), &cfg).is_none());
        // Depletion strong enough to move the peak: depleted form invalid.
        assert!(asym_error_model(&IntegralParams::i4(20.0, 3.0, 2.0, 0.0), &cfg).is_none());
    }

    #[test]
    fn cancellation_prediction_tracks_measured_digits() {
        let cfg = Config::default();
        for &z in &[4.0, 10.0, 16.0, 22.0] {
            let p = IntegralParams::i1(z, 0.0);
            let pred = predicted_cancellation(&p, &cfg).unwrap();
            let measured = i1_series(z, 0).unwrap().diagnostics.cancellation_digits;
            assert!(
                (pred - measured).abs() < 1.5,
                "z={z}: predicted {pred:.2} vs measured {measured:.2}"
            );
        }
    }

    #[test]
    fn prediction_refuses_what_series_cannot_do() {
        let cfg = Config::default();
        assert!(predicted_cancellation(&IntegralParams::i1(2.0, 0.5), &cfg).is_err());
        assert!(
            predicted_cancellation(&IntegralParams::i4(2.0, 2.0, 0.1, 0.0), &cfg).is_err()
        );
        assert!(predicted_cancellation(&IntegralParams::i4(2.0, 1.0, 0.1, 0.0), &cfg).is_ok());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(i1_asymptotic(0.0, 0.0).is_err());
        assert!(i1_asymptotic(-1.0, 0.0).is_err());
        assert!(i1_asymptotic(2.0, -1.0).is_err());
        assert!(i2_asymptotic(2.0, 0.0, 0.0).is_err());
        assert!(i4_asymptotic(2.0, 0.0, 0.5, 0.0).is_err());
        assert!(i4_asymptotic(2.0, 1.0, -0.5, 0.0).is_err());
        let spec = GFunctionSpec::new(vec![], vec![0.0, 1.0]).unwrap();
        assert!(g_asymptotic(&spec, 0.0).is_err());
        assert!(g_asymptotic(&spec, -2.0).is_err());
    }
}
