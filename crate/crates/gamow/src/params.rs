//! Integral selection and parameter validation.

use crate::error::Error;
use crate::Result;
use std::fmt;

/// Which of the four barrier integrals to evaluate.
///
/// All four integrate y^nu e^{-y} against the tunneling factor e^{-z y^{-1/2}}:
/// `I1` over the whole positive axis, `I2` up to a cutoff d, `I3` with the
/// tunneling argument shifted by a screening offset t, and `I4` with an extra
/// high-energy depletion factor e^{-b y^delta}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntegralKind {
    I1,
    I2,
    I3,
    I4,
}

impl fmt::Display for IntegralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IntegralKind::I1 => "i1",
            IntegralKind::I2 => "i2",
            IntegralKind::I3 => "i3",
            IntegralKind::I4 => "i4",
        };
        f.write_str(s)
    }
}

/// A fully specified evaluation request. Fields not used by `kind` stay `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralParams {
    pub kind: IntegralKind,
    /// Dimensionless tunneling strength (twice the Sommerfeld parameter at kT).
    pub z: f64,
    /// Power of y in the integrand; any non-negative real for quadrature and
    /// the asymptotic formulas, integer for the series.
    pub nu: f64,
    /// Upper cutoff in kT units (I2).
    pub d: Option<f64>,
    /// Screening shift in kT units (I3).
    pub t: Option<f64>,
    /// Depletion amplitude (I4).
    pub b: Option<f64>,
    /// Depletion exponent (I4).
    pub delta: Option<f64>,
}

impl IntegralParams {
    pub fn i1(z: f64, nu: f64) -> Self {
        IntegralParams {
            kind: IntegralKind::I1,
            z,
            nu,
            d: None,
            t: None,
            b: None,
            delta: None,
        }
    }

    pub fn i2(z: f64, d: f64, nu: f64) -> Self {
        IntegralParams {
            kind: IntegralKind::I2,
            z,
            nu,
            d: Some(d),
            t: None,
            b: None,
            delta: None,
        }
    }

    pub fn i3(z: f64, t: f64, nu: f64) -> Self {
        IntegralParams {
            kind: IntegralKind::I3,
            z,
            nu,
            d: None,
            t: Some(t),
            b: None,
            delta: None,
        }
    }

    pub fn i4(z: f64, delta: f64, b: f64, nu: f64) -> Self {
        IntegralParams {
            kind: IntegralKind::I4,
            z,
            nu,
            d: None,
            t: None,
            b: Some(b),
            delta: Some(delta),
        }
    }

    /// The cutoff, screening, and depletion accessors panic-free helpers for
    /// code that has already validated `self`.
    pub(crate) fn d_value(&self) -> f64 {
        self.d.unwrap_or(f64::NAN)
    }

    pub(crate) fn t_value(&self) -> f64 {
        self.t.unwrap_or(f64::NAN)
    }

    pub(crate) fn b_value(&self) -> f64 {
        self.b.unwrap_or(f64::NAN)
    }

    pub(crate) fn delta_value(&self) -> f64 {
        self.delta.unwrap_or(f64::NAN)
    }

    /// Checks ranges and that exactly the fields the kind needs are present.
    /// Irrelevant fields must be absent.
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name: &str, v: f64| -> Result<()> {
            if !v.is_finite() || v < 0.0 {
                Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")))
            } else {
                Ok(())
            }
        };
        finite_nonneg("z", self.z)?;
        finite_nonneg("nu", self.nu)?;
        let reject_extra = |name: &str, v: Option<f64>| -> Result<()> {
            match v {
                None => Ok(()),
                Some(_) => Err(Error::invalid(format!(
                    "{name} does not apply to {}",
                    self.kind
                ))),
            }
        };
        match self.kind {
            IntegralKind::I1 => {
                reject_extra("d", self.d)?;
                reject_extra("t", self.t)?;
                reject_extra("b", self.b)?;
                reject_extra("delta", self.delta)?;
            }
            IntegralKind::I2 => {
                let d = self
                    .d
                    .ok_or_else(|| Error::invalid("i2 requires the cutoff d"))?;
                if !d.is_finite() || d <= 0.0 {
                    return Err(Error::invalid(format!("d must be finite and > 0, got {d}")));
                }
                reject_extra("t", self.t)?;
                reject_extra("b", self.b)?;
                reject_extra("delta", self.delta)?;
            }
            IntegralKind::I3 => {
                let t = self
                    .t
                    .ok_or_else(|| Error::invalid("i3 requires the screening shift t"))?;
                finite_nonneg("t", t)?;
                reject_extra("d", self.d)?;
                reject_extra("b", self.b)?;
                reject_extra("delta", self.delta)?;
            }
            IntegralKind::I4 => {
                let b = self
                    .b
                    .ok_or_else(|| Error::invalid("i4 requires the depletion amplitude b"))?;
                finite_nonneg("b", b)?;
                let delta = self
                    .delta
                    .ok_or_else(|| Error::invalid("i4 requires the depletion exponent delta"))?;
                if !delta.is_finite() || delta <= 0.0 {
                    return Err(Error::invalid(format!(
                        "delta must be finite and > 0, got {delta}"
                    )));
                }
                reject_extra("d", self.d)?;
                reject_extra("t", self.t)?;
            }
        }
        Ok(())
    }

    /// nu as an exact non-negative integer, or an error; the series evaluators
    /// are only defined for integer order.
    pub fn integer_nu(&self) -> Result<u32> {
        if self.nu >= 0.0 && self.nu.fract() == 0.0 && self.nu <= u32::MAX as f64 {
            Ok(self.nu as u32)
        } else {
            Err(Error::invalid(format!(
                "series evaluation requires integer nu, got {}",
                self.nu
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(IntegralParams::i1(1.0, 0.0).validate().is_ok());
        assert!(IntegralParams::i2(1.0, 5.0, 2.0).validate().is_ok());
        assert!(IntegralParams::i3(1.0, 0.0, 1.0).validate().is_ok());
        assert!(IntegralParams::i4(1.0, 2.0, 0.3, 1.0).validate().is_ok());
    }

    #[test]
    fn bad_ranges_rejected() {
        assert!(IntegralParams::i1(-1.0, 0.0).validate().is_err());
        assert!(IntegralParams::i1(1.0, -0.5).validate().is_err());
        assert!(IntegralParams::i2(1.0, 0.0, 0.0).validate().is_err());
        assert!(IntegralParams::i2(1.0, -3.0, 0.0).validate().is_err());
        assert!(IntegralParams::i4(1.0, 0.0, 0.5, 0.0).validate().is_err());
        assert!(IntegralParams::i4(1.0, f64::NAN, 0.5, 0.0).validate().is_err());
    }

    #[test]
    fn irrelevant_fields_rejected() {
        let mut p = IntegralParams::i1(1.0, 0.0);
        p.d = Some(2.0);
        assert!(p.validate().is_err());
        let mut p = IntegralParams::i3(1.0, 0.5, 0.0);
        p.b = Some(0.1);
        assert!(p.validate().is_err());
    }

    #[test]
    fn integer_nu_extraction() {
        assert_eq!(IntegralParams::i1(1.0, 3.0).integer_nu().unwrap(), 3);
        assert!(IntegralParams::i1(1.0, 2.5).integer_nu().is_err());
    }
}
