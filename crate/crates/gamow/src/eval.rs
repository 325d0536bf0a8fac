//! Method selection and the top-level evaluation entry point.
//!
//! Three routes produce a value: the residue series (exact up to roundoff,
//! but it cancels catastrophically as z grows), the asymptotic forms (cheap,
//! accuracy improves as z grows), and adaptive quadrature (works everywhere,
//! costs the most). `choose_method` picks a route from the calibrated error
//! models alone; `evaluate` runs the choice and, in auto mode, falls back to
//! quadrature when a series result comes back untrusted.

use crate::asym;
use crate::config::Config;
use crate::error::Error;
use crate::params::{IntegralKind, IntegralParams};
use crate::quad;
use crate::series::{self, Trust};
use crate::Result;
use std::fmt;
use std::str::FromStr;

/// Tightest relative tolerance `evaluate` accepts; quadrature backs every
/// route, and it runs two decades below the request.
pub const MIN_TOL: f64 = 1e-12;
/// Loosest accepted tolerance.
pub const MAX_TOL: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Series,
    Asymptotic,
    Quadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Series => "series",
            Method::Asymptotic => "asymptotic",
            Method::Quadrature => "quadrature",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "series" => Ok(Method::Series),
            "asymptotic" => Ok(Method::Asymptotic),
            "quadrature" => Ok(Method::Quadrature),
            other => Err(Error::invalid(format!(
                "unknown method {other:?}, expected series, asymptotic, or quadrature"
            ))),
        }
    }
}

/// Outcome of static method selection.
#[derive(Clone, Debug)]
pub struct MethodChoice {
    pub method: Method,
    /// Why this method won, including why the preferred ones lost.
    pub reason: String,
    /// A-priori relative error bound for the chosen method.
    pub estimated_error: f64,
}

fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::invalid(format!(
            "tolerance {tol} outside [{MIN_TOL}, {MAX_TOL}]"
        )));
    }
    Ok(())
}

/// Picks the cheapest route whose predicted relative error stays within
/// `tol`. Preference order is series, asymptotic, quadrature; quadrature is
/// never refused.
pub fn choose_method(params: &IntegralParams, tol: f64, config: &Config) -> Result<MethodChoice> {
    params.validate()?;
    check_tol(tol)?;
    let cd_limit = config.get("series_cd_limit").unwrap_or(12.0);
    let mut notes: Vec<String> = Vec::new();

    match asym::predicted_cancellation(params, config) {
        Ok(cd) if cd < cd_limit => {
            let est = asym::series_error_from_cd(cd);
            if est <= tol {
                return Ok(MethodChoice {
                    method: Method::Series,
                    reason: format!(
                        "series: predicted cancellation {cd:.1} digits, within the \
                         {cd_limit:.0}-digit budget"
                    ),
                    estimated_error: est,
                });
            }
            notes.push(format!("series error estimate {est:.1e} above tolerance"));
        }
        Ok(cd) => notes.push(format!(
            "predicted series cancellation {cd:.1} digits exceeds the {cd_limit:.0}-digit budget"
        )),
        Err(why) => notes.push(why),
    }

    match asym::asym_error_model(params, config) {
        Some(est) if est <= tol => {
            let mut reason =
                format!("asymptotic: estimated relative error {est:.1e} within tolerance");
            if !notes.is_empty() {
                reason.push_str("; ");
                reason.push_str(&notes.join("; "));
            }
            return Ok(MethodChoice {
                method: Method::Asymptotic,
                reason,
                estimated_error: est,
            });
        }
        Some(est) => notes.push(format!("asymptotic error {est:.1e} exceeds tolerance")),
        None => notes.push("asymptotic form outside its validity window".to_string()),
    }

    Ok(MethodChoice {
        method: Method::Quadrature,
        reason: format!("quadrature: {}", notes.join("; ")),
        estimated_error: tol,
    })
}

/// A value with the method that produced it and how much to believe it.
#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: f64,
    pub method: Method,
    /// Relative error bound: a-posteriori for series and quadrature,
    /// model-based for the asymptotic forms.
    pub estimated_error: f64,
    pub trust: Trust,
    /// How the method was chosen, plus any fallback taken.
    pub reason: String,
}

fn run_series(params: &IntegralParams) -> Result<series::SeriesResult> {
    let nu = params.integer_nu()?;
    match params.kind {
        IntegralKind::I1 => series::i1_series(params.z, nu),
        IntegralKind::I2 => series::i2_series(params.z, params.d_value(), nu),
        IntegralKind::I3 => series::i3_series(params.z, params.t_value(), nu),
        IntegralKind::I4 => {
            series::i4_series(params.z, params.delta_value(), params.b_value(), nu)
        }
    }
}

fn run(
    params: &IntegralParams,
    method: Method,
    tol: f64,
    config: &Config,
    reason: String,
) -> Result<EvalResult> {
    match method {
        Method::Series => {
            let s = run_series(params)?;
            Ok(EvalResult {
                value: s.value,
                method,
                estimated_error: asym::series_error_from_cd(s.diagnostics.cancellation_digits),
                trust: s.trust,
                reason,
            })
        }
        Method::Asymptotic => {
            let value = asym::asym_eval(params)?;
            let est = asym::asym_error_model(params, config).unwrap_or(f64::INFINITY);
            let trust = if est <= tol {
                Trust::Reliable
            } else {
                Trust::Degraded
            };
            Ok(EvalResult {
                value,
                method,
                estimated_error: est,
                trust,
                reason,
            })
        }
        Method::Quadrature => {
            let safety = config.get("quadrature_safety").unwrap_or(100.0);
            let inner = (tol / safety).clamp(1e-14, 1e-4);
            let q = quad::oracle_eval(params, inner)?;
            let rel = if q.value != 0.0 {
                q.abs_error_estimate / q.value.abs()
            } else {
                q.abs_error_estimate
            };
            let trust = if rel <= tol {
                Trust::Reliable
            } else {
                Trust::Degraded
            };
            Ok(EvalResult {
                value: q.value,
                method,
                estimated_error: rel,
                trust,
                reason,
            })
        }
    }
}

/// Evaluates `params` to relative tolerance `tol`.
///
/// With `method` given, runs exactly that method and reports its trust as-is.
/// With `None`, dispatches via [`choose_method`]; a series choice that fails
/// numerically or comes back untrusted is rerun by quadrature, and the reason
/// records the fallback.
pub fn evaluate(
    params: &IntegralParams,
    method: Option<Method>,
    tol: f64,
    config: &Config,
) -> Result<EvalResult> {
    params.validate()?;
    check_tol(tol)?;
    let Some(choice) = method else {
        let choice = choose_method(params, tol, config)?;
        return match run(params, choice.method, tol, config, choice.reason.clone()) {
            Ok(r) if r.method == Method::Series && r.trust == Trust::Untrusted => {
                let reason = format!(
                    "{}; series result untrusted ({:.1} cancelled digits), fell back to quadrature",
                    choice.reason, r.estimated_error.log10() + 26.0
                );
                run(params, Method::Quadrature, tol, config, reason)
            }
            Err(e) if !e.is_usage() => {
                let reason = format!("{}; {e}, fell back to quadrature", choice.reason);
                run(params, Method::Quadrature, tol, config, reason)
            }
            other => other,
        };
    };
    run(params, choice, tol, config, format!("{choice} requested"))
}
