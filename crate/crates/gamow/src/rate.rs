//! Reaction-rate assembly from S-factor Taylor coefficients.
//!
//! The thermally averaged cross-section times velocity for a non-resonant
//! two-body reaction reduces, after substituting y = E/kT, to a short linear
//! combination of the barrier integrals at orders 0, 1, 2:
//!
//!   <sigma v> = sqrt(8 / (pi mu)) (kT)^{-1/2}
//!               [ S0 I(z,0) + S1 kT I(z,1) + (1/2) S2 (kT)^2 I(z,2) ]
//!
//! with S(E) = S0 + S1 E + (1/2) S2 E^2 and z twice the Sommerfeld parameter
//! evaluated at E = kT. Cutoff, screening, and depletion variants swap which
//! barrier integral appears. Everything internal is CGS; inputs use keV and
//! barn where those are conventional.

use crate::config::Config;
use crate::error::Error;
use crate::eval::{evaluate, Method};
use crate::params::IntegralParams;
use crate::quad;
use crate::series::Trust;
use crate::Result;

/// Elementary charge in esu. Exact: the 2019 SI fixes e = 1.602176634e-19 C
/// and the esu conversion factor is the defined speed of light over ten.
pub const ELEMENTARY_CHARGE_ESU: f64 = 4.803204712570263e-10;
/// Reduced Planck constant, erg s (exact in the 2019 SI).
pub const HBAR_ERG_S: f64 = 1.054571817e-27;
/// Boltzmann constant, erg/K (exact).
pub const BOLTZMANN_ERG_PER_K: f64 = 1.380649e-16;
/// Atomic mass unit, g (CODATA 2018).
pub const AMU_G: f64 = 1.66053906660e-24;
/// One keV in erg (exact).
pub const KEV_ERG: f64 = 1.602176634e-9;
/// One barn in cm^2 (exact).
pub const BARN_CM2: f64 = 1e-24;

/// A reaction channel: the charges and reduced mass fix the barrier, the
/// three Taylor coefficients fix the S-factor near zero energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReactionSpec {
    pub z1: u32,
    pub z2: u32,
    /// Reduced mass in atomic mass units.
    pub mu_amu: f64,
    /// S(0), keV barn.
    pub s0: f64,
    /// S'(0), barn.
    pub s1: f64,
    /// S''(0), barn per keV.
    pub s2: f64,
}

impl ReactionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.z1 == 0 || self.z2 == 0 {
            return Err(Error::invalid(
                "charge numbers must be at least 1; the barrier integrals assume a Coulomb barrier",
            ));
        }
        if !self.mu_amu.is_finite() || self.mu_amu <= 0.0 {
            return Err(Error::invalid(format!(
                "reduced mass must be positive, got {}",
                self.mu_amu
            )));
        }
        for (name, v) in [("s0", self.s0), ("s1", self.s1), ("s2", self.s2)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.s0 < 0.0 {
            return Err(Error::invalid(format!(
                "S(0) must be non-negative, got {}",
                self.s0
            )));
        }
        Ok(())
    }
}

/// Physical variations of the plain rate integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateModifier {
    /// The full thermal population.
    None,
    /// Drop collisions above this center-of-mass energy (keV).
    CutoffKev(f64),
    /// Electron screening with this Debye length (cm); shifts the barrier
    /// argument by t = Z1 Z2 e^2 / (L kT).
    ScreeningLengthCm(f64),
    /// Deplete the high-energy tail by exp(-b (E/kT)^delta).
    Depletion { b: f64, delta: f64 },
}

impl RateModifier {
    fn validate(&self) -> Result<()> {
        match *self {
            RateModifier::None => Ok(()),
            RateModifier::CutoffKev(e) if e.is_finite() && e > 0.0 => Ok(()),
            RateModifier::CutoffKev(e) => Err(Error::invalid(format!(
                "cutoff energy must be positive keV, got {e}"
            ))),
            RateModifier::ScreeningLengthCm(l) if l.is_finite() && l > 0.0 => Ok(()),
            RateModifier::ScreeningLengthCm(l) => Err(Error::invalid(format!(
                "screening length must be positive cm, got {l}"
            ))),
            RateModifier::Depletion { b, delta }
                if b.is_finite() && b >= 0.0 && delta.is_finite() && delta > 0.0 =>
            {
                Ok(())
            }
            RateModifier::Depletion { b, delta } => Err(Error::invalid(format!(
                "depletion needs b >= 0 and delta > 0, got b = {b}, delta = {delta}"
            ))),
        }
    }
}

fn check_temperature(t_k: f64) -> Result<()> {
    if !t_k.is_finite() || t_k <= 0.0 {
        return Err(Error::invalid(format!(
            "temperature must be positive kelvin, got {t_k}"
        )));
    }
    Ok(())
}

/// Twice the Sommerfeld parameter at E = kT:
/// z = 2 pi Z1 Z2 e^2 / hbar * sqrt(mu / (2 kT)).
pub fn sommerfeld_z(z1: u32, z2: u32, mu_amu: f64, temperature_k: f64) -> Result<f64> {
    if z1 == 0 || z2 == 0 {
        return Err(Error::invalid("charge numbers must be at least 1"));
    }
    if !mu_amu.is_finite() || mu_amu <= 0.0 {
        return Err(Error::invalid(format!(
            "reduced mass must be positive, got {mu_amu}"
        )));
    }
    check_temperature(temperature_k)?;
    let e2 = ELEMENTARY_CHARGE_ESU * ELEMENTARY_CHARGE_ESU;
    let kt = BOLTZMANN_ERG_PER_K * temperature_k;
    let mu = mu_amu * AMU_G;
    Ok(2.0 * std::f64::consts::PI * (z1 as f64) * (z2 as f64) * e2 / HBAR_ERG_S
        * (mu / (2.0 * kt)).sqrt())
}

/// Barrier shift t = Z1 Z2 e^2 / (L kT) produced by screening at Debye
/// length L.
pub fn screening_shift(z1: u32, z2: u32, length_cm: f64, temperature_k: f64) -> Result<f64> {
    if z1 == 0 || z2 == 0 {
        return Err(Error::invalid("charge numbers must be at least 1"));
    }
    if !length_cm.is_finite() || length_cm <= 0.0 {
        return Err(Error::invalid(format!(
            "screening length must be positive cm, got {length_cm}"
        )));
    }
    check_temperature(temperature_k)?;
    let e2 = ELEMENTARY_CHARGE_ESU * ELEMENTARY_CHARGE_ESU;
    Ok((z1 as f64) * (z2 as f64) * e2 / (length_cm * BOLTZMANN_ERG_PER_K * temperature_k))
}

/// Most probable reaction energy kT (z/2)^{2/3}, in keV.
pub fn gamow_peak_kev(z: f64, temperature_k: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::invalid(format!("z must be positive, got {z}")));
    }
    check_temperature(temperature_k)?;
    let kt = BOLTZMANN_ERG_PER_K * temperature_k;
    Ok(kt * (z / 2.0).powf(2.0 / 3.0) / KEV_ERG)
}

/// An assembled rate with everything needed to audit it.
#[derive(Clone, Debug)]
pub struct RateResult {
    /// <sigma v> in cm^3/s.
    pub rate_cm3_per_s: f64,
    /// Barrier strength the integrals were evaluated at.
    pub z: f64,
    pub kt_kev: f64,
    pub gamow_peak_kev: f64,
    /// Cutoff in kT units, when a cutoff modifier was active.
    pub cutoff_d: Option<f64>,
    /// Screening shift in kT units, when screening was active.
    pub shift_t: Option<f64>,
    /// Method used for each of the three integral orders.
    pub methods: [Method; 3],
    /// Worst trust across the three orders.
    pub trust: Trust,
}

fn trust_rank(t: Trust) -> u8 {
    match t {
        Trust::Reliable => 0,
        Trust::Degraded => 1,
        Trust::Untrusted => 2,
    }
}

/// Evaluates <sigma v> for `spec` at `temperature_k`, dispatching each of the
/// three integral orders independently through the automatic method choice.
pub fn assemble_rate(
    spec: &ReactionSpec,
    temperature_k: f64,
    modifier: &RateModifier,
    tol: f64,
    config: &Config,
) -> Result<RateResult> {
    spec.validate()?;
    modifier.validate()?;
    check_temperature(temperature_k)?;
    let z = sommerfeld_z(spec.z1, spec.z2, spec.mu_amu, temperature_k)?;
    let kt = BOLTZMANN_ERG_PER_K * temperature_k;

    let (cutoff_d, shift_t) = match *modifier {
        RateModifier::CutoffKev(e_kev) => (Some(e_kev * KEV_ERG / kt), None),
        RateModifier::ScreeningLengthCm(l) => (
            None,
            Some(screening_shift(spec.z1, spec.z2, l, temperature_k)?),
        ),
        _ => (None, None),
    };

    let build = |nu: f64| -> IntegralParams {
        match *modifier {
            RateModifier::None => IntegralParams::i1(z, nu),
            RateModifier::CutoffKev(_) => IntegralParams::i2(z, cutoff_d.unwrap(), nu),
            RateModifier::ScreeningLengthCm(_) => IntegralParams::i3(z, shift_t.unwrap(), nu),
            RateModifier::Depletion { b, delta } => IntegralParams::i4(z, delta, b, nu),
        }
    };

    // S-factor pieces in erg cm^2, paired with the kT power each carries.
    let weights = [
        spec.s0 * KEV_ERG * BARN_CM2,
        spec.s1 * BARN_CM2 * kt,
        0.5 * spec.s2 * (BARN_CM2 / KEV_ERG) * kt * kt,
    ];

    let mut bracket = 0.0;
    let mut methods = [Method::Series; 3];
    let mut trust = Trust::Reliable;
    for (nu, w) in weights.iter().enumerate() {
        let p = build(nu as f64);
        let r = evaluate(&p, None, tol, config)?;
        methods[nu] = r.method;
        if trust_rank(r.trust) > trust_rank(trust) {
            trust = r.trust;
        }
        bracket += w * r.value;
    }

    let mu = spec.mu_amu * AMU_G;
    let rate = (8.0 / (std::f64::consts::PI * mu)).sqrt() / kt.sqrt() * bracket;
    Ok(RateResult {
        rate_cm3_per_s: rate,
        z,
        kt_kev: kt / KEV_ERG,
        gamow_peak_kev: gamow_peak_kev(z, temperature_k)?,
        cutoff_d,
        shift_t,
        methods,
        trust,
    })
}

/// Independent check of [`assemble_rate`]: integrates the S-factor-weighted
/// thermal integrand directly by adaptive quadrature, never touching the
/// series, the asymptotic forms, or the order-by-order split.
pub fn rate_oracle(
    spec: &ReactionSpec,
    temperature_k: f64,
    modifier: &RateModifier,
    tol: f64,
) -> Result<f64> {
    spec.validate()?;
    modifier.validate()?;
    check_temperature(temperature_k)?;
    if !(1e-14..=1e-4).contains(&tol) {
        return Err(Error::invalid(format!(
            "tolerance {tol} outside [1e-14, 1e-4]"
        )));
    }
    let z = sommerfeld_z(spec.z1, spec.z2, spec.mu_amu, temperature_k)?;
    let kt = BOLTZMANN_ERG_PER_K * temperature_k;
    let (s0e, s1e, s2e) = (
        spec.s0 * KEV_ERG * BARN_CM2,
        spec.s1 * BARN_CM2,
        spec.s2 * BARN_CM2 / KEV_ERG,
    );
    let s_of_e = move |e_erg: f64| s0e + s1e * e_erg + 0.5 * s2e * e_erg * e_erg;

    let shift = match *modifier {
        RateModifier::ScreeningLengthCm(l) => {
            screening_shift(spec.z1, spec.z2, l, temperature_k)?
        }
        _ => 0.0,
    };
    let (dep_b, dep_delta) = match *modifier {
        RateModifier::Depletion { b, delta } => (b, delta),
        _ => (0.0, 1.0),
    };
    let f = move |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let mut arg = -y - z / (y + shift).sqrt();
        if dep_b > 0.0 {
            arg -= dep_b * y.powf(dep_delta);
        }
        s_of_e(kt * y) * arg.exp()
    };

    // Reuse the split-point logic of the plain integrals; the S-factor
    // polynomial moves the peak too little to matter for subdivision.
    let (integral, _err, _n) = match *modifier {
        RateModifier::CutoffKev(e_kev) => {
            let d = e_kev * KEV_ERG / kt;
            let peak = quad::interior_peak(&IntegralParams::i2(z, d, 0.0));
            let segments: Vec<(f64, f64)> = if peak > 0.0 && peak < d {
                vec![(0.0, 0.5 * peak), (0.5 * peak, peak), (peak, d)]
            } else {
                vec![(0.0, 0.5 * d), (0.5 * d, d)]
            };
            quad::adaptive(&f, &segments, tol)?
        }
        RateModifier::ScreeningLengthCm(_) => {
            let peak = quad::interior_peak(&IntegralParams::i3(z, shift, 0.0));
            quad::integrate_semi_infinite(&f, peak, tol)?
        }
        RateModifier::Depletion { b, delta } => {
            let peak = quad::interior_peak(&IntegralParams::i4(z, delta, b, 0.0));
            quad::integrate_semi_infinite(&f, peak, tol)?
        }
        RateModifier::None => {
            quad::integrate_semi_infinite(&f, quad::gamow_peak(z), tol)?
        }
    };

    let mu = spec.mu_amu * AMU_G;
    Ok((8.0 / (std::f64::consts::PI * mu)).sqrt() / kt.sqrt() * integral)
}
