//! Contour-integral (Mellin-Barnes) machinery: pole enumeration and residue
//! summation for the G-functions the barrier integrals reduce to, plus the
//! generic representation of exp-exp integrals in that form.

use crate::dd::{self, Dd};
use crate::error::Error;
use crate::special;
use crate::sum::{Truncation, TERM_CAP};
use crate::Result;

const EPS: f64 = 1e-9;

/// Parameters of G^{q,0}_{p,q}(x | a; b): all poles of the integrand come from
/// the numerator product over b, the single optional a sits in the denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct GFunctionSpec {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl GFunctionSpec {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let spec = GFunctionSpec { a, b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b.is_empty() {
            return Err(Error::UnsupportedShape {
                what: "at least one lower parameter is required".into(),
            });
        }
        if self.a.len() >= self.b.len() {
            return Err(Error::UnsupportedShape {
                what: format!(
                    "need fewer upper than lower parameters, got {} upper and {} lower",
                    self.a.len(),
                    self.b.len()
                ),
            });
        }
        for &v in self.a.iter().chain(self.b.iter()) {
            if !v.is_finite() {
                return Err(Error::invalid(format!("non-finite parameter {v}")));
            }
        }
        Ok(())
    }
}

/// One pole of the integrand, with the lower-parameter indices whose gamma
/// factors are singular there. `order` is net of denominator zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleEntry {
    pub location: f64,
    pub order: u32,
    pub contributing: Vec<usize>,
}

fn near_nonneg_integer(v: f64) -> Option<f64> {
    let r = v.round();
    if r >= 0.0 && (v - r).abs() < EPS {
        Some(r)
    } else {
        None
    }
}

/// The `count` rightmost poles, strictly decreasing in location. Colliding
/// gamma poles merge into one entry of higher order; a denominator gamma
/// whose zero lands on the same point lowers the order, possibly to nothing.
pub fn enumerate_poles(spec: &GFunctionSpec, count: usize) -> Result<Vec<PoleEntry>> {
    spec.validate()?;
    if count == 0 {
        return Err(Error::invalid("pole count must be positive"));
    }
    let spread = spec
        .b
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let mut kmax = count + (spread.1 - spread.0).abs().ceil() as usize + 8;
    loop {
        let mut locs: Vec<f64> = Vec::with_capacity(spec.b.len() * kmax);
        for &bj in &spec.b {
            for k in 0..kmax {
                locs.push(-bj - k as f64);
            }
        }
        locs.sort_by(|x, y| y.total_cmp(x));
        locs.dedup_by(|x, y| (*x - *y).abs() < EPS);
        let mut out = Vec::with_capacity(count);
        for &l in &locs {
            let mut contributing = Vec::new();
            for (j, &bj) in spec.b.iter().enumerate() {
                if near_nonneg_integer(-(bj + l)).is_some() {
                    contributing.push(j);
                }
            }
            let zeros = spec
                .a
                .iter()
                .filter(|&&ak| near_nonneg_integer(-(ak + l)).is_some())
                .count();
            if contributing.len() > zeros {
                out.push(PoleEntry {
                    location: l,
                    order: (contributing.len() - zeros) as u32,
                    contributing,
                });
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        // The candidate window was too small (denominator zeros swallowed
        // part of it); widen and retry, up to a sanity bound.
        if kmax > 8 * (count + 16) + 4096 {
            return Err(Error::invalid(format!(
                "found only {} poles, {count} requested",
                out.len()
            )));
        }
        kmax *= 2;
    }
}

fn dd_gamma_any(arg: f64) -> Result<Dd> {
    let two = 2.0 * arg;
    if (two - two.round()).abs() < EPS {
        special::dd_gamma_half_grid(two.round() as i64)
    } else {
        Ok(Dd::from_f64(special::gamma(arg)?))
    }
}

fn dd_digamma_any(arg: f64) -> Result<Dd> {
    let two = 2.0 * arg;
    if (two - two.round()).abs() < EPS {
        special::dd_digamma_half_grid(two.round() as i64)
    } else {
        Ok(Dd::from_f64(special::digamma(arg)?))
    }
}

/// psi at a positive integer: -gamma + H_{n-1}.
fn dd_digamma_int(n: u32) -> Dd {
    special::dd_harmonic(n - 1).sub(dd::EULER)
}

/// Residue of the integrand at one pole, orders 1 and 2 (the only orders the
/// supported shapes can produce when their parameters come from the barrier
/// integrals).
fn residue_at(spec: &GFunctionSpec, pole: &PoleEntry, x: f64, ln_x: Dd) -> Result<Dd> {
    if pole.order > 2 {
        return Err(Error::UnsupportedShape {
            what: format!("pole of order {} at {}", pole.order, pole.location),
        });
    }
    let l = pole.location;
    let mut f = ln_x.mul_f64(-l).exp();
    let mut psi = dd::ZERO;
    let second = pole.order == 2;
    for (j, &bj) in spec.b.iter().enumerate() {
        if pole.contributing.contains(&j) {
            // lim (s - L) Gamma(b_j + s) = (-1)^kappa / kappa!
            let kappa = (-(bj + l)).round();
            let k = kappa as u32;
            for i in 2..=k.max(1) {
                f = f.div_f64(i as f64);
            }
            if k % 2 == 1 {
                f = f.neg();
            }
            if second {
                psi = psi.add(dd_digamma_int(k + 1));
            }
        } else {
            f = f.mul(dd_gamma_any(bj + l)?);
            if second {
                psi = psi.add(dd_digamma_any(bj + l)?);
            }
        }
    }
    for &ak in &spec.a {
        if let Some(lambda) = near_nonneg_integer(-(ak + l)) {
            // lim 1/((s - L) Gamma(a_k + s)) = (-1)^lambda lambda!
            let k = lambda as u32;
            for i in 2..=k.max(1) {
                f = f.mul_f64(i as f64);
            }
            if k % 2 == 1 {
                f = f.neg();
            }
            if second {
                psi = psi.sub(dd_digamma_int(k + 1));
            }
        } else {
            f = f.div(dd_gamma_any(ak + l)?);
            if second {
                psi = psi.sub(dd_digamma_any(ak + l)?);
            }
        }
    }
    if !f.is_finite() {
        return Err(Error::domain(format!(
            "residue overflow at pole {l}; argument {x} too large for this route"
        )));
    }
    Ok(if second { f.mul(psi.sub(ln_x)) } else { f })
}

/// G^{q,0}_{p,q}(x | a; b) for the shapes the integrals need: no upper
/// parameter with up to three lower ones, or one upper against exactly three
/// lower. Evaluated as the sum of left-half-plane residues.
pub fn g_residue_eval(spec: &GFunctionSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    let shape_ok = (spec.a.is_empty() && spec.b.len() <= 3)
        || (spec.a.len() == 1 && spec.b.len() == 3);
    if !shape_ok {
        return Err(Error::UnsupportedShape {
            what: format!(
                "residue evaluation covers 0 upper x 1..3 lower or 1 upper x 3 lower, got {} x {}",
                spec.a.len(),
                spec.b.len()
            ),
        });
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::invalid(format!("argument must be positive, got {x}")));
    }
    let ln_x = Dd::from_f64(x).ln();
    let poles = enumerate_poles(spec, TERM_CAP as usize)?;
    let mut sum = dd::ZERO;
    let mut stop = Truncation::new();
    for pole in &poles {
        let r = residue_at(spec, pole, x, ln_x)?;
        sum = sum.add(r);
        if stop.converged(r.hi.abs(), sum.hi.abs()) {
            return Ok(sum.to_f64());
        }
    }
    Err(Error::NonConvergence {
        context: "residue series",
        terms: TERM_CAP,
    })
}

/// A G-function statement of an exponential-product integral: the integral
/// equals `prefactor` times G^{m+n,0}_{0,m+n}(argument | b).
#[derive(Clone, Debug)]
pub struct Representation {
    pub spec: GFunctionSpec,
    pub prefactor: f64,
    pub argument: f64,
}

/// Casts the integral of t^{-n rho} exp(-p t) exp(-z t^{-1/m}) over (0, inf)
/// as a single G-function. The lower parameters split into the lattice
/// {j/m} from the algebraic-exponential factor and {(j - n rho)/n} from the
/// power times exp(-p t); both lattices come out of the gamma multiplication
/// formula applied to the integrand's Mellin transform.
pub fn represent_integral(m: u32, n: u32, p: f64, rho: f64, z: f64) -> Result<Representation> {
    if m < 1 || n < 1 {
        return Err(Error::invalid("both lattice orders must be at least 1"));
    }
    if !p.is_finite() || p <= 0.0 {
        return Err(Error::invalid(format!("decay rate p must be positive, got {p}")));
    }
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::invalid(format!("strength z must be positive, got {z}")));
    }
    if !rho.is_finite() {
        return Err(Error::invalid("rho must be finite"));
    }
    let mf = m as f64;
    let nf = n as f64;
    let mut b = Vec::with_capacity((m + n) as usize);
    for j in 0..m {
        b.push(j as f64 / mf);
    }
    for j in 1..=n {
        b.push((j as f64 - nf * rho) / nf);
    }
    let spec = GFunctionSpec { a: Vec::new(), b };
    let two_pi = 2.0 * std::f64::consts::PI;
    let prefactor = p.powf(nf * rho - 1.0)
        * two_pi.powf(0.5 * (2.0 - nf - mf))
        * mf.sqrt()
        * nf.powf(0.5 - nf * rho);
    let argument = z.powi(m as i32) * p.powi(n as i32) / (mf.powi(m as i32) * nf.powi(n as i32));
    Ok(Representation {
        spec,
        prefactor,
        argument,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use crate::series;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn pole_enumeration_merges_integer_spaced_parameters() {
        let spec = GFunctionSpec::new(vec![], vec![0.0, 1.0, 2.5]).unwrap();
        let poles = enumerate_poles(&spec, 6).unwrap();
        let want: [(f64, u32); 6] = [
            (0.0, 1),
            (-1.0, 2),
            (-2.0, 2),
            (-2.5, 1),
            (-3.0, 2),
            (-3.5, 1),
        ];
        assert_eq!(poles.len(), 6);
        for (p, (loc, ord)) in poles.iter().zip(want) {
            assert!((p.location - loc).abs() < 1e-12, "{:?}", p);
            assert_eq!(p.order, ord, "at {loc}");
        }
        for w in poles.windows(2) {
            assert!(w[1].location < w[0].location);
        }
    }

    #[test]
    fn pole_enumeration_denominator_zero_reduces_order() {
        // a = M+1 with b = (M, 0, 1/2) at M = 1: the double pole survives only
        // at -1; deeper integer poles are knocked back down to simple.
        let spec = GFunctionSpec::new(vec![2.0], vec![1.0, 0.0, 0.5]).unwrap();
        let poles = enumerate_poles(&spec, 7).unwrap();
        let by_loc = |l: f64| {
            poles
                .iter()
                .find(|p| (p.location - l).abs() < 1e-12)
                .unwrap_or_else(|| panic!("no pole at {l}"))
        };
        assert_eq!(by_loc(0.0).order, 1);
        assert_eq!(by_loc(-1.0).order, 2);
        assert_eq!(by_loc(-2.0).order, 1);
        assert_eq!(by_loc(-3.0).order, 1);
        assert_eq!(by_loc(-0.5).order, 1);
        assert_eq!(by_loc(-1.0).contributing, vec![0, 1]);
    }

    #[test]
    fn pole_enumeration_rejects_zero_count() {
        let spec = GFunctionSpec::new(vec![], vec![0.0]).unwrap();
        assert!(enumerate_poles(&spec, 0).is_err());
    }

    #[test]
    fn shape_validation() {
        assert!(GFunctionSpec::new(vec![], vec![]).is_err());
        assert!(GFunctionSpec::new(vec![1.0], vec![0.0]).is_err());
        assert!(GFunctionSpec::new(vec![1.0, 2.0], vec![0.0, 1.0]).is_err());
        assert!(GFunctionSpec::new(vec![f64::NAN], vec![0.0, 1.0, 2.0]).is_err());
        // 0 x 4 builds (representations can be wider) but does not evaluate.
        let wide = GFunctionSpec::new(vec![], vec![0.0, 0.25, 0.5, 0.75]).unwrap();
        assert!(matches!(
            g_residue_eval(&wide, 1.0),
            Err(Error::UnsupportedShape { .. })
        ));
    }

    #[test]
    fn single_gamma_case_is_plain_exponential() {
        let spec = GFunctionSpec::new(vec![], vec![0.0]).unwrap();
        for &x in &[0.1, 0.7, 3.0] {
            assert!(rel(g_residue_eval(&spec, x).unwrap(), (-x).exp()) < 1e-14);
        }
    }

    #[test]
    fn two_gamma_case_matches_bessel_value() {
        // G^{2,0}_{0,2}(x | 0, 1) = 2 sqrt(x) K_1(2 sqrt(x)); frozen at x = 2.
        let spec = GFunctionSpec::new(vec![], vec![0.0, 1.0]).unwrap();
        let v = g_residue_eval(&spec, 2.0).unwrap();
        assert!(rel(v, 0.13966747401529314286) < 1e-13, "{v}");
    }

    #[test]
    fn three_gamma_case_reproduces_uncut_integral() {
        for &(z, nu) in &[(1.0, 0u32), (2.0, 1), (5.0, 2), (8.0, 0)] {
            let spec =
                GFunctionSpec::new(vec![], vec![0.0, 0.5, 1.0 + nu as f64]).unwrap();
            let g = g_residue_eval(&spec, z * z / 4.0).unwrap();
            let v = g / std::f64::consts::PI.sqrt();
            let s = series::i1_series(z, nu).unwrap().value;
            assert!(rel(v, s) < 1e-12, "z = {z}, nu = {nu}: {v} vs {s}");
        }
    }

    #[test]
    fn denominator_shape_assembles_cutoff_integral() {
        // d^{nu+1} pi^{-1/2} sum_r [(-d)^r / r!] G^{3,0}_{1,3}(w | nu+r+2;
        // nu+r+1, 0, 1/2) against the direct series evaluation.
        let (z, d, nu) = (2.0_f64, 2.0_f64, 1u32);
        let w = z * z / (4.0 * d);
        let mut sum = 0.0;
        let mut coef = 1.0;
        for r in 0..40u32 {
            let m = (nu + r + 1) as f64;
            let spec = GFunctionSpec::new(vec![m + 1.0], vec![m, 0.0, 0.5]).unwrap();
            let g = g_residue_eval(&spec, w).unwrap();
            sum += coef * g;
            coef *= -d / (r as f64 + 1.0);
        }
        let v = d.powi(nu as i32 + 1) / std::f64::consts::PI.sqrt() * sum;
        let s = series::i2_series(z, d, nu).unwrap().value;
        assert!(rel(v, s) < 1e-11, "{v} vs {s}");
    }

    #[test]
    fn representation_recovers_uncut_integral() {
        // m = 2, n = 1, rho = 0, p = 1 is the nu = 0 uncut integral.
        for &z in &[1.0, 2.0, 4.0] {
            let rep = represent_integral(2, 1, 1.0, 0.0, z).unwrap();
            assert_eq!(rep.spec.b.len(), 3);
            assert!((rep.argument - z * z / 4.0).abs() < 1e-15);
            let v = rep.prefactor * g_residue_eval(&rep.spec, rep.argument).unwrap();
            let s = series::i1_series(z, 0).unwrap().value;
            assert!(rel(v, s) < 1e-12, "z = {z}: {v} vs {s}");
        }
        // rho = -1 shifts the power lattice to reproduce nu = 1.
        let rep = represent_integral(2, 1, 1.0, -1.0, 3.0).unwrap();
        let v = rep.prefactor * g_residue_eval(&rep.spec, rep.argument).unwrap();
        let s = series::i1_series(3.0, 1).unwrap().value;
        assert!(rel(v, s) < 1e-12, "{v} vs {s}");
    }

    #[test]
    fn representation_prefactor_convention_pinned_off_unit_decay() {
        // m = n = 1, p = 2, rho = 0: the result must match the directly
        // integrated exp(-2t - z/t), which pins the p-power in the prefactor.
        let z = 1.3;
        let rep = represent_integral(1, 1, 2.0, 0.0, z).unwrap();
        assert_eq!(rep.spec.b, vec![0.0, 1.0]);
        assert!((rep.argument - 2.0 * z).abs() < 1e-15);
        let v = rep.prefactor * g_residue_eval(&rep.spec, rep.argument).unwrap();
        let f = |t: f64| {
            if t <= 0.0 {
                0.0
            } else {
                (-2.0 * t - z / t).exp()
            }
        };
        let (direct, _, _) =
            quad::integrate_semi_infinite(&f, (z / 2.0).sqrt(), 1e-12).unwrap();
        assert!(rel(v, direct) < 1e-11, "{v} vs {direct}");
    }

    #[test]
    fn representation_lattice_matches_multiplication_formula() {
        // The power-factor block of lower parameters is the lattice the
        // gamma multiplication formula produces at argument (1 - n rho)/n + s.
        let (n, rho, s) = (3u32, 0.4_f64, 0.9_f64);
        let rep = represent_integral(2, n, 1.0, rho, 1.0).unwrap();
        let nf = n as f64;
        let z0 = (1.0 - nf * rho) / nf + s;
        let resid = special::check_multiplication_formula(n, z0).unwrap();
        assert!(resid < 1e-12, "residual {resid}");
        for j in 0..n {
            let expect = (1.0 + j as f64 - nf * rho) / nf;
            let got = rep.spec.b[2 + j as usize];
            assert!((got - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn representation_rejects_bad_inputs() {
        assert!(represent_integral(0, 1, 1.0, 0.0, 1.0).is_err());
        assert!(represent_integral(1, 0, 1.0, 0.0, 1.0).is_err());
        assert!(represent_integral(1, 1, 0.0, 0.0, 1.0).is_err());
        assert!(represent_integral(1, 1, 1.0, 0.0, 0.0).is_err());
        assert!(represent_integral(1, 1, 1.0, f64::NAN, 1.0).is_err());
    }
}
