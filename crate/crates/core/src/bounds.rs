//! Exact dimensional constants and closed-form evaluators for the volume,
//! integrability, critical, volume–capacity, slice-capacity and
//! singularity-exponent bounds.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::domain::factorial;
use crate::error::{Error, Result};
use crate::quad::integrate_de;

/// `q · π^k` with `q` an exact rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactConstant {
    pub coefficient: BigRational,
    pub pi_power: u32,
}

impl ExactConstant {
    pub fn value(&self) -> f64 {
        self.coefficient.to_f64().expect("finite rational") * PI.powi(self.pi_power as i32)
    }
}

impl fmt::Display for ExactConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = &self.coefficient;
        let coef = if q.is_integer() { q.numer().to_string() } else { format!("{}/{}", q.numer(), q.denom()) };
        match self.pi_power {
            0 => write!(f, "{coef}"),
            1 => write!(f, "{coef}*pi"),
            k => write!(f, "{coef}*pi^{k}"),
        }
    }
}

impl Serialize for ExactConstant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::OutOfRange("dimension must be at least 1".into()));
    }
    Ok(())
}

fn big(x: u64) -> BigInt {
    BigInt::from(x)
}

/// `c_n = 2^{3n−1} π^n ∏_{k<n} (k·3^k + 1)`.
pub fn constant_c(n: usize) -> Result<ExactConstant> {
    check_n(n)?;
    let mut q = BigInt::one() << (3 * n - 1);
    for k in 0..n as u32 {
        q *= big(k as u64) * big(3).pow(k) + 1;
    }
    Ok(ExactConstant { coefficient: BigRational::from_integer(q), pi_power: n as u32 })
}

/// `c_n` from `c_1 = 4π` and `c_{k+1} = 8π (k·3^k + 1) c_k`.
pub fn constant_c_recurrence(n: usize) -> Result<ExactConstant> {
    check_n(n)?;
    let mut q = big(4);
    for k in 1..n as u32 {
        q *= big(8) * (big(k as u64) * big(3).pow(k) + 1);
    }
    Ok(ExactConstant { coefficient: BigRational::from_integer(q), pi_power: n as u32 })
}

/// `a_n = (n−1)! c_n / 2^{n−1}`.
pub fn constant_a(n: usize) -> Result<ExactConstant> {
    let c = constant_c(n)?;
    let fact: BigInt = (1..n as u64).map(big).product();
    let coefficient = c.coefficient * BigRational::new(fact, BigInt::one() << (n - 1));
    Ok(ExactConstant { coefficient, pi_power: c.pi_power })
}

/// Parameters shared by the bound evaluators.
#[derive(Clone, Debug, Serialize)]
pub struct BoundInput {
    pub n: usize,
    pub mu: f64,
    pub s: f64,
    pub diameter: f64,
}

impl BoundInput {
    pub fn new(n: usize, mu: f64, s: f64, diameter: f64) -> Result<Self> {
        check_n(n)?;
        if !(mu >= 0.0) || !(diameter > 0.0) {
            return Err(Error::OutOfRange("need μ ≥ 0 and a positive diameter".into()));
        }
        Ok(BoundInput { n, mu, s, diameter })
    }
}

/// A bound value with the boundary-case flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    /// Set when a limiting convention was used (zero mass, zero capacity).
    pub convention: bool,
}

impl BoundValue {
    fn plain(value: f64) -> Self {
        BoundValue { value, convention: false }
    }
}

/// `c_n (1 + s/μ)^{n−1} e^{−2ns/μ}`, times `δ^{2n}` when `use_diameter`.
pub fn volume_bound(input: &BoundInput, use_diameter: bool) -> Result<BoundValue> {
    let BoundInput { n, mu, s, diameter } = *input;
    if !(s > 0.0) {
        return Err(Error::OutOfRange("sublevel depth must be positive".into()));
    }
    if mu == 0.0 {
        return Ok(BoundValue { value: 0.0, convention: true });
    }
    let r = s / mu;
    let mut v = constant_c(n)?.value() * (1.0 + r).powi(n as i32 - 1) * (-2.0 * n as f64 * r).exp();
    if use_diameter {
        v *= diameter.powi(2 * n as i32);
    }
    Ok(BoundValue::plain(v))
}

/// `(π^n + a_n μ/(n−μ)^n) · δ^{2n} · e^{2M}` (diameter factor when `use_diameter`).
pub fn integrability_bound(input: &BoundInput, use_diameter: bool, boundary_m: f64) -> Result<BoundValue> {
    let BoundInput { n, mu, diameter, .. } = *input;
    let nf = n as f64;
    if mu >= nf {
        return Err(Error::OutOfRange(format!("integrability bound needs μ < n (μ = {mu}, n = {n})")));
    }
    if !(boundary_m >= 0.0) {
        return Err(Error::OutOfRange("boundary constant M must be nonnegative".into()));
    }
    let mut v = PI.powi(n as i32) + constant_a(n)?.value() * mu / (nf - mu).powi(n as i32);
    if use_diameter {
        v *= diameter.powi(2 * n as i32);
    }
    Ok(BoundValue { value: v * (2.0 * boundary_m).exp(), convention: mu == 0.0 })
}

/// `(1 + (2/λ)^λ e^{λ−2}) V + 2 c_n δ^{2n}/(λ − n)`.
pub fn critical_bound(n: usize, lambda: f64, domain_volume: f64, diameter: f64) -> Result<f64> {
    if !(lambda > n as f64) {
        return Err(Error::OutOfRange(format!("critical bound needs λ > n (λ = {lambda})")));
    }
    let first = 1.0 + ((2.0 / lambda).ln() * lambda + lambda - 2.0).exp();
    Ok(first * domain_volume + 2.0 * constant_c(n)?.value() * diameter.powi(2 * n as i32) / (lambda - n as f64))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InCheck {
    pub value: f64,
    pub error_estimate: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `I_n = ∫_0^∞ (1 + s/μ)^{n−1} e^{2s − 2ns/μ} ds` against `(n−1)!/2^n · μ/(n−μ)^n`.
pub fn i_n_check(n: usize, mu: f64) -> Result<InCheck> {
    check_n(n)?;
    let nf = n as f64;
    if !(mu > 0.0 && mu < nf) {
        return Err(Error::OutOfRange(format!("I_n needs 0 < μ < n (μ = {mu})")));
    }
    let f = |s: f64| (1.0 + s / mu).powi(n as i32 - 1) * (2.0 * s - 2.0 * nf * s / mu).exp();
    let (value, error_estimate) = integrate_de(f, 0.0, f64::INFINITY, 1e-13);
    let bound = factorial(n - 1) / 2f64.powi(n as i32) * mu / (nf - mu).powi(n as i32);
    Ok(InCheck { value, error_estimate, bound, holds: value <= bound * (1.0 + 1e-9) })
}

/// `c_n δ^{2n} (1 + cap^{−1/n})^{n−1} exp(−2n cap^{−1/n})`.
pub fn vol_cap_bound(n: usize, cap: f64, diameter: f64) -> Result<BoundValue> {
    check_n(n)?;
    if !(cap >= 0.0) {
        return Err(Error::OutOfRange("capacity must be nonnegative".into()));
    }
    if cap == 0.0 {
        return Ok(BoundValue { value: 0.0, convention: true });
    }
    let r = cap.powf(-1.0 / n as f64);
    let v = constant_c(n)?.value()
        * diameter.powi(2 * n as i32)
        * (1.0 + r).powi(n as i32 - 1)
        * (-2.0 * n as f64 * r).exp();
    Ok(BoundValue::plain(v))
}

/// `Γ(p) = ∫_0^∞ t^{p−1} e^{−t} dt` by double-exponential quadrature.
pub fn gamma(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::OutOfRange("Γ(p) needs p > 0".into()));
    }
    // substitute t = u^{1/p} on [0, 1] to remove the endpoint singularity
    let (head, _) = integrate_de(|u: f64| (-u.powf(1.0 / p)).exp() / p, 0.0, 1.0, 1e-15);
    let (tail, _) = integrate_de(|t: f64| t.powf(p - 1.0) * (-t).exp(), 1.0, f64::INFINITY, 1e-15);
    Ok(head + tail)
}

/// Which power of two multiplies the slice-capacity bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceExponent {
    /// `2^{−mp}`, the stated form.
    Stated,
    /// `2^{−2mp}`, the sharper form from the proof.
    ProofLine,
}

/// `(4π)^m δ^{2m} p^m 2^{−mp} Γ(p)^m cap^p` (or `2^{−2mp}`).
pub fn slice_cap_bound(m: usize, p: f64, cap: f64, diameter: f64, exponent: SliceExponent) -> Result<f64> {
    if m < 1 || !(p > 0.0) || !(cap >= 0.0) {
        return Err(Error::OutOfRange("slice bound needs m ≥ 1, p > 0 and cap ≥ 0".into()));
    }
    let (mf, mi) = (m as f64, m as i32);
    let two = match exponent {
        SliceExponent::Stated => 2f64.powf(-mf * p),
        SliceExponent::ProofLine => 2f64.powf(-2.0 * mf * p),
    };
    Ok((4.0 * PI).powi(mi) * diameter.powi(2 * mi) * p.powi(mi) * two * gamma(p)?.powi(mi) * cap.powf(p))
}

/// `[max(1/ν, n/μ_a), n/ν]` for the complex singularity exponent.
pub fn singularity_exponent_bounds(nu: f64, mu_a: f64, n: usize) -> Result<(f64, f64)> {
    check_n(n)?;
    let nf = n as f64;
    if !(nu >= 0.0 && mu_a >= 0.0) {
        return Err(Error::OutOfRange("Lelong number and mass must be nonnegative".into()));
    }
    if nu > mu_a * (1.0 + 1e-12) {
        return Err(Error::Inconsistent(format!("Lelong number {nu} exceeds μ_a = {mu_a}")));
    }
    if nu == 0.0 {
        return Ok((if mu_a > 0.0 { nf / mu_a } else { f64::INFINITY }, f64::INFINITY));
    }
    Ok(((1.0 / nu).max(nf / mu_a), nf / nu))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_their_recurrence() {
        for n in 1..=8 {
            assert_eq!(constant_c(n).unwrap(), constant_c_recurrence(n).unwrap());
        }
        assert_eq!(constant_c(1).unwrap().to_string(), "4*pi");
        assert_eq!(constant_c(2).unwrap().to_string(), "128*pi^2");
        assert_eq!(constant_c(3).unwrap().to_string(), "19456*pi^3");
        assert_eq!(constant_a(1).unwrap().to_string(), "4*pi");
        assert_eq!(constant_a(2).unwrap().to_string(), "64*pi^2");
        assert_eq!(constant_a(3).unwrap().to_string(), "9728*pi^3");
        assert!(constant_c(0).is_err());
    }

    #[test]
    fn volume_bound_examples() {
        let b = volume_bound(&BoundInput::new(1, 1.0, 1.0, 2.0).unwrap(), false).unwrap().value;
        assert_eq!(b, 4.0 * PI * (-2.0f64).exp());
        let d = volume_bound(&BoundInput::new(2, 2.0, 2.0, 8f64.sqrt()).unwrap(), true).unwrap().value;
        let want = 128.0 * PI * PI * 64.0 * 2.0 * (-4.0f64).exp();
        assert!((d - want).abs() < 1e-12 * want);
        assert!(volume_bound(&BoundInput::new(2, 0.0, 1.0, 2.0).unwrap(), false).unwrap().convention);
    }

    #[test]
    fn integrability_examples() {
        let v = integrability_bound(&BoundInput::new(1, 0.5, 1.0, 2.0).unwrap(), false, 0.0).unwrap().value;
        assert!((v - 5.0 * PI).abs() < 1e-12);
        let z = integrability_bound(&BoundInput::new(3, 0.0, 1.0, 2.0).unwrap(), false, 0.0).unwrap().value;
        assert_eq!(z, PI.powi(3));
        assert!(integrability_bound(&BoundInput::new(1, 1.0, 1.0, 2.0).unwrap(), false, 0.0).is_err());
    }

    #[test]
    fn critical_examples() {
        let v = critical_bound(1, 2.0, PI, 2.0).unwrap();
        assert!((v - 34.0 * PI).abs() < 1e-12);
        let big = critical_bound(1, 1e3, PI, 2.0).unwrap();
        assert!((big - PI).abs() < 0.01 * PI + 2.0 * 4.0 * PI * 4.0 / 999.0);
        assert!(critical_bound(2, 2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn i_n_values() {
        let one = i_n_check(1, 0.5).unwrap();
        assert!((one.value - 0.5).abs() < 1e-10 && one.holds);
        let two = i_n_check(2, 1.0).unwrap();
        assert!((two.value - 0.75).abs() < 1e-10, "{}", two.value);
        assert!(!two.holds);
        assert!(i_n_check(1, 1e-6).unwrap().value < 1e-5);
    }

    #[test]
    fn vol_cap_examples() {
        let v = vol_cap_bound(1, 1.0 / 2f64.ln(), 2.0).unwrap().value;
        assert!((v - 4.0 * PI).abs() < 1e-12);
        let (n, mu, s, d) = (2, 1.0f64, 3.0, 2.0);
        let a = vol_cap_bound(n, (mu / s).powi(2), d).unwrap().value;
        let b = volume_bound(&BoundInput::new(n, mu, s, d).unwrap(), true).unwrap().value;
        assert!((a - b).abs() <= 1e-14 * b);
    }

    #[test]
    fn gamma_and_slice_bound() {
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-6);
        let a = slice_cap_bound(1, 1.0, 0.7, 2.0, SliceExponent::Stated).unwrap();
        assert!((a - 2.0 * PI * 4.0 * 0.7).abs() < 1e-9);
        let b = slice_cap_bound(2, 1.0, 1.0, 2.0, SliceExponent::Stated).unwrap();
        assert!((b - 64.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn singularity_intervals() {
        let (lo, hi) = singularity_exponent_bounds(1.0, 2f64.sqrt(), 2).unwrap();
        assert!((lo - 2f64.sqrt()).abs() < 1e-15 && hi == 2.0);
        assert_eq!(singularity_exponent_bounds(0.5, 0.5, 1).unwrap(), (2.0, 2.0));
        assert!(matches!(singularity_exponent_bounds(2.0, 1.0, 1), Err(Error::Inconsistent(_))));
    }
}
