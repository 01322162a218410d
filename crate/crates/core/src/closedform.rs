//! Closed forms for the normalized approximations `λ̃_norm`, `η̃_norm`, the
//! enclosure factors and the error constants `ĉ_k`, `č_k`.
//!
//! With `x = B^{k+ξα}` and `θ = α ln B`,
//! `λ̃_norm⟨ξ⟩ = ∫_0^ξ e^{−ϱθ} m̃^k(ξ−ϱ) dϱ`. The `η` variant is the same
//! function with `θ` replaced by `θ_η = α ln B − ln(1+α)`.

use crate::error::{Error, Result};
use crate::hills::hill;
use crate::primes::ErrorBoundMode;
use crate::quad::{integrate, Tolerance};
use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Estimation method of an enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lambda,
    Nu,
    Eta,
    Kappa,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lambda, Method::Nu, Method::Eta, Method::Kappa];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lambda => "lambda",
            Method::Nu => "nu",
            Method::Eta => "eta",
            Method::Kappa => "kappa",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Shape parameters `(B, α, k)` of the normalized closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub b: f64,
    pub alpha: f64,
    pub k: u32,
}

impl ShapeParams {
    pub fn new(b: f64, alpha: f64, k: u32) -> Result<Self> {
        if !(b > 1.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!("B = {b} must exceed 1")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!("α = {alpha} must be positive")));
        }
        let sp = ShapeParams { b, alpha, k };
        if !(sp.theta_eta() > 0.0) {
            return Err(Error::InvalidParams(format!(
                "α ln B = {} does not exceed ln(1+α)",
                sp.theta()
            )));
        }
        Ok(sp)
    }

    pub fn from_grain(p: &crate::exact::GrainParams) -> Result<Self> {
        Self::new(p.b as f64, p.alpha(), p.k)
    }

    /// `θ = α ln B`.
    pub fn theta(&self) -> f64 {
        self.alpha * self.b.ln()
    }

    /// `θ_η = α ln B − ln(1+α)`.
    pub fn theta_eta(&self) -> f64 {
        self.theta() - self.alpha.ln_1p()
    }

    pub fn ln_b(&self) -> f64 {
        self.b.ln()
    }

    /// `x = B^{k+ξα}`.
    pub fn x_of_xi(&self, xi: f64) -> f64 {
        ((self.k as f64 + xi * self.alpha) * self.ln_b()).exp()
    }

    /// Inverse of [`x_of_xi`](Self::x_of_xi).
    pub fn xi_of_x(&self, x: f64) -> f64 {
        (x.ln() / self.ln_b() - self.k as f64) / self.alpha
    }

    /// `α^k B^{k+ξα}`.
    pub fn lambda_scale(&self, xi: f64) -> f64 {
        self.alpha.powi(self.k as i32) * self.x_of_xi(xi)
    }

    /// `α^k B^{k+ξα} (1+α)^{−ξ}`.
    pub fn eta_scale(&self, xi: f64) -> f64 {
        self.lambda_scale(xi) * (-xi * self.alpha.ln_1p()).exp()
    }
}

/// `cutexp_k(ζ) = Σ_{ℓ≥k} ζ^ℓ/ℓ!`.
pub fn cutexp(k: u32, zeta: f64) -> f64 {
    let kf = k as f64;
    if zeta.abs() < kf {
        // first term ζ^k/k!, then ratio ζ/(ℓ+1)
        let mut term = 1.0;
        for l in 1..=k {
            term *= zeta / l as f64;
        }
        let mut sum = term;
        let mut l = kf;
        loop {
            l += 1.0;
            term *= zeta / l;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() || term == 0.0 {
                break;
            }
        }
        sum
    } else {
        let mut prefix = 0.0;
        let mut term = 1.0;
        for l in 0..k {
            if l > 0 {
                term *= zeta / l as f64;
            }
            prefix += term;
        }
        zeta.exp() - prefix
    }
}

fn binom(n: u32, r: u32) -> f64 {
    let mut b = 1.0;
    for i in 0..r {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `((1 − e^{−θ})/θ)^k`, the value at `ξ = k`.
pub fn lambda_norm_at_k(k: u32, theta: f64) -> f64 {
    (-(-theta).exp_m1() / theta).powi(k as i32)
}

// Σ_{i≤⌊ξ⌋} C(k,i)(−1)^i cutexp_k(−(ξ−i)θ)/(−θ)^k, with its absolute term sum
fn forward_sum(k: u32, theta: f64, xi: f64) -> (f64, f64) {
    let denom = (-theta).powi(k as i32);
    let mut s = 0.0;
    let mut a = 0.0;
    for i in 0..=(xi.floor() as u32).min(k) {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let t = sign * binom(k, i) * cutexp(k, -(xi - i as f64) * theta) / denom;
        s += t;
        a += t.abs();
    }
    (s, a)
}

/// `λ̃_norm⟨ξ⟩` for `k` and `θ`, by the `cutexp` sum.
///
/// On `]0, k[` the direct sum and the form reflected through `ξ ↦ k − ξ`
/// (using the symmetry of `m̃^k`) are both available; the one with the
/// smaller cancellation is returned.
pub fn lambda_norm_theta(k: u32, theta: f64, xi: f64) -> f64 {
    if !(xi >= 0.0) {
        return 0.0;
    }
    if k == 0 {
        return (-xi * theta).exp();
    }
    let kf = k as f64;
    if xi >= kf {
        return (-(xi - kf) * theta).exp() * lambda_norm_at_k(k, theta);
    }
    let (fwd, fwd_abs) = forward_sum(k, theta, xi);
    let eta = kf - xi;
    let (back, back_abs) = forward_sum(k, -theta, eta);
    let lead = (eta * theta).exp() * lambda_norm_at_k(k, theta);
    let refl = lead - back;
    let refl_abs = lead + back_abs;
    let fwd_cond = fwd_abs / fwd.abs().max(f64::MIN_POSITIVE);
    let refl_cond = refl_abs / refl.abs().max(f64::MIN_POSITIVE);
    if fwd_cond <= refl_cond {
        fwd
    } else {
        refl
    }
}

/// `λ̃_norm⟨ξ⟩`.
pub fn lambda_norm(sp: &ShapeParams, xi: f64) -> f64 {
    lambda_norm_theta(sp.k, sp.theta(), xi)
}

/// `η̃_norm⟨ξ⟩`.
pub fn eta_norm(sp: &ShapeParams, xi: f64) -> f64 {
    lambda_norm_theta(sp.k, sp.theta_eta(), xi)
}

/// Unnormalized `λ̃^k(x)` at `x = B^{k+ξα}`.
pub fn lambda_tilde(sp: &ShapeParams, xi: f64) -> f64 {
    sp.lambda_scale(xi) * lambda_norm(sp, xi)
}

/// Unnormalized `η̃^k(x)` at `x = B^{k+ξα}`.
pub fn eta_tilde(sp: &ShapeParams, xi: f64) -> f64 {
    sp.eta_scale(xi) * eta_norm(sp, xi)
}

/// `λ̃_norm⟨ξ⟩` by quadrature of `∫_0^ξ e^{−ϱθ} m̃^k(ξ−ϱ) dϱ`.
pub fn lambda_norm_integral(k: u32, theta: f64, xi: f64, rel_tol: f64) -> f64 {
    if !(xi >= 0.0) {
        return 0.0;
    }
    if k == 0 {
        return (-xi * theta).exp();
    }
    let h = hill(k);
    let cuts: Vec<f64> = (0..=k).map(|i| xi - i as f64).collect();
    let tol = Tolerance {
        rel: rel_tol,
        abs: 0.0,
        max_depth: 60,
    };
    integrate(
        |r: f64| (-r * theta).exp() * h.eval(xi - r),
        0.0,
        xi.min(xi),
        &cuts,
        tol,
    )
    .value
}

const BF_PREC: usize = 384;
const RM: RoundingMode = RoundingMode::ToEven;

fn bf_from_rational(r: &BigRational, cc: &mut Consts) -> BigFloat {
    let to_bf = |v: &BigInt, cc: &mut Consts| match v.to_i64() {
        Some(i) => BigFloat::from_i64(i, BF_PREC),
        None => BigFloat::parse(&v.to_string(), astro_float::Radix::Dec, BF_PREC, RM, cc),
    };
    let n = to_bf(r.numer(), cc);
    let d = to_bf(r.denom(), cc);
    n.div(&d, BF_PREC, RM)
}

fn bf_to_f64(v: &BigFloat) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, e, _)) = v.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap() as f64;
    let next = if words.len() > 1 {
        words[words.len() - 2] as f64
    } else {
        0.0
    };
    // value = 0.m · 2^e with the mantissa's top word holding the leading bits
    let m = top / 2f64.powi(64) + next / 2f64.powi(128);
    let mag = m * 2f64.powi(e);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// `λ̃_norm⟨ξ⟩` by the derivative-sum form
/// `Σ_{ℓ<k} (−1)^ℓ D^ℓ m̃^k(ξ)/θ^{ℓ+1} + (−1)^k θ^{−k} Σ_{i≤⌊ξ⌋} (−1)^i C(k,i) e^{−(ξ−i)θ}`.
///
/// The hill derivatives are exact rationals; the sum is formed in
/// 384-bit floating point, so the heavy cancellation for small `θ` or small
/// `ξ` does not reach the result.
pub fn lambda_norm_derivative_sum(k: u32, theta: f64, xi: f64) -> f64 {
    if !(xi >= 0.0) {
        return 0.0;
    }
    if k == 0 {
        return (-xi * theta).exp();
    }
    let mut cc = match Consts::new() {
        Ok(c) => c,
        Err(_) => return f64::NAN,
    };
    let xi_q = BigRational::from_float(xi).expect("finite ξ");
    let th = BigFloat::from_f64(theta, BF_PREC);
    let xi_b = BigFloat::from_f64(xi, BF_PREC);
    let mut d = (*hill(k)).clone();
    let mut sum = BigFloat::from_i64(0, BF_PREC);
    let mut th_pow = th.clone();
    for ell in 0..k {
        let v = bf_from_rational(&d.eval_exact(&xi_q), &mut cc);
        let mut t = v.div(&th_pow, BF_PREC, RM);
        if ell % 2 == 1 {
            t = t.neg();
        }
        sum = sum.add(&t, BF_PREC, RM);
        th_pow = th_pow.mul(&th, BF_PREC, RM);
        d = d.derivative();
    }
    // th_pow now holds θ^{k+1}; rebuild θ^k
    let th_k = th.powi(k as usize, BF_PREC, RM);
    let top = (xi.floor() as u32).min(k);
    let mut jumps = BigFloat::from_i64(0, BF_PREC);
    for i in 0..=top {
        let arg = xi_b
            .sub(&BigFloat::from_u32(i, BF_PREC), BF_PREC, RM)
            .mul(&th, BF_PREC, RM)
            .neg();
        let e = arg.exp(BF_PREC, RM, &mut cc);
        let c = BigFloat::from_f64(binom(k, i), BF_PREC);
        let mut t = e.mul(&c, BF_PREC, RM);
        if i % 2 == 1 {
            t = t.neg();
        }
        jumps = jumps.add(&t, BF_PREC, RM);
    }
    let mut tail = jumps.div(&th_k, BF_PREC, RM);
    if k % 2 == 1 {
        tail = tail.neg();
    }
    bf_to_f64(&sum.add(&tail, BF_PREC, RM))
}

/// Position `ξ½` of the maximum of `λ̃_norm^k`, the root of
/// `D λ̃_norm = −θ λ̃_norm + m̃^k` in `]0, k]`.
pub fn xi_half(k: u32, theta: f64) -> Option<f64> {
    if k == 0 {
        return None;
    }
    let h = hill(k);
    let slope = |xi: f64| h.eval(xi) - theta * lambda_norm_theta(k, theta, xi);
    let kf = k as f64;
    let n = 4000;
    let mut prev = 1e-9 * kf;
    if slope(prev) <= 0.0 {
        return None;
    }
    for i in 1..=n {
        let x = kf * i as f64 / n as f64;
        if slope(x) <= 0.0 {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = x;
    }
    None
}

/// Whether the lower-bound hypotheses hold for `(k, θ, ε)`:
/// `θ ≥ max(ln 2, ln 16/k)`, `ε ∈ ]0, 1]`, and `ε ≤ k − ξ½` unless `k < 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundHypothesis {
    pub theta_ok: bool,
    pub epsilon_ok: bool,
    pub xi_half: Option<f64>,
    pub xi_half_ok: bool,
}

impl LowerBoundHypothesis {
    pub fn holds(&self) -> bool {
        self.theta_ok && self.epsilon_ok && self.xi_half_ok
    }
}

pub fn lower_bound_hypothesis(k: u32, theta: f64, epsilon: f64) -> LowerBoundHypothesis {
    let theta_ok = k >= 1 && theta >= 2f64.ln().max(16f64.ln() / k as f64);
    let epsilon_ok = epsilon > 0.0 && epsilon <= 1.0;
    let xh = xi_half(k, theta);
    let xi_half_ok = k < 3 || xh.is_some_and(|x| epsilon <= k as f64 - x);
    LowerBoundHypothesis {
        theta_ok,
        epsilon_ok,
        xi_half: xh,
        xi_half_ok,
    }
}

/// Lower endpoint `f` of the enclosure `κ̃ ∈ [f, 1]·(method's estimate)`.
pub fn interval_factor(method: Method, alpha: f64, k: u32) -> f64 {
    let per = match method {
        Method::Lambda => 1.0 / (1.0 + alpha),
        Method::Nu => (1.0 + alpha) / (1.0 + alpha / 2.0).powi(2),
        Method::Eta => {
            let l = alpha.ln_1p();
            (l / alpha) * (1.0 + alpha).powf(1.0 / l - 1.0 / alpha)
        }
        Method::Kappa => 1.0,
    };
    per.powi(k as i32)
}

/// `c̃_k`: `1/(α ln B)` for `k > 0`, `1` for `k = 0`.
pub fn c_tilde(k: u32, b: f64, alpha: f64) -> f64 {
    if k == 0 {
        1.0
    } else {
        1.0 / (alpha * b.ln())
    }
}

/// The factor `u` of the unconditional recursion
/// `ĉ_k = ĉ_{k−1} + u (c̃_{k−1} + ĉ_{k−1})`, with the bounded term kept:
/// `u = Ê(B)/(αB) + Ê(C)/(αC) + ln B · Ê(B)/B`, `C = B^{1+α}`.
pub fn dusart_u(b: f64, alpha: f64) -> Result<f64> {
    let m = ErrorBoundMode::Dusart;
    let c = b.powf(1.0 + alpha);
    let eb = m.bound(b)?;
    let ec = m.bound(c)?;
    Ok(eb / (alpha * b) + ec / (alpha * c) + b.ln() * eb / b)
}

/// `ĉ_k` bounding `λ̂_norm^k⟨ξ⟩` for all `ξ`.
pub fn c_hat(k: u32, b: f64, alpha: f64, mode: ErrorBoundMode) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParams(format!("α = {alpha} must be positive")));
    }
    mode.check(b)?;
    let lb = b.ln();
    let sb = b.sqrt();
    match mode {
        ErrorBoundMode::Riemann => {
            let c1 = (2.0 + alpha) * lb / (8.0 * PI * alpha * sb);
            let step = (4.0 + 3.0 * lb) / (8.0 * PI * alpha * sb);
            match k {
                0 => Ok(0.0),
                1 => Ok(c1),
                _ => {
                    let mut c = (6.0 + 3.0 * alpha) / (8.0 * PI * alpha * alpha) * (1.0 / sb)
                        + step * (c_tilde(1, b, alpha) + c1);
                    for j in 3..=k {
                        c += step * (c_tilde(j - 1, b, alpha) + c);
                    }
                    Ok(c)
                }
            }
        }
        ErrorBoundMode::Dusart => {
            let u = dusart_u(b, alpha)?;
            let mut c = 0.0;
            for j in 1..=k {
                c += u * (c_tilde(j - 1, b, alpha) + c);
            }
            Ok(c)
        }
    }
}

/// `(2^k − 1)(1+α)/(α²√B)`, the simple bound on `ĉ_k` for `k ≥ 2`.
pub fn c_hat_simple_bound(k: u32, b: f64, alpha: f64) -> f64 {
    ((1u64 << k) - 1) as f64 * (1.0 + alpha) / (alpha * alpha * b.sqrt())
}

/// `č_k = min(2^{−4} ε^k/k!, 2^{−k} ε^{k−1}/(k−1)!)`.
pub fn c_check(k: u32, epsilon: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParams("č_k needs k >= 1".into()));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParams(format!("ε = {epsilon} not in ]0, 1]")));
    }
    let a = epsilon.powi(k as i32) / (16.0 * factorial(k));
    let b = epsilon.powi(k as i32 - 1) / (2f64.powi(k as i32) * factorial(k - 1));
    Ok(a.min(b))
}

/// `λ̂¹_norm⟨ξ⟩` in Riemann mode, by its explicit piecewise formula.
pub fn lambda_hat_norm_1(sp: &ShapeParams, xi: f64) -> Result<f64> {
    ErrorBoundMode::Riemann.check(sp.b)?;
    if xi < 0.0 {
        return Ok(0.0);
    }
    let (a, b) = (sp.alpha, sp.b);
    let lb = b.ln();
    let second = lb / (8.0 * PI * a) * b.powf(-(0.5 + xi * a));
    let first = if xi < 1.0 {
        (1.0 + xi * a) / (8.0 * PI * a) * lb * b.powf(-(0.5 + xi * a / 2.0))
    } else {
        (1.0 + a) / (8.0 * PI * a) * lb * b.powf(-(0.5 - a / 2.0 + xi * a))
    };
    Ok(first + second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn cutexp_examples() {
        assert!(rel(cutexp(0, 1.0), std::f64::consts::E) < 1e-15);
        assert!(rel(cutexp(2, 1.0), std::f64::consts::E - 2.0) < 1e-14);
        assert_eq!(cutexp(3, 0.0), 0.0);
        // both branches agree at the switch
        let a = cutexp(3, 2.999_999);
        let b = cutexp(3, 3.000_001);
        assert!(rel(a, b) < 1e-5);
    }

    #[test]
    fn lambda_examples() {
        assert!(rel(lambda_norm_theta(1, LN_2, 1.0), 0.5 / LN_2) < 1e-14);
        assert_eq!(lambda_norm_theta(3, LN_2, 0.0), 0.0);
        let v = lambda_norm_theta(1, LN_2, 0.5);
        assert!(rel(v, (1.0 - 2f64.powf(-0.5)) / LN_2) < 1e-14);
        assert!((v - 0.42255).abs() < 1e-5);
    }

    #[test]
    fn eta_example() {
        let alpha = 0.2327;
        // B^α = 2
        let b = (LN_2 / alpha).exp();
        let sp = ShapeParams::new(b, alpha, 1).unwrap();
        let te = LN_2 - 1.2327f64.ln();
        assert!(rel(sp.theta_eta(), te) < 1e-13);
        assert!(rel(eta_norm(&sp, 1.0), (1.0 - (-te).exp()) / te) < 1e-13);
        let sp2 = ShapeParams { k: 2, ..sp };
        assert!(rel(eta_norm(&sp2, 2.0), ((1.0 - (-te).exp()) / te).powi(2)) < 1e-13);
        assert_eq!(eta_norm(&sp2, 0.0), 0.0);
    }

    #[test]
    fn three_forms_spot_check() {
        for &(k, theta, xi) in &[(3u32, 2.0, 1.3), (5, LN_2, 2.7), (7, 5.0, 4.1), (4, 2.0, 0.05)] {
            let a = lambda_norm_theta(k, theta, xi);
            let b = lambda_norm_derivative_sum(k, theta, xi);
            let c = lambda_norm_integral(k, theta, xi, 1e-13);
            assert!(rel(a, b) < 1e-11, "k={k} ξ={xi}: {a} vs {b}");
            assert!(rel(a, c) < 1e-11, "k={k} ξ={xi}: {a} vs {c}");
        }
    }

    #[test]
    fn factors() {
        assert!((interval_factor(Method::Lambda, 0.2327, 4) - 0.434).abs() < 1e-3);
        assert!((interval_factor(Method::Nu, 0.2327, 4) - 0.957).abs() < 1e-3);
        assert!((interval_factor(Method::Eta, 0.2327, 4) - 0.978).abs() < 1e-3);
        assert_eq!(interval_factor(Method::Kappa, 0.2327, 4), 1.0);
    }

    #[test]
    fn constants() {
        let m = ErrorBoundMode::Riemann;
        assert_eq!(c_hat(0, 1e6, 0.25, m).unwrap(), 0.0);
        let c1 = c_hat(1, 1e6, 0.25, m).unwrap();
        assert!(rel(c1, 2.25 * 1e6f64.ln() / (8.0 * PI * 0.25 * 1000.0)) < 1e-14);
        assert!((c1 - 4.946e-3).abs() < 1e-5);
        let c3 = c_hat(3, 1e6, 0.25, m).unwrap();
        assert!(c3 <= 0.14);
        assert!(c_hat(2, 2656.0, 0.25, m).is_err());
        assert!(c_hat(2, 1e5, 0.25, ErrorBoundMode::Dusart).is_err());
    }

    #[test]
    fn c_hat_two_expanded_form() {
        let (b, a) = (1e6f64, 0.25f64);
        let lb = b.ln();
        let sb = b.sqrt();
        let expanded = (9.0 + 3.0 * a) / (8.0 * PI * a * a) / sb
            + 1.0 / (2.0 * PI * a * a * sb * lb)
            + (2.0 + a) * (4.0 + 3.0 * lb) * lb / (64.0 * PI * PI * a * a * b);
        let c2 = c_hat(2, b, a, ErrorBoundMode::Riemann).unwrap();
        assert!(rel(c2, expanded) < 1e-13, "{c2} vs {expanded}");
    }

    #[test]
    fn c_check_examples() {
        assert!(rel(c_check(2, 1.0).unwrap(), 1.0 / 32.0) < 1e-15);
        assert!(rel(c_check(1, 1.0).unwrap(), 1.0 / 16.0) < 1e-15);
        assert!((c_check(4, 0.5).unwrap() - 1.628e-4).abs() < 1e-7);
        assert!(c_check(2, 0.0).is_err());
    }

    #[test]
    fn lambda_hat_one() {
        let sp = ShapeParams::new(1e6, 0.25, 1).unwrap();
        assert_eq!(lambda_hat_norm_1(&sp, -1.0).unwrap(), 0.0);
        let v = lambda_hat_norm_1(&sp, 0.0).unwrap();
        assert!((v - 4.398e-3).abs() < 1e-6, "{v}");
        assert!(lambda_hat_norm_1(&sp, 200.0).unwrap() < 1e-100);
    }

    #[test]
    fn xi_half_k1() {
        let x = xi_half(1, 2.0).unwrap();
        assert!((x - 1.0).abs() < 1e-9);
        let x = xi_half(4, 2.0).unwrap();
        assert!(x >= 2.0 && x < 4.0);
    }
}
