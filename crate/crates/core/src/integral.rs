//! Numeric evaluation of the recursively defined approximation and error
//! functions (κ̃, κ̂, λ̃, λ̂, ν̃, η̃) and the π-level estimates built on them.
//!
//! Everything runs in log coordinates `X = ln x`, `u = ln p`, on the
//! normalized functions `g(X) = f(e^X)·e^{−X}`. With `b = ln B`, `c = ln C`
//! the recursions become convolutions over `u ∈ [b, c]`:
//!
//! ```text
//! g̃_k(X) = ∫ g̃_{k−1}(X−u) w(u) du
//! ĝ_k(X) = ∫ [ĝ_{k−1}(X−u) w(u) + s_{k−1}(X−u) Ê′(e^u)] du + 2 s_{k−1}(X−b) Ê(B)/B
//! ```
//!
//! where `s = g̃ + ĝ` and `w` is the kernel (`1/u` for κ, `1/b` for λ, ...).
//! Level `L` is supported on `X ≥ Lb`, smooth between the breakpoints
//! `X_j = (L−j)b + jc` and saturated (`f` constant) for `X ≥ Lc`. Levels
//! below the requested one are stored as Chebyshev interpolants on each
//! smooth piece; the requested level is a direct quadrature over them.

use crate::closedform::{self, c_hat, c_check, interval_factor, Method, ShapeParams};
use crate::error::{Error, Result};
use crate::exact::GrainParams;
use crate::primes::ErrorBoundMode;
use crate::quad::{integrate, Tolerance};
use serde::{Deserialize, Serialize};

/// Largest `k` accepted by the nested evaluation.
pub const MAX_NESTING: u32 = 4;

const MIN_CHEB: usize = 16;
const MAX_CHEB: usize = 256;

/// Tolerances for the nested evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target relative accuracy of returned values.
    pub rel_tol: f64,
    /// Absolute floor, in units of the normalized value `f(x)/x`.
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Split every convolution at the images of the inner breakpoints.
    pub split_at_case_boundaries: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            max_depth: 40,
            split_at_case_boundaries: true,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_depth >= 1) {
            return Err(Error::InvalidParams(format!(
                "quadrature config needs rel_tol, abs_tol > 0 and max_depth >= 1, got {self:?}"
            )));
        }
        Ok(())
    }

    fn interp_tol(&self) -> f64 {
        (self.rel_tol * 1e-3).max(1e-14)
    }

    fn inner_quad(&self) -> Tolerance {
        Tolerance {
            rel: (self.rel_tol * 1e-4).max(2e-15),
            abs: 0.0,
            max_depth: self.max_depth,
        }
    }

    fn outer_quad(&self) -> Tolerance {
        Tolerance {
            rel: (self.rel_tol * 1e-2).max(2e-15),
            abs: self.abs_tol,
            max_depth: self.max_depth,
        }
    }
}

/// Enclosure `[lower, upper]` of a count at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateInterval {
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    pub x: f64,
}

impl EstimateInterval {
    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

// ---------------------------------------------------------------------------
// Chebyshev pieces

#[derive(Debug, Clone)]
struct Cheb {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Cheb {
    fn eval(&self, x: f64) -> f64 {
        let t = ((2.0 * x - self.lo - self.hi) / (self.hi - self.lo)).clamp(-1.0, 1.0);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs[0]
    }
}

fn lobatto_coeffs(vals: &[f64]) -> Vec<f64> {
    let n = vals.len() - 1;
    let nf = n as f64;
    let mut out = vec![0.0; n + 1];
    for (m, o) in out.iter_mut().enumerate() {
        let mut s = 0.5 * (vals[0] + if m % 2 == 0 { vals[n] } else { -vals[n] });
        for (j, v) in vals.iter().enumerate().take(n).skip(1) {
            s += v * (std::f64::consts::PI * ((m * j) % (2 * n)) as f64 / nf).cos();
        }
        *o = 2.0 * s / nf;
    }
    out[0] *= 0.5;
    out[n] *= 0.5;
    out
}

/// Fits `dim` functions sharing one sample set, doubling the node count until
/// every coefficient tail drops below `tol` relative to its scale.
fn fit_multi<F>(lo: f64, hi: f64, dim: usize, tol: f64, mut f: F) -> Result<Vec<Cheb>>
where
    F: FnMut(f64) -> Result<Vec<f64>>,
{
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let node = |j: usize, n: usize| mid + half * (std::f64::consts::PI * j as f64 / n as f64).cos();
    let mut n = MIN_CHEB;
    let mut samples: Vec<Vec<f64>> = (0..=n).map(|j| f(node(j, n))).collect::<Result<_>>()?;
    loop {
        let mut fits = Vec::with_capacity(dim);
        let mut worst: f64 = 0.0;
        let mut worst_scale: f64 = 0.0;
        let mut ok = true;
        for d in 0..dim {
            let vals: Vec<f64> = samples.iter().map(|s| s[d]).collect();
            let mut coeffs = lobatto_coeffs(&vals);
            let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let tail = coeffs[n - 2..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if tail > tol * scale {
                ok = false;
                if tail / scale.max(f64::MIN_POSITIVE) > worst / worst_scale.max(f64::MIN_POSITIVE) {
                    worst = tail;
                    worst_scale = scale;
                }
            }
            let cut = 1e-2 * tol * scale;
            while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= cut) {
                coeffs.pop();
            }
            fits.push(Cheb { lo, hi, coeffs });
        }
        if ok {
            return Ok(fits);
        }
        if n >= MAX_CHEB {
            return Err(Error::Accuracy {
                estimate: worst_scale,
                achieved: worst / worst_scale.max(f64::MIN_POSITIVE),
            });
        }
        let m = 2 * n;
        let mut next = Vec::with_capacity(m + 1);
        for j in 0..=m {
            if j % 2 == 0 {
                next.push(std::mem::take(&mut samples[j / 2]));
            } else {
                next.push(f(node(j, m))?);
            }
        }
        samples = next;
        n = m;
    }
}

// ---------------------------------------------------------------------------
// Levels

/// One recursion level in normalized log coordinates.
#[derive(Debug, Clone)]
struct Level {
    breaks: Vec<f64>,
    pieces: Vec<Cheb>,
    sat: f64,
}

impl Level {
    fn base(value: f64) -> Level {
        Level {
            breaks: vec![0.0],
            pieces: Vec::new(),
            sat: value,
        }
    }

    fn top(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// Size of the interpolation noise: the fit tolerance times a bound on
    /// the fitted values. Zero for the exact base levels.
    fn noise(&self, interp_tol: f64) -> f64 {
        let sup = self
            .pieces
            .iter()
            .map(|p| p.coeffs.iter().map(|c| c.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        interp_tol * sup
    }

    fn eval_piece(&self, j: usize, x: f64) -> f64 {
        if j == self.pieces.len() {
            self.sat * (self.top() - x).exp()
        } else {
            self.pieces[j].eval(x)
        }
    }

    /// Right-continuous evaluation.
    fn eval(&self, x: f64) -> f64 {
        if x < self.breaks[0] {
            return 0.0;
        }
        let j = self.breaks.partition_point(|&t| t <= x) - 1;
        self.eval_piece(j, x)
    }
}

/// Recursion kernel in the variable `u = ln p`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    method: Method,
    b: f64,
    c: f64,
    alpha: f64,
}

impl Kernel {
    fn w(&self, u: f64) -> f64 {
        let rho = (u - self.b) / (self.c - self.b);
        match self.method {
            Method::Kappa => 1.0 / u,
            Method::Lambda => 1.0 / self.b,
            Method::Nu => (1.0 - rho) / self.b + rho / self.c,
            Method::Eta => (-rho * self.alpha.ln_1p()).exp() / self.b,
        }
    }
}

/// Nested evaluator for one kernel and one `(B, C)` pair.
///
/// Building it fits every level below `k_max`; evaluation is then read-only
/// and may be shared between threads.
#[derive(Debug, Clone)]
pub struct Engine {
    kernel: Kernel,
    mode: Option<ErrorBoundMode>,
    e_b: f64,
    big_b: f64,
    cfg: QuadratureConfig,
    k_max: u32,
    tilde: Vec<Level>,
    hat: Vec<Level>,
}

impl Engine {
    /// `mode = None` skips the error functions.
    pub fn new(
        big_b: f64,
        big_c: f64,
        method: Method,
        k_max: u32,
        mode: Option<ErrorBoundMode>,
        cfg: QuadratureConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if !(big_b > 1.0 && big_c > big_b && big_c.is_finite()) {
            return Err(Error::InvalidParams(format!("need 1 < B < C, got B = {big_b}, C = {big_c}")));
        }
        if k_max > MAX_NESTING {
            return Err(Error::InvalidParams(format!(
                "nested evaluation is capped at k = {MAX_NESTING}, got {k_max}; use the closed forms"
            )));
        }
        let e_b = match mode {
            Some(m) => m.bound(big_b)?,
            None => 0.0,
        };
        let b = big_b.ln();
        let c = big_c.ln();
        let mut eng = Engine {
            kernel: Kernel {
                method,
                b,
                c,
                alpha: c / b - 1.0,
            },
            mode,
            e_b,
            big_b,
            cfg,
            k_max,
            tilde: vec![Level::base(1.0)],
            hat: if mode.is_some() { vec![Level::base(0.0)] } else { Vec::new() },
        };
        for level in 1..k_max {
            eng.push_level(level)?;
        }
        Ok(eng)
    }

    pub fn for_params(
        p: &GrainParams,
        method: Method,
        mode: Option<ErrorBoundMode>,
        cfg: QuadratureConfig,
    ) -> Result<Self> {
        Engine::new(p.b as f64, p.c as f64, method, p.k, mode, cfg)
    }

    pub fn for_shape(
        sp: &ShapeParams,
        method: Method,
        k_max: u32,
        mode: Option<ErrorBoundMode>,
        cfg: QuadratureConfig,
    ) -> Result<Self> {
        Engine::new(sp.b, sp.b.powf(1.0 + sp.alpha), method, k_max, mode, cfg)
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn method(&self) -> Method {
        self.kernel.method
    }

    pub fn mode(&self) -> Option<ErrorBoundMode> {
        self.mode
    }

    fn breaks(&self, level: u32) -> Vec<f64> {
        let (b, c) = (self.kernel.b, self.kernel.c);
        (0..=level)
            .map(|j| (level - j) as f64 * b + j as f64 * c)
            .collect()
    }

    fn push_level(&mut self, level: u32) -> Result<()> {
        let breaks = self.breaks(level);
        let inner = (level - 1) as usize;
        let with_hat = self.mode.is_some();
        let dim = if with_hat { 2 } else { 1 };
        let tol = self.cfg.interp_tol();
        let mut tp = Vec::with_capacity(level as usize);
        let mut hp = Vec::with_capacity(level as usize);
        for j in 0..level as usize {
            let fits = fit_multi(breaks[j], breaks[j + 1], dim, tol, |x| {
                let (t, h) = self.step(inner, x, Some(j), self.cfg.inner_quad())?;
                Ok(if with_hat { vec![t, h] } else { vec![t] })
            })?;
            let mut it = fits.into_iter();
            tp.push(it.next().unwrap());
            if let Some(h) = it.next() {
                hp.push(h);
            }
        }
        let top = *breaks.last().unwrap();
        let t_sat = tp.last().unwrap().eval(top);
        self.tilde.push(Level {
            breaks: breaks.clone(),
            pieces: tp,
            sat: t_sat,
        });
        if with_hat {
            let h_sat = hp.last().unwrap().eval(top);
            self.hat.push(Level {
                breaks,
                pieces: hp,
                sat: h_sat,
            });
        }
        Ok(())
    }

    /// One recursion step from level `inner` at `x`, returning `(g̃, ĝ)`.
    /// `piece` forces the inner piece used by the point term (for fitting
    /// a closed piece of the next level).
    fn step(&self, inner: usize, x: f64, piece: Option<usize>, tol: Tolerance) -> Result<(f64, f64)> {
        let k = self.kernel;
        let it = &self.tilde[inner];
        let lo = k.b;
        let hi = k.c.min(x - it.breaks[0]);
        let splits: Vec<f64> = if self.cfg.split_at_case_boundaries {
            it.breaks.iter().map(|y| x - y).collect()
        } else {
            Vec::new()
        };
        // integrands built on fitted levels carry noise of the fit, so the
        // absolute target never goes below what the fit can deliver
        let interp = self.cfg.interp_tol();
        let wmax = k.w(lo).max(k.w(hi));
        let len = (hi - lo).max(0.0);
        let t_tol = Tolerance {
            abs: tol.abs.max(it.noise(interp) * wmax * len),
            ..tol
        };
        let t = if hi > lo {
            let r = integrate(|u| it.eval(x - u) * k.w(u), lo, hi, &splits, t_tol);
            check(r.converged, r.value, r.error)?;
            r.value
        } else {
            0.0
        };
        let mode = match self.mode {
            Some(m) => m,
            None => return Ok((t, 0.0)),
        };
        let ih = &self.hat[inner];
        let epmax = mode
            .derivative_unchecked(lo.exp())
            .max(mode.derivative_unchecked(hi.max(lo).exp()));
        let h_tol = Tolerance {
            abs: tol
                .abs
                .max((ih.noise(interp) * (wmax + epmax) + it.noise(interp) * epmax) * len),
            ..tol
        };
        let cont = if hi > lo {
            let r = integrate(
                |u| {
                    let y = x - u;
                    let ep = mode.derivative_unchecked(u.exp());
                    ih.eval(y) * (k.w(u) + ep) + it.eval(y) * ep
                },
                lo,
                hi,
                &splits,
                h_tol,
            );
            check(r.converged, r.value, r.error)?;
            r.value
        } else {
            0.0
        };
        let y = x - k.b;
        let s = match piece {
            Some(j) => it.eval_piece(j, y) + ih.eval_piece(j, y),
            None => it.eval(y) + ih.eval(y),
        };
        Ok((t, cont + 2.0 * s * self.e_b / self.big_b))
    }

    fn level_value(&self, k: u32, big_x: f64) -> Result<(f64, f64)> {
        if k > self.k_max {
            return Err(Error::InvalidParams(format!(
                "engine built for k <= {}, asked for {k}",
                self.k_max
            )));
        }
        if k == 0 {
            let v = if big_x >= 0.0 { (-big_x).exp() } else { 0.0 };
            return Ok((v, 0.0));
        }
        if big_x < k as f64 * self.kernel.b {
            return Ok((0.0, 0.0));
        }
        self.step(k as usize - 1, big_x, None, self.cfg.outer_quad())
    }

    /// Normalized approximation `f̃_k(e^X)·e^{−X}`.
    pub fn tilde_norm(&self, k: u32, big_x: f64) -> Result<f64> {
        Ok(self.level_value(k, big_x)?.0)
    }

    /// Normalized error function `f̂_k(e^X)·e^{−X}`.
    pub fn hat_norm(&self, k: u32, big_x: f64) -> Result<f64> {
        if self.mode.is_none() {
            return Err(Error::InvalidParams("engine built without an error bound mode".into()));
        }
        Ok(self.level_value(k, big_x)?.1)
    }

    /// `(f̃_k(x), f̂_k(x))`; the second entry is 0 without a mode.
    pub fn values(&self, k: u32, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("x = {x} must be non-negative")));
        }
        if x == 0.0 {
            return Ok((0.0, 0.0));
        }
        let big_x = x.ln();
        let (t, h) = self.level_value(k, big_x)?;
        Ok((t * x, h * x))
    }

    pub fn tilde(&self, k: u32, x: f64) -> Result<f64> {
        Ok(self.values(k, x)?.0)
    }

    pub fn hat(&self, k: u32, x: f64) -> Result<f64> {
        if self.mode.is_none() {
            return Err(Error::InvalidParams("engine built without an error bound mode".into()));
        }
        Ok(self.values(k, x)?.1)
    }
}

fn check(converged: bool, value: f64, error: f64) -> Result<()> {
    if converged {
        Ok(())
    } else {
        Err(Error::Accuracy {
            estimate: value,
            achieved: error,
        })
    }
}

// ---------------------------------------------------------------------------
// Public operations

/// `κ̃^k(x)`.
pub fn kappa_tilde(params: &GrainParams, x: f64, cfg: QuadratureConfig) -> Result<f64> {
    Engine::for_params(params, Method::Kappa, None, cfg)?.tilde(params.k, x)
}

/// `κ̂^k(x)`.
pub fn kappa_hat(params: &GrainParams, x: f64, mode: ErrorBoundMode, cfg: QuadratureConfig) -> Result<f64> {
    Engine::for_params(params, Method::Kappa, Some(mode), cfg)?.hat(params.k, x)
}

/// `λ̂^k⟨ξ⟩/(α^k B^{k+ξα})`.
pub fn lambda_hat_norm(
    sp: &ShapeParams,
    k: u32,
    xi: f64,
    mode: ErrorBoundMode,
    cfg: QuadratureConfig,
) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    let eng = Engine::for_shape(sp, Method::Lambda, k, Some(mode), cfg)?;
    let big_x = (k as f64 + xi * sp.alpha) * sp.ln_b();
    Ok(eng.hat_norm(k, big_x)? / sp.alpha.powi(k as i32))
}

fn tilde_at_xi(sp: &ShapeParams, method: Method, k: u32, xi: f64, cfg: QuadratureConfig) -> Result<f64> {
    let eng = Engine::for_shape(sp, method, k, None, cfg)?;
    let big_x = (k as f64 + xi * sp.alpha) * sp.ln_b();
    Ok(eng.tilde_norm(k, big_x)? * big_x.exp())
}

/// `λ̃^k⟨ξ⟩` by nested quadrature (the closed form lives in `closedform`).
pub fn lambda_tilde_quad(sp: &ShapeParams, k: u32, xi: f64, cfg: QuadratureConfig) -> Result<f64> {
    tilde_at_xi(sp, Method::Lambda, k, xi, cfg)
}

/// `ν̃^k⟨ξ⟩`.
pub fn nu_tilde(sp: &ShapeParams, k: u32, xi: f64, cfg: QuadratureConfig) -> Result<f64> {
    tilde_at_xi(sp, Method::Nu, k, xi, cfg)
}

/// `η̃^k⟨ξ⟩` by nested quadrature.
pub fn eta_tilde_quad(sp: &ShapeParams, k: u32, xi: f64, cfg: QuadratureConfig) -> Result<f64> {
    tilde_at_xi(sp, Method::Eta, k, xi, cfg)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `π̃^k(x) = κ̃^k(x)/k!`.
pub fn pi_tilde(params: &GrainParams, x: f64, cfg: QuadratureConfig) -> Result<f64> {
    Ok(kappa_tilde(params, x, cfg)? / factorial(params.k))
}

/// `π̂^k(x) = κ̂^k(x)/k! + 2^{k−1} x/B`, applied for every `k`.
pub fn pi_hat(params: &GrainParams, x: f64, mode: ErrorBoundMode, cfg: QuadratureConfig) -> Result<f64> {
    pi_hat_with(params, x, mode, cfg, false)
}

/// [`pi_hat`], optionally dropping the non-squarefree term for `k ≤ 1`
/// where `π^k = κ^k/k!` holds exactly.
pub fn pi_hat_with(
    params: &GrainParams,
    x: f64,
    mode: ErrorBoundMode,
    cfg: QuadratureConfig,
    exact_for_k1: bool,
) -> Result<f64> {
    let k = params.k;
    let kh = kappa_hat(params, x, mode, cfg)? / factorial(k);
    let corr = if exact_for_k1 && k <= 1 {
        0.0
    } else {
        2f64.powi(k as i32 - 1) * x / params.b as f64
    };
    Ok(kh + corr)
}

/// Range `[λ̃/((1+α)^k k!), λ̃/k!]` known to contain `π̃^k(x)`.
pub fn pi_tilde_enclosure(sp: &ShapeParams, x: f64) -> (f64, f64) {
    let k = sp.k;
    let l = closedform::lambda_tilde(sp, sp.xi_of_x(x)) / factorial(k);
    (l / (1.0 + sp.alpha).powi(k as i32), l)
}

/// Interval for `ã` and the error radius in
/// `|π^k(x) − ã·x/ln B| ≤ err`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainBound {
    pub a_lo: f64,
    pub a_hi: f64,
    pub err: f64,
}

impl MainBound {
    /// Whether some `ã ∈ [a_lo, a_hi]` satisfies the inequality for `count`.
    pub fn admits(&self, count: f64, x: f64, ln_b: f64) -> bool {
        let a = (count * ln_b / x).clamp(self.a_lo, self.a_hi);
        (count - a * x / ln_b).abs() <= self.err
    }
}

/// The coefficient interval and the error radius per unit `x`, without the
/// range check on `x`.
pub fn main_bound_constants(params: &GrainParams, epsilon: f64, mode: ErrorBoundMode) -> Result<MainBound> {
    let k = params.k;
    if k < 2 {
        return Err(Error::Domain(format!("needs k >= 2, got {k}")));
    }
    let big_b = params.b as f64;
    let alpha = params.alpha();
    if alpha < big_b.ln() / big_b.sqrt() {
        return Err(Error::Domain(format!(
            "α = {alpha} below ln B/√B = {}",
            big_b.ln() / big_b.sqrt()
        )));
    }
    mode.check(big_b)?;
    let ck = c_check(k, epsilon)?;
    let kf = factorial(k);
    let a_lo = alpha.powi(k as i32 - 1) * ck / (kf * (1.0 + alpha).powi(k as i32));
    let hat_rate = match mode {
        ErrorBoundMode::Riemann => {
            ((1u64 << k) - 1) as f64 * alpha.powi(k as i32 - 2) * (1.0 + alpha) / big_b.sqrt()
        }
        ErrorBoundMode::Dusart => c_hat(k, big_b, alpha, mode)? * alpha.powi(k as i32),
    };
    Ok(MainBound {
        a_lo,
        a_hi: 1.0 / kf,
        err: hat_rate + 2f64.powi(k as i32 - 1) / big_b,
    })
}

/// Main bound at `x ∈ [B^k(1+ε), C^k(1−ε)]`; `err` is absolute.
pub fn main_bound(params: &GrainParams, x: f64, epsilon: f64, mode: ErrorBoundMode) -> Result<MainBound> {
    let mut mb = main_bound_constants(params, epsilon, mode)?;
    let k = params.k as i32;
    let lo = (params.b as f64).powi(k) * (1.0 + epsilon);
    let hi = (params.c as f64).powi(k) * (1.0 - epsilon);
    if !(x >= lo && x <= hi) {
        return Err(Error::Domain(format!("x = {x} outside [{lo}, {hi}]")));
    }
    mb.err *= x;
    Ok(mb)
}

// ---------------------------------------------------------------------------
// Estimate enclosures

/// `ĉ_k α^k x`, the bound on `λ̂^k(x)` shared by the λ, ν and η estimates.
pub fn hat_allowance(sp: &ShapeParams, x: f64, mode: ErrorBoundMode) -> Result<f64> {
    Ok(c_hat(sp.k, sp.b, sp.alpha, mode)? * sp.alpha.powi(sp.k as i32) * x)
}

/// λ or η enclosure from the closed forms. The lower end is clipped at 0.
pub fn estimate_closed(method: Method, sp: &ShapeParams, x: f64, mode: ErrorBoundMode) -> Result<EstimateInterval> {
    let xi = sp.xi_of_x(x);
    let central = match method {
        Method::Lambda => closedform::lambda_tilde(sp, xi),
        Method::Eta => closedform::eta_tilde(sp, xi),
        _ => {
            return Err(Error::InvalidParams(format!(
                "{} has no closed form",
                method.name()
            )))
        }
    };
    let f = interval_factor(method, sp.alpha, sp.k);
    let h = hat_allowance(sp, x, mode)?;
    Ok(EstimateInterval {
        lower: (f * central - h).max(0.0),
        upper: central + h,
        method,
        x,
    })
}

/// ν enclosure from the nested quadrature of `ν̃`.
pub fn estimate_nu(engine: &Engine, sp: &ShapeParams, x: f64, mode: ErrorBoundMode) -> Result<EstimateInterval> {
    if engine.method() != Method::Nu {
        return Err(Error::InvalidParams("estimate_nu needs a ν engine".into()));
    }
    let central = engine.tilde(sp.k, x)?;
    let f = interval_factor(Method::Nu, sp.alpha, sp.k);
    let h = hat_allowance(sp, x, mode)?;
    Ok(EstimateInterval {
        lower: (f * central - h).max(0.0),
        upper: central + h,
        method: Method::Nu,
        x,
    })
}

/// `[κ̃ − κ̂, κ̃ + κ̂]` (lower end clipped at 0) from a κ engine with a mode.
pub fn estimate_kappa(engine: &Engine, k: u32, x: f64) -> Result<EstimateInterval> {
    if engine.method() != Method::Kappa || engine.mode().is_none() {
        return Err(Error::InvalidParams("estimate_kappa needs a κ engine with a mode".into()));
    }
    let (t, h) = engine.values(k, x)?;
    Ok(EstimateInterval {
        lower: (t - h).max(0.0),
        upper: t + h,
        method: Method::Kappa,
        x,
    })
}
