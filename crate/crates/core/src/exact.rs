//! Exact counting of `]B, C]`-grained integers by enumeration.
//!
//! `κ^k(x)` counts ordered `k`-tuples of primes in `]B, C]` with product
//! `≤ x`; `π^k(x)` counts the distinct products. Both serve as oracles for
//! the analytic estimates and are only meant for desk-scale parameters.

use crate::error::{Error, Result};
use crate::primes::primes_between;
use num_bigint::BigUint;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicU64, Ordering};

/// The grain parameters `B < C` and the number of prime factors `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrainParams {
    pub b: u64,
    pub c: u64,
    pub k: u32,
}

impl GrainParams {
    pub fn new(b: u64, c: u64, k: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParams(format!("B = {b} must be at least 2")));
        }
        if c <= b {
            return Err(Error::InvalidParams(format!("C = {c} must exceed B = {b}")));
        }
        Ok(GrainParams { b, c, k })
    }

    /// `C = ⌊B^s⌋`.
    pub fn from_exponent(b: u64, s: f64, k: u32) -> Result<Self> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(Error::InvalidParams(format!("exponent {s} must exceed 1")));
        }
        let c = (b as f64).powf(s).floor();
        if c >= u64::MAX as f64 {
            return Err(Error::InvalidParams(format!("B^{s} overflows")));
        }
        Self::new(b, c as u64, k)
    }

    pub fn with_k(self, k: u32) -> Self {
        GrainParams { k, ..self }
    }

    /// `α = ln C / ln B − 1`.
    pub fn alpha(&self) -> f64 {
        (self.c as f64).ln() / (self.b as f64).ln() - 1.0
    }

    /// `θ = α ln B = ln C − ln B`.
    pub fn theta(&self) -> f64 {
        (self.c as f64).ln() - (self.b as f64).ln()
    }

    /// `B^{k−j} C^j`, exactly.
    pub fn case_boundary(&self, j: u32) -> BigUint {
        assert!(j <= self.k);
        BigUint::from(self.b).pow(self.k - j) * BigUint::from(self.c).pow(j)
    }

    /// `B^{k−j} C^j` in floating point.
    pub fn case_boundary_f64(&self, j: u32) -> f64 {
        (self.b as f64).powi((self.k - j) as i32) * (self.c as f64).powi(j as i32)
    }
}

/// Case index `j ∈ {−1, …, k}`: `x ∈ [B^{k−j}C^j, B^{k−1−j}C^{j+1}[`, with
/// `−1` below `B^k` and `k` from `C^k` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CaseIndex(pub i32);

fn floor_big(x: f64) -> BigUint {
    if !(x >= 0.0) {
        return BigUint::zero();
    }
    BigUint::from_f64(x.floor()).unwrap_or_else(BigUint::zero)
}

/// Classifies `x` into its case `(k, j)` using exact integer comparisons
/// against `⌊x⌋`.
pub fn classify_case(params: &GrainParams, x: f64) -> CaseIndex {
    let fx = floor_big(x);
    let mut j = -1;
    for i in 0..=params.k {
        if fx >= params.case_boundary(i) {
            j = i as i32;
        } else {
            break;
        }
    }
    CaseIndex(j)
}

/// Limits for exact enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Maximum number of visited recursion nodes.
    pub node_cap: u64,
    /// Partition the outermost prime loop across threads.
    pub parallel: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            node_cap: 1_000_000_000,
            parallel: true,
        }
    }
}

/// Enumerator over the sorted primes of `]B, C]`.
#[derive(Debug, Clone)]
pub struct ExactCounter {
    b: u64,
    c: u64,
    primes: Vec<u64>,
    cfg: ExactConfig,
}

impl ExactCounter {
    pub fn new(b: u64, c: u64) -> Result<Self> {
        Self::with_config(b, c, ExactConfig::default())
    }

    pub fn with_config(b: u64, c: u64, cfg: ExactConfig) -> Result<Self> {
        GrainParams::new(b, c, 0)?;
        Ok(ExactCounter {
            b,
            c,
            primes: primes_between(b, c)?,
            cfg,
        })
    }

    pub fn for_params(p: &GrainParams) -> Result<Self> {
        Self::new(p.b, p.c)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `π(C) − π(B)`.
    pub fn prime_count(&self) -> u64 {
        self.primes.len() as u64
    }

    fn reduce_x(&self, k: u32, x: f64) -> Result<Option<u128>> {
        // None means x ≥ C^k
        let fx = floor_big(x);
        if fx >= BigUint::from(self.c).pow(k) {
            return Ok(None);
        }
        fx.to_u128()
            .map(Some)
            .ok_or_else(|| Error::Resource(format!("x = {x} is beyond exact enumeration")))
    }

    fn prefix(&self, y: u128) -> usize {
        self.primes.partition_point(|&p| p as u128 <= y)
    }

    fn tick(&self, nodes: &AtomicU64) -> Result<()> {
        if nodes.fetch_add(1, Ordering::Relaxed) >= self.cfg.node_cap {
            return Err(Error::Resource(format!(
                "enumeration exceeded {} nodes",
                self.cfg.node_cap
            )));
        }
        Ok(())
    }

    fn n_pow(&self, k: u32) -> Result<u128> {
        (self.primes.len() as u128)
            .checked_pow(k)
            .ok_or_else(|| Error::Resource("count overflows 128 bits".into()))
    }

    /// `κ^k(x)`.
    pub fn kappa(&self, k: u32, x: f64) -> Result<u128> {
        if k == 0 {
            return Ok((x >= 1.0) as u128);
        }
        match self.reduce_x(k, x)? {
            None => self.n_pow(k),
            Some(y) => self.kappa_int(k, y),
        }
    }

    /// `κ^k(y)` for an integer bound.
    pub fn kappa_int(&self, k: u32, y: u128) -> Result<u128> {
        let nodes = AtomicU64::new(0);
        if k <= 1 || !self.cfg.parallel {
            return self.kappa_rec(k, y, &nodes);
        }
        let Some(lim) = self.lower_tail(k - 1) else {
            return Ok(0);
        };
        let end = self
            .primes
            .partition_point(|&p| (p as u128).saturating_mul(lim) <= y);
        self.primes[..end]
            .par_iter()
            .map(|&p| self.kappa_rec(k - 1, y / p as u128, &nodes))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }

    // p_min^e, or None on overflow
    fn lower_tail(&self, e: u32) -> Option<u128> {
        match self.primes.first() {
            None => None,
            Some(&p) => (p as u128).checked_pow(e),
        }
    }

    fn kappa_rec(&self, level: u32, y: u128, nodes: &AtomicU64) -> Result<u128> {
        self.tick(nodes)?;
        match level {
            0 => return Ok((y >= 1) as u128),
            1 => return Ok(self.prefix(y) as u128),
            _ => {}
        }
        let Some(&pmax) = self.primes.last() else {
            return Ok(0);
        };
        if (pmax as u128).checked_pow(level).is_some_and(|m| m <= y) {
            return self.n_pow(level);
        }
        let Some(lim) = self.lower_tail(level - 1) else {
            return Ok(0);
        };
        let mut sum = 0u128;
        for &p in &self.primes {
            if (p as u128).saturating_mul(lim) > y {
                break;
            }
            sum += self.kappa_rec(level - 1, y / p as u128, nodes)?;
        }
        Ok(sum)
    }

    /// `π^k(x)`: distinct products, enumerated as non-decreasing tuples.
    pub fn pi(&self, k: u32, x: f64) -> Result<u128> {
        if k == 0 {
            return Ok((x >= 1.0) as u128);
        }
        match self.reduce_x(k, x)? {
            None => binomial_u128(self.primes.len() as u128 + k as u128 - 1, k as u128),
            Some(y) => self.pi_int(k, y),
        }
    }

    /// `π^k(y)` for an integer bound.
    pub fn pi_int(&self, k: u32, y: u128) -> Result<u128> {
        let nodes = AtomicU64::new(0);
        if k <= 1 || !self.cfg.parallel {
            return self.pi_rec(k, y, 0, &nodes);
        }
        let end = self
            .primes
            .partition_point(|&p| (p as u128).checked_pow(k).is_some_and(|m| m <= y));
        (0..end)
            .into_par_iter()
            .map(|i| self.pi_rec(k - 1, y / self.primes[i] as u128, i, &nodes))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }

    fn pi_rec(&self, level: u32, y: u128, start: usize, nodes: &AtomicU64) -> Result<u128> {
        self.tick(nodes)?;
        if level == 0 {
            return Ok((y >= 1) as u128);
        }
        if level == 1 {
            return Ok(self.prefix(y).saturating_sub(start) as u128);
        }
        let n = self.primes.len();
        if start >= n {
            return Ok(0);
        }
        let pmax = self.primes[n - 1] as u128;
        if pmax.checked_pow(level).is_some_and(|m| m <= y) {
            return binomial_u128((n - start) as u128 + level as u128 - 1, level as u128);
        }
        let mut sum = 0u128;
        for i in start..n {
            let p = self.primes[i] as u128;
            if p.checked_pow(level).is_none_or(|m| m > y) {
                break;
            }
            sum += self.pi_rec(level - 1, y / p, i, nodes)?;
        }
        Ok(sum)
    }

    /// Split on the first coordinate: `Σ_{p ∈ ]lo, hi]} κ^{k−1}(x/p)` over
    /// the primes of the table.
    pub fn kappa_outer_sum(&self, k: u32, x: f64, lo: f64, hi: f64) -> Result<u128> {
        assert!(k >= 1);
        let mut sum = 0u128;
        for &p in &self.primes {
            let pf = p as f64;
            if pf > lo && pf <= hi {
                sum += self.kappa(k - 1, (x / pf).floor())?;
            }
        }
        Ok(sum)
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn c(&self) -> u64 {
        self.c
    }
}

fn binomial_u128(n: u128, r: u128) -> Result<u128> {
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc.to_u128()
        .ok_or_else(|| Error::Resource("count overflows 128 bits".into()))
}

/// `κ^k_{B,C}(x)`.
pub fn kappa_exact(params: &GrainParams, x: f64) -> Result<u128> {
    if params.k == 0 {
        return Ok((x >= 1.0) as u128);
    }
    ExactCounter::for_params(params)?.kappa(params.k, x)
}

/// `π^k_{B,C}(x)`.
pub fn pi_exact(params: &GrainParams, x: f64) -> Result<u128> {
    if params.k == 0 {
        return Ok((x >= 1.0) as u128);
    }
    ExactCounter::for_params(params)?.pi(params.k, x)
}
