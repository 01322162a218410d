//! Exact Sturm-sequence verification of the positivity condition
//! `g_{k,s}(0) > 0` and `g_{k,s}` has no zero on `]0, 1[`, where
//! `g_{k,s}(T) = F_k(Σ_{1≤ℓ≤s} (1−T)^ℓ/ℓ, T)` and
//! `F_k(τ, T) = Σ_{ℓ≤k−2} τ^ℓ/ℓ! − ((1−(1−T)^k)/T)(1 − τ^{k−1}T/(k−1)!)`.

use crate::error::{Error, Result};
use crate::poly::{int, IntPoly, RationalPoly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Largest `s` tried by [`min_s`].
pub const MAX_S: u32 = 12;

/// Polynomial in `(τ, T)`, stored as coefficients of `τ^ℓ` in `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariatePoly {
    by_tau: Vec<RationalPoly>,
}

impl BivariatePoly {
    pub fn tau_coeffs(&self) -> &[RationalPoly] {
        &self.by_tau
    }

    /// Coefficient of `τ^i T^j`.
    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        self.by_tau
            .get(i)
            .map(|p| p.coeff(j))
            .unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, tau: &BigRational, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for p in self.by_tau.iter().rev() {
            acc = acc * tau + p.eval(t);
        }
        acc
    }

    /// `F(σ(T), T)`.
    pub fn substitute_tau(&self, sigma: &RationalPoly) -> RationalPoly {
        let mut acc = RationalPoly::zero();
        for p in self.by_tau.iter().rev() {
            acc = &(&acc * sigma) + p;
        }
        acc
    }
}

fn factorial(n: u32) -> BigRational {
    (1..=n as i64).fold(BigRational::one(), |a, i| a * int(i))
}

fn one_minus_t() -> RationalPoly {
    RationalPoly::from_i64(&[1, -1])
}

/// `F_k(τ, T)` with the division by `T` carried out symbolically.
pub fn build_f(k: u32) -> Result<BivariatePoly> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("F_k needs k >= 2, got {k}")));
    }
    let top = &RationalPoly::one() - &one_minus_t().pow(k);
    // (1 − (1−T)^k)/T
    let (q, r) = top.div_rem(&RationalPoly::x());
    debug_assert!(r.is_zero());
    let mut by_tau = Vec::with_capacity(k as usize);
    by_tau.push(&RationalPoly::one() - &q);
    for l in 1..=k - 2 {
        by_tau.push(RationalPoly::constant(BigRational::one() / factorial(l)));
    }
    let last = (&q * &RationalPoly::x()).scale(&(BigRational::one() / factorial(k - 1)));
    by_tau.push(last);
    Ok(BivariatePoly { by_tau })
}

/// `σ_s(T) = Σ_{1≤ℓ≤s} (1−T)^ℓ/ℓ`.
pub fn sigma(s: u32) -> RationalPoly {
    let mut acc = RationalPoly::zero();
    let base = one_minus_t();
    let mut pw = RationalPoly::one();
    for l in 1..=s {
        pw = &pw * &base;
        acc = &acc + &pw.scale(&(BigRational::one() / int(l as i64)));
    }
    acc
}

/// `g_{k,s}(T)`.
pub fn build_g(k: u32, s: u32) -> Result<RationalPoly> {
    if s < 1 {
        return Err(Error::InvalidParams("s must be at least 1".into()));
    }
    Ok(build_f(k)?.substitute_tau(&sigma(s)))
}

/// `g_{k,s}` with every factor `(1−T)` removed.
pub fn reduced_g(k: u32, s: u32) -> Result<RationalPoly> {
    let mut h = build_g(k, s)?;
    let d = one_minus_t();
    while !h.is_zero() && h.eval(&BigRational::one()).is_zero() {
        let (q, r) = h.div_rem(&d);
        debug_assert!(r.is_zero());
        h = q;
    }
    Ok(h)
}

/// Canonical Sturm chain as primitive integer polynomials (each member
/// differs from the classical chain by a positive factor).
pub fn sturm_chain(p: &RationalPoly) -> Vec<IntPoly> {
    let p0 = p.to_primitive_int();
    if p0.is_zero() {
        return vec![p0];
    }
    let p1 = p0.derivative().primitive();
    let mut chain = vec![p0, p1];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].pseudo_rem_abs(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.neg().primitive());
    }
    chain
}

fn variations(chain: &[IntPoly], num: &BigInt, den: &BigInt) -> usize {
    let mut last = 0;
    let mut v = 0;
    for p in chain {
        let s = p.sign_at(num, den);
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

fn split(q: &BigRational) -> (BigInt, BigInt) {
    // BigRational keeps a positive denominator
    (q.numer().clone(), q.denom().clone())
}

/// Number of distinct real roots of `p` in `]a, b[`.
pub fn sturm_root_count(p: &RationalPoly, a: &BigRational, b: &BigRational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Precondition("the zero polynomial has every point as root".into()));
    }
    if a >= b {
        return Err(Error::Precondition("need a < b".into()));
    }
    if p.eval(a).is_zero() || p.eval(b).is_zero() {
        return Err(Error::Precondition("an interval endpoint is a root".into()));
    }
    let chain = sturm_chain(p);
    let (an, ad) = split(a);
    let (bn, bd) = split(b);
    let va = variations(&chain, &an, &ad);
    let vb = variations(&chain, &bn, &bd);
    Ok(va - vb)
}

/// `g_{k,s}(0) > 0` and `g_{k,s}/(1−T)^m` has no root in `]0, 1[`.
pub fn verify_positivity(k: u32, s: u32) -> Result<bool> {
    if k < 3 {
        return Err(Error::InvalidParams(format!("positivity check needs k >= 3, got {k}")));
    }
    let g = build_g(k, s)?;
    if !g.eval(&BigRational::zero()).is_positive() {
        return Ok(false);
    }
    let h = reduced_g(k, s)?;
    Ok(sturm_root_count(&h, &BigRational::zero(), &BigRational::one())? == 0)
}

/// Smallest `s ≤ MAX_S` passing [`verify_positivity`].
pub fn min_s(k: u32) -> Result<u32> {
    if !(3..=9).contains(&k) {
        return Err(Error::InvalidParams(format!("k = {k} outside 3..=9")));
    }
    for s in 1..=MAX_S {
        if verify_positivity(k, s)? {
            return Ok(s);
        }
    }
    Err(Error::Resource(format!("no s <= {MAX_S} works for k = {k}")))
}

/// One row of the verification table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SturmRow {
    pub k: u32,
    pub min_s: u32,
    pub degree: usize,
    pub elapsed_secs: f64,
}

/// Minimal `s` and `deg g_{k,s}` for every `k`, computed in parallel.
pub fn sturm_table(ks: &[u32]) -> Result<Vec<SturmRow>> {
    ks.par_iter()
        .map(|&k| {
            let t0 = Instant::now();
            let s = min_s(k)?;
            let degree = build_g(k, s)?.degree().unwrap_or(0);
            Ok(SturmRow {
                k,
                min_s: s,
                degree,
                elapsed_secs: t0.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// CSV rendering `k,min_s,degree,elapsed_secs`.
pub fn sturm_table_csv(rows: &[SturmRow]) -> String {
    let mut out = String::from("k,min_s,degree,elapsed_secs\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{:.3}\n", r.k, r.min_s, r.degree, r.elapsed_secs));
    }
    out
}
