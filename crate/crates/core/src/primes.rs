//! Segmented sieve, prime counting, the logarithmic integral and explicit
//! bounds on `|π(x) − li(x)|`.

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// Default sieve segment length (entries).
pub const DEFAULT_SEGMENT: u64 = 1 << 20;

/// Default memory budget for a [`PrimeTable`] bitset, in bytes.
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 30;

/// Which explicit bound `Ê` on `|π(x) − li(x)|` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorBoundMode {
    /// `Ê(x) = √x·ln x / 8π`, valid for `x ≥ 2657` under the Riemann hypothesis.
    Riemann,
    /// `Ê(x) = 2.3854·x / ln³x`, unconditional for `x > 355 991`.
    Dusart,
}

impl ErrorBoundMode {
    /// Smallest argument accepted in Riemann mode.
    pub const RIEMANN_FLOOR: f64 = 2657.0;
    /// Arguments must exceed this in Dusart mode.
    pub const DUSART_FLOOR: f64 = 355_991.0;
    const DUSART_CONST: f64 = 2.3854;

    pub fn name(self) -> &'static str {
        match self {
            ErrorBoundMode::Riemann => "riemann",
            ErrorBoundMode::Dusart => "dusart",
        }
    }

    /// True if `x` lies in the validity range of the bound.
    pub fn is_valid_at(self, x: f64) -> bool {
        match self {
            ErrorBoundMode::Riemann => x >= Self::RIEMANN_FLOOR,
            ErrorBoundMode::Dusart => x > Self::DUSART_FLOOR,
        }
    }

    pub fn check(self, x: f64) -> Result<()> {
        if self.is_valid_at(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{} bound queried at {x}, below its validity floor",
                self.name()
            )))
        }
    }

    /// `Ê(x)` without the validity check.
    pub fn bound_unchecked(self, x: f64) -> f64 {
        let l = x.ln();
        match self {
            ErrorBoundMode::Riemann => x.sqrt() * l / (8.0 * PI),
            ErrorBoundMode::Dusart => Self::DUSART_CONST * x / (l * l * l),
        }
    }

    /// `Ê′(x)` without the validity check.
    pub fn derivative_unchecked(self, x: f64) -> f64 {
        let l = x.ln();
        match self {
            ErrorBoundMode::Riemann => (l + 2.0) / (16.0 * PI * x.sqrt()),
            ErrorBoundMode::Dusart => Self::DUSART_CONST * (l - 3.0) / (l * l * l * l),
        }
    }

    /// `Ê(x)`.
    pub fn bound(self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.bound_unchecked(x))
    }

    /// `Ê′(x)`.
    pub fn derivative(self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(self.derivative_unchecked(x))
    }
}

/// `Ê(x)` for the given mode; domain error below the validity floor.
pub fn pnt_error_bound(x: f64, mode: ErrorBoundMode) -> Result<f64> {
    mode.bound(x)
}

/// Primality bitset over `[lo, hi]`.
///
/// Immutable once built; cheap to share between threads.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    lo: u64,
    hi: u64,
    words: Vec<u64>,
    // number of set bits in words[..i]
    rank: Vec<u64>,
}

/// Sieve configuration.
#[derive(Debug, Clone, Copy)]
pub struct SieveConfig {
    pub segment: u64,
    pub max_bytes: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment: DEFAULT_SEGMENT,
            max_bytes: DEFAULT_SIEVE_BUDGET,
        }
    }
}

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Builds the prime table for `[lo, hi]` with the default configuration.
pub fn sieve_range(lo: u64, hi: u64) -> Result<PrimeTable> {
    sieve_range_with(lo, hi, SieveConfig::default())
}

/// Builds the prime table for `[lo, hi]`.
pub fn sieve_range_with(lo: u64, hi: u64, cfg: SieveConfig) -> Result<PrimeTable> {
    if lo < 2 || lo > hi {
        return Err(Error::InvalidParams(format!(
            "sieve range [{lo}, {hi}] must satisfy 2 <= lo <= hi"
        )));
    }
    let len = hi - lo + 1;
    let nwords = len.div_ceil(64);
    if nwords.saturating_mul(16) > cfg.max_bytes {
        return Err(Error::Resource(format!(
            "sieve of {len} entries exceeds the {} byte budget",
            cfg.max_bytes
        )));
    }
    let base = small_primes(isqrt(hi));
    let seg = cfg.segment.max(64).div_ceil(64) * 64;
    let nseg = len.div_ceil(seg);

    let chunks: Vec<Vec<u64>> = (0..nseg)
        .into_par_iter()
        .map(|s| {
            let start = lo + s * seg;
            let end = (start + seg - 1).min(hi);
            let n = (end - start + 1) as usize;
            let mut w = vec![u64::MAX; n.div_ceil(64)];
            if n % 64 != 0 {
                let last = w.len() - 1;
                w[last] = (1u64 << (n % 64)) - 1;
            }
            for &p in &base {
                if p * p > end {
                    break;
                }
                let first = (p * p).max(start.div_ceil(p) * p);
                let mut m = first;
                while m <= end {
                    let i = (m - start) as usize;
                    w[i >> 6] &= !(1u64 << (i & 63));
                    m += p;
                }
            }
            w
        })
        .collect();

    let mut words = Vec::with_capacity(nwords as usize);
    for c in chunks {
        words.extend(c);
    }
    let mut rank = Vec::with_capacity(words.len() + 1);
    let mut acc = 0u64;
    for w in &words {
        rank.push(acc);
        acc += w.count_ones() as u64;
    }
    rank.push(acc);
    Ok(PrimeTable {
        lo,
        hi,
        words,
        rank,
    })
}

impl PrimeTable {
    pub fn segment_lo(&self) -> u64 {
        self.lo
    }

    pub fn segment_hi(&self) -> u64 {
        self.hi
    }

    /// Number of primes in the table.
    pub fn len(&self) -> u64 {
        *self.rank.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Primality of `n`; `None` outside the table range.
    pub fn is_prime(&self, n: u64) -> Option<bool> {
        if n < self.lo || n > self.hi {
            return None;
        }
        let i = (n - self.lo) as usize;
        Some(self.words[i >> 6] >> (i & 63) & 1 == 1)
    }

    /// Number of primes `p` in the table with `p <= n`.
    pub fn count_upto(&self, n: u64) -> u64 {
        if n < self.lo {
            return 0;
        }
        if n >= self.hi {
            return self.len();
        }
        let i = (n - self.lo) as usize;
        let wi = i >> 6;
        let bits = i & 63;
        let mask = if bits == 63 {
            u64::MAX
        } else {
            (1u64 << (bits + 1)) - 1
        };
        self.rank[wi] + (self.words[wi] & mask).count_ones() as u64
    }

    /// `π(n)` for `n <= hi`; requires a table starting at 2.
    pub fn pi(&self, n: u64) -> Result<u64> {
        if self.lo != 2 {
            return Err(Error::Precondition(
                "π needs a table starting at 2".into(),
            ));
        }
        if n > self.hi {
            return Err(Error::Domain(format!(
                "π({n}) beyond the table limit {}",
                self.hi
            )));
        }
        Ok(self.count_upto(n))
    }

    /// All primes of the table in ascending order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let base = self.lo + 64 * wi as u64;
            BitIter(w).map(move |b| base + b as u64)
        })
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let t = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(t)
    }
}

/// Primes in the half-open range `]a, b]`, ascending.
pub fn primes_between(a: u64, b: u64) -> Result<Vec<u64>> {
    let lo = (a + 1).max(2);
    if b < lo {
        return Ok(Vec::new());
    }
    Ok(sieve_range(lo, b)?.primes().collect())
}

/// `π(x)`, the number of primes `<= x`.
pub fn prime_count(x: f64) -> Result<u64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("π({x}) needs x >= 0")));
    }
    let n = x.floor();
    if n < 2.0 {
        return Ok(0);
    }
    if n > u64::MAX as f64 {
        return Err(Error::Resource(format!("π({x}) is beyond sieve reach")));
    }
    Ok(sieve_range(2, n as u64)?.len())
}

/// Exponential integral `Ei(u)` for real `u ≠ 0`.
pub fn ei(u: f64) -> f64 {
    if u == 0.0 {
        return f64::NEG_INFINITY;
    }
    if u < -1.0 {
        return -e1_continued_fraction(-u);
    }
    // γ + ln|u| + Σ uⁿ/(n·n!)
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut n = 1.0;
    loop {
        term *= u / n;
        let add = term / n;
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() || n > 2000.0 {
            break;
        }
        n += 1.0;
    }
    EULER_GAMMA + u.abs().ln() + sum
}

fn e1_continued_fraction(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

fn li_two() -> f64 {
    static LI2: OnceLock<f64> = OnceLock::new();
    *LI2.get_or_init(|| ei(std::f64::consts::LN_2))
}

/// `li(x) = Ei(ln x)`, evaluated by the exponential-integral series.
pub fn li_series(x: f64) -> Result<f64> {
    check_li_domain(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(ei(x.ln()))
}

fn check_li_domain(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("li({x}) needs finite x >= 0")));
    }
    if x == 1.0 {
        return Err(Error::Domain("li has a logarithmic singularity at 1".into()));
    }
    Ok(())
}

/// Principal-value logarithmic integral `li(x) = ∫_0^x dt/ln t`.
///
/// For `x > 2` this is `li(2) + ∫_2^x dt/ln t`, integrated in `u = ln t`.
pub fn log_integral(x: f64) -> Result<f64> {
    check_li_domain(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= 2.0 {
        return Ok(ei(x.ln()));
    }
    let tol = Tolerance {
        rel: 1e-15,
        abs: 0.0,
        max_depth: 50,
    };
    let r = integrate(|u: f64| u.exp() / u, std::f64::consts::LN_2, x.ln(), &[], tol);
    Ok(li_two() + r.value)
}

/// `li(x)` by a route independent of the `Ei` series: the identity
/// `li(x) = ln|x − 1| + ∫_0^x (1/ln t − 1/(t − 1)) dt`, whose integrand is
/// smooth across `t = 1`.
pub fn li_principal_value_quadrature(x: f64) -> Result<f64> {
    check_li_domain(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let g = |t: f64| {
        let h = t - 1.0;
        if h.abs() < 1e-3 {
            // 1/ln(1+h) − 1/h
            0.5 - h / 12.0 + h * h / 24.0 - 19.0 * h * h * h / 720.0
                + 3.0 * h * h * h * h / 160.0
        } else if t == 0.0 {
            1.0
        } else {
            1.0 / t.ln() - 1.0 / h
        }
    };
    let mut cuts = vec![0.5, 1.0, 2.0];
    let mut p = 10.0;
    while p < x {
        cuts.push(p);
        p *= 4.0;
    }
    let tol = Tolerance {
        rel: 1e-14,
        abs: 0.0,
        max_depth: 50,
    };
    let r = integrate(g, 0.0, x, &cuts, tol);
    Ok((x - 1.0).abs().ln() + r.value)
}

/// One checkpoint of [`verify_pnt`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PntCheckpoint {
    pub x: u64,
    pub pi: u64,
    pub li: f64,
    pub bound: f64,
    /// `bound − |π − li|`, taking the worse side of the jump at primes.
    pub margin: f64,
}

/// Outcome of [`verify_pnt`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PntReport {
    pub x_max: u64,
    pub mode: ErrorBoundMode,
    pub checkpoints: Vec<PntCheckpoint>,
    pub max_abs_diff: f64,
    pub all_pass: bool,
}

impl PntReport {
    /// Plain text, one checkpoint per line.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "# pnt check mode={} x_max={} checkpoints={} max|pi-li|={:.6} all_pass={}\n# x pi li bound margin\n",
            self.mode.name(),
            self.x_max,
            self.checkpoints.len(),
            self.max_abs_diff,
            self.all_pass
        );
        for c in &self.checkpoints {
            s.push_str(&format!(
                "{} {} {:.6} {:.6} {:.6}\n",
                c.x, c.pi, c.li, c.bound, c.margin
            ));
        }
        s
    }
}

/// Checks `|π(x) − li(x)| < Ê(x)` on a checkpoint set up to `x_max`.
///
/// Checkpoints are every prime (both sides of the jump), every `⌊2^{j/8}⌋`,
/// and the caller's extra points, restricted to the validity range of `mode`.
pub fn verify_pnt(x_max: u64, mode: ErrorBoundMode, extra: &[u64]) -> Result<PntReport> {
    let floor = match mode {
        ErrorBoundMode::Riemann => 2657u64,
        ErrorBoundMode::Dusart => 355_992u64,
    };
    if x_max < floor {
        return Err(Error::Domain(format!(
            "x_max = {x_max} is below the {} validity floor",
            mode.name()
        )));
    }
    let table = sieve_range(2, x_max)?;

    let mut points: Vec<u64> = table.primes().filter(|&p| p >= floor).collect();
    let mut j = 0u32;
    loop {
        let v = 2f64.powf(j as f64 / 8.0).floor();
        if v > x_max as f64 {
            break;
        }
        let v = v as u64;
        if v >= floor {
            points.push(v);
        }
        j += 1;
    }
    points.extend(extra.iter().copied().filter(|&v| v >= floor && v <= x_max));
    points.sort_unstable();
    points.dedup();

    let checkpoints: Vec<PntCheckpoint> = points
        .par_iter()
        .map(|&x| -> Result<PntCheckpoint> {
            let pi = table.count_upto(x);
            let li = li_series(x as f64)?;
            let bound = mode.bound(x as f64)?;
            let mut diff = (pi as f64 - li).abs();
            if x > floor && table.is_prime(x) == Some(true) {
                // left limit π(x−0) = π(x) − 1; at the floor itself it lies
                // outside the validity range
                diff = diff.max((li - (pi - 1) as f64).abs());
            }
            Ok(PntCheckpoint {
                x,
                pi,
                li,
                bound,
                margin: bound - diff,
            })
        })
        .collect::<Result<_>>()?;

    let max_abs_diff = checkpoints
        .iter()
        .map(|c| c.bound - c.margin)
        .fold(0.0, f64::max);
    let all_pass = checkpoints.iter().all(|c| c.margin > 0.0);
    Ok(PntReport {
        x_max,
        mode,
        checkpoints,
        max_abs_diff,
        all_pass,
    })
}
