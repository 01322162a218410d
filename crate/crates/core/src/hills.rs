//! Polynomial hills `m̃^k`: `m̃^1` is the indicator of `[0, 1[`, and
//! `m̃^k = M m̃^{k−1}` with the unit window operator `(Mf)(ξ) = ∫_{ξ−1}^ξ f`.
//!
//! These are the uniform B-splines (Irwin–Hall densities). Pieces are held
//! in exact rational arithmetic so continuity and symmetry checks are exact.

use crate::error::{Error, Result};
use crate::poly::{int, RationalPoly};
use crate::quad::{integrate, Tolerance};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::sync::{Arc, Mutex, OnceLock};

/// Piecewise polynomial on unit-spaced integer knots, zero outside
/// `[knots[0], knots[n][`, right-continuous at every knot.
///
/// Piece `j` covers `[knots[j], knots[j+1][` and is stored in the local
/// variable `t = ξ − knots[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    knots: Vec<i64>,
    pieces: Vec<RationalPoly>,
    // float coefficients about the left and right knot of each piece; the
    // nearer one is used so small values near the support ends keep their
    // relative accuracy
    left: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
}

impl PiecewisePoly {
    /// `knots` must be consecutive integers and `pieces.len() + 1 == knots.len()`.
    pub fn new(knots: Vec<i64>, pieces: Vec<RationalPoly>) -> Self {
        assert_eq!(knots.len(), pieces.len() + 1, "one piece per knot interval");
        assert!(
            knots.windows(2).all(|w| w[1] == w[0] + 1),
            "knots must be unit-spaced"
        );
        let left = pieces.iter().map(|p| p.to_f64_coeffs()).collect();
        let right = pieces.iter().map(|p| p.shift(&int(1)).to_f64_coeffs()).collect();
        PiecewisePoly {
            knots,
            pieces,
            left,
            right,
        }
    }

    pub fn knots(&self) -> &[i64] {
        &self.knots
    }

    /// Piece polynomials in the local variable `ξ − knots[j]`.
    pub fn pieces(&self) -> &[RationalPoly] {
        &self.pieces
    }

    /// Largest piece degree (`None` if every piece is zero).
    pub fn degree(&self) -> Option<usize> {
        self.pieces.iter().filter_map(|p| p.degree()).max()
    }

    fn piece_of(&self, xi: f64) -> Option<(usize, f64)> {
        let lo = self.knots[0] as f64;
        let hi = *self.knots.last().unwrap() as f64;
        if !(xi >= lo) || xi >= hi {
            return None;
        }
        let j = ((xi - lo).floor() as usize).min(self.pieces.len() - 1);
        Some((j, xi - (self.knots[j] as f64)))
    }

    /// Value at `xi` in floating point.
    pub fn eval(&self, xi: f64) -> f64 {
        match self.piece_of(xi) {
            None => 0.0,
            Some((j, t)) => self.eval_piece(j, t),
        }
    }

    /// Value of piece `j` at local coordinate `t`, with no range check.
    pub fn eval_piece(&self, j: usize, t: f64) -> f64 {
        if t < 0.5 {
            horner(&self.left[j], t)
        } else {
            horner(&self.right[j], t - 1.0)
        }
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, xi: &BigRational) -> BigRational {
        let lo = int(self.knots[0]);
        let hi = int(*self.knots.last().unwrap());
        if *xi < lo || *xi >= hi {
            return BigRational::zero();
        }
        let j = (xi - &lo).floor().to_integer().to_usize().unwrap();
        self.pieces[j].eval(&(xi - int(self.knots[j])))
    }

    /// Limit from the left at knot index `j`.
    pub fn left_limit(&self, j: usize) -> BigRational {
        if j == 0 || j > self.pieces.len() {
            return BigRational::zero();
        }
        self.pieces[j - 1].eval(&int(1))
    }

    /// Limit from the right at knot index `j`.
    pub fn right_limit(&self, j: usize) -> BigRational {
        if j >= self.pieces.len() {
            return BigRational::zero();
        }
        self.pieces[j].eval(&BigRational::zero())
    }

    /// Jump (right limit minus left limit) at knot index `j`.
    pub fn jump(&self, j: usize) -> BigRational {
        self.right_limit(j) - self.left_limit(j)
    }

    /// Piecewise derivative; jumps become invisible (no Dirac parts).
    pub fn derivative(&self) -> PiecewisePoly {
        PiecewisePoly::new(
            self.knots.clone(),
            self.pieces.iter().map(|p| p.derivative()).collect(),
        )
    }

    /// `ℓ`-fold derivative.
    pub fn derivative_n(&self, ell: usize) -> PiecewisePoly {
        let mut d = self.clone();
        for _ in 0..ell {
            d = d.derivative();
        }
        d
    }

    /// `∫ f` over the whole support, exactly.
    pub fn integral(&self) -> BigRational {
        self.pieces
            .iter()
            .map(|p| p.antiderivative().eval(&int(1)))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Exact `M f`, supported on one more unit interval.
    pub fn mean_operator(&self) -> PiecewisePoly {
        let n = self.pieces.len();
        let anti: Vec<RationalPoly> = self.pieces.iter().map(|p| p.antiderivative()).collect();
        let mut cum = Vec::with_capacity(n + 1);
        let mut acc = BigRational::zero();
        for a in &anti {
            cum.push(acc.clone());
            acc += a.eval(&int(1));
        }
        let total = acc;
        // F on piece j, local variable t
        let big_f = |j: isize| -> RationalPoly {
            if j < 0 {
                RationalPoly::zero()
            } else if (j as usize) < n {
                &anti[j as usize] + &RationalPoly::constant(cum[j as usize].clone())
            } else {
                RationalPoly::constant(total.clone())
            }
        };
        let pieces = (0..=n as isize).map(|j| &big_f(j) - &big_f(j - 1)).collect();
        let mut knots = self.knots.clone();
        knots.push(knots.last().unwrap() + 1);
        PiecewisePoly::new(knots, pieces)
    }

    /// `(M f)(ξ)` evaluated through the exact antiderivative.
    pub fn mean_at(&self, xi: f64) -> f64 {
        self.antiderivative_at(xi) - self.antiderivative_at(xi - 1.0)
    }

    fn antiderivative_at(&self, xi: f64) -> f64 {
        let lo = self.knots[0] as f64;
        if xi <= lo {
            return 0.0;
        }
        let mut acc = 0.0;
        for (j, p) in self.pieces.iter().enumerate() {
            let a = p.antiderivative();
            let k = self.knots[j] as f64;
            if xi >= k + 1.0 {
                acc += a.eval_f64(1.0);
            } else {
                acc += a.eval_f64(xi - k);
                break;
            }
        }
        acc
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// Exact representation of `m̃^k`, `k ≥ 1`.
pub fn hill_build(k: u32) -> PiecewisePoly {
    assert!(k >= 1, "the hill m̃^0 is a Dirac distribution");
    let mut h = PiecewisePoly::new(vec![0, 1], vec![RationalPoly::one()]);
    for _ in 1..k {
        h = h.mean_operator();
    }
    h
}

/// Shared cached hill `m̃^k`.
pub fn hill(k: u32) -> Arc<PiecewisePoly> {
    static CACHE: OnceLock<Mutex<Vec<Arc<PiecewisePoly>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut v = cache.lock().unwrap();
    while v.len() < k as usize {
        let next = match v.last() {
            None => hill_build(1),
            Some(h) => h.mean_operator(),
        };
        v.push(Arc::new(next));
    }
    v[k as usize - 1].clone()
}

fn binom_f64(n: u32, r: u32) -> f64 {
    let mut b = 1.0;
    for i in 0..r {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

fn factorial_f64(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `D^ℓ m̃^k(ξ) = (1/(k−1−ℓ)!)·Σ_{0≤i≤⌊ξ⌋} C(k,i)(−1)^i (ξ−i)^{k−1−ℓ}`,
/// right-continuous, zero outside `[0, k[`.
pub fn hill_eval(k: u32, ell: u32, xi: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("the hill m̃^0 is a distribution".into()));
    }
    if ell >= k {
        return Err(Error::Domain(format!(
            "D^{ell} m̃^{k} is distribution-valued"
        )));
    }
    if !(xi >= 0.0) || xi >= k as f64 {
        return Ok(0.0);
    }
    let e = k - 1 - ell;
    let top = xi.floor() as u32;
    let mut s = 0.0;
    for i in 0..=top {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binom_f64(k, i) * (xi - i as f64).powi(e as i32);
    }
    Ok(s / factorial_f64(e))
}

/// `(M f)(ξ) = ∫_{ξ−1}^{ξ} f` by adaptive quadrature.
pub fn mean_operator<F: Fn(f64) -> f64>(f: F, xi: f64, breakpoints: &[f64]) -> f64 {
    integrate(f, xi - 1.0, xi, breakpoints, Tolerance::default()).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn first_hills() {
        let h1 = hill_build(1);
        assert_eq!(h1.pieces(), &[RationalPoly::one()]);
        let h2 = hill_build(2);
        assert_eq!(h2.knots(), &[0, 1, 2]);
        assert_eq!(h2.pieces()[0], RationalPoly::from_i64(&[0, 1]));
        // 2 − ξ in local t = ξ − 1 is 1 − t
        assert_eq!(h2.pieces()[1], RationalPoly::from_i64(&[1, -1]));
        let h3 = hill_build(3);
        assert!((h3.eval(1.5) - 0.75).abs() < 1e-15);
        assert_eq!(h3.eval_exact(&rat(3, 2)), rat(3, 4));
    }

    #[test]
    fn explicit_derivatives() {
        assert_eq!(hill_eval(2, 0, 1.0).unwrap(), 1.0);
        assert_eq!(hill_eval(4, 3, 1.5).unwrap(), -3.0);
        assert_eq!(hill_eval(3, 0, -0.5).unwrap(), 0.0);
        assert!(matches!(hill_eval(3, 3, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn mean_examples() {
        assert!((mean_operator(|_| 1.0, 0.3, &[]) - 1.0).abs() < 1e-15);
        let h1 = hill_build(1);
        assert!((h1.mean_at(1.0) - 1.0).abs() < 1e-15);
        let h2 = hill_build(2);
        assert!((h2.mean_at(0.5) - 0.125).abs() < 1e-15);
        let q = mean_operator(|x| h2.eval(x), 0.5, &[0.0, 1.0]);
        assert!((q - 0.125).abs() < 1e-14);
    }

    #[test]
    fn cache_matches_build() {
        assert_eq!(*hill(5), hill_build(5));
        assert_eq!(*hill(2), hill_build(2));
    }
}
