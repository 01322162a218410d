//! Sortings of prime tuples, their types, and the correction between
//! ordered tuples `κ^k` and distinct products `π^k`.

use crate::error::{Error, Result};
use crate::exact::ExactCounter;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Ordered set partition of the positions `{1, …, k}`: block `i` holds the
/// positions carrying the `i`-th smallest value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sorting {
    blocks: Vec<Vec<usize>>,
}

/// Block sizes of a sorting, in block order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeVector {
    sizes: Vec<usize>,
}

impl Sorting {
    /// Validates and canonicalizes (each block sorted).
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let k: usize = blocks.iter().map(|b| b.len()).sum();
        let mut seen = vec![false; k + 1];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidParams("empty block in sorting".into()));
            }
            b.sort_unstable();
            for &i in b.iter() {
                if i == 0 || i > k || seen[i] {
                    return Err(Error::InvalidParams(format!(
                        "position {i} is out of range or repeated"
                    )));
                }
                seen[i] = true;
            }
        }
        Ok(Sorting { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn k(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// True when some value repeats (a block of size at least 2).
    pub fn is_nontrivial(&self) -> bool {
        self.blocks.iter().any(|b| b.len() > 1)
    }
}

impl TypeVector {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParams("type entries must be positive".into()));
        }
        Ok(TypeVector { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn k(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// Sorting `S(P)` of a tuple: positions grouped by equal value, ascending.
pub fn sorting_of(tuple: &[u64]) -> Sorting {
    let mut idx: Vec<usize> = (0..tuple.len()).collect();
    idx.sort_by_key(|&i| (tuple[i], i));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut last = None;
    for i in idx {
        if last == Some(tuple[i]) {
            blocks.last_mut().unwrap().push(i + 1);
        } else {
            blocks.push(vec![i + 1]);
            last = Some(tuple[i]);
        }
    }
    Sorting { blocks }
}

/// `T(S) = (#S_1, …, #S_r)`.
pub fn type_of(s: &Sorting) -> TypeVector {
    TypeVector {
        sizes: s.blocks.iter().map(|b| b.len()).collect(),
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, i| a * BigUint::from(i))
}

/// Multinomial `k!/(T_1!⋯T_r!)`, the number of sortings of type `T`.
pub fn sortings_count(t: &TypeVector) -> BigUint {
    let mut r = factorial(t.k());
    for &s in &t.sizes {
        r /= factorial(s);
    }
    r
}

/// Ordered Bell number `s(k)`: `s(0) = 1`, `s(k) = Σ_{r<k} C(k,r) s(r)`.
pub fn ordered_bell(k: usize) -> BigUint {
    let mut s: Vec<BigUint> = vec![BigUint::one()];
    for n in 1..=k {
        let mut acc = BigUint::zero();
        let mut c = BigUint::one();
        for r in 0..n {
            acc += &c * &s[r];
            c = c * BigUint::from(n - r) / BigUint::from(r + 1);
        }
        s.push(acc);
    }
    s.swap_remove(k)
}

/// The two bounds on `|π^k − κ^k/k!|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonSquarefreeBound {
    /// `(2^{k−1} − s(k)/k!)·x/B`.
    pub tight: f64,
    /// `2^{k−1}·x/B`.
    pub simple: f64,
}

pub fn nonsquarefree_bound(k: usize, x: f64, b: f64) -> Result<NonSquarefreeBound> {
    if k < 2 {
        return Err(Error::InvalidParams("the correction needs k >= 2".into()));
    }
    if !(x >= 0.0) || !(b > 0.0) {
        return Err(Error::Domain(format!("x = {x}, B = {b}")));
    }
    let pow = 2f64.powi(k as i32 - 1);
    let ratio = ordered_bell(k).to_f64().unwrap() / factorial(k).to_f64().unwrap();
    Ok(NonSquarefreeBound {
        tight: (pow - ratio) * x / b,
        simple: pow * x / b,
    })
}

/// `(2^{k−1} k! − s(k))·x/B`, the unnormalized correction used in error plots.
pub fn nonsquarefree_kappa_scale(k: usize, x: f64, b: f64) -> f64 {
    let f = factorial(k).to_f64().unwrap();
    (2f64.powi(k as i32 - 1) * f - ordered_bell(k).to_f64().unwrap()) * x / b
}

/// Canonical sorting of type `T`: consecutive runs of positions.
pub fn increasing_representative(t: &TypeVector) -> Sorting {
    let mut next = 1;
    let blocks = t
        .sizes
        .iter()
        .map(|&s| {
            let b: Vec<usize> = (next..next + s).collect();
            next += s;
            b
        })
        .collect();
    Sorting { blocks }
}

/// All compositions of `k` (ordered types).
pub fn all_types(k: usize) -> Vec<TypeVector> {
    fn rec(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<TypeVector>) {
        if rem == 0 {
            out.push(TypeVector { sizes: cur.clone() });
            return;
        }
        for s in 1..=rem {
            cur.push(s);
            rec(rem - s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k, &mut Vec::new(), &mut out);
    }
    out
}

/// All sortings (ordered set partitions) of `{1, …, k}`.
pub fn all_sortings(k: usize) -> Vec<Sorting> {
    fn rec(pos: usize, k: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Sorting>) {
        if pos > k {
            out.push(Sorting {
                blocks: blocks.clone(),
            });
            return;
        }
        for i in 0..blocks.len() {
            blocks[i].push(pos);
            rec(pos + 1, k, blocks, out);
            blocks[i].pop();
        }
        for i in 0..=blocks.len() {
            blocks.insert(i, vec![pos]);
            rec(pos + 1, k, blocks, out);
            blocks.remove(i);
        }
    }
    let mut out = Vec::new();
    rec(1, k, &mut Vec::new(), &mut out);
    out
}

/// `#A_{S(T)}(x)`: strictly increasing prime tuples `q_1 < … < q_r` from
/// `]B, C]` with `Π q_i^{T_i} ≤ x`.
pub fn count_of_type(counter: &ExactCounter, t: &TypeVector, x: f64) -> u128 {
    fn rec(primes: &[u64], sizes: &[usize], start: usize, y: u128) -> u128 {
        let Some((&e, rest)) = sizes.split_first() else {
            return (y >= 1) as u128;
        };
        let mut n = 0;
        for i in start..primes.len() {
            let Some(pe) = (primes[i] as u128).checked_pow(e as u32) else {
                break;
            };
            if pe > y {
                break;
            }
            n += rec(primes, rest, i + 1, y / pe);
        }
        n
    }
    if !(x >= 1.0) {
        return 0;
    }
    let y = if x >= u128::MAX as f64 {
        u128::MAX
    } else {
        x.floor() as u128
    };
    rec(counter.primes(), &t.sizes, 0, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(b: &[&[usize]]) -> Sorting {
        Sorting::new(b.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    #[test]
    fn sorting_examples() {
        assert_eq!(sorting_of(&[11, 11]), s(&[&[1, 2]]));
        assert_eq!(sorting_of(&[13, 11]), s(&[&[2], &[1]]));
        assert_eq!(sorting_of(&[11, 13, 11]), s(&[&[1, 3], &[2]]));
        assert_eq!(type_of(&s(&[&[1, 3], &[2]])).sizes(), &[2, 1]);
        assert_eq!(type_of(&s(&[&[2], &[1]])).sizes(), &[1, 1]);
    }

    #[test]
    fn counts() {
        let t = |v: &[usize]| TypeVector::new(v.to_vec()).unwrap();
        assert_eq!(sortings_count(&t(&[1, 1])), 2u32.into());
        assert_eq!(sortings_count(&t(&[2])), 1u32.into());
        assert_eq!(sortings_count(&t(&[2, 1, 1])), 12u32.into());
        let bell: Vec<u64> = (0..6).map(|k| ordered_bell(k).to_u64().unwrap()).collect();
        assert_eq!(bell, vec![1, 1, 3, 13, 75, 541]);
    }

    #[test]
    fn representatives() {
        let t = |v: &[usize]| TypeVector::new(v.to_vec()).unwrap();
        assert_eq!(increasing_representative(&t(&[2])), s(&[&[1, 2]]));
        assert_eq!(increasing_representative(&t(&[1, 1])), s(&[&[1], &[2]]));
        assert_eq!(increasing_representative(&t(&[2, 1])), s(&[&[1, 2], &[3]]));
    }

    #[test]
    fn enumeration_sizes() {
        for k in 0..6 {
            assert_eq!(all_sortings(k).len() as u64, ordered_bell(k).to_u64().unwrap());
            let by_types: BigUint = all_types(k).iter().map(sortings_count).sum();
            if k > 0 {
                assert_eq!(by_types, ordered_bell(k));
            }
        }
    }

    #[test]
    fn bound_examples() {
        let b = nonsquarefree_bound(2, 1.0, 1.0).unwrap();
        assert!((b.tight - 0.5).abs() < 1e-15 && (b.simple - 2.0).abs() < 1e-15);
        let b = nonsquarefree_bound(2, 0.0, 5.0).unwrap();
        assert_eq!(b.tight, 0.0);
        let b = nonsquarefree_bound(4, 1e6, 1e6).unwrap();
        assert!((b.tight - 4.875).abs() < 1e-12 && (b.simple - 8.0).abs() < 1e-15);
        assert!(nonsquarefree_bound(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn invalid_sortings() {
        assert!(Sorting::new(vec![vec![1], vec![1]]).is_err());
        assert!(Sorting::new(vec![vec![]]).is_err());
        assert!(Sorting::new(vec![vec![3]]).is_err());
        assert!(TypeVector::new(vec![1, 0]).is_err());
    }
}
