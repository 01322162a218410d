//! Argument parsers: integer expressions, `k` ranges, `α` and ξ grids.
//!
//! Every parser is total: any input string yields a value or a
//! [`ParseError`], never a panic.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{msg} (at byte {pos} of {input:?})")]
pub struct ParseError {
    pub input: String,
    pub pos: usize,
    pub msg: String,
}

fn err<T>(input: &str, pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        input: input.to_string(),
        pos,
        msg: msg.into(),
    })
}

// ---------------------------------------------------------------------------
// Expressions

/// Parsed arithmetic expression over decimal literals with `+ - * ^` and
/// parentheses. `^` binds tightest and associates to the right.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Literal),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

/// Decimal literal `int[.frac][e[±]exp]`, kept as digits so that integer
/// evaluation is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub int: String,
    pub frac: String,
    pub exp: i32,
}

const MAX_DEPTH: usize = 64;
const MAX_LEN: usize = 4096;

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return err(self.src, self.pos, "expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == b'+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let e = if self.peek() == Some(b'-') {
            self.pos += 1;
            Expr::Neg(Box::new(self.unary()?))
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return err(self.src, self.pos, "expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.literal().map(Expr::Num),
            Some(_) => err(self.src, self.pos, "expected a number or '('"),
            None => err(self.src, self.pos, "unexpected end of input"),
        }
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(&c) = self.bytes.get(self.pos) {
            if c.is_ascii_digit() {
                s.push(c as char);
            } else if c != b'_' {
                break;
            }
            self.pos += 1;
        }
        s
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let start = self.pos;
        let int = self.digits();
        let mut frac = String::new();
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if int.is_empty() && frac.is_empty() {
            return err(self.src, start, "malformed number");
        }
        let mut exp = 0i32;
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            let neg = match self.bytes.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let d = self.digits();
            if d.is_empty() {
                return err(self.src, self.pos, "missing exponent digits");
            }
            let v: i32 = match d.parse() {
                Ok(v) if v <= 10_000 => v,
                _ => return err(self.src, self.pos, "exponent too large"),
            };
            exp = if neg { -v } else { v };
        }
        Ok(Literal { int, frac, exp })
    }
}

/// Parses an expression such as `2^37-1`, `1100*10^6` or `1.1e9`.
pub fn parse_expr(s: &str) -> Result<Expr, ParseError> {
    if s.len() > MAX_LEN {
        return err(s, 0, "expression too long");
    }
    let mut p = Parser {
        src: s,
        bytes: s.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return err(s, p.pos, "trailing input");
    }
    Ok(e)
}

impl Literal {
    fn to_i128(&self) -> Option<i128> {
        let digits = format!("{}{}", self.int, self.frac);
        let shift = self.exp as i64 - self.frac.len() as i64;
        let digits = digits.trim_start_matches('0');
        let (digits, shift) = if shift < 0 {
            // the dropped digits must be zeros
            let cut = (-shift) as usize;
            if cut > digits.len() {
                return digits.is_empty().then_some(0);
            }
            let (keep, drop) = digits.split_at(digits.len() - cut);
            if drop.bytes().any(|c| c != b'0') {
                return None;
            }
            (keep, 0)
        } else {
            (digits, shift)
        };
        let mut v: i128 = 0;
        for c in digits.bytes() {
            v = v.checked_mul(10)?.checked_add((c - b'0') as i128)?;
        }
        if v == 0 {
            return Some(0);
        }
        let shift = u32::try_from(shift).ok()?;
        v.checked_mul(10i128.checked_pow(shift)?)
    }

    fn to_f64(&self) -> f64 {
        let int = if self.int.is_empty() { "0" } else { &self.int };
        let frac = if self.frac.is_empty() { "0" } else { &self.frac };
        format!("{int}.{frac}e{}", self.exp).parse().unwrap_or(f64::NAN)
    }
}

impl Expr {
    /// Exact integer value; `None` on overflow, a fractional literal or a
    /// negative exponent.
    pub fn eval_i128(&self) -> Option<i128> {
        match self {
            Expr::Num(l) => l.to_i128(),
            Expr::Neg(a) => a.eval_i128()?.checked_neg(),
            Expr::Add(a, b) => a.eval_i128()?.checked_add(b.eval_i128()?),
            Expr::Sub(a, b) => a.eval_i128()?.checked_sub(b.eval_i128()?),
            Expr::Mul(a, b) => a.eval_i128()?.checked_mul(b.eval_i128()?),
            Expr::Pow(a, b) => {
                let base = a.eval_i128()?;
                let e = u32::try_from(b.eval_i128()?).ok()?;
                match base {
                    0 | 1 => Some(if e == 0 { 1 } else { base }),
                    -1 => Some(if e % 2 == 0 { 1 } else { -1 }),
                    _ if e > 127 => None,
                    _ => base.checked_pow(e),
                }
            }
        }
    }

    pub fn eval_f64(&self) -> f64 {
        match self {
            Expr::Num(l) => l.to_f64(),
            Expr::Neg(a) => -a.eval_f64(),
            Expr::Add(a, b) => a.eval_f64() + b.eval_f64(),
            Expr::Sub(a, b) => a.eval_f64() - b.eval_f64(),
            Expr::Mul(a, b) => a.eval_f64() * b.eval_f64(),
            Expr::Pow(a, b) => a.eval_f64().powf(b.eval_f64()),
        }
    }
}

/// A non-negative integer that fits in `u64`.
pub fn parse_u64(s: &str) -> Result<u64, ParseError> {
    let e = parse_expr(s)?;
    match e.eval_i128() {
        Some(v) => u64::try_from(v).or_else(|_| err(s, 0, "value out of range for u64")),
        None => err(s, 0, "not an integer in range"),
    }
}

/// A finite real number.
pub fn parse_f64(s: &str) -> Result<f64, ParseError> {
    let v = parse_expr(s)?.eval_f64();
    if v.is_finite() {
        Ok(v)
    } else {
        err(s, 0, "value is not finite")
    }
}

// ---------------------------------------------------------------------------
// k ranges

/// Largest `k` accepted by [`parse_k_range`].
pub const MAX_K: u32 = 64;

/// `k` values: `3`, `3..7` (inclusive), `3..=7`, or a comma list of these.
/// The result is sorted and without repeats.
pub fn parse_k_range(s: &str) -> Result<Vec<u32>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in s.split(',') {
        let p = part.trim();
        let one = |t: &str| -> Result<u32, ParseError> {
            match t.trim().parse::<u32>() {
                Ok(v) if v <= MAX_K => Ok(v),
                Ok(_) => err(s, offset, format!("k above {MAX_K}")),
                Err(_) => err(s, offset, format!("not a k value: {t:?}")),
            }
        };
        if let Some((a, b)) = p.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b) = (one(a)?, one(b)?);
            if a > b {
                return err(s, offset, "empty range");
            }
            out.extend(a..=b);
        } else {
            out.push(one(p)?);
        }
        offset += part.len() + 1;
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

// ---------------------------------------------------------------------------
// α

/// How `C` is given relative to `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSpec {
    /// `C = B^{1+α}`.
    Alpha(f64),
    /// `s` in `C = ⌊B^s⌋`, written `1.25exp`.
    Exponent(f64),
}

pub fn parse_alpha(s: &str) -> Result<AlphaSpec, ParseError> {
    let t = s.trim();
    if let Some(num) = t.strip_suffix("exp") {
        let v = parse_f64(num)?;
        if !(v > 1.0) {
            return err(s, 0, "exponent must exceed 1");
        }
        return Ok(AlphaSpec::Exponent(v));
    }
    let v = parse_f64(t)?;
    if !(v > 0.0) {
        return err(s, 0, "alpha must be positive");
    }
    Ok(AlphaSpec::Alpha(v))
}

// ---------------------------------------------------------------------------
// ξ grids

/// Largest number of grid points accepted by [`parse_xi_grid`].
pub const MAX_GRID: usize = 1_000_000;

/// `start:stop:step`, inclusive of `stop` up to rounding. Points are
/// `start + i·step`.
pub fn parse_xi_grid(s: &str) -> Result<Vec<f64>, ParseError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return err(s, 0, "expected start:stop:step");
    }
    let start = parse_f64(parts[0])?;
    let stop = parse_f64(parts[1])?;
    let step = parse_f64(parts[2])?;
    if !(step > 0.0) {
        return err(s, 0, "step must be positive");
    }
    if !(start < stop) {
        return err(s, 0, "start must be below stop");
    }
    let n = ((stop - start) / step + 1e-9).floor();
    if !(n < MAX_GRID as f64) {
        return err(s, 0, format!("more than {MAX_GRID} points"));
    }
    Ok((0..=n as usize).map(|i| start + i as f64 * step).collect())
}
