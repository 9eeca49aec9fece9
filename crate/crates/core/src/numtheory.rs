//! Totient, radical and the divisibility predicates that split index sets.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    num::integer::gcd(a, b)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorisation by trial division, as `(prime, exponent)` pairs in
/// increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize needs n >= 1");
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Product of the distinct primes dividing `n`; `radical(1) = 1`.
pub fn radical(n: u64) -> u64 {
    factorize(n).into_iter().map(|(p, _)| p).product()
}

/// `phi[k]` for `0 <= k <= limit` (with `phi[0] = 0`), by a linear sieve.
pub fn totient_table(limit: usize) -> Vec<u64> {
    let mut phi = vec![0u64; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    if limit >= 1 {
        phi[1] = 1;
    }
    for i in 2..=limit {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u64;
            primes.push(i);
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            if i % p == 0 {
                phi[ip] = phi[i] * p as u64;
                break;
            }
            phi[ip] = phi[i] * (p as u64 - 1);
        }
    }
    phi
}

/// Divisibility-shaped predicate on positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexPredicate {
    All,
    /// `p` does not divide `n`.
    NotDiv(u64),
    /// `p` divides `n` exactly once.
    ExactlyOnce(u64),
    /// `p^2` divides `n`.
    DivBySquare(u64),
    Or(Box<IndexPredicate>, Box<IndexPredicate>),
    And(Box<IndexPredicate>, Box<IndexPredicate>),
}

impl IndexPredicate {
    pub fn not_div(p: u64) -> Result<Self> {
        check_prime(p).map(|_| IndexPredicate::NotDiv(p))
    }

    pub fn exactly_once(p: u64) -> Result<Self> {
        check_prime(p).map(|_| IndexPredicate::ExactlyOnce(p))
    }

    pub fn div_by_square(p: u64) -> Result<Self> {
        check_prime(p).map(|_| IndexPredicate::DivBySquare(p))
    }

    pub fn or(self, other: IndexPredicate) -> Self {
        IndexPredicate::Or(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: IndexPredicate) -> Self {
        IndexPredicate::And(Box::new(self), Box::new(other))
    }

    pub fn evaluate(&self, n: u64) -> bool {
        match self {
            IndexPredicate::All => true,
            IndexPredicate::NotDiv(p) => n % p != 0,
            IndexPredicate::ExactlyOnce(p) => n % p == 0 && n % (p * p) != 0,
            IndexPredicate::DivBySquare(p) => n % (p * p) == 0,
            IndexPredicate::Or(a, b) => a.evaluate(n) || b.evaluate(n),
            IndexPredicate::And(a, b) => a.evaluate(n) && b.evaluate(n),
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

impl fmt::Display for IndexPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexPredicate::All => write!(f, "all"),
            IndexPredicate::NotDiv(p) => write!(f, "ndvd:{p}"),
            IndexPredicate::ExactlyOnce(p) => write!(f, "exact:{p}"),
            IndexPredicate::DivBySquare(p) => write!(f, "sq:{p}"),
            IndexPredicate::Or(a, b) => write!(f, "or({a},{b})"),
            IndexPredicate::And(a, b) => write!(f, "and({a},{b})"),
        }
    }
}

impl FromStr for IndexPredicate {
    type Err = Error;

    /// Accepts `all`, `ndvd:p`, `exact:p`, `sq:p`, `or(a,b)` and `and(a,b)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(IndexPredicate::All);
        }
        for (head, ctor) in [("or(", IndexPredicate::or as fn(_, _) -> _), ("and(", IndexPredicate::and)] {
            if let Some(rest) = s.strip_prefix(head) {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unclosed predicate {s:?}")))?;
                let (l, r) = split_top_level_comma(inner)
                    .ok_or_else(|| Error::Parse(format!("expected two operands in {s:?}")))?;
                return Ok(ctor(l.parse()?, r.parse()?));
            }
        }
        let (tag, num) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown predicate {s:?}")))?;
        let p: u64 = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime in {s:?}")))?;
        match tag.trim() {
            "ndvd" => IndexPredicate::not_div(p),
            "exact" => IndexPredicate::exactly_once(p),
            "sq" => IndexPredicate::div_by_square(p),
            _ => Err(Error::Parse(format!("unknown predicate {s:?}"))),
        }
    }
}

fn split_top_level_comma(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}
