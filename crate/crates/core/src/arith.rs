//! Exact rational helpers and the `Prime` newtype.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a"`, `"-a"`, or `"a/b"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse { at: format!("{t:?}"), msg: "expected rational \"num/den\"".into() };
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse { at: format!("{t:?}"), msg: "zero denominator".into() });
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// A rational prime, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    pub fn rational(self) -> Rational {
        Rational::from_integer(self.big())
    }

    /// Least positive quadratic non-residue modulo an odd prime.
    pub fn least_nonresidue(self) -> u64 {
        debug_assert!(!self.is_two());
        (2..self.0).find(|&a| legendre_u64(a, self.0) == -1).expect("odd prime has a non-residue")
    }
}

impl TryFrom<u64> for Prime {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn check_same_prime(a: Prime, b: Prime) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::PrimeMismatch(a.get(), b.get()))
    }
}

/// Legendre symbol of `a` modulo an odd prime `p` via Euler's criterion.
pub fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn strip(n: &BigInt, p: &BigInt) -> (BigInt, i64) {
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if r.is_zero() {
            n = q;
            k += 1;
        } else {
            return (n, k);
        }
    }
}

/// Normalized p-adic valuation of a nonzero rational.
pub fn valuation(a: &Rational, p: Prime) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::Zero("valuation of zero"));
    }
    let pb = p.big();
    let (_, vn) = strip(a.numer(), &pb);
    let (_, vd) = strip(a.denom(), &pb);
    Ok(vn - vd)
}

/// Splits `a = p^v · u` and returns `(v, u)` with `u` a p-adic unit.
pub fn split_unit(a: &Rational, p: Prime) -> Result<(i64, Rational)> {
    let v = valuation(a, p)?;
    let u = a / pow_rat(&p.rational(), v);
    Ok((v, u))
}

pub fn pow_rat(base: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

/// Reduction of a p-integral rational modulo `m` (any modulus coprime to the
/// denominator).
pub fn reduce_mod(a: &Rational, m: u64) -> Result<u64> {
    let mb = BigInt::from(m);
    let d = a.denom().mod_floor(&mb);
    let dinv = inverse_mod(&d, &mb).ok_or_else(|| Error::Invalid(format!("{} not integral mod {m}", fmt_rational(a))))?;
    let n = a.numer().mod_floor(&mb);
    let r = (n * dinv).mod_floor(&mb);
    Ok(r.to_u64().expect("residue fits"))
}

pub fn inverse_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if g.gcd.is_one() || g.gcd == -BigInt::one() {
        Some((g.x * g.gcd.signum()).mod_floor(m))
    } else {
        None
    }
}

/// True if the rational has no `p` in its denominator.
pub fn is_p_integral(a: &Rational, p: Prime) -> bool {
    a.is_zero() || !a.denom().is_multiple_of(&p.big())
}

pub fn abs_rat(a: &Rational) -> Rational {
    a.abs()
}
