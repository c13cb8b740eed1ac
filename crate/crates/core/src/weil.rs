//! Weil index `γ_ψ` for the additive character `ψ(x) = e^{2πi·λ(x)}` of
//! conductor `ℤ_p`, and a truncated Gauss-sum oracle.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;

use crate::arith::{reduce_mod, split_unit, Prime, Rational};
use crate::error::{Error, Result};
use crate::localfield::{square_class, SquareClass};
use crate::qform::{QuadForm, QuadraticEtale};

/// `ζ₈^k` with `ζ₈ = e^{2πi/8}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mu8(u8);

impl Mu8 {
    pub const ONE: Mu8 = Mu8(0);

    pub fn new(k: i64) -> Self {
        Mu8(k.rem_euclid(8) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn from_sign(s: i8) -> Self {
        if s == 1 {
            Mu8(0)
        } else {
            Mu8(4)
        }
    }

    pub fn inv(self) -> Self {
        Mu8::new(-(self.0 as i64))
    }

    pub fn pow(self, e: i64) -> Self {
        Mu8::new(self.0 as i64 * e)
    }

    /// `Some(±1)` when the value is real.
    pub fn as_sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            4 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, PI * self.0 as f64 / 4.0)
    }
}

impl Mul for Mu8 {
    type Output = Mu8;
    fn mul(self, rhs: Mu8) -> Mu8 {
        Mu8::new(self.0 as i64 + rhs.0 as i64)
    }
}

impl std::iter::Product for Mu8 {
    fn product<I: Iterator<Item = Mu8>>(iter: I) -> Mu8 {
        iter.fold(Mu8::ONE, |a, b| a * b)
    }
}

impl fmt::Display for Mu8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta8^{}", self.0)
    }
}

impl FromStr for Mu8 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = s
            .trim()
            .strip_prefix("zeta8^")
            .and_then(|k| k.parse::<i64>().ok())
            .ok_or_else(|| Error::Parse { at: format!("{s:?}"), msg: "expected \"zeta8^k\"".into() })?;
        Ok(Mu8::new(k))
    }
}

/// Additive character data; only conductor exponent 0 is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdditiveCharacter {
    pub p: Prime,
    pub conductor_exponent: i32,
}

impl AdditiveCharacter {
    pub fn standard(p: Prime) -> Self {
        AdditiveCharacter { p, conductor_exponent: 0 }
    }
}

/// Frozen rank-one tables `(class representative, exponent of γ_ψ(⟨a⟩))`,
/// produced by [`gauss_oracle_stable`] and checked against it in the tests.
pub const WEIL_TABLE_2: [(i64, u8); 8] = [(1, 1), (-1, 7), (2, 1), (-2, 7), (5, 1), (-5, 7), (10, 5), (-10, 3)];
pub const WEIL_TABLE_3: [(i64, u8); 4] = [(1, 0), (2, 0), (3, 2), (6, 6)];
pub const WEIL_TABLE_5: [(i64, u8); 4] = [(1, 0), (2, 0), (5, 0), (10, 4)];
pub const WEIL_TABLE_7: [(i64, u8); 4] = [(1, 0), (3, 0), (7, 2), (21, 6)];
pub const WEIL_TABLE_11: [(i64, u8); 4] = [(1, 0), (2, 0), (11, 2), (22, 6)];

fn frozen_table(p: u64) -> Option<&'static [(i64, u8)]> {
    match p {
        2 => Some(&WEIL_TABLE_2),
        3 => Some(&WEIL_TABLE_3),
        5 => Some(&WEIL_TABLE_5),
        7 => Some(&WEIL_TABLE_7),
        11 => Some(&WEIL_TABLE_11),
        _ => None,
    }
}

/// Odd-prime rule: units give 1; `γ(p·w) = (w/p)·ε_p` with `ε_p = 1` for
/// `p ≡ 1 (mod 4)` and `ε_p = i` for `p ≡ 3 (mod 4)`.
fn odd_prime_rule(class: &SquareClass) -> u8 {
    let p = class.prime().get() as i128;
    let rep = class.rep_i128();
    if rep % p != 0 {
        return 0;
    }
    let eps = if p % 4 == 1 { 0 } else { 2 };
    if rep == p {
        eps
    } else {
        (eps + 4) % 8
    }
}

pub fn weil_rank1_class(class: &SquareClass) -> Mu8 {
    let p = class.prime();
    match frozen_table(p.get()) {
        Some(t) => {
            let rep = class.rep_i128() as i64;
            Mu8(t.iter().find(|(r, _)| *r == rep).expect("table covers every class").1)
        }
        None => Mu8(odd_prime_rule(class)),
    }
}

/// `γ_ψ(⟨a⟩)`.
pub fn weil_rank1(a: &Rational, p: Prime) -> Result<Mu8> {
    Ok(weil_rank1_class(&square_class(a, p)?))
}

/// `γ_ψ(q)` as the product of rank-one indices over a diagonalization.
pub fn weil_index(q: &QuadForm) -> Mu8 {
    q.diagonal().iter().map(|a| weil_rank1(a, q.prime()).expect("nonzero diagonal")).product()
}

/// `ε(1/2, χ_K, ψ) = γ_ψ(N_{K/ℚ_p})`.
pub fn epsilon_half(k: &QuadraticEtale) -> Mu8 {
    weil_index(&QuadForm::norm_form(k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussValue {
    pub value: Complex64,
    pub snapped: Mu8,
    pub distance: f64,
    pub k: u32,
}

/// Smallest truncation radius for which the oracle has stabilized.
pub fn oracle_min_k(a: &Rational, p: Prime) -> Result<u32> {
    let (v, _) = split_unit(a, p)?;
    let v2 = if p.is_two() { 1 } else { 0 };
    Ok((v + 1 + 2 * v2).max(1) as u32)
}

/// `|2a|^{1/2} ∫_{p^{-k}ℤ_p} ψ(a x²) dx`, evaluated as a finite sum.
pub fn gauss_oracle(a: &Rational, p: Prime, k: u32) -> Result<GaussValue> {
    if a.is_zero() {
        return Err(Error::Zero("Gauss sum coefficient"));
    }
    let min_k = oracle_min_k(a, p)?;
    if k < min_k {
        return Err(Error::Precondition(format!("truncation radius {k} below {min_k}")));
    }
    let (v, w) = split_unit(a, p)?;
    let v2: i64 = if p.is_two() { 1 } else { 0 };
    let k = k as i64;
    // y mod p^m determines ψ(a y²/p^{2k}) on ℤ_p
    let m = (2 * k - v - v2).max((2 * k - v + 1) / 2).max(0) as u32;
    let t = 2 * k - v;
    let pp = p.get() as u128;
    let big = |e: u32| -> Result<u128> {
        pp.checked_pow(e)
            .filter(|&x| x < (1u128 << 62))
            .ok_or_else(|| Error::Unsupported(format!("Gauss sum modulus p^{e} too large")))
    };
    let pm = big(m)?;
    if pm > 50_000_000 {
        return Err(Error::Unsupported(format!("Gauss sum over {pm} terms")));
    }
    let mut sum = Complex64::zero();
    if t <= 0 {
        sum = Complex64::new(pm as f64, 0.0);
    } else {
        let pt = big(t as u32)?;
        let wr = reduce_mod(&w, pt as u64)? as u128;
        for y in 0..pm {
            let yy = (y % pt) * (y % pt) % pt;
            let r = wr * yy % pt;
            let phase = 2.0 * PI * (r as f64) / (pt as f64);
            sum += Complex64::new(phase.cos(), phase.sin());
        }
    }
    let scale = (p.get() as f64).powf(-((v + v2) as f64) / 2.0 + (k - m as i64) as f64);
    let value = sum * scale;
    let angle = value.arg();
    let snapped = Mu8::new((angle / (PI / 4.0)).round() as i64);
    let distance = (value - snapped.to_complex()).norm();
    Ok(GaussValue { value, snapped, distance, k: k as u32 })
}

/// Runs the oracle at the two smallest admissible radii and requires both
/// to snap to the same eighth root within `1e-6`.
pub fn gauss_oracle_stable(a: &Rational, p: Prime) -> Result<(GaussValue, GaussValue)> {
    let k = oracle_min_k(a, p)?;
    let g0 = gauss_oracle(a, p, k)?;
    let g1 = gauss_oracle(a, p, k + 1)?;
    if g0.distance > 1e-6 || g1.distance > 1e-6 || g0.snapped != g1.snapped {
        return Err(Error::Oracle(format!(
            "Gauss sum did not stabilize at p = {p}: {} vs {} (distances {:.2e}, {:.2e})",
            g0.snapped, g1.snapped, g0.distance, g1.distance
        )));
    }
    Ok((g0, g1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn mu8_group_law() {
        assert_eq!(Mu8::new(3) * Mu8::new(7), Mu8::new(2));
        assert_eq!(Mu8::new(3).inv(), Mu8::new(5));
        assert_eq!("zeta8^6".parse::<Mu8>().unwrap(), Mu8::new(6));
        assert_eq!(Mu8::new(6).to_string(), "zeta8^6");
        assert!("zeta9^1".parse::<Mu8>().is_err());
    }

    #[test]
    fn hyperbolic_plane_is_trivial() {
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(weil_index(&QuadForm::hyperbolic(1, pr(p))), Mu8::ONE);
            assert_eq!(epsilon_half(&QuadraticEtale::split(pr(p))), Mu8::ONE);
        }
    }

    #[test]
    fn closed_rule_matches_frozen_tables() {
        for p in [3, 5, 7, 11] {
            for (rep, e) in frozen_table(p).unwrap() {
                let c = square_class(&int(*rep), pr(p)).unwrap();
                assert_eq!(odd_prime_rule(&c), *e);
            }
        }
    }

    #[test]
    fn oracle_small_cases() {
        let (g, _) = gauss_oracle_stable(&int(3), pr(3)).unwrap();
        assert_eq!(g.snapped, Mu8::new(2));
        assert!(gauss_oracle(&int(3), pr(3), 1).is_err());
        assert_eq!(gauss_oracle(&int(9), pr(3), 3).unwrap().snapped, Mu8::ONE);
    }
}
