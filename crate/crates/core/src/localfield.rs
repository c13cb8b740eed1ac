//! p-adic scaffolding: square classes, Hilbert symbols over ℚ_p and over
//! tamely ramified extensions, certified extension fields, and a
//! Hensel-certified solubility search for `z² = a·x² + b·y²`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    fmt_rational, int, is_p_integral, legendre_u64, pow_rat, reduce_mod, split_unit, valuation, Prime, Rational,
};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Poly};

// ---------------------------------------------------------------------------
// Square classes of ℚ_p

/// An element of ℚ_p^×/ℚ_p^{×2}, stored by its canonical representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    rep: i128,
    p: Prime,
}

impl SquareClass {
    pub fn one(p: Prime) -> Self {
        SquareClass { rep: 1, p }
    }

    pub fn representative(&self) -> Rational {
        Rational::from_integer(self.rep.into())
    }

    pub fn rep_i128(&self) -> i128 {
        self.rep
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn is_one(&self) -> bool {
        self.rep == 1
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        assert_eq!(self.p, other.p, "square classes at different primes");
        square_class(&(self.representative() * other.representative()), self.p).expect("nonzero product")
    }

    /// Class of `(−1)^k · self`.
    pub fn neg_pow(&self, k: u64) -> SquareClass {
        if k % 2 == 0 {
            *self
        } else {
            self.mul(&square_class(&int(-1), self.p).expect("nonzero"))
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// Canonical square-class representative: `{1, u, p, u·p}` for odd `p` (`u`
/// the least non-residue), `{±1, ±2, ±5, ±10}` for `p = 2`.
pub fn square_class(a: &Rational, p: Prime) -> Result<SquareClass> {
    if a.is_zero() {
        return Err(Error::Zero("square class of zero"));
    }
    let (v, u) = split_unit(a, p)?;
    let odd_v = v.rem_euclid(2) == 1;
    let rep: i128 = if p.is_two() {
        let unit: i128 = match reduce_mod(&u, 8)? {
            1 => 1,
            3 => -5,
            5 => 5,
            7 => -1,
            _ => unreachable!("2-adic unit is odd"),
        };
        if odd_v {
            2 * unit
        } else {
            unit
        }
    } else {
        let r = reduce_mod(&u, p.get())?;
        let unit: i128 = if legendre_u64(r, p.get()) == 1 { 1 } else { p.least_nonresidue() as i128 };
        if odd_v {
            unit * p.get() as i128
        } else {
            unit
        }
    };
    Ok(SquareClass { rep, p })
}

/// The full list of square classes at `p`, in a fixed order.
pub fn square_class_table(p: Prime) -> Vec<SquareClass> {
    let reps: Vec<i64> = if p.is_two() {
        vec![1, -1, 2, -2, 5, -5, 10, -10]
    } else {
        let u = p.least_nonresidue() as i64;
        let pp = p.get() as i64;
        vec![1, u, pp, u * pp]
    };
    reps.into_iter().map(|r| square_class(&int(r), p).expect("nonzero")).collect()
}

// ---------------------------------------------------------------------------
// Hilbert symbol over ℚ_p

fn two_adic_eps(u: u64) -> u64 {
    ((u % 8 - 1) / 2) % 2
}

fn two_adic_omega(u: u64) -> u64 {
    let u = u % 8;
    ((u * u - 1) / 8) % 2
}

/// Hilbert symbol `(a, b)_p` by the classical closed forms.
pub fn hilbert_qp(a: &Rational, b: &Rational, p: Prime) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Zero("Hilbert symbol argument"));
    }
    let (alpha, u) = split_unit(a, p)?;
    let (beta, w) = split_unit(b, p)?;
    let (alpha, beta) = (alpha.rem_euclid(2) as u64, beta.rem_euclid(2) as u64);
    if p.is_two() {
        let u = reduce_mod(&u, 8)?;
        let w = reduce_mod(&w, 8)?;
        let e = two_adic_eps(u) * two_adic_eps(w) + alpha * two_adic_omega(w) + beta * two_adic_omega(u);
        Ok(if e % 2 == 0 { 1 } else { -1 })
    } else {
        let pp = p.get();
        let mut s: i8 = if (alpha * beta * ((pp - 1) / 2)) % 2 == 0 { 1 } else { -1 };
        if beta == 1 {
            s *= legendre_u64(reduce_mod(&u, pp)?, pp);
        }
        if alpha == 1 {
            s *= legendre_u64(reduce_mod(&w, pp)?, pp);
        }
        Ok(s)
    }
}

// ---------------------------------------------------------------------------
// Polynomials over F_p and finite residue fields

/// Arithmetic in `F_p[θ]/(m(θ))` for a monic modulus `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    p: u64,
    modulus: Vec<u64>,
}

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    fp_trim(out)
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = fp_trim(a.to_vec());
    let dm = m.len() - 1;
    let inv_lead = crate::arith::pow_mod(m[dm], p - 2, p);
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = (r[r.len() - 1] as u128 * inv_lead as u128 % p as u128) as u64;
        for (j, &mj) in m.iter().enumerate() {
            r[k + j] = ((r[k + j] as u128 + (p - c) as u128 * mj as u128) % p as u128) as u64;
        }
        r = fp_trim(r);
    }
    r
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    fp_trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn fp_powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = fp_rem(base, m, p);
    let bits = e.bits();
    for i in 0..bits {
        if e.bit(i) {
            result = fp_rem(&fp_mul(&result, &b, p), m, p);
        }
        b = fp_rem(&fp_mul(&b, &b, p), m, p);
    }
    result
}

/// Rabin's irreducibility test for a monic polynomial over F_p.
pub fn fp_irreducible(f: &[u64], p: u64) -> bool {
    let f = fp_trim(f.to_vec());
    let d = f.len().saturating_sub(1);
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let pb = BigUint::from(p);
    let mut xp = x.clone();
    for _ in 1..=d / 2 {
        xp = fp_powmod(&xp, &pb, &f, p);
        let g = fp_gcd(&fp_sub(&xp, &x, p), &f, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl ResidueField {
    pub fn prime_field(p: u64) -> Self {
        ResidueField { p, modulus: vec![0, 1] }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn size(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.p), self.degree())
    }

    /// Quadratic character `x^{(q−1)/2}` of a nonzero element.
    pub fn quadratic_character(&self, x: &[u64]) -> Result<i8> {
        let x = fp_rem(x, &self.modulus, self.p);
        if x.is_empty() {
            return Err(Error::Zero("quadratic character of zero residue"));
        }
        if self.p == 2 {
            return Ok(1);
        }
        let e = (self.size() - 1u32) / 2u32;
        let r = fp_powmod(&x, &e, &self.modulus, self.p);
        Ok(if r == vec![1] { 1 } else { -1 })
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        fp_rem(&fp_mul(a, b, self.p), &self.modulus, self.p)
    }

    pub fn inv(&self, a: &[u64]) -> Vec<u64> {
        let e = self.size() - 2u32;
        fp_powmod(a, &e, &self.modulus, self.p)
    }
}

// ---------------------------------------------------------------------------
// Certified local fields

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    DegreeOne,
    QuadraticNonsquareDisc,
    Eisenstein,
    UnramifiedIrreducibleModP,
}

impl Certificate {
    pub const ALL: [Certificate; 4] = [
        Certificate::DegreeOne,
        Certificate::QuadraticNonsquareDisc,
        Certificate::Eisenstein,
        Certificate::UnramifiedIrreducibleModP,
    ];
}

/// Coordinates of a field element in the power basis `1, t, …, t^{d−1}`.
pub type FieldElem = Vec<Rational>;

/// Integral model `O_F = ℤ_p[θ]` used for valuations and residues.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ThetaModel {
    /// Monic minimal polynomial of θ, p-integral, lowest degree first.
    g: Vec<Rational>,
    to_theta: Matrix,
    eisenstein: bool,
    residue: ResidueField,
}

/// A finite extension of ℚ_p given by a certified irreducible polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalFieldDescriptor {
    p: Prime,
    poly: Vec<Rational>,
    certificate: Certificate,
    e: u32,
    f: u32,
    model: Option<ThetaModel>,
}

fn poly_rem_monic(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let d = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > d {
        let c = r.pop().unwrap();
        if c.is_zero() {
            continue;
        }
        let k = r.len() - d;
        for j in 0..d {
            r[k + j] -= &c * &m[j];
        }
    }
    r.resize(d, Rational::zero());
    r
}

fn poly_mul_mod(a: &[Rational], b: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_rem_monic(&out, m)
}

impl LocalFieldDescriptor {
    /// ℚ_p itself, with defining polynomial `t`.
    pub fn rational(p: Prime) -> Self {
        Self::new(p, vec![Rational::zero(), Rational::one()], Certificate::DegreeOne).expect("degree one")
    }

    pub fn new(p: Prime, poly: Vec<Rational>, certificate: Certificate) -> Result<Self> {
        let poly = Poly::new(poly).coeffs().to_vec();
        if poly.len() < 2 || !poly.last().unwrap().is_one() {
            return Err(Error::Certificate("defining polynomial must be monic of degree ≥ 1".into()));
        }
        let d = poly.len() - 1;
        let integral = || poly.iter().all(|c| is_p_integral(c, p));
        let (e, f) = match certificate {
            Certificate::DegreeOne => {
                if d != 1 {
                    return Err(Error::Certificate("degree-one certificate needs a linear polynomial".into()));
                }
                (1, 1)
            }
            Certificate::QuadraticNonsquareDisc => {
                if d != 2 {
                    return Err(Error::Certificate("quadratic certificate needs degree 2".into()));
                }
                let disc = &poly[1] * &poly[1] - int(4) * &poly[0];
                if disc.is_zero() || square_class(&disc, p)?.is_one() {
                    return Err(Error::Certificate(format!(
                        "discriminant {} is a square in Q_{p}",
                        fmt_rational(&disc)
                    )));
                }
                let (v, u) = split_unit(&disc, p)?;
                let ramified = if p.is_two() {
                    v.rem_euclid(2) == 1 || reduce_mod(&u, 8)? != 5
                } else {
                    v.rem_euclid(2) == 1
                };
                if ramified {
                    (2, 1)
                } else {
                    (1, 2)
                }
            }
            Certificate::Eisenstein => {
                if !integral() {
                    return Err(Error::Certificate("Eisenstein polynomial must be p-integral".into()));
                }
                for c in &poly[..d] {
                    if !c.is_zero() && valuation(c, p)? < 1 {
                        return Err(Error::Certificate("non-leading coefficient not divisible by p".into()));
                    }
                }
                if poly[0].is_zero() || valuation(&poly[0], p)? != 1 {
                    return Err(Error::Certificate("constant term must have valuation exactly 1".into()));
                }
                (d as u32, 1)
            }
            Certificate::UnramifiedIrreducibleModP => {
                if !integral() {
                    return Err(Error::Certificate("polynomial must be p-integral".into()));
                }
                let red: Vec<u64> = poly.iter().map(|c| reduce_mod(c, p.get())).collect::<Result<_>>()?;
                if !fp_irreducible(&red, p.get()) {
                    return Err(Error::Certificate("reduction mod p is reducible".into()));
                }
                (1, d as u32)
            }
        };
        let mut field = LocalFieldDescriptor { p, poly, certificate, e, f, model: None };
        field.model = field.build_model()?;
        Ok(field)
    }

    /// Tries each certificate in turn.
    pub fn detect(p: Prime, poly: Vec<Rational>) -> Result<Self> {
        let mut last = Error::Certificate("no certificate applies".into());
        for cert in Certificate::ALL {
            match Self::new(p, poly.clone(), cert) {
                Ok(f) => return Ok(f),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    fn build_model(&self) -> Result<Option<ThetaModel>> {
        let p = self.p;
        let d = self.degree();
        if p.is_two() && d > 1 {
            return Ok(None);
        }
        let pp = p.get();
        let model = match self.certificate {
            Certificate::DegreeOne => ThetaModel {
                g: vec![Rational::zero(), Rational::one()],
                to_theta: Matrix::identity(1),
                eisenstein: false,
                residue: ResidueField::prime_field(pp),
            },
            Certificate::Eisenstein => ThetaModel {
                g: self.poly.clone(),
                to_theta: Matrix::identity(d),
                eisenstein: true,
                residue: ResidueField::prime_field(pp),
            },
            Certificate::UnramifiedIrreducibleModP => {
                let red = self.poly.iter().map(|c| reduce_mod(c, pp)).collect::<Result<Vec<_>>>()?;
                ThetaModel {
                    g: self.poly.clone(),
                    to_theta: Matrix::identity(d),
                    eisenstein: false,
                    residue: ResidueField { p: pp, modulus: red },
                }
            }
            Certificate::QuadraticNonsquareDisc => {
                let (c, b) = (&self.poly[0], &self.poly[1]);
                let disc = b * b - int(4) * c;
                let (v, _) = split_unit(&disc, p)?;
                let k = v.div_euclid(2);
                let pk = pow_rat(&p.rational(), k);
                let dprime = &disc / (&pk * &pk);
                let half = Rational::new(1.into(), 2.into());
                // a0 + a1 t = (a0 − a1 b/2) + (a1 p^k / 2) θ with θ² = D'
                let to_theta = Matrix::from_rows(vec![
                    vec![Rational::one(), -(b * &half)],
                    vec![Rational::zero(), &pk * &half],
                ])?;
                let eisenstein = valuation(&dprime, p)? == 1;
                let residue = if eisenstein {
                    ResidueField::prime_field(pp)
                } else {
                    let r = reduce_mod(&dprime, pp)?;
                    ResidueField { p: pp, modulus: vec![(pp - r) % pp, 0, 1] }
                };
                ThetaModel { g: vec![-dprime, Rational::zero(), Rational::one()], to_theta, eisenstein, residue }
            }
        };
        Ok(Some(model))
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.poly.len() - 1
    }

    pub fn poly(&self) -> &[Rational] {
        &self.poly
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    pub fn ramification_index(&self) -> u32 {
        self.e
    }

    pub fn residue_degree(&self) -> u32 {
        self.f
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    pub fn zero(&self) -> FieldElem {
        vec![Rational::zero(); self.degree()]
    }

    pub fn one(&self) -> FieldElem {
        self.from_rational(&Rational::one())
    }

    pub fn from_rational(&self, a: &Rational) -> FieldElem {
        let mut v = self.zero();
        v[0] = a.clone();
        v
    }

    /// The root `t` of the defining polynomial (for degree one, the rational root).
    pub fn generator(&self) -> FieldElem {
        if self.degree() == 1 {
            vec![-self.poly[0].clone()]
        } else {
            let mut v = self.zero();
            v[1] = Rational::one();
            v
        }
    }

    pub fn check_elem(&self, a: &FieldElem) -> Result<()> {
        if a.len() == self.degree() {
            Ok(())
        } else {
            Err(Error::Dimension(format!("field element of length {} in degree {}", a.len(), self.degree())))
        }
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        a.iter().map(|x| -x.clone()).collect()
    }

    pub fn scale(&self, c: &Rational, a: &FieldElem) -> FieldElem {
        a.iter().map(|x| x * c).collect()
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        a.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        if self.degree() == 1 {
            return vec![&a[0] * &b[0]];
        }
        poly_mul_mod(a, b, &self.poly)
    }

    /// Matrix of multiplication by `a` in the power basis.
    pub fn mult_matrix(&self, a: &FieldElem) -> Matrix {
        let d = self.degree();
        let cols: Vec<Vec<Rational>> = (0..d)
            .map(|j| {
                let mut b = self.zero();
                b[j] = Rational::one();
                if d == 1 {
                    b = self.one();
                }
                self.mul(a, &b)
            })
            .collect();
        Matrix::from_columns(&cols)
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if self.is_zero(a) {
            return Err(Error::NotInvertible("zero field element".into()));
        }
        let m = self.mult_matrix(a);
        let inv = m.inverse()?;
        Ok(inv.column(0))
    }

    pub fn pow(&self, a: &FieldElem, e: i64) -> Result<FieldElem> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut out = self.one();
        for _ in 0..e.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        Ok(out)
    }

    pub fn trace(&self, a: &FieldElem) -> Rational {
        self.mult_matrix(a).trace()
    }

    pub fn norm(&self, a: &FieldElem) -> Rational {
        self.mult_matrix(a).det()
    }

    fn require_model(&self) -> Result<&ThetaModel> {
        self.model.as_ref().ok_or_else(|| {
            Error::Unsupported(format!("wild arithmetic over a degree-{} extension of Q_2", self.degree()))
        })
    }

    fn theta_mul(&self, m: &ThetaModel, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if m.g.len() == 2 {
            return vec![&a[0] * &b[0]];
        }
        poly_mul_mod(a, b, &m.g)
    }

    fn theta_valuation(&self, m: &ThetaModel, x: &[Rational]) -> Result<i64> {
        let mut best: Option<i64> = None;
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = valuation(c, self.p)?;
            let w = if m.eisenstein { self.e as i64 * v + i as i64 } else { v };
            best = Some(best.map_or(w, |b| b.min(w)));
        }
        best.ok_or(Error::Zero("valuation of zero field element"))
    }

    /// Normalized valuation `v_F` with `v_F(π) = 1`.
    pub fn valuation(&self, a: &FieldElem) -> Result<i64> {
        if self.degree() == 1 {
            return valuation(&a[0], self.p);
        }
        let m = self.require_model()?;
        let x = m.to_theta.mul_vec(a);
        self.theta_valuation(m, &x)
    }

    /// Splits `a = π^v·u` and returns `v` together with the residue of `u`.
    fn unit_residue(&self, a: &FieldElem) -> Result<(i64, Vec<u64>)> {
        let m = self.require_model()?;
        let pp = self.p.get();
        let x = m.to_theta.mul_vec(a);
        let v = self.theta_valuation(m, &x)?;
        if m.eisenstein {
            // π = θ; θ^{-1} from the minimal polynomial
            let d = m.g.len() - 1;
            let mut theta = vec![Rational::zero(); d];
            theta[1] = Rational::one();
            let tm = Matrix::from_columns(
                &(0..d)
                    .map(|j| {
                        let mut b = vec![Rational::zero(); d];
                        b[j] = Rational::one();
                        self.theta_mul(m, &theta, &b)
                    })
                    .collect::<Vec<_>>(),
            );
            let tinv = tm.inverse()?.column(0);
            let step = if v >= 0 { tinv } else { theta };
            let mut u = x;
            for _ in 0..v.unsigned_abs() {
                u = self.theta_mul(m, &u, &step);
            }
            Ok((v, vec![reduce_mod(&u[0], pp)?]))
        } else {
            let scale = pow_rat(&self.p.rational(), -v);
            let res = x.iter().map(|c| reduce_mod(&(c * &scale), pp)).collect::<Result<Vec<_>>>()?;
            Ok((v, res))
        }
    }

    pub fn residue_field_size(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.p.get()), self.f as usize)
    }

    /// Whether `a` is a square in the field (odd `p`, or ℚ_2).
    pub fn is_square(&self, a: &FieldElem) -> Result<bool> {
        if self.is_zero(a) {
            return Ok(true);
        }
        if self.degree() == 1 && self.p.is_two() {
            return Ok(square_class(&a[0], self.p)?.is_one());
        }
        let m = self.require_model()?;
        let (v, res) = self.unit_residue(a)?;
        Ok(v.rem_euclid(2) == 0 && m.residue.quadratic_character(&res)? == 1)
    }
}

impl fmt::Display for LocalFieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            write!(f, "Q_{}", self.p)
        } else {
            let poly = Poly::new(self.poly.clone());
            write!(f, "Q_{}[t]/({})", self.p, poly.to_string().replace('T', "t"))
        }
    }
}

/// Hilbert symbol over a tamely ramified base (odd residue characteristic),
/// `((−1)^{αβ} ā^β / b̄^α)^{(q−1)/2}` on the residue field.
pub fn hilbert_tame(field: &LocalFieldDescriptor, a: &FieldElem, b: &FieldElem) -> Result<i8> {
    if field.prime().is_two() {
        if field.degree() == 1 {
            return hilbert_qp(&a[0], &b[0], field.prime());
        }
        return Err(Error::Unsupported("Hilbert symbol over a proper extension of Q_2".into()));
    }
    field.check_elem(a)?;
    field.check_elem(b)?;
    if field.is_zero(a) || field.is_zero(b) {
        return Err(Error::Zero("Hilbert symbol argument"));
    }
    let m = field.require_model()?;
    let (alpha, ua) = field.unit_residue(a)?;
    let (beta, ub) = field.unit_residue(b)?;
    let rf = &m.residue;
    let pp = field.prime().get();
    let mut t = vec![1u64];
    if (alpha * beta).rem_euclid(2) == 1 {
        t = vec![pp - 1];
    }
    let ua_pow = if beta.rem_euclid(2) == 1 { ua } else { vec![1] };
    let ub_pow = if alpha.rem_euclid(2) == 1 { rf.inv(&ub) } else { vec![1] };
    let t = rf.mul(&rf.mul(&t, &ua_pow), &ub_pow);
    rf.quadratic_character(&t)
}

/// Hilbert symbol over any supported base field.
pub fn hilbert(field: &LocalFieldDescriptor, a: &FieldElem, b: &FieldElem) -> Result<i8> {
    if field.degree() == 1 {
        hilbert_qp(&a[0], &b[0], field.prime())
    } else {
        hilbert_tame(field, a, b)
    }
}

/// Whether `x` is a norm from `field(√d)`.
pub fn is_local_norm(field: &LocalFieldDescriptor, d: &FieldElem, x: &FieldElem) -> Result<bool> {
    if field.is_zero(d) || field.is_zero(x) {
        return Err(Error::Zero("norm test argument"));
    }
    if field.degree() > 1 && field.prime().is_two() {
        return Err(Error::Unsupported("norm test over a proper extension of Q_2".into()));
    }
    if field.is_square(d)? {
        return Ok(true);
    }
    Ok(hilbert(field, d, x)? == 1)
}

// ---------------------------------------------------------------------------
// Hensel-certified solubility oracle

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solubility {
    /// A primitive approximate zero satisfying the Hensel criterion, as
    /// field elements `(x, y, z)`.
    Soluble { witness: [FieldElem; 3] },
    /// No primitive residue class survives modulo `p^level`.
    Insoluble { level: u32 },
    Inconclusive,
}

impl Solubility {
    pub fn is_soluble(&self) -> bool {
        matches!(self, Solubility::Soluble { .. })
    }
}

/// Integer arithmetic in `ℤ_p[θ]/p^M`.
struct ModRing {
    p: u128,
    modulus: u128,
    g: Vec<u128>,
    d: usize,
    eisenstein: bool,
    e: i64,
    cap: u32,
}

impl ModRing {
    fn mul(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let m = self.modulus;
        let d = self.d;
        let mut prod = vec![0u128; 2 * d - 1];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = (prod[i + j] + a[i] * b[j] % m) % m;
            }
        }
        if d == 1 {
            return vec![prod[0]];
        }
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for j in 0..d {
                prod[k - d + j] = (prod[k - d + j] + (m - c) * self.g[j] % m) % m;
            }
        }
        prod.truncate(d);
        prod
    }

    fn sub(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        a.iter().zip(b).map(|(x, y)| (x + self.modulus - y) % self.modulus).collect()
    }

    fn scal(&self, c: u128, a: &[u128]) -> Vec<u128> {
        a.iter().map(|x| c * x % self.modulus).collect()
    }

    fn vp(&self, mut x: u128) -> i64 {
        if x == 0 {
            return self.cap as i64;
        }
        let mut k = 0;
        while x % self.p == 0 {
            x /= self.p;
            k += 1;
        }
        k
    }

    /// Valuation `v_F`, capped at `e·cap` for elements vanishing mod `p^M`.
    fn val(&self, x: &[u128]) -> i64 {
        let cap = self.e * self.cap as i64;
        x.iter()
            .enumerate()
            .map(|(i, &c)| {
                if c == 0 {
                    cap
                } else if self.eisenstein {
                    self.e * self.vp(c) + i as i64
                } else {
                    self.vp(c)
                }
            })
            .min()
            .unwrap_or(cap)
            .min(cap)
    }
}

/// Decides solubility of `z² = a·x² + b·y²` over `field` by lifting primitive
/// residue classes through `p, p², …, p^depth`.
///
/// A class is kept at level `m` when `v(Q) ≥ e·m`; a representative with
/// `v(Q) > 2·v(∂Q/∂w)` for some variable `w` certifies a zero. No surviving
/// class certifies insolubility.
pub fn solubility_oracle(a: &FieldElem, b: &FieldElem, field: &LocalFieldDescriptor, depth: u32) -> Result<Solubility> {
    field.check_elem(a)?;
    field.check_elem(b)?;
    if field.is_zero(a) || field.is_zero(b) {
        return Err(Error::Zero("solubility oracle argument"));
    }
    let m = field.require_model()?;
    let p = field.prime();
    let pp = p.get() as u128;
    let d = m.g.len() - 1;
    let e = field.ramification_index() as i64;

    // Bring a and b into O_F with valuation 0 or 1 by even powers of π.
    let normalize = |x: &FieldElem| -> Result<(Vec<Rational>, i64)> {
        let v = field.valuation(x)?;
        let k = v.div_euclid(2);
        let mut t = m.to_theta.mul_vec(x);
        if m.eisenstein {
            let mut theta = vec![Rational::zero(); d];
            theta[1] = Rational::one();
            let tm = Matrix::from_columns(
                &(0..d)
                    .map(|j| {
                        let mut bj = vec![Rational::zero(); d];
                        bj[j] = Rational::one();
                        field.theta_mul(m, &theta, &bj)
                    })
                    .collect::<Vec<_>>(),
            );
            let tinv = tm.inverse()?.column(0);
            let step = if k >= 0 { tinv } else { theta };
            for _ in 0..(2 * k).unsigned_abs() {
                t = field.theta_mul(m, &t, &step);
            }
        } else {
            let s = pow_rat(&p.rational(), -2 * k);
            t = t.iter().map(|c| c * &s).collect();
        }
        Ok((t, v - 2 * k))
    };
    let (at, va) = normalize(a)?;
    let (bt, vb) = normalize(b)?;
    let v2 = if p.is_two() { e } else { 0 };
    let budget_val = 2 * v2 + va + vb + 2 * e + 1;
    let budget_levels = ((budget_val + e - 1) / e) as u32;

    let cap = depth + budget_levels + 6;
    let mut modulus: u128 = 1;
    for _ in 0..cap {
        modulus = modulus
            .checked_mul(pp)
            .filter(|&x| x < (1u128 << 62))
            .ok_or_else(|| Error::Unsupported(format!("oracle modulus p^{cap} too large for p = {p}")))?;
    }
    let red = |c: &Rational| -> Result<u128> { Ok(reduce_mod(c, modulus as u64)? as u128) };
    let ring = ModRing {
        p: pp,
        modulus,
        g: m.g.iter().map(red).collect::<Result<_>>()?,
        d,
        eisenstein: m.eisenstein,
        e,
        cap,
    };
    let ar: Vec<u128> = at.iter().map(red).collect::<Result<_>>()?;
    let br: Vec<u128> = bt.iter().map(red).collect::<Result<_>>()?;

    let unit: Vec<u128> = {
        let mut u = vec![0u128; d];
        u[0] = 1;
        u
    };
    let all_mod_p: Vec<Vec<u128>> = {
        let total = (pp as usize).pow(d as u32);
        (0..total)
            .map(|mut idx| {
                (0..d)
                    .map(|_| {
                        let c = (idx % pp as usize) as u128;
                        idx /= pp as usize;
                        c
                    })
                    .collect()
            })
            .collect()
    };
    let in_prime: Vec<Vec<u128>> = all_mod_p.iter().filter(|x| ring.val(x) >= 1).cloned().collect();

    // (x, y, z, which coordinate is pinned to 1)
    let mut frontier: Vec<([Vec<u128>; 3], usize)> = Vec::new();
    for y in &all_mod_p {
        for z in &all_mod_p {
            frontier.push(([unit.clone(), y.clone(), z.clone()], 0));
        }
    }
    for x in &in_prime {
        for z in &all_mod_p {
            frontier.push(([x.clone(), unit.clone(), z.clone()], 1));
        }
    }
    for x in &in_prime {
        for y in &in_prime {
            frontier.push(([x.clone(), y.clone(), unit.clone()], 2));
        }
    }

    let eval = |c: &[Vec<u128>; 3]| -> (i64, [i64; 3]) {
        let [x, y, z] = c;
        let xx = ring.mul(x, x);
        let yy = ring.mul(y, y);
        let zz = ring.mul(z, z);
        let q = ring.sub(&ring.sub(&zz, &ring.mul(&ar, &xx)), &ring.mul(&br, &yy));
        let dx = ring.scal(2, &ring.mul(&ar, x));
        let dy = ring.scal(2, &ring.mul(&br, y));
        let dz = ring.scal(2, z);
        (ring.val(&q), [ring.val(&dx), ring.val(&dy), ring.val(&dz)])
    };

    let mut pm: u128 = 1;
    for level in 1..=depth {
        let mut survivors = Vec::new();
        for (c, pinned) in frontier {
            let (vq, dv) = eval(&c);
            if vq < e * level as i64 {
                continue;
            }
            if dv.iter().any(|&dvi| vq > 2 * dvi) {
                let from_theta = m.to_theta.inverse()?;
                let witness = c.clone().map(|w| {
                    let t: Vec<Rational> = w.iter().map(|&x| Rational::from_integer((x as u64).into())).collect();
                    from_theta.mul_vec(&t)
                });
                return Ok(Solubility::Soluble { witness });
            }
            survivors.push((c, pinned));
        }
        if survivors.is_empty() {
            return Ok(Solubility::Insoluble { level });
        }
        pm *= pp;
        if level == depth {
            break;
        }
        let mut next = Vec::with_capacity(survivors.len() * all_mod_p.len() * all_mod_p.len());
        for (c, pinned) in survivors {
            let free: Vec<usize> = (0..3).filter(|&i| i != pinned).collect();
            for d1 in &all_mod_p {
                for d2 in &all_mod_p {
                    let mut child = c.clone();
                    for (slot, delta) in free.iter().zip([d1, d2]) {
                        child[*slot] = child[*slot]
                            .iter()
                            .zip(delta.iter())
                            .map(|(x, dd)| (x + dd * pm) % ring.modulus)
                            .collect();
                    }
                    next.push((child, pinned));
                }
            }
        }
        frontier = next;
    }
    if depth >= budget_levels {
        return Err(Error::Oracle(format!(
            "no decision within the budget of {budget_levels} levels for ({}, {}) over {field}",
            a.iter().map(fmt_rational).collect::<Vec<_>>().join(","),
            b.iter().map(fmt_rational).collect::<Vec<_>>().join(",")
        )));
    }
    Ok(Solubility::Inconclusive)
}

/// Number of lifting levels the oracle needs to decide `(a, b)`.
pub fn oracle_budget(a: &FieldElem, b: &FieldElem, field: &LocalFieldDescriptor) -> Result<u32> {
    let e = field.ramification_index() as i64;
    let va = field.valuation(a)?.rem_euclid(2);
    let vb = field.valuation(b)?.rem_euclid(2);
    let v2 = if field.prime().is_two() { e } else { 0 };
    let budget_val = 2 * v2 + va + vb + 2 * e + 1;
    Ok(((budget_val + e - 1) / e) as u32)
}

/// Convenience wrapper over ℚ_p at the budget depth.
pub fn solubility_qp(a: &Rational, b: &Rational, p: Prime) -> Result<Solubility> {
    let f = LocalFieldDescriptor::rational(p);
    let (fa, fb) = (f.from_rational(a), f.from_rational(b));
    let depth = oracle_budget(&fa, &fb, &f)?;
    solubility_oracle(&fa, &fb, &f, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn square_class_examples() {
        // 18 = 2·3², and 2 is a non-residue mod 3
        assert_eq!(square_class(&int(18), pr(3)).unwrap().rep_i128(), 2);
        assert_eq!(square_class(&int(49), pr(7)).unwrap().rep_i128(), 1);
        assert_eq!(square_class(&int(-4), pr(2)).unwrap().rep_i128(), -1);
        assert_eq!(square_class(&int(3), pr(2)).unwrap().rep_i128(), -5);
        assert_eq!(square_class(&rat(7, 2), pr(2)).unwrap().rep_i128(), -2);
        assert_eq!(square_class(&int(-5 * 2), pr(2)).unwrap().rep_i128(), -10);
        assert!(square_class(&int(0), pr(5)).is_err());
    }

    #[test]
    fn hilbert_examples() {
        for p in [2, 3, 5, 7] {
            for b in [1, -1, 2, 3, 6, 10] {
                assert_eq!(hilbert_qp(&int(1), &int(b), pr(p)).unwrap(), 1);
            }
        }
        assert_eq!(hilbert_qp(&int(5), &int(2), pr(5)).unwrap(), -1);
        assert_eq!(hilbert_qp(&int(-1), &int(-1), pr(2)).unwrap(), -1);
        assert_eq!(hilbert_qp(&int(-1), &int(3), pr(2)).unwrap(), -1);
    }

    #[test]
    fn oracle_examples() {
        assert!(solubility_qp(&int(1), &int(-1), pr(3)).unwrap().is_soluble());
        assert!(matches!(solubility_qp(&int(5), &int(2), pr(5)).unwrap(), Solubility::Insoluble { .. }));
        assert!(matches!(solubility_qp(&int(-1), &int(-1), pr(2)).unwrap(), Solubility::Insoluble { .. }));
        let f = LocalFieldDescriptor::rational(pr(5));
        assert_eq!(
            solubility_oracle(&f.from_rational(&int(5)), &f.from_rational(&int(2)), &f, 1).unwrap(),
            Solubility::Inconclusive
        );
    }

    #[test]
    fn certificates() {
        let p3 = pr(3);
        let eis = LocalFieldDescriptor::new(p3, vec![int(-3), int(0), int(1)], Certificate::Eisenstein).unwrap();
        assert_eq!((eis.ramification_index(), eis.residue_degree()), (2, 1));
        let unr =
            LocalFieldDescriptor::new(p3, vec![int(1), int(0), int(1)], Certificate::UnramifiedIrreducibleModP)
                .unwrap();
        assert_eq!((unr.ramification_index(), unr.residue_degree()), (1, 2));
        assert!(LocalFieldDescriptor::new(p3, vec![int(-1), int(0), int(1)], Certificate::UnramifiedIrreducibleModP)
            .is_err());
        assert!(LocalFieldDescriptor::new(p3, vec![int(-9), int(0), int(1)], Certificate::Eisenstein).is_err());
        assert!(
            LocalFieldDescriptor::new(p3, vec![int(-4), int(0), int(1)], Certificate::QuadraticNonsquareDisc).is_err()
        );
        let q = LocalFieldDescriptor::new(p3, vec![int(1), int(1), int(1)], Certificate::QuadraticNonsquareDisc)
            .unwrap();
        // t² + t + 1 has discriminant −3: ramified
        assert_eq!(q.ramification_index(), 2);
        assert!(fp_irreducible(&[1, 1, 1], 2));
        assert!(!fp_irreducible(&[1, 0, 1], 2));
    }

    #[test]
    fn tame_hilbert_examples() {
        let p3 = pr(3);
        let eis = LocalFieldDescriptor::new(p3, vec![int(-3), int(0), int(1)], Certificate::Eisenstein).unwrap();
        let t = eis.generator();
        let m1 = eis.from_rational(&int(-1));
        assert_eq!(hilbert_tame(&eis, &eis.one(), &t).unwrap(), 1);
        assert_eq!(hilbert_tame(&eis, &t, &m1).unwrap(), -1);
        let unr =
            LocalFieldDescriptor::new(p3, vec![int(-2), int(0), int(1)], Certificate::QuadraticNonsquareDisc).unwrap();
        let s = unr.generator();
        assert_eq!(hilbert_tame(&unr, &s, &unr.from_rational(&int(2))).unwrap(), 1);
        // oracle agreement on the extension
        for (a, b) in [(&t, &m1), (&s, &unr.one())] {
            let field = if a == &t { &eis } else { &unr };
            let h = hilbert_tame(field, a, b).unwrap();
            let depth = oracle_budget(a, b, field).unwrap();
            let o = solubility_oracle(a, b, field, depth).unwrap();
            assert_eq!(o.is_soluble(), h == 1);
        }
    }

    #[test]
    fn norm_examples() {
        let q5 = LocalFieldDescriptor::rational(pr(5));
        assert!(is_local_norm(&q5, &q5.from_rational(&int(2)), &q5.from_rational(&int(2))).unwrap());
        let q3 = LocalFieldDescriptor::rational(pr(3));
        assert!(is_local_norm(&q3, &q3.from_rational(&int(3)), &q3.from_rational(&int(9))).unwrap());
        let q2 = LocalFieldDescriptor::rational(pr(2));
        assert!(!is_local_norm(&q2, &q2.from_rational(&int(-1)), &q2.from_rational(&int(3))).unwrap());
    }
}
