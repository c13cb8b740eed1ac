//! Dense matrices and univariate polynomials over exact rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{fmt_rational, int, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| fmt_rational(&self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, a) in entries.iter().enumerate() {
            m[(i, i)] = a.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_alternating(&self) -> bool {
        self.is_square() && *self == -self.transpose()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (a, da) = self.scaled();
        let (b, db) = other.scaled();
        let d = da * db;
        let (m, n) = (self.cols, other.cols);
        let mut data = Vec::with_capacity(self.rows * n);
        for i in 0..self.rows {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for k in 0..m {
                    let (x, y) = (&a[i * m + k], &b[k * n + j]);
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
                data.push(Rational::new(acc, d.clone()));
            }
        }
        Ok(Matrix { rows: self.rows, cols: n, data })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn pow(&self, e: u32) -> Matrix {
        let mut out = Matrix::identity(self.rows);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Row echelon form by Gaussian elimination; returns (echelon, pivot
    /// columns, determinant sign-and-scale factor for square inputs).
    fn echelon(&self) -> (Matrix, Vec<usize>, Rational) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut det = Rational::one();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                det = Rational::zero();
                continue;
            };
            if piv != r {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, r * m.cols + j);
                }
                det = -det;
            }
            let pv = m[(r, c)].clone();
            det *= &pv;
            for i in (r + 1)..m.rows {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &pv;
                for j in c..m.cols {
                    let t = &f * &m[(r, j)];
                    m[(i, j)] -= t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        if r < m.rows {
            det = Rational::zero();
        }
        (m, pivots, det)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let (mut a, d) = self.scaled();
        let Some(det) = bareiss(&mut a, n, n, n) else {
            return Rational::zero();
        };
        Rational::new(det, num_traits::pow(d, n))
    }

    /// Pivots `D_k / D_{k−1}` of elimination without row exchanges, from the
    /// leading principal minors `D_k`; `None` if some `D_k` vanishes.
    pub fn ldl_pivots(&self) -> Option<Vec<Rational>> {
        assert!(self.is_square(), "pivots of non-square matrix");
        let n = self.rows;
        let (mut m, d) = self.scaled();
        let mut prev = BigInt::one();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let pk = m[k * n + k].clone();
            if pk.is_zero() {
                return None;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &pk * &m[i * n + j] - &m[i * n + k] * &m[k * n + j];
                    m[i * n + j] = v / &prev;
                }
            }
            out.push(Rational::new(pk.clone(), &prev * &d));
            prev = pk;
        }
        Some(out)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let (a, d) = self.scaled();
        let mut aug = vec![BigInt::zero(); n * 2 * n];
        for i in 0..n {
            for j in 0..n {
                aug[i * 2 * n + j] = a[i * n + j].clone();
            }
            aug[i * 2 * n + n + i] = BigInt::one();
        }
        let det = bareiss(&mut aug, n, 2 * n, n).ok_or_else(|| Error::NotInvertible("singular matrix".into()))?;
        // the left block is now upper triangular with pivots; back-substitute
        // on the scaled system, then divide once per entry
        let mut x = vec![BigInt::zero(); n * n];
        for col in 0..n {
            for i in (0..n).rev() {
                let mut acc = &aug[i * 2 * n + n + col] * &det;
                for k in i + 1..n {
                    acc -= &aug[i * 2 * n + k] * &x[k * n + col];
                }
                let (q, r) = acc.div_rem(&aug[i * 2 * n + i]);
                debug_assert!(r.is_zero(), "fraction-free back substitution");
                x[i * n + col] = q;
            }
        }
        let den = det;
        Ok(Matrix { rows: n, cols: n, data: x.into_iter().map(|v| Rational::new(v * &d, den.clone())).collect() })
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (mut m, pivots, _) = self.echelon();
        // reduce to RREF
        for (r, &c) in pivots.iter().enumerate().rev() {
            let pv = m[(r, c)].recip();
            for j in 0..m.cols {
                m[(r, j)] *= &pv;
            }
            for i in 0..r {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in 0..m.cols {
                    let t = &f * &m[(r, j)];
                    m[(i, j)] -= t;
                }
            }
        }
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); m.cols];
                v[f] = Rational::one();
                for (r, &c) in pivots.iter().enumerate() {
                    v[c] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Solves `self · x = b` for a matrix with independent columns; errors if
    /// `b` is not in the column span.
    pub fn solve_in_span(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let ker = aug.kernel();
        let sol = ker
            .iter()
            .find(|v| !v[self.cols].is_zero())
            .ok_or_else(|| Error::Invalid("vector not in span".into()))?;
        let s = -sol[self.cols].recip();
        Ok(sol[..self.cols].iter().map(|x| x * &s).collect())
    }

    /// Characteristic polynomial `det(T·1 − M)`, by the division-free
    /// Berkowitz recursion on the integer matrix `d·M`.
    pub fn char_poly(&self) -> Poly {
        assert!(self.is_square(), "characteristic polynomial of non-square matrix");
        let n = self.rows;
        let (a, d) = self.scaled();
        let top_first = berkowitz(&a, n);
        // χ_M(T) = d^{−n} χ_{dM}(dT)
        let mut scale = BigInt::one();
        let mut coeffs = vec![Rational::zero(); n + 1];
        for k in 0..=n {
            coeffs[k] = Rational::new(top_first[k].clone(), scale.clone());
            scale *= &d;
        }
        coeffs.reverse();
        Poly::new(coeffs)
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(r, c);
        let (mut i0, mut j0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(i0 + i, j0 + j)] = b[(i, j)].clone();
                }
            }
            i0 += b.rows;
            j0 += b.cols;
        }
        out
    }

    /// Writes `block` into `self` with its top-left corner at `(i0, j0)`.
    pub fn set_block(&mut self, i0: usize, j0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(i0 + i, j0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, i0: usize, j0: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(i0 + i, j0 + j)].clone();
            }
        }
        out
    }

    /// `Pᵀ · self · P`.
    pub fn congruent(&self, p: &Matrix) -> Matrix {
        &(&p.transpose() * self) * p
    }

    pub fn max_abs_height(&self) -> Rational {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl Matrix {
    /// Common denominator `d` and the row-major integer entries of `d·M`.
    fn scaled(&self) -> (Vec<BigInt>, BigInt) {
        let d = self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let v = self.data.iter().map(|x| x.numer() * (&d / x.denom())).collect();
        (v, d)
    }
}

/// Fraction-free elimination on the first `pivots` columns of a row-major
/// `rows × cols` integer matrix. Returns the determinant of the leading
/// square block, or `None` if it is singular.
fn bareiss(m: &mut [BigInt], rows: usize, cols: usize, pivots: usize) -> Option<BigInt> {
    let mut prev = BigInt::one();
    let mut sign = false;
    for k in 0..pivots.min(rows) {
        let piv = (k..rows).find(|&i| !m[i * cols + k].is_zero())?;
        if piv != k {
            for j in 0..cols {
                m.swap(piv * cols + j, k * cols + j);
            }
            sign = !sign;
        }
        for i in k + 1..rows {
            for j in k + 1..cols {
                let v = &m[k * cols + k] * &m[i * cols + j] - &m[i * cols + k] * &m[k * cols + j];
                m[i * cols + j] = v / &prev;
            }
            m[i * cols + k] = BigInt::zero();
        }
        prev = m[k * cols + k].clone();
    }
    Some(if sign { -prev } else { prev })
}

/// Coefficients of `det(T − A)`, leading first, for a row-major integer
/// matrix.
fn berkowitz(a: &[BigInt], n: usize) -> Vec<BigInt> {
    if n == 0 {
        return vec![BigInt::one()];
    }
    let sub: Vec<BigInt> = (1..n).flat_map(|i| (1..n).map(move |j| (i, j))).map(|(i, j)| a[i * n + j].clone()).collect();
    let inner = berkowitz(&sub, n - 1);
    // Toeplitz column [1, −a₀₀, −RC, −RAC, …, −RA^{n−2}C]
    let mut diags = vec![BigInt::one(), -a[0].clone()];
    let mut v: Vec<BigInt> = (1..n).map(|i| a[i * n].clone()).collect();
    for step in 0..n.saturating_sub(1) {
        let rv: BigInt = (1..n).map(|j| &a[j] * &v[j - 1]).sum();
        diags.push(-rv);
        if step + 1 < n - 1 {
            v = (1..n).map(|i| (1..n).map(|j| &a[i * n + j] * &v[j - 1]).sum()).collect();
        }
    }
    (0..=n).map(|i| (0..n).filter(|&j| j <= i).map(|j| &diags[i - j] * &inner[j]).sum()).collect()
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimensions");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimensions");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.into_iter().map(|x| -x).collect() }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        -self.clone()
    }
}

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `T − a`.
    pub fn linear_root(a: &Rational) -> Self {
        Poly::new(vec![-a.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().recip();
        Poly::new(self.0.iter().map(|c| c * &l).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let n = m.rows();
        self.0.iter().rev().fold(Matrix::zeros(n, n), |acc, c| &(&acc * m) + &Matrix::identity(n).scale(c))
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        let li = d.lead().recip();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &li;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.squarefree_mod_some_prime() || self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// Sufficient test: the primitive integer multiple of `self` is
    /// squarefree modulo a large prime not dividing its leading coefficient.
    fn squarefree_mod_some_prime(&self) -> bool {
        const PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];
        let d = self.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|x| x.numer() * (&d / x.denom())).collect();
        PRIMES.iter().any(|&l| {
            let lb = BigInt::from(l);
            let f: Vec<u64> = ints.iter().map(|c| c.mod_floor(&lb).try_into().expect("reduced")).collect();
            if *f.last().expect("nonzero") == 0 {
                return false;
            }
            let df: Vec<u64> = f.iter().enumerate().skip(1).map(|(i, &c)| (c as u128 * i as u128 % l as u128) as u64).collect();
            fp_gcd_degree(f, df, l) == 0
        })
    }

    /// `p(−T)` scaled to stay monic when `self` is monic: `(−1)^deg p(−T)`.
    pub fn reflect_negate(&self) -> Poly {
        let deg = self.degree().unwrap_or(0);
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| if (deg - i) % 2 == 0 { c.clone() } else { -c.clone() })
                .collect(),
        )
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(fmt_rational).collect()
    }
}

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Degree of `gcd(a, b)` over `𝔽_l`, ascending coefficients.
fn fp_gcd_degree(a: Vec<u64>, b: Vec<u64>, l: u64) -> usize {
    let (mut a, mut b) = (fp_trim(a), fp_trim(b));
    let mulmod = |x: u64, y: u64| (x as u128 * y as u128 % l as u128) as u64;
    while !b.is_empty() {
        let inv = crate::arith::pow_mod(*b.last().expect("nonempty"), l - 2, l);
        while a.len() >= b.len() {
            let c = mulmod(*a.last().expect("nonempty"), inv);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + l - mulmod(c, bi)) % l;
            }
            a = fp_trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{}", fmt_rational(&a))?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "T")?,
                _ => write!(f, "T^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn det_inverse_roundtrip() {
        let m = Matrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det(), int(18));
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(3));
        let sing = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_err());
        assert_eq!(sing.det(), int(0));
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn char_poly_and_cayley_hamilton() {
        let m = Matrix::from_i64(&[&[0, 1], &[-2, 3]]);
        let cp = m.char_poly();
        assert_eq!(cp.coeffs(), &[int(2), int(-3), int(1)]);
        assert!(cp.eval_matrix(&m).is_zero());
        let m3 = Matrix::from_i64(&[&[1, 2, 3], &[0, 1, 4], &[5, 6, 0]]);
        assert!(m3.char_poly().eval_matrix(&m3).is_zero());
        assert_eq!(m3.char_poly().coeff(0), -m3.det());
    }

    #[test]
    fn kernel_and_span() {
        let m = Matrix::from_i64(&[&[1, 1, 0], &[0, 0, 1]]);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
        let b = Matrix::from_columns(&[vec![int(1), int(0)], vec![int(1), int(1)]]);
        assert_eq!(b.solve_in_span(&[int(3), int(2)]).unwrap(), vec![int(1), int(2)]);
    }

    #[test]
    fn poly_gcd_squarefree() {
        let a = Poly::linear_root(&int(1));
        let b = Poly::linear_root(&rat(1, 2));
        let ab = &a * &b;
        assert!(ab.is_squarefree());
        assert!(!(&ab * &a).is_squarefree());
        assert_eq!(ab.gcd(&a), a);
        assert_eq!(format!("{ab}"), "T^2 - 3/2*T + 1/2");
    }
}
