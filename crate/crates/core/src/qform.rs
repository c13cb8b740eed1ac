//! Non-degenerate quadratic forms over ℚ_p: diagonalization, the invariant
//! triple (dim, det, Hasse), isotropy, and Witt decomposition.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{check_same_prime, int, Prime, Rational};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::localfield::{hilbert_qp, square_class, square_class_table, SquareClass};

/// Symmetry tag for the general Gram container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    Symmetric,
    Alternating,
    General,
}

/// A non-degenerate bilinear form of any symmetry type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearForm {
    gram: Matrix,
    p: Prime,
    symmetry: Symmetry,
}

impl BilinearForm {
    pub fn new(gram: Matrix, p: Prime) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        if !gram.is_invertible() {
            return Err(Error::Degenerate("bilinear form is degenerate".into()));
        }
        let symmetry = if gram.is_symmetric() {
            Symmetry::Symmetric
        } else if gram.is_alternating() {
            Symmetry::Alternating
        } else {
            Symmetry::General
        };
        Ok(BilinearForm { gram, p, symmetry })
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// The symmetric part `½(δ + ᵗδ)` as a quadratic form.
    pub fn symmetrization(&self) -> Result<QuadForm> {
        let s = (&self.gram + &self.gram.transpose()).scale(&Rational::new(1.into(), 2.into()));
        QuadForm::new(s, self.p)
    }

    /// Only symmetric forms carry Witt theory.
    pub fn as_quadratic(&self) -> Result<QuadForm> {
        match self.symmetry {
            Symmetry::Symmetric => QuadForm::new(self.gram.clone(), self.p),
            s => Err(Error::Invalid(format!("{s:?} form has no quadratic invariants"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadForm {
    gram: Matrix,
    p: Prime,
    label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FormInvariants {
    pub dim: usize,
    pub det: SquareClass,
    pub dpm: SquareClass,
    pub hasse: i8,
    pub witt_index: usize,
    pub aniso_dim: usize,
}

/// The class of a form in the Witt group, named by its anisotropic kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WittClass {
    pub aniso_dim: usize,
    pub det: SquareClass,
    pub hasse: i8,
    pub p: Prime,
}

/// Quadratic étale algebra `K = ℚ_p[√𝔡]`; `𝔡 = 1` is the split algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticEtale {
    pub disc: SquareClass,
}

impl QuadraticEtale {
    pub fn new(d: &Rational, p: Prime) -> Result<Self> {
        Ok(QuadraticEtale { disc: square_class(d, p)? })
    }

    pub fn split(p: Prime) -> Self {
        QuadraticEtale { disc: SquareClass::one(p) }
    }

    pub fn is_split(&self) -> bool {
        self.disc.is_one()
    }

    pub fn prime(&self) -> Prime {
        self.disc.prime()
    }

    /// All quadratic étale algebras over ℚ_p, split first.
    pub fn all(p: Prime) -> Vec<Self> {
        square_class_table(p).into_iter().map(|disc| QuadraticEtale { disc }).collect()
    }
}

impl fmt::Display for QuadraticEtale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_split() {
            write!(f, "split")
        } else {
            write!(f, "Q_{}(sqrt({}))", self.prime(), self.disc)
        }
    }
}

/// Hasse invariant `∏_{i<j} (a_i, a_j)_p` of a diagonal form.
pub fn hasse_of_diagonal(a: &[Rational], p: Prime) -> Result<i8> {
    // the symbol only sees square classes, whose representatives are small
    let reps = a.iter().map(|x| Ok(square_class(x, p)?.representative())).collect::<Result<Vec<_>>>()?;
    let mut s = 1;
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            s *= hilbert_qp(&reps[i], &reps[j], p)?;
        }
    }
    Ok(s)
}

fn neg_one(p: Prime) -> SquareClass {
    square_class(&int(-1), p).expect("nonzero")
}

/// Classical isotropy criterion over ℚ_p from the invariant triple.
pub fn isotropic_from_invariants(dim: usize, det: SquareClass, hasse: i8) -> bool {
    let p = det.prime();
    let minus_one = neg_one(p);
    let hm = |a: &SquareClass, b: &SquareClass| hilbert_qp(&a.representative(), &b.representative(), p).unwrap();
    match dim {
        0 | 1 => false,
        2 => det == minus_one,
        3 => hasse == hm(&minus_one, &det.mul(&minus_one)),
        4 => !det.is_one() || hasse == hm(&minus_one, &minus_one),
        _ => true,
    }
}

/// Peels hyperbolic planes off the invariant triple.
pub fn witt_reduce(dim: usize, det: SquareClass, hasse: i8) -> (usize, WittClass) {
    let p = det.prime();
    let (mut dim, mut det, mut hasse) = (dim, det, hasse);
    let mut index = 0;
    while isotropic_from_invariants(dim, det, hasse) {
        dim -= 2;
        det = det.mul(&neg_one(p));
        hasse *= hilbert_qp(&int(-1), &det.representative(), p).unwrap();
        index += 1;
    }
    (index, WittClass { aniso_dim: dim, det, hasse, p })
}

impl WittClass {
    pub fn zero(p: Prime) -> Self {
        WittClass { aniso_dim: 0, det: SquareClass::one(p), hasse: 1, p }
    }

    pub fn is_zero(&self) -> bool {
        self.aniso_dim == 0
    }

    /// An anisotropic diagonal form with these invariants, found by search
    /// over the square-class table.
    pub fn realize(&self) -> Result<QuadForm> {
        let table = square_class_table(self.p);
        let d = self.aniso_dim;
        if d == 0 {
            return QuadForm::new(Matrix::zeros(0, 0), self.p);
        }
        let mut idx = vec![0usize; d];
        loop {
            let entries: Vec<Rational> = idx.iter().map(|&i| table[i].representative()).collect();
            let det = square_class(&entries.iter().product(), self.p)?;
            if det == self.det && hasse_of_diagonal(&entries, self.p)? == self.hasse && !isotropic_from_invariants(d, det, self.hasse) {
                return QuadForm::from_diagonal(&entries, self.p);
            }
            let mut k = 0;
            loop {
                if k == d {
                    return Err(Error::Invalid(format!("no anisotropic form realizes {self:?}")));
                }
                idx[k] += 1;
                if idx[k] < table.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

impl QuadForm {
    pub fn new(gram: Matrix, p: Prime) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::Invalid("quadratic form Gram must be symmetric".into()));
        }
        if !gram.is_invertible() {
            return Err(Error::Degenerate("quadratic form is degenerate".into()));
        }
        Ok(QuadForm { gram, p, label: None })
    }

    pub fn from_diagonal(a: &[Rational], p: Prime) -> Result<Self> {
        Self::new(Matrix::diag(a), p)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// Congruence diagonalization: returns `(a, P)` with `Pᵀ G P = diag(a)`.
    pub fn diagonalize(&self) -> (Vec<Rational>, Matrix) {
        let n = self.dim();
        let mut a = self.gram.clone();
        let mut pm = Matrix::identity(n);
        // e_t ← e_t + c·e_s, applied to the Gram on both sides and to P
        let add = |a: &mut Matrix, pm: &mut Matrix, t: usize, s: usize, c: &Rational| {
            for r in 0..n {
                let v = c * &a[(r, s)];
                a[(r, t)] += v;
                let v = c * &pm[(r, s)];
                pm[(r, t)] += v;
            }
            for r in 0..n {
                let v = c * &a[(s, r)];
                a[(t, r)] += v;
            }
        };
        for k in 0..n {
            if a[(k, k)].is_zero() {
                if let Some(i) = (k + 1..n).find(|&i| !a[(i, i)].is_zero()) {
                    for r in 0..n {
                        let (x, y) = (a[(r, k)].clone(), a[(r, i)].clone());
                        a[(r, k)] = y;
                        a[(r, i)] = x;
                        let (x, y) = (pm[(r, k)].clone(), pm[(r, i)].clone());
                        pm[(r, k)] = y;
                        pm[(r, i)] = x;
                    }
                    for r in 0..n {
                        let (x, y) = (a[(k, r)].clone(), a[(i, r)].clone());
                        a[(k, r)] = y;
                        a[(i, r)] = x;
                    }
                } else {
                    // zero diagonal: e_k ← e_k + e_j for the first j with a_kj ≠ 0
                    let j = (k + 1..n).find(|&j| !a[(k, j)].is_zero()).expect("non-degenerate");
                    add(&mut a, &mut pm, k, j, &Rational::one());
                }
            }
            let pivot = a[(k, k)].clone();
            for j in k + 1..n {
                if !a[(k, j)].is_zero() {
                    let c = -(&a[(k, j)] / &pivot);
                    add(&mut a, &mut pm, j, k, &c);
                }
            }
        }
        ((0..n).map(|i| a[(i, i)].clone()).collect(), pm)
    }

    /// Diagonal entries of an equivalent diagonal form.
    pub fn diagonal(&self) -> Vec<Rational> {
        self.gram.ldl_pivots().unwrap_or_else(|| self.diagonalize().0)
    }

    pub fn det_class(&self) -> SquareClass {
        square_class(&self.gram.det(), self.p).expect("non-degenerate")
    }

    pub fn dpm(&self) -> SquareClass {
        let n = self.dim() as u64;
        self.det_class().neg_pow(n * n.saturating_sub(1) / 2)
    }

    pub fn hasse(&self) -> i8 {
        hasse_of_diagonal(&self.diagonal(), self.p).expect("nonzero diagonal")
    }

    pub fn invariants(&self) -> FormInvariants {
        let det = self.det_class();
        let hasse = self.hasse();
        let (witt_index, kernel) = witt_reduce(self.dim(), det, hasse);
        FormInvariants { dim: self.dim(), det, dpm: self.dpm(), hasse, witt_index, aniso_dim: kernel.aniso_dim }
    }

    pub fn is_isotropic(&self) -> bool {
        isotropic_from_invariants(self.dim(), self.det_class(), self.hasse())
    }

    pub fn witt_decompose(&self) -> (usize, WittClass) {
        witt_reduce(self.dim(), self.det_class(), self.hasse())
    }

    pub fn witt_class(&self) -> WittClass {
        self.witt_decompose().1
    }

    pub fn equivalent(&self, other: &QuadForm) -> Result<bool> {
        check_same_prime(self.p, other.p)?;
        Ok(self.dim() == other.dim() && self.det_class() == other.det_class() && self.hasse() == other.hasse())
    }

    pub fn witt_equivalent(&self, other: &QuadForm) -> Result<bool> {
        check_same_prime(self.p, other.p)?;
        Ok(self.witt_class() == other.witt_class())
    }

    pub fn direct_sum(&self, other: &QuadForm) -> Result<QuadForm> {
        check_same_prime(self.p, other.p)?;
        QuadForm::new(Matrix::block_diag(&[&self.gram, &other.gram]), self.p)
    }

    pub fn scale(&self, c: &Rational) -> Result<QuadForm> {
        if c.is_zero() {
            return Err(Error::Zero("form scaling factor"));
        }
        QuadForm::new(self.gram.scale(c), self.p)
    }

    /// `PᵀGP` for an invertible `P`.
    pub fn transform(&self, pm: &Matrix) -> Result<QuadForm> {
        QuadForm::new(self.gram.congruent(pm), self.p)
    }

    /// `k` hyperbolic planes, each with Gram `[[0,1],[1,0]]`.
    pub fn hyperbolic(k: usize, p: Prime) -> QuadForm {
        let h = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        let blocks: Vec<&Matrix> = (0..k).map(|_| &h).collect();
        QuadForm { gram: Matrix::block_diag(&blocks), p, label: None }
    }

    /// The norm form of `K`: `⟨1, −𝔡⟩`, or the hyperbolic plane when split.
    pub fn norm_form(k: &QuadraticEtale) -> QuadForm {
        if k.is_split() {
            Self::hyperbolic(1, k.prime())
        } else {
            Self::from_diagonal(&[Rational::one(), -k.disc.representative()], k.prime()).expect("nonzero")
        }
    }

    pub fn represents(&self, a: &Rational) -> Result<bool> {
        if a.is_zero() {
            return Err(Error::Zero("represented value"));
        }
        let minus_a = QuadForm::from_diagonal(&[-a.clone()], self.p)?;
        Ok(self.direct_sum(&minus_a)?.is_isotropic())
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.diagonal().iter().map(crate::arith::fmt_rational).collect();
        write!(f, "<{}> over Q_{}", d.join(", "), self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn diagonalize_hyperbolic_plane() {
        let h = QuadForm::hyperbolic(1, pr(3));
        let (a, pm) = h.diagonalize();
        assert_eq!(a, vec![int(2), rat(-1, 2)]);
        assert_eq!(h.gram().congruent(&pm), Matrix::diag(&a));
        let inv = h.invariants();
        assert_eq!(inv.det.rep_i128(), square_class(&int(-1), pr(3)).unwrap().rep_i128());
        assert!(inv.dpm.is_one());
        assert_eq!(inv.hasse, 1);
        assert_eq!((inv.witt_index, inv.aniso_dim), (1, 0));
    }

    #[test]
    fn small_examples() {
        let q = QuadForm::from_diagonal(&[int(-1), int(-1)], pr(2)).unwrap();
        assert_eq!(q.hasse(), -1);
        let q = QuadForm::from_diagonal(&[int(1), int(-3)], pr(3)).unwrap();
        assert!(!q.is_isotropic());
        assert!(!q.represents(&int(3)).unwrap());
        let four = QuadForm::from_diagonal(&vec![int(1); 4], pr(3)).unwrap();
        assert!(four.witt_decompose().0 >= 1);
        let a = QuadForm::from_diagonal(&[int(1), int(1)], pr(5)).unwrap();
        let b = QuadForm::from_diagonal(&[int(2), int(2)], pr(5)).unwrap();
        assert!(a.equivalent(&b).unwrap());
        let c = QuadForm::from_diagonal(&[int(1), int(1)], pr(3)).unwrap();
        assert!(!QuadForm::hyperbolic(1, pr(3)).equivalent(&c).unwrap());
        assert!(QuadForm::hyperbolic(2, pr(7)).represents(&int(14)).unwrap());
    }

    #[test]
    fn zero_diagonal_pivot() {
        let g = Matrix::from_i64(&[&[0, 1, 0], &[1, 0, 2], &[0, 2, 0]]);
        let r = Matrix::from_i64(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        let q = QuadForm::new(&g + &r, pr(5)).unwrap();
        let (a, pm) = q.diagonalize();
        assert_eq!(q.gram().congruent(&pm), Matrix::diag(&a));
    }
}
