//! Étale algebras with involution `(L, L±, τ)` over ℚ_p, built as products of
//! towers `F_i ⊂ L_i` with `L_i` split or a quadratic field over `F_i`.

use num_traits::{One, Zero};

use crate::arith::{Prime, Rational};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Poly};
use crate::localfield::{is_local_norm, FieldElem, LocalFieldDescriptor};
use crate::qform::QuadForm;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// `L_i = F_i × F_i`, τ the swap.
    Split,
    /// `L_i = F_i(√d)`, τ: `√d ↦ −√d`.
    Quadratic { d: FieldElem },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorTower {
    pub base: LocalFieldDescriptor,
    pub step: Step,
}

impl FactorTower {
    pub fn split(base: LocalFieldDescriptor) -> Self {
        FactorTower { base, step: Step::Split }
    }

    /// Quadratic step; `d` must be a non-square in the base.
    pub fn quadratic(base: LocalFieldDescriptor, d: FieldElem) -> Result<Self> {
        base.check_elem(&d)?;
        if base.is_zero(&d) {
            return Err(Error::Zero("quadratic step parameter"));
        }
        if base.is_square(&d)? {
            return Err(Error::Certificate("quadratic step parameter is a square in the base".into()));
        }
        Ok(FactorTower { base, step: Step::Quadratic { d } })
    }

    pub fn is_split(&self) -> bool {
        matches!(self.step, Step::Split)
    }

    fn base_dim(&self) -> usize {
        self.base.degree()
    }
}

/// Per-factor pair of base-field coordinates: `(a, b)` for split factors,
/// `a + b√d` for quadratic ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    pub parts: Vec<[FieldElem; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaleAlgebra {
    factors: Vec<FactorTower>,
    p: Prime,
    dim: usize,
}

impl EtaleAlgebra {
    pub fn new(factors: Vec<FactorTower>) -> Result<Self> {
        let p = factors.first().ok_or_else(|| Error::Invalid("algebra needs at least one factor".into()))?.base.prime();
        for f in &factors {
            crate::arith::check_same_prime(p, f.base.prime())?;
        }
        let dim = factors.iter().map(|f| 2 * f.base_dim()).sum();
        Ok(EtaleAlgebra { factors, p, dim })
    }

    pub fn factors(&self) -> &[FactorTower] {
        &self.factors
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// `dim_{ℚ_p} L`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_split_factor(&self) -> bool {
        self.factors.iter().any(FactorTower::is_split)
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { parts: self.factors.iter().map(|f| [f.base.zero(), f.base.zero()]).collect() }
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement {
            parts: self
                .factors
                .iter()
                .map(|f| match f.step {
                    Step::Split => [f.base.one(), f.base.one()],
                    Step::Quadratic { .. } => [f.base.one(), f.base.zero()],
                })
                .collect(),
        }
    }

    pub fn from_rational(&self, c: &Rational) -> AlgebraElement {
        self.scale(c, &self.one())
    }

    /// Embeds an element of `L± = ∏ F_i`.
    pub fn from_fixed(&self, t: &[FieldElem]) -> Result<AlgebraElement> {
        if t.len() != self.factors.len() {
            return Err(Error::Dimension("one base element per factor expected".into()));
        }
        let parts = self
            .factors
            .iter()
            .zip(t)
            .map(|(f, a)| {
                f.base.check_elem(a)?;
                Ok(match f.step {
                    Step::Split => [a.clone(), a.clone()],
                    Step::Quadratic { .. } => [a.clone(), f.base.zero()],
                })
            })
            .collect::<Result<_>>()?;
        Ok(AlgebraElement { parts })
    }

    /// The `L±` coordinates of a τ-fixed element.
    pub fn fixed_part(&self, x: &AlgebraElement) -> Result<Vec<FieldElem>> {
        if !self.is_fixed(x) {
            return Err(Error::Invalid("element is not fixed by the involution".into()));
        }
        Ok(x.parts.iter().map(|[a, _]| a.clone()).collect())
    }

    pub fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.parts.len() != self.factors.len() {
            return Err(Error::Dimension(format!("{} factors, element has {}", self.factors.len(), x.parts.len())));
        }
        for (f, [a, b]) in self.factors.iter().zip(&x.parts) {
            f.base.check_elem(a)?;
            f.base.check_elem(b)?;
        }
        Ok(())
    }

    /// Flat ℚ_p coordinates in the fixed basis (factor, component, base power).
    pub fn to_coords(&self, x: &AlgebraElement) -> Vec<Rational> {
        x.parts.iter().flat_map(|[a, b]| a.iter().chain(b.iter()).cloned()).collect()
    }

    pub fn from_coords(&self, v: &[Rational]) -> Result<AlgebraElement> {
        if v.len() != self.dim {
            return Err(Error::Dimension(format!("expected {} coordinates, got {}", self.dim, v.len())));
        }
        let mut parts = Vec::new();
        let mut at = 0;
        for f in &self.factors {
            let d = f.base_dim();
            parts.push([v[at..at + d].to_vec(), v[at + d..at + 2 * d].to_vec()]);
            at += 2 * d;
        }
        Ok(AlgebraElement { parts })
    }

    pub fn basis(&self) -> Vec<AlgebraElement> {
        (0..self.dim)
            .map(|i| {
                let mut v = vec![Rational::zero(); self.dim];
                v[i] = Rational::one();
                self.from_coords(&v).expect("dimension")
            })
            .collect()
    }

    fn zip_parts(
        &self,
        x: &AlgebraElement,
        y: &AlgebraElement,
        op: impl Fn(&FactorTower, &[FieldElem; 2], &[FieldElem; 2]) -> [FieldElem; 2],
    ) -> AlgebraElement {
        AlgebraElement { parts: self.factors.iter().zip(&x.parts).zip(&y.parts).map(|((f, a), b)| op(f, a, b)).collect() }
    }

    pub fn add(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        self.zip_parts(x, y, |f, a, b| [f.base.add(&a[0], &b[0]), f.base.add(&a[1], &b[1])])
    }

    pub fn sub(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        self.zip_parts(x, y, |f, a, b| [f.base.sub(&a[0], &b[0]), f.base.sub(&a[1], &b[1])])
    }

    pub fn neg(&self, x: &AlgebraElement) -> AlgebraElement {
        self.scale(&-Rational::one(), x)
    }

    pub fn scale(&self, c: &Rational, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            parts: self.factors.iter().zip(&x.parts).map(|(f, [a, b])| [f.base.scale(c, a), f.base.scale(c, b)]).collect(),
        }
    }

    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        self.zip_parts(x, y, |f, a, b| {
            let k = &f.base;
            match &f.step {
                Step::Split => [k.mul(&a[0], &b[0]), k.mul(&a[1], &b[1])],
                Step::Quadratic { d } => {
                    let re = k.add(&k.mul(&a[0], &b[0]), &k.mul(d, &k.mul(&a[1], &b[1])));
                    let im = k.add(&k.mul(&a[0], &b[1]), &k.mul(&a[1], &b[0]));
                    [re, im]
                }
            }
        })
    }

    pub fn tau(&self, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            parts: self
                .factors
                .iter()
                .zip(&x.parts)
                .map(|(f, [a, b])| match f.step {
                    Step::Split => [b.clone(), a.clone()],
                    Step::Quadratic { .. } => [a.clone(), f.base.neg(b)],
                })
                .collect(),
        }
    }

    pub fn is_fixed(&self, x: &AlgebraElement) -> bool {
        &self.tau(x) == x
    }

    pub fn is_anti_fixed(&self, x: &AlgebraElement) -> bool {
        self.tau(x) == self.neg(x)
    }

    /// Per-factor norm `N_{L_i/F_i}(x_i)`.
    pub fn factor_norms(&self, x: &AlgebraElement) -> Vec<FieldElem> {
        self.factors
            .iter()
            .zip(&x.parts)
            .map(|(f, [a, b])| {
                let k = &f.base;
                match &f.step {
                    Step::Split => k.mul(a, b),
                    Step::Quadratic { d } => k.sub(&k.mul(a, a), &k.mul(d, &k.mul(b, b))),
                }
            })
            .collect()
    }

    pub fn is_invertible(&self, x: &AlgebraElement) -> bool {
        self.factors.iter().zip(&x.parts).zip(self.factor_norms(x)).all(|((f, [a, b]), n)| match f.step {
            Step::Split => !f.base.is_zero(a) && !f.base.is_zero(b),
            Step::Quadratic { .. } => !f.base.is_zero(&n),
        })
    }

    pub fn inverse(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if !self.is_invertible(x) {
            return Err(Error::NotInvertible("algebra element is a zero divisor".into()));
        }
        let norms = self.factor_norms(x);
        let parts = self
            .factors
            .iter()
            .zip(&x.parts)
            .zip(norms)
            .map(|((f, [a, b]), n)| {
                let k = &f.base;
                Ok(match f.step {
                    Step::Split => [k.inv(a)?, k.inv(b)?],
                    Step::Quadratic { .. } => {
                        let ni = k.inv(&n)?;
                        [k.mul(a, &ni), k.neg(&k.mul(b, &ni))]
                    }
                })
            })
            .collect::<Result<_>>()?;
        Ok(AlgebraElement { parts })
    }

    /// `x·τ(x)`, an element of `L±` (embedded in `L`).
    pub fn norm_to_fixed(&self, x: &AlgebraElement) -> AlgebraElement {
        self.mul(x, &self.tau(x))
    }

    pub fn mult_matrix(&self, x: &AlgebraElement) -> Matrix {
        let cols: Vec<Vec<Rational>> = self.basis().iter().map(|b| self.to_coords(&self.mul(x, b))).collect();
        Matrix::from_columns(&cols)
    }

    pub fn trace_to_qp(&self, x: &AlgebraElement) -> Rational {
        self.mult_matrix(x).trace()
    }

    pub fn norm_to_qp(&self, x: &AlgebraElement) -> Rational {
        self.mult_matrix(x).det()
    }

    /// `N_{L±/ℚ_p}` of a τ-fixed element.
    pub fn fixed_norm_to_qp(&self, t: &AlgebraElement) -> Result<Rational> {
        let fixed = self.fixed_part(t)?;
        Ok(self.factors.iter().zip(&fixed).map(|(f, a)| f.base.norm(a)).product())
    }

    pub fn char_poly(&self, x: &AlgebraElement) -> Poly {
        self.mult_matrix(x).char_poly()
    }

    /// `F[x] = L`, i.e. the characteristic polynomial is squarefree.
    pub fn is_generator(&self, x: &AlgebraElement) -> bool {
        self.char_poly(x).is_squarefree()
    }

    /// `x/τ(x) ± 1` both invertible.
    pub fn very_regular(&self, x: &AlgebraElement) -> Result<bool> {
        let r = self.mul(x, &self.inverse(&self.tau(x))?);
        let one = self.one();
        Ok(self.is_invertible(&self.sub(&r, &one)) && self.is_invertible(&self.add(&r, &one)))
    }

    /// Gram of `(v, v′) ↦ tr_{L/ℚ_p}(τ(v)·v′·x)` in the fixed basis.
    pub fn trace_form_bilinear(&self, x: &AlgebraElement) -> Result<Matrix> {
        if !self.is_invertible(x) {
            return Err(Error::NotInvertible("trace form parameter".into()));
        }
        let basis = self.basis();
        let taus: Vec<AlgebraElement> = basis.iter().map(|b| self.tau(b)).collect();
        let mut g = Matrix::zeros(self.dim, self.dim);
        for (j, bj) in basis.iter().enumerate() {
            let bjx = self.mul(bj, x);
            for (i, ti) in taus.iter().enumerate() {
                g[(i, j)] = self.trace_to_qp(&self.mul(ti, &bjx));
            }
        }
        if !g.is_invertible() {
            return Err(Error::Degenerate("trace form of an invertible element is degenerate".into()));
        }
        Ok(g)
    }

    /// The symmetric trace form `q_c` for a τ-fixed invertible `c`.
    pub fn trace_form_quadratic(&self, c: &AlgebraElement) -> Result<QuadForm> {
        if !self.is_fixed(c) {
            return Err(Error::Invalid("trace form parameter must be fixed by the involution".into()));
        }
        QuadForm::new(self.trace_form_bilinear(c)?, self.p)
    }

    /// Whether each factor of a τ-fixed `c` is a norm from `L_i`. Split
    /// factors always are.
    pub fn norm_coset(&self, c: &AlgebraElement) -> Result<Vec<bool>> {
        let fixed = self.fixed_part(c)?;
        self.factors
            .iter()
            .zip(&fixed)
            .map(|(f, a)| match &f.step {
                Step::Split => Ok(true),
                Step::Quadratic { d } => is_local_norm(&f.base, d, a),
            })
            .collect()
    }
}
