//! Representatives of very-regular stable classes built from étale-algebra
//! parameters, their invariants, the endoscopic correspondence, and Weyl
//! discriminants.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::etale::{AlgebraElement, EtaleAlgebra, Step};
use crate::linalg::{Matrix, Poly};
use crate::localfield::square_class;
use crate::qform::QuadForm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    TglEven,
    TglOdd,
    SoEven,
    SoOdd,
    Sp,
    U,
    TglE,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassParameter {
    pub kind: ClassKind,
    pub algebra: EtaleAlgebra,
    /// `x` for twisted kinds, `y` for classical ones.
    pub element: AlgebraElement,
    pub c: Option<AlgebraElement>,
    pub x_d: Option<Rational>,
    pub a: Option<Rational>,
}

impl ClassParameter {
    pub fn twisted(algebra: EtaleAlgebra, x: AlgebraElement) -> Self {
        ClassParameter { kind: ClassKind::TglEven, algebra, element: x, c: None, x_d: None, a: None }
    }

    pub fn classical(kind: ClassKind, algebra: EtaleAlgebra, y: AlgebraElement, c: AlgebraElement) -> Self {
        ClassParameter { kind, algebra, element: y, c: Some(c), x_d: None, a: None }
    }

    fn require_kind(&self, kinds: &[ClassKind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            Err(Error::Invalid(format!("parameter of kind {:?} where {kinds:?} expected", self.kind)))
        }
    }

    fn c(&self) -> Result<&AlgebraElement> {
        self.c.as_ref().ok_or_else(|| Error::Invalid("parameter is missing c".into()))
    }

    fn check_twisted(&self) -> Result<()> {
        let alg = &self.algebra;
        alg.check(&self.element)?;
        if !alg.is_invertible(&self.element) || !alg.is_generator(&self.element) {
            return Err(Error::Invalid("x must be an invertible generator of L".into()));
        }
        Ok(())
    }

    /// `y·τ(y) = 1` and `y` generates `L`.
    fn check_unitary_y(&self) -> Result<()> {
        let alg = &self.algebra;
        alg.check(&self.element)?;
        if alg.norm_to_fixed(&self.element) != alg.one() {
            return Err(Error::Invalid("y·τ(y) ≠ 1".into()));
        }
        if !alg.is_generator(&self.element) {
            return Err(Error::Invalid("y does not generate L".into()));
        }
        Ok(())
    }

    /// Very-regularity in the sense appropriate to the kind.
    pub fn is_very_regular(&self) -> Result<bool> {
        let alg = &self.algebra;
        match self.kind {
            ClassKind::TglEven | ClassKind::TglOdd | ClassKind::TglE => alg.very_regular(&self.element),
            _ => {
                let f = alg.char_poly(&self.element);
                Ok(!f.eval(&Rational::one()).is_zero() && !f.eval(&-Rational::one()).is_zero())
            }
        }
    }
}

/// `δ = (tr_{L/ℚ_p}(τ(b_i) b_j x))`.
pub fn build_tgl_even(param: &ClassParameter) -> Result<Matrix> {
    param.require_kind(&[ClassKind::TglEven, ClassKind::TglOdd, ClassKind::TglE])?;
    param.check_twisted()?;
    param.algebra.trace_form_bilinear(&param.element)
}

/// `δ ⊕ ⟨x_D⟩`.
pub fn build_tgl_odd(param: &ClassParameter) -> Result<Matrix> {
    param.require_kind(&[ClassKind::TglOdd])?;
    let xd = param.x_d.as_ref().ok_or_else(|| Error::Invalid("odd twisted parameter needs x_D".into()))?;
    if xd.is_zero() {
        return Err(Error::Zero("x_D"));
    }
    let even = build_tgl_even(param)?;
    Ok(Matrix::block_diag(&[&even, &Matrix::diag(&[xd.clone()])]))
}

fn classical_pieces(param: &ClassParameter, anti: bool) -> Result<(Matrix, Matrix)> {
    param.check_unitary_y()?;
    let alg = &param.algebra;
    let c = param.c()?;
    alg.check(c)?;
    if anti {
        if !alg.is_anti_fixed(c) {
            return Err(Error::Invalid("symplectic parameter needs τ(c) = −c".into()));
        }
    } else if !alg.is_fixed(c) {
        return Err(Error::Invalid("orthogonal parameter needs τ(c) = c".into()));
    }
    let gram = alg.trace_form_bilinear(c)?;
    let gamma = alg.mult_matrix(&param.element);
    debug_assert_eq!(gram.congruent(&gamma), gram);
    Ok((gram, gamma))
}

/// `(q_c, γ)` with `γ` multiplication by `y`.
pub fn build_so_even(param: &ClassParameter) -> Result<(QuadForm, Matrix)> {
    param.require_kind(&[ClassKind::SoEven, ClassKind::SoOdd])?;
    let (gram, gamma) = classical_pieces(param, false)?;
    Ok((QuadForm::new(gram, param.algebra.prime())?, gamma))
}

/// `(q_c ⊕ ⟨a⟩, γ ⊕ 1)`.
pub fn build_so_odd(param: &ClassParameter) -> Result<(QuadForm, Matrix)> {
    param.require_kind(&[ClassKind::SoOdd])?;
    let a = param.a.as_ref().ok_or_else(|| Error::Invalid("odd orthogonal parameter needs a".into()))?;
    if a.is_zero() {
        return Err(Error::Zero("a"));
    }
    let (q, gamma) = build_so_even(param)?;
    let q = q.direct_sum(&QuadForm::from_diagonal(&[a.clone()], q.prime())?)?;
    let gamma = Matrix::block_diag(&[&gamma, &Matrix::identity(1)]);
    Ok((q, gamma))
}

/// The square class of `a` forced by a target space: `det V / det q_c`,
/// checked by Witt cancellation.
pub fn so_odd_match_a(param: &ClassParameter, target: &QuadForm) -> Result<Rational> {
    let (qc, _) = build_so_even(param)?;
    if target.dim() != qc.dim() + 1 {
        return Err(Error::Dimension("target must have dimension dim L + 1".into()));
    }
    let a = square_class(&(target.gram().det() / qc.gram().det()), qc.prime())?.representative();
    let full = qc.direct_sum(&QuadForm::from_diagonal(&[a.clone()], qc.prime())?)?;
    if !full.equivalent(target)? {
        return Err(Error::Invalid("no a realizes the target space for this parameter".into()));
    }
    Ok(a)
}

/// `(alternating Gram, γ)` for `τ(c) = −c`.
pub fn build_sp(param: &ClassParameter) -> Result<(Matrix, Matrix)> {
    param.require_kind(&[ClassKind::Sp])?;
    let (gram, gamma) = classical_pieces(param, true)?;
    debug_assert!(gram.is_alternating());
    Ok((gram, gamma))
}

/// `√e` for an algebra all of whose factors are `F_i(√e)` with one common
/// rational `e`.
fn common_sqrt(alg: &EtaleAlgebra) -> Result<AlgebraElement> {
    let mut e: Option<Rational> = None;
    let mut parts = Vec::new();
    for f in alg.factors() {
        match &f.step {
            Step::Quadratic { d } if d[1..].iter().all(Zero::is_zero) => {
                if e.get_or_insert_with(|| d[0].clone()) != &d[0] {
                    return Err(Error::Invalid("factors use different quadratic steps".into()));
                }
                parts.push([f.base.zero(), f.base.one()]);
            }
            _ => return Err(Error::Invalid("hermitian kinds need every factor to be F_i(√e), e rational".into())),
        }
    }
    Ok(AlgebraElement { parts })
}

/// Unitary kind: `(ℚ_p-trace form, γ, J)` with `J` multiplication by `√e`,
/// so that `E = ℚ_p(√e)` acts and `γ` is `E`-linear.
pub fn build_u(param: &ClassParameter) -> Result<(QuadForm, Matrix, Matrix)> {
    param.require_kind(&[ClassKind::U])?;
    let j = param.algebra.mult_matrix(&common_sqrt(&param.algebra)?);
    let (gram, gamma) = classical_pieces(param, false)?;
    Ok((QuadForm::new(gram, param.algebra.prime())?, gamma, j))
}

/// Twisted sesquilinear kind: `(δ, J)`.
pub fn build_tgl_e(param: &ClassParameter) -> Result<(Matrix, Matrix)> {
    param.require_kind(&[ClassKind::TglE])?;
    let j = param.algebra.mult_matrix(&common_sqrt(&param.algebra)?);
    Ok((build_tgl_even(param)?, j))
}

/// `charpoly(δ⁻¹·ᵗδ)`, the twisted-class fingerprint.
pub fn twist_invariant(delta: &Matrix) -> Result<Poly> {
    let inv = delta.inverse()?;
    Ok((&inv * &delta.transpose()).char_poly())
}

/// `x/τ(x) = −y` up to isomorphism of pairs, via equality of squarefree
/// characteristic polynomials.
pub fn corresponds(x_param: &ClassParameter, y_param: &ClassParameter) -> Result<bool> {
    if !x_param.is_very_regular()? || !y_param.is_very_regular()? {
        return Err(Error::Precondition("correspondence needs very regular parameters".into()));
    }
    if x_param.algebra.dim() != y_param.algebra.dim() {
        return Ok(false);
    }
    let a = &x_param.algebra;
    let ratio = a.mul(&x_param.element, &a.inverse(&a.tau(&x_param.element))?);
    let lhs = a.char_poly(&a.neg(&ratio));
    Ok(lhs == y_param.algebra.char_poly(&y_param.element))
}

/// Stable class is elliptic iff no factor splits.
pub fn is_elliptic(param: &ClassParameter) -> bool {
    !param.algebra.has_split_factor()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LieAlgebra {
    Gl(usize),
    /// `{A : AᵀG + GA = 0}` for a Gram `G`.
    Isometry(Matrix),
    /// `gl` with the twisted action `A ↦ −δ⁻¹Aᵀδ` of a bilinear form `δ`.
    Twisted(Matrix),
}

fn vec_of(m: &Matrix) -> Vec<Rational> {
    m.entries().to_vec()
}

fn unvec(v: &[Rational], n: usize) -> Matrix {
    Matrix::from_rows((0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect()).expect("square")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylDiscriminant {
    pub value: Rational,
    /// Dimension of the centralizer (kernel of `1 − Ad`).
    pub centralizer_dim: usize,
}

/// `det(1 − Ad_g | 𝔤/𝔤_g)` as the product of the nonzero eigenvalues of
/// `1 − Ad_g`.
pub fn weyl_discriminant(g: &Matrix, lie: &LieAlgebra) -> Result<WeylDiscriminant> {
    if !g.is_square() || !g.is_invertible() {
        return Err(Error::NotInvertible("Weyl discriminant needs an invertible matrix".into()));
    }
    let n = g.rows();
    let ginv = g.inverse()?;
    let gl_basis = || -> Vec<Matrix> {
        (0..n * n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n * n];
                v[i] = Rational::one();
                unvec(&v, n)
            })
            .collect()
    };
    let basis: Vec<Matrix> = match lie {
        LieAlgebra::Gl(k) => {
            if *k != n {
                return Err(Error::Dimension("gl size differs from the matrix size".into()));
            }
            gl_basis()
        }
        LieAlgebra::Twisted(delta) => {
            if delta != g {
                return Err(Error::Invalid("twisted discriminant takes the form itself as g".into()));
            }
            gl_basis()
        }
        LieAlgebra::Isometry(gram) => {
            if gram.rows() != n {
                return Err(Error::Dimension("Gram size differs from the matrix size".into()));
            }
            if &gram.congruent(g) != gram {
                return Err(Error::Invalid("matrix does not preserve the Gram".into()));
            }
            // kernel of A ↦ AᵀG + GA on n×n matrices
            let cols: Vec<Vec<Rational>> = (0..n * n)
                .map(|i| {
                    let mut v = vec![Rational::zero(); n * n];
                    v[i] = Rational::one();
                    let a = unvec(&v, n);
                    vec_of(&(&(&a.transpose() * gram) + &(gram * &a)))
                })
                .collect();
            Matrix::from_columns(&cols).kernel().iter().map(|v| unvec(v, n)).collect()
        }
    };
    let action = |a: &Matrix| -> Matrix {
        match lie {
            LieAlgebra::Twisted(delta) => {
                let di = delta.inverse().expect("twisted form invertible");
                -&(&(&di * &a.transpose()) * delta)
            }
            _ => &(g * a) * &ginv,
        }
    };
    let standard = !matches!(lie, LieAlgebra::Isometry(_));
    let span = Matrix::from_columns(&basis.iter().map(vec_of).collect::<Vec<_>>());
    let cols: Vec<Vec<Rational>> = basis
        .iter()
        .map(|b| {
            let img = b - &action(b);
            if standard {
                vec_of(&img)
            } else {
                span.solve_in_span(&vec_of(&img)).expect("Lie algebra is stable under Ad")
            }
        })
        .collect();
    let m = Matrix::from_columns(&cols);
    let f = m.char_poly();
    let k = f.coeffs().iter().take_while(|c| c.is_zero()).count();
    let h_deg = basis.len() - k;
    let h0 = f.coeff(k);
    let value = if h_deg % 2 == 0 { h0 } else { -h0 };
    Ok(WeylDiscriminant { value, centralizer_dim: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, Prime};
    use crate::etale::FactorTower;
    use crate::localfield::LocalFieldDescriptor;

    fn split_alg(p: u64, k: usize) -> EtaleAlgebra {
        let f = LocalFieldDescriptor::rational(Prime::new(p).unwrap());
        EtaleAlgebra::new(vec![FactorTower::split(f); k]).unwrap()
    }

    fn el(pairs: &[(i64, i64)]) -> AlgebraElement {
        AlgebraElement { parts: pairs.iter().map(|&(a, b)| [vec![int(a)], vec![int(b)]]).collect() }
    }

    #[test]
    fn split_delta_and_transpose() {
        let alg = split_alg(5, 1);
        let p = ClassParameter::twisted(alg.clone(), el(&[(2, 3)]));
        let d = build_tgl_even(&p).unwrap();
        assert_eq!(d, Matrix::from_i64(&[&[0, 3], &[2, 0]]));
        let pt = ClassParameter::twisted(alg, el(&[(3, 2)]));
        assert_eq!(build_tgl_even(&pt).unwrap(), d.transpose());
    }

    #[test]
    fn identity_discriminant() {
        let d = weyl_discriminant(&Matrix::identity(3), &LieAlgebra::Gl(3)).unwrap();
        assert_eq!(d.value, Rational::one());
        assert_eq!(d.centralizer_dim, 9);
    }

    #[test]
    fn torus_discriminant_in_gl2() {
        let g = Matrix::diag(&[int(2), int(3)]);
        let d = weyl_discriminant(&g, &LieAlgebra::Gl(2)).unwrap();
        // (1 − 2/3)(1 − 3/2)
        assert_eq!(d.value, (int(1) - Rational::new(2.into(), 3.into())) * (int(1) - Rational::new(3.into(), 2.into())));
        assert_eq!(d.centralizer_dim, 2);
    }
}
