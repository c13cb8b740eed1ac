//! Formal bookkeeping for selfdual parameters: constituents, sign types, and
//! the elliptic endoscopic datum a parameter factors through.

use crate::arith::Prime;
use crate::endoscopy::EndoscopicDatum;
use crate::error::{Error, Result};
use crate::localfield::SquareClass;
use crate::qform::QuadraticEtale;

/// Orthogonal (`+1`) or symplectic (`−1`) type of a selfdual constituent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalConstituent {
    pub dim: usize,
    /// `None` exactly for a non-selfdual constituent, which stands for the
    /// pair `φ_j ⊕ φ_j^∨`.
    pub sign: Option<Sign>,
    pub det_char: QuadraticEtale,
    pub mult: usize,
    /// Distinguishes constituents whose other data coincide.
    pub tag: String,
}

impl FormalConstituent {
    pub fn new(dim: usize, sign: Option<Sign>, det_char: QuadraticEtale, mult: usize) -> Result<Self> {
        let c = FormalConstituent { dim, sign, det_char, mult, tag: String::new() };
        c.validate()?;
        Ok(c)
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn selfdual(&self) -> bool {
        self.sign.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.mult == 0 {
            return Err(Error::Invalid("constituent dimension and multiplicity must be positive".into()));
        }
        if self.sign == Some(Sign::Minus) {
            if !self.det_char.is_split() {
                return Err(Error::Invalid("symplectic constituent must have trivial determinant".into()));
            }
            if self.dim % 2 != 0 {
                return Err(Error::Invalid("symplectic constituent must have even dimension".into()));
            }
        }
        if self.sign == Some(Sign::Plus) && self.dim == 2 && self.det_char.is_split() {
            return Err(Error::Invalid("irreducible orthogonal plane must have nontrivial determinant".into()));
        }
        Ok(())
    }

    /// Whether two constituents name the same representation; a character
    /// is determined by its determinant.
    pub fn same_as(&self, other: &FormalConstituent) -> bool {
        if self.dim == 1 && other.dim == 1 {
            self.sign == other.sign && self.det_char == other.det_char
        } else {
            self == other
        }
    }

    /// Contribution to the total dimension.
    pub fn weight(&self) -> usize {
        let pair = if self.selfdual() { 1 } else { 2 };
        self.mult * self.dim * pair
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalParameter {
    pub constituents: Vec<FormalConstituent>,
    pub total_dim: usize,
    pub p: Prime,
}

impl FormalParameter {
    pub fn new(constituents: Vec<FormalConstituent>, p: Prime) -> Result<Self> {
        for c in &constituents {
            c.validate()?;
            crate::arith::check_same_prime(p, c.det_char.prime())?;
        }
        let total_dim = constituents.iter().map(FormalConstituent::weight).sum();
        if total_dim == 0 {
            return Err(Error::Invalid("empty parameter".into()));
        }
        Ok(FormalParameter { constituents, total_dim, p })
    }
}

pub fn is_elliptic_param(phi: &FormalParameter) -> bool {
    let cs = &phi.constituents;
    cs.iter().all(|c| c.selfdual() && c.mult == 1)
        && cs.iter().enumerate().all(|(i, a)| cs[i + 1..].iter().all(|b| !a.same_as(b)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub datum: EndoscopicDatum,
    /// Number of symplectic constituents, the literal cardinality reading
    /// of `n_S`.
    pub symplectic_count: usize,
    /// Set when the cardinality and dimension-sum readings of `n_S` differ.
    pub readings_differ: bool,
}

/// `n_S = Σ_{sign −1} dim`, `n_O = 2n − n_S`, `χ = ∏_{sign +1} det`.
pub fn classify(phi: &FormalParameter) -> Result<Classification> {
    if !is_elliptic_param(phi) {
        return Err(Error::Precondition("parameter is not elliptic".into()));
    }
    if phi.total_dim % 2 != 0 {
        return Err(Error::Dimension(format!("total dimension {} is odd", phi.total_dim)));
    }
    let minus: Vec<&FormalConstituent> = phi.constituents.iter().filter(|c| c.sign == Some(Sign::Minus)).collect();
    let n_s: usize = minus.iter().map(|c| c.dim).sum();
    let chi = phi
        .constituents
        .iter()
        .filter(|c| c.sign == Some(Sign::Plus))
        .fold(SquareClass::one(phi.p), |acc, c| acc.mul(&c.det_char.disc));
    let datum = EndoscopicDatum::new(phi.total_dim - n_s, n_s, QuadraticEtale { disc: chi })?;
    Ok(Classification { datum, symplectic_count: minus.len(), readings_differ: minus.len() != n_s })
}

/// For an irreducible parameter: it does not come from `SO(2n+1)`.
pub fn hypothesis_even_so(phi: &FormalParameter) -> Result<bool> {
    match phi.constituents.as_slice() {
        [c] if c.mult == 1 => match c.sign {
            Some(s) => Ok(s == Sign::Plus),
            None => Err(Error::Invalid("irreducible parameter is not selfdual".into())),
        },
        _ => Err(Error::Invalid("hypothesis applies to irreducible parameters only".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultShell {
    Zero,
    RequiresPacketData,
}

/// `mult(σ : φ)`: zero across different endoscopic groups, otherwise a
/// placeholder for packet data.
pub fn mult_shell(
    _sigma_tag: &str,
    phi: &FormalParameter,
    g_of_sigma: &EndoscopicDatum,
    g_of_phi: &EndoscopicDatum,
) -> Result<MultShell> {
    if !is_elliptic_param(phi) {
        return Err(Error::Precondition("parameter is not elliptic".into()));
    }
    Ok(if g_of_sigma == g_of_phi { MultShell::RequiresPacketData } else { MultShell::Zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn p() -> Prime {
        Prime::new(5).unwrap()
    }

    fn k(d: i64) -> QuadraticEtale {
        QuadraticEtale::new(&int(d), p()).unwrap()
    }

    #[test]
    fn rules() {
        let phi = FormalParameter::new(
            vec![
                FormalConstituent::new(2, Some(Sign::Plus), k(2), 1).unwrap(),
                FormalConstituent::new(2, Some(Sign::Minus), k(1), 1).unwrap(),
            ],
            p(),
        )
        .unwrap();
        let c = classify(&phi).unwrap();
        assert_eq!((c.datum.n_o, c.datum.n_s, c.datum.k), (2, 2, k(2)));
        assert!(c.readings_differ);
        assert!(FormalConstituent::new(3, Some(Sign::Minus), k(1), 1).is_err());
        assert!(FormalConstituent::new(2, Some(Sign::Minus), k(2), 1).is_err());
    }
}
