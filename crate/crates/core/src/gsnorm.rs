//! Unipotent block elements on `V₁ = H^∨ ⊕ V ⊕ H`, their rigidification to
//! bilinear forms on `H`, and the norm map `(X, Y) ↦ 1 + Q⁻¹XᵀY⁻¹X`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{int, Prime, Rational};
use crate::classes::{twist_invariant, ClassKind, ClassParameter};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Poly};
use crate::qform::QuadForm;

/// Retry budget for rejection sampling in [`random_config`].
pub const RETRY_BUDGET: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbientSpace {
    q: Matrix,
    p: Prime,
    epsilon: i8,
    gram: Matrix,
}

impl AmbientSpace {
    /// `q_V` must be ε-symmetric and non-degenerate. For `ε = 1` an isotropic
    /// plane `V` is excluded.
    pub fn new(q: Matrix, p: Prime, epsilon: i8) -> Result<Self> {
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::Invalid("epsilon must be ±1".into()));
        }
        if !q.is_square() || !q.is_invertible() {
            return Err(Error::Degenerate("q_V must be square and non-degenerate".into()));
        }
        let eps = int(epsilon as i64);
        if q.transpose() != q.scale(&eps) {
            return Err(Error::Invalid(format!("q_V is not {epsilon}-symmetric")));
        }
        if epsilon == 1 && q.rows() == 2 && QuadForm::new(q.clone(), p)?.is_isotropic() {
            return Err(Error::Precondition("V is an isotropic plane".into()));
        }
        let n = q.rows();
        let mut gram = Matrix::zeros(3 * n, 3 * n);
        gram.set_block(0, 2 * n, &Matrix::identity(n));
        gram.set_block(n, n, &q);
        gram.set_block(2 * n, 0, &Matrix::identity(n).scale(&eps));
        debug_assert!(gram.is_invertible());
        Ok(AmbientSpace { q, p, epsilon, gram })
    }

    pub fn from_form(q: &QuadForm) -> Result<Self> {
        Self::new(q.gram().clone(), q.prime(), 1)
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn n(&self) -> usize {
        self.q.rows()
    }

    /// Block Gram of `q₁` in the order `(H^∨, V, H)`.
    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn form(&self) -> Result<QuadForm> {
        if self.epsilon != 1 {
            return Err(Error::Invalid("symplectic V has no quadratic form".into()));
        }
        QuadForm::new(self.q.clone(), self.p)
    }

    fn eps(&self) -> Rational {
        int(self.epsilon as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GsConfig {
    pub ambient: AmbientSpace,
    pub x: Matrix,
    pub y: Matrix,
}

impl GsConfig {
    pub fn new(ambient: AmbientSpace, x: Matrix, y: Matrix) -> Result<Self> {
        let n = ambient.n();
        for (name, m) in [("X", &x), ("Y", &y)] {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Dimension(format!("{name} must be {n}x{n}")));
            }
        }
        Ok(GsConfig { ambient, x, y })
    }

    fn q_inv(&self) -> Matrix {
        self.ambient.q.inverse().expect("non-degenerate")
    }

    /// `Y + εYᵀ + XQ⁻¹Xᵀ`.
    pub fn closure_defect(&self) -> Matrix {
        let eps = self.ambient.eps();
        &(&self.y + &self.y.transpose().scale(&eps)) + &(&(&self.x * &self.q_inv()) * &self.x.transpose())
    }

    pub fn xy_condition(&self) -> bool {
        self.closure_defect().is_zero()
    }

    /// Membership in the open set where `X` and `Y` are invertible.
    pub fn is_generic(&self) -> bool {
        self.x.is_invertible() && self.y.is_invertible()
    }

    fn require_generic(&self) -> Result<()> {
        if !self.xy_condition() {
            return Err(Error::Precondition("closure condition Y + εYᵀ + XQ⁻¹Xᵀ = 0 fails".into()));
        }
        if !self.is_generic() {
            return Err(Error::NotInvertible("X and Y must be invertible".into()));
        }
        Ok(())
    }
}

/// `u(X, Y) = 1 + n(X, Y)` on `V₁`.
pub fn u_of_xy(config: &GsConfig) -> Result<Matrix> {
    if !config.xy_condition() {
        return Err(Error::Precondition("closure condition fails".into()));
    }
    let n = config.ambient.n();
    let x_prime = -&(&config.q_inv() * &config.x.transpose());
    let mut u = Matrix::identity(3 * n);
    u.set_block(0, n, &config.x);
    u.set_block(0, 2 * n, &config.y);
    u.set_block(n, 2 * n, &x_prime);
    Ok(u)
}

/// `(δ, φ)` with `δ = Y` and `φ = Q⁻¹Xᵀ`, an isometry from
/// `(H, δ + εᵗδ)` to `(V, −εq)`.
pub fn rigidify(config: &GsConfig) -> Result<(Matrix, Matrix)> {
    config.require_generic()?;
    let phi = &config.q_inv() * &config.x.transpose();
    Ok((config.y.clone(), phi))
}

/// `γ = 1 + Q⁻¹XᵀY⁻¹X`.
pub fn gs_norm(config: &GsConfig) -> Result<Matrix> {
    config.require_generic()?;
    norm_of_closed(config)
}

/// The norm of a configuration already known to satisfy the closure
/// condition.
pub(crate) fn norm_of_closed(config: &GsConfig) -> Result<Matrix> {
    let yi = config.y.inverse()?;
    let n = config.ambient.n();
    Ok(&Matrix::identity(n) + &(&(&(&config.q_inv() * &config.x.transpose()) * &yi) * &config.x))
}

/// Whether `γ` preserves the form on `V`.
pub fn in_isometry_group(ambient: &AmbientSpace, gamma: &Matrix) -> bool {
    gamma.rows() == ambient.n() && ambient.q.congruent(gamma) == ambient.q
}

/// `Y = X(γ − 1)⁻¹Q⁻¹Xᵀ`, a section of the norm over `X`.
pub fn gs_section(ambient: &AmbientSpace, x: &Matrix, gamma: &Matrix) -> Result<GsConfig> {
    let n = ambient.n();
    if !x.is_invertible() {
        return Err(Error::NotInvertible("X".into()));
    }
    if !in_isometry_group(ambient, gamma) {
        return Err(Error::Invalid("γ does not preserve q_V".into()));
    }
    let gm1 = gamma - &Matrix::identity(n);
    let inv = gm1.inverse().map_err(|_| Error::Precondition("det(γ − 1) = 0".into()))?;
    let y = &(&(x * &inv) * &ambient.q.inverse()?) * &x.transpose();
    GsConfig::new(ambient.clone(), x.clone(), y)
}

/// `γ` is regular semisimple without eigenvalue `1`, and without `−1`
/// except for the simple eigenvalue forced in odd dimension.
pub fn norm_very_regular(gamma: &Matrix) -> bool {
    let f = gamma.char_poly();
    f.is_squarefree()
        && !f.eval(&Rational::one()).is_zero()
        && (gamma.rows() % 2 == 1 || !f.eval(&-Rational::one()).is_zero())
}

fn random_entries(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = int(rng.gen_range(-3..=3));
        }
    }
    m
}

pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    loop {
        let m = random_entries(rng, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// Samples `X` invertible and `Y = −½XQ⁻¹Xᵀ + S` with `S + εSᵀ = 0`,
/// rejecting until `Y` is invertible and the norm is very regular.
pub fn random_config(ambient: &AmbientSpace, seed: u64) -> Result<GsConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ambient.n();
    let half = Rational::new(1.into(), 2.into());
    let qi = ambient.q.inverse()?;
    let eps = ambient.eps();
    for _ in 0..RETRY_BUDGET {
        let x = random_entries(&mut rng, n, n);
        if !x.is_invertible() {
            continue;
        }
        let r = random_entries(&mut rng, n, n);
        let s = &r - &r.transpose().scale(&eps);
        let y = &(&(&x * &qi) * &x.transpose()).scale(&-half.clone()) + &s;
        let config = GsConfig::new(ambient.clone(), x, y)?;
        if !config.y.is_invertible() {
            continue;
        }
        if norm_very_regular(&gs_norm(&config)?) {
            return Ok(config);
        }
    }
    Err(Error::RetryExhausted { seed, attempts: RETRY_BUDGET })
}

/// Builds a configuration whose rigidified form is the parameter's `δ`:
/// `Y = δ`, `X = g`, and `Q = −gᵀ(δ + εᵗδ)⁻¹g`.
pub fn config_from_parameter(param: &ClassParameter, g: &Matrix, epsilon: i8) -> Result<GsConfig> {
    let delta = match param.kind {
        ClassKind::TglOdd => crate::classes::build_tgl_odd(param)?,
        _ => crate::classes::build_tgl_even(param)?,
    };
    let eps = int(epsilon as i64);
    let b = &delta + &delta.transpose().scale(&eps);
    let bi = b.inverse().map_err(|_| Error::Precondition("δ + εᵗδ is singular".into()))?;
    let q = -&bi.congruent(g);
    let ambient = AmbientSpace::new(q, param.algebra.prime(), epsilon)?;
    GsConfig::new(ambient, g.clone(), delta)
}

/// Checks the parameter correspondence for the norm of `config`:
/// `charpoly(γ) = charpoly(−ε·τ(x)/x)`, or in the odd case
/// `charpoly(−γ) = charpoly(τ(x)/x)·(T − 1)`.
pub fn gs_param_check(config: &GsConfig, x_param: &ClassParameter) -> Result<bool> {
    let gamma = gs_norm(config)?;
    if gamma.char_poly().eval(&Rational::one()).is_zero() {
        return Err(Error::Precondition("norm has eigenvalue 1".into()));
    }
    let alg = &x_param.algebra;
    let x = &x_param.element;
    let ratio = alg.mul(&alg.tau(x), &alg.inverse(x)?);
    let odd = x_param.kind == ClassKind::TglOdd;
    let expected_twist = if odd {
        &alg.char_poly(&ratio) * &Poly::linear_root(&Rational::one())
    } else {
        alg.char_poly(&ratio)
    };
    if twist_invariant(&config.y)? != expected_twist {
        return Ok(false);
    }
    let eps = int(config.ambient.epsilon as i64);
    Ok(if odd {
        (-&gamma).char_poly() == expected_twist
    } else {
        gamma.char_poly() == alg.char_poly(&alg.scale(&-eps, &ratio))
    })
}

/// `(gX, gYgᵀ)`.
pub fn act(config: &GsConfig, g: &Matrix) -> Result<GsConfig> {
    GsConfig::new(config.ambient.clone(), g * &config.x, &(g * &config.y) * &g.transpose())
}
