//! Elliptic endoscopic data of `tGL(2n)`, quasisplit even orthogonal spaces,
//! regular nilpotent η-invariants and the explicit transfer factors.

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{int, Prime, Rational};
use crate::error::{Error, Result};
use crate::gsnorm::{self, AmbientSpace, GsConfig};
use crate::linalg::Matrix;
use crate::localfield::{square_class, square_class_table, SquareClass};
use crate::qform::{QuadForm, QuadraticEtale};
use crate::weil::{epsilon_half, weil_index, Mu8};

/// `(n_O, n_S, χ)` with `χ` carried by its quadratic étale algebra `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndoscopicDatum {
    pub n_o: usize,
    pub n_s: usize,
    pub k: QuadraticEtale,
}

impl EndoscopicDatum {
    pub fn new(n_o: usize, n_s: usize, k: QuadraticEtale) -> Result<Self> {
        if n_o % 2 != 0 || n_s % 2 != 0 {
            return Err(Error::Invalid(format!("n_O = {n_o} and n_S = {n_s} must both be even")));
        }
        if n_o + n_s == 0 {
            return Err(Error::Invalid("empty datum".into()));
        }
        if n_o == 0 && !k.is_split() {
            return Err(Error::Invalid("χ must be trivial when n_O = 0".into()));
        }
        if n_o == 2 && k.is_split() {
            return Err(Error::Invalid("χ must be nontrivial when n_O = 2".into()));
        }
        Ok(EndoscopicDatum { n_o, n_s, k })
    }

    /// Half the total dimension.
    pub fn n(&self) -> usize {
        (self.n_o + self.n_s) / 2
    }

    pub fn is_simple(&self) -> bool {
        self.n_o == 0 || self.n_s == 0
    }
}

impl std::fmt::Display for EndoscopicDatum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.n_o, self.n_s, self.k)
    }
}

pub fn enumerate_elliptic_data(n: usize, p: Prime) -> Result<Vec<EndoscopicDatum>> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let mut out = Vec::new();
    for n_o in (0..=2 * n).step_by(2) {
        for k in QuadraticEtale::all(p) {
            if let Ok(d) = EndoscopicDatum::new(n_o, 2 * n - n_o, k) {
                out.push(d);
            }
        }
    }
    Ok(out)
}

/// `(n_O/2 − 1)·Hy ⊕ c·N_K`, whose signed discriminant is the class of `K`.
pub fn quasisplit_space(n_o: usize, k: &QuadraticEtale, c: &SquareClass) -> Result<QuadForm> {
    if n_o < 2 || n_o % 2 != 0 {
        return Err(Error::Invalid("n_O must be even and at least 2".into()));
    }
    let p = k.prime();
    crate::arith::check_same_prime(p, c.prime())?;
    let tail = QuadForm::norm_form(k).scale(&c.representative())?;
    if n_o == 2 {
        return Ok(tail);
    }
    QuadForm::hyperbolic(n_o / 2 - 1, p).direct_sum(&tail)
}

/// `K = ℚ_p[√d±(q)]` for an even-dimensional form.
pub fn discriminant_algebra(q: &QuadForm) -> QuadraticEtale {
    QuadraticEtale { disc: q.dpm() }
}

/// Whether an even-dimensional form has Witt index at least `dim/2 − 1`.
pub fn is_quasisplit(q: &QuadForm) -> bool {
    q.dim() % 2 == 0 && 2 * q.witt_decompose().0 + 2 >= q.dim()
}

/// The symplectic space `F^{2n}` with basis `e_1, …, e_n, e_{−n}, …, e_{−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaSpace {
    pub n: usize,
    pub theta_gram: Matrix,
}

impl ThetaSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        let mut g = Matrix::zeros(2 * n, 2 * n);
        for i in 1..=n {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            g[(Self::pos(n, i as i64), Self::pos(n, -(i as i64)))] = int(sign);
            g[(Self::pos(n, -(i as i64)), Self::pos(n, i as i64))] = int(-sign);
        }
        Ok(ThetaSpace { n, theta_gram: g })
    }

    /// Matrix index of `e_i` for `i ∈ {±1, …, ±n}`.
    pub fn pos(n: usize, i: i64) -> usize {
        if i > 0 {
            i as usize - 1
        } else {
            2 * n - i.unsigned_abs() as usize
        }
    }
}

/// `N e_{−k} = e_{−(k+1)}`, `N e_{−n} = e_n`, `N e_k = e_{k−1}`, `N e_1 = 0`.
pub fn regular_nilpotent_sp(n: usize) -> Result<Matrix> {
    let theta = ThetaSpace::new(n)?;
    let mut m = Matrix::zeros(2 * n, 2 * n);
    let n_i = n as i64;
    for k in 1..n_i {
        m[(ThetaSpace::pos(n, -(k + 1)), ThetaSpace::pos(n, -k))] = Rational::one();
        m[(ThetaSpace::pos(n, k), ThetaSpace::pos(n, k + 1))] = Rational::one();
    }
    m[(ThetaSpace::pos(n, n_i), ThetaSpace::pos(n, -n_i))] = Rational::one();
    debug_assert!(in_lie_algebra(&m, &theta.theta_gram));
    Ok(m)
}

/// `NᵀG + GN = 0`.
pub fn in_lie_algebra(m: &Matrix, gram: &Matrix) -> bool {
    (&(&m.transpose() * gram) + &(gram * m)).is_zero()
}

/// Nilpotent of order exactly `k`.
pub fn nilpotent_order(m: &Matrix) -> Option<u32> {
    let mut pw = m.clone();
    for k in 1..=m.rows() as u32 {
        if pw.is_zero() {
            return Some(k);
        }
        pw = &pw * m;
    }
    None
}

/// Square class of the rank-one symmetric form with Gram `b`.
fn rank_one_class(b: &Matrix, p: Prime) -> Result<SquareClass> {
    if !b.is_symmetric() {
        return Err(Error::Invalid("η form is not symmetric".into()));
    }
    if b.rank() != 1 {
        return Err(Error::Invalid(format!("η form has rank {} after null reduction, expected 1", b.rank())));
    }
    let i = (0..b.rows()).find(|&i| !b[(i, i)].is_zero()).expect("rank-one symmetric form has a nonzero diagonal");
    square_class(&b[(i, i)], p)
}

/// η of `(v, v′) ↦ θ̃(v | N^{2n−1}v′)`.
pub fn eta_sp(n: usize, p: Prime) -> Result<SquareClass> {
    let theta = ThetaSpace::new(n)?;
    let m = regular_nilpotent_sp(n)?;
    if !in_lie_algebra(&m, &theta.theta_gram) || nilpotent_order(&m) != Some(2 * n as u32) {
        return Err(Error::Invalid("symplectic nilpotent is not regular".into()));
    }
    let b = &theta.theta_gram * &m.pow(2 * n as u32 - 1);
    rank_one_class(&b, p)
}

/// Gram of `mHy ⊕ ⟨y⟩` in the basis `e_1, …, e_m, v, e_{−m}, …, e_{−1}`.
pub fn split_odd_gram(m: usize, y: &Rational) -> Matrix {
    let d = 2 * m + 1;
    let mut g = Matrix::zeros(d, d);
    for i in 0..m {
        g[(i, d - 1 - i)] = Rational::one();
        g[(d - 1 - i, i)] = Rational::one();
    }
    g[(m, m)] = y.clone();
    g
}

/// Regular nilpotent of `so(mHy ⊕ ⟨y⟩)`: `e_k ↦ e_{k+1}`, `e_m ↦ v`,
/// `v ↦ −y·e_{−m}`, `e_{−k} ↦ −e_{−(k−1)}`, `e_{−1} ↦ 0`.
pub fn regular_nilpotent_so(q_split_part: &QuadForm) -> Result<Matrix> {
    let d = q_split_part.dim();
    if d % 2 == 0 {
        return Err(Error::Dimension("split part must have odd dimension 2m + 1".into()));
    }
    let m = d / 2;
    let y = q_split_part.gram()[(m, m)].clone();
    if q_split_part.gram() != &split_odd_gram(m, &y) {
        return Err(Error::Invalid("form is not in the shape mHy ⊕ <y>".into()));
    }
    let mut nm = Matrix::zeros(d, d);
    for k in 0..m {
        nm[(k + 1, k)] = Rational::one();
    }
    nm[(m + 1, m)] = -y;
    for j in m + 1..d - 1 {
        nm[(j + 1, j)] = -Rational::one();
    }
    debug_assert!(in_lie_algebra(&nm, q_split_part.gram()));
    Ok(nm)
}

/// `η_{(V,q)} = q(e_1 | N^{2n−2}e_1)` on `V = (n−1)Hy ⊕ V′`, with `v ∈ V′`
/// of length `y`. For `n = 1` this is the class of `y`.
pub fn eta_so(v_prime: &QuadForm, y: &Rational, n: usize) -> Result<SquareClass> {
    let p = v_prime.prime();
    if v_prime.dim() != 2 {
        return Err(Error::Dimension("V′ must be binary".into()));
    }
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if !v_prime.represents(y)? {
        return Err(Error::Invalid("y is not represented by V′".into()));
    }
    if n == 1 {
        return square_class(y, p);
    }
    let m = n - 1;
    let odd = QuadForm::new(split_odd_gram(m, y), p)?;
    let y_perp = v_prime.gram().det() / y;
    let full = odd.direct_sum(&QuadForm::from_diagonal(&[y_perp], p)?)?;
    debug_assert!(QuadForm::hyperbolic(m, p).direct_sum(v_prime)?.equivalent(&full)?);
    let nm = Matrix::block_diag(&[&regular_nilpotent_so(&odd)?, &Matrix::zeros(1, 1)]);
    if !in_lie_algebra(&nm, full.gram()) || nilpotent_order(&nm) != Some(2 * n as u32 - 1) {
        return Err(Error::Invalid("orthogonal nilpotent is not regular".into()));
    }
    let b = full.gram() * &nm.pow(2 * n as u32 - 2);
    rank_one_class(&b, p)
}

/// `q_δ = ½(δ + ᵗδ)`.
pub fn q_delta(delta: &Matrix, p: Prime) -> Result<QuadForm> {
    let half = Rational::new(1.into(), 2.into());
    QuadForm::new((delta + &delta.transpose()).scale(&half), p)
        .map_err(|_| Error::Degenerate("δ + ᵗδ is singular".into()))
}

/// `+1` iff `q_δ` is Witt equivalent to `(−1)^n·N_K`, `K` the discriminant
/// algebra of `(V, q)`.
pub fn transfer_factor(gamma_space: &QuadForm, delta: &Matrix, n: usize) -> Result<i8> {
    let p = gamma_space.prime();
    if delta.rows() != 2 * n || gamma_space.dim() != 2 * n {
        return Err(Error::Dimension(format!("transfer factor expects dimension {}", 2 * n)));
    }
    let qd = q_delta(delta, p)?;
    let k = discriminant_algebra(gamma_space);
    let sign = if n % 2 == 0 { int(1) } else { int(-1) };
    let target = QuadForm::norm_form(&k).scale(&sign)?;
    Ok(if qd.witt_equivalent(&target)? { 1 } else { -1 })
}

/// `Δ_λ = ε(½, χ_K, ψ)⁻¹·Δ`.
pub fn transfer_factor_whittaker(gamma_space: &QuadForm, delta: &Matrix, n: usize) -> Result<Mu8> {
    let sign = transfer_factor(gamma_space, delta, n)?;
    let k = discriminant_algebra(gamma_space);
    Ok(epsilon_half(&k).inv() * Mu8::from_sign(sign))
}

/// `γ_ψ(2·(−1)^n·q)`.
pub fn gs_closed_form(q: &QuadForm, n: usize) -> Result<Mu8> {
    let c = if n % 2 == 0 { int(2) } else { int(-2) };
    Ok(weil_index(&q.scale(&c)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstancyOutcome {
    pub closure: bool,
    pub lhs: Option<Mu8>,
    pub rhs: Mu8,
    pub pass: bool,
}

fn require_even_orthogonal(ambient: &AmbientSpace, n: usize) -> Result<QuadForm> {
    if ambient.epsilon() != 1 {
        return Err(Error::Precondition("constancy check needs an orthogonal ambient space".into()));
    }
    if ambient.n() != 2 * n {
        return Err(Error::Dimension(format!("ambient V must have dimension {}", 2 * n)));
    }
    let q = ambient.form()?;
    if !is_quasisplit(&q) {
        return Err(Error::Precondition("SO(V, q) is not quasisplit".into()));
    }
    Ok(q)
}

/// Both sides of `Δ_λ(γ⁻¹, δ) = γ_ψ(2(−1)^n q)` for a configuration.
/// Configurations off the closure variety fail without a left side.
pub fn gs_constancy(config: &GsConfig, n: usize) -> Result<ConstancyOutcome> {
    let q = require_even_orthogonal(&config.ambient, n)?;
    let rhs = gs_closed_form(&q, n)?;
    if !config.xy_condition() {
        return Ok(ConstancyOutcome { closure: false, lhs: None, rhs, pass: false });
    }
    if !config.is_generic() {
        return Err(Error::NotInvertible("X and Y must be invertible".into()));
    }
    let gamma = gsnorm::norm_of_closed(config)?;
    if !gsnorm::norm_very_regular(&gamma) {
        return Err(Error::Precondition("norm is not very regular".into()));
    }
    // δ = Y, as in the rigidification
    let lhs = transfer_factor_whittaker(&q, &config.y, n)?;
    Ok(ConstancyOutcome { closure: true, lhs: Some(lhs), rhs, pass: lhs == rhs })
}

pub fn gs_constancy_check(config: &GsConfig, n: usize) -> Result<bool> {
    Ok(gs_constancy(config, n)?.pass)
}

/// Whether `q_{c₁}` and `q_{c₂}` share a determinant class.
pub fn separation_check(alg: &crate::etale::EtaleAlgebra, c1: &crate::etale::AlgebraElement, c2: &crate::etale::AlgebraElement) -> Result<bool> {
    let q1 = alg.trace_form_quadratic(c1)?;
    let q2 = alg.trace_form_quadratic(c2)?;
    Ok(q1.det_class() == q2.det_class())
}

/// SplitMix64 step, used to derive independent per-record seeds.
pub fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    let mut z = base;
    for &x in parts {
        z = z.wrapping_add(x.wrapping_add(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Quadratic algebras admissible for a quasisplit `SO(2n)` whose space is
/// not an isotropic plane: all of them for `n ≥ 2`, the fields for `n = 1`.
pub fn admissible_algebras(p: Prime, n: usize) -> Vec<QuadraticEtale> {
    QuadraticEtale::all(p).into_iter().filter(|k| n >= 2 || !k.is_split()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub index: usize,
    pub seed: u64,
    pub p: u64,
    pub n: usize,
    pub k: QuadraticEtale,
    pub c: SquareClass,
    pub config: GsConfig,
}

/// The `index`-th corpus configuration for `(p, n)`: cycles through the
/// admissible `K` and the scaling classes `c`, moves the quasisplit space
/// by a random congruence and samples a configuration over it.
pub fn corpus_entry(base_seed: u64, p: Prime, n: usize, index: usize) -> Result<CorpusEntry> {
    let algebras = admissible_algebras(p, n);
    let classes = square_class_table(p);
    let k = algebras[index % algebras.len()];
    let c = classes[(index / algebras.len()) % classes.len()];
    let seed = mix_seed(base_seed, &[p.get(), n as u64, index as u64]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = quasisplit_space(2 * n, &k, &c)?;
    let g = gsnorm::random_invertible(&mut rng, 2 * n);
    let ambient = AmbientSpace::from_form(&q.transform(&g)?)?;
    let config = gsnorm::random_config(&ambient, seed)?;
    Ok(CorpusEntry { index, seed, p: p.get(), n, k, c, config })
}

pub fn corpus(base_seed: u64, p: Prime, n: usize, count: usize) -> Result<Vec<CorpusEntry>> {
    (0..count).into_par_iter().map(|i| corpus_entry(base_seed, p, n, i)).collect()
}

/// Single-entry corruptions of a configuration: one entry of `X`, `Y`, or
/// a symmetric pair of `Q`, shifted by one.
pub fn mutations(config: &GsConfig) -> Vec<(String, Result<GsConfig>)> {
    let n = config.ambient.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut x = config.x.clone();
            x[(i, j)] += Rational::one();
            out.push((format!("X[{i},{j}]"), GsConfig::new(config.ambient.clone(), x, config.y.clone())));
            let mut y = config.y.clone();
            y[(i, j)] += Rational::one();
            out.push((format!("Y[{i},{j}]"), GsConfig::new(config.ambient.clone(), config.x.clone(), y)));
            if i <= j {
                let mut q = config.ambient.q().clone();
                q[(i, j)] += Rational::one();
                if i != j {
                    q[(j, i)] += Rational::one();
                }
                let mutated = AmbientSpace::new(q, config.ambient.prime(), 1)
                    .and_then(|a| GsConfig::new(a, config.x.clone(), config.y.clone()));
                out.push((format!("Q[{i},{j}]"), mutated));
            }
        }
    }
    out
}

/// Whether a mutated configuration is caught: it either fails the check or
/// is rejected outright.
pub fn mutation_caught(mutated: &Result<GsConfig>, n: usize) -> bool {
    match mutated {
        Err(_) => true,
        Ok(c) => !matches!(gs_constancy_check(c, n), Ok(true)),
    }
}
