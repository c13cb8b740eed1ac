#![allow(dead_code)]

use num_traits::Zero;
use rand::Rng;
use twisted_endoscopy::arith::{int, Prime, Rational};
use twisted_endoscopy::linalg::Matrix;
use twisted_endoscopy::localfield::square_class;
use twisted_endoscopy::params::{is_elliptic_param, FormalConstituent, FormalParameter, Sign};
use twisted_endoscopy::qform::{QuadForm, QuadraticEtale};

pub fn pr(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = int(rng.gen_range(-5..=5));
                m[(i, j)] = v.clone();
                m[(j, i)] = v;
            }
        }
        if m.is_invertible() {
            return m;
        }
    }
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = int(rng.gen_range(-bound..=bound));
        }
    }
    m
}

pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, n, n, 3);
        if m.is_invertible() {
            return m;
        }
    }
}

fn small_vectors(n: usize, r: i64) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let width = (2 * r + 1) as usize;
    for mut idx in 0..width.pow(n as u32) {
        let v: Vec<Rational> = (0..n)
            .map(|_| {
                let c = (idx % width) as i64 - r;
                idx /= width;
                int(c)
            })
            .collect();
        if v.iter().any(|c| !c.is_zero()) {
            out.push(v);
        }
    }
    out
}

/// Searches for an explicit rational basis `v_1, …, v_n`, orthogonal for
/// `a`, with `a(v_i)` in the square class of the `i`-th diagonal entry of `b`.
/// The columns of the returned matrix `P` satisfy `Pᵀ A P = diag(c)` with
/// `c_i / b_i` a p-adic square.
pub fn congruence_witness(a: &QuadForm, b: &QuadForm) -> Option<Matrix> {
    if a.dim() != b.dim() {
        return None;
    }
    let p = a.prime();
    let targets = b.diagonal();
    let n = a.dim();
    let mut basis = Matrix::identity(n);
    let mut found: Vec<Vec<Rational>> = Vec::new();
    let mut gram = a.gram().clone();
    for target in &targets {
        let m = gram.rows();
        let radius = match m {
            1 => 1,
            2 => 10,
            _ => 3,
        };
        let hit = small_vectors(m, radius).into_iter().find(|v| {
            let q = dot(v, &gram.mul_vec(v));
            !q.is_zero() && square_class(&(q / target), p).unwrap().is_one()
        })?;
        found.push(basis.mul_vec(&hit));
        if m == 1 {
            break;
        }
        let row = Matrix::from_rows(vec![gram.mul_vec(&hit)]).unwrap();
        let w = Matrix::from_columns(&row.kernel());
        gram = gram.congruent(&w);
        basis = &basis * &w;
    }
    let pm = Matrix::from_columns(&found);
    let d = a.gram().congruent(&pm);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                assert!(d[(i, j)].is_zero());
            }
        }
        assert!(square_class(&(&d[(i, i)] / &targets[i]), p).unwrap().is_one());
    }
    Some(pm)
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vp(mut x: i128, p: i128) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    k
}

/// Brute-force isotropy test for an integral diagonal form: lifts primitive
/// residue vectors and stops at the first Hensel-certified zero.
pub fn hensel_isotropic(a: &[Rational], p: Prime) -> bool {
    let pp = p.get() as i128;
    let coeffs: Vec<i128> = a
        .iter()
        .map(|c| {
            assert!(c.is_integer());
            let mut v: i128 = c.numer().try_into().unwrap();
            while v % (pp * pp) == 0 {
                v /= pp * pp;
            }
            v
        })
        .collect();
    let n = coeffs.len();
    let depth = if p.is_two() { 9 } else { 5 };
    let eval = |x: &[i128]| -> i128 { coeffs.iter().zip(x).map(|(c, xi)| c * xi * xi).sum() };
    let mut frontier: Vec<(Vec<i128>, usize)> = Vec::new();
    for pinned in 0..n {
        let free: Vec<usize> = (0..n).filter(|&i| i != pinned).collect();
        for mut idx in 0..(pp as usize).pow(free.len() as u32) {
            let mut x = vec![0i128; n];
            x[pinned] = 1;
            let mut ok = true;
            for &i in &free {
                x[i] = (idx % pp as usize) as i128;
                idx /= pp as usize;
                if i < pinned && x[i] != 0 {
                    ok = false;
                }
            }
            if ok {
                frontier.push((x, pinned));
            }
        }
    }
    let mut pm: i128 = 1;
    for level in 1..=depth {
        let mut survivors = Vec::new();
        for (x, pinned) in frontier {
            let q = eval(&x);
            let vq = vp(q, pp);
            if vq < level {
                continue;
            }
            let dmin = (0..n).map(|i| vp(2 * coeffs[i] * x[i], pp)).min().unwrap();
            if q == 0 || (vq != u32::MAX && dmin != u32::MAX && vq > 2 * dmin) {
                return true;
            }
            survivors.push((x, pinned));
        }
        if survivors.is_empty() {
            return false;
        }
        pm *= pp;
        let mut next = Vec::new();
        for (x, pinned) in survivors {
            let free: Vec<usize> = (0..n).filter(|&i| i != pinned).collect();
            for mut idx in 0..(pp as usize).pow(free.len() as u32) {
                let mut y = x.clone();
                for &i in &free {
                    y[i] += (idx % pp as usize) as i128 * pm;
                    idx /= pp as usize;
                }
                next.push((y, pinned));
            }
        }
        frontier = next;
    }
    panic!("Hensel search undecided for {a:?} at p = {p}");
}

/// Random elliptic parameter of total dimension `2n`.
pub fn random_elliptic<R: Rng>(r: &mut R, p: Prime, n: usize) -> FormalParameter {
    let algebras = QuadraticEtale::all(p);
    loop {
        let mut left = 2 * n;
        let mut cs: Vec<FormalConstituent> = Vec::new();
        while left > 0 {
            let dim = r.gen_range(1..=left);
            let sign = if dim % 2 == 0 && r.gen_bool(0.5) { Sign::Minus } else { Sign::Plus };
            let det = if sign == Sign::Minus { algebras[0] } else { algebras[r.gen_range(0..algebras.len())] };
            let tag = format!("c{}", cs.len());
            if let Ok(c) = FormalConstituent::new(dim, Some(sign), det, 1) {
                cs.push(c.with_tag(tag));
                left -= dim;
            }
        }
        if let Ok(phi) = FormalParameter::new(cs, p) {
            if is_elliptic_param(&phi) {
                return phi;
            }
        }
    }
}

pub mod alg {
    use super::*;
    use twisted_endoscopy::localfield::square_class_table;
    use twisted_endoscopy::etale::{AlgebraElement, EtaleAlgebra, FactorTower};
    use twisted_endoscopy::localfield::{Certificate, LocalFieldDescriptor};

    pub fn qp(p: Prime) -> LocalFieldDescriptor {
        LocalFieldDescriptor::rational(p)
    }

    /// Unramified quadratic extension of ℚ_p for odd `p`.
    pub fn unramified(p: Prime) -> LocalFieldDescriptor {
        let u = p.least_nonresidue() as i64;
        LocalFieldDescriptor::new(p, vec![int(-u), int(0), int(1)], Certificate::QuadraticNonsquareDisc).unwrap()
    }

    /// A factor over ℚ_p: split, or quadratic with a random non-square class.
    pub fn rational_factor<R: Rng>(rng: &mut R, p: Prime, allow_split: bool) -> FactorTower {
        let table = square_class_table(p);
        let k = rng.gen_range(if allow_split { 0 } else { 1 }..table.len());
        if k == 0 {
            FactorTower::split(qp(p))
        } else {
            let d = table[k].representative();
            FactorTower::quadratic(qp(p), vec![d]).unwrap()
        }
    }

    /// Random algebra of ℚ_p-dimension `2m` built from rank-one factors,
    /// plus, for odd `p` and `m ≥ 2`, sometimes a factor over the
    /// unramified quadratic extension.
    pub fn random_algebra<R: Rng>(rng: &mut R, p: Prime, m: usize, allow_split: bool) -> EtaleAlgebra {
        let mut factors = Vec::new();
        let mut left = m;
        while left > 0 {
            if left >= 2 && !p.is_two() && rng.gen_bool(0.3) {
                let base = unramified(p);
                let tower = if allow_split && rng.gen_bool(0.5) {
                    FactorTower::split(base)
                } else {
                    let pi = base.from_rational(&p.rational());
                    FactorTower::quadratic(base, pi).unwrap()
                };
                factors.push(tower);
                left -= 2;
            } else {
                factors.push(rational_factor(rng, p, allow_split));
                left -= 1;
            }
        }
        EtaleAlgebra::new(factors).unwrap()
    }

    pub fn random_element<R: Rng>(rng: &mut R, alg: &EtaleAlgebra, bound: i64) -> AlgebraElement {
        let v: Vec<Rational> = (0..alg.dim()).map(|_| int(rng.gen_range(-bound..=bound))).collect();
        alg.from_coords(&v).unwrap()
    }

    /// Invertible generator `x` with `x/τ(x) ± 1` invertible.
    pub fn very_regular_x<R: Rng>(rng: &mut R, alg: &EtaleAlgebra) -> AlgebraElement {
        loop {
            let x = random_element(rng, alg, 4);
            if alg.is_invertible(&x) && alg.is_generator(&x) && alg.very_regular(&x).unwrap() {
                return x;
            }
        }
    }

    /// Invertible τ-fixed element.
    pub fn fixed_unit<R: Rng>(rng: &mut R, alg: &EtaleAlgebra) -> AlgebraElement {
        loop {
            let z = random_element(rng, alg, 4);
            let c = alg.add(&z, &alg.tau(&z));
            if alg.is_invertible(&c) {
                return c;
            }
        }
    }

    /// Invertible τ-anti-fixed element.
    pub fn anti_fixed_unit<R: Rng>(rng: &mut R, alg: &EtaleAlgebra) -> AlgebraElement {
        loop {
            let z = random_element(rng, alg, 4);
            let c = alg.sub(&z, &alg.tau(&z));
            if alg.is_invertible(&c) {
                return c;
            }
        }
    }

    /// `y = z/τ(z)`, a norm-one generator with `y ± 1` invertible.
    pub fn unitary_y<R: Rng>(rng: &mut R, alg: &EtaleAlgebra) -> AlgebraElement {
        loop {
            let z = random_element(rng, alg, 4);
            if !alg.is_invertible(&z) || !alg.is_invertible(&alg.tau(&z)) {
                continue;
            }
            let y = alg.mul(&z, &alg.inverse(&alg.tau(&z)).unwrap());
            let f = alg.char_poly(&y);
            if f.is_squarefree() && !f.eval(&int(1)).is_zero() && !f.eval(&int(-1)).is_zero() {
                return y;
            }
        }
    }
}
