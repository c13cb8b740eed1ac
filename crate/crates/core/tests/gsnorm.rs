mod common;

use common::alg::{random_algebra, very_regular_x};
use common::{pr, random_invertible, random_symmetric};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_endoscopy::arith::{int, Prime, Rational};
use twisted_endoscopy::classes::{twist_invariant, ClassKind, ClassParameter};
use twisted_endoscopy::gsnorm::*;
use twisted_endoscopy::linalg::Matrix;
use twisted_endoscopy::Error;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn symplectic(m: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        j[(i, i + m)] = int(1);
        j[(i + m, i)] = int(-1);
    }
    j
}

fn random_ambient(r: &mut ChaCha8Rng, p: Prime, n: usize, epsilon: i8) -> AmbientSpace {
    loop {
        let q = if epsilon == 1 {
            random_symmetric(r, n)
        } else {
            let g = random_invertible(r, n);
            symplectic(n / 2).congruent(&g)
        };
        if let Ok(a) = AmbientSpace::new(q, p, epsilon) {
            return a;
        }
    }
}

fn eps_of(a: &AmbientSpace) -> Rational {
    int(a.epsilon() as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_configs_satisfy_structure(seed in any::<u64>(), pi in 0usize..3, shape in 0usize..5) {
        let p = pr([2, 3, 5][pi]);
        let (n, epsilon) = [(1, 1), (3, 1), (4, 1), (2, -1), (4, -1)][shape];
        let mut r = rng(seed);
        let a = random_ambient(&mut r, p, n, epsilon);
        let c = random_config(&a, seed).unwrap();
        prop_assert!(c.xy_condition());
        let u = u_of_xy(&c).unwrap();
        prop_assert_eq!(a.gram().congruent(&u), a.gram().clone());
        prop_assert!((&u - &Matrix::identity(3 * n)).pow(3).is_zero());

        let gamma = gs_norm(&c).unwrap();
        prop_assert!(in_isometry_group(&a, &gamma));
        prop_assert_eq!(gamma.det(), if n % 2 == 0 { Rational::one() } else { -Rational::one() });
        prop_assert!(norm_very_regular(&gamma));

        let (delta, phi) = rigidify(&c).unwrap();
        let eps = eps_of(&a);
        let b = &delta + &delta.transpose().scale(&eps);
        prop_assert_eq!(a.q().scale(&-eps.clone()).congruent(&phi), b);

        let expected = (&delta.inverse().unwrap() * &delta.transpose()).scale(&-eps).char_poly();
        prop_assert_eq!(gamma.char_poly(), expected);
    }

    #[test]
    fn norm_is_invariant_under_the_h_action(seed in any::<u64>(), shape in 0usize..3) {
        let (n, epsilon) = [(3, 1), (4, 1), (2, -1)][shape];
        let mut r = rng(seed);
        let a = random_ambient(&mut r, pr(3), n, epsilon);
        let c = random_config(&a, seed).unwrap();
        let g = random_invertible(&mut r, n);
        let moved = act(&c, &g).unwrap();
        prop_assert!(moved.xy_condition());
        prop_assert_eq!(gs_norm(&moved).unwrap(), gs_norm(&c).unwrap());
        prop_assert_eq!(twist_invariant(&moved.y).unwrap(), twist_invariant(&c.y).unwrap());
    }

    #[test]
    fn section_inverts_the_norm(seed in any::<u64>(), shape in 0usize..3) {
        let (n, epsilon) = [(3, 1), (4, 1), (4, -1)][shape];
        let mut r = rng(seed);
        let a = random_ambient(&mut r, pr(5), n, epsilon);
        let c = random_config(&a, seed).unwrap();
        let gamma = gs_norm(&c).unwrap();
        let back = gs_section(&a, &c.x, &gamma).unwrap();
        prop_assert_eq!(&back.y, &c.y);
        let x1 = random_invertible(&mut r, n);
        let other = gs_section(&a, &x1, &gamma).unwrap();
        prop_assert!(other.xy_condition());
        prop_assert_eq!(gs_norm(&other).unwrap(), gamma);
    }
}

#[test]
fn parametrized_configs_match_their_parameters() {
    for p in [2, 3, 5] {
        let mut r = rng(40 + p);
        let mut checked = 0;
        for round in 0..60 {
            let m = r.gen_range(1..=3);
            let alg = random_algebra(&mut r, pr(p), m, true);
            let x = very_regular_x(&mut r, &alg);
            let mut param = ClassParameter::twisted(alg.clone(), x);
            let epsilon = if round % 3 == 2 { -1 } else { 1 };
            if round % 3 == 1 {
                param.kind = ClassKind::TglOdd;
                param.x_d = Some(int(r.gen_range(1..=7)));
            }
            let dim = alg.dim() + usize::from(param.kind == ClassKind::TglOdd);
            let g = random_invertible(&mut r, dim);
            let config = match config_from_parameter(&param, &g, epsilon) {
                Ok(c) => c,
                Err(Error::Precondition(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(config.xy_condition());
            assert!(gs_param_check(&config, &param).unwrap(), "p={p} round={round}");

            let other = very_regular_x(&mut r, &alg);
            let mut wrong = param.clone();
            wrong.element = other;
            let truth = twist_invariant(&config.y).unwrap() == twist_invariant(&twisted_endoscopy::classes::build_tgl_even(&wrong).unwrap()).unwrap();
            if param.kind == ClassKind::TglEven {
                assert_eq!(gs_param_check(&config, &wrong).unwrap(), truth);
            }
            checked += 1;
        }
        assert!(checked > 30);
    }
}

#[test]
fn mutated_configs_are_rejected() {
    let mut r = rng(9);
    let a = random_ambient(&mut r, pr(3), 3, 1);
    let c = random_config(&a, 1).unwrap();
    let mut bad = c.clone();
    bad.y[(0, 1)] += Rational::one();
    assert!(!bad.xy_condition());
    assert!(gs_norm(&bad).is_err());
    assert!(u_of_xy(&bad).is_err());
    assert!(rigidify(&bad).is_err());

    let singular = GsConfig::new(a.clone(), Matrix::zeros(3, 3), Matrix::zeros(3, 3)).unwrap();
    assert!(singular.xy_condition());
    assert!(matches!(gs_norm(&singular), Err(Error::NotInvertible(_))));
    assert!(GsConfig::new(a.clone(), Matrix::zeros(2, 2), c.y.clone()).is_err());
    assert!(gs_section(&a, &c.x, &Matrix::identity(3)).is_err());
    assert!(gs_section(&a, &c.x, &Matrix::diag(&[int(2), int(1), int(1)])).is_err());
}

#[test]
fn ambient_validation() {
    let p = pr(5);
    assert!(AmbientSpace::new(Matrix::from_i64(&[&[1, 0], &[0, -1]]), p, 1).is_err());
    assert!(AmbientSpace::new(Matrix::from_i64(&[&[1, 0], &[0, 2]]), p, 1).is_ok());
    assert!(AmbientSpace::new(Matrix::from_i64(&[&[1, 0], &[0, 2]]), p, -1).is_err());
    assert!(AmbientSpace::new(Matrix::from_i64(&[&[1, 1], &[1, 1]]), p, 1).is_err());
    assert!(AmbientSpace::new(symplectic(1), p, 2).is_err());
    let sp = AmbientSpace::new(symplectic(2), p, -1).unwrap();
    assert!(sp.form().is_err());
    assert!(!sp.gram().transpose().entries().iter().zip(sp.gram().entries()).all(|(a, b)| a == b));
    assert!(sp.gram().congruent(&Matrix::identity(12)).entries().iter().any(|x| !x.is_zero()));
}
