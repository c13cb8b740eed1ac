mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use twisted_endoscopy::arith::{int, Prime};
use twisted_endoscopy::classes::{ClassKind, ClassParameter};
use twisted_endoscopy::endoscopy::{corpus_entry, enumerate_elliptic_data};
use twisted_endoscopy::error::Error;
use twisted_endoscopy::formats::*;
use twisted_endoscopy::params::{FormalConstituent, FormalParameter, Sign};
use twisted_endoscopy::qform::{QuadForm, QuadraticEtale};
use twisted_endoscopy::weil::Mu8;

use common::{alg, pr, random_symmetric};

/// Emits, re-serializes to text, and parses back.
fn reparse<T>(v: &Value, f: impl FnOnce(At<'_>) -> twisted_endoscopy::Result<T>) -> T {
    let text = to_pretty(v);
    let back = parse_json(&text).unwrap();
    f(At::root(&back)).unwrap()
}

fn parse_err<T: std::fmt::Debug>(text: &str, f: impl FnOnce(At<'_>) -> twisted_endoscopy::Result<T>) -> String {
    let v = parse_json(text).unwrap();
    match f(At::root(&v)).unwrap_err() {
        Error::Parse { at, .. } => at,
        e => panic!("expected a parse error, got {e}"),
    }
}

fn primes() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(pr)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forms_round_trip(p in primes(), n in 1usize..=5, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = QuadForm::new(random_symmetric(&mut rng, n), p).unwrap().with_label("q");
        let back = reparse(&form_json(&q), parse_form);
        prop_assert_eq!(back.gram(), q.gram());
        prop_assert_eq!(back.label(), Some("q"));
        prop_assert_eq!(back.prime(), p);
    }

    #[test]
    fn algebras_and_elements_round_trip(p in primes(), m in 1usize..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = alg::random_algebra(&mut rng, p, m, true);
        let x = alg::random_element(&mut rng, &a, 5);
        prop_assert_eq!(&reparse(&algebra_json(&a), parse_algebra), &a);
        prop_assert_eq!(reparse(&element_json(&x), |at| parse_element(at, &a)), x);
    }

    #[test]
    fn class_parameters_round_trip(p in primes(), m in 1usize..=3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = alg::random_algebra(&mut rng, p, m, true);
        let x = alg::very_regular_x(&mut rng, &a);
        let c = alg::fixed_unit(&mut rng, &a);
        let mut param = ClassParameter::classical(ClassKind::SoOdd, a, x, c);
        param.a = Some(int(3));
        let back = reparse(&class_parameter_json(&param), parse_class_parameter);
        prop_assert_eq!(back.kind, param.kind);
        prop_assert_eq!(&back.algebra, &param.algebra);
        prop_assert_eq!(&back.element, &param.element);
        prop_assert_eq!(&back.c, &param.c);
        prop_assert_eq!(&back.a, &param.a);
        prop_assert_eq!(&back.x_d, &param.x_d);
    }

    #[test]
    fn configs_round_trip(p in primes(), n in 1usize..=3, index in 0usize..50) {
        let e = corpus_entry(11, p, n, index).unwrap();
        let back = reparse(&config_json(&e.config), parse_config);
        prop_assert_eq!(back, e.config);
    }

    #[test]
    fn mu8_round_trips(k in 0i64..8) {
        let z = Mu8::new(k);
        prop_assert_eq!(reparse(&mu8_json(z), parse_mu8), z);
    }
}

#[test]
fn data_and_parameters_round_trip() {
    for p in [2, 3, 5] {
        for n in 1..=3 {
            for d in enumerate_elliptic_data(n, pr(p)).unwrap() {
                assert_eq!(reparse(&datum_json(&d), |a| parse_datum(a, pr(p))), d);
            }
        }
    }
    let p = pr(5);
    let k = |d: i64| QuadraticEtale::new(&int(d), p).unwrap();
    let phi = FormalParameter::new(
        vec![
            FormalConstituent::new(2, Some(Sign::Plus), k(2), 1).unwrap().with_tag("a"),
            FormalConstituent::new(2, Some(Sign::Minus), k(1), 1).unwrap(),
            FormalConstituent::new(3, None, k(5), 2).unwrap(),
        ],
        p,
    )
    .unwrap();
    assert_eq!(reparse(&formal_parameter_json(&phi), |a| parse_formal_parameter(a, p)), phi);
}

#[test]
fn rationals_accept_strings_and_integers() {
    let q = reparse(&serde_json::json!({"p": 3, "diag": ["1/2", 4, "-6"]}), parse_form);
    assert_eq!(q.diagonal().len(), 3);
}

#[test]
fn malformed_literals_are_positioned() {
    assert_eq!(parse_err(r#"{"p": 3, "diag": ["1", "1/0"]}"#, parse_form), "/diag/1");
    assert_eq!(parse_err(r#"{"p": 3, "gram": [["1", "2"], ["3", "1"]]}"#, parse_form), "/gram");
    assert_eq!(parse_err(r#"{"p": 3}"#, parse_form), "/");
    assert_eq!(parse_err(r#"{"p": 9, "diag": [1]}"#, parse_form), "/p");
    assert_eq!(
        parse_err(r#"{"ambient": {"qV": {"p": 3, "diag": [1, 1]}, "epsilon": 2}, "X": [], "Y": []}"#, parse_config),
        "/ambient"
    );
    assert_eq!(
        parse_err(r#"[{"base": {"p": 3, "poly": ["0", "1"]}, "step": {"d": ["1"]}}]"#, parse_algebra),
        "/0/step"
    );
    assert_eq!(
        parse_err(r#"[{"base": {"p": 3, "poly": ["0", "1"]}, "step": "twisted"}]"#, parse_algebra),
        "/0/step"
    );
    assert_eq!(parse_err(r#"[{"dim": 2, "sign": "+", "det": "1"}]"#, |a| parse_formal_parameter(a, pr(3))), "/0/sign");
    assert_eq!(parse_err(r#"[{"dim": 3, "sign": "-1", "det": "1"}]"#, |a| parse_formal_parameter(a, pr(3))), "/0");
    assert_eq!(parse_err(r#""zeta9^1""#, parse_mu8), "/");
    match parse_json("{\"p\": 3,\n  \"diag\": [1 2]}") {
        Err(Error::Parse { at, .. }) => assert_eq!(at, "line 2 column 14"),
        other => panic!("{other:?}"),
    }
}
