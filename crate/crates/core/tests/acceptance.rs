//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the report is always printed; exits 1 if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::alg::{fixed_unit, random_algebra, very_regular_x};
use common::{congruence_witness, pr, random_elliptic, random_invertible, random_symmetric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_endoscopy::arith::{int, Prime, Rational};
use twisted_endoscopy::classes::{twist_invariant, ClassKind, ClassParameter};
use twisted_endoscopy::endoscopy::{admissible_algebras, enumerate_elliptic_data, eta_so, eta_sp, separation_check};
use twisted_endoscopy::gsnorm::{act, config_from_parameter, gs_norm, gs_param_check, gs_section};
use twisted_endoscopy::localfield::{hilbert_qp, solubility_qp, square_class, square_class_table, Solubility, SquareClass};
use twisted_endoscopy::manifest::{self, RunSpec};
use twisted_endoscopy::params::classify;
use twisted_endoscopy::qform::QuadForm;
use twisted_endoscopy::weil::{gauss_oracle_stable, weil_rank1};
use twisted_endoscopy::Error;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const CORPUS_SEED: u64 = 42;
const CORPUS_COUNT: usize = 1000;
const TIME_LIMIT: Duration = Duration::from_secs(300);

fn corpus_spec(mutations: bool) -> RunSpec {
    RunSpec {
        seed: CORPUS_SEED,
        primes: [2, 3, 5, 7].map(pr).to_vec(),
        ns: vec![1, 2, 3],
        count: CORPUS_COUNT,
        mutations,
    }
}

fn gs_constancy_corpus() -> Outcome {
    let start = Instant::now();
    let m = manifest::run(&corpus_spec(false));
    let elapsed = start.elapsed();
    ensure!(m.records.len() == 12 * CORPUS_COUNT, "{} records", m.records.len());
    if let Some(r) = m.records.iter().find(|r| !r.pass) {
        return Err(format!(
            "{} failed, {} errored; first p={} n={} index={} ({:?} vs {:?}, {:?})",
            m.failed(),
            m.errored(),
            r.p,
            r.n,
            r.index,
            r.lhs,
            r.rhs,
            r.error
        ));
    }
    for p in [2, 3, 5, 7] {
        for n in [1, 2, 3] {
            let seen: BTreeSet<String> = m
                .records
                .iter()
                .filter(|r| r.p == p && r.n == n)
                .filter_map(|r| r.entry.as_ref().map(|e| e.k.to_string()))
                .collect();
            let wanted: BTreeSet<String> = admissible_algebras(pr(p), n).iter().map(|k| k.to_string()).collect();
            ensure!(seen == wanted, "p={p} n={n}: K covered {seen:?}, wanted {wanted:?}");
        }
    }
    ensure!(elapsed < TIME_LIMIT, "took {:.1}s", elapsed.as_secs_f64());
    Ok(format!("{} configs, 0 failures, every admissible K, {:.1}s", m.passed(), elapsed.as_secs_f64()))
}

fn eta_invariants() -> Outcome {
    let mut checked = 0;
    for p in [2, 3, 5] {
        let p = pr(p);
        for n in 1..=5 {
            let eta = eta_sp(n, p).map_err(|e| e.to_string())?;
            ensure!(eta == SquareClass::one(p), "eta_sp({n}) = {eta} at p={p}");
            checked += 1;
        }
        let table = square_class_table(p);
        for n in 1..=4 {
            let sign = int(if n % 2 == 1 { 1 } else { -1 });
            for y in &table {
                let y = y.representative();
                for b in &table {
                    let v_prime = QuadForm::from_diagonal(&[y.clone(), b.representative()], p).map_err(|e| e.to_string())?;
                    let eta = eta_so(&v_prime, &y, n).map_err(|e| e.to_string())?;
                    let expected = square_class(&(&sign * &y), p).map_err(|e| e.to_string())?;
                    ensure!(eta == expected, "eta_so n={n} y={y} at p={p}: {eta} vs {expected}");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} exact comparisons"))
}

fn oracle_concordance() -> Outcome {
    let (mut pairs, mut classes, mut worst) = (0, 0, 0f64);
    for p in [2, 3, 5, 7, 11] {
        let p = pr(p);
        let table = square_class_table(p);
        for a in &table {
            let (a, ar) = (a, a.representative());
            for b in &table {
                let h = hilbert_qp(&ar, &b.representative(), p).map_err(|e| e.to_string())?;
                let o = solubility_qp(&ar, &b.representative(), p).map_err(|e| e.to_string())?;
                ensure!(!matches!(o, Solubility::Inconclusive), "oracle inconclusive at p={p} ({a}, {b})");
                ensure!(o.is_soluble() == (h == 1), "Hilbert ({a}, {b}) at p={p}: closed {h}, oracle {o:?}");
                pairs += 1;
            }
            let (g0, g1) = gauss_oracle_stable(&ar, p).map_err(|e| e.to_string())?;
            let closed = weil_rank1(&ar, p).map_err(|e| e.to_string())?;
            ensure!(g0.distance < 1e-6 && g1.distance < 1e-6, "snap distance {} / {} for {a}", g0.distance, g1.distance);
            ensure!(g0.snapped == g1.snapped, "unstable between radii {} and {} for {a}", g0.k, g1.k);
            ensure!(g0.snapped == closed, "Weil index of <{a}> at p={p}: closed {closed}, oracle {}", g0.snapped);
            worst = worst.max(g0.distance).max(g1.distance);
            classes += 1;
        }
    }
    Ok(format!("{pairs} Hilbert pairs, {classes} Weil classes, max snap distance {worst:.1e}"))
}

/// Diagonal forms over class representatives, one per multiset of entries.
fn diagonal_forms(p: Prime, dim: usize) -> Vec<QuadForm> {
    let table: Vec<Rational> = square_class_table(p).iter().map(|c| c.representative()).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    'outer: loop {
        if idx.windows(2).all(|w| w[0] <= w[1]) {
            let a: Vec<Rational> = idx.iter().map(|&i| table[i].clone()).collect();
            out.push(QuadForm::from_diagonal(&a, p).unwrap());
        }
        for k in 0..dim {
            idx[k] += 1;
            if idx[k] < table.len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        return out;
    }
}

fn form_suite() -> Outcome {
    let mut r = rng(4);
    let mut fixtures = Vec::new();
    for p in [2, 3, 5, 7] {
        for dim in 1..=6 {
            for _ in 0..4 {
                fixtures.push(QuadForm::new(random_symmetric(&mut r, dim), pr(p)).unwrap());
            }
        }
    }
    for q in &fixtures {
        let inv = q.invariants();
        for _ in 0..50 {
            let g = random_invertible(&mut r, q.dim());
            let moved = q.transform(&g).map_err(|e| e.to_string())?;
            ensure!(moved.invariants() == inv, "invariants moved under congruence for {q}");
        }
    }

    let mut searched = 0;
    for (p, max_dim) in [(3, 3), (5, 3), (7, 2), (2, 2)] {
        for dim in 1..=max_dim {
            let forms = diagonal_forms(pr(p), dim);
            for a in &forms {
                for b in &forms {
                    let by_invariants = a.equivalent(b).map_err(|e| e.to_string())?;
                    ensure!(by_invariants == congruence_witness(a, b).is_some(), "p={p}: {a} vs {b}");
                    searched += 1;
                }
            }
        }
    }
    let twos = diagonal_forms(pr(2), 3);
    for (i, a) in twos.iter().enumerate().step_by(7) {
        for b in twos.iter().skip(i % 5).step_by(5) {
            ensure!(a.equivalent(b).unwrap() == congruence_witness(a, b).is_some(), "p=2: {a} vs {b}");
            searched += 1;
        }
    }

    for q in &fixtures {
        let (index, kernel) = q.witt_decompose();
        let mut rebuilt = kernel.realize().map_err(|e| e.to_string())?;
        for _ in 0..index {
            rebuilt = rebuilt.direct_sum(&QuadForm::hyperbolic(1, q.prime())).unwrap();
        }
        ensure!(rebuilt.equivalent(q).unwrap(), "Witt reconstruction of {q}");
    }

    let primes = [2, 3, 5, 7];
    for i in 0..500 {
        let p = pr(primes[i % 4]);
        let q1 = QuadForm::new(random_symmetric(&mut r, 1 + i % 3), p).unwrap();
        let q2 = QuadForm::new(random_symmetric(&mut r, 1 + (i / 3) % 4), p).unwrap();
        let joint = q1.direct_sum(&q2).unwrap();
        let cross = hilbert_qp(&q1.det_class().representative(), &q2.det_class().representative(), p).unwrap();
        ensure!(joint.hasse() == q1.hasse() * q2.hasse() * cross, "Hasse sum rule for {q1} + {q2}");
    }
    Ok(format!(
        "{} fixtures x 50 congruences, {searched} searched pairs, {} reconstructions, 500 Hasse pairs",
        fixtures.len(),
        fixtures.len()
    ))
}

fn norm_correspondence() -> Outcome {
    let mut odd_count = 0;
    for p in [2u64, 3, 5] {
        let mut r = rng(500 + p);
        let mut done = 0;
        let mut round = 0;
        while done < 200 {
            round += 1;
            ensure!(round < 2000, "p={p}: only {done} usable fixtures");
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
                Err(e) => return Err(format!("p={p} round {round}: {e}")),
            };
            let fail = |what: &str| format!("p={p} round {round} ({:?}, eps {epsilon}): {what}", param.kind);
            let gamma = gs_norm(&config).map_err(|e| fail(&e.to_string()))?;
            ensure!(gs_param_check(&config, &param).map_err(|e| fail(&e.to_string()))?, "{}", fail("char_poly relation"));

            let back = gs_section(&config.ambient, &config.x, &gamma).map_err(|e| fail(&e.to_string()))?;
            ensure!(back.y == config.y, "{}", fail("section does not recover Y"));
            ensure!(gs_norm(&back).unwrap() == gamma, "{}", fail("norm of section"));

            for _ in 0..20 {
                let h = random_invertible(&mut r, dim);
                let moved = act(&config, &h).map_err(|e| fail(&e.to_string()))?;
                ensure!(gs_norm(&moved).map_err(|e| fail(&e.to_string()))? == gamma, "{}", fail("norm moved under g-action"));
            }

            let base = twist_invariant(&config.y).unwrap();
            for _ in 0..10 {
                let x1 = random_invertible(&mut r, dim);
                let other = gs_section(&config.ambient, &x1, &gamma).map_err(|e| fail(&e.to_string()))?;
                ensure!(twist_invariant(&other.y).unwrap() == base, "{}", fail("twist_invariant depends on X"));
            }
            odd_count += usize::from(param.kind == ClassKind::TglOdd);
            done += 1;
        }
    }
    Ok(format!("600 fixtures ({odd_count} odd), 20 actions and 10 sections each"))
}

fn determinant_identity() -> Outcome {
    let mut r = rng(6);
    let mut separations = 0;
    for i in 0..200 {
        let p = pr([2, 3, 5][i % 3]);
        let alg = random_algebra(&mut r, p, 1 + i % 4, true);
        let a = fixed_unit(&mut r, &alg);
        let t = fixed_unit(&mut r, &alg);
        let ta = alg.mul(&t, &a);
        let qa = alg.trace_form_quadratic(&a).map_err(|e| e.to_string())?;
        let qta = alg.trace_form_quadratic(&ta).map_err(|e| e.to_string())?;
        let nt = alg.norm_to_qp(&t);
        let nt_fixed = alg.fixed_norm_to_qp(&t).map_err(|e| e.to_string())?;
        ensure!(nt == nt_fixed.pow(2), "fixture {i}: N(t) is not the square of the fixed-part norm");
        ensure!(qta.gram().det() == &nt * &qa.gram().det(), "fixture {i}: det identity");
        ensure!(qta.det_class() == square_class(&(&nt * &qa.gram().det()), p).unwrap(), "fixture {i}: det classes");
        let c2 = fixed_unit(&mut r, &alg);
        for (c1, c2) in [(&a, &a), (&a, &ta), (&a, &c2)] {
            ensure!(separation_check(&alg, c1, c2).map_err(|e| e.to_string())?, "fixture {i}: separation_check");
            separations += 1;
        }
    }
    Ok(format!("200 (a, t) fixtures, {separations} separation pairs"))
}

fn enumeration_counts() -> Outcome {
    for (p, n, want) in [(3, 1, 4), (5, 1, 4), (7, 1, 4), (11, 1, 4), (3, 2, 8), (5, 2, 8), (7, 2, 8), (11, 2, 8), (2, 1, 8)] {
        let got = enumerate_elliptic_data(n, pr(p)).map_err(|e| e.to_string())?.len();
        ensure!(got == want, "p={p}, 2n={}: {got} data, expected {want}", 2 * n);
    }
    let mut r = rng(7);
    for i in 0..400 {
        let p = pr([2, 3, 5, 7][i % 4]);
        let n = 1 + (i / 4) % 4;
        let phi = random_elliptic(&mut r, p, n);
        let c = classify(&phi).map_err(|e| e.to_string())?;
        ensure!(enumerate_elliptic_data(n, p).unwrap().contains(&c.datum), "classify left the enumeration for {phi:?}");
    }
    Ok("counts 4/8/8, 400 classified parameters".into())
}

fn mutation_robustness() -> Outcome {
    let m = manifest::run(&corpus_spec(true));
    ensure!(m.failed() + m.errored() == 0, "unmutated fixtures did not all pass");
    let (caught, total) = m.mutation_totals();
    ensure!(total > 0, "no mutations generated");
    let rate = caught as f64 / total as f64;
    ensure!(rate >= 0.95, "caught {caught}/{total} = {:.4}", rate);
    Ok(format!("caught {caught}/{total} = {:.4}%", 100.0 * rate))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("GS-constancy on 1000 configs per (p, n)", gs_constancy_corpus),
        ("eta invariants", eta_invariants),
        ("Hilbert and Weil oracle concordance", oracle_concordance),
        ("form-theory suite", form_suite),
        ("norm correspondence", norm_correspondence),
        ("determinant identity and separation", determinant_identity),
        ("enumeration counts", enumeration_counts),
        ("mutation robustness >= 95%", mutation_robustness),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                println!("FAIL [{}] {name}: {why} ({secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: criteria {failed:?} failed");
        std::process::exit(1);
    }
}
