mod common;

use common::{ab, random_nested, random_quantified, random_regular, Reference};
use nile::eval::{eval, witness_bound, EvalBudget, Evaluator};
use nile::parser::parse;
use nile::syntax::{expand_sugar, Alphabet, CoreExpr, Interpretation, LinTerm, NumPredicate};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn core(text: &str, sigma: &Alphabet) -> CoreExpr {
    expand_sugar(&parse(text).unwrap(), sigma).unwrap()
}

#[test]
fn regular_expressions_agree_with_reference() {
    let sigma = ab();
    let words = sigma.words_up_to(6);
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..1500 {
        let e = random_regular(&mut rng, 3, true);
        let ev = Evaluator::new(&e, &sigma);
        let reference = Reference::new(&sigma, 0, 0);
        for w in &words {
            assert_eq!(ev.accepts(w).unwrap(), reference.holds(&e, w), "{e:?} on {w:?}");
        }
    }
}

/// The reference searches four times further than the evaluator's bound for
/// the longest word, which covers every shorter word as well.
fn agrees_with_wide_search(e: &CoreExpr, sigma: &Alphabet, words: &[String]) {
    let ev = Evaluator::new(e, sigma);
    let reference = Reference::new(sigma, 4 * witness_bound(e, 6) as i64, 0);
    for w in words {
        assert_eq!(ev.accepts(w).unwrap(), reference.holds(e, w), "{e:?} on {w:?}");
    }
}

#[test]
fn quantified_expressions_agree_with_wide_search() {
    let sigma = ab();
    let words = sigma.words_up_to(6);
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..1000 {
        agrees_with_wide_search(&random_quantified(&mut rng, 2), &sigma, &words);
    }
}

#[test]
fn nested_quantifiers_agree_with_wide_search() {
    let sigma = ab();
    let words = sigma.words_up_to(4);
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..40 {
        agrees_with_wide_search(&random_nested(&mut rng, 2), &sigma, &words);
    }
}

#[test]
fn string_quantifiers_agree_with_exhaustive_candidates() {
    let sigma = ab();
    let cases = [
        "PALINDROME",
        "EXISTSSTR u [ a . $u . $u ]",
        "EXISTSSTR u [ !(TOP . $u . TOP) ]",
        "EXISTSSTR u [ $u . REVERSE($u) ]",
        "EXISTSSTR u [ HAS(=2, $u) & !($u . TOP) ]",
        "!EXISTSSTR u [ $u . b . $u ]",
        "EXISTSSTR u [ REP(>=2, $u) & !eps ]",
    ];
    for text in cases {
        let e = core(text, &sigma);
        for w in sigma.words_up_to(6) {
            let reference = Reference::new(&sigma, 0, w.len() + 1);
            let got = eval(&e, &w, &Interpretation::default(), &sigma, &EvalBudget::default()).unwrap();
            assert_eq!(got, reference.holds(&e, &w), "{text} on {w:?}");
        }
    }
}

#[test]
fn null_free_repetition_counts_stay_below_length() {
    let sigma = ab();
    let mut rng = StdRng::seed_from_u64(13);
    let mut checked = 0;
    while checked < 200 {
        let phi = random_regular(&mut rng, 2, false);
        if Evaluator::new(&phi, &sigma).accepts("").unwrap() {
            continue;
        }
        checked += 1;
        for w in sigma.words_up_to(5) {
            for n in (w.len() as i64 + 1)..(w.len() as i64 + 4) {
                let e = CoreExpr::rep(NumPredicate::eq(LinTerm::constant(n)), phi.clone());
                assert!(!Evaluator::new(&e, &sigma).accepts(&w).unwrap());
            }
        }
    }
}

#[test]
fn has_zero_law() {
    let sigma = ab();
    let mut rng = StdRng::seed_from_u64(14);
    for _ in 0..300 {
        let phi = random_regular(&mut rng, 2, true);
        let zero = CoreExpr::has(NumPredicate::eq(LinTerm::constant(0)), phi.clone());
        let inside = CoreExpr::concat(CoreExpr::concat(CoreExpr::top(), phi), CoreExpr::top());
        let (z, i) = (Evaluator::new(&zero, &sigma), Evaluator::new(&inside, &sigma));
        for w in sigma.words_up_to(5) {
            assert_eq!(z.accepts(&w).unwrap(), !i.accepts(&w).unwrap());
        }
    }
}

#[test]
fn evaluation_is_deterministic() {
    let sigma = ab();
    let mut rng = StdRng::seed_from_u64(15);
    for _ in 0..100 {
        let e = random_quantified(&mut rng, 2);
        let ev = Evaluator::new(&e, &sigma);
        let w: String = (0..rng.gen_range(0..7)).map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' }).collect();
        let budget = EvalBudget::default();
        let first = ev.eval(&w, &Interpretation::default(), &budget).unwrap();
        let second = Evaluator::new(&e, &sigma).eval(&w, &Interpretation::default(), &budget).unwrap();
        assert_eq!(first, second);
    }
}

#[test]
fn quantified_bodies_are_eventually_periodic() {
    let sigma = ab();
    let mut rng = StdRng::seed_from_u64(16);
    for _ in 0..150 {
        let e = random_quantified(&mut rng, 2);
        let CoreExpr::ExistsNum(x, body) = &e else { unreachable!() };
        if !body.free_vars().0.iter().all(|v| v == x) {
            continue;
        }
        let ev = Evaluator::new(body, &sigma);
        let m = nile::eval::modulus_lcm(&e) as u64;
        for w in sigma.words_up_to(4) {
            let b = witness_bound(&e, w.len());
            let at = |n: u64| {
                ev.eval(&w, &Interpretation::new().with_num(x.clone(), n), &EvalBudget::default()).unwrap().value
            };
            for n in b..4 * b {
                assert_eq!(at(n), at(n + m), "{e:?} on {w:?} at {n}");
            }
        }
    }
}
