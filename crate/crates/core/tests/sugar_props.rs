mod common;

use common::ab;
use common::surface::{random_sugar, SurfaceRef};
use nile::eval::{witness_bound, Evaluator};
use nile::syntax::{expand_sugar, validate, CoreExpr};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn sugar_expansions_match_direct_semantics() {
    let sigma = ab();
    let words = sigma.words_up_to(8);
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..1000 {
        let e = random_sugar(&mut rng);
        assert_eq!(validate(&e, &sigma), Ok(()), "{e:?}");
        let core = expand_sugar(&e, &sigma).unwrap();
        let ev = Evaluator::new(&core, &sigma);
        let reference = SurfaceRef::new(b"ab", 4 * witness_bound(&core, 8) as i64);
        for w in &words {
            assert_eq!(ev.accepts(w).unwrap(), reference.holds(&e, w), "{} on {w:?}", nile::parser::render(&e));
        }
    }
}

#[test]
fn expanding_core_expressions_is_the_identity() {
    let sigma = ab();
    let mut rng = StdRng::seed_from_u64(32);
    for _ in 0..500 {
        let core: CoreExpr = if rng.gen_bool(0.5) {
            common::random_regular(&mut rng, 3, true)
        } else {
            common::random_quantified(&mut rng, 2)
        };
        assert_eq!(expand_sugar(&core.to_surface(), &sigma).unwrap(), core);
    }
}

#[test]
fn valid_expressions_evaluate_without_errors() {
    let sigma = ab();
    let mut rng = StdRng::seed_from_u64(33);
    for _ in 0..300 {
        let e = random_sugar(&mut rng);
        let core = expand_sugar(&e, &sigma).unwrap();
        let ev = Evaluator::new(&core, &sigma);
        for w in sigma.words_up_to(5) {
            assert!(ev.accepts(&w).is_ok());
        }
    }
}
