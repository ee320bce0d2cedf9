//! Random Presburger sentences and a brute-force reading of them with
//! explicit quantifier ranges.

use nile::presburger::PresburgerFormula as F;
use nile::syntax::{lcm, LinTerm};
use rand::rngs::StdRng;
use rand::Rng;

/// Largest constant and modulus lcm, used to size the brute-force ranges.
pub fn stats(f: &F) -> (i64, u64) {
    match f {
        F::Const(_) => (0, 1),
        F::Geq(t) => (t.constant_part().abs(), 1),
        F::Divides(m, t) => (t.constant_part().abs(), *m),
        F::Not(a) | F::Exists(_, a) | F::Forall(_, a) => stats(a),
        F::And(xs) | F::Or(xs) => xs.iter().map(stats).fold((0, 1), |(c, m), (c2, m2)| (c.max(c2), lcm(m, m2))),
    }
}

/// Bounded semantics: the quantifier at nesting depth `d` ranges over `0..=bounds[d]`.
pub fn brute(f: &F, env: &mut Vec<(String, i64)>, bounds: &[i64], depth: usize) -> bool {
    let lookup = |env: &Vec<(String, i64)>, t: &LinTerm| {
        t.eval(|v| env.iter().rev().find(|(n, _)| n == v).map(|(_, x)| *x)).expect("bound variable")
    };
    match f {
        F::Const(b) => *b,
        F::Geq(t) => lookup(env, t) >= 0,
        F::Divides(m, t) => lookup(env, t).rem_euclid(*m as i64) == 0,
        F::Not(a) => !brute(a, env, bounds, depth),
        F::And(xs) => xs.iter().all(|x| brute(x, env, bounds, depth)),
        F::Or(xs) => xs.iter().any(|x| brute(x, env, bounds, depth)),
        F::Exists(v, a) | F::Forall(v, a) => {
            let want = matches!(f, F::Exists(..));
            let mut out = !want;
            for k in 0..=bounds[depth] {
                env.push((v.clone(), k));
                let r = brute(a, env, bounds, depth + 1);
                env.pop();
                if r == want {
                    out = want;
                    break;
                }
            }
            out
        }
    }
}

pub fn random_term(rng: &mut StdRng, vars: &[&str]) -> LinTerm {
    vars.iter().fold(LinTerm::constant(rng.gen_range(-6..=6)), |acc, v| {
        acc.plus(&LinTerm::scaled_var(*v, rng.gen_range(-3..=3)))
    })
}

pub fn random_body(rng: &mut StdRng, vars: &[&str], depth: u32) -> F {
    if depth == 0 || rng.gen_ratio(1, 3) {
        let t = random_term(rng, vars);
        return if rng.gen_ratio(2, 3) { F::Geq(t) } else { F::Divides(rng.gen_range(2..=4), t) };
    }
    match rng.gen_range(0..4) {
        0 => F::not(random_body(rng, vars, depth - 1)),
        1 => F::or(random_body(rng, vars, depth - 1), random_body(rng, vars, depth - 1)),
        _ => F::and(random_body(rng, vars, depth - 1), random_body(rng, vars, depth - 1)),
    }
}

pub fn quantify(rng: &mut StdRng, v: &str, body: F) -> F {
    if rng.gen_bool(0.5) {
        F::exists(v, body)
    } else {
        F::forall(v, body)
    }
}

pub fn random_sentence(rng: &mut StdRng) -> F {
    match rng.gen_range(0..4) {
        0 => {
            let b = random_body(rng, &["x"], 2);
            quantify(rng, "x", b)
        }
        1 => {
            let b = random_body(rng, &["x", "y"], 2);
            let inner = quantify(rng, "y", b);
            quantify(rng, "x", inner)
        }
        2 => {
            let (l, r) = (random_body(rng, &["x"], 2), random_body(rng, &["y"], 2));
            let (l, r) = (quantify(rng, "x", l), quantify(rng, "y", r));
            if rng.gen_bool(0.5) {
                F::and(l, r)
            } else {
                F::or(l, r)
            }
        }
        _ => {
            let outer = random_body(rng, &["x"], 1);
            let b = random_body(rng, &["x", "y"], 1);
            let inner = quantify(rng, "y", b);
            let body = if rng.gen_bool(0.5) { F::and(outer, inner) } else { F::or(outer, inner) };
            quantify(rng, "x", body)
        }
    }
}

/// Brute-force truth, or `None` when doubling every range changes the answer.
pub fn bounded_truth(f: &F) -> Option<bool> {
    let (cmax, m) = stats(f);
    let base = 3 * m as i64 * (1 + cmax) + 10;
    let inner = 4 * base + 10 + 2 * m as i64;
    let small = brute(f, &mut Vec::new(), &[base, inner], 0);
    let large = brute(f, &mut Vec::new(), &[2 * base, 2 * inner], 0);
    (small == large).then_some(small)
}
