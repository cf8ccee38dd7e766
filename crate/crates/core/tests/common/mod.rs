#![allow(dead_code)]

use bnobs::{BooleanFunction, Literal, Network};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn literals<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<Literal> {
    let mut vars: Vec<usize> = (1..=n).collect();
    vars.shuffle(rng);
    vars[..k]
        .iter()
        .map(|&var| Literal {
            var,
            negated: rng.gen(),
        })
        .collect()
}

/// Truth table over `k` distinct random variables, redrawn until every
/// listed variable is relevant.
pub fn truth_table<R: Rng>(rng: &mut R, n: usize, k: usize) -> BooleanFunction {
    loop {
        let mut vars: Vec<usize> = (1..=n).collect();
        vars.shuffle(rng);
        vars.truncate(k);
        let bits = (0..1usize << k).map(|_| rng.gen()).collect();
        let f = BooleanFunction::TruthTable { vars, bits };
        if f.validate(n).is_ok() {
            return f;
        }
    }
}

pub fn nested_canalyzing<R: Rng>(rng: &mut R, n: usize, k: usize) -> BooleanFunction {
    let lits = literals(rng, n, k);
    let mut groups = Vec::new();
    if rng.gen_bool(0.3) {
        groups.push(Vec::new());
    }
    let mut rest = &lits[..];
    while !rest.is_empty() {
        let take = rng.gen_range(1..=rest.len());
        groups.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    BooleanFunction::NestedCanalyzing(groups)
}

pub fn any_function<R: Rng>(rng: &mut R, n: usize) -> BooleanFunction {
    let k = rng.gen_range(1..=n.min(4));
    match rng.gen_range(0..5) {
        0 => BooleanFunction::And(literals(rng, n, k)),
        1 => BooleanFunction::Or(literals(rng, n, k)),
        2 => BooleanFunction::Xor(literals(rng, n, k)),
        3 => nested_canalyzing(rng, n, k),
        _ => truth_table(rng, n, k),
    }
}

pub fn mixed_network<R: Rng>(rng: &mut R, n: usize) -> Network {
    Network::new((0..n).map(|_| any_function(rng, n)).collect()).unwrap()
}

pub fn truth_table_network<R: Rng>(rng: &mut R, n: usize) -> Network {
    Network::new(
        (0..n)
            .map(|_| {
                let k = rng.gen_range(1..=n.min(3));
                truth_table(rng, n, k)
            })
            .collect(),
    )
    .unwrap()
}

pub fn xor_network<R: Rng>(rng: &mut R, n: usize, negations: bool) -> Network {
    Network::new(
        (0..n)
            .map(|_| {
                let k = rng.gen_range(1..=n.min(4));
                let mut lits = literals(rng, n, k);
                if !negations {
                    lits.iter_mut().for_each(|l| l.negated = false);
                }
                BooleanFunction::Xor(lits)
            })
            .collect(),
    )
    .unwrap()
}
