mod common;

use bnobs::state_space::{summarize, summarize_sharded};
use bnobs::{parse, serialize, BooleanFunction, Literal, Network, ObservationScheme};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parse_inverts_serialize(seed in any::<u64>(), n in 1usize..=8, observe in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = common::mixed_network(&mut rng, n);
        let scheme = observe.then(|| {
            ObservationScheme::new((1..=n).filter(|_| rng.gen_bool(0.5)).chain([1]))
        });
        let text = serialize(&net, scheme.as_ref());
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back.network, &net);
        prop_assert_eq!(&back.scheme, &scheme);
        prop_assert_eq!(serialize(&back.network, back.scheme.as_ref()), text);
    }

    #[test]
    fn step_ignores_evaluation_order(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = common::mixed_network(&mut rng, n);
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut rng);
        for s in 0..net.state_count() {
            // evaluate nodes one by one in a shuffled order against the old state
            let mut next = 0u64;
            for &i in &order {
                next |= u64::from(net.functions()[i].eval(s)) << i;
            }
            prop_assert_eq!(net.step_bits(s), next);
        }
    }
}

#[test]
fn xor_networks_are_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=10 {
        for _ in 0..4 {
            let net = common::xor_network(&mut rng, n, false);
            assert_eq!(net.step_bits(0), 0);
            let states = net.state_count();
            // all pairs for small n, a dense sample of pairs beyond
            let stride = if n <= 7 { 1 } else { 61 };
            for s in 0..states {
                for t in (0..states).step_by(stride) {
                    assert_eq!(net.step_bits(s ^ t), net.step_bits(s) ^ net.step_bits(t));
                }
            }
        }
    }
}

/// The nesting written out recursively from the outermost group inward.
fn expand(groups: &[Vec<Literal>], g: usize, bits: u64) -> bool {
    let is_or = g.is_multiple_of(2);
    let here = groups[g].iter().map(|l| l.value(bits));
    if g + 1 == groups.len() {
        return if is_or { here.into_iter().any(|v| v) } else { here.into_iter().all(|v| v) };
    }
    let inner = expand(groups, g + 1, bits);
    let mut v: Vec<bool> = here.collect();
    v.push(inner);
    if is_or {
        v.into_iter().any(|x| x)
    } else {
        v.into_iter().all(|x| x)
    }
}

#[test]
fn nested_canalyzing_matches_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 1..=6 {
        for _ in 0..200 {
            let f = common::nested_canalyzing(&mut rng, k, k);
            let BooleanFunction::NestedCanalyzing(groups) = &f else { unreachable!() };
            for bits in 0..1u64 << k {
                assert_eq!(f.eval(bits), expand(groups, 0, bits), "{f:?} at {bits:b}");
            }
        }
    }
}

#[test]
fn nested_canalyzing_known_values() {
    let f = BooleanFunction::NestedCanalyzing(vec![
        vec![Literal::pos(2)],
        vec![Literal::neg(1), Literal::neg(3), Literal::neg(4)],
    ]);
    assert!(f.eval(0));
    assert!(!f.eval(0b0001));
    assert!(f.eval(0b0011));
    let and_first = BooleanFunction::NestedCanalyzing(vec![vec![], vec![Literal::pos(1)], vec![Literal::pos(2)]]);
    for bits in 0..4u64 {
        assert_eq!(and_first.eval(bits), bits == 0b11);
    }
}

#[test]
fn count_is_conserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=12 {
        let net = common::mixed_network(&mut rng, n);
        let s = summarize(&net, 24).unwrap();
        assert_eq!(s.counts.iter().map(|&(_, c)| c).sum::<u64>(), 1u64 << n);
        assert_eq!(s.r, s.counts.len());
        for &fp in &s.fixed_points {
            assert_eq!(net.step_bits(fp), fp);
            assert!(s.count_of(fp) >= 1);
        }
        let listed = (0..net.state_count()).filter(|&x| net.step_bits(x) == x).count();
        assert_eq!(listed, s.fixed_point_count());
        assert_eq!(summarize_sharded(&net, 24, 7).unwrap(), s);
    }
}

#[test]
fn and_or_one_frequencies() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 2..=8 {
        for k in 1..=n.min(4) {
            let lits = common::literals(&mut rng, n, k);
            let mut fs = vec![BooleanFunction::And(lits.clone()), BooleanFunction::Or(lits)];
            fs.extend((2..=n).map(|v| BooleanFunction::Xor(vec![Literal::pos(v)])));
            for (f, ones) in [(0, 1u64 << (n - k)), (1, (1u64 << n) - (1u64 << (n - k)))] {
                let mut functions = vec![fs[f].clone()];
                functions.extend(fs[2..].iter().cloned());
                let net = Network::new(functions).unwrap();
                let s = summarize(&net, 24).unwrap();
                assert_eq!(s.ones_frequency[0], ones, "n={n} k={k}");
            }
        }
    }
}

#[test]
fn rejects_malformed_text() {
    let cases = [
        ("nodes: 1\nx1 = AND(x2)\n", "x1"),
        ("nodes: 2\nx1 = AND(x2, x2)\nx2 = XOR(x1)\n", "duplicate"),
        ("nodes: 2\nx1 = XOR(x1)\n", "x2"),
        ("nodes: 1\nx1 = XOR(x1)\nx1 = XOR(x1)\n", "x1"),
        ("nodes: 2\nx1 = TT(vars=[x1, x2], bits=0011)\nx2 = XOR(x1)\n", "irrelevant"),
    ];
    for (text, needle) in cases {
        let err = parse(text).unwrap_err().to_string();
        assert!(err.contains(needle), "{text:?} -> {err}");
    }
    assert!(matches!(
        parse("nodes: 1\nx1 = FOO(x1)\n"),
        Err(bnobs::Error::Syntax { line: 2, .. })
    ));
    assert_eq!(parse("nodes: 1\nx1 = XOR(x1)\n").unwrap().network.n(), 1);
}

#[test]
fn classification_examples() {
    let text = "nodes: 3\nx1 = AND(x1, x3)\nx2 = XOR(x1, x2, x3)\nx3 = AND(x1, x2)\n";
    assert!(parse(text).unwrap().network.classify().is_general());
    let ex1 = bnobs::families::gen(bnobs::families::Family::Example1, Default::default()).unwrap();
    assert_eq!(ex1.network.classify().tags(), vec!["2-AND-OR-BN", "2-NC-BN"]);
}
