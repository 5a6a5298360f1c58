//! Finite rings against exhaustive oracles: ring laws, units, orders and
//! linear systems.

use mcq_core::linalg::{satisfies, solve_linear, solve_linear_exhaustive};
use mcq_core::ring::{FiniteRing, RingElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (m, f) pairs with |R| ≤ 128; `f` lists coefficients from the constant up.
fn rings() -> Vec<FiniteRing> {
    let specs: &[(i64, &[i64])] = &[
        (2, &[]),
        (3, &[]),
        (4, &[]),
        (6, &[]),
        (12, &[]),
        (27, &[]),
        (128, &[]),
        (2, &[1, 1, 1]),
        (2, &[1, 1, 0, 1]),
        (2, &[1, 0, 0, 1]),
        (3, &[2, 1, 1]),
        (3, &[0, 0, 1]),
        (3, &[2, 0, 0, 0, 1]),
        (4, &[1, 0, 1]),
        (5, &[2, 0, 1]),
        (5, &[1, 0, 1]),
        (11, &[1, 1]),
        (2, &[1, 1, 0, 0, 0, 0, 0, 1]),
    ];
    specs.iter().map(|(m, f)| FiniteRing::new(*m, f).unwrap()).collect()
}

fn name(r: &FiniteRing) -> String {
    format!("Z_{}[x]/{:?}", r.modulus(), r.poly())
}

/// Triples for the ring laws: all of them for small rings, a fixed random
/// sample otherwise.
fn triples(r: &FiniteRing, rng: &mut ChaCha8Rng) -> Vec<(RingElement, RingElement, RingElement)> {
    let n = r.size();
    if n <= 32 {
        (0..n * n * n).map(|i| (r.element_at(i / (n * n)), r.element_at(i / n % n), r.element_at(i % n))).collect()
    } else {
        (0..20_000)
            .map(|_| (r.element_at(rng.gen_range(0..n)), r.element_at(rng.gen_range(0..n)), r.element_at(rng.gen_range(0..n))))
            .collect()
    }
}

#[test]
fn ring_laws_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for r in rings() {
        let (zero, one) = (r.zero(), r.one());
        for (a, b, c) in triples(&r, &mut rng) {
            let n = name(&r);
            assert_eq!(r.add(&r.add(&a, &b), &c), r.add(&a, &r.add(&b, &c)), "{n}");
            assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)), "{n}");
            assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)), "{n}");
            assert_eq!(r.add(&a, &b), r.add(&b, &a), "{n}");
            assert_eq!(r.mul(&a, &b), r.mul(&b, &a), "{n}");
            assert_eq!(r.add(&a, &zero), a, "{n}");
            assert_eq!(r.mul(&a, &one), a, "{n}");
            assert_eq!(r.add(&a, &r.neg(&a)), zero, "{n}");
            assert_eq!(r.sub(&a, &b), r.add(&a, &r.neg(&b)), "{n}");
        }
    }
}

#[test]
fn indexing_and_literals_are_bijective() {
    for r in rings() {
        let expected = (r.modulus() as usize).pow(r.degree().max(1) as u32);
        assert_eq!(r.size(), expected, "{}", name(&r));
        for (i, e) in r.elements().enumerate() {
            assert_eq!(r.index_of(&e), i);
            assert_eq!(r.element_at(i), e);
            assert_eq!(r.parse_element(&e.to_string()).unwrap(), e, "{}: {e}", name(&r));
        }
    }
}

#[test]
fn units_inverses_and_orders_match_exhaustive_search() {
    for r in rings() {
        let elems: Vec<RingElement> = r.elements().collect();
        let units: Vec<&RingElement> =
            elems.iter().filter(|a| elems.iter().any(|b| r.mul(a, b) == r.one())).collect();
        assert_eq!(r.is_field(), units.len() == elems.len() - 1, "{}", name(&r));
        for a in &elems {
            let is_unit = units.contains(&a);
            assert_eq!(r.is_unit(a), is_unit, "{}: {a}", name(&r));
            match r.inverse(a) {
                Ok(b) => assert_eq!(r.mul(a, &b), r.one()),
                Err(_) => assert!(!is_unit),
            }
            if is_unit {
                let order = r.unit_order(a).unwrap();
                let least = (1..).find(|&k| r.pow(a, k) == r.one()).unwrap();
                assert_eq!(order, least, "{}: order of {a}", name(&r));
                assert_eq!(units.len() as u64 % order, 0, "{}: order of {a} divides |R^×|", name(&r));
                assert_eq!(r.pow_signed(a, -1).unwrap(), r.inverse(a).unwrap());
            } else {
                assert!(r.unit_order(a).is_err());
            }
        }
    }
}

fn random_system(
    r: &FiniteRing,
    rng: &mut ChaCha8Rng,
    rows: usize,
    unknowns: usize,
) -> (Vec<Vec<RingElement>>, Vec<RingElement>) {
    let n = r.size();
    // Sparse-ish rows so that solution sets are not always trivial.
    let pick = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.4) { r.zero() } else { r.element_at(rng.gen_range(0..n)) };
    let a: Vec<Vec<RingElement>> = (0..rows).map(|_| (0..unknowns).map(|_| pick(rng)).collect()).collect();
    let b = if rng.gen_bool(0.5) {
        // Consistent by construction.
        let x: Vec<RingElement> = (0..unknowns).map(|_| r.element_at(rng.gen_range(0..n))).collect();
        a.iter()
            .map(|row| row.iter().zip(&x).fold(r.zero(), |acc, (c, v)| r.add(&acc, &r.mul(c, v))))
            .collect()
    } else {
        (0..rows).map(|_| pick(rng)).collect()
    };
    (a, b)
}

#[test]
fn linear_solver_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for r in rings().into_iter().filter(|r| r.size() <= 81) {
        let max_unknowns = (1..=6).take_while(|k| (r.size() as u128).pow(*k) <= 200_000).last().unwrap();
        for _ in 0..40 {
            let unknowns = rng.gen_range(1..=max_unknowns as usize);
            let rows = rng.gen_range(0..=unknowns + 1);
            let (a, b) = random_system(&r, &mut rng, rows, unknowns);
            let fast = solve_linear(&r, unknowns, &a, &b).unwrap();
            let (count, _) = solve_linear_exhaustive(&r, unknowns, &a, &b, 1_000_000).unwrap();
            assert_eq!(fast.cardinality, count, "{}: {a:?} x = {b:?}", name(&r));
            match &fast.particular {
                Some(x) => assert!(satisfies(&r, &a, &b, x)),
                None => assert_eq!(count, 0),
            }
            if r.is_field() && count > 0 {
                let dim = fast.dimension.unwrap();
                assert_eq!((r.size() as u128).pow(dim as u32), count);
                assert_eq!(fast.basis.len(), dim);
                let zeros = vec![r.zero(); a.len()];
                assert!(fast.basis.iter().all(|v| satisfies(&r, &a, &zeros, v)));
            }
        }
    }
}

#[test]
fn exhaustive_solver_respects_its_bound() {
    let r = FiniteRing::new(3, &[2, 1, 1]).unwrap();
    assert!(solve_linear_exhaustive(&r, 7, &[], &[], 1_000_000).is_err());
    assert_eq!(solve_linear(&r, 7, &[], &[]).unwrap().cardinality, 9u128.pow(7));
}
