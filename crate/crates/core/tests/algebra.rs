//! Quandles, biquandles, MCQs/MCBs and G-families against independent
//! formula and brute-force oracles.

mod common;

use mcq_core::axioms::CheckMode;
use mcq_core::family::{
    gfamily_alexander_b, gfamily_alexander_q, lift_quandle_family, verify_qg_compat, zkm_family_from_biquandle,
    zkm_family_from_quandle,
};
use mcq_core::formats::Structure;
use mcq_core::group::FiniteGroup;
use mcq_core::mcq::{mcb_hom_check, mcq_hom_check, q_functor_mcb, Mcb, Mcq};
use mcq_core::quandle::{
    alexander_biquandle, alexander_biquandle_type, alexander_quandle, q_functor_biquandle, Biquandle, Quandle, Side,
};
use mcq_core::ring::{FiniteRing, RingElement};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rings with at most 81 elements.
fn small_rings() -> Vec<FiniteRing> {
    let specs: &[(i64, &[i64])] = &[
        (3, &[]),
        (4, &[]),
        (5, &[]),
        (7, &[]),
        (8, &[]),
        (9, &[]),
        (11, &[]),
        (13, &[]),
        (2, &[1, 1, 1]),
        (2, &[1, 1, 0, 1]),
        (3, &[2, 1, 1]),
        (3, &[0, 0, 1]),
        (3, &[2, 0, 0, 0, 1]),
        (5, &[2, 0, 1]),
        (4, &[1, 0, 1]),
    ];
    specs.iter().map(|(m, f)| FiniteRing::new(*m, f).unwrap()).collect()
}

fn units(r: &FiniteRing) -> Vec<RingElement> {
    r.elements().filter(|a| r.is_unit(a)).collect()
}

/// Random Alexander parameters `(R, s, t)` with `|R| ≤ 81`.
fn random_alexander(rng: &mut ChaCha8Rng) -> (FiniteRing, RingElement, RingElement) {
    let r = small_rings().choose(rng).unwrap().clone();
    let u = units(&r);
    let (s, t) = (u.choose(rng).unwrap().clone(), u.choose(rng).unwrap().clone());
    (r, s, t)
}

#[test]
fn alexander_tables_follow_their_formulas() {
    let r = FiniteRing::integers(5).unwrap();
    let b = alexander_biquandle(&r, &r.from_int(2), &r.from_int(3)).unwrap();
    assert!(b.check().ok());
    assert_eq!((b.under(1, 1), b.over(1, 1)), (2, 2));
    let q = q_functor_biquandle(&b).unwrap();
    for x in 0..5 {
        for y in 0..5 {
            assert_eq!(q.op(x, y), (4 * x + 2 * y) % 5);
        }
    }
    // Over Z_3 with t = 2 the Alexander quandle is the dihedral quandle.
    let z3 = FiniteRing::integers(3).unwrap();
    assert_eq!(alexander_quandle(&z3, &z3.from_int(2)).unwrap(), Quandle::dihedral(3));
    // t = 1 gives the trivial quandle.
    assert_eq!(alexander_quandle(&r, &r.one()).unwrap(), Quandle::trivial(5));
}

#[test]
fn biquandle_with_s_equal_one_is_the_lifted_alexander_quandle() {
    for r in small_rings() {
        for t in units(&r).into_iter().take(4) {
            let b = alexander_biquandle(&r, &r.one(), &t).unwrap();
            assert_eq!(b, Biquandle::from_quandle(&alexander_quandle(&r, &t).unwrap()));
        }
    }
}

#[test]
fn non_unit_parameters_are_rejected() {
    let r = FiniteRing::integers(5).unwrap();
    assert!(alexander_biquandle(&r, &r.one(), &r.zero()).is_err());
    let quartic = FiniteRing::new(3, &[2, 0, 0, 0, 1]).unwrap();
    let t_minus_one = quartic.parse_element("2+x").unwrap();
    assert!(alexander_quandle(&quartic, &t_minus_one).is_err());
}

#[test]
fn bracket_powers_follow_the_alexander_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let (r, s, t) = random_alexander(&mut rng);
        let b = alexander_biquandle(&r, &s, &t).unwrap();
        let elems: Vec<RingElement> = r.elements().collect();
        for _ in 0..20 {
            let (a, c) = (rng.gen_range(0..r.size()), rng.gen_range(0..r.size()));
            for n in -4i64..=4 {
                let (tn, sn) = (r.pow_signed(&t, n).unwrap(), r.pow_signed(&s, n).unwrap());
                let under = r.add(&r.mul(&tn, &elems[a]), &r.mul(&r.sub(&sn, &tn), &elems[c]));
                let over = r.mul(&sn, &elems[a]);
                assert_eq!(b.bracket_pow(a, c, n, Side::Under).unwrap(), r.index_of(&under));
                assert_eq!(b.bracket_pow(a, c, n, Side::Over).unwrap(), r.index_of(&over));
            }
            assert_eq!(b.bracket_pow(a, c, 0, Side::Under).unwrap(), a);
        }
    }
    let z5 = FiniteRing::integers(5).unwrap();
    let b = alexander_biquandle(&z5, &z5.from_int(2), &z5.from_int(3)).unwrap();
    assert_eq!(b.bracket_pow(1, 0, 2, Side::Under).unwrap(), 4);
}

#[test]
fn negative_bracket_power_inverts_one_step() {
    // With β ⊻ β = b, the step (a, β) ↦ (a ⊻ β, b) undoes power −1.
    for b in [
        Biquandle::from_quandle(&Quandle::dihedral(5)),
        alexander_biquandle(&common::gf9(), &common::gf9().parse_element("1+x").unwrap(), &common::gf9().x()).unwrap(),
    ] {
        for a in 0..b.n() {
            for c in 0..b.n() {
                let beta = (0..b.n()).find(|&x| b.under(x, x) == c).unwrap();
                for side in [Side::Under, Side::Over] {
                    let back = b.bracket_pow(a, c, -1, side).unwrap();
                    assert_eq!(b.op(side, back, beta), a);
                }
            }
        }
    }
}

#[test]
fn types_of_random_alexander_biquandles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let (r, s, t) = random_alexander(&mut rng);
        let b = alexander_biquandle(&r, &s, &t).unwrap();
        let q = q_functor_biquandle(&b).unwrap();
        let (tb, tq) = (b.type_of().unwrap(), q.type_of().unwrap());
        let lcm = |a: u64, b: u64| a / gcd(a, b) * b;
        assert_eq!(tb, lcm(r.unit_order(&s).unwrap(), r.unit_order(&t).unwrap()));
        assert_eq!(tb, alexander_biquandle_type(&r, &s, &t).unwrap());
        let u = r.mul(&r.inverse(&s).unwrap(), &t);
        assert_eq!(q, alexander_quandle(&r, &u).unwrap());
        assert_eq!(tq, r.unit_order(&u).unwrap());
        assert_eq!(tb % tq, 0, "type {tb} not divisible by {tq}");
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[test]
fn quartic_and_diagonal_type_examples() {
    let r = FiniteRing::new(3, &[2, 0, 0, 0, 1]).unwrap();
    let t = r.x();
    let b = alexander_biquandle(&r, &r.neg(&t), &t).unwrap();
    assert_eq!(b.type_of().unwrap(), 4);
    assert_eq!(q_functor_biquandle(&b).unwrap().type_of().unwrap(), 2);

    let f = common::gf9();
    let b = alexander_biquandle(&f, &f.x(), &f.x()).unwrap();
    let q = q_functor_biquandle(&b).unwrap();
    assert_eq!(q, Quandle::trivial(9));
    assert_eq!(q.type_of().unwrap(), 1);
    assert_eq!(Quandle::trivial(4).type_of().unwrap(), 1);
}

#[test]
fn functor_of_lifted_quandles_is_the_identity() {
    for n in 3..8 {
        let q = Quandle::dihedral(n);
        assert_eq!(q_functor_biquandle(&Biquandle::from_quandle(&q)).unwrap(), q);
    }
    let f = zkm_family_from_quandle(&Quandle::dihedral(3), 1).unwrap();
    let x = lift_quandle_family(&f).associated_mcb();
    let q = q_functor_mcb(&x).unwrap();
    assert_eq!(q.star_table(), x.under_table());
}

#[test]
fn gf9_family_functor_is_the_t_squared_family() {
    let r = common::gf9();
    let f = common::gf9_family();
    assert!(f.check().ok());
    let t2 = r.pow(&r.x(), 2);
    assert_eq!(r.mul(&r.parse_element("1+x").unwrap(), &t2), r.x());
    let expected = gfamily_alexander_q(&r, 8, &t2).unwrap();
    let qg = f.qg_map();
    for g in 0..8 {
        assert_eq!(qg.table(g), expected.table(g), "g = {g}");
    }
    assert!(verify_qg_compat(&f));
    let x = f.associated_mcb();
    assert_eq!((x.n(), x.blocks().count()), (72, 9));
    assert!(x.check().ok());
    assert!(q_functor_mcb(&x).unwrap().check().ok());
}

#[test]
fn random_alexander_families_are_compatible() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 12 {
        let (r, s, t) = random_alexander(&mut rng);
        let n = (r.unit_order(&s).unwrap() * r.unit_order(&t).unwrap() / gcd(r.unit_order(&s).unwrap(), r.unit_order(&t).unwrap())) as usize;
        if r.size() * n > 90 {
            continue;
        }
        let f = gfamily_alexander_b(&r, n, &t, &s).unwrap();
        assert!(f.check().ok());
        assert!(f.qg_map().check().ok());
        assert!(verify_qg_compat(&f));
        let x = f.associated_mcb();
        assert!(x.check().ok());
        assert!(q_functor_mcb(&x).unwrap().check().ok());
        done += 1;
    }
}

#[test]
fn small_families() {
    let z3 = FiniteRing::integers(3).unwrap();
    let f = gfamily_alexander_q(&z3, 2, &z3.from_int(2)).unwrap();
    assert_eq!(f.table(0), Quandle::trivial(3).table());
    assert_eq!(f.table(1), Quandle::dihedral(3).table());
    let trivial = gfamily_alexander_q(&z3, 4, &z3.one()).unwrap();
    assert!((0..4).all(|g| trivial.table(g) == Quandle::trivial(3).table()));
    assert!(gfamily_alexander_q(&z3, 3, &z3.from_int(2)).is_err());

    let zkm = zkm_family_from_quandle(&Quandle::dihedral(3), 1).unwrap();
    assert_eq!(zkm.group(), f.group());
    assert!((0..2).all(|g| zkm.table(g) == f.table(g)));
    let t3 = zkm_family_from_quandle(&Quandle::trivial(4), 3).unwrap();
    assert_eq!(t3.group().order(), 3);
    assert!((0..3).all(|g| t3.table(g) == Quandle::trivial(4).table()));

    let z5 = FiniteRing::integers(5).unwrap();
    let b = alexander_biquandle(&z5, &z5.from_int(2), &z5.from_int(3)).unwrap();
    let fb = zkm_family_from_biquandle(&b, 1).unwrap();
    assert_eq!(fb.group().order(), 4);
    assert!(fb.check().ok());
    let direct = gfamily_alexander_b(&z5, 4, &z5.from_int(3), &z5.from_int(2)).unwrap();
    for g in 0..4 {
        assert_eq!((fb.under_table(g), fb.over_table(g)), (direct.under_table(g), direct.over_table(g)));
    }

    let gf9 = common::gf9();
    let equal = gfamily_alexander_b(&gf9, 8, &gf9.x(), &gf9.x()).unwrap();
    let qg = equal.qg_map();
    assert!((0..8).all(|g| qg.table(g) == Quandle::trivial(9).table()));
    assert!(verify_qg_compat(&equal));

    let lifted = lift_quandle_family(&zkm);
    assert!(lifted.check().ok());
    assert!(verify_qg_compat(&lifted));

    let trivial_group = lift_quandle_family(&zkm_family_from_quandle(&Quandle::trivial(3), 1).unwrap());
    assert_eq!(trivial_group.group().order(), 1);
    assert!(verify_qg_compat(&trivial_group));
    assert_eq!(trivial_group.qg_map().table(0), Quandle::trivial(3).table());
}

#[test]
fn associated_structures() {
    let f = zkm_family_from_quandle(&Quandle::dihedral(3), 1).unwrap();
    let q = f.associated_mcq();
    assert_eq!((q.n(), q.blocks().count()), (6, 3));
    assert!((0..3).all(|l| q.blocks().group(l).order() == 2));
    assert!(q.check().ok());
    // Element x·|G| + g; (x, g) * (y, h) = (x *^h y, h⁻¹gh).
    for (x, g, y, h) in [(0, 1, 2, 1), (1, 0, 2, 1), (2, 1, 0, 0)] {
        assert_eq!(q.star(2 * x + g, 2 * y + h), 2 * f.op(h, x, y) + g);
    }
}

#[test]
fn homomorphism_checks() {
    let f = zkm_family_from_quandle(&Quandle::dihedral(3), 1).unwrap();
    let q = f.associated_mcq();
    let id: Vec<usize> = (0..6).collect();
    assert!(mcq_hom_check(&id, &q, &q));
    // x ↦ 2x and x ↦ x + 1 are automorphisms of R_3; they act on blocks.
    for sigma in [[0, 2, 1], [1, 2, 0]] {
        let phi: Vec<usize> = (0..6).map(|e| 2 * sigma[e / 2] + e % 2).collect();
        assert!(mcq_hom_check(&phi, &q, &q));
    }
    // Swapping an identity with a non-identity element breaks the group part.
    let swap = [1, 0, 2, 3, 4, 5];
    assert!(!mcq_hom_check(&swap, &q, &q));
    let x = Mcb::from_mcq(&q);
    assert!(mcb_hom_check(&id, &x, &x));
    assert!(!mcb_hom_check(&swap, &x, &x));
    assert!(!mcq_hom_check(&[0, 1, 2], &q, &q));
}

#[test]
fn conjugation_mcqs_of_small_groups() {
    for g in [FiniteGroup::cyclic(4), FiniteGroup::symmetric(3), FiniteGroup::symmetric(4)] {
        let q = Mcq::conjugation(&g);
        assert!(q.check().ok());
        for a in 0..g.order() {
            for b in 0..g.order() {
                assert_eq!(q.star(a, b), g.mul(g.mul(g.inv(b), a), b));
            }
        }
        assert!(q_functor_mcb(&Mcb::from_mcq(&q)).unwrap() == q);
    }
}

/// Random single-entry mutations of structures outside the corpus.
#[test]
fn mutations_of_generated_structures_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let z5 = FiniteRing::integers(5).unwrap();
    let structures = vec![
        Structure::Quandle(Quandle::dihedral(5)),
        Structure::Biquandle(alexander_biquandle(&z5, &z5.from_int(2), &z5.from_int(3)).unwrap()),
        Structure::Group(FiniteGroup::symmetric(3).table().clone()),
        Structure::Mcq(Mcq::conjugation(&FiniteGroup::symmetric(3))),
        Structure::FamilyQ(gfamily_alexander_q(&z5, 4, &z5.from_int(2)).unwrap()),
    ];
    for s in structures {
        assert!(s.check(CheckMode::Full).ok(), "{}", s.kind_name());
        for _ in 0..50 {
            let (m, what) = common::mutate(&s, &mut rng);
            let report = m.check(CheckMode::FirstViolation);
            let v = report.first().unwrap_or_else(|| panic!("{}: {what:?} accepted", s.kind_name()));
            assert!(common::replays(&m, v), "{}: witness {v} does not replay", s.kind_name());
        }
    }
}
