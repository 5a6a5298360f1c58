//! Acceptance checks: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use mcq_core::axioms::CheckMode;
use mcq_core::coloring::{
    brute_force_count, colorings_by_flow, count_colorings, enumerate_flows, is_valid_coloring, linear_colorings,
    list_colorings, verify_correspondence, verify_family_correspondence, EngineOptions, Family, Target,
};
use mcq_core::diagram::Diagram;
use mcq_core::family::verify_qg_compat;
use mcq_core::group::FiniteGroup;
use mcq_core::mcq::{q_functor_mcb, Mcb};
use mcq_core::moves::{apply_move_detailed, enumerate_sites, Direction, MoveKind};
use mcq_core::quandle::{alexander_biquandle, q_functor_biquandle};
use mcq_core::ring::{FiniteRing, RingElement};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn opts() -> EngineOptions {
    EngineOptions::default()
}

/// Corpus MCBs without duplicates (an MCB file equal to the associated MCB
/// of a family file is listed once).
fn distinct_mcbs() -> Vec<(String, Mcb)> {
    let mut out: Vec<(String, Mcb)> = Vec::new();
    for (name, x) in common::mcbs() {
        if !out.iter().any(|(_, y)| *y == x) {
            out.push((name, x));
        }
    }
    out
}

/// Closed corpus diagrams and disjoint unions of the basic ones.
fn correspondence_diagrams() -> Vec<(String, Diagram)> {
    let mut out = common::closed_diagrams();
    let basic = ["loop", "theta", "trefoil", "figure8", "handcuff"];
    for (i, a) in basic.iter().enumerate() {
        for b in &basic[i..] {
            out.push((format!("{a}+{b}"), common::diagram(a).disjoint_union(&common::diagram(b))));
        }
    }
    out
}

fn criterion_1() -> String {
    let mcbs = common::mcbs();
    assert!(mcbs.len() >= 5, "only {} MCBs", mcbs.len());
    assert!(mcbs.iter().any(|(n, x)| n.starts_with("gf9_z8") && x.n() == 72), "72-element GF(9) MCB missing");
    for (name, x) in &mcbs {
        let q = q_functor_mcb(x).unwrap_or_else(|e| panic!("{name}: {e}"));
        let report = q.check();
        assert!(report.ok(), "{name}: Q(X) violates {}", report.violations[0]);
    }
    format!("{} MCBs, every Q(X) passes the MCQ check", mcbs.len())
}

fn criterion_2() -> String {
    let families = common::biquandle_families();
    assert!(!families.is_empty());
    for (name, f) in &families {
        let report = f.qg_map().check();
        assert!(report.ok(), "{name}: Q_G violates {}", report.violations[0]);
        assert!(verify_qg_compat(f), "{name}: Q of the associated MCB differs from the associated MCQ of Q_G");
    }
    format!("{} biquandle families", families.len())
}

fn criterion_3() -> String {
    let diagrams = correspondence_diagrams();
    for required in ["loop", "theta", "trefoil", "figure8", "handcuff"] {
        assert!(diagrams.iter().any(|(n, _)| n == required), "{required} missing");
    }
    let mut pairs = 0;
    let mut flows = 0;
    for (xn, x) in distinct_mcbs() {
        for (dn, d) in &diagrams {
            let r = verify_correspondence(d, &x, opts()).unwrap();
            assert!(r.equal, "{xn} on {dn}: {} vs {}", r.count_mcb, r.count_mcq);
            pairs += 1;
        }
    }
    for (fname, f) in common::biquandle_families() {
        for (dn, d) in &diagrams {
            let r = verify_family_correspondence(d, &f, opts()).unwrap();
            for pf in &r.per_flow {
                assert_eq!(pf.count_b, pf.count_q, "{fname} on {dn}, flow {:?}", pf.flow);
                flows += 1;
            }
            assert!(r.total.equal, "{fname} on {dn}");
        }
    }
    format!("{pairs} (MCB, diagram) pairs over {} diagrams, {flows} flow comparisons", diagrams.len())
}

fn criterion_4() -> String {
    let f = common::gf9_family();
    let fq = f.qg_map();
    let mut diagrams = correspondence_diagrams();
    diagrams.extend(common::diagrams().into_iter().filter(|(_, d)| d.is_open()));
    let mut compared = 0;
    for (dn, d) in &diagrams {
        for flow in enumerate_flows(d, f.group(), opts()).unwrap() {
            let db = linear_colorings(d, Family::B(&f), &flow).unwrap().module_info.unwrap().dimension;
            let dq = linear_colorings(d, Family::Q(&fq), &flow).unwrap().module_info.unwrap().dimension;
            assert!(db.is_some(), "{dn}: no dimension over GF(9)");
            assert_eq!(db, dq, "{dn}, flow {flow:?}");
            compared += 1;
        }
    }
    format!("{compared} (diagram, flow) pairs with equal dimensions")
}

fn criterion_5() -> String {
    let quartic = FiniteRing::new(3, &[2, 0, 0, 0, 1]).unwrap();
    let t = quartic.x();
    let b = alexander_biquandle(&quartic, &quartic.neg(&t), &t).unwrap();
    let (tb, tq) = (b.type_of().unwrap(), q_functor_biquandle(&b).unwrap().type_of().unwrap());
    assert_eq!((tb, tq), (4, 2), "quartic example");
    let gf9 = common::gf9();
    let b = alexander_biquandle(&gf9, &gf9.x(), &gf9.x()).unwrap();
    let tq1 = q_functor_biquandle(&b).unwrap().type_of().unwrap();
    assert_eq!(tq1, 1, "GF(9) with s = t");

    let rings: Vec<FiniteRing> = [(5, &[][..]), (7, &[]), (8, &[]), (9, &[]), (2, &[1, 1, 1]), (3, &[2, 1, 1]), (3, &[0, 0, 1])]
        .iter()
        .chain([(3, &[2, 0, 0, 0, 1][..]), (5, &[2, 0, 1]), (4, &[1, 0, 1])].iter())
        .map(|(m, f)| FiniteRing::new(*m, f).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..60 {
        let r = rings.choose(&mut rng).unwrap();
        assert!(r.size() <= 81);
        let units: Vec<RingElement> = r.elements().filter(|a| r.is_unit(a)).collect();
        let (s, t) = (units.choose(&mut rng).unwrap(), units.choose(&mut rng).unwrap());
        let b = alexander_biquandle(r, s, t).unwrap();
        let (tb, tq) = (b.type_of().unwrap(), q_functor_biquandle(&b).unwrap().type_of().unwrap());
        assert_eq!(tb % tq, 0, "type {tb} not divisible by {tq} for s={s}, t={t}");
        checked += 1;
    }
    format!("types (4, 2) and Q-type 1; divisibility on {checked} random Alexander biquandles")
}

/// Largest target colored on boundary diagrams in the move checks.
const OPEN_TARGET_MAX: usize = 24;

fn criterion_6() -> String {
    let mcbs = distinct_mcbs();
    let mut count_targets: Vec<(String, common::Colorer)> = Vec::new();
    for (n, x) in &mcbs {
        count_targets.push((format!("Q({n})"), common::Colorer::Mcq(q_functor_mcb(x).unwrap())));
        count_targets.push((n.clone(), common::Colorer::Mcb(x.clone())));
    }
    let mut groups: Vec<FiniteGroup> = vec![FiniteGroup::symmetric(3)];
    for (_, f) in common::biquandle_families() {
        if !groups.contains(f.group()) {
            groups.push(f.group().clone());
        }
    }
    count_targets.extend(groups.into_iter().map(|g| (format!("flows of order {}", g.order()), common::Colorer::Flows(g))));

    let lift = mcbs.iter().find(|(n, _)| n.starts_with("r3_z2_lift")).unwrap().1.clone();
    let lift_q = q_functor_mcb(&lift).unwrap();
    let gf9 = mcbs.iter().find(|(n, x)| n.starts_with("gf9") && x.n() == 72).unwrap().1.clone();
    let s3 = FiniteGroup::symmetric(3);

    let mut sites = 0;
    let mut kinds = BTreeSet::new();
    let mut sampled = BTreeSet::new();
    for (dn, d) in common::diagrams() {
        // Boundary diagrams have |X|^strands colorings; keep enumeration affordable.
        let max = if d.is_open() { OPEN_TARGET_MAX } else { usize::MAX };
        let targets: Vec<_> = count_targets.iter().filter(|(_, c)| c.target().size() <= max).collect();
        let before: Vec<u128> = targets.iter().map(|(_, c)| count_colorings(&d, c.target(), opts()).unwrap()).collect();
        for site in enumerate_sites(&d) {
            let kind = (site.kind, site.variant.clone(), site.direction);
            kinds.insert(kind.clone());
            let a = common::Applied::new(&d, site);
            for ((tn, c), b) in targets.iter().zip(&before) {
                let after = count_colorings(&a.out.diagram, c.target(), opts()).unwrap();
                assert_eq!(*b, after, "{dn}: {}: {tn} count {b} -> {after}", a.site);
            }
            let label = format!("{dn}: {}", a.site);
            a.check(Target::Mcb(&lift), true, &label);
            a.check(Target::Mcq(&lift_q), true, &label);
            a.check(Target::Flows(&s3), true, &label);
            // The large structure is sampled once per move kind on closed
            // diagrams; the small ones are transported exhaustively everywhere.
            if !d.is_open() && sampled.insert(kind) {
                a.check(Target::Mcb(&gf9), false, &label);
            }
            sites += 1;
        }
    }
    // Undo sites (and a few apply shapes) only appear after an apply: move
    // once per (kind, variant) and check every undo site of the result, plus
    // any site of a kind not met so far, whose result is explored in turn.
    let small: Vec<_> = count_targets.iter().filter(|(_, c)| c.target().size() <= 6).collect();
    let mut queue = Vec::new();
    for (dn, d) in common::diagrams() {
        let mut applied = BTreeSet::new();
        for s in enumerate_sites(&d) {
            if s.direction == Direction::Apply && applied.insert((s.kind, s.variant.clone())) {
                queue.push((format!("{dn} after {s}"), apply_move_detailed(&d, &s).unwrap().diagram));
            }
        }
    }
    while let Some((dn, d)) = queue.pop() {
        let before: Vec<u128> = small.iter().map(|(_, c)| count_colorings(&d, c.target(), opts()).unwrap()).collect();
        for site in enumerate_sites(&d) {
            let new_kind = kinds.insert((site.kind, site.variant.clone(), site.direction));
            if site.direction != Direction::Undo && !new_kind {
                continue;
            }
            let a = common::Applied::new(&d, site);
            for ((tn, c), b) in small.iter().zip(&before) {
                let after = count_colorings(&a.out.diagram, c.target(), opts()).unwrap();
                assert_eq!(*b, after, "{dn}: {}: {tn} count {b} -> {after}", a.site);
            }
            let label = format!("{dn}: {}", a.site);
            a.check(Target::Mcb(&lift), true, &label);
            a.check(Target::Mcq(&lift_q), true, &label);
            a.check(Target::Flows(&s3), true, &label);
            sites += 1;
            if new_kind {
                queue.push((format!("{label} then"), a.out.diagram.clone()));
            }
        }
    }
    for kind in MoveKind::ALL {
        // R3 and R6 are their own inverses and are listed as `apply` only.
        let dirs: &[Direction] =
            if matches!(kind, MoveKind::R3 | MoveKind::R6) { &[Direction::Apply] } else { &[Direction::Apply, Direction::Undo] };
        for &dir in dirs {
            assert!(kinds.iter().any(|(k, _, d)| *k == kind && *d == dir), "no site exercised {kind} {dir:?}");
        }
    }
    format!("{sites} sites ({} move/variant/direction kinds), {} targets", kinds.len(), count_targets.len())
}

fn criterion_7() -> String {
    let mut diagrams = common::diagrams();
    diagrams.extend(correspondence_diagrams().into_iter().filter(|(n, _)| n.contains('+')));
    let mut brute = 0;
    for (cn, c) in common::colorers() {
        for (dn, d) in &diagrams {
            let t = c.target();
            if let Some(expected) = brute_force_count(d, t, &|_, _| true, 1_000_000) {
                assert_eq!(count_colorings(d, t, opts()).unwrap(), expected, "{cn} on {dn}");
                brute += 1;
            }
        }
    }
    let mut linear = 0;
    for (fname, f) in common::biquandle_families().into_iter().filter(|(_, f)| f.alexander().is_some()) {
        let fq = f.qg_map();
        for (dn, d) in &diagrams {
            for flow in enumerate_flows(d, f.group(), opts()).unwrap() {
                for family in [Family::B(&f), Family::Q(&fq)] {
                    let lin = linear_colorings(d, family, &flow).unwrap().count;
                    let bt = colorings_by_flow(d, family, &flow, false, opts()).unwrap().count;
                    assert_eq!(lin, bt, "{fname} on {dn}, flow {flow:?}");
                    linear += 1;
                }
            }
        }
    }
    format!("{brute} instances against brute force, {linear} against the linear path")
}

fn criterion_8() -> String {
    let mut pairs = 0;
    for (xn, x) in distinct_mcbs() {
        for (dn, d) in common::diagrams().into_iter().chain(correspondence_diagrams()) {
            let rm = d.reverse_mirror();
            let t = Target::Mcb(&x);
            let list = list_colorings(&d, t, opts()).unwrap();
            for c in &list {
                assert!(is_valid_coloring(&rm, t, c), "{xn} on {dn}: {c:?} is not a coloring of -D^h");
            }
            // The identity is injective, so equal counts make it onto.
            assert_eq!(list.len() as u128, count_colorings(&rm, t, opts()).unwrap(), "{xn} on {dn}");
            pairs += 1;
        }
    }
    format!("{pairs} (MCB, diagram) pairs")
}

fn criterion_9() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let structures = common::structures();
    for (name, s) in &structures {
        assert!(s.check(CheckMode::Full).ok(), "{name} is not valid to begin with");
        for i in 0..100 {
            let (m, what) = common::mutate(s, &mut rng);
            let report = m.check(CheckMode::FirstViolation);
            let v = report.first().unwrap_or_else(|| panic!("{name}: mutation {i} {what:?} accepted"));
            assert!(common::replays(&m, v), "{name}: witness {v} does not replay");
        }
    }
    format!("{} structures x 100 mutations", structures.len())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> String); 9] = [
        ("Q(X) of every corpus MCB is an MCQ", criterion_1),
        ("Q_G well-defined and compatible", criterion_2),
        ("|Col_X(D)| = |Col_Q(X)(D)|, per flow too", criterion_3),
        ("GF(9) family: equal module dimensions per flow", criterion_4),
        ("type arithmetic", criterion_5),
        ("move invariance and transport round trips", criterion_6),
        ("backtracking = brute force = linear path", criterion_7),
        ("C -> C is a bijection onto Col_X(-D^h)", criterion_8),
        ("single-entry mutations are rejected with witnesses", criterion_9),
    ];
    let quiet = std::env::args().any(|a| a == "--list");
    if quiet {
        return ExitCode::SUCCESS;
    }
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {title} ({detail}; {secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {}: FAIL  {title}: {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
