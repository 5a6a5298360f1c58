//! Corpus loaders and structure mutation shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::Rng;

use mcq_core::axioms::{replay, Violation};
use mcq_core::coloring::{count_colorings, list_colorings, transport_coloring, EngineOptions, Target};
use mcq_core::diagram::{Diagram, Record};
use mcq_core::family::{gfamily_alexander_b, GFamilyB};
use mcq_core::formats::{parse_structure_file, Structure};
use mcq_core::group::FiniteGroup;
use mcq_core::mcq::{q_functor_mcb, Blocks, Mcb, Mcq};
use mcq_core::moves::{apply_move_detailed, MoveOutcome, MoveSite};
use mcq_core::quandle::{Biquandle, Quandle, Table};
use mcq_core::ring::FiniteRing;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn sorted_files(sub: &str, ext: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .collect();
    files.sort();
    files
}

fn stem(p: &std::path::Path) -> String {
    p.file_stem().unwrap().to_string_lossy().into_owned()
}

pub fn diagram(name: &str) -> Diagram {
    let text = std::fs::read_to_string(corpus_dir().join("diagrams").join(format!("{name}.dgm"))).unwrap();
    Diagram::parse(&text).unwrap()
}

/// Every corpus diagram, by file stem.
pub fn diagrams() -> Vec<(String, Diagram)> {
    sorted_files("diagrams", "dgm")
        .into_iter()
        .map(|p| (stem(&p), Diagram::parse(&std::fs::read_to_string(&p).unwrap()).unwrap()))
        .collect()
}

/// Closed corpus diagrams (no braid boundary).
pub fn closed_diagrams() -> Vec<(String, Diagram)> {
    diagrams().into_iter().filter(|(_, d)| !d.is_open()).collect()
}

pub fn structure(name: &str) -> Structure {
    parse_structure_file(&corpus_dir().join("structures").join(format!("{name}.alg"))).unwrap()
}

/// Every corpus structure, by file stem.
pub fn structures() -> Vec<(String, Structure)> {
    sorted_files("structures", "alg").into_iter().map(|p| (stem(&p), parse_structure_file(&p).unwrap())).collect()
}

/// Corpus MCB files and the associated MCBs of corpus biquandle families.
pub fn mcbs() -> Vec<(String, Mcb)> {
    structures()
        .into_iter()
        .filter_map(|(name, s)| match s {
            Structure::Mcb(x) => Some((name, x)),
            Structure::FamilyB(f) => Some((format!("{name}/associated"), f.associated_mcb())),
            _ => None,
        })
        .collect()
}

/// Corpus G-families of biquandles.
pub fn biquandle_families() -> Vec<(String, GFamilyB)> {
    structures()
        .into_iter()
        .filter_map(|(name, s)| match s {
            Structure::FamilyB(f) => Some((name, f)),
            _ => None,
        })
        .collect()
}

pub fn gf9() -> FiniteRing {
    FiniteRing::new(3, &[2, 1, 1]).unwrap()
}

/// The Z_8-family over GF(9) with t = x, s = x + 1.
pub fn gf9_family() -> GFamilyB {
    let r = gf9();
    gfamily_alexander_b(&r, 8, &r.x(), &r.parse_element("1+x").unwrap()).unwrap()
}

/// A single-entry mutation: which table, which entry, old and new value.
#[derive(Debug, Clone)]
pub struct Mutation {
    pub table: String,
    pub a: usize,
    pub b: usize,
    pub old: usize,
    pub new: usize,
}

fn changed(t: &Table, a: usize, b: usize, v: usize) -> Table {
    let mut t = t.clone();
    t.set(a, b, v);
    t
}

/// Overwrites one random operation-table entry with a different value.
/// Block group tables are left alone; families mutate one of their `g` tables.
pub fn mutate(s: &Structure, rng: &mut impl Rng) -> (Structure, Mutation) {
    let pick = |rng: &mut dyn rand::RngCore, n: usize, cur: &dyn Fn(usize, usize) -> usize| {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let old = cur(a, b);
        let new = (old + rng.gen_range(1..n)) % n;
        (a, b, old, new)
    };
    match s {
        Structure::Quandle(q) => {
            let (a, b, old, new) = pick(rng, q.n(), &|a, b| q.op(a, b));
            (Structure::Quandle(Quandle::new(changed(q.table(), a, b, new))), Mutation { table: "*".into(), a, b, old, new })
        }
        Structure::Biquandle(x) => {
            let over = rng.gen_bool(0.5);
            let (a, b, old, new) = pick(rng, x.n(), &|a, b| if over { x.over(a, b) } else { x.under(a, b) });
            let (u, o) = if over {
                (x.under_table().clone(), changed(x.over_table(), a, b, new))
            } else {
                (changed(x.under_table(), a, b, new), x.over_table().clone())
            };
            let table = if over { "over" } else { "under" }.to_string();
            (Structure::Biquandle(Biquandle::new(u, o).unwrap()), Mutation { table, a, b, old, new })
        }
        Structure::Group(t) => {
            let (a, b, old, new) = pick(rng, t.n(), &|a, b| t.get(a, b));
            (Structure::Group(changed(t, a, b, new)), Mutation { table: "group".into(), a, b, old, new })
        }
        Structure::Mcq(q) => {
            let (a, b, old, new) = pick(rng, q.n(), &|a, b| q.star(a, b));
            (Structure::Mcq(q.with_star_entry(a, b, new)), Mutation { table: "star".into(), a, b, old, new })
        }
        Structure::Mcb(x) => {
            let over = rng.gen_bool(0.5);
            let (a, b, old, new) = pick(rng, x.n(), &|a, b| if over { x.over(a, b) } else { x.under(a, b) });
            let table = if over { "over" } else { "under" }.to_string();
            (Structure::Mcb(x.with_entry(over, a, b, new)), Mutation { table, a, b, old, new })
        }
        Structure::FamilyQ(f) => {
            let g = rng.gen_range(0..f.group().order());
            let (a, b, old, new) = pick(rng, f.n(), &|a, b| f.op(g, a, b));
            (Structure::FamilyQ(f.with_entry(g, a, b, new)), Mutation { table: format!("*^{g}"), a, b, old, new })
        }
        Structure::FamilyB(f) => {
            let g = rng.gen_range(0..f.group().order());
            let over = rng.gen_bool(0.5);
            let (a, b, old, new) = pick(rng, f.n(), &|a, b| if over { f.over(g, a, b) } else { f.under(g, a, b) });
            let table = format!("{}^{g}", if over { "over" } else { "under" });
            (Structure::FamilyB(f.with_entry(over, g, a, b, new)), Mutation { table, a, b, old, new })
        }
    }
}

/// Whether a reported witness really violates its law in `s`.
pub fn replays(s: &Structure, v: &Violation) -> bool {
    match s {
        Structure::Quandle(q) => replay(&q.laws(), v),
        Structure::Biquandle(b) => replay(&b.laws(), v),
        Structure::Group(t) => replay(&FiniteGroup::laws_for(t), v),
        Structure::Mcq(q) => replay(&q.laws(), v),
        Structure::Mcb(b) => replay(&b.laws(), v),
        Structure::FamilyQ(f) => replay(&f.laws(), v),
        Structure::FamilyB(f) => replay(&f.laws(), v),
    }
}

fn head(rec: &Record) -> String {
    match rec {
        Record::Crossing(c) => format!("x{}", c.sign.symbol()),
        Record::Vertex(v) => v.kind.name().to_string(),
    }
}

/// Every id bijection `σ` with `σ(a) = b` (records as a multiset, boundary
/// lists in order), up to `limit` of them; candidates agreeing with the
/// identity are tried first.
pub fn isomorphisms(a: &Diagram, b: &Diagram, limit: usize) -> Vec<BTreeMap<String, String>> {
    let mut out = Vec::new();
    if a.records().len() != b.records().len()
        || a.loops().len() != b.loops().len()
        || a.top().len() != b.top().len()
        || a.bottom().len() != b.bottom().len()
    {
        return out;
    }
    let mut map = BTreeMap::new();
    let mut back = BTreeMap::new();
    let pairs = a.top().iter().zip(b.top()).chain(a.bottom().iter().zip(b.bottom()));
    for (x, y) in pairs {
        if !bind(&mut map, &mut back, x, y) {
            return out;
        }
    }
    let mut used = vec![false; b.records().len()];
    records_search(a, b, 0, &mut used, &mut map, &mut back, &mut out, limit);
    out
}

fn bind(map: &mut BTreeMap<String, String>, back: &mut BTreeMap<String, String>, x: &str, y: &str) -> bool {
    match (map.get(x), back.get(y)) {
        (Some(m), _) => m == y,
        (None, Some(_)) => false,
        (None, None) => {
            map.insert(x.to_string(), y.to_string());
            back.insert(y.to_string(), x.to_string());
            true
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn records_search(
    a: &Diagram,
    b: &Diagram,
    k: usize,
    used: &mut [bool],
    map: &mut BTreeMap<String, String>,
    back: &mut BTreeMap<String, String>,
    out: &mut Vec<BTreeMap<String, String>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if k == a.records().len() {
        // Loops are interchangeable; keep shared names fixed where possible.
        let (mut la, mut lb): (Vec<&String>, Vec<&String>) = (a.loops().iter().collect(), b.loops().iter().collect());
        la.sort_by_key(|l| !b.loops().contains(*l));
        lb.sort_by_key(|l| !a.loops().contains(*l));
        let mut full = map.clone();
        for (x, y) in la.into_iter().zip(lb) {
            full.insert(x.clone(), y.clone());
        }
        out.push(full);
        return;
    }
    let ra = &a.records()[k];
    let sa: Vec<&str> = ra.slots().iter().map(|s| s.0).collect();
    let mut order: Vec<usize> = (0..b.records().len()).filter(|&j| !used[j] && head(&b.records()[j]) == head(ra)).collect();
    order.sort_by_key(|&j| {
        let sb = b.records()[j].slots();
        std::cmp::Reverse(sa.iter().zip(&sb).filter(|(x, y)| **x == y.0).count())
    });
    for j in order {
        let (m0, b0) = (map.clone(), back.clone());
        let sb: Vec<String> = b.records()[j].slots().iter().map(|s| s.0.to_string()).collect();
        if sa.iter().zip(&sb).all(|(x, y)| bind(map, back, x, y)) {
            used[j] = true;
            records_search(a, b, k + 1, used, map, back, out, limit);
            used[j] = false;
        }
        *map = m0;
        *back = b0;
        if out.len() >= limit {
            return;
        }
    }
}

/// An owned coloring target.
pub enum Colorer {
    Mcq(Mcq),
    Mcb(Mcb),
    Flows(FiniteGroup),
}

impl Colorer {
    pub fn target(&self) -> Target<'_> {
        match self {
            Colorer::Mcq(q) => Target::Mcq(q),
            Colorer::Mcb(x) => Target::Mcb(x),
            Colorer::Flows(g) => Target::Flows(g),
        }
    }
}

/// Every corpus structure as something diagrams can be colored by:
/// quandles and biquandles as single-element-block MCQs/MCBs, families by
/// their associated structures, MCBs also through `Q`.
pub fn colorers() -> Vec<(String, Colorer)> {
    let trivial = FiniteGroup::trivial();
    let mut out = Vec::new();
    for (name, s) in structures() {
        match s {
            Structure::Quandle(q) => out.push((
                name,
                Colorer::Mcq(Mcq::new(Blocks::product(q.n(), &trivial), q.table().clone()).unwrap()),
            )),
            Structure::Biquandle(b) => out.push((
                name,
                Colorer::Mcb(
                    Mcb::new(Blocks::product(b.n(), &trivial), b.under_table().clone(), b.over_table().clone())
                        .unwrap(),
                ),
            )),
            Structure::Group(t) => out.push((name, Colorer::Flows(FiniteGroup::new(t).unwrap()))),
            Structure::Mcq(q) => out.push((name, Colorer::Mcq(q))),
            Structure::Mcb(x) => {
                out.push((format!("Q({name})"), Colorer::Mcq(q_functor_mcb(&x).unwrap())));
                out.push((name, Colorer::Mcb(x)));
            }
            Structure::FamilyQ(f) => out.push((format!("{name}/associated"), Colorer::Mcq(f.associated_mcq()))),
            Structure::FamilyB(f) => out.push((format!("{name}/associated"), Colorer::Mcb(f.associated_mcb()))),
        }
    }
    for (name, g) in [("Z2", FiniteGroup::cyclic(2)), ("Z3", FiniteGroup::cyclic(3)), ("S3", FiniteGroup::symmetric(3))] {
        out.push((format!("{name} flows"), Colorer::Flows(g)));
    }
    out
}

/// A move applied at one site, with the isomorphisms from the diagram
/// reached by the inverse move back to the original.
pub struct Applied<'a> {
    pub d: &'a Diagram,
    pub site: MoveSite,
    pub out: MoveOutcome,
    pub isos: Vec<BTreeMap<String, String>>,
}

impl<'a> Applied<'a> {
    pub fn new(d: &'a Diagram, site: MoveSite) -> Self {
        let out = apply_move_detailed(d, &site).unwrap();
        let back = apply_move_detailed(&out.diagram, &out.inverse).unwrap().diagram;
        let isos = isomorphisms(&back, d, 64);
        assert!(!isos.is_empty(), "{site}: inverse move does not return to the diagram");
        Applied { d, site, out, isos }
    }

    /// Transports colorings across the site and back; checks that images are
    /// distinct and that the round trip returns each coloring up to the
    /// diagram isomorphism. With `exhaustive`, all colorings are transported
    /// and the images must exhaust the colorings of the moved diagram;
    /// otherwise an evenly spread sample of at most `SAMPLE` is used.
    pub fn check(&self, target: Target<'_>, exhaustive: bool, label: &str) {
        const SAMPLE: usize = 12;
        let o = EngineOptions::default();
        let colorings = list_colorings(self.d, target, o).unwrap();
        let step = if exhaustive { 1 } else { colorings.len().div_ceil(SAMPLE).max(1) };
        let mut images = BTreeSet::new();
        let mut sent = 0;
        for c in colorings.iter().step_by(step) {
            let (d2, c2) = transport_coloring(self.d, &self.site, c, target, o).unwrap_or_else(|e| panic!("{label}: {e}"));
            assert_eq!(d2, self.out.diagram);
            let (_, c3) = transport_coloring(&d2, &self.out.inverse, &c2, target, o)
                .unwrap_or_else(|e| panic!("{label}: back: {e}"));
            assert!(
                self.isos.iter().any(|sigma| c3.iter().all(|(s, v)| c[&sigma[s]] == *v)),
                "{label}: round trip changed coloring {c:?}"
            );
            images.insert(c2);
            sent += 1;
        }
        assert_eq!(images.len(), sent, "{label}: transport is not injective");
        if exhaustive {
            let expected = count_colorings(&self.out.diagram, target, o).unwrap();
            assert_eq!(images.len() as u128, expected, "{label}: transport is not onto");
        }
    }
}
