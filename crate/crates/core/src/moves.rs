//! Reidemeister-type moves R1–R6 for diagrams of Y-oriented trivalent graphs.
//!
//! Every move is a local rewrite identified by a [`MoveSite`]: a move id, a
//! direction, an ordered tuple of semi-arc ids and a variant tag. Fresh
//! semi-arcs are named `R<n>_<k>` (e.g. `R2_1`) with the least unused
//! `k ≥ 1`, allocated in the order listed below.
//!
//! | move | apply site / variant | effect |
//! |------|----------------------|--------|
//! | R1a / R1b | `[s]`, `+`/`-` | curl on `s` (R1a: over-pass first, R1b: under-pass first); fresh: loop piece `m`, continuation `n` |
//! | R1a / R1b undo | `[m]` (the loop piece) | removes the curl |
//! | R2a / R2b | `[p, q]`, `+-`/`-+` | pushes `q` under `p`, parallel (a) or antiparallel (b); the tag gives the signs met along `p`; fresh `p1, p2, q1, q2` |
//! | R2a / R2b undo | `[p1, q1]` (the middle pieces) | removes the bigon |
//! | R3 | `[t, m, b]` (middle pieces of the top, middle, bottom strand) | reverses the crossing order on all three strands; signs kept |
//! | R4a / R4b | `[e1, e2, e3]`, `merge`/`split` | twists the two edges on the `e1`/`e2` side of a vertex with a positive (a) or negative (b) crossing |
//! | R4a / R4b undo | `[e1, e2, e3]` of the twisted vertex | removes the twist |
//! | R5a / R5b | `[c]`, the `e3` edge between a vertex and a crossing | slides the crossing strand past the vertex, over (a) or under (b) the vertex; one crossing becomes two |
//! | R5a / R5b undo | `[e1, e2]` of the vertex | two crossings become one |
//! | R6 | `[m]`, an edge between two vertices; `x-left`/`x-right` for a merge followed by a split | IH-move; `undo` performs the same rewrite |
//!
//! Local pictures for each variant are in the README.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diagram::{Crossing, Diagram, DiagramError, End, Record, Sign, Vertex, VertexKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("{kind}: site does not match: {message}")]
    SiteMismatch { kind: MoveKind, message: String },
    #[error("unknown move `{0}`")]
    UnknownMove(String),
    #[error("{kind}: bad variant tag `{tag}`")]
    BadVariant { kind: MoveKind, tag: String },
    #[error("rewrite produced an invalid diagram: {0}")]
    Invalid(#[from] DiagramError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    R1a,
    R1b,
    R2a,
    R2b,
    R3,
    R4a,
    R4b,
    R5a,
    R5b,
    R6,
}

impl MoveKind {
    pub const ALL: [MoveKind; 10] = [
        MoveKind::R1a,
        MoveKind::R1b,
        MoveKind::R2a,
        MoveKind::R2b,
        MoveKind::R3,
        MoveKind::R4a,
        MoveKind::R4b,
        MoveKind::R5a,
        MoveKind::R5b,
        MoveKind::R6,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MoveKind::R1a => "R1a",
            MoveKind::R1b => "R1b",
            MoveKind::R2a => "R2a",
            MoveKind::R2b => "R2b",
            MoveKind::R3 => "R3",
            MoveKind::R4a => "R4a",
            MoveKind::R4b => "R4b",
            MoveKind::R5a => "R5a",
            MoveKind::R5b => "R5b",
            MoveKind::R6 => "R6",
        }
    }

    /// Prefix of fresh ids (`R1_1`, `R5_2`, ...).
    fn prefix(self) -> &'static str {
        &self.id()[..2]
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MoveKind {
    type Err = MoveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MoveKind::ALL.into_iter().find(|k| k.id() == s).ok_or_else(|| MoveError::UnknownMove(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Apply,
    Undo,
}

impl FromStr for Direction {
    type Err = MoveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "apply" => Ok(Direction::Apply),
            "undo" => Ok(Direction::Undo),
            other => Err(MoveError::UnknownMove(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveSite {
    pub kind: MoveKind,
    pub direction: Direction,
    pub ids: Vec<String>,
    pub variant: String,
}

impl MoveSite {
    pub fn new(kind: MoveKind, direction: Direction, ids: &[&str], variant: &str) -> Self {
        MoveSite { kind, direction, ids: ids.iter().map(|s| s.to_string()).collect(), variant: variant.to_string() }
    }
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = if self.direction == Direction::Apply { "apply" } else { "undo" };
        write!(f, "{} {dir} [{}]", self.kind, self.ids.join(","))?;
        if !self.variant.is_empty() {
            write!(f, " {}", self.variant)?;
        }
        Ok(())
    }
}

/// Result of a rewrite with the data needed to transport colorings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveOutcome {
    pub diagram: Diagram,
    /// Semi-arcs of the new diagram whose colors are determined by the move
    /// (solved for during transport).
    pub interior: BTreeSet<String>,
    /// Fresh semi-arcs of the new diagram that extend outside the site and
    /// keep the color of the named old semi-arc.
    pub inherit: BTreeMap<String, String>,
    /// A site of the new diagram whose rewrite returns to the old diagram
    /// (up to renaming of fresh ids).
    pub inverse: MoveSite,
}

/// Applies a move and returns the rewritten diagram.
pub fn apply_move(d: &Diagram, site: &MoveSite) -> Result<Diagram, MoveError> {
    apply_move_detailed(d, site).map(|o| o.diagram)
}

/// Applies a move, returning the transport data as well.
pub fn apply_move_detailed(d: &Diagram, site: &MoveSite) -> Result<MoveOutcome, MoveError> {
    let mut w = Work::new(d, site.kind);
    let expect = |n: usize| {
        if site.ids.len() == n {
            Ok(())
        } else {
            Err(w.mismatch(format!("expected {n} site ids, got {}", site.ids.len())))
        }
    };
    for id in &site.ids {
        if !w.ids.contains(id) {
            return Err(w.mismatch(format!("unknown semi-arc {id}")));
        }
    }
    let ids = &site.ids;
    let (inverse, interior) = match (site.kind, site.direction) {
        (MoveKind::R1a | MoveKind::R1b, Direction::Apply) => {
            expect(1)?;
            w.r1_apply(&ids[0], &site.variant)?
        }
        (MoveKind::R1a | MoveKind::R1b, Direction::Undo) => {
            expect(1)?;
            w.r1_undo(&ids[0], &site.variant)?
        }
        (MoveKind::R2a | MoveKind::R2b, Direction::Apply) => {
            expect(2)?;
            w.r2_apply(&ids[0], &ids[1], &site.variant)?
        }
        (MoveKind::R2a | MoveKind::R2b, Direction::Undo) => {
            expect(2)?;
            w.r2_undo(&ids[0], &ids[1], &site.variant)?
        }
        (MoveKind::R3, _) => {
            expect(3)?;
            w.r3(&ids[0], &ids[1], &ids[2])?
        }
        (MoveKind::R4a | MoveKind::R4b, dir) => {
            expect(3)?;
            w.r4(dir, [&ids[0], &ids[1], &ids[2]], &site.variant)?
        }
        (MoveKind::R5a | MoveKind::R5b, Direction::Apply) => {
            expect(1)?;
            w.r5_apply(&ids[0])?
        }
        (MoveKind::R5a | MoveKind::R5b, Direction::Undo) => {
            expect(2)?;
            w.r5_undo(&ids[0], &ids[1])?
        }
        (MoveKind::R6, _) => {
            expect(1)?;
            w.r6(&ids[0], &site.variant)?
        }
    };
    w.finish(d, inverse, interior)
}

/// All sites of `d` at which some move variant applies, in a deterministic
/// order. R3 and R6 are listed with direction `apply` only.
pub fn enumerate_sites(d: &Diagram) -> Vec<MoveSite> {
    let ids: Vec<String> = d.semiarcs().into_iter().collect();
    let mut candidates = Vec::new();
    let push = |c: &mut Vec<MoveSite>, kind, dir, ids: Vec<String>, variant: &str| {
        c.push(MoveSite { kind, direction: dir, ids, variant: variant.to_string() })
    };
    for kind in [MoveKind::R1a, MoveKind::R1b] {
        for s in &ids {
            for v in ["+", "-"] {
                push(&mut candidates, kind, Direction::Apply, vec![s.clone()], v);
            }
            push(&mut candidates, kind, Direction::Undo, vec![s.clone()], "");
        }
    }
    for kind in [MoveKind::R2a, MoveKind::R2b] {
        for p in &ids {
            for q in &ids {
                if p != q {
                    for v in ["+-", "-+"] {
                        push(&mut candidates, kind, Direction::Apply, vec![p.clone(), q.clone()], v);
                    }
                }
            }
        }
        for c in d.crossings() {
            for q in [&c.under_in, &c.under_out] {
                push(&mut candidates, kind, Direction::Undo, vec![c.over_out.clone(), q.clone()], "");
            }
        }
    }
    let crossings: Vec<&Crossing> = d.crossings().collect();
    for x in &crossings {
        let t = &x.over_out;
        for y in &crossings {
            for m in [&x.under_in, &x.under_out, &y.under_in, &y.under_out] {
                for z in &crossings {
                    for b in [&z.under_in, &z.under_out] {
                        push(&mut candidates, MoveKind::R3, Direction::Apply, vec![t.clone(), m.clone(), b.clone()], "");
                    }
                }
            }
        }
    }
    for v in d.vertices() {
        let triple = vec![v.e1.clone(), v.e2.clone(), v.e3.clone()];
        for kind in [MoveKind::R4a, MoveKind::R4b] {
            for dir in [Direction::Apply, Direction::Undo] {
                push(&mut candidates, kind, dir, triple.clone(), v.kind.name());
            }
        }
        for kind in [MoveKind::R5a, MoveKind::R5b] {
            push(&mut candidates, kind, Direction::Apply, vec![v.e3.clone()], "");
            push(&mut candidates, kind, Direction::Undo, vec![v.e1.clone(), v.e2.clone()], "");
        }
        for m in [&v.e1, &v.e2, &v.e3] {
            for variant in ["", "x-left", "x-right"] {
                push(&mut candidates, MoveKind::R6, Direction::Apply, vec![m.clone()], variant);
            }
        }
    }
    let mut seen = BTreeSet::new();
    candidates
        .into_iter()
        .filter(|s| seen.insert(s.clone()))
        .filter(|s| apply_move_detailed(d, s).is_ok())
        .collect()
}

type Step = (MoveSite, BTreeSet<String>);

/// Mutable working copy used by the rewrites.
struct Work {
    kind: MoveKind,
    records: Vec<Option<Record>>,
    loops: BTreeSet<String>,
    top: Vec<String>,
    bottom: Vec<String>,
    ids: BTreeSet<String>,
    used: BTreeSet<String>,
    inherit: BTreeMap<String, String>,
}

/// Slot positions inside a crossing record.
const OI: usize = 0;
const OO: usize = 1;
const UI: usize = 2;
const UO: usize = 3;

impl Work {
    fn new(d: &Diagram, kind: MoveKind) -> Self {
        let ids = d.semiarcs();
        Work {
            kind,
            records: d.records().iter().cloned().map(Some).collect(),
            loops: d.loops().clone(),
            top: d.top().to_vec(),
            bottom: d.bottom().to_vec(),
            used: ids.clone(),
            ids,
            inherit: BTreeMap::new(),
        }
    }

    fn mismatch(&self, message: impl Into<String>) -> MoveError {
        MoveError::SiteMismatch { kind: self.kind, message: message.into() }
    }

    fn bad_variant(&self, tag: &str) -> MoveError {
        MoveError::BadVariant { kind: self.kind, tag: tag.to_string() }
    }

    fn fresh(&mut self) -> String {
        let prefix = self.kind.prefix();
        let id = (1..).map(|k| format!("{prefix}_{k}")).find(|c| !self.used.contains(c)).unwrap();
        self.used.insert(id.clone());
        id
    }

    fn site(&self, direction: Direction, ids: &[&String], variant: &str) -> MoveSite {
        MoveSite {
            kind: self.kind,
            direction,
            ids: ids.iter().map(|s| s.to_string()).collect(),
            variant: variant.to_string(),
        }
    }

    fn slot_of(&self, id: &str, end: End) -> Option<(usize, usize)> {
        self.records.iter().enumerate().find_map(|(ri, r)| {
            let r = r.as_ref()?;
            r.slots().into_iter().position(|(s, e)| s == id && e == end).map(|k| (ri, k))
        })
    }

    fn get(&self, ri: usize, k: usize) -> String {
        self.records[ri].as_ref().unwrap().slots()[k].0.to_string()
    }

    fn set(&mut self, ri: usize, k: usize, id: &str) {
        *self.records[ri].as_mut().unwrap().slot_mut(k) = id.to_string();
    }

    fn crossing(&self, ri: usize) -> Option<&Crossing> {
        match self.records[ri].as_ref()? {
            Record::Crossing(c) => Some(c),
            Record::Vertex(_) => None,
        }
    }

    fn vertex(&self, ri: usize) -> Option<&Vertex> {
        match self.records[ri].as_ref()? {
            Record::Vertex(v) => Some(v),
            Record::Crossing(_) => None,
        }
    }

    fn push(&mut self, r: Record) {
        self.records.push(Some(r));
    }

    fn replace(&mut self, ri: usize, r: Record) {
        self.records[ri] = Some(r);
    }

    fn remove(&mut self, ri: usize) -> Record {
        self.records[ri].take().unwrap()
    }

    /// Inserts `k` points along `s`, returning the `k + 1` pieces in order.
    /// The first piece keeps the name `s`; for a loop the last one does too.
    fn cut(&mut self, s: &str, k: usize) -> Vec<String> {
        let mut pieces = vec![s.to_string()];
        for _ in 0..k {
            pieces.push(self.fresh());
        }
        if self.loops.remove(s) {
            pieces[k] = s.to_string();
            return pieces;
        }
        let last = pieces[k].clone();
        if let Some((ri, slot)) = self.slot_of(s, End::Finish) {
            self.set(ri, slot, &last);
        } else if self.slot_of(s, End::Start).is_some() || !self.bottom.iter().any(|b| b == s) {
            // s ends at the boundary; its end is whichever incidence remains
            let list = if self.bottom.iter().any(|b| b == s) { &mut self.bottom } else { &mut self.top };
            let pos = list.iter().position(|b| b == s).unwrap();
            list[pos] = last.clone();
        } else {
            // straight boundary strand: oriented from top to bottom
            let pos = self.bottom.iter().position(|b| b == s).unwrap();
            self.bottom[pos] = last.clone();
        }
        self.inherit.insert(last, s.to_string());
        pieces
    }

    /// Identifies semi-arcs after removing records: each pair `(a, b)` joins
    /// `a` and `b` into one semi-arc named after the first id of its class.
    fn glue(&mut self, pairs: &[(String, String)]) {
        let mut rep: BTreeMap<String, String> = BTreeMap::new();
        fn find(rep: &BTreeMap<String, String>, x: &str) -> String {
            let mut x = x.to_string();
            while let Some(p) = rep.get(&x) {
                if *p == x {
                    break;
                }
                x = p.clone();
            }
            x
        }
        for (a, b) in pairs {
            let (ra, rb) = (find(&rep, a), find(&rep, b));
            if ra != rb {
                rep.insert(rb, ra);
            }
        }
        let rename: BTreeMap<String, String> =
            rep.keys().map(|k| (k.clone(), find(&rep, k))).filter(|(k, r)| k != r).collect();
        for r in self.records.iter_mut().flatten() {
            for k in 0..r.slots().len() {
                let slot = r.slot_mut(k);
                if let Some(n) = rename.get(slot) {
                    *slot = n.clone();
                }
            }
        }
        for list in [&mut self.top, &mut self.bottom] {
            for s in list.iter_mut() {
                if let Some(n) = rename.get(s) {
                    *s = n.clone();
                }
            }
        }
        let roots: BTreeSet<String> = pairs.iter().map(|(a, _)| find(&rep, a)).collect();
        for r in roots {
            let used = self.records.iter().flatten().any(|rec| rec.slots().iter().any(|(s, _)| *s == r))
                || self.top.contains(&r)
                || self.bottom.contains(&r);
            if !used {
                self.loops.insert(r);
            }
        }
    }

    fn finish(self, old: &Diagram, inverse: MoveSite, extra_interior: BTreeSet<String>) -> Result<MoveOutcome, MoveError> {
        let records = self.records.into_iter().flatten().collect();
        let diagram = Diagram::from_parts_unchecked(records, self.loops, self.top, self.bottom).revalidate()?;
        let new_ids = diagram.semiarcs();
        let old_ids = old.semiarcs();
        let inherit: BTreeMap<String, String> =
            self.inherit.into_iter().filter(|(n, _)| new_ids.contains(n) && !old_ids.contains(n)).collect();
        let mut interior: BTreeSet<String> =
            new_ids.iter().filter(|s| !old_ids.contains(*s) && !inherit.contains_key(*s)).cloned().collect();
        interior.extend(extra_interior);
        Ok(MoveOutcome { diagram, interior, inherit, inverse })
    }

    fn sign_tag(&self, tag: &str) -> Result<Sign, MoveError> {
        match tag {
            "+" => Ok(Sign::Positive),
            "-" => Ok(Sign::Negative),
            other => Err(self.bad_variant(other)),
        }
    }

    fn r1_apply(&mut self, s: &str, tag: &str) -> Result<Step, MoveError> {
        let sign = self.sign_tag(tag)?;
        let p = self.cut(s, 2);
        let (s, m, n) = (p[0].clone(), p[1].clone(), p[2].clone());
        let c = if self.kind == MoveKind::R1a {
            Crossing { sign, over_in: s, over_out: m.clone(), under_in: m.clone(), under_out: n }
        } else {
            Crossing { sign, over_in: m.clone(), over_out: n, under_in: s, under_out: m.clone() }
        };
        self.push(Record::Crossing(c));
        Ok((self.site(Direction::Undo, &[&m], tag), BTreeSet::new()))
    }

    fn r1_undo(&mut self, m: &str, tag: &str) -> Result<Step, MoveError> {
        let ri = self.slot_of(m, End::Start).map(|(ri, _)| ri);
        let c = ri.and_then(|ri| self.crossing(ri)).cloned();
        let Some(c) = c else { return Err(self.mismatch(format!("{m} does not start at a crossing"))) };
        let (s, n) = match self.kind {
            MoveKind::R1a if c.over_out == m && c.under_in == m => (c.over_in.clone(), c.under_out.clone()),
            MoveKind::R1b if c.under_out == m && c.over_in == m => (c.under_in.clone(), c.over_out.clone()),
            _ => return Err(self.mismatch(format!("{m} is not the loop of a curl"))),
        };
        if !tag.is_empty() && self.sign_tag(tag)? != c.sign {
            return Err(self.mismatch("curl has the other sign"));
        }
        self.remove(ri.unwrap());
        self.glue(&[(s.clone(), n)]);
        let tag = c.sign.symbol().to_string();
        Ok((self.site(Direction::Apply, &[&s], &tag), BTreeSet::new()))
    }

    fn r2_apply(&mut self, p: &str, q: &str, tag: &str) -> Result<Step, MoveError> {
        let first = match tag {
            "+-" => Sign::Positive,
            "-+" => Sign::Negative,
            other => return Err(self.bad_variant(other)),
        };
        if p == q {
            return Err(self.mismatch("the two strands must be different semi-arcs"));
        }
        let pp = self.cut(p, 2);
        let qq = self.cut(q, 2);
        let x = |sign, oi: &String, oo: &String, ui: &String, uo: &String| {
            Record::Crossing(Crossing {
                sign,
                over_in: oi.clone(),
                over_out: oo.clone(),
                under_in: ui.clone(),
                under_out: uo.clone(),
            })
        };
        if self.kind == MoveKind::R2a {
            self.push(x(first, &pp[0], &pp[1], &qq[0], &qq[1]));
            self.push(x(first.flip(), &pp[1], &pp[2], &qq[1], &qq[2]));
        } else {
            self.push(x(first, &pp[0], &pp[1], &qq[1], &qq[2]));
            self.push(x(first.flip(), &pp[1], &pp[2], &qq[0], &qq[1]));
        }
        Ok((self.site(Direction::Undo, &[&pp[1], &qq[1]], tag), BTreeSet::new()))
    }

    fn r2_undo(&mut self, p1: &str, q1: &str, tag: &str) -> Result<Step, MoveError> {
        let a = self.slot_of(p1, End::Start);
        let b = self.slot_of(p1, End::Finish);
        let (Some((ra, OO)), Some((rb, OI))) = (a, b) else {
            return Err(self.mismatch(format!("{p1} is not an over-strand piece between two crossings")));
        };
        if ra == rb || self.crossing(ra).is_none() || self.crossing(rb).is_none() {
            return Err(self.mismatch(format!("{p1} is not between two distinct crossings")));
        }
        let (ca, cb) = (self.crossing(ra).unwrap().clone(), self.crossing(rb).unwrap().clone());
        let parallel = ca.under_out == q1 && cb.under_in == q1;
        let anti = cb.under_out == q1 && ca.under_in == q1;
        let ok = match self.kind {
            MoveKind::R2a => parallel,
            _ => anti,
        };
        if !ok || ca.sign == cb.sign {
            return Err(self.mismatch(format!("{p1}, {q1} do not bound a bigon of this kind")));
        }
        let found = format!("{}{}", ca.sign.symbol(), cb.sign.symbol());
        if !tag.is_empty() && tag != found {
            return Err(self.mismatch(format!("bigon has signs {found}")));
        }
        let (p, p2) = (ca.over_in.clone(), cb.over_out.clone());
        let (q, q2) = if parallel {
            (ca.under_in.clone(), cb.under_out.clone())
        } else {
            (cb.under_in.clone(), ca.under_out.clone())
        };
        if [&p, &p2].iter().any(|s| **s == q || **s == q2) {
            return Err(self.mismatch(format!("the strands through {p1} and {q1} are joined outside the bigon")));
        }
        self.remove(ra);
        self.remove(rb);
        self.glue(&[(p.clone(), p2), (q.clone(), q2)]);
        Ok((self.site(Direction::Apply, &[&p, &q], &found), BTreeSet::new()))
    }

    fn r3(&mut self, t1: &str, m1: &str, b1: &str) -> Result<Step, MoveError> {
        let mismatch = |w: &Work, what: &str| Err(w.mismatch(format!("[{t1}, {m1}, {b1}]: {what}")));
        let is_x = |w: &Work, ri: usize| w.crossing(ri).is_some();
        let (Some((x, OO)), Some((y, OI))) = (self.slot_of(t1, End::Start), self.slot_of(t1, End::Finish)) else {
            return mismatch(self, "top piece must run over-to-over");
        };
        if x == y || !is_x(self, x) || !is_x(self, y) {
            return mismatch(self, "top piece must join two distinct crossings");
        }
        let (Some((p, kp)), Some((q, kq))) = (self.slot_of(m1, End::Start), self.slot_of(m1, End::Finish)) else {
            return mismatch(self, "middle piece must join two crossings");
        };
        let on_t = |r: usize| r == x || r == y;
        let (tm, mb, mu) = if on_t(p) && kp == UO && !on_t(q) && kq == OI && is_x(self, q) {
            (p, q, 1)
        } else if on_t(q) && kq == UI && !on_t(p) && kp == OO && is_x(self, p) {
            (q, p, -1)
        } else {
            return mismatch(self, "middle piece must run from under the top strand to over the bottom strand");
        };
        let tb = if tm == x { y } else { x };
        let (Some((r, UO)), Some((s, UI))) = (self.slot_of(b1, End::Start), self.slot_of(b1, End::Finish)) else {
            return mismatch(self, "bottom piece must run under-to-under");
        };
        let beta = if r == tb && s == mb {
            1
        } else if r == mb && s == tb {
            -1
        } else {
            return mismatch(self, "bottom piece must join the remaining two crossings");
        };
        let tau = if tm == x { 1 } else { -1 };
        let sign = |w: &Work, ri: usize| w.crossing(ri).unwrap().sign.value();
        let (s_tm, s_tb, s_mb) = (sign(self, tm), sign(self, tb), sign(self, mb));
        if s_tb * s_tm != beta * mu || s_mb * s_tm != beta * tau {
            return mismatch(self, "crossing signs do not fit a triangle");
        }
        let swap = |w: &mut Work, first: (usize, usize, usize), second: (usize, usize, usize)| {
            let (a0, a1, a2) = (w.get(first.0, first.1), w.get(first.0, first.2), w.get(second.0, second.2));
            w.set(first.0, first.1, &a1);
            w.set(first.0, first.2, &a2);
            w.set(second.0, second.1, &a0);
            w.set(second.0, second.2, &a1);
        };
        swap(self, (x, OI, OO), (y, OI, OO));
        let (mf, ms) = if mu == 1 { ((tm, UI, UO), (mb, OI, OO)) } else { ((mb, OI, OO), (tm, UI, UO)) };
        swap(self, mf, ms);
        let (bf, bs) = if beta == 1 { ((tb, UI, UO), (mb, UI, UO)) } else { ((mb, UI, UO), (tb, UI, UO)) };
        swap(self, bf, bs);
        let (t1, m1, b1) = (t1.to_string(), m1.to_string(), b1.to_string());
        let interior = [t1.clone(), m1.clone(), b1.clone()].into_iter().collect();
        Ok((self.site(Direction::Apply, &[&t1, &m1, &b1], ""), interior))
    }

    fn find_vertex(&self, e: [&String; 3], tag: &str) -> Result<(usize, Vertex), MoveError> {
        let want = match tag {
            "merge" => Some(VertexKind::Merge),
            "split" => Some(VertexKind::Split),
            "" => None,
            other => return Err(self.bad_variant(other)),
        };
        self.records
            .iter()
            .enumerate()
            .find_map(|(ri, r)| match r {
                Some(Record::Vertex(v))
                    if v.e1 == *e[0] && v.e2 == *e[1] && v.e3 == *e[2] && want.is_none_or(|k| k == v.kind) =>
                {
                    Some((ri, v.clone()))
                }
                _ => None,
            })
            .ok_or_else(|| self.mismatch(format!("no vertex ({}, {}, {})", e[0], e[1], e[2])))
    }

    fn r4(&mut self, dir: Direction, e: [&String; 3], tag: &str) -> Result<Step, MoveError> {
        let (ri, v) = self.find_vertex(e, tag)?;
        let positive = self.kind == MoveKind::R4a;
        let sign = if positive { Sign::Positive } else { Sign::Negative };
        let kind = v.kind;
        let x = |sign, oi: &String, oo: &String, ui: &String, uo: &String| Crossing {
            sign,
            over_in: oi.clone(),
            over_out: oo.clone(),
            under_in: ui.clone(),
            under_out: uo.clone(),
        };
        if dir == Direction::Apply {
            let (a, b) = (self.fresh(), self.fresh());
            let (nv, c) = match (kind, positive) {
                // merge: p = e1, q = e2 enter the crossing, p' = a, q' = b leave it
                (VertexKind::Merge, true) => ((b.clone(), a.clone()), x(sign, &v.e2, &b, &v.e1, &a)),
                (VertexKind::Merge, false) => ((b.clone(), a.clone()), x(sign, &v.e1, &a, &v.e2, &b)),
                // split: A' = a, B' = b leave the vertex, A = e1, B = e2 leave the crossing
                (VertexKind::Split, true) => ((b.clone(), a.clone()), x(sign, &a, &v.e1, &b, &v.e2)),
                (VertexKind::Split, false) => ((b.clone(), a.clone()), x(sign, &b, &v.e2, &a, &v.e1)),
            };
            let nv = Vertex { kind, e1: nv.0, e2: nv.1, e3: v.e3.clone() };
            let inv = self.site(Direction::Undo, &[&nv.e1, &nv.e2, &nv.e3], kind.name());
            self.replace(ri, Record::Vertex(nv));
            self.push(Record::Crossing(c));
            return Ok((inv, BTreeSet::new()));
        }
        let (slot_end, edge) = match kind {
            VertexKind::Merge => (End::Start, "leave"),
            VertexKind::Split => (End::Finish, "enter"),
        };
        let Some((ci, _)) = self.slot_of(&v.e1, slot_end) else {
            return Err(self.mismatch(format!("{} does not {edge} a crossing", v.e1)));
        };
        let Some(c) = self.crossing(ci).cloned() else {
            return Err(self.mismatch(format!("{} does not {edge} a crossing", v.e1)));
        };
        let (p, q) = match (kind, positive) {
            (VertexKind::Merge, true) if c.over_out == v.e1 && c.under_out == v.e2 => (c.under_in, c.over_in),
            (VertexKind::Merge, false) if c.over_out == v.e2 && c.under_out == v.e1 => (c.over_in, c.under_in),
            (VertexKind::Split, true) if c.over_in == v.e2 && c.under_in == v.e1 => (c.over_out, c.under_out),
            (VertexKind::Split, false) if c.over_in == v.e1 && c.under_in == v.e2 => (c.under_out, c.over_out),
            _ => return Err(self.mismatch("edges are not twisted by a crossing of this sign")),
        };
        if c.sign != sign {
            return Err(self.mismatch("twist crossing has the other sign"));
        }
        let nv = Vertex { kind, e1: p, e2: q, e3: v.e3.clone() };
        let inv = self.site(Direction::Apply, &[&nv.e1, &nv.e2, &nv.e3], kind.name());
        self.replace(ri, Record::Vertex(nv));
        self.remove(ci);
        Ok((inv, BTreeSet::new()))
    }

    fn r5_apply(&mut self, c: &str) -> Result<Step, MoveError> {
        let over = self.kind == MoveKind::R5a;
        let vertex_at = |w: &Work, end| w.slot_of(c, end).filter(|&(ri, k)| w.vertex(ri).is_some() && k == 2);
        let (vi, xi, merge) = if let Some((vi, _)) = vertex_at(self, End::Start) {
            let Some((xi, _)) = self.slot_of(c, End::Finish) else { return Err(self.mismatch("edge has no far end")) };
            (vi, xi, true)
        } else if let Some((vi, _)) = vertex_at(self, End::Finish) {
            let Some((xi, _)) = self.slot_of(c, End::Start) else { return Err(self.mismatch("edge has no far end")) };
            (vi, xi, false)
        } else {
            return Err(self.mismatch(format!("{c} is not the e3 edge of a vertex")));
        };
        let (v, x) = match (self.vertex(vi).cloned(), self.crossing(xi).cloned()) {
            (Some(v), Some(x)) => (v, x),
            _ => return Err(self.mismatch(format!("{c} does not join a vertex to a crossing"))),
        };
        // k0 → k1 is the passing strand; `far` is the other piece of c's strand
        let (k0, k1, far) = match (merge, over) {
            (true, false) if x.over_in == c => (x.under_in, x.under_out, x.over_out),
            (true, true) if x.under_in == c => (x.over_in, x.over_out, x.under_out),
            (false, false) if x.over_out == c => (x.under_in, x.under_out, x.over_in),
            (false, true) if x.under_out == c => (x.over_in, x.over_out, x.under_in),
            _ => return Err(self.mismatch(format!("{c} is not the expected strand at its crossing"))),
        };
        let sign = x.sign;
        let (a2, b2, km) = (self.fresh(), self.fresh(), self.fresh());
        let (a, b) = (v.e1.clone(), v.e2.clone());
        // (in, out) pieces of the vertex edges at the new crossings
        let (ea, eb) = if merge { ((a.clone(), a2.clone()), (b.clone(), b2.clone())) } else { ((a2.clone(), a.clone()), (b2.clone(), b.clone())) };
        let rec = |strand: &(String, String), k: (&String, &String), strand_over: bool| {
            let (si, so) = strand.clone();
            let (ki, ko) = (k.0.clone(), k.1.clone());
            Record::Crossing(if strand_over {
                Crossing { sign, over_in: si, over_out: so, under_in: ki, under_out: ko }
            } else {
                Crossing { sign, over_in: ki, over_out: ko, under_in: si, under_out: so }
            })
        };
        // which vertex edge the passing strand meets first
        let a_first = (sign == Sign::Positive) != over;
        let (first, second) = if a_first { (&ea, &eb) } else { (&eb, &ea) };
        let y1 = rec(first, (&k0, &km), !over);
        let y2 = rec(second, (&km, &k1), !over);
        let nv = if merge {
            Vertex { kind: VertexKind::Merge, e1: a2.clone(), e2: b2.clone(), e3: far }
        } else {
            Vertex { kind: VertexKind::Split, e1: a2.clone(), e2: b2.clone(), e3: far }
        };
        self.replace(vi, Record::Vertex(nv));
        self.replace(xi, y1);
        self.push(y2);
        Ok((self.site(Direction::Undo, &[&a2, &b2], ""), BTreeSet::new()))
    }

    fn r5_undo(&mut self, a2: &str, b2: &str) -> Result<Step, MoveError> {
        let over = self.kind == MoveKind::R5a;
        let vi = self.records.iter().position(|r| {
            matches!(r, Some(Record::Vertex(v)) if v.e1 == a2 && v.e2 == b2)
        });
        let Some(vi) = vi else { return Err(self.mismatch(format!("no vertex with edges ({a2}, {b2})"))) };
        let v = self.vertex(vi).unwrap().clone();
        let merge = v.kind == VertexKind::Merge;
        let far_end = if merge { End::Start } else { End::Finish };
        let cross = |w: &Work, e: &str| w.slot_of(e, far_end).filter(|&(ri, _)| w.crossing(ri).is_some());
        let (Some((ya, ka)), Some((yb, kb))) = (cross(self, a2), cross(self, b2)) else {
            return Err(self.mismatch("vertex edges do not reach crossings"));
        };
        let want = match (merge, over) {
            (true, false) => OO,
            (true, true) => UO,
            (false, false) => OI,
            (false, true) => UI,
        };
        if ya == yb || ka != want || kb != want {
            return Err(self.mismatch("vertex edges are not the expected strands at two crossings"));
        }
        let (ca, cb) = (self.crossing(ya).unwrap().clone(), self.crossing(yb).unwrap().clone());
        if ca.sign != cb.sign {
            return Err(self.mismatch("the two crossings have different signs"));
        }
        let sign = ca.sign;
        let a_first = (sign == Sign::Positive) != over;
        let (c1, c2) = if a_first { (&ca, &cb) } else { (&cb, &ca) };
        let (k0, km_out, km_in, k1) = if over {
            (&c1.over_in, &c1.over_out, &c2.over_in, &c2.over_out)
        } else {
            (&c1.under_in, &c1.under_out, &c2.under_in, &c2.under_out)
        };
        if km_out != km_in {
            return Err(self.mismatch("the passing strand does not run from one crossing to the other"));
        }
        // the far pieces of the vertex edges
        let edge = |c: &Crossing| match (merge, over) {
            (true, false) => c.over_in.clone(),
            (true, true) => c.under_in.clone(),
            (false, false) => c.over_out.clone(),
            (false, true) => c.under_out.clone(),
        };
        let (a, b) = (edge(&ca), edge(&cb));
        let (k0, k1) = (k0.clone(), k1.clone());
        let c = self.fresh();
        let far = v.e3.clone();
        let (c_in, c_out) = if merge { (c.clone(), far) } else { (far, c.clone()) };
        let x = if over {
            Crossing { sign, over_in: k0, over_out: k1, under_in: c_in, under_out: c_out }
        } else {
            Crossing { sign, over_in: c_in, over_out: c_out, under_in: k0, under_out: k1 }
        };
        let nv = Vertex { kind: v.kind, e1: a, e2: b, e3: c.clone() };
        self.replace(vi, Record::Vertex(nv));
        let (keep, drop) = if ya < yb { (ya, yb) } else { (yb, ya) };
        self.replace(keep, Record::Crossing(x));
        self.remove(drop);
        Ok((self.site(Direction::Apply, &[&c], ""), BTreeSet::new()))
    }

    fn r6(&mut self, m: &str, tag: &str) -> Result<Step, MoveError> {
        let at_vertex = |w: &Work, end| w.slot_of(m, end).filter(|&(ri, _)| w.vertex(ri).is_some());
        let (Some((ui, uk)), Some((vi, vk))) = (at_vertex(self, End::Start), at_vertex(self, End::Finish)) else {
            return Err(self.mismatch(format!("{m} does not join two vertices")));
        };
        if ui == vi {
            return Err(self.mismatch(format!("{m} is a loop at one vertex")));
        }
        let (u, v) = (self.vertex(ui).unwrap().clone(), self.vertex(vi).unwrap().clone());
        use VertexKind::{Merge, Split};
        let vx = |kind, e1: &String, e2: &String, e3: &String| {
            Record::Vertex(Vertex { kind, e1: e1.clone(), e2: e2.clone(), e3: e3.clone() })
        };
        let is_h = u.kind == Merge && v.kind == Split;
        if is_h != (tag == "x-left" || tag == "x-right") {
            return Err(if is_h || !tag.is_empty() { self.bad_variant(tag) } else { self.mismatch("") });
        }
        let n = self.fresh();
        let (ru, rv, inverse_tag) = match (u.kind, uk, v.kind, vk) {
            (Merge, 2, Merge, 0) => (vx(Merge, &u.e2, &v.e2, &n), vx(Merge, &u.e1, &n, &v.e3), ""),
            (Merge, 2, Merge, 1) => (vx(Merge, &v.e1, &u.e1, &n), vx(Merge, &n, &u.e2, &v.e3), ""),
            (Split, 0, Split, 2) => (vx(Split, &v.e1, &n, &u.e3), vx(Split, &v.e2, &u.e2, &n), ""),
            (Split, 1, Split, 2) => (vx(Split, &n, &v.e2, &u.e3), vx(Split, &u.e1, &v.e1, &n), ""),
            (Merge, 2, Split, 2) if tag == "x-left" => (vx(Split, &v.e1, &n, &u.e1), vx(Merge, &n, &u.e2, &v.e2), ""),
            (Merge, 2, Split, 2) => (vx(Split, &n, &v.e2, &u.e2), vx(Merge, &u.e1, &n, &v.e1), ""),
            (Split, 1, Merge, 0) => (vx(Merge, &u.e3, &v.e2, &n), vx(Split, &u.e1, &v.e3, &n), "x-left"),
            (Split, 0, Merge, 1) => (vx(Merge, &v.e1, &u.e3, &n), vx(Split, &v.e3, &u.e2, &n), "x-right"),
            _ => return Err(self.mismatch(format!("{m} does not join vertices in an IH pattern"))),
        };
        // H→I puts the split where the merge was, I→H the merge where the
        // split was, so that round trips preserve record order.
        self.replace(ui, ru);
        self.replace(vi, rv);
        Ok((self.site(Direction::Apply, &[&n], inverse_tag), BTreeSet::new()))
    }
}
