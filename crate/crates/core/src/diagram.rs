//! Combinatorial diagrams of Y-oriented spatial trivalent graphs.
//!
//! A diagram is a list of records wiring named semi-arcs:
//!
//! ```text
//! # comment
//! semiarc a b c          # optional declaration of wired ids
//! loop l                 # crossing-free circle component
//! x+ oi oo ui uo         # crossing: over in/out, under in/out
//! x- oi oo ui uo
//! v< e1 e2 e3            # merge: e1, e2 incoming, e3 outgoing
//! v> e1 e2 e3            # split: e3 incoming, e1, e2 outgoing
//! top a b                # open (braid-shaped) diagrams: semi-arcs meeting
//! bottom c d             #   the top / bottom boundary line
//! ```
//!
//! Conventions (see the README for pictures):
//! * a crossing is positive when `(over direction) × (under direction)` points
//!   out of the page, i.e. the under strand passes from the right of the over
//!   strand to its left;
//! * at a vertex, looking along the through-direction (from the incoming side
//!   of a merge toward `e3`, or from `e3` toward the outgoing side of a split),
//!   `e1` is the right-hand edge and `e2` the left-hand edge.
//!
//! Every non-loop semi-arc has exactly one start slot and one end slot, except
//! boundary semi-arcs of open diagrams, which lack one slot per boundary
//! incidence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("semi-arc {id}: {message}")]
    Invalid { id: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    /// `+1` or `-1`.
    pub fn value(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    /// `e1`, `e2` incoming, `e3` outgoing.
    Merge,
    /// `e3` incoming, `e1`, `e2` outgoing.
    Split,
}

impl VertexKind {
    pub fn flip(self) -> VertexKind {
        match self {
            VertexKind::Merge => VertexKind::Split,
            VertexKind::Split => VertexKind::Merge,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VertexKind::Merge => "merge",
            VertexKind::Split => "split",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub sign: Sign,
    pub over_in: String,
    pub over_out: String,
    pub under_in: String,
    pub under_out: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub kind: VertexKind,
    pub e1: String,
    pub e2: String,
    pub e3: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Record {
    Crossing(Crossing),
    Vertex(Vertex),
}

/// Whether a slot is where a semi-arc begins or ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Start,
    Finish,
}

impl Record {
    /// Slot ids in record order with their role.
    pub fn slots(&self) -> Vec<(&str, End)> {
        match self {
            Record::Crossing(c) => vec![
                (&c.over_in, End::Finish),
                (&c.over_out, End::Start),
                (&c.under_in, End::Finish),
                (&c.under_out, End::Start),
            ],
            Record::Vertex(v) => {
                let (io, o3) = match v.kind {
                    VertexKind::Merge => (End::Finish, End::Start),
                    VertexKind::Split => (End::Start, End::Finish),
                };
                vec![(&v.e1, io), (&v.e2, io), (&v.e3, o3)]
            }
        }
        .into_iter()
        .map(|(s, e)| (s.as_str(), e))
        .collect()
    }

    pub(crate) fn slot_mut(&mut self, k: usize) -> &mut String {
        match self {
            Record::Crossing(c) => match k {
                0 => &mut c.over_in,
                1 => &mut c.over_out,
                2 => &mut c.under_in,
                _ => &mut c.under_out,
            },
            Record::Vertex(v) => match k {
                0 => &mut v.e1,
                1 => &mut v.e2,
                _ => &mut v.e3,
            },
        }
    }
}

/// A validated diagram.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diagram {
    records: Vec<Record>,
    loops: BTreeSet<String>,
    top: Vec<String>,
    bottom: Vec<String>,
}

impl Diagram {
    /// Validates and builds a diagram.
    pub fn new(
        records: Vec<Record>,
        loops: impl IntoIterator<Item = String>,
        top: Vec<String>,
        bottom: Vec<String>,
    ) -> Result<Self, DiagramError> {
        let d = Diagram { records, loops: loops.into_iter().collect(), top, bottom };
        d.validate()?;
        Ok(d)
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn crossings(&self) -> impl Iterator<Item = &Crossing> {
        self.records.iter().filter_map(|r| match r {
            Record::Crossing(c) => Some(c),
            Record::Vertex(_) => None,
        })
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.records.iter().filter_map(|r| match r {
            Record::Vertex(v) => Some(v),
            Record::Crossing(_) => None,
        })
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings().count()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().count()
    }

    pub fn loops(&self) -> &BTreeSet<String> {
        &self.loops
    }

    pub fn top(&self) -> &[String] {
        &self.top
    }

    pub fn bottom(&self) -> &[String] {
        &self.bottom
    }

    pub fn is_open(&self) -> bool {
        !self.top.is_empty() || !self.bottom.is_empty()
    }

    /// All semi-arc ids, sorted.
    pub fn semiarcs(&self) -> BTreeSet<String> {
        let mut ids: BTreeSet<String> = self.loops.clone();
        for r in &self.records {
            ids.extend(r.slots().into_iter().map(|(s, _)| s.to_string()));
        }
        ids.extend(self.top.iter().cloned());
        ids.extend(self.bottom.iter().cloned());
        ids
    }

    fn validate(&self) -> Result<(), DiagramError> {
        let invalid = |id: &str, message: String| DiagramError::Invalid { id: id.to_string(), message };
        let mut starts: BTreeMap<&str, usize> = BTreeMap::new();
        let mut ends: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &self.records {
            for (id, end) in r.slots() {
                let map = if end == End::Start { &mut starts } else { &mut ends };
                *map.entry(id).or_default() += 1;
            }
        }
        let mut boundary: BTreeMap<&str, usize> = BTreeMap::new();
        for id in self.top.iter().chain(&self.bottom) {
            *boundary.entry(id.as_str()).or_default() += 1;
        }
        for l in &self.loops {
            if starts.contains_key(l.as_str()) || ends.contains_key(l.as_str()) || boundary.contains_key(l.as_str()) {
                return Err(invalid(l, "declared as a loop but also used in a record or boundary".into()));
            }
        }
        for id in self.semiarcs() {
            if id.is_empty() || id.contains(|c: char| c.is_whitespace() || c == '#') {
                return Err(invalid(&id, "ids must be non-empty and contain no whitespace or `#`".into()));
            }
            if self.loops.contains(&id) {
                continue;
            }
            let s = starts.get(id.as_str()).copied().unwrap_or(0);
            let e = ends.get(id.as_str()).copied().unwrap_or(0);
            let b = boundary.get(id.as_str()).copied().unwrap_or(0);
            if s > 1 {
                return Err(invalid(&id, format!("appears {s} times as a start")));
            }
            if e > 1 {
                return Err(invalid(&id, format!("appears {e} times as an end")));
            }
            if s + e + b != 2 {
                let message = if b == 0 {
                    format!("has {s} start and {e} end slots; needs exactly one of each")
                } else {
                    format!("has {s} start, {e} end slots and {b} boundary incidences; they must total 2")
                };
                return Err(invalid(&id, message));
            }
        }
        Ok(())
    }

    /// Parses the line-oriented text format and validates the result.
    pub fn parse(text: &str) -> Result<Self, DiagramError> {
        let mut records = Vec::new();
        let mut loops = Vec::new();
        let mut declared: Vec<(String, usize, usize)> = Vec::new();
        let (mut top, mut bottom) = (Vec::new(), Vec::new());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let tokens = tokenize(line);
            let Some(&(col0, keyword)) = tokens.first() else { continue };
            let args: Vec<&str> = tokens[1..].iter().map(|&(_, t)| t).collect();
            let syntax = |column: usize, message: String| DiagramError::Syntax { line: lineno + 1, column, message };
            let need = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(syntax(col0, format!("`{keyword}` takes {n} semi-arc ids, got {}", args.len())))
                }
            };
            let owned = |i: usize| args[i].to_string();
            match keyword {
                "semiarc" => {
                    for &(col, t) in &tokens[1..] {
                        declared.push((t.to_string(), lineno + 1, col));
                    }
                }
                "loop" => {
                    if args.is_empty() {
                        return Err(syntax(col0, "`loop` needs at least one id".into()));
                    }
                    loops.extend(args.iter().map(|s| s.to_string()));
                }
                "top" => top.extend(args.iter().map(|s| s.to_string())),
                "bottom" => bottom.extend(args.iter().map(|s| s.to_string())),
                "x+" | "x-" => {
                    need(4)?;
                    let sign = if keyword == "x+" { Sign::Positive } else { Sign::Negative };
                    records.push(Record::Crossing(Crossing {
                        sign,
                        over_in: owned(0),
                        over_out: owned(1),
                        under_in: owned(2),
                        under_out: owned(3),
                    }));
                }
                "v<" | "v>" => {
                    need(3)?;
                    let kind = if keyword == "v<" { VertexKind::Merge } else { VertexKind::Split };
                    records.push(Record::Vertex(Vertex { kind, e1: owned(0), e2: owned(1), e3: owned(2) }));
                }
                other => return Err(syntax(col0, format!("unknown record keyword `{other}`"))),
            }
        }
        let d = Diagram { records, loops: loops.into_iter().collect(), top, bottom };
        let wired = d.semiarcs();
        for (id, line, column) in declared {
            if !wired.contains(&id) {
                return Err(DiagramError::Syntax {
                    line,
                    column,
                    message: format!("semi-arc {id} is declared but never wired"),
                });
            }
        }
        d.validate()?;
        Ok(d)
    }

    /// Canonical text form: sorted `semiarc` declaration, sorted loops,
    /// boundary lines, then records in order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let wired: Vec<String> = self.semiarcs().into_iter().filter(|s| !self.loops.contains(s)).collect();
        if !wired.is_empty() {
            writeln!(out, "semiarc {}", wired.join(" ")).unwrap();
        }
        for l in &self.loops {
            writeln!(out, "loop {l}").unwrap();
        }
        if !self.top.is_empty() {
            writeln!(out, "top {}", self.top.join(" ")).unwrap();
        }
        if !self.bottom.is_empty() {
            writeln!(out, "bottom {}", self.bottom.join(" ")).unwrap();
        }
        for r in &self.records {
            match r {
                Record::Crossing(c) => writeln!(
                    out,
                    "x{} {} {} {} {}",
                    c.sign.symbol(),
                    c.over_in,
                    c.over_out,
                    c.under_in,
                    c.under_out
                ),
                Record::Vertex(v) => {
                    let k = if v.kind == VertexKind::Merge { "v<" } else { "v>" };
                    writeln!(out, "{k} {} {} {}", v.e1, v.e2, v.e3)
                }
            }
            .unwrap();
        }
        out
    }

    /// Partition of semi-arcs into arcs: semi-arcs joined by over-passes.
    pub fn arcs(&self) -> ArcPartition {
        let ids: Vec<String> = self.semiarcs().into_iter().collect();
        let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for c in self.crossings() {
            let (a, b) = (find(&mut parent, index[c.over_in.as_str()]), find(&mut parent, index[c.over_out.as_str()]));
            let (lo, hi) = (a.min(b), a.max(b));
            parent[hi] = lo;
        }
        let mut arc_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut arc_of = BTreeMap::new();
        for (i, id) in ids.iter().enumerate() {
            let root = find(&mut parent, i);
            let next = arc_of_root.len();
            let arc = *arc_of_root.entry(root).or_insert(next);
            arc_of.insert(id.clone(), arc);
        }
        ArcPartition { arc_of, count: arc_of_root.len() }
    }

    /// `-D`: every strand reversed. Crossing in/out slots swap (signs are
    /// unchanged); merges and splits swap, and so do `e1`/`e2`, because the
    /// through-direction at the vertex is reversed.
    pub fn reverse(&self) -> Diagram {
        self.map_records(|r| match r {
            Record::Crossing(c) => Record::Crossing(Crossing {
                sign: c.sign,
                over_in: c.over_out.clone(),
                over_out: c.over_in.clone(),
                under_in: c.under_out.clone(),
                under_out: c.under_in.clone(),
            }),
            Record::Vertex(v) => {
                Record::Vertex(Vertex { kind: v.kind.flip(), e1: v.e2.clone(), e2: v.e1.clone(), e3: v.e3.clone() })
            }
        })
    }

    /// `D^h`: the reflection of the diagram in a line of the plane. Every
    /// crossing changes sign and left/right swap at every vertex.
    pub fn mirror(&self) -> Diagram {
        self.map_records(|r| match r {
            Record::Crossing(c) => Record::Crossing(Crossing { sign: c.sign.flip(), ..c.clone() }),
            Record::Vertex(v) => {
                Record::Vertex(Vertex { kind: v.kind, e1: v.e2.clone(), e2: v.e1.clone(), e3: v.e3.clone() })
            }
        })
    }

    /// `-D^h` on the same semi-arc ids.
    pub fn reverse_mirror(&self) -> Diagram {
        self.reverse().mirror()
    }

    fn map_records(&self, f: impl Fn(&Record) -> Record) -> Diagram {
        Diagram {
            records: self.records.iter().map(f).collect(),
            loops: self.loops.clone(),
            top: self.top.clone(),
            bottom: self.bottom.clone(),
        }
    }

    /// `D ⊔ D'`. Ids of `other` that collide with ids of `self` are renamed
    /// to `<id>~<k>` with the least free `k ≥ 1`.
    pub fn disjoint_union(&self, other: &Diagram) -> Diagram {
        let mine = self.semiarcs();
        let theirs = other.semiarcs();
        let mut taken: BTreeSet<String> = mine.union(&theirs).cloned().collect();
        let mut rename: BTreeMap<String, String> = BTreeMap::new();
        for id in &theirs {
            if mine.contains(id) {
                let fresh = (1..).map(|k| format!("{id}~{k}")).find(|c| !taken.contains(c)).unwrap();
                taken.insert(fresh.clone());
                rename.insert(id.clone(), fresh);
            }
        }
        let r = |s: &String| rename.get(s).cloned().unwrap_or_else(|| s.clone());
        let mut records = self.records.clone();
        for rec in &other.records {
            let mut rec = rec.clone();
            for k in 0..rec.slots().len() {
                let slot = rec.slot_mut(k);
                *slot = r(slot);
            }
            records.push(rec);
        }
        let mut loops = self.loops.clone();
        loops.extend(other.loops.iter().map(r));
        let mut top = self.top.clone();
        top.extend(other.top.iter().map(r));
        let mut bottom = self.bottom.clone();
        bottom.extend(other.bottom.iter().map(r));
        Diagram { records, loops, top, bottom }
    }

    /// Record indices and slot positions where `id` occurs.
    pub fn occurrences(&self, id: &str) -> Vec<(usize, usize, End)> {
        let mut out = Vec::new();
        for (ri, r) in self.records.iter().enumerate() {
            for (k, (s, end)) in r.slots().into_iter().enumerate() {
                if s == id {
                    out.push((ri, k, end));
                }
            }
        }
        out
    }

    pub(crate) fn from_parts_unchecked(
        records: Vec<Record>,
        loops: BTreeSet<String>,
        top: Vec<String>,
        bottom: Vec<String>,
    ) -> Diagram {
        Diagram { records, loops, top, bottom }
    }

    pub(crate) fn revalidate(self) -> Result<Diagram, DiagramError> {
        self.validate()?;
        Ok(self)
    }
}

/// Map from semi-arc id to arc index (arcs numbered by their least member).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcPartition {
    pub arc_of: BTreeMap<String, usize>,
    pub count: usize,
}

impl ArcPartition {
    pub fn arc(&self, semiarc: &str) -> Option<usize> {
        self.arc_of.get(semiarc).copied()
    }

    /// Semi-arc ids of each arc.
    pub fn members(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.count];
        for (id, &a) in &self.arc_of {
            out[a].push(id.clone());
        }
        out
    }
}

/// Whitespace tokens with 1-based column numbers.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}
