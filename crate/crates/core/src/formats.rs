//! Text formats for algebraic structures.
//!
//! A file starts with a header line `<kind> key=value ...`, followed by
//! sections of whitespace-separated table rows; `#` starts a comment.
//!
//! ```text
//! quandle n=3                  # then 3 rows: row x lists x*y
//! biquandle n=2                # then `under:` and `over:` sections
//! alexander ring m=3 poly=2,1,1 s=1+x t=x     # biquandle (quandle without s=)
//! alexander-quandle m=5 t=2
//! alexander-biquandle m=5 s=3 t=2
//! group zn n=4 | group sym k=3 | group table n=4 (+ rows)
//! mcq n=6                      # `block elements=0,1 group=zn:2` lines, then `star:`
//! mcb n=6                      # blocks, then `under:` and `over:`
//! gfamily-q n=3 group=zn:2     # `g=0:` ... sections (group=table:K adds a `group:` section)
//! gfamily-b n=3 group=zn:2     # `under g=0:` ... and `over g=0:` ... sections
//! gfamily-alexander-q ring m=3 poly=2,1,1 n=8 u=x
//! gfamily-alexander-b ring m=3 poly=2,1,1 n=8 t=x s=1+x
//! zkm-family from=dihedral3.qdl k=1     # path relative to the including file
//! zkm-quandle n=3 k=1          # quandle rows follow
//! zkm-biquandle n=2 k=2        # `under:` / `over:` sections follow
//! ```
//!
//! `m` and `poly` describe `Z_m[x]/(f)` with `poly` the little-endian
//! coefficients of the monic `f` (omitted for `Z_m`); the word `ring` before
//! them is optional. Ring elements are written `c0+c1*x+...` or `[c0,c1,...]`.
//! In `block` lines, `group=table` takes the block's Cayley table (local
//! indices) from the following rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::axioms::{AxiomReport, CheckMode};
use crate::family::{
    gfamily_alexander_b, gfamily_alexander_q, zkm_family_from_biquandle, zkm_family_from_quandle, GFamilyB, GFamilyQ,
};
use crate::group::FiniteGroup;
use crate::mcq::{Blocks, Mcb, Mcq};
use crate::quandle::{alexander_biquandle_unchecked, alexander_quandle, Biquandle, Quandle, StructureError, Table};
use crate::ring::{FiniteRing, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{0}")]
    Semantic(String),
}

impl From<StructureError> for FormatError {
    fn from(e: StructureError) -> Self {
        FormatError::Semantic(e.to_string())
    }
}

impl From<RingError> for FormatError {
    fn from(e: RingError) -> Self {
        FormatError::Semantic(e.to_string())
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, column, message: message.into() }
}

/// Any structure that can be read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Quandle(Quandle),
    Biquandle(Biquandle),
    /// A group table (validated by [`Structure::check`], not at parse time).
    Group(Table),
    Mcq(Mcq),
    Mcb(Mcb),
    FamilyQ(GFamilyQ),
    FamilyB(GFamilyB),
}

impl Structure {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Structure::Quandle(_) => "quandle",
            Structure::Biquandle(_) => "biquandle",
            Structure::Group(_) => "group",
            Structure::Mcq(_) => "mcq",
            Structure::Mcb(_) => "mcb",
            Structure::FamilyQ(_) => "gfamily-q",
            Structure::FamilyB(_) => "gfamily-b",
        }
    }

    /// Runs the axiom checker for this kind of structure.
    pub fn check(&self, mode: CheckMode) -> AxiomReport {
        match self {
            Structure::Quandle(q) => q.check_with(mode),
            Structure::Biquandle(b) => b.check_with(mode),
            Structure::Group(t) => FiniteGroup::check_table(t, mode),
            Structure::Mcq(q) => q.check_with(mode),
            Structure::Mcb(b) => b.check_with(mode),
            Structure::FamilyQ(f) => f.check_with(mode),
            Structure::FamilyB(f) => f.check_with(mode),
        }
    }
}

/// A non-empty line: its number and its tokens with 1-based columns.
struct Line<'a> {
    no: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl Line<'_> {
    fn text(&self) -> String {
        self.tokens.iter().map(|t| t.1).collect::<Vec<_>>().join(" ")
    }
}

struct Cursor<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    end_line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let body = l.split('#').next().unwrap_or("");
                let mut tokens = Vec::new();
                let mut start = None;
                for (col, (off, ch)) in body.char_indices().enumerate() {
                    match (ch.is_whitespace(), start) {
                        (false, None) => start = Some((col + 1, off)),
                        (true, Some((c, s))) => {
                            tokens.push((c, &body[s..off]));
                            start = None;
                        }
                        _ => {}
                    }
                }
                if let Some((c, s)) = start {
                    tokens.push((c, &body[s..]));
                }
                (!tokens.is_empty()).then_some(Line { no: i + 1, tokens })
            })
            .collect();
        Cursor { lines, pos: 0, end_line: text.lines().count() + 1 }
    }

    fn err(&self, message: impl Into<String>) -> FormatError {
        match self.lines.get(self.pos) {
            Some(l) => syntax(l.no, l.tokens[0].0, message),
            None => syntax(self.end_line, 1, message),
        }
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    /// Expects a section marker line consisting of exactly `marker`.
    fn expect_marker(&mut self, marker: &str) -> Result<(), FormatError> {
        match self.peek() {
            Some(l) if l.text() == marker => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected `{marker}`"))),
        }
    }

    /// Reads `n` rows of `n` entries in `[0, n)`.
    fn table(&mut self, n: usize) -> Result<Table, FormatError> {
        let mut rows = Vec::with_capacity(n);
        for r in 0..n {
            let Some(line) = self.lines.get(self.pos) else {
                return Err(self.err(format!("expected {n} table rows, found {r}")));
            };
            let mut row = Vec::with_capacity(n);
            for &(col, tok) in &line.tokens {
                match tok.parse::<usize>() {
                    Ok(v) if v < n => row.push(v),
                    Ok(v) => return Err(syntax(line.no, col, format!("entry {v} outside [0,{n})"))),
                    Err(_) => return Err(syntax(line.no, col, format!("expected a table entry, found `{tok}`"))),
                }
            }
            if row.len() != n {
                return Err(syntax(line.no, line.tokens[0].0, format!("row has {} entries, expected {n}", row.len())));
            }
            rows.push(row);
            self.pos += 1;
        }
        Ok(Table::from_rows(&rows)?)
    }

    fn finish(&self) -> Result<(), FormatError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.err("unexpected trailing content")),
        }
    }
}

struct Header {
    line: usize,
    kind: String,
    word: Option<String>,
    /// Value and column of each `key=value` token.
    keys: BTreeMap<String, (String, usize)>,
}

impl Header {
    fn err_at(&self, column: usize, message: impl Into<String>) -> FormatError {
        syntax(self.line, column, message)
    }

    fn get(&self, key: &str) -> Result<(&str, usize), FormatError> {
        self.keys.get(key).map(|(v, c)| (v.as_str(), *c)).ok_or_else(|| self.err_at(1, format!("missing `{key}=`")))
    }

    fn positive(&self, key: &str) -> Result<usize, FormatError> {
        let (v, col) = self.get(key)?;
        match v.parse::<usize>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(self.err_at(col, format!("`{key}={v}` is not a positive integer"))),
        }
    }

    fn ring(&self) -> Result<FiniteRing, FormatError> {
        let (m, col) = self.get("m")?;
        let m: i64 = m.parse().map_err(|_| self.err_at(col, "`m=` must be an integer"))?;
        let poly = match self.keys.get("poly") {
            None => Vec::new(),
            Some((p, col)) => p
                .split(',')
                .map(|c| c.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| self.err_at(*col, "`poly=` lists integer coefficients"))?,
        };
        Ok(FiniteRing::new(m, &poly)?)
    }

    fn element(&self, ring: &FiniteRing, key: &str) -> Result<RingElement, FormatError> {
        let (v, col) = self.get(key)?;
        ring.parse_element(v).map_err(|e| self.err_at(col, e.to_string()))
    }
}

fn header(c: &mut Cursor<'_>) -> Result<Header, FormatError> {
    let Some(l) = c.peek() else { return Err(c.err("empty structure file")) };
    let line = l.no;
    let mut keys = BTreeMap::new();
    let mut word = None;
    for &(col, t) in &l.tokens[1..] {
        match t.split_once('=') {
            Some((k, v)) => {
                keys.insert(k.to_string(), (v.to_string(), col + k.len() + 1));
            }
            None if word.is_none() => word = Some(t.to_string()),
            None => return Err(syntax(line, col, format!("unexpected token `{t}`"))),
        }
    }
    let h = Header { line, kind: l.tokens[0].1.to_string(), word, keys };
    c.pos += 1;
    Ok(h)
}

fn parse_group(kind: &str, k: usize, c: &mut Cursor<'_>) -> Option<Result<FiniteGroup, FormatError>> {
    match kind {
        "zn" => Some(Ok(FiniteGroup::cyclic(k))),
        "sym" if k <= 6 => Some(Ok(FiniteGroup::symmetric(k))),
        "table" => Some(c.expect_marker("group:").and_then(|_| Ok(FiniteGroup::new(c.table(k)?)?))),
        _ => None,
    }
}

/// The `group=zn:K`, `group=sym:K` or `group=table:K` header key.
fn header_group(h: &Header, c: &mut Cursor<'_>) -> Result<FiniteGroup, FormatError> {
    let (spec, col) = h.get("group")?;
    let bad = || h.err_at(col, format!("bad group `{spec}` (zn:K, sym:K with K ≤ 6, or table:K)"));
    let (kind, k) = spec.split_once(':').ok_or_else(bad)?;
    let k = k.parse::<usize>().ok().filter(|&k| k > 0).ok_or_else(bad)?;
    parse_group(kind, k, c).ok_or_else(bad)?
}

fn blocks(c: &mut Cursor<'_>, n: usize) -> Result<Blocks, FormatError> {
    let mut members = Vec::new();
    let mut groups = Vec::new();
    while let Some(l) = c.peek() {
        if l.tokens[0].1 != "block" {
            break;
        }
        let no = l.no;
        let tokens: Vec<(usize, String)> = l.tokens[1..].iter().map(|&(col, t)| (col, t.to_string())).collect();
        c.pos += 1;
        let mut elements = None;
        let mut group = None;
        for (col, t) in &tokens {
            match t.split_once('=') {
                Some(("elements", v)) => {
                    let list = v.split(',').map(|e| e.parse::<usize>()).collect::<Result<Vec<_>, _>>();
                    elements = Some(list.map_err(|_| syntax(no, *col, format!("bad element list `{v}`")))?);
                }
                Some(("group", v)) => group = Some((v.to_string(), *col)),
                _ => return Err(syntax(no, *col, format!("unexpected token `{t}`"))),
            }
        }
        let elements = elements.ok_or_else(|| syntax(no, 1, "missing `elements=`"))?;
        let (spec, col) = group.ok_or_else(|| syntax(no, 1, "missing `group=`"))?;
        let k = elements.len();
        let g = if spec == "table" {
            FiniteGroup::new(c.table(k)?)?
        } else {
            let bad = || syntax(no, col, format!("bad group `{spec}`"));
            let (kind, order) = spec.split_once(':').unwrap_or((&spec, ""));
            let order = if order.is_empty() { k } else { order.parse().map_err(|_| bad())? };
            match kind {
                "zn" | "sym" => parse_group(kind, order, c).ok_or_else(bad)??,
                _ => return Err(bad()),
            }
        };
        members.push(elements);
        groups.push(g);
    }
    if members.is_empty() {
        return Err(c.err("expected `block` lines"));
    }
    Ok(Blocks::new(n, members, groups)?)
}

/// Parses a structure file's text; `zkm-family from=` is rejected since
/// there is no directory to resolve it against (see [`parse_structure_file`]).
pub fn parse_structure(text: &str) -> Result<Structure, FormatError> {
    parse_with_base(text, None)
}

/// Reads and parses a structure file, resolving `from=` relative to it.
pub fn parse_structure_file(path: &Path) -> Result<Structure, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| syntax(0, 0, format!("cannot read {}: {e}", path.display())))?;
    parse_with_base(&text, Some(path.parent().unwrap_or(Path::new("."))))
}

fn alexander_biquandle_checked(ring: &FiniteRing, s: &RingElement, t: &RingElement) -> Result<Biquandle, FormatError> {
    for (name, u) in [("s", s), ("t", t)] {
        if !ring.is_unit(u) {
            return Err(FormatError::Semantic(format!("{name} = {u} is not a unit")));
        }
    }
    Ok(alexander_biquandle_unchecked(ring, s, t))
}

fn parse_with_base(text: &str, base: Option<&Path>) -> Result<Structure, FormatError> {
    let mut c = Cursor::new(text);
    let h = header(&mut c)?;
    if let Some(w) = &h.word {
        let allowed = match h.kind.as_str() {
            "group" => true,
            k => w == "ring" && (k.starts_with("alexander") || k.starts_with("gfamily-alexander")),
        };
        if !allowed {
            return Err(h.err_at(1, format!("unexpected word `{w}`")));
        }
    }
    let s = match h.kind.as_str() {
        "quandle" => Structure::Quandle(Quandle::new(c.table(h.positive("n")?)?)),
        "biquandle" => {
            let n = h.positive("n")?;
            let (under, over) = under_over(&mut c, n)?;
            Structure::Biquandle(Biquandle::new(under, over)?)
        }
        "alexander" if !h.keys.contains_key("s") => {
            let ring = h.ring()?;
            Structure::Quandle(alexander_quandle(&ring, &h.element(&ring, "t")?)?)
        }
        "alexander-quandle" => {
            let ring = h.ring()?;
            Structure::Quandle(alexander_quandle(&ring, &h.element(&ring, "t")?)?)
        }
        "alexander" | "alexander-biquandle" => {
            let ring = h.ring()?;
            Structure::Biquandle(alexander_biquandle_checked(&ring, &h.element(&ring, "s")?, &h.element(&ring, "t")?)?)
        }
        "group" => {
            let table = match h.word.as_deref() {
                Some("zn") => FiniteGroup::cyclic(h.positive("n")?).table().clone(),
                Some("sym") => {
                    let k = h.positive("k")?;
                    if k > 6 {
                        return Err(h.err_at(1, "symmetric groups are limited to k ≤ 6"));
                    }
                    FiniteGroup::symmetric(k).table().clone()
                }
                Some("table") => c.table(h.positive("n")?)?,
                _ => return Err(h.err_at(1, "expected `group zn`, `group sym` or `group table`")),
            };
            Structure::Group(table)
        }
        "mcq" => {
            let n = h.positive("n")?;
            let bl = blocks(&mut c, n)?;
            c.expect_marker("star:")?;
            Structure::Mcq(Mcq::new(bl, c.table(n)?)?)
        }
        "mcb" => {
            let n = h.positive("n")?;
            let bl = blocks(&mut c, n)?;
            let (under, over) = under_over(&mut c, n)?;
            Structure::Mcb(Mcb::new(bl, under, over)?)
        }
        "gfamily-q" => {
            let n = h.positive("n")?;
            let g = header_group(&h, &mut c)?;
            let mut ops = Vec::new();
            for i in 0..g.order() {
                c.expect_marker(&format!("g={i}:"))?;
                ops.push(c.table(n)?);
            }
            Structure::FamilyQ(GFamilyQ::new(g, ops)?)
        }
        "gfamily-b" => {
            let n = h.positive("n")?;
            let g = header_group(&h, &mut c)?;
            let (mut under, mut over) = (Vec::new(), Vec::new());
            for (side, out) in [("under", &mut under), ("over", &mut over)] {
                for i in 0..g.order() {
                    c.expect_marker(&format!("{side} g={i}:"))?;
                    out.push(c.table(n)?);
                }
            }
            Structure::FamilyB(GFamilyB::new(g, under, over)?)
        }
        "gfamily-alexander-q" => {
            let ring = h.ring()?;
            Structure::FamilyQ(gfamily_alexander_q(&ring, h.positive("n")?, &h.element(&ring, "u")?)?)
        }
        "gfamily-alexander-b" => {
            let ring = h.ring()?;
            let (t, s) = (h.element(&ring, "t")?, h.element(&ring, "s")?);
            Structure::FamilyB(gfamily_alexander_b(&ring, h.positive("n")?, &t, &s)?)
        }
        "zkm-family" => {
            let (from, col) = h.get("from")?;
            let Some(base) = base else {
                return Err(h.err_at(col, "`from=` needs a file location to resolve against"));
            };
            let k = h.positive("k")?;
            match parse_structure_file(&base.join(from)) {
                Ok(Structure::Quandle(q)) => Structure::FamilyQ(zkm_family_from_quandle(&q, k)?),
                Ok(Structure::Biquandle(b)) => Structure::FamilyB(zkm_family_from_biquandle(&b, k)?),
                Ok(other) => {
                    return Err(FormatError::Semantic(format!("`{from}` holds a {}, not a (bi)quandle", other.kind_name())))
                }
                Err(e) => return Err(FormatError::Semantic(format!("{from}: {e}"))),
            }
        }
        "zkm-quandle" => {
            let q = Quandle::new(c.table(h.positive("n")?)?);
            Structure::FamilyQ(zkm_family_from_quandle(&q, h.positive("k")?)?)
        }
        "zkm-biquandle" => {
            let n = h.positive("n")?;
            let (under, over) = under_over(&mut c, n)?;
            Structure::FamilyB(zkm_family_from_biquandle(&Biquandle::new(under, over)?, h.positive("k")?)?)
        }
        other => return Err(h.err_at(1, format!("unknown structure kind `{other}`"))),
    };
    c.finish()?;
    Ok(s)
}

fn under_over(c: &mut Cursor<'_>, n: usize) -> Result<(Table, Table), FormatError> {
    c.expect_marker("under:")?;
    let under = c.table(n)?;
    c.expect_marker("over:")?;
    let over = c.table(n)?;
    Ok((under, over))
}

fn write_table(out: &mut String, t: &Table) {
    for row in t.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
}

fn write_blocks(out: &mut String, bl: &Blocks) {
    for lambda in 0..bl.count() {
        let els: Vec<String> = bl.members(lambda).iter().map(|v| v.to_string()).collect();
        let g = bl.group(lambda);
        if *g == FiniteGroup::cyclic(g.order()) {
            writeln!(out, "block elements={} group=zn:{}", els.join(","), g.order()).unwrap();
        } else {
            writeln!(out, "block elements={} group=table", els.join(",")).unwrap();
            write_table(out, g.table());
        }
    }
}

fn group_header(out: &mut String, g: &FiniteGroup) -> String {
    if *g == FiniteGroup::cyclic(g.order()) {
        format!("group=zn:{}", g.order())
    } else {
        let mut rows = String::from("group:\n");
        write_table(&mut rows, g.table());
        out.push_str(&rows);
        format!("group=table:{}", g.order())
    }
}

fn ring_keys(ring: &FiniteRing) -> String {
    let mut s = format!("ring m={}", ring.modulus());
    if !ring.poly().is_empty() {
        let p: Vec<String> = ring.poly().iter().map(|c| c.to_string()).collect();
        write!(s, " poly={}", p.join(",")).unwrap();
    }
    s
}

/// Serializes a structure; Alexander families keep their compact header.
pub fn serialize_structure(s: &Structure) -> String {
    let mut out = String::new();
    match s {
        Structure::Quandle(q) => {
            writeln!(out, "quandle n={}", q.n()).unwrap();
            write_table(&mut out, q.table());
        }
        Structure::Biquandle(b) => {
            writeln!(out, "biquandle n={}\nunder:", b.n()).unwrap();
            write_table(&mut out, b.under_table());
            out.push_str("over:\n");
            write_table(&mut out, b.over_table());
        }
        Structure::Group(t) => {
            writeln!(out, "group table n={}", t.n()).unwrap();
            write_table(&mut out, t);
        }
        Structure::Mcq(q) => {
            writeln!(out, "mcq n={}", q.n()).unwrap();
            write_blocks(&mut out, q.blocks());
            out.push_str("star:\n");
            write_table(&mut out, q.star_table());
        }
        Structure::Mcb(b) => {
            writeln!(out, "mcb n={}", b.n()).unwrap();
            write_blocks(&mut out, b.blocks());
            out.push_str("under:\n");
            write_table(&mut out, b.under_table());
            out.push_str("over:\n");
            write_table(&mut out, b.over_table());
        }
        Structure::FamilyQ(f) => match f.alexander() {
            Some(a) => writeln!(out, "gfamily-alexander-q {} n={} u={}", ring_keys(&a.ring), a.n, a.t).unwrap(),
            None => {
                let mut body = String::new();
                let g = group_header(&mut body, f.group());
                writeln!(out, "gfamily-q n={} {g}", f.n()).unwrap();
                out.push_str(&body);
                for i in 0..f.group().order() {
                    writeln!(out, "g={i}:").unwrap();
                    write_table(&mut out, f.table(i));
                }
            }
        },
        Structure::FamilyB(f) => match f.alexander() {
            Some(a) => {
                let s = a.s.as_ref().expect("biquandle family data carries s");
                writeln!(out, "gfamily-alexander-b {} n={} t={} s={}", ring_keys(&a.ring), a.n, a.t, s).unwrap()
            }
            None => {
                let mut body = String::new();
                let g = group_header(&mut body, f.group());
                writeln!(out, "gfamily-b n={} {g}", f.n()).unwrap();
                out.push_str(&body);
                for (side, pick) in [("under", true), ("over", false)] {
                    for i in 0..f.group().order() {
                        writeln!(out, "{side} g={i}:").unwrap();
                        write_table(&mut out, if pick { f.under_table(i) } else { f.over_table(i) });
                    }
                }
            }
        },
    }
    out
}

/// Parses an assignment file (a coloring or flow): one `<semi-arc> <value>`
/// pair per line, `#` comments.
pub fn parse_assignment(text: &str) -> Result<BTreeMap<String, usize>, FormatError> {
    let mut out = BTreeMap::new();
    for line in Cursor::new(text).lines {
        let [(_, id), (col, v)] = line.tokens[..] else {
            return Err(syntax(line.no, line.tokens[0].0, "expected `<semi-arc> <value>`"));
        };
        let v = v.parse().map_err(|_| syntax(line.no, col, format!("bad value `{v}`")))?;
        if out.insert(id.to_string(), v).is_some() {
            return Err(syntax(line.no, line.tokens[0].0, format!("semi-arc `{id}` assigned twice")));
        }
    }
    Ok(out)
}

/// Serializes an assignment in sorted id order.
pub fn serialize_assignment(a: &BTreeMap<String, usize>) -> String {
    a.iter().map(|(k, v)| format!("{k} {v}\n")).collect()
}
