//! Colorings of diagrams by MCQs (on arcs), MCBs (on semi-arcs) and G-flows,
//! flow-filtered family colorings and the linear path for Alexander families.
//!
//! Rules, for a crossing with over strand `oi → oo` and under strand `ui → uo`:
//!
//! | target | positive crossing | negative crossing |
//! |--------|-------------------|-------------------|
//! | MCQ `*` (arcs) | `uo = ui * o` | `ui = uo * o` |
//! | G-flow | `uo = o⁻¹·ui·o` | `ui = o⁻¹·uo·o` |
//! | MCB `⊻`, `⊼` | `uo = ui ⊻ oo`, `oi = oo ⊼ ui` | `ui = uo ⊻ oi`, `oo = oi ⊼ uo` |
//!
//! At a vertex with edges `(e1, e2, e3)` (merge or split alike): MCQ and
//! flows `c(e3) = c(e1)·c(e2)` in one block; MCB `(c(e1), c(e2), c(e3)) =
//! (a, b ⊼ a, a·b)` for `a, b` in one block. The MCB rules are the ones
//! invariant under every move of [`crate::moves`]; this is checked by tests.
//!
//! Counting uses constraint propagation with backtracking: every crossing and
//! vertex is a relation over its (semi-)arc variables, functional dependencies
//! between its slots propagate values, and the solver branches on the
//! most-constrained unassigned variable (ties: least variable), trying values in
//! increasing order. Connected components are counted independently.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::diagram::{Diagram, Sign};
use crate::family::{GFamilyB, GFamilyQ};
use crate::group::FiniteGroup;
use crate::linalg::solve_linear;
use crate::mcq::{q_functor_mcb, Mcb, Mcq};
use crate::moves::{apply_move_detailed, MoveError, MoveSite};
use crate::ring::{RingElement, RingError};

/// Assignment of elements to semi-arcs (constant along arcs for MCQs and flows).
pub type Coloring = BTreeMap<String, usize>;
/// A G-flow, stored per semi-arc like a coloring.
pub type Flow = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("search exceeded the branch budget of {0} nodes")]
    SizeBoundExceeded(u64),
    #[error("not a valid flow: {0}")]
    FlowInvalid(String),
    #[error("diagram has no top/bottom boundary")]
    NotBraidShaped,
    #[error("family is not of Alexander type")]
    NotAlexander,
    #[error("transport found {0} colorings instead of exactly one")]
    TransportFailed(usize),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("{0}")]
    Structure(String),
}

/// What a diagram is colored by.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Mcq(&'a Mcq),
    Mcb(&'a Mcb),
    /// G-flows: colorings by the conjugation MCQ of the group.
    Flows(&'a FiniteGroup),
}

impl Target<'_> {
    pub fn size(&self) -> usize {
        match self {
            Target::Mcq(q) => q.n(),
            Target::Mcb(b) => b.n(),
            Target::Flows(g) => g.order(),
        }
    }

    /// Whether colorings live on arcs (one variable per arc).
    pub fn on_arcs(&self) -> bool {
        !matches!(self, Target::Mcb(_))
    }
}

/// Search limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Maximum number of branch nodes per count.
    pub budget: u64,
    /// Workers used for the first branching level of each component.
    pub threads: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { budget: 50_000_000, threads: 1 }
    }
}

/// Dimension and basis of a coloring module over a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleInfo {
    /// Names of the unknowns (semi-arcs, or representative semi-arcs of arcs).
    pub unknowns: Vec<String>,
    pub dimension: Option<usize>,
    pub basis: Vec<Vec<RingElement>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ColoringSetReport {
    pub count: u128,
    pub list: Option<Vec<Coloring>>,
    pub module_info: Option<ModuleInfo>,
    pub per_flow: Option<Vec<(Flow, u128)>>,
}

// ---------------------------------------------------------------------------
// Relations and the constraint solver

const UNSET: u32 = u32::MAX;
const NONE: u32 = u32::MAX;
const MULTI: u32 = u32::MAX - 1;

/// A relation of arity 3 or 4 over `[0, n)` with lookup tables for every pair
/// of slots (tuple index, [`NONE`] or [`MULTI`]).
#[derive(Debug)]
struct Relation {
    arity: usize,
    n: usize,
    tuples: Vec<[u32; 4]>,
    members: HashSet<[u32; 4]>,
    pairs: Vec<(usize, usize, Vec<u32>)>,
}

impl Relation {
    fn new(arity: usize, n: usize, tuples: Vec<[u32; 4]>) -> Self {
        let mut pairs = Vec::new();
        for i in 0..arity {
            for j in i + 1..arity {
                let mut map = vec![NONE; n * n];
                for (ti, t) in tuples.iter().enumerate() {
                    let slot = &mut map[t[i] as usize * n + t[j] as usize];
                    *slot = match *slot {
                        NONE => ti as u32,
                        _ => MULTI,
                    };
                }
                pairs.push((i, j, map));
            }
        }
        // functional pairs first so propagation prefers them
        pairs.sort_by_key(|(_, _, m)| m.iter().filter(|&&e| e == MULTI).count());
        let members = tuples.iter().copied().collect();
        Relation { arity, n, tuples, members, pairs }
    }
}

#[derive(Debug, Clone)]
struct Constraint {
    rel: Arc<Relation>,
    vars: [usize; 4],
}

/// A finite-domain constraint problem over (semi-)arc variables.
#[derive(Debug, Clone)]
struct Problem {
    n: usize,
    /// Semi-arc ids of each variable.
    vars: Vec<Vec<String>>,
    var_of: BTreeMap<String, usize>,
    domain: Vec<Vec<bool>>,
    constraints: Vec<Constraint>,
    watch: Vec<Vec<usize>>,
}

struct Relations {
    crossing: Arc<Relation>,
    vertex: Arc<Relation>,
}

fn relations(target: Target<'_>) -> Relations {
    let n = target.size();
    let mut crossing = Vec::new();
    let mut vertex = Vec::new();
    match target {
        Target::Mcq(q) => {
            for x in 0..n {
                for y in 0..n {
                    crossing.push([x as u32, y as u32, q.star(x, y) as u32, 0]);
                    if let Some(z) = q.blocks().mul(x, y) {
                        vertex.push([x as u32, y as u32, z as u32, 0]);
                    }
                }
            }
        }
        Target::Flows(g) => {
            for x in 0..n {
                for y in 0..n {
                    crossing.push([x as u32, y as u32, g.conj(x, y) as u32, 0]);
                    vertex.push([x as u32, y as u32, g.mul(x, y) as u32, 0]);
                }
            }
        }
        Target::Mcb(b) => {
            // (x, y) ↦ (y ⊼ x, x ⊻ y)
            for x in 0..n {
                for y in 0..n {
                    crossing.push([x as u32, y as u32, b.over(y, x) as u32, b.under(x, y) as u32]);
                }
            }
            let bl = b.blocks();
            for lambda in 0..bl.count() {
                for &a in bl.members(lambda) {
                    for &c in bl.members(lambda) {
                        let ab = bl.mul(a, c).expect("same block");
                        vertex.push([a as u32, b.over(c, a) as u32, ab as u32, 0]);
                    }
                }
            }
        }
    }
    let arity = if matches!(target, Target::Mcb(_)) { 4 } else { 3 };
    Relations { crossing: Arc::new(Relation::new(arity, n, crossing)), vertex: Arc::new(Relation::new(3, n, vertex)) }
}

/// `restrict(semiarc, value)` limits the domain of each semi-arc.
fn build_problem(d: &Diagram, target: Target<'_>, restrict: &dyn Fn(&str, usize) -> bool) -> Problem {
    let n = target.size();
    let mut vars: Vec<Vec<String>> = Vec::new();
    let mut var_of = BTreeMap::new();
    if target.on_arcs() {
        for members in d.arcs().members() {
            for s in &members {
                var_of.insert(s.clone(), vars.len());
            }
            vars.push(members);
        }
    } else {
        for s in d.semiarcs() {
            var_of.insert(s.clone(), vars.len());
            vars.push(vec![s]);
        }
    }
    let domain = vars.iter().map(|ms| (0..n).map(|x| ms.iter().all(|s| restrict(s, x))).collect()).collect();
    let rel = relations(target);
    let v = |s: &String| var_of[s];
    let mut constraints = Vec::new();
    for c in d.crossings() {
        let vars = match (target, c.sign) {
            (Target::Mcb(_), Sign::Positive) => [v(&c.under_in), v(&c.over_out), v(&c.over_in), v(&c.under_out)],
            (Target::Mcb(_), Sign::Negative) => [v(&c.under_out), v(&c.over_in), v(&c.over_out), v(&c.under_in)],
            (_, Sign::Positive) => [v(&c.under_in), v(&c.over_in), v(&c.under_out), 0],
            (_, Sign::Negative) => [v(&c.under_out), v(&c.over_in), v(&c.under_in), 0],
        };
        constraints.push(Constraint { rel: rel.crossing.clone(), vars });
    }
    for x in d.vertices() {
        constraints.push(Constraint { rel: rel.vertex.clone(), vars: [v(&x.e1), v(&x.e2), v(&x.e3), 0] });
    }
    let mut watch = vec![Vec::new(); vars.len()];
    for (ci, c) in constraints.iter().enumerate() {
        let used: BTreeSet<usize> = c.vars[..c.rel.arity].iter().copied().collect();
        for var in used {
            watch[var].push(ci);
        }
    }
    Problem { n, vars, var_of, domain, constraints, watch }
}

impl Problem {
    /// Connected components of the constraint graph, each sorted.
    fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vars.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for c in &self.constraints {
            let r0 = find(&mut parent, c.vars[0]);
            for &v in &c.vars[1..c.rel.arity] {
                let r = find(&mut parent, v);
                parent[r] = r0;
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.vars.len() {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    fn to_coloring(&self, values: &[u32]) -> Coloring {
        let mut c = Coloring::new();
        for (var, members) in self.vars.iter().enumerate() {
            for s in members {
                c.insert(s.clone(), values[var] as usize);
            }
        }
        c
    }
}

#[derive(Clone)]
struct State<'p> {
    p: &'p Problem,
    val: Vec<u32>,
    trail: Vec<usize>,
    queue: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl<'p> State<'p> {
    fn new(p: &'p Problem, budget: u64) -> Self {
        State { p, val: vec![UNSET; p.vars.len()], trail: Vec::new(), queue: Vec::new(), nodes: 0, budget }
    }

    fn assign(&mut self, var: usize, x: u32) -> bool {
        if self.val[var] == UNSET {
            if !self.p.domain[var][x as usize] {
                return false;
            }
            self.val[var] = x;
            self.trail.push(var);
            self.queue.push(var);
            true
        } else {
            self.val[var] == x
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.val[v] = UNSET;
        }
        self.queue.clear();
    }

    fn propagate(&mut self) -> bool {
        while let Some(var) = self.queue.pop() {
            for &ci in &self.p.watch[var] {
                if !self.revise(ci) {
                    self.queue.clear();
                    return false;
                }
            }
        }
        true
    }

    fn revise(&mut self, ci: usize) -> bool {
        let c = &self.p.constraints[ci];
        let rel = &c.rel;
        let k = rel.arity;
        let mut vals = [0u32; 4];
        let mut all = true;
        for i in 0..k {
            vals[i] = self.val[c.vars[i]];
            all &= vals[i] != UNSET;
        }
        for (i, j, map) in &rel.pairs {
            if vals[*i] == UNSET || vals[*j] == UNSET {
                continue;
            }
            let e = map[vals[*i] as usize * rel.n + vals[*j] as usize];
            if e == NONE {
                return false;
            }
            if e == MULTI {
                continue;
            }
            let t = rel.tuples[e as usize];
            let vars = c.vars;
            for pos in 0..k {
                if !self.assign(vars[pos], t[pos]) {
                    return false;
                }
            }
            return true;
        }
        !all || rel.members.contains(&vals)
    }

    fn pick(&self, vars: &[usize]) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for &v in vars {
            if self.val[v] != UNSET {
                continue;
            }
            let score = self.p.watch[v]
                .iter()
                .filter(|&&ci| {
                    let c = &self.p.constraints[ci];
                    c.vars[..c.rel.arity].iter().any(|&u| self.val[u] != UNSET)
                })
                .count();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, v));
            }
        }
        best.map(|(_, v)| v)
    }

    fn tick(&mut self) -> Result<(), ColoringError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            Err(ColoringError::SizeBoundExceeded(self.budget))
        } else {
            Ok(())
        }
    }

    fn count(&mut self, comp: &[usize]) -> Result<u128, ColoringError> {
        let Some(var) = self.pick(comp) else { return Ok(1) };
        let mut total = 0;
        for x in 0..self.p.n as u32 {
            if !self.p.domain[var][x as usize] {
                continue;
            }
            self.tick()?;
            let mark = self.trail.len();
            if self.assign(var, x) && self.propagate() {
                total += self.count(comp)?;
            }
            self.undo(mark);
        }
        Ok(total)
    }

    /// Counts with the first branching level split across `threads` workers.
    fn count_parallel(&mut self, comp: &[usize], threads: usize) -> Result<u128, ColoringError> {
        let Some(var) = self.pick(comp) else { return Ok(1) };
        if threads <= 1 {
            return self.count(comp);
        }
        let values: Vec<u32> = (0..self.p.n as u32).filter(|&x| self.p.domain[var][x as usize]).collect();
        let results: Vec<Result<u128, ColoringError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    let mut st = self.clone();
                    let mine: Vec<u32> = values.iter().copied().skip(w).step_by(threads).collect();
                    scope.spawn(move || {
                        let mut total = 0;
                        for x in mine {
                            st.tick()?;
                            let mark = st.trail.len();
                            if st.assign(var, x) && st.propagate() {
                                total += st.count(comp)?;
                            }
                            st.undo(mark);
                        }
                        Ok(total)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        results.into_iter().sum()
    }

    fn each(&mut self, vars: &[usize], f: &mut dyn FnMut(&[u32])) -> Result<(), ColoringError> {
        let Some(var) = self.pick(vars) else {
            f(&self.val);
            return Ok(());
        };
        for x in 0..self.p.n as u32 {
            if !self.p.domain[var][x as usize] {
                continue;
            }
            self.tick()?;
            let mark = self.trail.len();
            if self.assign(var, x) && self.propagate() {
                self.each(vars, f)?;
            }
            self.undo(mark);
        }
        Ok(())
    }

    /// Assigns forced variables (singleton domains) and propagates.
    fn init(&mut self) -> bool {
        for v in 0..self.p.vars.len() {
            let mut allowed = (0..self.p.n).filter(|&x| self.p.domain[v][x]);
            match (allowed.next(), allowed.next()) {
                (None, _) => return false,
                (Some(x), None) if !self.assign(v, x as u32) => return false,
                _ => {}
            }
        }
        self.propagate()
    }
}

fn solve_count(p: &Problem, opts: EngineOptions) -> Result<u128, ColoringError> {
    let mut st = State::new(p, opts.budget);
    if !st.init() {
        return Ok(0);
    }
    let mut total: u128 = 1;
    for comp in p.components() {
        let c = st.count_parallel(&comp, opts.threads)?;
        total = total.checked_mul(c).ok_or(ColoringError::Structure("count overflows u128".into()))?;
        if total == 0 {
            break;
        }
    }
    Ok(total)
}

fn solve_each(p: &Problem, opts: EngineOptions, f: &mut dyn FnMut(&[u32])) -> Result<(), ColoringError> {
    let mut st = State::new(p, opts.budget);
    if !st.init() {
        return Ok(());
    }
    let all: Vec<usize> = (0..p.vars.len()).collect();
    st.each(&all, f)
}

fn solve_list(p: &Problem, opts: EngineOptions) -> Result<Vec<Coloring>, ColoringError> {
    let mut raw: Vec<Vec<u32>> = Vec::new();
    solve_each(p, opts, &mut |v| raw.push(v.to_vec()))?;
    raw.sort();
    Ok(raw.iter().map(|v| p.to_coloring(v)).collect())
}

fn no_restriction(_: &str, _: usize) -> bool {
    true
}

// ---------------------------------------------------------------------------
// Public operations

/// Number of colorings of `d` by `target`.
pub fn count_colorings(d: &Diagram, target: Target<'_>, opts: EngineOptions) -> Result<u128, ColoringError> {
    solve_count(&build_problem(d, target, &no_restriction), opts)
}

/// All colorings in canonical order (lexicographic in the variable vector).
pub fn list_colorings(d: &Diagram, target: Target<'_>, opts: EngineOptions) -> Result<Vec<Coloring>, ColoringError> {
    solve_list(&build_problem(d, target, &no_restriction), opts)
}

fn report(d: &Diagram, target: Target<'_>, list: bool, opts: EngineOptions) -> Result<ColoringSetReport, ColoringError> {
    let p = build_problem(d, target, &no_restriction);
    let count = solve_count(&p, opts)?;
    let list = if list { Some(solve_list(&p, opts)?) } else { None };
    Ok(ColoringSetReport { count, list, ..Default::default() })
}

/// MCQ colorings (one color per arc).
pub fn enumerate_colorings_mcq(
    d: &Diagram,
    x: &Mcq,
    list: bool,
    opts: EngineOptions,
) -> Result<ColoringSetReport, ColoringError> {
    report(d, Target::Mcq(x), list, opts)
}

/// MCB colorings (one color per semi-arc).
pub fn enumerate_colorings_mcb(
    d: &Diagram,
    x: &Mcb,
    list: bool,
    opts: EngineOptions,
) -> Result<ColoringSetReport, ColoringError> {
    report(d, Target::Mcb(x), list, opts)
}

/// All G-flows in canonical order.
pub fn enumerate_flows(d: &Diagram, g: &FiniteGroup, opts: EngineOptions) -> Result<Vec<Flow>, ColoringError> {
    list_colorings(d, Target::Flows(g), opts)
}

/// Whether `c` assigns a value to every semi-arc and satisfies every rule,
/// checked directly from the definitions.
pub fn is_valid_coloring(d: &Diagram, target: Target<'_>, c: &Coloring) -> bool {
    let ids = d.semiarcs();
    if ids.len() != c.len() || !ids.iter().all(|s| c.get(s).is_some_and(|&v| v < target.size())) {
        return false;
    }
    let at = |s: &String| c[s];
    let crossings_ok = d.crossings().all(|x| {
        let (oi, oo, ui, uo) = (at(&x.over_in), at(&x.over_out), at(&x.under_in), at(&x.under_out));
        match (target, x.sign) {
            (Target::Mcq(q), Sign::Positive) => oi == oo && uo == q.star(ui, oi),
            (Target::Mcq(q), Sign::Negative) => oi == oo && ui == q.star(uo, oi),
            (Target::Flows(g), Sign::Positive) => oi == oo && uo == g.conj(ui, oi),
            (Target::Flows(g), Sign::Negative) => oi == oo && ui == g.conj(uo, oi),
            (Target::Mcb(b), Sign::Positive) => uo == b.under(ui, oo) && oi == b.over(oo, ui),
            (Target::Mcb(b), Sign::Negative) => ui == b.under(uo, oi) && oo == b.over(oi, uo),
        }
    });
    let vertices_ok = d.vertices().all(|v| {
        let (e1, e2, e3) = (at(&v.e1), at(&v.e2), at(&v.e3));
        match target {
            Target::Mcq(q) => q.blocks().mul(e1, e2) == Some(e3),
            Target::Flows(g) => g.mul(e1, e2) == e3,
            Target::Mcb(b) => {
                let bl = b.blocks();
                bl.same_block(e1, e3) && bl.mul(bl.inv(e1), e3).is_some_and(|y| b.over(y, e1) == e2)
            }
        }
    });
    crossings_ok && vertices_ok
}

/// Exhaustive count over all assignments (per arc for MCQs and flows, per
/// semi-arc for MCBs), or `None` when the search space exceeds `bound`.
pub fn brute_force_count(
    d: &Diagram,
    target: Target<'_>,
    restrict: &dyn Fn(&str, usize) -> bool,
    bound: u128,
) -> Option<u128> {
    let groups: Vec<Vec<String>> =
        if target.on_arcs() { d.arcs().members() } else { d.semiarcs().into_iter().map(|s| vec![s]).collect() };
    let n = target.size();
    let choices: Vec<Vec<usize>> =
        groups.iter().map(|ms| (0..n).filter(|&x| ms.iter().all(|s| restrict(s, x))).collect()).collect();
    let mut space: u128 = 1;
    for c in &choices {
        space = space.checked_mul(c.len() as u128)?;
    }
    if space > bound {
        return None;
    }
    if space == 0 {
        return Some(0);
    }
    let mut idx = vec![0usize; groups.len()];
    let mut count = 0;
    loop {
        let mut c = Coloring::new();
        for (g, ms) in groups.iter().enumerate() {
            for s in ms {
                c.insert(s.clone(), choices[g][idx[g]]);
            }
        }
        if is_valid_coloring(d, target, &c) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Some(count);
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Count restricted by a domain predicate (used for flow filtering).
pub fn count_restricted(
    d: &Diagram,
    target: Target<'_>,
    restrict: &dyn Fn(&str, usize) -> bool,
    opts: EngineOptions,
) -> Result<u128, ColoringError> {
    solve_count(&build_problem(d, target, restrict), opts)
}

/// A G-family of quandles or of biquandles.
#[derive(Debug, Clone, Copy)]
pub enum Family<'a> {
    Q(&'a GFamilyQ),
    B(&'a GFamilyB),
}

impl Family<'_> {
    pub fn group(&self) -> &FiniteGroup {
        match self {
            Family::Q(f) => f.group(),
            Family::B(f) => f.group(),
        }
    }
}

fn check_flow(d: &Diagram, g: &FiniteGroup, flow: &Flow) -> Result<(), ColoringError> {
    if is_valid_coloring(d, Target::Flows(g), flow) {
        Ok(())
    } else {
        let missing = d.semiarcs().into_iter().find(|s| !flow.contains_key(s));
        Err(ColoringError::FlowInvalid(match missing {
            Some(s) => format!("no value for semi-arc {s}"),
            None => "flow rules violated".into(),
        }))
    }
}

/// Colorings by the associated MCQ/MCB whose group component is `flow`.
pub fn colorings_by_flow(
    d: &Diagram,
    family: Family<'_>,
    flow: &Flow,
    list: bool,
    opts: EngineOptions,
) -> Result<ColoringSetReport, ColoringError> {
    let g = family.group();
    check_flow(d, g, flow)?;
    let k = g.order();
    let restrict = |s: &str, x: usize| x % k == flow[s];
    let (q, b);
    let target = match family {
        Family::Q(f) => {
            q = f.associated_mcq();
            Target::Mcq(&q)
        }
        Family::B(f) => {
            b = f.associated_mcb();
            Target::Mcb(&b)
        }
    };
    let p = build_problem(d, target, &restrict);
    let count = solve_count(&p, opts)?;
    let list = if list { Some(solve_list(&p, opts)?) } else { None };
    Ok(ColoringSetReport { count, list, ..Default::default() })
}

/// Per-flow counts of associated-structure colorings; `count` is their sum.
pub fn colorings_per_flow(d: &Diagram, family: Family<'_>, opts: EngineOptions) -> Result<ColoringSetReport, ColoringError> {
    let flows = enumerate_flows(d, family.group(), opts)?;
    let mut per_flow = Vec::new();
    let mut count = 0;
    for f in flows {
        let c = colorings_by_flow(d, family, &f, false, opts)?.count;
        count += c;
        per_flow.push((f, c));
    }
    Ok(ColoringSetReport { count, per_flow: Some(per_flow), ..Default::default() })
}

/// Solves the coloring conditions of `(D, flow)` for an Alexander family as a
/// homogeneous linear system over its ring.
pub fn linear_colorings(d: &Diagram, family: Family<'_>, flow: &Flow) -> Result<ColoringSetReport, ColoringError> {
    let g = family.group();
    check_flow(d, g, flow)?;
    let data = match family {
        Family::Q(f) => f.alexander(),
        Family::B(f) => f.alexander(),
    }
    .ok_or(ColoringError::NotAlexander)?;
    let ring = &data.ring;
    let pows = |u: &RingElement| (0..data.n).map(|i| ring.pow(u, i as u64)).collect::<Vec<_>>();
    let t = pows(&data.t);
    let s = data.s.as_ref().map(pows);
    // unknowns: arcs (quandle family) or semi-arcs (biquandle family)
    let (names, var_of): (Vec<String>, BTreeMap<String, usize>) = match family {
        Family::Q(_) => {
            let arcs = d.arcs();
            let members = arcs.members();
            (members.iter().map(|m| m[0].clone()).collect(), arcs.arc_of.clone())
        }
        Family::B(_) => {
            let ids: Vec<String> = d.semiarcs().into_iter().collect();
            let var_of = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
            (ids, var_of)
        }
    };
    let cols = names.len();
    let mut rows: Vec<Vec<RingElement>> = Vec::new();
    // adds the row Σ coef·x_var = 0
    let mut equation = |terms: &[(&String, RingElement)]| {
        let mut row = vec![ring.zero(); cols];
        for (id, coef) in terms {
            let v = var_of[*id];
            row[v] = ring.add(&row[v], coef);
        }
        rows.push(row);
    };
    let one = ring.one();
    let neg = |a: &RingElement| ring.neg(a);
    for c in d.crossings() {
        // (out, in, over) of the under strand in the direction of the rule
        let (out, inn, o_for_under) = match c.sign {
            Sign::Positive => (&c.under_out, &c.under_in, &c.over_out),
            Sign::Negative => (&c.under_in, &c.under_out, &c.over_in),
        };
        let gi = flow[o_for_under];
        match &s {
            None => {
                let u = &t[gi];
                equation(&[(out, one.clone()), (inn, neg(u)), (o_for_under, neg(&ring.sub(&one, u)))]);
            }
            Some(s) => {
                let diff = ring.sub(&s[gi], &t[gi]);
                equation(&[(out, one.clone()), (inn, neg(&t[gi])), (o_for_under, neg(&diff))]);
                // the other over piece is s^{φ(inn)} times the rule's over piece
                let (other, k) = match c.sign {
                    Sign::Positive => (&c.over_in, flow[&c.under_in]),
                    Sign::Negative => (&c.over_out, flow[&c.under_out]),
                };
                equation(&[(other, one.clone()), (o_for_under, neg(&s[k]))]);
            }
        }
    }
    for v in d.vertices() {
        match &s {
            None => {
                equation(&[(&v.e1, one.clone()), (&v.e3, neg(&one))]);
                equation(&[(&v.e2, one.clone()), (&v.e3, neg(&one))]);
            }
            Some(s) => {
                equation(&[(&v.e3, one.clone()), (&v.e1, neg(&one))]);
                equation(&[(&v.e2, one.clone()), (&v.e1, neg(&s[flow[&v.e1]]))]);
            }
        }
    }
    let b = vec![ring.zero(); rows.len()];
    let sol = solve_linear(ring, cols, &rows, &b)?;
    Ok(ColoringSetReport {
        count: sol.cardinality,
        module_info: Some(ModuleInfo { unknowns: names, dimension: sol.dimension, basis: sol.basis }),
        ..Default::default()
    })
}

/// Counts of `Col_X(D)` and `Col_{Q(X)}(D)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceReport {
    pub count_mcb: u128,
    pub count_mcq: u128,
    pub equal: bool,
}

/// Compares `|Col_X(D)|` with `|Col_{Q(X)}(D)|`.
pub fn verify_correspondence(d: &Diagram, x: &Mcb, opts: EngineOptions) -> Result<CorrespondenceReport, ColoringError> {
    let q = q_functor_mcb(x).map_err(|e| ColoringError::Structure(e.to_string()))?;
    verify_against(d, x, &q, opts)
}

/// Compares `|Col_X(D)|` with `|Col_Y(D)|` for an explicitly given MCQ `Y`.
pub fn verify_against(d: &Diagram, x: &Mcb, y: &Mcq, opts: EngineOptions) -> Result<CorrespondenceReport, ColoringError> {
    let count_mcb = count_colorings(d, Target::Mcb(x), opts)?;
    let count_mcq = count_colorings(d, Target::Mcq(y), opts)?;
    Ok(CorrespondenceReport { count_mcb, count_mcq, equal: count_mcb == count_mcq })
}

/// Per-flow comparison for an associated MCB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowComparison {
    pub flow: Flow,
    pub count_b: u128,
    pub count_q: u128,
    /// Module dimensions (biquandle family, quandle family) in the field case.
    pub dims: Option<(Option<usize>, Option<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCorrespondence {
    pub total: CorrespondenceReport,
    pub per_flow: Vec<FlowComparison>,
    pub all_equal: bool,
}

/// The correspondence for the associated MCB of a biquandle family, flow by
/// flow, against the associated MCQ of its quandle family; Alexander families
/// additionally compare module dimensions.
pub fn verify_family_correspondence(
    d: &Diagram,
    f: &GFamilyB,
    opts: EngineOptions,
) -> Result<FamilyCorrespondence, ColoringError> {
    let fq = f.qg_map();
    let total = verify_correspondence(d, &f.associated_mcb(), opts)?;
    let mut per_flow = Vec::new();
    let mut all_equal = total.equal;
    for flow in enumerate_flows(d, f.group(), opts)? {
        let count_b = colorings_by_flow(d, Family::B(f), &flow, false, opts)?.count;
        let count_q = colorings_by_flow(d, Family::Q(&fq), &flow, false, opts)?.count;
        let dims = if f.alexander().is_some_and(|a| a.ring.is_field()) {
            let db = linear_colorings(d, Family::B(f), &flow)?.module_info.and_then(|m| m.dimension);
            let dq = linear_colorings(d, Family::Q(&fq), &flow)?.module_info.and_then(|m| m.dimension);
            all_equal &= db == dq;
            Some((db, dq))
        } else {
            None
        };
        all_equal &= count_b == count_q;
        per_flow.push(FlowComparison { flow, count_b, count_q, dims });
    }
    Ok(FamilyCorrespondence { total, per_flow, all_equal })
}

/// Whether colorings of an open diagram are determined by their values on
/// the top boundary semi-arcs.
pub fn braid_boundary_determinism(d: &Diagram, target: Target<'_>, opts: EngineOptions) -> Result<bool, ColoringError> {
    if !d.is_open() {
        return Err(ColoringError::NotBraidShaped);
    }
    let p = build_problem(d, target, &no_restriction);
    let top: Vec<usize> = d.top().iter().map(|s| p.var_of[s]).collect();
    let mut seen = HashSet::new();
    let mut injective = true;
    solve_each(&p, opts, &mut |v| {
        let key: Vec<u32> = top.iter().map(|&i| v[i]).collect();
        injective &= seen.insert(key);
    })?;
    Ok(injective)
}

/// The unique coloring of the rewritten diagram that agrees with `c` outside
/// the move site.
pub fn transport_coloring(
    d: &Diagram,
    site: &MoveSite,
    c: &Coloring,
    target: Target<'_>,
    opts: EngineOptions,
) -> Result<(Diagram, Coloring), ColoringError> {
    let out = apply_move_detailed(d, site)?;
    let fixed: BTreeMap<String, usize> = out
        .diagram
        .semiarcs()
        .into_iter()
        .filter(|s| !out.interior.contains(s))
        .map(|s| {
            let src = out.inherit.get(&s).unwrap_or(&s);
            let v = c[src];
            (s, v)
        })
        .collect();
    let restrict = |s: &str, x: usize| fixed.get(s).is_none_or(|&v| v == x);
    let p = build_problem(&out.diagram, target, &restrict);
    let found = solve_list(&p, opts)?;
    if found.len() != 1 {
        return Err(ColoringError::TransportFailed(found.len()));
    }
    Ok((out.diagram, found.into_iter().next().unwrap()))
}
