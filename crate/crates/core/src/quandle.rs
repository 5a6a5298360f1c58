//! Quandles and biquandles stored as operation tables on `[0, n)`.
//!
//! Alexander structures are built over a [`FiniteRing`]; carrier element `i`
//! is the ring element with dense index `i` (see [`FiniteRing::element_at`]).

use thiserror::Error;

use crate::axioms::{column_injective, pair_map_injective, run_laws, Axiom, AxiomReport, CheckMode, Law};
use crate::ring::{FiniteRing, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("carrier must be non-empty")]
    Empty,
    #[error("table row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("table has {rows} rows, expected {n}")]
    RowCount { rows: usize, n: usize },
    #[error("entry ({row},{col}) = {value} is outside [0,{n})")]
    OutOfRange { row: usize, col: usize, value: usize, n: usize },
    #[error("operation `{0}` is not invertible in its first argument")]
    NotInvertible(&'static str),
    #[error("pair map is not a bijection")]
    PairMapNotBijective,
    #[error("orbit of ({0},{1}) under the bracket-power step is not periodic")]
    NotPeriodic(usize, usize),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("unit {unit} has order {order}, which does not divide {n}")]
    OrderMismatch { unit: RingElement, order: u64, n: usize },
    #[error("{0}")]
    Malformed(String),
}

/// Dense `n × n` table of a binary operation, `get(a, b) = a ∘ b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    n: usize,
    data: Vec<usize>,
}

impl Table {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                data.push(f(a, b));
            }
        }
        Table { n, data }
    }

    /// Validates shape and range.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, StructureError> {
        let n = rows.len();
        if n == 0 {
            return Err(StructureError::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(StructureError::NotSquare { row, len: r.len(), n });
            }
            for (col, &value) in r.iter().enumerate() {
                if value >= n {
                    return Err(StructureError::OutOfRange { row, col, value, n });
                }
                data.push(value);
            }
        }
        Ok(Table { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.data[a * self.n + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: usize) {
        self.data[a * self.n + b] = v;
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.data.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    /// Inverse in the first argument: `inv.get(a ∘ b, b) = a`, when every
    /// column map `a ↦ a ∘ b` is a bijection.
    pub fn left_inverse(&self) -> Option<Table> {
        let n = self.n;
        let mut data = vec![usize::MAX; n * n];
        for b in 0..n {
            for a in 0..n {
                let c = self.get(a, b);
                if data[c * n + b] != usize::MAX {
                    return None;
                }
                data[c * n + b] = a;
            }
        }
        Some(Table { n, data })
    }
}

/// A finite quandle `(X, *)` (not necessarily valid until checked).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quandle {
    table: Table,
    inv: Option<Table>,
}

impl Quandle {
    pub fn new(table: Table) -> Self {
        let inv = table.left_inverse();
        Quandle { table, inv }
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, StructureError> {
        Ok(Self::new(Table::from_rows(rows)?))
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        Self::new(Table::from_fn(n, f))
    }

    /// Trivial quandle `a * b = a`.
    pub fn trivial(n: usize) -> Self {
        Self::from_fn(n, |a, _| a)
    }

    /// Dihedral quandle `a * b = 2b − a mod n`.
    pub fn dihedral(n: usize) -> Self {
        Self::from_fn(n, |a, b| (2 * b + n - a) % n)
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table.get(a, b)
    }

    /// `a *^{-1} b`.
    pub fn op_inv(&self, a: usize, b: usize) -> Result<usize, StructureError> {
        self.inv.as_ref().map(|t| t.get(a, b)).ok_or(StructureError::NotInvertible("*"))
    }

    /// `a *^k b` for any integer `k`.
    pub fn op_pow(&self, mut a: usize, b: usize, k: i64) -> Result<usize, StructureError> {
        for _ in 0..k.unsigned_abs() {
            a = if k > 0 { self.op(a, b) } else { self.op_inv(a, b)? };
        }
        Ok(a)
    }

    pub fn laws(&self) -> Vec<Law<'_>> {
        let n = self.n();
        let t = &self.table;
        vec![
            Law::new(Axiom::Idempotence, vec![n], move |v| t.get(v[0], v[0]) == v[0]),
            column_injective(Axiom::RightInvertibility, n, move |a, b| t.get(a, b)),
            Law::new(Axiom::SelfDistributivity, vec![n, n, n], move |v| {
                let (x, y, z) = (v[0], v[1], v[2]);
                t.get(t.get(x, y), z) == t.get(t.get(x, z), t.get(y, z))
            }),
        ]
    }

    pub fn check(&self) -> AxiomReport {
        self.check_with(CheckMode::Full)
    }

    pub fn check_with(&self, mode: CheckMode) -> AxiomReport {
        run_laws(&self.laws(), mode)
    }

    /// Least `n ≥ 1` with `a *^n b = a` for all `a, b`: the lcm over `b` of
    /// the cycle lengths of `a ↦ a * b`.
    pub fn type_of(&self) -> Result<u64, StructureError> {
        let n = self.n();
        let mut acc = 1u64;
        for b in 0..n {
            let perm: Vec<usize> = (0..n).map(|a| self.op(a, b)).collect();
            acc = lcm(acc, permutation_order(&perm).ok_or(StructureError::NotInvertible("*"))?);
        }
        Ok(acc)
    }
}

/// Which operation of a biquandle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Under,
    Over,
}

/// A finite biquandle `(X, ⊻, ⊼)` (not necessarily valid until checked).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Biquandle {
    under: Table,
    over: Table,
    under_inv: Option<Table>,
    over_inv: Option<Table>,
}

impl Biquandle {
    pub fn new(under: Table, over: Table) -> Result<Self, StructureError> {
        if under.n != over.n {
            return Err(StructureError::Malformed(format!(
                "under table has size {}, over table has size {}",
                under.n, over.n
            )));
        }
        let under_inv = under.left_inverse();
        let over_inv = over.left_inverse();
        Ok(Biquandle { under, over, under_inv, over_inv })
    }

    /// The biquandle `(X, *, x ⊼ y = x)` of a quandle.
    pub fn from_quandle(q: &Quandle) -> Self {
        let n = q.n();
        Self::new(q.table.clone(), Table::from_fn(n, |a, _| a)).expect("same size")
    }

    pub fn n(&self) -> usize {
        self.under.n
    }

    pub fn under_table(&self) -> &Table {
        &self.under
    }

    pub fn over_table(&self) -> &Table {
        &self.over
    }

    #[inline]
    pub fn under(&self, a: usize, b: usize) -> usize {
        self.under.get(a, b)
    }

    #[inline]
    pub fn over(&self, a: usize, b: usize) -> usize {
        self.over.get(a, b)
    }

    pub fn under_inv(&self, a: usize, b: usize) -> Result<usize, StructureError> {
        self.under_inv.as_ref().map(|t| t.get(a, b)).ok_or(StructureError::NotInvertible("under"))
    }

    pub fn over_inv(&self, a: usize, b: usize) -> Result<usize, StructureError> {
        self.over_inv.as_ref().map(|t| t.get(a, b)).ok_or(StructureError::NotInvertible("over"))
    }

    pub fn op(&self, side: Side, a: usize, b: usize) -> usize {
        match side {
            Side::Under => self.under(a, b),
            Side::Over => self.over(a, b),
        }
    }

    fn op_inv(&self, side: Side, a: usize, b: usize) -> Result<usize, StructureError> {
        match side {
            Side::Under => self.under_inv(a, b),
            Side::Over => self.over_inv(a, b),
        }
    }

    /// `S(x, y) = (y ⊼ x, x ⊻ y)`.
    pub fn pair_map(&self, x: usize, y: usize) -> (usize, usize) {
        (self.over(y, x), self.under(x, y))
    }

    pub fn laws(&self) -> Vec<Law<'_>> {
        biquandle_laws(self.n(), move |a, b| self.under(a, b), move |a, b| self.over(a, b))
    }

    pub fn check(&self) -> AxiomReport {
        self.check_with(CheckMode::Full)
    }

    pub fn check_with(&self, mode: CheckMode) -> AxiomReport {
        run_laws(&self.laws(), mode)
    }

    /// Inverse of the diagonal map `b ↦ b ⊻ b`.
    fn diagonal_inverse(&self, b: usize) -> Result<usize, StructureError> {
        let mut found = None;
        for c in 0..self.n() {
            if self.under(c, c) == b {
                if found.is_some() {
                    return Err(StructureError::NotInvertible("diagonal"));
                }
                found = Some(c);
            }
        }
        found.ok_or(StructureError::NotInvertible("diagonal"))
    }

    /// Bracket power `a ⊻^{[n]} b` (or `a ⊼^{[n]} b`) for any integer `n`.
    ///
    /// Uses the step `(a, b) ↦ (a ∘ b, b ⊻ b)`, whose inverse is
    /// `(a, b) ↦ (a ∘^{-1} β, β)` with `β ⊻ β = b`.
    pub fn bracket_pow(&self, mut a: usize, mut b: usize, n: i64, side: Side) -> Result<usize, StructureError> {
        if n >= 0 {
            for _ in 0..n {
                a = self.op(side, a, b);
                b = self.under(b, b);
            }
        } else {
            for _ in 0..n.unsigned_abs() {
                let beta = self.diagonal_inverse(b)?;
                a = self.op_inv(side, a, beta)?;
                b = beta;
            }
        }
        Ok(a)
    }

    /// Least `n ≥ 1` with `a ⊻^{[n]} b = a = a ⊼^{[n]} b` for all `a, b`,
    /// computed as the lcm of the per-pair cycle lengths of both step maps.
    pub fn type_of(&self) -> Result<u64, StructureError> {
        let n = self.n();
        let mut acc = 1u64;
        for side in [Side::Under, Side::Over] {
            let step: Vec<usize> = (0..n * n)
                .map(|p| {
                    let (a, b) = (p / n, p % n);
                    self.op(side, a, b) * n + self.under(b, b)
                })
                .collect();
            let order = permutation_order(&step).ok_or_else(|| {
                let p = first_non_periodic(&step).unwrap_or(0);
                StructureError::NotPeriodic(p / n, p % n)
            })?;
            acc = lcm(acc, order);
        }
        Ok(acc)
    }
}

/// Biquandle axioms for arbitrary `⊻`/`⊼` closures on `[0, n)`.
pub(crate) fn biquandle_laws<'a>(
    n: usize,
    under: impl Fn(usize, usize) -> usize + Copy + 'a,
    over: impl Fn(usize, usize) -> usize + Copy + 'a,
) -> Vec<Law<'a>> {
    vec![
        Law::new(Axiom::Diagonal, vec![n], move |v| under(v[0], v[0]) == over(v[0], v[0])),
        column_injective(Axiom::UnderInvertibility, n, under),
        column_injective(Axiom::OverInvertibility, n, over),
        pair_map_injective(Axiom::PairMapBijectivity, n, move |x, y| (over(y, x), under(x, y))),
        Law::new(Axiom::ExchangeUnderUnder, vec![n, n, n], move |v| {
            let (x, y, z) = (v[0], v[1], v[2]);
            under(under(x, y), under(z, y)) == under(under(x, z), over(y, z))
        }),
        Law::new(Axiom::ExchangeOverUnder, vec![n, n, n], move |v| {
            let (x, y, z) = (v[0], v[1], v[2]);
            over(under(x, y), under(z, y)) == under(over(x, z), over(y, z))
        }),
        Law::new(Axiom::ExchangeOverOver, vec![n, n, n], move |v| {
            let (x, y, z) = (v[0], v[1], v[2]);
            over(over(x, y), over(z, y)) == over(over(x, z), under(y, z))
        }),
    ]
}

/// Alexander quandle `a * b = t·a + (1 − t)·b` on the elements of `ring`.
pub fn alexander_quandle(ring: &FiniteRing, t: &RingElement) -> Result<Quandle, StructureError> {
    ring.inverse(t)?;
    let one_minus_t = ring.sub(&ring.one(), t);
    let elems: Vec<RingElement> = ring.elements().collect();
    Ok(Quandle::from_fn(ring.size(), |a, b| {
        let v = ring.add(&ring.mul(t, &elems[a]), &ring.mul(&one_minus_t, &elems[b]));
        ring.index_of(&v)
    }))
}

/// Alexander biquandle `a ⊻ b = t·a + (s − t)·b`, `a ⊼ b = s·a`.
pub fn alexander_biquandle(ring: &FiniteRing, s: &RingElement, t: &RingElement) -> Result<Biquandle, StructureError> {
    ring.inverse(s)?;
    ring.inverse(t)?;
    Ok(alexander_biquandle_unchecked(ring, s, t))
}

/// The Alexander tables without the unit checks (used to exhibit the
/// invalid non-unit case).
pub fn alexander_biquandle_unchecked(ring: &FiniteRing, s: &RingElement, t: &RingElement) -> Biquandle {
    let s_minus_t = ring.sub(s, t);
    let elems: Vec<RingElement> = ring.elements().collect();
    let under = Table::from_fn(ring.size(), |a, b| {
        ring.index_of(&ring.add(&ring.mul(t, &elems[a]), &ring.mul(&s_minus_t, &elems[b])))
    });
    let over = Table::from_fn(ring.size(), |a, _| ring.index_of(&ring.mul(s, &elems[a])));
    Biquandle::new(under, over).expect("tables share a size")
}

/// Type of an Alexander quandle: the multiplicative order of `t`.
pub fn alexander_quandle_type(ring: &FiniteRing, t: &RingElement) -> Result<u64, StructureError> {
    Ok(ring.unit_order(t)?)
}

/// Type of an Alexander biquandle: `lcm(order(s), order(t))`.
pub fn alexander_biquandle_type(ring: &FiniteRing, s: &RingElement, t: &RingElement) -> Result<u64, StructureError> {
    Ok(lcm(ring.unit_order(s)?, ring.unit_order(t)?))
}

/// The quandle `x * y = (x ⊻ y) ⊼^{-1} y`.
pub fn q_functor_biquandle(b: &Biquandle) -> Result<Quandle, StructureError> {
    let n = b.n();
    let mut rows = vec![vec![0; n]; n];
    for (x, row) in rows.iter_mut().enumerate() {
        for (y, slot) in row.iter_mut().enumerate() {
            *slot = b.over_inv(b.under(x, y), y)?;
        }
    }
    Quandle::from_rows(&rows)
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / crate::ring::gcd(a, b) * b
}

/// Order of a permutation given as an image vector; `None` if not a bijection.
pub(crate) fn permutation_order(perm: &[usize]) -> Option<u64> {
    let mut seen = vec![false; perm.len()];
    let mut image_hit = vec![false; perm.len()];
    for &p in perm {
        if image_hit[p] {
            return None;
        }
        image_hit[p] = true;
    }
    let mut acc = 1u64;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = perm[cur];
            len += 1;
        }
        acc = lcm(acc, len);
    }
    Some(acc)
}

fn first_non_periodic(map: &[usize]) -> Option<usize> {
    (0..map.len()).find(|&start| {
        let mut cur = map[start];
        for _ in 0..map.len() {
            if cur == start {
                return false;
            }
            cur = map[cur];
        }
        true
    })
}
