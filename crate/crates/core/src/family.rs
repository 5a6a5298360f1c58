//! G-families of quandles and biquandles, their associated MCQs/MCBs, and the
//! passage from biquandle families to quandle families.
//!
//! Operations are stored as one table per group element. Associated
//! structures live on `X × G` with `(x, g)` at index `x·|G| + g`.

use crate::axioms::{run_laws, Axiom, AxiomReport, CheckMode, Law};
use crate::group::FiniteGroup;
use crate::mcq::{q_functor_mcb, Blocks, Mcb, Mcq};
use crate::quandle::{Biquandle, Quandle, Side, StructureError, Table};
use crate::ring::{FiniteRing, RingElement};

/// Parameters of a cyclic Alexander family over a finite ring: `Z_n` acts on
/// `R` through powers of `t`; `s` is the over-unit (absent for quandle families).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlexanderData {
    pub ring: FiniteRing,
    pub n: usize,
    pub t: RingElement,
    pub s: Option<RingElement>,
}

/// A G-family of quandles `(X, {*^g})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GFamilyQ {
    n: usize,
    group: FiniteGroup,
    ops: Vec<Table>,
    alexander: Option<AlexanderData>,
}

/// A G-family of biquandles `(X, {⊻^g}, {⊼^g})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GFamilyB {
    n: usize,
    group: FiniteGroup,
    under: Vec<Table>,
    over: Vec<Table>,
    alexander: Option<AlexanderData>,
}

fn check_tables(tables: &[Table], group: &FiniteGroup) -> Result<usize, StructureError> {
    if tables.len() != group.order() {
        return Err(StructureError::Malformed(format!(
            "{} operation tables for a group of order {}",
            tables.len(),
            group.order()
        )));
    }
    let n = tables.first().map(Table::n).ok_or(StructureError::Empty)?;
    if let Some(t) = tables.iter().find(|t| t.n() != n) {
        return Err(StructureError::Malformed(format!("tables of sizes {n} and {}", t.n())));
    }
    Ok(n)
}

impl GFamilyQ {
    pub fn new(group: FiniteGroup, ops: Vec<Table>) -> Result<Self, StructureError> {
        let n = check_tables(&ops, &group)?;
        Ok(GFamilyQ { n, group, ops, alexander: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn table(&self, g: usize) -> &Table {
        &self.ops[g]
    }

    pub fn alexander(&self) -> Option<&AlexanderData> {
        self.alexander.as_ref()
    }

    /// `x *^g y`.
    #[inline]
    pub fn op(&self, g: usize, x: usize, y: usize) -> usize {
        self.ops[g].get(x, y)
    }

    pub fn laws(&self) -> Vec<Law<'_>> {
        let (n, k) = (self.n, self.group.order());
        let g = &self.group;
        let op = move |h: usize, x: usize, y: usize| self.ops[h].get(x, y);
        vec![
            Law::new(Axiom::FamilyIdempotence, vec![n, k], move |v| op(v[1], v[0], v[0]) == v[0]),
            Law::new(Axiom::FamilyProduct, vec![n, n, k, k], move |v| {
                let (x, y, a, b) = (v[0], v[1], v[2], v[3]);
                op(g.mul(a, b), x, y) == op(b, op(a, x, y), y)
            }),
            Law::new(Axiom::FamilyIdentity, vec![n, n], move |v| op(g.identity(), v[0], v[1]) == v[0]),
            Law::new(Axiom::FamilyDistributivity, vec![n, n, n, k, k], move |v| {
                let (x, y, z, a, b) = (v[0], v[1], v[2], v[3], v[4]);
                op(b, op(a, x, y), z) == op(g.conj(a, b), op(b, x, z), op(b, y, z))
            }),
        ]
    }

    pub fn check(&self) -> AxiomReport {
        self.check_with(CheckMode::Full)
    }

    pub fn check_with(&self, mode: CheckMode) -> AxiomReport {
        run_laws(&self.laws(), mode)
    }

    /// Copy with one entry of `*^g` replaced.
    pub fn with_entry(&self, g: usize, x: usize, y: usize, v: usize) -> Self {
        let mut out = self.clone();
        out.ops[g].set(x, y, v);
        out.alexander = None;
        out
    }

    /// The associated MCQ on `X × G`: `(x,g)*(y,h) = (x *^h y, h^{-1}gh)`.
    pub fn associated_mcq(&self) -> Mcq {
        let k = self.group.order();
        let star = Table::from_fn(self.n * k, |p, q| {
            let (x, g, y, h) = (p / k, p % k, q / k, q % k);
            self.op(h, x, y) * k + self.group.conj(g, h)
        });
        Mcq::new(Blocks::product(self.n, &self.group), star).expect("sizes agree")
    }
}

impl GFamilyB {
    pub fn new(group: FiniteGroup, under: Vec<Table>, over: Vec<Table>) -> Result<Self, StructureError> {
        let n = check_tables(&under, &group)?;
        let n2 = check_tables(&over, &group)?;
        if n != n2 {
            return Err(StructureError::Malformed(format!("under tables have size {n}, over tables {n2}")));
        }
        Ok(GFamilyB { n, group, under, over, alexander: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn under_table(&self, g: usize) -> &Table {
        &self.under[g]
    }

    pub fn over_table(&self, g: usize) -> &Table {
        &self.over[g]
    }

    pub fn alexander(&self) -> Option<&AlexanderData> {
        self.alexander.as_ref()
    }

    /// `x ⊻^g y`.
    #[inline]
    pub fn under(&self, g: usize, x: usize, y: usize) -> usize {
        self.under[g].get(x, y)
    }

    /// `x ⊼^g y`.
    #[inline]
    pub fn over(&self, g: usize, x: usize, y: usize) -> usize {
        self.over[g].get(x, y)
    }

    pub fn laws(&self) -> Vec<Law<'_>> {
        let (n, k) = (self.n, self.group.order());
        let g = &self.group;
        let u = move |h: usize, x: usize, y: usize| self.under[h].get(x, y);
        let o = move |h: usize, x: usize, y: usize| self.over[h].get(x, y);
        vec![
            Law::new(Axiom::FamilyDiagonal, vec![n, k], move |v| u(v[1], v[0], v[0]) == o(v[1], v[0], v[0])),
            Law::new(Axiom::FamilyUnderProduct, vec![n, n, k, k], move |v| {
                let (x, y, a, b) = (v[0], v[1], v[2], v[3]);
                u(g.mul(a, b), x, y) == u(b, u(a, x, y), u(a, y, y))
            }),
            Law::new(Axiom::FamilyUnderIdentity, vec![n, n], move |v| u(g.identity(), v[0], v[1]) == v[0]),
            Law::new(Axiom::FamilyOverProduct, vec![n, n, k, k], move |v| {
                let (x, y, a, b) = (v[0], v[1], v[2], v[3]);
                o(g.mul(a, b), x, y) == o(b, o(a, x, y), u(a, y, y))
            }),
            Law::new(Axiom::FamilyOverIdentity, vec![n, n], move |v| o(g.identity(), v[0], v[1]) == v[0]),
            Law::new(Axiom::FamilyExchangeUnderUnder, vec![n, n, n, k, k], move |v| {
                let (x, y, z, a, b) = (v[0], v[1], v[2], v[3], v[4]);
                u(b, u(a, x, y), o(a, z, y)) == u(g.conj(a, b), u(b, x, z), u(b, y, z))
            }),
            Law::new(Axiom::FamilyExchangeOverUnder, vec![n, n, n, k, k], move |v| {
                let (x, y, z, a, b) = (v[0], v[1], v[2], v[3], v[4]);
                u(b, o(a, x, y), o(a, z, y)) == o(g.conj(a, b), u(b, x, z), u(b, y, z))
            }),
            Law::new(Axiom::FamilyExchangeOverOver, vec![n, n, n, k, k], move |v| {
                let (x, y, z, a, b) = (v[0], v[1], v[2], v[3], v[4]);
                o(b, o(a, x, y), o(a, z, y)) == o(g.conj(a, b), o(b, x, z), u(b, y, z))
            }),
        ]
    }

    pub fn check(&self) -> AxiomReport {
        self.check_with(CheckMode::Full)
    }

    pub fn check_with(&self, mode: CheckMode) -> AxiomReport {
        run_laws(&self.laws(), mode)
    }

    /// Copy with one entry of `⊻^g` (`over = false`) or `⊼^g` replaced.
    pub fn with_entry(&self, over: bool, g: usize, x: usize, y: usize, v: usize) -> Self {
        let mut out = self.clone();
        if over {
            out.over[g].set(x, y, v);
        } else {
            out.under[g].set(x, y, v);
        }
        out.alexander = None;
        out
    }

    /// The associated MCB on `X × G`:
    /// `(x,g) ⊻ (y,h) = (x ⊻^h y, h^{-1}gh)`, `(x,g) ⊼ (y,h) = (x ⊼^h y, g)`.
    pub fn associated_mcb(&self) -> Mcb {
        let k = self.group.order();
        let under = Table::from_fn(self.n * k, |p, q| {
            let (x, g, y, h) = (p / k, p % k, q / k, q % k);
            self.under(h, x, y) * k + self.group.conj(g, h)
        });
        let over = Table::from_fn(self.n * k, |p, q| {
            let (x, g, y, h) = (p / k, p % k, q / k, q % k);
            self.over(h, x, y) * k + g
        });
        Mcb::new(Blocks::product(self.n, &self.group), under, over).expect("sizes agree")
    }

    /// The quandle family `x *^g y = (x ⊻^g y) ⊼^{g^{-1}} (y ⊼^g y)`.
    pub fn qg_map(&self) -> GFamilyQ {
        let g = &self.group;
        let ops = (0..g.order())
            .map(|a| Table::from_fn(self.n, |x, y| self.over(g.inv(a), self.under(a, x, y), self.over(a, y, y))))
            .collect();
        let alexander = self.alexander.as_ref().map(|d| {
            let s = d.s.as_ref().expect("biquandle family data carries s");
            let s_inv = d.ring.inverse(s).expect("s is a unit");
            AlexanderData { ring: d.ring.clone(), n: d.n, t: d.ring.mul(&s_inv, &d.t), s: None }
        });
        GFamilyQ { n: self.n, group: g.clone(), ops, alexander }
    }
}

/// Whether `Q` of the associated MCB equals the associated MCQ of the
/// quandle family, entry by entry (blocks, groups and operation table).
pub fn verify_qg_compat(f: &GFamilyB) -> bool {
    match q_functor_mcb(&f.associated_mcb()) {
        Ok(q) => q == f.qg_map().associated_mcq(),
        Err(_) => false,
    }
}

fn unit_powers(ring: &FiniteRing, u: &RingElement, n: usize) -> Result<Vec<RingElement>, StructureError> {
    ring.inverse(u)?;
    let order = ring.unit_order(u)?;
    if n == 0 || !(n as u64).is_multiple_of(order) {
        return Err(StructureError::OrderMismatch { unit: u.clone(), order, n });
    }
    Ok((0..n).map(|i| ring.pow(u, i as u64)).collect())
}

/// The `Z_n`-family of Alexander quandles `x *^i y = u^i x + (1 − u^i) y`.
pub fn gfamily_alexander_q(ring: &FiniteRing, n: usize, u: &RingElement) -> Result<GFamilyQ, StructureError> {
    let powers = unit_powers(ring, u, n)?;
    let elems: Vec<RingElement> = ring.elements().collect();
    let ops = powers
        .iter()
        .map(|ui| {
            let rest = ring.sub(&ring.one(), ui);
            Table::from_fn(ring.size(), |x, y| {
                ring.index_of(&ring.add(&ring.mul(ui, &elems[x]), &ring.mul(&rest, &elems[y])))
            })
        })
        .collect();
    let mut f = GFamilyQ::new(FiniteGroup::cyclic(n), ops)?;
    f.alexander = Some(AlexanderData { ring: ring.clone(), n, t: u.clone(), s: None });
    Ok(f)
}

/// The `Z_n`-family of Alexander biquandles
/// `x ⊻^i y = t^i x + (s^i − t^i) y`, `x ⊼^i y = s^i x`.
pub fn gfamily_alexander_b(
    ring: &FiniteRing,
    n: usize,
    t: &RingElement,
    s: &RingElement,
) -> Result<GFamilyB, StructureError> {
    let t_pow = unit_powers(ring, t, n)?;
    let s_pow = unit_powers(ring, s, n)?;
    let elems: Vec<RingElement> = ring.elements().collect();
    let mut under = Vec::with_capacity(n);
    let mut over = Vec::with_capacity(n);
    for (ti, si) in t_pow.iter().zip(&s_pow) {
        let diff = ring.sub(si, ti);
        under.push(Table::from_fn(ring.size(), |x, y| {
            ring.index_of(&ring.add(&ring.mul(ti, &elems[x]), &ring.mul(&diff, &elems[y])))
        }));
        over.push(Table::from_fn(ring.size(), |x, _| ring.index_of(&ring.mul(si, &elems[x]))));
    }
    let mut f = GFamilyB::new(FiniteGroup::cyclic(n), under, over)?;
    f.alexander = Some(AlexanderData { ring: ring.clone(), n, t: t.clone(), s: Some(s.clone()) });
    Ok(f)
}

/// The `Z_{km}`-family `*^i = i`-fold `*`, where `m` is the type of `q`.
pub fn zkm_family_from_quandle(q: &Quandle, k: usize) -> Result<GFamilyQ, StructureError> {
    if k == 0 {
        return Err(StructureError::Malformed("k must be at least 1".into()));
    }
    let order = q.type_of()? as usize * k;
    let ops = (0..order)
        .map(|i| {
            let mut rows = vec![vec![0; q.n()]; q.n()];
            for (x, row) in rows.iter_mut().enumerate() {
                for (y, slot) in row.iter_mut().enumerate() {
                    *slot = q.op_pow(x, y, i as i64)?;
                }
            }
            Table::from_rows(&rows)
        })
        .collect::<Result<Vec<_>, _>>()?;
    GFamilyQ::new(FiniteGroup::cyclic(order), ops)
}

/// The `Z_{km}`-family of bracket powers `⊻^{[i]}`, `⊼^{[i]}`, where `m` is
/// the type of `b`.
pub fn zkm_family_from_biquandle(b: &Biquandle, k: usize) -> Result<GFamilyB, StructureError> {
    if k == 0 {
        return Err(StructureError::Malformed("k must be at least 1".into()));
    }
    let order = b.type_of()? as usize * k;
    let build = |side: Side, i: usize| -> Result<Table, StructureError> {
        let mut rows = vec![vec![0; b.n()]; b.n()];
        for (x, row) in rows.iter_mut().enumerate() {
            for (y, slot) in row.iter_mut().enumerate() {
                *slot = b.bracket_pow(x, y, i as i64, side)?;
            }
        }
        Table::from_rows(&rows)
    };
    let under = (0..order).map(|i| build(Side::Under, i)).collect::<Result<Vec<_>, _>>()?;
    let over = (0..order).map(|i| build(Side::Over, i)).collect::<Result<Vec<_>, _>>()?;
    GFamilyB::new(FiniteGroup::cyclic(order), under, over)
}

/// A biquandle family viewed through its quandle family lift
/// `x ⊻^g y = x *^g y`, `x ⊼^g y = x`.
pub fn lift_quandle_family(f: &GFamilyQ) -> GFamilyB {
    let trivial = Table::from_fn(f.n, |x, _| x);
    GFamilyB::new(f.group.clone(), f.ops.clone(), vec![trivial; f.group.order()]).expect("consistent sizes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9() -> FiniteRing {
        FiniteRing::new(3, &[2, 1, 1]).unwrap()
    }

    #[test]
    fn dihedral_family_and_associated_mcq() {
        let f = zkm_family_from_quandle(&Quandle::dihedral(3), 1).unwrap();
        assert_eq!(f.group().order(), 2);
        assert!(f.check().ok());
        let q = f.associated_mcq();
        assert_eq!(q.n(), 6);
        assert!(q.check().ok());
    }

    #[test]
    fn gf9_family_qg_is_t_squared() {
        let r = gf9();
        let t = r.x();
        let s = r.parse_element("x+1").unwrap();
        let f = gfamily_alexander_b(&r, 8, &t, &s).unwrap();
        assert!(f.check().ok());
        let qg = f.qg_map();
        assert!(qg.check().ok());
        let expected = gfamily_alexander_q(&r, 8, &r.mul(&t, &t)).unwrap();
        for i in 0..8 {
            assert_eq!(qg.table(i), expected.table(i));
        }
        assert_eq!(qg.alexander().unwrap().t, r.mul(&t, &t));
        assert!(verify_qg_compat(&f));
    }

    #[test]
    fn order_mismatch() {
        let r = FiniteRing::integers(5).unwrap();
        assert!(matches!(
            gfamily_alexander_b(&r, 3, &r.from_int(3), &r.from_int(2)),
            Err(StructureError::OrderMismatch { .. })
        ));
        assert!(gfamily_alexander_b(&r, 4, &r.from_int(3), &r.from_int(2)).unwrap().check().ok());
    }
}
