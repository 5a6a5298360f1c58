//! Multiple conjugation quandles (MCQs) and biquandles (MCBs).
//!
//! The carrier `[0, N)` is partitioned into blocks; block `λ` lists its
//! members in the order of the local indices of its group `G_λ`.

use crate::axioms::{column_injective, run_laws, Axiom, AxiomReport, CheckMode, Law};
use crate::group::FiniteGroup;
use crate::quandle::{biquandle_laws, StructureError, Table};

/// A partition of `[0, N)` into groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocks {
    block_of: Vec<usize>,
    local: Vec<usize>,
    members: Vec<Vec<usize>>,
    groups: Vec<FiniteGroup>,
}

impl Blocks {
    /// `members[λ][i]` is the carrier element playing the role of local group
    /// element `i` of `groups[λ]`.
    pub fn new(n: usize, members: Vec<Vec<usize>>, groups: Vec<FiniteGroup>) -> Result<Self, StructureError> {
        if members.len() != groups.len() {
            return Err(StructureError::Malformed(format!(
                "{} blocks but {} groups",
                members.len(),
                groups.len()
            )));
        }
        let mut block_of = vec![usize::MAX; n];
        let mut local = vec![usize::MAX; n];
        for (lambda, (ms, g)) in members.iter().zip(&groups).enumerate() {
            if ms.len() != g.order() {
                return Err(StructureError::Malformed(format!(
                    "block {lambda} has {} members but its group has order {}",
                    ms.len(),
                    g.order()
                )));
            }
            for (i, &x) in ms.iter().enumerate() {
                if x >= n {
                    return Err(StructureError::Malformed(format!("block {lambda} lists element {x} outside [0,{n})")));
                }
                if block_of[x] != usize::MAX {
                    return Err(StructureError::Malformed(format!("element {x} appears in more than one block slot")));
                }
                block_of[x] = lambda;
                local[x] = i;
            }
        }
        if let Some(x) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(StructureError::Malformed(format!("element {x} belongs to no block")));
        }
        Ok(Blocks { block_of, local, members, groups })
    }

    /// One block per `x ∈ [0, n_x)`, each a copy of `g`, element `(x, h)` at
    /// index `x·|G| + h`.
    pub fn product(n_x: usize, g: &FiniteGroup) -> Self {
        let k = g.order();
        let members = (0..n_x).map(|x| (0..k).map(|h| x * k + h).collect()).collect();
        Self::new(n_x * k, members, vec![g.clone(); n_x]).expect("product partition is well formed")
    }

    /// A single block carrying the whole group.
    pub fn single(g: &FiniteGroup) -> Self {
        Self::new(g.order(), vec![(0..g.order()).collect()], vec![g.clone()]).expect("single block")
    }

    pub fn size(&self) -> usize {
        self.block_of.len()
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn block(&self, x: usize) -> usize {
        self.block_of[x]
    }

    #[inline]
    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    pub fn members(&self, lambda: usize) -> &[usize] {
        &self.members[lambda]
    }

    pub fn group(&self, lambda: usize) -> &FiniteGroup {
        &self.groups[lambda]
    }

    pub fn identity(&self, lambda: usize) -> usize {
        self.members[lambda][self.groups[lambda].identity()]
    }

    /// Product of two elements of one block.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> Option<usize> {
        let lambda = self.block_of[a];
        (lambda == self.block_of[b])
            .then(|| self.members[lambda][self.groups[lambda].mul(self.local[a], self.local[b])])
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        let lambda = self.block_of[a];
        self.members[lambda][self.groups[lambda].inv(self.local[a])]
    }

    /// Block products that must exist because both arguments share a block.
    #[inline]
    fn mul_same(&self, a: usize, b: usize) -> usize {
        self.mul(a, b).expect("arguments share a block")
    }
}

/// A multiple conjugation quandle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mcq {
    blocks: Blocks,
    star: Table,
    star_inv: Option<Table>,
}

impl Mcq {
    pub fn new(blocks: Blocks, star: Table) -> Result<Self, StructureError> {
        if star.n() != blocks.size() {
            return Err(StructureError::Malformed(format!(
                "star table has size {}, partition covers {}",
                star.n(),
                blocks.size()
            )));
        }
        let star_inv = star.left_inverse();
        Ok(Mcq { blocks, star, star_inv })
    }

    /// The conjugation MCQ of a group: one block, `a * b = b^{-1} a b`.
    pub fn conjugation(g: &FiniteGroup) -> Self {
        let star = Table::from_fn(g.order(), |a, b| g.conj(a, b));
        Self::new(Blocks::single(g), star).expect("sizes agree")
    }

    pub fn n(&self) -> usize {
        self.star.n()
    }

    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }

    pub fn star_table(&self) -> &Table {
        &self.star
    }

    #[inline]
    pub fn star(&self, a: usize, b: usize) -> usize {
        self.star.get(a, b)
    }

    pub fn star_inv(&self, a: usize, b: usize) -> Result<usize, StructureError> {
        self.star_inv.as_ref().map(|t| t.get(a, b)).ok_or(StructureError::NotInvertible("*"))
    }

    pub fn laws(&self) -> Vec<Law<'_>> {
        let n = self.n();
        let bl = &self.blocks;
        let st = &self.star;
        let star = move |a: usize, b: usize| st.get(a, b);
        vec![
            Law::new(Axiom::InBlockConjugation, vec![n, n], move |v| {
                let (a, b) = (v[0], v[1]);
                !bl.same_block(a, b) || star(a, b) == bl.mul_same(bl.inv(b), bl.mul_same(a, b))
            }),
            Law::new(Axiom::IdentityAction, vec![n, bl.count()], move |v| star(v[0], bl.identity(v[1])) == v[0]),
            Law::new(Axiom::ProductAction, vec![n, n, n], move |v| {
                let (x, a, b) = (v[0], v[1], v[2]);
                !bl.same_block(a, b) || star(x, bl.mul_same(a, b)) == star(star(x, a), b)
            }),
            column_injective(Axiom::RightInvertibility, n, star),
            Law::new(Axiom::SelfDistributivity, vec![n, n, n], move |v| {
                let (x, y, z) = (v[0], v[1], v[2]);
                star(star(x, y), z) == star(star(x, z), star(y, z))
            }),
            Law::new(Axiom::BlockHomomorphism, vec![n, n, n], move |v| {
                let (a, b, x) = (v[0], v[1], v[2]);
                if !bl.same_block(a, b) {
                    return true;
                }
                let (ax, bx) = (star(a, x), star(b, x));
                bl.same_block(ax, bx) && star(bl.mul_same(a, b), x) == bl.mul_same(ax, bx)
            }),
            Law::new(Axiom::BlockBijection, vec![n, n, n], move |v| {
                let (a, b, y) = (v[0], v[1], v[2]);
                bl.same_block(a, b) == bl.same_block(star(a, y), star(b, y))
            }),
        ]
    }

    pub fn check(&self) -> AxiomReport {
        self.check_with(CheckMode::Full)
    }

    pub fn check_with(&self, mode: CheckMode) -> AxiomReport {
        run_laws(&self.laws(), mode)
    }

    /// Returns a copy with one star-table entry replaced.
    pub fn with_star_entry(&self, a: usize, b: usize, v: usize) -> Self {
        let mut star = self.star.clone();
        star.set(a, b, v);
        Self::new(self.blocks.clone(), star).expect("same size")
    }
}

/// A multiple conjugation biquandle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mcb {
    blocks: Blocks,
    under: Table,
    over: Table,
    under_inv: Option<Table>,
    over_inv: Option<Table>,
}

impl Mcb {
    pub fn new(blocks: Blocks, under: Table, over: Table) -> Result<Self, StructureError> {
        if under.n() != blocks.size() || over.n() != blocks.size() {
            return Err(StructureError::Malformed(format!(
                "operation tables have sizes {} and {}, partition covers {}",
                under.n(),
                over.n(),
                blocks.size()
            )));
        }
        let under_inv = under.left_inverse();
        let over_inv = over.left_inverse();
        Ok(Mcb { blocks, under, over, under_inv, over_inv })
    }

    /// An MCQ viewed as an MCB with `x ⊻ y = x * y` and `x ⊼ y = x`.
    pub fn from_mcq(q: &Mcq) -> Self {
        let n = q.n();
        Self::new(q.blocks.clone(), q.star.clone(), Table::from_fn(n, |a, _| a)).expect("sizes agree")
    }

    pub fn n(&self) -> usize {
        self.under.n()
    }

    pub fn blocks(&self) -> &Blocks {
        &self.blocks
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

    pub fn laws(&self) -> Vec<Law<'_>> {
        let n = self.n();
        let bl = &self.blocks;
        let (ut, ot) = (&self.under, &self.over);
        let under = move |a: usize, b: usize| ut.get(a, b);
        let over = move |a: usize, b: usize| ot.get(a, b);
        let mut laws = biquandle_laws(n, under, over);
        laws.push(homomorphism_law(Axiom::UnderHomomorphism, bl, ut));
        laws.push(homomorphism_law(Axiom::OverHomomorphism, bl, ot));
        laws.push(Law::new(Axiom::UnderProduct, vec![n, n, n], move |v| {
            let (x, a, b) = (v[0], v[1], v[2]);
            !bl.same_block(a, b) || under(x, bl.mul_same(a, b)) == under(under(x, a), over(b, a))
        }));
        laws.push(Law::new(Axiom::UnderIdentity, vec![n, bl.count()], move |v| under(v[0], bl.identity(v[1])) == v[0]));
        laws.push(Law::new(Axiom::OverProduct, vec![n, n, n], move |v| {
            let (x, a, b) = (v[0], v[1], v[2]);
            !bl.same_block(a, b) || over(x, bl.mul_same(a, b)) == over(over(x, a), over(b, a))
        }));
        laws.push(Law::new(Axiom::OverIdentity, vec![n, bl.count()], move |v| over(v[0], bl.identity(v[1])) == v[0]));
        laws.push(Law::new(Axiom::Twist, vec![n, n], move |v| {
            let (a, b) = (v[0], v[1]);
            !bl.same_block(a, b)
                || over(bl.mul_same(bl.inv(a), b), a) == under(bl.mul_same(b, bl.inv(a)), a)
        }));
        laws
    }

    pub fn check(&self) -> AxiomReport {
        self.check_with(CheckMode::Full)
    }

    pub fn check_with(&self, mode: CheckMode) -> AxiomReport {
        run_laws(&self.laws(), mode)
    }

    /// Returns a copy with one entry of the under (`over = false`) or over table replaced.
    pub fn with_entry(&self, over: bool, a: usize, b: usize, v: usize) -> Self {
        let (mut u, mut o) = (self.under.clone(), self.over.clone());
        if over {
            o.set(a, b, v);
        } else {
            u.set(a, b, v);
        }
        Self::new(self.blocks.clone(), u, o).expect("same size")
    }
}

/// Law "`a ↦ a ∘ x` maps blocks into blocks homomorphically", witness `(a, b, x)`.
fn homomorphism_law<'a>(axiom: Axiom, bl: &'a Blocks, table: &'a Table) -> Law<'a> {
    let n = table.n();
    Law::new(axiom, vec![n, n, n], move |v| {
        let (a, b, x) = (v[0], v[1], v[2]);
        if !bl.same_block(a, b) {
            return true;
        }
        let (ax, bx) = (table.get(a, x), table.get(b, x));
        bl.same_block(ax, bx) && table.get(bl.mul_same(a, b), x) == bl.mul_same(ax, bx)
    })
}

/// The MCQ `Q(X)`: same blocks, `x * y = (x ⊻ y) ⊼^{-1} y`.
pub fn q_functor_mcb(x: &Mcb) -> Result<Mcq, StructureError> {
    let n = x.n();
    let mut rows = vec![vec![0; n]; n];
    for (a, row) in rows.iter_mut().enumerate() {
        for (b, slot) in row.iter_mut().enumerate() {
            *slot = x.over_inv(x.under(a, b), b)?;
        }
    }
    Mcq::new(x.blocks.clone(), Table::from_rows(&rows)?)
}

/// Whether `phi` maps blocks into blocks multiplicatively.
fn preserves_blocks(phi: &[usize], x: &Blocks, y: &Blocks) -> bool {
    let n = x.size();
    (0..n).all(|a| {
        (0..n).all(|b| match x.mul(a, b) {
            None => true,
            Some(ab) => y.mul(phi[a], phi[b]) == Some(phi[ab]),
        })
    })
}

fn in_range(phi: &[usize], n_src: usize, n_dst: usize) -> bool {
    phi.len() == n_src && phi.iter().all(|&v| v < n_dst)
}

/// MCQ homomorphism test: `φ(a*b) = φ(a)*φ(b)` and block products are preserved.
pub fn mcq_hom_check(phi: &[usize], x: &Mcq, y: &Mcq) -> bool {
    let n = x.n();
    in_range(phi, n, y.n())
        && (0..n).all(|a| (0..n).all(|b| phi[x.star(a, b)] == y.star(phi[a], phi[b])))
        && preserves_blocks(phi, &x.blocks, &y.blocks)
}

/// MCB homomorphism test: both operations and block products are preserved.
pub fn mcb_hom_check(phi: &[usize], x: &Mcb, y: &Mcb) -> bool {
    let n = x.n();
    in_range(phi, n, y.n())
        && (0..n).all(|a| {
            (0..n).all(|b| {
                phi[x.under(a, b)] == y.under(phi[a], phi[b]) && phi[x.over(a, b)] == y.over(phi[a], phi[b])
            })
        })
        && preserves_blocks(phi, &x.blocks, &y.blocks)
}
