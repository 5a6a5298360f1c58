//! Finite groups given by Cayley tables.

use crate::axioms::{run_laws, Axiom, AxiomReport, CheckMode, Law};
use crate::quandle::{StructureError, Table};

/// A finite group on `[0, n)` with a validated Cayley table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    table: Table,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates the group axioms exhaustively; the report of the first
    /// failing axiom is returned as an error message.
    pub fn new(table: Table) -> Result<Self, StructureError> {
        let report = Self::check_table(&table, CheckMode::FirstViolation);
        if let Some(v) = report.first() {
            return Err(StructureError::Malformed(format!("not a group: {v}")));
        }
        let n = table.n();
        let identity = (0..n).find(|&e| (0..n).all(|a| table.get(e, a) == a && table.get(a, e) == a)).unwrap();
        let inverse = (0..n).map(|a| (0..n).find(|&b| table.get(a, b) == identity).unwrap()).collect();
        Ok(FiniteGroup { table, identity, inverse })
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, StructureError> {
        Self::new(Table::from_rows(rows)?)
    }

    /// `Z_n` with addition.
    pub fn cyclic(n: usize) -> Self {
        Self::new(Table::from_fn(n, |a, b| (a + b) % n)).expect("Z_n is a group")
    }

    /// The trivial group.
    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Symmetric group on `k` letters; elements are permutations in
    /// lexicographic order and `(σ·τ)(i) = σ(τ(i))`.
    pub fn symmetric(k: usize) -> Self {
        let perms = permutations(k);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let table = Table::from_fn(perms.len(), |a, b| {
            let composed: Vec<usize> = (0..k).map(|i| perms[a][perms[b][i]]).collect();
            index(&composed)
        });
        Self::new(table).expect("S_k is a group")
    }

    /// Checks associativity, a two-sided identity and inverses.
    pub fn check_table(table: &Table, mode: CheckMode) -> AxiomReport {
        run_laws(&Self::laws_for(table), mode)
    }

    pub fn laws_for(table: &Table) -> Vec<Law<'_>> {
        let n = table.n();
        let identity = move || (0..n).find(|&e| (0..n).all(|a| table.get(e, a) == a && table.get(a, e) == a));
        vec![
            Law::new(Axiom::GroupAssociativity, vec![n, n, n], move |v| {
                table.get(table.get(v[0], v[1]), v[2]) == table.get(v[0], table.get(v[1], v[2]))
            }),
            // witness (e, a): candidate e fails to be a two-sided identity at a;
            // the law fails only when no element is an identity.
            Law::new(Axiom::GroupIdentity, vec![n, n], move |v| {
                identity().is_some() || table.get(v[0], v[1]) == v[1] && table.get(v[1], v[0]) == v[1]
            }),
            Law::new(Axiom::GroupInverse, vec![n], move |v| match identity() {
                Some(e) => (0..n).any(|b| table.get(v[0], b) == e && table.get(b, v[0]) == e),
                None => true,
            }),
        ]
    }

    pub fn order(&self) -> usize {
        self.table.n()
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table.get(a, b)
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `h^{-1} g h`.
    #[inline]
    pub fn conj(&self, g: usize, h: usize) -> usize {
        self.mul(self.inv(h), self.mul(g, h))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_groups() {
        let z4 = FiniteGroup::cyclic(4);
        assert_eq!(z4.identity(), 0);
        assert_eq!(z4.inv(1), 3);
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        for a in 0..6 {
            assert_eq!(s3.mul(a, s3.inv(a)), s3.identity());
        }
    }

    #[test]
    fn rejects_non_groups() {
        let rows = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_rows(&rows).is_err());
        let table = Table::from_rows(&rows).unwrap();
        assert!(!FiniteGroup::check_table(&table, CheckMode::Full).ok());
    }
}
