//! Exact linear systems over finite rings.
//!
//! Fields use Gauss–Jordan elimination and report a basis. Every other ring is
//! handled exactly by expanding the system to `Z_m` coefficients (an element of
//! `Z_m[x]/(f)` is a length-`d` vector over `Z_m`, and multiplication by a fixed
//! element is a `d × d` matrix) and diagonalising over `Z_m` with unimodular
//! row/column operations.

use crate::ring::{ext_gcd, gcd, mod_inverse, FiniteRing, RingElement, RingError};

/// Solution set of `A·x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystemSolution {
    /// Number of solutions.
    pub cardinality: u128,
    /// Free rank over the field; `None` for non-fields and for empty solution sets.
    pub dimension: Option<usize>,
    /// Basis of the homogeneous solution space (field case only).
    pub basis: Vec<Vec<RingElement>>,
    /// One solution, if any exists.
    pub particular: Option<Vec<RingElement>>,
}

/// Solves `A·x = b` over `ring` with `unknowns` unknowns. `a` has one row per
/// equation; `b` must have the same length.
pub fn solve_linear(
    ring: &FiniteRing,
    unknowns: usize,
    a: &[Vec<RingElement>],
    b: &[RingElement],
) -> Result<LinearSystemSolution, RingError> {
    if a.len() != b.len() {
        return Err(RingError::Shape(format!("{} rows but {} right-hand sides", a.len(), b.len())));
    }
    if let Some((i, row)) = a.iter().enumerate().find(|(_, row)| row.len() != unknowns) {
        return Err(RingError::Shape(format!("row {i} has {} entries, expected {unknowns}", row.len())));
    }
    if ring.is_field() {
        solve_over_field(ring, unknowns, a, b)
    } else {
        solve_by_expansion(ring, unknowns, a, b)
    }
}

/// Reference solver: enumerates every assignment. Errors when the search space
/// exceeds `bound`.
pub fn solve_linear_exhaustive(
    ring: &FiniteRing,
    unknowns: usize,
    a: &[Vec<RingElement>],
    b: &[RingElement],
    bound: u128,
) -> Result<(u128, Vec<Vec<RingElement>>), RingError> {
    let space = (ring.size() as u128).checked_pow(unknowns as u32).ok_or(RingError::CountOverflow)?;
    if space > bound {
        return Err(RingError::SizeBoundExceeded(space, bound));
    }
    let mut found = Vec::new();
    for code in 0..space {
        let mut rest = code;
        let x: Vec<RingElement> = (0..unknowns)
            .map(|_| {
                let e = ring.element_at((rest % ring.size() as u128) as usize);
                rest /= ring.size() as u128;
                e
            })
            .collect();
        if satisfies(ring, a, b, &x) {
            found.push(x);
        }
    }
    Ok((found.len() as u128, found))
}

/// Whether `x` solves `A·x = b`.
pub fn satisfies(ring: &FiniteRing, a: &[Vec<RingElement>], b: &[RingElement], x: &[RingElement]) -> bool {
    a.iter().zip(b).all(|(row, rhs)| {
        let lhs = row.iter().zip(x).fold(ring.zero(), |acc, (c, v)| ring.add(&acc, &ring.mul(c, v)));
        &lhs == rhs
    })
}

fn solve_over_field(
    ring: &FiniteRing,
    n: usize,
    a: &[Vec<RingElement>],
    b: &[RingElement],
) -> Result<LinearSystemSolution, RingError> {
    let mut m: Vec<Vec<RingElement>> =
        a.iter().zip(b).map(|(row, rhs)| row.iter().cloned().chain([rhs.clone()]).collect()).collect();
    let rows = m.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = ring.inverse(&m[r][col])?;
        for c in 0..=n {
            m[r][c] = ring.mul(&m[r][c], &inv);
        }
        for i in 0..rows {
            if i != r && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for c in 0..=n {
                    let delta = ring.mul(&factor, &m[r][c]);
                    m[i][c] = ring.sub(&m[i][c], &delta);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if (r..rows).any(|i| !m[i][n].is_zero()) {
        return Ok(LinearSystemSolution { cardinality: 0, dimension: None, basis: Vec::new(), particular: None });
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut particular = vec![ring.zero(); n];
    for (i, &pc) in pivots.iter().enumerate() {
        particular[pc] = m[i][n].clone();
    }
    let basis = free
        .iter()
        .map(|&fc| {
            let mut v = vec![ring.zero(); n];
            v[fc] = ring.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = ring.neg(&m[i][fc]);
            }
            v
        })
        .collect();
    let cardinality =
        (ring.size() as u128).checked_pow(free.len() as u32).ok_or(RingError::CountOverflow)?;
    Ok(LinearSystemSolution { cardinality, dimension: Some(free.len()), basis, particular: Some(particular) })
}

fn solve_by_expansion(
    ring: &FiniteRing,
    n: usize,
    a: &[Vec<RingElement>],
    b: &[RingElement],
) -> Result<LinearSystemSolution, RingError> {
    let w = ring.width();
    let mut mat = vec![vec![0u64; n * w]; a.len() * w];
    let mut rhs = vec![0u64; a.len() * w];
    for (i, row) in a.iter().enumerate() {
        for (j, coeff) in row.iter().enumerate() {
            let block = ring.mult_matrix(coeff);
            for l in 0..w {
                for k in 0..w {
                    mat[i * w + l][j * w + k] = block[l][k];
                }
            }
        }
        for l in 0..w {
            rhs[i * w + l] = b[i].coeffs()[l];
        }
    }
    let sol = solve_mod_m(ring.modulus(), n * w, mat, rhs)?;
    let particular = sol.particular.map(|flat| {
        flat.chunks(w).map(|chunk| ring.element(chunk.to_vec()).expect("width matches")).collect()
    });
    Ok(LinearSystemSolution { cardinality: sol.cardinality, dimension: None, basis: Vec::new(), particular })
}

/// Solution summary of a system over `Z_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularSolution {
    pub cardinality: u128,
    pub particular: Option<Vec<u64>>,
}

/// Solves `A·x = b` over `Z_m` by unimodular diagonalisation (a Smith-style
/// reduction; the divisibility chain of the full normal form is not needed for
/// counting).
pub fn solve_mod_m(m: u64, cols: usize, mut a: Vec<Vec<u64>>, mut b: Vec<u64>) -> Result<ModularSolution, RingError> {
    let rows = a.len();
    let mut v: Vec<Vec<u64>> = (0..cols).map(|i| (0..cols).map(|j| u64::from(i == j)).collect()).collect();
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x %= m;
        }
    }
    for x in b.iter_mut() {
        *x %= m;
    }
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] != 0)
        else {
            break;
        };
        a.swap(t, pi);
        b.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    combine_rows(&mut a, &mut b, t, i, m);
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    combine_cols(&mut a, &mut v, t, j, m);
                }
            }
            if (t + 1..rows).all(|i| a[i][t] == 0) {
                break;
            }
        }
        diag.push(a[t][t]);
        t += 1;
    }

    let mut cardinality: u128 = 1;
    let mut y = vec![0u64; cols];
    for (i, &d) in diag.iter().enumerate() {
        let g = gcd(d, m);
        if !b[i].is_multiple_of(g) {
            return Ok(ModularSolution { cardinality: 0, particular: None });
        }
        cardinality = cardinality.checked_mul(g as u128).ok_or(RingError::CountOverflow)?;
        let modulus = m / g;
        y[i] = if modulus == 1 {
            0
        } else {
            let inv = mod_inverse((d / g) % modulus, modulus).expect("coprime after dividing by gcd");
            ((b[i] / g) as u128 * inv as u128 % modulus as u128) as u64
        };
    }
    if b[diag.len()..].iter().any(|&c| c != 0) {
        return Ok(ModularSolution { cardinality: 0, particular: None });
    }
    let free = cols - diag.len();
    let free_count = (m as u128).checked_pow(free as u32).ok_or(RingError::CountOverflow)?;
    cardinality = cardinality.checked_mul(free_count).ok_or(RingError::CountOverflow)?;
    let x = (0..cols)
        .map(|i| (0..cols).fold(0u128, |acc, j| (acc + v[i][j] as u128 * y[j] as u128) % m as u128) as u64)
        .collect();
    Ok(ModularSolution { cardinality, particular: Some(x) })
}

fn swap_cols(a: &mut [Vec<u64>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// Bezout coefficients for the pair `(p, q)` as residues mod `m`:
/// returns `(x, y, p/g, q/g)` with `x·p + y·q = g` over the integers.
///
/// When `p` divides `q` this is plain elimination `(1, 0, 1, q/p)`, which
/// leaves the pivot line untouched; otherwise the pivot strictly decreases.
/// Together these guarantee termination of the diagonalisation loop.
fn bezout(p: u64, q: u64, m: u64) -> (u64, u64, u64, u64) {
    if q.is_multiple_of(p) {
        return (1, 0, 1, q / p % m);
    }
    let (g, x, y) = ext_gcd(p as i128, q as i128);
    let r = |v: i128| v.rem_euclid(m as i128) as u64;
    (r(x), r(y), (p as i128 / g) as u64 % m, (q as i128 / g) as u64 % m)
}

/// Row op with determinant 1 clearing `a[i][t]` against pivot row `t`.
fn combine_rows(a: &mut [Vec<u64>], b: &mut [u64], t: usize, i: usize, m: u64) {
    let (x, y, p_g, q_g) = bezout(a[t][t], a[i][t], m);
    let mix = |top: u64, bot: u64| -> (u64, u64) {
        let mm = m as u128;
        let new_top = (x as u128 * top as u128 + y as u128 * bot as u128) % mm;
        let new_bot = ((mm - q_g as u128) % mm * top as u128 + p_g as u128 * bot as u128) % mm;
        (new_top as u64, new_bot as u64)
    };
    for c in 0..a[t].len() {
        let (nt, nb) = mix(a[t][c], a[i][c]);
        a[t][c] = nt;
        a[i][c] = nb;
    }
    let (nt, nb) = mix(b[t], b[i]);
    b[t] = nt;
    b[i] = nb;
}

/// Column op with determinant 1 clearing `a[t][j]` against pivot column `t`;
/// the same op is applied to the accumulated transform `v`.
fn combine_cols(a: &mut [Vec<u64>], v: &mut [Vec<u64>], t: usize, j: usize, m: u64) {
    let (x, y, p_g, q_g) = bezout(a[t][t], a[t][j], m);
    let mm = m as u128;
    for mat in [&mut *a, &mut *v] {
        for row in mat.iter_mut() {
            let (l, r) = (row[t] as u128, row[j] as u128);
            row[t] = ((x as u128 * l + y as u128 * r) % mm) as u64;
            row[j] = (((mm - q_g as u128) % mm * l + p_g as u128 * r) % mm) as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(r: &FiniteRing, v: &[i64]) -> Vec<RingElement> {
        v.iter().map(|&c| r.from_int(c)).collect()
    }

    #[test]
    fn diagonal_case_over_z3() {
        let r = FiniteRing::integers(3).unwrap();
        let s = solve_linear(&r, 2, &[row(&r, &[1, -1])], &[r.zero()]).unwrap();
        assert_eq!(s.cardinality, 3);
        assert_eq!(s.dimension, Some(1));
    }

    #[test]
    fn empty_system_over_gf9() {
        let r = FiniteRing::new(3, &[2, 1, 1]).unwrap();
        let s = solve_linear(&r, 3, &[], &[]).unwrap();
        assert_eq!(s.cardinality, 729);
        assert_eq!(s.dimension, Some(3));
        assert_eq!(s.basis.len(), 3);
    }

    #[test]
    fn unique_solution_over_z3() {
        let r = FiniteRing::integers(3).unwrap();
        let a = vec![row(&r, &[1, 1]), row(&r, &[1, -1])];
        let b = vec![r.one(), r.one()];
        let s = solve_linear(&r, 2, &a, &b).unwrap();
        assert_eq!(s.cardinality, 1);
        assert_eq!(s.particular, Some(vec![r.one(), r.zero()]));
    }

    #[test]
    fn z6_counts_match_enumeration() {
        let r = FiniteRing::integers(6).unwrap();
        let a = vec![row(&r, &[2, 4, 0]), row(&r, &[3, 3, 3])];
        let b = vec![r.from_int(2), r.from_int(3)];
        let s = solve_linear(&r, 3, &a, &b).unwrap();
        let (count, _) = solve_linear_exhaustive(&r, 3, &a, &b, 1_000_000).unwrap();
        assert_eq!(s.cardinality, count);
        assert!(satisfies(&r, &a, &b, s.particular.as_ref().unwrap()));
    }

    #[test]
    fn pivot_dividing_the_row_terminates() {
        let r = FiniteRing::integers(4).unwrap();
        let a = vec![row(&r, &[0, 1, 0, 1]), row(&r, &[0, 0, 3, 1])];
        let b = vec![r.from_int(3), r.from_int(2)];
        let s = solve_linear(&r, 4, &a, &b).unwrap();
        let (count, _) = solve_linear_exhaustive(&r, 4, &a, &b, 1_000_000).unwrap();
        assert_eq!(s.cardinality, count);
        assert!(satisfies(&r, &a, &b, s.particular.as_ref().unwrap()));
    }
}
