//! Finite commutative rings `Z_m[x]/(f)` with `f` monic.
//!
//! Elements are little-endian coefficient vectors of length `max(deg f, 1)`,
//! always fully reduced, so equality is structural. Every element also has a
//! dense index in `[0, |R|)` (base-`m` digits of the coefficient vector), which
//! is what the table-based structures use as carrier labels.

use std::fmt;

use thiserror::Error;

/// Rings larger than this are rejected: field detection is exhaustive and
/// carriers built on top of a ring are stored as dense tables.
pub const MAX_RING_SIZE: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(i64),
    #[error("polynomial is not monic (leading coefficient {0} mod m)")]
    NotMonic(u64),
    #[error("constant polynomial given; omit the polynomial to get Z_m")]
    ConstantPolynomial,
    #[error("ring of size {0} exceeds the supported bound {MAX_RING_SIZE}")]
    TooLarge(u128),
    #[error("element {0} is not a unit")]
    NonUnit(RingElement),
    #[error("malformed element literal {literal:?}: {reason}")]
    BadLiteral { literal: String, reason: String },
    #[error("element has {got} coefficients, ring expects {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("linear system has inconsistent dimensions: {0}")]
    Shape(String),
    #[error("solution count overflows 128 bits")]
    CountOverflow,
    #[error("exhaustive search space {0} exceeds the configured bound {1}")]
    SizeBoundExceeded(u128, u128),
}

/// A canonical element of a [`FiniteRing`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement(Vec<u64>);

impl RingElement {
    /// Coefficients, constant term first.
    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for RingElement {
    /// Prints the polynomial literal form `c0+c1*x+c2*x^2`, skipping zero terms.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            terms.push(match (k, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}*x"),
                (k, 1) => format!("x^{k}"),
                (k, c) => format!("{c}*x^{k}"),
            });
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join("+"))
        }
    }
}

/// The ring `Z_m[x]/(f)`; `f` empty means `Z_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRing {
    modulus: u64,
    poly: Vec<u64>,
    size: usize,
    field: bool,
}

impl FiniteRing {
    /// Builds `Z_m[x]/(f)` from little-endian coefficients of `f` (any
    /// integers, reduced mod `m`). An empty `f` yields `Z_m`.
    pub fn new(m: i64, f: &[i64]) -> Result<Self, RingError> {
        if m < 2 {
            return Err(RingError::ModulusTooSmall(m));
        }
        let modulus = m as u64;
        let poly: Vec<u64> = f.iter().map(|&c| c.rem_euclid(m) as u64).collect();
        match poly.len() {
            0 => {}
            1 => return Err(RingError::ConstantPolynomial),
            _ => {
                let lead = *poly.last().unwrap();
                if lead != 1 {
                    return Err(RingError::NotMonic(lead));
                }
            }
        }
        let degree = poly.len().saturating_sub(1);
        let size = (modulus as u128).pow(degree.max(1) as u32);
        if size > MAX_RING_SIZE as u128 {
            return Err(RingError::TooLarge(size));
        }
        let mut ring = FiniteRing { modulus, poly, size: size as usize, field: false };
        ring.field = ring.detect_field();
        Ok(ring)
    }

    /// `Z_m`.
    pub fn integers(m: i64) -> Result<Self, RingError> {
        Self::new(m, &[])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Degree of the defining polynomial (0 for `Z_m`).
    pub fn degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }

    /// Coefficients of the defining polynomial (empty for `Z_m`).
    pub fn poly(&self) -> &[u64] {
        &self.poly
    }

    /// Number of coefficients stored per element.
    pub fn width(&self) -> usize {
        self.degree().max(1)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_field(&self) -> bool {
        self.field
    }

    pub fn zero(&self) -> RingElement {
        RingElement(vec![0; self.width()])
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> RingElement {
        let mut c = vec![0; self.width()];
        c[0] = v.rem_euclid(self.modulus as i64) as u64;
        RingElement(c)
    }

    /// The class of the variable `x`.
    pub fn x(&self) -> RingElement {
        self.reduce(vec![0, 1])
    }

    /// Builds an element from arbitrary integer coefficients, reducing fully.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> RingElement {
        let m = self.modulus as i64;
        self.reduce(coeffs.iter().map(|&c| c.rem_euclid(m) as u64).collect())
    }

    /// Checks that a coefficient vector is canonical for this ring.
    pub fn element(&self, coeffs: Vec<u64>) -> Result<RingElement, RingError> {
        if coeffs.len() != self.width() {
            return Err(RingError::WrongLength { expected: self.width(), got: coeffs.len() });
        }
        Ok(RingElement(coeffs.into_iter().map(|c| c % self.modulus).collect()))
    }

    /// Element with dense index `idx` (base-`m` digits, constant term lowest).
    pub fn element_at(&self, mut idx: usize) -> RingElement {
        let m = self.modulus as usize;
        let mut c = vec![0; self.width()];
        for slot in c.iter_mut() {
            *slot = (idx % m) as u64;
            idx /= m;
        }
        RingElement(c)
    }

    /// Dense index of a canonical element.
    pub fn index_of(&self, a: &RingElement) -> usize {
        a.0.iter().rev().fold(0usize, |acc, &c| acc * self.modulus as usize + c as usize)
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.size).map(move |i| self.element_at(i))
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let m = self.modulus;
        RingElement(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % m).collect())
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        let m = self.modulus;
        RingElement(a.0.iter().map(|&x| (m - x) % m).collect())
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let m = self.modulus;
        let mut prod = vec![0u64; a.0.len() + b.0.len() - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y % m) % m;
            }
        }
        self.reduce(prod)
    }

    /// `a^e` for `e ≥ 0` by repeated squaring.
    pub fn pow(&self, a: &RingElement, mut e: u64) -> RingElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^e` for any integer `e`; negative exponents need a unit.
    pub fn pow_signed(&self, a: &RingElement, e: i64) -> Result<RingElement, RingError> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inverse(a)?, e.unsigned_abs()))
        }
    }

    pub fn is_unit(&self, a: &RingElement) -> bool {
        if self.degree() == 0 {
            return gcd(a.0[0], self.modulus) == 1;
        }
        prime_factors(self.modulus).into_iter().all(|p| {
            let mat = self.mult_matrix(a);
            let reduced: Vec<Vec<u64>> =
                mat.into_iter().map(|row| row.into_iter().map(|c| c % p).collect()).collect();
            rank_mod_prime(reduced, p) == self.degree()
        })
    }

    /// The multiplicative inverse, or [`RingError::NonUnit`].
    pub fn inverse(&self, a: &RingElement) -> Result<RingElement, RingError> {
        if !self.is_unit(a) {
            return Err(RingError::NonUnit(a.clone()));
        }
        if self.degree() == 0 {
            let inv = mod_inverse(a.0[0], self.modulus).expect("unit has an inverse");
            return Ok(RingElement(vec![inv]));
        }
        if is_prime(self.modulus) {
            // Solve M(a)·b = 1 over the prime field.
            let mut system = self.mult_matrix(a);
            for (l, row) in system.iter_mut().enumerate() {
                row.push(u64::from(l == 0));
            }
            let sol = solve_unique_mod_prime(system, self.modulus)
                .expect("unit has an invertible multiplication matrix");
            return Ok(RingElement(sol));
        }
        // Composite modulus: a^(ord-1) is the inverse.
        let ord = self.unit_order(a)?;
        Ok(self.pow(a, ord - 1))
    }

    /// Least `n ≥ 1` with `a^n = 1`.
    pub fn unit_order(&self, a: &RingElement) -> Result<u64, RingError> {
        if !self.is_unit(a) {
            return Err(RingError::NonUnit(a.clone()));
        }
        let one = self.one();
        let mut cur = a.clone();
        let mut n = 1u64;
        while cur != one {
            cur = self.mul(&cur, a);
            n += 1;
            debug_assert!(n as usize <= self.size, "unit order exceeds ring size");
        }
        Ok(n)
    }

    /// Parses `"c0+c1*x+..."` (the variable may be written `x` or `t`,
    /// optionally with `^k`) or the compact `[c0,c1,...]` form.
    pub fn parse_element(&self, text: &str) -> Result<RingElement, RingError> {
        let s = text.trim().trim_matches('"');
        let bad = |reason: &str| RingError::BadLiteral { literal: text.to_string(), reason: reason.into() };
        if let Some(inner) = s.strip_prefix('[') {
            let inner = inner.strip_suffix(']').ok_or_else(|| bad("missing ']'"))?;
            let coeffs = inner
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| p.trim().parse::<i64>().map_err(|_| bad("non-integer coefficient")))
                .collect::<Result<Vec<_>, _>>()?;
            if coeffs.is_empty() {
                return Err(bad("empty coefficient list"));
            }
            return Ok(self.from_coeffs(&coeffs));
        }
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty literal"));
        }
        // Split into signed terms.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut negative = false;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && !(i > 0 && compact[..i].ends_with('^')) {
                if i > 0 {
                    if cur.is_empty() {
                        return Err(bad("dangling sign"));
                    }
                    terms.push((negative, std::mem::take(&mut cur)));
                }
                negative = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(bad("dangling sign"));
        }
        terms.push((negative, cur));

        let mut acc = self.zero();
        for (negative, term) in terms {
            let (coeff, power) = parse_term(&term).ok_or_else(|| bad("unrecognised term"))?;
            let m = self.modulus as i64;
            let c = self.from_int((coeff % m) * if negative { -1 } else { 1 });
            let monomial = self.pow(&self.x(), power);
            acc = self.add(&acc, &self.mul(&c, &monomial));
        }
        Ok(acc)
    }

    /// Matrix of multiplication by `a` on the coefficient basis:
    /// column `k` holds the coefficients of `a·x^k`.
    pub fn mult_matrix(&self, a: &RingElement) -> Vec<Vec<u64>> {
        let w = self.width();
        let mut mat = vec![vec![0u64; w]; w];
        let mut col = a.clone();
        let x = self.x();
        for k in 0..w {
            for l in 0..w {
                mat[l][k] = col.0[l];
            }
            col = self.mul(&col, &x);
        }
        mat
    }

    fn reduce(&self, mut c: Vec<u64>) -> RingElement {
        let m = self.modulus;
        for v in c.iter_mut() {
            *v %= m;
        }
        let d = self.degree();
        if d == 0 {
            let constant = c.first().copied().unwrap_or(0);
            return RingElement(vec![constant]);
        }
        // Subtract lead·x^(k-d)·f for each k ≥ d, top down.
        for k in (d..c.len()).rev() {
            let lead = c[k];
            if lead == 0 {
                continue;
            }
            for (i, &fi) in self.poly.iter().enumerate() {
                let pos = k - d + i;
                c[pos] = (c[pos] + m - lead * fi % m) % m;
            }
        }
        c.resize(d, 0);
        RingElement(c)
    }

    /// Exhaustive invertibility check over all nonzero elements.
    fn detect_field(&self) -> bool {
        (1..self.size).all(|i| self.is_unit(&self.element_at(i)))
    }
}

fn parse_term(term: &str) -> Option<(i64, u64)> {
    let var_pos = term.find(['x', 't']);
    match var_pos {
        None => term.parse::<i64>().ok().map(|c| (c, 0)),
        Some(pos) => {
            let coeff_part = term[..pos].trim_end_matches('*');
            let coeff = if coeff_part.is_empty() { 1 } else { coeff_part.parse::<i64>().ok()? };
            let rest = &term[pos + 1..];
            let power = if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')?.parse::<u64>().ok()?
            };
            Some((coeff, power))
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid on non-negative integers: returns `(g, x, y)` with `a·x + b·y = g`.
pub(crate) fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    (g == 1).then(|| x.rem_euclid(m as i128) as u64)
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn rank_mod_prime(mut mat: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !mat[r][col].is_multiple_of(p)) else { continue };
        mat.swap(rank, piv);
        let inv = mod_inverse(mat[rank][col], p).unwrap();
        for r in 0..rows {
            if r != rank && mat[r][col] != 0 {
                let factor = mat[r][col] * inv % p;
                for c in 0..cols {
                    mat[r][c] = (mat[r][c] + p - factor * mat[rank][c] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves a square system given as an augmented matrix with a unique solution.
fn solve_unique_mod_prime(mut mat: Vec<Vec<u64>>, p: u64) -> Option<Vec<u64>> {
    let n = mat.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| mat[r][col] != 0)?;
        mat.swap(col, piv);
        let inv = mod_inverse(mat[col][col], p)?;
        for c in 0..=n {
            mat[col][c] = mat[col][c] * inv % p;
        }
        for r in 0..n {
            if r != col && mat[r][col] != 0 {
                let factor = mat[r][col];
                for c in 0..=n {
                    mat[r][c] = (mat[r][c] + p - factor * mat[col][c] % p) % p;
                }
            }
        }
    }
    Some(mat.into_iter().map(|row| row[n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9() -> FiniteRing {
        FiniteRing::new(3, &[2, 1, 1]).unwrap()
    }

    #[test]
    fn gf9_is_field_of_nine() {
        let r = gf9();
        assert_eq!(r.size(), 9);
        assert!(r.is_field());
    }

    #[test]
    fn z3_quartic_is_not_field() {
        let r = FiniteRing::new(3, &[-1, 0, 0, 0, 1]).unwrap();
        assert_eq!(r.size(), 81);
        assert!(!r.is_field());
        let t_minus_one = r.parse_element("x-1").unwrap();
        assert_eq!(r.inverse(&t_minus_one), Err(RingError::NonUnit(t_minus_one.clone())));
    }

    #[test]
    fn integers_mod_two_is_field() {
        let r = FiniteRing::integers(2).unwrap();
        assert!(r.is_field());
        assert_eq!(r.size(), 2);
        assert!(!FiniteRing::integers(6).unwrap().is_field());
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(FiniteRing::new(1, &[]), Err(RingError::ModulusTooSmall(1)));
        assert_eq!(FiniteRing::new(3, &[1, 2]), Err(RingError::NotMonic(2)));
        assert_eq!(FiniteRing::new(3, &[1]), Err(RingError::ConstantPolynomial));
    }

    #[test]
    fn products_in_gf9() {
        let r = gf9();
        let t = r.x();
        assert_eq!(r.mul(&t, &t), r.parse_element("1+2*x").unwrap());
        let s = r.parse_element("x+1").unwrap();
        assert_eq!(r.mul(&r.one(), &s), s);
        let z5 = FiniteRing::integers(5).unwrap();
        assert_eq!(z5.mul(&z5.from_int(2), &z5.from_int(3)), z5.one());
    }

    #[test]
    fn inverses_and_orders() {
        let r = gf9();
        let s = r.parse_element("1+x").unwrap();
        let s_inv = r.inverse(&s).unwrap();
        assert_eq!(r.mul(&s, &s_inv), r.one());
        assert_eq!(r.unit_order(&r.x()).unwrap(), 8);
        assert_eq!(r.unit_order(&r.one()).unwrap(), 1);
        let z5 = FiniteRing::integers(5).unwrap();
        assert_eq!(z5.inverse(&z5.from_int(2)).unwrap(), z5.from_int(3));
        let q = FiniteRing::new(3, &[2, 0, 0, 0, 1]).unwrap();
        assert_eq!(q.unit_order(&q.neg(&q.x())).unwrap(), 4);
    }

    #[test]
    fn composite_modulus_inverse() {
        let r = FiniteRing::new(4, &[1, 1, 1]).unwrap();
        for a in r.elements() {
            match r.inverse(&a) {
                Ok(b) => assert_eq!(r.mul(&a, &b), r.one()),
                Err(_) => assert!(r.elements().all(|b| r.mul(&a, &b) != r.one())),
            }
        }
    }

    #[test]
    fn literal_round_trip() {
        let r = gf9();
        for a in r.elements() {
            assert_eq!(r.parse_element(&a.to_string()).unwrap(), a);
            assert_eq!(r.index_of(&a), r.index_of(&r.element_at(r.index_of(&a))));
        }
        assert_eq!(r.parse_element("[1,1]").unwrap(), r.parse_element("t+1").unwrap());
        assert_eq!(r.parse_element("x^2").unwrap(), r.parse_element("1+2*x").unwrap());
        assert!(r.parse_element("1+").is_err());
        assert!(r.parse_element("é+1").is_err());
        assert!(r.parse_element("x^é-1").is_err());
        assert!(r.parse_element("y").is_err());
    }
}
