//! Exhaustive law checking with reproducible, replayable witnesses.
//!
//! Every checker in the crate is expressed as a list of [`Law`]s: a named
//! predicate over a product of finite index ranges. The runner scans each
//! range product in lexicographic order and records the first failing tuple.
//! Because the predicate is kept alongside the report, a witness can always be
//! replayed against the structure it was produced from.

use std::fmt;

/// Identifier of a checked axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    // groups
    GroupAssociativity,
    GroupIdentity,
    GroupInverse,
    // quandles (also reused by MCQs)
    Idempotence,
    RightInvertibility,
    SelfDistributivity,
    // biquandles (also reused by MCBs)
    Diagonal,
    UnderInvertibility,
    OverInvertibility,
    PairMapBijectivity,
    ExchangeUnderUnder,
    ExchangeOverUnder,
    ExchangeOverOver,
    // multiple conjugation quandles
    InBlockConjugation,
    IdentityAction,
    ProductAction,
    BlockHomomorphism,
    BlockBijection,
    // multiple conjugation biquandles
    UnderHomomorphism,
    OverHomomorphism,
    UnderProduct,
    UnderIdentity,
    OverProduct,
    OverIdentity,
    Twist,
    // G-families
    FamilyIdempotence,
    FamilyProduct,
    FamilyIdentity,
    FamilyDistributivity,
    FamilyDiagonal,
    FamilyUnderProduct,
    FamilyUnderIdentity,
    FamilyOverProduct,
    FamilyOverIdentity,
    FamilyExchangeUnderUnder,
    FamilyExchangeOverUnder,
    FamilyExchangeOverOver,
}

impl Axiom {
    /// Stable kebab-case identifier used in reports.
    pub fn id(self) -> &'static str {
        use Axiom::*;
        match self {
            GroupAssociativity => "group-associativity",
            GroupIdentity => "group-identity",
            GroupInverse => "group-inverse",
            Idempotence => "idempotence",
            RightInvertibility => "right-invertibility",
            SelfDistributivity => "self-distributivity",
            Diagonal => "diagonal",
            UnderInvertibility => "under-invertibility",
            OverInvertibility => "over-invertibility",
            PairMapBijectivity => "pair-map-bijectivity",
            ExchangeUnderUnder => "exchange-under-under",
            ExchangeOverUnder => "exchange-over-under",
            ExchangeOverOver => "exchange-over-over",
            InBlockConjugation => "in-block-conjugation",
            IdentityAction => "identity-action",
            ProductAction => "product-action",
            BlockHomomorphism => "block-homomorphism",
            BlockBijection => "block-bijection",
            UnderHomomorphism => "under-homomorphism",
            OverHomomorphism => "over-homomorphism",
            UnderProduct => "under-product",
            UnderIdentity => "under-identity",
            OverProduct => "over-product",
            OverIdentity => "over-identity",
            Twist => "twist",
            FamilyIdempotence => "family-idempotence",
            FamilyProduct => "family-product",
            FamilyIdentity => "family-identity",
            FamilyDistributivity => "family-distributivity",
            FamilyDiagonal => "family-diagonal",
            FamilyUnderProduct => "family-under-product",
            FamilyUnderIdentity => "family-under-identity",
            FamilyOverProduct => "family-over-product",
            FamilyOverIdentity => "family-over-identity",
            FamilyExchangeUnderUnder => "family-exchange-under-under",
            FamilyExchangeOverUnder => "family-exchange-over-under",
            FamilyExchangeOverOver => "family-exchange-over-over",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A failing tuple for one axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.witness.iter().map(ToString::to_string).collect();
        write!(f, "{} ({})", self.axiom, w.join(","))
    }
}

/// Outcome of an exhaustive check: at most one (the lexicographically first)
/// witness per axiom, in the order the axioms were checked.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }

    pub fn merge(&mut self, other: AxiomReport) {
        self.violations.extend(other.violations);
    }
}

type Predicate<'a> = Box<dyn Fn(&[usize]) -> bool + 'a>;
type Finder<'a> = Box<dyn Fn() -> Option<Vec<usize>> + 'a>;

/// A universally quantified law over `ranges[0] × ranges[1] × ...`.
pub struct Law<'a> {
    pub axiom: Axiom,
    pub ranges: Vec<usize>,
    holds: Predicate<'a>,
    finder: Option<Finder<'a>>,
}

impl<'a> Law<'a> {
    pub fn new(axiom: Axiom, ranges: Vec<usize>, holds: impl Fn(&[usize]) -> bool + 'a) -> Self {
        Law { axiom, ranges, holds: Box::new(holds), finder: None }
    }

    /// Supplies a faster search that must return exactly the lexicographically
    /// first failing tuple (used for laws whose naive scan is quartic).
    pub fn with_finder(mut self, finder: impl Fn() -> Option<Vec<usize>> + 'a) -> Self {
        self.finder = Some(Box::new(finder));
        self
    }

    pub fn holds(&self, tuple: &[usize]) -> bool {
        (self.holds)(tuple)
    }

    /// Lexicographically first failing tuple.
    pub fn first_failure(&self) -> Option<Vec<usize>> {
        if let Some(finder) = &self.finder {
            return finder();
        }
        if self.ranges.contains(&0) {
            return None;
        }
        let mut t = vec![0usize; self.ranges.len()];
        loop {
            if !(self.holds)(&t) {
                return Some(t);
            }
            // odometer increment, last coordinate fastest
            let mut k = t.len();
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                t[k] += 1;
                if t[k] < self.ranges[k] {
                    break;
                }
                t[k] = 0;
            }
        }
    }
}

/// How much work a check does before returning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckMode {
    /// Every law is scanned; one witness per failing law.
    #[default]
    Full,
    /// Stop after the first failing law.
    FirstViolation,
}

pub fn run_laws(laws: &[Law<'_>], mode: CheckMode) -> AxiomReport {
    let mut report = AxiomReport::default();
    for law in laws {
        if let Some(witness) = law.first_failure() {
            report.violations.push(Violation { axiom: law.axiom, witness });
            if mode == CheckMode::FirstViolation {
                break;
            }
        }
    }
    report
}

/// Re-evaluates a witness: true iff the named law really fails on it.
pub fn replay(laws: &[Law<'_>], v: &Violation) -> bool {
    laws.iter()
        .filter(|l| l.axiom == v.axiom)
        .any(|l| l.ranges.len() == v.witness.len() && v.witness.iter().zip(&l.ranges).all(|(x, r)| x < r) && !l.holds(&v.witness))
}

/// Law "`x ↦ op(x, y)` is injective for every `y`", witness `(x, x', y)`.
pub fn column_injective<'a>(axiom: Axiom, n: usize, op: impl Fn(usize, usize) -> usize + 'a) -> Law<'a> {
    Law::new(axiom, vec![n, n, n], move |t| t[0] == t[1] || op(t[0], t[2]) != op(t[1], t[2]))
}

/// Law "the pair map is injective on `[0,n)²`", witness `(x, y, x', y')`.
pub fn pair_map_injective<'a>(
    axiom: Axiom,
    n: usize,
    map: impl Fn(usize, usize) -> (usize, usize) + Clone + 'a,
) -> Law<'a> {
    let m2 = map.clone();
    Law::new(axiom, vec![n, n, n, n], move |t| (t[0], t[1]) == (t[2], t[3]) || map(t[0], t[1]) != map(t[2], t[3]))
        .with_finder(move || {
            let mut preimages: std::collections::HashMap<(usize, usize), Vec<(usize, usize)>> =
                std::collections::HashMap::new();
            for x in 0..n {
                for y in 0..n {
                    preimages.entry(m2(x, y)).or_default().push((x, y));
                }
            }
            for x in 0..n {
                for y in 0..n {
                    let group = &preimages[&m2(x, y)];
                    if let Some(&(x2, y2)) = group.iter().find(|&&p| p != (x, y)) {
                        return Some(vec![x, y, x2, y2]);
                    }
                }
            }
            None
        })
}
