//! Operations on a small finite set `X = {0, .., k-1}` as explicit tables,
//! clone closure up to an arity cap, and binary polymorphisms of unary
//! monoids.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use serde_json::json;
use thiserror::Error;

use crate::report::{Policy, VerificationReport};

/// Largest table an operation may have.
pub const MAX_TABLE: usize = 1 << 16;
/// Default number of compositions a closure may evaluate.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid operation: {0}")]
    InvalidTable(String),
    #[error("operations live on domains of size {0} and {1}")]
    DomainMismatch(u8, u8),
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("closure budget of {0} compositions exceeded")]
    Budget(u64),
    #[error("{what} is too large: {size} exceeds {limit}")]
    TooLarge { what: String, size: u128, limit: u128 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An operation `X^n -> X` stored as a flat table. Argument tuples are
/// indexed in mixed radix with the first argument most significant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteOperation {
    arity: usize,
    domain: u8,
    table: Vec<u8>,
}

fn table_len(domain: u8, arity: usize) -> Option<usize> {
    (domain as usize).checked_pow(arity as u32).filter(|&n| n <= MAX_TABLE)
}

impl FiniteOperation {
    pub fn new(arity: usize, domain: u8, table: Vec<u8>) -> Result<FiniteOperation, EngineError> {
        if arity == 0 || domain == 0 {
            return Err(EngineError::InvalidTable("arity and domain must be positive".into()));
        }
        let len = table_len(domain, arity)
            .ok_or_else(|| EngineError::InvalidTable(format!("{domain}^{arity} entries is too many")))?;
        if table.len() != len {
            return Err(EngineError::InvalidTable(format!(
                "expected {len} entries, got {}",
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|&&v| v >= domain) {
            return Err(EngineError::InvalidTable(format!("value {v} outside the domain")));
        }
        Ok(FiniteOperation { arity, domain, table })
    }

    /// Tabulates `f` over all argument tuples.
    pub fn from_fn(arity: usize, domain: u8, f: impl Fn(&[u8]) -> u8) -> Result<FiniteOperation, EngineError> {
        let len = table_len(domain, arity)
            .ok_or_else(|| EngineError::InvalidTable(format!("{domain}^{arity} entries is too many")))?;
        let mut args = vec![0u8; arity];
        let table = (0..len)
            .map(|i| {
                decode_index(i, domain, &mut args);
                f(&args)
            })
            .collect();
        FiniteOperation::new(arity, domain, table)
    }

    /// `pi^n_k`, with `k` counted from 0.
    pub fn projection(arity: usize, domain: u8, k: usize) -> FiniteOperation {
        assert!(k < arity, "projection index out of range");
        FiniteOperation::from_fn(arity, domain, |a| a[k]).expect("projection table")
    }

    pub fn constant(arity: usize, domain: u8, value: u8) -> Result<FiniteOperation, EngineError> {
        FiniteOperation::from_fn(arity, domain, |_| value)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> u8 {
        self.domain
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn eval(&self, args: &[u8]) -> u8 {
        debug_assert_eq!(args.len(), self.arity);
        self.table[encode_index(args, self.domain)]
    }

    /// `self(inner_1, ..., inner_k)`; all inner operations share one arity.
    pub fn compose(&self, inner: &[&FiniteOperation]) -> Result<FiniteOperation, EngineError> {
        if inner.len() != self.arity {
            return Err(EngineError::ArityMismatch {
                expected: self.arity,
                got: inner.len(),
            });
        }
        let n = inner[0].arity;
        for g in inner {
            if g.domain != self.domain {
                return Err(EngineError::DomainMismatch(self.domain, g.domain));
            }
            if g.arity != n {
                return Err(EngineError::ArityMismatch {
                    expected: n,
                    got: g.arity,
                });
            }
        }
        Ok(self.compose_unchecked(inner))
    }

    fn compose_unchecked(&self, inner: &[&FiniteOperation]) -> FiniteOperation {
        let d = self.domain as usize;
        let len = inner[0].table.len();
        let table = (0..len)
            .map(|i| {
                let idx = inner.iter().fold(0usize, |acc, g| acc * d + g.table[i] as usize);
                self.table[idx]
            })
            .collect();
        FiniteOperation {
            arity: inner[0].arity,
            domain: self.domain,
            table,
        }
    }

    /// `x -> f(x, .., x)`.
    pub fn diagonal(&self) -> FiniteOperation {
        FiniteOperation::from_fn(1, self.domain, |a| self.eval(&vec![a[0]; self.arity])).expect("unary table")
    }

    /// Indices of the arguments `f` depends on.
    pub fn essential_variables(&self) -> Vec<usize> {
        let d = self.domain as usize;
        (0..self.arity)
            .filter(|&k| {
                let stride = d.pow((self.arity - 1 - k) as u32);
                (0..self.table.len()).any(|i| {
                    let digit = (i / stride) % d;
                    digit + 1 < d && self.table[i] != self.table[i + stride]
                })
            })
            .collect()
    }

    pub fn is_essentially_unary(&self) -> bool {
        self.essential_variables().len() <= 1
    }

    pub fn is_permutation(&self) -> bool {
        self.arity == 1 && self.table.iter().collect::<HashSet<_>>().len() == self.domain as usize
    }

    /// `arity domain : v0 v1 ...`.
    pub fn to_text(&self) -> String {
        format!("{} {} : {}", self.arity, self.domain, self.table.iter().join(" "))
    }

    pub fn parse(text: &str) -> Result<FiniteOperation, EngineError> {
        let err = |message: &str| EngineError::Parse {
            line: 1,
            message: message.to_string(),
        };
        let (head, body) = text.split_once(':').ok_or_else(|| err("missing `:`"))?;
        let head: Vec<usize> = head
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err("bad header number")))
            .collect::<Result<_, _>>()?;
        let [arity, domain] = head[..] else {
            return Err(err("header must be `arity domain`"));
        };
        let domain = u8::try_from(domain).map_err(|_| err("domain too large"))?;
        let table = body
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err("bad table entry")))
            .collect::<Result<Vec<u8>, _>>()?;
        FiniteOperation::new(arity, domain, table)
    }
}

impl fmt::Debug for FiniteOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Op[{}]", self.to_text())
    }
}

fn decode_index(mut i: usize, domain: u8, out: &mut [u8]) {
    let d = domain as usize;
    for slot in out.iter_mut().rev() {
        *slot = (i % d) as u8;
        i /= d;
    }
}

fn encode_index(args: &[u8], domain: u8) -> usize {
    args.iter().fold(0usize, |acc, &a| acc * domain as usize + a as usize)
}

/// The usual operations on the chain `0 < 1 < 2`.
pub mod ops {
    use super::FiniteOperation;

    pub fn min(domain: u8) -> FiniteOperation {
        FiniteOperation::from_fn(2, domain, |a| a[0].min(a[1])).expect("small table")
    }

    pub fn max(domain: u8) -> FiniteOperation {
        FiniteOperation::from_fn(2, domain, |a| a[0].max(a[1])).expect("small table")
    }

    /// The ternary median.
    pub fn med(domain: u8) -> FiniteOperation {
        FiniteOperation::from_fn(3, domain, |a| {
            let mut v = [a[0], a[1], a[2]];
            v.sort_unstable();
            v[1]
        })
        .expect("small table")
    }

    pub fn add_mod(domain: u8) -> FiniteOperation {
        FiniteOperation::from_fn(2, domain, |a| (a[0] + a[1]) % domain).expect("small table")
    }

    /// `x -> x + 1 mod |X|`.
    pub fn cycle(domain: u8) -> FiniteOperation {
        FiniteOperation::from_fn(1, domain, |a| (a[0] + 1) % domain).expect("small table")
    }

    /// All permutations of the domain as unary operations.
    pub fn symmetric_group(domain: u8) -> Vec<FiniteOperation> {
        use itertools::Itertools;
        (0..domain)
            .permutations(domain as usize)
            .map(|p| FiniteOperation::new(1, domain, p).expect("permutation table"))
            .collect()
    }
}

/// A clone truncated at arity `cap`: `parts[n - 1]` is the set of `n`-ary
/// members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedClone {
    domain: u8,
    cap: usize,
    parts: Vec<BTreeSet<FiniteOperation>>,
}

impl GradedClone {
    /// Projections only.
    pub fn projections(domain: u8, cap: usize) -> GradedClone {
        GradedClone {
            domain,
            cap,
            parts: (1..=cap)
                .map(|n| (0..n).map(|k| FiniteOperation::projection(n, domain, k)).collect())
                .collect(),
        }
    }

    pub fn domain(&self) -> u8 {
        self.domain
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// The `n`-ary part, `1 <= n <= cap`.
    pub fn part(&self, n: usize) -> &BTreeSet<FiniteOperation> {
        &self.parts[n - 1]
    }

    pub fn unary_part(&self) -> &BTreeSet<FiniteOperation> {
        self.part(1)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.len()).collect()
    }

    pub fn contains(&self, f: &FiniteOperation) -> bool {
        f.domain == self.domain && f.arity <= self.cap && self.parts[f.arity - 1].contains(f)
    }

    pub fn is_subset(&self, other: &GradedClone) -> bool {
        self.domain == other.domain
            && self.cap == other.cap
            && self.parts.iter().zip(&other.parts).all(|(a, b)| a.is_subset(b))
    }

    /// Arity-wise intersection; intersections of clones are clones.
    pub fn intersection(&self, other: &GradedClone) -> GradedClone {
        GradedClone {
            domain: self.domain,
            cap: self.cap,
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| a.intersection(b).cloned().collect())
                .collect(),
        }
    }

    /// Least arity at which the two clones differ.
    pub fn first_difference(&self, other: &GradedClone) -> Option<usize> {
        (1..=self.cap.min(other.cap)).find(|&n| self.part(n) != other.part(n))
    }

    /// Every member of arity at most `cap`.
    pub fn members(&self) -> impl Iterator<Item = &FiniteOperation> {
        self.parts.iter().flatten()
    }
}

/// The clone generated by `generators`, truncated at arity `cap`.
///
/// The `n`-ary part is the least set of `n`-ary operations that contains
/// the projections and is closed under applying any generator to members
/// of arity `n`, which is exactly the set of `n`-ary term operations.
pub fn closure(
    domain: u8,
    generators: &[FiniteOperation],
    cap: usize,
    budget: u64,
) -> Result<GradedClone, EngineError> {
    for g in generators {
        if g.domain != domain {
            return Err(EngineError::DomainMismatch(domain, g.domain));
        }
    }
    table_len(domain, cap).ok_or_else(|| EngineError::TooLarge {
        what: format!("arity {cap} tables over {domain} elements"),
        size: (domain as u128).saturating_pow(cap as u32),
        limit: MAX_TABLE as u128,
    })?;
    let mut spent = 0u64;
    let mut clone = GradedClone::projections(domain, cap);
    for n in 1..=cap {
        let mut all: Vec<FiniteOperation> = clone.parts[n - 1].iter().cloned().collect();
        let mut seen: HashSet<FiniteOperation> = all.iter().cloned().collect();
        let mut old_len = 0;
        while old_len < all.len() {
            let frontier = all.len();
            for g in generators {
                let k = g.arity;
                // tuples with at least one component from the last round
                for tuple in (0..k).map(|_| 0..frontier).multi_cartesian_product() {
                    if tuple.iter().all(|&i| i < old_len) {
                        continue;
                    }
                    spent += 1;
                    if spent > budget {
                        return Err(EngineError::Budget(budget));
                    }
                    let inner: Vec<&FiniteOperation> = tuple.iter().map(|&i| &all[i]).collect();
                    let h = g.compose_unchecked(&inner);
                    if seen.insert(h.clone()) {
                        all.push(h);
                    }
                }
            }
            old_len = frontier;
        }
        clone.parts[n - 1] = all.into_iter().collect();
    }
    Ok(clone)
}

fn check_monoid(domain: u8, monoid: &[FiniteOperation]) -> Result<(), EngineError> {
    for g in monoid {
        if g.domain != domain {
            return Err(EngineError::DomainMismatch(domain, g.domain));
        }
        if g.arity != 1 {
            return Err(EngineError::ArityMismatch {
                expected: 1,
                got: g.arity,
            });
        }
    }
    Ok(())
}

/// Binary `f` with `f(g1, g2)` in `monoid` for all `g1, g2` in `monoid`,
/// by scanning every binary table. Only for `|X| <= 3`.
pub fn binary_polymorphisms_exhaustive(
    domain: u8,
    monoid: &[FiniteOperation],
) -> Result<Vec<FiniteOperation>, EngineError> {
    check_monoid(domain, monoid)?;
    let cells = (domain as usize).pow(2);
    let total = (domain as u128).pow(cells as u32);
    if domain > 3 {
        return Err(EngineError::TooLarge {
            what: "exhaustive binary table scan".into(),
            size: total,
            limit: 19_683,
        });
    }
    let members: HashSet<&[u8]> = monoid.iter().map(|g| g.table()).collect();
    let d = domain as usize;
    let mut out = Vec::new();
    let mut table = vec![0u8; cells];
    let mut image = vec![0u8; d];
    for code in 0..total as usize {
        decode_index(code, domain, &mut table);
        let ok = monoid.iter().all(|g1| {
            monoid.iter().all(|g2| {
                for x in 0..d {
                    image[x] = table[g1.table[x] as usize * d + g2.table[x] as usize];
                }
                members.contains(&image[..])
            })
        });
        if ok {
            out.push(FiniteOperation::new(2, domain, table.clone())?);
        }
    }
    Ok(out)
}

/// Same result as [`binary_polymorphisms_exhaustive`] by depth-first
/// assignment of table cells. After each assignment every pair `(g1, g2)`
/// must still agree with some member of `monoid` on the points where
/// `x -> f(g1 x, g2 x)` is already defined. Domains up to 4.
pub fn binary_polymorphisms_backtracking(
    domain: u8,
    monoid: &[FiniteOperation],
) -> Result<Vec<FiniteOperation>, EngineError> {
    check_monoid(domain, monoid)?;
    if domain > 4 {
        return Err(EngineError::TooLarge {
            what: "binary polymorphism search domain".into(),
            size: domain as u128,
            limit: 4,
        });
    }
    let d = domain as usize;
    let unknown = domain;
    let radix = d + 1;
    // Partial images of monoid members, keyed in base d+1 with d = unknown.
    let mut patterns = vec![false; radix.pow(d as u32)];
    for g in monoid {
        for mask in 0..1usize << d {
            let key = (0..d).fold(0, |acc, x| {
                acc * radix + if mask >> x & 1 == 1 { g.table[x] as usize } else { d }
            });
            patterns[key] = true;
        }
    }
    let pairs: Vec<(&[u8], &[u8])> = monoid
        .iter()
        .flat_map(|g1| monoid.iter().map(move |g2| (g1.table(), g2.table())))
        .collect();

    struct Search<'a> {
        d: usize,
        radix: usize,
        unknown: u8,
        patterns: Vec<bool>,
        pairs: Vec<(&'a [u8], &'a [u8])>,
        table: Vec<u8>,
        out: Vec<Vec<u8>>,
    }

    impl Search<'_> {
        fn consistent(&self, cell: usize) -> bool {
            let (u, v) = (cell / self.d, cell % self.d);
            self.pairs.iter().all(|(g1, g2)| {
                if !(0..self.d).any(|x| g1[x] as usize == u && g2[x] as usize == v) {
                    return true;
                }
                let key = (0..self.d).fold(0, |acc, x| {
                    let val = self.table[g1[x] as usize * self.d + g2[x] as usize];
                    acc * self.radix + if val == self.unknown { self.d } else { val as usize }
                });
                self.patterns[key]
            })
        }

        fn run(&mut self, cell: usize) {
            if cell == self.table.len() {
                self.out.push(self.table.clone());
                return;
            }
            for v in 0..self.d as u8 {
                self.table[cell] = v;
                if self.consistent(cell) {
                    self.run(cell + 1);
                }
            }
            self.table[cell] = self.unknown;
        }
    }

    let mut search = Search {
        d,
        radix,
        unknown,
        patterns,
        pairs,
        table: vec![unknown; d * d],
        out: Vec::new(),
    };
    search.run(0);
    search
        .out
        .into_iter()
        .map(|t| FiniteOperation::new(2, domain, t))
        .collect()
}

/// Exhaustive scan up to `|X| = 3`, backtracking for `|X| = 4`.
pub fn binary_polymorphisms(domain: u8, monoid: &[FiniteOperation]) -> Result<Vec<FiniteOperation>, EngineError> {
    if domain <= 3 {
        binary_polymorphisms_exhaustive(domain, monoid)
    } else {
        binary_polymorphisms_backtracking(domain, monoid)
    }
}

/// The three facts about a binary polymorphism `f` of the full symmetric
/// group, in the order they are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollapsingSteps {
    /// `f(x, y)` is `f(x, x)` or `f(y, y)`.
    pub conservative_diagonal: bool,
    /// `f(x, y) = f(x, x)` implies `f(y, x) = f(y, y)`.
    pub symmetric_choice: bool,
    /// `f` depends on at most one variable.
    pub essentially_unary: bool,
    /// `x -> f(x, x)` is a permutation.
    pub diagonal_permutation: bool,
}

impl CollapsingSteps {
    pub fn of(f: &FiniteOperation) -> CollapsingSteps {
        let d = f.domain;
        let diag = |x: u8| f.eval(&[x, x]);
        let pairs = || (0..d).flat_map(|x| (0..d).map(move |y| (x, y)));
        CollapsingSteps {
            conservative_diagonal: pairs().all(|(x, y)| {
                let v = f.eval(&[x, y]);
                v == diag(x) || v == diag(y)
            }),
            symmetric_choice: pairs().all(|(x, y)| f.eval(&[x, y]) != diag(x) || f.eval(&[y, x]) == diag(y)),
            essentially_unary: f.is_essentially_unary(),
            diagonal_permutation: f.diagonal().is_permutation(),
        }
    }

    pub fn all(&self) -> bool {
        self.conservative_diagonal && self.symmetric_choice && self.essentially_unary && self.diagonal_permutation
    }
}

/// Binary polymorphisms of the symmetric group on `domain` points are all
/// essentially unary with a permutation as their unary function.
pub fn collapsing_check(domain: u8) -> Result<VerificationReport, EngineError> {
    let mut report = VerificationReport::new(
        "collapsing",
        &format!("every binary polymorphism of the symmetric group on {domain} points is essentially unary"),
        Policy::Exhaustive,
    );
    let group = ops::symmetric_group(domain);
    let (method, polys) = if domain <= 3 {
        ("exhaustive", binary_polymorphisms_exhaustive(domain, &group)?)
    } else {
        ("backtracking", binary_polymorphisms_backtracking(domain, &group)?)
    };
    report.note(format!("{method} search, binary arity only"));
    report.set_count("group_order", group.len() as u64);
    report.set_count("binary_tables", (domain as u64).pow((domain as u32).pow(2)));
    report.set_count("binary_polymorphisms", polys.len() as u64);
    for f in &polys {
        let steps = CollapsingSteps::of(f);
        for (name, ok) in [
            ("conservative_diagonal", steps.conservative_diagonal),
            ("symmetric_choice", steps.symmetric_choice),
            ("essentially_unary", steps.essentially_unary),
            ("diagonal_permutation", steps.diagonal_permutation),
        ] {
            if ok {
                report.add_count(name, 1);
            }
        }
        report.expect(
            steps.all(),
            || json!({ "operation": f.to_text(), "steps": format!("{steps:?}") }),
        );
    }
    // essentially unary with a permutation: 2 * |S_n| operations
    report.expect(polys.len() == 2 * group.len(), || json!({ "count": polys.len() }));
    Ok(report)
}

/// The four clones of the pentagon on the chain `0 < 1 < 2`.
#[derive(Debug, Clone)]
pub struct Pentagon {
    pub proj: GradedClone,
    pub min: GradedClone,
    pub max: GradedClone,
    pub min_med: GradedClone,
    pub min_max: GradedClone,
}

/// Certifies that `<min>`, `<max>`, `<min, med>` and `<min, max>` together
/// with the projections form a pentagon `N5` up to arity `cap`, all with
/// unary part `{id}`.
pub fn pentagon_check(cap: usize, budget: u64) -> Result<(VerificationReport, Pentagon), EngineError> {
    const X: u8 = 3;
    if cap < 3 {
        return Err(EngineError::TooLarge {
            what: "pentagon needs arity 3 for the median; cap".into(),
            size: cap as u128,
            limit: 3,
        });
    }
    let (min, max, med) = (ops::min(X), ops::max(X), ops::med(X));
    let p = Pentagon {
        proj: GradedClone::projections(X, cap),
        min: closure(X, std::slice::from_ref(&min), cap, budget)?,
        max: closure(X, std::slice::from_ref(&max), cap, budget)?,
        min_med: closure(X, &[min.clone(), med.clone()], cap, budget)?,
        min_max: closure(X, &[min.clone(), max.clone()], cap, budget)?,
    };
    let mut report = VerificationReport::new(
        "pentagon",
        &format!("<min> < <min,med> < <min,max>, <max> < <min,max> and <min,med> ∧ <max> = Proj form a pentagon in the interval of the trivial monoid, up to arity {cap}"),
        Policy::Exhaustive,
    );
    let strict = |a: &GradedClone, b: &GradedClone| a.is_subset(b) && a != b;
    let claim = |report: &mut VerificationReport, name: &str, ok: bool| {
        report.add_count("claims_checked", 1);
        report.expect(ok, || json!({ "claim": name }));
    };
    let lattice_median = {
        let m = |a: &FiniteOperation, b: &FiniteOperation| min.compose(&[a, b]).expect("binary");
        let pr = |k| FiniteOperation::projection(3, X, k);
        let (x, y, z) = (pr(0), pr(1), pr(2));
        let (xy, yz, xz) = (m(&x, &y), m(&y, &z), m(&x, &z));
        let inner = max.compose(&[&xy, &yz]).expect("ternary");
        max.compose(&[&inner, &xz]).expect("ternary")
    };
    claim(
        &mut report,
        "max(min(x,y),min(y,z),min(x,z)) is the median",
        lattice_median == med,
    );
    claim(&mut report, "med in <min,max>", p.min_max.contains(&med));
    claim(&mut report, "max not in <min,med>", !p.min_med.contains(&max));
    claim(&mut report, "med not in <min>", !p.min.contains(&med));
    claim(&mut report, "Proj < <min>", strict(&p.proj, &p.min));
    claim(&mut report, "Proj < <max>", strict(&p.proj, &p.max));
    claim(&mut report, "<min> < <min,med>", strict(&p.min, &p.min_med));
    claim(&mut report, "<min,med> < <min,max>", strict(&p.min_med, &p.min_max));
    claim(&mut report, "<max> < <min,max>", strict(&p.max, &p.min_max));
    claim(&mut report, "<max> not below <min,med>", !p.max.is_subset(&p.min_med));
    claim(
        &mut report,
        "<min,med> ∧ <max> = Proj",
        p.min_med.intersection(&p.max) == p.proj,
    );
    claim(
        &mut report,
        "<min> ∧ <max> = Proj",
        p.min.intersection(&p.max) == p.proj,
    );
    // <min> ∨ <max> is generated by min and max, so equals <min,max>
    let join = closure(X, &[min.clone(), max.clone()], cap, budget)?;
    let modular_left = &p.min; // <min> ∨ (<max> ∧ <min,med>) = <min> ∨ Proj
    let modular_right = join.intersection(&p.min_med);
    claim(&mut report, "modular law fails", *modular_left != modular_right);
    let id = FiniteOperation::projection(1, X, 0);
    for (name, c) in [
        ("Proj", &p.proj),
        ("<min>", &p.min),
        ("<max>", &p.max),
        ("<min,med>", &p.min_med),
        ("<min,max>", &p.min_max),
    ] {
        let only_id = c.unary_part().len() == 1 && c.unary_part().contains(&id);
        claim(&mut report, &format!("unary part of {name} is {{id}}"), only_id);
        report.set_count(&format!("size_{name}"), c.members().count() as u64);
    }
    report.set_count("cap", cap as u64);
    Ok((report, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_and_text() {
        let m = ops::min(3);
        assert_eq!(m.eval(&[2, 1]), 1);
        assert_eq!(m.table(), &[0, 0, 0, 0, 1, 1, 0, 1, 2]);
        assert_eq!(FiniteOperation::parse(&m.to_text()).unwrap(), m);
        assert!(FiniteOperation::new(2, 3, vec![0; 8]).is_err());
        assert!(FiniteOperation::new(1, 3, vec![0, 1, 3]).is_err());
        assert!(FiniteOperation::parse("2 3 0 0").is_err());
    }

    #[test]
    fn essential_variables() {
        assert!(FiniteOperation::projection(2, 3, 0).is_essentially_unary());
        assert!(!ops::min(3).is_essentially_unary());
        let sigma = FiniteOperation::from_fn(2, 3, |a| (a[0] + 1) % 3).unwrap();
        assert_eq!(sigma.essential_variables(), vec![0]);
        assert!(FiniteOperation::constant(3, 3, 1)
            .unwrap()
            .essential_variables()
            .is_empty());
        assert_eq!(ops::med(3).essential_variables(), vec![0, 1, 2]);
    }

    #[test]
    fn composition() {
        let x = FiniteOperation::projection(2, 3, 0);
        let y = FiniteOperation::projection(2, 3, 1);
        assert_eq!(ops::min(3).compose(&[&y, &x]).unwrap(), ops::min(3));
        assert_eq!(ops::min(3).compose(&[&x, &x]).unwrap(), x);
        assert!(ops::min(3).compose(&[&x]).is_err());
    }

    #[test]
    fn closure_basics() {
        let proj = closure(3, &[], 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(proj, GradedClone::projections(3, 3));
        let m = closure(3, &[ops::min(3)], 3, DEFAULT_BUDGET).unwrap();
        // min of each nonempty subset of variables
        assert_eq!(m.sizes(), vec![1, 3, 7]);
        let lattice = closure(3, &[ops::min(3), ops::max(3)], 3, DEFAULT_BUDGET).unwrap();
        // free distributive lattice on n generators, without top and bottom
        assert_eq!(lattice.sizes(), vec![1, 4, 18]);
        let again: Vec<FiniteOperation> = lattice.part(2).iter().cloned().collect();
        assert_eq!(closure(3, &again, 3, DEFAULT_BUDGET).unwrap(), lattice);
        assert!(matches!(
            closure(3, &[ops::min(3), ops::max(3)], 3, 10),
            Err(EngineError::Budget(10))
        ));
    }

    #[test]
    fn polymorphisms_of_small_monoids() {
        let id = vec![FiniteOperation::projection(1, 3, 0)];
        assert_eq!(binary_polymorphisms(3, &id).unwrap().len(), 729);
        let all: Vec<_> = (0..27)
            .map(|c| {
                let mut t = vec![0u8; 3];
                decode_index(c, 3, &mut t);
                FiniteOperation::new(1, 3, t).unwrap()
            })
            .collect();
        assert_eq!(binary_polymorphisms(3, &all).unwrap().len(), 19_683);
        let s3 = ops::symmetric_group(3);
        let a = binary_polymorphisms_exhaustive(3, &s3).unwrap();
        let b = binary_polymorphisms_backtracking(3, &s3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 12);
    }

    #[test]
    fn collapsing() {
        let r = collapsing_check(3).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.count("binary_polymorphisms"), 12);
        let r = collapsing_check(4).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(r.count("binary_polymorphisms"), 48);
    }

    #[test]
    fn pentagon() {
        let (r, p) = pentagon_check(3, DEFAULT_BUDGET).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert_eq!(p.min_med.sizes()[1], 3);
    }
}
