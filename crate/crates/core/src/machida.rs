//! Clones as points of Cantor space, and the metric in which two clones are
//! close when they agree on many arities.
//!
//! All statements are truncated at an arity cap: a set of operations is
//! encoded by one bit per operation of arity at most `cap`, listed arity by
//! arity and lexicographically by table within an arity.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::cloneengine::{closure, ops, EngineError, FiniteOperation, GradedClone};
use crate::report::{Policy, VerificationReport};

/// Largest enumeration that will be indexed.
pub const MAX_ENUMERATION: u128 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachidaError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{size} operations up to arity {cap} on {domain} points exceeds {limit}")]
    TooLarge {
        domain: u8,
        cap: usize,
        size: u128,
        limit: u128,
    },
    #[error("operation of arity {arity} is beyond the cap {cap}")]
    ArityBeyondCap { arity: usize, cap: usize },
    #[error("operation on {got} points in an enumeration over {expected}")]
    DomainMismatch { expected: u8, got: u8 },
    #[error("clones truncated at arities {0} and {1}")]
    CapMismatch(usize, usize),
    #[error("bad bit sequence: {0}")]
    Parse(String),
}

/// All operations on `domain` points up to arity `cap`, ordered by arity and
/// then lexicographically by table. Operations are produced on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationEnumeration {
    domain: u8,
    cap: usize,
    /// `offsets[n - 1]` is the index of the first `n`-ary operation;
    /// `offsets[cap]` is the total.
    offsets: Vec<usize>,
}

impl OperationEnumeration {
    pub fn new(domain: u8, cap: usize) -> Result<OperationEnumeration, MachidaError> {
        let mut offsets = vec![0usize];
        let mut total: u128 = 0;
        for n in 1..=cap {
            let cells = (domain as u128).saturating_pow(n as u32);
            let count = (domain as u128).saturating_pow(u32::try_from(cells).unwrap_or(u32::MAX));
            total = total.saturating_add(count);
            if total > MAX_ENUMERATION {
                return Err(MachidaError::TooLarge {
                    domain,
                    cap,
                    size: total,
                    limit: MAX_ENUMERATION,
                });
            }
            offsets.push(total as usize);
        }
        Ok(OperationEnumeration { domain, cap, offsets })
    }

    pub fn domain(&self) -> u8 {
        self.domain
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.offsets[self.cap]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Indices of the `n`-ary operations.
    pub fn arity_range(&self, n: usize) -> std::ops::Range<usize> {
        self.offsets[n - 1]..self.offsets[n]
    }

    pub fn get(&self, i: usize) -> FiniteOperation {
        let n = (1..=self.cap).find(|&n| i < self.offsets[n]).expect("index in range");
        let cells = (self.domain as usize).pow(n as u32);
        let mut code = i - self.offsets[n - 1];
        let mut table = vec![0u8; cells];
        for slot in table.iter_mut().rev() {
            *slot = (code % self.domain as usize) as u8;
            code /= self.domain as usize;
        }
        FiniteOperation::new(n, self.domain, table).expect("enumerated table")
    }

    pub fn index_of(&self, f: &FiniteOperation) -> Result<usize, MachidaError> {
        if f.domain() != self.domain {
            return Err(MachidaError::DomainMismatch {
                expected: self.domain,
                got: f.domain(),
            });
        }
        if f.arity() > self.cap {
            return Err(MachidaError::ArityBeyondCap {
                arity: f.arity(),
                cap: self.cap,
            });
        }
        let code = f
            .table()
            .iter()
            .fold(0usize, |acc, &v| acc * self.domain as usize + v as usize);
        Ok(self.offsets[f.arity() - 1] + code)
    }

    pub fn iter(&self) -> impl Iterator<Item = FiniteOperation> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    /// Indices of all projections.
    pub fn projection_indices(&self) -> Vec<usize> {
        (1..=self.cap)
            .flat_map(|n| (0..n).map(move |k| (n, k)))
            .map(|(n, k)| {
                self.index_of(&FiniteOperation::projection(n, self.domain, k))
                    .expect("projection within cap")
            })
            .collect()
    }
}

/// Characteristic sequence of a set of operations in an enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSequence {
    domain: u8,
    cap: usize,
    bits: Vec<bool>,
}

impl BitSequence {
    pub fn encode<'a>(
        ops: impl IntoIterator<Item = &'a FiniteOperation>,
        en: &OperationEnumeration,
    ) -> Result<BitSequence, MachidaError> {
        let mut bits = vec![false; en.len()];
        for f in ops {
            bits[en.index_of(f)?] = true;
        }
        Ok(BitSequence {
            domain: en.domain,
            cap: en.cap,
            bits,
        })
    }

    pub fn of_clone(clone: &GradedClone, en: &OperationEnumeration) -> Result<BitSequence, MachidaError> {
        if clone.cap() != en.cap() {
            return Err(MachidaError::CapMismatch(clone.cap(), en.cap()));
        }
        BitSequence::encode(clone.members(), en)
    }

    pub fn decode(&self, en: &OperationEnumeration) -> BTreeSet<FiniteOperation> {
        self.ones().map(|i| en.get(i)).collect()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    /// Header `domain cap length`, then the bits as a 0/1 string.
    pub fn to_text(&self) -> String {
        let body: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        format!("{} {} {}\n{body}\n", self.domain, self.cap, self.bits.len())
    }

    pub fn parse(text: &str) -> Result<BitSequence, MachidaError> {
        let mut lines = text.lines();
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| MachidaError::Parse("empty input".into()))?
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| MachidaError::Parse(format!("bad header field `{t}`")))
            })
            .collect::<Result<_, _>>()?;
        let [domain, cap, len] = header[..] else {
            return Err(MachidaError::Parse("header must be `domain cap length`".into()));
        };
        let body = lines.next().unwrap_or("").trim();
        let bits = body
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(MachidaError::Parse(format!("unexpected character `{c}`"))),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        if bits.len() != len {
            return Err(MachidaError::Parse(format!(
                "header says {len} bits, found {}",
                bits.len()
            )));
        }
        let domain = u8::try_from(domain).map_err(|_| MachidaError::Parse("domain too large".into()))?;
        Ok(BitSequence { domain, cap, bits })
    }
}

/// Whether the sequence lies in the set of sequences with every projection
/// bit set, and in the set where every composite of members is a member.
pub fn lambda_membership(s: &BitSequence, en: &OperationEnumeration) -> (bool, bool) {
    let lambda1 = en.projection_indices().into_iter().all(|i| s.get(i));
    let members: Vec<Vec<FiniteOperation>> = (1..=en.cap)
        .map(|n| en.arity_range(n).filter(|&i| s.get(i)).map(|i| en.get(i)).collect())
        .collect();
    let lambda2 = members.iter().flatten().all(|f| {
        (1..=en.cap).all(|n| {
            let inner = &members[n - 1];
            (0..f.arity())
                .map(|_| inner.iter())
                .multi_cartesian_product()
                .all(|tuple| {
                    let h = f.compose(&tuple).expect("same arity and domain");
                    s.get(en.index_of(&h).expect("within cap"))
                })
        })
    });
    (lambda1, lambda2)
}

/// `0` or `1 / 2^(n-1)` where `n` is the least arity at which two clones
/// differ. Ordered by value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    Zero,
    /// The least arity of difference.
    FirstDifference(usize),
}

impl Distance {
    pub fn value(self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::FirstDifference(n) => 0.5f64.powi(n as i32 - 1),
        }
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Distance) -> Ordering {
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, _) => Ordering::Less,
            (_, Distance::Zero) => Ordering::Greater,
            (Distance::FirstDifference(a), Distance::FirstDifference(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Distance) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => f.write_str("0"),
            Distance::FirstDifference(1) => f.write_str("1"),
            Distance::FirstDifference(n) => write!(f, "1/{}", 1u64 << (n - 1)),
        }
    }
}

pub fn machida_distance(c: &GradedClone, d: &GradedClone) -> Result<Distance, MachidaError> {
    if c.cap() != d.cap() {
        return Err(MachidaError::CapMismatch(c.cap(), d.cap()));
    }
    if c.domain() != d.domain() {
        return Err(MachidaError::DomainMismatch {
            expected: c.domain(),
            got: d.domain(),
        });
    }
    Ok(match c.first_difference(d) {
        None => Distance::Zero,
        Some(n) => Distance::FirstDifference(n),
    })
}

/// Named clones on three points generated from familiar operations.
pub fn minmax_pool(cap: usize, budget: u64) -> Result<Vec<(String, GradedClone)>, MachidaError> {
    const X: u8 = 3;
    let named: Vec<(&str, Vec<FiniteOperation>)> = vec![
        ("Proj", vec![]),
        ("<min>", vec![ops::min(X)]),
        ("<max>", vec![ops::max(X)]),
        ("<min,med>", vec![ops::min(X), ops::med(X)]),
        ("<min,max>", vec![ops::min(X), ops::max(X)]),
        ("<const0>", vec![FiniteOperation::constant(1, X, 0)?]),
        ("<cycle>", vec![ops::cycle(X)]),
        ("<x+y>", vec![ops::add_mod(X)]),
    ];
    named
        .into_iter()
        .map(|(name, gens)| Ok((name.to_string(), closure(X, &gens, cap, budget)?)))
        .collect()
}

/// Pairwise distances of a named pool.
pub fn distance_table(pool: &[(String, GradedClone)]) -> Result<Vec<Vec<Distance>>, MachidaError> {
    pool.iter()
        .map(|(_, c)| pool.iter().map(|(_, d)| machida_distance(c, d)).collect())
        .collect()
}

/// The metric axioms with the ultrametric inequality, and that distance
/// below 1 means equal unary parts, over every pair and triple of the pool.
pub fn verify_metric(pool: &[(String, GradedClone)]) -> Result<VerificationReport, MachidaError> {
    let mut report = VerificationReport::new(
        "machida-metric",
        "on the pool, d is an ultrametric, d(C,D) < 1 exactly when C and D share their unary part, and clones differing at arity n differ at every higher arity",
        Policy::Exhaustive,
    );
    let table = distance_table(pool)?;
    let n = pool.len();
    let name = |i: usize| pool[i].0.clone();
    for i in 0..n {
        for j in 0..n {
            let (c, d) = (&pool[i].1, &pool[j].1);
            let dij = table[i][j];
            report.add_count("pairs", 1);
            report.expect(dij == table[j][i], || json!({ "asymmetric": [name(i), name(j)] }));
            report.expect(
                (dij == Distance::Zero) == (c == d),
                || json!({ "zero_iff_equal": [name(i), name(j)] }),
            );
            let close = dij < Distance::FirstDifference(1);
            report.expect(
                close == (c.unary_part() == d.unary_part()),
                || json!({ "sphere": [name(i), name(j)], "distance": dij.to_string() }),
            );
            if let Distance::FirstDifference(k) = dij {
                report.expect(
                    (k..=c.cap()).all(|m| c.part(m) != d.part(m)),
                    || json!({ "difference_not_monotone": [name(i), name(j)] }),
                );
            }
            for k in 0..n {
                report.add_count("triples", 1);
                let ok = table[i][k] <= table[i][j].max(table[j][k]);
                report.expect(ok, || json!({ "ultrametric": [name(i), name(j), name(k)] }));
            }
        }
    }
    report.set_count("pool_size", n as u64);
    report.set_count("cap", pool.first().map_or(0, |(_, c)| c.cap()) as u64);
    Ok(report)
}

/// Compares the membership test against a direct closure computation on
/// random capped sets: plain random subsets, closures of random operations,
/// and such closures with one member removed. Also checks that decoding
/// inverts encoding.
pub fn verify_encoding(
    domain: u8,
    cap: usize,
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<VerificationReport, MachidaError> {
    let en = OperationEnumeration::new(domain, cap)?;
    let mut report = VerificationReport::new(
        "cantor-encoding",
        "a capped set of operations is a clone up to the cap exactly when its characteristic sequence lies in both membership sets",
        Policy::Sampled { count: trials, seed },
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<FiniteOperation> = en.iter().collect();
    for t in 0..trials {
        let set: BTreeSet<FiniteOperation> = match t % 3 {
            0 => all.iter().filter(|_| rng.random_bool(0.5)).cloned().collect(),
            _ => {
                let k = rng.random_range(0..3);
                let gens: Vec<FiniteOperation> = all.choose_multiple(&mut rng, k).cloned().collect();
                let mut c: BTreeSet<FiniteOperation> =
                    closure(domain, &gens, cap, budget)?.members().cloned().collect();
                if t % 3 == 2 {
                    let victim = c.iter().nth(rng.random_range(0..c.len())).cloned().expect("nonempty");
                    c.remove(&victim);
                }
                c
            }
        };
        let s = BitSequence::encode(&set, &en)?;
        report.add_count("sets", 1);
        report.expect(s.decode(&en) == set, || json!({ "trial": t, "round_trip": false }));
        report.expect(
            BitSequence::parse(&s.to_text()).as_ref() == Ok(&s),
            || json!({ "trial": t, "text_round_trip": false }),
        );
        let (l1, l2) = lambda_membership(&s, &en);
        let gens: Vec<FiniteOperation> = set.iter().cloned().collect();
        let closed = closure(domain, &gens, cap, budget)?
            .members()
            .cloned()
            .collect::<BTreeSet<_>>()
            == set;
        report.add_count(if closed { "clones" } else { "non_clones" }, 1);
        report.expect(
            (l1 && l2) == closed,
            || json!({ "trial": t, "lambda1": l1, "lambda2": l2, "closed": closed, "sequence": s.to_text() }),
        );
    }
    Ok(report)
}
