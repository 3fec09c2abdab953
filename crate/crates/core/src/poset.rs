//! Finite partial orders, their lattices of order ideals, and Sperner
//! families of equal-size subsets with the induced notion of "small" set.
//!
//! Subsets are bitmasks (`u32`), so a poset or a ground set holds at most
//! [`MAX_ELEMENTS`] elements. Element `i` of a poset is bit `i`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Upper bound on poset and ground-set sizes (subsets are `u32` masks and
/// ideal enumeration scans every subset).
pub const MAX_ELEMENTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("cover relations contain a cycle through `{0}` and `{1}`")]
    CycleDetected(String, String),
    #[error("{0} elements exceed the limit of {MAX_ELEMENTS}")]
    TooLarge(usize),
    #[error("sets of `{0}` and `{1}` are comparable under inclusion")]
    InclusionViolation(String, String),
    #[error("member `{name}` has {got} elements, expected {expected}")]
    SizeMismatch { name: String, expected: usize, got: usize },
    #[error("no member set given for poset element `{0}`")]
    MissingMember(String),
    #[error("member sets must be nonempty")]
    EmptyMember,
}

/// A finite partial order stored as down-sets: bit `j` of `below[i]` is set
/// iff `j <= i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    names: Vec<String>,
    below: Vec<u32>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of `covers` (pairs `(lo, hi)`
    /// meaning `lo < hi`). Self-loops are ignored.
    pub fn from_relations(names: Vec<String>, covers: &[(usize, usize)]) -> Result<Poset, PosetError> {
        let n = names.len();
        if n > MAX_ELEMENTS {
            return Err(PosetError::TooLarge(n));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(PosetError::DuplicateElement(name.clone()));
            }
        }
        let mut below: Vec<u32> = (0..n).map(|i| 1 << i).collect();
        for &(lo, hi) in covers {
            below[hi] |= 1 << lo;
        }
        // Warshall over bitmask rows.
        for k in 0..n {
            for i in 0..n {
                if below[i] >> k & 1 == 1 {
                    below[i] |= below[k];
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if below[i] >> j & 1 == 1 && below[j] >> i & 1 == 1 {
                    return Err(PosetError::CycleDetected(names[i].clone(), names[j].clone()));
                }
            }
        }
        Ok(Poset { names, below })
    }

    /// The `n`-element antichain with elements `x0, x1, ...`.
    pub fn antichain(n: usize) -> Result<Poset, PosetError> {
        Poset::from_relations(numbered_names("x", n), &[])
    }

    /// The chain `x0 < x1 < ... < x(n-1)`.
    pub fn chain(n: usize) -> Result<Poset, PosetError> {
        let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Poset::from_relations(numbered_names("x", n), &covers)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.below[j] >> i & 1 == 1
    }

    /// Mask of all elements `<= i`.
    pub fn down_set(&self, i: usize) -> u32 {
        self.below[i]
    }

    pub fn full_mask(&self) -> u32 {
        mask_of_len(self.len())
    }

    /// Checks reflexivity, antisymmetry and transitivity by matrix scan.
    pub fn is_valid_order(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            if !self.leq(i, i) {
                return false;
            }
            for j in 0..n {
                if i != j && self.leq(i, j) && self.leq(j, i) {
                    return false;
                }
                for k in 0..n {
                    if self.leq(i, j) && self.leq(j, k) && !self.leq(i, k) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Pairs `(lo, hi)` with `lo < hi` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for hi in 0..n {
            for lo in 0..n {
                if lo == hi || !self.leq(lo, hi) {
                    continue;
                }
                let between = (0..n).any(|m| m != lo && m != hi && self.leq(lo, m) && self.leq(m, hi));
                if !between {
                    out.push((lo, hi));
                }
            }
        }
        out
    }

    /// All comparable pairs `(lo, hi)` with `lo <= hi`, including `lo == hi`.
    pub fn comparable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for hi in 0..n {
            for lo in 0..n {
                if self.leq(lo, hi) {
                    out.push((lo, hi));
                }
            }
        }
        out
    }

    /// Adds a new least element named `name` below everything.
    pub fn with_bottom(&self, name: &str) -> Result<Poset, PosetError> {
        let mut names = vec![name.to_string()];
        names.extend(self.names.iter().cloned());
        let mut covers: Vec<_> = (1..names.len()).map(|i| (0, i)).collect();
        covers.extend(self.covers().into_iter().map(|(lo, hi)| (lo + 1, hi + 1)));
        Poset::from_relations(names, &covers)
    }

    /// Searches for an order isomorphism `self -> other`; `Some(map)` gives
    /// the image index of each element.
    pub fn find_isomorphism(&self, other: &Poset) -> Option<Vec<usize>> {
        let n = self.len();
        if n != other.len() {
            return None;
        }
        let signature = |p: &Poset, i: usize| {
            let downs = p.below[i].count_ones();
            let ups = (0..p.len()).filter(|&j| p.leq(i, j)).count();
            (downs, ups)
        };
        let mine: Vec<_> = (0..n).map(|i| signature(self, i)).collect();
        let theirs: Vec<_> = (0..n).map(|i| signature(other, i)).collect();
        let mut sorted_a = mine.clone();
        let mut sorted_b = theirs.clone();
        sorted_a.sort_unstable();
        sorted_b.sort_unstable();
        if sorted_a != sorted_b {
            return None;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if self.extend_iso(other, &mine, &theirs, 0, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    fn extend_iso(
        &self,
        other: &Poset,
        mine: &[(u32, usize)],
        theirs: &[(u32, usize)],
        i: usize,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if i == self.len() {
            return true;
        }
        for cand in 0..other.len() {
            if used[cand] || mine[i] != theirs[cand] {
                continue;
            }
            let consistent =
                (0..i).all(|j| self.leq(j, i) == other.leq(map[j], cand) && self.leq(i, j) == other.leq(cand, map[j]));
            if !consistent {
                continue;
            }
            map[i] = cand;
            used[cand] = true;
            if self.extend_iso(other, mine, theirs, i + 1, map, used) {
                return true;
            }
            used[cand] = false;
        }
        map[i] = usize::MAX;
        false
    }

    /// Renders the poset in the text format accepted by [`parse_poset`].
    pub fn to_text(&self) -> String {
        let mut out = self.names.join(" ");
        let covers = self.covers();
        if !covers.is_empty() {
            let rels: Vec<String> = covers
                .iter()
                .map(|&(lo, hi)| format!("{}<{}", self.names[lo], self.names[hi]))
                .collect();
            out.push_str(" / ");
            out.push_str(&rels.join(", "));
        }
        out
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn numbered_names(prefix: &str, n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

pub(crate) fn mask_of_len(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn mask_elements(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

/// Parses `"p r / r<p"`: element ids, then after `/` (or on the second line)
/// comma-separated covers `x<y`. Elements are sorted by id.
pub fn parse_poset(text: &str) -> Result<Poset, PosetError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let (elem_line, elems, rel_parts): (usize, &str, Vec<(usize, &str)>) = match lines.first() {
        None => {
            return Err(PosetError::Malformed {
                line: 1,
                message: "no elements listed".into(),
            })
        }
        Some(&(line, first)) => match first.split_once('/') {
            Some((e, r)) => {
                let mut rest = vec![(line, r)];
                rest.extend(lines[1..].iter().copied());
                (line, e, rest)
            }
            None => {
                let rest = lines[1..]
                    .iter()
                    .map(|&(l, s)| (l, s.strip_prefix('/').unwrap_or(s)))
                    .collect();
                (line, first, rest)
            }
        },
    };

    let mut names: Vec<String> = elems.split_whitespace().map(str::to_string).collect();
    if names.is_empty() {
        return Err(PosetError::Malformed {
            line: elem_line,
            message: "no elements listed".into(),
        });
    }
    for name in &names {
        if name.contains(['<', ',', ':']) {
            return Err(PosetError::Malformed {
                line: elem_line,
                message: format!("invalid element id `{name}`"),
            });
        }
    }
    names.sort();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    if index.len() != names.len() {
        let dup = names.windows(2).find(|w| w[0] == w[1]).map(|w| w[0].clone());
        return Err(PosetError::DuplicateElement(dup.unwrap_or_default()));
    }

    let mut covers = Vec::new();
    for (line, part) in rel_parts {
        for rel in part.split(',').map(str::trim).filter(|r| !r.is_empty()) {
            let Some((lo, hi)) = rel.split_once('<') else {
                return Err(PosetError::Malformed {
                    line,
                    message: format!("expected `x<y`, found `{rel}`"),
                });
            };
            let (lo, hi) = (lo.trim(), hi.trim());
            let lookup = |x: &str| {
                index.get(x).copied().ok_or_else(|| PosetError::Malformed {
                    line,
                    message: format!("unknown element `{x}`"),
                })
            };
            let (lo_i, hi_i) = (lookup(lo)?, lookup(hi)?);
            covers.push((lo_i, hi_i));
        }
    }
    Poset::from_relations(names, &covers)
}

/// A downward-closed subset of a poset, as an element mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderIdeal(pub u32);

impl OrderIdeal {
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset(self, other: OrderIdeal) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: OrderIdeal) -> OrderIdeal {
        OrderIdeal(self.0 | other.0)
    }

    pub fn intersection(self, other: OrderIdeal) -> OrderIdeal {
        OrderIdeal(self.0 & other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        mask_elements(self.0)
    }

    pub fn is_downward_closed(self, poset: &Poset) -> bool {
        self.elements().all(|i| poset.down_set(i) & !self.0 == 0)
    }

    /// Element names, in poset order.
    pub fn names(self, poset: &Poset) -> Vec<String> {
        self.elements().map(|i| poset.name(i).to_string()).collect()
    }

    pub fn label(self, poset: &Poset) -> String {
        format!("{{{}}}", self.names(poset).join(","))
    }
}

/// All order ideals of a poset, sorted by size then mask (a linear
/// extension of inclusion).
#[derive(Debug, Clone)]
pub struct IdealLattice {
    poset: Poset,
    ideals: Vec<OrderIdeal>,
    index: HashMap<OrderIdeal, usize>,
}

/// Enumerates the downward-closed subsets of `poset`.
pub fn order_ideals(poset: &Poset) -> Result<IdealLattice, PosetError> {
    let n = poset.len();
    if n > MAX_ELEMENTS {
        return Err(PosetError::TooLarge(n));
    }
    let mut ideals: Vec<OrderIdeal> = (0..=poset.full_mask())
        .map(OrderIdeal)
        .filter(|s| s.is_downward_closed(poset))
        .collect();
    ideals.sort_by_key(|s| (s.len(), s.0));
    let index = ideals.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    Ok(IdealLattice {
        poset: poset.clone(),
        ideals,
        index,
    })
}

/// The power set of an `n`-element set, as the ideals of the `n`-antichain.
pub fn power_set_lattice(n: usize) -> Result<IdealLattice, PosetError> {
    if n > MAX_ELEMENTS {
        return Err(PosetError::TooLarge(n));
    }
    order_ideals(&Poset::antichain(n)?)
}

impl IdealLattice {
    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn ideals(&self) -> &[OrderIdeal] {
        &self.ideals
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn position(&self, ideal: OrderIdeal) -> Option<usize> {
        self.index.get(&ideal).copied()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.ideals[i].is_subset(self.ideals[j])
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.index[&self.ideals[i].union(self.ideals[j])]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.index[&self.ideals[i].intersection(self.ideals[j])]
    }

    pub fn join_table(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.join(i, j)).collect()).collect()
    }

    pub fn meet_table(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.meet(i, j)).collect()).collect()
    }

    /// Indices of the elements covered by `i`.
    pub fn lower_covers(&self, i: usize) -> Vec<usize> {
        let below: Vec<usize> = (0..self.len()).filter(|&j| j != i && self.leq(j, i)).collect();
        below
            .iter()
            .copied()
            .filter(|&j| !below.iter().any(|&k| k != j && self.leq(j, k)))
            .collect()
    }

    /// The lattice itself as a poset; element names are ideal labels.
    pub fn as_poset(&self) -> Poset {
        let names = self.ideals.iter().map(|s| s.label(&self.poset)).collect();
        let mut rel = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j && self.leq(i, j) {
                    rel.push((i, j));
                }
            }
        }
        Poset::from_relations(names, &rel).expect("inclusion is a partial order")
    }
}

/// The join-irreducible elements (exactly one lower cover) with the induced
/// order. Each is named after the maximal elements of its ideal, which for a
/// lattice of ideals is the generating element of a principal ideal.
pub fn join_irreducibles(lattice: &IdealLattice) -> Poset {
    let ji: Vec<usize> = (0..lattice.len())
        .filter(|&i| lattice.lower_covers(i).len() == 1)
        .collect();
    let poset = lattice.poset();
    let names: Vec<String> = ji
        .iter()
        .map(|&i| {
            let ideal = lattice.ideals()[i];
            let maxima: Vec<&str> = ideal
                .elements()
                .filter(|&e| !ideal.elements().any(|f| f != e && poset.leq(e, f)))
                .map(|e| poset.name(e))
                .collect();
            maxima.join(",")
        })
        .collect();
    let mut rel = Vec::new();
    for (a, &i) in ji.iter().enumerate() {
        for (b, &j) in ji.iter().enumerate() {
            if a != b && lattice.leq(i, j) {
                rel.push((a, b));
            }
        }
    }
    Poset::from_relations(names, &rel).expect("sub-order of a lattice")
}

/// How member sets of a Sperner family are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpernerSpec {
    /// One explicit subset (by ground label) per poset element name.
    Explicit(BTreeMap<String, Vec<String>>),
    /// Generated: pairwise disjoint blocks of size `m`, ground `d1..d(n*m)`.
    Disjoint { m: usize },
    /// Generated: windows `{d(i+1), ..., d(i+m)}`, ground `d1..d(n+m-1)`.
    Sliding { m: usize },
}

impl SpernerSpec {
    pub fn is_generated(&self) -> bool {
        !matches!(self, SpernerSpec::Explicit(_))
    }
}

/// Parses `"p: d1 d2"` lines into an explicit spec.
pub fn parse_sperner(text: &str) -> Result<SpernerSpec, PosetError> {
    let mut members = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((name, elems)) = line.split_once(':') else {
            return Err(PosetError::Malformed {
                line: i + 1,
                message: format!("expected `element: labels...`, found `{line}`"),
            });
        };
        let name = name.trim().to_string();
        if members.contains_key(&name) {
            return Err(PosetError::DuplicateElement(name));
        }
        members.insert(name, elems.split_whitespace().map(str::to_string).collect());
    }
    Ok(SpernerSpec::Explicit(members))
}

/// A family `(A_p)` of equal-size, pairwise incomparable subsets of a ground
/// set, indexed by the elements of a poset. Members are masks over the ground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpernerFamily {
    ground: Vec<String>,
    members: Vec<u32>,
    member_size: usize,
    generated: bool,
}

/// Builds and validates a Sperner family over `ground` indexed by `poset`.
/// Generated specs ignore `ground` and produce their own labels.
pub fn build_sperner(ground: &[String], poset: &Poset, spec: &SpernerSpec) -> Result<SpernerFamily, PosetError> {
    let n = poset.len();
    let (ground, members): (Vec<String>, Vec<u32>) = match spec {
        SpernerSpec::Explicit(map) => {
            let index: HashMap<&str, usize> = ground.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
            for key in map.keys() {
                if poset.index_of(key).is_none() {
                    return Err(PosetError::UnknownElement(key.clone()));
                }
            }
            let mut members = Vec::with_capacity(n);
            for name in poset.names() {
                let labels = map.get(name).ok_or_else(|| PosetError::MissingMember(name.clone()))?;
                let mut mask = 0u32;
                for l in labels {
                    let i = *index
                        .get(l.as_str())
                        .ok_or_else(|| PosetError::UnknownElement(l.clone()))?;
                    mask |= 1 << i;
                }
                members.push(mask);
            }
            (ground.to_vec(), members)
        }
        SpernerSpec::Disjoint { m } => {
            let members = (0..n).map(|i| mask_of_len(*m) << (i * m)).collect();
            (numbered_labels(n * m), members)
        }
        SpernerSpec::Sliding { m } => {
            let size = if n == 0 { 0 } else { n + m - 1 };
            let members = (0..n).map(|i| mask_of_len(*m) << i).collect();
            (numbered_labels(size), members)
        }
    };
    if ground.len() > MAX_ELEMENTS {
        return Err(PosetError::TooLarge(ground.len()));
    }
    if members.contains(&0) {
        return Err(PosetError::EmptyMember);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && members[i] & !members[j] == 0 {
                return Err(PosetError::InclusionViolation(
                    poset.name(i).to_string(),
                    poset.name(j).to_string(),
                ));
            }
        }
    }
    let member_size = members.first().map_or(0, |m| m.count_ones() as usize);
    for (i, &m) in members.iter().enumerate() {
        if m.count_ones() as usize != member_size {
            return Err(PosetError::SizeMismatch {
                name: poset.name(i).to_string(),
                expected: member_size,
                got: m.count_ones() as usize,
            });
        }
    }
    Ok(SpernerFamily {
        ground,
        members,
        member_size,
        generated: spec.is_generated(),
    })
}

fn numbered_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("d{i}")).collect()
}

impl SpernerFamily {
    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    /// Member set of the poset element with index `p`, as a ground mask.
    pub fn member(&self, p: usize) -> u32 {
        self.members[p]
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn member_size(&self) -> usize {
        self.member_size
    }

    /// Whether the members came from a generator policy rather than input.
    pub fn is_generated(&self) -> bool {
        self.generated
    }

    pub fn ground_mask(&self) -> u32 {
        mask_of_len(self.ground.len())
    }

    /// Small means: a proper subset of some member.
    pub fn is_small(&self, set: u32) -> bool {
        self.members.iter().any(|&m| set & !m == 0 && set != m)
    }

    /// Every small set, sorted by size then mask.
    pub fn small_sets(&self) -> Vec<u32> {
        let mut out = BTreeSet::new();
        for &m in &self.members {
            let mut sub = m;
            loop {
                sub = (sub.wrapping_sub(1)) & m;
                out.insert(sub);
                if sub == 0 {
                    break;
                }
            }
        }
        let mut v: Vec<u32> = out.into_iter().collect();
        v.sort_by_key(|s| (s.count_ones(), *s));
        v
    }

    pub fn labels_of(&self, set: u32) -> Vec<String> {
        mask_elements(set)
            .filter(|&i| i < self.ground.len())
            .map(|i| self.ground[i].clone())
            .collect()
    }

    pub fn mask_of(&self, labels: &[&str]) -> Option<u32> {
        let mut mask = 0;
        for l in labels {
            mask |= 1 << self.ground.iter().position(|g| g == l)?;
        }
        Some(mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parse_antichain_and_chain() {
        let p = parse_poset("p r").unwrap();
        assert_eq!(p.len(), 2);
        assert!(!p.leq(0, 1) && !p.leq(1, 0));

        let c = parse_poset("p r / r<p").unwrap();
        let (pi, ri) = (c.index_of("p").unwrap(), c.index_of("r").unwrap());
        assert!(c.leq(ri, pi));
        assert!(!c.leq(pi, ri));

        let two_line = parse_poset("p r\nr<p").unwrap();
        assert_eq!(two_line, c);
    }

    #[test]
    fn self_loop_is_reflexivity_not_a_cycle() {
        let p = parse_poset("x / x<x").unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.leq(0, 0));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_poset("x y / x<y, y<x"),
            Err(PosetError::CycleDetected(_, _))
        ));
        assert_eq!(
            parse_poset("x y\nx<z"),
            Err(PosetError::Malformed {
                line: 2,
                message: "unknown element `z`".into()
            })
        );
        assert!(matches!(
            parse_poset("x y\nx-y"),
            Err(PosetError::Malformed { line: 2, .. })
        ));
        assert!(matches!(parse_poset("x x"), Err(PosetError::DuplicateElement(_))));
    }

    #[test]
    fn transitive_closure() {
        let p = parse_poset("a b c / a<b, b<c").unwrap();
        assert!(p.leq(0, 2));
        assert!(p.is_valid_order());
        assert_eq!(p.covers(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn ideals_of_small_orders() {
        let anti = order_ideals(&Poset::antichain(2).unwrap()).unwrap();
        assert_eq!(anti.len(), 4);
        let chain = order_ideals(&parse_poset("p r / r<p").unwrap()).unwrap();
        let labels: Vec<String> = chain.ideals().iter().map(|i| i.label(chain.poset())).collect();
        assert_eq!(labels, vec!["{}", "{r}", "{p,r}"]);
    }

    #[test]
    fn power_set_sizes() {
        assert_eq!(power_set_lattice(0).unwrap().len(), 1);
        assert_eq!(power_set_lattice(2).unwrap().len(), 4);
        let p4 = power_set_lattice(4).unwrap();
        assert_eq!(p4.len(), 16);
        let ji = join_irreducibles(&p4);
        assert_eq!(ji.len(), 4);
        // singletons: each join-irreducible ideal has one element
        for i in 0..ji.len() {
            assert!(!ji.name(i).contains(','));
        }
        assert!(matches!(power_set_lattice(21), Err(PosetError::TooLarge(21))));
    }

    #[test]
    fn join_irreducibles_of_chain_and_square() {
        let square = power_set_lattice(2).unwrap();
        let ji = join_irreducibles(&square);
        assert!(ji.find_isomorphism(&Poset::antichain(2).unwrap()).is_some());

        let chain = order_ideals(&Poset::chain(2).unwrap()).unwrap();
        let ji = join_irreducibles(&chain);
        assert!(ji.find_isomorphism(&Poset::chain(2).unwrap()).is_some());
    }

    #[test]
    fn sperner_models() {
        let p = parse_poset("p r").unwrap();
        let m0 = build_sperner(&s(&["d1", "d2"]), &p, &parse_sperner("p: d1\nr: d2").unwrap()).unwrap();
        assert_eq!(m0.member_size(), 1);

        let ground = s(&["d1", "d2", "d3"]);
        let m1 = build_sperner(&ground, &p, &parse_sperner("p: d1 d2\nr: d2 d3").unwrap()).unwrap();
        assert!(m1.is_small(m1.mask_of(&["d2"]).unwrap()));
        assert!(!m1.is_small(m1.mask_of(&["d1", "d3"]).unwrap()));
        assert!(!m1.is_small(m1.member(0)));
        assert!(m1.is_small(0));

        let bad = build_sperner(&s(&["d1", "d2"]), &p, &parse_sperner("p: d1\nr: d1 d2").unwrap());
        assert!(matches!(bad, Err(PosetError::InclusionViolation(..))));

        let uneven = build_sperner(&s(&["d1", "d2", "d3"]), &p, &parse_sperner("p: d1\nr: d2 d3").unwrap());
        assert!(matches!(uneven, Err(PosetError::SizeMismatch { .. })));
    }

    #[test]
    fn inclusion_violation_with_equal_sets() {
        let p = parse_poset("p r").unwrap();
        let bad = build_sperner(&s(&["d1", "d2"]), &p, &parse_sperner("p: d1\nr: d1").unwrap());
        assert!(matches!(bad, Err(PosetError::InclusionViolation(..))));
    }

    #[test]
    fn generated_families() {
        let p = Poset::chain(3).unwrap();
        let f = build_sperner(&[], &p, &SpernerSpec::Sliding { m: 2 }).unwrap();
        assert_eq!(f.ground().len(), 4);
        assert!(f.is_generated());
        let d = build_sperner(&[], &p, &SpernerSpec::Disjoint { m: 1 }).unwrap();
        assert_eq!(d.small_sets(), vec![0]);
    }
}
