//! The finite linear monoid built from a poset and a Sperner family.
//!
//! `M` is the union of seven classes of linear maps plus the zero map:
//!
//! | class  | `a`  | `b` | `c` | support        | range        |
//! |--------|------|-----|-----|----------------|--------------|
//! | `N`    | `a`  | 0   | `c` | small          | any          |
//! | `N'`   | 0    | 0   | `b` | small          | `span{b}`    |
//! | `N''`  | `a`  | 0   | 0   | small          | `span{a}`    |
//! | `Phi`  | 0    | 0   | `b` | exactly `A_p`  | `span{b}`    |
//! | `Psi`  | `a`  | 0   | `c` | exactly `A_q`  | `A_q -> A_p` |
//! | `S_Phi`| `a`  | 0   | `b` | `phi_p + n''`  |              |
//! | `S_N'` | `a`  | 0   | `b` | `n' + n''`     |              |
//!
//! `phi_p` sends `c` and every element of `A_p` to `b`. For `q <= p`,
//! `psi_{p,q}` fixes `a` and `c` and carries `A_q` onto `A_p` through the
//! sorted-order bijections of both sets with `{1..m}`.

mod verify;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linmodel::{Basis, Field, LinError, LinearMap, Vector, A_INDEX, B_INDEX, C_INDEX};
use crate::poset::{mask_elements, Poset, PosetError, SpernerFamily};

pub use verify::composition_rule;

/// Largest monoid that exhaustive sweeps will enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 5_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("unknown poset element `{0}`")]
    UnknownElement(String),
    #[error("`{lower}` is not below `{upper}` in the poset")]
    NotComparable { upper: String, lower: String },
    #[error("the sperner family and the poset have different sizes")]
    FamilyMismatch,
    #[error("singletons of A are not small, so no quasilinearity witness exists")]
    SingletonsNotSmall,
    #[error("{k} targets but A has only {available} elements")]
    TooManyTargets { k: usize, available: usize },
    #[error("{what} has {size} elements, above the exhaustive limit of {limit}")]
    TooLarge { what: String, size: u128, limit: u128 },
}

/// The seven classes of `M` and the zero map, without indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClassKind {
    N,
    NPrime,
    NDoublePrime,
    Phi,
    Psi,
    SPhi,
    SNPrime,
    Zero,
}

impl ClassKind {
    /// The seven nonzero classes, in table order.
    pub const NONZERO: [ClassKind; 7] = [
        ClassKind::N,
        ClassKind::NPrime,
        ClassKind::NDoublePrime,
        ClassKind::Phi,
        ClassKind::Psi,
        ClassKind::SPhi,
        ClassKind::SNPrime,
    ];

    pub const ALL: [ClassKind; 8] = [
        ClassKind::N,
        ClassKind::NPrime,
        ClassKind::NDoublePrime,
        ClassKind::Phi,
        ClassKind::Psi,
        ClassKind::SPhi,
        ClassKind::SNPrime,
        ClassKind::Zero,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            ClassKind::N => "N",
            ClassKind::NPrime => "N'",
            ClassKind::NDoublePrime => "N''",
            ClassKind::Phi => "Phi",
            ClassKind::Psi => "Psi",
            ClassKind::SPhi => "S_Phi",
            ClassKind::SNPrime => "S_N'",
            ClassKind::Zero => "0",
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// The class of a member of `M`, with poset indices where the class has
/// them. `Psi { upper: p, lower: q }` is `psi_{p,q}` with `q <= p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FunctionClass {
    N,
    NPrime,
    NDoublePrime,
    Phi(usize),
    Psi { upper: usize, lower: usize },
    SPhi(usize),
    SNPrime,
    Zero,
}

impl FunctionClass {
    pub fn kind(self) -> ClassKind {
        match self {
            FunctionClass::N => ClassKind::N,
            FunctionClass::NPrime => ClassKind::NPrime,
            FunctionClass::NDoublePrime => ClassKind::NDoublePrime,
            FunctionClass::Phi(_) => ClassKind::Phi,
            FunctionClass::Psi { .. } => ClassKind::Psi,
            FunctionClass::SPhi(_) => ClassKind::SPhi,
            FunctionClass::SNPrime => ClassKind::SNPrime,
            FunctionClass::Zero => ClassKind::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassifiedMap {
    pub map: LinearMap,
    pub class: FunctionClass,
}

/// All members of one class, or a uniform sample when the class exceeds the
/// requested cap.
#[derive(Debug, Clone)]
pub struct ClassEnumeration {
    pub kind: ClassKind,
    /// Exact class size (saturating).
    pub total: u128,
    pub exhaustive: bool,
    pub maps: Vec<LinearMap>,
}

/// Which vectors a small-support class may put in a support column.
#[derive(Debug, Clone, Copy)]
enum ColumnValues {
    AnyNonzero,
    MultipleOf(usize),
}

#[derive(Debug, Clone)]
pub struct MonoidInstance {
    basis: Arc<Basis>,
    poset: Poset,
    family: SpernerFamily,
    /// Per poset element: the elements of `A_p` (as `A` indices) in sorted
    /// order, i.e. the inverse of the bijection `A_p -> {1..m}`.
    mu: Vec<Vec<usize>>,
    small: Vec<u32>,
    phi: Vec<LinearMap>,
    psi: Vec<((usize, usize), LinearMap)>,
    exact: HashMap<LinearMap, FunctionClass>,
}

impl MonoidInstance {
    pub fn new(field: Field, poset: Poset, family: SpernerFamily) -> Result<MonoidInstance, MonoidError> {
        if family.members().len() != poset.len() {
            return Err(MonoidError::FamilyMismatch);
        }
        let basis = Basis::new(field, family.ground())?;
        let mu: Vec<Vec<usize>> = family.members().iter().map(|&m| mask_elements(m).collect()).collect();
        let small = family.small_sets();
        let mut inst = MonoidInstance {
            basis,
            poset,
            family,
            mu,
            small,
            phi: Vec::new(),
            psi: Vec::new(),
            exact: HashMap::new(),
        };
        inst.phi = (0..inst.poset.len()).map(|p| inst.make_phi(p)).collect();
        inst.psi = inst
            .poset
            .comparable_pairs()
            .into_iter()
            .map(|(q, p)| ((p, q), inst.make_psi(p, q)))
            .collect();
        let mut exact = HashMap::new();
        for (p, f) in inst.phi.iter().enumerate() {
            exact.insert(f.clone(), FunctionClass::Phi(p));
        }
        for ((p, q), f) in &inst.psi {
            exact.insert(f.clone(), FunctionClass::Psi { upper: *p, lower: *q });
        }
        inst.exact = exact;
        Ok(inst)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn family(&self) -> &SpernerFamily {
        &self.family
    }

    pub fn small_sets(&self) -> &[u32] {
        &self.small
    }

    pub fn is_small(&self, set: u32) -> bool {
        self.family.is_small(set)
    }

    /// Whether every singleton `{d}`, `d` in `A`, is small. Without this the
    /// quasilinearity witnesses, and with them the description of all
    /// polymorphisms as sums, are unavailable.
    pub fn singletons_small(&self) -> bool {
        (0..self.basis.a_len()).all(|i| self.is_small(1 << i))
    }

    /// Stable digest of the field, basis, poset and family.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("q={}\n", self.field().order()));
        h.update(format!("basis={}\n", self.basis.labels().join(" ")));
        h.update(format!("poset={}\n", self.poset.to_text()));
        for (p, name) in self.poset.names().iter().enumerate() {
            let labels = self.family.labels_of(self.family.member(p));
            h.update(format!("{name}:{}\n", labels.join(" ")));
        }
        hex::encode(&h.finalize()[..8])
    }

    pub(crate) fn element(&self, name: &str) -> Result<usize, MonoidError> {
        self.poset
            .index_of(name)
            .ok_or_else(|| MonoidError::UnknownElement(name.to_string()))
    }

    pub fn element_name(&self, p: usize) -> &str {
        self.poset.name(p)
    }

    fn make_phi(&self, p: usize) -> LinearMap {
        let mut f = LinearMap::zero(&self.basis);
        f.set(B_INDEX, C_INDEX, 1);
        for d in mask_elements(self.family.member(p)) {
            f.set(B_INDEX, self.basis.a_position(d), 1);
        }
        f
    }

    fn make_psi(&self, p: usize, q: usize) -> LinearMap {
        let mut f = LinearMap::zero(&self.basis);
        f.set(A_INDEX, A_INDEX, 1);
        f.set(C_INDEX, C_INDEX, 1);
        for (from, to) in self.mu[q].iter().zip(&self.mu[p]) {
            f.set(self.basis.a_position(*to), self.basis.a_position(*from), 1);
        }
        f
    }

    /// `phi_p` by element index.
    pub fn phi(&self, p: usize) -> &LinearMap {
        &self.phi[p]
    }

    /// `psi_{p,q}` by element indices; `None` unless `q <= p`.
    pub fn psi(&self, p: usize, q: usize) -> Option<&LinearMap> {
        self.psi.iter().find(|((u, l), _)| *u == p && *l == q).map(|(_, f)| f)
    }

    pub fn build_phi(&self, p: &str) -> Result<LinearMap, MonoidError> {
        Ok(self.phi[self.element(p)?].clone())
    }

    pub fn build_psi(&self, p: &str, q: &str) -> Result<LinearMap, MonoidError> {
        let (pi, qi) = (self.element(p)?, self.element(q)?);
        self.psi(pi, qi).cloned().ok_or_else(|| MonoidError::NotComparable {
            upper: p.to_string(),
            lower: q.to_string(),
        })
    }

    /// The member of `N` with empty support: fixes `a` and `c`, kills the rest.
    pub fn n_trivial(&self) -> LinearMap {
        let mut f = LinearMap::zero(&self.basis);
        f.set(A_INDEX, A_INDEX, 1);
        f.set(C_INDEX, C_INDEX, 1);
        f
    }

    /// The member of `N'` with empty support: `c -> b`.
    pub fn n_prime_trivial(&self) -> LinearMap {
        let mut f = LinearMap::zero(&self.basis);
        f.set(B_INDEX, C_INDEX, 1);
        f
    }

    /// The member of `N''` with empty support: `a -> a`.
    pub fn n_double_prime_trivial(&self) -> LinearMap {
        let mut f = LinearMap::zero(&self.basis);
        f.set(A_INDEX, A_INDEX, 1);
        f
    }

    /// Which class of `M` contains `f`, or `None` if `f` is not in `M`.
    pub fn classify(&self, f: &LinearMap) -> Option<FunctionClass> {
        #[derive(PartialEq)]
        enum Img {
            Zero,
            Unit(usize),
        }
        let image = |col: usize| -> Option<Img> {
            let v = f.column(col);
            if v.iter().all(|&e| e == 0) {
                return Some(Img::Zero);
            }
            let nz: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0).collect();
            (nz.len() == 1 && v[nz[0]] == 1).then(|| Img::Unit(nz[0]))
        };

        if f.is_zero() {
            return Some(FunctionClass::Zero);
        }
        if image(B_INDEX)? != Img::Zero {
            return None;
        }
        let at_a = image(A_INDEX)?;
        let at_c = image(C_INDEX)?;
        let support = f.support();
        let small = self.is_small(support);
        const A: Img = Img::Unit(A_INDEX);
        const B: Img = Img::Unit(B_INDEX);
        const C: Img = Img::Unit(C_INDEX);

        match (at_a, at_c) {
            (A, C) => {
                if small {
                    Some(FunctionClass::N)
                } else {
                    self.exact.get(f).copied()
                }
            }
            (Img::Zero, B) => {
                if let Some(&class) = self.exact.get(f) {
                    Some(class)
                } else if small && f.range_within(1 << B_INDEX) {
                    Some(FunctionClass::NPrime)
                } else {
                    None
                }
            }
            (A, Img::Zero) => (small && f.range_within(1 << A_INDEX)).then_some(FunctionClass::NDoublePrime),
            (A, B) => {
                let (b_part, a_part) = self.split_sum(f)?;
                if !self.is_small(a_part.support()) {
                    return None;
                }
                if let Some(&FunctionClass::Phi(p)) = self.exact.get(&b_part) {
                    Some(FunctionClass::SPhi(p))
                } else if self.is_small(b_part.support()) {
                    Some(FunctionClass::SNPrime)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Splits a map with `a -> a`, `b -> 0`, `c -> b` and range inside
    /// `span{a, b}` into its `span{b}` part (with `c -> b`) and its
    /// `span{a}` part (with `a -> a`). The split is unique.
    pub fn split_sum(&self, f: &LinearMap) -> Option<(LinearMap, LinearMap)> {
        if !f.range_within(1 << A_INDEX | 1 << B_INDEX) {
            return None;
        }
        let mut b_part = LinearMap::zero(&self.basis);
        let mut a_part = LinearMap::zero(&self.basis);
        for j in 0..self.basis.dim() {
            b_part.set(B_INDEX, j, f.get(B_INDEX, j));
            a_part.set(A_INDEX, j, f.get(A_INDEX, j));
        }
        Some((b_part, a_part))
    }

    pub fn contains(&self, f: &LinearMap) -> bool {
        self.classify(f).is_some()
    }

    fn column_values(&self, kind: ClassKind) -> Option<(ColumnValues, LinearMap)> {
        match kind {
            ClassKind::N => Some((ColumnValues::AnyNonzero, self.n_trivial())),
            ClassKind::NPrime => Some((ColumnValues::MultipleOf(B_INDEX), self.n_prime_trivial())),
            ClassKind::NDoublePrime => Some((ColumnValues::MultipleOf(A_INDEX), self.n_double_prime_trivial())),
            _ => None,
        }
    }

    fn value_count(&self, values: ColumnValues) -> u128 {
        let q = self.field().order() as u128;
        match values {
            ColumnValues::AnyNonzero => q.saturating_pow(self.basis.dim() as u32) - 1,
            ColumnValues::MultipleOf(_) => q - 1,
        }
    }

    /// The `index`-th nonzero column value.
    fn column_value(&self, values: ColumnValues, index: u128) -> Vec<u8> {
        let n = self.basis.dim();
        let q = self.field().order() as u128;
        let mut v = vec![0u8; n];
        match values {
            ColumnValues::AnyNonzero => {
                let mut x = index + 1;
                for slot in v.iter_mut() {
                    *slot = (x % q) as u8;
                    x /= q;
                }
            }
            ColumnValues::MultipleOf(row) => v[row] = (index + 1) as u8,
        }
        v
    }

    pub fn class_size(&self, kind: ClassKind) -> u128 {
        let small_class = |k: ClassKind| -> u128 {
            let (values, _) = self.column_values(k).expect("small-support class");
            let per = self.value_count(values);
            self.small
                .iter()
                .map(|s| per.saturating_pow(s.count_ones()))
                .fold(0u128, |a, b| a.saturating_add(b))
        };
        match kind {
            ClassKind::N | ClassKind::NPrime | ClassKind::NDoublePrime => small_class(kind),
            ClassKind::Phi => self.poset.len() as u128,
            ClassKind::Psi => self.psi.len() as u128,
            ClassKind::SPhi => (self.poset.len() as u128).saturating_mul(small_class(ClassKind::NDoublePrime)),
            ClassKind::SNPrime => small_class(ClassKind::NPrime).saturating_mul(small_class(ClassKind::NDoublePrime)),
            ClassKind::Zero => 1,
        }
    }

    pub fn monoid_size(&self) -> u128 {
        ClassKind::ALL
            .iter()
            .map(|&k| self.class_size(k))
            .fold(0u128, |a, b| a.saturating_add(b))
    }

    fn all_small_class(&self, kind: ClassKind) -> Vec<LinearMap> {
        let (values, base) = self.column_values(kind).expect("small-support class");
        let per = self.value_count(values);
        let mut out = Vec::new();
        for &set in &self.small {
            let cols: Vec<usize> = mask_elements(set).map(|i| self.basis.a_position(i)).collect();
            let mut digits = vec![0u128; cols.len()];
            loop {
                let mut f = base.clone();
                for (&col, &d) in cols.iter().zip(&digits) {
                    f.set_column(col, &self.column_value(values, d));
                }
                out.push(f);
                // mixed-radix increment
                let mut i = 0;
                while i < digits.len() {
                    digits[i] += 1;
                    if digits[i] < per {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == digits.len() {
                    break;
                }
            }
        }
        out
    }

    fn all_of_kind(&self, kind: ClassKind) -> Vec<LinearMap> {
        match kind {
            ClassKind::N | ClassKind::NPrime | ClassKind::NDoublePrime => self.all_small_class(kind),
            ClassKind::Phi => self.phi.clone(),
            ClassKind::Psi => self.psi.iter().map(|(_, f)| f.clone()).collect(),
            ClassKind::SPhi => {
                let ndp = self.all_small_class(ClassKind::NDoublePrime);
                self.phi.iter().flat_map(|p| ndp.iter().map(move |n| p + n)).collect()
            }
            ClassKind::SNPrime => {
                let np = self.all_small_class(ClassKind::NPrime);
                let ndp = self.all_small_class(ClassKind::NDoublePrime);
                np.iter().flat_map(|a| ndp.iter().map(move |b| a + b)).collect()
            }
            ClassKind::Zero => vec![LinearMap::zero(&self.basis)],
        }
    }

    /// A uniformly random member of the class.
    pub fn sample_member<R: Rng + ?Sized>(&self, kind: ClassKind, rng: &mut R) -> LinearMap {
        match kind {
            ClassKind::N | ClassKind::NPrime | ClassKind::NDoublePrime => {
                let (values, base) = self.column_values(kind).expect("small-support class");
                let per = self.value_count(values);
                let weights: Vec<f64> = self
                    .small
                    .iter()
                    .map(|s| (per as f64).powi(s.count_ones() as i32))
                    .collect();
                let set = self.small[WeightedIndex::new(&weights)
                    .expect("the empty set is always small")
                    .sample(rng)];
                let mut f = base;
                for i in mask_elements(set) {
                    let d = rng.random_range(0..per);
                    f.set_column(self.basis.a_position(i), &self.column_value(values, d));
                }
                f
            }
            ClassKind::Phi => self.phi[rng.random_range(0..self.phi.len())].clone(),
            ClassKind::Psi => self.psi[rng.random_range(0..self.psi.len())].1.clone(),
            ClassKind::SPhi => {
                let p = rng.random_range(0..self.phi.len());
                &self.phi[p] + &self.sample_member(ClassKind::NDoublePrime, rng)
            }
            ClassKind::SNPrime => {
                &self.sample_member(ClassKind::NPrime, rng) + &self.sample_member(ClassKind::NDoublePrime, rng)
            }
            ClassKind::Zero => LinearMap::zero(&self.basis),
        }
    }

    /// Every member of the class if it has at most `cap` members, else `cap`
    /// uniform samples drawn with the given seed.
    pub fn enumerate_class(&self, kind: ClassKind, cap: usize, seed: u64) -> ClassEnumeration {
        let total = self.class_size(kind);
        if total <= cap as u128 {
            return ClassEnumeration {
                kind,
                total,
                exhaustive: true,
                maps: self.all_of_kind(kind),
            };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let maps = (0..cap).map(|_| self.sample_member(kind, &mut rng)).collect();
        ClassEnumeration {
            kind,
            total,
            exhaustive: false,
            maps,
        }
    }

    /// Every member of the class; fails above `limit` members.
    pub fn class_members(&self, kind: ClassKind, limit: u128) -> Result<Vec<LinearMap>, MonoidError> {
        let size = self.class_size(kind);
        if size > limit {
            return Err(MonoidError::TooLarge {
                what: format!("class {kind}"),
                size,
                limit,
            });
        }
        Ok(self.all_of_kind(kind))
    }

    /// Every member of `M` with its class, in class order.
    pub fn enumerate_monoid(&self, limit: u128) -> Result<Vec<ClassifiedMap>, MonoidError> {
        let size = self.monoid_size();
        if size > limit {
            return Err(MonoidError::TooLarge {
                what: "the monoid".into(),
                size,
                limit,
            });
        }
        let mut out = Vec::with_capacity(size as usize);
        for kind in ClassKind::ALL {
            for map in self.all_of_kind(kind) {
                let class = self.classify(&map).expect("class members lie in M");
                out.push(ClassifiedMap { map, class });
            }
        }
        Ok(out)
    }

    /// For targets `d_1..d_k`, distinct `e_j` in `A` (returned as basis
    /// positions) and `h_j` in `N` with `h_j(e_j) = d_j` and `h_j(e_i) = 0`
    /// for `i != j`.
    pub fn quasilinearity_witnesses(&self, targets: &[Vector]) -> Result<Vec<(usize, LinearMap)>, MonoidError> {
        let k = targets.len();
        let a_len = self.basis.a_len();
        if k > a_len {
            return Err(MonoidError::TooManyTargets { k, available: a_len });
        }
        let small_singletons: Vec<usize> = (0..a_len).filter(|&i| self.is_small(1 << i)).collect();
        let needing: Vec<usize> = (0..k).filter(|&j| !targets[j].is_zero()).collect();
        if needing.len() > small_singletons.len() {
            return Err(MonoidError::SingletonsNotSmall);
        }
        let mut chosen = vec![usize::MAX; k];
        for (&j, &e) in needing.iter().zip(&small_singletons) {
            chosen[j] = e;
        }
        let spare: Vec<usize> = (0..a_len).filter(|e| !chosen.contains(e)).collect();
        let mut spare = spare.into_iter();
        for slot in chosen.iter_mut().filter(|c| **c == usize::MAX) {
            *slot = spare.next().expect("k <= |A|");
        }
        let mut out = Vec::with_capacity(k);
        for (j, target) in targets.iter().enumerate() {
            if **target.basis() != *self.basis {
                return Err(LinError::BasisMismatch.into());
            }
            let e = self.basis.a_position(chosen[j]);
            let mut h = self.n_trivial();
            if !target.is_zero() {
                h.set_column(e, target.coords());
            }
            out.push((e, h));
        }
        Ok(out)
    }
}
