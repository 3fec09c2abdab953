//! Membership in `M` re-derived from the class definitions on raw
//! matrices, compared against the library on M0 and on random maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use clonelab::config::parse_instance;
use clonelab::linmodel::{Basis, LinearMap};
use clonelab::monoid::{ClassKind, MonoidInstance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const M0: &str = "field = 5\nground = \"d1 d2\"\nposet = \"p r\"\nfamily = \"\"\"\np: d1\nr: d2\n\"\"\"\n";
const M1: &str = "field = 5\nground = \"d1 d2 d3\"\nposet = \"p r\"\nfamily = \"\"\"\np: d1 d2\nr: d2 d3\n\"\"\"\n";
const C3: &str = "field = 5\nground = \"d1 d2 d3\"\nposet = \"\"\"\np r s\ns<r\nr<p\n\"\"\"\nfamily = \"\"\"\np: d1\nr: d2\ns: d3\n\"\"\"\n";

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;

fn load(text: &str) -> MonoidInstance {
    parse_instance(text).unwrap().instance
}

/// The definitions, on a column-major view `col[j][i]` = coefficient of
/// basis vector `i` in the image of basis vector `j`.
struct Oracle {
    dim: usize,
    family: Vec<u32>,
    /// `psi[(p, q)]` as the image index of each `d` in `A_q`.
    psi: BTreeMap<(usize, usize), Vec<(usize, usize)>>,
}

impl Oracle {
    fn new(inst: &MonoidInstance) -> Oracle {
        let family = inst.family().members().to_vec();
        let dim = inst.basis().dim();
        let mut psi = BTreeMap::new();
        let poset = inst.poset();
        for p in 0..poset.len() {
            for (q, &aq) in family.iter().enumerate() {
                if let Some(m) = inst.psi(p, q) {
                    let pairs = (0..dim - 3)
                        .filter(|&d| aq >> d & 1 == 1)
                        .map(|d| (d, (0..dim).find(|&i| m.get(i, 3 + d) != 0).unwrap()))
                        .collect();
                    psi.insert((p, q), pairs);
                }
            }
        }
        Oracle { dim, family, psi }
    }

    fn small(&self, set: u32) -> bool {
        self.family.iter().any(|&m| set & !m == 0 && set != m)
    }

    fn col(&self, f: &LinearMap, j: usize) -> Vec<u8> {
        (0..self.dim).map(|i| f.get(i, j)).collect()
    }

    fn unit(&self, i: usize) -> Vec<u8> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }

    fn zero(&self) -> Vec<u8> {
        vec![0; self.dim]
    }

    fn support(&self, f: &LinearMap) -> u32 {
        (0..self.dim - 3)
            .filter(|&d| self.col(f, 3 + d).iter().any(|&x| x != 0))
            .fold(0, |s, d| s | 1 << d)
    }

    fn range_in(&self, f: &LinearMap, row: usize) -> bool {
        (0..self.dim).all(|j| (0..self.dim).all(|i| i == row || f.get(i, j) == 0))
    }

    fn abc(&self, f: &LinearMap, a: Option<usize>, b: Option<usize>, c: Option<usize>) -> bool {
        let want = |x: Option<usize>| x.map_or(self.zero(), |i| self.unit(i));
        self.col(f, A) == want(a) && self.col(f, B) == want(b) && self.col(f, C) == want(c)
    }

    fn is_n(&self, f: &LinearMap) -> bool {
        self.abc(f, Some(A), None, Some(C)) && self.small(self.support(f))
    }

    fn is_n1(&self, f: &LinearMap) -> bool {
        self.abc(f, None, None, Some(B)) && self.small(self.support(f)) && self.range_in(f, B)
    }

    fn is_n2(&self, f: &LinearMap) -> bool {
        self.abc(f, Some(A), None, None) && self.small(self.support(f)) && self.range_in(f, A)
    }

    fn is_phi(&self, f: &LinearMap) -> bool {
        (0..self.family.len()).any(|p| {
            self.abc(f, None, None, Some(B))
                && (0..self.dim - 3).all(|d| {
                    let want = if self.family[p] >> d & 1 == 1 {
                        self.unit(B)
                    } else {
                        self.zero()
                    };
                    self.col(f, 3 + d) == want
                })
        })
    }

    fn is_psi(&self, f: &LinearMap) -> bool {
        self.psi.iter().any(|(&(_, q), pairs)| {
            self.abc(f, Some(A), None, Some(C))
                && (0..self.dim - 3).all(|d| {
                    let want = match pairs.iter().find(|(from, _)| *from == d) {
                        Some(&(_, to)) => self.unit(to),
                        None => self.zero(),
                    };
                    debug_assert!(self.family[q] >> d & 1 == 1 || want == self.zero());
                    self.col(f, 3 + d) == want
                })
        })
    }

    /// Splits `f` into its `a`-row part and its `b`-row part; anything in
    /// another row means `f` is not such a sum.
    fn split_ab(&self, f: &LinearMap) -> Option<(LinearMap, LinearMap)> {
        let mut top = LinearMap::zero(f.basis());
        let mut mid = LinearMap::zero(f.basis());
        for j in 0..self.dim {
            for i in 0..self.dim {
                match (i, f.get(i, j)) {
                    (_, 0) => {}
                    (A, x) => top.set(A, j, x),
                    (B, x) => mid.set(B, j, x),
                    _ => return None,
                }
            }
        }
        Some((mid, top))
    }

    fn is_s_phi(&self, f: &LinearMap) -> bool {
        self.split_ab(f).is_some_and(|(b, a)| self.is_phi(&b) && self.is_n2(&a))
    }

    fn is_s_n1(&self, f: &LinearMap) -> bool {
        self.split_ab(f).is_some_and(|(b, a)| self.is_n1(&b) && self.is_n2(&a))
    }

    fn classes(&self, f: &LinearMap) -> Vec<ClassKind> {
        let tests: [(ClassKind, bool); 8] = [
            (ClassKind::N, self.is_n(f)),
            (ClassKind::NPrime, self.is_n1(f)),
            (ClassKind::NDoublePrime, self.is_n2(f)),
            (ClassKind::Phi, self.is_phi(f)),
            (ClassKind::Psi, self.is_psi(f)),
            (ClassKind::SPhi, self.is_s_phi(f)),
            (ClassKind::SNPrime, self.is_s_n1(f)),
            (ClassKind::Zero, f.is_zero()),
        ];
        tests.into_iter().filter(|t| t.1).map(|t| t.0).collect()
    }
}

/// Every map whose columns are multiples of basis vectors.
fn scaled_unit_maps(basis: &Arc<Basis>) -> impl Iterator<Item = LinearMap> + '_ {
    let dim = basis.dim();
    let q = basis.field().order() as usize;
    let per_column = 1 + (q - 1) * dim;
    let total = per_column.pow(dim as u32);
    (0..total).map(move |mut code| {
        let mut f = LinearMap::zero(basis);
        for j in 0..dim {
            let choice = code % per_column;
            code /= per_column;
            if choice > 0 {
                let (row, k) = ((choice - 1) / (q - 1), (choice - 1) % (q - 1) + 1);
                f.set(row, j, k as u8);
            }
        }
        f
    })
}

#[test]
fn m0_brute_force_matches_oracle() {
    let inst = load(M0);
    let oracle = Oracle::new(&inst);
    let mut by_oracle: BTreeMap<ClassKind, u64> = BTreeMap::new();
    let mut members = 0u64;
    let mut scanned = 0u64;
    for f in scaled_unit_maps(inst.basis()) {
        scanned += 1;
        let classes = oracle.classes(&f);
        assert!(classes.len() <= 1, "{f:?} is in {classes:?}");
        let lib = inst.classify(&f).map(|c| c.kind());
        assert_eq!(lib, classes.first().copied(), "{f:?}");
        if let Some(&k) = classes.first() {
            *by_oracle.entry(k).or_default() += 1;
            members += 1;
        }
    }
    assert_eq!(scanned, 21u64.pow(5));
    assert_eq!(members, 11);
    let sizes: Vec<u64> = ClassKind::ALL
        .iter()
        .map(|k| by_oracle.get(k).copied().unwrap_or(0))
        .collect();
    assert_eq!(sizes, vec![1, 1, 1, 2, 2, 2, 1, 1]);
    for k in ClassKind::ALL {
        assert_eq!(inst.class_size(k), u128::from(by_oracle[&k]), "{k}");
    }
}

#[test]
fn m0_members_have_observed_shape() {
    let inst = load(M0);
    let oracle = Oracle::new(&inst);
    let members = inst.enumerate_monoid(100).unwrap();
    assert_eq!(members.len(), 11);
    for m in &members {
        let (a, b, c) = (oracle.col(&m.map, A), oracle.col(&m.map, B), oracle.col(&m.map, C));
        assert!(a == oracle.zero() || a == oracle.unit(A));
        assert_eq!(b, oracle.zero());
        assert!(c == oracle.zero() || c == oracle.unit(B) || c == oracle.unit(C));
    }
}

#[test]
fn m0_is_closed_under_composition() {
    let inst = load(M0);
    let members = inst.enumerate_monoid(100).unwrap();
    for f in &members {
        for g in &members {
            assert!(inst.contains(&(&f.map * &g.map)), "{:?} . {:?}", f.class, g.class);
        }
    }
}

#[test]
fn psi_coherence_on_a_three_chain() {
    let inst = load(C3);
    let poset = inst.poset();
    let mut triples = 0;
    for p in 0..poset.len() {
        for r in 0..poset.len() {
            for q in 0..poset.len() {
                if poset.leq(q, r) && poset.leq(r, p) {
                    let lhs = inst.psi(p, r).unwrap() * inst.psi(r, q).unwrap();
                    assert_eq!(&lhs, inst.psi(p, q).unwrap());
                    triples += 1;
                }
            }
        }
    }
    // 3 diagonal, 3 with two equal upper, 3 with two equal lower, 1 strict
    assert_eq!(triples, 10);
    assert!(inst.verify_psi_coherence().passed());
}

#[test]
fn supports_of_building_blocks() {
    for text in [M0, M1, C3] {
        let inst = load(text);
        let family = inst.family();
        for p in 0..inst.poset().len() {
            assert_eq!(inst.phi(p).support(), family.member(p));
            for q in 0..inst.poset().len() {
                if let Some(psi) = inst.psi(p, q) {
                    assert_eq!(psi.support(), family.member(q));
                    assert!(!inst.is_small(psi.support()));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [ClassKind::N, ClassKind::NPrime, ClassKind::NDoublePrime] {
            for _ in 0..200 {
                assert!(inst.is_small(inst.sample_member(kind, &mut rng).support()));
            }
        }
    }
}

#[test]
fn small_sets_form_an_order_ideal() {
    for text in [M0, M1, C3] {
        let inst = load(text);
        let family = inst.family();
        let n = family.ground().len();
        for s in 0u32..1 << n {
            if inst.is_small(s) {
                let mut t = s;
                loop {
                    assert!(inst.is_small(t), "{t:b} below {s:b}");
                    if t == 0 {
                        break;
                    }
                    t = (t - 1) & s;
                }
            }
        }
        let members = family.members();
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                assert!(inst.is_small(x & y));
            }
        }
    }
    assert_eq!(load(M1).small_sets().len(), 4);
}

fn sampled_members(inst: &MonoidInstance, seed: u64, count: usize) -> Vec<LinearMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| inst.sample_member(ClassKind::ALL[i % ClassKind::ALL.len()], &mut rng))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    // mostly-zero entries, since dense maps almost never lie in a class
    fn random_maps_agree_with_oracle(entries in proptest::collection::vec(prop_oneof![6 => Just(0u8), 1 => 1u8..5], 36)) {
        let inst = load(M1);
        let oracle = Oracle::new(&inst);
        let mut f = LinearMap::zero(inst.basis());
        for (k, &x) in entries.iter().enumerate() {
            f.set(k / 6, k % 6, x);
        }
        let classes = oracle.classes(&f);
        prop_assert!(classes.len() <= 1);
        prop_assert_eq!(inst.classify(&f).map(|c| c.kind()), classes.first().copied());
    }

    #[test]
    fn sampled_members_agree_with_oracle(seed in any::<u64>()) {
        let inst = load(M1);
        let oracle = Oracle::new(&inst);
        for (i, f) in sampled_members(&inst, seed, 16).iter().enumerate() {
            let kind = ClassKind::ALL[i % ClassKind::ALL.len()];
            prop_assert_eq!(oracle.classes(f), vec![kind]);
        }
    }

    #[test]
    fn sampled_compositions_stay_in_m(seed in any::<u64>()) {
        let inst = load(M1);
        let oracle = Oracle::new(&inst);
        let ms = sampled_members(&inst, seed, 16);
        for f in &ms {
            for g in &ms {
                let fg = f * g;
                prop_assert_eq!(oracle.classes(&fg).len(), 1, "{:?} . {:?} = {:?}", f, g, fg);
            }
        }
    }
}
