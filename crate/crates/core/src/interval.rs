//! The clones `C_I = (M ∪ V ∪ D_I)*` above `M`, one per order ideal `I`.
//!
//! Every clone in the interval is determined by its binary part, and every
//! essentially binary member is a sum `f(x) + g(y)` with `f, g` in `M`, so
//! clones are handled through [`BinarySum`]s and never through tables.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::linmodel::{LinearMap, A_INDEX, B_INDEX, C_INDEX};
use crate::monoid::{ClassKind, ClassifiedMap, FunctionClass, MonoidError, MonoidInstance, EXHAUSTIVE_LIMIT};
use crate::poset::{order_ideals, IdealLattice, OrderIdeal, Poset, PosetError};
use crate::report::{Policy, VerificationReport};

/// Largest `|M|` for which preservation sweeps try every `(g1, g2)`.
pub const PRESERVATION_EXHAUSTIVE_MONOID: u128 = 200;
/// Substitution pairs tried per candidate when `M` is larger.
pub const PRESERVATION_SAMPLES: usize = 10_000;
/// Most candidate pairs a sampled preservation sweep examines.
pub const PRESERVATION_CANDIDATES: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("{0} is not a member of M")]
    NotInMonoid(String),
    #[error("{0} is not a polymorphism of M")]
    NotAPolymorphism(String),
    #[error("{0} is not an order ideal")]
    NotAnIdeal(String),
}

/// The binary operation `(x, y) -> left(x) + right(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySum {
    pub left: ClassifiedMap,
    pub right: ClassifiedMap,
}

/// Where a binary sum sits relative to `M*`, `V` and `D_P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SumShape {
    /// At most one part is nonzero.
    EssentiallyUnary,
    /// `n'(x) + n''(y)`, possibly with the variables swapped.
    V { swapped: bool },
    /// `phi_p(x) + n''(y)`, possibly with the variables swapped.
    D { p: usize, swapped: bool },
    /// None of the above; never a polymorphism of `M`.
    Other,
}

impl SumShape {
    pub fn is_essentially_binary(self) -> bool {
        !matches!(self, SumShape::EssentiallyUnary)
    }
}

fn classified(inst: &MonoidInstance, map: LinearMap) -> Result<ClassifiedMap, IntervalError> {
    match inst.classify(&map) {
        Some(class) => Ok(ClassifiedMap { map, class }),
        None => Err(IntervalError::NotInMonoid(format!("{map:?}"))),
    }
}

impl BinarySum {
    pub fn new(inst: &MonoidInstance, left: LinearMap, right: LinearMap) -> Result<BinarySum, IntervalError> {
        Ok(BinarySum {
            left: classified(inst, left)?,
            right: classified(inst, right)?,
        })
    }

    pub fn shape(&self) -> SumShape {
        use FunctionClass as F;
        match (self.left.class, self.right.class) {
            (F::Zero, _) | (_, F::Zero) => SumShape::EssentiallyUnary,
            (F::NPrime, F::NDoublePrime) => SumShape::V { swapped: false },
            (F::NDoublePrime, F::NPrime) => SumShape::V { swapped: true },
            (F::Phi(p), F::NDoublePrime) => SumShape::D { p, swapped: false },
            (F::NDoublePrime, F::Phi(p)) => SumShape::D { p, swapped: true },
            _ => SumShape::Other,
        }
    }

    pub fn swap(&self) -> BinarySum {
        BinarySum {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// The orientation with the `N'` or `Phi` part on `x`.
    pub fn canonical(&self) -> BinarySum {
        match self.shape() {
            SumShape::V { swapped: true } | SumShape::D { swapped: true, .. } => self.swap(),
            _ => self.clone(),
        }
    }

    /// The unary map obtained by identifying both variables.
    pub fn identify(&self) -> LinearMap {
        &self.left.map + &self.right.map
    }

    /// `left ∘ g1 + right ∘ g2`.
    pub fn substitute(&self, g1: &LinearMap, g2: &LinearMap) -> LinearMap {
        &(&self.left.map * g1) + &(&self.right.map * g2)
    }

    pub fn describe(&self) -> String {
        format!("{:?}(x) + {:?}(y)", self.left.map, self.right.map)
    }
}

/// A clone of the interval above `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntervalClone {
    /// `<M>`, the clone of essentially unary operations with unary part `M`.
    Bottom,
    /// `C_I` for an order ideal `I`.
    CI(OrderIdeal),
}

impl IntervalClone {
    pub fn label(&self, poset: &Poset) -> String {
        match self {
            IntervalClone::Bottom => "<M>".to_string(),
            IntervalClone::CI(i) => format!("C{}", i.label(poset)),
        }
    }

    /// Whether the binary sum lies in the clone.
    pub fn contains(&self, sum: &BinarySum) -> bool {
        match (self, sum.shape()) {
            (_, SumShape::EssentiallyUnary) => true,
            (IntervalClone::CI(_), SumShape::V { .. }) => true,
            (IntervalClone::CI(i), SumShape::D { p, .. }) => i.contains(p),
            _ => false,
        }
    }
}

/// Membership of an operation `x1, ..., xk -> parts[0](x1) + ... +
/// parts[k-1](xk)` in a clone of the interval.
fn sum_in_clone(inst: &MonoidInstance, clone: IntervalClone, parts: &[LinearMap]) -> bool {
    let live: Vec<&LinearMap> = parts.iter().filter(|f| !f.is_zero()).collect();
    match live.len() {
        0 => true,
        1 => inst.contains(live[0]),
        2 => BinarySum::new(inst, live[0].clone(), live[1].clone()).is_ok_and(|s| clone.contains(&s)),
        _ => false,
    }
}

/// Essentially binary members of `C_I` in canonical orientation. The unary
/// part is `M` for every clone of the interval and is only counted.
#[derive(Debug, Clone)]
pub struct BinaryPart {
    pub clone: IntervalClone,
    pub unary_size: u128,
    pub binary: BTreeSet<BinarySum>,
}

fn members(inst: &MonoidInstance, kind: ClassKind) -> Result<Vec<ClassifiedMap>, IntervalError> {
    Ok(inst
        .class_members(kind, EXHAUSTIVE_LIMIT)?
        .into_iter()
        .map(|map| {
            let class = inst.classify(&map).expect("class member");
            ClassifiedMap { map, class }
        })
        .collect())
}

/// `V` in canonical orientation.
pub fn v_members(inst: &MonoidInstance) -> Result<Vec<BinarySum>, IntervalError> {
    let np = members(inst, ClassKind::NPrime)?;
    let ndp = members(inst, ClassKind::NDoublePrime)?;
    Ok(np
        .iter()
        .flat_map(|l| {
            ndp.iter().map(move |r| BinarySum {
                left: l.clone(),
                right: r.clone(),
            })
        })
        .collect())
}

/// `D_I` in canonical orientation.
pub fn d_members(inst: &MonoidInstance, ideal: OrderIdeal) -> Result<Vec<BinarySum>, IntervalError> {
    let ndp = members(inst, ClassKind::NDoublePrime)?;
    let mut out = Vec::new();
    for p in ideal.elements() {
        let phi = ClassifiedMap {
            map: inst.phi(p).clone(),
            class: FunctionClass::Phi(p),
        };
        for r in &ndp {
            out.push(BinarySum {
                left: phi.clone(),
                right: r.clone(),
            });
        }
    }
    Ok(out)
}

pub fn binary_part(inst: &MonoidInstance, clone: IntervalClone) -> Result<BinaryPart, IntervalError> {
    let unary_size = inst.monoid_size();
    let binary = match clone {
        IntervalClone::Bottom => BTreeSet::new(),
        IntervalClone::CI(i) => v_members(inst)?.into_iter().chain(d_members(inst, i)?).collect(),
    };
    Ok(BinaryPart {
        clone,
        unary_size,
        binary,
    })
}

fn check_ideal(inst: &MonoidInstance, ideal: OrderIdeal) -> Result<(), IntervalError> {
    if ideal.is_downward_closed(inst.poset()) {
        Ok(())
    } else {
        Err(IntervalError::NotAnIdeal(ideal.label(inst.poset())))
    }
}

/// Checks that `C_I` is closed under every kind of substitution and that
/// identifying variables never leaves `M`.
pub fn verify_ci_closed(
    inst: &MonoidInstance,
    ideal: OrderIdeal,
    policy: Policy,
) -> Result<VerificationReport, IntervalError> {
    check_ideal(inst, ideal)?;
    let clone = IntervalClone::CI(ideal);
    let mut report = VerificationReport::new(
        "ci-closure",
        &format!(
            "C_I for I = {} is closed under substitution and its unary part is exactly M",
            ideal.label(inst.poset())
        ),
        policy,
    )
    .with_instance(&inst.fingerprint());

    let mut sums: Vec<BinarySum> = Vec::new();
    for s in v_members(inst)?.into_iter().chain(d_members(inst, ideal)?) {
        sums.push(s.swap());
        sums.push(s);
    }
    let unary: Vec<LinearMap>;
    let mut rng = ChaCha8Rng::seed_from_u64(match policy {
        Policy::Sampled { seed, .. } => seed,
        Policy::Exhaustive => 0,
    });
    let sampled_count = match policy {
        Policy::Exhaustive => {
            unary = inst
                .enumerate_monoid(EXHAUSTIVE_LIMIT)?
                .into_iter()
                .map(|c| c.map)
                .collect();
            None
        }
        Policy::Sampled { count, .. } => {
            let mut pool: Vec<LinearMap> = Vec::new();
            for kind in ClassKind::ALL {
                let e = inst.enumerate_class(kind, count.div_ceil(ClassKind::ALL.len()), rng.random());
                pool.extend(e.maps);
            }
            unary = pool;
            Some(count)
        }
    };

    let ok_sum = |parts: &[LinearMap]| sum_in_clone(inst, clone, parts);
    let case = |report: &mut VerificationReport, name: &str, parts: Vec<LinearMap>, context: &dyn Fn() -> String| {
        report.add_count(name, 1);
        report.expect(ok_sum(&parts), || {
            json!({ "case": name, "substitution": context(),
                    "result": parts.iter().map(|f| format!("{f:?}")).collect::<Vec<_>>() })
        });
    };

    let pick = |rng: &mut ChaCha8Rng, n: usize| rng.random_range(0..n);
    let mut each_pair = |a: usize, b: usize, f: &mut dyn FnMut(usize, usize)| match sampled_count {
        None => {
            for i in 0..a {
                for j in 0..b {
                    f(i, j);
                }
            }
        }
        Some(n) => {
            for _ in 0..n {
                let i = pick(&mut rng, a);
                let j = pick(&mut rng, b);
                f(i, j);
            }
        }
    };

    // unary into unary
    each_pair(unary.len(), unary.len(), &mut |i, j| {
        let (f, g) = (&unary[i], &unary[j]);
        case(&mut report, "unary_into_unary", vec![f * g], &|| {
            format!("{f:?} ∘ {g:?}")
        });
    });
    // unary into either variable of a binary sum
    each_pair(sums.len(), unary.len(), &mut |i, j| {
        let (s, g) = (&sums[i], &unary[j]);
        let ctx = || format!("{} with {g:?} substituted", s.describe());
        case(
            &mut report,
            "unary_into_binary",
            vec![&s.left.map * g, s.right.map.clone()],
            &ctx,
        );
        case(
            &mut report,
            "unary_into_binary",
            vec![s.left.map.clone(), &s.right.map * g],
            &ctx,
        );
    });
    // binary into unary
    each_pair(unary.len(), sums.len(), &mut |i, j| {
        let (f, s) = (&unary[i], &sums[j]);
        let ctx = || format!("{f:?} applied to {}", s.describe());
        case(
            &mut report,
            "binary_into_unary",
            vec![f * &s.left.map, f * &s.right.map],
            &ctx,
        );
    });
    // binary into either variable of a binary sum
    each_pair(sums.len(), sums.len(), &mut |i, j| {
        let (f, g) = (&sums[i], &sums[j]);
        let ctx = || format!("{} into {}", g.describe(), f.describe());
        case(
            &mut report,
            "binary_into_binary",
            vec![
                &f.left.map * &g.left.map,
                &f.left.map * &g.right.map,
                f.right.map.clone(),
            ],
            &ctx,
        );
        case(
            &mut report,
            "binary_into_binary",
            vec![
                f.left.map.clone(),
                &f.right.map * &g.left.map,
                &f.right.map * &g.right.map,
            ],
            &ctx,
        );
    });
    // identification of variables stays inside M
    let mut unary_part: BTreeSet<LinearMap> = unary.iter().cloned().collect();
    let base = unary_part.len();
    for s in &sums {
        let id = s.identify();
        report.add_count("identification", 1);
        report.expect(
            inst.contains(&id),
            || json!({ "case": "identification", "sum": s.describe() }),
        );
        unary_part.insert(id);
    }
    if sampled_count.is_none() {
        report.set_count("unary_part_size", unary_part.len() as u64);
        report.expect(
            unary_part.len() == base,
            || json!({ "case": "unary part grew beyond M" }),
        );
    }
    report.set_count("essentially_binary_members", sums.len() as u64);
    Ok(report)
}

/// How a forced binary sum is obtained from the starting one: substitute
/// `x_sub` for `x` and `y_sub` for `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcingWitness {
    pub x_sub: LinearMap,
    pub y_sub: LinearMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcedSum {
    pub sum: BinarySum,
    pub witness: ForcingWitness,
}

impl ForcedSum {
    /// Whether the witness really produces the sum from `from`.
    pub fn verify(&self, from: &BinarySum) -> bool {
        &from.left.map * &self.witness.x_sub == self.sum.left.map
            && &from.right.map * &self.witness.y_sub == self.sum.right.map
    }
}

/// A member of `N` that `n'` (any member with `c -> b`) turns into `target`
/// in `N'`: it sends `d` to `mu c` wherever `target(d) = mu b`.
fn lift_through_c(inst: &MonoidInstance, target: &LinearMap) -> LinearMap {
    let mut n = inst.n_trivial();
    for j in 3..inst.basis().dim() {
        let mut col = vec![0u8; inst.basis().dim()];
        col[C_INDEX] = target.get(B_INDEX, j);
        n.set_column(j, &col);
    }
    n
}

/// A member of `N` that `n''` turns into `target` in `N''`: it sends `d` to
/// `mu a` wherever `target(d) = mu a`.
fn lift_through_a(inst: &MonoidInstance, target: &LinearMap) -> LinearMap {
    let mut n = inst.n_trivial();
    for j in 3..inst.basis().dim() {
        let mut col = vec![0u8; inst.basis().dim()];
        col[A_INDEX] = target.get(A_INDEX, j);
        n.set_column(j, &col);
    }
    n
}

/// Everything a clone containing `M` and `from` must contain, each with a
/// substitution witness: for `from = phi_p(x) + n''(y)` all `phi_q(x) +
/// m''(y)` with `q <= p`, and for `from` in `V` or `D_P` all of `V`.
pub fn forced_functions(inst: &MonoidInstance, from: &BinarySum) -> Result<Vec<ForcedSum>, IntervalError> {
    let from = from.canonical();
    let p = match from.shape() {
        SumShape::D { p, .. } => Some(p),
        SumShape::V { .. } => None,
        _ => return Ok(Vec::new()),
    };
    let ndp = members(inst, ClassKind::NDoublePrime)?;
    let mut out = Vec::new();
    if let Some(p) = p {
        for q in 0..inst.poset().len() {
            if !inst.poset().leq(q, p) {
                continue;
            }
            let psi = inst.psi(p, q).expect("q <= p").clone();
            for m in &ndp {
                let sum = BinarySum {
                    left: ClassifiedMap {
                        map: inst.phi(q).clone(),
                        class: FunctionClass::Phi(q),
                    },
                    right: m.clone(),
                };
                let witness = ForcingWitness {
                    x_sub: psi.clone(),
                    y_sub: lift_through_a(inst, &m.map),
                };
                out.push(ForcedSum { sum, witness });
            }
        }
    }
    for v in v_members(inst)? {
        let witness = ForcingWitness {
            x_sub: lift_through_c(inst, &v.left.map),
            y_sub: lift_through_a(inst, &v.right.map),
        };
        out.push(ForcedSum { sum: v, witness });
    }
    Ok(out)
}

/// Class-level facts about the binary part of a clone above `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ForcingState {
    pub has_v: bool,
    pub ideal: OrderIdeal,
}

/// Fixpoint of the forcing rules: a member of `V` gives all of `V`; any
/// `phi_p(x) + n''(y)` gives `V` and every `phi_q(x) + m''(y)` with
/// `q <= p`.
pub fn forcing_closure(poset: &Poset, seeds: &[SumShape]) -> ForcingState {
    let mut state = ForcingState::default();
    let mut work: Vec<SumShape> = seeds.to_vec();
    while let Some(shape) = work.pop() {
        match shape {
            SumShape::V { .. } => state.has_v = true,
            SumShape::D { p, .. } if !state.ideal.contains(p) => {
                state.ideal = OrderIdeal(state.ideal.0 | 1 << p);
                work.push(SumShape::V { swapped: false });
                for q in 0..poset.len() {
                    if poset.leq(q, p) && q != p {
                        work.push(SumShape::D { p: q, swapped: false });
                    }
                }
            }
            _ => {}
        }
    }
    state
}

/// The interval clone generated by `M` and the given binary sums.
pub fn classify_clone(inst: &MonoidInstance, generators: &[BinarySum]) -> Result<IntervalClone, IntervalError> {
    let mut shapes = Vec::new();
    for g in generators {
        let shape = g.shape();
        if shape == SumShape::Other {
            return Err(IntervalError::NotAPolymorphism(g.describe()));
        }
        shapes.push(shape);
    }
    if !shapes.iter().any(|s| s.is_essentially_binary()) {
        return Ok(IntervalClone::Bottom);
    }
    let state = forcing_closure(inst.poset(), &shapes);
    debug_assert!(state.has_v);
    Ok(IntervalClone::CI(state.ideal))
}

/// Checks every forcing witness from every `phi_p(x) + n''(y)` and from
/// a member of `V`, and that the class-level closure matches the
/// generated clone.
pub fn verify_forcing(inst: &MonoidInstance) -> Result<VerificationReport, IntervalError> {
    let mut report = VerificationReport::new(
        "forcing",
        "a clone containing M and phi_p(x)+n''(y) contains V and phi_q(x)+m''(y) for all q <= p; a clone containing one member of V contains V",
        Policy::Exhaustive,
    )
    .with_instance(&inst.fingerprint());
    let mut starts: Vec<BinarySum> = d_members(inst, OrderIdeal(inst.poset().full_mask()))?;
    starts.extend(v_members(inst)?.into_iter().take(1));
    for from in &starts {
        for forced in forced_functions(inst, from)? {
            report.add_count("witnesses_checked", 1);
            let in_n = inst.classify(&forced.witness.x_sub).is_some() && inst.classify(&forced.witness.y_sub).is_some();
            report.expect(in_n && forced.verify(from), || {
                json!({
                    "from": from.describe(), "forced": forced.sum.describe(),
                    "x_sub": format!("{:?}", forced.witness.x_sub),
                    "y_sub": format!("{:?}", forced.witness.y_sub),
                })
            });
        }
        let expected = match from.shape() {
            SumShape::D { p, .. } => IntervalClone::CI(OrderIdeal(inst.poset().down_set(p))),
            _ => IntervalClone::CI(OrderIdeal(0)),
        };
        let got = classify_clone(inst, std::slice::from_ref(from))?;
        report.add_count("closures_checked", 1);
        report.expect(got == expected, || {
            json!({ "from": from.describe(), "generated": got.label(inst.poset()),
                    "expected": expected.label(inst.poset()) })
        });
    }
    Ok(report)
}

/// The interval above `M` with its order.
#[derive(Debug, Clone)]
pub struct IntervalMap {
    pub lattice: IdealLattice,
    /// `Bottom` followed by one clone per ideal in lattice order.
    pub clones: Vec<IntervalClone>,
    /// Covering pairs `(lower, upper)` as indices into `clones`.
    pub hasse: Vec<(usize, usize)>,
    /// Whether "no other clones exist" is certified, which needs every
    /// singleton of `A` to be small.
    pub complete: bool,
    pub report: VerificationReport,
}

impl IntervalMap {
    pub fn len(&self) -> usize {
        self.clones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clones.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        let poset = self.lattice.poset();
        self.clones.iter().map(|c| c.label(poset)).collect()
    }

    /// The inclusion order of the interval as a poset on the labels.
    pub fn as_poset(&self) -> Result<Poset, PosetError> {
        Poset::from_relations(self.labels(), &self.hasse)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let labels = self.labels();
        let mut adjacency: BTreeMap<String, Vec<String>> = labels.iter().map(|l| (l.clone(), Vec::new())).collect();
        for &(lo, hi) in &self.hasse {
            adjacency.get_mut(&labels[lo]).expect("label").push(labels[hi].clone());
        }
        json!({
            "size": self.clones.len(),
            "clones": labels,
            "covers": adjacency,
            "complete": self.complete,
            "report": self.report,
        })
    }
}

/// Builds `1 + L` for the ideal lattice `L` of the poset and certifies,
/// on binary parts, that `I -> C_I` is an order embedding preserving
/// meets and joins.
pub fn build_interval_map(inst: &MonoidInstance) -> Result<IntervalMap, IntervalError> {
    let lattice = order_ideals(inst.poset())?;
    let poset = inst.poset();
    let mut report = VerificationReport::new(
        "interval-map",
        "the interval above M is 1 + L: I -> C_I is injective, order-preserving and reflecting, sends intersections to intersections and unions to generated joins",
        Policy::Exhaustive,
    )
    .with_instance(&inst.fingerprint());

    let mut clones = vec![IntervalClone::Bottom];
    clones.extend(lattice.ideals().iter().map(|&i| IntervalClone::CI(i)));
    let parts: Vec<BTreeSet<BinarySum>> = clones
        .iter()
        .map(|&c| binary_part(inst, c).map(|b| b.binary))
        .collect::<Result<_, _>>()?;

    let n = clones.len();
    let leq = |i: usize, j: usize| match (clones[i], clones[j]) {
        (IntervalClone::Bottom, _) => true,
        (_, IntervalClone::Bottom) => false,
        (IntervalClone::CI(a), IntervalClone::CI(b)) => a.is_subset(b),
    };
    for i in 0..n {
        for j in 0..n {
            report.add_count("pairs_compared", 1);
            let included = parts[i].is_subset(&parts[j]);
            report.expect(included == leq(i, j), || {
                json!({ "lower": clones[i].label(poset), "upper": clones[j].label(poset),
                        "binary_inclusion": included })
            });
            if i != j {
                report.expect(
                    parts[i] != parts[j],
                    || json!({ "equal_binary_parts": [clones[i].label(poset), clones[j].label(poset)] }),
                );
            }
        }
    }
    for (i, &a) in lattice.ideals().iter().enumerate() {
        for &b in &lattice.ideals()[i..] {
            let (ia, ib) = (IntervalClone::CI(a), IntervalClone::CI(b));
            let pa = &parts[1 + lattice.position(a).expect("ideal")];
            let pb = &parts[1 + lattice.position(b).expect("ideal")];
            let meet = &parts[1 + lattice.position(a.intersection(b)).expect("ideal")];
            let inter: BTreeSet<BinarySum> = pa.intersection(pb).cloned().collect();
            report.add_count("meets_checked", 1);
            report.expect(
                &inter == meet,
                || json!({ "meet_of": [ia.label(poset), ib.label(poset)] }),
            );
            let generators: Vec<BinarySum> = pa.union(pb).cloned().collect();
            let joined = classify_clone(inst, &generators)?;
            report.add_count("joins_checked", 1);
            report.expect(
                joined == IntervalClone::CI(a.union(b)),
                || json!({ "join_of": [ia.label(poset), ib.label(poset)], "got": joined.label(poset) }),
            );
        }
    }
    for (k, &c) in clones.iter().enumerate() {
        let round = classify_clone(inst, &parts[k].iter().cloned().collect::<Vec<_>>())?;
        report.add_count("round_trips", 1);
        report.expect(
            round == c,
            || json!({ "round_trip": c.label(poset), "got": round.label(poset) }),
        );
    }

    let mut hasse = Vec::new();
    for lo in 0..n {
        for hi in 0..n {
            if lo != hi && leq(lo, hi) && !(0..n).any(|m| m != lo && m != hi && leq(lo, m) && leq(m, hi)) {
                hasse.push((lo, hi));
            }
        }
    }
    report.set_count("interval_size", n as u64);
    report.set_count("ideal_lattice_size", lattice.len() as u64);
    report.expect(n == lattice.len() + 1, || json!({ "size": n }));

    let complete = inst.singletons_small();
    if !complete {
        report.note(
            "singletons of A are not small here, so the witness lemma does not apply and the absence of further clones is not certified",
        );
    }
    let mut map = IntervalMap {
        lattice,
        clones,
        hasse,
        complete,
        report,
    };
    let expected = map.lattice.as_poset().with_bottom("<M>")?;
    let iso = map.as_poset()?.find_isomorphism(&expected).is_some();
    map.report
        .expect(iso, || json!({ "isomorphic_to_one_plus_lattice": false }));
    Ok(map)
}

/// Outcome of the preservation sweep over pairs `(f1, f2)` in `M x M`.
#[derive(Debug, Clone)]
pub struct PreservationSweep {
    pub survivors: Vec<BinarySum>,
    pub report: VerificationReport,
}

/// Finds the pairs `(f1, f2)` with `f1 ∘ g1 + f2 ∘ g2` in `M` for all
/// checked `g1, g2` in `M`, and compares them with `M* ∪ V ∪ D_P` up to
/// swapping variables. Also checks that no triple of nonconstant maps
/// survives.
pub fn binary_polymorphism_sums(inst: &MonoidInstance, policy: Policy) -> Result<PreservationSweep, IntervalError> {
    let mut report = VerificationReport::new(
        "pol-equals-cp",
        "the sums f1(x)+f2(y) preserving M are exactly the essentially unary ones and V ∪ D_P up to swapping variables; no sum of three nonconstant parts preserves M",
        policy,
    )
    .with_instance(&inst.fingerprint());
    let size = inst.monoid_size();
    let seed = match policy {
        Policy::Sampled { seed, .. } => seed,
        Policy::Exhaustive => 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let all = match policy {
        Policy::Exhaustive => Some(inst.enumerate_monoid(EXHAUSTIVE_LIMIT)?),
        Policy::Sampled { .. } if size <= PRESERVATION_EXHAUSTIVE_MONOID => {
            Some(inst.enumerate_monoid(EXHAUSTIVE_LIMIT)?)
        }
        Policy::Sampled { .. } => None,
    };
    let sample_any = |rng: &mut ChaCha8Rng| -> LinearMap {
        let kind = ClassKind::ALL[rng.random_range(0..ClassKind::ALL.len())];
        inst.sample_member(kind, rng)
    };

    // candidate pairs
    let candidates: Vec<(LinearMap, LinearMap)> = match (&all, policy) {
        (Some(all), Policy::Exhaustive) => all
            .iter()
            .flat_map(|f| all.iter().map(move |g| (f.map.clone(), g.map.clone())))
            .collect(),
        (_, Policy::Sampled { count, .. }) => {
            let count = count.min(PRESERVATION_CANDIDATES);
            let mut c = Vec::with_capacity(count);
            // every allowed shape appears, the rest is random
            let np = inst.sample_member(ClassKind::NPrime, &mut rng);
            let ndp = inst.sample_member(ClassKind::NDoublePrime, &mut rng);
            c.push((np.clone(), ndp.clone()));
            c.push((ndp.clone(), np));
            for p in 0..inst.poset().len() {
                c.push((inst.phi(p).clone(), ndp.clone()));
            }
            while c.len() < count {
                c.push((sample_any(&mut rng), sample_any(&mut rng)));
            }
            c
        }
        (None, Policy::Exhaustive) => unreachable!("exhaustive enumeration errors above the limit"),
    };

    // substitution pairs: the trivial N member first, then all or a sample
    let n0 = inst.n_trivial();
    let substitutions: Vec<(LinearMap, LinearMap)> = match &all {
        Some(all) => all
            .iter()
            .flat_map(|f| all.iter().map(move |g| (f.map.clone(), g.map.clone())))
            .collect(),
        None => {
            let mut s = vec![(n0.clone(), n0.clone())];
            while s.len() < PRESERVATION_SAMPLES {
                s.push((sample_any(&mut rng), sample_any(&mut rng)));
            }
            s
        }
    };
    if all.is_none() {
        report.note(format!(
            "M has {size} elements; {PRESERVATION_SAMPLES} substitution pairs sampled per candidate with seed {seed}"
        ));
    }

    let mut survivors = Vec::new();
    for (f1, f2) in &candidates {
        let sum = BinarySum::new(inst, f1.clone(), f2.clone())?;
        let mut checked = 0u64;
        let preserves = substitutions.iter().all(|(g1, g2)| {
            checked += 1;
            inst.contains(&sum.substitute(g1, g2))
        });
        report.add_count("substitutions_checked", checked);
        report.add_count("candidates", 1);
        let predicted = sum.shape() != SumShape::Other;
        if preserves {
            report.add_count("survivors", 1);
            match sum.shape() {
                SumShape::EssentiallyUnary => report.add_count("survivors_essentially_unary", 1),
                SumShape::V { .. } => report.add_count("survivors_in_v", 1),
                SumShape::D { .. } => report.add_count("survivors_in_d", 1),
                SumShape::Other => report.add_count("survivors_unexplained", 1),
            }
            survivors.push(sum.clone());
        }
        report.expect(
            preserves == predicted,
            || json!({ "sum": sum.describe(), "preserves": preserves, "predicted": predicted }),
        );
    }

    // triples: substituting the trivial N member everywhere already leaves M
    let triple_pool: Vec<LinearMap> = match &all {
        Some(all) => all
            .iter()
            .filter(|c| c.class != FunctionClass::Zero)
            .map(|c| c.map.clone())
            .collect(),
        None => (0..64)
            .map(|i| inst.sample_member(ClassKind::NONZERO[i % ClassKind::NONZERO.len()], &mut rng))
            .collect(),
    };
    for f in &triple_pool {
        for g in &triple_pool {
            for h in &triple_pool {
                let s = &(&(f * &n0) + &(g * &n0)) + &(h * &n0);
                report.add_count("triples_checked", 1);
                report.expect(
                    !inst.contains(&s),
                    || json!({ "triple": [format!("{f:?}"), format!("{g:?}"), format!("{h:?}")] }),
                );
            }
        }
    }
    Ok(PreservationSweep { survivors, report })
}

/// Reports whether the quasilinearity witnesses exist on this instance for
/// `k` up to `|A|` and random targets; not applicable when singletons are
/// not small.
pub fn verify_quasilinear_witnesses(
    inst: &MonoidInstance,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, IntervalError> {
    let mut report = VerificationReport::new(
        "quasilinear-witnesses",
        "for targets d_1..d_k there are distinct e_j in A and h_j in N with h_j(e_j) = d_j and h_j(e_i) = 0 otherwise",
        Policy::Sampled { count: trials, seed },
    )
    .with_instance(&inst.fingerprint());
    if !inst.singletons_small() {
        report.not_applicable(
            "singletons of A are not small, so N has no member sending a single basis vector of A to a nonzero vector",
        );
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = inst.basis().dim();
    let q = inst.field().order() as i64;
    for k in 1..=inst.basis().a_len() {
        for _ in 0..trials {
            let targets: Vec<_> = (0..k)
                .map(|_| {
                    let coords: Vec<i64> = (0..dim).map(|_| rng.random_range(0..q)).collect();
                    crate::linmodel::Vector::from_coords(inst.basis(), &coords)
                })
                .collect();
            report.add_count("target_lists", 1);
            match inst.quasilinearity_witnesses(&targets) {
                Ok(w) => {
                    let ok = w.iter().enumerate().all(|(j, (e, h))| {
                        inst.classify(h) == Some(FunctionClass::N)
                            && h.image_of(*e) == targets[j]
                            && w.iter()
                                .enumerate()
                                .all(|(i, (ei, _))| i == j || h.image_of(*ei).is_zero())
                    });
                    report.expect(ok, || json!({ "k": k }));
                }
                Err(e) => report.violation(json!({ "k": k, "error": e.to_string() })),
            }
        }
    }
    Ok(report)
}
