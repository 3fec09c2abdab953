//! Sweeps that check the class-level facts about `M` on a concrete instance.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::HashSet;

use super::{ClassKind, FunctionClass, MonoidError, MonoidInstance, EXHAUSTIVE_LIMIT};
use crate::linmodel::{LinearMap, A_INDEX, B_INDEX, C_INDEX};
use crate::report::{Policy, VerificationReport};

use ClassKind::*;

/// Classes that may contain `f ∘ g` for `f` in `outer` and `g` in `inner`.
pub fn composition_rule(outer: ClassKind, inner: ClassKind) -> &'static [ClassKind] {
    if outer == Zero || inner == Zero {
        return &[Zero];
    }
    match (outer, inner) {
        (_, NPrime) | (_, Phi) => &[Zero],
        (_, SPhi) | (_, SNPrime) => composition_rule(outer, NDoublePrime),

        (N, N) => &[N],
        (N, NDoublePrime) => &[NDoublePrime],
        (N, Psi) => &[N],

        (NPrime, N) => &[NPrime],
        (NPrime, NDoublePrime) => &[Zero],
        (NPrime, Psi) => &[NPrime],

        (NDoublePrime, N) | (NDoublePrime, NDoublePrime) | (NDoublePrime, Psi) => &[NDoublePrime],

        (Phi, N) => &[NPrime],
        (Phi, NDoublePrime) => &[Zero],
        (Phi, Psi) => &[Phi, NPrime],

        (Psi, N) => &[N],
        (Psi, NDoublePrime) => &[NDoublePrime],
        (Psi, Psi) => &[Psi, N],

        (SPhi, N) => &[SNPrime],
        (SPhi, NDoublePrime) => &[NDoublePrime],
        (SPhi, Psi) => &[SPhi, SNPrime],

        (SNPrime, N) => &[SNPrime],
        (SNPrime, NDoublePrime) => &[NDoublePrime],
        (SNPrime, Psi) => &[SNPrime],
        _ => unreachable!("zero handled above"),
    }
}

pub(crate) fn show(f: &LinearMap) -> String {
    format!("{f:?}")
}

impl MonoidInstance {
    /// Random `(kind, map)` with the kind drawn uniformly from `kinds`, so
    /// that small classes are not drowned out by `N`.
    fn sample_stratified<R: Rng>(&self, kinds: &[ClassKind], rng: &mut R) -> LinearMap {
        let kind = kinds[rng.random_range(0..kinds.len())];
        self.sample_member(kind, rng)
    }

    fn exhaustive_members(&self, include_zero: bool) -> Result<Vec<(ClassKind, LinearMap)>, MonoidError> {
        Ok(self
            .enumerate_monoid(EXHAUSTIVE_LIMIT)?
            .into_iter()
            .filter(|c| include_zero || c.class != FunctionClass::Zero)
            .map(|c| (c.class.kind(), c.map))
            .collect())
    }

    /// Every composite `f ∘ g` of checked pairs lies in the class the
    /// composition table predicts. Also certifies closure of `M`.
    pub fn verify_composition_table(&self, policy: Policy) -> Result<VerificationReport, MonoidError> {
        let mut report = VerificationReport::new(
            "composition-table",
            "for f in class X and g in class Y, f∘g lies in the class given by the composition table, so M is a monoid",
            policy,
        )
        .with_instance(&self.fingerprint());
        let check = |report: &mut VerificationReport, f: &LinearMap, g: &LinearMap| {
            let fk = self.classify(f).expect("member").kind();
            let gk = self.classify(g).expect("member").kind();
            let fg = f * g;
            let got = self.classify(&fg);
            report.add_count("pairs_checked", 1);
            let allowed = composition_rule(fk, gk);
            report.expect(got.is_some_and(|c| allowed.contains(&c.kind())), || {
                json!({
                    "outer": show(f), "outer_class": fk.symbol(),
                    "inner": show(g), "inner_class": gk.symbol(),
                    "composite": show(&fg),
                    "composite_class": got.map(|c| c.kind().symbol()).unwrap_or("not in M"),
                    "expected": allowed.iter().map(|k| k.symbol()).collect::<Vec<_>>(),
                })
            });
        };
        match policy {
            Policy::Exhaustive => {
                let members = self.exhaustive_members(true)?;
                report.set_count("monoid_size", members.len() as u64);
                for (_, f) in &members {
                    for (_, g) in &members {
                        check(&mut report, f, g);
                    }
                }
            }
            Policy::Sampled { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..count {
                    let f = self.sample_stratified(&ClassKind::ALL, &mut rng);
                    let g = self.sample_stratified(&ClassKind::ALL, &mut rng);
                    check(&mut report, &f, &g);
                }
                report.note(format!("class pairs drawn uniformly, seed {seed}"));
            }
        }
        Ok(report)
    }

    /// `phi_r ∘ psi_{p,q}` is `phi_q` when `r = p` and lies in `N'` otherwise.
    pub fn check_phi_psi_translation(&self, r: &str, p: &str, q: &str) -> Result<VerificationReport, MonoidError> {
        let psi = self.build_psi(p, q)?;
        let ri = self.element(r)?;
        let qi = self.element(q)?;
        let pi = self.element(p)?;
        let mut report = VerificationReport::new(
            "phi-psi-translation",
            "phi_r∘psi_{p,q} equals phi_q when r = p and lies in N' otherwise",
            Policy::Exhaustive,
        )
        .with_instance(&self.fingerprint());
        let comp = self.phi(ri) * &psi;
        let payload = || json!({ "r": r, "p": p, "q": q, "composite": show(&comp) });
        if ri == pi {
            report.expect(comp == *self.phi(qi), payload);
        } else {
            report.expect(self.classify(&comp) == Some(FunctionClass::NPrime), payload);
            // support lies inside psi^{-1}[A_r ∩ A_p]
            let meet = self.family().member(ri) & self.family().member(pi);
            let pre: u32 = (0..self.basis().a_len())
                .filter(|&i| {
                    psi.image_of(self.basis().a_position(i))
                        .coords()
                        .iter()
                        .enumerate()
                        .any(|(row, &e)| e != 0 && row >= 3 && meet >> (row - 3) & 1 == 1)
                })
                .fold(0, |m, i| m | 1 << i);
            report.expect(comp.support() & !pre == 0, payload);
        }
        report.set_count("compositions", 1);
        Ok(report)
    }

    /// `psi_{p,r} ∘ psi_{r,q} = psi_{p,q}` for every chain `q <= r <= p`.
    pub fn verify_psi_coherence(&self) -> VerificationReport {
        let mut report = VerificationReport::new(
            "psi-coherence",
            "psi_{p,r}∘psi_{r,q} = psi_{p,q} for all q <= r <= p",
            Policy::Exhaustive,
        )
        .with_instance(&self.fingerprint());
        let n = self.poset().len();
        for p in 0..n {
            for r in 0..n {
                for q in 0..n {
                    if !(self.poset().leq(q, r) && self.poset().leq(r, p)) {
                        continue;
                    }
                    report.add_count("triples_checked", 1);
                    let lhs = self.psi(p, r).unwrap() * self.psi(r, q).unwrap();
                    report.expect(lhs == *self.psi(p, q).unwrap(), || {
                        json!({
                            "p": self.element_name(p), "r": self.element_name(r),
                            "q": self.element_name(q), "composite": show(&lhs),
                        })
                    });
                }
            }
        }
        report
    }

    /// If `f + g` lies in `M` for nonconstant `f, g`, one summand is in
    /// `N' ∪ Phi` and the other in `N''`; no sum of three nonconstant
    /// members lies in `M`.
    pub fn verify_sum_lemmas(&self, policy: Policy) -> Result<VerificationReport, MonoidError> {
        let mut report = VerificationReport::new(
            "sum-lemmas",
            "f+g in M forces {f,g} in (N' ∪ Phi) x N'' up to order; f+g+h is never in M for nonconstant f,g,h",
            policy,
        )
        .with_instance(&self.fingerprint());
        let shape_ok = |f: ClassKind, g: ClassKind| {
            let left = |k| matches!(k, NPrime | Phi);
            (left(f) && g == NDoublePrime) || (left(g) && f == NDoublePrime)
        };
        let pair = |report: &mut VerificationReport, f: &LinearMap, g: &LinearMap| {
            report.add_count("pairs_checked", 1);
            let sum = f + g;
            if let Some(class) = self.classify(&sum) {
                report.add_count("pairs_summing_into_m", 1);
                let fk = self.classify(f).expect("member").kind();
                let gk = self.classify(g).expect("member").kind();
                report.expect(shape_ok(fk, gk), || {
                    json!({
                        "f": show(f), "f_class": fk.symbol(),
                        "g": show(g), "g_class": gk.symbol(),
                        "sum_class": class.kind().symbol(),
                    })
                });
            }
        };
        let triple = |report: &mut VerificationReport, f: &LinearMap, g: &LinearMap, h: &LinearMap| {
            report.add_count("triples_checked", 1);
            let sum = &(f + g) + h;
            report.expect(
                !self.contains(&sum),
                || json!({ "f": show(f), "g": show(g), "h": show(h), "sum": show(&sum) }),
            );
        };
        match policy {
            Policy::Exhaustive => {
                let members: Vec<LinearMap> = self.exhaustive_members(false)?.into_iter().map(|(_, f)| f).collect();
                for f in &members {
                    for g in &members {
                        pair(&mut report, f, g);
                    }
                }
                for f in &members {
                    for g in &members {
                        for h in &members {
                            triple(&mut report, f, g, h);
                        }
                    }
                }
            }
            Policy::Sampled { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let kinds = ClassKind::NONZERO;
                for _ in 0..count {
                    let f = self.sample_stratified(&kinds, &mut rng);
                    let g = self.sample_stratified(&kinds, &mut rng);
                    pair(&mut report, &f, &g);
                }
                for _ in 0..count {
                    let f = self.sample_stratified(&kinds, &mut rng);
                    let g = self.sample_stratified(&kinds, &mut rng);
                    let h = self.sample_stratified(&kinds, &mut rng);
                    triple(&mut report, &f, &g, &h);
                }
                report.note(format!("class triples drawn uniformly, seed {seed}"));
            }
        }
        Ok(report)
    }

    /// Every member maps `a` into `{0, a}`, `b` to 0 and `c` into
    /// `{0, b, c}`, and the classes partition `M`.
    pub fn verify_observed_properties(&self, policy: Policy) -> Result<VerificationReport, MonoidError> {
        let mut report = VerificationReport::new(
            "observed-properties",
            "every f in M has f(a) in {0,a}, f(b) = 0, f(c) in {0,b,c}, and the eight classes are disjoint",
            policy,
        )
        .with_instance(&self.fingerprint());
        let unit_or_zero = |f: &LinearMap, col: usize, allowed: &[usize]| {
            let v = f.column(col);
            let nz: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0).collect();
            nz.is_empty() || (nz.len() == 1 && v[nz[0]] == 1 && allowed.contains(&nz[0]))
        };
        let check = |report: &mut VerificationReport, kind: ClassKind, f: &LinearMap| {
            report.add_count("maps_checked", 1);
            let ok = unit_or_zero(f, A_INDEX, &[A_INDEX])
                && f.column(B_INDEX).iter().all(|&e| e == 0)
                && unit_or_zero(f, C_INDEX, &[B_INDEX, C_INDEX])
                && self.classify(f).map(|c| c.kind()) == Some(kind);
            report.expect(ok, || json!({ "map": show(f), "generated_as": kind.symbol() }));
        };
        match policy {
            Policy::Exhaustive => {
                let mut seen = HashSet::new();
                for kind in ClassKind::ALL {
                    for f in self.class_members(kind, EXHAUSTIVE_LIMIT)? {
                        check(&mut report, kind, &f);
                        report.expect(
                            seen.insert(f.clone()),
                            || json!({ "duplicate": show(&f), "class": kind.symbol() }),
                        );
                    }
                }
            }
            Policy::Sampled { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for i in 0..count {
                    let kind = ClassKind::ALL[i % ClassKind::ALL.len()];
                    let f = self.sample_member(kind, &mut rng);
                    check(&mut report, kind, &f);
                }
            }
        }
        Ok(report)
    }
}
