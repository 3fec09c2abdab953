//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! `cargo test --test acceptance`

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clonelab::cli::{cmd_collapse, cmd_metric, cmd_verify};
use clonelab::cloneengine::{
    binary_polymorphisms, collapsing_check, ops, pentagon_check, CollapsingSteps, DEFAULT_BUDGET,
};
use clonelab::config::{load_instance, InstanceConfig};
use clonelab::interval::{
    binary_polymorphism_sums, build_interval_map, d_members, forced_functions, v_members, verify_quasilinear_witnesses,
    BinarySum,
};
use clonelab::machida::{minmax_pool, verify_encoding, verify_metric, Distance};
use clonelab::monoid::ClassKind;
use clonelab::poset::{order_ideals, OrderIdeal};
use clonelab::report::Policy;

/// Wall-clock limits. Tests build at opt-level 2, see the workspace manifest.
const M0_LIMIT: Duration = Duration::from_secs(1);
const COLLAPSE_LIMIT: Duration = Duration::from_secs(5);

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn instance(name: &str) -> InstanceConfig {
    load_instance(format!("{}/instances/{name}.toml", env!("CARGO_MANIFEST_DIR")).as_ref()).expect("bundled instance")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let m0 = instance("m0").instance;
    let sizes: Vec<u128> = ClassKind::ALL.iter().map(|&k| m0.class_size(k)).collect();
    ensure(sizes == [1, 1, 1, 2, 2, 2, 1, 1], || format!("class sizes {sizes:?}"))?;
    let members = m0.enumerate_monoid(1000).map_err(|e| e.to_string())?;
    ensure(members.len() == 11, || format!("|M| = {}", members.len()))?;
    let r = m0
        .verify_composition_table(Policy::Exhaustive)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(r.passed() && r.count("pairs_checked") == 121, || r.to_json())?;
    ensure(elapsed < M0_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "|M| = 11, 121 pairs, 0 violations, {elapsed:.2?} < {M0_LIMIT:?}"
    ))
}

fn ac2() -> Outcome {
    let m0 = instance("m0").instance;
    let r = m0.verify_sum_lemmas(Policy::Exhaustive).map_err(|e| e.to_string())?;
    ensure(r.passed(), || r.to_json())?;
    ensure(r.count("triples_checked") == 1000, || r.to_json())?;
    Ok(format!(
        "{} pairs ({} sum into M, all of shape (N' or Phi) + N''), {} triples, 0 violations",
        r.count("pairs_checked"),
        r.count("pairs_summing_into_m"),
        r.count("triples_checked")
    ))
}

fn ac3() -> Outcome {
    let m0 = instance("m0").instance;
    let sweep = binary_polymorphism_sums(&m0, Policy::Exhaustive).map_err(|e| e.to_string())?;
    ensure(sweep.report.count("candidates") == 121, || sweep.report.to_json())?;
    let full = OrderIdeal(m0.poset().full_mask());
    let mut expected: BTreeSet<BinarySum> = BTreeSet::new();
    for s in v_members(&m0)
        .map_err(|e| e.to_string())?
        .into_iter()
        .chain(d_members(&m0, full).map_err(|e| e.to_string())?)
    {
        expected.insert(s.swap());
        expected.insert(s);
    }
    let binary: BTreeSet<BinarySum> = sweep
        .survivors
        .iter()
        .filter(|s| s.shape().is_essentially_binary())
        .cloned()
        .collect();
    ensure(binary == expected, || {
        format!(
            "{} essentially binary survivors, expected {}",
            binary.len(),
            expected.len()
        )
    })?;

    let map = build_interval_map(&m0).map_err(|e| e.to_string())?;
    ensure(map.report.passed() && map.len() == 5, || map.report.to_json())?;
    let square = order_ideals(m0.poset())
        .map_err(|e| e.to_string())?
        .as_poset()
        .with_bottom("0")
        .map_err(|e| e.to_string())?;
    let got = map.as_poset().map_err(|e| e.to_string())?;
    ensure(got.find_isomorphism(&square).is_some(), || {
        "interval is not 1 + 2x2".into()
    })?;
    Ok(format!(
        "{} survivors: {} essentially unary, {} in V, {} in D (with swaps); interval 1 + 2x2",
        sweep.survivors.len(),
        sweep.report.count("survivors_essentially_unary"),
        sweep.report.count("survivors_in_v"),
        sweep.report.count("survivors_in_d")
    ))
}

fn ac4() -> Outcome {
    let c2 = instance("c2").instance;
    let (p, r) = (c2.poset().index_of("p").unwrap(), c2.poset().index_of("r").unwrap());
    let seed = BinarySum::new(&c2, c2.phi(p).clone(), c2.n_double_prime_trivial()).map_err(|e| e.to_string())?;
    let forced = forced_functions(&c2, &seed).map_err(|e| e.to_string())?;
    let hit = forced
        .iter()
        .find(|f| f.sum.left.map == *c2.phi(r) && f.verify(&seed))
        .ok_or("no verified witness for phi_r + n''")?;
    let map = build_interval_map(&c2).map_err(|e| e.to_string())?;
    ensure(map.report.passed() && map.len() == 4, || map.report.to_json())?;
    let chain = clonelab::poset::Poset::chain(4).map_err(|e| e.to_string())?;
    ensure(
        map.as_poset()
            .map_err(|e| e.to_string())?
            .find_isomorphism(&chain)
            .is_some(),
        || "not a 4-chain".into(),
    )?;
    Ok(format!(
        "phi_r + n'' forced via x -> {:?}; interval is a 4-chain",
        hit.witness.x_sub
    ))
}

fn ac5() -> Outcome {
    let m1 = instance("m1").instance;
    let small = m1.small_sets().len();
    ensure(small == 4, || format!("{small} small sets"))?;
    let w = verify_quasilinear_witnesses(&m1, 100, 42).map_err(|e| e.to_string())?;
    ensure(w.passed(), || w.to_json())?;
    let policy = Policy::Sampled {
        count: 10_000,
        seed: 42,
    };
    let r = m1.verify_composition_table(policy).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.count("pairs_checked") == 10_000, || r.to_json())?;
    ensure(r.policy == "sampled:10000:seed=42", || r.policy.clone())?;
    Ok(format!(
        "4 small sets; witnesses for k <= 3 over {} target lists; 10^4 pairs, policy {}",
        w.count("target_lists"),
        r.policy
    ))
}

fn ac6() -> Outcome {
    let c3 = clonelab::config::parse_instance(
        "ground = \"d1 d2 d3\"\nposet = \"\"\"\np r s\ns<r\nr<p\n\"\"\"\nfamily = \"\"\"\np: d1\nr: d2\ns: d3\n\"\"\"\n",
    )
    .map_err(|e| e.to_string())?
    .instance;
    let r = c3.verify_psi_coherence();
    ensure(r.passed() && r.count("triples_checked") == 10, || r.to_json())?;
    Ok("all 10 comparable triples on the 3-chain".into())
}

fn ac7() -> Outcome {
    let start = Instant::now();
    let r = collapsing_check(3).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(r.passed(), || r.to_json())?;
    ensure(
        r.count("binary_tables") == 19683 && r.count("binary_polymorphisms") == 12,
        || r.to_json(),
    )?;
    let group = ops::symmetric_group(3);
    let polys = binary_polymorphisms(3, &group).map_err(|e| e.to_string())?;
    ensure(polys.iter().all(|f| CollapsingSteps::of(f).all()), || {
        "a proof step fails".into()
    })?;
    ensure(elapsed < COLLAPSE_LIMIT, || format!("took {elapsed:?}"))?;
    let r4 = collapsing_check(4).map_err(|e| e.to_string())?;
    ensure(r4.passed(), || r4.to_json())?;
    Ok(format!(
        "|X|=3: 12 of 19683 tables, all steps hold, {elapsed:.2?} < {COLLAPSE_LIMIT:?}; |X|=4: {} found, all essentially unary",
        r4.count("binary_polymorphisms")
    ))
}

fn ac8() -> Outcome {
    let (r, p) = pentagon_check(3, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(r.passed(), || r.to_json())?;
    let strict =
        |a: &clonelab::cloneengine::GradedClone, b: &clonelab::cloneengine::GradedClone| a.is_subset(b) && a != b;
    ensure(strict(&p.min, &p.min_med) && strict(&p.min_med, &p.min_max), || {
        "chain not strict".into()
    })?;
    ensure(!p.min_med.contains(&ops::max(3)), || "max in <min,med>".into())?;
    ensure(p.min_max.contains(&ops::med(3)), || "med not in <min,max>".into())?;
    ensure(p.min_med.intersection(&p.max) == p.proj, || {
        "meet with <max> is not Proj".into()
    })?;
    Ok(format!("N5 certificate, {} claims", r.count("claims_checked")))
}

fn ac9() -> Outcome {
    let pool = minmax_pool(3, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(pool.len() >= 6, || format!("pool of {}", pool.len()))?;
    let m = verify_metric(&pool).map_err(|e| e.to_string())?;
    ensure(m.passed(), || m.to_json())?;
    let d = clonelab::machida::machida_distance(&pool[1].1, &pool[2].1).map_err(|e| e.to_string())?;
    ensure(d == Distance::FirstDifference(2), || format!("d(<min>,<max>) = {d}"))?;
    let e = verify_encoding(2, 2, 50, 0, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(e.passed() && e.count("sets") == 50, || e.to_json())?;
    Ok(format!(
        "ultrametric and sphere checks on {} clones; d(<min>,<max>) = {d}; encoding agrees on 50 sets",
        pool.len()
    ))
}

fn ac10() -> Outcome {
    let runs = || -> Result<Vec<String>, String> {
        let m1 = instance("m1");
        let policy = Some(Policy::Sampled { count: 2000, seed: 42 });
        Ok(vec![
            cmd_verify(&m1, policy, false).map_err(|e| e.to_string())?.to_json(),
            cmd_collapse(3).map_err(|e| e.to_string())?.to_json(),
            cmd_metric(3, "minmax", 3).map_err(|e| e.to_string())?.to_json(),
        ])
    };
    let (a, b) = (runs()?, runs()?);
    ensure(a == b, || "reports differ between runs".into())?;
    Ok(format!(
        "{} bytes identical across two runs",
        a.iter().map(String::len).sum::<usize>()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1", "M0 enumeration and exhaustive composition table", ac1),
        ("AC2", "M0 sums of two and three", ac2),
        ("AC3", "M0 polymorphism sweep and interval", ac3),
        ("AC4", "C2 forcing and 4-chain", ac4),
        ("AC5", "M1 smallness, witnesses, sampled table", ac5),
        ("AC6", "psi coherence on a 3-chain", ac6),
        ("AC7", "symmetric group is collapsing", ac7),
        ("AC8", "pentagon on three points", ac8),
        ("AC9", "Machida metric and encoding", ac9),
        ("AC10", "determinism", ac10),
    ];
    let mut failed = 0;
    for (id, what, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {id:<4} {what}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:<4} {what}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
