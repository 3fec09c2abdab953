//! Enumerates the monoid of a small instance class by class.
//!
//! Run with `cargo run --example monoid_classes -- crates/core/instances/c2.toml`.

use clonelab::config::load_instance;
use clonelab::monoid::ClassKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/instances/m0.toml").to_string());
    let config = load_instance(path.as_ref())?;
    let inst = &config.instance;
    println!(
        "{} over GF({}), fingerprint {}",
        config.name,
        inst.field().order(),
        inst.fingerprint()
    );
    println!(
        "small sets: {:?}",
        inst.small_sets()
            .iter()
            .map(|&s| inst.family().labels_of(s))
            .collect::<Vec<_>>()
    );

    for kind in ClassKind::ALL {
        println!("|{:<5}| = {}", kind.symbol(), inst.class_size(kind));
    }
    println!("|M| = {}", inst.monoid_size());

    for p in 0..inst.poset().len() {
        println!("phi_{} = {:?}", inst.element_name(p), inst.phi(p));
    }
    for (q, p) in inst.poset().comparable_pairs() {
        if let Some(psi) = inst.psi(p, q) {
            println!("psi_{{{},{}}} = {psi:?}", inst.element_name(p), inst.element_name(q));
        }
    }

    if let Ok(members) = inst.enumerate_monoid(100) {
        println!("members:");
        for m in members {
            println!("  {:<24} {:?}", format!("{:?}", m.class), m.map);
        }
    }
    Ok(())
}
