//! The interval of clones above the monoid, labelled by order ideals.
//!
//! Run with `cargo run --example interval_map -- crates/core/instances/antichain-3.toml`.

use clonelab::config::load_instance;
use clonelab::interval::build_interval_map;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/instances/m0.toml").to_string());
    let config = load_instance(path.as_ref())?;
    let map = build_interval_map(&config.instance)?;
    let labels = map.labels();

    println!("{}: {} clones with unary part M", config.name, map.len());
    for (lo, hi) in &map.hasse {
        println!("  {:<12} < {}", labels[*lo], labels[*hi]);
    }
    println!("certificate: {:?}", map.report.verdict);
    for note in &map.report.notes {
        println!("  note: {note}");
    }
    Ok(())
}
