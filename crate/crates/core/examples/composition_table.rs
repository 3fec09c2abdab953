//! The class-level composition table and its check on two instances.

use clonelab::config::load_instance;
use clonelab::monoid::{composition_rule, ClassKind};
use clonelab::report::Policy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{:>6} |", "f . g");
    for inner in ClassKind::NONZERO {
        print!(" {:>10}", inner.symbol());
    }
    println!();
    for outer in ClassKind::NONZERO {
        print!("{:>6} |", outer.symbol());
        for inner in ClassKind::NONZERO {
            let cell: Vec<&str> = composition_rule(outer, inner).iter().map(|k| k.symbol()).collect();
            print!(" {:>10}", cell.join("|"));
        }
        println!();
    }

    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/instances");
    let m0 = load_instance(format!("{dir}/m0.toml").as_ref())?;
    let report = m0.instance.verify_composition_table(Policy::Exhaustive)?;
    println!(
        "\nm0 exhaustive: {:?}, {} pairs",
        report.verdict,
        report.count("pairs_checked")
    );

    let m1 = load_instance(format!("{dir}/m1.toml").as_ref())?;
    let policy = Policy::Sampled {
        count: 10_000,
        seed: 42,
    };
    let report = m1.instance.verify_composition_table(policy)?;
    println!(
        "m1 {policy}: {:?}, {} pairs",
        report.verdict,
        report.count("pairs_checked")
    );
    Ok(())
}
