//! The pentagon of clones generated by min, med and max on 0 < 1 < 2.

use clonelab::cloneengine::{pentagon_check, GradedClone, DEFAULT_BUDGET};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cap = 3;
    let (report, p) = pentagon_check(cap, DEFAULT_BUDGET)?;
    for (name, clone) in [
        ("Proj", &p.proj),
        ("<min>", &p.min),
        ("<max>", &p.max),
        ("<min,med>", &p.min_med),
        ("<min,max>", &p.min_max),
    ] {
        println!("{name:<10} sizes by arity {:?}", clone.sizes());
    }
    let strict = |a: &GradedClone, b: &GradedClone| a.is_subset(b) && a != b;
    println!("<min> < <min,med>: {}", strict(&p.min, &p.min_med));
    println!("<min,med> < <min,max>: {}", strict(&p.min_med, &p.min_max));
    println!("<max> < <min,max>: {}", strict(&p.max, &p.min_max));
    println!(
        "<min,med> meet <max> = Proj: {}",
        p.min_med.intersection(&p.max) == p.proj
    );
    println!(
        "verdict: {:?} ({} claims)",
        report.verdict,
        report.count("claims_checked")
    );
    Ok(())
}
