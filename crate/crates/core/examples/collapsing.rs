//! Binary polymorphisms of the full symmetric group: all essentially unary.
//!
//! Run with `cargo run --release --example collapsing -- 4`.

use clonelab::cloneengine::{binary_polymorphisms, ops, CollapsingSteps};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain: u8 = std::env::args().nth(1).map_or(Ok(3), |s| s.parse())?;
    let group = ops::symmetric_group(domain);
    let polys = binary_polymorphisms(domain, &group)?;
    println!("|S_{domain}| = {}, binary polymorphisms: {}", group.len(), polys.len());
    for f in polys.iter().take(12) {
        let steps = CollapsingSteps::of(f);
        println!(
            "  {}  essential {:?}  steps ok: {}",
            f.to_text(),
            f.essential_variables(),
            steps.all()
        );
    }
    if polys.len() > 12 {
        println!("  ... {} more", polys.len() - 12);
    }
    Ok(())
}
