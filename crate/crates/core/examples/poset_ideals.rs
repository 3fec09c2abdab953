//! Order ideals of a small poset and the lattice they form.
//!
//! Run with `cargo run --example poset_ideals -- "a b c\na<c\nb<c"`.

use clonelab::poset::{join_irreducibles, order_ideals, parse_poset};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args().nth(1).unwrap_or_else(|| "a b c\na<c\nb<c".to_string());
    let poset = parse_poset(&text)?;
    println!("poset:\n{}", poset.to_text());

    let lattice = order_ideals(&poset)?;
    println!("{} order ideals:", lattice.len());
    for (i, ideal) in lattice.ideals().iter().enumerate() {
        let below: Vec<String> = lattice
            .lower_covers(i)
            .into_iter()
            .map(|j| lattice.ideals()[j].label(&poset))
            .collect();
        println!("  {:<12} covers {}", ideal.label(&poset), below.join(", "));
    }

    // the join-irreducible ideals are the principal ones, ordered like the poset
    let back = join_irreducibles(&lattice);
    match poset.find_isomorphism(&back) {
        Some(iso) => println!("join-irreducibles recover the poset via {iso:?}"),
        None => println!("join-irreducibles do NOT recover the poset"),
    }
    Ok(())
}
