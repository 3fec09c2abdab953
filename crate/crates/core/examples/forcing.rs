//! On the chain r < p, a clone containing phi_p(x) + n''(y) also contains
//! phi_r(x) + n''(y); this prints the substitution that proves it.

use clonelab::config::load_instance;
use clonelab::interval::{classify_clone, forced_functions, BinarySum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = load_instance(concat!(env!("CARGO_MANIFEST_DIR"), "/instances/c2.toml").as_ref())?;
    let inst = &config.instance;
    let seed = BinarySum::new(inst, inst.build_phi("p")?, inst.n_double_prime_trivial())?;
    println!("generator: {}", seed.describe());
    println!(
        "generates: {}",
        classify_clone(inst, std::slice::from_ref(&seed))?.label(inst.poset())
    );

    for forced in forced_functions(inst, &seed)? {
        println!("\nforces {}", forced.sum.describe());
        println!("  x -> {:?}", forced.witness.x_sub);
        println!("  y -> {:?}", forced.witness.y_sub);
        println!("  witness checks out: {}", forced.verify(&seed));
    }
    Ok(())
}
