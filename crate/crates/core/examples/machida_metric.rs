//! Distances between clones on three points, and the bit-sequence encoding
//! of a clone on two points.

use clonelab::cloneengine::{closure, ops, DEFAULT_BUDGET};
use clonelab::machida::{distance_table, lambda_membership, minmax_pool, BitSequence, OperationEnumeration};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pool = minmax_pool(3, DEFAULT_BUDGET)?;
    let table = distance_table(&pool)?;
    print!("{:>10}", "");
    for (name, _) in &pool {
        print!("{name:>10}");
    }
    println!();
    for ((name, _), row) in pool.iter().zip(&table) {
        print!("{name:>10}");
        for d in row {
            print!("{:>10}", d.to_string());
        }
        println!();
    }

    let en = OperationEnumeration::new(2, 2)?;
    let clone = closure(2, &[ops::min(2)], 2, DEFAULT_BUDGET)?;
    let bits = BitSequence::of_clone(&clone, &en)?;
    println!(
        "\n<min> on {{0,1}} up to arity 2 ({} operations):\n{}",
        en.len(),
        bits.to_text()
    );
    println!("(contains projections, closed) = {:?}", lambda_membership(&bits, &en));
    Ok(())
}
