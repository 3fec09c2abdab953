//! Linear maps over GF(5) on the basis a, b, c, d1, d2.

use clonelab::linmodel::{Basis, Field, LinearMap, Vector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let field = Field::new(5)?;
    let basis = Basis::new(field, &["d1".to_string(), "d2".to_string()])?;
    println!("basis: {}", basis.labels().join(" "));

    // columns are images: f sends a to b and d1 to 2a + b
    let mut f = LinearMap::zero(&basis);
    f.set_column(0, &[0, 1, 0, 0, 0]);
    f.set_column(3, &[2, 1, 0, 0, 0]);
    let g = LinearMap::parse(
        "a b c d1 d2
         0 0 1 0 0
         0 0 0 0 0
         0 0 0 0 0
         0 0 0 0 1
         0 0 0 0 0",
        &basis,
    )?;
    println!("f = {f:?}\ng = {g:?}");
    println!("f + g = {:?}", &f + &g);
    println!("f . g = {:?}", &f * &g);
    println!("rank(f) = {}, support(g) = {:#b}", f.rank(), g.support());

    let v = Vector::from_coords(&basis, &[1, 0, 1, 3, 4]);
    println!("v = {:?}\nf(g(v)) = {:?}", v.coords(), f.apply(&g.apply(&v)?)?.coords());
    println!("g as text:\n{}", g.to_text());
    Ok(())
}
