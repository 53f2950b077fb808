//! Parsing cubics and applying apolar operators.
use perazzo::poly::{apply_operator, parse};

fn main() -> perazzo::Result<()> {
    let f = parse("x0*x3^2 + x1*x3*x4 + x2*x4^2", 5)?;
    println!("f = {f}");
    for op in ["x3", "x3*x4", "x0*x3^2"] {
        let alpha = parse(op, 5)?;
        println!("{op} applied to f = {}", apply_operator(&alpha, &f)?);
    }
    let g = parse("1/2*x0^3 - (x1 + x2)*x2^2", 3)?;
    println!("round trip: {g}  ->  {}", parse(&g.to_string(), 3)?);
    Ok(())
}
