//! Hessian, Hilbert function and strong Lefschetz property of a few cubics.
use perazzo::aglib::{hess_det, slp_socle3};
use perazzo::families::perazzo_p4;
use perazzo::poly::parse;

fn main() -> perazzo::Result<()> {
    let cubics = [
        ("Perazzo cubic", perazzo_p4()),
        ("Fermat cubic", parse("x0^3 + x1^3 + x2^3", 3)?),
        ("a cone", parse("x0*x1^2", 3)?),
    ];
    for (name, f) in cubics {
        let r = slp_socle3(&f)?;
        println!("{name}: {f}");
        println!("  hess = {}", hess_det(&f)?);
        println!("  cone {}, hilbert {:?}, slp {:?}", r.is_cone, r.hilbert, r.slp);
    }
    Ok(())
}
