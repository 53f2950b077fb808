//! Degrees of the families from Segre classes over flag bundles.
use perazzo::degrees::{compute, DegreeFamily};

fn main() -> perazzo::Result<()> {
    let runs = [
        (DegreeFamily::Min, 5),
        (DegreeFamily::MinCones, 5),
        (DegreeFamily::Max, 3),
        (DegreeFamily::MaxCones, 3),
        (DegreeFamily::Min, 6),
    ];
    for (family, p) in runs {
        let r = compute(family, p)?;
        println!("{family} {}={p}: dim {}, degree {}", family.param_name(), r.dim, r.degree);
    }
    Ok(())
}
