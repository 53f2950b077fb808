//! Seeded members of the minimal and maximal families with their checks.
use perazzo::aglib::slp_socle3;
use perazzo::families::{family_dimension, in_ideal_square, sample, FamilyKind, FamilySpec};

fn main() -> perazzo::Result<()> {
    for (kind, n) in [(FamilyKind::Minimal, 5), (FamilyKind::Maximal, 6), (FamilyKind::MinimalCone3, 6)] {
        let spec = FamilySpec::new(kind, n)?;
        let f = sample(&spec, 42)?;
        let r = slp_socle3(&f)?;
        println!("{kind} in P^{n}: {f}");
        println!(
            "  cone {}, hess zero {}, hilbert {:?}, in I^2 {}, dimension {:?}",
            r.is_cone,
            r.hess_zero,
            r.hilbert,
            in_ideal_square(&f, &spec.plane_ideal_vars())?,
            family_dimension(kind, n).ok()
        );
    }
    Ok(())
}
