//! Jordan types of multiplication maps and their rank strata.
use perazzo::aglib::{coordinate_subspace, jordan_type, rank_profile};
use perazzo::families::{sample, FamilyKind, FamilySpec};
use perazzo::poly::rat;

fn main() -> perazzo::Result<()> {
    let spec = FamilySpec::new(FamilyKind::Minimal, 6)?;
    let f = sample(&spec, 7)?;
    println!("f = {f}");

    let generic: Vec<_> = (0..7).map(|i| rat(i as i64 + 1)).collect();
    let (r, p) = jordan_type(&f, &generic)?;
    println!("generic L: rank {r}, type {p}");

    let plane = coordinate_subspace(7, 0..3);
    let profile = rank_profile(&f, &plane, 20, 1)?;
    println!("L in the plane V(x3..x6): {:?}", profile.0);
    Ok(())
}
