//! Linear forms of nilpotency index 3: L^3 kills f exactly when f(L) = 0.
use perazzo::aglib::is_nilpotent_index3;
use perazzo::families::perazzo_p4;
use perazzo::poly::rat;

fn main() -> perazzo::Result<()> {
    let f = perazzo_p4();
    for l in [[1, 0, 0, 0, 0], [0, 0, 0, 1, 0], [1, 1, 1, 1, 1]] {
        let point: Vec<_> = l.iter().map(|&v| rat(v)).collect();
        println!("L = {l:?}: f(L) = {}, L^3 f = 0: {}", f.evaluate(&point)?, is_nilpotent_index3(&f, &point)?);
    }
    Ok(())
}
