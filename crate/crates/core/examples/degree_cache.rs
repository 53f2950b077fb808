//! The content-addressed degree cache.
use perazzo::degrees::{DegreeCache, DegreeFamily};

fn main() -> perazzo::Result<()> {
    let dir = std::env::temp_dir().join("perazzo-example-cache");
    let cache = DegreeCache::new(&dir);
    for _ in 0..2 {
        let (r, hit) = cache.get_or_compute(DegreeFamily::Max, 3)?;
        println!("degree {} (from cache: {hit})", r.degree);
    }
    println!("key {}", DegreeCache::key(DegreeFamily::Max, 3));
    Ok(())
}
