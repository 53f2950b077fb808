//! Rank of the differential of det Hess at the special cubic in P^6.
use perazzo::poly::parse;
use perazzo::tangent::{delta_sets_independent, df_rank, maximal_rank_bound, maximal_special_point};

fn main() -> perazzo::Result<()> {
    let f = parse("1/2*(x0*x4^2 + x1*x5^2 + x2*x6^2 + x3*(x4+x5+x6)*(x4+x5+x6))", 7)?;
    let (rank, dim) = df_rank(&f)?;
    println!("rank {rank}, tangent dimension {dim}");
    for k in 2..=3 {
        let (r, _) = df_rank(&maximal_special_point(k)?)?;
        println!("k = {k}: rank {r} >= {}", maximal_rank_bound(k));
    }
    for n in 3..=5 {
        println!("n = {n}: A and B independent {:?}", delta_sets_independent(n)?);
    }
    Ok(())
}
