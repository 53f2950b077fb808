//! Intersection numbers on Grassmannians and a two-step flag bundle.
use perazzo::chow::Tower;

fn main() -> perazzo::Result<()> {
    let pt = Tower::point();
    let (g, _s, q) = pt.flag_bundle(2, 2, &pt.trivial(4))?;
    let c1 = q.chern().homogeneous_part(1);
    let c1_4 = &(&c1 * &c1) * &(&c1 * &c1);
    println!("G(2,4): betti {:?}, chi {}, deg c1(Q)^4 = {}", g.betti_numbers(), g.euler_characteristic(), g.integral(&c1_4)?);

    let (g1, _, q1) = pt.flag_bundle(2, 4, &pt.trivial(6))?;
    let (f, _, _) = g1.flag_bundle(1, 3, &q1)?;
    println!("F(2,3;6): dim {}, betti {:?}, chi {}", f.dim(), f.betti_numbers(), f.euler_characteristic());

    let sym = q.sym2();
    println!("c(Sym^2 Q) = {}", sym.chern());
    println!("s(Q) = {}", q.segre_class());
    Ok(())
}
