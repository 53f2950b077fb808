//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output.

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use perazzo::aglib::{
    coordinate_subspace, hess_det, hessian, hilbert_function, is_cone, is_nilpotent_index3, jordan_partition,
    jordan_type, rank_profile, Partition,
};
use perazzo::chow::{integral_integer, RingElement, Tower};
use perazzo::degrees::{compute, DegreeFamily};
use perazzo::families::{minimal_delta_witness, sample, FamilyKind, FamilySpec};
use perazzo::poly::{parse, rat, Polynomial, Rational};
use perazzo::tangent::{delta_sets_independent, df_rank};

/// Wall-clock limits per criterion.
const LIMIT_DEGREE_MIN5: Duration = Duration::from_secs(60);
const LIMIT_DEGREE: Duration = Duration::from_secs(600);
const LIMIT_TANGENT_INSTANCE: Duration = Duration::from_secs(300);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn degree_check(runs: &[(DegreeFamily, u32, u64)], limit: Duration) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for &(family, p, expected) in runs {
        let t = Instant::now();
        match compute(family, p) {
            Ok(r) => {
                let el = t.elapsed();
                let ok = r.degree == BigInt::from(expected) && el <= limit;
                pass &= ok;
                detail.push(format!("{family}({p}) = {} in {:.2?}", r.degree, el));
            }
            Err(e) => {
                pass = false;
                detail.push(format!("{family}({p}) failed: {e}"));
            }
        }
    }
    outcome(pass, detail.join("; "))
}

fn criterion_6() -> Outcome {
    let dim = |f, p| compute(f, p).map(|r| r.dim as i64);
    let run = || -> perazzo::Result<(bool, String)> {
        let (m5, m6, x3) = (dim(DegreeFamily::Min, 5)?, dim(DegreeFamily::Min, 6)?, dim(DegreeFamily::Max, 3)?);
        let (mc5, mc6, xc3) = (
            dim(DegreeFamily::MinCones, 5)?,
            dim(DegreeFamily::MinCones, 6)?,
            dim(DegreeFamily::MaxCones, 3)?,
        );
        let ok = m5 == 29 && m6 == 44 && x3 == 45 && mc5 == m5 - 1 && mc6 == m6 - 1 && x3 - xc3 == 3;
        Ok((
            ok,
            format!("min 5/6 = {m5}/{m6}, max 3 = {x3}, min-cones 5/6 = {mc5}/{mc6}, max-cones 3 codim = {}", x3 - xc3),
        ))
    };
    match run() {
        Ok((p, d)) => outcome(p, d),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_7() -> perazzo::Result<Outcome> {
    let f = parse("1/2*(x0*x4^2 + x1*x5^2 + x2*x6^2 + x3*(x4+x5+x6)*(x4+x5+x6))", 7)?;
    let t = Instant::now();
    let (rank, dim) = df_rank(&f)?;
    let mut pass = rank == 38 && dim == 45 && t.elapsed() <= LIMIT_TANGENT_INSTANCE;
    let mut worst = (0, usize::MAX);
    let spec = FamilySpec::new(FamilyKind::Minimal, 5)?;
    for seed in 0..5 {
        let g = sample(&spec, seed)?;
        let t = Instant::now();
        let (r, d) = df_rank(&g)?;
        pass &= r <= 21 && d > 29 && t.elapsed() <= LIMIT_TANGENT_INSTANCE;
        worst = (worst.0.max(r), worst.1.min(d));
    }
    Ok(outcome(
        pass,
        format!(
            "special point rank {rank}, tangent dim {dim}; 5 minimal P^5 samples: max rank {}, min tangent dim {}",
            worst.0, worst.1
        ),
    ))
}

fn partition_ok(f: &Polynomial, l: &[Rational], rank: usize) -> perazzo::Result<bool> {
    let (r, p) = jordan_type(f, l)?;
    Ok(r == rank && p == jordan_partition(rank, f.num_vars()) && p.size() as usize == 2 * f.num_vars() + 2)
}

fn criterion_8() -> perazzo::Result<Outcome> {
    let mut fails = 0;
    let whole = coordinate_subspace(7, 0..7);
    let min_spec = FamilySpec::new(FamilyKind::Minimal, 6)?;
    for seed in 0..20 {
        let f = sample(&min_spec, seed)?;
        let generic = rank_profile(&f, &whole, 5, seed)?;
        let plane = rank_profile(&f, &coordinate_subspace(7, 0..3), 5, seed)?;
        let w = minimal_delta_witness(&f)?.expect("independent g_i");
        let ok = generic.dominant() == Some(6)
            && plane.dominant() == Some(2)
            && partition_ok(&f, &w, 1)?
            && partition_ok(&f, &[rat(1), rat(2), rat(3), rat(5), rat(7), rat(11), rat(13)], 6)?;
        fails += usize::from(!ok);
    }
    let max_spec = FamilySpec::new(FamilyKind::Maximal, 6)?;
    for seed in 0..20 {
        let f = sample(&max_spec, seed)?;
        let generic = rank_profile(&f, &whole, 5, seed)?;
        let plane = rank_profile(&f, &coordinate_subspace(7, 0..4), 5, seed)?;
        let ok = generic.dominant() == Some(6)
            && plane.dominant() == Some(3)
            && partition_ok(&f, &[rat(1), rat(-1), rat(2), rat(3), rat(0), rat(0), rat(0)], 3)?;
        fails += usize::from(!ok);
    }
    let example = Partition::new(vec![4, 2, 2, 2, 2, 2, 1, 1]);
    let formula_ok = jordan_partition(6, 7) == example;
    Ok(outcome(
        fails == 0 && formula_ok,
        format!("40 samples, {fails} failures; generic type {}", jordan_partition(6, 7)),
    ))
}

fn criterion_9() -> perazzo::Result<Outcome> {
    let mut fails = 0;
    let mut total = 0;
    let runs = [
        (FamilyKind::Minimal, 4),
        (FamilyKind::Minimal, 5),
        (FamilyKind::Minimal, 6),
        (FamilyKind::Maximal, 4),
        (FamilyKind::Maximal, 6),
    ];
    for (kind, n) in runs {
        let spec = FamilySpec::new(kind, n)?;
        let block = spec.zstar_span_vars();
        for seed in 0..100 {
            let f = sample(&spec, 1000 + seed)?;
            let h = hessian(&f)?;
            let sparse = block.iter().all(|&i| block.iter().all(|&j| h.get(i, j).is_zero()));
            let ok = hess_det(&f)?.is_zero()
                && !is_cone(&f)?
                && hilbert_function(&f)? == vec![1, n + 1, n + 1, 1]
                && sparse;
            fails += usize::from(!ok);
            total += 1;
        }
    }
    Ok(outcome(
        fails == 0,
        format!("{total} samples (minimal N=4,5,6; maximal N=4,6, odd N has no maximal family), {fails} failures"),
    ))
}

fn power(x: &RingElement, k: usize) -> RingElement {
    (0..k).fold(x.tower().one(), |acc, _| &acc * x)
}

/// Standard Young tableaux of an `a x b` rectangle, by the hook length formula.
fn rectangle_syt(a: usize, b: usize) -> BigInt {
    let num: BigInt = (1..=a * b).map(BigInt::from).product();
    let hooks: BigInt = (0..a)
        .flat_map(|i| (0..b).map(move |j| BigInt::from((a - i) + (b - j) - 1)))
        .product();
    num / hooks
}

fn criterion_10() -> perazzo::Result<Outcome> {
    let mut failures: Vec<&str> = Vec::new();
    let pt = Tower::point();
    let (g, s, q) = pt.flag_bundle(2, 3, &pt.trivial(5))?;
    let e = s.sym2().tensor(&q)?.sum(&q.wedge2())?;
    let f = s.dual().tensor(&s)?;

    // c(E^dual) s(E) = 1, and c(E) c(E)^{-1} = 1
    if &e.dual().chern() * &e.segre_class() != g.one() || &e.chern() * &e.chern().inverse()? != g.one() {
        failures.push("c*s");
    }
    // Whitney
    if &s.chern() * &q.chern() != g.one() || e.sum(&f)?.chern() != &e.chern() * &f.chern() {
        failures.push("whitney");
    }
    // ch is a ring map and commutes with duality
    let ch_sum = e.sum(&f)?.chern_character();
    let ch_tensor = e.tensor(&f)?.chern_character();
    let ch_dual = e.dual().chern_character();
    let dual_ok = (0..=g.dim()).all(|m| {
        let sign = if m % 2 == 0 { rat(1) } else { rat(-1) };
        ch_dual.homogeneous_part(m) == e.chern_character().homogeneous_part(m).scale(&sign)
    });
    if ch_sum != &e.chern_character() + &f.chern_character()
        || ch_tensor != &e.chern_character() * &f.chern_character()
        || !dual_ok
    {
        failures.push("ch ring map");
    }
    // Adams scaling
    let psi = e.adams(2).chern_character();
    let adams_ok = (0..=g.dim()).all(|m| {
        psi.homogeneous_part(m) == e.chern_character().homogeneous_part(m).scale(&rat(1 << m))
    });
    if !adams_ok {
        failures.push("adams");
    }
    // integrality: pipelines and every top Segre/Chern number on G(2,5)
    for (fam, p) in [(DegreeFamily::Min, 5), (DegreeFamily::Max, 2), (DegreeFamily::MaxCones, 2)] {
        if compute(fam, p).is_err() {
            failures.push("pipeline integrality");
        }
    }
    for sheaf in [&e, &f, &e.difference(&f)?, &q.sym3()] {
        if integral_integer(&g, &sheaf.segre(g.dim())?).is_err() {
            failures.push("segre integrality");
        }
    }
    // Euler characteristics
    for n in 1..=6 {
        let (pn, _, _) = pt.flag_bundle(1, n, &pt.trivial(n + 1))?;
        if *pn.euler_characteristic() != BigInt::from(n + 1) || pn.betti_numbers().iter().sum::<usize>() != n + 1 {
            failures.push("chi(P^n)");
        }
    }
    let (g24, _, q24) = pt.flag_bundle(2, 2, &pt.trivial(4))?;
    if *g24.euler_characteristic() != BigInt::from(6) {
        failures.push("chi(G(2,4))");
    }
    let (g26, _, q26) = pt.flag_bundle(2, 4, &pt.trivial(6))?;
    let (fl, _, _) = g26.flag_bundle(1, 3, &q26)?;
    if *fl.euler_characteristic() != BigInt::from(60) || fl.betti_numbers().iter().sum::<usize>() != 60 {
        failures.push("chi(F(2,3;6))");
    }
    // degree of the Pluecker embedding against the hook length formula
    let c1 = q24.chern().homogeneous_part(1);
    let plucker = g24.integral(&power(&c1, 4))?;
    if plucker != Rational::from_integer(rectangle_syt(2, 2)) || plucker != rat(2) {
        failures.push("G(2,4) c1^4");
    }
    for (a, n) in [(2, 5), (3, 6)] {
        let (gr, _, qr) = pt.flag_bundle(a, n - a, &pt.trivial(n))?;
        let h = qr.chern().homogeneous_part(1);
        if gr.integral(&power(&h, gr.dim()))? != Rational::from_integer(rectangle_syt(a, n - a)) {
            failures.push("Grassmannian degrees");
        }
    }
    for n in 3..=5 {
        if delta_sets_independent(n)? != (true, true) {
            failures.push("delta sets");
        }
    }
    Ok(outcome(
        failures.is_empty(),
        if failures.is_empty() {
            "c(E^dual)s(E)=1, Whitney, ch ring map, Adams, integrality, chi, c1(Q)^4 = 2 = #SYT(2x2), delta sets n=3..5".to_string()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    ))
}

fn criterion_11() -> perazzo::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut agree = 0;
    let mut nilpotent = 0;
    let kinds = [(FamilyKind::Minimal, 5), (FamilyKind::Maximal, 6), (FamilyKind::PerazzoP4, 4)];
    for i in 0..100u64 {
        let (kind, n) = kinds[(i % 3) as usize];
        let f = sample(&FamilySpec::new(kind, n)?, i)?;
        let nv = f.num_vars();
        let l: Vec<Rational> = loop {
            // half the forms are drawn inside <Z*>, where f vanishes to high order
            let span = FamilySpec::new(kind, n)?.zstar_span_vars();
            let v: Vec<Rational> = (0..nv)
                .map(|j| {
                    if i % 2 == 0 && !span.contains(&j) {
                        rat(0)
                    } else {
                        rat(rng.gen_range(-2..=2))
                    }
                })
                .collect();
            if v.iter().any(|c| !c.is_zero()) {
                break v;
            }
        };
        let nil = is_nilpotent_index3(&f, &l)?;
        let value = f.evaluate(&l)? * rat(6);
        agree += usize::from(nil == value.is_zero());
        nilpotent += usize::from(nil);
    }
    Ok(outcome(agree == 100, format!("{agree}/100 agree ({nilpotent} nilpotent)")))
}

fn lift(r: perazzo::Result<Outcome>) -> Outcome {
    r.unwrap_or_else(|e| outcome(false, format!("error: {e}")))
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome + Send + Sync>);

fn main() {
    let start = Instant::now();
    let criteria: Vec<Criterion> = vec![
        (
            "degree_min(5) = 51847992",
            Box::new(|| degree_check(&[(DegreeFamily::Min, 5, 51_847_992)], LIMIT_DEGREE_MIN5)),
        ),
        (
            "degree_min(6) = 229416381544",
            Box::new(|| degree_check(&[(DegreeFamily::Min, 6, 229_416_381_544)], LIMIT_DEGREE)),
        ),
        (
            "degree_max(3) = 5792937080",
            Box::new(|| degree_check(&[(DegreeFamily::Max, 3, 5_792_937_080)], LIMIT_DEGREE)),
        ),
        (
            "degree_min_cones(5), (6) = 98048160, 378294450492",
            Box::new(|| {
                degree_check(
                    &[(DegreeFamily::MinCones, 5, 98_048_160), (DegreeFamily::MinCones, 6, 378_294_450_492)],
                    LIMIT_DEGREE,
                )
            }),
        ),
        (
            "degree_max_cones(3) = 51258091892",
            Box::new(|| degree_check(&[(DegreeFamily::MaxCones, 3, 51_258_091_892)], LIMIT_DEGREE)),
        ),
        ("dimension ledger", Box::new(criterion_6)),
        ("tangent certificate", Box::new(|| lift(criterion_7()))),
        ("Jordan strata", Box::new(|| lift(criterion_8()))),
        ("family sanity", Box::new(|| lift(criterion_9()))),
        ("property suites", Box::new(|| lift(criterion_10()))),
        ("Euler/nilpotent correspondence", Box::new(|| lift(criterion_11()))),
    ];
    let results: Vec<(Outcome, Duration)> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, run)| {
                scope.spawn(move || {
                    let t = Instant::now();
                    let o = run();
                    (o, t.elapsed())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (outcome(false, "panicked"), Duration::ZERO)))
            .collect()
    });
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for (i, ((name, _), (o, el))) in criteria.iter().zip(&results).enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        writeln!(out, "acceptance {:>2} [{tag}] {name}: {} ({:.2?})", i + 1, o.detail, el).unwrap();
    }
    writeln!(
        out,
        "acceptance: {} passed, {failed} failed in {:.2?}",
        criteria.len() - failed,
        start.elapsed()
    )
    .unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
