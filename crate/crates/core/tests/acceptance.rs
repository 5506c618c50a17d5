//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ffpl::blocklu::{block_lu, flatten_lattice, is_sharp, lattice_rep, lcm, to_omega_rep};
use ffpl::enumerate::{enum_by_duality, enum_primitive, EnumSpec, Shard, DEFAULT_BUDGET};
use ffpl::harness::{run_counting, run_triple, triple_direct, triple_group, ExperimentParams};
use ffpl::latmod::{
    dual_lattice, factor_lattice, orthogonal_lattice, undual, MatK, PartialLattice,
};
use ffpl::measures::{index_gamma_i, oracle, reduction_index, zeta_k};
use ffpl::scalars::text::{format_matrix, parse_matrix};
use ffpl::scalars::{factor_monic, q_pow, Fq, IdealR, Poly, RatFun, Rational};
use ffpl::shapes::{
    shape_classes, shape_mass_partial_sum, shape_mass_tail_bound, stabilizer_order_bruteforce,
    stabilizer_order_u128,
};

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn census(q: u32, big_d: usize, d: usize, e: i64) -> Vec<PartialLattice> {
    enum_primitive(
        &EnumSpec::new(q, big_d, d, e).unwrap(),
        Shard::ALL,
        DEFAULT_BUDGET,
    )
    .unwrap()
}

const CENSUSES: [(u32, usize, usize, i64, usize); 3] =
    [(2, 2, 1, 1, 6), (3, 2, 1, 1, 24), (2, 3, 1, 2, 336)];

// ---- criterion 1 ----

fn rand_poly(rng: &mut ChaCha8Rng, f: Fq, max_deg: usize) -> Poly {
    Poly::new(
        f,
        (0..=max_deg)
            .map(|_| rng.gen_range(0..f.q()) as u8)
            .collect(),
    )
}

fn rand_ratfun(rng: &mut ChaCha8Rng, f: Fq) -> RatFun {
    let num = rand_poly(rng, f, 2);
    let k = rng.gen_range(0..=2);
    let mut den = Poly::monomial(f, 1, k);
    if k > 0 {
        den = &den + &rand_poly(rng, f, k - 1);
    }
    RatFun::new(num, den).unwrap()
}

/// Matrix over `F_q[Y^{-1}]` with invertible constant term, so `nu(det) = 0`.
fn rand_o_unit(rng: &mut ChaCha8Rng, f: Fq, k: usize) -> MatK {
    loop {
        let mut m = MatK::from_fn(f, k, k, |_, _| RatFun::zero(f));
        for i in 0..k {
            for j in 0..k {
                let mut x = RatFun::zero(f);
                for e in 0..3 {
                    let c = rng.gen_range(0..f.q()) as u8;
                    x = &x + &RatFun::y_pow(f, -e).scale(c);
                }
                m[(i, j)] = x;
            }
        }
        let c0 = m.map(|x| {
            RatFun::constant(
                f,
                x.as_poly()
                    .map(|p| p.coeff(0))
                    .unwrap_or_else(|| leading_at_zero(x)),
            )
        });
        if !c0.det().is_zero() {
            return m;
        }
    }
}

/// Constant term of an element of `F_q[Y^{-1}]`.
fn leading_at_zero(x: &RatFun) -> u8 {
    // x = P / Y^k with deg P <= k; the constant term is the coefficient of Y^k in P
    let k = x.den().degree().unwrap();
    x.num().coeff(k)
}

fn rand_sl_r(rng: &mut ChaCha8Rng, f: Fq, k: usize) -> MatK {
    let mut m = MatK::identity(f, k);
    if k == 1 {
        return m;
    }
    for _ in 0..3 {
        let i = rng.gen_range(0..k);
        let mut j = rng.gen_range(0..k);
        while j == i {
            j = rng.gen_range(0..k);
        }
        let p = RatFun::from_poly(rand_poly(rng, f, 1));
        m.add_row_multiple(i, j, &p);
    }
    m
}

fn criterion_1() -> Outcome {
    let g = parse_matrix("q=2; [[[0,1],[1]],[[1],[]]]").unwrap();
    let lu = block_lu(&g, 1).map_err(|e| e.to_string())?;
    let want = |s: &str| parse_matrix(s).unwrap();
    ensure(
        lu.u_minus == want("q=2; [[[1],[]],[[1]/[0,1],[1]]]")
            && lu.g_bar.is_identity()
            && lu.g_under.is_identity()
            && lu.z == want("q=2; [[[0,1],[]],[[],[1]/[0,1]]]")
            && lu.u_plus == want("q=2; [[[1],[1]/[0,1]],[[],[1]]]")
            && lu.reassemble() == g,
        "worked 2x2 example factorization differs",
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let trials = 10_000;
    for trial in 0..trials {
        let q = if trial % 2 == 0 { 2 } else { 3 };
        let f = Fq::new(q).unwrap();
        let big_d = rng.gen_range(2..=3);
        let d = rng.gen_range(1..big_d);
        let n = big_d - d;
        let ell = lcm(d, n) as i64;
        let t: i64 = rng.gen_range(-2..=2);
        let v = -ell * t;
        let mut lower = MatK::from_fn(f, n, d, |_, _| RatFun::zero(f));
        for i in 0..n {
            for j in 0..d {
                lower[(i, j)] = rand_ratfun(&mut rng, f);
            }
        }
        let mut upper = MatK::from_fn(f, d, n, |_, _| RatFun::zero(f));
        for i in 0..d {
            for j in 0..n {
                upper[(i, j)] = rand_ratfun(&mut rng, f);
            }
        }
        let g_bar = rand_o_unit(&mut rng, f, d);
        let mut g_under = rand_sl_r(&mut rng, f, n);
        let inv_det = g_bar.det().inv().unwrap();
        for j in 0..n {
            g_under[(0, j)] = &g_under[(0, j)] * &inv_det;
        }
        let (id_d, id_n) = (MatK::identity(f, d), MatK::identity(f, n));
        let zdn = MatK::from_fn(f, d, n, |_, _| RatFun::zero(f));
        let znd = MatK::from_fn(f, n, d, |_, _| RatFun::zero(f));
        let u_minus = MatK::from_blocks(&id_d, &zdn, &lower, &id_n);
        let u_plus = MatK::from_blocks(&id_d, &upper, &znd, &id_n);
        let g_dd = MatK::from_blocks(&g_bar, &zdn, &znd, &g_under);
        let z = MatK::from_fn(f, big_d, big_d, |i, j| match (i == j, i < d) {
            (false, _) => RatFun::zero(f),
            (true, true) => RatFun::y_pow(f, -v / d as i64),
            (true, false) => RatFun::y_pow(f, v / n as i64),
        });
        let g = &(&(&u_minus * &g_dd) * &z) * &u_plus;
        let lu =
            block_lu(&g, d).map_err(|e| format!("trial {trial}: {e} on {}", format_matrix(&g)))?;
        ensure(
            lu.u_minus == u_minus
                && lu.g_bar == g_bar
                && lu.g_under == g_under
                && lu.z == z
                && lu.u_plus == u_plus
                && lu.level == t
                && lu.reassemble() == g,
            format!("trial {trial}: factors differ for {}", format_matrix(&g)),
        )?;
    }
    Ok(format!(
        "worked example exact; {trials} random products decomposed and reassembled exactly"
    ))
}

// ---- criterion 2 ----

fn mobius(g: &Poly) -> i64 {
    let fs = factor_monic(g);
    if fs.iter().any(|(_, e)| *e > 1) {
        0
    } else if fs.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Primitive rank-1 lattices with covolume exponent exactly `e`, by Moebius
/// inversion over the gcd of the coordinates.
fn rank_one_count(q: u32, big_d: usize, e: i64) -> BigInt {
    let f = Fq::new(q).unwrap();
    // nonzero coprime tuples with all degrees <= m
    let coprime = |m: i64| -> BigInt {
        if m < 0 {
            return BigInt::zero();
        }
        let mut s = BigInt::zero();
        for k in 0..=m as usize {
            for g in Poly::monic_of_degree(f, k) {
                let tuples = BigInt::from(q).pow(((m as usize - k + 1) * big_d) as u32) - 1;
                s += tuples * mobius(&g);
            }
        }
        s
    };
    (coprime(e) - coprime(e - 1)) / (q - 1)
}

fn criterion_2() -> Outcome {
    let mut detail = Vec::new();
    for (q, big_d, d, e, want) in CENSUSES {
        let mut a = census(q, big_d, d, e);
        ensure(
            a.len() == want,
            format!(
                "q={q} D={big_d} d={d} exp={e}: {} lattices, want {want}",
                a.len()
            ),
        )?;
        let oracle = rank_one_count(q, big_d, e);
        ensure(
            oracle == BigInt::from(want),
            format!("inclusion-exclusion gives {oracle}, want {want}"),
        )?;
        let uniq: BTreeSet<_> = a.iter().cloned().collect();
        ensure(uniq.len() == a.len(), "duplicate lattices")?;
        // duality for the rank D-1 census
        let spec = EnumSpec::new(q, big_d, big_d - 1, e).unwrap();
        let mut dual = enum_by_duality(&spec, Shard::ALL, DEFAULT_BUDGET).unwrap();
        let mut direct = enum_primitive(&spec, Shard::ALL, DEFAULT_BUDGET).unwrap();
        dual.sort();
        direct.sort();
        ensure(
            dual == direct && dual.len() == want,
            format!("duality census differs at q={q} D={big_d}"),
        )?;
        a.sort();
        detail.push(format!("{want}"));
    }
    Ok(format!(
        "censuses {} match, duality reproduces each",
        detail.join("/")
    ))
}

// ---- criterion 3 ----

fn criterion_3() -> Outcome {
    let want = [
        (4u64, Rational::new(2.into(), 3.into())),
        (18, Rational::new(3.into(), 4.into())),
        (192, Rational::new(4.into(), 7.into())),
    ];
    let mut detail = Vec::new();
    for ((q, big_d, d, e, total), (flat, c1)) in CENSUSES.into_iter().zip(want) {
        let ls = census(q, big_d, d, e);
        let sharp = ls.iter().filter(|l| is_sharp(l)).count() as u64;
        let frac = Rational::new(BigInt::from(sharp), BigInt::from(ls.len()));
        let c1_formula = ffpl::measures::c1(d as u32, (big_d - d) as u32, q);
        ensure(
            sharp == flat && frac == c1 && c1_formula == c1,
            format!("q={q} D={big_d}: flat {sharp}/{total}, c1 {c1_formula}"),
        )?;
        detail.push(format!("{sharp}/{total}={frac}"));
    }
    Ok(detail.join(", "))
}

// ---- criterion 4 ----

fn criterion_4() -> Outcome {
    let r = run_counting(&ExperimentParams::new(2, 2, 1, 5).unwrap()).map_err(|e| e.to_string())?;
    let pred = Rational::new(3.into(), 2.into());
    let mut counts = Vec::new();
    for l in &r.levels {
        counts.push(l.total.to_string());
    }
    let last = r.level(5).ok_or("level 5 missing")?;
    let ratio = (&last.c_hat / &pred).to_f64().unwrap();
    let predicted = r
        .ratios
        .iter()
        .find(|x| x.i == 5 && x.reference == "predicted_total")
        .ok_or("ratio row missing")?;
    ensure(
        predicted.reference_value == pred,
        format!(
            "closed-form prediction {} != 3/2",
            predicted.reference_value
        ),
    )?;
    ensure((ratio - 1.0).abs() <= 0.02, format!("ratio {ratio} at i=5"))?;
    Ok(format!(
        "N_i = {}; fitted/predicted at i=5 = {ratio}",
        counts.join(",")
    ))
}

// ---- criterion 5 ----

fn criterion_5() -> Outcome {
    let s = shape_mass_partial_sum(2, 2, 12);
    let tail = shape_mass_tail_bound(2, 2, 12);
    let third = Rational::new(1.into(), 3.into());
    let gap = (&third - &s).abs();
    ensure(
        tail <= q_pow(2, -24),
        format!("tail bound {tail} exceeds 2^-24"),
    )?;
    ensure(gap <= tail, format!("|1/3 - S| = {gap} > tail {tail}"))?;
    let mut checked = 0;
    for q in [2, 3] {
        for k in 1..=3 {
            for c in shape_classes(k, 3) {
                let brute = stabilizer_order_bruteforce(&c, q).map_err(|e| e.to_string())?;
                ensure(
                    Some(brute) == stabilizer_order_u128(&c, q),
                    format!("stabilizer of {c} at q={q}: brute {brute}"),
                )?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "S_12 = {s}, |1/3 - S_12| = {gap} <= {tail}; {checked} stabilizers match brute force"
    ))
}

// ---- criterion 6 ----

fn criterion_6() -> Outcome {
    let r = run_triple(&ExperimentParams::new(2, 3, 1, 3).unwrap()).map_err(|e| e.to_string())?;
    let tvs: Vec<Rational> = (1..=3)
        .map(|i| {
            r.level(i)
                .and_then(|l| l.tv.get("shperp").cloned())
                .ok_or(format!("TV missing at i={i}"))
        })
        .collect::<std::result::Result<_, _>>()?;
    let shown: Vec<String> = tvs
        .iter()
        .map(|t| format!("{:.6}", t.to_f64().unwrap()))
        .collect();
    ensure(
        tvs.windows(2).all(|w| w[1] < w[0]),
        format!("TV not strictly decreasing: {}", shown.join(", ")),
    )?;
    Ok(format!("TV(sh perp) for i=1..3: {}", shown.join(", ")))
}

// ---- criterion 7 ----

fn criterion_7() -> Outcome {
    for q in [2, 3, 4] {
        for i in 1..=6i64 {
            let lhs = zeta_k(-i, q).unwrap();
            let rhs = q_pow(q, -(1 + 2 * i)) * zeta_k(1 + i, q).unwrap();
            ensure(
                lhs == rhs && lhs.is_positive(),
                format!("functional equation fails at q={q} i={i}"),
            )?;
        }
    }
    let f2 = Fq::new(2).unwrap();
    let y = IdealR::new(Poly::y(f2)).unwrap();
    let idx = index_gamma_i(1, 1, &y);
    ensure(
        idx == Rational::from_integer(3.into()) && oracle::index_gamma_i(1, 1, &y) == idx,
        format!("index {idx}"),
    )?;
    for big_d in 1..=3u32 {
        for q in [2, 3] {
            let brute = oracle::sl_order(big_d as usize, q).unwrap();
            ensure(
                reduction_index(big_d, q, 1) == Rational::from_integer(brute.into()),
                format!("reduction index D={big_d} q={q} vs {brute}"),
            )?;
        }
    }
    let mut lattices = 0;
    for (q, big_d, d, e) in [(2, 2, 1, 1), (3, 2, 1, 1), (2, 3, 1, 2), (2, 3, 2, 2)] {
        for l in census(q, big_d, d, e) {
            let perp = orthogonal_lattice(&l).map_err(|x| x.to_string())?;
            ensure(
                perp.covol_exp() == l.covol_exp(),
                format!("orthogonal covolume differs for {l:?}"),
            )?;
            ensure(
                orthogonal_lattice(&perp).ok() == Some(l.clone()),
                format!("(L^perp)^perp != L for {l:?}"),
            )?;
            let dual = dual_lattice(&l).map_err(|x| x.to_string())?;
            ensure(
                dual.covol_exp == -l.covol_exp(),
                format!("dual covolume wrong for {l:?}"),
            )?;
            ensure(
                undual(&dual).ok() == Some(l.clone()),
                format!("dual of dual differs for {l:?}"),
            )?;
            let fac = factor_lattice(&l).map_err(|x| x.to_string())?;
            ensure(
                fac.covol_exp == -l.covol_exp(),
                format!("factor covolume wrong for {l:?}"),
            )?;
            lattices += 1;
        }
    }
    Ok(format!(
        "zeta, index, |SL_D(F_q)| exact; orthogonal/dual/factor identities on {lattices} lattices"
    ))
}

// ---- criterion 8 ----

fn criterion_8() -> Outcome {
    let mut total = 0;
    let mut nonsharp = 0;
    for (q, big_d, d, e, _) in CENSUSES {
        let ls = census(q, big_d, d, e);
        let mut reps = BTreeSet::new();
        for l in &ls {
            let a = triple_direct(l, 3).map_err(|x| x.to_string())?;
            let b = triple_group(l, 3).map_err(|x| x.to_string())?;
            ensure(
                a == b,
                format!("pipelines disagree on {l:?}: {a:?} vs {b:?}"),
            )?;
            let m = if is_sharp(l) {
                l.clone()
            } else {
                nonsharp += 1;
                flatten_lattice(l).map_err(|x| x.to_string())?.1
            };
            let (g, _) = to_omega_rep(&m).map_err(|x| x.to_string())?;
            ensure(
                lattice_rep(&g, d).ok() == Some(m.clone()),
                format!("Lambda_g != Lambda for {m:?}"),
            )?;
            if is_sharp(l) {
                reps.insert(format_matrix(&g));
            }
        }
        let sharp = ls.iter().filter(|l| is_sharp(l)).count();
        ensure(
            reps.len() == sharp,
            format!("canonical representatives collide at q={q} D={big_d}"),
        )?;
        total += ls.len();
    }
    Ok(format!(
        "{total} lattices ({nonsharp} flattened first): group route = direct route"
    ))
}

// ---- criterion 9 ----

fn criterion_9() -> Outcome {
    let mut detail = Vec::new();
    for (q, big_d, i_max, want_total, want_flat) in [
        (
            3u32,
            2usize,
            2u32,
            Rational::from_integer(2.into()),
            Rational::new(1.into(), 2.into()),
        ),
        (
            2,
            3,
            1,
            Rational::new(1.into(), 3.into()),
            Rational::new(1.into(), 3.into()),
        ),
    ] {
        let r = run_counting(&ExperimentParams::new(q, big_d, 1, i_max).unwrap())
            .map_err(|e| e.to_string())?;
        let json = r.to_json();
        for (quantity, reference, want) in [
            ("total", "predicted_total", &want_total),
            ("flat", "predicted_flat", &want_flat),
        ] {
            for row in r.ratios.iter().filter(|x| x.reference == reference) {
                ensure(row.quantity == quantity, "ratio row mislabeled")?;
                ensure(
                    &row.ratio == want && row.unit_factor.is_some() && !row.ratio.is_one(),
                    format!(
                        "q={q} D={big_d} i={}: {reference} ratio {} ({:?})",
                        row.i, row.ratio, row.unit_factor
                    ),
                )?;
                ensure(
                    row.fitted != row.reference_value,
                    "fitted value silently replaced",
                )?;
            }
            let first = r.ratios.iter().find(|x| x.reference == reference).unwrap();
            detail.push(format!(
                "q={q},D={big_d} {quantity}: fitted {} vs closed form {} = {}",
                first.fitted,
                first.reference_value,
                first.unit_factor.as_deref().unwrap()
            ));
        }
        let rows = json["ratios"].as_array().ok_or("no ratio table in JSON")?;
        ensure(
            rows.iter()
                .all(|x| x.get("reference_value").is_some() && x.get("fitted").is_some()),
            "JSON ratio table lacks closed-form or fitted values",
        )?;
    }
    Ok(detail.join("; "))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 9] = [
        (
            1,
            "block-LU roundtrip",
            criterion_1,
            Duration::from_secs(30),
        ),
        (2, "census exactness", criterion_2, Duration::from_secs(10)),
        (
            3,
            "flat fractions equal c_1",
            criterion_3,
            Duration::from_secs(60),
        ),
        (
            4,
            "q=2 D=2 counting constant",
            criterion_4,
            Duration::from_secs(120),
        ),
        (
            5,
            "shape-mass consistency",
            criterion_5,
            Duration::from_secs(60),
        ),
        (
            6,
            "shape equidistribution trend",
            criterion_6,
            Duration::from_secs(300),
        ),
        (
            7,
            "exact identity suite",
            criterion_7,
            Duration::from_secs(120),
        ),
        (
            8,
            "two-pipeline agreement",
            criterion_8,
            Duration::from_secs(120),
        ),
        (
            9,
            "discrepancy report",
            criterion_9,
            Duration::from_secs(120),
        ),
    ];
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (n, name, f, limit) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > limit => Err(format!("{d}; took {took:.1?}, limit {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(d) => println!("criterion {n} ({name}): PASS [{took:.1?}] {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL [{took:.1?}] {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
