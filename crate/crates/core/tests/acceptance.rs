//! Acceptance gate: eleven criteria, one PASS/FAIL line each.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subfam::bench::{named_suite, rerun, run_bench, BenchOptions};
use subfam::boolean_algebra::{
    count_boolean_algebras, determining_size, determining_subfamily, enumerate_boolean_algebras,
    generates,
};
use subfam::bounds::{
    ab_union_free_value, deletion_scaling, exponents, geometric_refinement_bound, leveled_bound,
    BoundsError,
};
use subfam::constructions::{
    bd_extremal_family, co_singleton_family, erdos_shelah_family, leveled_family, power_set,
    LeveledSpec,
};
use subfam::extraction::{
    binomial_f64, default_probability, deletion_guarantee, deletion_trials, kleitman_extract,
};
use subfam::grid::{
    column_prune, es_grid_bound, grid_equivalence_check, grid_violation, prune_depth, row_sizes,
    to_grid,
};
use subfam::oracle::max_subfamily;
use subfam::search::SearchConfig;
use subfam::turan::{base_case_bound, build_kdk, count_kd2, ex_exact, pullback, turan_bound};
use subfam::{FiniteSet, Property, SetFamily};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, u64);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn exact(f: &SetFamily, p: Property) -> Result<usize, String> {
    let r = max_subfamily(f, p, &SearchConfig::default()).map_err(|e| e.to_string())?;
    ensure(r.proven, format!("oracle did not finish for {p}"))?;
    Ok(r.optimum)
}

fn c1() -> Check {
    let cases = [
        ("uf:2 on es(2)", erdos_shelah_family(2).unwrap(), "uf:2", 3),
        ("bd:2 on 2^[2]", power_set(2).unwrap(), "bd:2", 3),
        (
            "bd:2 on bd-extremal(2,2)",
            bd_extremal_family(2, 2).unwrap(),
            "bd:2",
            5,
        ),
        (
            "abuf:2,2 on co-singleton(5)",
            co_singleton_family(5).unwrap(),
            "abuf:2,2",
            3,
        ),
    ];
    let mut out = Vec::new();
    for (name, f, p, want) in cases {
        let t = Instant::now();
        let got = exact(&f, p.parse().unwrap())?;
        ensure(got == want, format!("{name}: got {got}, want {want}"))?;
        ensure(
            t.elapsed() < Duration::from_secs(1),
            format!("{name}: took {:?}", t.elapsed()),
        )?;
        out.push(format!("{name}={got}"));
    }
    ensure(ab_union_free_value(2, 2) == 3, "a+b-1")?;
    Ok(out.join(", "))
}

fn c2() -> Check {
    let cfg = SearchConfig::default();
    let r = ex_exact(&build_kdk(2, 2).unwrap(), &cfg);
    ensure(
        r.proven && r.optimum == 5,
        format!("ex(K(2,4)) = {}", r.optimum),
    )?;
    ensure(
        (r.optimum as f64) < turan_bound(2, 2) && turan_bound(2, 2) == 6.0,
        "K(2,4) vs 6",
    )?;
    let r3 = ex_exact(&build_kdk(3, 2).unwrap(), &cfg);
    ensure(
        r3.proven && r3.optimum == 12,
        format!("ex(K(3,9)) = {}", r3.optimum),
    )?;
    ensure(
        r3.optimum <= base_case_bound(3) && base_case_bound(3) == 12,
        "K(3,9) vs C(3,2)+9",
    )?;
    ensure(
        (r3.optimum as f64) < turan_bound(3, 2) && turan_bound(3, 2) == 13.5,
        "K(3,9) vs 13.5",
    )?;
    Ok(format!(
        "ex(K(2,4))=5<6, ex(K(3,9))=12<=12<13.5 ({} nodes)",
        r3.nodes
    ))
}

fn c3() -> Check {
    for (k, want) in [(2, 6u64), (3, 108)] {
        let f = bd_extremal_family(k, 2).unwrap();
        let w = count_boolean_algebras(&f, 2);
        let c = count_kd2(&build_kdk(k, 2).unwrap());
        ensure(
            w == want && c == want,
            format!("k={k}: {w} witnesses, {c} copies, want {want}"),
        )?;
    }
    let h = build_kdk(2, 2).unwrap();
    let r = ex_exact(&h, &SearchConfig::default());
    ensure(r.witness.len() == 5, "extremal subgraph size")?;
    let f = bd_extremal_family(2, 2).unwrap();
    let idx = pullback(&f, &h, &r.witness).map_err(|e| e.to_string())?;
    let sub = f.subfamily(&idx).map_err(|e| e.to_string())?;
    ensure(sub.len() == 5, "pullback size")?;
    ensure(Property::BdFree { d: 2 }.holds(&sub), "pullback has a B_2")?;
    Ok("6 and 108 copies; 5-edge pullback is B_2-free".into())
}

fn c4() -> Check {
    let mut out = Vec::new();
    for k in [2, 3] {
        let f = erdos_shelah_family(k).unwrap();
        for a in [2, 3, 4] {
            let v = exact(&f, Property::UnionFree { a })?;
            let bound = es_grid_bound(k, a);
            ensure(v <= bound, format!("k={k} a={a}: {v} > {bound}"))?;
            if a == 2 {
                ensure(v < 2 * k, format!("k={k} a=2: {v} > 2k-1"))?;
            }
            out.push(format!("k{k}a{a}:{v}<={bound}"));
        }
    }
    Ok(out.join(" "))
}

fn c5() -> Check {
    let mut checked = 0;
    for k in 1..=3 {
        let f = erdos_shelah_family(k).unwrap();
        let m = f.len();
        for mask in 0u32..1 << m {
            let sets: Vec<FiniteSet> = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| f.member(i).clone())
                .collect();
            let grid = to_grid(&sets, k).map_err(|e| e.to_string())?;
            for a in [2, 3] {
                let agree = grid_equivalence_check(&sets, k, a).map_err(|e| e.to_string())?;
                ensure(
                    agree,
                    format!("k={k} a={a} mask={mask:b}: grid and definition disagree"),
                )?;
                if grid_violation(&grid, a).is_none() {
                    let rows = row_sizes(&column_prune(&grid, a));
                    ensure(
                        rows.iter().all(|&r| r <= prune_depth(a)),
                        format!("k={k} a={a} mask={mask:b}: pruned rows {rows:?}"),
                    )?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (subfamily, a) pairs agree"))
}

fn c6() -> Check {
    let mut out = Vec::new();
    for (a, k, q) in [(2, 2, 2), (2, 2, 3), (3, 2, 2)] {
        let f = leveled_family(&LeveledSpec::uniform(q, k)).unwrap();
        let v = exact(&f, Property::UnionFree { a })?;
        let bound = leveled_bound(a, k, q);
        ensure(v < bound, format!("(a,k,q)=({a},{k},{q}): {v} >= {bound}"))?;
        out.push(format!("({a},{k},{q}):{v}<{bound}"));
    }
    Ok(out.join(" "))
}

fn c7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..1000 {
        let m = rng.random_range(1..=40);
        let a = rng.random_range(2..=4);
        let antichain = trial % 5 == 0;
        let mut masks = std::collections::BTreeSet::new();
        while masks.len() < m {
            let x: u64 = if antichain {
                // all 5-subsets of [10] form an antichain of 252 sets
                loop {
                    let x = rng.random_range(0u64..1 << 10);
                    if x.count_ones() == 5 {
                        break x;
                    }
                }
            } else {
                rng.random_range(0u64..1 << 10)
            };
            masks.insert(x);
        }
        let f = SetFamily::from_sets(10, masks.into_iter().map(FiniteSet::from_mask).collect())
            .unwrap();
        let r = kleitman_extract(&f, a).map_err(|e| e.to_string())?;
        let floor = ((2.0 * m as f64).sqrt() - 0.5).ceil() as usize;
        ensure(
            r.size() >= floor,
            format!("trial {trial}: size {} < {floor}", r.size()),
        )?;
        ensure(
            Property::UnionFree { a }.holds_on(&f, &r.indices),
            format!("trial {trial}: not union-free"),
        )?;
        if antichain {
            ensure(
                r.size() == m,
                format!("trial {trial}: antichain cut to {}", r.size()),
            )?;
        }
    }
    Ok("1000 families".into())
}

fn c8() -> Check {
    let f = power_set(5).unwrap();
    let m = f.len();
    let p = default_probability(m, 2);
    ensure((p - 0.25).abs() < 1e-12, format!("p = {p}"))?;
    let count = count_boolean_algebras(&f, 2);
    ensure(count == 285, format!("B_2 count {count}"))?;
    let bound = deletion_guarantee(m, 2, p, count as f64);
    let outs = deletion_trials(&f, 2, p, 2024, 200);
    for (t, o) in outs.iter().enumerate() {
        ensure(
            Property::BdFree { d: 2 }.holds_on(&f, o),
            format!("trial {t} keeps a B_2"),
        )?;
    }
    let best = outs.iter().map(Vec::len).max().unwrap();
    let mean = outs.iter().map(Vec::len).sum::<usize>() as f64 / outs.len() as f64;
    ensure(
        best >= bound.ceil() as usize,
        format!("best {best} < ceil({bound})"),
    )?;
    ensure(mean >= 0.9 * bound, format!("mean {mean} < 0.9 * {bound}"))?;
    Ok(format!("best {best}, mean {mean:.3}, bound {bound:.3}"))
}

/// `⌈log₂(d+1)⌉`.
fn min_generators(d: usize) -> usize {
    (1..).find(|&k| (1usize << k) > d).unwrap()
}

fn c9() -> Check {
    let f4 = power_set(4).unwrap();
    let mut out = Vec::new();
    for d in [2, 3] {
        let s = determining_size(d);
        let ws = enumerate_boolean_algebras(&f4, d, None).map_err(|e| e.to_string())?;
        let mut empty = 0;
        ensure(
            ws.len() as f64 <= binomial_f64(f4.len(), s),
            format!("d={d}: {} witnesses > C(16,{s})", ws.len()),
        )?;
        for w in &ws {
            let det = determining_subfamily(w);
            ensure(det.size == s && det.indices.len() == s, "determining size")?;
            let gens: Vec<FiniteSet> = det.indices.iter().map(|&i| f4.member(i).clone()).collect();
            ensure(
                generates(&gens, w),
                format!("d={d}: determining set fails to generate"),
            )?;
            // with a nonempty base every generating set needs 2^|C| - 1 >= d + 1;
            // an empty base is not a region, so there 2^|C| - 1 >= d suffices
            let empty_base = w.atoms[0].is_empty();
            let need = if empty_base { min_generators(d) } else { s };
            let sets = w.sets();
            for r in 1..need {
                for sub in sets.iter().cloned().combinations(r) {
                    ensure(!generates(&sub, w), format!("d={d}: {r} sets generate"))?;
                }
            }
            let smallest = (1..=s)
                .find(|&r| {
                    sets.iter()
                        .cloned()
                        .combinations(r)
                        .any(|sub| generates(&sub, w))
                })
                .unwrap();
            ensure(
                smallest == need,
                format!("d={d}: smallest generating set {smallest}, want {need}"),
            )?;
            if empty_base {
                empty += 1;
            }
        }
        out.push(format!(
            "d={d}: {} witnesses ({empty} with empty base)",
            ws.len()
        ));
    }
    let c3 = count_boolean_algebras(&power_set(3).unwrap(), 2);
    ensure(c3 == 9, format!("B_2 count in 2^[3] = {c3}"))?;
    out.push("2^[3] d=2: 9".into());
    Ok(out.join(", "))
}

fn c10() -> Check {
    ensure(
        exponents(2) == (Ratio::new(2, 3), Ratio::new(2, 3)),
        "exponents(2)",
    )?;
    ensure(
        exponents(3) == (Ratio::new(5, 7), Ratio::new(6, 7)),
        "exponents(3)",
    )?;
    ensure(leveled_bound(2, 2, 2) == 7, "leveled_bound(2,2,2)")?;
    ensure(
        ab_union_free_value(3, 4) == 6 && ab_union_free_value(2, 2) == 3,
        "a+b-1",
    )?;
    ensure(
        geometric_refinement_bound(10, 3) == Err(BoundsError::GeometricUndefined(3)),
        "a=3 accepted",
    )?;
    let ms: Vec<usize> = (6..=16).map(|e| 1usize << e).collect();
    let mut out = Vec::new();
    for (d, limit) in [(2, 3.0 * 2f64.powf(-7.0 / 3.0)), (3, 5.0 / 6.0)] {
        let ratios = deletion_scaling(d, &ms);
        let last = ratios.last().unwrap().1;
        ensure(
            (last - limit).abs() < 0.01 * limit,
            format!("d={d}: ratio {last} vs {limit}"),
        )?;
        // successive ratios settle: relative change shrinks below 1%
        let (a, b) = (ratios[ratios.len() - 2].1, last);
        ensure(
            ((b - a) / b).abs() < 0.01,
            format!("d={d}: ratios still moving"),
        )?;
        out.push(format!("d={d} ratio->{last:.4}"));
    }
    Ok(out.join(", "))
}

fn c11() -> Check {
    let mut out = Vec::new();
    for name in ["b2-small", "uf-es", "empty"] {
        let suite = named_suite(name).map_err(|e| e.to_string())?;
        let first = run_bench(
            &suite,
            &BenchOptions {
                seed: 11,
                ..Default::default()
            },
        );
        ensure(!first.result.failed(), format!("{name}: a row failed"))?;
        let json = serde_json::to_string_pretty(&first).unwrap();
        let again = rerun(&first.manifest).map_err(|e| e.to_string())?;
        ensure(
            json == serde_json::to_string_pretty(&again).unwrap(),
            format!("{name}: rerun differs"),
        )?;
        let parsed: subfam::manifest::Output<serde_json::Value> =
            serde_json::from_str(&json).unwrap();
        let third = rerun(&parsed.manifest).map_err(|e| e.to_string())?;
        ensure(
            json == serde_json::to_string_pretty(&third).unwrap(),
            format!("{name}: rerun from file differs"),
        )?;
        for row in &first.result.rows {
            if name == "b2-small" && row.method == "random-deletion" {
                let exact_row = first
                    .result
                    .rows
                    .iter()
                    .find(|r| r.family == row.family && r.method == "exact")
                    .unwrap();
                let (x, e, g) = (
                    row.size.unwrap(),
                    exact_row.size.unwrap(),
                    row.guarantee.unwrap(),
                );
                ensure(
                    e >= x && x as f64 >= g.ceil(),
                    format!("{}: exact {e}, got {x}, guarantee {g}", row.family),
                )?;
            }
            if name == "uf-es" && row.method == "exact" {
                ensure(
                    row.size.unwrap() as f64 <= row.bounds["es_grid_bound"],
                    "uf-es bound",
                )?;
            }
        }
        out.push(format!("{name}: {} rows", first.result.rows.len()));
    }
    Ok(out.join(", "))
}

/// Straight to stdout, past the test harness's capture, so the verdicts
/// show up in a plain `cargo test` run.
fn report(line: String) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("oracle ground truth", c1, 4),
        ("turan numbers at small scale", c2, 60),
        ("family/hypergraph bijection", c3, 1),
        ("es(k) union-free bound", c4, 60),
        ("grid equivalence", c5, 60),
        ("leveled family bound", c6, 60),
        ("kleitman guarantee", c7, 60),
        ("random deletion", c8, 60),
        ("determining subfamilies", c9, 60),
        ("formula layer", c10, 60),
        ("bench reproducibility", c11, 600),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, secs)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let res = res.and_then(|s| {
            if took > Duration::from_secs(*secs) {
                Err(format!("took {took:?}, limit {secs}s"))
            } else {
                Ok(s)
            }
        });
        match res {
            Ok(s) => report(format!(
                "criterion {:>2} PASS  {name}: {s} [{took:.2?}]",
                i + 1
            )),
            Err(e) => {
                report(format!(
                    "criterion {:>2} FAIL  {name}: {e} [{took:.2?}]",
                    i + 1
                ));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
