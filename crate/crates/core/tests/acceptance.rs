//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line is printed; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use veronese_pencils::classify::{
    all_labels, canonical_rep, classify, expected_stabilizer_order, group_order, line_count,
    ClassLabel,
};
use veronese_pencils::orbits::{
    act, census, form_model_census, lemma_checks, stabilizer_order, CensusMode, GroupElem,
    OraclePartition,
};
use veronese_pencils::symspace::{point_census, PointCensus};
use veronese_pencils::{FieldElem, FieldSpec, Pencil, SymMat};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn field(q: u32) -> FieldSpec {
    FieldSpec::from_order(q).unwrap()
}

fn label(s: &str) -> ClassLabel {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_group_elem(f: &FieldSpec, rng: &mut ChaCha8Rng) -> GroupElem {
    loop {
        let m = std::array::from_fn(|_| {
            std::array::from_fn(|_| FieldElem::from_code(rng.gen_range(0..f.q()) as u8))
        });
        if let Some(g) = GroupElem::new(f, m) {
            return g;
        }
    }
}

fn random_pencil(f: &FieldSpec, rng: &mut ChaCha8Rng) -> Pencil {
    loop {
        let mut s = || {
            SymMat(std::array::from_fn(|_| {
                FieldElem::from_code(rng.gen_range(0..f.q()) as u8)
            }))
        };
        if let Ok(p) = Pencil::new(f, s(), s()) {
            return p;
        }
    }
}

fn c1_oracle_orbit_count() -> Verdict {
    let mut notes = Vec::new();
    for q in [2, 3, 4] {
        let start = Instant::now();
        let oracle = OraclePartition::new(&field(q)).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(oracle.orbit_count == 15, || {
            format!("q={q}: {} orbits", oracle.orbit_count)
        })?;
        if q == 4 {
            ensure(took < Duration::from_secs(300), || {
                format!("q=4 took {took:?}")
            })?;
        }
        notes.push(format!("q={q}: 15 orbits in {:.2}s", took.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn c2_tensor_totals() -> Verdict {
    // Published line counts at q = 2, in tensor orbit order o5 .. o17.
    let q2 = [21u128, 21, 112, 42, 7, 28, 168, 28, 84, 84, 56];
    ensure(q2.iter().sum::<u128>() == 651, || {
        "table values do not sum to 651".into()
    })?;
    for (q, mode) in [
        (2, CensusMode::Oracle),
        (3, CensusMode::Oracle),
        (4, CensusMode::Oracle),
        (5, CensusMode::Classifier),
    ] {
        let r = census(&field(q), mode).map_err(|e| e.to_string())?;
        for (t, c) in &r.per_tensor {
            ensure(c.lines == c.expected, || {
                format!("q={q} o{t}: {} lines, expected {}", c.lines, c.expected)
            })?;
        }
        ensure(r.total_lines == line_count(q), || {
            format!("q={q}: total {}", r.total_lines)
        })?;
        if q == 2 {
            let found: Vec<u128> = r.per_tensor.values().map(|c| c.lines).collect();
            ensure(found == q2, || format!("q=2 totals {found:?}"))?;
        }
    }
    Ok("q=2,3,4 by orbit oracle, q=5 by classifier; q=2 totals sum to 651".into())
}

fn c3_stabilizers() -> Verdict {
    for q in [2, 3, 4, 5] {
        let f = field(q);
        for l in all_labels(f.is_odd()) {
            let rep = canonical_rep(l, &f).map_err(|e| e.to_string())?;
            let found = stabilizer_order(&f, &rep).map_err(|e| e.to_string())?.order;
            let expected = expected_stabilizer_order(l, &f).map_err(|e| e.to_string())?;
            ensure(found == expected, || {
                format!("q={q} {l}: found {found}, expected {expected}")
            })?;
            if l == label("o17") {
                ensure(found == 3, || format!("q={q} o17: {found}"))?;
            }
            if l == label("o15") && f.is_odd() {
                ensure(found == 4, || format!("q={q} o15: {found}"))?;
            }
        }
    }
    Ok("all 15 representatives at q=2,3,4,5".into())
}

fn c4_classifier_matches_oracle() -> Verdict {
    let mut lines = 0;
    for q in [2, 3, 4] {
        let r = census(&field(q), CensusMode::Both).map_err(|e| e.to_string())?;
        lines += r.total_lines;
    }
    Ok(format!("{lines} lines, zero mismatches"))
}

fn c5_constant_rank3_lines() -> Verdict {
    for q in [2, 3, 4, 5] {
        let r = lemma_checks(&field(q)).map_err(|e| e.to_string())?;
        let c = r.check("constant-rank3-lines").unwrap();
        let expected = group_order(q) / 3;
        ensure(
            c.passed && c.detail == format!("found {expected}, expected {expected}"),
            || format!("q={q}: {}", c.detail),
        )?;
    }
    Ok("equals |K|/3 at q=2,3,4,5".into())
}

fn c6_rank3_point_profile() -> Verdict {
    let mut counts = Vec::new();
    for q in [3, 4, 5] {
        let r = lemma_checks(&field(q)).map_err(|e| e.to_string())?;
        let c = r.check("rank3-point-lines").unwrap();
        ensure(r.points_checked >= 20, || {
            format!("q={q}: only {} points", r.points_checked)
        })?;
        ensure(c.passed, || {
            format!("q={q}: {} at {:?}", c.detail, c.witness)
        })?;
        counts.push(format!("q={q}: {} points", r.points_checked));
    }
    Ok(counts.join(", "))
}

fn c7_point_census() -> Verdict {
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let found = point_census(&field(q)).map_err(|e| e.to_string())?;
        ensure(found == PointCensus::expected(q), || {
            format!("q={q}: {found:?}")
        })?;
    }
    Ok("q=2,3,4,5,7,8,9".into())
}

fn c8_polarity() -> Verdict {
    let mut details = Vec::new();
    let mut failed = false;
    for q in [3, 5] {
        let r = lemma_checks(&field(q)).map_err(|e| e.to_string())?;
        let literal = r.check("polarity").unwrap();
        let adjugate = r.check("polarity-adjugate").unwrap();
        failed |= !literal.passed;
        details.push(format!(
            "q={q}: {}{}; adj(P) form {}",
            literal.detail,
            literal
                .witness
                .as_ref()
                .map(|w| format!(", first failure P={w}"))
                .unwrap_or_default(),
            if adjugate.passed { "holds" } else { "fails" }
        ));
        if q == 5 {
            ensure(r.points_checked >= 100, || {
                format!("q=5: {} points", r.points_checked)
            })?;
        }
    }
    if failed {
        Err(details.join("; "))
    } else {
        Ok(details.join("; "))
    }
}

fn c9_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut invariance = 0;
    for q in [2, 3, 4, 5, 7] {
        let f = field(q);
        for l in all_labels(f.is_odd()) {
            let rep = canonical_rep(l, &f).map_err(|e| e.to_string())?;
            for _ in 0..1000 {
                let d = random_group_elem(&f, &mut rng);
                let img = act(&f, &d, &rep);
                let got = classify(&img, &f).map_err(|e| e.to_string())?;
                ensure(got == l, || {
                    format!("q={q} {l}: image {img:?} classified {got}")
                })?;
                invariance += 1;
            }
        }
    }
    let mut composition = 0;
    for q in [2, 3, 4, 5, 7] {
        let f = field(q);
        for _ in 0..1000 {
            let (d1, d2) = (
                random_group_elem(&f, &mut rng),
                random_group_elem(&f, &mut rng),
            );
            let p = random_pencil(&f, &mut rng);
            let lhs = act(&f, &d1, &act(&f, &d2, &p));
            let rhs = act(&f, &d1.compose(&f, &d2), &p);
            ensure(lhs == rhs, || format!("q={q}: composition fails on {p:?}"))?;
            composition += 1;
        }
    }
    for q in [2, 3, 4] {
        let f = field(q);
        let mut oracle = OraclePartition::new(&f).map_err(|e| e.to_string())?;
        for l in all_labels(f.is_odd()) {
            let rep = canonical_rep(l, &f).map_err(|e| e.to_string())?;
            let orbit = oracle.orbit_size(&rep) as u128;
            let stab = stabilizer_order(&f, &rep).map_err(|e| e.to_string())?.order;
            ensure(orbit * stab == group_order(q), || {
                format!("q={q} {l}: {orbit} * {stab}")
            })?;
        }
    }
    Ok(format!(
        "{invariance} congruence images, {composition} compositions, orbit-stabiliser at q=2,3,4"
    ))
}

fn c10_form_model() -> Verdict {
    let mut problems = Vec::new();
    for q in [2, 4] {
        let r = form_model_census(&field(q)).map_err(|e| e.to_string())?;
        if r.orbit_count != 15 {
            problems.push(format!("q={q}: {} orbits", r.orbit_count));
        }
        if !r.representatives_distinct {
            let mut by_orbit: std::collections::BTreeMap<u32, Vec<String>> = Default::default();
            for x in &r.representatives {
                by_orbit
                    .entry(x.orbit)
                    .or_default()
                    .push(x.label.to_string());
            }
            let shared: Vec<String> = by_orbit
                .values()
                .filter(|v| v.len() > 1)
                .map(|v| v.join("/"))
                .collect();
            problems.push(format!(
                "q={q}: 15 orbits but representatives share orbits ({})",
                shared.join(", ")
            ));
        }
    }
    let r3 = form_model_census(&field(3)).map_err(|e| e.to_string())?;
    if r3.matches_matrix_model != Some(true) || r3.orbit_count != 15 {
        problems.push("q=3 form sizes differ from matrix sizes".into());
    }
    if problems.is_empty() {
        Ok("q=2,4: 15 orbits, representatives distinct; q=3 sizes match".into())
    } else {
        Err(format!("{}; q=3 sizes match", problems.join("; ")))
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle census finds 15 orbits", c1_oracle_orbit_count),
        ("per-tensor totals", c2_tensor_totals),
        ("stabiliser orders", c3_stabilizers),
        ("classifier equals oracle", c4_classifier_matches_oracle),
        ("constant rank-3 lines", c5_constant_rank3_lines),
        ("lines through rank-3 points", c6_rank3_point_profile),
        ("point census", c7_point_census),
        ("polarity", c8_polarity),
        ("property suites", c9_properties),
        ("form model census", c10_form_model),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
