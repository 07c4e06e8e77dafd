use std::process::ExitCode;
use std::time::{Duration, Instant};

use orbitforge::algebra::{HomogeneousForm, Scalar, TruncatedSeries, Var};
use orbitforge::arcs::{nu_of_arc, smith_factorize, ArcMatrix};
use orbitforge::descendants::input::FamilyInput;
use orbitforge::descendants::record::{descendant, linear_match, DescendOptions};
use orbitforge_cli::scenarios::find;
use orbitforge_cli::Settings;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Outcome = Result<String, String>;

fn scenario(name: &str, input: Value) -> Outcome {
    let out = find(name).map_err(|e| e.to_string())?.run(&Settings::default(), &input).map_err(|e| e.to_string())?;
    let failed: Vec<String> = out.report.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    if failed.is_empty() {
        Ok(format!("{name}, {} checks", out.report.checks.len()))
    } else {
        Err(failed.join("; "))
    }
}

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn holomorphic(rng: &mut ChaCha8Rng, q: usize, k: i64) -> ArcMatrix {
    let rows = (0..q)
        .map(|i| {
            (0..q)
                .map(|j| {
                    let mut terms: Vec<(i64, Scalar)> = (1..=k).map(|e| (e, Scalar::from_i64(rng.gen_range(-2..=2)))).collect();
                    let c0 = if i == j { rng.gen_range(1..=3) } else if j > i { rng.gen_range(-2..=2) } else { 0 };
                    terms.push((0, Scalar::from_i64(c0)));
                    TruncatedSeries::from_terms(Var::T, &terms, k)
                })
                .collect()
        })
        .collect();
    ArcMatrix::new(rows).unwrap()
}

fn form(s: &str, n: usize) -> HomogeneousForm {
    HomogeneousForm::parse(s, n).unwrap()
}

fn invariants() -> Outcome {
    let e = |x: orbitforge::Error| x.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = ArcMatrix::diagonal_powers(&[1, -1], 16);

    let a = nu_of_arc(&g, &form("x0*x1", 2)).map_err(e)?;
    ensure(a.nu == 0 && a.norm == 1 && a.psi.map(|r| r.to_string()) == Some("0".into()), format!("x0*x1: {a:?}"))?;
    let b = nu_of_arc(&g, &form("x0^2", 2)).map_err(e)?;
    ensure(b.nu == 2 && b.psi.map(|r| r.to_string()) == Some("2".into()), format!("x0^2: {b:?}"))?;
    let j = ArcMatrix::parse(&[vec!["t".into(), "1".into()], vec!["0".into(), "t".into()]], 16).map_err(e)?;
    let w = smith_factorize(&j).map_err(e)?.weights;
    ensure(w == vec![0, 2], format!("Jordan block weights {w:?}"))?;

    for _ in 0..50 {
        let hg = holomorphic(&mut rng, 2, 16).mul(&g).map_err(e)?;
        let inv = nu_of_arc(&hg, &form("x0^2", 2)).map_err(e)?;
        ensure(inv.nu == 2, format!("nu moved to {} under a holomorphic factor", inv.nu))?;
    }
    let f = form("x^3 + y^3 + z^3 - x*y*z", 3);
    let arcs = [ArcMatrix::diagonal_powers(&[2, 0, -1], 12), holomorphic(&mut rng, 3, 12).mul(&ArcMatrix::diagonal_powers(&[1, 1, -2], 12)).map_err(e)?];
    for g in &arcs {
        let base = nu_of_arc(g, &f).map_err(e)?;
        for k in [2, 3] {
            let inv = nu_of_arc(&g.substitute_power(k), &f).map_err(e)?;
            ensure(inv.psi == base.psi && inv.nu == k * base.nu, format!("t -> t^{k}: {inv:?} vs {base:?}"))?;
        }
    }
    Ok("diagonal examples exact, 50 equivalences, 2 reparametrizations".into())
}

fn alternate_complements() -> Outcome {
    let e = |x: orbitforge::Error| x.to_string();
    let (fam, b) = FamilyInput::worked_example().build().map_err(e)?;
    let opts = DescendOptions { samples: 0, ..Default::default() };
    let base = descendant(&fam, &b, 2, &opts).map_err(e)?;
    for seed in 1..=3 {
        let alt = descendant(&fam, &b, 2, &DescendOptions { alt_seed: Some(seed), ..opts.clone() }).map_err(e)?;
        ensure(linear_match(&alt.curve, &base.curve).map_err(e)?.is_some(), format!("no linear match for alternate seed {seed}"))?;
    }
    Ok("3 alternate complements match exactly".into())
}

fn main() -> ExitCode {
    let criteria: Vec<(u32, &str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "factorization roundtrip", 10, Box::new(|| scenario("factorization_random", json!({ "arcs": 100, "truncation": 16 })))),
        (2, "arc invariants", 5, Box::new(invariants)),
        (3, "binary-form oracles", 30, Box::new(|| scenario("binary_grid", Value::Null))),
        (4, "sextic to concurrent lines", 5, Box::new(|| scenario("sextic_concurrent", Value::Null))),
        (5, "Chow quadrature", 60, Box::new(|| scenario("chow_oracles", Value::Null))),
        (6, "monotonicity", 300, Box::new(|| scenario("monotonicity_random", json!({ "pairs": 20, "points": 41 })))),
        (7, "pole order against pairing", 120, Box::new(|| scenario("pole_order_pairing", Value::Null))),
        (8, "worked example", 60, Box::new(|| scenario("simple_example", json!({ "samples": 50 })))),
        (9, "alternate complements", 30, Box::new(alternate_complements)),
        (10, "web prefix", 60, Box::new(|| scenario("web_prefix_example", Value::Null))),
    ];
    let mut failures = 0;
    for (n, title, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let over = took > Duration::from_secs(budget);
        let (verdict, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if verdict == "FAIL" {
            failures += 1;
        }
        println!("criterion {n} {verdict}: {title} ({detail}; {:.2} s)", took.as_secs_f64());
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
