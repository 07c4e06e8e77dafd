//! Built-in scenarios and their golden expectations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use orbitforge::algebra::linalg::same_span;
use orbitforge::algebra::{HomogeneousForm, Poly, Scalar, TruncatedSeries, Var};
use orbitforge::arcs::examples::{concurrent_sextic, shear, DEFAULT_LAMBDAS, FIRST_WEIGHTS, SECOND_WEIGHTS};
use orbitforge::arcs::{linear_factors_through_point, smith_factorize_with, two_step_limit, ArcMatrix, PivotStrategy};
use orbitforge::chow::{chow_number, lemma1_check, monotonicity_scan, HermitianEndomorphism, ParametrizedCycle, QuadratureSpec};
use orbitforge::descendants::input::FamilyInput;

use crate::commands::{grid, lines_and_limit, run_command, Settings};
use crate::error::{CliError, CliResult, Context};
use crate::report::{Check, Output};

pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    run: fn(&Settings, &Value) -> CliResult<Output>,
    golden: &'static str,
}

macro_rules! golden {
    ($name:literal) => {
        include_str!(concat!("../scenarios/", $name, ".json"))
    };
}

pub const SCENARIOS: &[Scenario] = &[
    Scenario { name: "simple_example", description: "conic-times-line family: filtration, sextic descendant with one node, samples, power one", run: simple_example, golden: golden!("simple_example") },
    Scenario { name: "second_order_example", description: "family vanishing to second order along the conic", run: second_order, golden: golden!("second_order_example") },
    Scenario { name: "composition_example", description: "descendant of a descendant against the direct descendant", run: composition, golden: golden!("composition_example") },
    Scenario { name: "web_prefix_example", description: "web prefix with admissibility and the equivariant norm cross-check", run: web_prefix, golden: golden!("web_prefix_example") },
    Scenario { name: "sextic_concurrent", description: "two-step degeneration of a sextic to six concurrent lines", run: sextic, golden: golden!("sextic_concurrent") },
    Scenario { name: "futaki_concurrent_lines", description: "Futaki sequence of the six concurrent lines", run: futaki, golden: golden!("futaki_concurrent_lines") },
    Scenario { name: "chow_oracles", description: "Chow numbers of a line, a symmetric conic and a point scan", run: chow_oracles, golden: golden!("chow_oracles") },
    Scenario { name: "monotonicity_random", description: "seeded random conic scans of Ch(e^{sA}Z, A)", run: monotonicity, golden: golden!("monotonicity_random") },
    Scenario { name: "factorization_random", description: "seeded random 3x3 arcs: factorization round trip and flag uniqueness", run: factorization, golden: golden!("factorization_random") },
    Scenario { name: "binary_grid", description: "1-PS search against root multiplicities on binary forms", run: binary_grid, golden: golden!("binary_grid") },
    Scenario { name: "pole_order_pairing", description: "pole order against the moment-map pairing on seeded arcs", run: pole_order_pairing, golden: golden!("pole_order_pairing") },
];

pub fn find(name: &str) -> CliResult<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name).ok_or_else(|| CliError::Config(format!("unknown scenario {name:?}; see `scenario list`")))
}

/// `input` keys override the scenario's default payload.
fn merged(mut base: Value, input: &Value) -> Value {
    if let (Some(b), Some(i)) = (base.as_object_mut(), input.as_object()) {
        for (k, v) in i {
            b.insert(k.clone(), v.clone());
        }
    }
    base
}

fn usize_opt(input: &Value, key: &str, default: usize) -> CliResult<usize> {
    match input.get(key) {
        None => Ok(default),
        Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| CliError::Config(format!("{key} must be a nonnegative integer"))),
    }
}

impl Scenario {
    pub fn run(&self, s: &Settings, input: &Value) -> CliResult<Output> {
        if !input.is_null() && !input.is_object() {
            return Err(CliError::Config("scenario input must be an object".into()));
        }
        let mut out = (self.run)(s, input)?;
        out.report.scenario = Some(self.name.into());
        let golden: Golden = serde_json::from_str(self.golden).expect("built-in golden file parses");
        for e in &golden.expect {
            out.report.checks.push(e.check(&out.report.result));
        }
        Ok(out)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Golden {
    expect: Vec<Expectation>,
}

/// One expected value at a JSON pointer into the result.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Expectation {
    name: String,
    pointer: String,
    #[serde(default)]
    equals: Option<Value>,
    #[serde(default)]
    approx: Option<f64>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    at_least: Option<f64>,
    /// Forms (text, three variables) whose span must equal the listed forms.
    #[serde(default)]
    span_of: Option<Vec<String>>,
    origin: String,
}

impl Expectation {
    fn check(&self, result: &Value) -> Check {
        let got = result.pointer(&self.pointer);
        let (passed, detail) = match (got, &self.equals, self.approx, &self.span_of) {
            (None, ..) => (false, format!("{} is missing", self.pointer)),
            (Some(g), None, None, None) if self.at_least.is_some() => {
                let lo = self.at_least.unwrap();
                (g.as_f64().is_some_and(|x| x >= lo), format!("{g} (expected >= {lo:e})"))
            }
            (Some(g), Some(want), _, _) => (g == want, format!("{g} (expected {want})")),
            (Some(g), None, Some(want), _) => {
                let tol = self.tol.unwrap_or(1e-8);
                let ok = g.as_f64().is_some_and(|x| (x - want).abs() <= tol);
                (ok, format!("{g} (expected {want} ± {tol:e})"))
            }
            (Some(g), None, None, Some(forms)) => {
                let parse = |v: &[String]| -> Option<Vec<Vec<Scalar>>> { v.iter().map(|t| HomogeneousForm::parse(t, 3).ok().map(|f| f.to_vector())).collect() };
                let have: Option<Vec<String>> = serde_json::from_value(g.clone()).ok();
                let ok = match (have.as_deref().and_then(parse), parse(forms)) {
                    (Some(a), Some(b)) => a.first().map(Vec::len) == b.first().map(Vec::len) && same_span(&a, &b),
                    _ => false,
                };
                (ok, format!("span of {g} (expected span of {forms:?})"))
            }
            _ => (false, "malformed expectation".into()),
        };
        Check { name: self.name.clone(), passed, detail, origin: Some(self.origin.clone()) }
    }
}

fn family_payload(f: &FamilyInput) -> Value {
    serde_json::to_value(f).expect("family serializes")
}

fn simple_example(s: &Settings, input: &Value) -> CliResult<Output> {
    let mut base = family_payload(&FamilyInput::worked_example());
    base["samples"] = json!(50);
    run_command("descend", &merged(base, input), s)
}

fn second_order(s: &Settings, input: &Value) -> CliResult<Output> {
    let mut base = family_payload(&FamilyInput::second_order_example());
    base["p_list"] = json!([2]);
    base["samples"] = json!(15);
    run_command("descend", &merged(base, input), s)
}

fn composition(s: &Settings, input: &Value) -> CliResult<Output> {
    let mut base = family_payload(&FamilyInput::worked_example());
    base["p"] = json!(2);
    base["q"] = json!(2);
    run_command("compose-check", &merged(base, input), s)
}

fn web_prefix(s: &Settings, input: &Value) -> CliResult<Output> {
    let mut base = family_payload(&FamilyInput::worked_example());
    base["p_list"] = json!([1, 2]);
    base["equivariant"] = json!({ "weights": [1, 1, -2], "exponents": [0, 1, 0], "p_list": [1, 2, 3, 4] });
    run_command("web", &merged(base, input), s)
}

fn sextic_last() -> CliResult<orbitforge::arcs::TwoStepLimit> {
    two_step_limit(&concurrent_sextic(&DEFAULT_LAMBDAS), &FIRST_WEIGHTS, &shear(5), &SECOND_WEIGHTS).context("two-step limit")
}

fn sextic(s: &Settings, _: &Value) -> CliResult<Output> {
    let r = sextic_last()?;
    let o = [Scalar::zero(), Scalar::zero(), Scalar::one()];
    let factors = linear_factors_through_point(&r.last, &o).context("factoring")?;
    let lines: Vec<HomogeneousForm> = factors.as_ref().map(|(_, l)| l.clone()).unwrap_or_default();
    let five = HomogeneousForm::parse("x - 5*y", 3).expect("literal");
    let result = json!({
        "first": r.first.to_text(),
        "first_nu": r.first_nu,
        "moved": r.moved.to_text(),
        "last": r.last.to_text(),
        "last_nu": r.last_nu,
        "factor_count": lines.len(),
        "factors": lines.iter().map(HomogeneousForm::to_text).collect::<Vec<_>>(),
        "contains_moved_line": lines.iter().any(|l| same_span(&[l.to_vector()], &[five.to_vector()])),
    });
    let checks = vec![Check::new("factors_through_o", factors.is_some(), "last limit is a product of linear forms vanishing at [0:0:1]")];
    Ok(Output::new("scenario", s.seed, result, checks, String::new()))
}

fn futaki(s: &Settings, input: &Value) -> CliResult<Output> {
    let base = json!({ "weights": SECOND_WEIGHTS, "form": sextic_last()?.last.to_text(), "p_list": [1, 2, 3] });
    run_command("futaki-seq", &merged(base, input), s)
}

fn quadrature(s: &Settings) -> QuadratureSpec {
    let mut q = s.quadrature.clone().unwrap_or_default();
    if let Some(t) = s.tol {
        q.tol = t;
    }
    if let Some(g) = s.grid {
        q.radial = g;
        q.angular = 2 * g;
    }
    q
}

fn cycle_of(v: Value) -> ParametrizedCycle {
    let j: orbitforge::chow::CycleJson = serde_json::from_value(v).expect("literal cycle");
    ParametrizedCycle::try_from(&j).expect("literal cycle")
}

fn diag(w: &[i64]) -> HermitianEndomorphism {
    HermitianEndomorphism::diagonal_exact(&w.iter().map(|&x| Scalar::from_i64(x)).collect::<Vec<_>>())
}

fn chow_oracles(s: &Settings, _: &Value) -> CliResult<Output> {
    let spec = quadrature(s);
    let line = cycle_of(json!({ "components": [{ "param": ["1", "u", "0"] }] }));
    let conic = cycle_of(json!({ "components": [{ "param": ["1", "u", "u^2"] }] }));
    let point = cycle_of(json!({ "points": [{ "coords": ["1", "1"] }] }));
    let l = chow_number(&line, &diag(&[1, 1, -2]), &spec).context("line")?;
    let c = chow_number(&conic, &diag(&[1, 0, -1]), &spec).context("conic")?;
    let ss = grid(-2.0, 2.0, 41);
    let scan = monotonicity_scan(&point, &diag(&[1, -1]), &ss, &spec).context("point scan")?;
    let tanh_err = scan.rows.iter().map(|r| (r.ch - (2.0 * r.s).tanh()).abs()).fold(0.0, f64::max);
    let result = json!({
        "line_volume": l.volume, "line_chow": l.value,
        "conic_volume": c.volume, "conic_chow": c.value,
        "point_scan_max_tanh_error": tanh_err,
    });
    Ok(Output::new("scenario", s.seed, result, Vec::new(), scan.to_csv()))
}

fn rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Scalar {
    Scalar::from_ratio(rng.gen_range(lo..=hi), 10)
}

/// A Hermitian matrix with Gaussian-rational entries in steps of 1/10.
pub fn random_hermitian(rng: &mut ChaCha8Rng, q: usize) -> HermitianEndomorphism {
    let mut a = vec![vec![Scalar::zero(); q]; q];
    for i in 0..q {
        a[i][i] = rational(rng, -15, 15);
        for j in i + 1..q {
            let z = &rational(rng, -7, 7) + &(&Scalar::i() * &rational(rng, -7, 7));
            a[j][i] = z.conj();
            a[i][j] = z;
        }
    }
    HermitianEndomorphism::from_exact(&a).expect("Hermitian by construction")
}

/// `(1, u, u²)` moved by a random rational matrix close to the identity.
pub fn random_conic(rng: &mut ChaCha8Rng) -> ParametrizedCycle {
    let g: Vec<Vec<Scalar>> = (0..3)
        .map(|i| (0..3).map(|j| &rational(rng, -10, 10) + &Scalar::from_ratio(if i == j { 3 } else { 0 }, 2)).collect())
        .collect();
    let polys: Vec<Poly> = g.iter().map(|row| Poly::new(row.clone())).collect();
    ParametrizedCycle::from_exact_curve(&polys, 1)
}

fn monotonicity(s: &Settings, input: &Value) -> CliResult<Output> {
    let pairs = usize_opt(input, "pairs", 20)?;
    let points = usize_opt(input, "points", 41)?;
    let spec = quadrature(s);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let ss = grid(-2.0, 2.0, points);
    let mut csv = String::from("pair,s,Ch,error_estimate\n");
    let mut mins = Vec::new();
    for k in 0..pairs {
        let z = random_conic(&mut rng);
        let a = random_hermitian(&mut rng, 3);
        let scan = monotonicity_scan(&z, &a, &ss, &spec).context("scan")?;
        for r in &scan.rows {
            csv.push_str(&format!("{k},{},{:.15e},{:.3e}\n", r.s, r.ch, r.error));
        }
        mins.push(scan.min_forward_difference);
    }
    let min = mins.iter().copied().fold(f64::INFINITY, f64::min);
    let checks = vec![Check::new("monotone", min >= -1e-7, format!("min forward difference {min:.3e} over {pairs} pairs"))];
    Ok(Output::new("scenario", s.seed, json!({ "pairs": pairs, "min_forward_difference": min, "per_pair": mins }), checks, csv))
}

fn random_series(rng: &mut ChaCha8Rng, lo: i64, k: i64) -> TruncatedSeries {
    let v = rng.gen_range(lo..=2);
    let terms: Vec<(i64, Scalar)> = (v..=k)
        .map(|e| (e, Scalar::from_i64(if e == v { [-2, -1, 1, 2, 3][rng.gen_range(0..5)] } else { rng.gen_range(-3..=3) })))
        .collect();
    TruncatedSeries::from_terms(Var::T, &terms, k)
}

fn factorization(s: &Settings, input: &Value) -> CliResult<Output> {
    let count = usize_opt(input, "arcs", 100)?;
    let k = usize_opt(input, "truncation", 16)? as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let (mut roundtrip, mut sums, mut flags, mut units) = (0, 0, 0, 0);
    let mut weights = Vec::new();
    for _ in 0..count {
        let g = ArcMatrix::new((0..3).map(|_| (0..3).map(|_| random_series(&mut rng, -2, k)).collect()).collect()).context("arc")?;
        let a = smith_factorize_with(&g, PivotStrategy::RowMajor).context("factorization")?;
        let b = smith_factorize_with(&g, PivotStrategy::ColumnMajorLast).context("factorization")?;
        roundtrip += usize::from(a.reconstruct().certified_eq(&g) && b.reconstruct().certified_eq(&g));
        sums += usize::from(g.det().valuation() == Some(a.weight_sum()));
        flags += usize::from(a.weights == b.weights && a.flag.same_flag(&b.flag));
        let unit = |m: &ArcMatrix| m.at_zero().is_ok_and(|z| orbitforge::algebra::linalg::inverse(&z).is_ok());
        units += usize::from(unit(&a.l) && unit(&a.r));
        weights.push(a.weights);
    }
    let checks = vec![
        Check::new("roundtrip", roundtrip == count, format!("{roundtrip}/{count}")),
        Check::new("weight_sum", sums == count, format!("{sums}/{count}")),
        Check::new("pivot_independence", flags == count, format!("{flags}/{count}")),
        Check::new("unit_ends", units == count, format!("{units}/{count}")),
    ];
    Ok(Output::new("scenario", s.seed, json!({ "arcs": count, "weights": weights }), checks, String::new()))
}

fn binary_grid(s: &Settings, input: &Value) -> CliResult<Output> {
    let per_degree = usize_opt(input, "per_degree", 60)?;
    let roots: [Option<i64>; 6] = [None, Some(0), Some(1), Some(-1), Some(2), Some(-3)];
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut forms = Vec::new();
    for d in 1..=6 {
        for _ in 0..per_degree {
            let mut f = HomogeneousForm::parse("1", 2).expect("literal");
            for _ in 0..d {
                let lin = match roots[rng.gen_range(0..roots.len())] {
                    None => HomogeneousForm::parse("x1", 2).expect("literal"),
                    Some(r) => HomogeneousForm::linear(&[Scalar::one(), Scalar::from_i64(-r)]),
                };
                f = f.mul(&lin).context("product")?;
            }
            forms.push(f.to_text());
        }
    }
    let mut out = run_command("binary-stability", &json!({ "forms": forms }), s)?;
    let n = forms.len();
    out.report.result["count"] = json!(n);
    Ok(out)
}

fn lin(c: &[i64]) -> HomogeneousForm {
    HomogeneousForm::linear(&c.iter().map(|&x| Scalar::from_i64(x)).collect::<Vec<_>>())
}

/// Unipotent upper-triangular Laurent matrix times `t^w`.
pub fn unipotent_diag(rng: &mut ChaCha8Rng, w: &[i64], k: i64) -> ArcMatrix {
    let q = w.len();
    let rows = (0..q)
        .map(|i| {
            (0..q)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => TruncatedSeries::one(Var::T, k),
                    std::cmp::Ordering::Less => {
                        let v = rng.gen_range(-1..=1);
                        let terms: Vec<(i64, Scalar)> = (v..=v + 3).map(|e| (e, Scalar::from_i64(rng.gen_range(-2..=2)))).collect();
                        TruncatedSeries::from_terms(Var::T, &terms, k)
                    }
                    std::cmp::Ordering::Greater => TruncatedSeries::zero(Var::T, k),
                })
                .collect()
        })
        .collect();
    ArcMatrix::new(rows).expect("square").mul(&ArcMatrix::diagonal_powers(w, k)).expect("same size")
}

fn pole_order_pairing(s: &Settings, input: &Value) -> CliResult<Output> {
    let eq = usize_opt(input, "equivariant", 5)?;
    let neq = usize_opt(input, "non_equivariant", 20)?;
    let spec = quadrature(s);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut eq_margins = Vec::new();
    let mut neq_margins = Vec::new();
    for k in 0..eq + neq {
        let w: Vec<i64> = (0..3).map(|_| rng.gen_range(-2..=2)).collect();
        let g = if k < eq { ArcMatrix::diagonal_powers(&w, 12) } else { unipotent_diag(&mut rng, &w, 14) };
        let lines: Vec<HomogeneousForm> = (0..2).map(|_| lin(&[rng.gen_range(-3..=3), rng.gen_range(1..=3), rng.gen_range(1..=3)])).collect();
        let (f, y) = lines_and_limit(&g, &lines)?;
        let r = lemma1_check(&g, &f, &y, &spec).context("lemma check")?;
        if k < eq { eq_margins.push(r.margin) } else { neq_margins.push(r.margin) }
    }
    let worst_eq = eq_margins.iter().map(|m| m.abs()).fold(0.0, f64::max);
    let worst_neq = neq_margins.iter().copied().fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::new("equivariant_equality", worst_eq <= 1e-6, format!("max |margin| {worst_eq:.3e} over {eq} arcs")),
        Check::new("inequality", neq == 0 || worst_neq >= -1e-6, format!("min margin {worst_neq:.3e} over {neq} arcs")),
    ];
    let result = json!({ "equivariant_margins": eq_margins, "non_equivariant_margins": neq_margins });
    Ok(Output::new("scenario", s.seed, result, checks, String::new()))
}
