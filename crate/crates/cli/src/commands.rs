//! One function per subcommand: JSON payload in, [`Output`] out.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use orbitforge::algebra::linalg::same_span;
use orbitforge::algebra::{HomogeneousForm, Matrix, Scalar};
use orbitforge::arcs::{
    binary_form_stability, flat_limit, nu_of_arc, one_ps_limit, smith_factorize_with, ArcMatrix, Direction, PivotStrategy,
};
use orbitforge::chow::{
    chow_number, futaki_sequence, integrate, lemma1_check, monotonicity_scan, psi_upper_bound, CycleJson, HermitianEndomorphism,
    ParametrizedCycle, QuadratureSpec,
};
use orbitforge::descendants::chart::{vanishing_order, ChartSource, Section};
use orbitforge::descendants::curve::RationalCurve;
use orbitforge::descendants::family::{ComponentB, PlaneCurveFamily};
use orbitforge::descendants::filtration::{compute_filtration, plane_kernel, KernelSpec, OrderSystem};
use orbitforge::descendants::input::FamilyInput;
use orbitforge::descendants::record::{
    composition_check, default_cap, descendant, linear_match, prop4_checks, DescendOptions, DescendantRecord,
};
use orbitforge::descendants::web::{equivariant_cross_check, web_prefix, SuppliedArc};

use crate::error::{CliError, CliResult, Context};
use crate::report::{Check, Output};

/// Flags shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    pub seed: u64,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub charts: bool,
    pub quadrature: Option<QuadratureSpec>,
}

impl Settings {
    fn quadrature(&self, given: Option<QuadratureSpec>) -> CliResult<QuadratureSpec> {
        let mut q = given.or_else(|| self.quadrature.clone()).unwrap_or_default();
        if let Some(t) = self.tol {
            q.tol = t;
        }
        if let Some(g) = self.grid {
            q.radial = g;
            q.angular = 2 * g;
        }
        q.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(q)
    }
}

pub const COMMANDS: &[&str] = &[
    "factorize",
    "nu",
    "limit1ps",
    "binary-stability",
    "chow",
    "monotone",
    "lemma1",
    "psi-bound",
    "futaki-seq",
    "vanishing",
    "filtration",
    "descend",
    "compose-check",
    "web",
];

pub fn run_command(name: &str, payload: &Value, s: &Settings) -> CliResult<Output> {
    match name {
        "factorize" => factorize(parse(payload)?, s),
        "nu" => nu(parse(payload)?, s),
        "limit1ps" => limit1ps(parse(payload)?, s),
        "binary-stability" => binary(parse(payload)?, s),
        "chow" => chow(parse(payload)?, s),
        "monotone" => monotone(parse(payload)?, s),
        "lemma1" => lemma1(parse(payload)?, s),
        "psi-bound" => psi_bound(parse(payload)?, s),
        "futaki-seq" => futaki(parse(payload)?, s),
        "vanishing" => vanishing(parse(payload)?, s),
        "filtration" => filtration(parse(payload)?, s),
        "descend" => descend(parse(payload)?, s),
        "compose-check" => compose(parse(payload)?, s),
        "web" => web(parse(payload)?, s),
        other => Err(CliError::Config(format!("unknown command {other:?}"))),
    }
}

fn parse<T: DeserializeOwned>(v: &Value) -> CliResult<T> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Config(e.to_string()))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

/// A form as text or as a coefficient map.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FormArg {
    Text(String),
    Json(HomogeneousForm),
}

impl FormArg {
    fn form(&self, nvars: usize) -> CliResult<HomogeneousForm> {
        let f = match self {
            FormArg::Text(t) => HomogeneousForm::parse(t, nvars).context("form")?,
            FormArg::Json(f) => f.clone(),
        };
        if f.nvars() != nvars {
            return Err(CliError::Config(format!("form has {} variables, expected {nvars}", f.nvars())));
        }
        Ok(f)
    }
}

/// A Hermitian endomorphism given by its diagonal or by a full matrix.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndoArg {
    #[serde(default)]
    diag: Option<Vec<Scalar>>,
    #[serde(default)]
    matrix: Option<Matrix>,
}

impl EndoArg {
    fn build(&self) -> CliResult<HermitianEndomorphism> {
        match (&self.diag, &self.matrix) {
            (Some(d), None) => Ok(HermitianEndomorphism::diagonal_exact(d)),
            (None, Some(m)) => HermitianEndomorphism::from_exact(m).context("endomorphism"),
            _ => Err(CliError::Config("give exactly one of \"diag\" and \"matrix\"".into())),
        }
    }
}

fn cycle(c: &CycleJson) -> CliResult<ParametrizedCycle> {
    ParametrizedCycle::try_from(c).context("cycle")
}

fn default_truncation() -> i64 {
    16
}

#[derive(Deserialize)]
struct ArcCfg {
    arc: Vec<Vec<String>>,
    #[serde(default = "default_truncation")]
    truncation: i64,
}

impl ArcCfg {
    fn matrix(&self) -> CliResult<ArcMatrix> {
        ArcMatrix::parse(&self.arc, self.truncation).context("arc")
    }
}

fn factorize(cfg: ArcCfg, s: &Settings) -> CliResult<Output> {
    let g = cfg.matrix()?;
    let a = smith_factorize_with(&g, PivotStrategy::RowMajor).context("factorization")?;
    let b = smith_factorize_with(&g, PivotStrategy::ColumnMajorLast).context("factorization")?;
    let det_order = g.det().valuation();
    let checks = vec![
        Check::new("reconstruction", a.reconstruct().certified_eq(&g), "L·t^A·R agrees with g on every certified coefficient"),
        Check::new("weight_sum", det_order == Some(a.weight_sum()), format!("sum of weights {} vs ord det {det_order:?}", a.weight_sum())),
        Check::new("pivot_independence", a.weights == b.weights && a.flag.same_flag(&b.flag), "both pivot strategies give the same flag"),
        Check::new(
            "unit_ends",
            a.l.at_zero().is_ok_and(|m| orbitforge::algebra::linalg::inverse(&m).is_ok())
                && a.r.at_zero().is_ok_and(|m| orbitforge::algebra::linalg::inverse(&m).is_ok()),
            "L(0) and R(0) are invertible",
        ),
    ];
    let result = json!({ "weights": a.weights, "flag": to_value(&a.flag), "norm": a.flag.norm(), "truncation": g.truncation() });
    Ok(Output::new("factorize", s.seed, result, checks, String::new()))
}

#[derive(Deserialize)]
struct NuCfg {
    #[serde(flatten)]
    arc: ArcCfg,
    form: FormArg,
}

fn nu(cfg: NuCfg, s: &Settings) -> CliResult<Output> {
    let g = cfg.arc.matrix()?;
    let f = cfg.form.form(g.q())?;
    let inv = nu_of_arc(&g, &f).context("nu")?;
    let (limit, _) = flat_limit(&g, &f).context("flat limit")?;
    let result = json!({ "invariants": to_value(&inv), "flat_limit": limit.to_text() });
    Ok(Output::new("nu", s.seed, result, Vec::new(), String::new()))
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum Sign {
    Plus,
    Minus,
}

fn three() -> usize {
    3
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Limit1psCfg {
    form: FormArg,
    #[serde(default = "three")]
    nvars: usize,
    weights: Vec<i64>,
    #[serde(default)]
    direction: Option<Sign>,
}

fn limit1ps(cfg: Limit1psCfg, s: &Settings) -> CliResult<Output> {
    let f = cfg.form.form(cfg.nvars)?;
    let run = |d: Direction| -> CliResult<Value> {
        let (lim, w) = one_ps_limit(&f, &cfg.weights, d).context("limit")?;
        Ok(json!({ "limit": lim.to_text(), "weight": w }))
    };
    let result = match cfg.direction {
        Some(Sign::Plus) => json!({ "plus": run(Direction::Plus)? }),
        Some(Sign::Minus) => json!({ "minus": run(Direction::Minus)? }),
        None => json!({ "plus": run(Direction::Plus)?, "minus": run(Direction::Minus)? }),
    };
    Ok(Output::new("limit1ps", s.seed, result, Vec::new(), String::new()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BinaryCfg {
    forms: Vec<FormArg>,
}

fn binary(cfg: BinaryCfg, s: &Settings) -> CliResult<Output> {
    let mut reports = Vec::new();
    let mut disagree = Vec::new();
    for (i, f) in cfg.forms.iter().enumerate() {
        let r = binary_form_stability(&f.form(2)?).context("binary form")?;
        if !r.oracles_agree() {
            disagree.push(i);
        }
        reports.push(to_value(&r));
    }
    let checks = vec![Check::new("oracles_agree", disagree.is_empty(), format!("{} forms, disagreements at {disagree:?}", reports.len()))];
    Ok(Output::new("binary-stability", s.seed, json!({ "reports": reports }), checks, String::new()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChowCfg {
    cycle: CycleJson,
    #[serde(rename = "A")]
    a: EndoArg,
    #[serde(default)]
    quadrature: Option<QuadratureSpec>,
}

fn chow(cfg: ChowCfg, s: &Settings) -> CliResult<Output> {
    let z = cycle(&cfg.cycle)?;
    let a = cfg.a.build()?;
    let spec = s.quadrature(cfg.quadrature)?;
    let v = chow_number(&z, &a, &spec).context("chow number")?;
    let deg = z.degree() as f64;
    let checks = vec![Check::new("degree_self_check", (v.volume - deg).abs() <= 1e-8 * deg.max(1.0), format!("volume {} vs degree {deg}", v.volume))];
    let mut result = to_value(&v);
    let mut csv = String::new();
    if s.charts {
        let charts = integrate(&z, &a, &spec).context("chart integrals")?.charts;
        csv.push_str("component,chart,mass,h_integral,error\n");
        for c in &charts {
            csv.push_str(&format!("{},{},{},{},{}\n", c.component, c.chart, c.mass, c.h_integral, c.error));
        }
        result["charts"] = to_value(&charts);
    }
    Ok(Output::new("chow", s.seed, result, checks, csv))
}

fn s_min() -> f64 {
    -2.0
}
fn s_max() -> f64 {
    2.0
}
fn points() -> usize {
    41
}
fn mono_tol() -> f64 {
    1e-7
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MonotoneCfg {
    cycle: CycleJson,
    #[serde(rename = "A")]
    a: EndoArg,
    #[serde(default = "s_min")]
    s_min: f64,
    #[serde(default = "s_max")]
    s_max: f64,
    #[serde(default = "points")]
    points: usize,
    #[serde(default = "mono_tol")]
    slack: f64,
    #[serde(default)]
    quadrature: Option<QuadratureSpec>,
}

pub fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn monotone(cfg: MonotoneCfg, s: &Settings) -> CliResult<Output> {
    if cfg.points < 2 || !(cfg.s_min < cfg.s_max) {
        return Err(CliError::Config("scan needs s_min < s_max and at least two points".into()));
    }
    let z = cycle(&cfg.cycle)?;
    let a = cfg.a.build()?;
    let spec = s.quadrature(cfg.quadrature)?;
    let scan = monotonicity_scan(&z, &a, &grid(cfg.s_min, cfg.s_max, cfg.points), &spec).context("scan")?;
    let checks = vec![Check::new(
        "monotone",
        scan.min_forward_difference >= -cfg.slack,
        format!("min forward difference {:.3e}", scan.min_forward_difference),
    )];
    Ok(Output::new("monotone", s.seed, to_value(&scan), checks, scan.to_csv()))
}

fn margin_slack() -> f64 {
    1e-6
}

#[derive(Deserialize)]
struct Lemma1Cfg {
    #[serde(flatten)]
    arc: ArcCfg,
    /// The form is the product of these linear forms; its limit cycle is
    /// the union of their flat limits.
    lines: Vec<FormArg>,
    #[serde(default = "margin_slack")]
    slack: f64,
    #[serde(default)]
    quadrature: Option<QuadratureSpec>,
}

fn lemma1(cfg: Lemma1Cfg, s: &Settings) -> CliResult<Output> {
    let g = cfg.arc.matrix()?;
    let spec = s.quadrature(cfg.quadrature)?;
    let lines = cfg.lines.iter().map(|l| l.form(g.q())).collect::<CliResult<Vec<_>>>()?;
    let (f, y) = lines_and_limit(&g, &lines)?;
    let r = lemma1_check(&g, &f, &y, &spec).context("lemma check")?;
    let checks = vec![Check::new("pairing_bounds_nu", r.margin >= -cfg.slack, format!("pairing {} vs nu {}", r.pairing, r.nu))];
    Ok(Output::new("lemma1", s.seed, to_value(&r), checks, String::new()))
}

/// The product of the lines and the union of their flat limits.
pub fn lines_and_limit(g: &ArcMatrix, lines: &[HomogeneousForm]) -> CliResult<(HomogeneousForm, ParametrizedCycle)> {
    let (first, rest) = lines.split_first().ok_or_else(|| CliError::Config("no lines".into()))?;
    let mut f = first.clone();
    for l in rest {
        f = f.mul(l).context("product")?;
    }
    let limits = lines.iter().map(|l| flat_limit(g, l).map(|x| x.0)).collect::<orbitforge::Result<Vec<_>>>().context("flat limit")?;
    Ok((f, ParametrizedCycle::from_linear_factors(&limits).context("limit cycle")?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PsiCfg {
    cycle: CycleJson,
    probes: Vec<EndoArg>,
    #[serde(default)]
    quadrature: Option<QuadratureSpec>,
}

fn psi_bound(cfg: PsiCfg, s: &Settings) -> CliResult<Output> {
    let z = cycle(&cfg.cycle)?;
    let probes = cfg.probes.iter().map(EndoArg::build).collect::<CliResult<Vec<_>>>()?;
    let spec = s.quadrature(cfg.quadrature)?;
    let b = psi_upper_bound(&z, &probes, &spec).context("psi bound")?;
    Ok(Output::new("psi-bound", s.seed, to_value(&b), Vec::new(), String::new()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FutakiCfg {
    weights: Vec<i64>,
    form: FormArg,
    p_list: Vec<u32>,
    #[serde(default)]
    quadrature: Option<QuadratureSpec>,
}

fn futaki(cfg: FutakiCfg, s: &Settings) -> CliResult<Output> {
    let f = cfg.form.form(3)?;
    let spec = s.quadrature(cfg.quadrature)?;
    let seq = futaki_sequence(&cfg.weights, &f, &cfg.p_list, &spec).context("futaki sequence")?;
    let mut csv = String::from("p,chow,scaled,error\n");
    for t in &seq.terms {
        csv.push_str(&format!("{},{:.15e},{:.15e},{:.3e}\n", t.p, t.chow, t.scaled, t.error));
    }
    Ok(Output::new("futaki-seq", s.seed, to_value(&seq), Vec::new(), csv))
}

fn build_family(f: &FamilyInput) -> CliResult<(PlaneCurveFamily, ComponentB)> {
    f.build().context("family")
}

fn vanishing_truncation() -> usize {
    24
}

#[derive(Deserialize)]
struct VanishingCfg {
    #[serde(flatten)]
    family: FamilyInput,
    section: FormArg,
    #[serde(default = "vanishing_truncation")]
    truncation: usize,
}

fn vanishing(cfg: VanishingCfg, s: &Settings) -> CliResult<Output> {
    let (fam, b) = build_family(&cfg.family)?;
    let sigma = Section::plain(cfg.section.form(3)?);
    let result = match vanishing_order(&sigma, &fam, &b, cfg.truncation) {
        Ok(k) => json!({ "order": k }),
        Err(orbitforge::Error::TruncationExceeded(k)) => json!({ "order": null, "vanishes_through": k }),
        Err(e) => return Err(CliError::Module { context: "vanishing order".into(), source: e }),
    };
    Ok(Output::new("vanishing", s.seed, result, Vec::new(), String::new()))
}

#[derive(Deserialize)]
struct FiltrationCfg {
    #[serde(flatten)]
    family: FamilyInput,
    p: u32,
    #[serde(default)]
    alt_seed: Option<u64>,
}

fn filtration(cfg: FiltrationCfg, s: &Settings) -> CliResult<Output> {
    let (fam, b) = build_family(&cfg.family)?;
    let kernel = plane_kernel(&fam, cfg.p);
    let mut sys = OrderSystem::new(ChartSource::Plane { fam: fam.clone(), b }, cfg.p).context("order system")?;
    let filt = compute_filtration(&mut sys, KernelSpec::Known(kernel), default_cap(cfg.p, fam.degree()), cfg.alt_seed).context("filtration")?;
    let weights: Vec<Vec<String>> = (0..=filt.top()).map(|mu| filt.complement_forms(mu).iter().map(HomogeneousForm::to_text).collect()).collect();
    let result = json!({ "filtration": to_value(&filt), "complements": weights });
    Ok(Output::new("filtration", s.seed, result, Vec::new(), String::new()))
}

fn fifty() -> usize {
    50
}

#[derive(Deserialize)]
struct DescendCfg {
    #[serde(flatten)]
    family: FamilyInput,
    #[serde(default = "fifty")]
    samples: usize,
    #[serde(default)]
    alt_seed: Option<u64>,
}

fn descend_options(family: &FamilyInput, samples: usize, alt_seed: Option<u64>, s: &Settings) -> DescendOptions {
    let mut o = DescendOptions { samples, seed: s.seed, alt_seed, t_sequence: family.t_sequence.clone(), ..Default::default() };
    if let Some(t) = s.tol {
        o.tol = t;
    }
    o
}

/// Invariant checks shared by `descend` and `web` for one record.
fn record_checks(rec: &DescendantRecord, fam: &PlaneCurveFamily, b: &ComponentB) -> Vec<Check> {
    let p = rec.p;
    let p4 = prop4_checks(rec, b.p.degree(), fam.degree());
    let mut checks = vec![
        Check::new(format!("p{p}_samples"), rec.summary.samples_within_tolerance, format!(
                "{} samples, max distance to B' {:.3e}, max distance to predicted limit {:.3e}",
                rec.samples.len(),
                rec.summary.max_distance,
                rec.samples.iter().map(|x| x.predicted_distance).fold(0.0, f64::max)
            )),
        Check::new(format!("p{p}_degree_ratio"), p4.holds, format!("deg B'/deg W' = {} >= deg B/deg W = {}", p4.ratio, p4.base_ratio)),
    ];
    if let Some(c) = rec.summary.conserved {
        checks.push(Check::new(format!("p{p}_degree_conservation"), c, format!("deg W' = {}, deg B' = {}, extra {:?}", rec.summary.deg_w_prime, rec.summary.deg_b_prime, rec.summary.extra_degree)));
    }
    if p == 1 {
        let same = RationalCurve::from_polys(b.param.clone()).ok().and_then(|c| linear_match(&rec.curve, &c).ok().flatten()).is_some();
        checks.push(Check::new("p1_reproduces_b", same, "B' is a linear image of B"));
    }
    checks
}

fn record_value(rec: &DescendantRecord) -> Value {
    let mut v = to_value(rec);
    let complements: Vec<Vec<String>> = rec
        .filtration
        .weights
        .iter()
        .zip(&rec.sections)
        .fold(vec![Vec::new(); rec.filtration.complement_dims.len()], |mut acc, (&w, sec)| {
            acc[w].push(sec.parts[0].to_text());
            acc
        });
    v["sections_by_weight"] = to_value(&complements);
    v["node_at_weight_one_point"] = Value::Bool(node_at_weight_one_point(rec));
    v
}

fn descend(cfg: DescendCfg, s: &Settings) -> CliResult<Output> {
    let (fam, b) = build_family(&cfg.family)?;
    let opts = descend_options(&cfg.family, cfg.samples, cfg.alt_seed, s);
    let mut records = Vec::new();
    let mut checks = Vec::new();
    let mut csv = String::new();
    for &p in &cfg.family.p_list {
        let rec = descendant(&fam, &b, p, &opts).context(&format!("descendant at p = {p}"))?;
        checks.extend(record_checks(&rec, &fam, &b));
        for (i, line) in rec.samples_csv().lines().enumerate() {
            if i == 0 && csv.is_empty() {
                csv.push_str("p,");
                csv.push_str(line);
                csv.push('\n');
            } else if i > 0 {
                csv.push_str(&format!("{p},{line}\n"));
            }
        }
        records.push(rec);
    }
    let result = json!({ "records": records.iter().map(record_value).collect::<Vec<_>>() });
    Ok(Output::new("descend", s.seed, result, checks, csv))
}

/// Whether `rec` has one node, lying at the coordinate point of the single weight-one section.
pub fn node_at_weight_one_point(rec: &DescendantRecord) -> bool {
    let top: Vec<usize> = rec.filtration.weights.iter().enumerate().filter(|(_, &w)| w == 1).map(|(i, _)| i).collect();
    rec.nodes.len() == 1
        && top.len() == 1
        && rec.nodes[0].exact.as_ref().is_some_and(|n| n.iter().enumerate().all(|(i, c)| c.is_zero() != (i == top[0])))
}

/// Whether the weight-one sections span exactly `P`.
pub fn weight_one_is_p(rec: &DescendantRecord, p: &HomogeneousForm) -> bool {
    let ones: Vec<Vec<Scalar>> = rec.filtration.weights.iter().zip(&rec.sections).filter(|(&w, _)| w == 1).map(|(_, s)| s.parts[0].to_vector()).collect();
    same_span(&ones, &[p.to_vector()])
}

#[derive(Deserialize)]
struct ComposeCfg {
    #[serde(flatten)]
    family: FamilyInput,
    p: u32,
    q: u32,
    #[serde(default)]
    alt_seed: Option<u64>,
}

fn compose(cfg: ComposeCfg, s: &Settings) -> CliResult<Output> {
    let (fam, b) = build_family(&cfg.family)?;
    let r = composition_check(&fam, &b, cfg.p, cfg.q, cfg.alt_seed).context("composition")?;
    let mut checks = vec![Check::new("invariants_agree", r.invariants_agree, format!("composed {:?} vs direct {:?}", r.composed, r.direct))];
    if let Some(m) = r.linear_match {
        checks.push(Check::new("linear_match", m, "composed and direct B' differ by a projective-linear map"));
    }
    Ok(Output::new("compose-check", s.seed, to_value(&r), checks, String::new()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivariantCfg {
    weights: Vec<i64>,
    exponents: Vec<u32>,
    p_list: Vec<u32>,
}

#[derive(Deserialize)]
struct WebCfg {
    #[serde(flatten)]
    family: FamilyInput,
    #[serde(default)]
    arcs: Vec<SuppliedArc>,
    #[serde(default)]
    samples: usize,
    #[serde(default)]
    equivariant: Option<EquivariantCfg>,
    #[serde(default)]
    quadrature: Option<QuadratureSpec>,
}

fn web(cfg: WebCfg, s: &Settings) -> CliResult<Output> {
    let (fam, b) = build_family(&cfg.family)?;
    let opts = descend_options(&cfg.family, cfg.samples, None, s);
    let spec = s.quadrature(cfg.quadrature)?;
    let w = web_prefix(&fam, &b, &cfg.family.p_list, &cfg.arcs, &opts, &spec).context("web prefix")?;
    let mut checks = Vec::new();
    for t in &w.terms {
        checks.extend(record_checks(&t.record, &fam, &b));
    }
    checks.push(Check::new(
        "admissibility",
        !w.base_admissible || w.terms.iter().all(|t| t.admissible),
        format!("base {} terms {:?}", w.base_admissible, w.terms.iter().map(|t| t.admissible).collect::<Vec<_>>()),
    ));
    checks.push(Check::new("psi_consistent", w.consistent.iter().all(|c| c.unwrap_or(true)), format!("{:?}", w.consistent)));
    let ordered = w.bracket.upper.is_none_or(|u| w.bracket.lower <= u);
    checks.push(Check::new("bracket_ordered", ordered, format!("[{}, {:?}]", w.bracket.lower, w.bracket.upper)));
    let mut result = json!({ "web": {
        "base_ratio": w.base_ratio,
        "base_admissible": w.base_admissible,
        "ratios_nondecreasing": w.ratios_nondecreasing,
        "consistent": w.consistent,
        "bracket": to_value(&w.bracket),
        "terms": w.terms.iter().map(|t| {
            let mut v = json!({ "p": t.p, "ratio": t.ratio, "admissible": t.admissible, "probe": to_value(&t.probe), "record": record_value(&t.record) });
            v["psi_lower"] = to_value(&t).get("psi_lower").cloned().unwrap_or(Value::Null);
            v
        }).collect::<Vec<_>>(),
    }});
    if let Some(e) = cfg.equivariant {
        let c = equivariant_cross_check(&e.weights, &e.exponents, &e.p_list);
        checks.push(Check::new("norm_scaling", c.norm_scaling, "||A_p|| = p ||A_1||"));
        checks.push(Check::new("scaled_weight_constant", c.scaled_constant, "p^-1 nu(W_p)/||A_p|| is independent of p"));
        result["equivariant"] = to_value(&c);
    }
    Ok(Output::new("web", s.seed, result, checks, String::new()))
}

