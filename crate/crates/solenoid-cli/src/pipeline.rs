//! Builds the JSON reports for each subcommand.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};
use solenoid::building_blocks::{stabilize, PassageSystem, StabilizeError, StabilizeOptions};
use solenoid::dihedral::{
    build_diagram, castle, check_measure, conjugacy_check, freeness_check, fundamental_domain, invariant_measure, lambda_check, minimality_check,
    rokhlin_pair, DihedralError, Involution, MinimalityVerdict, OrderedBratteli,
};
use solenoid::ktheory::{
    k0_heteroclinic, k1_heteroclinic, k_inverse, kunneth, occurrence_matrix, stationary_compare_2x2, verify_z2_obstruction, AbelianGroup, IntegerMatrix,
    KPair, KTheoryError,
};
use solenoid::pl_model::{decay_checks, pl_realization, PLError};
use solenoid::presolenoid::{orientation_check, parse_solenoid_file, validate_axioms, AxiomOptions, WrappingRule};

use crate::cache::{sha256_hex, StabilizeCache};
use crate::error::CliError;
use crate::SCHEMA;

/// Depth of the finite-depth K-theory of the inverse algebra.
const INVERSE_DEPTH: usize = 3;
/// Depth of the parity obstruction check.
const PARITY_DEPTH: usize = 3;
/// Exhaustive dihedral checks run at the deepest level with at most this many cylinders.
const EXHAUSTIVE_CYLINDERS: u128 = 200_000;
const MEASURE_MAX_DEPTH: usize = 5;
const FREENESS_SAMPLES: usize = 200;
const CONJUGACY_SAMPLES: usize = 100;
const CONJUGACY_BOUND: i64 = 3;
const CASTLE_HEIGHT: u128 = 4;
const DECAY_LEVELS: usize = 10;
const DECAY_SAMPLES: usize = 20;

pub struct Options {
    pub power_bound: u32,
    pub precision: u32,
    pub depth: usize,
    pub seed: u64,
    pub timings: bool,
    pub cache: Option<StabilizeCache>,
}

impl Options {
    fn axioms(&self) -> AxiomOptions {
        AxiomOptions { precision: self.precision, ..AxiomOptions::default() }
    }

    fn stabilize(&self) -> StabilizeOptions {
        StabilizeOptions { power_bound: self.power_bound, axioms: self.axioms(), ..StabilizeOptions::default() }
    }
}

/// A parsed input file together with its name and raw text.
pub struct Input {
    pub name: String,
    pub source: String,
    pub rule: WrappingRule,
}

impl Input {
    pub fn parse(name: &str, source: String) -> Result<Self, CliError> {
        let rule = parse_solenoid_file(&source).map_err(|e| CliError::Usage(format!("{name}: {e}")))?;
        Ok(Input { name: name.to_string(), source, rule })
    }

    fn echo(&self) -> Value {
        let g = self.rule.graph();
        json!({
            "name": self.name,
            "sha256": sha256_hex(self.source.as_bytes()),
            "vertices": g.vertices.len(),
            "edges": g.edge_count(),
            "rule": self.rule.to_dsl(),
        })
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// A section whose failure is reported in place, unless it is an internal inconsistency.
fn section<T: Serialize, E: Display>(r: Result<T, E>, consistency: impl Fn(&E) -> bool) -> Result<Value, CliError> {
    match r {
        Ok(v) => Ok(to_value(&v)),
        Err(e) if consistency(&e) => Err(CliError::Consistency(e.to_string())),
        Err(e) => Ok(json!({ "skipped": e.to_string() })),
    }
}

fn dihedral_consistency(e: &DihedralError) -> bool {
    matches!(e, DihedralError::Consistency(_))
}

fn ktheory_consistency(e: &KTheoryError) -> bool {
    matches!(e, KTheoryError::Consistency(_))
}

fn with_provenance(provenance: &str, mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("provenance".into(), json!(provenance));
        v
    } else {
        json!({ "provenance": provenance, "value": v })
    }
}

fn empirical(seed: u64, v: Value) -> Value {
    let mut v = with_provenance("empirical", v);
    v["seed"] = json!(seed);
    v
}

struct Timer {
    enabled: bool,
    marks: BTreeMap<String, u128>,
}

impl Timer {
    fn time<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            self.marks.insert(label.to_string(), start.elapsed().as_millis());
        }
        out
    }

    fn attach(self, report: &mut Value) {
        if self.enabled {
            report["timings_ms"] = to_value(&self.marks);
        }
    }
}

fn header(command: &str, input: Option<&Input>, opts: &Options) -> Value {
    let mut v = json!({
        "schema": SCHEMA,
        "command": command,
        "tool": { "name": "solenoid", "version": env!("CARGO_PKG_VERSION") },
        "options": {
            "power_bound": opts.power_bound,
            "precision_bits": opts.precision,
            "depth": opts.depth,
            "seed": opts.seed,
        },
    });
    if let Some(i) = input {
        v["input"] = i.echo();
    }
    v
}

/// Axioms and orientation; fails with a validation error (carrying the report) when an
/// axiom fails.
fn validation_sections(input: &Input, opts: &Options, report: &mut Value, timer: &mut Timer) -> Result<bool, CliError> {
    let axioms = timer.time("axioms", || validate_axioms(&input.rule, &opts.axioms()));
    let mut av = to_value(&axioms);
    av["pass"] = json!(axioms.all_pass());
    av["failures"] = json!(axioms.failures());
    av["provenance"] = json!({
        "markov": "exact", "nonfolding": "exact", "mixing": "exact", "expansion": "interval", "flattening": "exact",
    });
    report["axioms"] = av;
    let o = orientation_check(&input.rule);
    let mut ov = with_provenance("exact", to_value(&o));
    ov["oriented"] = json!(o.oriented());
    report["orientation"] = ov;
    Ok(axioms.all_pass())
}

fn validation_failure(report: Value) -> CliError {
    let failures: Vec<String> =
        report["axioms"]["failures"].as_array().map(|a| a.iter().filter_map(|x| x.as_str().map(String::from)).collect()).unwrap_or_default();
    CliError::Validation { message: format!("axioms fail: {}", failures.join(", ")), report: Some(report) }
}

fn passages_of(input: &Input, opts: &Options) -> Result<PassageSystem, CliError> {
    let r = match &opts.cache {
        Some(c) => c.stabilize(&input.source, &input.rule, &opts.stabilize()),
        None => stabilize(&input.rule, &opts.stabilize()),
    };
    r.map_err(|e| match e {
        StabilizeError::Consistency(m) => CliError::Consistency(m),
        other => CliError::Validation { message: other.to_string(), report: None },
    })
}

/// Header, axioms and orientation. A rule failing the axioms ends the run with its report.
fn validated(command: &str, input: &Input, opts: &Options) -> Result<(Value, Timer, bool), CliError> {
    let mut report = header(command, Some(input), opts);
    let mut timer = Timer { enabled: opts.timings, marks: BTreeMap::new() };
    if !validation_sections(input, opts, &mut report, &mut timer)? {
        timer.attach(&mut report);
        return Err(validation_failure(report));
    }
    let oriented = report["orientation"]["oriented"].as_bool().unwrap_or(false);
    Ok((report, timer, oriented))
}

pub fn validate(input: &Input, opts: &Options) -> Result<Value, CliError> {
    let (mut report, timer, _) = validated("validate", input, opts)?;
    timer.attach(&mut report);
    Ok(report)
}

fn ktheory_sections(input: &Input, ps: &PassageSystem, oriented: bool, timer: &mut Timer) -> Result<Value, CliError> {
    let k1 = timer.time("k1_heteroclinic", || k1_heteroclinic(ps)).map_err(|e| CliError::Consistency(e.to_string()))?;
    let k0 = timer.time("k0_heteroclinic", || k0_heteroclinic(ps)).map_err(|e| CliError::Consistency(e.to_string()))?;
    let heteroclinic = with_provenance("exact", json!({ "k0": to_value(&k0), "k1": to_value(&k1) }));
    let inverse = timer.time("k_inverse", || k_inverse(&input.rule, ps, INVERSE_DEPTH));
    let homoclinic = match &inverse {
        Ok(inv) => {
            let left = KPair { k0: AbelianGroup::stationary(k0.group.clone()), k1: k1.clone() };
            let right = KPair { k0: inv.k0.clone(), k1: inv.k1.clone() };
            let pair = kunneth(&left, &right);
            let note = if pair.k0.unresolved.is_empty() && pair.k1.unresolved.is_empty() {
                "exact"
            } else {
                "exact, with unresolved summands carried symbolically"
            };
            with_provenance(note, to_value(&pair))
        }
        Err(e) => json!({ "skipped": format!("needs the inverse-algebra K-theory: {e}") }),
    };
    let inverse = section(inverse, ktheory_consistency)?;
    let mut v = json!({
        "heteroclinic": heteroclinic,
        "inverse": with_provenance(if oriented { "exact" } else { "exact torsion; free part at finite depth" }, inverse),
        "homoclinic": homoclinic,
    });
    if !oriented {
        let parity = timer.time("parity", || build_diagram(ps).map_err(|e| KTheoryError::Precondition(e.to_string())).and_then(|d| verify_z2_obstruction(&d, PARITY_DEPTH)));
        v["parity_obstruction"] = with_provenance("exact", parity_summary(parity)?);
    }
    Ok(v)
}

fn parity_summary(r: Result<solenoid::ktheory::Z2Report, KTheoryError>) -> Result<Value, CliError> {
    match r {
        Ok(z) => Ok(json!({
            "depth": z.depth,
            "rhs": z.rhs,
            "cylinders": z.cylinders,
            "constraints": z.constraints,
            "components": z.components,
            "unsat": z.is_unsat(),
        })),
        Err(e) if ktheory_consistency(&e) => Err(CliError::Consistency(e.to_string())),
        Err(e) => Ok(json!({ "skipped": e.to_string() })),
    }
}

/// Deepest level `≤ max` whose cylinder count is at most `cap`.
fn affordable_depth(d: &OrderedBratteli, max: usize, cap: u128) -> usize {
    (0..=max).take_while(|&k| d.cylinder_count(k).is_ok_and(|c| c <= cap)).last().unwrap_or(0)
}

fn dihedral_sections(ps: &PassageSystem, oriented: bool, opts: &Options, timer: &mut Timer) -> Result<Value, CliError> {
    let d = match build_diagram(ps) {
        Ok(d) => d,
        Err(e) if dihedral_consistency(&e) => return Err(CliError::Consistency(e.to_string())),
        Err(e) => return Ok(json!({ "skipped": e.to_string() })),
    };
    let depth = opts.depth;
    let seed = opts.seed;
    let exhaustive = affordable_depth(&d, depth, EXHAUSTIVE_CYLINDERS);
    let mut v = json!({
        "diagram": with_provenance("exact", json!({
            "edges": d.edge_ids,
            "incidence": to_value(&d.incidence),
            "exit_depth": d.exit_depth,
            "normalization": to_value(&d.normalization),
            "cylinders_at_depth": d.cylinder_count(depth).map(|c| c.to_string()).unwrap_or_else(|e| e.to_string()),
        })),
        "exhaustive_depth": exhaustive,
    });
    v["freeness"] = empirical(seed, section(timer.time("freeness", || freeness_check(&d, depth, FREENESS_SAMPLES, seed)), dihedral_consistency)?);
    v["conjugacy"] =
        empirical(seed, section(timer.time("conjugacy", || conjugacy_check(&d, depth, CONJUGACY_SAMPLES, CONJUGACY_BOUND, seed)), dihedral_consistency)?);
    let minimality = timer.time("minimality", || minimality_check(&d, depth));
    let minimal = matches!(&minimality, Ok(m) if m.verdict == MinimalityVerdict::PhiMinimal);
    v["minimality"] = with_provenance("exact", section(minimality, dihedral_consistency)?);
    v["endpoint_pairs"] = with_provenance("exact", section(timer.time("lambda", || lambda_check(&d, exhaustive)), dihedral_consistency)?);
    let domain = timer.time("fundamental_domain", || fundamental_domain(&d, Involution::S, exhaustive.max(1)));
    v["fundamental_domain"] = with_provenance("exact", section(domain, dihedral_consistency)?);
    let measure = invariant_measure(&d);
    v["measure"] = match &measure {
        Ok(mu) => {
            // Checking depth k walks every cylinder of depth k + 1.
            let k = affordable_depth(&d, depth.min(MEASURE_MAX_DEPTH) + 1, EXHAUSTIVE_CYLINDERS).saturating_sub(1);
            let mut mv = with_provenance("exact", section(timer.time("measure", || check_measure(&d, mu, k)), dihedral_consistency)?);
            mv["weights"] = to_value(&mu.weights);
            mv["lambda"] = json!(mu.lambda);
            mv
        }
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    let castle_depth = (0..=d.max_depth()).find(|&k| (0..d.edge_count()).all(|c| d.len(k, c).is_ok_and(|l| l >= CASTLE_HEIGHT)));
    v["castle"] = match castle_depth {
        Some(k) => with_provenance("exact", section(timer.time("castle", || castle(&d, CASTLE_HEIGHT, k)), dihedral_consistency)?),
        None => json!({ "skipped": format!("no tabulated depth has towers of height {CASTLE_HEIGHT}") }),
    };
    v["rokhlin"] = match (&measure, minimal) {
        (Ok(mu), true) => {
            let eps = BigRational::new(BigInt::from(1), BigInt::from(4));
            with_provenance("exact", section(timer.time("rokhlin", || rokhlin_pair(&d, mu, &eps)), dihedral_consistency)?)
        }
        (Err(e), _) => json!({ "skipped": e.to_string() }),
        (_, false) => json!({ "skipped": "φ is not minimal" }),
    };
    if !oriented {
        v["parity_obstruction"] = with_provenance("exact", parity_summary(timer.time("parity", || verify_z2_obstruction(&d, PARITY_DEPTH)))?);
    }
    Ok(v)
}

fn pl_sections(input: &Input, opts: &Options, timer: &mut Timer) -> Result<Value, CliError> {
    let p = match pl_realization(&input.rule, opts.precision) {
        Ok(p) => p,
        Err(PLError::Consistency(m)) => return Err(CliError::Consistency(m)),
        Err(e) => return Ok(json!({ "skipped": e.to_string() })),
    };
    let decay = timer.time("decay", || decay_checks(&p, DECAY_LEVELS, DECAY_SAMPLES, opts.seed));
    let decay = match decay {
        Ok(r) => {
            let mut v = to_value(&r);
            v["provenance"] = json!({ "levels": "interval", "pairs": "empirical" });
            v
        }
        Err(PLError::Consistency(m)) => return Err(CliError::Consistency(m)),
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    Ok(json!({
        "realization": with_provenance("interval", to_value(&p)),
        "decay": decay,
    }))
}

/// The full pipeline.
pub fn analyze(input: &Input, opts: &Options) -> Result<Value, CliError> {
    let (mut report, mut timer, oriented) = validated("analyze", input, opts)?;
    let ps = timer.time("stabilize", || passages_of(input, opts))?;
    report["passages"] = with_provenance("exact", to_value(&ps.summary()));
    report["k_theory"] = ktheory_sections(input, &ps, oriented, &mut timer)?;
    report["dihedral"] = dihedral_sections(&ps, oriented, opts, &mut timer)?;
    report["pl_model"] = pl_sections(input, opts, &mut timer)?;
    timer.attach(&mut report);
    Ok(report)
}

pub fn ktheory(input: &Input, opts: &Options) -> Result<Value, CliError> {
    let (mut report, mut timer, oriented) = validated("ktheory", input, opts)?;
    let ps = timer.time("stabilize", || passages_of(input, opts))?;
    report["passages"] = with_provenance("exact", to_value(&ps.summary()));
    report["k_theory"] = ktheory_sections(input, &ps, oriented, &mut timer)?;
    timer.attach(&mut report);
    Ok(report)
}

pub fn dihedral(input: &Input, opts: &Options) -> Result<Value, CliError> {
    let (mut report, mut timer, oriented) = validated("dihedral", input, opts)?;
    let ps = timer.time("stabilize", || passages_of(input, opts))?;
    report["dihedral"] = dihedral_sections(&ps, oriented, opts, &mut timer)?;
    timer.attach(&mut report);
    Ok(report)
}

/// Which 2×2 stationary matrix `compare` reads off a rule file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Group {
    /// The letter-occurrence matrix, K₀ of the inverse algebra in the oriented case.
    Inverse,
    /// The endomorphism of the K₀ lattice of the heteroclinic algebra.
    Heteroclinic,
}

/// A file holding either a JSON matrix `[[a, b], [c, d]]` or a rule.
pub struct MatrixSource {
    pub name: String,
    pub text: String,
}

fn matrix_of(src: &MatrixSource, group: Group, opts: &Options) -> Result<(IntegerMatrix, &'static str), CliError> {
    if src.text.trim_start().starts_with('[') {
        let rows: Vec<Vec<i64>> =
            serde_json::from_str(&src.text).map_err(|e| CliError::Usage(format!("{}: not a JSON integer matrix: {e}", src.name)))?;
        if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(CliError::Usage(format!("{}: rows of unequal length", src.name)));
        }
        return Ok((IntegerMatrix::from_rows(&rows), "matrix file"));
    }
    let input = Input::parse(&src.name, src.text.clone())?;
    match group {
        Group::Inverse => Ok((occurrence_matrix(&input.rule), "occurrence matrix")),
        Group::Heteroclinic => {
            let ps = passages_of(&input, opts)?;
            let k0 = k0_heteroclinic(&ps).map_err(|e| CliError::Consistency(e.to_string()))?;
            Ok((k0.group.matrix, "heteroclinic K₀ endomorphism"))
        }
    }
}

pub fn compare(a: &MatrixSource, b: &MatrixSource, group: Group, opts: &Options) -> Result<Value, CliError> {
    let (ma, from_a) = matrix_of(a, group, opts)?;
    let (mb, from_b) = matrix_of(b, group, opts)?;
    let mut report = header("compare", None, opts);
    report["inputs"] = json!([
        { "name": a.name, "sha256": sha256_hex(a.text.as_bytes()), "matrix": to_value(&ma), "source": from_a },
        { "name": b.name, "sha256": sha256_hex(b.text.as_bytes()), "matrix": to_value(&mb), "source": from_b },
    ]);
    match stationary_compare_2x2(&ma, &mb) {
        Ok(c) => {
            report["comparison"] = with_provenance("exact", to_value(&c));
            Ok(report)
        }
        Err(KTheoryError::Consistency(m)) => Err(CliError::Consistency(m)),
        Err(e) => Err(CliError::Validation { message: e.to_string(), report: Some(report) }),
    }
}
