//! Runs the analyses of a scenario and renders the JSON report.
//!
//! Rationals are written as canonical strings and every collection has a
//! fixed order, so the same scenario always yields the same bytes.

use num_traits::Signed;
use serde_json::{json, Value};

use super::scenario::{self, at, AnalysisDoc, Scenario, ScenarioError};
use crate::conditional::{best_conditional, omega_x_sets, restrict, StochasticContinuity};
use crate::continuity::profile::norm_levels;
use crate::continuity::{
    alpha_oracle, alpha_t, check_clause, check_sequential, f_profile, transform_witness, AlphaProfile,
    CheckResult, Clause, Method, ProbeSet, WitnessBundle,
};
use crate::exact::{self, Rational};
use crate::graph::{default_tau_grid, vetgf_check, LimitStatus};
use crate::prob_core::Event;
use crate::random_operator::{OpNorm, RandomOperator};
use crate::randomization::RandomVector;
use crate::sequences::SequenceSpec;
use crate::spaces::{SeqVector, SpaceDescriptor};
use crate::Error;

pub const SCHEMA_VERSION: &str = "1";

/// Failure while running analyses.
#[derive(Debug)]
pub enum RunError {
    Scenario(ScenarioError),
    Invariant(String),
}

impl From<ScenarioError> for RunError {
    fn from(e: ScenarioError) -> Self {
        RunError::Scenario(e)
    }
}

fn lift(path: &str) -> impl Fn(Error) -> RunError + '_ {
    move |e| match e {
        Error::Invariant(msg) => RunError::Invariant(format!("{path}: {msg}")),
        other => RunError::Scenario(at(path, other)),
    }
}

fn q(r: &Rational) -> Value {
    Value::String(exact::fmt(r))
}

fn qs(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(q).collect())
}

fn opt_q(r: &Option<Rational>) -> Value {
    r.as_ref().map_or(Value::Null, q)
}

fn vector(v: &SeqVector) -> Value {
    serde_json::to_value(scenario::VecLit::from_vector(v)).expect("vectors serialize")
}

fn random_vector(y: &RandomVector) -> Value {
    Value::Array(
        y.space()
            .atom_ids()
            .zip(y.values())
            .map(|(id, v)| json!({ "atom": id, "value": vector(v) }))
            .collect(),
    )
}

fn event(e: &Event) -> Value {
    Value::Array(e.ids().map(|id| Value::String(id.into())).collect())
}

fn norm(n: &OpNorm) -> Value {
    match n {
        OpNorm::Finite(v) => q(v),
        OpNorm::Infinite => Value::String("inf".into()),
    }
}

fn space_name(s: SpaceDescriptor) -> String {
    match s {
        SpaceDescriptor::C00 => "c00".into(),
        SpaceDescriptor::FiniteDim(d) => format!("finite_dim({d})"),
    }
}

fn basis(n: u64, domain: SpaceDescriptor) -> SeqVector {
    let n = domain.dimension().map_or(n, |d| n.min(d as u64));
    SeqVector::basis(n, domain).expect("index clamped to the domain")
}

/// Grids after defaults are filled in.
struct Grids {
    m: Vec<Rational>,
    eps: Vec<Rational>,
    tau: Vec<Rational>,
}

impl Grids {
    fn of(sc: &Scenario) -> Grids {
        let g = &sc.doc.grids;
        let unwrap = |v: &Option<Vec<scenario::Q>>| v.as_ref().map(|v| v.iter().map(|x| x.0.clone()).collect());
        Grids {
            m: unwrap(&g.m).unwrap_or_else(|| norm_levels(&sc.operator.linear_part())),
            eps: unwrap(&g.eps).unwrap_or_else(|| (1..=9).map(|k| exact::ratio(k, 10)).collect()),
            tau: unwrap(&g.tau).unwrap_or_else(default_tau_grid),
        }
    }
}

struct Ctx<'a> {
    t: &'a RandomOperator,
    probes: &'a ProbeSet,
    grids: Grids,
    path: String,
}

/// One analysis result: its report object and a one-line summary.
type Outcome = (Value, String);

fn method_fields(p: &AlphaProfile) -> (Value, Value, Value) {
    let name = match p.method {
        Method::Exact => "exact",
        Method::Bracket { .. } => "bracket",
    };
    (Value::String(name.into()), q(p.lower()), q(p.upper()))
}

fn alpha_label(p: &AlphaProfile) -> String {
    if p.lower() == p.upper() {
        exact::fmt(p.lower())
    } else {
        format!("[{}, {}]", p.lower(), p.upper())
    }
}

fn run_alpha(c: &Ctx) -> Result<Outcome, RunError> {
    let p = alpha_t(c.t).map_err(lift(&c.path))?;
    let oracle = alpha_oracle(c.t, &c.grids.eps, &c.grids.m, c.probes).map_err(lift(&c.path))?;
    let (method, lower, upper) = method_fields(&p);
    let v = json!({
        "kind": "alpha",
        "alpha_t": if p.lower() == p.upper() { q(p.lower()) } else { Value::Null },
        "method": method,
        "alpha_lower": lower,
        "alpha_upper": upper,
        "breakpoints": p.breakpoints.iter().map(|(m, f)| json!({"m": q(m), "value": q(f)})).collect::<Vec<_>>(),
        "oracle_alpha": q(&oracle),
        "oracle_eps_grid": qs(&c.grids.eps),
        "oracle_m_grid": qs(&c.grids.m),
    });
    let s = format!("alpha: alpha_T = {} ({}); grid oracle {}", alpha_label(&p), v["method"].as_str().unwrap(), oracle);
    Ok((v, s))
}

fn run_profile(c: &Ctx) -> Result<Outcome, RunError> {
    let p = f_profile(c.t, c.probes, &c.grids.m).map_err(lift(&c.path))?;
    let (method, lower, upper) = method_fields(&p);
    let v = json!({
        "kind": "profile",
        "method": method,
        "alpha_lower": lower,
        "alpha_upper": upper,
        "grid": p.grid.iter().map(|g| json!({"m": q(&g.m), "lower": q(&g.lower), "upper": q(&g.upper)})).collect::<Vec<_>>(),
    });
    let s = format!("profile: {} grid points, alpha_T = {}", p.grid.len(), alpha_label(&p));
    Ok((v, s))
}

fn check_json(r: &CheckResult) -> Value {
    match r {
        CheckResult::Witness { m, delta, checked } => json!({
            "result": "witness", "m": opt_q(m), "delta": opt_q(delta), "checked": checked,
        }),
        CheckResult::Refuted { points } => json!({
            "result": "refuted",
            "points": points.iter().map(|p| json!({
                "candidate": q(&p.candidate),
                "x": vector(&p.x),
                "y": p.y.as_ref().map_or(Value::Null, vector),
                "prob": q(&p.prob),
            })).collect::<Vec<_>>(),
        }),
        CheckResult::Inconclusive { reason } => json!({ "result": "inconclusive", "reason": reason }),
    }
}

/// Walks the witness of clause vii once around the cycle, re-checking each step.
fn run_cycle(c: &Ctx, start: &WitnessBundle) -> Result<Value, RunError> {
    let mut bundle = start.clone();
    let mut steps = Vec::new();
    let mut clause = Clause::Vii;
    for _ in 0..Clause::ALL.len() {
        let next = clause.next();
        bundle = transform_witness(clause, next, &bundle).map_err(lift(&c.path))?;
        let check = check_clause(c.t, next, &bundle, c.probes).map_err(lift(&c.path))?;
        if !check.is_witness() {
            return Err(RunError::Invariant(format!(
                "{}: transformed witness for clause {next} at eps = {} does not hold",
                c.path, bundle.eps
            )));
        }
        steps.push(json!({
            "from": clause.name(), "to": next.name(), "m": opt_q(&bundle.m), "delta": opt_q(&bundle.delta),
        }));
        clause = next;
    }
    Ok(Value::Array(steps))
}

fn run_clauses(
    c: &Ctx,
    eps: &Option<Vec<scenario::Q>>,
    tau: &Option<scenario::Q>,
    point: &Option<scenario::VecLit>,
) -> Result<Outcome, RunError> {
    let eps: Vec<Rational> = eps.as_ref().map_or_else(|| c.grids.eps.clone(), |v| v.iter().map(|x| x.0.clone()).collect());
    let tau = tau.as_ref().map_or_else(exact::one, |t| t.0.clone());
    let point = match point {
        Some(p) => Some(scenario::vector(p, c.t.domain(), &format!("{}.point", c.path))?),
        None => None,
    };
    let mut levels = Vec::new();
    let mut holding = 0;
    for e in &eps {
        let mut base = WitnessBundle::new(tau.clone(), e.clone());
        if let Some(p) = &point {
            base = base.at_point(p.clone());
        }
        let mut clauses = serde_json::Map::new();
        let mut results = Vec::new();
        for cl in Clause::ALL {
            let r = check_clause(c.t, cl, &base, c.probes).map_err(lift(&c.path))?;
            clauses.insert(cl.name().into(), check_json(&r));
            results.push(r);
        }
        let witnesses = results.iter().filter(|r| r.is_witness()).count();
        let refuted = results.iter().filter(|r| r.is_refuted()).count();
        if witnesses != 0 && refuted != 0 {
            return Err(RunError::Invariant(format!(
                "{}: clauses disagree at eps = {e} ({witnesses} hold, {refuted} refuted)",
                c.path
            )));
        }
        let cycle = match &results[6] {
            CheckResult::Witness { m: Some(m), .. } => run_cycle(c, &base.clone().with_m(m.clone()))?,
            _ => Value::Null,
        };
        if witnesses == Clause::ALL.len() {
            holding += 1;
        }
        let status = if witnesses == Clause::ALL.len() {
            "all_hold"
        } else if refuted == Clause::ALL.len() {
            "all_refuted"
        } else {
            "mixed_inconclusive"
        };
        levels.push(json!({ "eps": q(e), "status": status, "clauses": clauses, "cycle": cycle }));
    }
    let v = json!({
        "kind": "clauses",
        "tau": q(&tau),
        "point": point.as_ref().map_or(Value::Null, vector),
        "levels": levels,
    });
    let s = format!("clauses: all seven hold at {holding} of {} levels", eps.len());
    Ok((v, s))
}

fn run_conditional(c: &Ctx, inputs: &Option<Vec<scenario::VecLit>>) -> Result<Outcome, RunError> {
    let (best, p) = best_conditional(c.t);
    let continuity = if best.is_empty() {
        json!({ "status": "empty_event" })
    } else {
        match restrict(c.t, &best).map_err(lift(&c.path))?.is_stochastically_continuous() {
            StochasticContinuity::Continuous { m } => json!({ "status": "continuous", "m": q(&m) }),
            StochasticContinuity::Discontinuous { atom } => {
                return Err(RunError::Invariant(format!(
                    "{}: best conditional event has unbounded atom {atom}",
                    c.path
                )))
            }
        }
    };
    let lin = c.t.linear_part();
    let levels = norm_levels(&lin);
    let mut eps_seq = Vec::new();
    let mut ms = Vec::new();
    for e in c.grids.eps.iter().filter(|e| **e < p) {
        let m = levels
            .iter()
            .find(|m| lin.bounded_event(m).is_ok_and(|b| b.prob() > *e))
            .expect("a level clears every eps below the finite-norm mass");
        eps_seq.push(e.clone());
        ms.push(m.clone());
    }
    let xs: Vec<SeqVector> = match inputs {
        Some(xs) => xs
            .iter()
            .enumerate()
            .map(|(j, x)| scenario::vector(x, c.t.domain(), &format!("{}.inputs[{j}]", c.path)))
            .collect::<Result<_, _>>()?,
        None => vec![basis(1, c.t.domain())],
    };
    let mut chains = Vec::new();
    for (j, x) in xs.iter().enumerate() {
        if eps_seq.is_empty() {
            break;
        }
        let path = format!("{}.inputs[{j}]", c.path);
        let chain = omega_x_sets(c.t, x, &eps_seq, &ms).map_err(lift(&path))?;
        chains.push(json!({
            "x": vector(x),
            "steps": chain.steps.iter().map(|s| json!({
                "eps": q(&s.eps), "m": q(&s.m), "event": event(&s.event),
                "union": event(&s.union), "union_prob": q(&s.union_prob),
            })).collect::<Vec<_>>(),
            "limit": event(&chain.limit),
            "limit_prob": q(&chain.limit_prob),
        }));
    }
    let v = json!({
        "kind": "conditional",
        "best_event": event(&best),
        "best_prob": q(&p),
        "continuity": continuity,
        "omega_x": chains,
    });
    let s = format!("conditional: largest continuous conditioning event has probability {p}");
    Ok((v, s))
}

fn specs_of(c: &Ctx, specs: &Option<Vec<scenario::SeqDoc>>) -> Result<Vec<SequenceSpec>, RunError> {
    match specs {
        Some(v) => v
            .iter()
            .enumerate()
            .map(|(j, s)| Ok(scenario::sequence(s, c.t.domain(), &format!("{}.specs[{j}]", c.path))?))
            .collect(),
        None => Ok(SequenceSpec::defaults(c.t.domain())),
    }
}

fn run_closed_graph(c: &Ctx, specs: &Option<Vec<scenario::SeqDoc>>) -> Result<Outcome, RunError> {
    let specs = specs_of(c, specs)?;
    let r = vetgf_check(c.t, &specs).map_err(lift(&c.path))?;
    let probes: Vec<Value> = r
        .graph
        .probes
        .iter()
        .map(|p| {
            let limit = match &p.limit {
                LimitStatus::Detected { y, p_zero, from_index } => json!({
                    "status": "detected", "y": random_vector(y), "p_zero": q(p_zero), "from_index": from_index,
                }),
                LimitStatus::Diverges => json!({ "status": "diverges" }),
                LimitStatus::Undecided => json!({ "status": "undecided" }),
            };
            json!({
                "spec": p.spec.label(),
                "limit": limit,
                "first_terms": p.first_terms.iter().map(random_vector).collect::<Vec<_>>(),
            })
        })
        .collect();
    let (method, lower, upper) = method_fields(&r.alpha);
    let v = json!({
        "kind": "closed_graph",
        "alpha_method": method,
        "alpha_lower": lower,
        "alpha_upper": upper,
        "closed_graph_upper": q(&r.graph.alpha_upper),
        "forward_holds": r.forward_holds,
        "status": r.status.name(),
        "domain_complete": r.domain_complete,
        "note": r.note,
        "probes": probes,
    });
    let s = format!(
        "closed_graph: {} (alpha_T = {}, probed bound {})",
        r.status.name(),
        alpha_label(&r.alpha),
        r.graph.alpha_upper
    );
    Ok((v, s))
}

fn run_linearity(c: &Ctx, inputs: &Option<Vec<scenario::LinearityInput>>) -> Result<Outcome, RunError> {
    let d = c.t.domain();
    let cases: Vec<(SeqVector, SeqVector, Rational, Rational)> = match inputs {
        Some(v) => v
            .iter()
            .enumerate()
            .map(|(j, inp)| {
                let p = format!("{}.inputs[{j}]", c.path);
                Ok((
                    scenario::vector(&inp.x, d, &format!("{p}.x"))?,
                    scenario::vector(&inp.y, d, &format!("{p}.y"))?,
                    inp.alpha.0.clone(),
                    inp.beta.0.clone(),
                ))
            })
            .collect::<Result<_, ScenarioError>>()?,
        None => vec![
            (basis(1, d), basis(2, d), exact::one(), exact::one()),
            (basis(1, d), basis(3, d), exact::int(2), exact::int(-1)),
        ],
    };
    let mut out = Vec::new();
    let mut min = exact::one();
    for (x, y, a, b) in &cases {
        let p = c.t.linearity_probability(x, y, a, b).map_err(lift(&c.path))?;
        min = min.min(p.clone());
        out.push(json!({ "x": vector(x), "y": vector(y), "alpha": q(a), "beta": q(b), "probability": q(&p) }));
    }
    let v = json!({ "kind": "linearity", "inputs": out, "min_probability": q(&min) });
    let s = format!("linearity: minimum probability {min} over {} inputs", cases.len());
    Ok((v, s))
}

fn run_sequential(c: &Ctx, spec: &Option<scenario::SeqDoc>, alpha: &Option<scenario::Q>) -> Result<Outcome, RunError> {
    let d = c.t.domain();
    let spec = match spec {
        Some(s) => scenario::sequence(s, d, &format!("{}.spec", c.path))?,
        None if d == SpaceDescriptor::C00 => SequenceSpec::scaled_basis(1),
        None => SequenceSpec::ScaledFixed(basis(1, d)),
    };
    let alpha = match alpha {
        Some(a) => a.0.clone(),
        None => {
            let a = alpha_t(c.t).map_err(lift(&c.path))?.lower().clone();
            if a.is_positive() {
                a
            } else {
                exact::one()
            }
        }
    };
    let r = check_sequential(c.t, &spec, &alpha, &c.grids.tau).map_err(lift(&c.path))?;
    let per_tau: Vec<Value> = r
        .per_tau
        .iter()
        .map(|p| {
            json!({
                "tau": q(&p.tau), "liminf_lower": q(&p.liminf_lower), "liminf_upper": q(&p.liminf_upper),
                "holds": p.holds,
            })
        })
        .collect();
    let verdict = if r.refutes_level {
        "refuted"
    } else if r.affirmative_caveat {
        "passes_single_sequence"
    } else {
        "undecided"
    };
    let v = json!({
        "kind": "sequential",
        "spec": spec.label(),
        "alpha": q(&alpha),
        "verdict": verdict,
        "refutes_level": r.refutes_level,
        "affirmative_caveat": r.affirmative_caveat,
        "per_tau": per_tau,
    });
    let s = format!("sequential: {verdict} at alpha = {alpha} along {}", spec.label());
    Ok((v, s))
}

fn run_one(c: &Ctx, a: &AnalysisDoc) -> Result<Outcome, RunError> {
    match a {
        AnalysisDoc::Alpha => run_alpha(c),
        AnalysisDoc::Profile => run_profile(c),
        AnalysisDoc::Clauses { eps, tau, point } => run_clauses(c, eps, tau, point),
        AnalysisDoc::Conditional { inputs } => run_conditional(c, inputs),
        AnalysisDoc::ClosedGraph { specs } => run_closed_graph(c, specs),
        AnalysisDoc::Linearity { inputs } => run_linearity(c, inputs),
        AnalysisDoc::Sequential { spec, alpha } => run_sequential(c, spec, alpha),
    }
}

/// Which analyses to run and with which parameters.
///
/// Names select the scenario's own entry when present and the default
/// otherwise; no names means the scenario's list, or all analyses when it
/// is empty.
pub fn select(sc: &Scenario, names: &[String]) -> Result<Vec<(String, AnalysisDoc)>, ScenarioError> {
    if names.is_empty() {
        if sc.doc.analyses.is_empty() {
            return Ok(scenario::ANALYSIS_NAMES
                .iter()
                .map(|n| (format!("analysis:{n}"), AnalysisDoc::default_for(n).unwrap()))
                .collect());
        }
        return Ok(sc
            .doc
            .analyses
            .iter()
            .enumerate()
            .map(|(i, a)| (format!("analyses[{i}]"), a.clone()))
            .collect());
    }
    names
        .iter()
        .map(|n| {
            if let Some(i) = sc.doc.analyses.iter().position(|a| a.name() == n) {
                return Ok((format!("analyses[{i}]"), sc.doc.analyses[i].clone()));
            }
            AnalysisDoc::default_for(n)
                .map(|a| (format!("analysis:{n}"), a))
                .ok_or_else(|| {
                    at(
                        "--analysis",
                        format!("unknown analysis `{n}`; expected one of {}", scenario::ANALYSIS_NAMES.join(", ")),
                    )
                })
        })
        .collect()
}

/// The full report and one summary line per analysis.
pub fn build(sc: &Scenario, names: &[String]) -> Result<(Value, Vec<String>), RunError> {
    let selected = select(sc, names)?;
    let t = &sc.operator;
    let mut results = Vec::new();
    let mut lines = Vec::new();
    for (path, a) in &selected {
        let ctx = Ctx {
            t,
            probes: &sc.probes,
            grids: Grids::of(sc),
            path: path.clone(),
        };
        let (v, s) = run_one(&ctx, a)?;
        results.push(v);
        lines.push(s);
    }
    let atoms: Vec<Value> = t
        .space()
        .atom_ids()
        .zip(t.space().masses())
        .zip(t.linear_part().op_norms())
        .map(|((id, m), n)| json!({ "id": id, "mass": q(m), "op_norm": norm(&n) }))
        .collect();
    let corruption = t.corruption().map_or(Value::Null, |c| {
        json!({ "event": event(&c.event), "offset": vector(&c.offset) })
    });
    let finite = t.linear_part().finite_norm_event();
    let cfg = sc.probes.config;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": serde_json::to_value(&sc.doc).expect("scenario documents serialize"),
        "summary": {
            "name": sc.doc.name,
            "domain": space_name(t.domain()),
            "codomain": space_name(t.codomain()),
            "domain_complete": t.domain().is_complete(),
            "atoms": atoms,
            "finite_norm_event": event(&finite),
            "finite_norm_prob": q(&finite.prob()),
            "corruption": corruption,
            "diagonal_only": t.is_diagonal_only(),
            "probe_config": { "basis_max": cfg.basis_max, "comb_width": cfg.comb_width, "window_len": cfg.window_len },
        },
        "results": results,
    });
    Ok((report, lines))
}

/// Report text: pretty JSON with sorted keys and a trailing newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
