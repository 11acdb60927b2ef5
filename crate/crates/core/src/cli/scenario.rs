//! Scenario documents: JSON shape, canonical form and conversion to model
//! objects with path-tagged diagnostics.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::continuity::{ProbeConfig, ProbeSet};
use crate::exact::{self, Rational};
use crate::prob_core::FiniteProbSpace;
use crate::random_operator::{CoeffFamily, LinearMapRep, RandomOperator};
use crate::sequences::{PrefixTail, SequenceSpec};
use crate::spaces::{SeqVector, SpaceDescriptor};
use crate::Error;

/// Rational literal: `"p/q"`, `"p"`, a decimal string, or a JSON integer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&exact::fmt(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        match Raw::deserialize(d).map_err(|_| D::Error::custom("expected a rational string such as \"3/10\""))? {
            Raw::S(s) => exact::parse(&s).map(Q).map_err(D::Error::custom),
            Raw::I(i) => Ok(Q(exact::int(i))),
        }
    }
}

/// Sparse vector literal `{"3": "1/2"}`; indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VecLit(pub BTreeMap<u64, Rational>);

impl Serialize for VecLit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // zeros are kept: a zero table override differs from its tail
        let m: BTreeMap<u64, String> = self.0.iter().map(|(k, v)| (*k, exact::fmt(v))).collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VecLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, Q>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, v) in raw {
            let i: u64 = k
                .trim()
                .parse()
                .ok()
                .filter(|i| *i >= 1)
                .ok_or_else(|| D::Error::custom(format!("vector index `{k}` is not a positive integer")))?;
            if out.insert(i, v.0).is_some() {
                return Err(D::Error::custom(format!("vector index {i} given twice")));
            }
        }
        Ok(VecLit(out))
    }
}

impl VecLit {
    pub fn from_vector(v: &SeqVector) -> Self {
        VecLit(v.entries().clone())
    }

    fn to_vector(&self, space: SpaceDescriptor) -> crate::Result<SeqVector> {
        SeqVector::from_entries(space, self.0.iter().map(|(i, v)| (*i, v.clone())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub id: String,
    pub mass: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDoc {
    C00,
    FiniteDim { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffDoc {
    Constant { c: Q },
    Affine { a: Q, b: Q },
    Harmonic { a: Q, b: Q },
    Table { overrides: VecLit, tail: Box<CoeffDoc> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapDoc {
    Diagonal { coeff: CoeffDoc },
    RankOne { weights: CoeffDoc, output: VecLit },
    Matrix { rows: Vec<Vec<Q>> },
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub atom: String,
    pub map: MapDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionDoc {
    pub event: Vec<String>,
    pub offset: VecLit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDoc {
    Null,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SeqDoc {
    ScaledBasis {
        p: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<Q>,
    },
    ScaledFixed { v: VecLit },
    WindowSum { len: u64 },
    UserPrefix { terms: Vec<VecLit>, tail: TailDoc },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearityInput {
    pub x: VecLit,
    pub y: VecLit,
    pub alpha: Q,
    pub beta: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisDoc {
    Alpha,
    Profile,
    Clauses {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<Vec<Q>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<Q>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<VecLit>,
    },
    Conditional {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inputs: Option<Vec<VecLit>>,
    },
    ClosedGraph {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        specs: Option<Vec<SeqDoc>>,
    },
    Linearity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inputs: Option<Vec<LinearityInput>>,
    },
    Sequential {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spec: Option<SeqDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<Q>,
    },
}

pub const ANALYSIS_NAMES: [&str; 7] = [
    "alpha",
    "profile",
    "clauses",
    "conditional",
    "closed_graph",
    "linearity",
    "sequential",
];

impl AnalysisDoc {
    pub fn name(&self) -> &'static str {
        match self {
            AnalysisDoc::Alpha => "alpha",
            AnalysisDoc::Profile => "profile",
            AnalysisDoc::Clauses { .. } => "clauses",
            AnalysisDoc::Conditional { .. } => "conditional",
            AnalysisDoc::ClosedGraph { .. } => "closed_graph",
            AnalysisDoc::Linearity { .. } => "linearity",
            AnalysisDoc::Sequential { .. } => "sequential",
        }
    }

    /// The analysis with every parameter left at its default.
    pub fn default_for(name: &str) -> Option<AnalysisDoc> {
        Some(match name {
            "alpha" => AnalysisDoc::Alpha,
            "profile" => AnalysisDoc::Profile,
            "clauses" => AnalysisDoc::Clauses {
                eps: None,
                tau: None,
                point: None,
            },
            "conditional" => AnalysisDoc::Conditional { inputs: None },
            "closed_graph" => AnalysisDoc::ClosedGraph { specs: None },
            "linearity" => AnalysisDoc::Linearity { inputs: None },
            "sequential" => AnalysisDoc::Sequential {
                spec: None,
                alpha: None,
            },
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfigDoc {
    pub basis_max: u64,
    pub comb_width: u64,
    pub window_len: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsDoc {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Q>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<Q>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    pub space: Vec<AtomDoc>,
    pub domain: SpaceDoc,
    pub codomain: SpaceDoc,
    pub operator: Vec<OperatorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corruption: Option<CorruptionDoc>,
    #[serde(default)]
    pub analyses: Vec<AnalysisDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_config: Option<ProbeConfigDoc>,
    #[serde(default, skip_serializing_if = "GridsDoc::is_empty")]
    pub grids: GridsDoc,
}

impl GridsDoc {
    fn is_empty(&self) -> bool {
        self.m.is_none() && self.eps.is_none() && self.tau.is_none()
    }
}

/// A scenario problem located by a field path such as `space[2].id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ScenarioError {}

pub(crate) fn at(path: impl Into<String>, e: impl fmt::Display) -> ScenarioError {
    ScenarioError {
        path: path.into(),
        message: e.to_string(),
    }
}

/// Parses JSON text, reporting the field path of the first problem.
pub fn parse_doc(text: &str) -> Result<ScenarioDoc, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = if inner.line() > 0 {
            format!("{} (line {}, column {})", strip_position(&inner.to_string()), inner.line(), inner.column())
        } else {
            inner.to_string()
        };
        ScenarioError { path, message }
    })
}

fn strip_position(msg: &str) -> &str {
    msg.split(" at line ").next().unwrap_or(msg)
}

/// Canonical text: fixed key order, canonical rationals, two-space indent.
pub fn to_canonical(doc: &ScenarioDoc) -> String {
    serde_json::to_string_pretty(doc).expect("scenario documents always serialize")
}

/// Model objects built from a document.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub doc: ScenarioDoc,
    pub operator: RandomOperator,
    pub probes: ProbeSet,
}

fn space_desc(d: &SpaceDoc, path: &str) -> Result<SpaceDescriptor, ScenarioError> {
    match d {
        SpaceDoc::C00 => Ok(SpaceDescriptor::C00),
        SpaceDoc::FiniteDim { dim } => SpaceDescriptor::finite(*dim).map_err(|e| at(format!("{path}.dim"), e)),
    }
}

pub(crate) fn coeff(doc: &CoeffDoc) -> CoeffFamily {
    match doc {
        CoeffDoc::Constant { c } => CoeffFamily::Constant(c.0.clone()),
        CoeffDoc::Affine { a, b } => CoeffFamily::affine(a.0.clone(), b.0.clone()),
        CoeffDoc::Harmonic { a, b } => CoeffFamily::harmonic(a.0.clone(), b.0.clone()),
        CoeffDoc::Table { overrides, tail } => CoeffFamily::table(overrides.0.clone(), coeff(tail)),
    }
}

pub(crate) fn vector(v: &VecLit, space: SpaceDescriptor, path: &str) -> Result<SeqVector, ScenarioError> {
    v.to_vector(space).map_err(|e| at(path, e))
}

pub(crate) fn sequence(doc: &SeqDoc, domain: SpaceDescriptor, path: &str) -> Result<SequenceSpec, ScenarioError> {
    Ok(match doc {
        SeqDoc::ScaledBasis { p, scale } => SequenceSpec::ScaledBasis {
            p: *p,
            scale: scale.as_ref().map_or_else(exact::one, |q| q.0.clone()),
        },
        SeqDoc::ScaledFixed { v } => SequenceSpec::ScaledFixed(vector(v, domain, &format!("{path}.v"))?),
        SeqDoc::WindowSum { len } => SequenceSpec::WindowSum { len: *len },
        SeqDoc::UserPrefix { terms, tail } => SequenceSpec::UserPrefix {
            terms: terms
                .iter()
                .enumerate()
                .map(|(i, t)| vector(t, domain, &format!("{path}.terms[{i}]")))
                .collect::<Result<_, _>>()?,
            tail: match tail {
                TailDoc::Null => PrefixTail::Null,
                TailDoc::Unknown => PrefixTail::Unknown,
            },
        },
    })
}

/// Where a space-construction error points.
fn space_error_path(e: &Error, doc: &ScenarioDoc) -> String {
    let find = |id: &str| doc.space.iter().rposition(|a| a.id == id);
    match e {
        Error::DuplicateAtom(id) => find(id).map_or("space".into(), |i| format!("space[{i}].id")),
        Error::EmptyAtomId => doc
            .space
            .iter()
            .position(|a| a.id.is_empty())
            .map_or("space".into(), |i| format!("space[{i}].id")),
        Error::NonpositiveMass { atom, .. } => find(atom).map_or("space".into(), |i| format!("space[{i}].mass")),
        _ => "space".into(),
    }
}

impl Scenario {
    pub fn from_doc(doc: ScenarioDoc) -> Result<Scenario, ScenarioError> {
        let space = FiniteProbSpace::new(doc.space.iter().map(|a| (a.id.clone(), a.mass.0.clone())))
            .map_err(|e| at(space_error_path(&e, &doc), e))?;
        let domain = space_desc(&doc.domain, "domain")?;
        let codomain = space_desc(&doc.codomain, "codomain")?;
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        let mut maps = Vec::with_capacity(doc.operator.len());
        for (i, entry) in doc.operator.iter().enumerate() {
            let path = format!("operator[{i}]");
            if space.index_of(&entry.atom).is_none() {
                return Err(at(format!("{path}.atom"), Error::UnknownAtom(entry.atom.clone())));
            }
            if seen.insert(&entry.atom, i).is_some() {
                return Err(at(format!("{path}.atom"), format!("second map for atom `{}`", entry.atom)));
            }
            let rep = match &entry.map {
                MapDoc::Diagonal { coeff: c } => LinearMapRep::Diagonal(coeff(c)),
                MapDoc::RankOne { weights, output } => LinearMapRep::RankOne {
                    weights: coeff(weights),
                    output: vector(output, codomain, &format!("{path}.map.output"))?,
                },
                MapDoc::Matrix { rows } => {
                    LinearMapRep::Matrix(rows.iter().map(|r| r.iter().map(|q| q.0.clone()).collect()).collect())
                }
                MapDoc::Zero => LinearMapRep::Zero,
            };
            let field = match &entry.map {
                MapDoc::RankOne { output, .. } if output.0.values().all(num_traits::Zero::is_zero) => ".map.output",
                MapDoc::Matrix { .. } => ".map.rows",
                _ => ".map",
            };
            rep.validate(domain, codomain).map_err(|e| at(format!("{path}{field}"), e))?;
            maps.push((entry.atom.clone(), rep));
        }
        if let Some(missing) = space.atom_ids().find(|id| !seen.contains_key(id)) {
            return Err(at("operator", format!("no map for atom `{missing}`")));
        }
        let mut operator = RandomOperator::new(space, domain, codomain, maps).map_err(|e| at("operator", e))?;
        if let Some(c) = &doc.corruption {
            let event = operator
                .space()
                .event(c.event.iter().map(String::as_str))
                .map_err(|e| at("corruption.event", e))?;
            let offset = vector(&c.offset, codomain, "corruption.offset")?;
            operator = operator
                .with_corruption(event, offset)
                .map_err(|e| at("corruption", e))?;
        }
        let config = doc.probe_config.map_or_else(ProbeConfig::default, |p| ProbeConfig {
            basis_max: p.basis_max,
            comb_width: p.comb_width,
            window_len: p.window_len,
        });
        if config.basis_max == 0 {
            return Err(at("probe_config.basis_max", "must be at least 1"));
        }
        if config.comb_width > 16 {
            return Err(at("probe_config.comb_width", "at most 16 is supported"));
        }
        let probes = ProbeSet::new(config);
        Scenario::check_analyses(&doc, domain)?;
        Ok(Scenario { doc, operator, probes })
    }

    /// Static checks on analysis parameters, so `validate` catches them.
    fn check_analyses(doc: &ScenarioDoc, domain: SpaceDescriptor) -> Result<(), ScenarioError> {
        check_grid(doc.grids.m.as_deref(), "grids.M", |_| true, "must be nonnegative")?;
        check_grid(doc.grids.eps.as_deref(), "grids.eps", in_unit_open, "must lie in (0, 1)")?;
        check_grid(doc.grids.tau.as_deref(), "grids.tau", is_pos, "must be positive")?;
        for (i, a) in doc.analyses.iter().enumerate() {
            let path = format!("analyses[{i}]");
            match a {
                AnalysisDoc::Clauses { point: Some(p), .. } => {
                    vector(p, domain, &format!("{path}.point"))?;
                }
                AnalysisDoc::Conditional { inputs: Some(xs) } => {
                    for (j, x) in xs.iter().enumerate() {
                        vector(x, domain, &format!("{path}.inputs[{j}]"))?;
                    }
                }
                AnalysisDoc::ClosedGraph { specs: Some(specs) } => {
                    for (j, s) in specs.iter().enumerate() {
                        let p = format!("{path}.specs[{j}]");
                        let spec = sequence(s, domain, &p)?;
                        spec.check_domain(domain).map_err(|e| at(&p, e))?;
                    }
                }
                AnalysisDoc::Linearity { inputs: Some(xs) } => {
                    for (j, inp) in xs.iter().enumerate() {
                        vector(&inp.x, domain, &format!("{path}.inputs[{j}].x"))?;
                        vector(&inp.y, domain, &format!("{path}.inputs[{j}].y"))?;
                    }
                }
                AnalysisDoc::Sequential { spec: Some(s), .. } => {
                    let p = format!("{path}.spec");
                    let spec = sequence(s, domain, &p)?;
                    spec.check_domain(domain).map_err(|e| at(&p, e))?;
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn is_pos(q: &Rational) -> bool {
    num_traits::Signed::is_positive(q)
}

fn in_unit_open(q: &Rational) -> bool {
    is_pos(q) && *q < exact::one()
}

fn check_grid(
    grid: Option<&[Q]>,
    path: &str,
    ok: impl Fn(&Rational) -> bool,
    what: &str,
) -> Result<(), ScenarioError> {
    let Some(grid) = grid else { return Ok(()) };
    if grid.is_empty() {
        return Err(at(path, "grid is empty"));
    }
    for (i, q) in grid.iter().enumerate() {
        if num_traits::Signed::is_negative(&q.0) || !ok(&q.0) {
            return Err(at(format!("{path}[{i}]"), format!("{} {what}", exact::fmt(&q.0))));
        }
        if i > 0 && grid[i - 1] >= *q {
            return Err(at(format!("{path}[{i}]"), "grid must be strictly increasing"));
        }
    }
    Ok(())
}

/// Parses and builds a scenario in one go.
pub fn load(text: &str) -> Result<Scenario, ScenarioError> {
    Scenario::from_doc(parse_doc(text)?)
}
