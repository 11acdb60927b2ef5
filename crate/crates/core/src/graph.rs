//! Separating elements `y ∈ S(T)` found by probing null sequences, and the
//! two directions of the random closed graph theorem.
//!
//! Probing can only exhibit elements of `S(T)`, never exhaust it, so every
//! closed-graph level reported here is an upper bound.

use num_traits::One;

use crate::closed_form::SeqLimit;
use crate::continuity::{alpha_t, AlphaProfile};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::random_operator::RandomOperator;
use crate::randomization::{converges_in_probability, AtomTail, RandomVector, SeqTrace, Verdict};
use crate::sequences::{image_trace, SequenceSpec};
use crate::spaces::SeqVector;

/// Number of explicit terms kept with each probe for reproducibility.
pub const TRACE_TERMS: u64 = 5;

/// Thresholds used to confirm a detected limit in probability.
pub fn default_tau_grid() -> Vec<Rational> {
    vec![exact::one(), exact::ratio(1, 2), exact::ratio(1, 10), exact::ratio(1, 100)]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitStatus {
    Detected {
        y: RandomVector,
        p_zero: Rational,
        /// First index from which every grid threshold event is empty.
        from_index: Option<u64>,
    },
    Diverges,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatingProbe {
    pub spec: SequenceSpec,
    pub limit: LimitStatus,
    /// `T(x_1), …, T(x_K)`.
    pub first_terms: Vec<RandomVector>,
}

enum AtomLimit {
    Value(SeqVector),
    Diverges,
    Unknown,
}

fn atom_limit(tail: &AtomTail, zero: &SeqVector) -> AtomLimit {
    match tail {
        AtomTail::ClosedForm(s) => match s.classify() {
            SeqLimit::Constant(v) | SeqLimit::Converges(v) => AtomLimit::Value(v),
            SeqLimit::Diverges => AtomLimit::Diverges,
        },
        AtomTail::NormToZero => AtomLimit::Value(zero.clone()),
        AtomTail::Unknown => AtomLimit::Unknown,
    }
}

fn probe_one(t: &RandomOperator, spec: &SequenceSpec) -> Result<SeparatingProbe> {
    spec.certify_null()?;
    let trace: SeqTrace = image_trace(t, spec)?;
    let zero = SeqVector::zero(t.codomain());
    let limits: Vec<AtomLimit> = trace.tails().iter().map(|tl| atom_limit(tl, &zero)).collect();
    let limit = if limits.iter().any(|l| matches!(l, AtomLimit::Diverges)) {
        LimitStatus::Diverges
    } else if limits.iter().any(|l| matches!(l, AtomLimit::Unknown)) {
        LimitStatus::Undecided
    } else {
        let values = limits
            .into_iter()
            .map(|l| match l {
                AtomLimit::Value(v) => v,
                _ => unreachable!(),
            })
            .collect();
        let y = RandomVector::new(t.space().clone(), t.codomain(), values)?;
        let report = converges_in_probability(&trace, &y, &default_tau_grid())?;
        if report.verdict != Verdict::Converges {
            return Err(Error::Invariant(format!(
                "{}: classified limit not confirmed in probability ({:?})",
                spec.label(),
                report.verdict
            )));
        }
        LimitStatus::Detected {
            p_zero: y.prob_equal_zero(),
            from_index: report.deciding_index(),
            y,
        }
    };
    let first_terms = (1..=TRACE_TERMS).filter_map(|k| trace.term(k)).collect();
    Ok(SeparatingProbe {
        spec: spec.clone(),
        limit,
        first_terms,
    })
}

/// Classifies `lim T(x_k)` for each spec.
pub fn probe_separating(t: &RandomOperator, specs: &[SequenceSpec]) -> Result<Vec<SeparatingProbe>> {
    specs.iter().map(|s| probe_one(t, s)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphReport {
    pub probes: Vec<SeparatingProbe>,
    /// Detected separating elements with `ℙ[y = 0]`.
    pub found: Vec<(RandomVector, Rational)>,
    /// Smallest `ℙ[y = 0]` among them; an upper bound on the closed-graph level.
    pub alpha_upper: Rational,
    /// Some probe could not be classified.
    pub has_undecided: bool,
}

pub fn closed_graph_report(t: &RandomOperator, specs: &[SequenceSpec]) -> Result<GraphReport> {
    let probes = probe_separating(t, specs)?;
    let found: Vec<(RandomVector, Rational)> = probes
        .iter()
        .filter_map(|p| match &p.limit {
            LimitStatus::Detected { y, p_zero, .. } => Some((y.clone(), p_zero.clone())),
            _ => None,
        })
        .collect();
    let alpha_upper = found
        .iter()
        .map(|(_, p)| p.clone())
        .min()
        .unwrap_or_else(Rational::one);
    let has_undecided = probes.iter().any(|p| p.limit == LimitStatus::Undecided);
    Ok(GraphReport {
        probes,
        found,
        alpha_upper,
        has_undecided,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConverseStatus {
    /// The probed closed-graph bound falls inside the `α_T` bracket.
    Consistent,
    /// The probed bound exceeds `α_T`: no separating element explains the
    /// discontinuity.
    ConverseGap,
    Inconclusive,
}

impl ConverseStatus {
    pub fn name(self) -> &'static str {
        match self {
            ConverseStatus::Consistent => "consistent",
            ConverseStatus::ConverseGap => "converse_gap",
            ConverseStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub alpha: AlphaProfile,
    pub graph: GraphReport,
    /// Every detected `y` has `ℙ[y = 0] >= α_T` (lower end).
    pub forward_holds: bool,
    pub status: ConverseStatus,
    pub domain_complete: bool,
    pub note: String,
}

/// Checks `ℙ[y = 0] >= α_T` on every detected separating element and
/// compares the probed closed-graph bound with `α_T`.
///
/// A forward failure is returned as [`Error::Invariant`].
pub fn vetgf_check(t: &RandomOperator, specs: &[SequenceSpec]) -> Result<TheoremReport> {
    let alpha = alpha_t(t)?;
    let graph = closed_graph_report(t, specs)?;
    let lower = alpha.lower().clone();
    if let Some((y, p)) = graph.found.iter().find(|(_, p)| *p < lower) {
        return Err(Error::Invariant(format!(
            "separating element with P[y = 0] = {p} below alpha_T = {lower}: {:?}",
            y.values()
        )));
    }
    let upper = alpha.upper().clone();
    let cg = &graph.alpha_upper;
    let domain_complete = t.domain().is_complete();
    let (status, note) = if lower <= *cg && *cg <= upper {
        (
            ConverseStatus::Consistent,
            "probed closed-graph bound lies within the alpha_T bracket".to_string(),
        )
    } else if *cg > upper && !graph.has_undecided {
        let why = if domain_complete {
            "probed closed-graph bound exceeds alpha_T"
        } else {
            "probed closed-graph bound exceeds alpha_T; domain space not complete, classical hypothesis absent"
        };
        (ConverseStatus::ConverseGap, why.to_string())
    } else {
        (
            ConverseStatus::Inconclusive,
            "some probes could not be classified".to_string(),
        )
    };
    Ok(TheoremReport {
        alpha,
        graph,
        forward_holds: true,
        status,
        domain_complete,
        note,
    })
}
