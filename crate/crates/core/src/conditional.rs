//! Conditional operators `T/Ω′` under `ℙ′ = ℙ(·)/ℙ(Ω′)`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::prob_core::Event;
use crate::random_operator::{OpNorm, RandomOperator};
use crate::spaces::SeqVector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalOperator {
    event: Event,
    op: RandomOperator,
}

/// Outcome of the stochastic continuity test on a conditional operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StochasticContinuity {
    /// Every atom is bounded by `m`, the largest atom norm.
    Continuous { m: Rational },
    /// First atom (in space order) with infinite norm.
    Discontinuous { atom: String },
}

impl StochasticContinuity {
    pub fn holds(&self) -> bool {
        matches!(self, StochasticContinuity::Continuous { .. })
    }
}

pub fn restrict(t: &RandomOperator, event: &Event) -> Result<ConditionalOperator> {
    let space = t.space().condition(event)?;
    Ok(ConditionalOperator {
        event: event.clone(),
        op: t.restricted(space, event),
    })
}

impl ConditionalOperator {
    /// `Ω′` as an event of the original space.
    pub fn event(&self) -> &Event {
        &self.event
    }

    /// The restricted operator over the conditioned space.
    pub fn operator(&self) -> &RandomOperator {
        &self.op
    }

    /// On a finite space `ℙ′` takes finitely many values, so the `ε → 1`
    /// limit reduces to every atom being bounded.
    pub fn is_stochastically_continuous(&self) -> StochasticContinuity {
        let mut m = Rational::zero();
        for (i, n) in self.op.op_norms().into_iter().enumerate() {
            match n {
                OpNorm::Finite(v) => m = m.max(v),
                OpNorm::Infinite => {
                    return StochasticContinuity::Discontinuous {
                        atom: self.op.space().atom_id(i).to_string(),
                    }
                }
            }
        }
        StochasticContinuity::Continuous { m }
    }
}

/// The largest `Ω′` with `T/Ω′` stochastically continuous: the finite-norm
/// atoms. Empty with probability 0 when every atom is unbounded.
pub fn best_conditional(t: &RandomOperator) -> (Event, Rational) {
    let e = t.linear_part().finite_norm_event();
    let p = e.prob();
    (e, p)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaStep {
    pub eps: Rational,
    pub m: Rational,
    /// `Ω_x^{ε_n} = [‖T(x)‖ <= M_{ε_n}‖x‖]`.
    pub event: Event,
    /// Running union `Ω_x^n`.
    pub union: Event,
    pub union_prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaChain {
    pub steps: Vec<OmegaStep>,
    pub limit: Event,
    pub limit_prob: Rational,
}

/// The sets `Ω_x^{ε_n}` for one input and their increasing unions.
pub fn omega_x_sets(
    t: &RandomOperator,
    x: &SeqVector,
    eps_seq: &[Rational],
    m_assignment: &[Rational],
) -> Result<OmegaChain> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    if eps_seq.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if eps_seq.len() != m_assignment.len() {
        return Err(Error::InvalidGrid(format!(
            "{} levels but {} bounds",
            eps_seq.len(),
            m_assignment.len()
        )));
    }
    if eps_seq.iter().any(|e| !e.is_positive() || *e >= Rational::one())
        || eps_seq.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidGrid("levels must increase strictly inside (0, 1)".into()));
    }
    if let Some(m) = m_assignment.iter().find(|m| m.is_negative()) {
        return Err(Error::NegativeBound(m.clone()));
    }
    let norms = t.linear_norms_at(x)?;
    let nx = x.norm();
    let mut union = t.space().empty_event();
    let mut steps = Vec::with_capacity(eps_seq.len());
    for (index, (eps, m)) in eps_seq.iter().zip(m_assignment).enumerate() {
        let bound = m * &nx;
        let event = t.space().event_where(|i| norms[i] <= bound);
        if event.prob() <= *eps {
            return Err(Error::HypothesisFails {
                index,
                eps: eps.clone(),
                m: m.clone(),
            });
        }
        let next = union.union(&event)?;
        if !union.is_subset(&next)? || next.prob() <= *eps {
            return Err(Error::Invariant(format!("Ω_x chain broken at step {index}")));
        }
        union = next;
        steps.push(OmegaStep {
            eps: eps.clone(),
            m: m.clone(),
            event,
            union: union.clone(),
            union_prob: union.prob(),
        });
    }
    let limit_prob = union.prob();
    Ok(OmegaChain {
        steps,
        limit: union,
        limit_prob,
    })
}
