//! Sequential continuity at the origin along one null sequence.
//!
//! A single sequence can only refute: a failing `x_k → 0` disproves probable
//! continuity at level `α`, while a passing one proves nothing on its own
//! (take any `x_k` with `T(x_k) = 0`). Affirmative results carry a caveat.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::random_operator::RandomOperator;
use crate::randomization::AtomTail;
use crate::sequences::{image_trace, SequenceSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialTau {
    pub tau: Rational,
    /// `liminf_k ℙ[‖T(x_k)‖ < τ]` lies in `[liminf_lower, liminf_upper]`.
    pub liminf_lower: Rational,
    pub liminf_upper: Rational,
    /// Whether the liminf reaches `α`; `None` when the bracket straddles it.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialReport {
    pub alpha: Rational,
    pub per_tau: Vec<SequentialTau>,
    /// Some threshold fails: continuity at level `α` is refuted.
    pub refutes_level: bool,
    /// Every threshold passes, which one sequence cannot certify.
    pub affirmative_caveat: bool,
}

pub fn check_sequential(
    t: &RandomOperator,
    seq: &SequenceSpec,
    alpha: &Rational,
    tau_grid: &[Rational],
) -> Result<SequentialReport> {
    if !alpha.is_positive() || *alpha > exact::one() {
        return Err(Error::InconsistentBundle(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    if tau_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(tau) = tau_grid.iter().find(|t| !t.is_positive()) {
        return Err(Error::InvalidGrid(format!("threshold {tau} is not positive")));
    }
    seq.certify_null()?;
    let trace = image_trace(t, seq)?;
    let space = t.space();
    let mut per_tau = Vec::with_capacity(tau_grid.len());
    for tau in tau_grid {
        let mut lower = Rational::from_integer(0.into());
        let mut unknown = Rational::from_integer(0.into());
        for (i, tail) in trace.tails().iter().enumerate() {
            let mass = space.mass(i);
            match tail {
                AtomTail::ClosedForm(s) => match s.norm_ge_tail(tau) {
                    Some(tt) if !tt.eventually => lower += mass,
                    Some(_) => {}
                    None => unknown += mass,
                },
                AtomTail::NormToZero => lower += mass,
                AtomTail::Unknown => unknown += mass,
            }
        }
        let upper = &lower + &unknown;
        let holds = if lower >= *alpha {
            Some(true)
        } else if upper < *alpha {
            Some(false)
        } else {
            None
        };
        per_tau.push(SequentialTau {
            tau: tau.clone(),
            liminf_lower: lower,
            liminf_upper: upper,
            holds,
        });
    }
    let refutes_level = per_tau.iter().any(|p| p.holds == Some(false));
    let affirmative_caveat = per_tau.iter().all(|p| p.holds == Some(true));
    Ok(SequentialReport {
        alpha: alpha.clone(),
        per_tau,
        refutes_level,
        affirmative_caveat,
    })
}
