//! Probable continuity: the boundedness profile `f(M)`, `α_T`, the seven
//! equivalent clauses with explicit witnesses, and sequential checks.
//!
//! Everything here evaluates the linear part of the operator; a corruption
//! only shows up in [`RandomOperator::linearity_probability`].

pub mod clauses;
pub mod probes;
pub mod profile;
pub mod search;
pub mod sequential;

use num_traits::Signed;

pub use clauses::{check_clause, transform_witness, CheckResult, Clause, RefutationPoint, WitnessBundle};
pub use probes::{ProbeConfig, ProbeSet};
pub use profile::{alpha_oracle, alpha_t, f_profile, AlphaProfile, Method, ProfilePoint};
pub use sequential::{check_sequential, SequentialReport, SequentialTau};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::random_operator::RandomOperator;
use crate::spaces::SeqVector;

/// `ℙ[‖T(x)‖ <= M‖x‖]` for `x ≠ 0`.
pub fn prob_bound_at(t: &RandomOperator, x: &SeqVector, m: &Rational) -> Result<Rational> {
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    if m.is_negative() {
        return Err(Error::NegativeBound(m.clone()));
    }
    let bound = m * x.norm();
    let norms = t.linear_norms_at(x)?;
    Ok(t.space().event_where(|i| norms[i] <= bound).prob())
}

/// `ℙ[‖T(x) − T(x0)‖ < τ]`.
pub fn prob_close(t: &RandomOperator, x: &SeqVector, x0: &SeqVector, tau: &Rational) -> Result<Rational> {
    let norms = t.linear_norms_at(&x.sub(x0)?)?;
    Ok(t.space().event_where(|i| norms[i] < *tau).prob())
}

/// `ℙ[‖T(x) − T(y)‖ <= M‖x − y‖]`.
pub fn prob_lipschitz(t: &RandomOperator, x: &SeqVector, y: &SeqVector, m: &Rational) -> Result<Rational> {
    let d = x.sub(y)?;
    let bound = m * d.norm();
    let norms = t.linear_norms_at(&d)?;
    Ok(t.space().event_where(|i| norms[i] <= bound).prob())
}
