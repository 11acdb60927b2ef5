//! Random vectors over a finite space, bracketed norm events, the Ky Fan
//! metric and convergence in probability.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::closed_form::VecSeq;
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::prob_core::{Event, FiniteProbSpace};
use crate::spaces::{SeqVector, SpaceDescriptor};

/// A map from atoms to vectors of a fixed codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomVector {
    space: FiniteProbSpace,
    codomain: SpaceDescriptor,
    values: Vec<SeqVector>,
}

impl RandomVector {
    /// Values are listed in atom order.
    pub fn new(
        space: FiniteProbSpace,
        codomain: SpaceDescriptor,
        values: Vec<SeqVector>,
    ) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::NotTotal);
        }
        for v in &values {
            if v.space() != codomain {
                return Err(Error::mismatch(v.space(), codomain));
            }
        }
        Ok(RandomVector {
            space,
            codomain,
            values,
        })
    }

    /// Values keyed by atom id; every atom must appear exactly once.
    pub fn from_atoms<'a>(
        space: FiniteProbSpace,
        codomain: SpaceDescriptor,
        values: impl IntoIterator<Item = (&'a str, SeqVector)>,
    ) -> Result<Self> {
        let mut slots: Vec<Option<SeqVector>> = vec![None; space.len()];
        for (id, v) in values {
            let i = space
                .index_of(id)
                .ok_or_else(|| Error::UnknownAtom(id.to_string()))?;
            if slots[i].replace(v).is_some() {
                return Err(Error::DuplicateAtom(id.to_string()));
            }
        }
        let values = slots
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::NotTotal)?;
        RandomVector::new(space, codomain, values)
    }

    pub fn zero(space: FiniteProbSpace, codomain: SpaceDescriptor) -> Self {
        let values = vec![SeqVector::zero(codomain); space.len()];
        RandomVector {
            space,
            codomain,
            values,
        }
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn codomain(&self) -> SpaceDescriptor {
        self.codomain
    }

    pub fn value(&self, atom: usize) -> &SeqVector {
        &self.values[atom]
    }

    pub fn value_of(&self, id: &str) -> Option<&SeqVector> {
        self.space.index_of(id).map(|i| &self.values[i])
    }

    pub fn values(&self) -> &[SeqVector] {
        &self.values
    }

    fn check_same(&self, other: &RandomVector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::mismatch("probability space", "another probability space"));
        }
        if self.codomain != other.codomain {
            return Err(Error::mismatch(self.codomain, other.codomain));
        }
        Ok(())
    }

    pub fn sub(&self, other: &RandomVector) -> Result<RandomVector> {
        self.check_same(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomVector {
            space: self.space.clone(),
            codomain: self.codomain,
            values,
        })
    }

    pub fn add(&self, other: &RandomVector) -> Result<RandomVector> {
        self.sub(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Rational) -> RandomVector {
        RandomVector {
            space: self.space.clone(),
            codomain: self.codomain,
            values: self.values.iter().map(|v| v.scale(c)).collect(),
        }
    }

    /// Per-atom sup norms.
    pub fn norms(&self) -> Vec<Rational> {
        self.values.iter().map(SeqVector::norm).collect()
    }

    fn norm_event(&self, tau: &Rational, keep: impl Fn(&Rational) -> bool) -> Result<Event> {
        if tau.is_negative() {
            return Err(Error::NegativeThreshold(tau.clone()));
        }
        let norms = self.norms();
        Ok(self.space.event_where(|i| keep(&norms[i])))
    }

    /// `[‖y‖ >= τ]`.
    pub fn event_norm_ge(&self, tau: &Rational) -> Result<Event> {
        self.norm_event(tau, |n| n >= tau)
    }

    /// `[‖y‖ > τ]`.
    pub fn event_norm_gt(&self, tau: &Rational) -> Result<Event> {
        self.norm_event(tau, |n| n > tau)
    }

    /// `[‖y‖ <= τ]`.
    pub fn event_norm_le(&self, tau: &Rational) -> Result<Event> {
        self.norm_event(tau, |n| n <= tau)
    }

    /// `[‖y‖ < τ]`.
    pub fn event_norm_lt(&self, tau: &Rational) -> Result<Event> {
        self.norm_event(tau, |n| n < tau)
    }

    /// `[y = z]`, exact coordinate equality.
    pub fn equal_event(&self, other: &RandomVector) -> Result<Event> {
        self.check_same(other)?;
        Ok(self
            .space
            .event_where(|i| self.values[i] == other.values[i]))
    }

    pub fn zero_event(&self) -> Event {
        self.space.event_where(|i| self.values[i].is_zero())
    }

    /// `ℙ[y = 0]`.
    pub fn prob_equal_zero(&self) -> Rational {
        self.zero_event().prob()
    }
}

/// Ky Fan distance `inf{τ >= 0 : ℙ[‖y − z‖ > τ] <= τ}`.
///
/// The tail `τ ↦ ℙ[‖y − z‖ > τ]` is a right-continuous step function, so the
/// infimum is attained either at a jump (one of the atom distances), at a
/// value the tail takes, or at 0. The least qualifying candidate is returned.
pub fn ky_fan_distance(y: &RandomVector, z: &RandomVector) -> Result<Rational> {
    let diff = y.sub(z)?;
    let dist = diff.norms();
    let masses: Vec<&Rational> = y.space.masses().collect();
    let tail = |t: &Rational| -> Rational {
        dist.iter()
            .zip(&masses)
            .filter(|(d, _)| *d > t)
            .fold(Rational::zero(), |acc, (_, m)| acc + *m)
    };
    let mut candidates: BTreeSet<Rational> = BTreeSet::new();
    candidates.insert(Rational::zero());
    for d in &dist {
        candidates.insert(d.clone());
        candidates.insert(tail(d));
    }
    candidates.insert(tail(&Rational::zero()));
    for t in candidates {
        if tail(&t) <= t {
            return Ok(t);
        }
    }
    unreachable!("tail probability is at most 1, so τ = 1 always qualifies")
}

/// What is known about one atom's terms beyond the explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomTail {
    /// Exact closed form, valid for every `k >= seq.start()`.
    ClosedForm(VecSeq),
    /// Norm certified to tend to zero, with no closed form.
    NormToZero,
    Unknown,
}

/// The sequence `(y_k)` as explicit terms `k = 1..=prefix.len()` plus
/// per-atom tail knowledge.
#[derive(Debug, Clone)]
pub struct SeqTrace {
    space: FiniteProbSpace,
    codomain: SpaceDescriptor,
    prefix: Vec<RandomVector>,
    tails: Vec<AtomTail>,
}

impl SeqTrace {
    /// Every closed-form tail must start no later than `prefix.len() + 1`.
    pub fn new(
        space: FiniteProbSpace,
        codomain: SpaceDescriptor,
        prefix: Vec<RandomVector>,
        tails: Vec<AtomTail>,
    ) -> Result<Self> {
        if tails.len() != space.len() {
            return Err(Error::NotTotal);
        }
        for y in &prefix {
            if *y.space() != space || y.codomain() != codomain {
                return Err(Error::mismatch("trace term", "trace space"));
            }
        }
        for t in &tails {
            if let AtomTail::ClosedForm(s) = t {
                if s.space() != codomain {
                    return Err(Error::mismatch(s.space(), codomain));
                }
                if s.start() > prefix.len() as u64 + 1 {
                    return Err(Error::Invariant(format!(
                        "closed form starts at {} but prefix has only {} terms",
                        s.start(),
                        prefix.len()
                    )));
                }
            }
        }
        Ok(SeqTrace {
            space,
            codomain,
            prefix,
            tails,
        })
    }

    /// Fully closed-form trace: all terms come from the per-atom closed forms.
    pub fn closed_form(
        space: FiniteProbSpace,
        codomain: SpaceDescriptor,
        seqs: Vec<VecSeq>,
        mut early_term: impl FnMut(u64) -> Result<RandomVector>,
    ) -> Result<Self> {
        let need = seqs.iter().map(|s| s.start() - 1).max().unwrap_or(0);
        let prefix = (1..=need).map(&mut early_term).collect::<Result<Vec<_>>>()?;
        SeqTrace::new(
            space,
            codomain,
            prefix,
            seqs.into_iter().map(AtomTail::ClosedForm).collect(),
        )
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn codomain(&self) -> SpaceDescriptor {
        self.codomain
    }

    pub fn prefix(&self) -> &[RandomVector] {
        &self.prefix
    }

    pub fn tails(&self) -> &[AtomTail] {
        &self.tails
    }

    /// Term `y_k` (1-based), when it is determined.
    pub fn term(&self, k: u64) -> Option<RandomVector> {
        assert!(k >= 1, "terms are 1-based");
        if let Some(t) = self.prefix.get(k as usize - 1) {
            return Some(t.clone());
        }
        let values = self
            .tails
            .iter()
            .map(|t| match t {
                AtomTail::ClosedForm(s) => Some(s.eval(k)),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(RandomVector {
            space: self.space.clone(),
            codomain: self.codomain,
            values,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converges,
    Diverges,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauVerdict {
    pub tau: Rational,
    pub verdict: Verdict,
    /// First `N` with `[‖y_k − y‖ >= τ] = ∅` for every `k >= N`, when known.
    pub from_index: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub verdict: Verdict,
    pub per_tau: Vec<TauVerdict>,
}

impl ConvergenceReport {
    /// Largest deciding index over the grid, if every entry converged with one.
    pub fn deciding_index(&self) -> Option<u64> {
        if self.verdict != Verdict::Converges {
            return None;
        }
        self.per_tau
            .iter()
            .map(|t| t.from_index)
            .collect::<Option<Vec<_>>>()
            .map(|v| v.into_iter().max().unwrap_or(1))
    }
}

enum AtomVerdict {
    /// Event eventually empty; last `k` at which the atom was in it.
    Settled(Option<u64>),
    Never,
    SettledUnindexed,
    Unknown,
}

/// Decides `ℙ[‖y_k − y‖ >= τ] → 0` per threshold.
///
/// On a finite space with positive masses the probability tends to zero iff
/// the event is eventually empty, so each threshold gets the first index after
/// which it is empty.
pub fn converges_in_probability(
    trace: &SeqTrace,
    y: &RandomVector,
    tau_grid: &[Rational],
) -> Result<ConvergenceReport> {
    if tau_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(t) = tau_grid.iter().find(|t| !t.is_positive()) {
        return Err(Error::InvalidGrid(format!("threshold {t} is not positive")));
    }
    if *y.space() != trace.space || y.codomain() != trace.codomain {
        return Err(Error::mismatch("limit", "trace"));
    }
    let mut per_tau = Vec::with_capacity(tau_grid.len());
    for tau in tau_grid {
        let mut verdicts = Vec::with_capacity(trace.space.len());
        for (atom, tail) in trace.tails.iter().enumerate() {
            verdicts.push(atom_verdict(trace, atom, tail, y.value(atom), tau));
        }
        let (verdict, from_index) = if verdicts.iter().any(|v| matches!(v, AtomVerdict::Never)) {
            (Verdict::Diverges, None)
        } else if verdicts.iter().any(|v| matches!(v, AtomVerdict::Unknown)) {
            (Verdict::Undecided, None)
        } else if verdicts
            .iter()
            .any(|v| matches!(v, AtomVerdict::SettledUnindexed))
        {
            (Verdict::Converges, None)
        } else {
            let last = verdicts
                .iter()
                .filter_map(|v| match v {
                    AtomVerdict::Settled(l) => *l,
                    _ => None,
                })
                .max();
            (Verdict::Converges, Some(last.map_or(1, |l| l + 1)))
        };
        per_tau.push(TauVerdict {
            tau: tau.clone(),
            verdict,
            from_index,
        });
    }
    let verdict = if per_tau.iter().all(|t| t.verdict == Verdict::Converges) {
        Verdict::Converges
    } else if per_tau.iter().any(|t| t.verdict == Verdict::Diverges) {
        Verdict::Diverges
    } else {
        Verdict::Undecided
    };
    Ok(ConvergenceReport { verdict, per_tau })
}

fn atom_verdict(
    trace: &SeqTrace,
    atom: usize,
    tail: &AtomTail,
    limit: &SeqVector,
    tau: &Rational,
) -> AtomVerdict {
    let explicit_hit = |k: u64| -> bool {
        let v = trace.prefix[k as usize - 1].value(atom);
        v.sub(limit).map(|d| d.norm() >= *tau).unwrap_or(true)
    };
    let last_explicit = (1..=trace.prefix.len() as u64).rev().find(|&k| explicit_hit(k));
    match tail {
        AtomTail::ClosedForm(seq) => {
            let diff = seq.minus_constant(limit);
            let from = diff.analysis_start();
            let Some(t) = diff.norm_ge_tail(tau) else {
                return AtomVerdict::Unknown;
            };
            if t.eventually {
                return AtomVerdict::Never;
            }
            // terms between the explicit prefix and the analysis start
            let gap_hit = (trace.prefix.len() as u64 + 1..from)
                .rev()
                .find(|&k| seq.eval(k).sub(limit).map(|d| d.norm() >= *tau).unwrap_or(true));
            AtomVerdict::Settled(t.last_exception.or(gap_hit).or(last_explicit))
        }
        AtomTail::NormToZero => {
            let l = limit.norm();
            match tau.cmp(&l) {
                std::cmp::Ordering::Less => AtomVerdict::Never,
                std::cmp::Ordering::Equal if !l.is_zero() => AtomVerdict::Unknown,
                _ => AtomVerdict::SettledUnindexed,
            }
        }
        AtomTail::Unknown => AtomVerdict::Unknown,
    }
}
