//! Null input sequences `x_k → 0` and the closed forms of their images `T(x_k)`.

use num_traits::Zero;

use crate::closed_form::{RatFn, VecSeq};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::random_operator::{LinearMapRep, RandomOperator};
use crate::randomization::{AtomTail, RandomVector, SeqTrace};
use crate::spaces::{SeqVector, SpaceDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixTail {
    /// The sequence is known to tend to zero beyond the listed terms.
    Null,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    /// `x_k = c·e_k / k^p`.
    ScaledBasis { p: u32, scale: Rational },
    /// `x_k = v / k`.
    ScaledFixed(SeqVector),
    /// `x_k = (1/k)·Σ_{n=k}^{k+len−1} e_n`.
    WindowSum { len: u64 },
    /// Explicit `x_1, …, x_K`.
    UserPrefix {
        terms: Vec<SeqVector>,
        tail: PrefixTail,
    },
}

impl SequenceSpec {
    pub fn scaled_basis(p: u32) -> Self {
        SequenceSpec::ScaledBasis {
            p,
            scale: exact::one(),
        }
    }

    /// Curated probes for a domain.
    pub fn defaults(domain: SpaceDescriptor) -> Vec<SequenceSpec> {
        match domain {
            SpaceDescriptor::C00 => vec![
                SequenceSpec::scaled_basis(1),
                SequenceSpec::scaled_basis(2),
                SequenceSpec::WindowSum { len: 2 },
                SequenceSpec::WindowSum { len: 4 },
                SequenceSpec::ScaledFixed(SeqVector::basis(1, domain).unwrap()),
            ],
            SpaceDescriptor::FiniteDim(d) => (1..=d.min(4) as u64)
                .map(|i| SequenceSpec::ScaledFixed(SeqVector::basis(i, domain).unwrap()))
                .collect(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            SequenceSpec::ScaledBasis { p, scale } if exact::is_one(scale) => {
                format!("scaled_basis(p={p})")
            }
            SequenceSpec::ScaledBasis { p, scale } => format!("scaled_basis(p={p}, scale={scale})"),
            SequenceSpec::ScaledFixed(v) => format!("scaled_fixed({v})"),
            SequenceSpec::WindowSum { len } => format!("window_sum(len={len})"),
            SequenceSpec::UserPrefix { terms, tail } => {
                let t = match tail {
                    PrefixTail::Null => "null",
                    PrefixTail::Unknown => "unknown",
                };
                format!("user_prefix(terms={}, tail={t})", terms.len())
            }
        }
    }

    /// The sequence with every term multiplied by `c`, when representable.
    pub fn scaled(&self, c: &Rational) -> Option<SequenceSpec> {
        match self {
            SequenceSpec::ScaledBasis { p, scale } => Some(SequenceSpec::ScaledBasis {
                p: *p,
                scale: scale * c,
            }),
            SequenceSpec::ScaledFixed(v) => Some(SequenceSpec::ScaledFixed(v.scale(c))),
            SequenceSpec::UserPrefix { terms, tail } => Some(SequenceSpec::UserPrefix {
                terms: terms.iter().map(|t| t.scale(c)).collect(),
                tail: *tail,
            }),
            SequenceSpec::WindowSum { .. } => None,
        }
    }

    pub fn check_domain(&self, domain: SpaceDescriptor) -> Result<()> {
        match self {
            SequenceSpec::ScaledBasis { .. } | SequenceSpec::WindowSum { .. } => {
                if domain != SpaceDescriptor::C00 {
                    return Err(Error::mismatch(self.label(), domain));
                }
                Ok(())
            }
            SequenceSpec::ScaledFixed(v) if v.space() != domain => Err(Error::mismatch(v.space(), domain)),
            SequenceSpec::ScaledFixed(_) => Ok(()),
            SequenceSpec::UserPrefix { terms, .. } => match terms.iter().find(|t| t.space() != domain) {
                Some(t) => Err(Error::mismatch(t.space(), domain)),
                None => Ok(()),
            },
        }
    }

    /// Confirms `‖x_k‖ → 0` from the sequence description alone.
    pub fn certify_null(&self) -> Result<()> {
        match self {
            SequenceSpec::ScaledBasis { p: 0, scale } if !scale.is_zero() => {
                Err(Error::SequenceNotNull(format!("{}: ‖x_k‖ = {scale} for all k", self.label())))
            }
            SequenceSpec::WindowSum { len: 0 } => {
                Err(Error::UncertifiedSequence("window length must be positive".into()))
            }
            SequenceSpec::UserPrefix {
                tail: PrefixTail::Unknown,
                ..
            } => Err(Error::UncertifiedSequence(format!(
                "{}: tail behaviour not declared",
                self.label()
            ))),
            _ => Ok(()),
        }
    }

    /// Term `x_k` (1-based); `None` past an explicit prefix.
    pub fn term(&self, k: u64, domain: SpaceDescriptor) -> Option<SeqVector> {
        assert!(k >= 1, "terms are 1-based");
        let inv_k = Rational::new(1.into(), k.into());
        match self {
            SequenceSpec::ScaledBasis { p, scale } => {
                let c = scale * inv_k.pow(*p as i32);
                Some(SeqVector::basis(k, domain).ok()?.scale(&c))
            }
            SequenceSpec::ScaledFixed(v) => Some(v.scale(&inv_k)),
            SequenceSpec::WindowSum { len } => {
                SeqVector::from_entries(domain, (k..k + len).map(|n| (n, inv_k.clone()))).ok()
            }
            SequenceSpec::UserPrefix { terms, .. } => terms.get(k as usize - 1).cloned(),
        }
    }
}

/// Closed form of `k ↦ rep(x_k)` for `k >= start`, or `None` when the sequence
/// has no closed form for this rep.
fn image_closed_form(
    rep: &LinearMapRep,
    spec: &SequenceSpec,
    codomain: SpaceDescriptor,
) -> Option<VecSeq> {
    let inv_k = RatFn::inv_power(1);
    match (spec, rep) {
        (SequenceSpec::UserPrefix { .. }, _) => None,
        (_, LinearMapRep::Zero) => Some(VecSeq::new(codomain, 1)),
        (SequenceSpec::ScaledFixed(v), _) => {
            let y = rep.apply(v, codomain);
            Some(
                y.entries()
                    .iter()
                    .fold(VecSeq::new(codomain, 1), |s, (i, c)| s.with_fixed(*i, inv_k.scale(c))),
            )
        }
        (SequenceSpec::ScaledBasis { p, scale }, LinearMapRep::Diagonal(d)) => {
            let t = d.canonical();
            let f = t.tail_fn().mul(&RatFn::inv_power(*p)).scale(scale);
            Some(VecSeq::new(codomain, t.tail_start()).with_moving(0, f))
        }
        (SequenceSpec::ScaledBasis { p, scale }, LinearMapRep::RankOne { weights, output }) => {
            let t = weights.canonical();
            let s = t.tail_fn().mul(&RatFn::inv_power(*p)).scale(scale);
            Some(fixed_multiple(codomain, t.tail_start(), output, &s))
        }
        (SequenceSpec::WindowSum { len }, LinearMapRep::Diagonal(d)) => {
            let t = d.canonical();
            let g = t.tail_fn();
            Some((0..*len).fold(VecSeq::new(codomain, t.tail_start()), |s, j| {
                s.with_moving(j, g.shift(j).mul(&inv_k))
            }))
        }
        (SequenceSpec::WindowSum { len }, LinearMapRep::RankOne { weights, output }) => {
            let t = weights.canonical();
            let g = t.tail_fn();
            let s = (0..*len).fold(RatFn::zero(), |acc, j| acc.add(&g.shift(j))).mul(&inv_k);
            Some(fixed_multiple(codomain, t.tail_start(), output, &s))
        }
        // matrices live on finite-dimensional domains, where only the
        // spec kinds above apply
        (_, LinearMapRep::Matrix(_)) => None,
    }
}

fn fixed_multiple(codomain: SpaceDescriptor, start: u64, v: &SeqVector, s: &RatFn) -> VecSeq {
    v.entries()
        .iter()
        .fold(VecSeq::new(codomain, start), |acc, (i, c)| acc.with_fixed(*i, s.scale(c)))
}

/// The trace `k ↦ L(x_k)` of the linear part `L` of `t`.
pub fn image_trace(t: &RandomOperator, spec: &SequenceSpec) -> Result<SeqTrace> {
    spec.check_domain(t.domain())?;
    let lin = t.linear_part();
    let apply_term = |k: u64| -> Result<RandomVector> {
        let x = spec
            .term(k, t.domain())
            .ok_or_else(|| Error::Invariant(format!("term {k} of {} is undefined", spec.label())))?;
        lin.apply(&x)
    };
    if let SequenceSpec::UserPrefix { terms, tail } = spec {
        let prefix = (1..=terms.len() as u64).map(apply_term).collect::<Result<Vec<_>>>()?;
        let tails = t
            .op_norms()
            .into_iter()
            .map(|n| match tail {
                PrefixTail::Null if n.is_finite() => AtomTail::NormToZero,
                _ => AtomTail::Unknown,
            })
            .collect();
        return SeqTrace::new(t.space().clone(), t.codomain(), prefix, tails);
    }
    let seqs = t
        .maps()
        .iter()
        .map(|rep| {
            image_closed_form(rep, spec, t.codomain()).ok_or_else(|| {
                Error::UncertifiedSequence(format!("{} has no closed form for this operator", spec.label()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SeqTrace::closed_form(t.space().clone(), t.codomain(), seqs, apply_term)
}
