//! Linear random operators `T: X → R_Ω(Y)` realised atom by atom.
//!
//! Each atom carries a linear map whose sup-norm operator norm is known in
//! closed form. An optional additive corruption on a fixed event produces
//! operators that are linear only with probability below one.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::closed_form::{Poly, RatFn};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::prob_core::{Event, FiniteProbSpace};
use crate::randomization::RandomVector;
use crate::spaces::{SeqVector, SpaceDescriptor};

/// Operator norm value; `Infinite` sorts above every rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum OpNorm {
    Finite(Rational),
    Infinite,
}

impl OpNorm {
    pub fn is_finite(&self) -> bool {
        matches!(self, OpNorm::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            OpNorm::Finite(v) => Some(v),
            OpNorm::Infinite => None,
        }
    }

    /// `self <= m` for a rational bound.
    pub fn at_most(&self, m: &Rational) -> bool {
        matches!(self, OpNorm::Finite(v) if v <= m)
    }
}

impl fmt::Display for OpNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpNorm::Finite(v) => write!(f, "{v}"),
            OpNorm::Infinite => f.write_str("inf"),
        }
    }
}

/// Coefficient sequences `n ↦ c(n)`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoeffFamily {
    Constant(Rational),
    /// `a·n + b`
    Affine { a: Rational, b: Rational },
    /// `a + b/n`
    Harmonic { a: Rational, b: Rational },
    /// Finitely many overridden indices on top of another family.
    Table {
        overrides: BTreeMap<u64, Rational>,
        tail: Box<CoeffFamily>,
    },
}

/// Normal form of a [`CoeffFamily`]: overrides, then `lin·n + cst + inv/n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTail {
    pub overrides: BTreeMap<u64, Rational>,
    pub lin: Rational,
    pub cst: Rational,
    pub inv: Rational,
}

impl CoeffTail {
    fn tail_value(&self, n: u64) -> Rational {
        let n = Rational::from_integer(n.into());
        &self.lin * &n + &self.cst + &self.inv / n
    }

    pub fn value(&self, n: u64) -> Rational {
        match self.overrides.get(&n) {
            Some(v) => v.clone(),
            None => self.tail_value(n),
        }
    }

    /// First index past every override.
    pub fn tail_start(&self) -> u64 {
        self.overrides.keys().next_back().map_or(1, |m| m + 1)
    }

    /// The tail as a rational function of the index.
    pub fn tail_fn(&self) -> RatFn {
        RatFn::new(
            Poly::from_coeffs(vec![self.inv.clone(), self.cst.clone(), self.lin.clone()]),
            Poly::monomial(1),
        )
    }

    /// From this index on the tail has constant sign and no overrides.
    pub fn sign_start(&self) -> u64 {
        let h = Poly::from_coeffs(vec![self.inv.clone(), self.cst.clone(), self.lin.clone()]);
        let b = exact::ceil_u64(&h.root_bound()).unwrap_or(u64::MAX);
        self.tail_start().max(b).max(1)
    }

    pub fn tail_is_zero(&self) -> bool {
        self.lin.is_zero() && self.cst.is_zero() && self.inv.is_zero()
    }

    /// `sup_n |c(n)|`.
    pub fn sup_abs(&self) -> OpNorm {
        if !self.lin.is_zero() {
            return OpNorm::Infinite;
        }
        // cst + inv/n is monotone in n, so its modulus peaks at an end of the range
        let n0 = (1..).find(|n| !self.overrides.contains_key(n)).unwrap();
        let ends = [self.tail_value(n0).abs(), self.cst.abs()];
        let best = self
            .overrides
            .values()
            .map(|v| v.abs())
            .chain(ends)
            .max()
            .unwrap_or_else(Rational::zero);
        OpNorm::Finite(best)
    }

    /// `Σ_n |c(n)|`; finite exactly when the tail vanishes.
    pub fn sum_abs(&self) -> OpNorm {
        if !self.tail_is_zero() {
            return OpNorm::Infinite;
        }
        OpNorm::Finite(self.overrides.values().map(|v| v.abs()).sum())
    }
}

impl CoeffFamily {
    pub fn constant(c: Rational) -> Self {
        CoeffFamily::Constant(c)
    }

    pub fn affine(a: Rational, b: Rational) -> Self {
        CoeffFamily::Affine { a, b }
    }

    pub fn harmonic(a: Rational, b: Rational) -> Self {
        CoeffFamily::Harmonic { a, b }
    }

    pub fn table(overrides: impl IntoIterator<Item = (u64, Rational)>, tail: CoeffFamily) -> Self {
        CoeffFamily::Table {
            overrides: overrides.into_iter().collect(),
            tail: Box::new(tail),
        }
    }

    pub fn canonical(&self) -> CoeffTail {
        match self {
            CoeffFamily::Constant(c) => CoeffTail {
                overrides: BTreeMap::new(),
                lin: Rational::zero(),
                cst: c.clone(),
                inv: Rational::zero(),
            },
            CoeffFamily::Affine { a, b } => CoeffTail {
                overrides: BTreeMap::new(),
                lin: a.clone(),
                cst: b.clone(),
                inv: Rational::zero(),
            },
            CoeffFamily::Harmonic { a, b } => CoeffTail {
                overrides: BTreeMap::new(),
                lin: Rational::zero(),
                cst: a.clone(),
                inv: b.clone(),
            },
            CoeffFamily::Table { overrides, tail } => {
                let mut t = tail.canonical();
                for (n, v) in overrides {
                    t.overrides.insert(*n, v.clone());
                }
                t
            }
        }
    }

    pub fn value(&self, n: u64) -> Rational {
        match self {
            CoeffFamily::Constant(c) => c.clone(),
            CoeffFamily::Affine { a, b } => a * Rational::from_integer(n.into()) + b,
            CoeffFamily::Harmonic { a, b } => a + b / Rational::from_integer(n.into()),
            CoeffFamily::Table { overrides, tail } => {
                overrides.get(&n).cloned().unwrap_or_else(|| tail.value(n))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let CoeffFamily::Table { overrides, tail } = self {
            if overrides.contains_key(&0) {
                return Err(Error::InvalidOperator("coefficient index 0 (indices are 1-based)".into()));
            }
            tail.validate()?;
        }
        Ok(())
    }
}

/// One atom's linear map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearMapRep {
    /// Dense matrix `R^n → R^m`, one row per output coordinate.
    Matrix(Vec<Vec<Rational>>),
    /// `x ↦ (d(n)·x_n)_n` on `c00`.
    Diagonal(CoeffFamily),
    /// `x ↦ (Σ_n w(n)·x_n)·output` on `c00`.
    RankOne {
        weights: CoeffFamily,
        output: SeqVector,
    },
    Zero,
}

impl LinearMapRep {
    pub fn identity_c00() -> Self {
        LinearMapRep::Diagonal(CoeffFamily::Constant(exact::one()))
    }

    /// Checks shape against the declared domain and codomain.
    pub fn validate(&self, domain: SpaceDescriptor, codomain: SpaceDescriptor) -> Result<()> {
        match self {
            LinearMapRep::Matrix(rows) => {
                let (Some(n), Some(m)) = (domain.dimension(), codomain.dimension()) else {
                    return Err(Error::InvalidOperator(
                        "matrix maps need finite-dimensional domain and codomain".into(),
                    ));
                };
                if rows.len() != m || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidOperator(format!(
                        "matrix must be {m}x{n} for {domain} -> {codomain}"
                    )));
                }
                Ok(())
            }
            LinearMapRep::Diagonal(d) => {
                if domain != SpaceDescriptor::C00 || codomain != SpaceDescriptor::C00 {
                    return Err(Error::InvalidOperator("diagonal maps act on c00 -> c00".into()));
                }
                d.validate()
            }
            LinearMapRep::RankOne { weights, output } => {
                if domain != SpaceDescriptor::C00 {
                    return Err(Error::InvalidOperator("rank-one maps act on c00".into()));
                }
                if output.space() != codomain {
                    return Err(Error::mismatch(output.space(), codomain));
                }
                if output.is_zero() {
                    return Err(Error::InvalidOperator(
                        "rank-one output must be nonzero (use a zero map)".into(),
                    ));
                }
                weights.validate()
            }
            LinearMapRep::Zero => Ok(()),
        }
    }

    /// Evaluates the map at `x`; the caller has validated shapes.
    pub fn apply(&self, x: &SeqVector, codomain: SpaceDescriptor) -> SeqVector {
        match self {
            LinearMapRep::Matrix(rows) => {
                let entries = rows.iter().enumerate().map(|(i, row)| {
                    let v: Rational = x
                        .entries()
                        .iter()
                        .map(|(j, xj)| &row[*j as usize - 1] * xj)
                        .sum();
                    (i as u64 + 1, v)
                });
                SeqVector::from_entries(codomain, entries).expect("validated matrix shape")
            }
            LinearMapRep::Diagonal(d) => {
                let entries = x.entries().iter().map(|(n, xn)| (*n, d.value(*n) * xn));
                SeqVector::from_entries(codomain, entries).expect("c00 accepts every index")
            }
            LinearMapRep::RankOne { weights, output } => {
                let s: Rational = x.entries().iter().map(|(n, xn)| weights.value(*n) * xn).sum();
                output.scale(&s)
            }
            LinearMapRep::Zero => SeqVector::zero(codomain),
        }
    }

    /// Operator norm induced by the sup norm on both sides.
    pub fn op_norm(&self) -> OpNorm {
        match self {
            LinearMapRep::Matrix(rows) => OpNorm::Finite(
                rows.iter()
                    .map(|r| r.iter().map(|a| a.abs()).sum::<Rational>())
                    .max()
                    .unwrap_or_else(Rational::zero),
            ),
            LinearMapRep::Diagonal(d) => d.canonical().sup_abs(),
            LinearMapRep::RankOne { weights, output } => match weights.canonical().sum_abs() {
                OpNorm::Finite(s) => OpNorm::Finite(s * output.norm()),
                OpNorm::Infinite => OpNorm::Infinite,
            },
            LinearMapRep::Zero => OpNorm::Finite(Rational::zero()),
        }
    }

    pub fn is_diagonal_like(&self) -> bool {
        matches!(self, LinearMapRep::Diagonal(_) | LinearMapRep::Zero)
    }
}

/// Additive offset applied on a fixed event: `T_ω(x) = L_ω(x) + offset` there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corruption {
    pub event: Event,
    pub offset: SeqVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomOperator {
    space: FiniteProbSpace,
    domain: SpaceDescriptor,
    codomain: SpaceDescriptor,
    maps: Vec<LinearMapRep>,
    corruption: Option<Corruption>,
}

impl RandomOperator {
    /// Maps keyed by atom id; every atom needs exactly one map.
    pub fn new<S: AsRef<str>>(
        space: FiniteProbSpace,
        domain: SpaceDescriptor,
        codomain: SpaceDescriptor,
        maps: impl IntoIterator<Item = (S, LinearMapRep)>,
    ) -> Result<Self> {
        let mut slots: Vec<Option<LinearMapRep>> = vec![None; space.len()];
        for (id, rep) in maps {
            let id = id.as_ref();
            let i = space
                .index_of(id)
                .ok_or_else(|| Error::UnknownAtom(id.to_string()))?;
            if slots[i].replace(rep).is_some() {
                return Err(Error::DuplicateAtom(id.to_string()));
            }
        }
        let maps = slots
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::NotTotal)?;
        RandomOperator::from_maps(space, domain, codomain, maps)
    }

    /// Maps in atom order.
    pub fn from_maps(
        space: FiniteProbSpace,
        domain: SpaceDescriptor,
        codomain: SpaceDescriptor,
        maps: Vec<LinearMapRep>,
    ) -> Result<Self> {
        if maps.len() != space.len() {
            return Err(Error::NotTotal);
        }
        for rep in &maps {
            rep.validate(domain, codomain)?;
        }
        Ok(RandomOperator {
            space,
            domain,
            codomain,
            maps,
            corruption: None,
        })
    }

    pub fn with_corruption(mut self, event: Event, offset: SeqVector) -> Result<Self> {
        if !self.space.owns(&event) {
            return Err(Error::ForeignEvent);
        }
        if offset.space() != self.codomain {
            return Err(Error::mismatch(offset.space(), self.codomain));
        }
        self.corruption = Some(Corruption { event, offset });
        Ok(self)
    }

    pub fn space(&self) -> &FiniteProbSpace {
        &self.space
    }

    pub fn domain(&self) -> SpaceDescriptor {
        self.domain
    }

    pub fn codomain(&self) -> SpaceDescriptor {
        self.codomain
    }

    pub fn maps(&self) -> &[LinearMapRep] {
        &self.maps
    }

    pub fn map_of(&self, id: &str) -> Option<&LinearMapRep> {
        self.space.index_of(id).map(|i| &self.maps[i])
    }

    pub fn corruption(&self) -> Option<&Corruption> {
        self.corruption.as_ref()
    }

    /// The same operator without its corruption.
    pub fn linear_part(&self) -> RandomOperator {
        RandomOperator {
            corruption: None,
            ..self.clone()
        }
    }

    pub fn is_diagonal_only(&self) -> bool {
        self.maps.iter().all(LinearMapRep::is_diagonal_like)
    }

    fn check_domain(&self, x: &SeqVector) -> Result<()> {
        if x.space() != self.domain {
            return Err(Error::mismatch(x.space(), self.domain));
        }
        Ok(())
    }

    /// `T(x)` including any corruption.
    pub fn apply(&self, x: &SeqVector) -> Result<RandomVector> {
        self.check_domain(x)?;
        let values = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, rep)| {
                let v = rep.apply(x, self.codomain);
                match &self.corruption {
                    Some(c) if c.event.contains(i) => v.add(&c.offset).expect("offset in codomain"),
                    _ => v,
                }
            })
            .collect();
        RandomVector::new(self.space.clone(), self.codomain, values)
    }

    /// Per-atom `‖T_ω(x)‖` of the linear part.
    pub fn linear_norms_at(&self, x: &SeqVector) -> Result<Vec<Rational>> {
        self.check_domain(x)?;
        Ok(self
            .maps
            .iter()
            .map(|rep| rep.apply(x, self.codomain).norm())
            .collect())
    }

    pub fn op_norms(&self) -> Vec<OpNorm> {
        self.maps.iter().map(LinearMapRep::op_norm).collect()
    }

    /// `{ω : ‖T_ω‖ <= M}`.
    pub fn bounded_event(&self, m: &Rational) -> Result<Event> {
        if m.is_negative() {
            return Err(Error::NegativeBound(m.clone()));
        }
        let norms = self.op_norms();
        Ok(self.space.event_where(|i| norms[i].at_most(m)))
    }

    /// `{ω : ‖T_ω‖ < ∞}`.
    pub fn finite_norm_event(&self) -> Event {
        let norms = self.op_norms();
        self.space.event_where(|i| norms[i].is_finite())
    }

    /// Distinct finite operator norms in increasing order.
    pub fn finite_norm_levels(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self
            .op_norms()
            .into_iter()
            .filter_map(|n| match n {
                OpNorm::Finite(r) => Some(r),
                OpNorm::Infinite => None,
            })
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// `ℙ[T(αx + βy) = αT(x) + βT(y)]`.
    pub fn linearity_probability(
        &self,
        x: &SeqVector,
        y: &SeqVector,
        alpha: &Rational,
        beta: &Rational,
    ) -> Result<Rational> {
        self.check_domain(x)?;
        self.check_domain(y)?;
        let lhs = self.apply(&x.combine(alpha, y, beta)?)?;
        let rhs = self.apply(x)?.scale(alpha).add(&self.apply(y)?.scale(beta))?;
        Ok(lhs.equal_event(&rhs)?.prob())
    }

    /// Same maps over a sub-space made of the atoms of `event`, in order.
    pub(crate) fn restricted(&self, space: FiniteProbSpace, event: &Event) -> RandomOperator {
        let maps = event.indices().map(|i| self.maps[i].clone()).collect();
        let corruption = self.corruption.as_ref().map(|c| {
            let kept: Vec<&str> = event
                .indices()
                .filter(|i| c.event.contains(*i))
                .map(|i| self.space.atom_id(i))
                .collect();
            Corruption {
                event: space.event(kept).expect("atoms carried over"),
                offset: c.offset.clone(),
            }
        });
        RandomOperator {
            space,
            domain: self.domain,
            codomain: self.codomain,
            maps,
            corruption,
        }
    }
}

/// Orders two operator norms where one side is a rational.
pub fn cmp_norm(n: &OpNorm, m: &Rational) -> Ordering {
    match n {
        OpNorm::Finite(v) => v.cmp(m),
        OpNorm::Infinite => Ordering::Greater,
    }
}
