//! Closed forms in the index `k` for vector-valued sequences.
//!
//! Every sequence this crate needs to reason about symbolically has
//! coordinates of the form `P(k)/Q(k)` with rational polynomials and `Q > 0`
//! for `k >= 1`. Past a Cauchy root bound the sign of any such polynomial is
//! the sign of its leading coefficient, which turns "eventually" statements
//! into a finite scan followed by a leading-term check.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::exact::{self, Rational};
use crate::spaces::{SeqVector, SpaceDescriptor};

/// Longest explicit scan before a tail question is reported as undecided.
pub const SCAN_CAP: u64 = 200_000;

/// Polynomial in `k`, coefficients from the constant term upward, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Poly(vec![c]).trimmed()
    }

    /// `k^d`.
    pub fn monomial(d: usize) -> Self {
        let mut c = vec![Rational::zero(); d + 1];
        c[d] = Rational::one();
        Poly(c)
    }

    pub fn from_coeffs(c: Vec<Rational>) -> Self {
        Poly(c).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, k: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * k + c)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let c = (0..n)
            .map(|i| {
                let a = self.0.get(i).cloned().unwrap_or_else(Rational::zero);
                let b = o.0.get(i).cloned().unwrap_or_else(Rational::zero);
                a + b
            })
            .collect();
        Poly(c).trimmed()
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect()).trimmed()
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly(c).trimmed()
    }

    /// `k ↦ p(k + j)`.
    pub fn shift(&self, j: u64) -> Poly {
        let lin = Poly(vec![Rational::from_integer(j.into()), Rational::one()]).trimmed();
        self.0
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| acc.mul(&lin).add(&Poly::constant(c.clone())))
    }

    /// Every real root lies strictly below this bound in absolute value.
    pub fn root_bound(&self) -> Rational {
        let Some(d) = self.degree() else {
            return Rational::zero();
        };
        let lead = self.leading().abs();
        let m = self.0[..d]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    /// Sign of `p(k)` for all sufficiently large `k`.
    pub fn eventual_sign(&self) -> Ordering {
        self.leading().cmp(&Rational::zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Limit {
    Finite(Rational),
    PosInf,
    NegInf,
}

/// `num(k)/den(k)`, with `den(k) > 0` for every integer `k >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn constant(c: Rational) -> Self {
        RatFn {
            num: Poly::constant(c),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn zero() -> Self {
        RatFn::constant(Rational::zero())
    }

    pub fn poly(p: Poly) -> Self {
        RatFn {
            num: p,
            den: Poly::constant(Rational::one()),
        }
    }

    /// `1/k^p`.
    pub fn inv_power(p: u32) -> Self {
        RatFn {
            num: Poly::constant(Rational::one()),
            den: Poly::monomial(p as usize),
        }
    }

    /// Builds `num/den`; the caller guarantees `den > 0` on `k >= 1`.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        RatFn { num, den }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// `k ↦ f(k + j)`.
    pub fn shift(&self, j: u64) -> RatFn {
        RatFn {
            num: self.num.shift(j),
            den: self.den.shift(j),
        }
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.den == o.den {
            return RatFn {
                num: self.num.add(&o.num),
                den: self.den.clone(),
            };
        }
        RatFn {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        RatFn {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
    }

    pub fn scale(&self, s: &Rational) -> RatFn {
        RatFn {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn eval(&self, k: u64) -> Rational {
        let k = Rational::from_integer(k.into());
        self.num.eval(&k) / self.den.eval(&k)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn limit(&self) -> Limit {
        let (Some(dn), Some(dd)) = (self.num.degree(), self.den.degree()) else {
            return Limit::Finite(Rational::zero());
        };
        match dn.cmp(&dd) {
            Ordering::Less => Limit::Finite(Rational::zero()),
            Ordering::Equal => Limit::Finite(self.num.leading() / self.den.leading()),
            Ordering::Greater => {
                if (self.num.leading() / self.den.leading()).is_positive() {
                    Limit::PosInf
                } else {
                    Limit::NegInf
                }
            }
        }
    }

    /// `Some(c)` when the function equals `c` for every `k`.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.num.is_zero() {
            return Some(Rational::zero());
        }
        let Limit::Finite(c) = self.limit() else {
            return None;
        };
        (self.den.scale(&c) == self.num).then_some(c)
    }

    /// Above this bound the signs of `num ∓ t·den` no longer change.
    fn abs_cmp_bound(&self, t: &Rational) -> Rational {
        let g1 = self.num.sub(&self.den.scale(t));
        let g2 = self.num.add(&self.den.scale(t));
        g1.root_bound().max(g2.root_bound())
    }

    /// Whether `|f(k)| >= t` for all large `k` (`t >= 0`).
    fn abs_ge_eventually(&self, t: &Rational) -> bool {
        let g1 = self.num.sub(&self.den.scale(t));
        let g2 = self.num.add(&self.den.scale(t));
        g1.eventual_sign() != Ordering::Less || g2.eventual_sign() != Ordering::Greater
    }
}

/// Truth of an index predicate on the tail of a sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailTruth {
    /// Value of the predicate for all sufficiently large `k`.
    pub eventually: bool,
    /// Largest scanned `k` at which the predicate differs from `eventually`.
    pub last_exception: Option<u64>,
}

/// How a closed-form vector sequence behaves as `k → ∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqLimit {
    /// Every term from the analysis start on equals `value`.
    Constant(SeqVector),
    /// Norm convergence to `value` without being exactly constant.
    Converges(SeqVector),
    Diverges,
}

/// `k ↦ v_k` for `k >= start`, with coordinates at fixed indices and at indices
/// `k + j` that move with the term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecSeq {
    space: SpaceDescriptor,
    start: u64,
    fixed: BTreeMap<u64, RatFn>,
    moving: BTreeMap<u64, RatFn>,
}

impl VecSeq {
    pub fn new(space: SpaceDescriptor, start: u64) -> Self {
        VecSeq {
            space,
            start: start.max(1),
            fixed: BTreeMap::new(),
            moving: BTreeMap::new(),
        }
    }

    /// The constant sequence `v`.
    pub fn constant(v: &SeqVector) -> Self {
        let mut s = VecSeq::new(v.space(), 1);
        for (i, c) in v.entries() {
            s.fixed.insert(*i, RatFn::constant(c.clone()));
        }
        s
    }

    pub fn with_fixed(mut self, index: u64, f: RatFn) -> Self {
        if !f.is_zero() {
            let merged = match self.fixed.remove(&index) {
                Some(g) => g.add(&f),
                None => f,
            };
            self.fixed.insert(index, merged);
        }
        self
    }

    pub fn with_moving(mut self, offset: u64, f: RatFn) -> Self {
        assert_eq!(self.space, SpaceDescriptor::C00, "moving support needs c00");
        if !f.is_zero() {
            let merged = match self.moving.remove(&offset) {
                Some(g) => g.add(&f),
                None => f,
            };
            self.moving.insert(offset, merged);
        }
        self
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn has_moving_support(&self) -> bool {
        !self.moving.is_empty()
    }

    /// First index from which moving coordinates can no longer collide with
    /// fixed ones, so the sup norm is a max over the listed coordinates.
    pub fn analysis_start(&self) -> u64 {
        match (self.moving.is_empty(), self.fixed.keys().next_back()) {
            (false, Some(&m)) => self.start.max(m + 1),
            _ => self.start,
        }
    }

    /// Term `v_k`; requires `k >= start`.
    pub fn eval(&self, k: u64) -> SeqVector {
        assert!(k >= self.start, "term {k} precedes closed-form start {}", self.start);
        let mut entries: BTreeMap<u64, Rational> = BTreeMap::new();
        for (i, f) in &self.fixed {
            *entries.entry(*i).or_insert_with(Rational::zero) += f.eval(k);
        }
        for (j, f) in &self.moving {
            *entries.entry(k + j).or_insert_with(Rational::zero) += f.eval(k);
        }
        entries.retain(|_, v| !v.is_zero());
        SeqVector::from_canonical(self.space, entries)
    }

    /// `k ↦ v_k − y`.
    pub fn minus_constant(&self, y: &SeqVector) -> VecSeq {
        let mut out = self.clone();
        for (i, c) in y.entries() {
            out = out.with_fixed(*i, RatFn::constant(-c));
        }
        out.fixed.retain(|_, f| !f.is_zero());
        out
    }

    fn coords(&self) -> impl Iterator<Item = &RatFn> {
        self.fixed.values().chain(self.moving.values())
    }

    /// Limit of the sup norm (`None` when it diverges to infinity).
    pub fn norm_limit(&self) -> Option<Rational> {
        let mut best = Rational::zero();
        for f in self.coords() {
            match f.limit() {
                Limit::Finite(c) => best = best.max(c.abs()),
                _ => return None,
            }
        }
        Some(best)
    }

    pub fn classify(&self) -> SeqLimit {
        for f in self.moving.values() {
            if f.limit() != Limit::Finite(Rational::zero()) {
                return SeqLimit::Diverges;
            }
        }
        let mut limit = BTreeMap::new();
        let mut constant = self.moving.is_empty();
        for (i, f) in &self.fixed {
            match f.limit() {
                Limit::Finite(c) => {
                    if f.as_constant().is_none() {
                        constant = false;
                    }
                    if !c.is_zero() {
                        limit.insert(*i, c);
                    }
                }
                _ => return SeqLimit::Diverges,
            }
        }
        let value = SeqVector::from_canonical(self.space, limit);
        if constant {
            SeqLimit::Constant(value)
        } else {
            SeqLimit::Converges(value)
        }
    }

    /// Tail behaviour of `‖v_k‖ >= t` over `k >= analysis_start()`.
    ///
    /// Returns `None` when the exceptional range would exceed [`SCAN_CAP`].
    pub fn norm_ge_tail(&self, t: &Rational) -> Option<TailTruth> {
        let from = self.analysis_start();
        let eventually = self.coords().any(|f| f.abs_ge_eventually(t));
        let bound = self
            .coords()
            .map(|f| f.abs_cmp_bound(t))
            .max()
            .unwrap_or_else(Rational::zero);
        let last = exact::ceil_u64(&bound)?;
        if last > from.saturating_add(SCAN_CAP) {
            return None;
        }
        let mut last_exception = None;
        for k in from..=last.max(from) {
            if (self.eval(k).norm() >= *t) != eventually {
                last_exception = Some(k);
            }
        }
        Some(TailTruth {
            eventually,
            last_exception,
        })
    }
}
