//! The seven equivalent continuity clauses at a single level `ε`.
//!
//! | clause | statement at level `ε` | witness |
//! |--------|------------------------|---------|
//! | i   | `ℙ[‖Tx − Ty‖ <= M‖x − y‖] > ε` for all `x, y` | `M` |
//! | ii  | `‖x − y‖ < δ ⇒ ℙ[‖Tx − Ty‖ < τ] > ε` | `δ` |
//! | iii | `‖x − x0‖ < δ ⇒ ℙ[‖Tx − Tx0‖ < τ] > ε`, every `x0` | `δ` |
//! | iv  | the same at one given `x0` | `δ` |
//! | v   | `‖x‖ < δ ⇒ ℙ[‖Tx‖ < τ] > ε` | `δ` |
//! | vi  | `ℙ[‖Tx‖ <= M] > ε` for all `x ∈ B_X` | `M` |
//! | vii | `ℙ[‖Tx‖ <= M‖x‖] > ε` for all `x` | `M` |

use std::fmt;

use num_traits::{Signed, Zero};

use super::probes::ProbeSet;
use super::profile::{norm_levels, violators};
use super::search::violate_all;
use super::{prob_bound_at, prob_close, prob_lipschitz};
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::random_operator::{OpNorm, RandomOperator};
use crate::spaces::SeqVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
    Vii,
}

impl Clause {
    pub const ALL: [Clause; 7] = [
        Clause::I,
        Clause::Ii,
        Clause::Iii,
        Clause::Iv,
        Clause::V,
        Clause::Vi,
        Clause::Vii,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Clause::I => "i",
            Clause::Ii => "ii",
            Clause::Iii => "iii",
            Clause::Iv => "iv",
            Clause::V => "v",
            Clause::Vi => "vi",
            Clause::Vii => "vii",
        }
    }

    pub fn parse(s: &str) -> Option<Clause> {
        Clause::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Clauses witnessed by a bound `M` rather than a radius `δ`.
    pub fn uses_bound(self) -> bool {
        matches!(self, Clause::I | Clause::Vi | Clause::Vii)
    }

    /// Successor on the proof cycle i → ii → … → vii → i.
    pub fn next(self) -> Clause {
        match self {
            Clause::I => Clause::Ii,
            Clause::Ii => Clause::Iii,
            Clause::Iii => Clause::Iv,
            Clause::Iv => Clause::V,
            Clause::V => Clause::Vi,
            Clause::Vi => Clause::Vii,
            Clause::Vii => Clause::I,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessBundle {
    pub tau: Rational,
    pub eps: Rational,
    pub delta: Option<Rational>,
    pub m: Option<Rational>,
    pub alpha: Option<Rational>,
    /// Base point `x0` for clauses iii and iv; the origin when absent.
    pub point: Option<SeqVector>,
}

impl WitnessBundle {
    pub fn new(tau: Rational, eps: Rational) -> Self {
        WitnessBundle {
            tau,
            eps,
            delta: None,
            m: None,
            alpha: None,
            point: None,
        }
    }

    pub fn with_m(mut self, m: Rational) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_delta(mut self, delta: Rational) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_alpha(mut self, alpha: Rational) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn at_point(mut self, x0: SeqVector) -> Self {
        self.point = Some(x0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InconsistentBundle(msg));
        if !self.tau.is_positive() {
            return bad(format!("tau = {} must be positive", self.tau));
        }
        if !self.eps.is_positive() || self.eps >= exact::one() {
            return bad(format!("eps = {} must lie in (0, 1)", self.eps));
        }
        if let Some(d) = &self.delta {
            if !d.is_positive() {
                return bad(format!("delta = {d} must be positive"));
            }
        }
        if let Some(m) = &self.m {
            if m.is_negative() {
                return bad(format!("M = {m} must be nonnegative"));
            }
        }
        if let Some(a) = &self.alpha {
            if !a.is_positive() || *a > exact::one() {
                return bad(format!("alpha = {a} must lie in (0, 1]"));
            }
            if self.eps >= *a {
                return bad(format!("eps = {} must be below alpha = {a}", self.eps));
            }
        }
        Ok(())
    }
}

/// One input (or pair) defeating a candidate `M` or `δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationPoint {
    pub candidate: Rational,
    pub x: SeqVector,
    /// Second input for the two-point clauses i and ii.
    pub y: Option<SeqVector>,
    /// The clause's probability at this input; never above `ε`.
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Witness {
        m: Option<Rational>,
        delta: Option<Rational>,
        /// Number of probe inputs the witness was re-checked on.
        checked: usize,
    },
    Refuted { points: Vec<RefutationPoint> },
    Inconclusive { reason: String },
}

impl CheckResult {
    pub fn is_witness(&self) -> bool {
        matches!(self, CheckResult::Witness { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, CheckResult::Refuted { .. })
    }
}

/// Atoms with `‖T_ω‖·δ <= τ`: inside the open `δ`-ball they stay below `τ`.
fn safe_mass(norms: &[OpNorm], t: &RandomOperator, delta: &Rational, tau: &Rational) -> Rational {
    t.space()
        .event_where(|i| norms[i].finite().is_some_and(|v| v * delta <= *tau))
        .prob()
}

struct Ctx<'a> {
    lin: RandomOperator,
    clause: Clause,
    b: &'a WitnessBundle,
    x0: SeqVector,
    probes: Vec<SeqVector>,
}

impl Ctx<'_> {
    /// Probability the clause measures at a given input (pair).
    fn prob_at(&self, cand: &Rational, x: &SeqVector, y: Option<&SeqVector>) -> Result<Rational> {
        let t = &self.lin;
        let zero = SeqVector::zero(t.domain());
        match self.clause {
            Clause::Vii => prob_bound_at(t, x, cand),
            Clause::Vi => {
                let norms = t.linear_norms_at(x)?;
                Ok(t.space().event_where(|i| norms[i] <= *cand).prob())
            }
            Clause::I => prob_lipschitz(t, x, y.unwrap_or(&zero), cand),
            Clause::Ii | Clause::Iii | Clause::Iv | Clause::V => {
                prob_close(t, x, y.unwrap_or(&zero), &self.b.tau)
            }
        }
    }

    /// Inputs (and partners) inside the clause's range for a candidate.
    fn sample_points(&self, cand: &Rational) -> Vec<(SeqVector, Option<SeqVector>)> {
        let mut out = Vec::new();
        let n = self.probes.len();
        for (j, p) in self.probes.iter().enumerate() {
            let q = &self.probes[(j + 1) % n];
            match self.clause {
                Clause::Vii | Clause::Vi => out.push((p.clone(), None)),
                Clause::I => {
                    out.push((p.add(&self.x0).unwrap(), Some(self.x0.clone())));
                    if p != q {
                        out.push((p.clone(), Some(q.clone())));
                    }
                }
                _ => {
                    for s in [exact::ratio(1, 2), exact::ratio(99, 100)] {
                        let step = p.scale(&(cand * s));
                        match self.clause {
                            Clause::V => out.push((step, None)),
                            Clause::Ii => {
                                out.push((self.x0.add(&step).unwrap(), Some(self.x0.clone())));
                                out.push((q.add(&step).unwrap(), Some(q.clone())));
                            }
                            _ => out.push((self.x0.add(&step).unwrap(), Some(self.x0.clone()))),
                        }
                    }
                }
            }
        }
        out
    }

    fn verify(&self, cand: &Rational) -> Result<usize> {
        let pts = self.sample_points(cand);
        for (x, y) in &pts {
            let p = self.prob_at(cand, x, y.as_ref())?;
            if p <= self.b.eps {
                return Err(Error::Invariant(format!(
                    "clause {} witness {cand} fails at {x}: probability {p} <= eps {}",
                    self.clause, self.b.eps
                )));
            }
        }
        Ok(pts.len())
    }

    fn witness(&self, cand: Rational) -> Result<CheckResult> {
        let checked = self.verify(&cand)?;
        Ok(if self.clause.uses_bound() {
            CheckResult::Witness {
                m: Some(cand),
                delta: None,
                checked,
            }
        } else {
            CheckResult::Witness {
                m: None,
                delta: Some(cand),
                checked,
            }
        })
    }

    /// An input pushing every atom in `bad` out of the clause's event.
    fn refute(&self, cand: &Rational, bad: &[usize]) -> Result<Option<RefutationPoint>> {
        let t = &self.lin;
        let level = if self.clause.uses_bound() {
            cand.clone()
        } else {
            &self.b.tau / cand
        };
        let Some(v) = violate_all(t, bad, &level, &self.probes) else {
            return Ok(None);
        };
        let (x, y) = match self.clause {
            Clause::Vii | Clause::Vi => (v, None),
            Clause::I => (v.add(&self.x0)?, Some(self.x0.clone())),
            _ => {
                // shrink so every bad atom lands at or above τ inside the δ-ball
                let norms = t.linear_norms_at(&v)?;
                let low = bad.iter().map(|&i| norms[i].clone()).min().unwrap_or_else(exact::one);
                let step = v.scale(&(&self.b.tau / low));
                match self.clause {
                    Clause::V => (step, None),
                    _ => (self.x0.add(&step)?, Some(self.x0.clone())),
                }
            }
        };
        let prob = self.prob_at(cand, &x, y.as_ref())?;
        if prob > self.b.eps {
            return Err(Error::Invariant(format!(
                "clause {} refutation at {cand} has probability {prob} > eps {}",
                self.clause, self.b.eps
            )));
        }
        Ok(Some(RefutationPoint {
            candidate: cand.clone(),
            x,
            y,
            prob,
        }))
    }

    /// Mass of atoms that can never leave the event for this candidate, and
    /// the others.
    fn split(&self, cand: &Rational, norms: &[OpNorm]) -> Result<(Rational, Vec<usize>)> {
        if self.clause.uses_bound() {
            Ok((self.lin.bounded_event(cand)?.prob(), violators(&self.lin, cand)?))
        } else {
            let good = safe_mass(norms, &self.lin, cand, &self.b.tau);
            let bad = (0..norms.len())
                .filter(|&i| !norms[i].finite().is_some_and(|v| v * cand <= self.b.tau))
                .collect();
            Ok((good, bad))
        }
    }

    fn refute_all(&self, cands: &[Rational], norms: &[OpNorm]) -> Result<CheckResult> {
        let mut points = Vec::new();
        for c in cands {
            let (good, bad) = self.split(c, norms)?;
            if good > self.b.eps {
                return Err(Error::Invariant(format!(
                    "candidate {c} for clause {} was expected to fail",
                    self.clause
                )));
            }
            match self.refute(c, &bad)? {
                Some(p) => points.push(p),
                None => {
                    return Ok(CheckResult::Inconclusive {
                        reason: format!("no adversarial input found for candidate {c}"),
                    })
                }
            }
        }
        Ok(CheckResult::Refuted { points })
    }
}

/// Decides one clause at level `bundle.eps`.
///
/// Without a candidate in the bundle, a witness is built from the smallest
/// operator-norm level `M` with `ℙ[‖T‖ <= M] > ε` (`δ = τ/M`, or `τ` when
/// `M = 0`) and re-checked on every probe. When no level qualifies, the
/// result is refuted at each natural candidate. A candidate `M` or `δ` in
/// the bundle is validated on its own.
pub fn check_clause(
    t: &RandomOperator,
    clause: Clause,
    bundle: &WitnessBundle,
    probes: &ProbeSet,
) -> Result<CheckResult> {
    bundle.validate()?;
    let lin = t.linear_part();
    let x0 = match (&bundle.point, clause) {
        (Some(p), Clause::I | Clause::Ii | Clause::Iii | Clause::Iv) => {
            if p.space() != lin.domain() {
                return Err(Error::mismatch(p.space(), lin.domain()));
            }
            p.clone()
        }
        _ => SeqVector::zero(lin.domain()),
    };
    let ctx = Ctx {
        probes: probes.vectors(lin.domain()),
        lin,
        clause,
        b: bundle,
        x0,
    };
    let norms = ctx.lin.op_norms();
    let tau = &bundle.tau;
    let given = if clause.uses_bound() {
        bundle.m.clone()
    } else {
        bundle.delta.clone()
    };
    if let Some(c) = given {
        let (good, _) = ctx.split(&c, &norms)?;
        if good > bundle.eps {
            return ctx.witness(c);
        }
        return ctx.refute_all(&[c], &norms);
    }
    let levels = norm_levels(&ctx.lin);
    let m_eps = levels
        .iter()
        .find(|m| ctx.lin.bounded_event(m).map(|e| e.prob() > bundle.eps).unwrap_or(false));
    if let Some(m) = m_eps {
        let cand = if clause.uses_bound() {
            m.clone()
        } else if m.is_zero() {
            tau.clone()
        } else {
            tau / m
        };
        return ctx.witness(cand);
    }
    let top = levels.last().cloned().unwrap_or_else(Rational::zero);
    let mut cands: Vec<Rational> = levels.clone();
    cands.push((top + exact::one()) * exact::int(10));
    if !clause.uses_bound() {
        cands = cands
            .iter()
            .map(|m| if m.is_zero() { tau.clone() } else { tau / m })
            .collect();
    }
    let mut seen = std::collections::BTreeSet::new();
    cands.retain(|c| seen.insert(c.clone()));
    ctx.refute_all(&cands, &norms)
}

/// One constructive step of the proof cycle.
///
/// `i → ii` sets `δ = τ/M` (any `δ`, here `τ`, when `M = 0`); `v → vi` sets
/// `M = τ/δ` with `τ` playing the constant `C`; the remaining edges carry
/// the witness over unchanged.
pub fn transform_witness(from: Clause, to: Clause, bundle: &WitnessBundle) -> Result<WitnessBundle> {
    if from.next() != to {
        return Err(Error::UnsupportedEdge {
            from: from.name().into(),
            to: to.name().into(),
        });
    }
    let mut out = bundle.clone();
    if from.uses_bound() {
        let m = bundle.m.clone().ok_or(Error::MissingWitness("bound M"))?;
        if !to.uses_bound() {
            out.delta = Some(if m.is_zero() { bundle.tau.clone() } else { &bundle.tau / m });
        }
    } else {
        let d = bundle.delta.clone().ok_or(Error::MissingWitness("radius delta"))?;
        if to.uses_bound() {
            out.m = Some(&bundle.tau / d);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exact::{int, ratio};
    use crate::spaces::SpaceDescriptor;

    fn small() -> ProbeSet {
        ProbeSet::new(super::super::ProbeConfig {
            basis_max: 16,
            comb_width: 3,
            window_len: 4,
        })
    }

    #[test]
    fn s2_clause_vii() {
        let t = catalog::s2();
        let b = WitnessBundle::new(int(1), ratio(7, 10));
        match check_clause(&t, Clause::Vii, &b, &small()).unwrap() {
            CheckResult::Witness { m, .. } => assert_eq!(m, Some(int(2))),
            r => panic!("{r:?}"),
        }
        let b = WitnessBundle::new(int(1), ratio(9, 10));
        let CheckResult::Refuted { points } = check_clause(&t, Clause::Vii, &b, &small()).unwrap() else {
            panic!()
        };
        for p in points {
            assert!(p.prob <= ratio(4, 5));
            let k = p.x.support_max().unwrap();
            assert!(int(k as i64) > p.candidate);
        }
    }

    #[test]
    fn every_clause_on_s2() {
        let t = catalog::s2();
        for c in Clause::ALL {
            let w = WitnessBundle::new(ratio(1, 3), ratio(7, 10)).at_point(
                SeqVector::basis(2, SpaceDescriptor::C00).unwrap(),
            );
            assert!(check_clause(&t, c, &w, &small()).unwrap().is_witness(), "{c}");
            let r = WitnessBundle::new(ratio(1, 3), ratio(4, 5));
            assert!(check_clause(&t, c, &r, &small()).unwrap().is_refuted(), "{c}");
        }
    }

    #[test]
    fn zero_operator_always_witnessed() {
        for c in Clause::ALL {
            let b = WitnessBundle::new(int(1), ratio(99, 100));
            assert!(check_clause(&catalog::zero(), c, &b, &small()).unwrap().is_witness());
        }
    }

    #[test]
    fn rank_one_refutations() {
        let t = catalog::s3();
        for c in Clause::ALL {
            let b = WitnessBundle::new(ratio(1, 2), ratio(9, 10));
            assert!(check_clause(&t, c, &b, &small()).unwrap().is_refuted(), "{c}");
        }
    }

    #[test]
    fn given_candidates() {
        let t = catalog::s2();
        let ok = WitnessBundle::new(int(1), ratio(1, 4)).with_m(int(1));
        assert!(check_clause(&t, Clause::Vii, &ok, &small()).unwrap().is_witness());
        let too_small = WitnessBundle::new(int(1), ratio(7, 10)).with_m(int(1));
        assert!(check_clause(&t, Clause::Vii, &too_small, &small()).unwrap().is_refuted());
        let wide = WitnessBundle::new(int(1), ratio(7, 10)).with_delta(int(1));
        assert!(check_clause(&t, Clause::V, &wide, &small()).unwrap().is_refuted());
        let narrow = WitnessBundle::new(int(1), ratio(7, 10)).with_delta(ratio(1, 2));
        assert!(check_clause(&t, Clause::V, &narrow, &small()).unwrap().is_witness());
    }

    #[test]
    fn bundle_validation() {
        let b = WitnessBundle::new(int(1), ratio(1, 2)).with_alpha(ratio(1, 2));
        assert!(matches!(b.validate(), Err(Error::InconsistentBundle(_))));
        let b = WitnessBundle::new(int(0), ratio(1, 2));
        assert!(b.validate().is_err());
    }

    #[test]
    fn transforms() {
        let b = WitnessBundle::new(int(1), ratio(7, 10)).with_m(int(2));
        assert_eq!(transform_witness(Clause::I, Clause::Ii, &b).unwrap().delta, Some(ratio(1, 2)));
        let v = WitnessBundle::new(int(1), ratio(7, 10)).with_delta(ratio(1, 4));
        assert_eq!(transform_witness(Clause::V, Clause::Vi, &v).unwrap().m, Some(int(4)));
        assert!(matches!(
            transform_witness(Clause::Vii, Clause::Iii, &b),
            Err(Error::UnsupportedEdge { .. })
        ));
        assert_eq!(
            transform_witness(Clause::Ii, Clause::Iii, &b),
            Err(Error::MissingWitness("radius delta"))
        );
    }

    #[test]
    fn cycle_on_s2() {
        let t = catalog::s2();
        let probes = small();
        let mut b = WitnessBundle::new(int(1), ratio(7, 10)).with_m(int(2));
        let mut c = Clause::Vii;
        for _ in 0..7 {
            let next = c.next();
            b = transform_witness(c, next, &b).unwrap();
            c = next;
            assert!(check_clause(&t, c, &b, &probes).unwrap().is_witness(), "{c}");
        }
        assert_eq!(c, Clause::Vii);
        assert_eq!(b.m, Some(int(2)));
    }
}
