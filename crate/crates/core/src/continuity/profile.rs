//! `f(M) = inf_x ℙ[‖T(x)‖ <= M‖x‖]` and its limit `α_T`.

use num_traits::{One, Signed, Zero};

use super::probes::ProbeSet;
use super::search::{exceed_vector, violate_all};
use super::prob_bound_at;
use crate::error::{Error, Result};
use crate::exact::{self, Rational};
use crate::random_operator::RandomOperator;
use crate::spaces::SeqVector;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Method {
    Exact,
    Bracket { lower: Rational, upper: Rational },
}

/// `lower <= f(M) <= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfilePoint {
    pub m: Rational,
    pub lower: Rational,
    pub upper: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaProfile {
    /// Step function `M ↦ ℙ[‖T‖ <= M]` as `(M, value)` from each jump on.
    /// It equals `f` when the method is exact and bounds it below otherwise.
    pub breakpoints: Vec<(Rational, Rational)>,
    pub grid: Vec<ProfilePoint>,
    /// Exact value, or the lower end of the bracket.
    pub alpha_t: Rational,
    pub method: Method,
}

impl AlphaProfile {
    pub fn lower(&self) -> &Rational {
        match &self.method {
            Method::Exact => &self.alpha_t,
            Method::Bracket { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> &Rational {
        match &self.method {
            Method::Exact => &self.alpha_t,
            Method::Bracket { upper, .. } => upper,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.method == Method::Exact
    }

    /// Value of the breakpoint step function at `m`.
    pub fn step_value(&self, m: &Rational) -> Rational {
        self.breakpoints
            .iter()
            .take_while(|(b, _)| b <= m)
            .last()
            .map_or_else(Rational::zero, |(_, v)| v.clone())
    }
}

fn check_grid(grid: &[Rational], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(v) = grid.iter().find(|v| v.is_negative()) {
        return Err(Error::InvalidGrid(format!("{what} value {v} is negative")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(format!("{what} grid must be strictly increasing")));
    }
    Ok(())
}

/// `{0}` followed by the distinct positive finite operator norms.
pub(crate) fn norm_levels(t: &RandomOperator) -> Vec<Rational> {
    let mut levels = vec![Rational::zero()];
    levels.extend(t.finite_norm_levels().into_iter().filter(|v| v.is_positive()));
    levels
}

fn breakpoints(t: &RandomOperator) -> Result<Vec<(Rational, Rational)>> {
    norm_levels(t)
        .into_iter()
        .map(|m| Ok((m.clone(), t.bounded_event(&m)?.prob())))
        .collect()
}

/// Atoms whose operator norm exceeds `m`.
pub(crate) fn violators(t: &RandomOperator, m: &Rational) -> Result<Vec<usize>> {
    let good = t.bounded_event(m)?;
    Ok((0..t.space().len()).filter(|i| !good.contains(*i)).collect())
}

/// Profile over `m_grid`.
///
/// With only diagonal (or zero) atoms the violators at level `M` can be hit
/// by one input, so `f(M)` is exactly the mass of `{‖T_ω‖ <= M}`; the
/// combined input is built and checked for every grid point. Otherwise each
/// `f(M)` is bracketed by that mass and the best probe or adversarial input.
///
/// In either case `α_T` is the mass of the finite-norm atoms: infinite norms
/// in this operator grammar come from divergent coefficient tails, and a long
/// enough all-ones window past the last sign change pushes every such atom
/// above any fixed level at once.
pub fn f_profile(t: &RandomOperator, probes: &ProbeSet, m_grid: &[Rational]) -> Result<AlphaProfile> {
    check_grid(m_grid, "M")?;
    let lin = t.linear_part();
    let exact = lin.is_diagonal_only();
    let probe_vecs = probes.vectors(lin.domain());
    let mut grid = Vec::with_capacity(m_grid.len());
    for m in m_grid {
        let bad = violators(&lin, m)?;
        let lower = lin.bounded_event(m)?.prob();
        let adversary = violate_all(&lin, &bad, m, &probe_vecs);
        let upper = if exact {
            let x = adversary.ok_or_else(|| {
                Error::Invariant(format!("no combined violator for diagonal atoms at M={m}"))
            })?;
            let p = prob_bound_at(&lin, &x, m)?;
            if p != lower {
                return Err(Error::Invariant(format!(
                    "combined violator at M={m} gives {p}, expected {lower}"
                )));
            }
            p
        } else {
            let mut candidates: Vec<SeqVector> = adversary.into_iter().collect();
            for &i in &bad {
                candidates.extend(exceed_vector(&lin.maps()[i], m, lin.domain()));
            }
            let mut best = Rational::one();
            for x in candidates.iter().chain(&probe_vecs) {
                best = best.min(prob_bound_at(&lin, x, m)?);
            }
            if best < lower {
                return Err(Error::Invariant(format!(
                    "probe beats the operator-norm bound at M={m}: {best} < {lower}"
                )));
            }
            best
        };
        grid.push(ProfilePoint {
            m: m.clone(),
            lower,
            upper,
        });
    }
    let alpha = lin.finite_norm_event().prob();
    let method = if exact {
        Method::Exact
    } else {
        Method::Bracket {
            lower: alpha.clone(),
            upper: alpha.clone(),
        }
    };
    Ok(AlphaProfile {
        breakpoints: breakpoints(&lin)?,
        grid,
        alpha_t: alpha,
        method,
    })
}

/// `α_T` with the profile evaluated at its own jump points.
pub fn alpha_t(t: &RandomOperator) -> Result<AlphaProfile> {
    f_profile(t, &ProbeSet::default(), &norm_levels(t))
}

/// Definitional brute force, independent of the symbolic norms.
///
/// An `ε` passes when some grid `M` gives `ℙ[‖T(x)‖ <= M‖x‖] > ε` on every
/// probe. Returns the smallest failing `ε`, `1` if none fails, and `0` when
/// already the smallest grid `ε` fails.
pub fn alpha_oracle(
    t: &RandomOperator,
    eps_grid: &[Rational],
    m_grid: &[Rational],
    probes: &ProbeSet,
) -> Result<Rational> {
    check_grid(eps_grid, "eps")?;
    check_grid(m_grid, "M")?;
    let lin = t.linear_part();
    let xs = probes.vectors(lin.domain());
    // worst[j] = min over probes of ℙ[‖T(x)‖ <= M_j‖x‖]
    let mut worst = vec![Rational::one(); m_grid.len()];
    for x in &xs {
        let y = lin.apply(x)?;
        let nx = x.norm();
        for (j, m) in m_grid.iter().enumerate() {
            let bound = m * &nx;
            let p: Rational = y
                .values()
                .iter()
                .zip(lin.space().masses())
                .filter(|(v, _)| v.norm() <= bound)
                .map(|(_, w)| w.clone())
                .sum();
            if p < worst[j] {
                worst[j] = p;
            }
        }
    }
    let passes = |eps: &Rational| worst.iter().any(|p| p > eps);
    match eps_grid.iter().position(|e| !passes(e)) {
        None => Ok(exact::one()),
        Some(0) => Ok(exact::zero()),
        Some(i) => Ok(eps_grid[i].clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exact::{int, ratio};

    fn tenths() -> Vec<Rational> {
        (1..=9).map(|k| ratio(k, 10)).collect()
    }

    #[test]
    fn s2_profile() {
        let p = alpha_t(&catalog::s2()).unwrap();
        assert_eq!(p.method, Method::Exact);
        assert_eq!(p.alpha_t, ratio(4, 5));
        assert_eq!(
            p.breakpoints,
            vec![(int(0), int(0)), (int(1), ratio(1, 2)), (int(2), ratio(4, 5))]
        );
        assert_eq!(p.step_value(&ratio(3, 2)), ratio(1, 2));
        assert_eq!(p.step_value(&ratio(1, 2)), int(0));
    }

    #[test]
    fn s1_and_trivial_profiles() {
        let s1 = alpha_t(&catalog::s1()).unwrap();
        assert_eq!(s1.alpha_t, int(1));
        assert_eq!(s1.breakpoints.last().unwrap(), &(int(2), int(1)));
        let z = f_profile(&catalog::zero(), &ProbeSet::default(), &[int(0), int(5)]).unwrap();
        assert!(z.grid.iter().all(|pt| pt.lower == int(1) && pt.upper == int(1)));
        assert_eq!(z.alpha_t, int(1));
        assert_eq!(alpha_t(&catalog::unbounded()).unwrap().alpha_t, int(0));
    }

    #[test]
    fn rank_one_brackets() {
        let p = f_profile(&catalog::s3(), &ProbeSet::default(), &[int(0), int(1), int(10)]).unwrap();
        assert!(matches!(p.method, Method::Bracket { .. }));
        assert_eq!(p.lower(), &ratio(4, 5));
        for pt in &p.grid {
            assert!(pt.lower <= pt.upper);
        }
        // identity atoms pass at M = 1, atom c is escaped
        assert_eq!(p.grid[1].upper, ratio(4, 5));
    }

    #[test]
    fn oracle_examples() {
        let probes = ProbeSet::default();
        let m = [int(1), int(2), int(3), int(10)];
        assert_eq!(alpha_oracle(&catalog::s2(), &tenths(), &m, &probes).unwrap(), ratio(4, 5));
        assert_eq!(alpha_oracle(&catalog::zero(), &tenths(), &m, &probes).unwrap(), int(1));
        assert_eq!(alpha_oracle(&catalog::unbounded(), &tenths(), &m, &probes).unwrap(), int(0));
    }

    #[test]
    fn grids_are_validated() {
        let t = catalog::s2();
        assert_eq!(f_profile(&t, &ProbeSet::default(), &[]).unwrap_err(), Error::EmptyGrid);
        assert!(matches!(
            f_profile(&t, &ProbeSet::default(), &[int(2), int(1)]),
            Err(Error::InvalidGrid(_))
        ));
    }
}
