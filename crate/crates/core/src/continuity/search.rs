//! Adversarial inputs: unit vectors pushing chosen atoms above a level.
//!
//! Every returned vector is re-checked by evaluation before use.

use num_traits::{Signed, Zero};

use crate::exact::{self, Rational};
use crate::random_operator::{CoeffTail, LinearMapRep, OpNorm, RandomOperator};
use crate::spaces::{SeqVector, SpaceDescriptor};

/// Longest window tried when chasing a divergent functional.
pub const WINDOW_CAP: u64 = 4096;

fn floor_plus_one(r: &Rational) -> u64 {
    exact::ceil_u64(&(r.floor() + exact::one())).unwrap_or(u64::MAX)
}

/// An index `n` with `|c(n)| > level`, whenever `sup |c| > level`.
pub fn diagonal_index(t: &CoeffTail, level: &Rational) -> Option<u64> {
    if let Some((n, _)) = t.overrides.iter().find(|(_, v)| v.abs() > *level) {
        return Some(*n);
    }
    let start = t.tail_start();
    if !t.lin.is_zero() {
        // |lin·n + cst + inv/n| >= |lin|·n − |cst| − |inv|
        let need = (level + t.cst.abs() + t.inv.abs()) / t.lin.abs();
        return Some(start.max(floor_plus_one(&need)));
    }
    if let Some(n0) = (1..start).find(|n| !t.overrides.contains_key(n)) {
        if t.value(n0).abs() > *level {
            return Some(n0);
        }
    }
    if t.value(start).abs() > *level {
        return Some(start);
    }
    if t.cst.abs() > *level {
        let need = t.inv.abs() / (t.cst.abs() - level);
        return Some(start.max(floor_plus_one(&need)));
    }
    None
}

fn signs(entries: impl IntoIterator<Item = (u64, Rational)>, space: SpaceDescriptor) -> SeqVector {
    let e = entries
        .into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, if v.is_negative() { -exact::one() } else { exact::one() }));
    SeqVector::from_entries(space, e).expect("indices come from the map")
}

/// `Σ_{n=from}^{to} e_n`.
pub fn window(from: u64, to: u64) -> SeqVector {
    SeqVector::from_entries(SpaceDescriptor::C00, (from..=to).map(|n| (n, exact::one()))).unwrap()
}

/// Unit `x` with `‖rep(x)‖ > level`, when the search finds one.
pub fn exceed_vector(rep: &LinearMapRep, level: &Rational, domain: SpaceDescriptor) -> Option<SeqVector> {
    match rep {
        LinearMapRep::Zero => None,
        LinearMapRep::Diagonal(d) => {
            let n = diagonal_index(&d.canonical(), level)?;
            SeqVector::basis(n, domain).ok()
        }
        LinearMapRep::Matrix(rows) => {
            let row = rows
                .iter()
                .max_by_key(|r| r.iter().map(|a| a.abs()).sum::<Rational>())?;
            let x = signs(row.iter().enumerate().map(|(j, a)| (j as u64 + 1, a.clone())), domain);
            (!x.is_zero()).then_some(x)
        }
        LinearMapRep::RankOne { weights, output } => {
            let t = weights.canonical();
            let target = level / output.norm();
            if let OpNorm::Finite(s) = t.sum_abs() {
                if s <= target {
                    return None;
                }
                return Some(signs(t.overrides.clone(), domain));
            }
            // divergent tail of constant sign: grow an all-ones window
            let from = t.sign_start();
            let mut sum = Rational::zero();
            let mut to = from;
            loop {
                sum += t.value(to);
                if sum.abs() > target {
                    return Some(window(from, to));
                }
                if to - from + 1 >= WINDOW_CAP {
                    return None;
                }
                to += 1;
            }
        }
    }
}

fn exceeds_all(t: &RandomOperator, atoms: &[usize], x: &SeqVector, level: &Rational) -> bool {
    atoms
        .iter()
        .all(|&i| t.maps()[i].apply(x, t.codomain()).norm() > *level)
}

/// Unit `x` with `‖T_ω x‖ > level` for every `ω` in `atoms` at once.
///
/// Diagonal atoms combine exactly: under the sup norm a sum of unit vectors
/// on their violating coordinates violates each of them. Other reps fall back
/// to a shared divergent window and to the `extra` candidates.
pub fn violate_all(
    t: &RandomOperator,
    atoms: &[usize],
    level: &Rational,
    extra: &[SeqVector],
) -> Option<SeqVector> {
    let domain = t.domain();
    let Some(&first) = atoms.first() else {
        return SeqVector::basis(1, domain).ok();
    };
    let maps = t.maps();
    let mut diag_idx = Vec::new();
    let mut others = Vec::new();
    for &i in atoms {
        match &maps[i] {
            LinearMapRep::Diagonal(d) => diag_idx.push(diagonal_index(&d.canonical(), level)?),
            LinearMapRep::Zero => return None,
            _ => others.push(i),
        }
    }
    // shared indices must not add up: the spike vector has to stay unit
    diag_idx.sort_unstable();
    diag_idx.dedup();
    let spikes = SeqVector::from_entries(domain, diag_idx.iter().map(|n| (*n, exact::one()))).ok()?;
    if others.is_empty() {
        return exceeds_all(t, atoms, &spikes, level).then_some(spikes);
    }
    let mut candidates = Vec::new();
    if domain == SpaceDescriptor::C00 {
        // past every spike, override and sign change of the involved tails
        let mut from = diag_idx.iter().max().map_or(1, |n| n + 1);
        for &i in atoms {
            let t = match &maps[i] {
                LinearMapRep::Diagonal(d) => d.canonical(),
                LinearMapRep::RankOne { weights, .. } => weights.canonical(),
                _ => continue,
            };
            from = from.max(t.sign_start());
        }
        let mut len = 1;
        while len <= WINDOW_CAP {
            let x = window(from, from + len - 1).add(&spikes).expect("both in c00");
            if exceeds_all(t, atoms, &x, level) {
                return Some(x);
            }
            len *= 2;
        }
    }
    if others.len() == 1 && diag_idx.is_empty() {
        candidates.extend(exceed_vector(&maps[others[0]], level, domain));
    }
    candidates.extend(exceed_vector(&maps[first], level, domain));
    candidates.extend(extra.iter().cloned());
    candidates
        .into_iter()
        .filter_map(|x| x.normalized().ok())
        .find(|x| exceeds_all(t, atoms, x, level))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::exact::{int, ratio};
    use crate::random_operator::CoeffFamily;

    #[test]
    fn diagonal_indices_exceed_level() {
        let fams = [
            CoeffFamily::harmonic(int(2), int(-1)),
            CoeffFamily::harmonic(int(-3), int(7)),
            CoeffFamily::affine(int(-2), int(5)),
            CoeffFamily::table([(1, int(9)), (3, int(0))], CoeffFamily::harmonic(int(1), int(1))),
        ];
        for f in fams {
            let t = f.canonical();
            let sup = t.sup_abs();
            for level in [int(0), ratio(1, 2), int(1), ratio(19, 10), int(3), int(50)] {
                match diagonal_index(&t, &level) {
                    Some(n) => assert!(f.value(n).abs() > level),
                    None => assert!(sup.at_most(&level), "{f:?} at {level}"),
                }
            }
        }
    }

    #[test]
    fn shared_spike_indices_stay_unit() {
        let space = crate::prob_core::FiniteProbSpace::new([("a", ratio(1, 2)), ("b", ratio(1, 2))]).unwrap();
        let d = |c| LinearMapRep::Diagonal(CoeffFamily::Constant(int(c)));
        let t = RandomOperator::new(space, SpaceDescriptor::C00, SpaceDescriptor::C00, [("a", d(3)), ("b", d(5))])
            .unwrap();
        let x = violate_all(&t, &[0, 1], &int(2), &[]).unwrap();
        assert_eq!(x.norm(), int(1));
    }

    #[test]
    fn s2_violators_combine() {
        let t = catalog::s2();
        let x = violate_all(&t, &[1, 2], &int(1), &[]).unwrap();
        let y = t.apply(&x).unwrap();
        assert!(y.values()[1].norm() > int(1));
        assert!(y.values()[2].norm() > int(1));
    }

    #[test]
    fn rank_one_window_escapes() {
        let t = catalog::s3();
        for level in [int(1), int(10), int(1000)] {
            let x = violate_all(&t, &[2], &level, &[]).unwrap();
            assert_eq!(x.norm(), int(1));
            assert!(t.apply(&x).unwrap().values()[2].norm() > level);
        }
    }
}
