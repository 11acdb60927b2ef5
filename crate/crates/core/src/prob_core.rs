//! Finite atomic probability spaces with exact rational masses.
//!
//! The σ-algebra is the full power set of atoms, so an [`Event`] is just a set
//! of atom indices tied to the space that produced it. Atom order is the
//! construction order and every event iterates its members in that order.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Atom {
    id: String,
    mass: Rational,
}

/// `(Ω, 2^Ω, ℙ)` for a finite `Ω` with strictly positive masses summing to 1.
#[derive(Clone)]
pub struct FiniteProbSpace {
    atoms: Arc<[Atom]>,
}

impl fmt::Debug for FiniteProbSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for a in self.atoms.iter() {
            m.entry(&a.id, &a.mass.to_string());
        }
        m.finish()
    }
}

impl PartialEq for FiniteProbSpace {
    fn eq(&self, other: &Self) -> bool {
        same_atoms(&self.atoms, &other.atoms)
    }
}

impl Eq for FiniteProbSpace {}

fn same_atoms(a: &Arc<[Atom]>, b: &Arc<[Atom]>) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

impl FiniteProbSpace {
    /// Builds a space from `(atom_id, mass)` pairs, preserving their order.
    pub fn new<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut total = Rational::zero();
        for (id, mass) in atoms {
            let id = id.into();
            if id.is_empty() {
                return Err(Error::EmptyAtomId);
            }
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateAtom(id));
            }
            if !mass.is_positive() {
                return Err(Error::NonpositiveMass { atom: id, mass });
            }
            total += &mass;
            out.push(Atom { id, mass });
        }
        if out.is_empty() {
            return Err(Error::EmptySpace);
        }
        if !total.is_one() {
            return Err(Error::MassSumNotOne {
                deficit: Rational::one() - total,
            });
        }
        Ok(FiniteProbSpace { atoms: out.into() })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom_id(&self, index: usize) -> &str {
        &self.atoms[index].id
    }

    pub fn mass(&self, index: usize) -> &Rational {
        &self.atoms[index].mass
    }

    pub fn atom_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.atoms.iter().map(|a| a.id.as_str())
    }

    pub fn masses(&self) -> impl Iterator<Item = &Rational> + '_ {
        self.atoms.iter().map(|a| &a.mass)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.id == id)
    }

    /// The sure event Ω.
    pub fn sure(&self) -> Event {
        self.event_from_indices(0..self.len())
    }

    pub fn empty_event(&self) -> Event {
        self.event_from_indices(std::iter::empty())
    }

    /// Event from atom ids; unknown ids are rejected.
    pub fn event<I, S>(&self, ids: I) -> Result<Event>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut members = BTreeSet::new();
        for id in ids {
            let id = id.as_ref();
            let i = self
                .index_of(id)
                .ok_or_else(|| Error::UnknownAtom(id.to_string()))?;
            members.insert(i);
        }
        Ok(Event {
            atoms: self.atoms.clone(),
            members,
        })
    }

    /// Event from atom indices. Panics on an index outside the space.
    pub fn event_from_indices(&self, indices: impl IntoIterator<Item = usize>) -> Event {
        let members: BTreeSet<usize> = indices.into_iter().collect();
        assert!(members.iter().all(|&i| i < self.len()), "atom index out of range");
        Event {
            atoms: self.atoms.clone(),
            members,
        }
    }

    /// Event of atoms satisfying `pred(index)`.
    pub fn event_where(&self, mut pred: impl FnMut(usize) -> bool) -> Event {
        self.event_from_indices((0..self.len()).filter(|&i| pred(i)))
    }

    pub fn owns(&self, event: &Event) -> bool {
        same_atoms(&self.atoms, &event.atoms)
    }

    pub fn prob(&self, event: &Event) -> Result<Rational> {
        if !self.owns(event) {
            return Err(Error::ForeignEvent);
        }
        Ok(event.prob())
    }

    pub fn complement(&self, event: &Event) -> Result<Event> {
        if !self.owns(event) {
            return Err(Error::ForeignEvent);
        }
        Ok(self.event_where(|i| !event.members.contains(&i)))
    }

    /// `ℙ′(Â) = ℙ(Â)/ℙ(Ω′)` on the atoms of `Ω′`, in the original order.
    pub fn condition(&self, event: &Event) -> Result<FiniteProbSpace> {
        if !self.owns(event) {
            return Err(Error::ForeignEvent);
        }
        let p = event.prob();
        if p.is_zero() {
            return Err(Error::NullConditioningEvent);
        }
        let atoms: Vec<Atom> = event
            .members
            .iter()
            .map(|&i| Atom {
                id: self.atoms[i].id.clone(),
                mass: &self.atoms[i].mass / &p,
            })
            .collect();
        Ok(FiniteProbSpace {
            atoms: atoms.into(),
        })
    }
}

/// A set of atoms of one particular space.
#[derive(Clone)]
pub struct Event {
    atoms: Arc<[Atom]>,
    members: BTreeSet<usize>,
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ids()).finish()
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && same_atoms(&self.atoms, &other.atoms)
    }
}

impl Eq for Event {}

impl Event {
    /// Exact mass of the event under its own space.
    pub fn prob(&self) -> Rational {
        self.members
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &self.atoms[i].mass)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(&index)
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.ids().any(|m| m == id)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// Member atom ids in space order.
    pub fn ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.members.iter().map(|&i| self.atoms[i].id.as_str())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn check_same(&self, other: &Event) -> Result<()> {
        if same_atoms(&self.atoms, &other.atoms) {
            Ok(())
        } else {
            Err(Error::ForeignEvent)
        }
    }

    /// `A,B = A ∩ B`.
    pub fn intersect(&self, other: &Event) -> Result<Event> {
        self.check_same(other)?;
        Ok(Event {
            atoms: self.atoms.clone(),
            members: self.members.intersection(&other.members).copied().collect(),
        })
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        self.check_same(other)?;
        Ok(Event {
            atoms: self.atoms.clone(),
            members: self.members.union(&other.members).copied().collect(),
        })
    }

    pub fn is_subset(&self, other: &Event) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.members.is_subset(&other.members))
    }
}

/// `max(0, pA + pB − 1)`, the Bonferroni lower bound on `ℙ(A ∩ B)`.
pub fn joint_lower_bound(pa: &Rational, pb: &Rational) -> Result<Rational> {
    for p in [pa, pb] {
        if p.is_negative() || *p > Rational::one() {
            return Err(Error::OutOfRange(p.clone()));
        }
    }
    let s = pa + pb - Rational::one();
    Ok(if s.is_negative() { Rational::zero() } else { s })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn s2() -> FiniteProbSpace {
        FiniteProbSpace::new([("a", ratio(1, 2)), ("b", ratio(3, 10)), ("c", ratio(1, 5))]).unwrap()
    }

    #[test]
    fn construction() {
        let sure = FiniteProbSpace::new([("a", int(1))]).unwrap();
        assert_eq!(sure.len(), 1);
        assert_eq!(sure.prob(&sure.sure()).unwrap(), int(1));

        let s = s2();
        assert_eq!(s.atom_ids().collect::<Vec<_>>(), ["a", "b", "c"]);

        let dup = FiniteProbSpace::new([("a", ratio(1, 2)), ("b", ratio(1, 2)), ("a", int(0))]);
        assert_eq!(dup.unwrap_err(), Error::DuplicateAtom("a".into()));

        let zero = FiniteProbSpace::new([("a", int(1)), ("b", int(0))]);
        assert!(matches!(zero, Err(Error::NonpositiveMass { .. })));

        let short = FiniteProbSpace::new([("a", ratio(1, 2)), ("b", ratio(2, 5))]);
        assert_eq!(short.unwrap_err(), Error::MassSumNotOne { deficit: ratio(1, 10) });

        let none: Vec<(&str, Rational)> = vec![];
        assert_eq!(FiniteProbSpace::new(none).unwrap_err(), Error::EmptySpace);
        assert_eq!(
            FiniteProbSpace::new([("", int(1))]).unwrap_err(),
            Error::EmptyAtomId
        );
    }

    #[test]
    fn probabilities() {
        let s = s2();
        assert_eq!(s.prob(&s.empty_event()).unwrap(), int(0));
        assert_eq!(s.prob(&s.sure()).unwrap(), int(1));
        assert_eq!(s.prob(&s.event(["a", "b"]).unwrap()).unwrap(), ratio(4, 5));
        assert!(matches!(s.event(["z"]), Err(Error::UnknownAtom(_))));
    }

    #[test]
    fn foreign_events_are_rejected() {
        let s = s2();
        let other = FiniteProbSpace::new([("a", ratio(1, 2)), ("b", ratio(1, 2))]).unwrap();
        let e = other.sure();
        assert_eq!(s.prob(&e).unwrap_err(), Error::ForeignEvent);
        assert_eq!(s.sure().intersect(&e).unwrap_err(), Error::ForeignEvent);
        // structurally identical spaces share events
        let twin = s2();
        assert_eq!(twin.prob(&s.sure()).unwrap(), int(1));
    }

    #[test]
    fn intersections() {
        let s = s2();
        let a = s.event(["a", "b"]).unwrap();
        assert_eq!(a.intersect(&s.sure()).unwrap(), a);
        assert!(a.intersect(&s.empty_event()).unwrap().is_empty());
        let b = s.event(["b", "c"]).unwrap();
        let ab = a.intersect(&b).unwrap();
        assert_eq!(ab.ids().collect::<Vec<_>>(), ["b"]);
        assert_eq!(ab.prob(), ratio(3, 10));
        assert!(ab.prob() >= joint_lower_bound(&a.prob(), &b.prob()).unwrap());
    }

    #[test]
    fn joint_bound_values() {
        assert_eq!(joint_lower_bound(&int(1), &ratio(3, 7)).unwrap(), ratio(3, 7));
        assert_eq!(joint_lower_bound(&ratio(3, 10), &ratio(2, 5)).unwrap(), int(0));
        assert_eq!(joint_lower_bound(&ratio(9, 10), &ratio(4, 5)).unwrap(), ratio(7, 10));
        assert!(matches!(
            joint_lower_bound(&ratio(11, 10), &int(0)),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            joint_lower_bound(&int(0), &int(-1)),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn joint_bound_enumeration_on_ten_atoms() {
        let ids: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let s = FiniteProbSpace::new(ids.iter().map(|i| (i.clone(), ratio(1, 10)))).unwrap();
        let mut tightest: Option<Rational> = None;
        for ma in 0u32..1024 {
            if ma.count_ones() != 9 {
                continue;
            }
            for mb in 0u32..1024 {
                if mb.count_ones() != 8 {
                    continue;
                }
                let a = s.event_where(|i| ma >> i & 1 == 1);
                let b = s.event_where(|i| mb >> i & 1 == 1);
                let p = a.intersect(&b).unwrap().prob();
                assert!(p >= ratio(7, 10));
                tightest = Some(match tightest {
                    Some(t) if t <= p => t,
                    _ => p,
                });
            }
        }
        assert_eq!(tightest.unwrap(), ratio(7, 10));
    }

    #[test]
    fn conditioning() {
        let s = s2();
        assert_eq!(s.condition(&s.sure()).unwrap(), s);
        let c = s.condition(&s.event(["a", "b"]).unwrap()).unwrap();
        assert_eq!(c.atom_ids().collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(c.mass(0), &ratio(5, 8));
        assert_eq!(c.mass(1), &ratio(3, 8));
        assert_eq!(
            s.condition(&s.empty_event()).unwrap_err(),
            Error::NullConditioningEvent
        );
    }

    #[test]
    fn complement_and_sure_intersection() {
        let s = s2();
        for mask in 0u32..8 {
            let a = s.event_where(|i| mask >> i & 1 == 1);
            let ac = s.complement(&a).unwrap();
            assert_eq!(a.prob() + ac.prob(), int(1));
            assert_eq!(a.intersect(&s.sure()).unwrap().prob(), a.prob());
        }
    }
}
