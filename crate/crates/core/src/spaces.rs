//! Sup-normed coordinate spaces: `ℝ^d` and the finitely supported sequences `c00`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceDescriptor {
    FiniteDim(usize),
    C00,
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceDescriptor::FiniteDim(d) => write!(f, "R^{d}"),
            SpaceDescriptor::C00 => f.write_str("c00"),
        }
    }
}

impl SpaceDescriptor {
    pub fn finite(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(SpaceDescriptor::FiniteDim(dim))
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            SpaceDescriptor::FiniteDim(d) => Some(*d),
            SpaceDescriptor::C00 => None,
        }
    }

    /// `c00` is not complete under the sup norm; `ℝ^d` is.
    pub fn is_complete(&self) -> bool {
        matches!(self, SpaceDescriptor::FiniteDim(_))
    }

    pub fn check_index(&self, index: u64) -> Result<()> {
        let ok = index >= 1
            && match self {
                SpaceDescriptor::FiniteDim(d) => index <= *d as u64,
                SpaceDescriptor::C00 => true,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index,
                space: self.to_string(),
            })
        }
    }
}

/// A vector with finitely many nonzero rational coordinates (1-based).
///
/// Zero entries are never stored, so structural equality is vector equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqVector {
    entries: BTreeMap<u64, Rational>,
    space: SpaceDescriptor,
}

impl SeqVector {
    pub fn zero(space: SpaceDescriptor) -> Self {
        SeqVector {
            entries: BTreeMap::new(),
            space,
        }
    }

    /// Unit vector `e_n`.
    pub fn basis(n: u64, space: SpaceDescriptor) -> Result<Self> {
        space.check_index(n)?;
        let mut entries = BTreeMap::new();
        entries.insert(n, Rational::from_integer(1.into()));
        Ok(SeqVector { entries, space })
    }

    pub fn from_entries(
        space: SpaceDescriptor,
        entries: impl IntoIterator<Item = (u64, Rational)>,
    ) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (i, v) in entries {
            space.check_index(i)?;
            let slot = out.entry(i).or_insert_with(Rational::zero);
            *slot += v;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(SeqVector { entries: out, space })
    }

    pub(crate) fn from_canonical(space: SpaceDescriptor, entries: BTreeMap<u64, Rational>) -> Self {
        debug_assert!(entries.values().all(|v| !v.is_zero()));
        SeqVector { entries, space }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn get(&self, index: u64) -> Rational {
        self.entries.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> &BTreeMap<u64, Rational> {
        &self.entries
    }

    pub fn support_max(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sup norm.
    pub fn norm(&self) -> Rational {
        self.entries
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn in_unit_ball(&self) -> bool {
        self.norm() <= Rational::from_integer(1.into())
    }

    fn check_space(&self, other: &SeqVector) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::mismatch(self.space, other.space))
        }
    }

    pub fn add(&self, other: &SeqVector) -> Result<SeqVector> {
        self.check_space(other)?;
        let mut entries = self.entries.clone();
        for (i, v) in &other.entries {
            let slot = entries.entry(*i).or_insert_with(Rational::zero);
            *slot += v;
            if slot.is_zero() {
                entries.remove(i);
            }
        }
        Ok(SeqVector {
            entries,
            space: self.space,
        })
    }

    pub fn sub(&self, other: &SeqVector) -> Result<SeqVector> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SeqVector {
        SeqVector {
            entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect(),
            space: self.space,
        }
    }

    pub fn scale(&self, c: &Rational) -> SeqVector {
        if c.is_zero() {
            return SeqVector::zero(self.space);
        }
        SeqVector {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
            space: self.space,
        }
    }

    /// `c·self + d·other`.
    pub fn combine(&self, c: &Rational, other: &SeqVector, d: &Rational) -> Result<SeqVector> {
        self.scale(c).add(&other.scale(d))
    }

    /// The same vector rescaled to unit sup norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<SeqVector> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(&self.norm().recip()))
    }

    /// Reinterprets the coordinates in another space, checking ranges.
    pub fn in_space(&self, space: SpaceDescriptor) -> Result<SeqVector> {
        for i in self.entries.keys() {
            space.check_index(*i)?;
        }
        Ok(SeqVector {
            entries: self.entries.clone(),
            space,
        })
    }
}

impl fmt::Display for SeqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}: {v}")?;
        }
        f.write_str("}")
    }
}
