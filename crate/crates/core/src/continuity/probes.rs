//! Deterministic unit-norm test vectors standing in for `B_X`.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::exact::{int, Rational};
use crate::spaces::{SeqVector, SpaceDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeConfig {
    /// Basis vectors `e_1..e_N`, and the start range of blocks and windows.
    pub basis_max: u64,
    /// Widest `±1` sign block.
    pub comb_width: u64,
    /// Longest all-ones window.
    pub window_len: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            basis_max: 64,
            comb_width: 4,
            window_len: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProbeSet {
    pub config: ProbeConfig,
    user: Vec<SeqVector>,
}

impl ProbeSet {
    pub fn new(config: ProbeConfig) -> Self {
        ProbeSet {
            config,
            user: Vec::new(),
        }
    }

    /// Adds user vectors, rescaled to unit norm. Rejects the zero vector.
    pub fn with_user(mut self, vectors: impl IntoIterator<Item = SeqVector>) -> Result<Self> {
        for v in vectors {
            self.user.push(v.normalized()?);
        }
        Ok(self)
    }

    pub fn user(&self) -> &[SeqVector] {
        &self.user
    }

    /// All probes for `domain`, deduplicated, in a fixed order.
    pub fn vectors(&self, domain: SpaceDescriptor) -> Vec<SeqVector> {
        let n = match domain.dimension() {
            Some(d) => self.config.basis_max.min(d as u64),
            None => self.config.basis_max,
        };
        let last = domain.dimension().map_or(u64::MAX, |d| d as u64);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |v: SeqVector| {
            let key: Vec<(u64, Rational)> = v.entries().iter().map(|(i, c)| (*i, c.clone())).collect();
            if !v.is_zero() && seen.insert(key) {
                out.push(v);
            }
        };
        for j in 1..=n {
            push(SeqVector::basis(j, domain).expect("index within dimension"));
        }
        for w in 2..=self.config.comb_width {
            for j in 1..=n {
                if j + w - 1 > last {
                    break;
                }
                // first sign fixed to +; the rest run over all patterns
                for mask in 0..1u64 << (w - 1) {
                    let entries = (0..w).map(|t| {
                        let neg = t > 0 && mask >> (t - 1) & 1 == 1;
                        (j + t, int(if neg { -1 } else { 1 }))
                    });
                    push(SeqVector::from_entries(domain, entries).expect("index within dimension"));
                }
            }
        }
        for len in 2..=self.config.window_len {
            for j in 1..=n {
                if j + len - 1 > last {
                    break;
                }
                let entries = (j..j + len).map(|i| (i, int(1)));
                push(SeqVector::from_entries(domain, entries).expect("index within dimension"));
            }
        }
        for v in &self.user {
            if let Ok(v) = v.in_space(domain) {
                push(v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn probes_are_unit_and_distinct() {
        let set = ProbeSet::new(ProbeConfig {
            basis_max: 10,
            comb_width: 3,
            window_len: 4,
        });
        let v = set.vectors(SpaceDescriptor::C00);
        // 10 basis, 10·2 width-2 and 10·4 width-3 blocks, windows of 3 and 4
        // duplicate the all-plus blocks
        assert_eq!(v.len(), 10 + 20 + 40 + 10);
        assert!(v.iter().all(|x| x.norm() == int(1)));
    }

    #[test]
    fn finite_dim_probes_stay_in_range() {
        let fd = SpaceDescriptor::finite(3).unwrap();
        let v = ProbeSet::default().vectors(fd);
        assert!(v.iter().all(|x| x.support_max().unwrap() <= 3));
        assert!(v.len() > 3);
    }

    #[test]
    fn user_vectors_are_normalised() {
        let u = SeqVector::from_entries(SpaceDescriptor::C00, [(100, int(4)), (101, int(-2))]).unwrap();
        let set = ProbeSet::default().with_user([u]).unwrap();
        assert_eq!(set.user()[0].get(101), ratio(-1, 2));
        assert!(ProbeSet::default()
            .with_user([SeqVector::zero(SpaceDescriptor::C00)])
            .is_err());
    }
}
