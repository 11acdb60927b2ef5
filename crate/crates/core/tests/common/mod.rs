//! Seeded generators shared by the property and acceptance tests.
#![allow(dead_code)]

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use randop_core::continuity::{ProbeConfig, ProbeSet};
use randop_core::exact::{int, ratio};
use randop_core::prob_core::{Event, FiniteProbSpace};
use randop_core::random_operator::{CoeffFamily, LinearMapRep, RandomOperator};
use randop_core::sequences::SequenceSpec;
use randop_core::spaces::{SeqVector, SpaceDescriptor};
use randop_core::Rational;

pub const C00: SpaceDescriptor = SpaceDescriptor::C00;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small probe set keeping the clause checks fast.
pub fn small_probes() -> ProbeSet {
    ProbeSet::new(ProbeConfig {
        basis_max: 8,
        comb_width: 2,
        window_len: 3,
    })
}

pub fn small_rational(r: &mut impl Rng, num: i64, den: i64) -> Rational {
    ratio(r.gen_range(-num..=num), r.gen_range(1..=den))
}

/// Atoms `w0, w1, …` with integer weights 1..=5, normalized.
pub fn space(r: &mut impl Rng, max_atoms: usize) -> FiniteProbSpace {
    let n = r.gen_range(1..=max_atoms);
    let w: Vec<i64> = (0..n).map(|_| r.gen_range(1..=5)).collect();
    let total: i64 = w.iter().sum();
    FiniteProbSpace::new(w.iter().enumerate().map(|(i, wi)| (format!("w{i}"), ratio(*wi, total)))).unwrap()
}

pub fn coeff_family(r: &mut impl Rng, depth: u32) -> CoeffFamily {
    match r.gen_range(0..if depth == 0 { 3 } else { 4 }) {
        0 => CoeffFamily::constant(small_rational(r, 4, 3)),
        1 => {
            let a = if r.gen_bool(0.5) { int(0) } else { small_rational(r, 3, 2) };
            CoeffFamily::affine(a, small_rational(r, 3, 2))
        }
        2 => CoeffFamily::harmonic(small_rational(r, 3, 2), small_rational(r, 3, 1)),
        _ => {
            let k = r.gen_range(1..=3);
            let over: Vec<(u64, Rational)> = (0..k).map(|_| (r.gen_range(1..=6), small_rational(r, 5, 2))).collect();
            CoeffFamily::table(over, coeff_family(r, depth - 1))
        }
    }
}

/// Weights whose partial sums a bounded window search can push past any
/// fixed level: a nonzero limit term, or a summable tail.
pub fn rank_one_weights(r: &mut impl Rng) -> CoeffFamily {
    loop {
        let f = coeff_family(r, 1);
        let t = f.canonical();
        if !t.lin.is_zero() || !t.cst.is_zero() || t.inv.is_zero() {
            return f;
        }
    }
}

pub fn sparse_vector(r: &mut impl Rng, space: SpaceDescriptor, max_index: u64) -> SeqVector {
    let top = space.dimension().map_or(max_index, |d| max_index.min(d as u64));
    let k = r.gen_range(1..=3);
    SeqVector::from_entries(space, (0..k).map(|_| (r.gen_range(1..=top), small_rational(r, 3, 2)))).unwrap()
}

pub fn nonzero_vector(r: &mut impl Rng, space: SpaceDescriptor, max_index: u64) -> SeqVector {
    loop {
        let v = sparse_vector(r, space, max_index);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Diagonal (or zero) atoms on `c00`.
pub fn diagonal_operator(r: &mut impl Rng) -> RandomOperator {
    let s = space(r, 6);
    let maps: Vec<(String, LinearMapRep)> = s
        .atom_ids()
        .map(|id| {
            let rep = if r.gen_bool(0.1) {
                LinearMapRep::Zero
            } else {
                LinearMapRep::Diagonal(coeff_family(r, 1))
            };
            (id.to_string(), rep)
        })
        .collect();
    RandomOperator::new(s, C00, C00, maps).unwrap()
}

/// Mixed diagonal, rank-one and zero atoms on `c00`.
pub fn c00_operator(r: &mut impl Rng) -> RandomOperator {
    let s = space(r, 5);
    let maps: Vec<(String, LinearMapRep)> = s
        .atom_ids()
        .map(|id| {
            let rep = match r.gen_range(0..10) {
                0 => LinearMapRep::Zero,
                1..=5 => LinearMapRep::Diagonal(coeff_family(r, 1)),
                _ => LinearMapRep::RankOne {
                    weights: rank_one_weights(r),
                    output: nonzero_vector(r, C00, 4),
                },
            };
            (id.to_string(), rep)
        })
        .collect();
    RandomOperator::new(s, C00, C00, maps).unwrap()
}

/// Matrix atoms between small coordinate spaces.
pub fn matrix_operator(r: &mut impl Rng) -> RandomOperator {
    let s = space(r, 4);
    let n = r.gen_range(1..=3);
    let m = r.gen_range(1..=3);
    let maps: Vec<(String, LinearMapRep)> = s
        .atom_ids()
        .map(|id| {
            let rows = (0..m).map(|_| (0..n).map(|_| small_rational(r, 3, 2)).collect()).collect();
            (id.to_string(), LinearMapRep::Matrix(rows))
        })
        .collect();
    RandomOperator::new(
        s,
        SpaceDescriptor::finite(n).unwrap(),
        SpaceDescriptor::finite(m).unwrap(),
        maps,
    )
    .unwrap()
}

/// Any of the three operator shapes.
pub fn operator(r: &mut impl Rng) -> RandomOperator {
    match r.gen_range(0..5) {
        0 | 1 => diagonal_operator(r),
        2 | 3 => c00_operator(r),
        _ => matrix_operator(r),
    }
}

/// Null sequence specs valid on `domain`.
pub fn null_spec(r: &mut impl Rng, domain: SpaceDescriptor) -> SequenceSpec {
    match domain {
        SpaceDescriptor::C00 => match r.gen_range(0..4) {
            0 => SequenceSpec::ScaledBasis {
                p: r.gen_range(1..=2),
                scale: ratio(r.gen_range(1..=3), r.gen_range(1..=2)),
            },
            1 => SequenceSpec::WindowSum { len: r.gen_range(1..=4) },
            2 => SequenceSpec::ScaledFixed(nonzero_vector(r, C00, 5)),
            _ => SequenceSpec::scaled_basis(1),
        },
        d => SequenceSpec::ScaledFixed(nonzero_vector(r, d, 5)),
    }
}

/// Every event of the space, as index subsets in binary order.
pub fn all_events(space: &FiniteProbSpace) -> Vec<Event> {
    (0u32..1 << space.len())
        .map(|mask| space.event_from_indices((0..space.len()).filter(|i| mask & (1 << i) != 0)))
        .collect()
}

pub fn shuffle<T>(r: &mut impl Rng, v: &mut [T]) {
    v.shuffle(r);
}
