//! Small reference operators used by tests, examples and golden scenarios.

use crate::exact::{int, ratio};
use crate::prob_core::FiniteProbSpace;
use crate::random_operator::{CoeffFamily, LinearMapRep, RandomOperator};
use crate::spaces::{SeqVector, SpaceDescriptor};

const C00: SpaceDescriptor = SpaceDescriptor::C00;

fn three_atoms() -> FiniteProbSpace {
    FiniteProbSpace::new([("a", ratio(1, 2)), ("b", ratio(3, 10)), ("c", ratio(1, 5))]).unwrap()
}

fn diag(f: CoeffFamily) -> LinearMapRep {
    LinearMapRep::Diagonal(f)
}

/// `T_a = I`, `T_b = 2I` with masses `(3/5, 2/5)`.
pub fn s1() -> RandomOperator {
    let space = FiniteProbSpace::new([("a", ratio(3, 5)), ("b", ratio(2, 5))]).unwrap();
    RandomOperator::new(
        space,
        C00,
        C00,
        [
            ("a", diag(CoeffFamily::Constant(int(1)))),
            ("b", diag(CoeffFamily::Constant(int(2)))),
        ],
    )
    .unwrap()
}

/// Diagonal `1`, `2 - 1/n`, `n` with masses `(1/2, 3/10, 1/5)`.
pub fn s2() -> RandomOperator {
    RandomOperator::new(
        three_atoms(),
        C00,
        C00,
        [
            ("a", diag(CoeffFamily::Constant(int(1)))),
            ("b", diag(CoeffFamily::harmonic(int(2), int(-1)))),
            ("c", diag(CoeffFamily::affine(int(1), int(0)))),
        ],
    )
    .unwrap()
}

/// Identity on `a`, `b`; `x ↦ (Σ n·x_n)·e_1` on `c`.
pub fn s3() -> RandomOperator {
    RandomOperator::new(
        three_atoms(),
        C00,
        C00,
        [
            ("a", LinearMapRep::identity_c00()),
            ("b", LinearMapRep::identity_c00()),
            (
                "c",
                LinearMapRep::RankOne {
                    weights: CoeffFamily::affine(int(1), int(0)),
                    output: SeqVector::basis(1, C00).unwrap(),
                },
            ),
        ],
    )
    .unwrap()
}

/// [`s3`] with offset `e_2` added on atom `c`.
pub fn s3_corrupted() -> RandomOperator {
    let t = s3();
    let ev = t.space().event(["c"]).unwrap();
    t.with_corruption(ev, SeqVector::basis(2, C00).unwrap()).unwrap()
}

/// Identity with mass `7/10`, diagonal `n` with mass `3/10`.
pub fn s4() -> RandomOperator {
    let space = FiniteProbSpace::new([("a", ratio(7, 10)), ("b", ratio(3, 10))]).unwrap();
    RandomOperator::new(
        space,
        C00,
        C00,
        [
            ("a", LinearMapRep::identity_c00()),
            ("b", diag(CoeffFamily::affine(int(1), int(0)))),
        ],
    )
    .unwrap()
}

/// Zero operator on a single sure atom.
pub fn zero() -> RandomOperator {
    let space = FiniteProbSpace::new([("a", int(1))]).unwrap();
    RandomOperator::new(space, C00, C00, [("a", LinearMapRep::Zero)]).unwrap()
}

/// Diagonal `n` on a single sure atom.
pub fn unbounded() -> RandomOperator {
    let space = FiniteProbSpace::new([("a", int(1))]).unwrap();
    RandomOperator::new(space, C00, C00, [("a", diag(CoeffFamily::affine(int(1), int(0))))]).unwrap()
}
