//! Small semigroups used throughout the tests and shipped as the CLI corpus.

use alloc::vec;
use alloc::vec::Vec;

use crate::semigroup::SemigroupDomain;

fn build(rows: Vec<Vec<usize>>) -> SemigroupDomain {
    SemigroupDomain::finite(rows, 0).expect("corpus table is a semigroup")
}

pub fn trivial() -> SemigroupDomain {
    build(vec![vec![0]])
}

/// Cyclic group of order `n`, element `k` standing for `k mod n`.
pub fn cyclic(n: usize) -> SemigroupDomain {
    build((0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect())
}

pub fn klein_four() -> SemigroupDomain {
    build((0..4).map(|x| (0..4).map(|y| x ^ y).collect()).collect())
}

/// Every product equals element 0.
pub fn null(n: usize) -> SemigroupDomain {
    build(vec![vec![0; n]; n])
}

/// `xy = x`.
pub fn left_zero(n: usize) -> SemigroupDomain {
    build((0..n).map(|x| vec![x; n]).collect())
}

/// `xy = y`.
pub fn right_zero(n: usize) -> SemigroupDomain {
    build((0..n).map(|_| (0..n).collect()).collect())
}

/// `{e, a, 0}` with identity `e` (index 0), `a² = 0`, zero at index 2.
pub fn monoid_e_a_zero() -> SemigroupDomain {
    build(vec![vec![0, 1, 2], vec![1, 2, 2], vec![2, 2, 2]])
}

/// `Z₂` with an adjoined zero: `{e, g, 0}`.
pub fn z2_with_zero() -> SemigroupDomain {
    build(vec![vec![0, 1, 2], vec![1, 0, 2], vec![2, 2, 2]])
}

/// `{0, 1}` under multiplication (index 0 is the number 0).
pub fn multiplicative_bits() -> SemigroupDomain {
    build(vec![vec![0, 0], vec![0, 1]])
}

/// The named corpus, all orders ≤ 4, `z0` set to index 0.
pub fn corpus() -> Vec<(&'static str, SemigroupDomain)> {
    vec![
        ("trivial", trivial()),
        ("z2", cyclic(2)),
        ("z3", cyclic(3)),
        ("z4", cyclic(4)),
        ("klein4", klein_four()),
        ("null2", null(2)),
        ("null3", null(3)),
        ("leftzero2", left_zero(2)),
        ("leftzero3", left_zero(3)),
        ("rightzero2", right_zero(2)),
        ("rightzero3", right_zero(3)),
        ("e-a-0", monoid_e_a_zero()),
        ("z2zero", z2_with_zero()),
        ("bits", multiplicative_bits()),
    ]
}
