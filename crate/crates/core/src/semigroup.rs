//! Composition domains: finite Cayley tables and a window of the additive
//! naturals, each with a distinguished element `z0`.
//!
//! Elements are dense indices `0..len()`. In the windowed backend index `i`
//! stands for the natural number `i + 1` and composition is only defined
//! while the sum stays inside the window.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::tol;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemigroupError {
    #[error("associativity fails: ({x}*{y})*{z} != {x}*({y}*{z})")]
    AssociativityViolation { x: usize, y: usize, z: usize },
    #[error("table entry {value} at row {row}, column {col} is outside 0..{n}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        n: usize,
    },
    #[error("table has {found} rows or columns, expected {expected}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("z0 = {z0} is not an element of a domain with {n} elements")]
    InvalidZ0 { z0: usize, n: usize },
    #[error("a semigroup needs at least one element")]
    Empty,
    #[error("composition of {x} and {y} leaves the window")]
    UndefinedComposition { x: usize, y: usize },
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "kebab-case")]
pub enum DomainKind {
    /// Row-major `n × n` Cayley table.
    FiniteTable { n: usize, table: Vec<usize> },
    /// `{1, ..., window}` under addition, partial.
    NaturalsWindow { window: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupDomain {
    kind: DomainKind,
    z0: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl SemigroupDomain {
    /// Build a finite domain without checking associativity. Shape and
    /// index range are checked; call [`validate`](Self::validate) before use.
    pub fn from_table(rows: Vec<Vec<usize>>, z0: usize) -> Result<Self, SemigroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(SemigroupError::Empty);
        }
        let mut table = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(SemigroupError::ShapeMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            table.extend_from_slice(row);
        }
        Ok(SemigroupDomain {
            kind: DomainKind::FiniteTable { n, table },
            z0,
            labels: None,
        })
    }

    /// Build and validate a finite domain.
    pub fn finite(rows: Vec<Vec<usize>>, z0: usize) -> Result<Self, SemigroupError> {
        let d = Self::from_table(rows, z0)?;
        d.validate()?;
        Ok(d)
    }

    /// The window `{1, ..., window}` with `z0` given as a natural number.
    pub fn naturals_window(window: usize, z0: usize) -> Result<Self, SemigroupError> {
        if window == 0 {
            return Err(SemigroupError::Empty);
        }
        if z0 == 0 || z0 > window {
            return Err(SemigroupError::InvalidZ0 { z0, n: window });
        }
        Ok(SemigroupDomain {
            kind: DomainKind::NaturalsWindow { window },
            z0: z0 - 1,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, SemigroupError> {
        if labels.len() != self.len() {
            return Err(SemigroupError::LabelCount {
                expected: self.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Same composition, different distinguished element (index).
    pub fn with_z0(&self, z0: usize) -> Result<Self, SemigroupError> {
        if z0 >= self.len() {
            return Err(SemigroupError::InvalidZ0 { z0, n: self.len() });
        }
        let mut d = self.clone();
        d.z0 = z0;
        Ok(d)
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn is_finite_table(&self) -> bool {
        matches!(self.kind, DomainKind::FiniteTable { .. })
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            DomainKind::FiniteTable { n, .. } => *n,
            DomainKind::NaturalsWindow { window } => *window,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the distinguished element.
    pub fn z0(&self) -> usize {
        self.z0
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.len()
    }

    pub fn label(&self, x: usize) -> String {
        match (&self.labels, &self.kind) {
            (Some(l), _) => l[x].clone(),
            (None, DomainKind::NaturalsWindow { .. }) => format!("{}", x + 1),
            (None, DomainKind::FiniteTable { .. }) => format!("{x}"),
        }
    }

    /// Table lookup, or addition inside the window. `None` means undefined.
    pub fn compose(&self, x: usize, y: usize) -> Option<usize> {
        match &self.kind {
            DomainKind::FiniteTable { n, table } => Some(table[x * n + y]),
            DomainKind::NaturalsWindow { window } => {
                let s = x + y + 1;
                (s < *window).then_some(s)
            }
        }
    }

    pub fn try_compose(&self, x: usize, y: usize) -> Result<usize, SemigroupError> {
        self.compose(x, y)
            .ok_or(SemigroupError::UndefinedComposition { x, y })
    }

    /// `x·y·z0` when every intermediate composition is defined.
    pub fn compose_z0(&self, x: usize, y: usize) -> Option<usize> {
        self.compose(x, y).and_then(|xy| self.compose(xy, self.z0))
    }

    /// `z0·z0`.
    pub fn z0_squared(&self) -> Option<usize> {
        self.compose(self.z0, self.z0)
    }

    /// All `(x, y, xy)` with `xy` defined.
    pub fn defined_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |x| (0..n).filter_map(move |y| self.compose(x, y).map(|xy| (x, y, xy))))
    }

    /// Checks table shape, index range, associativity and `z0`.
    pub fn validate(&self) -> Result<(), SemigroupError> {
        let n = self.len();
        if n == 0 {
            return Err(SemigroupError::Empty);
        }
        if self.z0 >= n {
            return Err(SemigroupError::InvalidZ0 { z0: self.z0, n });
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(SemigroupError::LabelCount {
                    expected: n,
                    found: labels.len(),
                });
            }
        }
        let DomainKind::FiniteTable { table, .. } = &self.kind else {
            return Ok(());
        };
        if table.len() != n * n {
            return Err(SemigroupError::ShapeMismatch {
                expected: n * n,
                found: table.len(),
            });
        }
        for (k, &v) in table.iter().enumerate() {
            if v >= n {
                return Err(SemigroupError::IndexOutOfRange {
                    row: k / n,
                    col: k % n,
                    value: v,
                    n,
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = table[x * n + y];
                for z in 0..n {
                    let yz = table[y * n + z];
                    if table[xy * n + z] != table[x * n + yz] {
                        return Err(SemigroupError::AssociativityViolation { x, y, z });
                    }
                }
            }
        }
        Ok(())
    }

    /// `T²z0 = {xyz0 : x, y ∈ T}`, skipping undefined compositions.
    pub fn product_set_z0(&self, t: &ElementSubset) -> ElementSubset {
        let mut out = ElementSubset::empty(self.len());
        for x in t.iter() {
            for y in t.iter() {
                if let Some(p) = self.compose_z0(x, y) {
                    out.insert(p);
                }
            }
        }
        out
    }

    /// `T² = {xy : x, y ∈ T}`.
    pub fn product_set(&self, t: &ElementSubset) -> ElementSubset {
        let mut out = ElementSubset::empty(self.len());
        for x in t.iter() {
            for y in t.iter() {
                if let Some(p) = self.compose(x, y) {
                    out.insert(p);
                }
            }
        }
        out
    }

    pub fn full_set(&self) -> ElementSubset {
        ElementSubset::full(self.len())
    }

    /// Two-sided identity, if any.
    pub fn identity(&self) -> Option<usize> {
        if !self.is_finite_table() {
            return None;
        }
        self.elements()
            .find(|&e| self.elements().all(|x| self.compose(e, x) == Some(x) && self.compose(x, e) == Some(x)))
    }

    pub fn is_commutative(&self) -> bool {
        self.elements()
            .all(|x| self.elements().all(|y| self.compose(x, y) == self.compose(y, x)))
    }

    /// Period of the eventually periodic power sequence `x, x², x³, ...`.
    /// Windowed domains have no periodic powers; returns `None` there.
    pub fn power_period(&self, x: usize) -> Option<usize> {
        if !self.is_finite_table() {
            return None;
        }
        let n = self.len();
        let mut seen = vec![usize::MAX; n];
        let mut p = x;
        let mut k = 1;
        loop {
            if seen[p] != usize::MAX {
                return Some(k - seen[p]);
            }
            seen[p] = k;
            p = self.compose(p, x).expect("finite composition");
            k += 1;
        }
    }

    /// `h(xy) = h(yx)` for every pair with both compositions defined.
    pub fn is_central(&self, h: &[Scalar]) -> bool {
        self.elements().all(|x| {
            self.elements().all(|y| match (self.compose(x, y), self.compose(y, x)) {
                (Some(a), Some(b)) => values_agree(&h[a], &h[b]),
                _ => true,
            })
        })
    }

    /// Permutation invariance of `h` on products of `2..=k` factors.
    pub fn is_abelian_up_to(&self, h: &[Scalar], k: usize) -> bool {
        let n = self.len();
        for m in 2..=k.max(2) {
            let perms = permutations(m);
            let mut word = vec![0usize; m];
            loop {
                if let Some(base) = self.word_product(&word, &perms[0]) {
                    for p in &perms[1..] {
                        if let Some(other) = self.word_product(&word, p) {
                            if !values_agree(&h[base], &h[other]) {
                                return false;
                            }
                        }
                    }
                }
                if !next_word(&mut word, n) {
                    break;
                }
            }
        }
        true
    }

    fn word_product(&self, word: &[usize], perm: &[usize]) -> Option<usize> {
        let mut acc = word[perm[0]];
        for &i in &perm[1..] {
            acc = self.compose(acc, word[i])?;
        }
        Some(acc)
    }
}

fn values_agree(a: &Scalar, b: &Scalar) -> bool {
    a.close_to(b, tol::RESIDUAL)
}

fn next_word(word: &mut [usize], n: usize) -> bool {
    for w in word.iter_mut().rev() {
        *w += 1;
        if *w < n {
            return true;
        }
        *w = 0;
    }
    false
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Membership bitset over the elements of a domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementSubset {
    members: Vec<bool>,
}

impl ElementSubset {
    pub fn empty(n: usize) -> Self {
        ElementSubset {
            members: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        ElementSubset {
            members: vec![true; n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        ElementSubset {
            members: (0..n).map(f).collect(),
        }
    }

    pub fn from_indices(n: usize, idx: &[usize]) -> Self {
        let mut s = Self::empty(n);
        for &i in idx {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, x: usize) {
        self.members[x] = true;
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn complement(&self) -> Self {
        ElementSubset {
            members: self.members.iter().map(|m| !m).collect(),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        ElementSubset::from_fn(self.universe(), |i| self.contains(i) && !other.contains(i))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.iter().all(|i| other.contains(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> SemigroupDomain {
        SemigroupDomain::finite(vec![vec![0, 1], vec![1, 0]], 0).unwrap()
    }

    fn left_zero2() -> SemigroupDomain {
        SemigroupDomain::finite(vec![vec![0, 0], vec![1, 1]], 0).unwrap()
    }

    #[test]
    fn validate_accepts_group_and_null_tables() {
        assert!(z2().validate().is_ok());
        let null = SemigroupDomain::from_table(vec![vec![0, 0], vec![0, 0]], 0).unwrap();
        assert!(null.validate().is_ok());
    }

    #[test]
    fn validate_reports_associativity_witness() {
        let d = SemigroupDomain::from_table(vec![vec![0, 1], vec![0, 0]], 0).unwrap();
        let err = d.validate().unwrap_err();
        let SemigroupError::AssociativityViolation { x, y, z } = err else {
            panic!("unexpected error {err:?}");
        };
        let lhs = d.compose(d.compose(x, y).unwrap(), z);
        let rhs = d.compose(x, d.compose(y, z).unwrap());
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn validate_rejects_out_of_range_entries() {
        let d = SemigroupDomain::from_table(vec![vec![0, 2], vec![1, 0]], 0).unwrap();
        assert!(matches!(
            d.validate(),
            Err(SemigroupError::IndexOutOfRange { row: 0, col: 1, value: 2, n: 2 })
        ));
        assert!(matches!(
            SemigroupDomain::from_table(vec![vec![0, 1], vec![1]], 0),
            Err(SemigroupError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            SemigroupDomain::finite(vec![vec![0]], 3),
            Err(SemigroupError::InvalidZ0 { .. })
        ));
    }

    #[test]
    fn compose_in_both_backends() {
        assert_eq!(z2().compose(1, 1), Some(0));
        let w = SemigroupDomain::naturals_window(10, 1).unwrap();
        // elements are 1-based naturals: 3 + 4 = 7
        assert_eq!(w.compose(2, 3).map(|i| i + 1), Some(7));
        assert_eq!(w.compose(5, 6), None);
        assert!(matches!(
            w.try_compose(5, 6),
            Err(SemigroupError::UndefinedComposition { .. })
        ));
        assert_eq!(w.compose(4, 4).map(|i| i + 1), Some(10));
    }

    #[test]
    fn product_sets() {
        let null = SemigroupDomain::finite(vec![vec![0, 0], vec![0, 0]], 0).unwrap();
        assert_eq!(null.product_set_z0(&null.full_set()).indices(), vec![0]);
        assert_eq!(z2().product_set_z0(&z2().full_set()).indices(), vec![0, 1]);
        let lz = left_zero2();
        assert_eq!(lz.product_set_z0(&lz.full_set()).indices(), vec![0, 1]);
    }

    #[test]
    fn centrality_and_abelian_checks() {
        let lz = left_zero2();
        let ind = vec![Scalar::one(), Scalar::zero()];
        assert!(!lz.is_central(&ind));
        assert!(!lz.is_abelian_up_to(&ind, 2));
        let constant = vec![Scalar::from_i64(3), Scalar::from_i64(3)];
        assert!(lz.is_central(&constant));
        let h = vec![Scalar::from_i64(5), Scalar::from_ratio(1, 3)];
        assert!(z2().is_central(&h));
        assert!(z2().is_abelian_up_to(&h, 2));
        // sign character on Z2 is multiplicative, hence abelian
        let sign = vec![Scalar::one(), Scalar::from_i64(-1)];
        assert!(z2().is_abelian_up_to(&sign, 3));
    }

    #[test]
    fn power_periods() {
        let z3 = SemigroupDomain::finite(vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]], 0).unwrap();
        assert_eq!(z3.power_period(1), Some(3));
        assert_eq!(z3.power_period(0), Some(1));
        let null = SemigroupDomain::finite(vec![vec![0, 0], vec![0, 0]], 0).unwrap();
        assert_eq!(null.power_period(1), Some(1));
    }

    #[test]
    fn identity_detection() {
        assert_eq!(z2().identity(), Some(0));
        assert_eq!(left_zero2().identity(), None);
    }
}
