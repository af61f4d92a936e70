//! Small dense linear algebra: fraction-free elimination over the rationals,
//! Gauss–Jordan over [`Scalar`], and SVD rank for floating tables.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Basis of `{x : Mx = 0}` for a rational matrix given by rows.
///
/// Rows are cleared to integers and reduced with Bareiss' fraction-free
/// elimination; only the final back-substitution works in `Q`. Each basis
/// vector has a single free coordinate set to 1.
pub fn rational_nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .map(|q| q.numer() * (&l / q.denom()))
                .collect()
        })
        .collect();
    let m = a.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..m {
            for j in c + 1..ncols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                debug_assert!((&num % &prev).is_zero());
                a[i][j] = num / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let is_pivot = |c: usize| pivots.contains(&c);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot(c)) {
        let mut x = vec![BigRational::zero(); ncols];
        x[free] = BigRational::one();
        for (k, &pc) in pivots.iter().enumerate().rev() {
            let mut s = BigRational::zero();
            for j in pc + 1..ncols {
                if !a[k][j].is_zero() && !x[j].is_zero() {
                    s += BigRational::from_integer(a[k][j].clone()) * &x[j];
                }
            }
            x[pc] = -s / BigRational::from_integer(a[k][pc].clone());
        }
        basis.push(x);
    }
    basis
}

/// In-place Gauss–Jordan reduction; returns the pivot columns. Pivots are
/// searched in the first `ncols` columns only, so trailing columns act as
/// right-hand sides. Pivots are chosen by largest modulus; entries with
/// modulus `<= tol` count as zero on the floating path.
pub fn rref(m: &mut [Vec<Scalar>], ncols: usize, tol: f64) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let (best, _) = (r..rows)
            .map(|i| (i, m[i][c].abs()))
            .fold((r, -1.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if m[best][c].approx_zero(tol) {
            for row in m.iter_mut().skip(r) {
                if row[c].approx_zero(tol) {
                    row[c] = Scalar::zero();
                }
            }
            continue;
        }
        m.swap(r, best);
        let inv = m[r][c].recip().expect("nonzero pivot");
        for v in &mut m[r][c..] {
            *v = &*v * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *v = &*v - &(&factor * p);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right nullspace of `m` (rows × ncols).
pub fn nullspace(m: &[Vec<Scalar>], ncols: usize, tol: f64) -> Vec<Vec<Scalar>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a, ncols, tol);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Scalar::zero(); ncols];
        x[free] = Scalar::one();
        for (k, &pc) in pivots.iter().enumerate() {
            x[pc] = -&a[k][free];
        }
        basis.push(x);
    }
    basis
}

pub fn rank(m: &[Vec<Scalar>], ncols: usize, tol: f64) -> usize {
    let mut a = m.to_vec();
    rref(&mut a, ncols, tol).len()
}

/// Coefficients `c` minimising `‖Σ c_j·columns[j] − target‖` through the
/// normal equations. Returns `None` when the Gram matrix is singular.
/// Callers verify the fit.
pub fn least_squares(columns: &[Vec<Scalar>], target: &[Scalar], tol: f64) -> Option<Vec<Scalar>> {
    let k = columns.len();
    let mut aug: Vec<Vec<Scalar>> = (0..k)
        .map(|i| {
            let mut row: Vec<Scalar> = (0..k).map(|j| inner(&columns[i], &columns[j])).collect();
            row.push(inner(&columns[i], target));
            row
        })
        .collect();
    let pivots = rref(&mut aug, k, tol);
    if pivots.len() < k {
        return None;
    }
    Some(aug.into_iter().map(|row| row[k].clone()).collect())
}

/// `Σ conj(a_i) b_i`.
fn inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .fold(Scalar::zero(), |acc, (x, y)| acc + x.conj() * y)
}

/// Numeric rank: singular values above `rel_tol × σ_max`.
pub fn float_rank(rows: &[Vec<Complex64>], rel_tol: f64) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let svd = m.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > rel_tol * smax)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn mul(rows: &[Vec<BigRational>], x: &[BigRational]) -> Vec<BigRational> {
        rows.iter()
            .map(|r| r.iter().zip(x).fold(q(0), |acc, (a, b)| acc + a * b))
            .collect()
    }

    #[test]
    fn rational_nullspace_of_rank_deficient_system() {
        let rows = vec![
            vec![q(1), q(2), q(3), q(4)],
            vec![q(2), q(4), q(6), q(8)],
            vec![q(0), q(1), q(1), q(0)],
        ];
        let basis = rational_nullspace(&rows, 4);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(mul(&rows, v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rational_nullspace_with_fractions() {
        let half = BigRational::new(1.into(), 2.into());
        let rows = vec![vec![half.clone(), q(-1)], vec![q(1), q(-2)]];
        let basis = rational_nullspace(&rows, 2);
        assert_eq!(basis, vec![vec![q(2), q(1)]]);
    }

    #[test]
    fn scalar_nullspace_and_rank() {
        let i = Scalar::i();
        let m = vec![
            vec![Scalar::one(), i.clone()],
            vec![i.clone(), Scalar::from_i64(-1)],
        ];
        assert_eq!(rank(&m, 2, 0.0), 1);
        let ns = nullspace(&m, 2, 0.0);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert!((&m[0][0] * &v[0] + &m[0][1] * &v[1]).is_zero());
    }

    #[test]
    fn least_squares_recovers_coefficients() {
        let c1 = vec![Scalar::one(), Scalar::one(), Scalar::one()];
        let c2 = vec![Scalar::one(), Scalar::zero(), Scalar::zero()];
        let target: Vec<Scalar> = c1
            .iter()
            .zip(&c2)
            .map(|(a, b)| Scalar::from_i64(3) * a + Scalar::i() * b)
            .collect();
        let c = least_squares(&[c1, c2], &target, 0.0).unwrap();
        assert_eq!(c, vec![Scalar::from_i64(3), Scalar::i()]);
    }

    #[test]
    fn float_rank_uses_relative_cutoff() {
        let rows = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-13, 0.0)],
        ];
        assert_eq!(float_rank(&rows, 1e-10), 1);
        assert_eq!(float_rank(&rows, 1e-15), 2);
    }
}
