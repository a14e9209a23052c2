//! Exact Gaussian elimination over the rationals.

use num::Zero;

use crate::rational::{checked_div, Rational};

/// Solves the square system `a · x = b`. Returns `None` if `a` is singular.
pub fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    assert!(
        a.len() == n && a.iter().all(|row| row.len() == n),
        "system must be square"
    );

    for col in 0..n {
        // Any nonzero pivot is exact; take the first one.
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);

        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = checked_div(&a[row][col], &a[col][col])?;
            let (upper, lower) = a.split_at_mut(row);
            for (target, pivot_entry) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target -= &factor * pivot_entry;
            }
            let delta = &factor * &b[col];
            b[row] -= delta;
        }
    }

    let mut x = vec![Rational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= &a[row][k] * &x[k];
        }
        x[row] = checked_div(&acc, &a[row][row])?;
    }
    Some(x)
}
