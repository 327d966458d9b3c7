//! Dense tableau simplex for the tiny linear programs behind certified
//! dual bounds: maximize c.x subject to A x <= b, x >= 0, with b >= 0 so
//! the slack basis is feasible from the start. Bland's rule keeps the
//! pivoting finite.

use crate::real::Real;

/// Maximizes `c . x` subject to `a x <= b`, `x >= 0`. Requires every entry
/// of `b` to be nonnegative. Returns the optimal value; the feasible region
/// here is always bounded, so unboundedness is treated as a numerical
/// failure and reported as the best value reached.
pub(crate) fn simplex_maximize<T: Real>(c: &[T], a: &[Vec<T>], b: &[T]) -> T {
    let n = c.len();
    let m = b.len();
    debug_assert!(a.len() == m && a.iter().all(|row| row.len() == n));
    debug_assert!(b.iter().all(|&v| v >= T::zero()));
    let eps = T::of(1e-12);
    let width = n + m + 1;

    // Rows 0..m are constraints with slack columns; row m is the objective
    // with negated costs.
    let mut tab = vec![vec![T::zero(); width]; m + 1];
    for (i, row) in a.iter().enumerate() {
        tab[i][..n].copy_from_slice(row);
        tab[i][n + i] = T::one();
        tab[i][width - 1] = b[i];
    }
    for (j, &cj) in c.iter().enumerate() {
        tab[m][j] = -cj;
    }

    let mut basis: Vec<usize> = (n..n + m).collect();
    let max_pivots = 200 * (m + 1) * (n + 1);
    for _ in 0..max_pivots {
        // Bland: entering column = smallest index with negative reduced cost.
        let Some(col) = (0..width - 1).find(|&j| tab[m][j] < -eps) else {
            break;
        };
        // Ratio test; Bland tie-break on the leaving basic variable index.
        let mut pivot_row: Option<usize> = None;
        let mut best_ratio = T::infinity();
        for i in 0..m {
            if tab[i][col] > eps {
                let ratio = tab[i][width - 1] / tab[i][col];
                let better = match pivot_row {
                    None => true,
                    Some(r) => {
                        ratio < best_ratio - eps
                            || (ratio < best_ratio + eps && basis[i] < basis[r])
                    }
                };
                if better {
                    best_ratio = ratio;
                    pivot_row = Some(i);
                }
            }
        }
        let Some(row) = pivot_row else {
            // Unbounded direction; should not happen for these programs.
            break;
        };
        let pivot = tab[row][col];
        for v in tab[row].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = tab[row].clone();
        for (i, r) in tab.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor == T::zero() {
                continue;
            }
            for (x, &pv) in r.iter_mut().zip(&pivot_row) {
                *x -= factor * pv;
            }
        }
        basis[row] = col;
    }
    tab[m][width - 1]
}
