//! Simplex-constrained local search shared by the dual optimizer and the
//! membership witness search: Euclidean projection onto the probability
//! simplex, Dirichlet-uniform restarts, and projected descent with
//! backtracking on the true objective.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::real::Real;

/// Stable per-task seed derivation (splitmix64 over the task index), so
/// results do not depend on scheduling order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Euclidean projection of `v` onto the probability simplex.
pub(crate) fn project_to_simplex<T: Real>(v: &mut [T]) {
    let n = v.len();
    let mut sorted: Vec<T> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - T::one()) / T::of_usize(i + 1);
        if u - candidate > T::zero() {
            theta = candidate;
        }
    }
    let mut total = T::zero();
    for x in v.iter_mut() {
        *x = (*x - theta).max(T::zero());
        total += *x;
    }
    // Exact renormalization guards against accumulated rounding.
    if total > T::zero() {
        for x in v.iter_mut() {
            *x /= total;
        }
    } else {
        let uniform = T::one() / T::of_usize(n);
        for x in v.iter_mut() {
            *x = uniform;
        }
    }
}

/// Rows drawn from the flat Dirichlet (uniform on the simplex).
pub(crate) fn dirichlet_rows<T: Real>(rng: &mut ChaCha8Rng, inputs: usize, outputs: usize) -> Vec<Vec<T>> {
    (0..inputs)
        .map(|_| {
            let mut row: Vec<T> = (0..outputs)
                .map(|_| {
                    let u: f64 = rng.random::<f64>().max(1e-300);
                    T::of(-u.ln())
                })
                .collect();
            let total: T = row.iter().copied().sum();
            for x in &mut row {
                *x /= total;
            }
            row
        })
        .collect()
}

/// Projected descent over channel rows. `eval` returns the objective and
/// fills the gradient (same shape as the rows). Backtracks the step until
/// the true objective improves; stops when no step of at least `step_tol`
/// improves it, `iterations` is reached, or the best value dips to
/// `target`. Returns the best visited point.
pub(crate) fn projected_descent<T, F>(
    mut rows: Vec<Vec<T>>,
    iterations: usize,
    step_tol: f64,
    target: T,
    mut eval: F,
) -> (T, Vec<Vec<T>>)
where
    T: Real,
    F: FnMut(&[Vec<T>], &mut [Vec<T>]) -> T,
{
    let mut grad = vec![vec![T::zero(); rows[0].len()]; rows.len()];
    let mut scratch = grad.clone();
    let mut value = eval(&rows, &mut grad);
    let mut best_value = value;
    let mut best_rows = rows.clone();
    let step_tol = T::of(step_tol);
    let mut step = T::of(0.5);
    for _ in 0..iterations {
        if best_value <= target {
            break;
        }
        let mut improved = false;
        let mut t = step;
        while t >= step_tol {
            let mut candidate = rows.clone();
            for (row, g) in candidate.iter_mut().zip(&grad) {
                for (x, &gx) in row.iter_mut().zip(g) {
                    *x -= t * gx;
                }
                project_to_simplex(row);
            }
            let cand_value = eval(&candidate, &mut scratch);
            if cand_value < value - T::of(1e-12) {
                rows = candidate;
                value = cand_value;
                // `scratch` holds the gradient at the accepted point.
                std::mem::swap(&mut grad, &mut scratch);
                if value < best_value {
                    best_value = value;
                    best_rows = rows.clone();
                }
                step = (t + t).min(T::of(1.0));
                improved = true;
                break;
            }
            t *= T::of(0.5);
        }
        if !improved {
            break;
        }
    }
    (best_value, best_rows)
}

/// Diminishing-step subgradient walk for nonsmooth objectives (the
/// membership max-violation). Tracks and returns the best visited point;
/// stops early once the best value dips to `target`.
pub(crate) fn subgradient_walk<T, F>(
    mut rows: Vec<Vec<T>>,
    iterations: usize,
    target: T,
    mut eval: F,
) -> (T, Vec<Vec<T>>)
where
    T: Real,
    F: FnMut(&[Vec<T>], &mut [Vec<T>]) -> T,
{
    let mut grad = vec![vec![T::zero(); rows[0].len()]; rows.len()];
    let mut best_value = eval(&rows, &mut grad);
    let mut best_rows = rows.clone();
    for it in 0..iterations {
        if best_value <= target {
            break;
        }
        let t = T::of(0.5 / ((it + 1) as f64).sqrt());
        for (row, g) in rows.iter_mut().zip(&grad) {
            for (x, &gx) in row.iter_mut().zip(g) {
                *x -= t * gx;
            }
            project_to_simplex(row);
        }
        let value = eval(&rows, &mut grad);
        if value < best_value {
            best_value = value;
            best_rows = rows.clone();
        }
    }
    (best_value, best_rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use approx::assert_relative_eq;

    #[test]
    fn projection_is_identity_on_simplex_points() {
        let mut v = vec![0.2, 0.3, 0.5];
        project_to_simplex(&mut v);
        assert_relative_eq!(v[0], 0.2, epsilon = 1e-12);
        assert_relative_eq!(v[2], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn projection_clamps_negatives() {
        let mut v = vec![1.4, -0.4, 0.0];
        project_to_simplex(&mut v);
        let total: f64 = v.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert!(v.iter().all(|&x| x >= 0.0));
        assert_relative_eq!(v[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_of_uniform_shift() {
        let mut v = vec![10.3, 10.3, 10.4];
        project_to_simplex(&mut v);
        let total: f64 = v.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert!(v[2] > v[0]);
    }

    #[test]
    fn dirichlet_rows_are_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows = dirichlet_rows::<f64>(&mut rng, 5, 4);
        for row in rows {
            let total: f64 = row.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
            assert!(row.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn descent_minimizes_quadratic_on_simplex() {
        // min sum (x - target)^2 with target on the simplex.
        let target = [0.6, 0.3, 0.1];
        let rows = vec![vec![1.0 / 3.0; 3]];
        let (value, best) = projected_descent(rows, 200, 1e-10, f64::NEG_INFINITY, |rows, grad| {
            let mut val = 0.0;
            for j in 0..3 {
                let d = rows[0][j] - target[j];
                val += d * d;
                grad[0][j] = 2.0 * d;
            }
            val
        });
        assert!(value < 1e-10);
        for j in 0..3 {
            assert_relative_eq!(best[0][j], target[j], epsilon = 1e-4);
        }
    }

    #[test]
    fn derive_seed_is_stable_and_spread() {
        let a = derive_seed(7, 0);
        let b = derive_seed(7, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(7, 0));
    }
}
