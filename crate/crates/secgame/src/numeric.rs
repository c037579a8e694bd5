//! Tolerant comparisons and compensated sums used across the solvers.

/// Relative tolerance for feasibility comparisons. Boundary cases are
/// treated inclusively on weak inequalities and exclusively on strict
/// ones; at exact degeneracy the candidate tables contain equal-valued
/// cells, so either call is a valid optimizer.
pub const FEAS_EPS: f64 = 1e-12;

#[inline]
fn feas_scale(a: f64, b: f64) -> f64 {
    FEAS_EPS * 1.0_f64.max(a.abs()).max(b.abs())
}

/// Weak inequality `lhs >= rhs`, inclusive within tolerance.
#[inline]
pub fn feas_ge(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - feas_scale(lhs, rhs)
}

/// Strict inequality `lhs > rhs`, exclusive within tolerance.
#[inline]
pub fn feas_gt(lhs: f64, rhs: f64) -> bool {
    lhs > rhs + feas_scale(lhs, rhs)
}

/// Smallest integer `>= x`, nudged so that values within tolerance of an
/// integer round to that integer instead of the next one.
#[inline]
pub fn ceil_tolerant(x: f64) -> f64 {
    (x - FEAS_EPS * 1.0_f64.max(x.abs())).ceil()
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// n choose k without overflow; saturates at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        let num = (n - i) as u128;
        acc = match acc.checked_mul(num) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}
