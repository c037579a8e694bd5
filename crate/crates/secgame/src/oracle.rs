//! Ground-truth solver at desk scale: enumerate the full payoff matrix
//! and solve the matrix game as a linear program.
//!
//! The LP is solved with the classic game tableau (payoffs shifted
//! positive, border row/column of +-1, pivot until the bottom row is
//! non-negative; the game value is the reciprocal of the corner entry).
//! Entering and leaving variables follow Bland's rule, so the pivoting
//! terminates even on degenerate matrices, and the run is deterministic.
//! A rational-arithmetic variant settles boundary cases exactly.

// Tableau pivoting reads and writes whole rows and columns by index.
#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::{
    marginal_of_strategy, GameInstance, Method, SaddleCertificate, SparseMixedStrategy,
    TargetSubset,
};
use crate::lift::for_each_subset;
use crate::numeric::binomial;

/// Default cap on the number of payoff-matrix entries.
pub const DEFAULT_MATRIX_CAP: u128 = 10_000_000;

/// Dense payoff matrix over lexicographically ordered pure actions.
#[derive(Debug, Clone)]
pub struct PayoffMatrix {
    pub rows: Vec<TargetSubset>,
    pub cols: Vec<TargetSubset>,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols.len() + j]
    }
}

/// Enumerates every attack/defense pair of an instance into a dense
/// matrix; rows are attack sets, columns protection sets, both in
/// lexicographic order over sorted-space indices.
pub fn enumerate_matrix(g: &GameInstance, cap: u128) -> Result<PayoffMatrix> {
    let m = g.m();
    let n_rows = binomial(m, g.k_a());
    let n_cols = binomial(m, g.k_d());
    let required = n_rows.saturating_mul(n_cols);
    if required > cap {
        return Err(Error::ScaleLimit { required, cap });
    }
    let mut rows = Vec::with_capacity(n_rows as usize);
    for_each_subset(m, g.k_a(), |mem| {
        rows.push(TargetSubset::new(mem.to_vec()).unwrap());
    });
    let mut cols = Vec::with_capacity(n_cols as usize);
    for_each_subset(m, g.k_d(), |mem| {
        cols.push(TargetSubset::new(mem.to_vec()).unwrap());
    });
    let mut entries = Vec::with_capacity(rows.len() * cols.len());
    for x in &rows {
        for y in &cols {
            entries.push(g.payoff_entry(x, y)?);
        }
    }
    Ok(PayoffMatrix {
        rows,
        cols,
        entries,
    })
}

const PIVOT_TOL: f64 = 1e-9;

/// Solves the matrix game: returns `(value, p, q)` where `p` guarantees
/// the row player at least `value` and `q` caps the column player's
/// loss at `value`. Fails with `NumericalFailure` when the recovered
/// strategies' primal and dual guarantees disagree beyond 1e-8 relative.
pub fn solve_matrix_game(a: &PayoffMatrix) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let m = a.n_rows();
    let n = a.n_cols();
    let shift = 1.0
        - a.entries
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .min(0.0);

    let mut b = vec![vec![0.0f64; n + 1]; m + 1];
    for i in 0..m {
        for j in 0..n {
            b[i][j] = a.entry(i, j) + shift;
        }
        b[i][n] = 1.0;
    }
    for j in 0..n {
        b[m][j] = -1.0;
    }

    // Labels trade places on each pivot: positive labels are row-player
    // strategies, negative ones column-player strategies. Bland's rule
    // orders variables as p_1..p_m, q_1..q_n.
    let var_index = |label: i64| -> usize {
        if label > 0 {
            label as usize
        } else {
            m + (-label) as usize
        }
    };
    let mut row_labels: Vec<i64> = (1..=m as i64).collect();
    let mut col_labels: Vec<i64> = (1..=n as i64).map(|j| -j).collect();

    let max_pivots = 1000 + 40 * (m + n) * (m + n);
    let mut pivots = 0;
    loop {
        let mut entering: Option<usize> = None;
        for j in 0..n {
            if b[m][j] < -PIVOT_TOL
                && entering.is_none_or(|e| var_index(col_labels[j]) < var_index(col_labels[e]))
            {
                entering = Some(j);
            }
        }
        let Some(q) = entering else { break };

        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if b[i][q] > PIVOT_TOL {
                let ratio = b[i][n] / b[i][q];
                let tie = (ratio - best_ratio).abs() <= PIVOT_TOL * best_ratio.abs().max(1.0);
                if ratio < best_ratio && !tie
                    || tie
                        && leaving
                            .is_none_or(|l| var_index(row_labels[i]) < var_index(row_labels[l]))
                {
                    if ratio < best_ratio {
                        best_ratio = ratio;
                    }
                    leaving = Some(i);
                }
            }
        }
        let Some(p) = leaving else {
            return Err(Error::NumericalFailure {
                primal: f64::NAN,
                dual: f64::NAN,
            });
        };

        let pivot = b[p][q];
        for i in 0..=m {
            for j in 0..=n {
                if i != p && j != q {
                    b[i][j] -= b[p][j] * b[i][q] / pivot;
                }
            }
        }
        for j in 0..=n {
            if j != q {
                b[p][j] /= pivot;
            }
        }
        for i in 0..=m {
            if i != p {
                b[i][q] /= -pivot;
            }
        }
        b[p][q] = 1.0 / pivot;
        std::mem::swap(&mut row_labels[p], &mut col_labels[q]);

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::NumericalFailure {
                primal: f64::NAN,
                dual: f64::NAN,
            });
        }
    }

    let corner = b[m][n];
    let value = 1.0 / corner - shift;
    let mut p = vec![0.0f64; m];
    for j in 0..n {
        if col_labels[j] > 0 {
            p[(col_labels[j] - 1) as usize] = (b[m][j] / corner).max(0.0);
        }
    }
    let mut q = vec![0.0f64; n];
    for i in 0..m {
        if row_labels[i] < 0 {
            q[(-row_labels[i] - 1) as usize] = (b[i][n] / corner).max(0.0);
        }
    }
    let p_sum: f64 = p.iter().sum();
    let q_sum: f64 = q.iter().sum();
    for v in &mut p {
        *v /= p_sum;
    }
    for v in &mut q {
        *v /= q_sum;
    }

    check_guarantees(a, value, &p, &q)?;
    Ok((value, p, q))
}

/// Same tableau in exact rational arithmetic; resolves disputed
/// boundary cases at the price of big-integer growth.
pub fn solve_matrix_game_exact(a: &PayoffMatrix) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let m = a.n_rows();
    let n = a.n_cols();
    let rat = |x: f64| BigRational::from_f64(x).expect("finite payoff");
    let shift_f = 1.0
        - a.entries
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
            .min(0.0);
    let shift = rat(shift_f);

    let mut b = vec![vec![BigRational::zero(); n + 1]; m + 1];
    for i in 0..m {
        for j in 0..n {
            b[i][j] = rat(a.entry(i, j)) + shift.clone();
        }
        b[i][n] = BigRational::one();
    }
    for j in 0..n {
        b[m][j] = -BigRational::one();
    }

    let var_index = |label: i64| -> usize {
        if label > 0 {
            label as usize
        } else {
            m + (-label) as usize
        }
    };
    let mut row_labels: Vec<i64> = (1..=m as i64).collect();
    let mut col_labels: Vec<i64> = (1..=n as i64).map(|j| -j).collect();

    let max_pivots = 1000 + 40 * (m + n) * (m + n);
    let mut pivots = 0;
    loop {
        let mut entering: Option<usize> = None;
        for j in 0..n {
            if b[m][j].is_negative()
                && entering.is_none_or(|e| var_index(col_labels[j]) < var_index(col_labels[e]))
            {
                entering = Some(j);
            }
        }
        let Some(qcol) = entering else { break };

        let mut leaving: Option<usize> = None;
        let mut best_ratio: Option<BigRational> = None;
        for i in 0..m {
            if b[i][qcol].is_positive() {
                let ratio = &b[i][n] / &b[i][qcol];
                let replace = match &best_ratio {
                    None => true,
                    Some(best) => {
                        ratio < *best
                            || ratio == *best
                                && var_index(row_labels[i])
                                    < var_index(row_labels[leaving.unwrap()])
                    }
                };
                if replace {
                    best_ratio = Some(ratio);
                    leaving = Some(i);
                }
            }
        }
        let Some(prow) = leaving else {
            return Err(Error::NumericalFailure {
                primal: f64::NAN,
                dual: f64::NAN,
            });
        };

        let pivot = b[prow][qcol].clone();
        for i in 0..=m {
            if i == prow {
                continue;
            }
            let factor = &b[i][qcol] / &pivot;
            for j in 0..=n {
                if j != qcol {
                    let delta = &b[prow][j] * &factor;
                    b[i][j] -= delta;
                }
            }
        }
        for j in 0..=n {
            if j != qcol {
                b[prow][j] = &b[prow][j] / &pivot;
            }
        }
        for i in 0..=m {
            if i != prow {
                b[i][qcol] = -&b[i][qcol] / &pivot;
            }
        }
        b[prow][qcol] = BigRational::one() / pivot;
        std::mem::swap(&mut row_labels[prow], &mut col_labels[qcol]);

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::NumericalFailure {
                primal: f64::NAN,
                dual: f64::NAN,
            });
        }
    }

    let corner = b[m][n].clone();
    let value = (BigRational::one() / &corner - &shift)
        .to_f64()
        .unwrap_or(f64::NAN);
    let mut p = vec![BigRational::zero(); m];
    for j in 0..n {
        if col_labels[j] > 0 {
            p[(col_labels[j] - 1) as usize] = &b[m][j] / &corner;
        }
    }
    let mut q = vec![BigRational::zero(); n];
    for i in 0..m {
        if row_labels[i] < 0 {
            q[(-row_labels[i] - 1) as usize] = &b[i][n] / &corner;
        }
    }
    let to_f64 = |v: Vec<BigRational>| -> Vec<f64> {
        v.into_iter().map(|x| x.to_f64().unwrap_or(0.0)).collect()
    };
    let (p, q) = (to_f64(p), to_f64(q));
    check_guarantees(a, value, &p, &q)?;
    Ok((value, p, q))
}

/// Primal/dual agreement of the recovered strategies: `p`'s worst-case
/// row value and `q`'s worst-case column value must bracket tightly.
fn check_guarantees(a: &PayoffMatrix, value: f64, p: &[f64], q: &[f64]) -> Result<()> {
    let m = a.n_rows();
    let n = a.n_cols();
    let mut primal = f64::INFINITY;
    for j in 0..n {
        let s: f64 = (0..m).map(|i| p[i] * a.entry(i, j)).sum();
        primal = primal.min(s);
    }
    let mut dual = f64::NEG_INFINITY;
    for i in 0..m {
        let s: f64 = (0..n).map(|j| q[j] * a.entry(i, j)).sum();
        dual = dual.max(s);
    }
    if (primal - dual).abs() > 1e-8 * 1.0_f64.max(value.abs()) {
        return Err(Error::NumericalFailure { primal, dual });
    }
    Ok(())
}

const SUPPORT_TOL: f64 = 1e-9;

/// Full oracle output: certificate plus the LP mixed strategies, with
/// subsets in sorted-index space.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub certificate: SaddleCertificate,
    pub attacker_strategy: SparseMixedStrategy,
    pub defender_strategy: SparseMixedStrategy,
}

/// Enumerates, solves and packages an instance as a certificate, with
/// marginals and active sets reported in original target order.
pub fn oracle_outcome(g: &GameInstance, cap: u128, exact: bool) -> Result<OracleOutcome> {
    let a = enumerate_matrix(g, cap)?;
    let (value, p, q) = if exact {
        solve_matrix_game_exact(&a)?
    } else {
        solve_matrix_game(&a)?
    };
    let m = g.m();

    let gather =
        |subsets: &[TargetSubset], weights: &[f64], size: usize| -> Result<SparseMixedStrategy> {
            let mut atoms = Vec::new();
            for (s, &w) in subsets.iter().zip(weights) {
                if w > SUPPORT_TOL {
                    atoms.push((s.clone(), w));
                }
            }
            let total: f64 = atoms.iter().map(|(_, w)| *w).sum();
            for atom in &mut atoms {
                atom.1 /= total;
            }
            SparseMixedStrategy::new(atoms, size)
        };
    let p_strategy = gather(&a.rows, &p, g.k_a())?;
    let q_strategy = gather(&a.cols, &q, g.k_d())?;

    let alpha_sorted = marginal_of_strategy(&p_strategy, m, false);
    let beta_sorted = marginal_of_strategy(&q_strategy, m, true);

    let mut attacker_active: Vec<usize> = Vec::new();
    let mut defender_active: Vec<usize> = Vec::new();
    for s in 1..=m {
        if alpha_sorted.values()[s - 1] > SUPPORT_TOL {
            attacker_active.push(g.orig_id(s));
        }
        if beta_sorted.values()[s - 1] < 1.0 - SUPPORT_TOL && g.k_d() > 0 {
            defender_active.push(g.orig_id(s));
        }
    }
    attacker_active.sort_unstable();
    defender_active.sort_unstable();
    let defender_pure = q_strategy.atoms().len() == 1;

    let certificate = SaddleCertificate {
        value,
        alpha: crate::game::MarginalVector::new_unchecked(
            g.to_original_order(alpha_sorted.values()),
            g.k_a() as f64,
        ),
        beta: crate::game::MarginalVector::new_unchecked(
            g.to_original_order(beta_sorted.values()),
            (m - g.k_d()) as f64,
        ),
        s_star: 0,
        r_star: 0,
        attacker_active,
        defender_active,
        defender_pure,
        method: Method::Oracle,
    };
    Ok(OracleOutcome {
        certificate,
        attacker_strategy: p_strategy,
        defender_strategy: q_strategy,
    })
}

/// Certificate-only convenience wrapper around [`oracle_outcome`].
pub fn oracle_certificate(g: &GameInstance, cap: u128) -> Result<SaddleCertificate> {
    Ok(oracle_outcome(g, cap, false)?.certificate)
}

// Keep BigInt in the public-ish signature space out of the API; the
// exact path only surfaces f64.
#[allow(dead_code)]
fn _rational_is_private(_: BigInt) {}
