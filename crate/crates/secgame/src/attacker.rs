//! Attacker-side linear solver.
//!
//! The optimal attack marginal has a rigid shape in sorted-cost space: a
//! block of zeros, then a run of `r` fully-loaded targets, then an
//! equal-product tail where `alpha_l * phi_l` is constant through target
//! `m`. Each admissible shape `(s, r)` - `s` the tail start, `r` the run
//! length - has a closed-form value, and the game value is the maximum
//! over feasible shapes. Cells live in a conceptual `k x k` table
//! (`k = max(k_a, m - k_d)`, row `i` holding tail start `s = k - i + 1`,
//! column `i + r`) that is never materialized: an infeasible cell kills
//! the rest of its row or column, so a single staircase walk plus one
//! O(1) candidate per row covers every feasible cell in O(k).

use crate::error::{Error, Result};
use crate::game::{GameInstance, MarginalVector};
use crate::numeric::{ceil_tolerant, feas_ge, feas_gt};
use crate::tables::Tables;

/// Closed-form family a candidate cell was evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellFamily {
    /// Equal-product tail only (`r = 0`), fractional tail level.
    Diagonal,
    /// Saturated run below the tail, fractional tail level.
    UpperI,
    /// One fractional entry below a saturated run, tail level pinned to
    /// `phi_s`.
    UpperII,
}

/// One evaluated cell of the attacker candidate table.
#[derive(Debug, Clone)]
pub struct CandidateCell {
    pub i: usize,
    pub r: usize,
    /// Tail start, `k - i + 1`.
    pub s: usize,
    /// `sum_{j >= s} 1 / phi_j`.
    pub c_i: f64,
    /// Count of tail terms inside the defender-uncovered range:
    /// `m - k_d - s + 1`; non-positive when the tail is fully covered.
    pub tail_count: i64,
    pub value: f64,
    pub family: CellFamily,
    pub feasible: bool,
}

/// Result of the attacker-side solve, in sorted-cost space.
#[derive(Debug, Clone)]
pub struct AttackerSolution {
    pub value: f64,
    pub alpha: MarginalVector,
    pub cell: CandidateCell,
    /// Number of candidate cells whose value was computed.
    pub cells_evaluated: usize,
}

/// Active target sets derived from the winning cell, in original ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSets {
    pub attacker_active: Vec<usize>,
    pub defender_active: Vec<usize>,
    pub defender_pure: bool,
}

fn table_dim(g: &GameInstance) -> usize {
    g.k_a().max(g.m() - g.k_d())
}

fn check_cell_index(g: &GameInstance, i: usize, r: usize) -> Result<usize> {
    let k = table_dim(g);
    if i == 0 || i > k {
        return Err(Error::IndexOutOfRange {
            what: format!("row {i} not in 1..={k}"),
        });
    }
    let s = k - i + 1;
    if r > s - 1 {
        return Err(Error::IndexOutOfRange {
            what: format!("offset {r} not in 0..={} for row {i}", s - 1),
        });
    }
    Ok(s)
}

fn tail_count(g: &GameInstance, s: usize) -> i64 {
    g.m() as i64 - g.k_d() as i64 - s as i64 + 1
}

fn eval_diagonal(tb: &Tables, g: &GameInstance, i: usize, s: usize) -> CandidateCell {
    let c = tb.crec(s);
    let t = tail_count(g, s);
    let ka = g.k_a() as f64;
    let feasible = feas_ge(c * g.cost(s), ka);
    let value = if t >= 1 { ka * t as f64 / c } else { 0.0 };
    CandidateCell {
        i,
        r: 0,
        s,
        c_i: c,
        tail_count: t,
        value,
        family: CellFamily::Diagonal,
        feasible,
    }
}

fn eval_upper_i(tb: &Tables, g: &GameInstance, i: usize, r: usize, s: usize) -> CandidateCell {
    debug_assert!(r >= 1);
    let c = tb.crec(s);
    let t = tail_count(g, s);
    let need = g.k_a() as f64 - r as f64;
    let window = feas_ge(c * g.cost(s), need) && feas_gt(need, c * g.cost(s - 1));
    let (value, feasible) = if t >= 1 {
        let value = tb.prefix_range(s - r, s - 1) + need * t as f64 / c;
        (value, window && feas_gt(c * g.cost(s - r), t as f64))
    } else {
        // Tail fully covered by the defender: only the saturated run
        // contributes, clipped at the uncovered range.
        let value = tb.prefix_range(s - r, g.m() - g.k_d());
        (value, window)
    };
    CandidateCell {
        i,
        r,
        s,
        c_i: c,
        tail_count: t,
        value,
        family: CellFamily::UpperI,
        feasible,
    }
}

fn eval_upper_ii(tb: &Tables, g: &GameInstance, i: usize, r: usize, s: usize) -> CandidateCell {
    debug_assert!(r >= 1);
    let c = tb.crec(s);
    let t = tail_count(g, s);
    let need = g.k_a() as f64 - r as f64;
    let mut feasible = t >= 1;
    feasible = feasible && feas_ge(c * g.cost(s), need) && feas_gt(need, c * g.cost(s) - 1.0);
    feasible = feasible && !feas_gt(c * g.cost(s - r), t as f64);
    let c_prev = c - 1.0 / g.cost(s);
    let delta = need - c_prev * g.cost(s);
    feasible = feasible && feas_gt(delta, 0.0) && feas_ge(1.0, delta);
    let value = if t >= 1 {
        delta * g.cost(s - r) + tb.prefix_range(s - r + 1, s - 1) + t as f64 * g.cost(s)
    } else {
        0.0
    };
    CandidateCell {
        i,
        r,
        s,
        c_i: c,
        tail_count: t,
        value,
        family: CellFamily::UpperII,
        feasible,
    }
}

/// Evaluates cell `(i, i + r)` under the first closed form: a saturated
/// run `s-r .. s-1` below a fractional equal-product tail. `r = 0` is
/// the diagonal, whose only constraint is the tail cap
/// `c_i * phi_s >= k_a`.
pub fn cell_value_ui(i: usize, r: usize, g: &GameInstance) -> Result<CandidateCell> {
    let s = check_cell_index(g, i, r)?;
    let tb = Tables::new(g);
    if r == 0 {
        Ok(eval_diagonal(&tb, g, i, s))
    } else {
        Ok(eval_upper_i(&tb, g, i, r, s))
    }
}

/// Evaluates cell `(i, i + r)` under the second closed form: the tail
/// level pinned to `phi_s` with one fractional entry at `s - r`. For
/// `r = 0` the form collapses to the diagonal.
pub fn cell_value_uii(i: usize, r: usize, g: &GameInstance) -> Result<CandidateCell> {
    let s = check_cell_index(g, i, r)?;
    let tb = Tables::new(g);
    if r == 0 {
        Ok(eval_diagonal(&tb, g, i, s))
    } else {
        Ok(eval_upper_ii(&tb, g, i, r, s))
    }
}

fn better(cell: &CandidateCell, best: &CandidateCell) -> bool {
    cell.value > best.value || (cell.value == best.value && (cell.i, cell.r) < (best.i, best.r))
}

fn consider(best: &mut Option<CandidateCell>, cell: CandidateCell) {
    if !cell.feasible {
        return;
    }
    match best {
        None => *best = Some(cell),
        Some(b) => {
            if better(&cell, b) {
                *best = Some(cell);
            }
        }
    }
}

#[inline]
fn clamp_unit(v: f64) -> f64 {
    debug_assert!(
        v > -1e-9 && v < 1.0 + 1e-9,
        "marginal entry {v} far outside [0,1]"
    );
    v.clamp(0.0, 1.0)
}

fn reconstruct_alpha(cell: &CandidateCell, g: &GameInstance) -> Vec<f64> {
    let m = g.m();
    let s = cell.s;
    let r = cell.r;
    let c = cell.c_i;
    let mut alpha = vec![0.0; m];
    match cell.family {
        CellFamily::Diagonal => {
            let ka = g.k_a() as f64;
            for l in s..=m {
                alpha[l - 1] = clamp_unit(ka / (c * g.cost(l)));
            }
        }
        CellFamily::UpperI => {
            let need = g.k_a() as f64 - r as f64;
            for l in s - r..=s - 1 {
                alpha[l - 1] = 1.0;
            }
            for l in s..=m {
                alpha[l - 1] = clamp_unit(need / (c * g.cost(l)));
            }
        }
        CellFamily::UpperII => {
            let need = g.k_a() as f64 - r as f64;
            let delta = need - (c - 1.0 / g.cost(s)) * g.cost(s);
            alpha[s - r - 1] = clamp_unit(delta);
            for l in s - r + 1..=s {
                alpha[l - 1] = 1.0;
            }
            for l in s + 1..=m {
                alpha[l - 1] = clamp_unit(g.cost(s) / g.cost(l));
            }
        }
    }
    alpha
}

/// Computes the game value and the optimal attack marginal in
/// `O(max(k_a, m - k_d))` table work.
///
/// Expects a normalized instance with strictly positive costs and
/// non-degenerate budgets (`1 <= k_a <= m - 1`, `1 <= k_d <= m - 1`);
/// degenerate instances are short-circuited by [`crate::solve_fast`].
pub fn solve_attacker(g: &GameInstance) -> Result<AttackerSolution> {
    solve_attacker_with(&Tables::new(g), g)
}

pub(crate) fn solve_attacker_with(tb: &Tables, g: &GameInstance) -> Result<AttackerSolution> {
    let m = g.m();
    debug_assert!(
        g.cost(1) > 0.0,
        "zero costs must be stripped before solving"
    );
    debug_assert!(g.k_a() >= 1 && g.k_a() < m && g.k_d() >= 1 && g.k_d() < m);
    let k = table_dim(g);
    let ka = g.k_a() as f64;
    let mut best: Option<CandidateCell> = None;
    let mut cells = 0usize;

    // Per-row candidate: the window c_i*phi_s >= k_a - r > c_i*phi_s - 1
    // admits exactly one offset per row. Offset 0 is the diagonal (then
    // the cap holds with r = 0); offsets >= 1 are second-form cells.
    for i in 1..=k {
        let s = k - i + 1;
        let c = tb.crec(s);
        let r_pin = ceil_tolerant(ka - c * g.cost(s));
        if r_pin <= 0.0 {
            cells += 1;
            consider(&mut best, eval_diagonal(tb, g, i, s));
        } else {
            let r_pin = r_pin as usize;
            if r_pin < s && tail_count(g, s) >= 1 {
                cells += 1;
                consider(&mut best, eval_upper_ii(tb, g, i, r_pin, s));
            }
        }
    }

    // Staircase walk over the first-form cells. A failed strict bound
    // kills the rest of the row (move down); a failed cap kills the rest
    // of the column (move right); row windows tile the columns because
    // c_{i+1}*phi_{s-1} = c_i*phi_{s-1} + 1, so nothing is skipped.
    let mut i = 1usize;
    let mut j = 1usize;
    while i <= k && j <= k {
        let r = j - i;
        let s = k - i + 1;
        let c = tb.crec(s);
        let need = ka - r as f64;
        if !feas_gt(need, c * g.cost(s - 1)) {
            i += 1;
            if j < i {
                j = i;
            }
            continue;
        }
        if !feas_ge(c * g.cost(s), need) {
            j += 1;
            continue;
        }
        if r >= 1 {
            cells += 1;
            consider(&mut best, eval_upper_i(tb, g, i, r, s));
        }
        j += 1;
    }

    let cell = best.ok_or(Error::NoFeasibleCell)?;
    let alpha = reconstruct_alpha(&cell, g);
    Ok(AttackerSolution {
        value: cell.value,
        alpha: MarginalVector::new_unchecked(alpha, g.k_a() as f64),
        cell,
        cells_evaluated: cells,
    })
}

/// Active sets of the winning cell: the attacker mixes over
/// `{s - r, .., m}`; the defender mixes over `{s, .., m}` unless the
/// tail start lies inside the always-protected top block, in which case
/// protecting the top `k_d` targets outright is optimal.
pub fn active_sets(sol: &AttackerSolution, g: &GameInstance) -> ActiveSets {
    let m = g.m();
    let s = sol.cell.s;
    let r = sol.cell.r;
    let attacker: Vec<usize> = (s - r..=m).map(|l| g.orig_id(l)).collect();
    let defender_pure = s > m - g.k_d();
    let defender: Vec<usize> = if defender_pure {
        (m - g.k_d() + 1..=m).map(|l| g.orig_id(l)).collect()
    } else {
        (s..=m).map(|l| g.orig_id(l)).collect()
    };
    let mut attacker = attacker;
    let mut defender = defender;
    attacker.sort_unstable();
    defender.sort_unstable();
    ActiveSets {
        attacker_active: attacker,
        defender_active: defender,
        defender_pure,
    }
}
