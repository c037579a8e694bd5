//! Defender-side linear solver, the dual of the attacker table.
//!
//! The optimal non-protection marginal `beta` keeps cheap targets fully
//! unprotected (a prefix of ones), equalizes `beta_l * phi_l` across an
//! expensive tail, and in one of its two shapes carries a single
//! fractional bridge entry just below the tail with the tail level
//! pinned to a prefix cost. Candidate shapes are indexed by the tail
//! start `s = m - i + 1` and offset `r`; the game value is the minimum
//! feasible candidate. Structure (a) admits one offset per row, found by
//! bisecting the sorted-cost ladder; structure (b) admits one row per
//! tail level, found by a monotone two-pointer.

use crate::error::{Error, Result};
use crate::game::{GameInstance, MarginalVector};
use crate::numeric::{feas_ge, feas_gt};
use crate::tables::Tables;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualFamily {
    /// Prefix of ones, fractional equal-product tail.
    StructureA,
    /// Prefix of ones, one fractional bridge at `s - 1`, tail level
    /// pinned to `phi_{s-r-1}`.
    StructureB,
}

/// One evaluated cell of the defender candidate table.
#[derive(Debug, Clone)]
pub struct DualCell {
    pub i: usize,
    pub r: usize,
    /// Tail start, `m - i + 1`.
    pub s: usize,
    /// `sum_{j >= s} 1 / phi_j`.
    pub c_i: f64,
    pub value: f64,
    pub family: DualFamily,
    pub feasible: bool,
    /// The fractional entry `beta_{s-1}` (structure (b) only).
    pub beta_bridge: Option<f64>,
    /// Common value of `beta_l * phi_l` on the tail.
    pub tail_level: f64,
}

/// Result of the defender-side solve, in sorted-cost space.
#[derive(Debug, Clone)]
pub struct DefenderSolution {
    pub value: f64,
    pub beta: MarginalVector,
    pub cell: DualCell,
    /// Number of candidate cells whose value was computed.
    pub cells_evaluated: usize,
}

fn check_cell_index(g: &GameInstance, i: usize, r: usize) -> Result<usize> {
    let m = g.m();
    if i == 0 || i > m {
        return Err(Error::IndexOutOfRange {
            what: format!("row {i} not in 1..={m}"),
        });
    }
    let s = m - i + 1;
    if r > s - 1 {
        return Err(Error::IndexOutOfRange {
            what: format!("offset {r} not in 0..={} for row {i}", s - 1),
        });
    }
    Ok(s)
}

fn eval_structure_a(tb: &Tables, g: &GameInstance, i: usize, r: usize, s: usize) -> DualCell {
    let c = tb.crec(s);
    let spare = i as f64 - g.k_d() as f64;
    let lvl = spare / c;
    let take = g.k_a() as i64 - r as i64;
    let mut feasible = spare >= 0.0;
    feasible =
        feasible && feas_ge(c * g.cost(s - r), spare) && feas_ge(spare, c * g.cost(s - r - 1));
    feasible = feasible && take >= 1 && take <= (g.m() - s) as i64;
    let value = tb.prefix_range(s - r, s - 1) + take as f64 * lvl;
    DualCell {
        i,
        r,
        s,
        c_i: c,
        value,
        family: DualFamily::StructureA,
        feasible,
        beta_bridge: None,
        tail_level: lvl,
    }
}

fn eval_structure_b(tb: &Tables, g: &GameInstance, i: usize, r: usize, s: usize) -> DualCell {
    let c = tb.crec(s);
    let take = g.k_a() as i64 - r as i64;
    // The bridge sits at s - 1 and the tail level is phi_{s-r-1}; both
    // need real targets below the tail.
    if r == 0 || s < 2 || s - r - 1 == 0 {
        return DualCell {
            i,
            r,
            s,
            c_i: c,
            value: 0.0,
            family: DualFamily::StructureB,
            feasible: false,
            beta_bridge: None,
            tail_level: 0.0,
        };
    }
    let lvl = g.cost(s - r - 1);
    let spare1 = (i + 1) as f64 - g.k_d() as f64;
    let bridge = spare1 - c * lvl;
    let mut feasible = feas_gt(c * lvl, i as f64 - g.k_d() as f64); // bridge < 1
    feasible = feasible && feas_ge(spare1, tb.crec(s - 1) * lvl); // bridge product >= tail
    feasible = feasible && take >= 1 && take <= (g.m() - s + 1) as i64;
    let value = bridge * g.cost(s - 1) + take as f64 * lvl + tb.prefix_range(s - r, s - 2);
    DualCell {
        i,
        r,
        s,
        c_i: c,
        value,
        family: DualFamily::StructureB,
        feasible,
        beta_bridge: Some(bridge),
        tail_level: lvl,
    }
}

/// Evaluates cell `(i, i + r)` under structure (a).
pub fn cell_value_wa(i: usize, r: usize, g: &GameInstance) -> Result<DualCell> {
    let s = check_cell_index(g, i, r)?;
    let tb = Tables::new(g);
    Ok(eval_structure_a(&tb, g, i, r, s))
}

/// Evaluates cell `(i, i + r)` under structure (b).
pub fn cell_value_wb(i: usize, r: usize, g: &GameInstance) -> Result<DualCell> {
    let s = check_cell_index(g, i, r)?;
    let tb = Tables::new(g);
    Ok(eval_structure_b(&tb, g, i, r, s))
}

fn better(cell: &DualCell, best: &DualCell) -> bool {
    cell.value < best.value || (cell.value == best.value && (cell.i, cell.r) < (best.i, best.r))
}

fn consider(best: &mut Option<DualCell>, cell: DualCell) {
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

fn reconstruct_beta(cell: &DualCell, g: &GameInstance) -> Vec<f64> {
    let m = g.m();
    let s = cell.s;
    let mut beta = vec![0.0; m];
    match cell.family {
        DualFamily::StructureA => {
            for l in 1..s {
                beta[l - 1] = 1.0;
            }
            for l in s..=m {
                beta[l - 1] = clamp_unit(cell.tail_level / g.cost(l));
            }
        }
        DualFamily::StructureB => {
            for l in 1..s - 1 {
                beta[l - 1] = 1.0;
            }
            beta[s - 2] = clamp_unit(cell.beta_bridge.unwrap());
            for l in s..=m {
                beta[l - 1] = clamp_unit(cell.tail_level / g.cost(l));
            }
        }
    }
    beta
}

/// Computes the game value and the optimal non-protection marginal in
/// O(m) table work (plus an O(log m) ladder bisection per row).
///
/// Same preconditions as [`crate::attacker::solve_attacker`].
pub fn solve_defender(g: &GameInstance) -> Result<DefenderSolution> {
    solve_defender_with(&Tables::new(g), g)
}

pub(crate) fn solve_defender_with(tb: &Tables, g: &GameInstance) -> Result<DefenderSolution> {
    let m = g.m();
    debug_assert!(
        g.cost(1) > 0.0,
        "zero costs must be stripped before solving"
    );
    debug_assert!(g.k_a() >= 1 && g.k_a() < m && g.k_d() >= 1 && g.k_d() < m);
    let kd = g.k_d();
    let ka = g.k_a();
    let mut best: Option<DualCell> = None;
    let mut cells = 0usize;

    // Structure (a): rows below k_d would need a negative tail level;
    // within a row the window phi_{s-r-1} <= level <= phi_{s-r} pins the
    // offset, located by bisecting the cost ladder.
    for i in kd..=m {
        let s = m - i + 1;
        let c = tb.crec(s);
        let lvl = (i - kd) as f64 / c;
        if feas_gt(lvl, g.cost(s)) {
            continue; // tail entries would exceed 1
        }
        let b = g.costs_sorted()[..s - 1].partition_point(|&p| p < lvl);
        cells += 1;
        consider(&mut best, eval_structure_a(tb, g, i, s - 1 - b, s));
    }

    // Structure (b): for a tail level phi_bp, the bridge bound demands
    // f(i) = c_i * phi_bp - (i - k_d) > 0 >= f(i + 1). f is
    // non-increasing in i while the tail excludes bp, so each level has
    // at most one admissible row, and the crossing row is monotone in
    // bp: a single forward pointer serves every level.
    if m >= 3 && m > ka {
        let bp_max = (m - 2).min(m - ka);
        let f = |tb: &Tables, lvl: f64, i: usize| tb.crec(m - i + 1) * lvl - (i as f64 - kd as f64);
        let mut ip = 1usize;
        for bp in 1..=bp_max {
            let lvl = g.cost(bp);
            while ip < m - 1 - bp && feas_gt(f(tb, lvl, ip + 1), 0.0) {
                ip += 1;
            }
            if ip > m - 1 - bp {
                continue;
            }
            if feas_gt(f(tb, lvl, ip), 0.0) && !feas_gt(f(tb, lvl, ip + 1), 0.0) {
                let s = m - ip + 1;
                let r = s - 1 - bp;
                if r >= 1 {
                    cells += 1;
                    consider(&mut best, eval_structure_b(tb, g, ip, r, s));
                }
            }
        }
    }

    let cell = best.ok_or(Error::NoFeasibleCell)?;
    let beta = reconstruct_beta(&cell, g);
    Ok(DefenderSolution {
        value: cell.value,
        beta: MarginalVector::new_unchecked(beta, (m - kd) as f64),
        cell,
        cells_evaluated: cells,
    })
}
