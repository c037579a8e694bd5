//! Fast-path orchestration: zero-cost stripping, degenerate-budget
//! shortcuts, both linear solvers, the primal/dual cross-check, and
//! assembly of the certificate in original target order.

use crate::attacker::{active_sets, solve_attacker_with};
use crate::defender::solve_defender_with;
use crate::error::Result;
use crate::game::{GameInstance, MarginalVector, Method, SaddleCertificate};
use crate::tables::Tables;

/// Relative tolerance for the attacker/defender value agreement check.
pub const CROSS_CHECK_RTOL: f64 = 1e-9;

/// Instrumentation from one fast solve.
#[derive(Debug, Clone, Copy)]
pub struct FastSolveStats {
    pub attacker_value: f64,
    pub defender_value: f64,
    /// Candidate cells evaluated by the attacker-side search.
    pub cells_u: usize,
    /// Candidate cells evaluated by the defender-side search.
    pub cells_w: usize,
}

impl FastSolveStats {
    /// Relative disagreement between the two solvers.
    pub fn discrepancy(&self) -> f64 {
        (self.attacker_value - self.defender_value).abs() / 1.0_f64.max(self.attacker_value.abs())
    }

    pub fn values_agree(&self) -> bool {
        self.discrepancy() <= CROSS_CHECK_RTOL
    }
}

struct SortedSolution {
    value: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    s_star: usize,
    r_star: usize,
    attacker_active: Vec<usize>,
    defender_active: Vec<usize>,
    defender_pure: bool,
    stats: FastSolveStats,
}

/// Solves via the linear attacker and defender searches.
pub fn solve_fast(g: &GameInstance) -> Result<SaddleCertificate> {
    Ok(solve_fast_with_stats(g)?.0)
}

/// Solves via the linear searches and also returns instrumentation.
pub fn solve_fast_with_stats(g: &GameInstance) -> Result<(SaddleCertificate, FastSolveStats)> {
    let sorted = solve_sorted(g)?;
    let m = g.m();
    let cert = SaddleCertificate {
        value: sorted.value,
        alpha: MarginalVector::new_unchecked(g.to_original_order(&sorted.alpha), g.k_a() as f64),
        beta: MarginalVector::new_unchecked(
            g.to_original_order(&sorted.beta),
            (m - g.k_d()) as f64,
        ),
        s_star: sorted.s_star,
        r_star: sorted.r_star,
        attacker_active: sorted.attacker_active,
        defender_active: sorted.defender_active,
        defender_pure: sorted.defender_pure,
        method: Method::Linear,
    };
    Ok((cert, sorted.stats))
}

/// Fast solve in sorted space, returning sorted-order marginals. Used
/// directly by callers that want to lift or inspect structure without
/// the permutation round trip.
pub fn solve_fast_sorted(g: &GameInstance) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let sorted = solve_sorted(g)?;
    Ok((sorted.alpha, sorted.beta, sorted.value))
}

fn stats_for(value: f64) -> FastSolveStats {
    FastSolveStats {
        attacker_value: value,
        defender_value: value,
        cells_u: 0,
        cells_w: 0,
    }
}

fn solve_sorted(g: &GameInstance) -> Result<SortedSolution> {
    let m = g.m();
    let z = g.zero_cost_count();
    // Borrow the instance unchanged when nothing is stripped; budgets
    // are already within range then.
    let stripped_storage;
    let red: &GameInstance = if z == 0 {
        g
    } else {
        stripped_storage = g.strip_zero_costs().0;
        &stripped_storage
    };
    let m_red = red.m();
    let ka = g.k_a();
    let kd = g.k_d();

    // All-zero costs: nothing is worth attacking or defending.
    if m_red == 0 {
        let mut alpha = vec![0.0; m];
        for l in m - ka + 1..=m {
            alpha[l - 1] = 1.0;
        }
        let mut beta = vec![1.0; m];
        for l in m - kd + 1..=m {
            beta[l - 1] = 0.0;
        }
        return Ok(SortedSolution {
            value: 0.0,
            alpha,
            beta,
            s_star: 0,
            r_star: 0,
            attacker_active: vec![],
            defender_active: vec![],
            defender_pure: kd == 0,
            stats: stats_for(0.0),
        });
    }

    let ka_red = red.k_a();
    let kd_red = red.k_d();

    // No attack budget, or every positive target protected: value 0.
    if ka_red == 0 || kd_red == m_red {
        let mut alpha = vec![0.0; m];
        // Leftover attack budget lands on stripped zero-cost targets.
        let spill = ka.saturating_sub(m_red);
        for l in 1..=spill.min(z) {
            alpha[l - 1] = 1.0;
        }
        for l in m - ka_red + 1..=m {
            alpha[l - 1] = 1.0;
        }
        let mut beta = vec![1.0; m];
        if kd_red == m_red && m_red > 0 {
            for l in z + 1..=m {
                beta[l - 1] = 0.0;
            }
            // Spare protection covers stripped targets, cheapest first
            // left unprotected so the budget identity holds.
            let unprotected = m - kd;
            for l in unprotected + 1..=z {
                beta[l - 1] = 0.0;
            }
        } else {
            for l in m - kd + 1..=m {
                beta[l - 1] = 0.0;
            }
        }
        return Ok(SortedSolution {
            value: 0.0,
            alpha,
            beta,
            s_star: 0,
            r_star: 0,
            attacker_active: vec![],
            defender_active: vec![],
            defender_pure: false,
            stats: stats_for(0.0),
        });
    }

    // Undefended game: the attacker takes the top k_a outright.
    if kd_red == 0 {
        let value: f64 = (m_red - ka_red + 1..=m_red).map(|l| red.cost(l)).sum();
        let mut alpha = vec![0.0; m];
        for l in m - ka_red + 1..=m {
            alpha[l - 1] = 1.0;
        }
        let beta = vec![1.0; m];
        let attacker_active: Vec<usize> = sorted_ids(red, m_red - ka_red + 1, m_red);
        return Ok(SortedSolution {
            value,
            alpha,
            beta,
            s_star: m_red + z,
            r_star: ka_red - 1,
            attacker_active,
            defender_active: vec![],
            defender_pure: true,
            stats: stats_for(value),
        });
    }

    // Saturated attacker: everything is hit; the defender shields the
    // top k_d, conceding the m - k_d cheapest targets.
    if ka_red == m_red {
        let value: f64 = (1..=m_red - kd_red).map(|l| red.cost(l)).sum();
        let mut alpha = vec![0.0; m];
        let spill = ka.saturating_sub(m_red);
        for l in 1..=spill.min(z) {
            alpha[l - 1] = 1.0;
        }
        for l in z + 1..=m {
            alpha[l - 1] = 1.0;
        }
        let mut beta = vec![1.0; m];
        for l in m - kd_red + 1..=m {
            beta[l - 1] = 0.0;
        }
        let attacker_active = sorted_ids(red, 1, m_red);
        let defender_active = sorted_ids(red, m_red - kd_red + 1, m_red);
        return Ok(SortedSolution {
            value,
            alpha,
            beta,
            s_star: m_red + z,
            r_star: m_red - 1,
            attacker_active,
            defender_active,
            defender_pure: true,
            stats: stats_for(value),
        });
    }

    // Non-degenerate: both linear searches over one shared table pass,
    // embedded back over the stripped prefix (alpha 0 / beta 1 on
    // zero-cost targets).
    let tb = Tables::new(red);
    let att = solve_attacker_with(&tb, red)?;
    let def = solve_defender_with(&tb, red)?;
    let sets = active_sets(&att, red);

    let mut alpha = vec![0.0; m];
    alpha[z..].copy_from_slice(att.alpha.values());
    let mut beta = vec![1.0; m];
    beta[z..].copy_from_slice(def.beta.values());

    Ok(SortedSolution {
        value: att.value,
        alpha,
        beta,
        s_star: att.cell.s + z,
        r_star: att.cell.r,
        attacker_active: sets.attacker_active,
        defender_active: sets.defender_active,
        defender_pure: sets.defender_pure,
        stats: FastSolveStats {
            attacker_value: att.value,
            defender_value: def.value,
            cells_u: att.cells_evaluated,
            cells_w: def.cells_evaluated,
        },
    })
}

fn sorted_ids(g: &GameInstance, from: usize, to: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (from..=to).map(|l| g.orig_id(l)).collect();
    ids.sort_unstable();
    ids
}
