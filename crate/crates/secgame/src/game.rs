//! Core domain types: normalized instances, target subsets, marginal
//! vectors, mixed strategies, and the payoff / best-response primitives
//! every solver builds on.
//!
//! Targets are identified by 1-based positions. A normalized instance
//! keeps its costs sorted ascending, so target `m` always carries the
//! largest cost; `perm` maps sorted positions back to the caller's
//! original ordering.

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Absolute slack allowed when validating that a marginal's entries sum
/// to its budget: `1e-9 * m`.
pub const MARGINAL_SUM_TOL: f64 = 1e-9;

/// Slack allowed on the `[0, 1]` bounds of a marginal entry.
pub const MARGINAL_BOUND_TOL: f64 = 1e-9;

/// A normalized game instance.
///
/// Internally the cost array is 1-based with a zero sentinel in slot 0;
/// the boundary conditions of the candidate tables read `cost(0)` when a
/// structural index underflows, and the sentinel makes those conditions
/// vacuous without special cases.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    phi: Vec<f64>, // phi[0] = 0.0 sentinel, phi[1..=m] sorted ascending
    k_a: usize,
    k_d: usize,
    perm: Vec<usize>, // perm[0] = 0 sentinel, perm[s] = original 1-based id
}

impl GameInstance {
    pub fn m(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn k_a(&self) -> usize {
        self.k_a
    }

    pub fn k_d(&self) -> usize {
        self.k_d
    }

    /// Cost of sorted target `s` (1-based); `cost(0)` is the 0 sentinel.
    #[inline]
    pub fn cost(&self, s: usize) -> f64 {
        self.phi[s]
    }

    /// Sorted costs, ascending, without the sentinel slot.
    pub fn costs_sorted(&self) -> &[f64] {
        &self.phi[1..]
    }

    /// Original 1-based id of sorted target `s`.
    #[inline]
    pub fn orig_id(&self, s: usize) -> usize {
        self.perm[s]
    }

    /// `inv[orig_id] = sorted position`, 1-based with unused slot 0.
    pub fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.m() + 1];
        for s in 1..=self.m() {
            inv[self.perm[s]] = s;
        }
        inv
    }

    /// Re-expresses a sorted-order vector (`values[s-1]` for sorted
    /// target `s`) in the caller's original target order.
    pub fn to_original_order(&self, sorted_values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m()];
        for s in 1..=self.m() {
            out[self.perm[s] - 1] = sorted_values[s - 1];
        }
        out
    }

    /// Number of leading zero-cost targets in sorted order.
    pub fn zero_cost_count(&self) -> usize {
        self.phi[1..].iter().take_while(|&&c| c == 0.0).count()
    }

    /// Sub-instance over the positive-cost targets with budgets clamped
    /// to the reduced size. Returns `(reduced, stripped_count)`.
    pub fn strip_zero_costs(&self) -> (GameInstance, usize) {
        let z = self.zero_cost_count();
        if z == 0 {
            return (self.clone(), 0);
        }
        let m_red = self.m() - z;
        let mut phi = Vec::with_capacity(m_red + 1);
        let mut perm = Vec::with_capacity(m_red + 1);
        phi.push(0.0);
        perm.push(0);
        phi.extend_from_slice(&self.phi[z + 1..]);
        perm.extend_from_slice(&self.perm[z + 1..]);
        let reduced = GameInstance {
            phi,
            k_a: self.k_a.min(m_red),
            k_d: self.k_d.min(m_red),
            perm,
        };
        (reduced, z)
    }

    /// Attacker payoff for pure actions `x` (attack set) and `y`
    /// (protection set): the summed cost of attacked, unprotected
    /// targets. Subsets are in sorted-index space.
    pub fn payoff_entry(&self, x: &TargetSubset, y: &TargetSubset) -> Result<f64> {
        if x.cardinality() != self.k_a {
            return Err(Error::CardinalityMismatch {
                expected: self.k_a,
                got: x.cardinality(),
            });
        }
        if y.cardinality() != self.k_d {
            return Err(Error::CardinalityMismatch {
                expected: self.k_d,
                got: y.cardinality(),
            });
        }
        for &l in x.members().iter().chain(y.members()) {
            if l == 0 || l > self.m() {
                return Err(Error::IndexOutOfRange {
                    what: format!("target {} not in 1..={}", l, self.m()),
                });
            }
        }
        Ok(x.members()
            .iter()
            .filter(|&&l| !y.contains(l))
            .map(|&l| self.phi[l])
            .sum())
    }

    /// Value the defender can hold the attacker to when the attacker
    /// commits to marginal `alpha`: the best protection removes the
    /// `k_d` largest terms of `alpha_l * phi_l`, leaving the sum of the
    /// `m - k_d` smallest.
    pub fn defender_best_response_value(&self, alpha: &MarginalVector) -> f64 {
        debug_assert_eq!(alpha.len(), self.m());
        self.smallest_products_sum(alpha.values(), self.m() - self.k_d)
    }

    /// Value the attacker can guarantee against marginal `beta` (the
    /// per-target probability of being unprotected): the `k_a` largest
    /// terms of `beta_l * phi_l`.
    pub fn attacker_best_response_value(&self, beta: &MarginalVector) -> f64 {
        debug_assert_eq!(beta.len(), self.m());
        let mut prods: Vec<f64> = (1..=self.m())
            .map(|l| beta.values()[l - 1] * self.phi[l])
            .collect();
        let k = self.k_a;
        if k == 0 {
            return 0.0;
        }
        if k >= prods.len() {
            return compensated_sum(prods);
        }
        let cut = prods.len() - k;
        prods.select_nth_unstable_by(cut, |a, b| a.partial_cmp(b).unwrap());
        compensated_sum(prods[cut..].iter().copied())
    }

    fn smallest_products_sum(&self, values: &[f64], count: usize) -> f64 {
        if count == 0 {
            return 0.0;
        }
        let mut prods: Vec<f64> = (1..=self.m())
            .map(|l| values[l - 1] * self.phi[l])
            .collect();
        if count >= prods.len() {
            return compensated_sum(prods);
        }
        prods.select_nth_unstable_by(count - 1, |a, b| a.partial_cmp(b).unwrap());
        compensated_sum(prods[..count].iter().copied())
    }
}

/// Validates raw costs and budgets and produces a sorted instance.
///
/// The sort is stable, so equal costs keep their original relative
/// order; every downstream value is invariant to the tie order.
pub fn normalize(costs_raw: &[f64], k_a: usize, k_d: usize) -> Result<GameInstance> {
    let m = costs_raw.len();
    if m == 0 {
        return Err(Error::EmptyInstance);
    }
    for (i, &c) in costs_raw.iter().enumerate() {
        if !c.is_finite() {
            return Err(Error::NonFiniteCost { index: i + 1 });
        }
        if c < 0.0 {
            return Err(Error::NegativeCost {
                index: i + 1,
                value: c,
            });
        }
    }
    if k_a > m {
        return Err(Error::BudgetOutOfRange { budget: k_a, m });
    }
    if k_d > m {
        return Err(Error::BudgetOutOfRange { budget: k_d, m });
    }
    // Lexicographic tiebreak on the original position makes the
    // unstable sort behave like a stable sort by cost.
    let mut order: Vec<(f64, usize)> = costs_raw
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i + 1))
        .collect();
    order.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut phi = Vec::with_capacity(m + 1);
    let mut perm = Vec::with_capacity(m + 1);
    phi.push(0.0);
    perm.push(0);
    for &(c, id) in &order {
        phi.push(c);
        perm.push(id);
    }
    Ok(GameInstance {
        phi,
        k_a,
        k_d,
        perm,
    })
}

/// An ordered set of target indices; one pure action of either player.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TargetSubset {
    members: Vec<usize>,
}

impl TargetSubset {
    pub fn new(mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        if members.first() == Some(&0) {
            return Err(Error::InvalidSubset {
                reason: "target ids are 1-based".into(),
            });
        }
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubset {
                reason: "duplicate member".into(),
            });
        }
        Ok(TargetSubset { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn cardinality(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, l: usize) -> bool {
        self.members.binary_search(&l).is_ok()
    }
}

/// Per-target probability mass: `values[j-1]` is the probability that
/// target `j` is attacked (an attack marginal with budget `k_a`) or
/// unprotected (a non-protection marginal with budget `m - k_d`).
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalVector {
    values: Vec<f64>,
    budget: f64,
}

impl MarginalVector {
    pub fn new(values: Vec<f64>, budget: f64) -> Result<Self> {
        let m = values.len();
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || !(-MARGINAL_BOUND_TOL..=1.0 + MARGINAL_BOUND_TOL).contains(&v) {
                return Err(Error::InfeasibleMarginal {
                    reason: format!("entry {} = {} outside [0, 1]", i + 1, v),
                });
            }
        }
        let sum = compensated_sum(values.iter().copied());
        if (sum - budget).abs() > MARGINAL_SUM_TOL * (m as f64).max(1.0) {
            return Err(Error::InfeasibleMarginal {
                reason: format!("entries sum to {} but budget is {}", sum, budget),
            });
        }
        Ok(MarginalVector { values, budget })
    }

    /// Constructs without validation; for solver-internal vectors whose
    /// invariants hold by construction.
    pub(crate) fn new_unchecked(values: Vec<f64>, budget: f64) -> Self {
        MarginalVector { values, budget }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A mixed strategy supported on `k`-subsets, stored as explicit
/// (subset, probability) atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMixedStrategy {
    atoms: Vec<(TargetSubset, f64)>,
    subset_size: usize,
}

impl SparseMixedStrategy {
    pub fn new(atoms: Vec<(TargetSubset, f64)>, subset_size: usize) -> Result<Self> {
        for (subset, prob) in &atoms {
            if subset.cardinality() != subset_size {
                return Err(Error::CardinalityMismatch {
                    expected: subset_size,
                    got: subset.cardinality(),
                });
            }
            if !prob.is_finite() || *prob <= 0.0 {
                return Err(Error::InvalidSubset {
                    reason: format!("atom probability {} is not positive", prob),
                });
            }
        }
        let total = compensated_sum(atoms.iter().map(|(_, p)| *p));
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSubset {
                reason: format!("atom probabilities sum to {}", total),
            });
        }
        Ok(SparseMixedStrategy { atoms, subset_size })
    }

    pub fn atoms(&self) -> &[(TargetSubset, f64)] {
        &self.atoms
    }

    pub fn subset_size(&self) -> usize {
        self.subset_size
    }
}

/// Membership marginal of a mixed strategy: `values[j-1]` sums the
/// probabilities of atoms containing target `j` (`complement = false`)
/// or omitting it (`complement = true`).
pub fn marginal_of_strategy(
    strategy: &SparseMixedStrategy,
    m: usize,
    complement: bool,
) -> MarginalVector {
    let mut membership = vec![0.0; m];
    for (subset, prob) in strategy.atoms() {
        for &l in subset.members() {
            membership[l - 1] += prob;
        }
    }
    let k = strategy.subset_size() as f64;
    if complement {
        let values: Vec<f64> = membership.iter().map(|&v| 1.0 - v).collect();
        MarginalVector::new_unchecked(values, m as f64 - k)
    } else {
        MarginalVector::new_unchecked(membership, k)
    }
}

/// How the players behave at the saddle point, in the caller's original
/// target order.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleCertificate {
    pub value: f64,
    /// Attack marginal, original order.
    pub alpha: MarginalVector,
    /// Non-protection marginal, original order.
    pub beta: MarginalVector,
    /// Start of the equal-product tail of the attack marginal, in sorted
    /// space; 0 when the instance was solved by a degenerate shortcut or
    /// the LP oracle.
    pub s_star: usize,
    /// Length of the partially-loaded run below the tail.
    pub r_star: usize,
    /// Original ids of targets in the attacker's optimal support.
    pub attacker_active: Vec<usize>,
    /// Original ids of targets in the defender's optimal support.
    pub defender_active: Vec<usize>,
    /// True when the defender has a pure optimal strategy.
    pub defender_pure: bool,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Linear,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Method::Linear),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}
