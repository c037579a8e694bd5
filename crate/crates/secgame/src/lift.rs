//! Lifting marginal vectors into explicit mixed strategies over
//! k-subsets, and replaying the saddle inequalities against every pure
//! action.
//!
//! The lift is a systematic sweep: lay the targets end to end on a
//! segment of length `k` (target `j` occupying an interval of length
//! `alpha_j`), wrap the segment into `k` unit strips, and sweep one
//! point across `[0, 1)`. Each sweep position picks exactly one target
//! per strip - `alpha_j <= 1` keeps any target from being picked twice -
//! and the picked set only changes at the fractional parts of the prefix
//! sums. The atoms are those constant stretches, so there are at most
//! `m` of them and the membership marginals reproduce the input exactly.

use crate::error::{Error, Result};
use crate::game::{
    marginal_of_strategy, GameInstance, MarginalVector, SparseMixedStrategy, TargetSubset,
};
use crate::numeric::binomial;

/// Default cap on the number of pure actions a verification pass may
/// enumerate per side.
pub const DEFAULT_ENUM_CAP: u128 = 1_000_000;

/// Outcome of a saddle verification pass.
#[derive(Debug, Clone)]
pub struct SaddleVerdict {
    pub pass: bool,
    /// Worst-case expected payoff of the attacker strategy over all pure
    /// defenses (its guarantee).
    pub defense_side_min: f64,
    /// Best-case expected payoff against the defender strategy over all
    /// pure attacks (its exposure).
    pub attack_side_max: f64,
    /// A pure defense attaining the minimum.
    pub min_defense: TargetSubset,
    /// A pure attack attaining the maximum.
    pub max_attack: TargetSubset,
}

struct Sweep {
    cuts: Vec<f64>,   // distinct breakpoints in [0, 1), cuts[0] = 0
    prefix: Vec<f64>, // prefix[j] = alpha_1 + .. + alpha_j, prefix[m] = k
}

fn sweep_breakpoints(values: &[f64], k: usize) -> Result<Sweep> {
    let m = values.len();
    for (j, &v) in values.iter().enumerate() {
        if !v.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&v) {
            return Err(Error::InfeasibleMarginal {
                reason: format!("entry {} = {} outside [0, 1]", j + 1, v),
            });
        }
    }
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0.0);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let v = v.clamp(0.0, 1.0);
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        prefix.push(sum + comp);
    }
    let total = prefix[m];
    if (total - k as f64).abs() > 1e-9 * (m as f64).max(1.0) {
        return Err(Error::InfeasibleMarginal {
            reason: format!("entries sum to {total} but the subset size is {k}"),
        });
    }
    // Pin the final prefix to the exact budget so the last strip always
    // holds a full complement of grid points.
    prefix[m] = k as f64;
    let mut cuts: Vec<f64> = prefix[1..m]
        .iter()
        .map(|p| {
            let f = p.fract();
            if f >= 1.0 {
                0.0
            } else {
                f
            }
        })
        .filter(|&f| f > 0.0 && f < 1.0)
        .collect();
    cuts.push(0.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Coalesce near-coincident breakpoints: a sliver atom's midpoint can
    // sit within rounding distance of a boundary, in which case adding
    // the integer strip offsets lands grid points on the wrong side.
    // Merging slivers into their neighbor moves each recomposed
    // marginal by less than the merge width.
    let merge_width = 1e-13_f64.max(4.0 * f64::EPSILON * k as f64);
    let mut kept: Vec<f64> = Vec::with_capacity(cuts.len());
    for cut in cuts {
        match kept.last() {
            Some(&last) if cut - last < merge_width => {}
            _ => kept.push(cut),
        }
    }
    while kept.len() > 1 && 1.0 - *kept.last().unwrap() < merge_width {
        kept.pop();
    }
    Ok(Sweep { cuts: kept, prefix })
}

/// Members picked by sweep position `u`: one target per unit strip.
fn atom_members(sweep: &Sweep, k: usize, u: f64) -> Vec<usize> {
    let prefix = &sweep.prefix;
    let m = prefix.len() - 1;
    let mut members = Vec::with_capacity(k);
    let mut j = 1usize;
    for c in 0..k {
        let x = u + c as f64;
        // `u + (k-1)` can round up to the total mass itself; the scan is
        // capped at the last interval, which is where such a point
        // belongs.
        while j < m && prefix[j] <= x {
            j += 1;
        }
        members.push(j);
    }
    members.dedup();
    members
}

fn sweep_decompose(values: &[f64], k: usize) -> Result<SparseMixedStrategy> {
    if k == 0 {
        let empty = TargetSubset::new(vec![])?;
        return SparseMixedStrategy::new(vec![(empty, 1.0)], 0);
    }
    let sweep = sweep_breakpoints(values, k)?;
    let n = sweep.cuts.len();
    let mut atoms = Vec::with_capacity(n);
    for t in 0..n {
        let left = sweep.cuts[t];
        let right = if t + 1 < n { sweep.cuts[t + 1] } else { 1.0 };
        let weight = right - left;
        if weight <= 0.0 {
            continue;
        }
        // Membership is constant on (left, right); sample the midpoint
        // to stay clear of both breakpoints.
        let members = atom_members(&sweep, k, 0.5 * (left + right));
        if members.len() != k {
            return Err(Error::InfeasibleMarginal {
                reason: format!(
                    "sweep produced a {}-subset where {} was expected",
                    members.len(),
                    k
                ),
            });
        }
        atoms.push((TargetSubset::new(members)?, weight));
    }
    SparseMixedStrategy::new(atoms, k)
}

/// Expands an attack marginal into at most `m` weighted `k`-subsets
/// whose membership marginals reproduce it.
pub fn lift_marginal(alpha: &MarginalVector, k: usize) -> Result<SparseMixedStrategy> {
    sweep_decompose(alpha.values(), k)
}

/// Expands a non-protection marginal `beta` into a defender strategy
/// over `k_d`-subsets (protection sets): the protection marginal
/// `1 - beta` is lifted and the atoms are read as protected sets, so the
/// complement marginals of the result equal `beta`.
pub fn lift_defender(beta: &MarginalVector, k_d: usize, m: usize) -> Result<SparseMixedStrategy> {
    if beta.len() != m {
        return Err(Error::InfeasibleMarginal {
            reason: format!("marginal has {} entries, expected {}", beta.len(), m),
        });
    }
    let protection: Vec<f64> = beta.values().iter().map(|&b| 1.0 - b).collect();
    sweep_decompose(&protection, k_d)
}

/// Replays the saddle inequalities by enumerating every pure action:
/// the attacker strategy must guarantee at least `v - tol` against all
/// defenses, and the defender strategy must concede at most `v + tol`
/// against all attacks. Expected payoffs reduce to marginals, so each
/// pure action is scored in O(m).
pub fn verify_saddle(
    p: &SparseMixedStrategy,
    q: &SparseMixedStrategy,
    v: f64,
    g: &GameInstance,
    tol: f64,
    cap: u128,
) -> Result<SaddleVerdict> {
    let m = g.m();
    let n_defenses = binomial(m, g.k_d());
    let n_attacks = binomial(m, g.k_a());
    if n_defenses > cap || n_attacks > cap {
        return Err(Error::ScaleLimit {
            required: n_defenses.max(n_attacks),
            cap,
        });
    }
    let alpha = marginal_of_strategy(p, m, false);
    let beta = marginal_of_strategy(q, m, true);
    let alpha_products: Vec<f64> = (1..=m).map(|l| alpha.values()[l - 1] * g.cost(l)).collect();
    let beta_products: Vec<f64> = (1..=m).map(|l| beta.values()[l - 1] * g.cost(l)).collect();
    let alpha_total: f64 = alpha_products.iter().sum();

    // Expected payoff of pure defense y under p: the alpha-weighted cost
    // of everything y leaves uncovered.
    let mut defense_min = f64::INFINITY;
    let mut min_defense: Option<Vec<usize>> = None;
    for_each_subset(m, g.k_d(), |members| {
        let covered: f64 = members.iter().map(|&l| alpha_products[l - 1]).sum();
        let uncovered = alpha_total - covered;
        if uncovered < defense_min {
            defense_min = uncovered;
            min_defense = Some(members.to_vec());
        }
    });

    // Expected payoff of pure attack x under q.
    let mut attack_max = f64::NEG_INFINITY;
    let mut max_attack: Option<Vec<usize>> = None;
    for_each_subset(m, g.k_a(), |members| {
        let gain: f64 = members.iter().map(|&l| beta_products[l - 1]).sum();
        if gain > attack_max {
            attack_max = gain;
            max_attack = Some(members.to_vec());
        }
    });

    let pass = defense_min >= v - tol && attack_max <= v + tol;
    Ok(SaddleVerdict {
        pass,
        defense_side_min: defense_min,
        attack_side_max: attack_max,
        min_defense: TargetSubset::new(min_defense.unwrap_or_default())?,
        max_attack: TargetSubset::new(max_attack.unwrap_or_default())?,
    })
}

/// Visits every k-subset of `{1..m}` in lexicographic order.
pub(crate) fn for_each_subset(m: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut members: Vec<usize> = (1..=k).collect();
    loop {
        visit(&members);
        // Advance the rightmost member that can still move.
        let mut idx = k;
        while idx > 0 {
            if members[idx - 1] < m - (k - idx) {
                members[idx - 1] += 1;
                for t in idx..k {
                    members[t] = members[t - 1] + 1;
                }
                break;
            }
            idx -= 1;
        }
        if idx == 0 {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::normalize;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn marginal(values: &[f64]) -> MarginalVector {
        let budget = values.iter().sum();
        MarginalVector::new(values.to_vec(), budget).unwrap()
    }

    fn recompose(strategy: &SparseMixedStrategy, m: usize, complement: bool) -> Vec<f64> {
        marginal_of_strategy(strategy, m, complement)
            .values()
            .to_vec()
    }

    /// Inductive split decomposition: peel off target 1 and recurse on
    /// rescaled sub-marginals. The rescaling can push entries above 1,
    /// so this only serves as a cross-check where it stays feasible.
    fn recursive_lift(values: &[f64], k: usize) -> Option<Vec<(Vec<usize>, f64)>> {
        let m = values.len();
        if values.iter().any(|&v| !(-1e-9..=1.0 + 1e-9).contains(&v)) {
            return None;
        }
        if k == 0 {
            return Some(vec![(vec![], 1.0)]);
        }
        if k == m {
            return Some(vec![((1..=m).collect(), 1.0)]);
        }
        if k == 1 {
            return Some(
                values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > 1e-15)
                    .map(|(j, &v)| (vec![j + 1], v))
                    .collect(),
            );
        }
        let a1 = values[0].clamp(0.0, 1.0);
        let rest = &values[1..];
        let mut atoms = Vec::new();
        let kf = k as f64;
        if a1 > 1e-12 {
            let scale = (kf - 1.0) / (kf - a1);
            let sub: Vec<f64> = rest.iter().map(|&v| v * scale).collect();
            let inner = recursive_lift(&sub, k - 1)?;
            for (members, w) in inner {
                let mut members: Vec<usize> = members.into_iter().map(|j| j + 1).collect();
                members.insert(0, 1);
                atoms.push((members, a1 * w));
            }
        }
        if a1 < 1.0 - 1e-12 {
            let scale = kf / (kf - a1);
            let sub: Vec<f64> = rest.iter().map(|&v| v * scale).collect();
            let inner = recursive_lift(&sub, k)?;
            for (members, w) in inner {
                let members: Vec<usize> = members.into_iter().map(|j| j + 1).collect();
                atoms.push((members, (1.0 - a1) * w));
            }
        }
        Some(atoms)
    }

    #[test]
    fn lift_k1_is_the_identity() {
        let alpha = marginal(&[0.0, 3.0 / 5.0, 2.0 / 5.0]);
        let p = lift_marginal(&alpha, 1).unwrap();
        let mut atoms: Vec<(Vec<usize>, f64)> = p
            .atoms()
            .iter()
            .map(|(s, w)| (s.members().to_vec(), *w))
            .collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(atoms.len(), 2);
        assert_eq!(atoms[0].0, vec![2]);
        assert!((atoms[0].1 - 0.6).abs() < 1e-12);
        assert_eq!(atoms[1].0, vec![3]);
        assert!((atoms[1].1 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn lift_matches_worked_pairs() {
        let alpha = marginal(&[1.0 / 3.0, 1.0, 2.0 / 3.0]);
        let p = lift_marginal(&alpha, 2).unwrap();
        let back = recompose(&p, 3, false);
        for (a, b) in back.iter().zip(alpha.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(p.atoms().len() <= 3);

        let alpha = marginal(&[1.0, 1.0]);
        let p = lift_marginal(&alpha, 2).unwrap();
        assert_eq!(p.atoms().len(), 1);
        assert_eq!(p.atoms()[0].0.members(), &[1, 2]);
    }

    #[test]
    fn lift_defender_reproduces_complement_marginals() {
        let beta = marginal(&[1.0, 3.0 / 5.0, 2.0 / 5.0]);
        let q = lift_defender(&beta, 1, 3).unwrap();
        let back = recompose(&q, 3, true);
        for (a, b) in back.iter().zip(beta.values()) {
            assert!((a - b).abs() < 1e-12);
        }

        let beta = marginal(&[1.0, 0.0, 0.0]);
        let q = lift_defender(&beta, 2, 3).unwrap();
        assert_eq!(q.atoms().len(), 1);
        assert_eq!(q.atoms()[0].0.members(), &[2, 3]);

        let beta = marginal(&[2.0 / 3.0, 1.0 / 3.0]);
        let q = lift_defender(&beta, 1, 2).unwrap();
        let mut atoms: Vec<(Vec<usize>, f64)> = q
            .atoms()
            .iter()
            .map(|(s, w)| (s.members().to_vec(), *w))
            .collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(atoms[0].0, vec![1]);
        assert!((atoms[0].1 - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(atoms[1].0, vec![2]);
        assert!((atoms[1].1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_marginals_are_rejected() {
        let bad = MarginalVector::new_unchecked(vec![0.5, 0.4], 1.0);
        assert!(matches!(
            lift_marginal(&bad, 1),
            Err(Error::InfeasibleMarginal { .. })
        ));
    }

    #[test]
    fn verify_saddle_accepts_the_equilibrium_and_rejects_perturbations() {
        let g = normalize(&[1.0, 2.0, 3.0], 1, 1).unwrap();
        let alpha = marginal(&[0.0, 3.0 / 5.0, 2.0 / 5.0]);
        let beta = marginal(&[1.0, 3.0 / 5.0, 2.0 / 5.0]);
        let p = lift_marginal(&alpha, 1).unwrap();
        let q = lift_defender(&beta, 1, 3).unwrap();
        let verdict = verify_saddle(&p, &q, 6.0 / 5.0, &g, 1e-9, DEFAULT_ENUM_CAP).unwrap();
        assert!(verdict.pass);

        // Uniform singleton defense leaves target 3 exposed at 2.
        let uniform = SparseMixedStrategy::new(
            vec![
                (TargetSubset::new(vec![1]).unwrap(), 1.0 / 3.0),
                (TargetSubset::new(vec![2]).unwrap(), 1.0 / 3.0),
                (TargetSubset::new(vec![3]).unwrap(), 1.0 / 3.0),
            ],
            1,
        )
        .unwrap();
        let verdict = verify_saddle(&p, &uniform, 6.0 / 5.0, &g, 1e-9, DEFAULT_ENUM_CAP).unwrap();
        assert!(!verdict.pass);
        assert_eq!(verdict.max_attack.members(), &[3]);
        assert!((verdict.attack_side_max - 2.0).abs() < 1e-9);
    }

    #[test]
    fn verify_saddle_respects_the_enumeration_cap() {
        let g = normalize(&vec![1.0; 30], 10, 10).unwrap();
        let alpha = marginal(&vec![1.0 / 3.0; 30]);
        let p = lift_marginal(&alpha, 10).unwrap();
        let beta = marginal(&vec![2.0 / 3.0; 30]);
        let q = lift_defender(&beta, 10, 30).unwrap();
        assert!(matches!(
            verify_saddle(&p, &q, 1.0, &g, 1e-9, DEFAULT_ENUM_CAP),
            Err(Error::ScaleLimit { .. })
        ));
    }

    #[test]
    fn recursive_lift_cross_checks_the_sweep_at_tiny_sizes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 50 {
            let m = rng.gen_range(2..=6);
            let k = rng.gen_range(1..=m);
            let values = random_feasible(&mut rng, m, k);
            if let Some(atoms) = recursive_lift(&values, k) {
                if atoms
                    .iter()
                    .any(|(mem, w)| mem.len() != k || !w.is_finite() || *w < 0.0)
                {
                    continue;
                }
                let mut back = vec![0.0; m];
                for (mem, w) in &atoms {
                    for &j in mem {
                        back[j - 1] += w;
                    }
                }
                if back.iter().zip(&values).all(|(a, b)| (a - b).abs() < 1e-9) {
                    let sweep = lift_marginal(&marginal(&values), k).unwrap();
                    let sweep_back = recompose(&sweep, m, false);
                    for (a, b) in sweep_back.iter().zip(&values) {
                        assert!((a - b).abs() < 1e-12);
                    }
                    checked += 1;
                }
            }
        }
    }

    fn random_feasible(rng: &mut impl Rng, m: usize, k: usize) -> Vec<f64> {
        // Iteratively rescale toward sum k, clamping saturated entries.
        if k == 0 {
            return vec![0.0; m];
        }
        let mut v: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
        for _ in 0..64 {
            let free: Vec<usize> = (0..m).filter(|&j| v[j] < 1.0).collect();
            let fixed: f64 = (0..m).filter(|&j| v[j] >= 1.0).count() as f64;
            let free_sum: f64 = free.iter().map(|&j| v[j]).sum();
            let need = k as f64 - fixed;
            if free_sum <= 0.0 || need <= 0.0 {
                break;
            }
            let scale = need / free_sum;
            for &j in &free {
                v[j] = (v[j] * scale).min(1.0);
            }
            let total: f64 = v.iter().sum();
            if (total - k as f64).abs() < 1e-12 {
                break;
            }
        }
        // Final exact adjustment on an unsaturated entry.
        let total: f64 = v.iter().sum();
        let resid = k as f64 - total;
        for x in v.iter_mut() {
            if (0.0..=1.0).contains(&(*x + resid)) {
                *x += resid;
                break;
            }
        }
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn sweep_round_trips_random_marginals(seed in 0u64..1u64 << 48) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = rng.gen_range(1..=64);
            let k = rng.gen_range(0..=m);
            let values = random_feasible(&mut rng, m, k);
            let total: f64 = values.iter().sum();
            prop_assume!((total - k as f64).abs() < 1e-9);
            let strategy = lift_marginal(
                &MarginalVector::new_unchecked(values.clone(), k as f64),
                k,
            ).unwrap();
            prop_assert!(strategy.atoms().len() <= m.max(1));
            let back = recompose(&strategy, m, false);
            for (a, b) in back.iter().zip(&values) {
                prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
            }
        }
    }
}
