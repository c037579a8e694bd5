//! Lift the optimal marginals into explicit mixed strategies and replay
//! the saddle inequalities against every pure action.
//!
//! ```bash
//! cargo run --example strategies
//! ```

use secgame::lift::{lift_defender, lift_marginal, verify_saddle, DEFAULT_ENUM_CAP};
use secgame::solve::solve_fast_sorted;
use secgame::{normalize, MarginalVector};

fn main() {
    let game = normalize(&[1.0, 2.0, 3.0], 2, 1).unwrap();
    let (alpha, beta, value) = solve_fast_sorted(&game).unwrap();
    println!("value = {value}");

    let p = lift_marginal(&MarginalVector::new(alpha, 2.0).unwrap(), 2).unwrap();
    println!("attacker strategy (over 2-subsets of sorted targets):");
    for (subset, prob) in p.atoms() {
        println!("  attack {:?} with probability {prob:.6}", subset.members());
    }

    let q = lift_defender(&MarginalVector::new(beta, 2.0).unwrap(), 1, 3).unwrap();
    println!("defender strategy (protection singletons):");
    for (subset, prob) in q.atoms() {
        println!(
            "  protect {:?} with probability {prob:.6}",
            subset.members()
        );
    }

    let verdict = verify_saddle(&p, &q, value, &game, 1e-9, DEFAULT_ENUM_CAP).unwrap();
    println!(
        "saddle verified: {} (attacker guarantees {:.12}, defender concedes {:.12})",
        verdict.pass, verdict.defense_side_min, verdict.attack_side_max
    );
}
