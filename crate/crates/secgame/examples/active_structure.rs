//! Walk one cost vector through every budget pair and watch the
//! structural indices and active sets move.
//!
//! ```bash
//! cargo run --example active_structure
//! ```

use secgame::attacker::{active_sets, solve_attacker};
use secgame::normalize;

fn main() {
    let costs = [1.0, 2.0, 4.0, 8.0, 16.0];
    let m = costs.len();
    println!("costs {costs:?}");
    println!(
        "{:>4} {:>4} {:>10} {:>4} {:>4}  active sets",
        "k_a", "k_d", "value", "s*", "r*"
    );
    for ka in 1..m {
        for kd in 1..m {
            let game = normalize(&costs, ka, kd).unwrap();
            let sol = solve_attacker(&game).unwrap();
            let sets = active_sets(&sol, &game);
            println!(
                "{:>4} {:>4} {:>10.5} {:>4} {:>4}  attacker {:?} defender {:?}{}",
                ka,
                kd,
                sol.value,
                sol.cell.s,
                sol.cell.r,
                sets.attacker_active,
                sets.defender_active,
                if sets.defender_pure { " (pure)" } else { "" }
            );
        }
    }
}
