//! Cross-check the linear solvers against the exhaustive LP oracle on
//! random desk-scale instances.
//!
//! ```bash
//! cargo run --example oracle_crosscheck
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secgame::normalize;
use secgame::oracle::{oracle_certificate, DEFAULT_MATRIX_CAP};
use secgame::solve::solve_fast_with_stats;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for round in 0..200 {
        let m = rng.gen_range(2..=7);
        let ka = rng.gen_range(1..m);
        let kd = rng.gen_range(1..m);
        let costs: Vec<f64> = (0..m).map(|_| 10.0 * (1.0 - rng.gen::<f64>())).collect();
        let game = normalize(&costs, ka, kd).unwrap();

        let (cert, stats) = solve_fast_with_stats(&game).unwrap();
        let oracle = oracle_certificate(&game, DEFAULT_MATRIX_CAP).unwrap();
        let dev = (cert.value - oracle.value).abs() / 1.0_f64.max(oracle.value);
        worst = worst.max(dev);
        assert!(
            dev <= 1e-8,
            "round {round}: fast {} vs oracle {}",
            cert.value,
            oracle.value
        );
        assert!(stats.values_agree());
    }
    println!("200 instances cross-checked; worst relative deviation {worst:.3e}");
}
