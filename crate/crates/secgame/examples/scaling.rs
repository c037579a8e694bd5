//! Measure solver scaling: time per solve and candidate-cell counts
//! across a doubling ladder of instance sizes.
//!
//! ```bash
//! cargo run --release --example scaling
//! ```

use secgame::bench::{run_bench, BenchConfig};

fn main() {
    let cfg = BenchConfig {
        m_list: vec![
            10_000, 20_000, 40_000, 80_000, 160_000, 320_000, 640_000, 1_280_000,
        ],
        trials: 5,
        seed: 7,
        ..BenchConfig::default()
    };
    let report = run_bench(&cfg).unwrap();
    print!("{}", report.text_report());
    println!();
    println!("cell evaluations stay within 2*max(k_a, m - k_d) and 4m; time");
    println!("grows like the sort, i.e. close to linear:");
    let mut prev: Option<u128> = None;
    for row in &report.rows {
        let ratio = prev.map(|p| row.median_ns as f64 / p as f64);
        match ratio {
            Some(r) => println!("  m = {:>9}: doubling ratio {:.2}", row.m, r),
            None => println!("  m = {:>9}: baseline", row.m),
        }
        prev = Some(row.median_ns);
    }
}
