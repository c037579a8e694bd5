//! Seeded benchmark harness for the linear solvers: generates
//! reproducible random instances, times the fast solve, tracks the
//! instrumented cell counts, and optionally cross-checks small sizes
//! against the LP oracle.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::game::normalize;
use crate::numeric::binomial;
use crate::oracle::oracle_certificate;
use crate::solve::solve_fast_with_stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostDist {
    /// Uniform on (0, 1].
    Uniform,
    /// exp(N(0, 1)).
    LogNormal,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub m_list: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub dist: CostDist,
    /// Defender budget as a fraction of m; defaults to 1/10 like the
    /// attacker's.
    pub kd_frac: Option<f64>,
    pub with_oracle: bool,
    pub oracle_cap: u128,
    /// Zero out timing columns for byte-stable output comparisons.
    pub no_timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            m_list: vec![1000],
            trials: 5,
            seed: 0,
            dist: CostDist::Uniform,
            kd_frac: None,
            with_oracle: false,
            oracle_cap: crate::oracle::DEFAULT_MATRIX_CAP,
            no_timing: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub m: usize,
    pub k_a: usize,
    pub k_d: usize,
    pub median_ns: u128,
    pub p90_ns: u128,
    /// Maximum attacker-side cell evaluations over the trials.
    pub cells_u: usize,
    /// Maximum defender-side cell evaluations over the trials.
    pub cells_w: usize,
    /// Largest |fast - oracle| value deviation, when comparable.
    pub max_oracle_dev: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub with_oracle: bool,
    pub skipped_oracle: Vec<usize>,
}

/// Deterministic cost vector for `(seed, m, trial)`.
pub fn generate_costs(seed: u64, m: usize, trial: usize, dist: CostDist) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ trial as u64);
    (0..m)
        .map(|_| match dist {
            CostDist::Uniform => 1.0 - rng.gen::<f64>(),
            CostDist::LogNormal => {
                let z: f64 = StandardNormal.sample(&mut rng);
                z.exp()
            }
        })
        .collect()
}

pub fn default_budget(m: usize) -> usize {
    m.div_ceil(10).max(1)
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut rows = Vec::with_capacity(cfg.m_list.len());
    let mut skipped = Vec::new();
    let mut m_list = cfg.m_list.clone();
    m_list.sort_unstable();
    for m in m_list {
        let k_a = default_budget(m).min(m);
        let k_d = match cfg.kd_frac {
            Some(frac) => (((m as f64) * frac).ceil() as usize).clamp(0, m),
            None => default_budget(m).min(m),
        };
        let mut times = Vec::with_capacity(cfg.trials);
        let mut cells_u = 0usize;
        let mut cells_w = 0usize;
        let mut max_dev: Option<f64> = None;
        let oracle_feasible = binomial(m, k_a).saturating_mul(binomial(m, k_d)) <= cfg.oracle_cap;
        for trial in 0..cfg.trials {
            let costs = generate_costs(cfg.seed, m, trial, cfg.dist);
            let g = normalize(&costs, k_a, k_d)?;
            let start = Instant::now();
            let (cert, stats) = solve_fast_with_stats(&g)?;
            times.push(start.elapsed().as_nanos());
            cells_u = cells_u.max(stats.cells_u);
            cells_w = cells_w.max(stats.cells_w);
            if cfg.with_oracle && oracle_feasible {
                let oracle = oracle_certificate(&g, cfg.oracle_cap)?;
                let dev = (cert.value - oracle.value).abs();
                max_dev = Some(max_dev.map_or(dev, |d: f64| d.max(dev)));
            }
        }
        if cfg.with_oracle && !oracle_feasible {
            skipped.push(m);
        }
        times.sort_unstable();
        let median_ns = if times.is_empty() {
            0
        } else {
            times[(times.len() - 1) / 2]
        };
        let p90_ns = if times.is_empty() {
            0
        } else {
            times[((times.len() * 9).div_ceil(10)).saturating_sub(1)]
        };
        rows.push(BenchRow {
            m,
            k_a,
            k_d,
            median_ns: if cfg.no_timing { 0 } else { median_ns },
            p90_ns: if cfg.no_timing { 0 } else { p90_ns },
            cells_u,
            cells_w,
            max_oracle_dev: max_dev,
        });
    }
    Ok(BenchReport {
        rows,
        with_oracle: cfg.with_oracle,
        skipped_oracle: skipped,
    })
}

impl BenchReport {
    /// CSV with a header row and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.with_oracle {
            out.push_str("m,median_ns,p90_ns,cells_U,cells_W,max_dv\n");
        } else {
            out.push_str("m,median_ns,p90_ns,cells_U,cells_W\n");
        }
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}",
                row.m, row.median_ns, row.p90_ns, row.cells_u, row.cells_w
            ));
            if self.with_oracle {
                match row.max_oracle_dev {
                    Some(dev) => out.push_str(&format!(",{:e}", dev)),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn text_report(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!(
                "m = {:>9}  k_a = {:>7}  k_d = {:>7}  median = {:>12} ns  p90 = {:>12} ns  cells_U = {:>8}  cells_W = {:>8}",
                row.m, row.k_a, row.k_d, row.median_ns, row.p90_ns, row.cells_u, row.cells_w
            ));
            if let Some(dev) = row.max_oracle_dev {
                out.push_str(&format!("  max|dv| = {:e}", dev));
            }
            out.push('\n');
        }
        for m in &self.skipped_oracle {
            out.push_str(&format!(
                "m = {m}: oracle comparison skipped (matrix exceeds cap)\n"
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_reproducible() {
        let a = generate_costs(7, 100, 3, CostDist::Uniform);
        let b = generate_costs(7, 100, 3, CostDist::Uniform);
        assert_eq!(a, b);
        let c = generate_costs(7, 100, 4, CostDist::Uniform);
        assert_ne!(a, c);
        assert!(a.iter().all(|&x| x > 0.0 && x <= 1.0));
    }

    #[test]
    fn report_tracks_cell_bounds() {
        let cfg = BenchConfig {
            m_list: vec![50, 100],
            trials: 3,
            seed: 7,
            no_timing: true,
            ..BenchConfig::default()
        };
        let report = run_bench(&cfg).unwrap();
        assert_eq!(report.rows.len(), 2);
        for row in &report.rows {
            let k = row.k_a.max(row.m - row.k_d);
            assert!(row.cells_u <= 2 * k);
            assert!(row.cells_w <= 4 * row.m);
            assert_eq!(row.median_ns, 0);
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("m,median_ns,p90_ns,cells_U,cells_W\n"));
        assert_eq!(csv.matches('\n').count(), 3);
    }

    #[test]
    fn same_seed_gives_identical_csv() {
        let cfg = BenchConfig {
            m_list: vec![20, 40],
            trials: 2,
            seed: 11,
            no_timing: true,
            with_oracle: true,
            ..BenchConfig::default()
        };
        let a = run_bench(&cfg).unwrap().to_csv();
        let b = run_bench(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.contains("max_dv"));
    }
}
