//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines for passing criteria too.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use secgame::attacker::solve_attacker;
use secgame::bench::{generate_costs, CostDist};
use secgame::defender::{solve_defender, DualFamily};
use secgame::game::{marginal_of_strategy, normalize, GameInstance, MarginalVector};
use secgame::lift::{lift_defender, lift_marginal, verify_saddle, DEFAULT_ENUM_CAP};
use secgame::oracle::{oracle_certificate, DEFAULT_MATRIX_CAP};
use secgame::solve::{solve_fast_sorted, solve_fast_with_stats};

fn criterion(name: &str, body: impl FnOnce() + UnwindSafe) {
    match catch_unwind(body) {
        Ok(()) => println!("acceptance: {name} ... PASS"),
        Err(e) => {
            println!("acceptance: {name} ... FAIL");
            resume_unwind(e);
        }
    }
}

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!(
        (a - b).abs() <= tol * 1.0_f64.max(a.abs()).max(b.abs()),
        "{a} !~ {b} (tol {tol:e})"
    );
}

/// Seeded uniform (0, 10] costs for the oracle sweeps.
fn sweep_costs(m: usize, ka: usize, kd: usize, trial: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EC6);
    rng.set_stream(((m * 389 + ka * 37 + kd) as u64) << 20 | trial as u64);
    (0..m).map(|_| 10.0 * (1.0 - rng.gen::<f64>())).collect()
}

fn each_sweep_instance(mut visit: impl FnMut(GameInstance)) {
    for m in 2..=6 {
        for ka in 1..m {
            for kd in 1..m {
                for trial in 0..200 {
                    let costs = sweep_costs(m, ka, kd, trial);
                    visit(normalize(&costs, ka, kd).unwrap());
                }
            }
        }
    }
}

/// Seeded instances for the at-scale primal/dual check: log-uniform m
/// up to 10^4, half of them forced into the k_a + k_d > m regime.
fn scale_instance(index: usize) -> GameInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0A1);
    rng.set_stream(index as u64);
    let m = (10f64.powf(rng.gen_range(0.302f64..4.0)).round() as usize).clamp(2, 10_000);
    let ka = rng.gen_range(1..m);
    let kd = if index % 2 == 1 && m - ka < m - 1 {
        rng.gen_range((m - ka + 1).max(1)..m)
    } else {
        rng.gen_range(1..m)
    };
    let costs: Vec<f64> = (0..m).map(|_| 10.0 * (1.0 - rng.gen::<f64>())).collect();
    normalize(&costs, ka, kd).unwrap()
}

/// Monotone products, tail/run/zero structure of the attack marginal,
/// and its budget and bounds.
fn check_attacker_structure(g: &GameInstance) {
    let sol = solve_attacker(g).unwrap();
    let m = g.m();
    let eps = 1e-9 * 1.0_f64.max(sol.value);
    let prod: Vec<f64> = (1..=m)
        .map(|l| sol.alpha.values()[l - 1] * g.cost(l))
        .collect();
    for l in 0..m - 1 {
        assert!(
            prod[l + 1] >= prod[l] - eps,
            "ordering violated at {l}: {} > {}",
            prod[l],
            prod[l + 1]
        );
    }
    let s = sol.cell.s;
    let r = sol.cell.r;
    let tail = prod[m - 1];
    for l in s..=m {
        assert!(
            (prod[l - 1] - tail).abs() <= eps,
            "tail not equalized at {l}"
        );
    }
    if s > 1 {
        assert!(prod[s - 2] <= tail + eps, "run exceeds the tail level");
    }
    for l in 1..s - r {
        assert!(
            sol.alpha.values()[l - 1] == 0.0,
            "expected zero below the run"
        );
    }
    let total: f64 = sol.alpha.values().iter().sum();
    assert!(
        (total - g.k_a() as f64).abs() <= 1e-9 * m as f64,
        "budget off: {total}"
    );
    for &a in sol.alpha.values() {
        assert!((0.0..=1.0).contains(&a));
    }
}

/// Structure (a)/(b) shape of the non-protection marginal, plus budget
/// and bounds.
fn check_defender_structure(g: &GameInstance) {
    let sol = solve_defender(g).unwrap();
    let m = g.m();
    let eps = 1e-9 * 1.0_f64.max(sol.value);
    let beta = sol.beta.values();
    let s = sol.cell.s;
    let lvl = sol.cell.tail_level;
    for l in s..=m {
        assert!(
            (beta[l - 1] * g.cost(l) - lvl).abs() <= eps,
            "tail product off at {l}"
        );
    }
    match sol.cell.family {
        DualFamily::StructureA => {
            for l in 1..s {
                assert!(beta[l - 1] == 1.0, "prefix not saturated at {l}");
            }
        }
        DualFamily::StructureB => {
            for l in 1..s - 1 {
                assert!(beta[l - 1] == 1.0, "prefix not saturated at {l}");
            }
            let bridge = beta[s - 2];
            assert!((0.0..=1.0).contains(&bridge));
            assert!(
                bridge * g.cost(s - 1) >= lvl - eps,
                "bridge product below the tail level"
            );
        }
    }
    let total: f64 = beta.iter().sum();
    assert!(
        (total - (m - g.k_d()) as f64).abs() <= 1e-9 * m as f64,
        "budget off: {total}"
    );
    for &b in beta {
        assert!((0.0..=1.0).contains(&b));
    }
}

#[test]
fn criterion_1_exhaustive_oracle_equivalence() {
    criterion("1 exhaustive oracle equivalence (m 2..6)", || {
        each_sweep_instance(|g| {
            let (cert, stats) = solve_fast_with_stats(&g).unwrap();
            assert!(stats.values_agree());
            let oracle = oracle_certificate(&g, DEFAULT_MATRIX_CAP).unwrap();
            assert!(
                (cert.value - oracle.value).abs() <= 1e-8 * 1.0_f64.max(oracle.value),
                "m={} ka={} kd={} fast={} oracle={}",
                g.m(),
                g.k_a(),
                g.k_d(),
                cert.value,
                oracle.value
            );
        });
    });
}

#[test]
fn criterion_2_named_worked_instances() {
    criterion("2 named worked instances (1e-12)", || {
        let cases: [(&[f64], usize, usize, f64); 6] = [
            (&[1.0, 2.0], 1, 1, 2.0 / 3.0),
            (&[1.0, 2.0, 3.0], 1, 1, 6.0 / 5.0),
            (&[1.0, 2.0, 3.0], 2, 1, 7.0 / 3.0),
            (&[1.0, 2.0, 3.0], 2, 2, 1.0),
            (&[1.0, 1.0], 1, 1, 0.5),
            (&[1.0, 2.0, 3.0], 2, 0, 5.0),
        ];
        for (costs, ka, kd, expect) in cases {
            let g = normalize(costs, ka, kd).unwrap();
            let (cert, stats) = solve_fast_with_stats(&g).unwrap();
            assert_close(cert.value, expect, 1e-12);
            assert_close(stats.attacker_value, expect, 1e-12);
            assert_close(stats.defender_value, expect, 1e-12);
        }
    });
}

#[test]
fn criterion_3_primal_dual_agreement_at_scale() {
    criterion("3 primal-dual agreement at scale (1000 instances)", || {
        let mut over_budget = 0usize;
        for index in 0..1000 {
            let g = scale_instance(index);
            if g.k_a() + g.k_d() > g.m() {
                over_budget += 1;
            }
            let (_, stats) = solve_fast_with_stats(&g).unwrap();
            assert!(
                (stats.attacker_value - stats.defender_value).abs()
                    <= 1e-9 * 1.0_f64.max(stats.attacker_value),
                "m={} ka={} kd={}: {} vs {}",
                g.m(),
                g.k_a(),
                g.k_d(),
                stats.attacker_value,
                stats.defender_value
            );
        }
        assert!(over_budget >= 200, "regime mix too thin: {over_budget}");
    });
}

#[test]
fn criterion_4_structural_invariants() {
    criterion("4 structural invariants (marginal shapes)", || {
        each_sweep_instance(|g| {
            check_attacker_structure(&g);
            check_defender_structure(&g);
        });
        for index in 0..1000 {
            let g = scale_instance(index);
            check_attacker_structure(&g);
            check_defender_structure(&g);
        }
    });
}

#[test]
fn criterion_5_saddle_closure_of_lifted_strategies() {
    criterion("5 saddle closure of lifted strategies", || {
        each_sweep_instance(|g| {
            let (alpha, beta, value) = solve_fast_sorted(&g).unwrap();
            let p = lift_marginal(
                &MarginalVector::new(alpha, g.k_a() as f64).unwrap(),
                g.k_a(),
            )
            .unwrap();
            let q = lift_defender(
                &MarginalVector::new(beta, (g.m() - g.k_d()) as f64).unwrap(),
                g.k_d(),
                g.m(),
            )
            .unwrap();
            let verdict = verify_saddle(&p, &q, value, &g, 1e-8, DEFAULT_ENUM_CAP).unwrap();
            assert!(
                verdict.pass,
                "m={} ka={} kd={}: guarantee {} exposure {} value {}",
                g.m(),
                g.k_a(),
                g.k_d(),
                verdict.defense_side_min,
                verdict.attack_side_max,
                value
            );
        });
    });
}

#[test]
fn criterion_6_lift_round_trip() {
    criterion("6 lift round trip (10^4 marginals, 1e-12)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11F7);
        for _ in 0..10_000 {
            let m = rng.gen_range(1..=64);
            let k = rng.gen_range(0..=m);
            let values = random_feasible(&mut rng, m, k);
            let strategy =
                lift_marginal(&MarginalVector::new(values.clone(), k as f64).unwrap(), k).unwrap();
            assert!(strategy.atoms().len() <= m.max(1));
            let back = marginal_of_strategy(&strategy, m, false);
            for (a, b) in back.values().iter().zip(&values) {
                assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
            }
        }
    });
}

#[test]
fn criterion_7_linear_time_evidence() {
    criterion("7 linear-time evidence (m = 10^6, ratio to 2x10^6)", || {
        let time_solve = |m: usize, k: usize| -> (u128, usize, usize) {
            let costs = generate_costs(77, m, 0, CostDist::Uniform);
            let mut times = Vec::new();
            let mut cells = (0usize, 0usize);
            for _ in 0..5 {
                let costs = costs.clone();
                let start = Instant::now();
                let g = normalize(&costs, k, k).unwrap();
                let (_, stats) = solve_fast_with_stats(&g).unwrap();
                times.push(start.elapsed().as_nanos());
                cells = (stats.cells_u, stats.cells_w);
            }
            times.sort_unstable();
            (times[2], cells.0, cells.1)
        };
        let (t1, cells_u, cells_w) = time_solve(1_000_000, 100_000);
        assert!(t1 <= 1_000_000_000, "m = 10^6 took {} ns", t1);
        let k = 1_000_000 - 100_000;
        assert!(cells_u <= 2 * k, "cells_U = {cells_u}");
        assert!(cells_w <= 4 * 1_000_000, "cells_W = {cells_w}");
        let (t2, _, _) = time_solve(2_000_000, 200_000);
        let ratio = t2 as f64 / t1 as f64;
        assert!(ratio <= 2.5, "doubling ratio {ratio}");
        println!(
            "  m=10^6: {:.1} ms, cells_U={}, cells_W={}, doubling ratio {:.2}",
            t1 as f64 / 1e6,
            cells_u,
            cells_w,
            ratio
        );
    });
}

#[test]
fn criterion_8_byte_identical_reruns() {
    criterion("8 byte-identical certificates and bench CSVs", || {
        let bin = env!("CARGO_BIN_EXE_secgame");
        let dir = tempfile::tempdir().unwrap();
        let instance = dir.path().join("instance.json");
        let costs = generate_costs(5, 100, 0, CostDist::Uniform);
        let inst = secgame::io::InstanceFile {
            costs,
            k_a: 10,
            k_d: 10,
        };
        secgame::io::write_instance(&instance, &inst).unwrap();

        let solve_once = |out: &str| -> Vec<u8> {
            let path = dir.path().join(out);
            let status = Command::new(bin)
                .args(["solve", "--input"])
                .arg(&instance)
                .args(["--strategies", "--no-timing", "--output"])
                .arg(&path)
                .status()
                .unwrap();
            assert!(status.success());
            std::fs::read(path).unwrap()
        };
        let a = solve_once("cert_a.json");
        let b = solve_once("cert_b.json");
        assert_eq!(a, b, "certificates differ between runs");

        let bench_once = |out: &str| -> Vec<u8> {
            let path = dir.path().join(out);
            let status = Command::new(bin)
                .args([
                    "bench",
                    "--m-list",
                    "50,100",
                    "--trials",
                    "3",
                    "--seed",
                    "7",
                    "--no-timing",
                    "--output",
                ])
                .arg(&path)
                .status()
                .unwrap();
            assert!(status.success());
            std::fs::read(path).unwrap()
        };
        let a = bench_once("bench_a.csv");
        let b = bench_once("bench_b.csv");
        assert_eq!(a, b, "bench CSVs differ between runs");
    });
}

/// Random point of {0 <= v <= 1, sum v = k} via iterative clamping.
fn random_feasible(rng: &mut impl Rng, m: usize, k: usize) -> Vec<f64> {
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
