//! Solve a small instance and read the certificate.
//!
//! ```bash
//! cargo run --example solve_basic
//! ```

use secgame::{normalize, solve_fast};

fn main() {
    // Three targets with impacts 3, 1, 2; one attack and one protection
    // resource. Costs can arrive in any order.
    let game = normalize(&[3.0, 1.0, 2.0], 1, 1).unwrap();
    let cert = solve_fast(&game).unwrap();

    println!("game value: {}", cert.value);
    println!(
        "attack marginal (original order): {:?}",
        cert.alpha.values()
    );
    println!("unprotected marginal:             {:?}", cert.beta.values());
    println!(
        "attacker mixes over targets {:?}, defender over {:?}{}",
        cert.attacker_active,
        cert.defender_active,
        if cert.defender_pure { " (pure)" } else { "" }
    );

    // The marginals already certify the value: the defender's best
    // response against alpha and the attacker's against beta both equal
    // it.
    let attacker_guarantee = game.defender_best_response_value(&to_sorted(&game, &cert.alpha));
    let defender_guarantee = game.attacker_best_response_value(&to_sorted(&game, &cert.beta));
    println!("attacker guarantees {attacker_guarantee}, defender concedes {defender_guarantee}");
}

fn to_sorted(
    game: &secgame::GameInstance,
    orig: &secgame::MarginalVector,
) -> secgame::MarginalVector {
    let sorted: Vec<f64> = (1..=game.m())
        .map(|s| orig.values()[game.orig_id(s) - 1])
        .collect();
    secgame::MarginalVector::new(sorted, orig.budget()).unwrap()
}
