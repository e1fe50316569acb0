// scratch diagnostics, deleted before ship
use soliton_nft::darboux::{grid_for_spectrum, remove_eigenvalue, synthesize};
use soliton_nft::eigenfinder::{newton_refine, NewtonConfig};
use soliton_nft::scattering::split_index;
use soliton_nft::{Complex64, DiscreteSpectrum};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() {
    let samples: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4096);
    let sigmas = [2.5, 2.0, 1.5, 1.0, 0.5];
    let phases = [0.24, 4.90, 0.58, 3.98, 0.09];
    let spec = DiscreteSpectrum::new(
        sigmas
            .iter()
            .zip(&phases)
            .map(|(&s, &p)| (c(0.0, s), (Complex64::i() * p).exp()))
            .collect(),
    )
    .unwrap();

    let eps: f64 = 2e-4;
    let grid = grid_for_spectrum(&spec, eps, samples).unwrap();
    println!(
        "grid [{:.3}, {:.3}] h={:.5} M={}",
        grid.t_start,
        grid.t_end(),
        grid.step,
        grid.len
    );
    let pulse = synthesize(&spec, &grid).unwrap();
    println!("energy {:.6} (trace {:.6})", pulse.energy(), spec.trace_energy());

    // refine each eigenvalue on the FULL pulse (classical style)
    for &s in &sigmas {
        let r = newton_refine(&pulse, c(0.0, s), &NewtonConfig::default()).unwrap();
        println!(
            "full pulse: target {s}: lambda_hat = {:+.3e}{:+.3e}i  err {:.3e} res {:.3e} iters {}",
            r.lambda.re,
            r.lambda.im,
            (r.lambda - c(0.0, s)).norm(),
            r.residual,
            r.iterations
        );
    }

    // now walk the SER chain with per-step truncation
    let mut current = pulse.truncate(2.0 * 0.5 * eps.sqrt()).unwrap();
    let order = [0.5, 1.0, 1.5, 2.0, 2.5];
    for (i, &s) in order.iter().enumerate() {
        let r = newton_refine(&current, c(0.0, s), &NewtonConfig::default()).unwrap();
        println!(
            "ser step {i}: target {s}: err {:.3e}  res {:.3e}  window [{:.3},{:.3}] M={}",
            (r.lambda - c(0.0, s)).norm(),
            r.residual,
            current.t_start(),
            current.t_end(),
            current.len()
        );
        let p = split_index(current.len(), 0.5);
        let (reduced, b_hat) = remove_eigenvalue(&current, r.lambda, p).unwrap();
        let expect_b = (Complex64::i() * phases[4 - i]).exp();
        println!(
            "          b_hat err {:.3e}  energy drop {:.6} vs {:.6}",
            (b_hat - expect_b).norm(),
            current.energy() - reduced.energy(),
            4.0 * s
        );
        let sigma_next = order.get(i + 1).copied().unwrap_or(s);
        current = reduced
            .truncate(2.0 * sigma_next * eps.sqrt())
            .unwrap_or(reduced);
    }

    // same chain WITHOUT truncation
    println!("--- no truncation ---");
    let mut current = pulse.clone();
    for (i, &s) in order.iter().enumerate() {
        let r = newton_refine(&current, c(0.0, s), &NewtonConfig::default()).unwrap();
        println!(
            "ser step {i}: target {s}: err {:.3e}  res {:.3e}",
            (r.lambda - c(0.0, s)).norm(),
            r.residual
        );
        let p = split_index(current.len(), 0.5);
        let (reduced, _b_hat) = remove_eigenvalue(&current, r.lambda, p).unwrap();
        current = reduced;
    }
}
