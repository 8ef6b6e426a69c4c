//! von Mises-Fisher essentials: density, entropy, exact sampling, and the
//! closed-form moment identity E[mu^T x] = coth(kappa) - 1/kappa.
//!
//! Run with: cargo run --release -p vmf-evidential --example vmf_basics

use vmf_evidential::special::{a3, log_norm_const};
use vmf_evidential::vmf::mean_resultant_length;
use vmf_evidential::{RandomStream, UnitVector3, VmfParams};

fn main() {
    let mu = UnitVector3::new(0.0, 0.6, 0.8).unwrap();

    println!("log normalizer log Z(kappa) = log kappa - log(4 pi) - log sinh(kappa):");
    for kappa in [0.0, 1.0, 10.0, 1000.0] {
        println!("  kappa = {kappa:>7}: log Z = {:+.6}", log_norm_const(kappa).unwrap());
    }

    println!("\ndensity and entropy:");
    for kappa in [0.0, 1.0, 5.0, 50.0] {
        let p = VmfParams::new(mu, kappa).unwrap();
        println!(
            "  kappa = {kappa:>4}: log p(mu) = {:+.6}   entropy = {:+.6}",
            p.log_pdf(mu),
            p.entropy()
        );
    }

    println!("\nsampler moment check (n = 100000 draws per kappa):");
    let mut rng = RandomStream::new(42);
    for kappa in [0.1, 1.0, 5.0, 50.0] {
        let p = VmfParams::new(mu, kappa).unwrap();
        let xs = p.sample(100_000, &mut rng);
        let r = mean_resultant_length(&xs);
        let expect = a3(kappa).unwrap();
        println!(
            "  kappa = {kappa:>4}: resultant length {r:.5} vs a3(kappa) {expect:.5} (diff {:+.1e})",
            r - expect
        );
    }

    println!("\nconjugate posterior for the mean (fixed likelihood concentration):");
    let prior = VmfParams::new(UnitVector3::Z, 1.0).unwrap();
    let truth = UnitVector3::new(0.6, -0.3, 0.74).unwrap();
    let data = VmfParams::new(truth, 50.0).unwrap().sample(100, &mut rng);
    let post = vmf_evidential::vmf::conjugate_posterior(&prior, 50.0, &data).unwrap();
    println!(
        "  100 draws at kappa = 50: posterior mean {:.1} deg from truth, concentration {:.1}",
        post.mu().angle_to(truth).to_degrees(),
        post.kappa()
    );
}
