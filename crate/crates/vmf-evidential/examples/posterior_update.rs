//! Evidence-weighted posterior updates: the informative prior, the additive
//! natural-parameter rule, the exact-conjugate alternative, and associative
//! evidence accumulation.
//!
//! Run with: cargo run --release -p vmf-evidential --example posterior_update

use vmf_evidential::natpn::{
    evidence_from_log_density, informative_prior, posterior_update, CertaintyBudget, Evidence,
    PosteriorAccumulator,
};
use vmf_evidential::vmf::conjugate_posterior;
use vmf_evidential::UnitVector3;

fn main() {
    // a contact with surface normal +z gets a prior pointing into the surface
    let normal = UnitVector3::Z;
    let prior = informative_prior(normal);
    println!(
        "informative prior: mu0 = ({:+.0}, {:+.0}, {:+.0}), kappa0 = {}",
        prior.mu().x(),
        prior.mu().y(),
        prior.mu().z(),
        prior.kappa()
    );

    // evidence from a feature density under a certainty budget
    let budget = CertaintyBudget::new(100.0).unwrap();
    for density in [0.0f64, 0.005, 0.05, 0.5] {
        let log_density = if density == 0.0 {
            f64::NEG_INFINITY
        } else {
            density.ln()
        };
        let ev = evidence_from_log_density(log_density, budget).unwrap();
        println!("  density {density:>6}: evidence m = {}", ev.m());
    }

    // the update interpolates prior and observation in natural parameters
    let observed = UnitVector3::X;
    println!("\nposterior update toward an observation at x, prior at -z:");
    let prior = informative_prior(-UnitVector3::Z); // prior mean +z
    for m in [0.0, 1.0, 3.0, 100.0] {
        let up = posterior_update(&prior, observed, Evidence::new(m).unwrap()).unwrap();
        println!(
            "  m = {m:>5}: mean ({:+.4}, {:+.4}, {:+.4})  kappa' = {:>6}  interp norm {:.4}",
            up.posterior.mu().x(),
            up.posterior.mu().y(),
            up.posterior.mu().z(),
            up.posterior.kappa(),
            up.interp_norm
        );
    }

    // additive vs exact-conjugate semantics for the same observation
    let m = 3.0;
    let additive = posterior_update(&prior, observed, Evidence::new(m).unwrap()).unwrap();
    let exact = conjugate_posterior(&prior, m, &[observed]).unwrap();
    println!("\nsame observation, two concentration semantics (m = {m}):");
    println!(
        "  additive rule: kappa' = kappa0 + m = {}",
        additive.posterior.kappa()
    );
    println!(
        "  exact conjugate: kappa' = |kappa0 mu0 + m x| = {:.4}",
        exact.kappa()
    );
    println!("  (means agree; the norm is smaller whenever prior and data disagree)");

    // accumulators combine evidence associatively and merge field-wise
    let mut left = PosteriorAccumulator::from_prior(&prior);
    left.observe(observed, Evidence::new(1.0).unwrap());
    let mut right = PosteriorAccumulator::empty();
    right.observe(UnitVector3::Y, Evidence::new(2.0).unwrap());
    left.merge(&right);
    let combined = left.finalize().unwrap();
    println!(
        "\nmerged accumulator: mean ({:+.4}, {:+.4}, {:+.4}), total count {}",
        combined.mu().x(),
        combined.mu().y(),
        combined.mu().z(),
        combined.kappa()
    );
}
