//! Contact-grasp geometry end to end: informative prior from a surface
//! normal, evidence-weighted posterior, approach bins perpendicular to the
//! baseline, soft bin targets, grasp realization, and pose assembly.
//!
//! Run with: cargo run --release -p vmf-evidential --example grasp_pipeline

use vmf_evidential::grasp::{
    assemble_pose, bin_directions, sample_grasp, soft_bin_targets, BaselineMode,
};
use vmf_evidential::losses::soft_bin_loss;
use vmf_evidential::natpn::{informative_prior, posterior_update, Evidence};
use vmf_evidential::{RandomStream, UnitVector3, Vec3};

fn main() {
    // a tabletop contact: surface normal +z, prior points into the surface
    let contact = Vec3::new(0.10, -0.05, 0.02);
    let normal = UnitVector3::Z;
    let prior = informative_prior(normal);

    // the network observes a likelihood mean tilted toward +x with evidence 4
    let observed = UnitVector3::new(0.8, 0.1, -0.6).unwrap();
    let up = posterior_update(&prior, observed, Evidence::new(4.0).unwrap()).unwrap();
    println!(
        "posterior baseline: mean ({:+.3}, {:+.3}, {:+.3}), kappa' = {}",
        up.posterior.mu().x(),
        up.posterior.mu().y(),
        up.posterior.mu().z(),
        up.posterior.kappa()
    );

    // approach bins fan over half a turn perpendicular to the baseline
    let bins = bin_directions(up.posterior.mu(), 12).unwrap();
    println!("12 approach bins, every one orthogonal to the baseline:");
    for (t, d) in bins.iter().enumerate().step_by(3) {
        println!(
            "  bin {t:>2}: ({:+.3}, {:+.3}, {:+.3})  dot(baseline) = {:+.1e}",
            d.x(),
            d.y(),
            d.z(),
            d.dot(up.posterior.mu())
        );
    }

    // soft targets are cosines to the true approach; the bin loss vanishes
    // when the scores equal them
    let true_approach = bins[2];
    let targets = soft_bin_targets(true_approach, &bins);
    let loss = soft_bin_loss(&targets, true_approach, &bins).unwrap();
    println!("\nsoft-bin loss at the exact targets: {loss}");

    // realize a grasp: downward-preferring score head, fixed width head
    let mut rng = RandomStream::new(5);
    let score = |dirs: &[UnitVector3]| dirs.iter().map(|d| -d.z()).collect::<Vec<_>>();
    let width = |_: UnitVector3| 0.064;
    let grasp = sample_grasp(
        contact,
        &up.posterior,
        12,
        &score,
        &width,
        BaselineMode::Deterministic,
        &mut rng,
    )
    .unwrap();
    println!(
        "\ngrasp: width {} m, quality {}, kappa_post {}",
        grasp.width, grasp.quality, grasp.total_concentration
    );
    println!("grasp JSON: {}", serde_json::to_string(&grasp).unwrap());

    // assemble the gripper pose; translation is the midpoint between fingers
    let pose = assemble_pose(&grasp).unwrap();
    println!(
        "\npose translation: ({:+.4}, {:+.4}, {:+.4})",
        pose.translation.x, pose.translation.y, pose.translation.z
    );
    println!(
        "pose rotation: det = {:.6}, orthonormality defect = {:.1e}",
        pose.rotation.det(),
        pose.rotation.orthonormality_defect()
    );
}
