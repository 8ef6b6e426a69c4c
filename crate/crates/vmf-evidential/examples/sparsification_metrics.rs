//! Sparsification curves and AUROC on controlled synthetic inputs: what
//! perfect, partial, and useless uncertainty orderings look like.
//!
//! Run with: cargo run --release -p vmf-evidential --example sparsification_metrics

use vmf_evidential::metrics::{ood_auroc, sparsification, sparsification_curve};
use vmf_evidential::RandomStream;

fn main() {
    let mut rng = RandomStream::new(77);
    let n = 2000;
    let errors: Vec<f64> = (0..n).map(|_| rng.next_f64().powi(2)).collect();

    // perfect ordering: uncertainty = error
    let (ausc, ause) = sparsification(&errors, &errors).unwrap();
    println!("perfect ordering:  AUSC = {ausc:8.3}  AUSE = {ause:.3}");

    // partial signal: uncertainty = error + noise
    let noisy: Vec<f64> = errors
        .iter()
        .map(|e| e + 0.3 * rng.next_f64())
        .collect();
    let (ausc, ause) = sparsification(&errors, &noisy).unwrap();
    println!("noisy ordering:    AUSC = {ausc:8.3}  AUSE = {ause:.3}");

    // useless ordering: independent uncertainty
    let random: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
    let (ausc, ause) = sparsification(&errors, &random).unwrap();
    println!("random ordering:   AUSC = {ausc:8.3}  AUSE = {ause:.3}");

    // the curve itself: mean error of the k% most certain points
    let curve = sparsification_curve(&errors, &noisy).unwrap();
    println!("\nretention sweep under the noisy ordering:");
    for k in [10, 25, 50, 75, 100] {
        println!(
            "  keep {k:>3}%: curve {:.4}  oracle {:.4}",
            curve.curve[k - 1],
            curve.oracle[k - 1]
        );
    }

    // Mann-Whitney AUROC with ties counted half
    let mut evidence = vec![0.0; 0];
    let mut flags = Vec::new();
    for i in 0..1000 {
        // ID evidence high, OOD evidence low, with overlap
        let ood = i % 2 == 0;
        let e = if ood {
            rng.next_f64() * 0.6
        } else {
            0.4 + rng.next_f64() * 0.6
        };
        evidence.push(e);
        flags.push(ood);
    }
    println!(
        "\noverlapping evidence distributions: AUROC = {:.4}",
        ood_auroc(&evidence, &flags).unwrap()
    );
}
