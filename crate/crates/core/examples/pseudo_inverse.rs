//! Minimal-norm solution from the sampling operator, and what it does to
//! noisy samples.

use lifpocs::kernel::KernelSystem;
use lifpocs::lif::{calibrate_threshold, encode, LifParams, Polarity};
use lifpocs::pocs::{operator_rank, pocs_run, project_range, pseudo_inverse, weighted_norm_sq};
use lifpocs::signal::{random_bandlimited, TimeGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> lifpocs::Result<()> {
    let period = 61;
    let x = random_bandlimited(period, 0.7, 9)?;
    let probe = LifParams::new(0.2, 1.0, 1.0, Polarity::Unipolar)?;
    let params = probe.with_threshold(calibrate_threshold(std::slice::from_ref(&x), &probe, 2.0)?)?;
    let ks = KernelSystem::build(&encode(&x, &params, TimeGrid::with_default(period)?)?, &params)?;
    println!("{} samples, operator rank {}", ks.len(), operator_rank(&ks)?);

    let xd = pseudo_inverse(&ks, ks.samples())?;
    println!("noiseless recovery error {:.2e}", xd.distance_sq(&x).sqrt() / x.norm());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noisy: Vec<f64> = ks
        .samples()
        .iter()
        .map(|t| t + 1e-3 * rng.random_range(-1.0..1.0))
        .collect();
    let ks_noisy = ks.with_samples(noisy.clone())?;
    let cleaned = project_range(&ks, &noisy)?;
    let e: Vec<f64> = noisy.iter().zip(ks.samples()).map(|(a, b)| a - b).collect();
    let ebar: Vec<f64> = cleaned.iter().zip(ks.samples()).map(|(a, b)| a - b).collect();
    println!(
        "sample error before / after projection onto the range: {:.3e} / {:.3e}",
        weighted_norm_sq(&ks, &e)?.sqrt(),
        weighted_norm_sq(&ks, &ebar)?.sqrt()
    );

    // POCS on noisy samples tends to the same point
    let xn = pseudo_inverse(&ks_noisy, ks_noisy.samples())?;
    for k in [10, 100, 1000] {
        let (_, u) = pocs_run(&ks_noisy, k);
        println!(
            "k = {k:4}: distance to pseudo-inverse {:.3e}",
            u.distance_sq(&xn).sqrt()
        );
    }
    Ok(())
}
