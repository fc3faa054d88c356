//! Sampling kernels of a spike train: Gram matrix and sampling operator.

use lifpocs::kernel::{gram_entry, KernelSystem};
use lifpocs::lif::{encode, LifParams, Polarity};
use lifpocs::signal::{random_bandlimited, TimeGrid};

fn main() -> lifpocs::Result<()> {
    let period = 21;
    let x = random_bandlimited(period, 0.7, 3)?;
    let params = LifParams::new(0.5, 0.0, 0.25, Polarity::Bipolar)?;
    let train = encode(&x, &params, TimeGrid::with_default(period)?)?;
    let ks = KernelSystem::build(&train, &params)?;
    println!("{} kernels over a period of {period}", ks.len());

    let g = ks.gram();
    let (m, n) = (2, 5);
    let parseval = ks.filtered(m).inner_product(ks.filtered(n))? / ks.norms_sq()[m];
    println!(
        "H[{m}][{n}] = {:.12} (closed form {:.12}, Parseval {parseval:.12})",
        g[(m, n)],
        gram_entry(m, n, &ks)? / ks.norms_sq()[m]
    );

    // H x reproduces the encoder's samples
    let gap = ks
        .apply(&x)
        .iter()
        .zip(ks.samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max |Hx - theta| = {gap:.2e}");

    let path = std::env::temp_dir().join("lifpocs_gram.csv");
    ks.write_gram_csv(std::fs::File::create(&path)?)?;
    println!("Gram matrix written to {}", path.display());
    Ok(())
}
