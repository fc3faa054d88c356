//! Effect of rounding firing times to a grid of 2^-b Nyquist periods.

use lifpocs::kernel::KernelSystem;
use lifpocs::lif::{calibrate_threshold, encode, quantize_times, LifParams, Polarity};
use lifpocs::pocs::pseudo_inverse;
use lifpocs::signal::{random_bandlimited, ratio_db, TimeGrid};

fn main() -> lifpocs::Result<()> {
    let period = 61;
    let x = random_bandlimited(period, 0.7, 4)?;
    let probe = LifParams::new(0.03, 1.0, 1.0, Polarity::Unipolar)?;
    let params = probe.with_threshold(calibrate_threshold(std::slice::from_ref(&x), &probe, 2.0)?)?;
    let train = encode(&x, &params, TimeGrid::with_default(period)?)?;

    for bits in 4..=10 {
        let ks = KernelSystem::build(&quantize_times(&train, bits), &params)?;
        let err = pseudo_inverse(&ks, ks.samples())?.distance_sq(&x);
        println!("b = {bits:2}: {:7.2} dB", ratio_db(err, x.norm_sq())?);
    }
    Ok(())
}
