//! Encode a random bandlimited input with a leaky integrate-and-fire neuron.

use lifpocs::lif::{calibrate_threshold, encode, LifParams, Polarity};
use lifpocs::signal::{random_bandlimited, TimeGrid};

fn main() -> lifpocs::Result<()> {
    let period = 61;
    let x = random_bandlimited(period, 0.7, 11)?;
    let probe = LifParams::new(0.2, 1.0, 1.0, Polarity::Unipolar)?;
    let threshold = calibrate_threshold(std::slice::from_ref(&x), &probe, 1.5)?;
    let params = probe.with_threshold(threshold)?;

    let train = encode(&x, &params, TimeGrid::with_default(period)?)?;
    println!(
        "threshold {threshold:.5}, {} spikes, density {:.3}",
        train.len(),
        train.density()
    );

    // every spike carries the same leaky integral of x + c
    let worst = (0..train.len())
        .map(|n| {
            let v = x
                .leaky_antiderivative(params.offset(), train.start_of(n), train.times()[n], params.alpha())
                .unwrap();
            (v - threshold).abs()
        })
        .fold(0.0, f64::max);
    println!("max deviation from threshold {worst:.2e}");
    for (t, s) in train.times().iter().zip(train.signs()).take(5) {
        println!("  t = {t:9.5}  sign {s:+}");
    }
    Ok(())
}
