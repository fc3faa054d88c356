//! One-step estimates from a single spike train: naive, leak-compensated and
//! a Wiener filter trained on a small ensemble.

use lifpocs::experiment::{draw_inputs, EVAL_STREAM, TRAIN_STREAM};
use lifpocs::lif::{calibrate_threshold, encode, encode_all, LifParams, Polarity};
use lifpocs::reconstruct::{feichtinger_estimate, naive_estimate, WienerFilter};
use lifpocs::signal::{ratio_db, TimeGrid};

fn main() -> lifpocs::Result<()> {
    let period = 61;
    let grid = TimeGrid::with_default(period)?;
    let eval = draw_inputs(period, 0.7, 1.0, 5, EVAL_STREAM, 20)?;
    let training = draw_inputs(period, 0.7, 1.0, 5, TRAIN_STREAM, 200)?;

    let probe = LifParams::new(0.5, 1.0, 1.0, Polarity::Unipolar)?;
    let params = probe.with_threshold(calibrate_threshold(&eval, &probe, 1.5)?)?;
    let spikes = encode_all(&training, &params, grid)?;
    let pairs: Vec<_> = training.into_iter().zip(spikes).collect();
    let wiener = WienerFilter::fit(&pairs, &params)?;

    let c = params.offset();
    let mut err = [0.0; 3];
    for x in &eval {
        let s = encode(x, &params, grid)?;
        // the estimators target x + c
        let est = [
            naive_estimate(&s, params.threshold()),
            feichtinger_estimate(&s, params.threshold(), params.alpha())?,
            wiener.apply(&s)?,
        ];
        for (e, u) in err.iter_mut().zip(est) {
            *e += u.with_offset(-c).distance_sq(x);
        }
    }
    let power = eval.iter().map(|x| x.norm_sq()).sum::<f64>();
    for (name, e) in ["naive", "feichtinger", "wiener"].iter().zip(err) {
        println!("{name:12} {:7.2} dB", ratio_db(e, power)?);
    }
    Ok(())
}
