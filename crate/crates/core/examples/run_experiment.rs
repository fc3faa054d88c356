//! Run a reduced iteration experiment and write its CSV and SVG plots.

use lifpocs::experiment::{self, render_plots, ExperimentConfig};

fn main() -> lifpocs::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(
        "experiment = \"figiter\"\nensemble = 4\ntraining = 50\niterations = 40\npolarities = [\"unipolar\"]\n",
        None,
    )?;
    let record = experiment::run(&cfg)?;
    for arm in experiment::FIGITER_ARMS {
        let name = experiment::arm_name(lifpocs::lif::Polarity::Unipolar, 1.5, arm);
        let trace = record.results.trace(&name);
        println!(
            "{name:36} k=0 {:7.2} dB  k=40 {:7.2} dB",
            trace[0],
            trace[trace.len() - 1]
        );
    }
    let dir = std::env::temp_dir().join("lifpocs_figiter");
    std::fs::create_dir_all(&dir)?;
    render_plots(&record, &dir)?;
    println!("plots in {} ({:.1} s)", dir.display(), record.wall_clock_s);
    Ok(())
}
