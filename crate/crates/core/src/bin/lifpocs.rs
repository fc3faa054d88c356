use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use lifpocs::experiment::{self, ExperimentConfig, ExperimentKind};
use lifpocs::kernel::KernelSystem;
use lifpocs::lif::{calibrate_threshold, encode, LifParams, Polarity, SpikeTrain};
use lifpocs::pocs::{pocs_run, pseudo_inverse, PocsState};
use lifpocs::reconstruct::{feichtinger_estimate, lazar_iterate, naive_estimate, WienerFilter};
use lifpocs::signal::{mse_db, PeriodicBandlimitedSignal, TimeGrid};
use lifpocs::{Error, Result};

#[derive(Parser)]
#[command(
    name = "lifpocs",
    version,
    about = "LIF encoding and POCS reconstruction of periodic bandlimited signals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Pocs,
    Pinv,
    Naive,
    Feichtinger,
    Wiener,
    Lazar,
}

#[derive(clap::Args)]
struct Encoder {
    /// Leakage rate.
    #[arg(long, default_value_t = 0.03)]
    alpha: f64,
    /// Constant added to the input before integration.
    #[arg(long, default_value_t = 1.0)]
    offset: f64,
    #[arg(long, value_parser = parse_polarity, default_value = "unipolar")]
    polarity: Polarity,
    /// Firing threshold.
    #[arg(long)]
    threshold: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a signal into a spike train.
    Encode {
        /// Signal JSON; a random input is drawn when absent.
        #[arg(long)]
        signal: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 61)]
        period: usize,
        #[arg(long, default_value_t = 0.7)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.03)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        offset: f64,
        #[arg(long, value_parser = parse_polarity, default_value = "unipolar")]
        polarity: Polarity,
        /// Firing threshold; calibrated from --density when absent.
        #[arg(long)]
        threshold: Option<f64>,
        /// Target spikes per Nyquist period.
        #[arg(long, default_value_t = 1.5)]
        density: f64,
        /// Spike train output (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the input signal as JSON.
        #[arg(long)]
        signal_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Reconstruct a signal from a spike train.
    Reconstruct {
        /// Spike train as JSON, or CSV with --period.
        #[arg(long)]
        spikes: PathBuf,
        #[arg(long)]
        period: Option<usize>,
        #[command(flatten)]
        encoder: Encoder,
        #[arg(long, value_enum, default_value_t = Method::Pocs)]
        method: Method,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
        /// Wiener filter JSON, required by --method wiener.
        #[arg(long)]
        filter: Option<PathBuf>,
        /// Resume the POCS state from this checkpoint if it exists and save it afterwards.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Ground truth signal JSON; prints the MSE in dB.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Signal output (stdout when absent). CSV holds samples on a fine grid.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a seeded Monte Carlo experiment and write its results and plots.
    Experiment {
        #[arg(value_parser = parse_kind)]
        kind: ExperimentKind,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn parse_polarity(s: &str) -> std::result::Result<Polarity, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<ExperimentKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_signal(path: &Path) -> Result<PeriodicBandlimitedSignal> {
    PeriodicBandlimitedSignal::from_json(&std::fs::read_to_string(path)?)
}

fn write_signal(u: &PeriodicBandlimitedSignal, out: Option<&Path>, format: Format) -> Result<()> {
    let mut w = output(out)?;
    match format {
        Format::Json => writeln!(w, "{}", u.to_json()?)?,
        Format::Csv => {
            let grid = TimeGrid::with_default(u.period())?;
            let mut wtr = csv::Writer::from_writer(w);
            wtr.write_record(["t", "value"])?;
            for (t, v) in grid.instants().zip(u.sample_grid(grid.per_period())) {
                wtr.write_record([t.to_string(), v.to_string()])?;
            }
            wtr.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encode {
            signal,
            seed,
            period,
            amplitude,
            alpha,
            offset,
            polarity,
            threshold,
            density,
            out,
            signal_out,
            format,
        } => {
            let x = match &signal {
                Some(p) => read_signal(p)?,
                None => {
                    // same draw as the experiments: unipolar inputs keep x + c positive
                    let floor = match polarity {
                        Polarity::Unipolar => offset,
                        Polarity::Bipolar => f64::INFINITY,
                    };
                    let mut xs = experiment::draw_inputs(period, amplitude, floor, seed, experiment::EVAL_STREAM, 1)?;
                    xs.remove(0)
                }
            };
            let probe = LifParams::new(alpha, offset, threshold.unwrap_or(1.0), polarity)?;
            let params = match threshold {
                Some(_) => probe,
                None => probe.with_threshold(calibrate_threshold(std::slice::from_ref(&x), &probe, density)?)?,
            };
            let train = encode(&x, &params, TimeGrid::with_default(x.period())?)?;
            eprintln!("threshold {} -> {} spikes", params.threshold(), train.len());
            if let Some(p) = signal_out {
                std::fs::write(p, x.to_json()?)?;
            }
            let mut w = output(out.as_deref())?;
            match format {
                Format::Json => writeln!(w, "{}", train.to_json()?)?,
                Format::Csv => train.write_csv(w)?,
            }
        }
        Command::Reconstruct {
            spikes,
            period,
            encoder,
            method,
            iterations,
            filter,
            checkpoint,
            truth,
            out,
            format,
        } => {
            let train = match period {
                Some(t) => SpikeTrain::read_csv(t, File::open(&spikes)?)?,
                None => SpikeTrain::from_json(&std::fs::read_to_string(&spikes)?)?,
            };
            let params = LifParams::new(encoder.alpha, encoder.offset, encoder.threshold, encoder.polarity)?;
            let c = params.offset();
            let u = match method {
                Method::Naive => naive_estimate(&train, params.threshold()).with_offset(-c),
                Method::Feichtinger => {
                    feichtinger_estimate(&train, params.threshold(), params.alpha())?.with_offset(-c)
                }
                Method::Wiener => {
                    let path = filter.ok_or_else(|| Error::Config("--method wiener needs --filter".into()))?;
                    WienerFilter::from_json(&std::fs::read_to_string(path)?)?
                        .apply(&train)?
                        .with_offset(-c)
                }
                Method::Lazar => {
                    let ks = KernelSystem::build(&train, &params)?;
                    let mut u = PeriodicBandlimitedSignal::zero(train.period())?;
                    for _ in 0..iterations {
                        u = lazar_iterate(&ks, &u)?;
                    }
                    u
                }
                Method::Pinv => {
                    let ks = KernelSystem::build(&train, &params)?;
                    pseudo_inverse(&ks, ks.samples())?
                }
                Method::Pocs => {
                    let ks = KernelSystem::build(&train, &params)?;
                    match &checkpoint {
                        Some(p) => {
                            let mut st = match std::fs::read_to_string(p) {
                                Ok(s) => PocsState::from_json(&s, &ks)?,
                                Err(e) if e.kind() == io::ErrorKind::NotFound => PocsState::new(&ks),
                                Err(e) => return Err(e.into()),
                            };
                            st.advance(&ks, iterations)?;
                            std::fs::write(p, st.to_json()?)?;
                            eprintln!("iteration {}, residual {:.3e}", st.iteration(), st.residual_norm(&ks));
                            st.synthesize(&ks)
                        }
                        None => pocs_run(&ks, iterations).1,
                    }
                }
            };
            if let Some(p) = truth {
                let x = read_signal(&p)?;
                eprintln!("mse {:.3} dB", mse_db(&u, &x, x.norm_sq())?);
            }
            write_signal(&u, out.as_deref(), format)?;
        }
        Command::Experiment {
            kind,
            config,
            seed,
            out_dir,
            format,
        } => {
            let mut cfg = match &config {
                Some(p) => ExperimentConfig::load(p, Some(kind))?,
                None => ExperimentConfig::defaults(kind),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let rec = experiment::run(&cfg)?;
            let written = experiment::render_plots(&rec, &out_dir)?;
            if format == Format::Json {
                let path = out_dir.join(format!("{kind}.json"));
                std::fs::write(&path, rec.to_json()?)?;
                println!("{}", path.display());
            }
            for p in written {
                println!("{}", p.display());
            }
            eprintln!("{kind}: {} rows in {:.1} s", rec.results.len(), rec.wall_clock_s);
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = experiment::init_thread_pool() {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
