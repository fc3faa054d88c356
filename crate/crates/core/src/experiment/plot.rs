use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::{ExperimentKind, ExperimentRecord, Rows};
use crate::error::{Error, Result};
use crate::lif::Polarity;

const SIZE: (u32, u32) = (800, 520);

const COLORS: [RGBColor; 8] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
    RGBColor(23, 190, 207),
];

struct Line {
    label: String,
    points: Vec<(f64, f64)>,
    dashed: bool,
}

fn plot_err<E: std::fmt::Display>(e: E) -> Error {
    Error::Plot(e.to_string())
}

fn draw(title: &str, x_desc: &str, log_x: bool, lines: &[Line]) -> Result<String> {
    let pts = lines.iter().flat_map(|l| l.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return Err(Error::Plot(format!("nothing to draw for {title}")));
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let pad = ((y1 - y0) * 0.05).max(1.0);
    let (y0, y1) = (y0 - pad, y1 + pad);

    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, SIZE).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut builder = ChartBuilder::on(&root);
        builder
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(56);
        if log_x {
            let mut chart = builder
                .build_cartesian_2d((x0 * 0.9..x1 * 1.1).log_scale(), y0..y1)
                .map_err(plot_err)?;
            chart
                .configure_mesh()
                .x_desc(x_desc)
                .y_desc("MSE (dB)")
                .draw()
                .map_err(plot_err)?;
            series(&mut chart, lines)?;
        } else {
            let mut chart = builder.build_cartesian_2d(x0..x1, y0..y1).map_err(plot_err)?;
            chart
                .configure_mesh()
                .x_desc(x_desc)
                .y_desc("MSE (dB)")
                .draw()
                .map_err(plot_err)?;
            series(&mut chart, lines)?;
        }
        root.present().map_err(plot_err)?;
    }
    Ok(svg)
}

fn series<'a, X>(
    chart: &mut ChartContext<'a, SVGBackend<'a>, Cartesian2d<X, plotters::coord::types::RangedCoordf64>>,
    lines: &[Line],
) -> Result<()>
where
    X: Ranged<ValueType = f64>,
{
    for (i, line) in lines.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let style = color.stroke_width(2);
        let anno = if line.dashed {
            chart
                .draw_series(DashedLineSeries::new(line.points.iter().copied(), 8, 5, style))
                .map_err(plot_err)?
        } else {
            chart
                .draw_series(LineSeries::new(line.points.iter().copied(), style))
                .map_err(plot_err)?
        };
        anno.label(line.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .position(SeriesLabelPosition::UpperRight)
        .draw()
        .map_err(plot_err)?;
    Ok(())
}

/// Renders the figures of one experiment from its rows. Returns `(name, svg)`
/// pairs; the output depends only on the rows.
pub fn render_svg(kind: ExperimentKind, rows: &Rows) -> Result<Vec<(String, String)>> {
    match (kind, rows) {
        (ExperimentKind::Fig1, Rows::Fig1(rows)) => {
            let mut out = Vec::new();
            for polarity in [Polarity::Unipolar, Polarity::Bipolar] {
                let mut by_method: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
                for r in rows.iter().filter(|r| r.polarity == polarity) {
                    by_method
                        .entry(r.method.as_str())
                        .or_default()
                        .push((r.alpha, r.mse_db));
                }
                if by_method.is_empty() {
                    continue;
                }
                let lines: Vec<Line> = by_method
                    .into_iter()
                    .map(|(m, mut points)| {
                        points.sort_by(|a, b| a.0.total_cmp(&b.0));
                        Line {
                            label: m.to_string(),
                            points,
                            dashed: false,
                        }
                    })
                    .collect();
                let svg = draw(
                    &format!("One-step estimates, {polarity}"),
                    "leakage alpha",
                    true,
                    &lines,
                )?;
                out.push((format!("fig1_{polarity}"), svg));
            }
            Ok(out)
        }
        (ExperimentKind::FigIter | ExperimentKind::Quant, Rows::Trace(rows)) => {
            // group = "<polarity>/alpha=<a>", line = the rest of the arm name
            let mut groups: BTreeMap<String, Vec<(String, Vec<(f64, f64)>)>> = BTreeMap::new();
            for r in rows {
                let mut parts = r.arm.splitn(3, '/');
                let group = match (parts.next(), parts.next()) {
                    (Some(a), Some(b)) => format!("{a}/{b}"),
                    _ => String::from("all"),
                };
                let line = parts.next().unwrap_or(&r.arm).to_string();
                let entry = groups.entry(group).or_default();
                match entry.iter_mut().find(|(l, _)| *l == line) {
                    Some((_, pts)) => pts.push((r.k as f64, r.mse_db)),
                    None => entry.push((line, vec![(r.k as f64, r.mse_db)])),
                }
            }
            let mut out = Vec::new();
            for (group, lines) in groups {
                let lines: Vec<Line> = lines
                    .into_iter()
                    .map(|(label, points)| Line {
                        dashed: label.ends_with("pinv"),
                        label,
                        points,
                    })
                    .collect();
                let title = match kind {
                    ExperimentKind::Quant => format!("Time quantization, {group}"),
                    _ => format!("Iterative reconstruction, {group}"),
                };
                let svg = draw(&title, "iteration k", false, &lines)?;
                let stem = group.replace(['/', '='], "_");
                out.push((format!("{kind}_{stem}"), svg));
            }
            Ok(out)
        }
        _ => Err(Error::Plot(format!("rows do not belong to a {kind} experiment"))),
    }
}

/// Writes `<kind>.csv` and one SVG per figure into `out_dir`.
pub fn render_plots(rec: &ExperimentRecord, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let kind = rec.config.experiment;
    let mut written = Vec::new();
    let csv_path = out_dir.join(format!("{kind}.csv"));
    rec.results.write_csv(std::fs::File::create(&csv_path)?)?;
    written.push(csv_path);
    for (name, svg) in render_svg(kind, &rec.results)? {
        let path = out_dir.join(format!("{name}.svg"));
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}
