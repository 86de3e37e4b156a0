//! Line charts of cumulative regret and violation drawn from a results file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use plotters::prelude::*;

use crate::experiment::{read_results, Row};

pub const REGRET_CHART: &str = "regret.svg";
pub const VIOLATION_CHART: &str = "violation.svg";

const SIZE: (u32, u32) = (900, 560);
const PALETTE: [RGBColor; 4] = [
    RGBColor(0x1f, 0x77, 0xb4),
    RGBColor(0xd6, 0x27, 0x28),
    RGBColor(0x2c, 0xa0, 0x2c),
    RGBColor(0xff, 0x7f, 0x0e),
];

type Series = Vec<(String, Vec<(f64, f64)>)>;

fn series(rows: &[Row], value: impl Fn(&Row) -> f64) -> Series {
    let mut first_seen: Vec<String> = Vec::new();
    let mut map: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        if !map.contains_key(&r.algorithm) {
            first_seen.push(r.algorithm.clone());
        }
        map.entry(r.algorithm.clone()).or_default().push((r.t as f64, value(r)));
    }
    first_seen
        .into_iter()
        .map(|name| {
            let pts = map.remove(&name).unwrap_or_default();
            (name, pts)
        })
        .collect()
}

fn draw(path: &Path, title: &str, y_label: &str, data: &Series) -> anyhow::Result<()> {
    let pts = data.iter().flat_map(|(_, p)| p.iter());
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        if !y.is_finite() {
            return Err(anyhow!("{title}: non-finite value at t = {x}"));
        }
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !x_lo.is_finite() {
        return Err(anyhow!("{title}: no data"));
    }
    if x_hi <= x_lo {
        x_hi = x_lo + 1.0;
    }

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE)?;
    let mut builder = ChartBuilder::on(&root);
    builder
        .caption(title, ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(80);

    // Log scale when the data are positive and span several decades.
    if y_lo > 0.0 && y_hi / y_lo > 1e3 {
        let mut chart = builder.build_cartesian_2d(x_lo..x_hi, (y_lo..y_hi * 1.5).log_scale())?;
        chart
            .configure_mesh()
            .x_desc("round t")
            .y_desc(y_label)
            .y_label_formatter(&|v| format!("{v:.0e}"))
            .draw()?;
        for (i, (name, p)) in data.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            chart
                .draw_series(LineSeries::new(p.iter().copied(), color.stroke_width(2)))?
                .label(name.as_str())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart.configure_series_labels().border_style(BLACK).background_style(WHITE).draw()?;
    } else {
        let pad = if y_hi > y_lo { 0.05 * (y_hi - y_lo) } else { 1.0 };
        let mut chart = builder.build_cartesian_2d(x_lo..x_hi, (y_lo - pad)..(y_hi + pad))?;
        chart
            .configure_mesh()
            .x_desc("round t")
            .y_desc(y_label)
            .y_label_formatter(&|v| format!("{v:.3e}"))
            .draw()?;
        for (i, (name, p)) in data.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            chart
                .draw_series(LineSeries::new(p.iter().copied(), color.stroke_width(2)))?
                .label(name.as_str())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        }
        chart.configure_series_labels().border_style(BLACK).background_style(WHITE).draw()?;
    }
    root.present().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes the regret and violation charts for `results` into `out_dir`.
pub fn plot_results(results: &Path, out_dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let rows = read_results(results)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let regret = out_dir.join(REGRET_CHART);
    let violation = out_dir.join(VIOLATION_CHART);
    draw(&regret, "Cumulative dynamic regret", "regret", &series(&rows, |r| r.cum_regret))?;
    draw(&violation, "Cumulative constraint violation", "violation", &series(&rows, |r| r.cum_violation))?;
    Ok(vec![regret, violation])
}
