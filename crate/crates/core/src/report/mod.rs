//! Statistics over sensitivity traces and plot emission.

pub mod stats;
pub mod svg;

use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::sim::experiments::FaultSweep;
use crate::sim::output::SimOutput;

pub use stats::{
    dominance_ranking, fault_shift_report, order_of_magnitude, rank_columns, summarize, FaultShift,
    RankingEntry, SummaryStats,
};
pub use svg::{boxplot_svg, timeseries_svg, write_svg, BoxGroup, Panel, Series};

/// Boxplots of `|Z_{state, p}|` for each parameter `p`, pooled over runs.
pub fn sensitivity_boxplot(outputs: &[&SimOutput], state: &str, params: &[&str]) -> Result<String, Error> {
    let mut groups = Vec::with_capacity(params.len());
    for p in params {
        let mut v = Vec::new();
        for out in outputs {
            v.extend(out.z_series(state, p)?.into_iter().map(f64::abs));
        }
        groups.push(BoxGroup { label: (*p).to_string(), stats: summarize(&v)? });
    }
    Ok(boxplot_svg(&format!("|Z| of {state}"), &format!("|d {state} / d p|"), &groups))
}

/// Two panels: the state and one of its sensitivities, nominal against
/// faulted, with the fault onset marked.
pub fn fault_figure(sweep: &FaultSweep, state: &str, param: &str) -> Result<String, Error> {
    let series = |label: &str, out: &SimOutput, y: Vec<f64>| Series { label: label.into(), t: out.time.clone(), y };
    let panels = [
        Panel {
            title: state.to_string(),
            y_label: state.to_string(),
            series: vec![
                series("nominal", &sweep.nominal, sweep.nominal.state_series(state)?),
                series("fault", &sweep.faulted, sweep.faulted.state_series(state)?),
            ],
        },
        Panel {
            title: format!("Z {state} / {param}"),
            y_label: format!("d {state} / d {param}"),
            series: vec![
                series("nominal", &sweep.nominal, sweep.nominal.z_series(state, param)?),
                series("fault", &sweep.faulted, sweep.faulted.z_series(state, param)?),
            ],
        },
    ];
    Ok(timeseries_svg("nominal vs fault", &panels, sweep.faulted.fault_time()))
}

/// Writes `svg` to `dir/name`, returning the path.
pub fn emit(dir: &Path, name: &str, svg: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    write_svg(&path, svg)?;
    Ok(path)
}
