//! Boxplot statistics, dominance rankings and fault-shift analysis.

use serde::Serialize;

use crate::error::Error;
use crate::sim::output::SimOutput;

/// Floor of `|x|` below which buckets are clamped.
pub const ZERO_GUARD: f64 = 1e-300;

/// Boxplot statistics.
///
/// Quartiles interpolate linearly between order statistics: for sorted
/// samples `x_0 ≤ … ≤ x_{n−1}` the p-quantile sits at position `h = (n−1) p`
/// and equals `x_⌊h⌋ + (h − ⌊h⌋)(x_⌈h⌉ − x_⌊h⌋)`. Whiskers reach 1.5 IQR past
/// the quartiles, clamped to the data range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub outliers: Vec<f64>,
}

fn quantile_sorted(x: &[f64], p: f64) -> f64 {
    let h = (x.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    x[lo] + (h - lo as f64) * (x[hi] - x[lo])
}

fn median_sorted(x: &[f64]) -> f64 {
    let n = x.len();
    if n % 2 == 1 {
        x[n / 2]
    } else {
        (x[n / 2 - 1] + x[n / 2]) / 2.0
    }
}

pub fn summarize(samples: &[f64]) -> Result<SummaryStats, Error> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("summary samples"));
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let (q1, q3) = (quantile_sorted(&x, 0.25), quantile_sorted(&x, 0.75));
    let iqr = q3 - q1;
    let (min, max) = (x[0], x[n - 1]);
    let whisker_low = min.max(q1 - 1.5 * iqr);
    let whisker_high = max.min(q3 + 1.5 * iqr);
    let outliers = x.iter().copied().filter(|v| *v < whisker_low || *v > whisker_high).collect();
    Ok(SummaryStats {
        n,
        median: median_sorted(&x),
        q1,
        q3,
        iqr,
        whisker_low,
        whisker_high,
        mean: samples.iter().sum::<f64>() / n as f64,
        min,
        max,
        outliers,
    })
}

/// `⌊log10 max(|x|, 1e-300)⌋`.
pub fn order_of_magnitude(x: f64) -> i32 {
    x.abs().max(ZERO_GUARD).log10().floor() as i32
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankingEntry {
    pub param: String,
    pub median_abs: f64,
    pub bucket: i32,
}

/// Ranks named sample columns by median absolute value, descending. Ties keep
/// the input order, which is the parameter-vector order.
pub fn rank_columns(params: &[String], columns: &[Vec<f64>]) -> Result<Vec<RankingEntry>, Error> {
    if params.len() != columns.len() {
        return Err(Error::Mismatch(format!("{} names for {} columns", params.len(), columns.len())));
    }
    let mut out = params
        .iter()
        .zip(columns)
        .map(|(p, col)| {
            let abs: Vec<f64> = col.iter().map(|v| v.abs()).collect();
            let median_abs = summarize(&abs)?.median;
            Ok(RankingEntry { param: p.clone(), median_abs, bucket: order_of_magnitude(median_abs) })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    out.sort_by(|a, b| b.median_abs.total_cmp(&a.median_abs));
    Ok(out)
}

/// Parameter ranking for one state, pooling every sample of every run.
pub fn dominance_ranking(outputs: &[&SimOutput], state: &str) -> Result<Vec<RankingEntry>, Error> {
    let first = outputs.first().ok_or(Error::Empty)?;
    let params = first.param_names.clone();
    let mut columns = vec![Vec::new(); params.len()];
    for out in outputs {
        if out.param_names != params {
            return Err(Error::Mismatch("runs use different parameter vectors".into()));
        }
        let zs = out.sensitivities.as_ref().ok_or(Error::MissingSensitivity)?;
        let i = out.state_index(state)?;
        for z in zs {
            for (k, col) in columns.iter_mut().enumerate() {
                col.push(z[(i, k)]);
            }
        }
    }
    rank_columns(&params, &columns)
}

/// Magnitude of one sensitivity before and after a fault.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaultShift {
    pub state: String,
    pub param: String,
    /// Start of the compared window [s].
    pub fault_time: f64,
    pub nominal_mean: f64,
    pub nominal_max: f64,
    pub faulted_mean: f64,
    pub faulted_max: f64,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub nominal_bucket: i32,
    pub faulted_bucket: i32,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

/// Compares `|Z_{state,param}|` of both runs from the fault onset on (the
/// faulted run's first activation, or the start if it logged none).
pub fn fault_shift_report(nominal: &SimOutput, faulted: &SimOutput, state: &str, param: &str) -> Result<FaultShift, Error> {
    if nominal.time != faulted.time {
        return Err(Error::Mismatch("runs do not share a time grid".into()));
    }
    let fault_time = faulted.fault_time().unwrap_or(0.0);
    let window = |out: &SimOutput| -> Result<(f64, f64), Error> {
        let z = out.z_series(state, param)?;
        let v: Vec<f64> = out.time.iter().zip(&z).filter(|(t, _)| **t >= fault_time).map(|(_, z)| z.abs()).collect();
        if v.is_empty() {
            return Err(Error::Empty);
        }
        Ok((v.iter().sum::<f64>() / v.len() as f64, v.iter().copied().fold(0.0, f64::max)))
    };
    let (nominal_mean, nominal_max) = window(nominal)?;
    let (faulted_mean, faulted_max) = window(faulted)?;
    Ok(FaultShift {
        state: state.to_string(),
        param: param.to_string(),
        fault_time,
        nominal_mean,
        nominal_max,
        faulted_mean,
        faulted_max,
        mean_ratio: ratio(faulted_mean, nominal_mean),
        max_ratio: ratio(faulted_max, nominal_max),
        nominal_bucket: order_of_magnitude(nominal_mean),
        faulted_bucket: order_of_magnitude(faulted_mean),
    })
}
