//! Demographic rates and fluctuation statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::migration::Community;

/// Net growth rate with the symmetric-mean denominator. `0/0` is 0.
pub fn ngr(p0: usize, p1: usize) -> f64 {
    if p0 == 0 && p1 == 0 {
        return 0.0;
    }
    let (p0, p1) = (p0 as f64, p1 as f64);
    (p1 - p0) / (0.5 * (p1 + p0))
}

/// Net migration rate relative to the base period. Undefined (`None`) when
/// a community grows from zero; `0/0` is 0.
pub fn nmr(p0: usize, p1: usize) -> Option<f64> {
    match (p0, p1) {
        (0, 0) => Some(0.0),
        (0, _) => None,
        _ => Some((p1 as f64 - p0 as f64) / p0 as f64),
    }
}

/// Per-step population of each community, starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PopulationSeries {
    pub counts: Vec<[usize; 2]>,
}

impl PopulationSeries {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn of(&self, c: Community) -> Vec<usize> {
        self.counts.iter().map(|p| p[c.index()]).collect()
    }

    pub fn is_conserved(&self, n: usize) -> bool {
        self.counts.iter().all(|p| p[0] + p[1] == n)
    }

    /// First step at which some community has no members.
    pub fn first_empty(&self) -> Option<usize> {
        self.counts.iter().position(|p| p[0] == 0 || p[1] == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRecord {
    pub window_start: usize,
    pub community: Community,
    pub ngr: f64,
    pub nmr: Option<f64>,
}

/// Rates between `Popu(t)` and `Popu(t + window)` for `t = 0, window, ...`,
/// as long as `t + window` is inside the series. Records are ordered by
/// window start, then community.
pub fn windowed_rates(series: &PopulationSeries, window: usize) -> Result<Vec<RateRecord>> {
    if window == 0 {
        return Err(Error::param("window", "must be at least 1"));
    }
    let mut out = Vec::new();
    let mut t = 0;
    while t + window < series.len() {
        let (before, after) = (series.counts[t], series.counts[t + window]);
        for c in Community::ALL {
            let (p0, p1) = (before[c.index()], after[c.index()]);
            out.push(RateRecord {
                window_start: t,
                community: c,
                ngr: ngr(p0, p1),
                nmr: nmr(p0, p1),
            });
        }
        t += window;
    }
    Ok(out)
}

/// `max - min` of `values[burn_in..]`.
pub fn fluctuation_range(values: &[f64], burn_in: usize) -> Result<f64> {
    if values.len() <= burn_in {
        return Err(Error::TooShort {
            needed: burn_in,
            got: values.len(),
        });
    }
    let tail = &values[burn_in..];
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(hi - lo)
}

/// Default burn-in for [`fluctuation_range`]: half the horizon.
pub fn default_burn_in(horizon: usize) -> usize {
    horizon / 2
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Sample standard deviation (`n - 1` denominator).
pub fn sample_std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Median of optional times where `None` ranks above every value. The
/// result is `None` when the median position falls on a `None`.
pub fn median_time(times: &[Option<usize>]) -> Option<f64> {
    if times.is_empty() {
        return None;
    }
    let mut v = times.to_vec();
    v.sort_by(|a, b| match (a, b) {
        (Some(x), Some(y)) => x.cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m].map(|x| x as f64)
    } else {
        Some(0.5 * (v[m - 1]? as f64 + v[m]? as f64))
    }
}
