//! Energy series bookkeeping, exponential-rate fitting and parameter sweeps.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Sampled `(t, E(t))` with a free-form parameter tag.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    times: Vec<f64>,
    energies: Vec<f64>,
    pub meta: SeriesMeta,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeriesMeta {
    pub system: &'static str,
    pub params: Vec<(&'static str, f64)>,
}

impl EnergySeries {
    /// Times must be strictly increasing and energies finite and non-negative.
    pub fn new(times: Vec<f64>, energies: Vec<f64>, meta: SeriesMeta) -> Result<Self> {
        if times.len() != energies.len() {
            return Err(Error::SampleMismatch {
                expected: times.len(),
                found: energies.len(),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "must be finite and strictly increasing",
            });
        }
        if energies.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "energies",
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self {
            times,
            energies,
            meta,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .copied()
            .zip(self.energies.iter().copied())
    }

    /// Linear interpolation, clamped to the end values outside the sampled range.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let (first, last) = (*self.times.first()?, *self.times.last()?);
        if t <= first {
            return Some(self.energies[0]);
        }
        if t >= last {
            return self.energies.last().copied();
        }
        let i = self.times.partition_point(|&s| s <= t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let (e0, e1) = (self.energies[i - 1], self.energies[i]);
        Some(e0 + (e1 - e0) * (t - t0) / (t1 - t0))
    }
}

/// Least-squares fit of `log E` against `t` on peak-held samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    /// Peak-hold period.
    pub period: f64,
    pub points: usize,
}

/// Per-period maxima `(t_at_max, max)` over `[t_lo, t_hi)`, complete periods only.
pub fn peak_hold(series: &EnergySeries, period: f64, t_lo: f64, t_hi: f64) -> Vec<(f64, f64)> {
    let bins = libm::floor((t_hi - t_lo) / period + 1e-9) as usize;
    let mut peaks: Vec<Option<(f64, f64)>> = alloc::vec![None; bins];
    for (t, e) in series.iter() {
        if t < t_lo {
            continue;
        }
        let b = libm::floor((t - t_lo) / period + 1e-9) as usize;
        if b >= bins {
            break;
        }
        match peaks[b] {
            Some((_, best)) if best >= e => {}
            _ => peaks[b] = Some((t, e)),
        }
    }
    peaks.into_iter().flatten().collect()
}

/// Fits `log E(t) ~ intercept + slope * t` over the second half of the series,
/// holding the maximum of each `period`-long bin.
pub fn fit_decay_rate(series: &EnergySeries, period: f64) -> Result<RateFit> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidParameter {
            name: "period",
            reason: "must be positive",
        });
    }
    let (Some(&t0), Some(&t_end)) = (series.times.first(), series.times.last()) else {
        return Err(Error::SeriesTooShort);
    };
    if series.energies.iter().all(|&e| e == 0.0) {
        return Err(Error::Degenerate);
    }
    if t_end - t0 < 10.0 * period * (1.0 - 1e-9) {
        return Err(Error::SeriesTooShort);
    }
    let t_lo = t0 + 0.5 * (t_end - t0);
    let points: Vec<(f64, f64)> = peak_hold(series, period, t_lo, t_end)
        .into_iter()
        .filter(|&(_, e)| e > 0.0)
        .map(|(t, e)| (t, libm::log(e)))
        .collect();
    if points.len() < 2 {
        return Err(Error::Degenerate);
    }
    let (slope, intercept, r_squared) = least_squares(&points);
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        window: (t_lo, t_end),
        period,
        points: points.len(),
    })
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2.clamp(0.0, 1.0))
}

/// One line of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<(&'static str, f64)>,
    pub stable_predicted: bool,
    /// `rho_a` or `|lambda_2|`.
    pub spectral_radius: f64,
    pub predicted_slope: f64,
    pub fitted_slope: f64,
    pub r_squared: f64,
    pub agreement: bool,
}

impl SweepRow {
    pub fn stable_observed(&self) -> bool {
        self.fitted_slope < 0.0
    }
}

/// Runs `runner` at every grid point. Failures are kept per row.
pub fn sweep<P, E, F>(grid: &[P], runner: F) -> Vec<core::result::Result<SweepRow, E>>
where
    F: FnMut(&P) -> core::result::Result<SweepRow, E>,
{
    grid.iter().map(runner).collect()
}

/// Prediction and observation agree in sign, and for stable points with a
/// finite prediction the fitted slope lies within `rel_tol` of it.
pub fn slopes_agree(stable_predicted: bool, predicted: f64, fitted: f64, rel_tol: f64) -> bool {
    if stable_predicted != (fitted < 0.0) {
        return false;
    }
    if stable_predicted && predicted.is_finite() {
        return (fitted - predicted).abs() <= rel_tol * predicted.abs();
    }
    true
}

/// `lo:hi:step` expanded to `lo + i * step` for every value not past `hi`.
pub fn range_values(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(Error::InvalidParameter {
            name: "range",
            reason: "expected lo <= hi and a positive step",
        });
    }
    let count = libm::floor((hi - lo) / step + 1e-9) as usize;
    Ok((0..=count).map(|i| lo + i as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn synthetic(rate: f64, t_end: f64, dt: f64) -> EnergySeries {
        let n = libm::round(t_end / dt) as usize;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let energies = times.iter().map(|t| libm::exp(rate * t)).collect();
        EnergySeries::new(times, energies, SeriesMeta::default()).unwrap()
    }

    #[test]
    fn exact_exponential_is_recovered() {
        let s = synthetic(-0.5, 40.0, 0.01);
        for period in [0.1, 1.0, 2.0, 3.7] {
            let fit = fit_decay_rate(&s, period).unwrap();
            assert!(
                (fit.slope + 0.5).abs() < 1e-9,
                "period {period}: {}",
                fit.slope
            );
            assert!(fit.r_squared > 1.0 - 1e-12);
        }
    }

    #[test]
    fn degenerate_and_short_series() {
        let times: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let zeros =
            EnergySeries::new(times.clone(), vec![0.0; 100], SeriesMeta::default()).unwrap();
        assert_eq!(fit_decay_rate(&zeros, 1.0), Err(Error::Degenerate));
        let s = synthetic(-1.0, 5.0, 0.1);
        assert_eq!(fit_decay_rate(&s, 1.0), Err(Error::SeriesTooShort));
    }

    #[test]
    fn oscillating_envelope_is_tracked() {
        let times: Vec<f64> = (0..=20000).map(|i| i as f64 * 0.005).collect();
        let energies = times
            .iter()
            .map(|&t| libm::exp(-0.3 * t) * (1.5 + libm::cos(2.0 * core::f64::consts::PI * t)))
            .collect();
        let s = EnergySeries::new(times, energies, SeriesMeta::default()).unwrap();
        let fit = fit_decay_rate(&s, 1.0).unwrap();
        assert!((fit.slope + 0.3).abs() < 0.01, "{}", fit.slope);
    }

    #[test]
    fn series_validation() {
        let meta = SeriesMeta::default;
        assert!(EnergySeries::new(vec![0.0, 0.0], vec![1.0, 1.0], meta()).is_err());
        assert!(EnergySeries::new(vec![0.0, 1.0], vec![1.0, -1.0], meta()).is_err());
        assert!(EnergySeries::new(vec![0.0, 1.0], vec![1.0], meta()).is_err());
        let s = EnergySeries::new(vec![0.0, 1.0], vec![1.0, 3.0], meta()).unwrap();
        assert_eq!(s.value_at(0.5), Some(2.0));
        assert_eq!(s.value_at(-1.0), Some(1.0));
        assert_eq!(s.value_at(9.0), Some(3.0));
    }

    #[test]
    fn empty_sweep() {
        let grid: [f64; 0] = [];
        assert!(sweep(&grid, |_| Err(Error::Degenerate)).is_empty());
    }

    #[test]
    fn sweep_keeps_going_after_errors() {
        let rows = sweep(&[1.0, -1.0, 2.0], |&x| {
            if x < 0.0 {
                Err(Error::Degenerate)
            } else {
                Ok(SweepRow {
                    params: vec![("x", x)],
                    stable_predicted: true,
                    spectral_radius: 0.5,
                    predicted_slope: -x,
                    fitted_slope: -x,
                    r_squared: 1.0,
                    agreement: true,
                })
            }
        });
        assert_eq!(rows.len(), 3);
        assert!(rows[0].is_ok() && rows[1].is_err() && rows[2].is_ok());
    }

    #[test]
    fn ranges() {
        let r = range_values(-4.0, 4.0, 0.1).unwrap();
        assert_eq!(r.len(), 81);
        assert!((r[80] - 4.0).abs() < 1e-12);
        assert!(range_values(1.0, 0.0, 0.1).is_err());
        assert!(range_values(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn agreement_rule() {
        assert!(slopes_agree(true, -0.5, -0.52, 0.1));
        assert!(!slopes_agree(true, -0.5, -0.7, 0.1));
        assert!(!slopes_agree(true, -0.5, 0.1, 0.1));
        assert!(slopes_agree(false, 0.5, 0.3, 0.1));
        assert!(slopes_agree(true, f64::NEG_INFINITY, -3.0, 0.1));
    }
}
