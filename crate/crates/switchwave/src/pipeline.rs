//! Simulate, fit and summarise. Each function is one CLI subcommand minus
//! the argument parsing and file writing.

use anyhow::{bail, Context};
use switchwave_core::analysis::{range_values, slopes_agree, sweep};
use switchwave_core::fd::{
    delayed_window_bound_check, fd_cross_validate, measure_contraction, BoundCheck, CrossParams,
    CrossReport, FdConfig, FdSolver, Scheme,
};
use switchwave_core::spectral::{
    boundary_ordering_predicate, boundary_report, pointwise_report, SpectralReport,
};
use switchwave_core::{
    fit_decay_rate, BoundaryState, EnergySeries, Error, Grid, InitialData, PointwiseState, Preset,
    RateFit, SweepRow,
};

use crate::io::{finite, Summary};

/// Relative slope tolerance when judging agreement in pointwise sweeps.
pub const POINTWISE_TOLERANCE: f64 = 0.10;
/// Same for the boundary system, whose energy is piecewise constant on long windows.
pub const BOUNDARY_TOLERANCE: f64 = 0.15;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub series: EnergySeries,
    pub fit: Option<RateFit>,
    pub summary: Summary,
}

/// A fit that fails because the energy reached exactly zero counts as decay.
/// Series shorter than ten periods are reported without a fit.
fn fit_or_extinct(
    series: &EnergySeries,
    period: f64,
) -> anyhow::Result<(Option<RateFit>, Option<bool>)> {
    match fit_decay_rate(series, period) {
        Ok(fit) => Ok((Some(fit), Some(fit.slope < 0.0))),
        Err(Error::Degenerate) => {
            let e = series.energies();
            let extinct = e.first().is_some_and(|&e0| e0 > 0.0) && e.last() == Some(&0.0);
            Ok((None, Some(extinct)))
        }
        Err(Error::SeriesTooShort) => Ok((None, None)),
        Err(err) => Err(err.into()),
    }
}

fn fill(
    summary: &mut Summary,
    report: &SpectralReport,
    fit: Option<RateFit>,
    observed: Option<bool>,
) {
    summary.spectral_radius = finite(report.spectral_radius);
    summary.predicted_slope = finite(report.predicted_energy_slope);
    summary.stable_predicted = Some(report.stable);
    summary.fitted_slope = fit.map(|f| f.slope);
    summary.r_squared = fit.map(|f| f.r_squared);
    summary.stable_observed = observed;
}

pub fn check_xi(ell: f64, xi: Option<f64>) -> anyhow::Result<()> {
    if let Some(xi) = xi {
        if (xi - 0.5 * ell).abs() > 1e-12 * ell.abs().max(1.0) {
            bail!("--xi must equal ell/2 = {} (got {xi})", 0.5 * ell);
        }
    }
    Ok(())
}

pub fn simulate_pointwise(
    ell: f64,
    n_per_half: usize,
    a: f64,
    preset: Preset,
    t_max: f64,
) -> anyhow::Result<Outcome> {
    if !a.is_finite() {
        bail!("--a must be finite");
    }
    let grid = Grid::new(ell, n_per_half)?;
    let data = InitialData::preset(preset, &grid);
    let series = PointwiseState::new(&data, grid, a)?.energy_series(t_max, 1)?;
    let report = pointwise_report(a, ell);
    let (fit, observed) = fit_or_extinct(&series, ell)?;
    let mut summary = Summary::new("pointwise", &[("ell", ell), ("a", a), ("xi", 0.5 * ell)]);
    fill(&mut summary, &report, fit, observed);
    Ok(Outcome {
        series,
        fit,
        summary,
    })
}

pub fn simulate_boundary(
    ell: f64,
    n_per_half: usize,
    mu1: f64,
    mu2: f64,
    preset: Preset,
    t_max: f64,
) -> anyhow::Result<Outcome> {
    if !(mu1.is_finite() && mu2.is_finite()) {
        bail!("--mu1 and --mu2 must be finite");
    }
    let grid = Grid::new(ell, n_per_half)?;
    let data = InitialData::preset(preset, &grid);
    let report = boundary_report(mu1, mu2, ell)?;
    let series = BoundaryState::new(&data, grid, mu1, mu2)?.energy_series(t_max, 1)?;
    let (fit, observed) = fit_or_extinct(&series, 4.0 * ell)?;
    let mut summary = Summary::new("boundary", &[("ell", ell), ("mu1", mu1), ("mu2", mu2)]);
    fill(&mut summary, &report, fit, observed);
    Ok(Outcome {
        series,
        fit,
        summary,
    })
}

#[derive(Debug, Clone)]
pub struct InternalOutcome {
    pub outcome: Outcome,
    /// `E(T*) / E(0)` without the delayed term.
    pub alpha: f64,
    pub bound: BoundCheck,
}

/// The switched internal-damping scheme. `spectral_radius` in the summary
/// is the per-period contraction `alpha (1 + |b2| tau)^2`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_internal(
    length: f64,
    nx: usize,
    b1: f64,
    b2: f64,
    tau: f64,
    t_star: f64,
    preset: Preset,
    t_max: f64,
) -> anyhow::Result<InternalOutcome> {
    let scheme = Scheme::Internal {
        b1,
        b2,
        tau,
        t_star,
    };
    let config = FdConfig::new(scheme, length, nx, t_max, preset)?;
    let alpha = measure_contraction(&config).context("measuring the contraction factor")?;
    let series = FdSolver::new(config)?.run()?;
    let bound = delayed_window_bound_check(&series, alpha, b2, tau, t_star, 0.05)?;
    let period = t_star + tau;
    let (fit, observed) = fit_or_extinct(&series, period)?;

    let mut summary = Summary::new(
        "internal",
        &[
            ("length", length),
            ("b1", b1),
            ("b2", b2),
            ("tau", tau),
            ("tstar", t_star),
            ("alpha", alpha),
            ("b2_threshold", (1.0 - alpha.sqrt()) / (alpha.sqrt() * tau)),
        ],
    );
    summary.spectral_radius = finite(bound.alpha_tilde);
    summary.predicted_slope = finite(bound.alpha_tilde.ln() / period);
    summary.stable_predicted = Some(bound.alpha_tilde < 1.0);
    summary.fitted_slope = fit.map(|f| f.slope);
    summary.r_squared = fit.map(|f| f.r_squared);
    summary.stable_observed = observed;
    Ok(InternalOutcome {
        outcome: Outcome {
            series,
            fit,
            summary,
        },
        alpha,
        bound,
    })
}

/// Spectral prediction only, no simulation.
pub fn predict_pointwise(ell: f64, a: f64) -> Summary {
    let report = pointwise_report(a, ell);
    let mut summary = Summary::new("pointwise", &[("ell", ell), ("a", a)]);
    summary.spectral_radius = finite(report.spectral_radius);
    summary.predicted_slope = finite(report.predicted_energy_slope);
    summary.stable_predicted = Some(report.stable);
    summary
}

pub fn predict_boundary(ell: f64, mu1: f64, mu2: f64) -> anyhow::Result<Summary> {
    let report = boundary_report(mu1, mu2, ell)?;
    let mut summary = Summary::new("boundary", &[("ell", ell), ("mu1", mu1), ("mu2", mu2)]);
    summary.spectral_radius = finite(report.spectral_radius);
    summary.predicted_slope = finite(report.predicted_energy_slope);
    summary.stable_predicted = Some(report.stable);
    Ok(summary)
}

fn row_from(outcome: &Outcome, params: Vec<(&'static str, f64)>, tol: f64) -> SweepRow {
    let s = &outcome.summary;
    let stable_predicted = s.stable_predicted.unwrap_or(false);
    let predicted = s.predicted_slope.unwrap_or(f64::NEG_INFINITY);
    let fitted = match outcome.fit {
        Some(f) => f.slope,
        None if s.stable_observed == Some(true) => f64::NEG_INFINITY,
        None => f64::NAN,
    };
    SweepRow {
        params,
        stable_predicted,
        spectral_radius: s.spectral_radius.unwrap_or(0.0),
        predicted_slope: predicted,
        fitted_slope: fitted,
        r_squared: outcome.fit.map_or(f64::NAN, |f| f.r_squared),
        agreement: slopes_agree(stable_predicted, predicted, fitted, tol),
    }
}

pub fn sweep_pointwise(
    ell: f64,
    n_per_half: usize,
    a_values: &[f64],
    preset: Preset,
    t_max: f64,
) -> Vec<anyhow::Result<SweepRow>> {
    sweep(a_values, |&a| {
        simulate_pointwise(ell, n_per_half, a, preset, t_max)
            .map(|o| row_from(&o, vec![("a", a)], POINTWISE_TOLERANCE))
    })
}

pub fn sweep_boundary(
    ell: f64,
    n_per_half: usize,
    points: &[(f64, f64)],
    preset: Preset,
    t_max: f64,
) -> Vec<anyhow::Result<SweepRow>> {
    sweep(points, |&(mu1, mu2)| {
        simulate_boundary(ell, n_per_half, mu1, mu2, preset, t_max)
            .map(|o| row_from(&o, vec![("mu1", mu1), ("mu2", mu2)], BOUNDARY_TOLERANCE))
    })
}

/// One grid point of a stability-region scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionRow {
    pub x: f64,
    pub y: Option<f64>,
    pub radius: f64,
    pub stable: bool,
    /// Closed-form predicate; `None` when the point sits on an excluded line.
    pub predicate: Option<bool>,
}

impl RegionRow {
    pub fn agrees(&self) -> bool {
        self.predicate.is_none_or(|p| p == self.stable)
    }
}

pub fn parse_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        bail!("range `{text}` must look like lo:hi:step");
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .with_context(|| format!("bad number `{s}` in range `{text}`"))
    };
    Ok(range_values(parse(lo)?, parse(hi)?, parse(step)?)?)
}

pub fn pointwise_region(a_values: &[f64], eps: f64) -> Vec<RegionRow> {
    a_values
        .iter()
        .map(|&a| {
            let report = pointwise_report(a, 1.0);
            let excluded = a.abs() < eps || (a - 2.0).abs() < eps;
            RegionRow {
                x: a,
                y: None,
                radius: report.spectral_radius,
                stable: report.stable,
                predicate: (!excluded).then_some(0.0 < a && a < 2.0),
            }
        })
        .collect()
}

pub fn boundary_region(mu1s: &[f64], mu2s: &[f64], eps: f64) -> anyhow::Result<Vec<RegionRow>> {
    let mut rows = Vec::with_capacity(mu1s.len() * mu2s.len());
    for &mu1 in mu1s {
        for &mu2 in mu2s {
            if (mu1 - 1.0).abs() < eps {
                continue;
            }
            let report = boundary_report(mu1, mu2, 1.0)?;
            let on_edge = (mu2 - 1.0).abs() < eps || (mu2 - mu1).abs() < eps;
            rows.push(RegionRow {
                x: mu1,
                y: Some(mu2),
                radius: report.spectral_radius,
                stable: report.stable,
                predicate: (!on_edge).then(|| boundary_ordering_predicate(mu1, mu2)),
            });
        }
    }
    Ok(rows)
}

pub fn cross_validate(
    params: CrossParams,
    preset: Preset,
    ell: f64,
    n_per_half: usize,
    resolutions: &[usize],
) -> anyhow::Result<CrossReport> {
    if resolutions.is_empty() {
        bail!("at least one resolution is required");
    }
    Ok(fd_cross_validate(
        params,
        preset,
        ell,
        n_per_half,
        resolutions,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_sweep_agrees() {
        let rows = sweep_pointwise(1.0, 32, &[0.5, 1.0, 1.5], Preset::Sine, 100.0);
        assert_eq!(rows.len(), 3);
        for row in rows {
            let row = row.unwrap();
            assert!(row.agreement, "{row:?}");
            assert!(row.stable_observed());
        }
        assert!(sweep_pointwise(1.0, 32, &[], Preset::Sine, 100.0).is_empty());
    }

    #[test]
    fn unstable_boundary_row() {
        let rows = sweep_boundary(1.0, 16, &[(2.0, 3.0), (1.0, 0.5)], Preset::Sine, 60.0);
        let row = rows[0].as_ref().unwrap();
        assert!(!row.stable_predicted);
        assert!(row.fitted_slope > 0.0);
        assert!(row.agreement);
        assert!(rows[1].is_err());
    }

    #[test]
    fn extinction_counts_as_stable() {
        let o = simulate_boundary(1.0, 16, 3.0, 2.0, Preset::Sine, 60.0).unwrap();
        assert!(o.fit.is_none());
        assert_eq!(o.summary.stable_observed, Some(true));
        assert_eq!(o.summary.predicted_slope, None);
        assert_eq!(o.summary.spectral_radius, Some(0.0));
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("-4:4:0.1").unwrap().len(), 81);
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:x:0.1").is_err());
    }

    #[test]
    fn region_rows() {
        let rows = pointwise_region(&[0.0, 1.0, 2.5], 1e-6);
        assert_eq!(rows[0].predicate, None);
        assert!(rows[1].stable && rows[1].agrees());
        assert!(!rows[2].stable && rows[2].agrees());
        let rows = boundary_region(&[1.0, 2.0], &[1.5], 1e-6).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].predicate, Some(true));
    }

    #[test]
    fn zero_data_reports_no_fit() {
        let o = simulate_pointwise(1.0, 8, 1.0, Preset::Zero, 20.0).unwrap();
        assert!(o.fit.is_none());
        assert_eq!(o.summary.stable_observed, Some(false));
    }

    #[test]
    fn short_runs_have_no_fit() {
        let o = simulate_boundary(1.0, 8, 5.0, 2.0, Preset::Sine, 20.0).unwrap();
        assert!(o.fit.is_none());
        assert_eq!(o.summary.stable_observed, None);
        assert_eq!(o.summary.stable_predicted, Some(true));
    }
}
