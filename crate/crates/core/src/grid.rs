//! Uniform sample lattices, append-only derivative traces and initial data.
//!
//! All characteristic solvers work on node samples `y = k * h` with
//! `h = ell / (2 * n_per_half)`, so every shift that appears in the
//! recurrences (`ell/2`, `ell`, `2 ell`, ...) is an integer number of
//! samples. Traces store the derivative of a travelling profile, never the
//! profile itself.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Relative slack used when deciding whether a length is a whole number of steps.
const COMMENSURATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    ell: f64,
    n_per_half: usize,
    h: f64,
}

impl Grid {
    pub fn new(ell: f64, n_per_half: usize) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidParameter {
                name: "ell",
                reason: "must be a positive finite length",
            });
        }
        if n_per_half == 0 {
            return Err(Error::InvalidParameter {
                name: "n_per_half",
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            ell,
            n_per_half,
            h: ell / (2 * n_per_half) as f64,
        })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn n_per_half(&self) -> usize {
        self.n_per_half
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of samples spanned by `count` half-lengths `ell/2`.
    pub fn half_ells(&self, count: i64) -> i64 {
        count * self.n_per_half as i64
    }

    /// Number of samples in `length`, which must be a whole multiple of `h`.
    pub fn samples_for(&self, length: f64) -> Result<i64> {
        let ratio = length / self.h;
        let k = libm::round(ratio);
        if !ratio.is_finite() || libm::fabs(ratio - k) > COMMENSURATE_TOL * libm::fmax(1.0, k.abs())
        {
            return Err(Error::NotCommensurate);
        }
        Ok(k as i64)
    }

    pub fn coord(&self, k: i64) -> f64 {
        k as f64 * self.h
    }

    /// Largest node index whose coordinate does not exceed `t` (up to rounding).
    pub fn node_floor(&self, t: f64) -> i64 {
        libm::floor(t / self.h + COMMENSURATE_TOL) as i64
    }

    /// Node index of `t`, rejecting coordinates that are not on the lattice.
    pub fn node_exact(&self, t: f64) -> Result<i64> {
        self.samples_for(t)
    }

    /// Nodes on `[0, ell]`.
    pub fn node_count(&self) -> usize {
        2 * self.n_per_half + 1
    }
}

/// Samples of a derivative profile at `(start + i) * h`, extended only at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    start: i64,
    values: Vec<f64>,
}

impl Trace {
    pub fn new(start: i64, values: Vec<f64>) -> Self {
        Self { start, values }
    }

    /// Node index of the first sample.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Node index of the last defined sample (`start - 1` when empty).
    pub fn frontier(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: i64) -> Option<f64> {
        if k < self.start {
            return None;
        }
        self.values.get((k - self.start) as usize).copied()
    }

    pub fn at(&self, k: i64) -> Result<f64> {
        self.get(k).ok_or(Error::OutOfFrontier { index: k })
    }

    /// Appends the sample for node `frontier() + 1`.
    pub fn push(&mut self, value: f64) {
        self.values.push(value);
    }

    pub(crate) fn reserve(&mut self, additional: usize) {
        self.values.reserve(additional);
    }

    /// Unchecked read for hot loops; callers guarantee `start <= k <= frontier`.
    #[inline]
    pub(crate) fn raw(&self, k: i64) -> f64 {
        self.values[(k - self.start) as usize]
    }
}

/// Built-in initial states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `u0(x) = sin(pi x / (2 ell))`, `u1 = 0`.
    Sine,
    /// Smooth bump supported in `(ell/4, 3 ell/4)`, `u1 = 0`.
    Bump,
    Zero,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Sine => "sine",
            Preset::Bump => "bump",
            Preset::Zero => "zero",
        }
    }

    pub fn u0(&self, x: f64, ell: f64) -> f64 {
        match self {
            Preset::Sine => libm::sin(PI * x / (2.0 * ell)),
            Preset::Bump => bump(x, ell).0,
            Preset::Zero => 0.0,
        }
    }

    pub fn u0_prime(&self, x: f64, ell: f64) -> f64 {
        match self {
            Preset::Sine => PI / (2.0 * ell) * libm::cos(PI * x / (2.0 * ell)),
            Preset::Bump => bump(x, ell).1,
            Preset::Zero => 0.0,
        }
    }

    pub fn u1(&self, _x: f64, _ell: f64) -> f64 {
        0.0
    }
}

/// Value and derivative of `e * exp(-1 / (1 - s^2))`, `s = (x - ell/2) / (ell/4)`.
fn bump(x: f64, ell: f64) -> (f64, f64) {
    let width = ell / 4.0;
    let s = (x - ell / 2.0) / width;
    let q = 1.0 - s * s;
    if q <= 0.0 {
        return (0.0, 0.0);
    }
    let value = libm::exp(1.0 - 1.0 / q);
    (value, value * (-2.0 * s / (q * q)) / width)
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine" => Ok(Preset::Sine),
            "bump" => Ok(Preset::Bump),
            "zero" => Ok(Preset::Zero),
            _ => Err(Error::UnknownPreset),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `u0'` and `u1` sampled on the nodes of `[0, ell]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u0_prime: Vec<f64>,
    pub u1: Vec<f64>,
    pub preset: Option<Preset>,
}

impl InitialData {
    /// User-supplied samples; `u0_prime` must be given explicitly.
    pub fn from_samples(grid: &Grid, u0_prime: Vec<f64>, u1: Vec<f64>) -> Result<Self> {
        let expected = grid.node_count();
        for len in [u0_prime.len(), u1.len()] {
            if len != expected {
                return Err(Error::SampleMismatch {
                    expected,
                    found: len,
                });
            }
        }
        if u0_prime.iter().chain(&u1).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "initial data",
                reason: "samples must be finite",
            });
        }
        Ok(Self {
            u0_prime,
            u1,
            preset: None,
        })
    }

    pub fn preset(preset: Preset, grid: &Grid) -> Self {
        let ell = grid.ell();
        let nodes = 0..grid.node_count() as i64;
        Self {
            u0_prime: nodes
                .clone()
                .map(|k| preset.u0_prime(grid.coord(k), ell))
                .collect(),
            u1: nodes.map(|k| preset.u1(grid.coord(k), ell)).collect(),
            preset: Some(preset),
        }
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        let expected = grid.node_count();
        for len in [self.u0_prime.len(), self.u1.len()] {
            if len != expected {
                return Err(Error::SampleMismatch {
                    expected,
                    found: len,
                });
            }
        }
        Ok(())
    }

    /// `u0(x_k)` recovered by trapezoid integration from `u0(0) = 0`.
    pub fn u0_at(&self, grid: &Grid, k: usize) -> f64 {
        let h = grid.h();
        self.u0_prime[..=k]
            .windows(2)
            .map(|w| 0.5 * h * (w[0] + w[1]))
            .sum()
    }
}

/// Looks up a preset by name and samples it.
pub fn preset_initial(name: &str, grid: &Grid) -> Result<InitialData> {
    Ok(InitialData::preset(name.parse()?, grid))
}

/// Left/right profile derivatives for the interior-point system with `xi = ell/2`,
/// both defined on the nodes of `[-ell/2, ell/2)`.
pub fn init_traces_pointwise(data: &InitialData, grid: &Grid) -> Result<(Trace, Trace)> {
    data.check(grid)?;
    let n = grid.n_per_half() as i64;
    let two_n = 2 * n;
    let (du0, u1) = (&data.u0_prime, &data.u1);
    let at = |k: i64| k as usize;

    let minus = (-n..n)
        .map(|k| {
            if k >= 0 {
                0.5 * du0[at(k)] + 0.5 * u1[at(k)]
            } else {
                0.5 * du0[at(-k)] - 0.5 * u1[at(-k)]
            }
        })
        .collect();
    let plus = (-n..n)
        .map(|k| {
            if k < 0 {
                0.5 * du0[at(two_n + k)] + 0.5 * u1[at(two_n + k)]
            } else {
                -0.5 * du0[at(two_n - k)] + 0.5 * u1[at(two_n - k)]
            }
        })
        .collect();
    Ok((Trace::new(-n, minus), Trace::new(-n, plus)))
}

/// Profile derivative for the boundary-feedback system on the nodes of `[-ell, ell)`.
pub fn init_trace_boundary(data: &InitialData, grid: &Grid) -> Result<Trace> {
    data.check(grid)?;
    let two_n = 2 * grid.n_per_half() as i64;
    let (du0, u1) = (&data.u0_prime, &data.u1);
    let values = (-two_n..two_n)
        .map(|k| {
            if k >= 0 {
                0.5 * du0[k as usize] + 0.5 * u1[k as usize]
            } else {
                0.5 * du0[(-k) as usize] - 0.5 * u1[(-k) as usize]
            }
        })
        .collect();
    Ok(Trace::new(-two_n, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn grid_steps_and_shifts() {
        let g = Grid::new(1.0, 2).unwrap();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.samples_for(1.0).unwrap(), 4);

        let g = Grid::new(2.0, 8).unwrap();
        assert_eq!(g.h(), 0.125);
        assert_eq!(g.samples_for(8.0).unwrap(), 64);
        assert_eq!(g.half_ells(8), 64);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid::new(1.0, 0).is_err());
        assert!(Grid::new(0.0, 4).is_err());
        assert!(Grid::new(-1.0, 4).is_err());
        assert!(Grid::new(f64::NAN, 4).is_err());
    }

    #[test]
    fn every_recurrence_shift_is_whole() {
        for ell in [0.3, 1.0, 2.0, 7.5] {
            for n in [1, 3, 8, 64, 100] {
                let g = Grid::new(ell, n).unwrap();
                assert_eq!(g.h() * (2 * n) as f64, ell);
                for (mult, halves) in [(0.5, 1), (1.0, 2), (2.0, 4), (3.0, 6), (4.0, 8)] {
                    assert_eq!(g.samples_for(mult * ell).unwrap(), g.half_ells(halves));
                }
            }
        }
        assert_eq!(
            Grid::new(1.0, 2).unwrap().samples_for(0.1),
            Err(Error::NotCommensurate)
        );
    }

    #[test]
    fn presets() {
        let g = Grid::new(1.0, 16).unwrap();
        let zero = preset_initial("zero", &g).unwrap();
        assert!(zero.u0_prime.iter().chain(&zero.u1).all(|&v| v == 0.0));

        let sine = preset_initial("sine", &g).unwrap();
        assert!((sine.u0_prime[0] - PI / 2.0).abs() < 1e-15);
        assert!(sine.u0_prime[32].abs() < 1e-15);

        assert_eq!(preset_initial("gauss", &g), Err(Error::UnknownPreset));
    }

    #[test]
    fn preset_compatibility() {
        for ell in [0.5, 1.0, 3.0] {
            for p in [Preset::Sine, Preset::Bump] {
                assert_eq!(p.u0(0.0, ell), 0.0);
                assert!(p.u0_prime(ell, ell).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bump_derivative_matches_difference_quotient() {
        let ell = 2.0;
        let eps = 1e-6;
        for i in 1..40 {
            let x = ell * i as f64 / 40.0;
            let fd = (Preset::Bump.u0(x + eps, ell) - Preset::Bump.u0(x - eps, ell)) / (2.0 * eps);
            assert!((fd - Preset::Bump.u0_prime(x, ell)).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn pointwise_initial_traces() {
        let g = Grid::new(1.0, 16).unwrap();
        let (m, p) = init_traces_pointwise(&preset_initial("zero", &g).unwrap(), &g).unwrap();
        assert!(m.values().iter().chain(p.values()).all(|&v| v == 0.0));
        assert_eq!((m.start(), m.frontier()), (-16, 15));

        let (m, p) = init_traces_pointwise(&preset_initial("sine", &g).unwrap(), &g).unwrap();
        assert!((m.at(0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(p.at(0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn boundary_initial_trace() {
        let g = Grid::new(1.0, 16).unwrap();
        let t = init_trace_boundary(&preset_initial("sine", &g).unwrap(), &g).unwrap();
        assert_eq!((t.start(), t.frontier()), (-32, 31));
        assert!((t.at(0).unwrap() - PI / 4.0).abs() < 1e-15);
        for k in 1..32 {
            assert_eq!(t.at(-k).unwrap(), t.at(k).unwrap());
        }
        let z = init_trace_boundary(&preset_initial("zero", &g).unwrap(), &g).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_samples_are_rejected() {
        let g = Grid::new(1.0, 4).unwrap();
        assert!(InitialData::from_samples(&g, vec![0.0; 9], vec![0.0; 8]).is_err());
        let bad = InitialData {
            u0_prime: vec![0.0; 5],
            u1: vec![0.0; 5],
            preset: None,
        };
        assert_eq!(
            init_trace_boundary(&bad, &g),
            Err(Error::SampleMismatch {
                expected: 9,
                found: 5
            })
        );
    }

    #[test]
    fn u0_by_quadrature() {
        let g = Grid::new(1.0, 64).unwrap();
        let d = InitialData::preset(Preset::Sine, &g);
        let u = d.u0_at(&g, 64);
        assert!((u - Preset::Sine.u0(0.5, 1.0)).abs() < 1e-4);
    }
}
