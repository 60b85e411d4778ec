//! Characteristic marching for the string whose right end switches between
//! free, instantaneous and delayed velocity feedback.
//!
//! The field is `u = A(x + t) - A(t - x)`. The right end `x = ell` is hit at
//! time `t = y - ell` by the characteristic carrying `A'(y)`, so a node `y`
//! takes the rule of the time window containing `y - ell`:
//!
//! | window of `t`                  | rule                                              |
//! |--------------------------------|---------------------------------------------------|
//! | `[0, 2l)`                      | `A'(y) = -A'(y - 2l)`                              |
//! | `[2(2i+1)l, 2(2i+2)l)`         | `A'(y) = kappa A'(y - 2l)`                         |
//! | `[2(2i+2)l, 2(2i+3)l)`         | `A'(y) = (mu2 - 1) A'(y - 2l) - mu2 A'(y - 4l)`   |

use alloc::vec::Vec;

use crate::analysis::{EnergySeries, SeriesMeta};
use crate::error::{Error, Result};
use crate::grid::{init_trace_boundary, Grid, InitialData, Trace};
use crate::pointwise::FieldSample;
use crate::spectral::boundary_kappa;

/// Boundary rule in force during a time window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Free,
    Instantaneous,
    Delayed,
}

impl Window {
    /// Window containing `t = t_node * h` for a grid with `n_per_half = n`.
    pub fn of_time_node(t_node: i64, n: i64) -> Window {
        match t_node.div_euclid(4 * n) {
            w if w <= 0 => Window::Free,
            w if w % 2 == 1 => Window::Instantaneous,
            _ => Window::Delayed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryState {
    grid: Grid,
    mu1: f64,
    mu2: f64,
    kappa: f64,
    trace: Trace,
}

impl BoundaryState {
    pub fn new(data: &InitialData, grid: Grid, mu1: f64, mu2: f64) -> Result<Self> {
        if !(mu1.is_finite() && mu2.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: "gains must be finite",
            });
        }
        let kappa = boundary_kappa(mu1)?;
        let mut state = Self {
            grid,
            mu1,
            mu2,
            kappa,
            trace: init_trace_boundary(data, &grid)?,
        };
        state.extend_to_node(0);
        Ok(state)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn gains(&self) -> (f64, f64) {
        (self.mu1, self.mu2)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    fn n(&self) -> i64 {
        self.grid.n_per_half() as i64
    }

    pub fn t_max_node(&self) -> i64 {
        self.trace.frontier() - 2 * self.n()
    }

    pub fn t_max(&self) -> f64 {
        self.grid.coord(self.t_max_node())
    }

    pub fn extend(&mut self, t_target: f64) {
        self.extend_to_node(self.grid.node_floor(t_target));
    }

    pub fn extend_to_node(&mut self, t_node: i64) {
        let n = self.n();
        let target = t_node + 2 * n;
        let from = self.trace.frontier() + 1;
        if target < from {
            return;
        }
        self.trace.reserve((target - from + 1) as usize);
        for k in from..=target {
            let back = self.trace.raw(k - 4 * n);
            let value = match Window::of_time_node(k - 2 * n, n) {
                Window::Free => -back,
                Window::Instantaneous => self.kappa * back,
                Window::Delayed => (self.mu2 - 1.0) * back - self.mu2 * self.trace.raw(k - 8 * n),
            };
            self.trace.push(value);
        }
    }

    /// Rule that produced node `y_node` (only meaningful for `y >= ell`).
    pub fn window_of_node(&self, y_node: i64) -> Window {
        Window::of_time_node(y_node - 2 * self.n(), self.n())
    }

    fn check_time(&self, t_node: i64) -> Result<()> {
        if t_node < 0 || t_node > self.t_max_node() {
            return Err(Error::OutOfFrontier {
                index: t_node + 2 * self.n(),
            });
        }
        Ok(())
    }

    /// `u` is `int_{t-x}^{t+x} A'` by the trapezoid rule.
    pub fn reconstruct(&self, x: f64, t: f64) -> Result<FieldSample> {
        let (xn, tn) = (self.grid.node_exact(x)?, self.grid.node_exact(t)?);
        if xn < 0 || xn > 2 * self.n() {
            return Err(Error::InvalidParameter {
                name: "x",
                reason: "outside [0, ell]",
            });
        }
        self.check_time(tn)?;
        let (p, q) = (self.trace.raw(tn + xn), self.trace.raw(tn - xn));
        let u = if xn == 0 {
            0.0
        } else {
            let inner: f64 = (tn - xn + 1..tn + xn).map(|k| self.trace.raw(k)).sum();
            self.grid.h() * (inner + 0.5 * (p + q))
        };
        Ok(FieldSample {
            u,
            u_t: p - q,
            u_x: p + q,
        })
    }

    /// `|u_x(ell, t) - rhs(t)|` for the boundary rule active at `t`
    /// (snapped down to a node).
    pub fn boundary_residual(&self, t: f64) -> Result<f64> {
        let tn = self.grid.node_floor(t);
        self.check_time(tn)?;
        let two_n = 2 * self.n();
        let u_t_end = |s: i64| self.trace.raw(s + two_n) - self.trace.raw(s - two_n);
        let u_x = self.trace.raw(tn + two_n) + self.trace.raw(tn - two_n);
        let rhs = match Window::of_time_node(tn, self.n()) {
            Window::Free => 0.0,
            Window::Instantaneous => self.mu1 * u_t_end(tn),
            Window::Delayed => self.mu2 * u_t_end(tn - 2 * two_n),
        };
        Ok((u_x - rhs).abs())
    }

    /// Trapezoid value of `int_{-ell}^{ell} A'(x + t)^2 dx`.
    pub fn energy_at_node(&self, t_node: i64) -> Result<f64> {
        self.check_time(t_node)?;
        let two_n = 2 * self.n();
        let f = |k: i64| {
            let v = self.trace.raw(k);
            v * v
        };
        let inner: f64 = (t_node - two_n + 1..t_node + two_n).map(f).sum();
        Ok(self.grid.h() * (inner + 0.5 * (f(t_node - two_n) + f(t_node + two_n))))
    }

    pub fn energy(&self, t: f64) -> Result<f64> {
        self.energy_at_node(self.grid.node_exact(t)?)
    }

    pub fn energy_series(&mut self, t_end: f64, stride: usize) -> Result<EnergySeries> {
        let last = self.grid.node_floor(t_end);
        self.extend_to_node(last);
        let nodes: Vec<i64> = (0..=last).step_by(stride.max(1)).collect();
        let times = nodes.iter().map(|&k| self.grid.coord(k)).collect();
        let energies = nodes
            .iter()
            .map(|&k| self.energy_at_node(k))
            .collect::<Result<Vec<_>>>()?;
        EnergySeries::new(
            times,
            energies,
            SeriesMeta {
                system: "boundary",
                params: alloc::vec![
                    ("ell", self.grid.ell()),
                    ("mu1", self.mu1),
                    ("mu2", self.mu2)
                ],
            },
        )
    }
}

/// Consuming form of [`BoundaryState::extend`].
pub fn extend_boundary(mut state: BoundaryState, t_target: f64) -> BoundaryState {
    state.extend(t_target);
    state
}
