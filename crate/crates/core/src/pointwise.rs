//! Characteristic marching for the string with a delayed point damper at
//! `xi = ell/2`.
//!
//! The field is `u = A_-(x + t) - A_-(t - x)` on `(0, xi)` and
//! `u = A_+(x - ell + t) + A_+(t - x + ell)` on `(xi, ell)`. Only the
//! derivatives `A'_-`, `A'_+` are stored. In node units (`N = n_per_half`,
//! so `ell = 2N`):
//!
//! * `N <= k < 5N`: `A'_-(k) = A'_+(k - 2N)`, `A'_+(k) = -A'_-(k - 2N)`;
//! * `k >= 5N`: both gain `(a/2) (A'_+(k - 6N) + A'_+(k - 4N))`.

use alloc::vec::Vec;

use crate::analysis::{EnergySeries, SeriesMeta};
use crate::error::{Error, Result};
use crate::grid::{init_traces_pointwise, Grid, InitialData, Trace};
use crate::spectral::Matrix4;

/// `(A'_-(y), A'_+(y), A'_+(y - ell), A'_+(y - 2 ell))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector4(pub [f64; 4]);

impl StateVector4 {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0.iter().map(|v| v * v).sum())
    }

    pub fn apply(m: &Matrix4, v: &StateVector4) -> StateVector4 {
        StateVector4(core::array::from_fn(|i| {
            (0..4).map(|j| m[i][j] * v.0[j]).sum()
        }))
    }
}

/// `(u, u_t, u_x)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub u: f64,
    pub u_t: f64,
    pub u_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseState {
    grid: Grid,
    a: f64,
    minus: Trace,
    plus: Trace,
    /// `u0(xi)`, the starting value for time integration at the damper.
    u0_at_xi: f64,
}

impl PointwiseState {
    /// Initial traces, already marched far enough to reconstruct `t = 0`.
    pub fn new(data: &InitialData, grid: Grid, a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a",
                reason: "must be finite",
            });
        }
        let (minus, plus) = init_traces_pointwise(data, &grid)?;
        let mut state = Self {
            grid,
            a,
            minus,
            plus,
            u0_at_xi: data.u0_at(&grid, grid.n_per_half()),
        };
        state.extend_to_node(0);
        Ok(state)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn trace_minus(&self) -> &Trace {
        &self.minus
    }

    pub fn trace_plus(&self) -> &Trace {
        &self.plus
    }

    fn n(&self) -> i64 {
        self.grid.n_per_half() as i64
    }

    /// Last time node at which the field is reconstructible.
    pub fn t_max_node(&self) -> i64 {
        self.minus.frontier() - self.n()
    }

    pub fn t_max(&self) -> f64 {
        self.grid.coord(self.t_max_node())
    }

    /// Marches both traces until `t_target` (snapped down to a node) is
    /// reconstructible. Targets already covered are a no-op.
    pub fn extend(&mut self, t_target: f64) {
        self.extend_to_node(self.grid.node_floor(t_target));
    }

    pub fn extend_to_node(&mut self, t_node: i64) {
        let n = self.n();
        let target = t_node + n;
        let from = self.minus.frontier() + 1;
        if target < from {
            return;
        }
        let half_a = 0.5 * self.a;
        let extra = (target - from + 1) as usize;
        self.minus.reserve(extra);
        self.plus.reserve(extra);
        for k in from..=target {
            let (dm, dp) = if k < 5 * n {
                (self.plus.raw(k - 2 * n), -self.minus.raw(k - 2 * n))
            } else {
                let delayed = half_a * (self.plus.raw(k - 6 * n) + self.plus.raw(k - 4 * n));
                (
                    self.plus.raw(k - 2 * n) + delayed,
                    -self.minus.raw(k - 2 * n) + delayed,
                )
            };
            self.minus.push(dm);
            self.plus.push(dp);
        }
    }

    /// `C(y)` at node `y_node`.
    pub fn state_vector(&self, y_node: i64) -> Result<StateVector4> {
        let two_n = 2 * self.n();
        Ok(StateVector4([
            self.minus.at(y_node)?,
            self.plus.at(y_node)?,
            self.plus.at(y_node - two_n)?,
            self.plus.at(y_node - 2 * two_n)?,
        ]))
    }

    fn check_time(&self, t_node: i64) -> Result<()> {
        if t_node < 0 || t_node > self.t_max_node() {
            return Err(Error::OutOfFrontier {
                index: t_node + self.n(),
            });
        }
        Ok(())
    }

    /// `(u_t, u_x)` from one branch at node `x_node`, time node `t_node`.
    fn derivatives(&self, side: Side, x_node: i64, t_node: i64) -> (f64, f64) {
        match side {
            Side::Left => {
                let (p, q) = (
                    self.minus.raw(t_node + x_node),
                    self.minus.raw(t_node - x_node),
                );
                (p - q, p + q)
            }
            Side::Right => {
                let two_n = 2 * self.n();
                let (p, q) = (
                    self.plus.raw(x_node - two_n + t_node),
                    self.plus.raw(t_node - x_node + two_n),
                );
                (p + q, p - q)
            }
        }
    }

    /// Field at lattice point `(x, t)` using an explicit branch. `u` is the
    /// trapezoid integral of `u_x` from `x = 0`, switching branch at `xi`.
    pub fn reconstruct_side(&self, side: Side, x: f64, t: f64) -> Result<FieldSample> {
        let (xn, tn) = (self.grid.node_exact(x)?, self.grid.node_exact(t)?);
        let n = self.n();
        if xn < 0 || xn > 2 * n || (side == Side::Left && xn > n) || (side == Side::Right && xn < n)
        {
            return Err(Error::InvalidParameter {
                name: "x",
                reason: "outside the branch",
            });
        }
        self.check_time(tn)?;
        let h = self.grid.h();
        let mut u = 0.0;
        let mut prev = self.derivatives(Side::Left, 0, tn).1;
        for i in 1..=xn.min(n) {
            let cur = self.derivatives(Side::Left, i, tn).1;
            u += 0.5 * h * (prev + cur);
            prev = cur;
        }
        if xn > n {
            prev = self.derivatives(Side::Right, n, tn).1;
            for i in n + 1..=xn {
                let cur = self.derivatives(Side::Right, i, tn).1;
                u += 0.5 * h * (prev + cur);
                prev = cur;
            }
        }
        let (u_t, u_x) = self.derivatives(side, xn, tn);
        Ok(FieldSample { u, u_t, u_x })
    }

    /// Field at `(x, t)`; nodes with `x < xi` use the left branch.
    pub fn reconstruct(&self, x: f64, t: f64) -> Result<FieldSample> {
        let side = if self.grid.node_exact(x)? < self.n() {
            Side::Left
        } else {
            Side::Right
        };
        self.reconstruct_side(side, x, t)
    }

    /// `(|u^-(xi,t) - u^+(xi,t)|, |-u_x^- + u_x^+ + a u_t^+(xi, t - 2 ell)|)`.
    ///
    /// `u^-` is integrated in space from `x = 0`, `u^+` in time from
    /// `u0(xi)`, so the continuity residual measures quadrature error only.
    pub fn transmission_residuals(&self, t: f64) -> Result<(f64, f64)> {
        let tn = self.grid.node_exact(t)?;
        self.check_time(tn)?;
        let n = self.n();
        if tn <= 4 * n {
            return Err(Error::DelayInactive);
        }
        let h = self.grid.h();
        let xi = self.grid.coord(n);
        let left = self.reconstruct_side(Side::Left, xi, t)?;

        let u_t_plus = |s: i64| self.derivatives(Side::Right, n, s).0;
        let mut u_plus = self.u0_at_xi;
        let mut prev = u_t_plus(0);
        for s in 1..=tn {
            let cur = u_t_plus(s);
            u_plus += 0.5 * h * (prev + cur);
            prev = cur;
        }
        let (_, ux_right) = self.derivatives(Side::Right, n, tn);
        let jump = -left.u_x + ux_right + self.a * u_t_plus(tn - 4 * n);
        Ok(((left.u - u_plus).abs(), jump.abs()))
    }

    /// Trapezoid value of `int_{-ell/2}^{ell/2} A'_-(x+t)^2 + A'_+(x+t)^2 dx`
    /// at time node `t_node`.
    pub fn energy_at_node(&self, t_node: i64) -> Result<f64> {
        self.check_time(t_node)?;
        let n = self.n();
        let f = |k: i64| {
            let (m, p) = (self.minus.raw(k), self.plus.raw(k));
            m * m + p * p
        };
        let inner: f64 = (t_node - n + 1..t_node + n).map(f).sum();
        Ok(self.grid.h() * (inner + 0.5 * (f(t_node - n) + f(t_node + n))))
    }

    pub fn energy(&self, t: f64) -> Result<f64> {
        self.energy_at_node(self.grid.node_exact(t)?)
    }

    /// Energy at every `stride`-th node from 0 to `t_end`, marching as needed.
    pub fn energy_series(&mut self, t_end: f64, stride: usize) -> Result<EnergySeries> {
        let stride = stride.max(1) as i64;
        let last = self.grid.node_floor(t_end);
        self.extend_to_node(last);
        let nodes: Vec<i64> = (0..=last).step_by(stride as usize).collect();
        let times = nodes.iter().map(|&k| self.grid.coord(k)).collect();
        let energies = nodes
            .iter()
            .map(|&k| self.energy_at_node(k))
            .collect::<Result<Vec<_>>>()?;
        EnergySeries::new(
            times,
            energies,
            SeriesMeta {
                system: "pointwise",
                params: alloc::vec![("ell", self.grid.ell()), ("a", self.a)],
            },
        )
    }
}

/// Consuming form of [`PointwiseState::extend`].
pub fn extend_pointwise(mut state: PointwiseState, t_target: f64) -> PointwiseState {
    state.extend(t_target);
    state
}
