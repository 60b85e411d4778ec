//! Explicit leapfrog solver used as an independent oracle for the
//! characteristic solvers, and as the primary solver for the interval with
//! switched internal damping.
//!
//! Nodes are `x_i = i * h_x`, `i = 0..=nx`. The left end is always clamped.
//! The right end is a Neumann / flux node for the pointwise and boundary
//! schemes and clamped for the internal scheme. Delayed quantities are read
//! from a ring buffer holding the last `delay_steps` velocity samples.
//!
//! Energies are reported at half steps `(n + 1/2) dt` with the discrete
//! energy that leapfrog conserves exactly in the undamped case:
//! `1/2 sum w_i h ((u^{n+1}_i - u^n_i)/dt)^2 + 1/2 sum_cells h D u^{n+1} D u^n`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::analysis::{EnergySeries, SeriesMeta};
use crate::boundary::BoundaryState;
use crate::error::{Error, Result};
use crate::grid::{Grid, InitialData, Preset};
use crate::pointwise::PointwiseState;
use crate::spectral::SystemTag;

/// Largest `dt / h_x` used when the step is picked automatically.
pub const DEFAULT_COURANT: f64 = 0.9;

const STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Delayed point feedback with jump `u_x(xi+) - u_x(xi-) = -a u_t(xi, t - 2 ell)`, active for `t >= 2 ell`.
    Pointwise { a: f64, xi: f64 },
    /// Switched feedback `u_x(ell) = mu u_t(ell, .)` on the right end.
    Boundary { mu1: f64, mu2: f64 },
    /// `b1 u_t` on `[i P, i P + T*)`, `b2 u_t(t - tau)` on `[i P + T*, (i+1) P)`, `P = T* + tau`.
    Internal {
        b1: f64,
        b2: f64,
        tau: f64,
        t_star: f64,
    },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Pointwise { .. } => "pointwise",
            Scheme::Boundary { .. } => "boundary",
            Scheme::Internal { .. } => "internal",
        }
    }

    fn delay(&self, length: f64) -> f64 {
        match *self {
            Scheme::Internal { tau, .. } => tau,
            _ => 2.0 * length,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdConfig {
    pub length: f64,
    /// Number of grid intervals.
    pub nx: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub preset: Preset,
}

impl FdConfig {
    /// Picks the largest `dt <= 0.9 h_x` that divides the delay.
    pub fn new(scheme: Scheme, length: f64, nx: usize, t_end: f64, preset: Preset) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) || nx < 2 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "need a positive length and at least two intervals",
            });
        }
        let hx = length / nx as f64;
        let delay = scheme.delay(length);
        if !(delay.is_finite() && delay > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: "delay must be positive",
            });
        }
        let steps = libm::ceil(delay / (DEFAULT_COURANT * hx) - STEP_TOL).max(1.0);
        let config = Self {
            length,
            nx,
            dt: delay / steps,
            t_end,
            scheme,
            preset,
        };
        config.plan()?;
        Ok(config)
    }

    pub fn hx(&self) -> f64 {
        self.length / self.nx as f64
    }

    pub fn delay_steps(&self) -> Result<usize> {
        whole_steps(self.scheme.delay(self.length), self.dt)
    }

    /// Validates the configuration and derives the integer step layout.
    pub fn plan(&self) -> Result<Plan> {
        let hx = self.hx();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "must be positive",
            });
        }
        if self.dt > hx * (1.0 + STEP_TOL) {
            return Err(Error::CflViolation { dt: self.dt, hx });
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: "must be non-negative",
            });
        }
        let delay_steps = self.delay_steps()?;
        let mut plan = Plan {
            hx,
            courant: self.dt / hx,
            delay_steps,
            damper_node: 0,
            damped_steps: 0,
            period_steps: 0,
        };
        match self.scheme {
            Scheme::Pointwise { a, xi } => {
                if !a.is_finite() || !(xi > 0.0 && xi < self.length) {
                    return Err(Error::InvalidParameter {
                        name: "xi",
                        reason: "damper must be strictly inside the interval",
                    });
                }
                plan.damper_node = libm::round(xi / hx) as usize;
            }
            Scheme::Boundary { mu1, mu2 } => {
                if !(mu1.is_finite() && mu2.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "mu",
                        reason: "gains must be finite",
                    });
                }
                if (1.0 - mu1 / plan.courant).abs() < 1e-6 {
                    return Err(Error::InvalidParameter {
                        name: "mu1",
                        reason: "mu1 must differ from dt / h_x",
                    });
                }
            }
            Scheme::Internal {
                b1,
                b2,
                tau,
                t_star,
            } => {
                if !(b1.is_finite() && b1 >= 0.0 && b2.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "b1",
                        reason: "b1 must be non-negative and b2 finite",
                    });
                }
                if !(tau > 0.0 && tau <= t_star * (1.0 + STEP_TOL)) {
                    return Err(Error::InvalidParameter {
                        name: "tau",
                        reason: "need 0 < tau <= T*",
                    });
                }
                plan.damped_steps = whole_steps(t_star, self.dt)?;
                plan.period_steps = plan.damped_steps + delay_steps;
            }
        }
        Ok(plan)
    }

    /// Initial displacement; the internal scheme clamps both ends, so its
    /// `sine` preset is the first Dirichlet mode `sin(pi x / L)`.
    pub fn u0(&self, x: f64) -> f64 {
        match (self.scheme, self.preset) {
            (Scheme::Internal { .. }, Preset::Sine) => libm::sin(PI * x / self.length),
            (_, p) => p.u0(x, self.length),
        }
    }

    pub fn u1(&self, x: f64) -> f64 {
        self.preset.u1(x, self.length)
    }
}

fn whole_steps(span: f64, dt: f64) -> Result<usize> {
    let ratio = span / dt;
    let k = libm::round(ratio);
    if k < 1.0 || libm::fabs(ratio - k) > STEP_TOL * k {
        return Err(Error::NotCommensurate);
    }
    Ok(k as usize)
}

/// Integer layout derived from a validated [`FdConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plan {
    pub hx: f64,
    pub courant: f64,
    pub delay_steps: usize,
    pub damper_node: usize,
    pub damped_steps: usize,
    pub period_steps: usize,
}

/// Fixed-capacity FIFO of equally sized velocity snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayLine {
    width: usize,
    capacity: usize,
    data: Vec<f64>,
    head: usize,
    len: usize,
}

impl DelayLine {
    pub fn new(capacity: usize, width: usize) -> Self {
        Self {
            width,
            capacity,
            data: vec![0.0; capacity * width],
            head: 0,
            len: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.capacity
    }

    /// Entry pushed `capacity` pushes ago, once the line is full.
    pub fn oldest(&self) -> Option<&[f64]> {
        if !self.is_full() {
            return None;
        }
        Some(&self.data[self.head * self.width..(self.head + 1) * self.width])
    }

    pub fn push(&mut self, entry: &[f64]) {
        debug_assert_eq!(entry.len(), self.width);
        let slot = if self.is_full() {
            let s = self.head;
            self.head = (self.head + 1) % self.capacity;
            s
        } else {
            let s = (self.head + self.len) % self.capacity;
            self.len += 1;
            s
        };
        self.data[slot * self.width..(slot + 1) * self.width].copy_from_slice(entry);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdState {
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
    pub history: DelayLine,
    /// Index `n` of `u_curr = u^n`.
    pub step_index: usize,
}

pub struct FdSolver {
    config: FdConfig,
    plan: Plan,
    state: FdState,
    scratch: Vec<f64>,
}

impl FdSolver {
    /// Sets `u^0` from the preset and `u^1` by a second-order Taylor step.
    pub fn new(config: FdConfig) -> Result<Self> {
        let plan = config.plan()?;
        let nx = config.nx;
        let hx = plan.hx;
        let dt = config.dt;
        let mut u0: Vec<f64> = (0..=nx).map(|i| config.u0(i as f64 * hx)).collect();
        let mut v0: Vec<f64> = (0..=nx).map(|i| config.u1(i as f64 * hx)).collect();
        u0[0] = 0.0;
        v0[0] = 0.0;
        let clamped_right = matches!(config.scheme, Scheme::Internal { .. });
        if clamped_right {
            u0[nx] = 0.0;
            v0[nx] = 0.0;
        }

        let mut u1 = vec![0.0; nx + 1];
        for i in 1..nx {
            let lap = (u0[i + 1] - 2.0 * u0[i] + u0[i - 1]) / (hx * hx);
            let damping = match config.scheme {
                Scheme::Internal { b1, .. } => b1 * v0[i],
                _ => 0.0,
            };
            u1[i] = u0[i] + dt * v0[i] + 0.5 * dt * dt * (lap - damping);
        }
        if !clamped_right {
            // Free right end during the first window.
            let lap = 2.0 * (u0[nx - 1] - u0[nx]) / (hx * hx);
            u1[nx] = u0[nx] + dt * v0[nx] + 0.5 * dt * dt * lap;
        }

        let width = match config.scheme {
            Scheme::Internal { .. } => nx + 1,
            _ => 1,
        };
        let mut history = DelayLine::new(plan.delay_steps, width);
        let first = match config.scheme {
            Scheme::Pointwise { .. } => vec![v0[plan.damper_node]],
            Scheme::Boundary { .. } => vec![v0[nx]],
            Scheme::Internal { .. } => v0,
        };
        history.push(&first);

        Ok(Self {
            scratch: vec![0.0; nx + 1],
            state: FdState {
                u_prev: u0,
                u_curr: u1,
                history,
                step_index: 1,
            },
            config,
            plan,
        })
    }

    pub fn config(&self) -> &FdConfig {
        &self.config
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    pub fn state(&self) -> &FdState {
        &self.state
    }

    /// Time attached to [`FdSolver::energy`].
    pub fn energy_time(&self) -> f64 {
        (self.state.step_index as f64 - 0.5) * self.config.dt
    }

    /// Discrete energy between the two stored levels.
    pub fn energy(&self) -> f64 {
        fd_energy(&self.state, &self.config, &self.plan)
    }

    /// Advances from `u^n` to `u^{n+1}`.
    pub fn step(&mut self) {
        let FdSolver {
            config,
            plan,
            state,
            scratch,
        } = self;
        let nx = config.nx;
        let dt = config.dt;
        let hx = plan.hx;
        let r2 = plan.courant * plan.courant;
        let n = state.step_index;
        let (prev, curr) = (&state.u_prev, &state.u_curr);
        let next = scratch;

        for i in 1..nx {
            next[i] = 2.0 * curr[i] - prev[i] + r2 * (curr[i + 1] - 2.0 * curr[i] + curr[i - 1]);
        }
        next[0] = 0.0;

        match config.scheme {
            Scheme::Pointwise { a, .. } => {
                next[nx] = 2.0 * curr[nx] - prev[nx] + 2.0 * r2 * (curr[nx - 1] - curr[nx]);
                if let Some(old) = state.history.oldest() {
                    next[plan.damper_node] += dt * dt * a * old[0] / hx;
                }
            }
            Scheme::Boundary { mu1, mu2 } => {
                let base = 2.0 * curr[nx] - prev[nx] + 2.0 * r2 * (curr[nx - 1] - curr[nx]);
                let window = n / plan.delay_steps;
                next[nx] = if window == 0 {
                    base
                } else if window % 2 == 1 {
                    // (u_nx - u_{nx-1}) / h_x = mu1 (u_nx^{n+1} - u_nx^n) / dt
                    let q = mu1 / plan.courant;
                    (next[nx - 1] - q * curr[nx]) / (1.0 - q)
                } else {
                    let old = state.history.oldest().map_or(0.0, |h| h[0]);
                    next[nx - 1] + hx * mu2 * old
                };
            }
            Scheme::Internal { b1, b2, .. } => {
                next[nx] = 0.0;
                if n % plan.period_steps < plan.damped_steps {
                    let (p, m) = (1.0 + 0.5 * b1 * dt, 1.0 - 0.5 * b1 * dt);
                    for i in 1..nx {
                        let undamped = next[i] + prev[i];
                        next[i] = (undamped - m * prev[i]) / p;
                    }
                } else if let Some(old) = state.history.oldest() {
                    for i in 1..nx {
                        next[i] -= dt * dt * b2 * old[i];
                    }
                }
            }
        }

        // Centered velocity at level n, now that u^{n+1} is known.
        let inv = 0.5 / dt;
        match config.scheme {
            Scheme::Pointwise { .. } => {
                let k = plan.damper_node;
                state.history.push(&[(next[k] - prev[k]) * inv]);
            }
            Scheme::Boundary { .. } => state.history.push(&[(next[nx] - prev[nx]) * inv]),
            Scheme::Internal { .. } => {
                let v: Vec<f64> = (0..=nx).map(|i| (next[i] - prev[i]) * inv).collect();
                state.history.push(&v);
            }
        }

        core::mem::swap(&mut state.u_prev, &mut state.u_curr);
        core::mem::swap(&mut state.u_curr, next);
        state.step_index += 1;
    }

    /// Steps until `energy_time() >= t_end`, recording every energy sample.
    pub fn run(&mut self) -> Result<EnergySeries> {
        let mut times = vec![self.energy_time()];
        let mut energies = vec![self.energy()];
        while self.energy_time() + 0.5 * self.config.dt <= self.config.t_end * (1.0 + 1e-12) {
            self.step();
            times.push(self.energy_time());
            energies.push(self.energy());
        }
        let mut params = vec![
            ("length", self.config.length),
            ("nx", self.config.nx as f64),
        ];
        match self.config.scheme {
            Scheme::Pointwise { a, xi } => params.extend([("a", a), ("xi", xi)]),
            Scheme::Boundary { mu1, mu2 } => params.extend([("mu1", mu1), ("mu2", mu2)]),
            Scheme::Internal {
                b1,
                b2,
                tau,
                t_star,
            } => params.extend([("b1", b1), ("b2", b2), ("tau", tau), ("tstar", t_star)]),
        }
        EnergySeries::new(
            times,
            energies.into_iter().map(|e| e.max(0.0)).collect(),
            SeriesMeta {
                system: self.config.scheme.name(),
                params,
            },
        )
    }
}

/// Leapfrog-conserved energy of the pair `(u_prev, u_curr)`.
pub fn fd_energy(state: &FdState, config: &FdConfig, plan: &Plan) -> f64 {
    let (prev, curr) = (&state.u_prev, &state.u_curr);
    let nx = config.nx;
    let hx = plan.hx;
    let dt = config.dt;
    let kinetic: f64 = (0..=nx)
        .map(|i| {
            let w = if i == 0 || i == nx { 0.5 } else { 1.0 };
            let v = (curr[i] - prev[i]) / dt;
            w * v * v
        })
        .sum();
    let potential: f64 = (0..nx)
        .map(|i| (curr[i + 1] - curr[i]) * (prev[i + 1] - prev[i]))
        .sum();
    0.5 * hx * kinetic + 0.5 * potential / hx
}

/// Runs only the instantaneous-damping phase `(0, T*)` of the internal
/// scheme and returns `E(T*) / E(0)`.
pub fn measure_contraction(config: &FdConfig) -> Result<f64> {
    let Scheme::Internal { t_star, .. } = config.scheme else {
        return Err(Error::InvalidParameter {
            name: "scheme",
            reason: "contraction is defined for the internal scheme",
        });
    };
    let mut phase = config.clone();
    phase.t_end = t_star;
    let mut solver = FdSolver::new(phase)?;
    let e0 = solver.energy();
    if e0 <= 0.0 {
        return Err(Error::DegenerateInitialData);
    }
    let damped = solver.plan().damped_steps;
    while solver.state().step_index < damped {
        solver.step();
    }
    Ok(solver.energy() / e0)
}

/// Outcome of checking `E(t) <= alpha (1 + |b2| tau)^2 E(0) (1 + slack)` on `(T*, T* + tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    /// `alpha (1 + |b2| tau)^2`.
    pub alpha_tilde: f64,
    /// `max E(t) / (alpha_tilde E(0))` over the window.
    pub max_ratio: f64,
    pub samples: usize,
    pub holds: bool,
}

pub fn delayed_window_bound_check(
    series: &EnergySeries,
    alpha: f64,
    b2: f64,
    tau: f64,
    t_star: f64,
    slack: f64,
) -> Result<BoundCheck> {
    let times = series.times();
    let (Some(&first), Some(&last)) = (times.first(), times.last()) else {
        return Err(Error::SeriesTooShort);
    };
    let spacing = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if first > t_star || last < t_star + tau - spacing {
        return Err(Error::SeriesTooShort);
    }
    let e0 = series.energies()[0];
    let factor = 1.0 + b2.abs() * tau;
    let alpha_tilde = alpha * factor * factor;
    let window: Vec<f64> = series
        .iter()
        .filter(|&(t, _)| t > t_star && t < t_star + tau)
        .map(|(_, e)| e)
        .collect();
    if window.is_empty() {
        return Err(Error::SeriesTooShort);
    }
    let max_ratio = if e0 > 0.0 {
        window
            .iter()
            .map(|e| e / (alpha_tilde * e0))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(BoundCheck {
        alpha_tilde,
        max_ratio,
        samples: window.len(),
        holds: max_ratio <= 1.0 + slack,
    })
}

/// Parameters of a 1-D system checked against its characteristic solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossParams {
    Pointwise { a: f64 },
    Boundary { mu1: f64, mu2: f64 },
}

impl CrossParams {
    pub fn system(&self) -> SystemTag {
        match self {
            CrossParams::Pointwise { .. } => SystemTag::Pointwise,
            CrossParams::Boundary { .. } => SystemTag::Boundary,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossReport {
    /// `(nx, max |E_fd - E_char| / max E_char)` per resolution.
    pub rows: Vec<(usize, f64)>,
    pub monotone: bool,
}

/// Compares energy series of the finite-difference and characteristic
/// solvers on `[0, 10 ell]` at several finite-difference resolutions.
pub fn fd_cross_validate(
    params: CrossParams,
    preset: Preset,
    ell: f64,
    n_per_half: usize,
    resolutions: &[usize],
) -> Result<CrossReport> {
    let grid = Grid::new(ell, n_per_half)?;
    let data = InitialData::preset(preset, &grid);
    let t_end = 10.0 * ell;
    let reference = match params {
        CrossParams::Pointwise { a } => {
            PointwiseState::new(&data, grid, a)?.energy_series(t_end, 1)?
        }
        CrossParams::Boundary { mu1, mu2 } => {
            BoundaryState::new(&data, grid, mu1, mu2)?.energy_series(t_end, 1)?
        }
    };
    let scale = reference.energies().iter().copied().fold(0.0, f64::max);

    let mut rows = Vec::with_capacity(resolutions.len());
    for &nx in resolutions {
        let scheme = match params {
            CrossParams::Pointwise { a } => {
                if nx % 2 != 0 {
                    return Err(Error::IncompatibleGrids);
                }
                Scheme::Pointwise { a, xi: 0.5 * ell }
            }
            CrossParams::Boundary { mu1, mu2 } => Scheme::Boundary { mu1, mu2 },
        };
        let series = FdSolver::new(FdConfig::new(scheme, ell, nx, t_end, preset)?)?.run()?;
        let worst = reference
            .iter()
            .map(|(t, e)| (series.value_at(t).unwrap_or(0.0) - e).abs())
            .fold(0.0, f64::max);
        rows.push((nx, if scale > 0.0 { worst / scale } else { worst }));
    }
    let monotone = rows.windows(2).all(|w| w[1].1 < w[0].1 || w[1].1 == 0.0);
    Ok(CrossReport { rows, monotone })
}
