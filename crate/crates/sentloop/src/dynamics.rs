//! Closed-loop dynamics of sentiment coupled to engagement.
//!
//! Closing the loop replaces exogenous engagement with a response to
//! yesterday's sentiment: positive engagement scales with `(1 + S)/2`,
//! negative engagement with `(1 - S)/2`, giving the scalar recurrence
//!
//! ```text
//! S_{t+1} = sat( alpha * S_t + k * S_{t-1} + c )
//! k = (beta * a - gamma * b) / 2
//! c = (beta * a + gamma * b) / 2
//! ```
//!
//! where `sat` clips to `[-1, 1]` and `a, b >= 0` are the engagement
//! capacities. The unclipped recurrence is a second-order linear system
//! with characteristic polynomial `z^2 - alpha*z - k`; its root structure
//! decides whether sentiment converges smoothly, rings, sits on a knife
//! edge, or runs away until the clip locks it at a boundary.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::regression::FitResult;
use crate::util::fmt_f64;
use crate::Result;

/// Tolerance band around a spectral radius of 1 inside which the system
/// is reported as marginal rather than convergent or divergent.
pub const STABILITY_TOL: f64 = 1e-9;

/// Coefficients of the closed loop: the fitted feedback triple plus the
/// engagement capacities, and an optional constant forcing offset (used
/// when a fitted intercept is folded into the loop).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    a: f64,
    b: f64,
    forcing_offset: f64,
}

impl LoopParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, a: f64, b: f64) -> Result<Self> {
        Self::with_forcing_offset(alpha, beta, gamma, a, b, 0.0)
    }

    pub fn with_forcing_offset(
        alpha: f64,
        beta: f64,
        gamma: f64,
        a: f64,
        b: f64,
        forcing_offset: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("alpha", alpha),
            ("beta", beta),
            ("gamma", gamma),
            ("forcing offset", forcing_offset),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        for (name, value) in [("a", a), ("b", b)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "engagement capacity {name} must be finite and nonnegative, got {value}"
                )));
            }
        }
        Ok(LoopParams {
            alpha,
            beta,
            gamma,
            a,
            b,
            forcing_offset,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn forcing_offset(&self) -> f64 {
        self.forcing_offset
    }
}

/// The reduced recurrence coefficients `k` (delayed feedback gain) and
/// `c` (constant forcing).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedLoop {
    pub k: f64,
    pub c: f64,
}

impl DerivedLoop {
    /// `k = (beta*a - gamma*b)/2`, `c = (beta*a + gamma*b)/2` plus any
    /// forcing offset. The pair satisfies `k + c = beta*a` and
    /// `c - k = gamma*b` (up to rounding) when the offset is zero.
    pub fn from_params(params: &LoopParams) -> Self {
        let pos_gain = params.beta * params.a;
        let neg_gain = params.gamma * params.b;
        DerivedLoop {
            k: (pos_gain - neg_gain) / 2.0,
            c: (pos_gain + neg_gain) / 2.0 + params.forcing_offset,
        }
    }
}

/// Turn a fitted model into closed-loop coefficients. A fitted intercept
/// is folded into the constant forcing term, with a warning describing
/// the fold; the returned warnings are empty otherwise.
pub fn close_loop_from_fit(fit: &FitResult, a: f64, b: f64) -> Result<(LoopParams, Vec<String>)> {
    let mut warnings = Vec::new();
    let offset = fit.intercept.unwrap_or(0.0);
    if offset != 0.0 {
        warnings.push(format!(
            "fitted intercept {offset:.6} folded into the constant forcing term"
        ));
    }
    let params = LoopParams::with_forcing_offset(fit.alpha, fit.beta, fit.gamma, a, b, offset)?;
    Ok((params, warnings))
}

/// Clip to the sentiment band `[-1, 1]`. Non-finite input is an error.
pub fn sat(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "saturation input must be finite, got {x}"
        )));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Roots of the characteristic polynomial `z^2 - alpha*z - k`, larger
/// real part first. Their sum is `alpha` and their product is `-k`.
pub fn characteristic_roots(alpha: f64, k: f64) -> (Complex64, Complex64) {
    let disc = alpha * alpha + 4.0 * k;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        (
            Complex64::new((alpha + sq) / 2.0, 0.0),
            Complex64::new((alpha - sq) / 2.0, 0.0),
        )
    } else {
        let im = (-disc).sqrt() / 2.0;
        (
            Complex64::new(alpha / 2.0, im),
            Complex64::new(alpha / 2.0, -im),
        )
    }
}

/// Largest root modulus of the characteristic polynomial.
pub fn spectral_radius(alpha: f64, k: f64) -> f64 {
    let (r1, r2) = characteristic_roots(alpha, k);
    r1.norm().max(r2.norm())
}

/// Qualitative behaviour of the unclipped recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityClass {
    /// All roots real and nonnegative, spectral radius below 1: smooth
    /// approach with no overshoot.
    MonotoneConvergent,
    /// Convergent but ringing: complex roots, or a real root below zero.
    OscillatoryConvergent,
    /// Spectral radius within tolerance of 1.
    Marginal,
    /// Spectral radius above 1: the linear system runs away.
    Divergent,
}

impl StabilityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityClass::MonotoneConvergent => "monotone-convergent",
            StabilityClass::OscillatoryConvergent => "oscillatory-convergent",
            StabilityClass::Marginal => "marginal",
            StabilityClass::Divergent => "divergent",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "monotone-convergent" => Some(StabilityClass::MonotoneConvergent),
            "oscillatory-convergent" => Some(StabilityClass::OscillatoryConvergent),
            "marginal" => Some(StabilityClass::Marginal),
            "divergent" => Some(StabilityClass::Divergent),
            _ => None,
        }
    }
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classify `(alpha, k)` from the characteristic roots.
///
/// Divergent when the spectral radius exceeds `1 + tol`, marginal when
/// it is within `tol` of 1; otherwise convergent, and oscillatory if the
/// roots are complex or any real root lies below `-tol`.
pub fn classify_stability(alpha: f64, k: f64, tol: f64) -> StabilityClass {
    let (r1, r2) = characteristic_roots(alpha, k);
    let rho = r1.norm().max(r2.norm());
    if rho > 1.0 + tol {
        return StabilityClass::Divergent;
    }
    if (rho - 1.0).abs() <= tol {
        return StabilityClass::Marginal;
    }
    let complex = r1.im != 0.0;
    if complex || r1.re < -tol || r2.re < -tol {
        StabilityClass::OscillatoryConvergent
    } else {
        StabilityClass::MonotoneConvergent
    }
}

/// Where the closed loop can come to rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    /// A fixed point strictly inside (or exactly on the edge of) the
    /// sentiment band, at the contained value.
    Interior(f64),
    /// Sentiment locked at a saturation boundary (+1 or -1).
    Boundary(i8),
    /// No equilibrium in the band.
    None,
}

/// An equilibrium report: the kind, whether it attracts, and an optional
/// human-readable qualifier for degenerate setups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    pub stable: bool,
    pub note: Option<String>,
}

/// Locate the loop's equilibrium.
///
/// The interior candidate is `S* = c / (1 - alpha - k)`. When it lies in
/// the band it is reported with stability from the spectral radius. When
/// it leaves the band, the saturation boundaries are checked: `+1` is a
/// fixed point iff `alpha + k + c >= 1`, `-1` iff `-(alpha + k) + c <=
/// -1`, each stable under the strict inequality. A vanishing denominator
/// is degenerate: a continuum of equilibria when `c` is also ~0, no
/// finite equilibrium (resonant forcing) otherwise.
pub fn interior_equilibrium(alpha: f64, derived: &DerivedLoop) -> Equilibrium {
    const EPS: f64 = 1e-12;
    let (k, c) = (derived.k, derived.c);
    let denom = 1.0 - alpha - k;

    if denom.abs() <= EPS {
        if c.abs() <= EPS {
            return Equilibrium {
                kind: EquilibriumKind::Interior(0.0),
                stable: false,
                note: Some(
                    "degenerate: 1 - alpha - k = 0 with zero forcing, every point in the band is an equilibrium"
                        .to_string(),
                ),
            };
        }
        return Equilibrium {
            kind: EquilibriumKind::None,
            stable: false,
            note: Some(
                "resonant forcing: 1 - alpha - k = 0 with nonzero forcing, no finite equilibrium"
                    .to_string(),
            ),
        };
    }

    let s_star = c / denom;
    if s_star.abs() <= 1.0 {
        let rho = spectral_radius(alpha, k);
        let stable = rho < 1.0 - STABILITY_TOL;
        let note = if (rho - 1.0).abs() <= STABILITY_TOL {
            Some("spectral radius within tolerance of 1".to_string())
        } else if !stable && alpha + k + c >= 1.0 && -(alpha + k) + c <= -1.0 {
            Some(
                "unstable interior point; both saturation boundaries are locked equilibria"
                    .to_string(),
            )
        } else {
            None
        };
        return Equilibrium {
            kind: EquilibriumKind::Interior(s_star),
            stable,
            note,
        };
    }

    // Interior prediction leaves the band: try the boundary on that side
    // first, then the opposite one.
    let preferred: i8 = if s_star > 1.0 { 1 } else { -1 };
    for side in [preferred, -preferred] {
        let margin = if side == 1 {
            alpha + k + c - 1.0
        } else {
            -(-(alpha + k) + c) - 1.0
        };
        if margin > EPS {
            return Equilibrium {
                kind: EquilibriumKind::Boundary(side),
                stable: true,
                note: Some(format!(
                    "interior prediction {s_star:.4} lies outside the band; sentiment locks at {side:+}"
                )),
            };
        }
        if margin.abs() <= EPS {
            return Equilibrium {
                kind: EquilibriumKind::Boundary(side),
                stable: false,
                note: Some(format!(
                    "boundary {side:+} is a marginal fixed point (self-consistency holds with equality)"
                )),
            };
        }
    }

    Equilibrium {
        kind: EquilibriumKind::None,
        stable: false,
        note: Some(
            "interior prediction lies outside the band and neither boundary is self-sustaining"
                .to_string(),
        ),
    }
}

/// One saturated step in the literal closed-loop form: engagement reacts
/// to `s_prev`, sentiment persistence acts on `s_t`, and the result is
/// clipped. Both inputs must already lie in the band.
pub fn step_saturated(params: &LoopParams, s_t: f64, s_prev: f64) -> Result<f64> {
    for (name, value) in [("s_t", s_t), ("s_prev", s_prev)] {
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "{name} must lie in [-1, 1], got {value}"
            )));
        }
    }
    sat(raw_step(params, s_t, s_prev))
}

fn raw_step(params: &LoopParams, s_t: f64, s_prev: f64) -> f64 {
    let r_pos = params.a * (1.0 + s_prev) / 2.0;
    let r_neg = params.b * (1.0 - s_prev) / 2.0;
    params.alpha * s_t + params.beta * r_pos + params.gamma * r_neg + params.forcing_offset
}

/// How a simulation ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    /// Ten consecutive steps moved less than the tolerance; the value is
    /// the resting state.
    Converged(f64),
    /// A periodic orbit of the given period persisted at the end of the
    /// trace.
    Cycle(usize),
    /// The step budget ran out without convergence or a detected cycle.
    MaxSteps,
}

/// A simulated trajectory: every state (including the two initial
/// conditions), the indices of states produced by clipping, and the
/// terminal outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub states: Vec<f64>,
    pub saturation_events: Vec<usize>,
    pub terminal: Terminal,
}

impl SimulationTrace {
    /// CSV rendering with columns `step,S,saturated`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,S,saturated\n");
        let mut events = self.saturation_events.iter().peekable();
        for (i, s) in self.states.iter().enumerate() {
            let saturated = if events.peek() == Some(&&i) {
                events.next();
                1
            } else {
                0
            };
            out.push_str(&format!("{i},{},{saturated}\n", fmt_f64(*s)));
        }
        out
    }
}

/// Iterate the saturated loop from initial states `(s0, s1)`.
///
/// Stops early once ten consecutive steps each move less than `tol`
/// (reported as [`Terminal::Converged`] with the final state). If the
/// step budget is exhausted, the tail of the trace is scanned for a
/// short periodic orbit before giving up.
pub fn simulate(
    params: &LoopParams,
    s0: f64,
    s1: f64,
    max_steps: usize,
    tol: f64,
) -> Result<SimulationTrace> {
    for (name, value) in [("s0", s0), ("s1", s1)] {
        if !(-1.0..=1.0).contains(&value) {
            return Err(Error::InvalidArgument(format!(
                "initial state {name} must lie in [-1, 1], got {value}"
            )));
        }
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "convergence tolerance must be positive and finite, got {tol}"
        )));
    }
    if max_steps == 0 {
        return Err(Error::InvalidArgument(
            "step budget must be at least 1".to_string(),
        ));
    }

    let mut states = Vec::with_capacity(max_steps.saturating_add(2).min(1 << 20));
    states.push(s0);
    states.push(s1);
    let mut saturation_events = Vec::new();
    let mut quiet_steps = 0u32;
    let mut terminal = None;

    for _ in 0..max_steps {
        let n = states.len();
        let raw = raw_step(params, states[n - 1], states[n - 2]);
        if !raw.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "simulation produced a non-finite state at step {n}"
            )));
        }
        let next = raw.clamp(-1.0, 1.0);
        if next != raw {
            saturation_events.push(states.len());
        }
        let delta = (next - states[n - 1]).abs();
        states.push(next);
        if delta < tol {
            quiet_steps += 1;
            if quiet_steps >= 10 {
                terminal = Some(Terminal::Converged(next));
                break;
            }
        } else {
            quiet_steps = 0;
        }
    }

    let terminal = terminal.unwrap_or_else(|| {
        let max_period = (states.len() / 4).min(64);
        if max_period >= 2 {
            match detect_cycle(&states, max_period, 1e-7) {
                Some(cycle) => Terminal::Cycle(cycle.period),
                None => Terminal::MaxSteps,
            }
        } else {
            Terminal::MaxSteps
        }
    });

    Ok(SimulationTrace {
        states,
        saturation_events,
        terminal,
    })
}

/// A detected periodic orbit: the minimal period and one period of
/// states from the end of the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub period: usize,
    pub states: Vec<f64>,
}

/// Scan the tail of a trace for a periodic orbit.
///
/// Looks at the last `2 * max_period` states and returns the smallest
/// period `p in 2..=max_period` under which the tail is invariant within
/// `tol`. Returns `None` when the trace is shorter than `4 * max_period`
/// (not enough history to trust a match) or when the tail is constant
/// within `tol` (that is convergence, not a cycle).
pub fn detect_cycle(states: &[f64], max_period: usize, tol: f64) -> Option<Cycle> {
    if max_period < 2 || states.len() < 4 * max_period {
        return None;
    }
    let start = states.len() - 2 * max_period;
    let tail = &states[start..];
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= tol {
        return None;
    }
    for period in 2..=max_period {
        let from = start + period;
        if (from..states.len()).all(|i| (states[i] - states[i - period]).abs() <= tol) {
            return Some(Cycle {
                period,
                states: states[states.len() - period..].to_vec(),
            });
        }
    }
    None
}

/// How a stability diagram decides each cell's class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagramMode {
    /// From the characteristic roots.
    Analytic,
    /// By iterating the unclipped homogeneous recurrence from fixed
    /// initial conditions and watching the trajectory.
    Simulated,
}

/// A grid of stability classes over the `(alpha, k)` plane. Cells are
/// evaluated at their centers and stored row-major: `k` index outer
/// (ascending), `alpha` index inner.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityDiagram {
    pub alpha_range: (f64, f64),
    pub k_range: (f64, f64),
    pub resolution: usize,
    classes: Vec<StabilityClass>,
}

impl StabilityDiagram {
    /// Reassemble a diagram from stored cells (e.g. parsed back out of
    /// `diagram.csv`). The class list must hold `resolution^2` entries
    /// in row-major order, `k` outer.
    pub fn from_parts(
        alpha_range: (f64, f64),
        k_range: (f64, f64),
        resolution: usize,
        classes: Vec<StabilityClass>,
    ) -> Result<Self> {
        if resolution == 0 || classes.len() != resolution * resolution {
            return Err(Error::InvalidArgument(format!(
                "expected {} cells for resolution {resolution}, got {}",
                resolution * resolution,
                classes.len()
            )));
        }
        Ok(StabilityDiagram {
            alpha_range,
            k_range,
            resolution,
            classes,
        })
    }

    pub fn classes(&self) -> &[StabilityClass] {
        &self.classes
    }

    pub fn class_at(&self, i_alpha: usize, i_k: usize) -> StabilityClass {
        self.classes[i_k * self.resolution + i_alpha]
    }

    pub fn alpha_center(&self, i_alpha: usize) -> f64 {
        cell_center(self.alpha_range, self.resolution, i_alpha)
    }

    pub fn k_center(&self, i_k: usize) -> f64 {
        cell_center(self.k_range, self.resolution, i_k)
    }

    /// CSV rendering with columns `alpha,k,class`, one row per cell in
    /// storage order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,k,class\n");
        for i_k in 0..self.resolution {
            for i_alpha in 0..self.resolution {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_f64(self.alpha_center(i_alpha)),
                    fmt_f64(self.k_center(i_k)),
                    self.class_at(i_alpha, i_k)
                ));
            }
        }
        out
    }
}

fn cell_center(range: (f64, f64), resolution: usize, index: usize) -> f64 {
    range.0 + (index as f64 + 0.5) * (range.1 - range.0) / resolution as f64
}

/// Classify every cell of a `resolution x resolution` grid over the
/// given parameter ranges. Rows are computed in parallel; the result is
/// deterministic for fixed inputs.
pub fn stability_diagram(
    alpha_range: (f64, f64),
    k_range: (f64, f64),
    resolution: usize,
    mode: DiagramMode,
) -> Result<StabilityDiagram> {
    for (name, (lo, hi)) in [("alpha", alpha_range), ("k", k_range)] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "{name} range must be a finite interval with low < high, got {lo}:{hi}"
            )));
        }
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument(
            "resolution must be at least 1".to_string(),
        ));
    }
    if resolution > 8192 {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} exceeds the supported maximum of 8192"
        )));
    }

    let classes: Vec<StabilityClass> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let i_k = idx / resolution;
            let i_alpha = idx % resolution;
            let alpha = cell_center(alpha_range, resolution, i_alpha);
            let k = cell_center(k_range, resolution, i_k);
            match mode {
                DiagramMode::Analytic => classify_stability(alpha, k, STABILITY_TOL),
                DiagramMode::Simulated => classify_by_simulation(alpha, k),
            }
        })
        .collect();

    Ok(StabilityDiagram {
        alpha_range,
        k_range,
        resolution,
        classes,
    })
}

/// Empirical classifier: iterate `s_{t+1} = alpha*s_t + k*s_{t-1}` from
/// `(1.0, -0.1)` and watch the trajectory. Escape beyond 1e6 is
/// divergent; settling (ten consecutive moves below 1e-12) is
/// convergent, oscillatory when the step direction reversed at least
/// twice along the way; anything still moving after 10^4 steps is
/// marginal.
pub fn classify_by_simulation(alpha: f64, k: f64) -> StabilityClass {
    const MAX_STEPS: usize = 10_000;
    const CONV_TOL: f64 = 1e-12;
    const ESCAPE: f64 = 1e6;
    const SIGN_FLOOR: f64 = 1e-250;

    let mut prev = 1.0_f64;
    let mut cur = -0.1_f64;
    let mut flips = 0u32;
    let mut last_sign = -1i8; // sign of the initial delta cur - prev
    let mut quiet = 0u32;

    for _ in 0..MAX_STEPS {
        let next = alpha * cur + k * prev;
        if !next.is_finite() || next.abs() > ESCAPE {
            return StabilityClass::Divergent;
        }
        let delta = next - cur;
        let sign = if delta > SIGN_FLOOR {
            1i8
        } else if delta < -SIGN_FLOOR {
            -1i8
        } else {
            0i8
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                flips += 1;
            }
            last_sign = sign;
        }
        if delta.abs() < CONV_TOL {
            quiet += 1;
            if quiet >= 10 {
                return if flips >= 2 {
                    StabilityClass::OscillatoryConvergent
                } else {
                    StabilityClass::MonotoneConvergent
                };
            }
        } else {
            quiet = 0;
        }
        prev = cur;
        cur = next;
    }
    StabilityClass::Marginal
}
