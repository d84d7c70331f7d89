//! Trial-frequency optimization by the principle of minimal sensitivity.

use super::potential::{w_order, Order};
use super::{CoulombError, Result, TrialFrequencies};
use crate::correlator::{ModelParams, ThermalState};
use crate::numerics::{self, finite_difference, Bracket, DerivativeOrder, Tolerance};

const ROOT_TOL: Tolerance = Tolerance { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 200 };
const SCAN_POINTS: usize = 40;
const SCAN_DECADES: (f64, f64) = (-2.0, 2.0);

/// How the trial frequencies were fixed.
///
/// `Extremum`: ∂W/∂Ω = 0 inside the scanned range. `TurningPoint`: no
/// extremum, ∂²W/∂Ω² = 0 instead. `LowFrequencyLimit`: neither exists and W
/// grows away from Ω = 0; W is even in Ω, so Ω → 0 is itself stationary and
/// W is evaluated at the lowest scanned frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizationMode {
    Extremum,
    TurningPoint,
    LowFrequencyLimit,
}

impl OptimizationMode {
    pub fn label(self) -> &'static str {
        match self {
            OptimizationMode::Extremum => "extremum",
            OptimizationMode::TurningPoint => "turning_point",
            OptimizationMode::LowFrequencyLimit => "low_frequency_limit",
        }
    }
}

/// Isotropic (Ω_T = Ω_L) or anisotropic trial frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnisotropyMode {
    Isotropic,
    Anisotropic,
}

impl AnisotropyMode {
    pub fn label(self) -> &'static str {
        match self {
            AnisotropyMode::Isotropic => "iso",
            AnisotropyMode::Anisotropic => "aniso",
        }
    }
}

/// Optimized potential at one r₀.
#[derive(Debug, Clone, PartialEq)]
pub struct EcpPoint {
    pub r0: f64,
    pub frequencies: TrialFrequencies,
    pub value: f64,
    pub order: Order,
    pub optimization_mode: OptimizationMode,
    /// Other stationary frequencies found by the scan, with their W values.
    pub alternatives: Vec<(TrialFrequencies, f64)>,
}

/// Outcome of one grid point of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveEntry {
    pub r0: f64,
    pub result: std::result::Result<EcpPoint, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialCurve {
    pub thermal: ThermalState,
    pub order: Order,
    pub mode: AnisotropyMode,
    pub entries: Vec<CurveEntry>,
}

impl PotentialCurve {
    pub fn points(&self) -> impl Iterator<Item = &EcpPoint> {
        self.entries.iter().filter_map(|e| e.result.as_ref().ok())
    }

    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.result.is_err()).count()
    }
}

struct Problem<'a> {
    order: Order,
    r0: f64,
    thermal: ThermalState,
    params: &'a ModelParams,
}

/// Line through frequency space along which W is scanned.
#[derive(Debug, Clone, Copy)]
enum Line {
    Isotropic,
    /// Ω_T varies at the given Ω_L.
    Transverse(f64),
    /// Ω_L varies at the given Ω_T.
    Longitudinal(f64),
}

impl Line {
    fn at(self, omega: f64) -> Result<TrialFrequencies> {
        match self {
            Line::Isotropic => TrialFrequencies::isotropic(omega),
            Line::Transverse(l) => TrialFrequencies::new(omega, l),
            Line::Longitudinal(t) => TrialFrequencies::new(t, omega),
        }
    }
}

impl Problem<'_> {
    fn w(&self, f: TrialFrequencies) -> Result<f64> {
        w_order(self.order, self.r0, f, self.thermal, self.params)
    }

    fn w_on(&self, line: Line, omega: f64) -> Result<f64> {
        self.w(line.at(omega)?)
    }

    fn derivative(&self, line: Line, omega: f64, order: DerivativeOrder, step: Option<f64>) -> Result<f64> {
        let mut failure = None;
        let d = finite_difference(
            |x| {
                self.w_on(line, x).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    f64::NAN
                })
            },
            omega,
            order,
            step,
        );
        failure.map_or(Ok(d), Err)
    }

    fn slope(&self, line: Line, omega: f64) -> Result<f64> {
        self.derivative(line, omega, DerivativeOrder::First, None)
    }

    fn curvature(&self, line: Line, omega: f64) -> Result<f64> {
        self.derivative(line, omega, DerivativeOrder::Second, Some(CURVATURE_STEP * omega))
    }

    fn refine<G: Fn(f64) -> Result<f64>>(&self, g: G, lo: f64, hi: f64) -> Result<f64> {
        let mut failure = None;
        let root = numerics::find_root(
            |x| {
                g(x).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    f64::NAN
                })
            },
            Bracket::new(lo, hi)?,
            ROOT_TOL,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(root?)
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

// Relative accuracy assumed for W when judging finite-difference signs.
const W_NOISE: f64 = 1e-11;
const CURVATURE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
struct Sample {
    omega: f64,
    value: f64,
    derivative: f64,
    floor: f64,
}

fn slope_floor(value: f64, omega: f64) -> f64 {
    2.0 * W_NOISE * (1.0 + value.abs()) / (1e-4 * omega)
}

fn sign_changes(samples: &[Sample]) -> Vec<usize> {
    (0..samples.len() - 1)
        .filter(|&i| {
            let (a, b) = (samples[i], samples[i + 1]);
            a.derivative.abs() > a.floor
                && b.derivative.abs() > b.floor
                && a.derivative.signum() != b.derivative.signum()
        })
        .collect()
}

fn slopes(problem: &Problem, line: Line, grid: &[f64]) -> Result<Vec<Sample>> {
    grid.iter()
        .map(|&omega| {
            let value = problem.w_on(line, omega)?;
            Ok(Sample { omega, value, derivative: problem.slope(line, omega)?, floor: slope_floor(value, omega) })
        })
        .collect()
}

fn curvatures(problem: &Problem, line: Line, samples: &[Sample]) -> Result<Vec<Sample>> {
    samples
        .iter()
        .map(|s| {
            let floor = 4.0 * W_NOISE * (1.0 + s.value.abs()) / (CURVATURE_STEP * s.omega).powi(2);
            Ok(Sample { derivative: problem.curvature(line, s.omega)?, floor, ..*s })
        })
        .collect()
}

// Stationary points of W along `line` between scan samples, refined and paired with W.
fn stationary(problem: &Problem, line: Line, samples: &[Sample]) -> Result<Candidates> {
    let mut found = Vec::new();
    for i in sign_changes(samples) {
        let omega = problem.refine(|x| problem.slope(line, x), samples[i].omega, samples[i + 1].omega)?;
        found.push((line.at(omega)?, problem.w_on(line, omega)?));
    }
    Ok(found)
}

type Candidates = Vec<(TrialFrequencies, f64)>;

fn choose(problem: &Problem, mut found: Candidates, mode: OptimizationMode) -> EcpPoint {
    found.sort_by(|a, b| {
        a.1.total_cmp(&b.1).then(a.0.omega_t.total_cmp(&b.0.omega_t)).then(a.0.omega_l.total_cmp(&b.0.omega_l))
    });
    let (frequencies, value) = found[0];
    EcpPoint {
        r0: problem.r0,
        frequencies,
        value,
        order: problem.order,
        optimization_mode: mode,
        alternatives: found[1..].to_vec(),
    }
}

fn scan_range(problem: &Problem, widen: f64) -> (f64, f64) {
    let natural = problem.params.natural_frequency();
    (natural * 10f64.powf(SCAN_DECADES.0) / widen, natural * 10f64.powf(SCAN_DECADES.1) * widen)
}

fn optimize_isotropic(problem: &Problem, hint: Option<f64>) -> Result<EcpPoint> {
    let line = Line::Isotropic;
    if let Some(h) = hint {
        let found = stationary(problem, line, &slopes(problem, line, &log_grid(h / 2.0, 2.0 * h, 9))?)?;
        if !found.is_empty() {
            return Ok(choose(problem, found, OptimizationMode::Extremum));
        }
    }
    let mut last = Vec::new();
    for widen in [1.0, 10.0] {
        let (lo, hi) = scan_range(problem, widen);
        let samples = slopes(problem, line, &log_grid(lo, hi, SCAN_POINTS))?;
        let found = stationary(problem, line, &samples)?;
        if !found.is_empty() {
            return Ok(choose(problem, found, OptimizationMode::Extremum));
        }
        let curv = curvatures(problem, line, &samples)?;
        let mut turning = Vec::new();
        for i in sign_changes(&curv) {
            let omega = problem.refine(|x| problem.curvature(line, x), curv[i].omega, curv[i + 1].omega)?;
            turning.push((omega, problem.slope(line, omega)?.abs(), problem.w_on(line, omega)?));
        }
        // Least sensitive turning point first, the rest as alternatives.
        turning.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
        if let Some(&(omega, _, value)) = turning.first() {
            let mut point = choose(problem, vec![(line.at(omega)?, value)], OptimizationMode::TurningPoint);
            point.alternatives =
                turning[1..].iter().map(|&(o, _, v)| Ok((line.at(o)?, v))).collect::<Result<Vec<_>>>()?;
            return Ok(point);
        }
        let low = samples[0];
        if low.derivative >= -low.floor {
            return Ok(choose(problem, vec![(line.at(low.omega)?, low.value)], OptimizationMode::LowFrequencyLimit));
        }
        last = samples;
    }
    Err(CoulombError::NoStationaryPoint { scanned: last.iter().map(|s| (s.omega, s.derivative)).collect() })
}

const NEWTON_STEP: f64 = 1e-3;
const NEWTON_ITERATIONS: usize = 40;
const NEWTON_MAX_STEP: f64 = 0.5;

// W with gradient and Hessian [tt, ll, tl] in (ln Ω_T, ln Ω_L), by
// fourth-order central differences (second order for the mixed term).
struct Local {
    value: f64,
    gradient: [f64; 2],
    hessian: [f64; 3],
}

impl Local {
    fn at(problem: &Problem, x: [f64; 2]) -> Result<Local> {
        let h = NEWTON_STEP;
        let w = |u: f64, v: f64| problem.w(TrialFrequencies::new(u.exp(), v.exp())?);
        let value = w(x[0], x[1])?;
        let (mut gradient, mut hessian) = ([0.0; 2], [0.0; 3]);
        for k in 0..2 {
            let along = |s: f64| {
                let mut y = x;
                y[k] += s * h;
                w(y[0], y[1])
            };
            let (p1, m1, p2, m2) = (along(1.0)?, along(-1.0)?, along(2.0)?, along(-2.0)?);
            gradient[k] = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
            hessian[k] = (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * value) / (12.0 * h * h);
        }
        hessian[2] = (w(x[0] + h, x[1] + h)? - w(x[0] + h, x[1] - h)? - w(x[0] - h, x[1] + h)?
            + w(x[0] - h, x[1] - h)?)
            / (4.0 * h * h);
        Ok(Local { value, gradient, hessian })
    }

    fn gradient_norm(&self) -> f64 {
        self.gradient[0].hypot(self.gradient[1])
    }

    fn gradient_noise(&self) -> f64 {
        2.0 * W_NOISE * (1.0 + self.value.abs()) / NEWTON_STEP
    }

    fn hessian_noise(&self) -> f64 {
        6.0 * W_NOISE * (1.0 + self.value.abs()) / (NEWTON_STEP * NEWTON_STEP)
    }
}

fn inside(x: [f64; 2], (lo, hi): (f64, f64)) -> bool {
    x.iter().all(|&c| c >= lo && c <= hi)
}

// Stationary point of W in log frequencies by damped Newton iteration from
// `seed`. None if the iteration leaves `bounds`, stalls, or W is flat to
// within noise.
fn newton(problem: &Problem, seed: [f64; 2], bounds: (f64, f64)) -> Result<Option<[f64; 2]>> {
    let mut x = seed;
    let mut here = Local::at(problem, x)?;
    for _ in 0..NEWTON_ITERATIONS {
        let [a, b, c] = here.hessian;
        let det = a * b - c * c;
        if !(a.abs().max(b.abs()).max(c.abs()) > 100.0 * here.hessian_noise()) || det == 0.0 {
            return Ok(None);
        }
        let [gt, gl] = here.gradient;
        let mut d = [(c * gl - b * gt) / det, (c * gt - a * gl) / det];
        let size = d[0].abs().max(d[1].abs());
        if !size.is_finite() {
            return Ok(None);
        }
        if here.gradient_norm() <= 4.0 * here.gradient_noise() || size <= 1e-10 {
            let root = [x[0] + d[0], x[1] + d[1]];
            return Ok(inside(root, bounds).then_some(root));
        }
        if size > NEWTON_MAX_STEP {
            d = d.map(|s| s * NEWTON_MAX_STEP / size);
        }
        let wide = (bounds.0 - 1.0, bounds.1 + 1.0);
        let mut accepted = false;
        for _ in 0..6 {
            let y = [x[0] + d[0], x[1] + d[1]];
            if !inside(y, wide) {
                return Ok(None);
            }
            let next = Local::at(problem, y)?;
            if next.gradient_norm() < here.gradient_norm() {
                (x, here, accepted) = (y, next, true);
                break;
            }
            d = d.map(|s| 0.5 * s);
        }
        if !accepted {
            return Ok(None);
        }
    }
    Ok(None)
}

// Whether W does not decrease as the frequency varied by `line` goes to zero.
fn grows_from_zero(problem: &Problem, line: Line, lo: f64) -> Result<bool> {
    let value = problem.w_on(line, lo)?;
    Ok(problem.slope(line, lo)? >= -slope_floor(value, lo))
}

fn optimize_anisotropic(problem: &Problem, hint: Option<TrialFrequencies>) -> Result<EcpPoint> {
    let (lo, hi) = scan_range(problem, 1.0);
    let bounds = (lo.ln(), hi.ln());
    let seed = match hint {
        Some(f) => Some(f),
        None => match optimize_isotropic(problem, None) {
            Ok(p) => Some(p.frequencies),
            Err(CoulombError::NoStationaryPoint { .. }) => None,
            Err(e) => return Err(e),
        },
    };
    if let Some(f) = seed {
        if let Some(x) = newton(problem, [f.omega_t.ln(), f.omega_l.ln()], bounds)? {
            let f = TrialFrequencies::new(x[0].exp(), x[1].exp())?;
            return Ok(choose(problem, vec![(f, problem.w(f)?)], OptimizationMode::Extremum));
        }
    }

    // At the origin W is symmetric in the two channels.
    if problem.r0 == 0.0 {
        return optimize_isotropic(problem, None);
    }

    // One channel at its low-frequency limit, the other stationary.
    if let Some(f) = hint {
        let free = if f.omega_l <= lo {
            Some((Line::Transverse(lo), f.omega_t))
        } else if f.omega_t <= lo {
            Some((Line::Longitudinal(lo), f.omega_l))
        } else {
            None
        };
        if let Some((line, h)) = free {
            let (found, _) = limit_points(problem, line, &log_grid(h / 2.0, 2.0 * h, 9), lo)?;
            if !found.is_empty() {
                return Ok(choose(problem, found, OptimizationMode::LowFrequencyLimit));
            }
        }
    }
    let grid = log_grid(lo, hi, SCAN_POINTS);
    let (mut found, _) = limit_points(problem, Line::Transverse(lo), &grid, lo)?;
    let (longitudinal, last) = limit_points(problem, Line::Longitudinal(lo), &grid, lo)?;
    found.extend(longitudinal);
    if found.is_empty()
        && grows_from_zero(problem, Line::Transverse(lo), lo)?
        && grows_from_zero(problem, Line::Longitudinal(lo), lo)?
    {
        let f = TrialFrequencies::isotropic(lo)?;
        found.push((f, problem.w(f)?));
    }
    if found.is_empty() {
        return Err(CoulombError::NoStationaryPoint {
            scanned: last.iter().map(|s| (s.omega, s.derivative)).collect(),
        });
    }
    Ok(choose(problem, found, OptimizationMode::LowFrequencyLimit))
}

// Stationary points along `line`, whose fixed channel sits at `lo`, at which
// W also grows away from zero in that channel; with the scan samples.
fn limit_points(problem: &Problem, line: Line, grid: &[f64], lo: f64) -> Result<(Candidates, Vec<Sample>)> {
    let samples = slopes(problem, line, grid)?;
    let mut found = Vec::new();
    for (f, value) in stationary(problem, line, &samples)? {
        let across = match line {
            Line::Longitudinal(_) => Line::Transverse(f.omega_l),
            _ => Line::Longitudinal(f.omega_t),
        };
        if grows_from_zero(problem, across, lo)? {
            found.push((f, value));
        }
    }
    Ok((found, samples))
}

/// Optimized W₁ or W₂ at r₀.
///
/// Isotropic: ∂W/∂Ω is scanned on 40 logarithmic points spanning
/// [10⁻², 10²]·Me⁴/ℏ³ and every sign change is refined; the stationary point
/// with the lowest W is returned, the others are kept as alternatives.
/// Without a sign change the zeros of ∂²W/∂Ω² are used instead, and the
/// range is widened tenfold once before giving up. Anisotropic: a stationary
/// point of W(Ω_T, Ω_L) inside the same range is found by Newton iteration
/// from `hint` or the isotropic optimum. Without one, a channel is placed at
/// its low-frequency limit while the other is scanned as in the isotropic
/// case, and failing that both are.
pub fn optimize_frequencies(
    order: Order,
    r0: f64,
    thermal: ThermalState,
    mode: AnisotropyMode,
    params: &ModelParams,
) -> Result<EcpPoint> {
    optimize_frequencies_from(order, r0, thermal, mode, params, None)
}

/// As [`optimize_frequencies`], first searching near `hint`.
pub fn optimize_frequencies_from(
    order: Order,
    r0: f64,
    thermal: ThermalState,
    mode: AnisotropyMode,
    params: &ModelParams,
    hint: Option<TrialFrequencies>,
) -> Result<EcpPoint> {
    let problem = Problem { order, r0, thermal, params };
    match mode {
        AnisotropyMode::Isotropic => {
            optimize_isotropic(&problem, hint.map(|f| (f.omega_t * f.omega_t * f.omega_l).cbrt()))
        }
        AnisotropyMode::Anisotropic => optimize_anisotropic(&problem, hint),
    }
}

/// Optimized potential on an increasing r₀ grid. Each point is started near
/// the previous optimum; failures are recorded per point.
pub fn curve(
    order: Order,
    thermal: ThermalState,
    grid: &[f64],
    mode: AnisotropyMode,
    params: &ModelParams,
) -> Result<PotentialCurve> {
    if grid.is_empty() {
        return Err(CoulombError::InvalidInput("r0 grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] >= 0.0) {
        return Err(CoulombError::InvalidInput("r0 grid must be non-negative and strictly increasing"));
    }
    let mut hint = None;
    let mut entries = Vec::with_capacity(grid.len());
    for &r0 in grid {
        let result = optimize_frequencies_from(order, r0, thermal, mode, params, hint);
        if let Ok(p) = &result {
            hint = Some(p.frequencies);
        }
        entries.push(CurveEntry { r0, result: result.map_err(|e| e.to_string()) });
    }
    Ok(PotentialCurve { thermal, order, mode, entries })
}
