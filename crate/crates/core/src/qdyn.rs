//! Driven two-level dynamics with `H0 = -(E/2)Z`, so `|0⟩` is the ground state.
//!
//! The Bloch vector of a state is `(Tr ρX, Tr ρY, Tr ρZ)`, which puts `|0⟩`
//! at the north pole `(0, 0, +1)` and `|1⟩` at `(0, 0, -1)`.

use std::f64::consts::{PI, TAU};

use crate::bloch::Vec3;
use crate::error::{Error, Result};
use crate::smallmat::{self, pauli_x, pauli_y, pauli_z, ComplexMatrix, C64};

/// Closed-form expressions are only used when `|ω - E|` is below this.
pub const RESONANCE_TOL: f64 = 1e-12;
/// Default φ grid size for ensemble statistics.
pub const DEFAULT_PHI_GRID: usize = 64;
pub const DEFAULT_STEPS_PER_PERIOD: usize = 200;
pub const MIN_STEPS_PER_PERIOD: usize = 16;
/// Norm drift that aborts a propagation.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams {
    gap: f64,
    amp: f64,
    omega: f64,
    phase: f64,
}

impl QubitParams {
    /// Validates `E > 0`, `A ≥ 0`, `ω > 0`; the phase is reduced into `[0, 2π)`.
    pub fn new(gap: f64, amp: f64, omega: f64, phase: f64) -> Result<Self> {
        if !(gap.is_finite() && gap > 0.0) {
            return Err(Error::invalid(
                "gap",
                format!("must be finite and > 0, got {gap}"),
            ));
        }
        if !(amp.is_finite() && amp >= 0.0) {
            return Err(Error::invalid(
                "amp",
                format!("must be finite and >= 0, got {amp}"),
            ));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(
                "omega",
                format!("must be finite and > 0, got {omega}"),
            ));
        }
        if !phase.is_finite() {
            return Err(Error::invalid(
                "phase",
                format!("must be finite, got {phase}"),
            ));
        }
        Ok(QubitParams {
            gap,
            amp,
            omega,
            phase: reduce_phase(phase),
        })
    }

    /// Resonant drive, `ω = E`.
    pub fn resonant(gap: f64, amp: f64, phase: f64) -> Result<Self> {
        Self::new(gap, amp, gap, phase)
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }
    pub fn amp(&self) -> f64 {
        self.amp
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn with_phase(self, phase: f64) -> Self {
        QubitParams {
            phase: reduce_phase(phase),
            ..self
        }
    }

    pub fn with_amp(self, amp: f64) -> Result<Self> {
        Self::new(self.gap, amp, self.omega, self.phase)
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        Self::new(self.gap, self.amp, omega, self.phase)
    }

    /// `ω - E`.
    pub fn detuning(&self) -> f64 {
        self.omega - self.gap
    }

    pub fn is_resonant(&self) -> bool {
        self.detuning().abs() <= RESONANCE_TOL
    }

    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    /// `H0 = -(E/2)Z`.
    pub fn bare_hamiltonian(&self) -> ComplexMatrix {
        pauli_z() * (-0.5 * self.gap)
    }

    fn ensure_resonant(&self) -> Result<()> {
        if self.is_resonant() {
            Ok(())
        } else {
            Err(Error::OffResonance {
                detuning: self.detuning().abs(),
            })
        }
    }
}

fn reduce_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `2πk/n` for `k = 0..n`.
pub fn phi_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// `-(E/2)Z + 2A cos(ωt + φ)X`.
pub fn h_full(p: &QubitParams, t: f64) -> ComplexMatrix {
    h_full_with_amplitude(p, p.amp, t)
}

/// [`h_full`] with the amplitude replaced by `amp`, for shaped envelopes.
pub fn h_full_with_amplitude(p: &QubitParams, amp: f64, t: f64) -> ComplexMatrix {
    let theta = p.omega * t + p.phase;
    p.bare_hamiltonian() + pauli_x() * (2.0 * amp * theta.cos())
}

/// Co-rotating part of the drive: `-(E/2)Z + A cos(ωt+φ)X - A sin(ωt+φ)Y`.
///
/// The linear drive `2A cos θ X` splits into two counter-rotating circular
/// fields of strength `A`. This keeps the one that turns with the free
/// precession of `H0 = -(E/2)Z` and drops the other. The Rabi vector is
/// `(2A cos θ, -2A sin θ, -E)`.
pub fn h_rwa(p: &QubitParams, t: f64) -> ComplexMatrix {
    h_rwa_with_amplitude(p, p.amp, t)
}

pub fn h_rwa_with_amplitude(p: &QubitParams, amp: f64, t: f64) -> ComplexMatrix {
    let theta = p.omega * t + p.phase;
    p.bare_hamiltonian() + pauli_x() * (amp * theta.cos()) - pauli_y() * (amp * theta.sin())
}

/// `U(t) = cos(At) I - i sin(At) e^{i(ωt+φ)Z} X` at resonance.
///
/// Applied to `|0⟩` this reproduces the RWA evolution up to a global phase:
/// `U|0⟩ = cos(At)|0⟩ - i sin(At) e^{-i(ωt+φ)}|1⟩`.
pub fn closed_form_propagator(p: &QubitParams, t: f64) -> Result<ComplexMatrix> {
    p.ensure_resonant()?;
    let (s, c) = (p.amp * t).sin_cos();
    let theta = p.omega * t + p.phase;
    let mut u = ComplexMatrix::identity(2) * c;
    // e^{iθZ} X = [[0, e^{iθ}], [e^{-iθ}, 0]]
    u[(0, 1)] = C64::new(0.0, -s) * C64::from_polar(1.0, theta);
    u[(1, 0)] = C64::new(0.0, -s) * C64::from_polar(1.0, -theta);
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    amps: [C64; 2],
}

impl StateVector {
    /// Rejects states whose norm is off by more than 1e-9.
    pub fn new(a0: C64, a1: C64) -> Result<Self> {
        let s = StateVector { amps: [a0, a1] };
        let norm = s.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "state",
                format!("norm must be 1, got {norm}"),
            ));
        }
        Ok(s)
    }

    pub fn ground() -> Self {
        StateVector {
            amps: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        }
    }

    pub fn excited() -> Self {
        StateVector {
            amps: [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        }
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        (self.amps[0].norm_sqr() + self.amps[1].norm_sqr()).sqrt()
    }

    pub fn excited_population(&self) -> f64 {
        self.amps[1].norm_sqr()
    }

    pub fn bloch_vector(&self) -> Vec3 {
        let [a, b] = self.amps;
        let coh = a.conj() * b;
        Vec3::new(2.0 * coh.re, 2.0 * coh.im, a.norm_sqr() - b.norm_sqr())
    }

    pub fn density(&self) -> DensityMatrix {
        let m = ComplexMatrix::from_fn(2, |i, j| self.amps[i] * self.amps[j].conj());
        DensityMatrix { m }
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        (self.amps[0].conj() * other.amps[0] + self.amps[1].conj() * other.amps[1]).norm_sqr()
    }

    pub fn apply(&self, u: &ComplexMatrix) -> Result<StateVector> {
        if u.dim() != 2 {
            return Err(Error::Dimension {
                expected: "2",
                found: u.dim(),
            });
        }
        Ok(self.apply_unchecked(u))
    }

    fn apply_unchecked(&self, u: &ComplexMatrix) -> StateVector {
        let [a, b] = self.amps;
        StateVector {
            amps: [u[(0, 0)] * a + u[(0, 1)] * b, u[(1, 0)] * a + u[(1, 1)] * b],
        }
    }
}

/// `|⟨1|ψ⟩|²`.
pub fn excited_population(psi: &StateVector) -> f64 {
    psi.excited_population()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::Dimension {
                expected: "2",
                found: m.dim(),
            });
        }
        let deviation = m.hermiticity_error();
        if deviation > smallmat::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(
                "density",
                format!("trace must be 1, got {tr}"),
            ));
        }
        let eig = smallmat::hermitian_eig(&m)?;
        if eig.values[0] < -1e-10 {
            return Err(Error::invalid(
                "density",
                format!("eigenvalue {} is negative", eig.values[0]),
            ));
        }
        Ok(DensityMatrix { m })
    }

    pub fn diagonal(p0: f64, p1: f64) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(&[p0, p1])?)
    }

    pub fn pure(psi: &StateVector) -> Self {
        psi.density()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn excited_population(&self) -> f64 {
        self.m[(1, 1)].re
    }

    pub fn bloch_vector(&self) -> Vec3 {
        let c01 = self.m[(0, 1)];
        // Tr(ρX) = 2 Re ρ10, Tr(ρY) = 2 Im ρ10, with ρ10 = conj(ρ01)
        Vec3::new(
            2.0 * c01.re,
            -2.0 * c01.im,
            (self.m[(0, 0)] - self.m[(1, 1)]).re,
        )
    }

    /// Builds `(I + r·σ)/2`; requires `|r| ≤ 1`.
    pub fn from_bloch(r: Vec3) -> Result<Self> {
        let m = (ComplexMatrix::identity(2) + pauli_x() * r.x + pauli_y() * r.y + pauli_z() * r.z)
            * 0.5;
        Self::new(m)
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        (self.m * *op).trace()
    }
}

/// `½ Σ|λ_k(ρ - σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let diff = (rho.m - sigma.m).hermitian_part();
    // A traceless-up-to-rounding 2×2 Hermitian difference has eigenvalues c_I ± |c|.
    let c = smallmat::pauli_decompose(&diff).expect("difference of density matrices is Hermitian");
    let r = (c.c_x * c.c_x + c.c_y * c.c_y + c.c_z * c.c_z).sqrt();
    0.5 * ((c.c_i + r).abs() + (c.c_i - r).abs())
}

/// Von Neumann entropy in bits, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let eig = smallmat::hermitian_eig(&rho.m).expect("density matrix is Hermitian");
    eig.values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Phase-averaged state `cos²(At)|0⟩⟨0| + sin²(At)|1⟩⟨1|` at resonance.
/// The phase stored in `p` is ignored.
pub fn phi_averaged_state(p: &QubitParams, t: f64) -> Result<DensityMatrix> {
    p.ensure_resonant()?;
    let (s, c) = (p.amp * t).sin_cos();
    DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[c * c, s * s])?)
}

/// Average of `U_φ|0⟩⟨0|U_φ†` over an `n`-point uniform φ grid, using the
/// closed-form propagator.
pub fn phi_averaged_state_numeric(p: &QubitParams, t: f64, n: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::invalid(
            "phi_grid",
            "must contain at least one point",
        ));
    }
    let mut acc = ComplexMatrix::zeros(2);
    for phi in phi_grid(n) {
        let u = closed_form_propagator(&p.with_phase(phi), t)?;
        let psi = StateVector::ground().apply_unchecked(&u);
        acc = acc + *psi.density().matrix();
    }
    DensityMatrix::new((acc * (1.0 / n as f64)).hermitian_part())
}

/// Time-stepping scheme for piecewise exponential propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `exp(-i H(t + Δt/2) Δt)` per step; second order.
    Midpoint,
    /// Fourth-order commutator-free Magnus: two exponentials of Gauss-point
    /// combinations per step.
    #[default]
    Magnus4,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;
pub(crate) const CF4_NODES: [f64; 2] = [0.5 - SQRT3 / 6.0, 0.5 + SQRT3 / 6.0];
pub(crate) const CF4_A1: f64 = (3.0 - 2.0 * SQRT3) / 12.0;
pub(crate) const CF4_A2: f64 = (3.0 + 2.0 * SQRT3) / 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// `Δt ≤ period / steps_per_period`, shrunk so that steps land exactly on `t_final`.
    PerPeriod {
        steps_per_period: usize,
        period: f64,
    },
    Fixed(usize),
}

impl StepRule {
    pub fn steps_for(&self, t_final: f64) -> Result<usize> {
        match *self {
            StepRule::PerPeriod {
                steps_per_period,
                period,
            } => {
                if steps_per_period < MIN_STEPS_PER_PERIOD {
                    return Err(Error::invalid(
                        "steps_per_period",
                        format!("must be at least {MIN_STEPS_PER_PERIOD}, got {steps_per_period}"),
                    ));
                }
                if !(period.is_finite() && period > 0.0) {
                    return Err(Error::invalid(
                        "period",
                        format!("must be > 0, got {period}"),
                    ));
                }
                let dt = period / steps_per_period as f64;
                Ok(((t_final / dt).ceil() as usize).max(1))
            }
            StepRule::Fixed(0) => Err(Error::invalid("steps", "must be at least 1")),
            StepRule::Fixed(n) => Ok(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagateOptions {
    pub steps: StepRule,
    pub scheme: Scheme,
}

impl PropagateOptions {
    /// 200 steps per drive period with the default scheme.
    pub fn for_params(p: &QubitParams) -> Self {
        Self::per_period(p.period(), DEFAULT_STEPS_PER_PERIOD)
    }

    pub fn per_period(period: f64, steps_per_period: usize) -> Self {
        PropagateOptions {
            steps: StepRule::PerPeriod {
                steps_per_period,
                period,
            },
            scheme: Scheme::default(),
        }
    }

    pub fn fixed(steps: usize) -> Self {
        PropagateOptions {
            steps: StepRule::Fixed(steps),
            scheme: Scheme::default(),
        }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        PropagateOptions { scheme, ..self }
    }
}

/// Ordered samples; times are strictly increasing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries<T> {
    times: Vec<f64>,
    values: Vec<T>,
}

impl<T> TimeSeries<T> {
    pub fn new() -> Self {
        TimeSeries {
            times: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        TimeSeries {
            times: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
        }
    }

    /// Panics if `t` does not exceed the last recorded time.
    pub fn push(&mut self, t: f64, value: T) {
        if let Some(&last) = self.times.last() {
            assert!(t > last, "time {t} does not follow {last}");
        }
        self.times.push(t);
        self.values.push(value);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &T)> {
        self.times.last().copied().zip(self.values.last())
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &T)> {
        self.times.iter().copied().zip(self.values.iter())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> TimeSeries<U> {
        TimeSeries {
            times: self.times.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitRecord {
    pub state: StateVector,
    pub population: f64,
    pub bloch: Vec3,
}

impl QubitRecord {
    fn of(state: StateVector) -> Self {
        QubitRecord {
            state,
            population: state.excited_population(),
            bloch: state.bloch_vector(),
        }
    }
}

/// Integrates `i dψ/dt = H(t)ψ` from `t = 0` and records every step,
/// including the initial state.
pub fn propagate<H>(
    psi0: StateVector,
    h: H,
    t_final: f64,
    opts: PropagateOptions,
) -> Result<TimeSeries<QubitRecord>>
where
    H: Fn(f64) -> ComplexMatrix,
{
    let n = check_run(t_final, &opts)?;
    let mut series = TimeSeries::with_capacity(n + 1);
    series.push(0.0, QubitRecord::of(psi0));
    step_loop(psi0, &h, t_final, n, opts.scheme, |t, psi| {
        series.push(t, QubitRecord::of(*psi))
    })?;
    Ok(series)
}

/// Like [`propagate`] but returns only the final state.
pub fn propagate_final<H>(
    psi0: StateVector,
    h: H,
    t_final: f64,
    opts: PropagateOptions,
) -> Result<StateVector>
where
    H: Fn(f64) -> ComplexMatrix,
{
    let n = check_run(t_final, &opts)?;
    step_loop(psi0, &h, t_final, n, opts.scheme, |_, _| {})
}

fn check_run(t_final: f64, opts: &PropagateOptions) -> Result<usize> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::invalid(
            "t_final",
            format!("must be finite and > 0, got {t_final}"),
        ));
    }
    opts.steps.steps_for(t_final)
}

fn step_loop<H>(
    psi0: StateVector,
    h: &H,
    t_final: f64,
    n: usize,
    scheme: Scheme,
    mut record: impl FnMut(f64, &StateVector),
) -> Result<StateVector>
where
    H: Fn(f64) -> ComplexMatrix,
{
    let dt = t_final / n as f64;
    let mut psi = psi0;
    for k in 0..n {
        let t0 = dt * k as f64;
        for u in step_propagators(h, t0, dt, scheme)?.iter().flatten() {
            psi = psi.apply_unchecked(u);
        }
        let drift = (psi.norm() - 1.0).abs();
        // written negated so NaN is rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(drift <= NORM_DRIFT_LIMIT) {
            return Err(Error::IntegrationFailure {
                drift,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        let t = if k + 1 == n {
            t_final
        } else {
            dt * (k + 1) as f64
        };
        record(t, &psi);
    }
    Ok(psi)
}

/// The one or two exponentials making up a single step, in application order.
fn step_propagators<H>(
    h: &H,
    t0: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<[Option<ComplexMatrix>; 2]>
where
    H: Fn(f64) -> ComplexMatrix,
{
    let hamiltonian = |t: f64| -> Result<ComplexMatrix> {
        let m = h(t);
        if m.dim() != 2 {
            return Err(Error::Dimension {
                expected: "2",
                found: m.dim(),
            });
        }
        Ok(m)
    };
    match scheme {
        Scheme::Midpoint => {
            let u = smallmat::mat_exp_i(&hamiltonian(t0 + 0.5 * dt)?, dt)?;
            Ok([Some(u), None])
        }
        Scheme::Magnus4 => {
            let h1 = hamiltonian(t0 + CF4_NODES[0] * dt)?;
            let h2 = hamiltonian(t0 + CF4_NODES[1] * dt)?;
            let first = smallmat::mat_exp_i(&(h1 * CF4_A2 + h2 * CF4_A1), dt)?;
            let second = smallmat::mat_exp_i(&(h1 * CF4_A1 + h2 * CF4_A2), dt)?;
            Ok([Some(first), Some(second)])
        }
    }
}

/// Final excited population after driving `|0⟩` with `h_full` for `t_final`.
pub fn full_final_population(p: &QubitParams, t_final: f64, opts: PropagateOptions) -> Result<f64> {
    let psi = propagate_final(StateVector::ground(), |t| h_full(p, t), t_final, opts)?;
    Ok(psi.excited_population())
}

/// Flip time of a constant resonant drive, `T = π/(2A)`.
pub fn flip_time(amp: f64) -> Result<f64> {
    if !(amp.is_finite() && amp > 0.0) {
        return Err(Error::NoStoppingTime);
    }
    Ok(PI / (2.0 * amp))
}
