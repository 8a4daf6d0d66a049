//! Drive envelopes, flip-time solving, the phase-ensemble DEH check, and the
//! `V_U` construction for a prescribed level swap.
//!
//! Flip condition: the accumulated rotation angle `∫₀ᵀ 2|A(t)| dt` reaches π.
//! A constant amplitude `A` therefore flips at `T = π/(2A)`.

use std::f64::consts::PI;

use crate::bloch::{self, RotationField};
use crate::classical::{DipoleCoupling, DipoleParams};
use crate::error::{Error, Result};
use crate::harvest;
use crate::qdyn::{
    self, PropagateOptions, QubitParams, QubitRecord, Scheme, StateVector, TimeSeries,
};
use crate::smallmat::{self, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvelopeKind {
    Constant,
    /// Linear rise over `fraction·T`, flat top, linear fall over the last `fraction·T`.
    LinearRamp {
        fraction: f64,
    },
    /// Two equal tones at `ω1`, `ω2`: a carrier at `(ω1+ω2)/2` with amplitude
    /// `A cos(((ω1-ω2)/2) t)`.
    Beat {
        omega1: f64,
        omega2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    kind: EnvelopeKind,
    amp: f64,
}

impl Envelope {
    pub fn new(kind: EnvelopeKind, amp: f64) -> Result<Self> {
        if !(amp.is_finite() && amp >= 0.0) {
            return Err(Error::invalid(
                "amp",
                format!("must be finite and >= 0, got {amp}"),
            ));
        }
        match kind {
            EnvelopeKind::Constant => {}
            EnvelopeKind::LinearRamp { fraction } => {
                if !(fraction.is_finite() && (0.0..0.5).contains(&fraction)) {
                    return Err(Error::invalid(
                        "ramp_fraction",
                        format!("must lie in [0, 0.5), got {fraction}"),
                    ));
                }
            }
            EnvelopeKind::Beat { omega1, omega2 } => {
                if !(omega1.is_finite() && omega2.is_finite() && omega1 > 0.0 && omega2 > 0.0) {
                    return Err(Error::invalid(
                        "beat",
                        format!("tone frequencies must be finite and > 0, got {omega1}, {omega2}"),
                    ));
                }
            }
        }
        Ok(Envelope { kind, amp })
    }

    pub fn constant(amp: f64) -> Result<Self> {
        Self::new(EnvelopeKind::Constant, amp)
    }

    pub fn linear_ramp(amp: f64, fraction: f64) -> Result<Self> {
        Self::new(EnvelopeKind::LinearRamp { fraction }, amp)
    }

    pub fn beat(amp: f64, omega1: f64, omega2: f64) -> Result<Self> {
        Self::new(EnvelopeKind::Beat { omega1, omega2 }, amp)
    }

    pub fn kind(&self) -> EnvelopeKind {
        self.kind
    }

    pub fn amp(&self) -> f64 {
        self.amp
    }

    pub fn with_amp(self, amp: f64) -> Result<Self> {
        Self::new(self.kind, amp)
    }

    /// Carrier frequency: the tone mean for beats, otherwise `omega`.
    pub fn carrier(&self, omega: f64) -> f64 {
        match self.kind {
            EnvelopeKind::Beat { omega1, omega2 } => 0.5 * (omega1 + omega2),
            _ => omega,
        }
    }

    /// Signed amplitude `A(t)` for a pulse of length `duration`.
    /// Shapes are zero outside `[0, duration]` except beats, which are defined for all t.
    pub fn amplitude(&self, t: f64, duration: f64) -> f64 {
        match self.kind {
            EnvelopeKind::Constant => self.amp,
            EnvelopeKind::LinearRamp { fraction } => {
                if t < 0.0 || t > duration {
                    return 0.0;
                }
                let rise = fraction * duration;
                if rise == 0.0 {
                    return self.amp;
                }
                let edge = t.min(duration - t);
                self.amp * (edge / rise).min(1.0)
            }
            EnvelopeKind::Beat { omega1, omega2 } => self.amp * (0.5 * (omega1 - omega2) * t).cos(),
        }
    }

    /// `∫₀ᵗ A(s) ds` for a pulse of length `duration` (signed).
    pub fn area(&self, t: f64, duration: f64) -> f64 {
        match self.kind {
            EnvelopeKind::Beat { omega1, omega2 } => {
                let half = 0.5 * (omega1 - omega2);
                if half == 0.0 {
                    self.amp * t
                } else {
                    self.amp * (half * t).sin() / half
                }
            }
            _ => self.abs_area(t, duration),
        }
    }

    /// `∫₀ᵗ 2|A(s)| ds`: the rotation angle accumulated by time `t`.
    pub fn rotation_angle(&self, t: f64, duration: f64) -> f64 {
        2.0 * self.abs_area(t, duration)
    }

    fn abs_area(&self, t: f64, duration: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.kind {
            EnvelopeKind::Constant => self.amp * t,
            EnvelopeKind::LinearRamp { fraction } => {
                let t = t.min(duration);
                let rise = fraction * duration;
                let ramp_area = |u: f64| {
                    // area of the rising edge from 0 to u ≤ rise
                    if rise == 0.0 {
                        0.0
                    } else {
                        0.5 * self.amp * u * u / rise
                    }
                };
                if t <= rise {
                    ramp_area(t)
                } else if t <= duration - rise {
                    ramp_area(rise) + self.amp * (t - rise)
                } else {
                    let full = self.amp * (duration - rise);
                    full - ramp_area(duration - t)
                }
            }
            EnvelopeKind::Beat { omega1, omega2 } => {
                let half = (0.5 * (omega1 - omega2)).abs();
                if half == 0.0 {
                    return self.amp * t;
                }
                self.amp * abs_cos_integral(half * t) / half
            }
        }
    }

    /// Envelope with the amplitude multiplied by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.kind, self.amp * factor)
    }
}

/// `∫₀ᵘ |cos v| dv` for `u ≥ 0`.
fn abs_cos_integral(u: f64) -> f64 {
    let lobes = (u / PI).floor();
    let rem = u - lobes * PI;
    let partial = if rem <= 0.5 * PI {
        rem.sin()
    } else {
        2.0 - rem.sin()
    };
    2.0 * lobes + partial
}

/// Smallest `T` with `∫₀ᵀ 2|A(t)| dt = π`, where ramp shapes are stretched
/// over the pulse length `T` itself.
pub fn stopping_time(env: &Envelope) -> Result<f64> {
    if env.amp == 0.0 {
        return Err(Error::NoStoppingTime);
    }
    if let EnvelopeKind::Constant = env.kind {
        return Ok(PI / (2.0 * env.amp));
    }
    let angle = |t: f64| env.rotation_angle(t, t);
    let mut hi = PI / (2.0 * env.amp);
    let mut doublings = 0;
    while angle(hi) < PI {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 || !hi.is_finite() {
            return Err(Error::NoStoppingTime);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if angle(mid) < PI {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Which dynamics a DEH check runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DehSystem {
    /// `-(E/2)Z + 2A(t) cos(ωt + φ)X`, starting in `|0⟩`.
    QuantumFull { gap: f64, omega: f64 },
    /// The co-rotating field, starting in `|0⟩`.
    QuantumRwa { gap: f64, omega: f64 },
    /// A rotor starting at its low-energy orientation; the envelope amplitude
    /// replaces the drive amplitude in the parameters.
    ClassicalDipole(DipoleParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DehOptions {
    pub min_population: f64,
    pub steps_per_period: usize,
    pub scheme: Scheme,
}

impl Default for DehOptions {
    fn default() -> Self {
        DehOptions {
            min_population: 0.99,
            steps_per_period: qdyn::DEFAULT_STEPS_PER_PERIOD,
            scheme: Scheme::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DehReport {
    pub stopping_time: f64,
    /// `∫₀ᵀ A(t) dt`.
    pub amplitude_integral: f64,
    /// `∫₀ᵀ 2|A(t)| dt`, equal to π by construction.
    pub rotation_angle: f64,
    /// Final excited population per φ, in grid order.
    pub populations: Vec<f64>,
    pub min_population: f64,
    pub max_population: f64,
    pub mean_population: f64,
    pub stdev_population: f64,
    /// `max - min` over the ensemble.
    pub spread: f64,
    pub delta_e_min: f64,
    pub delta_e_max: f64,
    pub delta_e_mean: f64,
    pub tolerance: f64,
    pub population_threshold: f64,
    pub pass: bool,
}

pub fn deh_check(
    system: &DehSystem,
    env: &Envelope,
    phi_grid: &[f64],
    tolerance: f64,
) -> Result<DehReport> {
    deh_check_with(system, env, phi_grid, tolerance, &DehOptions::default())
}

/// Runs the protocol for each φ up to the flip time of `env` and summarises
/// the final populations and energy gains.
pub fn deh_check_with(
    system: &DehSystem,
    env: &Envelope,
    phi_grid: &[f64],
    tolerance: f64,
    opts: &DehOptions,
) -> Result<DehReport> {
    if phi_grid.is_empty() {
        return Err(Error::invalid(
            "phi_grid",
            "must contain at least one phase",
        ));
    }
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Error::invalid(
            "tolerance",
            format!("must be finite and >= 0, got {tolerance}"),
        ));
    }
    let flip_env = match system {
        DehSystem::ClassicalDipole(d) => {
            check_dipole(d)?;
            env.scaled(0.5 * d.kappa().abs())?
        }
        _ => *env,
    };
    let t_final = stopping_time(&flip_env)?;

    let mut samples = Vec::with_capacity(phi_grid.len());
    for &phi in phi_grid {
        let out = run_protocol(system, env, phi, t_final, opts)?;
        samples.push((out.population, out.delta_energy));
    }

    let n = samples.len() as f64;
    let populations: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let min = populations.iter().copied().fold(f64::INFINITY, f64::min);
    let max = populations
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mean = populations.iter().sum::<f64>() / n;
    let var = populations.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n;
    let energies = samples.iter().map(|s| s.1);
    let spread = max - min;
    Ok(DehReport {
        stopping_time: t_final,
        amplitude_integral: env.area(t_final, t_final),
        rotation_angle: flip_env.rotation_angle(t_final, t_final),
        min_population: min,
        max_population: max,
        mean_population: mean,
        stdev_population: var.sqrt(),
        spread,
        delta_e_min: energies.clone().fold(f64::INFINITY, f64::min),
        delta_e_max: energies.clone().fold(f64::NEG_INFINITY, f64::max),
        delta_e_mean: energies.sum::<f64>() / n,
        tolerance,
        population_threshold: opts.min_population,
        pass: spread <= tolerance && min >= opts.min_population,
        populations,
    })
}

fn check_dipole(d: &DipoleParams) -> Result<()> {
    d.validate()?;
    match d.coupling {
        DipoleCoupling::Llg { damping, .. } if damping != 0.0 => Err(Error::Unsupported(format!(
            "LLG damping {damping} is dissipative; only zero damping is supported"
        ))),
        _ => Ok(()),
    }
}

/// Result of one protocol run at a single phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolOutcome {
    /// Excited population, or `(1 - L̂·L̂0)/2` for the rotor.
    pub population: f64,
    /// Gain in bare energy.
    pub delta_energy: f64,
}

/// Runs one ensemble member for exactly `t_final`, with ramp shapes stretched
/// over `t_final`. No flip-time solving happens here.
pub fn run_protocol(
    system: &DehSystem,
    env: &Envelope,
    phi: f64,
    t_final: f64,
    opts: &DehOptions,
) -> Result<ProtocolOutcome> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::invalid(
            "t_final",
            format!("must be finite and > 0, got {t_final}"),
        ));
    }
    let (population, delta_energy) = run_member(system, env, phi, t_final, opts)?;
    Ok(ProtocolOutcome {
        population,
        delta_energy,
    })
}

/// Full statevector trajectory of a quantum protocol run, sampled at every
/// step. Uses the same stepping as [`run_protocol`], so the final record
/// matches its population exactly.
pub fn quantum_trajectory(
    system: &DehSystem,
    env: &Envelope,
    phi: f64,
    t_final: f64,
    opts: &DehOptions,
) -> Result<TimeSeries<QubitRecord>> {
    if let DehSystem::ClassicalDipole(_) = system {
        return Err(Error::Unsupported(
            "quantum_trajectory needs a quantum system".into(),
        ));
    }
    let (p, popts) = quantum_setup(system, env, phi, opts)?;
    let h = |t: f64| quantum_hamiltonian(system, env, &p, t, t_final);
    qdyn::propagate(StateVector::ground(), h, t_final, popts)
}

fn quantum_setup(
    system: &DehSystem,
    env: &Envelope,
    phi: f64,
    opts: &DehOptions,
) -> Result<(QubitParams, PropagateOptions)> {
    let (DehSystem::QuantumFull { gap, omega } | DehSystem::QuantumRwa { gap, omega }) = *system
    else {
        unreachable!("quantum_setup is only called for quantum systems")
    };
    let p = QubitParams::new(gap, env.amp(), env.carrier(omega), phi)?;
    let popts =
        PropagateOptions::per_period(p.period(), opts.steps_per_period).with_scheme(opts.scheme);
    Ok((p, popts))
}

fn quantum_hamiltonian(
    system: &DehSystem,
    env: &Envelope,
    p: &QubitParams,
    t: f64,
    t_final: f64,
) -> ComplexMatrix {
    let a = env.amplitude(t, t_final);
    if matches!(system, DehSystem::QuantumFull { .. }) {
        qdyn::h_full_with_amplitude(p, a, t)
    } else {
        qdyn::h_rwa_with_amplitude(p, a, t)
    }
}

fn run_member(
    system: &DehSystem,
    env: &Envelope,
    phi: f64,
    t_final: f64,
    opts: &DehOptions,
) -> Result<(f64, f64)> {
    match *system {
        DehSystem::QuantumFull { .. } | DehSystem::QuantumRwa { .. } => {
            let (p, popts) = quantum_setup(system, env, phi, opts)?;
            let psi0 = StateVector::ground();
            let h = |t: f64| quantum_hamiltonian(system, env, &p, t, t_final);
            let psi = qdyn::propagate_final(psi0, h, t_final, popts)?;
            let de = harvest::delta_energy(&psi0.density(), &psi.density(), &p.bare_hamiltonian())?;
            Ok((psi.excited_population(), de))
        }
        DehSystem::ClassicalDipole(d) => {
            check_dipole(&d)?;
            let d = DipoleParams {
                phase: phi,
                omega: env.carrier(d.omega),
                ..d
            };
            let l0 = d.low_energy_axis();
            let peak = env.amp() * 2.0 * d.kappa().abs();
            let rate = d.omega.max(d.precession_rate() + peak);
            let steps = ((t_final * rate / (2.0 * PI) * opts.steps_per_period as f64).ceil()
                as usize)
                .max(16);
            let field = RotationField::new(|t| {
                d.rotation_vector_with_amplitude(env.amplitude(t, t_final), t)
            });
            let series = bloch::integrate_cross(l0, &field, t_final, steps, opts.scheme)?;
            let (_, l) = series.last().expect("integration records the final step");
            let population = 0.5 * (1.0 - l.dot(l0) / (l.norm() * l0.norm()));
            Ok((population, d.static_energy(*l) - d.static_energy(l0)))
        }
    }
}

/// A potential `V_U` that, switched on for `τ`, takes eigenstate `i` of `H0`
/// to eigenstate `j` via `U = e^{iθ}|j⟩⟨i| + e^{iθ̃}|i⟩⟨j| + Σ_{k≠i,j} |k⟩⟨k|`.
///
/// Levels are indexed from 0 in ascending energy order. `U = exp(i(H0 + V_U)τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VuFamily {
    pub h0: ComplexMatrix,
    pub levels: Vec<f64>,
    /// Eigenvectors of `H0` as columns, matching `levels`.
    pub eigenvectors: ComplexMatrix,
    pub source: usize,
    pub target: usize,
    pub theta: f64,
    pub theta_tilde: f64,
    pub tau: f64,
    pub unitary: ComplexMatrix,
    pub potential: ComplexMatrix,
    /// `max|exp(i(H0 + V_U)τ) - U|`.
    pub exponential_error: f64,
    /// `max|U|i⟩⟨i|U† - |j⟩⟨j||`.
    pub transfer_error: f64,
}

impl VuFamily {
    /// `E_j - E_i`.
    pub fn energy_gain(&self) -> f64 {
        self.levels[self.target] - self.levels[self.source]
    }

    /// `|⟨j|U|i⟩|²` in the eigenbasis of `H0`.
    pub fn transfer_population(&self) -> f64 {
        let bra = self.eigenvectors.column(self.target);
        let ket = self.unitary.mul_vec(&self.eigenvectors.column(self.source));
        bra.iter()
            .zip(&ket)
            .map(|(b, k)| b.conj() * k)
            .sum::<C64>()
            .norm_sqr()
    }
}

pub fn vu_family(
    h0: &ComplexMatrix,
    source: usize,
    target: usize,
    theta: f64,
    theta_tilde: f64,
    tau: f64,
) -> Result<VuFamily> {
    let dim = h0.dim();
    if source == target || source >= dim || target >= dim {
        return Err(Error::invalid(
            "levels",
            format!("source {source} and target {target} must be distinct levels below {dim}"),
        ));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::invalid(
            "tau",
            format!("must be finite and > 0, got {tau}"),
        ));
    }
    if !(theta.is_finite() && theta_tilde.is_finite()) {
        return Err(Error::invalid("theta", "phases must be finite"));
    }
    let eig = smallmat::hermitian_eig(h0)?;
    let (ei, ej) = (eig.values[source], eig.values[target]);
    // written negated so NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(ej > ei) {
        return Err(Error::EnergyDirection {
            from: ei,
            target: ej,
        });
    }

    let v = eig.vectors;
    let mut swap = ComplexMatrix::zeros(dim);
    swap[(target, source)] = C64::from_polar(1.0, theta);
    swap[(source, target)] = C64::from_polar(1.0, theta_tilde);
    for k in (0..dim).filter(|&k| k != source && k != target) {
        swap[(k, k)] = C64::new(1.0, 0.0);
    }
    let unitary = v * swap * v.adjoint();

    let generator = smallmat::unitary_log(&unitary)?;
    let potential = ((generator - *h0 * tau) * (1.0 / tau)).hermitian_part();

    let rebuilt = smallmat::mat_exp_i(&(*h0 + potential), -tau)?;
    let exponential_error = rebuilt.max_abs_diff(&unitary);
    let proj = |k: usize| {
        let col = v.column(k);
        ComplexMatrix::from_fn(dim, |a, b| col[a] * col[b].conj())
    };
    let transfer_error = (unitary * proj(source) * unitary.adjoint()).max_abs_diff(&proj(target));
    if exponential_error > 1e-9 || transfer_error > 1e-12 {
        return Err(Error::NoConvergence);
    }
    Ok(VuFamily {
        h0: *h0,
        levels: eig.values,
        eigenvectors: v,
        source,
        target,
        theta,
        theta_tilde,
        tau,
        unitary,
        potential,
        exponential_error,
        transfer_error,
    })
}
