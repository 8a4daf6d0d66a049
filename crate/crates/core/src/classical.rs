//! Classical counterparts: the driven harmonic oscillator `m q̈ + k q = F0 cos(ωt + φ)`
//! and rigid rotors whose angular momentum precesses as `dL/dt = Ω(t) × L`.

use std::f64::consts::TAU;

use crate::bloch::{self, RotationField, Vec3};
use crate::error::{Error, Result};
use crate::protocol::{self, Envelope};
use crate::qdyn::{Scheme, TimeSeries};

/// `|ω - ω0|` at or below this uses the resonant closed form.
pub const RESONANCE_TOL: f64 = 1e-12;
/// Above [`RESONANCE_TOL`] but within this, the off-resonant closed form
/// loses accuracy to the `1/(ω0² - ω²)` factor and numerical integration is used.
pub const NEAR_RESONANCE_TOL: f64 = 1e-6;
/// Sensitivities at or below this count as phase independent.
pub const PHASE_INDEPENDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub mass: f64,
    pub spring: f64,
    pub force: f64,
    pub omega: f64,
    pub phase: f64,
    /// Initial position α.
    pub q0: f64,
    /// Initial velocity β.
    pub v0: f64,
}

impl OscillatorParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    name,
                    format!("must be finite and > 0, got {v}"),
                ))
            }
        };
        positive("mass", self.mass)?;
        positive("spring", self.spring)?;
        positive("omega", self.omega)?;
        for (name, v) in [
            ("force", self.force),
            ("phase", self.phase),
            ("q0", self.q0),
            ("v0", self.v0),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `ω0 = √(k/m)`.
    pub fn natural_frequency(&self) -> f64 {
        (self.spring / self.mass).sqrt()
    }

    pub fn regime(&self) -> Regime {
        let d = (self.omega - self.natural_frequency()).abs();
        if d <= RESONANCE_TOL {
            Regime::Resonant
        } else if d <= NEAR_RESONANCE_TOL {
            Regime::NearResonant
        } else {
            Regime::OffResonant
        }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        OscillatorParams { phase, ..self }
    }

    /// `½ k q² + ½ m q̇²`.
    pub fn energy(&self, s: OscState) -> f64 {
        0.5 * self.spring * s.q * s.q + 0.5 * self.mass * s.v * s.v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Resonant,
    /// Closed forms are ill-conditioned; evaluated by numerical integration.
    NearResonant,
    OffResonant,
}

/// Position and velocity, or their φ-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OscState {
    pub q: f64,
    pub v: f64,
}

/// Evaluates the trajectory in whichever regime `p` falls.
pub fn trajectory(p: &OscillatorParams, t: f64) -> Result<OscState> {
    p.validate()?;
    Ok(match p.regime() {
        Regime::Resonant => resonant_closed_form(p, t),
        Regime::OffResonant => offresonant_closed_form(p, t),
        Regime::NearResonant => numerical(p, t).0,
    })
}

/// Resonant closed form
/// `q = α cos ωt + [β/ω - F0 sin φ/(2mω²)] sin ωt + F0/(2mω) t sin(ωt + φ)`.
/// Off-resonant parameters are routed to [`offresonant_trajectory`].
pub fn resonant_trajectory(p: &OscillatorParams, t: f64) -> Result<OscState> {
    trajectory(p, t)
}

/// Off-resonant closed form
/// `q = (α - C cos φ) cos ω0t + (β + Cω sin φ)/ω0 sin ω0t + C cos(ωt + φ)` with
/// `C = F0 / (m(ω0² - ω²))`. Resonant parameters are routed to [`resonant_trajectory`].
pub fn offresonant_trajectory(p: &OscillatorParams, t: f64) -> Result<OscState> {
    trajectory(p, t)
}

/// `(∂q/∂φ, ∂q̇/∂φ)` at time `t`.
pub fn phase_sensitivity(p: &OscillatorParams, t: f64) -> Result<OscState> {
    p.validate()?;
    Ok(match p.regime() {
        Regime::Resonant => resonant_sensitivity(p, t),
        Regime::OffResonant => offresonant_sensitivity(p, t),
        Regime::NearResonant => numerical(p, t).1,
    })
}

fn resonant_closed_form(p: &OscillatorParams, t: f64) -> OscState {
    let w = p.omega;
    let d = p.force / (2.0 * p.mass * w);
    let b = p.v0 / w - d * p.phase.sin() / w;
    let (s, c) = (w * t).sin_cos();
    let (sp, cp) = (w * t + p.phase).sin_cos();
    OscState {
        q: p.q0 * c + b * s + d * t * sp,
        v: -p.q0 * w * s + b * w * c + d * (sp + w * t * cp),
    }
}

fn resonant_sensitivity(p: &OscillatorParams, t: f64) -> OscState {
    let w = p.omega;
    let d = p.force / (2.0 * p.mass * w);
    let (s, c) = (w * t).sin_cos();
    let (sp, cp) = (w * t + p.phase).sin_cos();
    let cos_phi = p.phase.cos();
    OscState {
        q: -d * cos_phi / w * s + d * t * cp,
        v: -d * cos_phi * c + d * (cp - w * t * sp),
    }
}

fn offresonant_closed_form(p: &OscillatorParams, t: f64) -> OscState {
    let (w, w0) = (p.omega, p.natural_frequency());
    let amp = p.force / (p.mass * (w0 * w0 - w * w));
    let a = p.q0 - amp * p.phase.cos();
    let b = (p.v0 + amp * w * p.phase.sin()) / w0;
    let (s0, c0) = (w0 * t).sin_cos();
    let (sp, cp) = (w * t + p.phase).sin_cos();
    OscState {
        q: a * c0 + b * s0 + amp * cp,
        v: -a * w0 * s0 + b * w0 * c0 - amp * w * sp,
    }
}

fn offresonant_sensitivity(p: &OscillatorParams, t: f64) -> OscState {
    let (w, w0) = (p.omega, p.natural_frequency());
    let amp = p.force / (p.mass * (w0 * w0 - w * w));
    let da = amp * p.phase.sin();
    let db = amp * w * p.phase.cos() / w0;
    let (s0, c0) = (w0 * t).sin_cos();
    let (sp, cp) = (w * t + p.phase).sin_cos();
    OscState {
        q: da * c0 + db * s0 - amp * sp,
        v: -da * w0 * s0 + db * w0 * c0 - amp * w * cp,
    }
}

/// RK4 on the trajectory and its φ-derivative, which obeys
/// `m s̈ + k s = -F0 sin(ωt + φ)` with zero initial data.
fn numerical(p: &OscillatorParams, t: f64) -> (OscState, OscState) {
    if t == 0.0 {
        return (OscState { q: p.q0, v: p.v0 }, OscState::default());
    }
    let fastest = p.omega.max(p.natural_frequency());
    let n = ((t.abs() * fastest / TAU * 2000.0).ceil() as usize).max(100);
    let dt = t / n as f64;
    let (m, k, f0) = (p.mass, p.spring, p.force);
    let rhs = |time: f64, y: [f64; 4]| -> [f64; 4] {
        let (s, c) = (p.omega * time + p.phase).sin_cos();
        [
            y[1],
            (f0 * c - k * y[0]) / m,
            y[3],
            (-f0 * s - k * y[2]) / m,
        ]
    };
    let mut y = [p.q0, p.v0, 0.0, 0.0];
    for i in 0..n {
        let t0 = dt * i as f64;
        let k1 = rhs(t0, y);
        let k2 = rhs(t0 + 0.5 * dt, add(y, k1, 0.5 * dt));
        let k3 = rhs(t0 + 0.5 * dt, add(y, k2, 0.5 * dt));
        let k4 = rhs(t0 + dt, add(y, k3, dt));
        for j in 0..4 {
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    (OscState { q: y[0], v: y[1] }, OscState { q: y[2], v: y[3] })
}

fn add(y: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [
        y[0] + h * k[0],
        y[1] + h * k[1],
        y[2] + h * k[2],
        y[3] + h * k[3],
    ]
}

/// `E(T) - E(0)` of the mechanical energy `½kq² + ½mq̇²`.
pub fn oscillator_delta_energy(p: &OscillatorParams, t: f64) -> Result<f64> {
    let start = OscState { q: p.q0, v: p.v0 };
    Ok(p.energy(trajectory(p, t)?) - p.energy(start))
}

/// Whether the off-resonant solution at `T` is φ-independent, which needs
/// `cos ωT = cos ω0T = ±1` and `sin ωT = sin ω0T = 0`.
pub fn phase_constraints_hold(p: &OscillatorParams, t: f64, tol: f64) -> bool {
    let w0 = p.natural_frequency();
    let (s, c) = (p.omega * t).sin_cos();
    let (s0, c0) = (w0 * t).sin_cos();
    s.abs() <= tol && s0.abs() <= tol && (c - c0).abs() <= tol && (c.abs() - 1.0).abs() <= tol
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureRow {
    pub t: f64,
    pub max_dq_dphi: f64,
    pub max_dqdot_dphi: f64,
    pub delta_e_min: f64,
    pub delta_e_max: f64,
    /// Both sensitivities vanish (to [`PHASE_INDEPENDENCE_TOL`]) for every φ.
    pub phase_independent: bool,
    /// `Some(ΔE = 0 to 1e-9)` where the off-resonant constraints hold.
    pub zero_gain_certified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureReport {
    pub regime: Regime,
    pub rows: Vec<FailureRow>,
}

impl FailureReport {
    /// True when no grid time gives a φ-independent final state with
    /// nonzero energy gain, i.e. DEH is excluded on this grid.
    pub fn deh_excluded(&self) -> bool {
        self.rows.iter().all(|r| {
            !r.phase_independent || (r.delta_e_min.abs() <= 1e-9 && r.delta_e_max.abs() <= 1e-9)
        })
    }

    /// Smallest `max_φ |∂q/∂φ|` over the time grid.
    pub fn min_position_sensitivity(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.max_dq_dphi)
            .fold(f64::INFINITY, f64::min)
    }
}

/// For each `T`, the worst-case φ-sensitivity of the final state and the
/// spread of the energy gain over the φ grid.
pub fn deh_failure_certificate(
    p: &OscillatorParams,
    t_grid: &[f64],
    phi_grid: &[f64],
) -> Result<FailureReport> {
    p.validate()?;
    if t_grid.is_empty() || phi_grid.is_empty() {
        return Err(Error::invalid(
            "grid",
            "time and phase grids must be non-empty",
        ));
    }
    let regime = p.regime();
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut row = FailureRow {
            t,
            max_dq_dphi: 0.0,
            max_dqdot_dphi: 0.0,
            delta_e_min: f64::INFINITY,
            delta_e_max: f64::NEG_INFINITY,
            phase_independent: false,
            zero_gain_certified: None,
        };
        for &phi in phi_grid {
            let q = p.with_phase(phi);
            let s = phase_sensitivity(&q, t)?;
            row.max_dq_dphi = row.max_dq_dphi.max(s.q.abs());
            row.max_dqdot_dphi = row.max_dqdot_dphi.max(s.v.abs());
            let de = oscillator_delta_energy(&q, t)?;
            row.delta_e_min = row.delta_e_min.min(de);
            row.delta_e_max = row.delta_e_max.max(de);
        }
        row.phase_independent = row.max_dq_dphi <= PHASE_INDEPENDENCE_TOL
            && row.max_dqdot_dphi <= PHASE_INDEPENDENCE_TOL;
        if regime == Regime::OffResonant && phase_constraints_hold(p, t, 1e-9) {
            row.zero_gain_certified =
                Some(row.delta_e_min.abs() <= 1e-9 && row.delta_e_max.abs() <= 1e-9);
        }
        rows.push(row);
    }
    Ok(FailureReport { regime, rows })
}

/// How the drive field couples to the rotor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DipoleCoupling {
    /// Rigid charged body with `L = α d`: `dL/dt = -(1/α) E × L`.
    Electric { alpha: f64 },
    /// Magnetic moment `μ = β L`: `dL/dt = β L × B`.
    Magnetic { beta: f64 },
    /// Landau-Lifshitz-Gilbert `dr/dt = -γ r × B`; only zero damping is integrable here.
    Llg { gamma: f64, damping: f64 },
}

/// A rotor in the field `F(t) = (2A cos(ωt + φ), 0, F_static)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleParams {
    pub coupling: DipoleCoupling,
    pub static_field: f64,
    /// Half the peak transverse field, matching the qubit amplitude convention.
    pub amp: f64,
    pub omega: f64,
    pub phase: f64,
    pub inertia: f64,
}

impl DipoleParams {
    pub fn validate(&self) -> Result<()> {
        match self.coupling {
            DipoleCoupling::Electric { alpha } if !(alpha.is_finite() && alpha != 0.0) => {
                return Err(Error::invalid(
                    "coupling",
                    format!("alpha must be finite and nonzero, got {alpha}"),
                ));
            }
            DipoleCoupling::Magnetic { beta } if !(beta.is_finite() && beta != 0.0) => {
                return Err(Error::invalid(
                    "coupling",
                    format!("beta must be finite and nonzero, got {beta}"),
                ));
            }
            DipoleCoupling::Llg { gamma, damping } => {
                if !(gamma.is_finite() && gamma != 0.0) {
                    return Err(Error::invalid(
                        "coupling",
                        format!("gamma must be finite and nonzero, got {gamma}"),
                    ));
                }
                if !(damping.is_finite() && damping >= 0.0) {
                    return Err(Error::invalid(
                        "damping",
                        format!("must be finite and >= 0, got {damping}"),
                    ));
                }
            }
            _ => {}
        }
        if !(self.inertia.is_finite() && self.inertia > 0.0) {
            return Err(Error::invalid(
                "inertia",
                format!("must be finite and > 0, got {}", self.inertia),
            ));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid(
                "omega",
                format!("must be finite and > 0, got {}", self.omega),
            ));
        }
        for (name, v) in [
            ("static_field", self.static_field),
            ("amp", self.amp),
            ("phase", self.phase),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// `Ω = κ F` with `κ = -1/α`, `-β` or `γ`.
    pub fn kappa(&self) -> f64 {
        match self.coupling {
            DipoleCoupling::Electric { alpha } => -1.0 / alpha,
            DipoleCoupling::Magnetic { beta } => -beta,
            DipoleCoupling::Llg { gamma, .. } => gamma,
        }
    }

    pub fn field(&self, amp: f64, t: f64) -> Vec3 {
        Vec3::new(
            2.0 * amp * (self.omega * t + self.phase).cos(),
            0.0,
            self.static_field,
        )
    }

    pub fn rotation_vector(&self, t: f64) -> Vec3 {
        self.rotation_vector_with_amplitude(self.amp, t)
    }

    pub fn rotation_vector_with_amplitude(&self, amp: f64, t: f64) -> Vec3 {
        self.field(amp, t) * self.kappa()
    }

    /// Free precession rate `|κ F_static|`; the drive is resonant when `ω` equals it.
    pub fn precession_rate(&self) -> f64 {
        (self.kappa() * self.static_field).abs()
    }

    /// Amplitude of the co-rotating half of the linear drive, in the qubit
    /// convention where a constant amplitude `A` flips in `π/(2A)`.
    ///
    /// The drive adds `2A κ cos θ x̂` to `Ω`, a sum of two circular components
    /// of strength `|κ|A`. The co-rotating one turns the rotor at rate `|κ|A`,
    /// which corresponds to qubit amplitude `|κ|A/2`.
    pub fn effective_amplitude(&self) -> f64 {
        0.5 * self.kappa().abs() * self.amp
    }

    /// Orientation of lowest static interaction energy.
    pub fn low_energy_axis(&self) -> Vec3 {
        let slope = self.energy_sign() * self.static_field;
        Vec3::new(0.0, 0.0, if slope < 0.0 { 1.0 } else { -1.0 })
    }

    /// Interaction energy is `energy_sign · L·F`.
    fn energy_sign(&self) -> f64 {
        match self.coupling {
            DipoleCoupling::Electric { alpha } => -1.0 / alpha,
            DipoleCoupling::Magnetic { beta } => -beta,
            DipoleCoupling::Llg { .. } => -1.0,
        }
    }

    /// `|L|²/(2I)` plus the static interaction energy
    /// (`-(1/α) L·E`, `-β L·B`, or `-r·B`).
    pub fn static_energy(&self, l: Vec3) -> f64 {
        l.dot(l) / (2.0 * self.inertia) + self.energy_sign() * l.z * self.static_field
    }

    /// As [`DipoleParams::static_energy`] with the instantaneous drive included.
    pub fn energy(&self, l: Vec3, t: f64) -> f64 {
        l.dot(l) / (2.0 * self.inertia) + self.energy_sign() * l.dot(self.field(self.amp, t))
    }
}

/// Flip time of a resonant constant drive, from the rotation-angle condition
/// applied to [`DipoleParams::effective_amplitude`].
pub fn dipole_flip_time(p: &DipoleParams) -> Result<f64> {
    p.validate()?;
    protocol::stopping_time(&Envelope::constant(p.effective_amplitude())?)
}

/// Rotor dynamics through [`bloch::integrate_cross`]; refuses nonzero LLG damping.
pub fn integrate_dipole(
    p: &DipoleParams,
    l0: Vec3,
    t_final: f64,
    steps: usize,
) -> Result<TimeSeries<Vec3>> {
    p.validate()?;
    if let DipoleCoupling::Llg { damping, .. } = p.coupling {
        if damping != 0.0 {
            return Err(Error::Unsupported(format!(
                "LLG damping {damping} is dissipative; only zero damping is supported"
            )));
        }
    }
    let field = RotationField::new(|t| p.rotation_vector(t));
    bloch::integrate_cross(l0, &field, t_final, steps, Scheme::default())
}
