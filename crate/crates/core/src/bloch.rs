//! Bloch-vector geometry and the rotation integrator for `dr/dt = Ω × r`.
//!
//! The same engine drives qubit Bloch vectors, rigid-dipole angular momenta
//! and undamped magnetization, which differ only in how `Ω(t)` is built.

use std::f64::consts::TAU;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::qdyn::{QubitParams, Scheme, TimeSeries, CF4_A1, CF4_A2, CF4_NODES};

/// Largest rotation angle allowed in a single step.
pub const MAX_STEP_ANGLE: f64 = TAU / 16.0;
/// Relative norm drift that aborts an integration.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub const fn zero() -> Self {
        Vec3::new(0.0, 0.0, 0.0)
    }

    pub const fn unit_z() -> Self {
        Vec3::new(0.0, 0.0, 1.0)
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Right-handed rotation of `self` about `axis` by `angle` (Rodrigues).
    /// A zero axis leaves the vector unchanged.
    pub fn rotate_about(self, axis: Vec3, angle: f64) -> Vec3 {
        let n = axis.norm();
        if n == 0.0 || angle == 0.0 {
            return self;
        }
        let k = axis * (1.0 / n);
        let (s, c) = angle.sin_cos();
        self * c + k.cross(self) * s + k * (k.dot(self) * (1.0 - c))
    }

    /// `R_z(angle)·self`.
    pub fn rotate_z(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Rabi vector of [`crate::qdyn::h_rwa`]: `(2A cos θ, -2A sin θ, -E)` with `θ = ωt + φ`.
pub fn rabi_vector(p: &QubitParams, t: f64) -> Vec3 {
    rabi_vector_with_amplitude(p, p.amp(), t)
}

pub fn rabi_vector_with_amplitude(p: &QubitParams, amp: f64, t: f64) -> Vec3 {
    let (s, c) = (p.omega() * t + p.phase()).sin_cos();
    Vec3::new(2.0 * amp * c, -2.0 * amp * s, -p.gap())
}

/// Rabi vector of the full linear drive `-(E/2)Z + 2A cos θ X`: `(4A cos θ, 0, -E)`.
pub fn full_rabi_vector(p: &QubitParams, t: f64) -> Vec3 {
    let c = (p.omega() * t + p.phase()).cos();
    Vec3::new(4.0 * p.amp() * c, 0.0, -p.gap())
}

/// Time-independent Rabi vector of the RWA drive seen from the co-rotating
/// frame: `(2A cos φ, -2A sin φ, ω - E)`. Equatorial at resonance.
pub fn rotating_rabi_vector(p: &QubitParams) -> Vec3 {
    RotatingFrame::co_rotating(p).rabi_to_frame(rabi_vector(p, 0.0), 0.0)
}

/// `R_z(angle)⁻¹ v`: the coordinates of `v` in axes turned by `angle` about z.
pub fn to_rotating_frame(v: Vec3, angle: f64) -> Vec3 {
    v.rotate_z(-angle)
}

/// Axes turning about z at `rate`, so lab coordinates are `r = R_z(rate·t) r'`.
///
/// A vector obeying `dr/dt = Ω × r` obeys `dr'/dt = Ω' × r'` with
/// `Ω' = R_z(rate·t)⁻¹ Ω - rate·ẑ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingFrame {
    pub rate: f64,
}

impl RotatingFrame {
    /// The frame turning with the qubit drive. The RWA Rabi vector turns by
    /// `-(ωt + φ)` about z, so the frame rate is `-ω`.
    pub fn co_rotating(p: &QubitParams) -> Self {
        RotatingFrame { rate: -p.omega() }
    }

    pub fn to_frame(&self, v: Vec3, t: f64) -> Vec3 {
        to_rotating_frame(v, self.rate * t)
    }

    pub fn from_frame(&self, v: Vec3, t: f64) -> Vec3 {
        v.rotate_z(self.rate * t)
    }

    pub fn rabi_to_frame(&self, omega: Vec3, t: f64) -> Vec3 {
        self.to_frame(omega, t) - Vec3::unit_z() * self.rate
    }
}

/// Instantaneous rotation vector `Ω(t)`.
pub struct RotationField<F> {
    omega_fn: F,
}

impl<F: Fn(f64) -> Vec3> RotationField<F> {
    pub fn new(omega_fn: F) -> Self {
        RotationField { omega_fn }
    }

    pub fn at(&self, t: f64) -> Vec3 {
        (self.omega_fn)(t)
    }
}

/// A constant field.
pub fn constant_field(omega: Vec3) -> RotationField<impl Fn(f64) -> Vec3> {
    RotationField::new(move |_| omega)
}

/// Steps giving 200 per period of the faster of `rate` and the field strength.
pub fn default_steps(t_final: f64, max_rate: f64) -> usize {
    ((200.0 * t_final * max_rate / TAU).ceil() as usize).max(16)
}

/// Integrates `dr/dt = Ω(t) × r` (equivalently `-r × Ω`) from `t = 0` to
/// `t_final` using `steps` exact rotations, recording every step including
/// the initial vector.
///
/// With [`Scheme::Midpoint`] each step rotates about `Ω(t + Δt/2)`. With
/// [`Scheme::Magnus4`] each step is two rotations about Gauss-point
/// combinations of `Ω`, matching the quantum propagator step for step.
pub fn integrate_cross<F>(
    r0: Vec3,
    field: &RotationField<F>,
    t_final: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<TimeSeries<Vec3>>
where
    F: Fn(f64) -> Vec3,
{
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::invalid(
            "t_final",
            format!("must be finite and > 0, got {t_final}"),
        ));
    }
    if steps == 0 {
        return Err(Error::invalid("steps", "must be at least 1"));
    }
    if !r0.is_finite() {
        return Err(Error::invalid("r0", "components must be finite"));
    }
    let dt = t_final / steps as f64;
    let norm0 = r0.norm();
    let mut series = TimeSeries::with_capacity(steps + 1);
    series.push(0.0, r0);
    let mut r = r0;
    for k in 0..steps {
        let t0 = dt * k as f64;
        let axes: [Option<Vec3>; 2] = match scheme {
            Scheme::Midpoint => [Some(field.at(t0 + 0.5 * dt)), None],
            Scheme::Magnus4 => {
                let w1 = field.at(t0 + CF4_NODES[0] * dt);
                let w2 = field.at(t0 + CF4_NODES[1] * dt);
                [
                    Some(w1 * CF4_A2 + w2 * CF4_A1),
                    Some(w1 * CF4_A1 + w2 * CF4_A2),
                ]
            }
        };
        for w in axes.into_iter().flatten() {
            if !w.is_finite() {
                return Err(Error::invalid(
                    "field",
                    format!("non-finite rotation vector at t = {t0}"),
                ));
            }
            let angle = w.norm() * dt;
            if angle > MAX_STEP_ANGLE {
                return Err(Error::InsufficientSteps {
                    angle,
                    limit: MAX_STEP_ANGLE,
                });
            }
            r = r.rotate_about(w, angle);
        }
        let drift = if norm0 > 0.0 {
            (r.norm() - norm0).abs() / norm0
        } else {
            r.norm()
        };
        // written negated so NaN is rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(drift <= NORM_DRIFT_LIMIT) {
            return Err(Error::IntegrationFailure {
                drift,
                limit: NORM_DRIFT_LIMIT,
            });
        }
        let t = if k + 1 == steps {
            t_final
        } else {
            dt * (k + 1) as f64
        };
        series.push(t, r);
    }
    Ok(series)
}
