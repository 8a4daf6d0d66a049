//! Reference computations that share no code with `deh-core`: plain RK4
//! integrators, a Taylor-series matrix exponential, and textbook closed forms.
//! The acceptance run checks the library against these.

use num_complex::Complex64 as C;

pub type Mat = Vec<Vec<C>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        C::new(1.0, 0.0)
                    } else {
                        C::new(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `exp(m)` by scaling and squaring a 30-term Taylor series.
pub fn expm(m: &Mat) -> Mat {
    let n = m.len();
    let norm: f64 = m.iter().flatten().map(|z| z.norm()).sum();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let a: Mat = m
        .iter()
        .map(|r| r.iter().map(|z| z * scale).collect())
        .collect();
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=30 {
        term = matmul(&term, &a);
        let inv = 1.0 / k as f64;
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z *= inv;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// RK4 on `i dψ/dt = H(t) ψ` for a qubit.
pub fn schrodinger_rk4(
    h: impl Fn(f64) -> [[C; 2]; 2],
    psi0: [C; 2],
    t_final: f64,
    steps: usize,
) -> [C; 2] {
    let rhs = |t: f64, psi: [C; 2]| -> [C; 2] {
        let m = h(t);
        let mi = C::new(0.0, -1.0);
        [
            mi * (m[0][0] * psi[0] + m[0][1] * psi[1]),
            mi * (m[1][0] * psi[0] + m[1][1] * psi[1]),
        ]
    };
    let axpy = |y: [C; 2], k: [C; 2], s: f64| [y[0] + k[0] * s, y[1] + k[1] * s];
    let dt = t_final / steps as f64;
    let mut psi = psi0;
    for i in 0..steps {
        let t = dt * i as f64;
        let k1 = rhs(t, psi);
        let k2 = rhs(t + 0.5 * dt, axpy(psi, k1, 0.5 * dt));
        let k3 = rhs(t + 0.5 * dt, axpy(psi, k2, 0.5 * dt));
        let k4 = rhs(t + dt, axpy(psi, k3, dt));
        for j in 0..2 {
            psi[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (dt / 6.0);
        }
    }
    psi
}

/// `-(E/2)Z + 2A cos(ωt + φ)X` written out element by element.
pub fn full_hamiltonian(gap: f64, amp: f64, omega: f64, phase: f64, t: f64) -> [[C; 2]; 2] {
    let x = 2.0 * amp * (omega * t + phase).cos();
    [
        [C::new(-0.5 * gap, 0.0), C::new(x, 0.0)],
        [C::new(x, 0.0), C::new(0.5 * gap, 0.0)],
    ]
}

/// Excited population after a constant-amplitude full-Hamiltonian run from
/// the ground state, by RK4.
pub fn full_population_rk4(
    gap: f64,
    amp: f64,
    omega: f64,
    phase: f64,
    t_final: f64,
    steps: usize,
) -> f64 {
    let psi = schrodinger_rk4(
        |t| full_hamiltonian(gap, amp, omega, phase, t),
        [C::new(1.0, 0.0), C::new(0.0, 0.0)],
        t_final,
        steps,
    );
    psi[1].norm_sqr() / (psi[0].norm_sqr() + psi[1].norm_sqr())
}

/// Rabi's formula for a co-rotating drive of Pauli amplitude `A` and
/// detuning `Δ`: `p = Ω²/(Ω²+Δ²) sin²(√(Ω²+Δ²) t/2)`, `Ω = 2A`.
pub fn rabi_population(amp: f64, detuning: f64, t: f64) -> f64 {
    let w2 = 4.0 * amp * amp;
    let g = (w2 + detuning * detuning).sqrt();
    w2 / (g * g) * (0.5 * g * t).sin().powi(2)
}

/// `-p log2 p - (1-p) log2(1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// RK4 on `m q̈ + k q = F0 cos(ωt + φ)`, returning `(q, q̇)` at `t_final`.
#[allow(clippy::too_many_arguments)]
pub fn oscillator_rk4(
    mass: f64,
    spring: f64,
    force: f64,
    omega: f64,
    phase: f64,
    q0: f64,
    v0: f64,
    t_final: f64,
    steps: usize,
) -> (f64, f64) {
    let rhs = |t: f64, y: [f64; 2]| {
        [
            y[1],
            (force * (omega * t + phase).cos() - spring * y[0]) / mass,
        ]
    };
    let dt = t_final / steps as f64;
    let mut y = [q0, v0];
    for i in 0..steps {
        let t = dt * i as f64;
        let k1 = rhs(t, y);
        let k2 = rhs(
            t + 0.5 * dt,
            [y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]],
        );
        let k3 = rhs(
            t + 0.5 * dt,
            [y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]],
        );
        let k4 = rhs(t + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
        for j in 0..2 {
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    (y[0], y[1])
}
