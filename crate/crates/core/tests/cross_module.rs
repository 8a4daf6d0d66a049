use std::f64::consts::PI;

use deh_core::bloch::{self, RotatingFrame, RotationField, Vec3};
use deh_core::classical::{self, DipoleCoupling, DipoleParams};
use deh_core::harvest;
use deh_core::protocol::{self, DehSystem, Envelope};
use deh_core::qdyn::{self, phi_grid, PropagateOptions, QubitParams, Scheme, StateVector};
use deh_core::smallmat::{self, ComplexMatrix};

#[test]
fn closed_form_cycle_harvests_the_gap() {
    for gap in [0.5, 1.0, 3.0] {
        let p = QubitParams::resonant(gap, 0.02, 1.7).unwrap();
        let u = qdyn::closed_form_propagator(&p, qdyn::flip_time(0.02).unwrap()).unwrap();
        let psi0 = StateVector::ground();
        let psi = psi0.apply(&u).unwrap();
        let de =
            harvest::delta_energy(&psi0.density(), &psi.density(), &p.bare_hamiltonian()).unwrap();
        assert!((de - gap).abs() <= 1e-9);
    }
}

#[test]
fn full_hamiltonian_energy_gain_tracks_population() {
    let p = QubitParams::resonant(1.0, 0.05, 0.9).unwrap();
    let t = qdyn::flip_time(0.05).unwrap();
    let psi0 = StateVector::ground();
    let psi = qdyn::propagate_final(
        psi0,
        |s| qdyn::h_full(&p, s),
        t,
        PropagateOptions::for_params(&p),
    )
    .unwrap();
    let de = harvest::delta_energy(&psi0.density(), &psi.density(), &p.bare_hamiltonian()).unwrap();
    assert!((de - psi.excited_population()).abs() < 1e-12);
    assert!(de > 0.99);
}

#[test]
fn entropy_trace_oscillates() {
    let p = QubitParams::resonant(1.0, 0.05, 0.0).unwrap();
    let t_flip = qdyn::flip_time(0.05).unwrap();
    let mut peak: f64 = 0.0;
    for k in 0..=200 {
        let t = 2.0 * t_flip * k as f64 / 200.0;
        let rho = qdyn::phi_averaged_state(&p, t).unwrap();
        let s = qdyn::von_neumann_entropy(&rho);
        assert!((0.0..=1.0 + 1e-12).contains(&s));
        peak = peak.max(s);
    }
    assert!((peak - 1.0).abs() < 1e-9);
    // two full flips return to the ground state
    let back = qdyn::phi_averaged_state(&p, 2.0 * t_flip).unwrap();
    assert!(qdyn::von_neumann_entropy(&back) < 1e-9);
}

#[test]
fn rotating_frame_integration_reproduces_quantum_populations() {
    let p = QubitParams::resonant(1.0, 0.03, 2.2).unwrap();
    let frame = RotatingFrame::co_rotating(&p);
    let t = qdyn::flip_time(0.03).unwrap();
    let rot = bloch::integrate_cross(
        Vec3::unit_z(),
        &bloch::constant_field(bloch::rotating_rabi_vector(&p)),
        t,
        500,
        Scheme::Midpoint,
    )
    .unwrap();
    for (s, r) in rot.iter().step_by(50) {
        let lab = frame.from_frame(*r, s);
        let psi = StateVector::ground()
            .apply(&qdyn::closed_form_propagator(&p, s).unwrap())
            .unwrap();
        assert!((lab - psi.bloch_vector()).norm() < 1e-9, "t = {s}");
    }
}

#[test]
fn llg_without_damping_is_a_rotation() {
    let d = DipoleParams {
        coupling: DipoleCoupling::Llg {
            gamma: 1.0,
            damping: 0.0,
        },
        static_field: -1.0,
        amp: 0.01,
        omega: 1.0,
        phase: 0.3,
        inertia: 1.0,
    };
    let m0 = Vec3::new(0.0, 0.0, 1.0);
    let t = classical::dipole_flip_time(&d).unwrap();
    let series = classical::integrate_dipole(&d, m0, t, bloch::default_steps(t, 1.0)).unwrap();
    for (_, m) in series.iter() {
        assert!((m.norm() - 1.0).abs() < 1e-10);
    }
    assert!(series.last().unwrap().1.z < -0.995);
}

#[test]
fn dipole_energy_is_conserved_without_drive() {
    let d = DipoleParams {
        coupling: DipoleCoupling::Electric { alpha: 2.0 },
        static_field: 1.5,
        amp: 0.0,
        omega: 0.75,
        phase: 0.0,
        inertia: 0.5,
    };
    let l0 = Vec3::new(0.4, -0.3, 0.2);
    let series = classical::integrate_dipole(&d, l0, 30.0, 1000).unwrap();
    let e0 = d.energy(l0, 0.0);
    for (t, l) in series.iter() {
        assert!((d.energy(*l, t) - e0).abs() < 1e-12);
    }
}

#[test]
fn dipole_check_rejects_damping() {
    let d = DipoleParams {
        coupling: DipoleCoupling::Llg {
            gamma: 1.0,
            damping: 0.05,
        },
        static_field: 1.0,
        amp: 0.01,
        omega: 1.0,
        phase: 0.0,
        inertia: 1.0,
    };
    let env = Envelope::constant(0.01).unwrap();
    let err = protocol::deh_check(&DehSystem::ClassicalDipole(d), &env, &phi_grid(4), 0.01);
    assert!(err.is_err());
}

#[test]
fn beat_envelope_drives_past_the_node() {
    // With a signed envelope the rotation reverses after the first node,
    // so the beat protocol does not reach the excited state.
    let env = Envelope::beat(0.05, 1.05, 0.95).unwrap();
    let t = protocol::stopping_time(&env).unwrap();
    let rep = protocol::deh_check(
        &DehSystem::QuantumRwa {
            gap: 1.0,
            omega: 1.0,
        },
        &env,
        &phi_grid(8),
        0.01,
    )
    .unwrap();
    assert!((rep.rotation_angle - PI).abs() < 1e-12);
    assert!(rep.spread < 1e-6);
    assert!(rep.max_population < 0.99);
    let net = 2.0 * env.area(t, t);
    assert!((rep.mean_population - (0.5 * net).sin().powi(2)).abs() < 1e-6);
}

#[test]
fn slow_beat_acts_like_a_smooth_pulse() {
    // A beat whose first lobe carries the whole rotation flips deterministically.
    let env = Envelope::beat(0.05, 1.01, 0.99).unwrap();
    let rep = protocol::deh_check(
        &DehSystem::QuantumRwa {
            gap: 1.0,
            omega: 1.0,
        },
        &env,
        &phi_grid(8),
        0.01,
    )
    .unwrap();
    assert!(rep.stopping_time < PI / 0.01);
    assert!(rep.min_population > 1.0 - 1e-6);
}

#[test]
fn potential_matches_prescribed_transfer_for_every_pair() {
    let h0 = ComplexMatrix::from_real_diagonal(&[-1.0, 0.0, 1.0]).unwrap();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let fam = protocol::vu_family(&h0, i, j, 0.3, 1.2, 0.7).unwrap();
        let rebuilt = smallmat::mat_exp_i(&(h0 + fam.potential), -0.7).unwrap();
        assert!(rebuilt.max_abs_diff(&fam.unitary) <= 1e-9);
        assert!((fam.transfer_population() - 1.0).abs() < 1e-12);
        assert_eq!(fam.energy_gain(), (j as f64) - (i as f64));
    }
}

#[test]
fn propagation_under_a_custom_field() {
    // A propagator driven by an arbitrary closure agrees with the Bloch engine.
    let h = |t: f64| smallmat::pauli_x() * (0.1 * (0.3 * t).sin()) + smallmat::pauli_z() * 0.2;
    let omega = |t: f64| Vec3::new(0.2 * (0.3 * t).sin(), 0.0, 0.4);
    let psi =
        qdyn::propagate(StateVector::ground(), h, 25.0, PropagateOptions::fixed(800)).unwrap();
    let r = bloch::integrate_cross(
        Vec3::unit_z(),
        &RotationField::new(omega),
        25.0,
        800,
        Scheme::Magnus4,
    )
    .unwrap();
    for ((_, a), (_, b)) in psi.iter().zip(r.iter()) {
        assert!((a.bloch - *b).norm() < 1e-12);
    }
}
