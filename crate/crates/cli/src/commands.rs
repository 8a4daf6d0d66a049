//! One function per subcommand, each producing a [`Document`].

use std::f64::consts::TAU;

use deh_core::bloch::Vec3;
use deh_core::classical::{self, DipoleCoupling, DipoleParams, OscillatorParams};
use deh_core::harvest::{self, FrequencyConvention, HarvestModel, SI};
use deh_core::protocol::{self, DehSystem};
use deh_core::qdyn::{self, QubitParams, StateVector};
use deh_core::smallmat::ComplexMatrix;

use crate::config::{ClassicalSystem, Cli, Command, RunConfig, TFinal};
use crate::emit::{self, Document, Table};
use crate::error::CliError;
use crate::sweep::{self, CellPoint};

/// Resolves the configuration, then either prints it or runs and emits.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    let (command, args) = cli.command.into_parts();
    let show = args.show_config;
    let cfg = RunConfig::resolve(command, args)?;
    if show {
        return emit::write_output(None, &cfg.echo_toml()?);
    }
    let doc = run(&cfg)?;
    let text = emit::render(&doc, cfg.format)?;
    emit::write_output(cfg.out.as_deref(), &text)
}

pub fn run(cfg: &RunConfig) -> Result<Document, CliError> {
    let (table, notes) = match cfg.command {
        Command::Simulate => simulate(cfg)?,
        Command::Sweep => (sweep::run_sweep(cfg)?, Vec::new()),
        Command::Classical => match cfg.system {
            ClassicalSystem::Oscillator => oscillator(cfg)?,
            _ => rotor(cfg)?,
        },
        Command::Entropy => entropy(cfg)?,
        Command::Vu => vu(cfg)?,
        Command::Power => power(cfg)?,
    };
    Ok(Document {
        config: cfg.echo(),
        notes,
        table,
    })
}

/// Indices `0..=n` thinned to about `points` evenly spaced entries,
/// always including both ends.
fn sample_indices(n: usize, points: usize) -> Vec<usize> {
    if points > n {
        return (0..=n).collect();
    }
    let mut idx: Vec<usize> = (0..points)
        .map(|k| ((k as f64) * n as f64 / (points - 1) as f64).round() as usize)
        .collect();
    idx.dedup();
    idx
}

fn simulate(cfg: &RunConfig) -> Result<(Table, Vec<String>), CliError> {
    let s = sweep::setup(cfg, &CellPoint::default())?;
    let opts = sweep::options(cfg);
    let traj = protocol::quantum_trajectory(&s.system, &s.env, cfg.phase, s.t_final, &opts)?;
    let (DehSystem::QuantumFull { gap, .. } | DehSystem::QuantumRwa { gap, .. }) = s.system else {
        unreachable!("simulate always builds a quantum system")
    };
    let h0 = QubitParams::new(gap, 0.0, 1.0, 0.0)?.bare_hamiltonian();
    let rho0 = StateVector::ground().density();

    let mut table = Table::new(&["t", "p_excited", "bloch_x", "bloch_y", "bloch_z", "delta_e"]);
    let times = traj.times();
    let records = traj.values();
    for i in sample_indices(traj.len() - 1, cfg.points) {
        let r = &records[i];
        let de = harvest::delta_energy(&rho0, &r.state.density(), &h0)?;
        table.push(vec![
            times[i],
            r.population,
            r.bloch.x,
            r.bloch.y,
            r.bloch.z,
            de,
        ]);
    }
    let (_, last) = traj.last().expect("trajectory includes t = 0");
    let notes = vec![
        format!("t-final resolved = {}", emit::format_number(s.t_final)),
        format!("final p_excited = {}", emit::format_number(last.population)),
    ];
    Ok((table, notes))
}

fn oscillator(cfg: &RunConfig) -> Result<(Table, Vec<String>), CliError> {
    let p = OscillatorParams {
        mass: cfg.mass,
        spring: cfg.spring,
        force: cfg.force,
        omega: cfg.omega,
        phase: cfg.phase,
        q0: cfg.q0,
        v0: cfg.v0,
    };
    p.validate()?;
    let t_final = match cfg.t_final {
        // ten natural periods
        TFinal::Auto => 10.0 * TAU / p.natural_frequency(),
        TFinal::Value(v) => v,
    };
    let n = cfg.points;
    let t_grid: Vec<f64> = (1..=n).map(|k| t_final * k as f64 / n as f64).collect();
    let report = classical::deh_failure_certificate(&p, &t_grid, &cfg.phases())?;

    let mut table = Table::new(&[
        "t",
        "max_dq_dphi",
        "max_dqdot_dphi",
        "delta_e_min",
        "delta_e_max",
        "phase_independent",
    ]);
    for r in &report.rows {
        table.push(vec![
            r.t,
            r.max_dq_dphi,
            r.max_dqdot_dphi,
            r.delta_e_min,
            r.delta_e_max,
            f64::from(u8::from(r.phase_independent)),
        ]);
    }
    let notes = vec![
        format!("regime = {:?}", report.regime),
        format!("deh excluded on this grid = {}", report.deh_excluded()),
        format!(
            "min over t of max |dq/dphi| = {}",
            emit::format_number(report.min_position_sensitivity())
        ),
    ];
    Ok((table, notes))
}

fn dipole_params(cfg: &RunConfig) -> DipoleParams {
    let coupling = match cfg.system {
        ClassicalSystem::Dipole => DipoleCoupling::Electric { alpha: cfg.alpha },
        ClassicalSystem::Magnetic => DipoleCoupling::Magnetic { beta: cfg.beta },
        ClassicalSystem::Llg => DipoleCoupling::Llg {
            gamma: cfg.gamma,
            damping: cfg.damping,
        },
        ClassicalSystem::Oscillator => unreachable!("oscillators are not rotors"),
    };
    DipoleParams {
        coupling,
        static_field: cfg.static_field,
        amp: cfg.amp,
        omega: cfg.omega,
        phase: cfg.phase,
        inertia: cfg.inertia,
    }
}

fn rotor(cfg: &RunConfig) -> Result<(Table, Vec<String>), CliError> {
    let d = dipole_params(cfg);
    d.validate()?;
    let t_final = match cfg.t_final {
        TFinal::Auto => classical::dipole_flip_time(&d)?,
        TFinal::Value(v) => v,
    };
    let l0 = d.low_energy_axis();
    let rate = d
        .omega
        .max(d.precession_rate() + 2.0 * d.amp * d.kappa().abs());
    let steps = ((t_final * rate / TAU * cfg.steps_per_period as f64).ceil() as usize).max(16);
    let series = classical::integrate_dipole(&d, l0, t_final, steps)?;

    let mut table = Table::new(&["t", "l_x", "l_y", "l_z", "l_norm", "population"]);
    let population = |l: Vec3| 0.5 * (1.0 - l.dot(l0) / l.norm());
    let (times, values) = (series.times(), series.values());
    for i in sample_indices(series.len() - 1, cfg.points) {
        let l = values[i];
        table.push(vec![times[i], l.x, l.y, l.z, l.norm(), population(l)]);
    }

    // the same protocol over the φ ensemble
    let env = protocol::Envelope::constant(d.amp)?;
    let opts = sweep::options(cfg);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for phi in cfg.phases() {
        let out =
            protocol::run_protocol(&DehSystem::ClassicalDipole(d), &env, phi, t_final, &opts)?;
        lo = lo.min(out.population);
        hi = hi.max(out.population);
    }
    let notes = vec![
        format!("t-final resolved = {}", emit::format_number(t_final)),
        format!(
            "ensemble population min = {} max = {}",
            emit::format_number(lo),
            emit::format_number(hi)
        ),
    ];
    Ok((table, notes))
}

fn entropy(cfg: &RunConfig) -> Result<(Table, Vec<String>), CliError> {
    let p = QubitParams::new(cfg.gap, cfg.amp, cfg.omega, 0.0)?;
    let t_final = match cfg.t_final {
        TFinal::Auto => qdyn::flip_time(cfg.amp)?,
        TFinal::Value(v) => v,
    };
    let mut table = Table::new(&["t", "S_bits", "p_excited"]);
    let mut worst: f64 = 0.0;
    let last = (cfg.points - 1) as f64;
    for k in 0..cfg.points {
        let t = t_final * k as f64 / last;
        let rho = qdyn::phi_averaged_state(&p, t)?;
        let grid = qdyn::phi_averaged_state_numeric(&p, t, cfg.phi_grid)?;
        worst = worst.max(qdyn::trace_distance(&rho, &grid));
        table.push(vec![
            t,
            qdyn::von_neumann_entropy(&rho),
            rho.excited_population(),
        ]);
    }
    let notes = vec![format!(
        "max trace distance, {}-point phase grid vs closed form = {}",
        cfg.phi_grid,
        emit::format_number(worst)
    )];
    Ok((table, notes))
}

fn vu(cfg: &RunConfig) -> Result<(Table, Vec<String>), CliError> {
    let h0 = ComplexMatrix::from_real_diagonal(&cfg.levels)?;
    let n = cfg.levels.len();
    for (key, level) in [("from", cfg.from), ("to", cfg.to)] {
        if level > n {
            return Err(CliError::usage(format!(
                "`{key}` = {level} exceeds the {n} levels"
            )));
        }
    }
    let fam = protocol::vu_family(
        &h0,
        cfg.from - 1,
        cfg.to - 1,
        cfg.theta,
        cfg.theta_tilde,
        cfg.tau,
    )?;
    let mut table = Table::new(&["row", "col", "re_v", "im_v", "re_u", "im_u"]);
    for i in 0..n {
        for j in 0..n {
            let (v, u) = (fam.potential[(i, j)], fam.unitary[(i, j)]);
            table.push(vec![(i + 1) as f64, (j + 1) as f64, v.re, v.im, u.re, u.im]);
        }
    }
    let notes = vec![
        format!("energy gain = {}", emit::format_number(fam.energy_gain())),
        format!(
            "transfer population = {}",
            emit::format_number(fam.transfer_population())
        ),
        format!(
            "max |exp(i(H0+V)tau) - U| = {}",
            emit::format_number(fam.exponential_error)
        ),
        format!(
            "max |U P_from U^dagger - P_to| = {}",
            emit::format_number(fam.transfer_error)
        ),
        format!(
            "max |V - V^dagger| = {}",
            emit::format_number(fam.potential.hermiticity_error())
        ),
    ];
    Ok((table, notes))
}

fn power(cfg: &RunConfig) -> Result<(Table, Vec<String>), CliError> {
    let ordinary = HarvestModel {
        intensity: cfg.intensity,
        dipole: cfg.dipole_debye * SI.debye,
        gap: cfg.gap_mev * 1e-3 * SI.electron_volt,
        density: cfg.density,
        convention: FrequencyConvention::Ordinary,
    };
    let angular = ordinary.with_convention(FrequencyConvention::Angular);
    let (p_ord, p_ang) = (
        harvest::power_per_dipole(&ordinary)?,
        harvest::power_per_dipole(&angular)?,
    );
    let mut table = Table::new(&[
        "field_amplitude",
        "flip_time",
        "frequency_ordinary",
        "power_per_dipole_ordinary",
        "power_per_area_ordinary",
        "frequency_angular",
        "power_per_dipole_angular",
        "power_per_area_angular",
        "angular_over_ordinary",
    ]);
    table.push(vec![
        harvest::field_amplitude(cfg.intensity)?,
        harvest::flip_time(&ordinary)?,
        ordinary.frequency(),
        p_ord,
        harvest::power_per_area(&ordinary)?,
        angular.frequency(),
        p_ang,
        harvest::power_per_area(&angular)?,
        p_ang / p_ord,
    ]);
    let notes = vec![
        "P = E0 d f / pi; ordinary uses f = gap/h (Hz), angular uses 2 pi gap/h (rad/s)"
            .to_string(),
        format!(
            "the angular convention is larger by {} and equals gap / flip_time",
            emit::format_number(p_ang / p_ord)
        ),
    ];
    Ok((table, notes))
}
