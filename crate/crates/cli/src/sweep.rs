//! Robustness sweeps: final populations over a grid of amplitudes, phases,
//! envelope ramps and multiplicative deviations of amplitude, stop time and
//! frequency.
//!
//! Deviations are applied after the stop time is solved, so `delta_amp = 1.04`
//! drives at `1.04 A` but still stops at the flip time of `A`.

use deh_core::protocol::{self, DehOptions, DehSystem, Envelope, EnvelopeKind};
use rayon::prelude::*;

use crate::config::{AxisName, Model, RunConfig, TFinal};
use crate::emit::Table;
use crate::error::CliError;

pub const STAT_COLUMNS: [&str; 5] = ["min_pop", "mean_pop", "max_pop", "spread", "mean_delta_e"];

/// Point values for one cell; `None` keeps the base configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellPoint {
    pub amp: Option<f64>,
    pub phase: Option<f64>,
    pub delta_amp: f64,
    pub delta_t: f64,
    pub delta_omega: f64,
    pub ramp_fraction: Option<f64>,
}

impl Default for CellPoint {
    fn default() -> Self {
        CellPoint {
            amp: None,
            phase: None,
            delta_amp: 1.0,
            delta_t: 1.0,
            delta_omega: 1.0,
            ramp_fraction: None,
        }
    }
}

impl CellPoint {
    fn set(&mut self, axis: AxisName, v: f64) {
        match axis {
            AxisName::Amp => self.amp = Some(v),
            AxisName::Phase => self.phase = Some(v),
            AxisName::DeltaAmp => self.delta_amp = v,
            AxisName::DeltaT => self.delta_t = v,
            AxisName::DeltaOmega => self.delta_omega = v,
            AxisName::RampFraction => self.ramp_fraction = Some(v),
        }
    }
}

/// What one protocol run needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup {
    pub system: DehSystem,
    pub env: Envelope,
    /// Solved (or configured) stop time before the `delta_t` factor.
    pub nominal_t_final: f64,
    pub t_final: f64,
}

pub fn setup(cfg: &RunConfig, point: &CellPoint) -> Result<Setup, CliError> {
    let amp = point.amp.unwrap_or(cfg.amp);
    let kind = match point.ramp_fraction {
        Some(fraction) => EnvelopeKind::LinearRamp { fraction },
        None => cfg.envelope.0,
    };
    let nominal = Envelope::new(kind, amp)?;
    let nominal_t_final = match cfg.t_final {
        TFinal::Auto => protocol::stopping_time(&nominal)?,
        TFinal::Value(v) => v,
    };
    let dw = point.delta_omega;
    let kind = match kind {
        EnvelopeKind::Beat { omega1, omega2 } => EnvelopeKind::Beat {
            omega1: omega1 * dw,
            omega2: omega2 * dw,
        },
        k => k,
    };
    let env = Envelope::new(kind, amp * point.delta_amp)?;
    let (gap, omega) = (cfg.gap, cfg.omega * dw);
    let system = match cfg.model {
        Model::Full => DehSystem::QuantumFull { gap, omega },
        Model::Rwa => DehSystem::QuantumRwa { gap, omega },
    };
    let t_final = nominal_t_final * point.delta_t;
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(CliError::usage(format!(
            "stop time must be finite and > 0, got {t_final}"
        )));
    }
    Ok(Setup {
        system,
        env,
        nominal_t_final,
        t_final,
    })
}

pub fn options(cfg: &RunConfig) -> DehOptions {
    DehOptions {
        steps_per_period: cfg.steps_per_period,
        scheme: cfg.scheme.into(),
        ..DehOptions::default()
    }
}

/// `[min, mean, max, spread, mean ΔE]` over the phases.
pub fn ensemble(s: &Setup, phases: &[f64], opts: &DehOptions) -> Result<[f64; 5], CliError> {
    let (mut min, mut max, mut sum, mut de) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0);
    for &phi in phases {
        let out = protocol::run_protocol(&s.system, &s.env, phi, s.t_final, opts)?;
        min = min.min(out.population);
        max = max.max(out.population);
        sum += out.population;
        de += out.delta_energy;
    }
    let n = phases.len() as f64;
    Ok([min, sum / n, max, max - min, de / n])
}

/// Row-major grid over the configured axes (first axis slowest). No axes
/// gives a single cell at the base configuration.
pub fn grid(cfg: &RunConfig) -> Vec<(Vec<f64>, CellPoint)> {
    let mut cells = vec![(Vec::new(), CellPoint::default())];
    for axis in &cfg.axes {
        let values = axis.values();
        cells = cells
            .into_iter()
            .flat_map(|(coords, point)| {
                values.iter().map(move |&v| {
                    let mut c = coords.clone();
                    c.push(v);
                    let mut p = point;
                    p.set(axis.name, v);
                    (c, p)
                })
            })
            .collect();
    }
    cells
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let cells = grid(cfg);
    let expected: usize = cfg.axes.iter().map(|a| a.count).product();
    debug_assert_eq!(cells.len(), expected);

    // all configuration errors surface before any integration
    let base_phases = cfg.phases();
    let work = cells
        .iter()
        .map(|(_, point)| {
            let phases = point.phase.map_or_else(|| base_phases.clone(), |p| vec![p]);
            Ok((setup(cfg, point)?, phases))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let opts = options(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| {
            CliError::usage(format!(
                "cannot start {} worker threads: {e}",
                cfg.jobs.unwrap_or(0)
            ))
        })?;
    let stats: Vec<Result<[f64; 5], CliError>> = pool.install(|| {
        work.par_iter()
            .map(|(s, phases)| ensemble(s, phases, &opts))
            .collect()
    });

    let mut columns: Vec<&str> = cfg.axes.iter().map(|a| a.name.canonical()).collect();
    columns.extend(STAT_COLUMNS);
    let mut table = Table::new(&columns);
    for ((coords, _), st) in cells.into_iter().zip(stats) {
        let mut row = coords;
        row.extend(st?);
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AxisSpec, Command, Overrides};

    fn cfg(axes: &[&str]) -> RunConfig {
        let o = Overrides {
            axis: axes
                .iter()
                .map(|a| a.parse::<AxisSpec>().unwrap())
                .collect(),
            phi_grid: Some(4),
            ..Overrides::default()
        };
        RunConfig::from_overrides(Command::Sweep, o).unwrap()
    }

    #[test]
    fn grid_is_row_major_and_complete() {
        let c = cfg(&["amp:0.01:0.02:2", "dT:0.9:1.1:3"]);
        let g = grid(&c);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0].0, vec![0.01, 0.9]);
        assert_eq!(g[1].0, vec![0.01, 1.0]);
        assert_eq!(g[3].0, vec![0.02, 0.9]);
        assert_eq!(g[5].1.amp, Some(0.02));
        assert_eq!(g[5].1.delta_t, 1.1);
    }

    #[test]
    fn deviations_keep_the_nominal_stop_time() {
        let c = cfg(&[]);
        let p = CellPoint {
            delta_amp: 1.04,
            delta_t: 0.96,
            delta_omega: 1.02,
            ..CellPoint::default()
        };
        let s = setup(&c, &p).unwrap();
        let t0 = std::f64::consts::PI / (2.0 * 0.05);
        assert!((s.nominal_t_final - t0).abs() < 1e-12);
        assert!((s.t_final - 0.96 * t0).abs() < 1e-12);
        assert!((s.env.amp() - 0.052).abs() < 1e-15);
        assert_eq!(
            s.system,
            DehSystem::QuantumFull {
                gap: 1.0,
                omega: 1.02
            }
        );
    }

    #[test]
    fn ramp_axis_resolves_its_own_stop_time() {
        let c = cfg(&[]);
        let p = CellPoint {
            ramp_fraction: Some(0.2),
            ..CellPoint::default()
        };
        let s = setup(&c, &p).unwrap();
        // trapezoid: 2 A T (1 - r) = π
        assert!((s.t_final - std::f64::consts::PI / (2.0 * 0.05 * 0.8)).abs() < 1e-9);
    }

    #[test]
    fn bad_axis_values_fail_before_running() {
        let c = cfg(&["amp:-0.1:0.1:3"]);
        assert_eq!(run_sweep(&c).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut c = cfg(&["amp:0.1:0.2:3"]);
        c.model = Model::Rwa;
        c.steps_per_period = 32;
        c.jobs = Some(1);
        let serial = run_sweep(&c).unwrap();
        c.jobs = Some(3);
        assert_eq!(serial, run_sweep(&c).unwrap());
    }
}
