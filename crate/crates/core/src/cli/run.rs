//! The propagation loop behind `tdse run`, writing newline-delimited JSON.
//!
//! Stream layout: one `header` record holding the resolved config, then
//! `frame` records (or `sweep_point` records for a sweep) in step order, then
//! one `summary`. Failures are reported by the caller as an `error` record.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{PotentialChoice, RunConfig};
use crate::analysis::{
    analytic_barrier_transmission, estimate_transmission, settle_change, steady_state_error,
    SettleProbe, SETTLE_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::lattice::WaveFunction;
use crate::physics::{gaussian_packet, sample_potential};
use crate::propagator::{build_abc, build_dirichlet, EvolutionOperator, SourceSpec};

/// A sweep point that has not settled after this many times its configured
/// step count is an error.
pub const SWEEP_STEP_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub step: usize,
    pub time: f64,
    pub x: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionRecord {
    pub t_numeric: f64,
    pub t_analytic: Option<f64>,
    pub monitor_x: f64,
    pub settle_steps: usize,
    pub settle_change: f64,
    pub overshoot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub name: String,
    pub value: f64,
    pub t_numeric: f64,
    pub t_analytic: Option<f64>,
    pub settle_steps: usize,
    pub overshoot: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub steps: usize,
    pub final_time: f64,
    pub frames: usize,
    pub initial_norm: f64,
    pub final_norm: f64,
    /// Largest `| ||psi^{n+1}|| - ||psi^n|| |` over the run.
    pub max_step_drift: f64,
    /// `| ||psi^N|| - ||psi^0|| |`.
    pub cumulative_drift: f64,
    /// `||psi^n||` for every step, starting at `n = 0`.
    pub norm_trajectory: Vec<f64>,
    /// `(time, probability)` at every frame.
    pub interval_probability: Option<Vec<[f64; 2]>>,
    pub steady_state_error: Option<f64>,
    /// Relative change of `|psi|` over the last drive period.
    pub settle_change: Option<f64>,
    pub transmission: Option<TransmissionRecord>,
    pub sweep_points: usize,
    pub max_transmission_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Header {
        config: RunConfig,
    },
    Frame(FrameRecord),
    SweepPoint(SweepPoint),
    Summary(Summary),
    Error {
        message: String,
        step: Option<usize>,
    },
}

impl Record {
    pub fn error(err: &Error) -> Self {
        let step = match err {
            Error::Step { step, .. } => Some(*step),
            _ => None,
        };
        Record::Error {
            message: err.to_string(),
            step,
        }
    }
}

/// What a run produced. Timings are kept out of the output stream so that
/// identical configs give identical bytes.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: RunConfig,
    pub summary: Summary,
    pub sweep: Vec<SweepPoint>,
    pub final_state: Option<WaveFunction>,
    /// Mean wall time of one propagation step, operator setup excluded.
    pub step_seconds: f64,
    pub setup_seconds: f64,
}

fn write_record(out: &mut dyn Write, record: &Record) -> Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Everything a single trajectory needs, built from a resolved config.
struct Scenario {
    op: EvolutionOperator,
    psi: WaveFunction,
    source: Option<SourceSpec>,
    t0: f64,
    setup_seconds: f64,
}

fn prepare(config: &RunConfig) -> Result<Scenario> {
    let started = Instant::now();
    let grid = config.spatial_grid()?;
    let potential = sample_potential(
        &grid,
        &config.potential_spec()?,
        config.drive_momentum().unwrap_or(0.0),
    )?;
    let op = match config.abc_pair()? {
        None => build_dirichlet(&grid, &potential, config.time.dt)?,
        Some(pair) => build_abc(&grid, &potential, config.time.dt, &pair)?,
    }
    .with_strategy(config.strategy)?;
    let psi = match config.packet_spec() {
        Some(spec) => gaussian_packet(&grid, &spec)?.psi,
        None => WaveFunction::zeros(grid),
    };
    Ok(Scenario {
        op,
        psi,
        source: config.source_spec()?,
        t0: config.time.t0,
        setup_seconds: started.elapsed().as_secs_f64(),
    })
}

impl Scenario {
    fn advance(&mut self, scratch: &mut Vec<num_complex::Complex64>, n: usize) -> Result<()> {
        self.op
            .advance(&mut self.psi, scratch, self.source.as_ref(), n, self.t0)
            .map_err(|e| Error::Step {
                step: n,
                source: Box::new(e),
            })
    }

    fn period_steps(&self) -> Option<usize> {
        self.source.as_ref().map(|s| {
            let period = std::f64::consts::TAU / s.omega;
            ((period / self.op.dt()).round() as usize).max(1)
        })
    }
}

fn frame(psi: &WaveFunction, step: usize, time: f64) -> FrameRecord {
    let amps = psi.amplitudes();
    FrameRecord {
        step,
        time,
        x: psi.grid().positions().collect(),
        re: amps.iter().map(|z| z.re).collect(),
        im: amps.iter().map(|z| z.im).collect(),
        density: amps.iter().map(|z| z.norm_sqr()).collect(),
    }
}

fn analytic_transmission(config: &RunConfig) -> Option<f64> {
    let s = config.source.as_ref()?;
    let w = config.potential.half_width?;
    let v0 = config.potential.v0?;
    let signed = match config.potential.kind {
        PotentialChoice::Barrier => v0,
        PotentialChoice::Well => -v0,
        PotentialChoice::Free => return None,
    };
    analytic_barrier_transmission(0.5 * s.p0 * s.p0, signed, 2.0 * w).ok()
}

/// Runs `config` and streams its records to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<RunReport> {
    let config = config.resolved()?;
    write_record(
        out,
        &Record::Header {
            config: config.clone(),
        },
    )?;
    let report = match &config.sweep {
        Some(_) => run_sweep(&config, out)?,
        None => run_single(&config, out)?,
    };
    write_record(out, &Record::Summary(report.summary.clone()))?;
    out.flush()?;
    Ok(report)
}

fn run_single(config: &RunConfig, out: &mut dyn Write) -> Result<RunReport> {
    let mut sc = prepare(config)?;
    let time = config.time_grid()?;
    let n_steps = time.n_steps;
    let stride = config.output.frame_stride;
    let period = sc.period_steps();
    let snapshot_at = period.and_then(|p| n_steps.checked_sub(p));

    let mut scratch = Vec::new();
    let mut norms = Vec::with_capacity(n_steps + 1);
    let mut interval = config.analysis.interval.map(|_| Vec::new());
    let mut frames = 0usize;
    let mut snapshot = None;
    let mut stepping = 0.0;

    for n in 0..=n_steps {
        if n > 0 {
            let started = Instant::now();
            sc.advance(&mut scratch, n - 1)?;
            stepping += started.elapsed().as_secs_f64();
        }
        norms.push(sc.psi.norm());
        if Some(n) == snapshot_at {
            snapshot = Some(sc.psi.clone());
        }
        if n % stride == 0 {
            let t = time.time(n);
            if let (Some(series), Some([a, b])) = (interval.as_mut(), config.analysis.interval) {
                series.push([t, sc.psi.probability_in_interval(a, b)]);
            }
            write_record(out, &Record::Frame(frame(&sc.psi, n, t)))?;
            frames += 1;
        }
    }

    let final_time = time.time(n_steps);
    let initial_norm = norms[0];
    let final_norm = norms[n_steps];
    let max_step_drift = norms
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);

    let mut summary = Summary {
        steps: n_steps,
        final_time,
        frames,
        initial_norm,
        final_norm,
        max_step_drift,
        cumulative_drift: (final_norm - initial_norm).abs(),
        norm_trajectory: norms,
        interval_probability: interval,
        ..Summary::default()
    };

    if let Some(src) = sc.source {
        let center = sc.psi.grid().x(src.site);
        if let Some([a, b]) = config.analysis.steady_region {
            summary.steady_state_error = Some(steady_state_error(
                &sc.psi,
                src.s0,
                src.omega,
                final_time,
                center,
                (a, b),
            )?);
        }
        if let Some(prev) = &snapshot {
            let (a, b) = config
                .analysis
                .steady_region
                .map(|[a, b]| (a, b))
                .unwrap_or((sc.psi.grid().x_min(), sc.psi.grid().x_max()));
            summary.settle_change = Some(settle_change(&sc.psi, prev, a, b)?);
        }
        if config.analysis.transmission {
            match &snapshot {
                Some(prev) => {
                    let probe = SettleProbe {
                        current: &sc.psi,
                        period_ago: prev,
                        steps: n_steps,
                    };
                    summary.transmission = match transmission_record(config, &probe, &src) {
                        Ok(t) => Some(t),
                        Err(Error::NotSettled { .. }) => None,
                        Err(e) => return Err(e),
                    };
                }
                None => {
                    log::warn!("run is shorter than one drive period; no transmission estimate")
                }
            }
        }
    }

    Ok(RunReport {
        config: config.clone(),
        summary,
        sweep: Vec::new(),
        final_state: Some(sc.psi),
        step_seconds: if n_steps > 0 {
            stepping / n_steps as f64
        } else {
            0.0
        },
        setup_seconds: sc.setup_seconds,
    })
}

fn transmission_record(
    config: &RunConfig,
    probe: &SettleProbe<'_>,
    src: &SourceSpec,
) -> Result<TransmissionRecord> {
    let edge = config.barrier_edge()?;
    let monitor = config
        .analysis
        .monitor_x
        .expect("resolved config carries a monitor");
    let change = {
        let far = 2.0 * monitor - edge;
        let (a, b) = if far > edge { (edge, far) } else { (far, edge) };
        let grid = probe.current.grid();
        settle_change(
            probe.current,
            probe.period_ago,
            a.max(grid.x_min()),
            b.min(grid.x_max()),
        )?
    };
    if !(change < SETTLE_TOLERANCE) {
        log::warn!("transmission monitor region has not settled (change {change:.3e})");
        return Err(Error::NotSettled { change });
    }
    let est = estimate_transmission(probe, src, edge, monitor)?;
    Ok(TransmissionRecord {
        t_numeric: est.t_numeric,
        t_analytic: analytic_transmission(config),
        monitor_x: est.monitor_x,
        settle_steps: est.settle_steps,
        settle_change: change,
        overshoot: est.overshoot(),
    })
}

/// Steps one sweep point to at least `n_steps`, then a drive period at a
/// time until the monitor region settles.
fn sweep_point(config: &RunConfig, name: &str, value: f64) -> Result<(SweepPoint, f64, usize)> {
    let point = config.with_value(name, value)?.resolved()?;
    let mut sc = prepare(&point)?;
    let src = sc.source.expect("sweeps carry a source");
    let period = sc.period_steps().expect("sweeps carry a source");
    let target = point.time.n_steps.max(period);
    let limit = SWEEP_STEP_LIMIT * target;
    let mut scratch = Vec::new();
    let mut n = 0usize;
    let started = Instant::now();
    while n < target - period {
        sc.advance(&mut scratch, n)?;
        n += 1;
    }
    loop {
        let prev = sc.psi.clone();
        for _ in 0..period {
            sc.advance(&mut scratch, n)?;
            n += 1;
        }
        let probe = SettleProbe {
            current: &sc.psi,
            period_ago: &prev,
            steps: n,
        };
        match transmission_record(&point, &probe, &src) {
            Ok(t) => {
                let p = SweepPoint {
                    name: name.to_string(),
                    value,
                    t_numeric: t.t_numeric,
                    t_analytic: t.t_analytic,
                    settle_steps: n,
                    overshoot: t.overshoot,
                };
                return Ok((p, started.elapsed().as_secs_f64(), n));
            }
            Err(Error::NotSettled { .. }) if n + period <= limit => continue,
            Err(e) => return Err(e),
        }
    }
}

fn run_sweep(config: &RunConfig, out: &mut dyn Write) -> Result<RunReport> {
    let sweep = config.sweep.as_ref().expect("sweep present");
    let started = Instant::now();
    let results: Vec<_> = sweep
        .values()
        .into_par_iter()
        .map(|v| sweep_point(config, &sweep.name, v))
        .collect::<Result<_>>()?;
    let wall = started.elapsed().as_secs_f64();
    let mut points = Vec::with_capacity(results.len());
    let (mut busy, mut steps) = (0.0, 0usize);
    for (p, seconds, n) in results {
        write_record(out, &Record::SweepPoint(p.clone()))?;
        busy += seconds;
        steps += n;
        points.push(p);
    }
    log::info!("sweep of {} points took {wall:.2} s", points.len());
    let max_err = points
        .iter()
        .filter_map(|p| p.t_analytic.map(|a| (p.t_numeric - a).abs()))
        .fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
    let summary = Summary {
        steps: config.time.n_steps,
        final_time: config.time_grid()?.time(config.time.n_steps),
        sweep_points: points.len(),
        max_transmission_error: max_err,
        ..Summary::default()
    };
    Ok(RunReport {
        config: config.clone(),
        summary,
        sweep: points,
        final_state: None,
        step_seconds: if steps > 0 { busy / steps as f64 } else { 0.0 },
        setup_seconds: 0.0,
    })
}
