use std::io::Write;
use std::process::Command;

use cayley_tdse::cli::{list_presets, preset, run, Record, RunConfig};
use cayley_tdse::Error;

fn records(bytes: &[u8]) -> Vec<Record> {
    std::str::from_utf8(bytes)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn short_fig1(steps: usize, stride: usize) -> RunConfig {
    let mut c = preset("fig1").unwrap();
    c.time.n_steps = steps;
    c.output.frame_stride = stride;
    c
}

#[test]
fn identical_configs_give_identical_bytes() {
    let c = short_fig1(200, 50);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    run(&c, &mut a).unwrap();
    run(&c, &mut b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn sweep_output_is_deterministic_despite_parallel_points() {
    let mut c = preset("fig7").unwrap();
    c.time.n_steps = 6000;
    c.sweep.as_mut().unwrap().count = 4;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    run(&c, &mut a).unwrap();
    run(&c, &mut b).unwrap();
    assert_eq!(a, b);
    let values: Vec<f64> = records(&a)
        .into_iter()
        .filter_map(|r| match r {
            Record::SweepPoint(p) => Some(p.value),
            _ => None,
        })
        .collect();
    assert_eq!(values.len(), 4);
    assert!(values.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn frame_count_is_floor_of_steps_over_stride_plus_one() {
    for (steps, stride) in [(100, 1), (100, 7), (100, 100), (100, 250), (0, 3)] {
        let mut out = Vec::new();
        let report = run(&short_fig1(steps, stride), &mut out).unwrap();
        let frames: Vec<usize> = records(&out)
            .into_iter()
            .filter_map(|r| match r {
                Record::Frame(f) => Some(f.step),
                _ => None,
            })
            .collect();
        assert_eq!(
            frames.len(),
            steps / stride + 1,
            "steps {steps}, stride {stride}"
        );
        assert_eq!(report.summary.frames, frames.len());
        assert_eq!(frames[0], 0);
        assert!(frames.windows(2).all(|w| w[1] == w[0] + stride));
    }
}

#[test]
fn stream_is_header_frames_summary() {
    let mut out = Vec::new();
    run(&short_fig1(20, 10), &mut out).unwrap();
    let recs = records(&out);
    match &recs[0] {
        Record::Header { config } => {
            // the matched barrier height is written out
            assert_eq!(config.potential.v0, Some(24.5));
        }
        other => panic!("first record is {other:?}"),
    }
    assert!(matches!(recs.last(), Some(Record::Summary(_))));
    let Record::Frame(f) = &recs[1] else { panic!() };
    assert_eq!(f.x.len(), 1000);
    assert!((f.density[500] - (f.re[500].powi(2) + f.im[500].powi(2))).abs() < 1e-15);
}

#[test]
fn norm_trajectory_covers_every_step() {
    let report = run(&short_fig1(30, 10), &mut Vec::new()).unwrap();
    assert_eq!(report.summary.norm_trajectory.len(), 31);
    assert_eq!(
        report.summary.interval_probability.as_ref().unwrap().len(),
        4
    );
}

#[test]
fn absorbing_well_loses_norm_hard_walled_well_keeps_it() {
    let fig2 = run(&preset("fig2").unwrap(), &mut std::io::sink()).unwrap();
    let fig3 = run(&preset("fig3").unwrap(), &mut std::io::sink()).unwrap();
    assert!(fig3.summary.final_norm < fig2.summary.final_norm);
    assert!((fig2.summary.final_norm - 1.0).abs() < 1e-8);
}

#[test]
fn ramp_fills_the_domain_toward_flat_density() {
    let config = preset("fig6").unwrap();
    let ramp = config.source.as_ref().unwrap().ramp_dt.unwrap();
    let mut out = Vec::new();
    run(&config, &mut out).unwrap();
    let frames: Vec<_> = records(&out)
        .into_iter()
        .filter_map(|r| match r {
            Record::Frame(f) => Some(f),
            _ => None,
        })
        .collect();
    // frame closest to the time at which S(t) reaches S0 / 2
    let half = ramp * std::f64::consts::LN_2;
    let mid = frames
        .iter()
        .min_by(|a, b| (a.time - half).abs().total_cmp(&(b.time - half).abs()))
        .unwrap();
    let last = frames.last().unwrap();
    let variance = |f: &cayley_tdse::cli::run::FrameRecord| {
        let m: Vec<f64> =
            f.x.iter()
                .zip(&f.density)
                .filter(|(x, _)| x.abs() <= 8.0)
                .map(|(_, d)| d.sqrt())
                .collect();
        let mean = m.iter().sum::<f64>() / m.len() as f64;
        m.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m.len() as f64
    };
    assert!(
        variance(last) < variance(mid),
        "{} vs {}",
        variance(last),
        variance(mid)
    );
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let mut c = short_fig1(10, 1);
    c.packet = None;
    assert!(matches!(
        run(&c, &mut Vec::new()),
        Err(Error::InvalidConfig(_))
    ));

    let mut c = short_fig1(10, 1);
    c.strategy = cayley_tdse::propagator::Strategy::DenseInverse;
    c.grid.n_sites = 5000;
    assert!(matches!(
        run(&c, &mut Vec::new()),
        Err(Error::DensePathCapExceeded { .. })
    ));
}

#[test]
fn every_preset_round_trips() {
    for p in list_presets() {
        let text = p.config.to_toml_string().unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), p.config);
    }
}

fn tdse() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdse"))
}

#[test]
fn binary_lists_presets() {
    let out = tdse().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().all(|l| l.starts_with("fig")));
}

#[test]
fn binary_runs_a_config_file_with_overrides() {
    let dir = std::env::temp_dir().join(format!("tdse-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    let mut text = short_fig1(40, 10).to_toml_string().unwrap();
    text.insert_str(0, "# short barrier run\n");
    std::fs::File::create(&cfg)
        .unwrap()
        .write_all(text.as_bytes())
        .unwrap();
    let output = dir.join("out.ndjson");
    let status = tdse()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--strategy", "dense", "--frame-stride", "20", "--output"])
        .arg(&output)
        .status()
        .unwrap();
    assert!(status.success());
    let recs = records(&std::fs::read(&output).unwrap());
    let Record::Header { config } = &recs[0] else {
        panic!()
    };
    assert_eq!(config.output.frame_stride, 20);
    assert_eq!(
        config.strategy,
        cayley_tdse::propagator::Strategy::DenseInverse
    );
    assert_eq!(recs.len(), 1 + 3 + 1);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn binary_reports_errors_as_records() {
    let dir = std::env::temp_dir().join(format!("tdse-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.toml");
    let text = format!(
        "{}grid.spacing = 0.1\n",
        short_fig1(10, 1).to_toml_string().unwrap()
    );
    std::fs::write(&cfg, text).unwrap();
    let out = tdse().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let line = String::from_utf8(out.stderr).unwrap();
    let rec: Record = serde_json::from_str(line.lines().last().unwrap()).unwrap();
    let Record::Error { message, .. } = rec else {
        panic!()
    };
    assert!(message.contains("spacing"), "{message}");

    let out = tdse().args(["run", "--preset", "fig9"]).output().unwrap();
    assert!(!out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}
