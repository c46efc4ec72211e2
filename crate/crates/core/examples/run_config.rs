//! Configs, presets and the NDJSON stream the `tdse` binary writes.
//!
//! Parses a config from text, writes its records to a file and reads the
//! summary back.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter};

use cayley_tdse::cli::{list_presets, run, Record, RunConfig};

const CONFIG: &str = r#"
# packet over a shallow well with absorbing edges
grid.x_min = -20.0
grid.x_max = 20.0
grid.n_sites = 800
time.dt = 0.002
time.n_steps = 1500
boundary.mode = "abc"
abc.alpha1 = 24.0
abc.alpha2 = 25.0
packet.x0 = -10.0
packet.p0 = 7.0
packet.sigma0 = 1.0
potential.kind = "well"
potential.half_width = 1.0
potential.v0 = 5.0
output.frame_stride = 300
analysis.interval = [1.0, 20.0]
"#;

fn main() -> cayley_tdse::Result<()> {
    for p in list_presets() {
        println!("{:<6} {}", p.name, p.description);
    }

    let config = RunConfig::from_toml_str(CONFIG)?;
    println!(
        "\nresolved config:\n{}",
        config.resolved()?.to_toml_string()?
    );

    let path = std::env::temp_dir().join("tdse-example.ndjson");
    run(&config, &mut BufWriter::new(File::create(&path)?))?;

    for line in BufReader::new(File::open(&path)?).lines() {
        match serde_json::from_str::<Record>(&line?)? {
            Record::Frame(f) => println!("frame at step {:>5}, t = {:.2}", f.step, f.time),
            Record::Summary(s) => {
                println!("final norm {:.6}", s.final_norm);
                for [t, p] in s.interval_probability.unwrap_or_default() {
                    println!("  P(x > 1) at t = {t:.2}: {p:.6}");
                }
            }
            _ => {}
        }
    }
    println!("records written to {}", path.display());
    Ok(())
}
