//! Plane-wave transmission through a square barrier versus its height,
//! driven through the bundled `fig7` scenario.

use cayley_tdse::cli::{preset, run};

fn main() -> cayley_tdse::Result<()> {
    let config = preset("fig7")?;
    let report = run(&config, &mut std::io::sink())?;
    println!(
        "{:>8} {:>12} {:>12} {:>10}",
        "V0", "T numeric", "T exact", "|diff|"
    );
    for p in &report.sweep {
        let exact = p.t_analytic.unwrap_or(f64::NAN);
        println!(
            "{:>8.3} {:>12.6} {:>12.6} {:>10.2e}",
            p.value,
            p.t_numeric,
            exact,
            (p.t_numeric - exact).abs()
        );
    }
    Ok(())
}
