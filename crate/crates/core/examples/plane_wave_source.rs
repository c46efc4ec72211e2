//! A ramped point source filling an initially empty domain, compared with
//! the stationary solution `S0/(ik) exp(ik|x|) exp(-i omega t)`.

use cayley_tdse::abc::{source_omega, AbcPair};
use cayley_tdse::analysis::{analytic_source_solution, steady_state_error};
use cayley_tdse::lattice::{SpatialGrid, WaveFunction};
use cayley_tdse::propagator::{build_abc, Ramp, SourceSpec};
use num_complex::Complex64;

fn main() -> cayley_tdse::Result<()> {
    let grid = SpatialGrid::new(-10.0, 10.0, 1000)?;
    let pair = AbcPair::new(12.0, 13.0)?;
    let dt = 0.001;
    let op = build_abc(&grid, &vec![0.0; grid.n_sites()], dt, &pair)?;
    let src = SourceSpec {
        s0: Complex64::new(5.0, 0.0),
        ramp: Ramp::Exponential { time_constant: 1.0 },
        omega: source_omega(5.0, &pair.right)?,
        site: grid.nearest_site(0.0),
    };
    let center = grid.site_position(src.site)?;
    println!(
        "omega = {:.6}, k = {:.6}",
        src.omega,
        (2.0 * src.omega).sqrt()
    );

    let mut psi = WaveFunction::zeros(grid);
    let mut scratch = Vec::new();
    for n in 0..12_000 {
        op.advance(&mut psi, &mut scratch, Some(&src), n, 0.0)?;
        let t = (n + 1) as f64 * dt;
        if (n + 1) % 2000 == 0 {
            let err = steady_state_error(&psi, src.s0, src.omega, t, center, (-8.0, 8.0))?;
            println!("t = {t:>5.1}: relative error vs stationary solution {err:.4e}");
        }
    }

    let t = 12.0;
    println!("{:>7} {:>12} {:>12}", "x", "Re psi", "exact");
    for x in [-6.0, -3.0, -1.0, 1.0, 3.0, 6.0] {
        let j = grid.nearest_site(x);
        let xj = grid.site_position(j)?;
        let exact = analytic_source_solution(xj - center, t, src.s0, src.omega)?;
        println!(
            "{xj:>7.2} {:>12.6} {:>12.6}",
            psi.amplitudes()[j].re,
            exact.re
        );
    }
    Ok(())
}
