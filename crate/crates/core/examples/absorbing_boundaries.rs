//! A free packet leaving the domain through absorbing edges, next to the
//! same packet bouncing off hard walls.

use cayley_tdse::abc::{abc_coefficients, AbcPair, Side};
use cayley_tdse::lattice::SpatialGrid;
use cayley_tdse::physics::{gaussian_packet, PacketSpec};
use cayley_tdse::propagator::{build_abc, build_dirichlet};

fn main() -> cayley_tdse::Result<()> {
    let grid = SpatialGrid::new(-20.0, 20.0, 1000)?;
    let packet = PacketSpec {
        x0: -10.0,
        p0: 7.0,
        sigma0: 1.0,
    };
    let v = vec![0.0; grid.n_sites()];
    let dt = 0.002;

    // chord through E = 24 and E = 25, bracketing p0^2 / 2 = 24.5
    let pair = AbcPair::new(24.0, 25.0)?;
    let right = abc_coefficients(24.0, 25.0, Side::Right)?;
    println!("g1 = {:.6}, g2 = {:.6}", right.g1, right.g2);

    let open = build_abc(&grid, &v, dt, &pair)?;
    let walls = build_dirichlet(&grid, &v, dt)?;
    let mut a = gaussian_packet(&grid, &packet)?.psi;
    let mut b = a.clone();
    let mut scratch = Vec::new();

    println!("{:>6} {:>14} {:>14}", "t", "P absorbing", "P walls");
    for n in 0..=4000 {
        if n % 250 == 0 {
            println!(
                "{:>6.2} {:>14.6e} {:>14.10}",
                n as f64 * dt,
                a.norm_sqr(),
                b.norm_sqr()
            );
        }
        open.advance(&mut a, &mut scratch, None, n, 0.0)?;
        walls.advance(&mut b, &mut scratch, None, n, 0.0)?;
    }
    Ok(())
}
