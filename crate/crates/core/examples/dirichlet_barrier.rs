//! Gaussian packet hitting a square barrier between hard walls.
//!
//! Prints the probability on each side of the barrier and the norm every
//! half time unit. Run with `cargo run --release --example dirichlet_barrier`.

use cayley_tdse::lattice::SpatialGrid;
use cayley_tdse::physics::{
    gaussian_packet, sample_potential, HeightRule, PacketSpec, PotentialSpec,
};
use cayley_tdse::propagator::build_dirichlet;

fn main() -> cayley_tdse::Result<()> {
    let grid = SpatialGrid::new(-20.0, 20.0, 1000)?;
    let packet = PacketSpec {
        x0: -10.0,
        p0: 7.0,
        sigma0: 1.0,
    };
    let barrier = PotentialSpec::barrier(HeightRule::MatchedToP0, 2.0);
    let v = sample_potential(&grid, &barrier, packet.p0)?;
    let op = build_dirichlet(&grid, &v, 0.002)?;

    let mut psi = gaussian_packet(&grid, &packet)?.psi;
    let mut scratch = Vec::new();
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>16}",
        "t", "x < -2", "|x| < 2", "x > 2", "norm"
    );
    for n in 0..=3000 {
        if n % 250 == 0 {
            println!(
                "{:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>16.13}",
                n as f64 * op.dt(),
                psi.probability_in_interval(-20.0, -2.0),
                psi.probability_in_interval(-2.0, 2.0),
                psi.probability_in_interval(2.0, 20.0),
                psi.norm()
            );
        }
        op.advance(&mut psi, &mut scratch, None, n, 0.0)?;
    }
    Ok(())
}
