//! The two propagation strategies side by side: a precomputed dense
//! evolution matrix versus a tridiagonal solve per step.

use std::time::Instant;

use cayley_tdse::lattice::SpatialGrid;
use cayley_tdse::physics::{
    gaussian_packet, sample_potential, HeightRule, PacketSpec, PotentialSpec,
};
use cayley_tdse::propagator::{build_dirichlet, Strategy};

fn main() -> cayley_tdse::Result<()> {
    let grid = SpatialGrid::new(-20.0, 20.0, 1000)?;
    let packet = PacketSpec {
        x0: -10.0,
        p0: 7.0,
        sigma0: 1.0,
    };
    let v = sample_potential(
        &grid,
        &PotentialSpec::barrier(HeightRule::MatchedToP0, 2.0),
        packet.p0,
    )?;
    let psi0 = gaussian_packet(&grid, &packet)?.psi;

    let mut finals = Vec::new();
    for strategy in [Strategy::TridiagonalSolve, Strategy::DenseInverse] {
        let started = Instant::now();
        let op = build_dirichlet(&grid, &v, 0.002)?.with_strategy(strategy)?;
        let setup = started.elapsed();
        let mut psi = psi0.clone();
        let mut scratch = Vec::new();
        let started = Instant::now();
        for n in 0..500 {
            op.advance(&mut psi, &mut scratch, None, n, 0.0)?;
        }
        let per_step = started.elapsed().as_secs_f64() / 500.0;
        println!("{strategy:?}: setup {setup:?}, {per_step:.2e} s per step");
        finals.push(psi);
    }
    println!(
        "relative distance after 500 steps: {:.2e}",
        finals[0].relative_distance(&finals[1])
    );
    Ok(())
}
