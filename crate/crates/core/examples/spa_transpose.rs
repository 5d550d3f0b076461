// SPA of the transpose: p* = d/(d+1) and the symmetric-projector Choi matrix.

use spa_toolkit::channels::NamedMap;
use spa_toolkit::designs::symmetric_target;
use spa_toolkit::spa::{spa, spa_general};
use spa_toolkit::{ComplexMatrix, DensityMatrix, DimProfile};

pub fn run_example() -> spa_toolkit::Result<()> {
    for d in 2..=6 {
        let r = spa(&NamedMap::Transpose(d).build()?)?;
        let dev = r.spa_map.choi().max_abs_diff(&symmetric_target(d));
        println!(
            "d = {d}: p* = {:.6} (bisection {:.6}), λ = {:.4}, threshold {:.4}, |χ − 2S/(d(d+1))| = {dev:.1e}",
            r.p_star, r.p_bisection, r.lambda, r.threshold
        );
        assert!((r.p_star - d as f64 / (d as f64 + 1.0)).abs() < 1e-9);
        assert!(dev < 1e-10);
    }

    // Coloured noise needs more of it.
    let k = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.8, 0.2]), DimProfile::single(2)?)?;
    let g = spa_general(&NamedMap::Transpose(2).build()?, &k)?;
    println!("noise diag(0.8, 0.2): p = {:.6}", g.p_star);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("spa_transpose");
}
