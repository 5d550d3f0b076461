// SPA of the partial transpose and its local decomposition into
// id ⊗ T̃ and Θ̃ ⊗ D.

use spa_toolkit::channels::NamedMap;
use spa_toolkit::spa::{spa_bipartite, spa_locc};

pub fn run_example() -> spa_toolkit::Result<()> {
    for map in [NamedMap::Transpose(2).build()?, NamedMap::Reduction(2).build()?, NamedMap::Transpose(3).build()?] {
        let global = spa_bipartite(&map)?;
        let local = spa_locc(&map)?;
        let (wa, wb) = local.weights();
        let gap = local.mixture_choi().max_abs_diff(global.spa_map.choi());
        println!(
            "{map}: p* = {:.6}, threshold {:.6}, weights ({wa:.6}, {wb:.6}), gap {gap:.1e}",
            global.p_star, global.threshold
        );
        assert!(gap < 1e-9);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("locc_partial_transpose");
}
