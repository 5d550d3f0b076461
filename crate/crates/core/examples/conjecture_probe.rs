// Is the SPA of a positive map entanglement breaking? Certificates for the
// transpose, and a bounded search for the Choi map.

use spa_toolkit::channels::NamedMap;
use spa_toolkit::spa::{conjecture_report, EbOptions};

pub fn run_example() -> spa_toolkit::Result<()> {
    let mut opts = EbOptions::default();
    opts.gilbert.max_iter = 300;
    for map in [NamedMap::Transpose(2).build()?, NamedMap::Transpose(3).build()?, NamedMap::ChoiMap.build()?] {
        let r = conjecture_report(&map, &opts)?;
        let scan = r.isotropic_scan.as_ref().map(|s| (s.boundary_estimate, s.detects_all_entangled));
        println!(
            "{}: p* = {:.4}, verdict {:?} (certificate valid {}), PT min {:.4}, CCNR {:.4}, isotropic scan {:?}",
            r.map, r.p_star, r.verdict, r.certificate_valid, r.min_pt_eigenvalue, r.ccnr, scan
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("conjecture_probe");
}
