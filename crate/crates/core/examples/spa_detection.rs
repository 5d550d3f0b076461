// Detection with the SPAed partial transpose, compared with PPT and CCNR,
// plus an isotropic sweep written as CSV.

use spa_toolkit::channels::NamedMap;
use spa_toolkit::detect::{ccnr_test, isotropic_sweep, ppt_test, spa_detect, sweep_boundary, write_sweep_csv};
use spa_toolkit::states::{isotropic, Bell};

pub fn run_example() -> spa_toolkit::Result<()> {
    let t2 = NamedMap::Transpose(2).build()?;
    for b in Bell::ALL {
        let r = spa_detect(&b.state(), &t2)?;
        println!("{}: statistic {:.6} vs {:.6} -> {:?}", b.name(), r.statistic, r.threshold, r.verdict);
    }

    let rho = isotropic(3, 0.7)?;
    let t3 = NamedMap::Transpose(3).build()?;
    for r in [spa_detect(&rho, &t3)?, ppt_test(&rho)?, ccnr_test(&rho)?] {
        println!("isotropic(3, 0.7) {:?}: {:.5} vs {:.5} -> {:?}", r.method, r.statistic, r.threshold, r.verdict);
    }

    let rows = isotropic_sweep(&t3, 1e-3)?;
    let path = std::env::temp_dir().join("spa_toolkit_isotropic_sweep.csv");
    write_sweep_csv(&rows, std::fs::File::create(&path)?)?;
    println!("sweep boundary {:?} (expected 0.75), CSV at {}", sweep_boundary(&rows), path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("spa_detection");
}
