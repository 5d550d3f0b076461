// Estimating the SPAed swap witness from simulated two-photon coincidences.

use spa_toolkit::detect::{hom_coincidence, hom_witness_estimate};
use spa_toolkit::states::{isotropic, Bell};
use spa_toolkit::tensor::basis_ket;
use spa_toolkit::witnesses::{spa_witness, swap_witness};
use spa_toolkit::{DensityMatrix, DimProfile};

pub fn run_example() -> spa_toolkit::Result<()> {
    let dims = DimProfile::single(2)?;
    let h = DensityMatrix::pure(&basis_ket(2, 0), dims.clone())?;
    let v = DensityMatrix::pure(&basis_ket(2, 1), dims)?;
    println!("p_c(H, H) = {}, p_c(H, V) = {}", hom_coincidence(&h, &h)?, hom_coincidence(&h, &v)?);

    let s = spa_witness(&swap_witness(2)?)?;
    for (name, rho) in [("psi-", Bell::PsiMinus.state()), ("isotropic(2, 0.8)", isotropic(2, 0.8)?)] {
        let exact = s.value(&rho);
        let r = hom_witness_estimate(&s, &rho, 100_000, 17)?;
        println!(
            "{name}: exact {exact:.4}, estimate {:.4} ± {:.4}, threshold {:.4} -> {:?}",
            r.statistic,
            r.stderr.unwrap_or(0.0),
            r.threshold,
            r.verdict
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("hom_estimate");
}
