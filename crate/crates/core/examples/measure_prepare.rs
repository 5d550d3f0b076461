// The SPAed qubit transpose four ways: as a formula, as a random-unitary
// channel, and as measure-and-prepare on the tetrahedron and on the MUBs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spa_toolkit::channels::NamedMap;
use spa_toolkit::designs::{design_channel, mub, sic};
use spa_toolkit::states::random_density;
use spa_toolkit::tensor::{pauli_x, pauli_z};
use spa_toolkit::{ComplexMatrix, DimProfile};

fn random_unitary_form(rho: &ComplexMatrix) -> ComplexMatrix {
    let (x, z) = (pauli_x(), pauli_z());
    (&(rho + &x.matmul(rho).matmul(&x)) + &z.matmul(rho).matmul(&z)).scale(1.0 / 3.0)
}

pub fn run_example() -> spa_toolkit::Result<()> {
    let formula = NamedMap::Transpose(2).build()?.mix_with_noise(2.0 / 3.0)?;
    let tetra = design_channel(&sic(2, None)?)?;
    let bases = design_channel(&mub(2)?)?;
    println!("tetrahedron: {} effects, MUB: {} effects", tetra.povm().len(), bases.povm().len());

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let dims = DimProfile::single(2)?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = random_density(&dims, 2, &mut rng);
        let a = formula.apply(rho.matrix())?;
        for b in [random_unitary_form(rho.matrix()), tetra.apply(rho.matrix())?, bases.apply(rho.matrix())?] {
            worst = worst.max(a.max_abs_diff(&b));
        }
    }
    println!("largest disagreement over 100 states: {worst:.1e}");
    assert!(worst < 1e-9);

    // The qutrit SIC realizes the d = 3 case.
    let qutrit = design_channel(&sic(3, None)?)?.to_map()?;
    let target = NamedMap::Transpose(3).build()?.mix_with_noise(0.75)?;
    println!("qutrit SIC channel vs SPAed transpose: {:.1e}", qutrit.choi().max_abs_diff(target.choi()));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("measure_prepare");
}
