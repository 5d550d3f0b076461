// Build maps from the registry, inspect their Choi matrices and Kraus forms.

use spa_toolkit::channels::make_named_map;
use spa_toolkit::product::SearchOptions;
use spa_toolkit::states::Bell;
use spa_toolkit::tensor::pauli_x;

pub fn run_example() -> spa_toolkit::Result<()> {
    for (name, dim) in [("identity", 2), ("transpose", 2), ("reduction", 3), ("choi_map", 3)] {
        let map = make_named_map(name, Some(dim), &[])?;
        let c = map.classify(&SearchOptions::with_seed(7).starts(32))?;
        println!(
            "{map}: min Choi eigenvalue {:+.4}, CP {}, TP {}, positive (numerically) {}",
            c.min_choi_eigenvalue,
            c.is_cp,
            c.is_tp,
            !c.positivity.is_certified_nonpositive()
        );
    }

    // A CP map has Kraus operators that reproduce it.
    let dep = make_named_map("depolarize", Some(2), &[])?;
    let kraus = dep.kraus()?;
    let x = pauli_x();
    let diff = kraus.apply(&x).max_abs_diff(&dep.apply(&x)?);
    println!("depolarize: {} Kraus operators, completeness {:e}, action mismatch {diff:e}", kraus.len(), kraus.completeness_deviation());
    assert!(diff < 1e-12);

    // Partial transpose of a Bell state is the swap operator over two.
    let t = make_named_map("transpose", Some(2), &[])?.tensor_with_identity(2)?;
    let out = t.apply(Bell::PhiPlus.state().matrix())?;
    println!("(id ⊗ T)[φ⁺] min eigenvalue {:+.3}", spa_toolkit::tensor::min_eigenvalue(&out)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("choi_basics");
}
