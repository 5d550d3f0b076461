// Witnesses from positive maps, their SPA, local decompositions and the
// measurement-device-independent form.

use spa_toolkit::channels::NamedMap;
use spa_toolkit::states::{max_entangled_projector, Bell};
use spa_toolkit::witnesses::{
    decompose_local, evaluate_witness, mdi_witness, optimize_witness_step, spa_witness, spanning_property_check,
    witness_from_map,
};

pub fn run_example() -> spa_toolkit::Result<()> {
    let w = witness_from_map(&NamedMap::Transpose(2).build()?, None)?;
    for b in Bell::ALL {
        let e = evaluate_witness(&w, &b.state())?;
        println!("tr[W {}] = {:+.3} detected {}", b.name(), e.value, e.detected);
    }

    let s = spa_witness(&w)?;
    println!("SPAed swap witness: p* = {:.4}, threshold {:.4}", s.p_star, s.threshold);
    if let Some(terms) = s.separable_decomposition(0)? {
        println!("W̃ is a mixture of {} product states", terms.len());
    }

    let dec = decompose_local(&w)?;
    let mdi = mdi_witness(&dec);
    let psi_t = Bell::PsiMinus.state().transpose();
    println!(
        "{} local terms, reconstruction {:.1e}, MDI value on (ψ⁻)ᵀ {:+.3}",
        dec.len(),
        dec.reconstruct().max_abs_diff(&w.operator),
        mdi.evaluate(psi_t.matrix())
    );

    let step = optimize_witness_step(&w, &max_entangled_projector(2), 0.6, 3)?;
    println!("W − 0.6 P⁺: product minimum {:+.3}, still a witness {}", step.product_minimum, step.still_witness);

    let span = spanning_property_check(&w, 64, 5)?;
    println!("kernel product states {}, span dimension {}", span.kernel_states, span.span_dimension);

    let choi = witness_from_map(&NamedMap::ChoiMap.build()?, None)?;
    println!("Choi-map witness has {} local terms", decompose_local(&choi)?.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("witnesses");
}
