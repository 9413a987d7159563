//! After the Kraus operator a·I + b·|i⟩⟨i| the state is a coherent
//! superposition, not a mixture of ψ and |i⟩.

use qseal::analysis::mixture_gap_with_argmin;
use qseal::quantum::{PureState, C64};

fn main() -> qseal::Result<()> {
    let plus = PureState::normalize(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)])?;
    for b in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let (gap, p) = mixture_gap_with_argmin(&plus, 0, 1.0, b)?;
        println!("a = 1, b = {b:<4}: min trace distance {gap:.6} at p = {p:.4}");
    }
    let basis = PureState::basis(2, 0)?;
    let (gap, _) = mixture_gap_with_argmin(&basis, 0, 1.0, 1.0)?;
    println!("psi = |0>: {gap:.2e}");
    Ok(())
}
