//! The shifted-projector POVM a·I + b·|i⟩⟨i| interpolates between doing
//! nothing (ν = 0) and a full basis measurement (ν = 1).

use qseal::quantum::{apply_instrument, PureState, C64};
use qseal::strategies::{q_povm, QPovmParams};
use qseal::verifier::escape_probability;

fn main() -> qseal::Result<()> {
    let dim = 4;
    let psi = PureState::normalize(vec![
        C64::new(0.8, 0.0),
        C64::new(0.4, 0.1),
        C64::new(0.3, -0.2),
        C64::new(0.1, 0.0),
    ])?;

    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>9}",
        "nu", "a", "b", "P(0)", "escape"
    );
    for j in 0..=10 {
        let nu = j as f64 / 10.0;
        let p = QPovmParams::new(dim, nu)?;
        let inst = q_povm(dim, nu)?;
        let ens = apply_instrument(&inst, &psi)?;
        println!(
            "{nu:>5.1} {:>9.6} {:>9.6} {:>9.6} {:>9.6}",
            p.a,
            p.b,
            ens.probability_of(0),
            escape_probability(&psi, &inst)?
        );
    }
    Ok(())
}
