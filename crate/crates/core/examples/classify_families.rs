//! Finite-n verdicts for the built-in families, with the evidence behind them.

use qseal::analysis::{classify_family, ClassifierConfig, InstrumentRule};
use qseal::seals::SealFamily;

fn main() -> qseal::Result<()> {
    let cfg = ClassifierConfig::default();
    for (name, family) in [
        ("fourier", SealFamily::Fourier),
        ("tilted(0.3, 1)", SealFamily::criterion_a_exemplar()),
        ("tilted(0.3, 0.25)", SealFamily::scheme_a()),
        ("fixed_angle(0.3)", SealFamily::criterion_c_exemplar()),
    ] {
        let c = classify_family(&family, InstrumentRule::BestReadout, &cfg)?;
        println!("{name}: criterion {}", c.criterion);
        for e in &c.evidence {
            println!(
                "  n = {:>6}  H_cond = {:>12.6}  H_cond/H = {:.6}",
                e.n, e.h_cond, e.ratio
            );
        }
    }
    Ok(())
}
