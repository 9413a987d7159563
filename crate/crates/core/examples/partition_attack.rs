//! Read the leading ⌈n^{2α}⌉ bits of a tilted seal and see how often the
//! reader is right and still escapes the sealer's check.

use qseal::analysis::partition_correct_prob;
use qseal::seals::{Message, SealFamily};
use qseal::strategies::{default_partition_k, partition_readout};
use qseal::verifier::{joint_success_escape, Success};

fn main() -> qseal::Result<()> {
    let (theta_cap, alpha) = (0.3, 0.25);
    println!(
        "{:>8} {:>5} {:>10} {:>10} {:>10}",
        "n", "k", "p_max", "escape", "joint"
    );
    for n in [100, 1_000, 10_000, 100_000, 1_000_000] {
        let scheme = SealFamily::tilted(theta_cap, alpha).instantiate(n)?;
        let k = default_partition_k(n, alpha);
        let inst = partition_readout(n, k)?;
        let r = joint_success_escape(&scheme, &Message::zeros(n), &inst, Success::CorrectGuess)?;
        println!(
            "{n:>8} {k:>5} {:>10.6} {:>10.6} {:>10.6}",
            partition_correct_prob(&scheme, k)?,
            r.escape_prob,
            r.joint_success_escape
        );
    }
    let t2 = theta_cap * theta_cap;
    println!(
        "limits: exp(-Θ²) = {:.6}, exp(-2Θ²) = {:.6}",
        (-t2).exp(),
        (-2.0 * t2).exp()
    );
    Ok(())
}
