//! Fourier seals have equal-magnitude coefficients yet are orthonormal, so a
//! projective decode reads the message perfectly and is never detected.

use qseal::seals::{FourierSeal, Message, SealScheme};
use qseal::strategies::projective_decode;
use qseal::verifier::{joint_success_escape, Success};

fn main() -> qseal::Result<()> {
    for n_messages in [2, 8, 64, 256] {
        let scheme = SealScheme::Fourier(FourierSeal::new(n_messages)?);
        let inst = projective_decode(&scheme)?;
        let mut worst: f64 = 1.0;
        for i in 0..n_messages {
            let r =
                joint_success_escape(&scheme, &Message::Index(i), &inst, Success::CorrectGuess)?;
            worst = worst.min(r.joint_success_escape);
        }
        println!("N = {n_messages:>3}: min P(read correctly and escape) = {worst:.12}");
    }
    Ok(())
}
