//! Seal a bit string with the tilted product scheme and look at the state.
//!
//! ```bash
//! cargo run --example encode_scheme_a -- 0110
//! ```

use qseal::seals::{Message, SealFamily};

fn main() -> qseal::Result<()> {
    let bits = std::env::args().nth(1).unwrap_or_else(|| "0110".into());
    let msg = Message::parse_bits(&bits)?;
    let n = bits.len();

    let scheme = SealFamily::scheme_a().instantiate(n)?;
    let state = scheme.encode(&msg)?;
    let theta = scheme.product_angles().unwrap()[0];
    println!("n = {n}, per-bit angle = {theta:.6}");

    for (i, [a, b]) in state.qubit_factorization().unwrap().iter().enumerate() {
        println!("qubit {i}: {:+.6}|0> {:+.6}|1>", a.re, b.re);
    }
    if n <= 6 {
        for (i, amp) in state.amplitudes()?.iter().enumerate() {
            if amp.norm_sqr() > 1e-6 {
                println!("|{i:0n$b}>  {:+.6}", amp.re);
            }
        }
    }
    Ok(())
}
