//! Run a sweep from an inline config and write the CSV report.
//!
//! ```bash
//! cargo run --example sweep_csv -- sweep.csv
//! ```

use std::path::PathBuf;

use qseal::runner::{emit_report, parse_config, run_sweep, Format};

const CONFIG: &str = r#"
config_version = 1

[scheme]
kind = "tilted"
theta_cap = 0.3
alpha = 0.25

[strategy]
kind = "partition"
k = "auto"

[sweep]
n = [100, 1000, 10000, 100000]
"#;

fn main() -> qseal::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "sweep.csv".into());
    let cfg = parse_config(CONFIG)?;
    let rows = run_sweep(&cfg)?;
    emit_report(&rows, Format::Csv, &out)?;
    for r in &rows {
        println!(
            "n = {:>6}  k = {:>4}  p_max = {:.4}  p_string = {:.2e}  joint = {:.4}  verdict {}",
            r.n, r.k, r.p_max, r.p_string, r.joint, r.verdict
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}
