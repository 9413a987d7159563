//! Cross-check every fast path against dense reference code.

fn main() -> qseal::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let reports = qseal::oracle::run_builtin_suite(seed)?;
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    let worst = reports
        .iter()
        .max_by(|a, b| (a.abs_diff / a.tolerance).total_cmp(&(b.abs_diff / b.tolerance)));
    println!("{} comparisons, {} failed", reports.len(), failed.len());
    if let Some(w) = worst {
        println!(
            "closest to tolerance: {} (diff {:.2e}, tol {:.2e})",
            w.quantity, w.abs_diff, w.tolerance
        );
    }
    for f in failed {
        println!("FAIL {}: fast {} oracle {}", f.quantity, f.fast, f.oracle);
    }
    Ok(())
}
