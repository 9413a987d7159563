use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::Format;
use super::sweep::{SweepRow, COLUMNS};
use crate::error::{Result, SealError};

/// Reals in CSV output: 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn sweep_record(r: &SweepRow) -> [String; 12] {
    [
        r.n.to_string(),
        r.k.to_string(),
        format_real(r.p_bit),
        format_real(r.p_string),
        format_real(r.p_max),
        format_real(r.escape),
        format_real(r.joint),
        format_real(r.h),
        format_real(r.h_cond),
        format_real(r.h_cond_over_h),
        r.k_star.to_string(),
        r.verdict.clone(),
    ]
}

/// Render sweep rows as CSV or JSON bytes, newline-terminated.
pub fn render_sweep(rows: &[SweepRow], format: Format) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(SealError::param("rows", "nothing to emit"));
    }
    for r in rows {
        r.validate()?;
    }
    match format {
        Format::Csv => render_csv(&COLUMNS, rows.iter().map(sweep_record)),
        Format::Json => render_json(rows),
    }
}

pub fn render_csv<H, R, I>(header: &[H], records: I) -> Result<Vec<u8>>
where
    H: AsRef<[u8]>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
    I: IntoIterator<Item = R>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for rec in records {
        w.write_record(rec)?;
    }
    w.into_inner().map_err(|e| SealError::Io(e.into_error()))
}

pub fn render_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Write sweep rows to `path`.
pub fn emit_report(rows: &[SweepRow], format: Format, path: &Path) -> Result<()> {
    let bytes = render_sweep(rows, format)?;
    write_bytes(path, &bytes)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Read back a report written by [`emit_report`].
pub fn load_report(path: &Path, format: Format) -> Result<Vec<SweepRow>> {
    match format {
        Format::Json => Ok(serde_json::from_slice(&std::fs::read(path)?)?),
        Format::Csv => {
            let mut rdr = csv::Reader::from_path(path)?;
            Ok(rdr.deserialize().collect::<std::result::Result<_, _>>()?)
        }
    }
}
