use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{family_entropies, max_partition_size, Criterion, InstrumentRule};
use crate::error::Result;
use crate::seals::SealFamily;

pub const TABLE1_GRID: [usize; 3] = [100, 1_000, 10_000];
pub const TABLE1_THRESHOLD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub criterion: Criterion,
    pub family: String,
    pub n: usize,
    pub h_cond: f64,
    pub h_cond_over_h: f64,
    /// `log₂|𝔓|`, the largest leading-bit partition read with probability ≥ 1/2.
    pub log_partition: usize,
    pub log_partition_over_n: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub rows: Vec<Table1Row>,
}

/// Expected large-`n` behavior of `log|𝔓|` for each criterion.
pub fn scaling_label(c: Criterion) -> &'static str {
    match c {
        Criterion::A => "+inf, scales linearly with n; ratio -> 1",
        Criterion::B => "+inf, but may scale sublinearly with n; ratio can be 0",
        Criterion::C => "can be finite in the worst case; ratio can be 0",
    }
}

pub fn exemplars() -> [(Criterion, &'static str, SealFamily); 3] {
    [
        (
            Criterion::A,
            "tilted(theta_cap=0.3, alpha=1)",
            SealFamily::criterion_a_exemplar(),
        ),
        (
            Criterion::B,
            "tilted(theta_cap=0.3, alpha=0.25)",
            SealFamily::scheme_a(),
        ),
        (
            Criterion::C,
            "fixed_angle(theta=0.3)",
            SealFamily::criterion_c_exemplar(),
        ),
    ]
}

/// Evaluate the three exemplar families on `grid`.
pub fn table1_on(grid: &[usize]) -> Result<Table1> {
    let cells: Vec<(Criterion, &str, SealFamily, usize)> = exemplars()
        .into_iter()
        .flat_map(|(c, name, fam)| grid.iter().map(move |&n| (c, name, fam.clone(), n)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|(criterion, name, family, n)| {
            let e = family_entropies(family, *n, InstrumentRule::BestReadout)?;
            let k = max_partition_size(&family.instantiate(*n)?, TABLE1_THRESHOLD)?;
            Ok(Table1Row {
                criterion: *criterion,
                family: (*name).to_owned(),
                n: *n,
                h_cond: e.h_cond,
                h_cond_over_h: e.h_cond / e.h,
                log_partition: k,
                log_partition_over_n: k as f64 / *n as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1 { rows })
}

pub fn table1_demo() -> Result<Table1> {
    table1_on(&TABLE1_GRID)
}

impl Table1 {
    pub fn rows_for(&self, c: Criterion) -> impl Iterator<Item = &Table1Row> {
        self.rows.iter().filter(move |r| r.criterion == c)
    }

    pub fn csv_records(&self) -> Vec<[String; 7]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    r.criterion.to_string(),
                    r.family.clone(),
                    r.n.to_string(),
                    super::report::format_real(r.h_cond),
                    super::report::format_real(r.h_cond_over_h),
                    r.log_partition.to_string(),
                    super::report::format_real(r.log_partition_over_n),
                ]
            })
            .collect()
    }
}

pub const TABLE1_COLUMNS: [&str; 7] = [
    "criterion",
    "family",
    "n",
    "H_cond",
    "H_cond/H",
    "log2|P|",
    "log2|P|/n",
];

impl fmt::Display for Table1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<9} {:<34} {:>7} {:>12} {:>10} {:>8} {:>10}",
            "criterion", "family", "n", "H_cond", "H_cond/H", "log2|P|", "log2|P|/n"
        )?;
        for c in [Criterion::A, Criterion::B, Criterion::C] {
            for r in self.rows_for(c) {
                writeln!(
                    f,
                    "{:<9} {:<34} {:>7} {:>12.6} {:>10.6} {:>8} {:>10.6}",
                    c.to_string(),
                    r.family,
                    r.n,
                    r.h_cond,
                    r.h_cond_over_h,
                    r.log_partition,
                    r.log_partition_over_n
                )?;
            }
            writeln!(f, "{:<9} expected: {}", "", scaling_label(c))?;
        }
        write!(
            f,
            "(finite-n evaluation; partitions counted at p_max >= {TABLE1_THRESHOLD})"
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_row_is_constant() {
        let t = table1_demo().unwrap();
        assert!(t.rows_for(Criterion::C).all(|r| r.log_partition == 7));
        assert_eq!(t.rows.len(), 9);
    }

    #[test]
    fn a_row_reads_everything() {
        let t = table1_demo().unwrap();
        let r = t.rows_for(Criterion::A).find(|r| r.n == 1_000).unwrap();
        assert!((r.log_partition_over_n - 1.0).abs() <= 0.05);
    }

    #[test]
    fn display_mentions_labels() {
        let text = table1_demo().unwrap().to_string();
        assert!(text.contains("scales linearly with n"));
        assert!(text.contains("may scale sublinearly"));
        assert!(text.contains("can be finite in the worst case"));
    }
}
