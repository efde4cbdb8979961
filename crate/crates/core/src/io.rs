//! File formats: database CSVs, truth files, alignment listings, and
//! the CSV schemas of bound sweeps and experiment sweeps.
//!
//! All user-facing indices are 1-based. Every write goes through a
//! temp-file-plus-rename so interrupted runs never leave a truncated
//! file behind.

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::mc::SweepRow;
use crate::model::{Matrix, Permutation};
use crate::recover::PartialAlignment;
use std::fmt::Write as _;
use std::path::Path;

/// Atomically replace `path` with `contents`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = path.file_name().map_or_else(
        || ".tmp".to_string(),
        |f| format!(".{}.tmp-{}", f.to_string_lossy(), std::process::id()),
    );
    tmp.retain(|c| c != '/');
    let tmp_path = dir.join(tmp);
    std::fs::write(&tmp_path, contents)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

/// Format a float with `digits` significant digits, trimming trailing
/// zeros the way `%g` does.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-4..6).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.*e}", digits - 1)
    };
    // trim trailing zeros in the fractional part
    if let Some(epos) = s.find('e') {
        let (mant, e) = s.split_at(epos);
        let mant = if mant.contains('.') {
            mant.trim_end_matches('0').trim_end_matches('.')
        } else {
            mant
        };
        format!("{mant}{e}")
    } else if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Write a database matrix: one row per line, comma-separated floats in
/// shortest round-trip form.
pub fn write_matrix_csv(path: &Path, m: &Matrix) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.rows() {
        let mut first = true;
        for v in m.row(i) {
            if !first {
                out.push(',');
            }
            write!(out, "{v}").expect("string write");
            first = false;
        }
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// Read a database matrix, reporting line numbers for parse errors and
/// verifying a constant column count.
pub fn read_matrix_csv(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .enumerate()
            .map(|(col, cell)| {
                cell.trim().parse::<f64>().map_err(|_| Error::Malformed {
                    path: name.clone(),
                    line: idx + 1,
                    reason: format!("non-numeric cell {} ('{}')", col + 1, cell.trim()),
                })
            })
            .collect::<Result<_>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Malformed {
                    path: name,
                    line: idx + 1,
                    reason: format!("expected {w} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Malformed {
            path: name,
            line: 1,
            reason: "empty database file".to_string(),
        });
    }
    Matrix::from_rows(rows)
}

/// Write a ground-truth permutation as 1-based lines `i,sigma_i`.
pub fn write_truth_csv(path: &Path, sigma: &Permutation) -> Result<()> {
    let mut out = String::new();
    for i in 0..sigma.len() {
        writeln!(out, "{},{}", i + 1, sigma.apply(i) + 1).expect("string write");
    }
    write_atomic(path, &out)
}

/// Read a 1-based truth file into a permutation of the given size.
pub fn read_truth_csv(path: &Path, n: usize) -> Result<Permutation> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let mut map = vec![usize::MAX; n];
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| Error::Malformed {
            path: name.clone(),
            line: idx + 1,
            reason,
        };
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| bad("expected 'i,sigma_i'".to_string()))?;
        let i: usize = a
            .trim()
            .parse()
            .map_err(|_| bad(format!("non-integer index '{}'", a.trim())))?;
        let s: usize = b
            .trim()
            .parse()
            .map_err(|_| bad(format!("non-integer image '{}'", b.trim())))?;
        if i < 1 || i > n || s < 1 || s > n {
            return Err(bad(format!("indices must be in 1..={n}")));
        }
        if map[i - 1] != usize::MAX {
            return Err(bad(format!("duplicate row index {i}")));
        }
        map[i - 1] = s - 1;
    }
    if map.contains(&usize::MAX) {
        return Err(Error::Malformed {
            path: name,
            line: 0,
            reason: format!("truth file does not cover all {n} rows"),
        });
    }
    Permutation::new(map)
}

/// Alignment listing: 1-based lines `i,j`.
pub fn alignment_lines(alignment: &PartialAlignment) -> String {
    let mut out = String::new();
    for &(i, j) in alignment.pairs() {
        writeln!(out, "{},{}", i + 1, j + 1).expect("string write");
    }
    out
}

/// Header of the bound sweep CSV.
pub const BOUND_CSV_HEADER: &str =
    "n,d,rho,theta,beta,P,Q,fa_bound,argmin_k,md_bound,pe1_lo,pe1_up,pe2_up";

/// One bound report as a CSV row matching [`BOUND_CSV_HEADER`].
pub fn bound_csv_row(r: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.n,
        r.d,
        fmt_sig(r.rho, 6),
        fmt_sig(r.theta, 6),
        fmt_sig(r.test_beta, 6),
        fmt_sig(r.p, 6),
        fmt_sig(r.q, 6),
        fmt_sig(r.fa_bound.clipped, 6),
        r.fa_argmin_k,
        fmt_sig(r.md_bound, 6),
        fmt_sig(r.pe1_lower, 6),
        fmt_sig(r.pe1_upper, 6),
        fmt_sig(r.pe2_upper, 6),
    )
}

/// Header of the experiment sweep CSV: spec fields then result fields.
pub const EXPERIMENT_CSV_HEADER: &str = "axis,value,n,d,rho,theta,beta,gamma,r,trials,seed,\
     p_fa,p_fa_upper95,p_md,pe1,pe2,r_bar,wall_s";

/// One sweep row as a CSV row matching [`EXPERIMENT_CSV_HEADER`].
/// Fields an experiment mode does not estimate stay empty.
pub fn experiment_csv_row(axis_name: &str, row: &SweepRow) -> String {
    let rate = |r: &Option<crate::mc::Rate>| r.map_or(String::new(), |v| fmt_sig(v.point(), 6));
    let s = &row.spec;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        axis_name,
        fmt_sig(row.value, 6),
        s.params.n,
        s.params.d,
        fmt_sig(s.params.rho, 6),
        fmt_sig(s.theta, 6),
        fmt_sig(s.test_beta, 6),
        fmt_sig(s.gamma, 6),
        fmt_sig(s.r, 6),
        s.trials,
        s.seed,
        rate(&row.result.p_fa),
        row.result
            .p_fa
            .map_or(String::new(), |v| fmt_sig(v.cp_upper95(), 6)),
        rate(&row.result.p_md),
        rate(&row.result.pe1),
        rate(&row.result.pe2),
        row.result.r_bar.map_or(String::new(), |v| fmt_sig(v, 6)),
        fmt_sig(row.result.wall.as_secs_f64(), 6),
    )
}
