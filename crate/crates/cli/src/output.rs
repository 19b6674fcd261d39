//! CSV/JSON artifact writing: fixed column orders, 17-significant-digit
//! round-trip-safe floats, atomic file replacement.

use std::fmt::Write as _;
use std::path::Path;

use symoverlap::field::ScanPoint;
use symoverlap::measures::CriterionReport;

/// 17 significant digits: round-trip safe for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Writes via a temporary file and an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

pub fn ho_demo_csv(rows: &[(f64, CriterionReport)]) -> String {
    let mut out = String::from("theta,e_n,d_sym,d_c,d_t,verdict\n");
    for (theta, r) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(*theta),
            fmt_f64(r.log_negativity),
            fmt_opt(r.d_sym),
            fmt_opt(r.d_c),
            fmt_opt(r.d_t),
            r.verdict
        );
    }
    out
}

/// Scan CSV with the leading parameter column named per scan kind.
pub fn scan_csv(param_name: &str, points: &[ScanPoint]) -> String {
    let mut out = format!("{param_name},d_sym,d_c,d_t,w_delta,w_dt,log_negativity,verdict\n");
    for p in points {
        match &p.report {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    fmt_f64(p.param),
                    fmt_opt(r.d_sym),
                    fmt_opt(r.d_c),
                    fmt_opt(r.d_t),
                    fmt_opt(r.w_delta),
                    fmt_opt(p.w_dt),
                    fmt_f64(r.log_negativity),
                    r.verdict
                );
            }
            None => {
                let _ = writeln!(out, "{},,,,,,,failed", fmt_f64(p.param));
            }
        }
    }
    out
}

pub fn profile_csv(r: &[f64], f_ap: &[f64], g_ap: &[f64]) -> String {
    let mut out = String::from("r,f_ap,g_ap\n");
    for i in 0..r.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(r[i]),
            fmt_f64(f_ap[i]),
            fmt_f64(g_ap[i])
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -1.2e-300] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn csv_headers_are_fixed() {
        assert!(ho_demo_csv(&[]).starts_with("theta,e_n,d_sym,d_c,d_t,verdict\n"));
        assert!(scan_csv("mu", &[])
            .starts_with("mu,d_sym,d_c,d_t,w_delta,w_dt,log_negativity,verdict\n"));
        assert!(profile_csv(&[], &[], &[]).starts_with("r,f_ap,g_ap\n"));
    }
}
