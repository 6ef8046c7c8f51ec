use std::fmt::Write as _;

use moments_core::MomentSummary;
use serde::Serialize;

/// Summary statistics plus run metadata.
///
/// The JSON form always carries the same keys in the same order:
/// `n, mean, variance, sample_variance, skewness, kurtosis, excess_kurtosis, central_moments,
/// bad_tokens, elapsed_ms`. Absent statistics are `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputReport {
    #[serde(skip)]
    pub input: String,
    #[serde(flatten)]
    pub summary: MomentSummary,
    pub bad_tokens: u64,
    pub elapsed_ms: f64,
}

impl OutputReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report is always serializable")
    }

    pub fn to_table(&self) -> String {
        let s = &self.summary;
        let mut rows: Vec<(String, String)> = vec![
            ("input".into(), self.input.clone()),
            ("n".into(), s.count.to_string()),
            ("bad tokens".into(), self.bad_tokens.to_string()),
            ("mean".into(), sig6(s.mean)),
            ("variance".into(), sig6(s.variance)),
            ("sample variance".into(), opt(s.sample_variance)),
            ("skewness".into(), opt(s.skewness)),
            ("kurtosis".into(), opt(s.kurtosis)),
            ("excess kurtosis".into(), opt(s.excess_kurtosis)),
        ];
        for (q, m) in (2..).zip(&s.central_moments) {
            rows.push((format!("central moment {q}"), sig6(*m)));
        }
        rows.push(("elapsed ms".into(), format!("{:.3}", self.elapsed_ms)));
        render_rows(&rows)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), sig6)
}

pub(crate) fn render_rows(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

/// Six significant digits, trailing zeros trimmed, exponent form outside `[1e-4, 1e6)`.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{v:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new digit (999999.5 -> 1000000); still six digits of precision
    trim_zeros(&s).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(3.0), "3");
        assert_eq!(sig6(1.7), "1.7");
        assert_eq!(sig6(-1.3000000000000003), "-1.3");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(2.0 / 3.0), "0.666667");
        assert_eq!(sig6(123456.789), "123457");
        assert_eq!(sig6(1e9), "1e9");
        assert_eq!(sig6(-1.234567e-7), "-1.23457e-7");
        assert_eq!(sig6(0.00012345678), "0.000123457");
        assert_eq!(sig6(f64::INFINITY), "inf");
    }

    fn report() -> OutputReport {
        OutputReport {
            input: "-".into(),
            summary: MomentSummary {
                count: 3,
                mean: 7.0,
                variance: 0.0,
                sample_variance: Some(0.0),
                skewness: None,
                kurtosis: None,
                excess_kurtosis: None,
                central_moments: vec![0.0, 0.0, 0.0],
            },
            bad_tokens: 0,
            elapsed_ms: 0.5,
        }
    }

    #[test]
    fn json_key_order() {
        assert_eq!(
            report().to_json(),
            r#"{"n":3,"mean":7.0,"variance":0.0,"sample_variance":0.0,"skewness":null,"kurtosis":null,"excess_kurtosis":null,"central_moments":[0.0,0.0,0.0],"bad_tokens":0,"elapsed_ms":0.5}"#
        );
    }

    #[test]
    fn table_marks_absent() {
        let t = report().to_table();
        assert!(t.contains("skewness          -"), "{t}");
        assert!(t.contains("central moment 4  0"), "{t}");
    }
}
