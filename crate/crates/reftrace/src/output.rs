//! CSV and float formatting shared by every report file.

use std::fs;
use std::path::Path;

/// CSV writer with `,` separators, minimal quoting and LF line endings.
pub fn csv_writer(path: &Path) -> csv::Result<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_path(path)
}

/// Fixed six-decimal rendering; negative zero prints as `0.000000`.
pub fn fmt_f64(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// p-values keep more precision, in scientific notation when tiny.
pub fn fmt_p(p: f64) -> String {
    if p != 0.0 && p < 1e-4 {
        format!("{p:.6e}")
    } else {
        format!("{p:.6}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(fmt_f64(0.5), "0.500000");
        assert_eq!(fmt_f64(-0.0), "0.000000");
        assert_eq!(fmt_opt(None), "");
        assert_eq!(fmt_p(0.1), "0.100000");
        assert_eq!(fmt_p(1.5e-7), "1.500000e-7");
    }

    #[test]
    fn lf_endings_and_quoting() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let mut w = csv_writer(&path).unwrap();
        w.write_record(["a", "b,c"]).unwrap();
        w.flush().unwrap();
        drop(w);
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,\"b,c\"\n");
    }
}
