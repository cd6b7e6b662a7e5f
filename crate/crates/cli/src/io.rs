//! Output plumbing: 17-significant-digit float formatting, RFC-4180 CSV
//! and atomic file writes (temp file + rename).

use std::fs;
use std::io::Write;
use std::path::Path;

/// 17 significant digits, scientific; enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with a mandatory header row, CRLF line endings.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String, String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    writer
        .write_record(header)
        .map_err(|e| format!("csv write failed: {e}"))?;
    for row in rows {
        writer
            .write_record(row)
            .map_err(|e| format!("csv write failed: {e}"))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| format!("csv flush failed: {e}"))?;
    String::from_utf8(bytes).map_err(|e| format!("csv produced invalid utf-8: {e}"))
}

/// Write atomically: the target either keeps its old content or carries
/// the complete new content.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), String> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    {
        let mut file = fs::File::create(&tmp)
            .map_err(|e| format!("cannot create {}: {e}", tmp.display()))?;
        file.write_all(content.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", tmp.display()))?;
        file.sync_all()
            .map_err(|e| format!("cannot sync {}: {e}", tmp.display()))?;
    }
    fs::rename(&tmp, path)
        .map_err(|e| format!("cannot rename {} into place: {e}", tmp.display()))
}

pub fn read_to_string(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| format!("malformed JSON in {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_has_seventeen_significant_digits() {
        let s = fmt17(0.4254590644615122);
        assert_eq!(s, "4.2545906446151221e-1");
        assert_eq!(fmt17(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_uses_crlf_and_header() {
        let t = csv_table(&["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(t, "a,b\r\n1,2\r\n");
    }
}
