//! Byte-exact artifact writers: atomic file replacement, binary pixmaps,
//! and plain numeric CSV.
//!
//! Every writer here is deterministic — the same inputs produce the same
//! bytes — so reports and images can be compared with `cmp` across runs.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Color assigned to each orbit verdict code (bounded witness, certified
/// escape, undecided), as RGB triples for the pixmap renderer.
pub const PALETTE: [[u8; 3]; 3] = [
    [38, 84, 190],   // bounded witness: blue
    [235, 122, 36],  // certified escape: orange
    [156, 156, 156], // undecided: gray
];

/// Writes `bytes` to `path` atomically: the data lands in a temporary file
/// in the destination directory and is renamed over the target, so readers
/// never observe a half-written file and reruns replace artifacts in place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Encodes verdict codes as a binary P6 pixmap (8 bits per channel).
///
/// The codes are row-major: row 0 is the lowest log-radius ring, column 0
/// the smallest angle, matching the grid classifier's layout. Codes outside
/// the palette render as black.
pub fn encode_p6(width: usize, height: usize, codes: &[u8]) -> Vec<u8> {
    assert_eq!(
        codes.len(),
        width * height,
        "pixel count must match width * height"
    );
    let header = format!("P6\n{width} {height}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * codes.len());
    out.extend_from_slice(header.as_bytes());
    for &code in codes {
        let rgb = PALETTE.get(code as usize).copied().unwrap_or([0, 0, 0]);
        out.extend_from_slice(&rgb);
    }
    out
}

/// Renders a header and numeric rows as CSV.
///
/// Fields are joined bare (no quoting), which is sound because every caller
/// passes plain numbers; an assertion rejects anything that would need
/// escaping.
pub fn encode_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let clean = |s: &str| {
        assert!(
            !s.contains([',', '"', '\n', '\r']),
            "CSV fields must not need escaping, got {s:?}"
        );
    };
    let mut out = String::new();
    header.iter().for_each(|h| clean(h));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        assert_eq!(
            row.len(),
            header.len(),
            "CSV row width must match the header"
        );
        row.iter().for_each(|f| clean(f));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
