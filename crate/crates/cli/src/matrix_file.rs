//! Plain-text network files: the first non-blank line holds the dimension M,
//! followed by M rows of M whitespace-separated `re,im` pairs. The format is
//! diffable and easy to hand-edit for small test networks.

use std::path::Path;

use num_complex::Complex64;
use qnet_core::unitary::ComplexMatrix;
use qnet_core::UnitaryMatrix;

use crate::error::{CliError, Result};

/// Read a unitary from `path`, validating against the library's unitarity
/// tolerance. Parse errors cite 1-based line numbers.
pub fn read_unitary(path: &Path) -> Result<UnitaryMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    parse_unitary(&text).map_err(|msg| CliError::Config(format!("{}: {msg}", path.display())))
}

pub fn parse_unitary(text: &str) -> std::result::Result<UnitaryMatrix, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty());

    let (_, header) = lines.next().ok_or("line 1: empty matrix file")?;
    let m: usize = header
        .trim()
        .parse()
        .map_err(|_| format!("line 1: expected the dimension M, found {:?}", header.trim()))?;
    if m == 0 {
        return Err("line 1: dimension must be at least 1".to_string());
    }

    let mut entries = Vec::with_capacity(m * m);
    for row in 0..m {
        let (index, line) = lines
            .next()
            .ok_or_else(|| format!("expected {m} matrix rows, file ends after {row}"))?;
        let lineno = index + 1;
        let cells: Vec<&str> = line.split_whitespace().collect();
        if cells.len() != m {
            return Err(format!(
                "line {lineno}: expected {m} entries, found {}",
                cells.len()
            ));
        }
        for cell in cells {
            let (re, im) = cell
                .split_once(',')
                .ok_or_else(|| format!("line {lineno}: entry {cell:?} is not a re,im pair"))?;
            let re: f64 = re
                .parse()
                .map_err(|_| format!("line {lineno}: bad real part in {cell:?}"))?;
            let im: f64 = im
                .parse()
                .map_err(|_| format!("line {lineno}: bad imaginary part in {cell:?}"))?;
            entries.push(Complex64::new(re, im));
        }
    }
    if let Some((index, _)) = lines.next() {
        return Err(format!(
            "line {}: trailing content after {m} matrix rows",
            index + 1
        ));
    }

    let mat = ComplexMatrix::from_rows(m, m, &entries).map_err(|e| e.to_string())?;
    UnitaryMatrix::from_complex(mat).map_err(|e| e.to_string())
}

/// Render in the format `read_unitary` accepts, with enough digits that the
/// round trip reproduces every f64 bit.
pub fn format_matrix(u: &UnitaryMatrix) -> String {
    let m = u.dim();
    let mut out = format!("{m}\n");
    for i in 0..m {
        let row: Vec<String> = (0..m)
            .map(|j| {
                let z = u.entry(i, j);
                format!("{:.17e},{:.17e}", z.re, z.im)
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qnet_core::rng::RngStream;
    use qnet_core::unitary::sample_haar_unitary;

    #[test]
    fn round_trip_is_exact() {
        let u = sample_haar_unitary(5, &mut RngStream::new(31, 0).rng()).unwrap();
        let parsed = parse_unitary(&format_matrix(&u)).unwrap();
        assert_eq!(parsed, u);
    }

    #[test]
    fn accepts_blank_lines_and_padding() {
        let text = "\n2\n  1,0   0,0\n\n0,0 0,-1\n\n";
        let u = parse_unitary(text).unwrap();
        assert_eq!(u.entry(1, 1), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn error_messages_carry_line_numbers() {
        let wide = parse_unitary("2\n1,0 0,0\n0,0 0,1 0,0\n").unwrap_err();
        assert!(wide.contains("line 3"), "{wide}");
        let pair = parse_unitary("2\n1,0 0,0\n0,0 0;1\n").unwrap_err();
        assert!(pair.contains("line 3") && pair.contains("re,im"), "{pair}");
        let number = parse_unitary("2\n1,0 x,0\n0,0 0,1\n").unwrap_err();
        assert!(number.contains("line 2"), "{number}");
        let short = parse_unitary("3\n1,0 0,0 0,0\n").unwrap_err();
        assert!(short.contains("ends after 1"), "{short}");
        let long = parse_unitary("1\n1,0\n1,0\n").unwrap_err();
        assert!(long.contains("line 3") && long.contains("trailing"), "{long}");
        let dim = parse_unitary("zero\n").unwrap_err();
        assert!(dim.contains("line 1"), "{dim}");
    }

    #[test]
    fn non_unitary_content_names_the_tolerance() {
        let err = parse_unitary("2\n2,0 0,0\n0,0 2,0\n").unwrap_err();
        assert!(err.contains("tolerance"), "{err}");
    }
}
