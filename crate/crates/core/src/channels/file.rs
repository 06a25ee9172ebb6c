//! Plain-text channel files.
//!
//! Layout: one header line, then one matrix row per line as comma-separated
//! `re,im` pairs.  Floats are written in shortest round-trip form, so a
//! save/load cycle reproduces every entry bit-for-bit.
//!
//! ```text
//! qhl-channel dim_in=16 dim_out=16 flags=tp,cp
//! 1,0,0,0,...
//! ...
//! ```
//!
//! `flags` is `none` or a comma list of `tp` (trace preserving) and `cp`
//! (completely positive); declared flags are re-validated on load.

use std::fmt::Write as _;
use std::path::Path;

use super::Superoperator;
use crate::error::Error;
use crate::linalg::{c, CMat};
use crate::Result;

const MAGIC: &str = "qhl-channel";

/// Serialize a channel to its text form.
pub fn superop_to_string(s: &Superoperator) -> String {
    let flags = match (s.trace_preserving, s.completely_positive) {
        (false, false) => "none".to_string(),
        (tp, cp) => {
            let mut parts = Vec::new();
            if tp {
                parts.push("tp");
            }
            if cp {
                parts.push("cp");
            }
            parts.join(",")
        }
    };
    let mut out = format!(
        "{MAGIC} dim_in={} dim_out={} flags={}\n",
        s.dim_in(),
        s.dim_out(),
        flags
    );
    let m = s.matrix();
    for i in 0..s.dim_out() {
        let mut line = String::new();
        for j in 0..s.dim_in() {
            if j > 0 {
                line.push(',');
            }
            let z = m[(i, j)];
            let _ = write!(line, "{:?},{:?}", z.re, z.im);
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Write a channel file atomically (temp file + rename), so a failed write
/// never leaves a partial file behind.
pub fn save_superop(s: &Superoperator, path: &Path) -> Result<()> {
    let text = superop_to_string(s);
    let tmp = path.with_extension("tmp-write");
    std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Parse a channel from its text form; validates any declared flags.
pub fn superop_from_str(text: &str) -> Result<Superoperator> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty channel file"))?;

    let mut dim_in: Option<usize> = None;
    let mut dim_out: Option<usize> = None;
    let mut tp = false;
    let mut cp = false;
    let mut col = 1usize;
    for (k, tok) in header.split_whitespace().enumerate() {
        // Column of the token start within the header line, 1-based.
        col = header.find(tok).map(|p| p + 1).unwrap_or(col);
        if k == 0 {
            if tok != MAGIC {
                return Err(parse_err(1, 1, format!("expected `{MAGIC}` header, got `{tok}`")));
            }
            continue;
        }
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(1, col, format!("expected key=value, got `{tok}`")))?;
        match key {
            "dim_in" | "dim_out" => {
                let v: usize = value
                    .parse()
                    .map_err(|_| parse_err(1, col, format!("bad integer `{value}`")))?;
                if v == 0 {
                    return Err(parse_err(1, col, "dimension must be positive"));
                }
                if key == "dim_in" {
                    dim_in = Some(v);
                } else {
                    dim_out = Some(v);
                }
            }
            "flags" => {
                for f in value.split(',') {
                    match f {
                        "tp" => tp = true,
                        "cp" => cp = true,
                        "none" | "" => {}
                        other => {
                            return Err(parse_err(1, col, format!("unknown flag `{other}`")))
                        }
                    }
                }
            }
            other => return Err(parse_err(1, col, format!("unknown header key `{other}`"))),
        }
    }
    let dim_in = dim_in.ok_or_else(|| parse_err(1, 1, "header missing dim_in"))?;
    let dim_out = dim_out.ok_or_else(|| parse_err(1, 1, "header missing dim_out"))?;

    let mut mat = CMat::zeros(dim_out, dim_in);
    let mut rows_read = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if rows_read >= dim_out {
            return Err(parse_err(lineno, 1, "more rows than dim_out"));
        }
        let mut fields = Vec::with_capacity(2 * dim_in);
        let mut offset = 0usize;
        for field in line.split(',') {
            let column = offset + 1;
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(lineno, column, format!("bad float `{}`", field.trim())))?;
            fields.push(v);
            offset += field.len() + 1;
        }
        if fields.len() != 2 * dim_in {
            return Err(parse_err(
                lineno,
                1,
                format!("row has {} values, expected {}", fields.len(), 2 * dim_in),
            ));
        }
        for j in 0..dim_in {
            mat[(rows_read, j)] = c(fields[2 * j], fields[2 * j + 1]);
        }
        rows_read += 1;
    }
    if rows_read != dim_out {
        return Err(parse_err(
            rows_read + 2,
            1,
            format!("expected {dim_out} rows, found {rows_read}"),
        ));
    }
    Superoperator::with_flags(mat, tp, cp)
}

/// Load a channel file; see [`superop_from_str`].
pub fn load_superop(path: &Path) -> Result<Superoperator> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    superop_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        depolarizing_superop, lindblad_generator, magnus2_propagator, swap_unitary,
        unitary_superop, LindbladSpec, PiecewiseGenerator,
    };
    use crate::linalg::sigma_z;

    #[test]
    fn identity_roundtrip_is_exact() {
        let s = Superoperator::identity(16);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("identity.qchan");
        save_superop(&s, &path).unwrap();
        let back = load_superop(&path).unwrap();
        assert_eq!(back.matrix(), s.matrix());
        assert!(back.trace_preserving && back.completely_positive);
    }

    #[test]
    fn arbitrary_entries_roundtrip_bit_identical() {
        let mut r = crate::testutil::rng(81);
        let m = crate::testutil::random_matrix(&mut r, 4);
        let s = Superoperator::from_matrix(m);
        let text = superop_to_string(&s);
        let back = superop_from_str(&text).unwrap();
        for (a, b) in s.matrix().iter().zip(back.matrix().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        // And the decimal text itself is stable under one more cycle.
        assert_eq!(text, superop_to_string(&back));
    }

    #[test]
    fn malformed_rows_report_positions() {
        let text = "qhl-channel dim_in=2 dim_out=2 flags=none\n1,0,2,0\n3,0\n";
        match superop_from_str(text) {
            Err(Error::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected ParseError, got {other:?}"),
        }

        let text = "qhl-channel dim_in=2 dim_out=2 flags=none\n1,0,x,0\n0,0,0,0\n";
        match superop_from_str(text) {
            Err(Error::ParseError { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 5);
            }
            other => panic!("expected ParseError, got {other:?}"),
        }

        assert!(matches!(
            superop_from_str("bogus header\n"),
            Err(Error::ParseError { line: 1, .. })
        ));
    }

    #[test]
    fn declared_flags_are_validated_on_load() {
        // A Lindblad-propagated noisy swap is genuinely TP...
        let h = crate::linalg::kron(&sigma_z(), &sigma_z());
        let g = lindblad_generator(&LindbladSpec {
            hamiltonian: h,
            collapse: vec![(crate::linalg::kron(&sigma_z(), &crate::linalg::id2()), 0.1)],
        })
        .unwrap();
        let sched = PiecewiseGenerator::new(vec![(g, 0.7)]).unwrap();
        let prop = magnus2_propagator(&sched).unwrap();
        let gate = unitary_superop(&swap_unitary()).compose(&prop).unwrap();
        let flagged = Superoperator::with_flags(gate.matrix().clone(), true, true).unwrap();
        let text = superop_to_string(&flagged);
        assert!(superop_from_str(&text).is_ok());

        // ...but corrupting one entry must trip the TP validation.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[1] = lines[1].replacen(char::is_numeric, "9", 1);
        let corrupted = lines.join("\n");
        match superop_from_str(&corrupted) {
            Err(Error::ChannelFlagViolation(_)) => {}
            other => panic!("expected flag violation, got {other:?}"),
        }
    }

    #[test]
    fn depolarizing_channel_file_keeps_flags() {
        let s = depolarizing_superop(0.3, 1).unwrap();
        let text = superop_to_string(&s);
        assert!(text.starts_with("qhl-channel dim_in=4 dim_out=4 flags=tp,cp"));
        let back = superop_from_str(&text).unwrap();
        assert!(back.trace_preserving && back.completely_positive);
    }
}
