/*
Copyright 2026 The distpd Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

//! Reader and writer for the LibSVM text format: one sample per line,
//! `label idx:val idx:val …` with 1-based ascending feature indices.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Feature dimension to use instead of the largest index seen.
    pub dim: Option<usize>,
    /// Map label sets `{0, 1}` and `{−1, +1}` to `{−1, +1}`.
    pub normalize_labels: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            dim: None,
            normalize_labels: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmData {
    pub x: FeatureMatrix<f64>,
    pub labels: Vec<f64>,
    /// Largest feature index present in the file (0 if all rows are empty).
    pub max_index: usize,
    /// Whether the labels were recognized as binary and mapped to ±1.
    pub binary: bool,
}

fn parse_number(tok: &str) -> Option<f64> {
    let cleaned;
    let tok = if tok.contains('\u{2212}') {
        cleaned = tok.replace('\u{2212}', "-");
        cleaned.as_str()
    } else {
        tok
    };
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses LibSVM text. Blank lines and `#` comments are ignored.
pub fn parse_libsvm<R: BufRead>(reader: R, opts: ParseOptions) -> Result<LibsvmData> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |reason: String| Error::Parse {
            line: line_no,
            reason,
        };
        let mut toks = content.split_whitespace();
        let label_tok = toks.next().expect("non-empty line has a token");
        let label =
            parse_number(label_tok).ok_or_else(|| err(format!("invalid label '{label_tok}'")))?;
        let mut entries = Vec::new();
        let mut last = 0;
        for tok in toks {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected idx:val, got '{tok}'")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(format!("invalid feature index '{idx}'")))?;
            if idx == 0 {
                return Err(err("feature indices are 1-based; found index 0".into()));
            }
            if idx <= last {
                return Err(err(format!(
                    "feature indices must be strictly ascending ({idx} after {last})"
                )));
            }
            let val = parse_number(val).ok_or_else(|| err(format!("invalid value '{val}'")))?;
            last = idx;
            entries.push((idx, val));
        }
        max_index = max_index.max(last);
        labels.push(label);
        rows.push(entries);
    }
    if rows.is_empty() {
        return Err(Error::InvalidData("no samples in LibSVM input".into()));
    }
    let d = match opts.dim {
        Some(d) if d < max_index => {
            return Err(Error::InvalidData(format!(
                "dimension override {d} is smaller than the largest index {max_index}"
            )))
        }
        Some(d) => d,
        None => max_index,
    }
    .max(1);
    let n = rows.len();
    let mut data = vec![0.0; d * n];
    for (i, row) in rows.iter().enumerate() {
        for &(idx, val) in row {
            data[i * d + idx - 1] = val;
        }
    }
    let x = FeatureMatrix::from_col_major(d, n, data)?;
    let mut binary = false;
    if opts.normalize_labels {
        if let Some(mapped) = binary_labels(&labels) {
            labels = mapped;
            binary = true;
        }
    }
    Ok(LibsvmData {
        x,
        labels,
        max_index,
        binary,
    })
}

pub fn parse_libsvm_str(text: &str, opts: ParseOptions) -> Result<LibsvmData> {
    parse_libsvm(text.as_bytes(), opts)
}

/// Maps labels drawn from `{0, 1}` or `{−1, +1}` to `{−1, +1}`; `None` for
/// any other label set.
pub fn binary_labels(labels: &[f64]) -> Option<Vec<f64>> {
    if labels.iter().all(|&y| y == 1.0 || y == -1.0) {
        Some(labels.to_vec())
    } else if labels.iter().all(|&y| y == 0.0 || y == 1.0) {
        Some(labels.iter().map(|&y| if y == 1.0 { 1.0 } else { -1.0 }).collect())
    } else {
        None
    }
}

/// Writes samples in LibSVM format. Zero entries are omitted and values use
/// the shortest representation that parses back to the same `f64`.
pub fn write_libsvm<W: Write>(mut out: W, x: &FeatureMatrix<f64>, labels: &[f64]) -> Result<()> {
    if labels.len() != x.cols() {
        return Err(Error::Dimension {
            context: "labels",
            expected: x.cols(),
            got: labels.len(),
        });
    }
    for (i, &y) in labels.iter().enumerate() {
        write!(out, "{y}")?;
        for (j, &v) in x.col(i).iter().enumerate() {
            if v != 0.0 {
                write!(out, " {}:{v}", j + 1)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line() {
        let d = parse_libsvm_str("+1 1:0.5 3:2\n", ParseOptions::default()).unwrap();
        assert_eq!(d.x.rows(), 3);
        assert_eq!(d.x.col(0), &[0.5, 0.0, 2.0]);
        assert_eq!(d.labels, vec![1.0]);
    }

    #[test]
    fn empty_feature_list_is_zero_column() {
        let d = parse_libsvm_str("-1\n+1 2:1\n", ParseOptions::default()).unwrap();
        assert_eq!(d.x.col(0), &[0.0, 0.0]);
        assert_eq!(d.labels, vec![-1.0, 1.0]);
    }

    #[test]
    fn zero_one_labels_are_mapped() {
        let d = parse_libsvm_str("0 1:1\n1 1:2\n", ParseOptions::default()).unwrap();
        assert!(d.binary);
        assert_eq!(d.labels, vec![-1.0, 1.0]);
        let d = parse_libsvm_str("0.5 1:1\n1 1:2\n", ParseOptions::default()).unwrap();
        assert!(!d.binary);
    }

    #[test]
    fn errors_carry_line_numbers() {
        for (text, line) in [
            ("1 1:1\n1 0:2\n", 2),
            ("1 2:1 1:3\n", 1),
            ("1 1:1\n\n1 1:x\n", 3),
            ("abc 1:1\n", 1),
            ("1 1:1\n1 3\n", 2),
        ] {
            match parse_libsvm_str(text, ParseOptions::default()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn dimension_override() {
        let opts = ParseOptions {
            dim: Some(5),
            ..ParseOptions::default()
        };
        assert_eq!(parse_libsvm_str("1 2:1\n", opts).unwrap().x.rows(), 5);
        let opts = ParseOptions {
            dim: Some(1),
            ..ParseOptions::default()
        };
        assert!(parse_libsvm_str("1 2:1\n", opts).is_err());
    }
}
