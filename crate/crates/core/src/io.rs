//! Text formats for S-boxes, matrices, subspaces and partitions.
//!
//! All formats ignore blank lines and `#` comments.
//!
//! - S-box: the table `f(0), f(1), …` as hex words separated by whitespace or commas.
//! - Matrix: one row per line, `'0'`/`'1'` characters; row `k` is the image of
//!   `e_k` and character `t` is coordinate `t` (spaces between characters are ignored).
//! - Subspace: one hex spanning vector per line (an empty file is `{0}`).
//! - Partition: one block per line, comma-separated hex members.

use std::path::Path;

use crate::error::{Error, Result};
use crate::f2lin::{LinearMap, Subspace, Word};
use crate::partition::Partition;
use crate::sbox::SBox;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_error(origin: &str, line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_string(),
        line,
        column,
        message: message.into(),
    }
}

/// Tokens with 1-based line and column, separators being whitespace and commas.
fn tokens(text: &str) -> Vec<(usize, usize, &str)> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut start = None;
        for (col, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
            let sep = ch.is_whitespace() || ch == ',';
            match (start, sep) {
                (None, false) => start = Some(col),
                (Some(s), true) => {
                    out.push((ln + 1, s + 1, &line[s..col]));
                    start = None;
                }
                _ => {}
            }
        }
    }
    out
}

/// `0x1f`, `1f` and `1F` all read as hex.
pub fn parse_hex(tok: &str) -> Option<Word> {
    let digits = tok.strip_prefix("0x").or_else(|| tok.strip_prefix("0X")).unwrap_or(tok);
    if digits.is_empty() {
        return None;
    }
    Word::from_str_radix(digits, 16).ok()
}

fn hex_words(text: &str, origin: &str) -> Result<Vec<(usize, usize, Word)>> {
    tokens(text)
        .into_iter()
        .map(|(l, c, t)| {
            parse_hex(t)
                .map(|w| (l, c, w))
                .ok_or_else(|| parse_error(origin, l, c, format!("expected a hex word, found {t:?}")))
        })
        .collect()
}

pub fn parse_sbox(text: &str, origin: &str) -> Result<SBox> {
    let words = hex_words(text, origin)?;
    let len = words.len();
    if len < 2 || !len.is_power_of_two() {
        let (l, c) = words.last().map_or((1, 1), |w| (w.0, w.1));
        return Err(parse_error(
            origin,
            l,
            c,
            format!("an S-box table needs 2^m entries, found {len}"),
        ));
    }
    for &(l, c, w) in &words {
        if w as usize >= len {
            return Err(parse_error(origin, l, c, format!("entry {w:#x} exceeds the table size")));
        }
    }
    SBox::permutation(words.into_iter().map(|w| w.2).collect()).map_err(|e| {
        parse_error(origin, 1, 1, e.to_string())
    })
}

pub fn parse_matrix(text: &str, origin: &str) -> Result<LinearMap> {
    let mut rows = Vec::new();
    let mut width = None;
    for (ln, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let mut row: Word = 0;
        let mut t = 0;
        for (col, ch) in body.char_indices() {
            match ch {
                '0' | '1' => {
                    if t >= crate::f2lin::MAX_DIM {
                        return Err(parse_error(origin, ln + 1, col + 1, "row longer than 16 entries"));
                    }
                    if ch == '1' {
                        row |= 1 << t;
                    }
                    t += 1;
                }
                c if c.is_whitespace() => {}
                c => {
                    return Err(parse_error(origin, ln + 1, col + 1, format!("unexpected character {c:?}")))
                }
            }
        }
        if *width.get_or_insert(t) != t {
            return Err(parse_error(
                origin,
                ln + 1,
                1,
                format!("row has {t} entries, expected {}", width.unwrap()),
            ));
        }
        rows.push((ln + 1, row));
    }
    let n = rows.len();
    if n == 0 || width != Some(n) {
        let l = rows.last().map_or(1, |r| r.0);
        return Err(parse_error(
            origin,
            l,
            1,
            format!("matrix must be square, found {n} rows of width {}", width.unwrap_or(0)),
        ));
    }
    LinearMap::invertible_from_rows(rows.into_iter().map(|r| r.1).collect())
        .map_err(|e| parse_error(origin, 1, 1, e.to_string()))
}

/// Rows as written in a matrix file.
pub fn format_matrix(lambda: &LinearMap) -> Vec<String> {
    let n = lambda.dim();
    lambda
        .rows()
        .iter()
        .map(|r| (0..n).map(|t| if r >> t & 1 == 1 { '1' } else { '0' }).collect())
        .collect()
}

pub fn parse_subspace(text: &str, n: usize, origin: &str) -> Result<Subspace> {
    let words = hex_words(text, origin)?;
    for &(l, c, w) in &words {
        if w > crate::f2lin::mask(n) {
            return Err(parse_error(origin, l, c, format!("vector {w:#x} outside (F₂)^{n}")));
        }
    }
    Subspace::span(words.into_iter().map(|w| w.2), n).map_err(|e| parse_error(origin, 1, 1, e.to_string()))
}

pub fn parse_partition(text: &str, n: usize, origin: &str) -> Result<Partition> {
    let mut blocks = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let mut block = Vec::new();
        for (_, c, t) in tokens(body) {
            let w = parse_hex(t)
                .ok_or_else(|| parse_error(origin, ln + 1, c, format!("expected a hex word, found {t:?}")))?;
            block.push(w);
        }
        blocks.push(block);
    }
    Partition::from_blocks(n, &blocks).map_err(|e| parse_error(origin, 1, 1, e.to_string()))
}

pub fn load_sbox(path: &Path) -> Result<SBox> {
    parse_sbox(&read_text(path)?, &path.display().to_string())
}

pub fn load_matrix(path: &Path) -> Result<LinearMap> {
    parse_matrix(&read_text(path)?, &path.display().to_string())
}

pub fn load_subspace(path: &Path, n: usize) -> Result<Subspace> {
    parse_subspace(&read_text(path)?, n, &path.display().to_string())
}

pub fn load_partition(path: &Path, n: usize) -> Result<Partition> {
    parse_partition(&read_text(path)?, n, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn position(e: Error) -> (usize, usize) {
        match e {
            Error::Parse { line, column, .. } => (line, column),
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn sbox_round_trip() {
        let s = parse_sbox("# present\n0 1 3, 2\n", "t").unwrap();
        assert_eq!(s.table(), &[0, 1, 3, 2]);
        assert_eq!(position(parse_sbox("0 1\n2 zz\n", "t").unwrap_err()), (2, 3));
        assert_eq!(position(parse_sbox("0 1 2\n", "t").unwrap_err()).0, 1);
        assert!(parse_sbox("0 1 1 2", "t").is_err());
    }

    #[test]
    fn matrix_rows() {
        let m = parse_matrix("01\n10\n", "t").unwrap();
        assert_eq!(m.rows(), &[0b10, 0b01]);
        assert_eq!(format_matrix(&m), vec!["01", "10"]);
        assert_eq!(position(parse_matrix("01\n1x\n", "t").unwrap_err()), (2, 2));
        assert_eq!(position(parse_matrix("01\n100\n", "t").unwrap_err()), (2, 1));
        assert!(parse_matrix("11\n11\n", "t").is_err());
    }

    #[test]
    fn subspaces_and_partitions() {
        let u = parse_subspace("0x3\n0x5\n0x6\n", 3, "t").unwrap();
        assert_eq!(u.dim(), 2);
        assert_eq!(position(parse_subspace("3\n10\n", 3, "t").unwrap_err()), (2, 1));
        let p = Partition::from_blocks(2, &[vec![0, 3], vec![1, 2]]).unwrap();
        assert_eq!(parse_partition(&p.to_block_file(), 2, "t").unwrap(), p);
        assert!(parse_partition("0,1\n2\n", 2, "t").is_err());
    }
}
