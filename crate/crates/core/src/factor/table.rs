//! Local factor tables: the offline stand-in for published factorizations of
//! `Φ_d(2)`.
//!
//! Grammar (UTF-8, one entry per line):
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' <anything>
//! entry   := d ':' factor (WS factor)* [WS comment]
//! factor  := prime ['^' exponent]
//! ```
//!
//! `d`, `prime` and `exponent` are unsigned decimal integers without leading
//! zeros. Every entry is a claim only; nothing is trusted until the factor
//! engine re-checks divisibility and certifies each prime.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use thiserror::Error;

use crate::bigmath::parse_decimal;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{path}:{line}: {message}")]
    Format { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type TableClaims = Vec<(BigUint, u32)>;

/// Parsed table: `d → [(prime, exponent)]`, ordered by `d`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactorTable {
    entries: BTreeMap<u64, TableClaims>,
}

impl FactorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, d: u64) -> Option<&TableClaims> {
        self.entries.get(&d)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &TableClaims)> {
        self.entries.iter()
    }

    pub fn insert(&mut self, d: u64, claims: TableClaims) {
        self.entries.insert(d, claims);
    }

    /// Parses table text; `origin` labels error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, TableError> {
        let mut table = FactorTable::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| TableError::Format { path: origin.to_string(), line: line_no, message };
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (d_str, rest) = line.split_once(':').ok_or_else(|| err("expected 'd: factors'".into()))?;
            let d = d_str
                .trim()
                .parse::<u64>()
                .ok()
                .filter(|&d| d >= 1 && !d_str.trim().starts_with('0'))
                .ok_or_else(|| err(format!("bad index d '{}'", d_str.trim())))?;
            if table.entries.contains_key(&d) {
                return Err(err(format!("duplicate entry for d = {d}")));
            }
            let mut claims = Vec::new();
            for tok in rest.split_whitespace() {
                let (p_str, e_str) = match tok.split_once('^') {
                    Some((p, e)) => (p, Some(e)),
                    None => (tok, None),
                };
                let prime = parse_decimal(p_str).ok_or_else(|| err(format!("bad prime '{p_str}'")))?;
                let exponent = match e_str {
                    None => 1,
                    Some(e) => e
                        .parse::<u32>()
                        .ok()
                        .filter(|&v| v >= 1 && !e.starts_with('0'))
                        .ok_or_else(|| err(format!("bad exponent '{e}'")))?,
                };
                claims.push((prime, exponent));
            }
            if claims.is_empty() {
                return Err(err(format!("no factors listed for d = {d}")));
            }
            table.entries.insert(d, claims);
        }
        Ok(table)
    }

    /// Adds every entry of `other`; a `d` present in both is an error.
    pub fn merge(&mut self, other: FactorTable, origin: &str) -> Result<(), TableError> {
        for (d, claims) in other.entries {
            if self.entries.contains_key(&d) {
                return Err(TableError::Format {
                    path: origin.to_string(),
                    line: 0,
                    message: format!("d = {d} already defined by another table"),
                });
            }
            self.entries.insert(d, claims);
        }
        Ok(())
    }

    /// Canonical text form, parseable by [`FactorTable::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (d, claims) in &self.entries {
            out.push_str(&d.to_string());
            out.push(':');
            for (p, e) in claims {
                out.push(' ');
                out.push_str(&p.to_string());
                if *e > 1 {
                    out.push_str(&format!("^{e}"));
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn load_factor_table(path: &Path) -> Result<FactorTable, TableError> {
    let text = fs::read_to_string(path).map_err(|source| TableError::Io { path: path.display().to_string(), source })?;
    FactorTable::parse(&text, &path.display().to_string())
}

/// Loads a single table file, or every `*.txt` file of a directory in name order.
pub fn load_factor_tables(path: &Path) -> Result<FactorTable, TableError> {
    if !path.is_dir() {
        return load_factor_table(path);
    }
    let io = |source| TableError::Io { path: path.display().to_string(), source };
    let mut files: Vec<_> = fs::read_dir(path)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    let mut table = FactorTable::new();
    for file in files {
        let t = load_factor_table(&file)?;
        table.merge(t, &file.display().to_string())?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::big;
    use proptest::prelude::*;

    #[test]
    fn line_forms() {
        let t = FactorTable::parse("11: 23 89\n4: 5\n12: 13^1\n# comment\n\n20: 5^2 41 # trailing\n", "t").unwrap();
        assert_eq!(t.get(11).unwrap(), &vec![(big(23), 1), (big(89), 1)]);
        assert_eq!(t.get(4).unwrap(), &vec![(big(5), 1)]);
        assert_eq!(t.get(12).unwrap(), &vec![(big(13), 1)]);
        assert_eq!(t.get(20).unwrap(), &vec![(big(5), 2), (big(41), 1)]);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("11 23 89", 1),
            ("# ok\n11: 23 x9", 2),
            ("\n\n0: 3", 3),
            ("5: 31\n5: 31", 2),
            ("7: 127^0", 1),
            ("7:", 1),
            ("7: 0127", 1),
        ];
        for (text, line) in cases {
            match FactorTable::parse(text, "tbl") {
                Err(TableError::Format { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} parsed as {other:?}"),
            }
        }
    }

    #[test]
    fn directory_loading_merges_files() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.txt"), "3: 7\n").unwrap();
        std::fs::write(dir.path().join("b.txt"), "5: 31\n").unwrap();
        std::fs::write(dir.path().join("ignored.md"), "garbage").unwrap();
        let t = load_factor_tables(dir.path()).unwrap();
        assert_eq!(t.len(), 2);
        std::fs::write(dir.path().join("c.txt"), "3: 7\n").unwrap();
        assert!(load_factor_tables(dir.path()).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(entries in proptest::collection::btree_map(1u64..10_000, proptest::collection::vec((2u64..u64::MAX, 1u32..5), 1..5), 0..20)) {
            let mut t = FactorTable::new();
            for (d, claims) in entries {
                t.insert(d, claims.into_iter().map(|(p, e)| (big(p), e)).collect());
            }
            prop_assert_eq!(FactorTable::parse(&t.to_text(), "rt").unwrap(), t);
        }
    }
}
