//! The fifteen published tables as versioned CSV fixtures.
//!
//! Each `table_NN.csv` is UTF-8 and comma-delimited. Lines starting with `#`
//! carry the caption (`# caption: ...`) and the unit convention
//! (`# units: key=value ...`); the first non-comment line is the header. Empty
//! printed cells are written as `null`. Values are transcribed verbatim.

mod reproduce;
mod validate;

pub use reproduce::{
    reproduce_table, reproduction_report, CellDeviation, ColumnSummary, D0Fit, D0Grid,
    DeviationReport, ReproductionSettings,
};
pub use validate::{validate_identities, CheckKind, IdentityCheck, Tolerance, ValidationReport};

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TABLE_COUNT: u8 = 15;

/// Printed row count of each table, indexed by `id − 1`.
pub const ROW_COUNTS: [usize; 15] = [12, 10, 9, 8, 8, 7, 6, 6, 6, 10, 9, 8, 8, 7, 10];

const SOURCES: [&str; 15] = [
    include_str!("../../fixtures/table_01.csv"),
    include_str!("../../fixtures/table_02.csv"),
    include_str!("../../fixtures/table_03.csv"),
    include_str!("../../fixtures/table_04.csv"),
    include_str!("../../fixtures/table_05.csv"),
    include_str!("../../fixtures/table_06.csv"),
    include_str!("../../fixtures/table_07.csv"),
    include_str!("../../fixtures/table_08.csv"),
    include_str!("../../fixtures/table_09.csv"),
    include_str!("../../fixtures/table_10.csv"),
    include_str!("../../fixtures/table_11.csv"),
    include_str!("../../fixtures/table_12.csv"),
    include_str!("../../fixtures/table_13.csv"),
    include_str!("../../fixtures/table_14.csv"),
    include_str!("../../fixtures/table_15.csv"),
];

const CHECKSUMS: &str = include_str!("../../fixtures/SHA256SUMS");

pub fn file_name(id: u8) -> String {
    format!("table_{id:02}.csv")
}

fn check_id(id: u8) -> Result<()> {
    if (1..=TABLE_COUNT).contains(&id) {
        Ok(())
    } else {
        Err(Error::UnknownTable(id))
    }
}

/// Embedded fixture text.
pub fn table_source(id: u8) -> Result<&'static str> {
    check_id(id)?;
    Ok(SOURCES[usize::from(id) - 1])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Units {
    pub hbar: f64,
    pub two_mu: f64,
    pub alpha: f64,
    /// Set when the whole table shares one λ.
    pub lambda: Option<f64>,
    pub n: Option<u32>,
    pub l: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub value: Option<f64>,
    /// Cell text as printed.
    pub raw: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub table_id: u8,
    pub lambda: Option<f64>,
    pub alpha: f64,
    pub n: Option<u32>,
    pub l: Option<u32>,
    pub columns: Vec<Column>,
}

impl TableRow {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .and_then(|c| c.value)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(n) = self.n {
            parts.push(format!("n={n}"));
        }
        if let Some(l) = self.l {
            parts.push(format!("l={l}"));
        }
        if let Some(lambda) = self.lambda {
            parts.push(format!("lambda={lambda}"));
        }
        parts.join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub id: u8,
    pub caption: String,
    pub units: Units,
    pub header: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl Table {
    /// Row whose λ equals `lambda` (exact match on the printed value).
    pub fn row_at(&self, lambda: f64) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.lambda == Some(lambda))
    }
}

fn malformed(table: u8, reason: impl Into<String>) -> Error {
    Error::MalformedFixture {
        table,
        reason: reason.into(),
    }
}

fn parse_units(id: u8, spec: &str) -> Result<Units> {
    let mut units = Units {
        hbar: f64::NAN,
        two_mu: f64::NAN,
        alpha: f64::NAN,
        lambda: None,
        n: None,
        l: None,
    };
    for token in spec.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| malformed(id, format!("bad units token `{token}`")))?;
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| malformed(id, format!("bad number in `{token}`")))
        };
        let int = || {
            value
                .parse::<u32>()
                .map_err(|_| malformed(id, format!("bad integer in `{token}`")))
        };
        match key {
            "hbar" => units.hbar = num()?,
            "two_mu" => units.two_mu = num()?,
            "alpha" => units.alpha = num()?,
            "lambda" => units.lambda = Some(num()?),
            "n" => units.n = Some(int()?),
            "l" => units.l = Some(int()?),
            other => return Err(malformed(id, format!("unknown units key `{other}`"))),
        }
    }
    if units.hbar.is_nan() || units.two_mu.is_nan() || units.alpha.is_nan() {
        return Err(malformed(id, "units line must set hbar, two_mu and alpha"));
    }
    Ok(units)
}

pub fn parse_table(id: u8, text: &str) -> Result<Table> {
    check_id(id)?;
    let mut caption = None;
    let mut units = None;
    for line in text.lines() {
        let Some(comment) = line.strip_prefix('#') else {
            continue;
        };
        let comment = comment.trim();
        if let Some(c) = comment.strip_prefix("caption:") {
            caption = Some(c.trim().to_string());
        } else if let Some(u) = comment.strip_prefix("units:") {
            units = Some(parse_units(id, u)?);
        }
    }
    let caption = caption.ok_or_else(|| malformed(id, "missing `# caption:` line"))?;
    let units = units.ok_or_else(|| malformed(id, "missing `# units:` line"))?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(id, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() {
        return Err(malformed(id, "empty header"));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| malformed(id, e.to_string()))?;
        let mut columns = Vec::with_capacity(header.len());
        for (name, raw) in header.iter().zip(record.iter()) {
            let value = if raw == "null" {
                None
            } else {
                Some(
                    raw.parse::<f64>()
                        .map_err(|_| malformed(id, format!("bad cell `{raw}` in column {name}")))?,
                )
            };
            columns.push(Column {
                name: name.clone(),
                value,
                raw: raw.to_string(),
            });
        }
        let lookup = |key: &str| columns.iter().find(|c| c.name == key).and_then(|c| c.value);
        let as_int = |v: f64, key: &str| -> Result<u32> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as u32)
            } else {
                Err(malformed(id, format!("non-integer {key} = {v}")))
            }
        };
        let n = match lookup("n") {
            Some(v) => Some(as_int(v, "n")?),
            None => units.n,
        };
        let l = match lookup("l") {
            Some(v) => Some(as_int(v, "l")?),
            None => units.l,
        };
        rows.push(TableRow {
            table_id: id,
            lambda: lookup("lambda").or(units.lambda),
            alpha: units.alpha,
            n,
            l,
            columns,
        });
    }
    Ok(Table {
        id,
        caption,
        units,
        header,
        rows,
    })
}

/// Load an embedded table.
pub fn load_table(id: u8) -> Result<Table> {
    parse_table(id, table_source(id)?)
}

/// Load `table_NN.csv` from a directory instead of the embedded copy.
pub fn load_table_from_dir(dir: &Path, id: u8) -> Result<Table> {
    check_id(id)?;
    let text = std::fs::read_to_string(dir.join(file_name(id)))?;
    parse_table(id, &text)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixtureSet {
    pub tables: Vec<Table>,
}

impl FixtureSet {
    pub fn embedded() -> Result<Self> {
        let tables = (1..=TABLE_COUNT).map(load_table).collect::<Result<_>>()?;
        Ok(Self { tables })
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        let tables = (1..=TABLE_COUNT)
            .map(|id| load_table_from_dir(dir, id))
            .collect::<Result<_>>()?;
        Ok(Self { tables })
    }

    pub fn table(&self, id: u8) -> Result<&Table> {
        self.tables
            .iter()
            .find(|t| t.id == id)
            .ok_or(Error::UnknownTable(id))
    }
}

pub fn sha256_hex(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

/// Committed checksum for a table file.
pub fn committed_checksum(id: u8) -> Result<&'static str> {
    check_id(id)?;
    let name = file_name(id);
    CHECKSUMS
        .lines()
        .filter_map(|line| line.split_once("  "))
        .find(|(_, file)| file.trim() == name)
        .map(|(sum, _)| sum)
        .ok_or_else(|| malformed(id, "no committed checksum"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChecksumStatus {
    pub table_id: u8,
    pub expected: String,
    pub actual: String,
    pub matches: bool,
}

/// Compare fixture text against the committed SHA-256 list.
pub fn verify_checksum(id: u8, text: &str) -> Result<ChecksumStatus> {
    let expected = committed_checksum(id)?.to_string();
    let actual = sha256_hex(text);
    Ok(ChecksumStatus {
        table_id: id,
        matches: expected == actual,
        expected,
        actual,
    })
}

pub fn verify_embedded_checksums() -> Result<Vec<ChecksumStatus>> {
    (1..=TABLE_COUNT)
        .map(|id| verify_checksum(id, table_source(id)?))
        .collect()
}

/// `(n, l)` encoded in a Table 15 column name such as `n2_l1`.
pub fn state_column(name: &str) -> Option<(u32, u32)> {
    let rest = name.strip_prefix('n')?;
    let (n, l) = rest.split_once("_l")?;
    Some((n.parse().ok()?, l.parse().ok()?))
}

/// λ encoded in a Tables 7–9 column name such as `lambda_200`.
pub fn lambda_column(name: &str) -> Option<f64> {
    name.strip_prefix("lambda_")?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_counts_match() {
        for id in 1..=TABLE_COUNT {
            let t = load_table(id).unwrap();
            assert_eq!(t.rows.len(), ROW_COUNTS[usize::from(id) - 1], "table {id}");
            assert!(t.rows.iter().all(|r| r.columns.len() == t.header.len()));
        }
    }

    #[test]
    fn first_rows() {
        let t1 = load_table(1).unwrap();
        let r = &t1.rows[0];
        assert_eq!((r.n, r.l), (Some(0), Some(0)));
        assert_eq!(r.get("r_inv2"), Some(8.39564));
        assert_eq!(r.lambda, Some(100.0));
        assert_eq!(r.alpha, 0.1);

        let t2 = load_table(2).unwrap();
        let r = t2.row_at(2.5).unwrap();
        assert_eq!(r.get("r2"), Some(0.498741));
        assert_eq!(r.get("p2"), Some(78.5373));
        assert_eq!(r.get("product2"), Some(39.16977));
        assert_eq!(r.get("min_product2"), Some(2.25));
        assert_eq!((r.n, r.l), (Some(0), Some(0)));

        let t15 = load_table(15).unwrap();
        let r = t15.row_at(0.5).unwrap();
        assert_eq!(r.get("n0_l0"), Some(13.22484));
        for c in ["n1_l0", "n2_l1", "n3_l2"] {
            assert_eq!(r.column(c).unwrap().value, None);
            assert_eq!(r.column(c).unwrap().raw, "null");
        }
    }

    #[test]
    fn captions_and_units() {
        for id in 1..=TABLE_COUNT {
            let t = load_table(id).unwrap();
            assert!(!t.caption.is_empty());
            assert_eq!(t.units.hbar, 1.0);
            assert_eq!(t.units.two_mu, 1.0);
            let alpha = if id == 1 { 0.1 } else { 1.0 };
            assert_eq!(t.units.alpha, alpha);
        }
    }

    #[test]
    fn checksums_match_commit() {
        for status in verify_embedded_checksums().unwrap() {
            assert!(status.matches, "table {} drifted", status.table_id);
        }
        let tampered = table_source(2).unwrap().replace("0.551859", "0.551860");
        assert!(!verify_checksum(2, &tampered).unwrap().matches);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(load_table(0), Err(Error::UnknownTable(0))));
        assert!(matches!(load_table(16), Err(Error::UnknownTable(16))));
        let missing_units = "# caption: x\na,b\n1,2\n";
        assert!(matches!(
            parse_table(3, missing_units),
            Err(Error::MalformedFixture { table: 3, .. })
        ));
        let bad_cell = "# caption: x\n# units: hbar=1 two_mu=1 alpha=1\na,b\n1,oops\n";
        assert!(matches!(
            parse_table(3, bad_cell),
            Err(Error::MalformedFixture { .. })
        ));
        let ragged = "# caption: x\n# units: hbar=1 two_mu=1 alpha=1\na,b\n1,2,3\n";
        assert!(parse_table(3, ragged).is_err());
    }

    #[test]
    fn directory_loading_matches_embedded() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        let from_dir = FixtureSet::from_dir(&dir).unwrap();
        assert_eq!(from_dir, FixtureSet::embedded().unwrap());
    }

    #[test]
    fn column_name_helpers() {
        assert_eq!(state_column("n2_l1"), Some((2, 1)));
        assert_eq!(state_column("min_cramer_rao"), None);
        assert_eq!(lambda_column("lambda_200"), Some(200.0));
        assert_eq!(lambda_column("n"), None);
    }
}
