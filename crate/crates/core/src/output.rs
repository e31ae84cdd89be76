//! CSV tables.
//!
//! Reals are written with 17 significant digits, which round-trips every
//! `f64` exactly; fields are quoted RFC-4180 style where needed.

use std::io::{Read, Write};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Real(f64),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Real(v) => format!("{v:.16e}"),
        }
    }

    /// Inverse of `render` for cells whose text is not itself numeric.
    fn parse(field: &str) -> Self {
        let numeric_start = field
            .chars()
            .next()
            .map(|c| c.is_ascii_digit() || c == '-')
            .unwrap_or(false);
        if numeric_start {
            if let Ok(i) = field.parse::<i64>() {
                return Cell::Int(i);
            }
            if let Ok(v) = field.parse::<f64>() {
                return Cell::Real(v);
            }
        }
        match field {
            "NaN" | "inf" | "-inf" => Cell::Real(field.parse().expect("special float")),
            _ => Cell::Text(field.to_string()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Appends the rows of a table with the same header.
    pub fn extend(&mut self, other: Table) {
        debug_assert!(self.header.is_empty() || self.header == other.header);
        if self.header.is_empty() {
            self.header = other.header;
        }
        self.rows.extend(other.rows);
    }

    pub fn has_nan(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .any(|c| matches!(c, Cell::Real(v) if v.is_nan()))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().from_writer(writer);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Cell::parse).collect());
        }
        Ok(Self { header, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_round_trips(
            reals in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..20),
            ints in proptest::collection::vec(any::<i64>(), 1..20),
        ) {
            let mut t = Table::new(vec!["id".into(), "label, quoted".into(), "n".into(), "value".into()]);
            for (i, (v, n)) in reals.iter().zip(&ints).enumerate() {
                t.push(vec![
                    Cell::text(format!("s{i}")),
                    Cell::text("exp-1, \"twisted\""),
                    Cell::Int(*n),
                    Cell::Real(*v),
                ]);
            }
            let text = t.to_csv_string().unwrap();
            let back = Table::read_csv(text.as_bytes()).unwrap();
            prop_assert_eq!(back, t);
        }
    }

    #[test]
    fn reals_use_seventeen_digits() {
        assert_eq!(Cell::Real(0.1).render(), "1.0000000000000001e-1");
        assert_eq!(Cell::parse("1.0000000000000001e-1"), Cell::Real(0.1));
        assert_eq!(Cell::parse("-x3"), Cell::text("-x3"));
    }
}
