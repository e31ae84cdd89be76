//! Plain-text group tables.
//!
//! ```text
//! group <name> <order>
//! <order × order integers, 0-indexed elements>
//! irrep <label> <dim>
//! <order · dim · dim complex entries as `re im` pairs, row-major per element>
//! ```
//!
//! Tokens may be spread over lines freely; `#` starts a comment.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::group::FiniteGroup;
use super::representation::rep_matrices;
use super::unitary::UnitaryMatrix;
use crate::error::{ErgoError, Result};

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| {
                let body = line.split('#').next().unwrap_or("");
                body.split_whitespace().map(move |t| (i + 1, t))
            })
            .collect();
        Self { items, pos: 0 }
    }

    fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .or_else(|| self.items.last())
            .map(|(l, _)| *l)
            .unwrap_or(1)
    }

    fn err(&self, message: impl Into<String>) -> ErgoError {
        ErgoError::Parse {
            line: self.line(),
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        let tok = self
            .items
            .get(self.pos)
            .map(|(_, t)| *t)
            .ok_or_else(|| self.err(format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self.next(what)?;
        tok.parse().map_err(|_| {
            self.pos -= 1;
            self.err(format!("expected {what}, found `{tok}`"))
        })
    }

    fn expect(&mut self, keyword: &str) -> Result<()> {
        let tok = self.next(keyword)?;
        if tok == keyword {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.err(format!("expected `{keyword}`, found `{tok}`")))
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.items.len()
    }
}

pub fn parse_group_table(text: &str) -> Result<FiniteGroup> {
    let mut t = Tokens::new(text);
    t.expect("group")?;
    let name = t.next("group name")?;
    let order: usize = t.parse("group order")?;
    if order == 0 {
        return Err(t.err("group order must be positive"));
    }
    let mut table = Vec::with_capacity(order * order);
    for _ in 0..order * order {
        table.push(t.parse::<usize>("table entry")?);
    }
    let header_line = t.line();
    let mut group = FiniteGroup::from_table(name, order, table).map_err(|e| ErgoError::Parse {
        line: header_line,
        message: e.to_string(),
    })?;
    while !t.done() {
        t.expect("irrep")?;
        let start = t.line();
        let label = t.next("irrep label")?;
        let dim: usize = t.parse("irrep dimension")?;
        if dim == 0 {
            return Err(t.err("irrep dimension must be positive"));
        }
        let mut matrices = Vec::with_capacity(order);
        for _ in 0..order {
            let mut entries = Vec::with_capacity(dim * dim);
            for _ in 0..dim * dim {
                let re: f64 = t.parse("real part")?;
                let im: f64 = t.parse("imaginary part")?;
                entries.push(Complex64::new(re, im));
            }
            matrices.push(
                UnitaryMatrix::from_rows(dim, &entries).map_err(|e| ErgoError::Parse {
                    line: t.line(),
                    message: format!("irrep `{label}`: {e}"),
                })?,
            );
        }
        group = group.with_irrep(label, matrices).map_err(|e| ErgoError::Parse {
            line: start,
            message: e.to_string(),
        })?;
    }
    Ok(group)
}

/// Serializes a group in the format read by [`parse_group_table`].
pub fn write_group_table(group: &FiniteGroup) -> String {
    let mut s = String::new();
    let n = group.order();
    let _ = writeln!(s, "group {} {}", group.name(), n);
    for row in group.table().chunks(n) {
        let parts: Vec<String> = row.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{}", parts.join(" "));
    }
    for rep in group.irreps() {
        let Some(ms) = rep_matrices(rep) else { continue };
        let _ = writeln!(s, "irrep {} {}", rep.label(), rep.dim());
        for m in ms {
            let mut parts = Vec::new();
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    let z = m[(r, c)];
                    parts.push(format!("{:?} {:?}", z.re, z.im));
                }
            }
            let _ = writeln!(s, "{}", parts.join("  "));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_z2_with_sign_irrep() {
        let text = "group Z2 2\n0 1\n1 0\n# characters\nirrep sign 1\n1 0\n-1 0\n";
        let g = parse_group_table(text).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.irreps().len(), 1);
        assert!(!g.irrep("sign").unwrap().is_trivial());
    }

    #[test]
    fn catalog_groups_round_trip() {
        for g in [FiniteGroup::s3(), FiniteGroup::cyclic(6).unwrap()] {
            let text = write_group_table(&g);
            let back = parse_group_table(&text).unwrap();
            assert_eq!(back.table(), g.table());
            assert_eq!(back.irreps(), g.irreps());
        }
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_group_table("group Z2 2\n0 1\n1 x\n").unwrap_err();
        assert!(matches!(err, ErgoError::Parse { line: 3, .. }), "{err}");
        let err = parse_group_table("group Z2 2\n0 1\n1 0\nirrep bad 1\n1 0\n0 1\n").unwrap_err();
        assert!(matches!(err, ErgoError::Parse { .. }));
        let err = parse_group_table("grp Z2 2").unwrap_err();
        assert!(matches!(err, ErgoError::Parse { line: 1, .. }));
    }
}
