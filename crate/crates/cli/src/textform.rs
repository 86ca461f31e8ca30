//! Canonical text forms for families, mixed families, and coded sets.
//!
//! All three forms are line-based with a fixed header. Members are listed
//! in canonical order (rank order for families; ascending member order for
//! coded sets) with atoms ascending inside each set, so serialization is
//! bit-exact reproducible and parse-then-serialize is the identity on
//! canonical input.

use std::fmt::Write as _;

use finfam_core::ground::{Atom, CellShape, Family, GroundSet, KSubset, SubsetTuple};
use finfam_core::phi::{CodedMember, CodedSet, MixedFamily};

use crate::error::{CliError, Result};

/// A mixed family together with the codec parameters it is meant for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedFamilyFile {
    pub family: MixedFamily,
    pub max_cell: u32,
    pub schedule: String,
}

fn write_set(out: &mut String, set: &KSubset) {
    out.push('{');
    for (i, atom) in set.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{atom}");
    }
    out.push('}');
}

fn write_member_line(out: &mut String, parts: &[KSubset]) {
    out.push_str("member");
    for part in parts {
        out.push(' ');
        write_set(out, part);
    }
    out.push('\n');
}

pub fn serialize_family(family: &Family) -> String {
    let mut out = String::new();
    out.push_str("finfam family v1\n");
    let _ = writeln!(out, "ground {}", family.ground().size());
    out.push_str("shape");
    for k in family.shape().sizes() {
        let _ = write!(out, " {k}");
    }
    out.push('\n');
    for member in family.members() {
        write_member_line(&mut out, member.parts());
    }
    out
}

pub fn serialize_mixed(file: &MixedFamilyFile) -> String {
    let mut out = String::new();
    out.push_str("finfam mixed-family v1\n");
    let _ = writeln!(out, "ground {}", file.family.ground().size());
    let _ = writeln!(out, "arity {}", file.family.arity());
    let _ = writeln!(out, "max-cell {}", file.max_cell);
    let _ = writeln!(out, "schedule {}", file.schedule);
    for (shape, family) in file.family.cells() {
        out.push_str("cell");
        for k in shape.sizes() {
            let _ = write!(out, " {k}");
        }
        out.push('\n');
        for member in family.members() {
            write_member_line(&mut out, member.parts());
        }
    }
    out
}

pub fn serialize_coded(coded: &CodedSet) -> String {
    let mut out = String::new();
    out.push_str("finfam coded-set v1\n");
    let _ = writeln!(out, "ground {}", coded.ground().size());
    let _ = writeln!(out, "arity {}", coded.arity());
    let _ = writeln!(out, "max-cell {}", coded.max_cell());
    let _ = writeln!(out, "schedule {}", coded.schedule_id());
    for member in coded.members() {
        write_member_line(&mut out, member.parts());
    }
    out
}

struct LineParser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    current: usize,
}

impl<'a> LineParser<'a> {
    fn new(text: &'a str) -> Self {
        LineParser {
            lines: text.lines().enumerate().peekable(),
            current: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line: self.current,
            message: message.into(),
        }
    }

    fn next_line(&mut self) -> Option<&'a str> {
        let (idx, line) = self.lines.next()?;
        self.current = idx + 1;
        Some(line)
    }

    fn peek_line(&mut self) -> Option<&'a str> {
        self.lines.peek().map(|(_, l)| *l)
    }

    fn expect_line(&mut self, what: &str) -> Result<&'a str> {
        match self.next_line() {
            Some(line) => Ok(line),
            None => Err(CliError::Parse {
                line: self.current + 1,
                message: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    fn expect_header(&mut self, header: &str) -> Result<()> {
        let line = self.expect_line(&format!("'{header}'"))?;
        if line != header {
            return Err(self.err(format!("expected '{header}', found '{line}'")));
        }
        Ok(())
    }

    fn expect_keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let line = self.expect_line(&format!("'{key} <value>'"))?;
        let value = line
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected '{key} <value>', found '{line}'")))?;
        value
            .parse::<T>()
            .map_err(|_| self.err(format!("invalid value '{value}' for {key}")))
    }

    fn parse_numbers(&self, rest: &str) -> Result<Vec<u32>> {
        rest.split(' ')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u32>()
                    .map_err(|_| self.err(format!("invalid number '{s}'")))
            })
            .collect()
    }

    fn parse_set(&self, token: &str) -> Result<KSubset> {
        let inner = token
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| self.err(format!("invalid set literal '{token}'")))?;
        let atoms: Vec<Atom> = if inner.is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|s| {
                    s.parse::<Atom>()
                        .map_err(|_| self.err(format!("invalid atom '{s}'")))
                })
                .collect::<Result<Vec<Atom>>>()?
        };
        KSubset::new(atoms).map_err(|_| self.err(format!("set literal not ascending: '{token}'")))
    }

    fn parse_member(&self, line: &str) -> Result<Vec<KSubset>> {
        let rest = line
            .strip_prefix("member")
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| self.err(format!("expected 'member ...', found '{line}'")))?;
        rest.split(' ')
            .filter(|t| !t.is_empty())
            .map(|t| self.parse_set(t))
            .collect()
    }
}

pub fn parse_family(text: &str) -> Result<Family> {
    let mut p = LineParser::new(text);
    p.expect_header("finfam family v1")?;
    let ground_size: u32 = p.expect_keyed("ground")?;
    let ground = GroundSet::new(ground_size).map_err(|e| p.err(e.to_string()))?;
    let shape_line = p.expect_line("'shape ...'")?;
    let sizes = p.parse_numbers(
        shape_line
            .strip_prefix("shape")
            .ok_or_else(|| p.err(format!("expected 'shape ...', found '{shape_line}'")))?,
    )?;
    let shape = CellShape::new(sizes).map_err(|e| p.err(e.to_string()))?;
    let mut family = Family::empty(ground, shape);
    while let Some(line) = p.next_line() {
        if line.is_empty() {
            continue;
        }
        let parts = p.parse_member(line)?;
        let tuple = SubsetTuple::new(parts).map_err(|e| p.err(e.to_string()))?;
        family.insert(&tuple).map_err(|e| p.err(e.to_string()))?;
    }
    Ok(family)
}

pub fn parse_mixed(text: &str) -> Result<MixedFamilyFile> {
    let mut p = LineParser::new(text);
    p.expect_header("finfam mixed-family v1")?;
    let ground_size: u32 = p.expect_keyed("ground")?;
    let ground = GroundSet::new(ground_size).map_err(|e| p.err(e.to_string()))?;
    let arity: usize = p.expect_keyed("arity")?;
    let max_cell: u32 = p.expect_keyed("max-cell")?;
    let schedule: String = p.expect_keyed("schedule")?;
    let mut family = MixedFamily::new(ground, arity).map_err(|e| p.err(e.to_string()))?;
    while let Some(line) = p.next_line() {
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix("cell")
            .ok_or_else(|| p.err(format!("expected 'cell ...', found '{line}'")))?;
        let sizes = p.parse_numbers(rest)?;
        let shape = CellShape::new(sizes).map_err(|e| p.err(e.to_string()))?;
        if shape.arity() != arity {
            return Err(p.err(format!("cell arity {} does not match {arity}", shape.arity())));
        }
        while let Some(next) = p.peek_line() {
            if !next.starts_with("member") {
                break;
            }
            let line = p.next_line().unwrap();
            let parts = p.parse_member(line)?;
            let tuple = SubsetTuple::new(parts).map_err(|e| p.err(e.to_string()))?;
            if tuple.shape() != shape {
                return Err(p.err(format!("member {tuple} does not match cell {shape}")));
            }
            family.insert_tuple(&tuple).map_err(|e| p.err(e.to_string()))?;
        }
    }
    Ok(MixedFamilyFile {
        family,
        max_cell,
        schedule,
    })
}

pub fn parse_coded(text: &str) -> Result<CodedSet> {
    let mut p = LineParser::new(text);
    p.expect_header("finfam coded-set v1")?;
    let ground_size: u32 = p.expect_keyed("ground")?;
    let ground = GroundSet::new(ground_size).map_err(|e| p.err(e.to_string()))?;
    let arity: usize = p.expect_keyed("arity")?;
    let max_cell: u32 = p.expect_keyed("max-cell")?;
    let schedule: String = p.expect_keyed("schedule")?;
    let mut coded =
        CodedSet::new(ground, arity, max_cell, &schedule).map_err(|e| p.err(e.to_string()))?;
    while let Some(line) = p.next_line() {
        if line.is_empty() {
            continue;
        }
        let parts = p.parse_member(line)?;
        let member = CodedMember::new(parts).map_err(|e| p.err(e.to_string()))?;
        coded.insert(member).map_err(|e| p.err(e.to_string()))?;
    }
    Ok(coded)
}
