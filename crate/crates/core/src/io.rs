//! File formats: set families (text and JSON) and cube vertex sets.
//!
//! Family text format: first line `n r`, then one member per line as
//! space-separated increasing elements. JSON alternative:
//! `{"n": int, "r": int, "sets": [[int, ...], ...]}` with strictly
//! increasing inner lists. Both parsers reject duplicates and wrong-size
//! sets.
//!
//! Vertex-set format: first line `n`, then one vertex per line as a
//! bit-string of length n; character i is element i, '1' means present.

use crate::cube::CubeVertexSet;
use crate::error::{Error, Result};
use crate::family::SetFamily;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};

pub fn write_family_text<W: Write>(family: &SetFamily, mut out: W) -> Result<()> {
    writeln!(out, "{} {}", family.n(), family.r())?;
    for member in family.members() {
        let line = member
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_family_text<R: Read>(input: R) -> Result<SetFamily> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid("empty family file".to_string()))??;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::invalid(format!("bad header {header:?}, expected \"n r\"")))?;
    let r: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::invalid(format!("bad header {header:?}, expected \"n r\"")))?;
    if parts.next().is_some() {
        return Err(Error::invalid(format!(
            "trailing tokens in header {header:?}"
        )));
    }
    let mut sets = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let elements: Vec<usize> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::invalid(format!("bad element {t:?} in line {line:?}")))
            })
            .collect::<Result<_>>()?;
        sets.push(elements);
    }
    SetFamily::from_sets(n, r, sets)
}

#[derive(Serialize, Deserialize)]
struct FamilyDto {
    n: usize,
    r: usize,
    sets: Vec<Vec<usize>>,
}

pub fn write_family_json<W: Write>(family: &SetFamily, mut out: W) -> Result<()> {
    let dto = FamilyDto {
        n: family.n(),
        r: family.r(),
        sets: family.members().collect(),
    };
    serde_json::to_writer_pretty(&mut out, &dto)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_family_json<R: Read>(input: R) -> Result<SetFamily> {
    let dto: FamilyDto = serde_json::from_reader(input)?;
    SetFamily::from_sets(dto.n, dto.r, dto.sets)
}

/// Dispatch on the leading character: JSON documents start with '{'.
pub fn read_family_auto(bytes: &[u8]) -> Result<SetFamily> {
    match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
        Some(b'{') => read_family_json(bytes),
        _ => read_family_text(bytes),
    }
}

pub fn write_vertex_set<W: Write>(vs: &CubeVertexSet, mut out: W) -> Result<()> {
    writeln!(out, "{}", vs.n())?;
    for v in vs.vertices() {
        let line: String = (0..vs.n())
            .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
            .collect();
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_vertex_set<R: Read>(input: R) -> Result<CubeVertexSet> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid("empty vertex-set file".to_string()))??;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad vertex-set header {header:?}")))?;
    let mut vertices = Vec::new();
    for line in lines {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text.len() != n {
            return Err(Error::invalid(format!(
                "vertex line {text:?} has {} characters, expected {n}",
                text.len()
            )));
        }
        let mut v = 0u64;
        for (i, c) in text.chars().enumerate() {
            match c {
                '1' => v |= 1 << i,
                '0' => {}
                other => {
                    return Err(Error::invalid(format!(
                        "vertex line {text:?} has a character {other:?}"
                    )))
                }
            }
        }
        vertices.push(v);
    }
    CubeVertexSet::from_vertices(n, vertices)
}
