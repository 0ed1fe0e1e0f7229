//! Text formats: face lists and matching files.
//!
//! A face list starts with a header `k=<k> complex=<name>`, followed by one
//! face per line as space-separated vertex tokens (`1,3 2,4`), with `-` for
//! the empty face. Blank lines and lines starting with `#` are skipped.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::face::FaceSet;
use crate::kneser::Universe;
use crate::morse::Matching;

#[derive(Clone, Debug)]
pub struct FaceList {
    pub universe: Arc<Universe>,
    pub name: String,
    pub faces: FaceSet,
}

pub fn write_face_list(universe: &Universe, name: &str, faces: &FaceSet) -> String {
    let mut out = format!("k={} complex={}\n", universe.k(), name);
    for f in faces.iter() {
        out.push_str(&universe.format_face(f));
        out.push('\n');
    }
    out
}

fn parse_header(line: &str, lineno: usize) -> Result<(u32, String)> {
    let perr = |msg: String| Error::Parse { line: lineno, msg };
    let mut k = None;
    let mut name = None;
    for token in line.split_whitespace() {
        match token.split_once('=') {
            Some(("k", v)) => k = Some(v.parse::<u32>().map_err(|_| perr(format!("bad k value {v:?}")))?),
            Some(("complex", v)) => name = Some(v.to_string()),
            _ => return Err(perr(format!("unexpected header token {token:?}"))),
        }
    }
    let k = k.ok_or_else(|| perr("header lacks k=<k>".into()))?;
    Ok((k, name.unwrap_or_default()))
}

pub fn parse_face_list(text: &str) -> Result<FaceList> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (lineno, header) =
        lines.next().ok_or(Error::Parse { line: 1, msg: "empty face list".into() })?;
    let (k, name) = parse_header(header, lineno)?;
    let universe = Universe::for_k(k).map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
    let mut faces = Vec::new();
    for (lineno, line) in lines {
        let f = universe.parse_face(line).map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
        faces.push(f);
    }
    if faces.is_empty() {
        return Err(Error::Parse { line: lineno, msg: "face list has no faces".into() });
    }
    Ok(FaceList { universe, name, faces: FaceSet::new(faces) })
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    d: String,
    u: String,
}

pub fn write_matching(universe: &Universe, m: &Matching) -> Result<String> {
    let records: Vec<PairRecord> = m
        .pairs()
        .iter()
        .map(|&(d, u)| PairRecord { d: universe.format_face(d), u: universe.format_face(u) })
        .collect();
    Ok(serde_json::to_string_pretty(&records)?)
}

pub fn parse_matching(universe: &Universe, text: &str) -> Result<Matching> {
    let records: Vec<PairRecord> = serde_json::from_str(text)?;
    records
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let parse = |s: &str| {
                universe.parse_face(s).map_err(|e| Error::Parse { line: i + 1, msg: format!("pair {}: {e}", i + 1) })
            };
            Ok((parse(&r.d)?, parse(&r.u)?))
        })
        .collect::<Result<Vec<_>>>()
        .map(Matching::from_pairs)
}
