//! Parsers for CLI flag syntax and the small JSON input formats.

use num::bigint::BigInt;
use num::rational::BigRational;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

use crate::core::{DiagonalForm, FourierFunction, HomogeneousForm, MetricSpec};
use crate::enumerate::{LinearSubvariety, Variety};
use crate::toric::{CatalogEntry, LatticePolytope};

use super::CliError;

fn input_err(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Form files: either {"diagonal": {"d", "n", "a"}} or
/// {"degree", "nvars", "terms": [[[e0,e1,...], c], ...]}.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormFile {
    #[serde(default)]
    diagonal: Option<DiagonalFile>,
    #[serde(default)]
    degree: Option<u32>,
    #[serde(default)]
    nvars: Option<usize>,
    #[serde(default)]
    terms: Option<Vec<(Vec<u32>, i64)>>,
}

#[derive(Deserialize)]
struct DiagonalFile {
    d: u32,
    n: usize,
    a: Vec<i64>,
}

pub fn read_form(path: &Path) -> Result<HomogeneousForm, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    parse_form_str(&text)
}

pub fn parse_form_str(text: &str) -> Result<HomogeneousForm, CliError> {
    let file: FormFile =
        serde_json::from_str(text).map_err(|e| input_err(format!("bad form JSON: {e}")))?;
    if let Some(d) = file.diagonal {
        let a: Vec<BigInt> = d.a.iter().map(|&c| BigInt::from(c)).collect();
        let diag = DiagonalForm::new(d.d, d.n, a).map_err(|e| input_err(e.to_string()))?;
        return Ok(diag.to_homogeneous());
    }
    match (file.degree, file.nvars, file.terms) {
        (Some(degree), Some(nvars), Some(terms)) => {
            let terms: Vec<(Vec<u32>, BigInt)> =
                terms.into_iter().map(|(e, c)| (e, BigInt::from(c))).collect();
            HomogeneousForm::new(degree, nvars, terms).map_err(|e| input_err(e.to_string()))
        }
        _ => Err(input_err("form JSON needs either \"diagonal\" or degree/nvars/terms")),
    }
}

/// Variety files: {"projective": n} or {"hypersurface": <form>}.
pub fn read_variety(path: &Path) -> Result<Variety, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| input_err(format!("bad variety JSON: {e}")))?;
    if let Some(n) = value.get("projective") {
        let n = n.as_u64().ok_or_else(|| input_err("\"projective\" must be an integer"))? as usize;
        return Ok(Variety::Projective { n });
    }
    if let Some(form) = value.get("hypersurface") {
        return Ok(Variety::Hypersurface(parse_form_str(&form.to_string())?));
    }
    Err(input_err("variety JSON needs \"projective\" or \"hypersurface\""))
}

/// Exclusion files: [{"forms": [[c0,c1,...], ...]}, ...].
pub fn read_exclusions(path: &Path) -> Result<Vec<LinearSubvariety>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_err(format!("bad exclusions JSON: {e}")))
}

/// Polytope files: {"vertices": [[x,y,...], ...]} with integer entries.
#[derive(Deserialize)]
struct PolytopeFile {
    vertices: Vec<Vec<i64>>,
}

pub fn read_polytope(path: &Path) -> Result<LatticePolytope, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    let file: PolytopeFile =
        serde_json::from_str(&text).map_err(|e| input_err(format!("bad polytope JSON: {e}")))?;
    let refs: Vec<&[i64]> = file.vertices.iter().map(|v| v.as_slice()).collect();
    LatticePolytope::from_i64_points(&refs).map_err(|e| input_err(e.to_string()))
}

/// Catalog files: [{"name": "...", "vertices": [[...], ...]}, ...].
#[derive(Deserialize)]
struct CatalogFileEntry {
    name: String,
    vertices: Vec<Vec<i64>>,
}

pub fn read_catalog(path: &Path) -> Result<Vec<CatalogEntry>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    let entries: Vec<CatalogFileEntry> =
        serde_json::from_str(&text).map_err(|e| input_err(format!("bad catalog JSON: {e}")))?;
    Ok(entries
        .into_iter()
        .map(|e| CatalogEntry {
            name: e.name,
            vertices: e
                .vertices
                .into_iter()
                .map(|v| v.into_iter().map(|c| BigRational::from(BigInt::from(c))).collect())
                .collect(),
        })
        .collect())
}

/// Metric flag: weil | fs | lp:P, with the shift applied separately.
pub fn parse_metric(s: &str, shift: f64) -> Result<MetricSpec, CliError> {
    let base = match s {
        "weil" => MetricSpec::weil(),
        "fs" => MetricSpec::fubini_study(),
        _ => {
            let p = s
                .strip_prefix("lp:")
                .and_then(|t| t.parse::<f64>().ok())
                .filter(|p| *p >= 1.0)
                .ok_or_else(|| input_err(format!("unknown metric {s:?} (weil|fs|lp:P)")))?;
            MetricSpec::lp(p)
        }
    };
    Ok(base.with_shift(shift))
}

/// Fourier flag: a0,a1,b1,a2,b2,...
pub fn parse_fourier(s: &str) -> Result<FourierFunction, CliError> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| input_err(format!("bad --fourier: {e}")))?;
    if vals.is_empty() {
        return Err(input_err("empty --fourier"));
    }
    let mut cos = Vec::new();
    let mut sin = Vec::new();
    for pair in vals[1..].chunks(2) {
        cos.push(pair[0]);
        sin.push(*pair.get(1).unwrap_or(&0.0));
    }
    Ok(FourierFunction::new(vals[0], cos, sin))
}

/// Homogeneous coordinates: comma-separated rationals like 1,1/2,-3.
pub fn parse_coords(s: &str) -> Result<Vec<BigRational>, CliError> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let (num, den) = match t.split_once('/') {
                Some((a, b)) => (a, b),
                None => (t, "1"),
            };
            let n: BigInt = num.parse().map_err(|_| input_err(format!("bad coordinate {t:?}")))?;
            let d: BigInt = den.parse().map_err(|_| input_err(format!("bad coordinate {t:?}")))?;
            if d == BigInt::from(0) {
                return Err(input_err(format!("zero denominator in {t:?}")));
            }
            Ok(BigRational::new(n, d))
        })
        .collect()
}

/// `--inputs k=v,k=v` pairs; list values use colons, e.g. e=3:1:0.
pub fn parse_inputs(pairs: &[String]) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for chunk in pairs.iter().flat_map(|p| p.split(',')) {
        let (k, v) = chunk
            .split_once('=')
            .ok_or_else(|| input_err(format!("--inputs entry {chunk:?} is not key=value")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn input_f64(map: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    map.get(key)
        .ok_or_else(|| input_err(format!("missing input {key}")))?
        .parse()
        .map_err(|e| input_err(format!("input {key}: {e}")))
}

pub fn input_f64_or(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64, CliError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e| input_err(format!("input {key}: {e}"))),
    }
}

pub fn input_list(map: &BTreeMap<String, String>, key: &str) -> Result<Vec<f64>, CliError> {
    map.get(key)
        .ok_or_else(|| input_err(format!("missing input {key}")))?
        .split(':')
        .map(|t| t.parse().map_err(|e| input_err(format!("input {key}: {e}"))))
        .collect()
}
