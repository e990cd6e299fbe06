//! TOML spec files: the IFS, an optional hand-built partition, and
//! analysis defaults.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lipeq::algebra::parse_rational;
use lipeq::catalog::EdgeList;
use lipeq::gds::PieceSpec;
use lipeq::HomogeneousIfs;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    name: Option<String>,
    dim: usize,
    lambda: String,
    maps: Vec<Vec<String>>,
    custom_partition: Option<PartitionFile>,
    #[serde(default)]
    analysis: Analysis,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionFile {
    pieces: Vec<PieceFile>,
    edges: Vec<EdgeFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceFile {
    base: Vec<usize>,
    #[serde(default)]
    minus: Vec<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<usize> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(vs) => vs,
        }
    }
}

/// One edge per target; `via` is the map word, which must be a single map.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    from: usize,
    via: OneOrMany,
    to: OneOrMany,
}

/// Defaults a spec may set; command-line flags take precedence.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub cap: Option<u64>,
    pub pairs: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Spec {
    pub name: String,
    pub ifs: HomogeneousIfs,
    pub custom: Option<(Vec<PieceSpec>, EdgeList)>,
    pub analysis: Analysis,
}

pub fn load(path: &Path) -> Result<Spec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let fallback = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parse(&text, &fallback).with_context(|| format!("in spec {}", path.display()))
}

pub fn parse(text: &str, fallback_name: &str) -> Result<Spec> {
    let file: SpecFile = toml::from_str(text)?;
    if !(1..=2).contains(&file.dim) {
        bail!("dim must be 1 or 2, got {}", file.dim);
    }
    if file.maps.len() < 2 {
        bail!("at least two maps are required, got {}", file.maps.len());
    }
    for (i, m) in file.maps.iter().enumerate() {
        if m.len() != file.dim {
            bail!("map {} has {} coordinates, expected {}", i + 1, m.len(), file.dim);
        }
    }
    let lambda = parse_rational(&file.lambda)
        .with_context(|| format!("lambda {:?} is not a rational number", file.lambda))?;
    let ifs = HomogeneousIfs::parse(lambda, &file.maps)?;
    let custom = file.custom_partition.map(|p| {
        let pieces = p.pieces.into_iter().map(|pf| PieceSpec::new(pf.base, pf.minus)).collect();
        let edges = p
            .edges
            .into_iter()
            .flat_map(|e| {
                let via = e.via.into_vec();
                e.to.into_vec().into_iter().map(move |to| (e.from, to, via.clone()))
            })
            .collect();
        (pieces, edges)
    });
    Ok(Spec {
        name: file.name.unwrap_or_else(|| fallback_name.to_string()),
        ifs,
        custom,
        analysis: file.analysis,
    })
}
