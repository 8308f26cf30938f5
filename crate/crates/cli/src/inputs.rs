use std::path::Path;

use anyhow::{anyhow, Context, Result};
use fraisse_core::ages::{AgeSpec, CATALOG};
use fraisse_core::certificate::StructureInput;
use fraisse_core::structures::{canonical_form, parse_structure, Structure};

/// A usage error, reported with exit status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn need<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| Usage(format!("missing required flag {flag}")).into())
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// A structure file together with its normalized digest and canonical code.
pub struct Loaded {
    pub structure: Structure,
    pub digest: String,
    pub code: String,
}

impl Loaded {
    pub fn new(structure: Structure) -> Self {
        Loaded {
            digest: StructureInput::new(&structure).digest,
            code: canonical_form(&structure).to_hex(),
            structure,
        }
    }
}

pub fn structure(path: &Path) -> Result<Loaded> {
    let text = read(path)?;
    let s = parse_structure(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(Loaded::new(s))
}

pub fn age(source: &str) -> Result<AgeSpec> {
    let path = Path::new(source);
    if path.is_file() {
        return AgeSpec::load(path).with_context(|| format!("in {}", path.display()));
    }
    let base = source.split(':').next().unwrap_or(source);
    if CATALOG.iter().any(|c| c.split(':').next() == Some(base)) {
        return Ok(AgeSpec::catalog(source)?);
    }
    Err(anyhow!(Usage(format!(
        "`{source}` is neither a catalog age ({}) nor an existing file",
        CATALOG.join(", ")
    ))))
}

pub fn required_age(source: &Option<String>) -> Result<AgeSpec> {
    age(need(source, "--age")?)
}
