use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lrc_core::circuit::{parse_netlist, Circuit};
use lrc_core::compiler::{CompiledCircuit, CompiledMeta};
use lrc_core::lab::Target;
use serde::Serialize;

pub enum Loaded {
    Raw(Circuit),
    Compiled(Box<CompiledCircuit>),
}

impl Loaded {
    pub fn target(&self) -> Target<'_> {
        match self {
            Loaded::Raw(c) => Target::Raw(c),
            Loaded::Compiled(c) => Target::Compiled(c),
        }
    }
}

pub fn meta_path(circuit: &Path) -> PathBuf {
    let mut s = circuit.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn read_netlist(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_netlist(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A netlist, compiled if its metadata file exists.
pub fn load(path: &Path) -> Result<Loaded> {
    let circuit = read_netlist(path)?;
    let meta = meta_path(path);
    if !meta.exists() {
        return Ok(Loaded::Raw(circuit));
    }
    let text = fs::read_to_string(&meta).with_context(|| format!("reading {}", meta.display()))?;
    let meta: CompiledMeta = serde_json::from_str(&text).with_context(|| format!("parsing {}", meta.display()))?;
    Ok(Loaded::Compiled(Box::new(CompiledCircuit::from_parts(circuit, meta)?)))
}

pub fn load_compiled(path: &Path) -> Result<CompiledCircuit> {
    match load(path)? {
        Loaded::Compiled(c) => Ok(*c),
        Loaded::Raw(_) => bail!(
            "{} has no {}; compile it first",
            path.display(),
            meta_path(path).display()
        ),
    }
}

/// Parses a string of 0/1 characters; position k is bit k.
pub fn bits(s: &str, what: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => bail!("{what}: expected only 0 and 1, got {s:?}"),
        })
        .collect()
}

pub fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}
