//! Instance and certificate files.
//!
//! Both are single JSON documents. Certificates are emitted by a small
//! fixed-order writer that prints floats with 17 significant digits, so
//! emit -> parse -> emit is byte-stable and parse recovers every f64
//! bit-for-bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Method, SaddleCertificate, SparseMixedStrategy};

/// On-disk instance: costs in the caller's order plus the two budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub costs: Vec<f64>,
    pub k_a: usize,
    pub k_d: usize,
}

/// One strategy atom: a pure action and its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyAtom {
    pub targets: Vec<usize>,
    pub prob: f64,
}

/// On-disk certificate; marginals and ids are in original target order.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub value: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub s_star: usize,
    pub r_star: usize,
    pub attacker_active: Vec<usize>,
    pub defender_active: Vec<usize>,
    pub defender_pure: bool,
    #[serde(default)]
    pub attacker_strategy: Option<Vec<StrategyAtom>>,
    #[serde(default)]
    pub defender_strategy: Option<Vec<StrategyAtom>>,
    pub method: String,
    pub runtime_ns: u64,
}

impl CertificateFile {
    pub fn from_certificate(
        cert: &SaddleCertificate,
        attacker_strategy: Option<Vec<StrategyAtom>>,
        defender_strategy: Option<Vec<StrategyAtom>>,
        runtime_ns: u64,
    ) -> Self {
        CertificateFile {
            value: cert.value,
            alpha: cert.alpha.values().to_vec(),
            beta: cert.beta.values().to_vec(),
            s_star: cert.s_star,
            r_star: cert.r_star,
            attacker_active: cert.attacker_active.clone(),
            defender_active: cert.defender_active.clone(),
            defender_pure: cert.defender_pure,
            attacker_strategy,
            defender_strategy,
            method: cert.method.as_str().to_string(),
            runtime_ns,
        }
    }

    pub fn method(&self) -> Result<Method> {
        self.method.parse()
    }
}

/// Converts a strategy whose subsets live in sorted space into file
/// atoms with original target ids.
pub fn strategy_atoms(
    strategy: &SparseMixedStrategy,
    orig_id: impl Fn(usize) -> usize,
) -> Vec<StrategyAtom> {
    strategy
        .atoms()
        .iter()
        .map(|(subset, prob)| {
            let mut targets: Vec<usize> = subset.members().iter().map(|&l| orig_id(l)).collect();
            targets.sort_unstable();
            StrategyAtom {
                targets,
                prob: *prob,
            }
        })
        .collect()
}

/// 17 significant digits: enough to reproduce any f64 exactly.
fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

fn push_f64_array(out: &mut String, values: &[f64]) {
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_f64(*v));
    }
    out.push(']');
}

fn push_usize_array(out: &mut String, values: &[usize]) {
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{v}");
    }
    out.push(']');
}

fn push_strategy(out: &mut String, atoms: &[StrategyAtom]) {
    out.push('[');
    for (i, atom) in atoms.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str("{\"targets\": ");
        push_usize_array(out, &atom.targets);
        out.push_str(", \"prob\": ");
        out.push_str(&fmt_f64(atom.prob));
        out.push('}');
    }
    out.push(']');
}

/// Serializes a certificate with a fixed field order and float format.
pub fn emit_certificate(cert: &CertificateFile) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"value\": {},", fmt_f64(cert.value));
    out.push_str("  \"alpha\": ");
    push_f64_array(&mut out, &cert.alpha);
    out.push_str(",\n  \"beta\": ");
    push_f64_array(&mut out, &cert.beta);
    let _ = write!(
        out,
        ",\n  \"s_star\": {},\n  \"r_star\": {},\n",
        cert.s_star, cert.r_star
    );
    out.push_str("  \"attacker_active\": ");
    push_usize_array(&mut out, &cert.attacker_active);
    out.push_str(",\n  \"defender_active\": ");
    push_usize_array(&mut out, &cert.defender_active);
    let _ = write!(out, ",\n  \"defender_pure\": {}", cert.defender_pure);
    if let Some(atoms) = &cert.attacker_strategy {
        out.push_str(",\n  \"attacker_strategy\": ");
        push_strategy(&mut out, atoms);
    }
    if let Some(atoms) = &cert.defender_strategy {
        out.push_str(",\n  \"defender_strategy\": ");
        push_strategy(&mut out, atoms);
    }
    let _ = write!(out, ",\n  \"method\": \"{}\",\n", cert.method);
    let _ = writeln!(out, "  \"runtime_ns\": {}", cert.runtime_ns);
    out.push_str("}\n");
    out
}

pub fn parse_certificate(text: &str) -> Result<CertificateFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_certificate(path: &Path) -> Result<CertificateFile> {
    let text = std::fs::read_to_string(path)?;
    parse_certificate(&text)
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_instance(path: &Path) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn write_instance(path: &Path, instance: &InstanceFile) -> Result<()> {
    let text = serde_json::to_string_pretty(instance).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}
