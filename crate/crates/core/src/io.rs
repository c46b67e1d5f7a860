//! On-disk JSON forms for fields, codes, graphs and design certificates.
//!
//! Writers emit pretty JSON with a trailing newline. Readers re-run every
//! constructor check, so a file that loads is canonical and consistent.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::codes::{code_new, AdditiveCode, CodeMeta};
use crate::design::{kernel_ratio, DesignCertificate};
use crate::gf::{Field, FieldRef};
use crate::graphs::{BipartiteGraph, SpectralCertificate};
use crate::linalg::{Matrix, MatrixData, Subspace};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("{path}: {message}")]
    File { path: String, message: String },
}

fn parse_err(location: impl Into<String>, message: impl ToString) -> IoError {
    IoError::Parse {
        location: location.into(),
        message: message.to_string(),
    }
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("line {}, column {}", e.line(), e.column()), e))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn field_to_json(field: &Field) -> String {
    to_pretty(field)
}

pub fn field_from_json(text: &str) -> Result<FieldRef, IoError> {
    Ok(from_json::<Field>(text)?.shared())
}

#[derive(Serialize)]
struct CodeFileOut<'a> {
    field: &'a Field,
    k: usize,
    s: usize,
    n: usize,
    encoders: Vec<MatrixData>,
    meta: &'a CodeMeta,
}

#[derive(Deserialize)]
struct CodeFile {
    field: Field,
    k: usize,
    s: usize,
    n: usize,
    encoders: Vec<MatrixData>,
    meta: CodeMeta,
}

fn code_file(code: &AdditiveCode) -> CodeFileOut<'_> {
    CodeFileOut {
        field: code.field(),
        k: code.k(),
        s: code.s(),
        n: code.n(),
        encoders: code.encoders().iter().map(Matrix::to_data).collect(),
        meta: code.meta(),
    }
}

pub fn code_to_json(code: &AdditiveCode) -> String {
    to_pretty(&code_file(code))
}

/// SHA-256 of the compact JSON form; certificates refer to codes by it.
pub fn code_hash(code: &AdditiveCode) -> String {
    sha256_hex(serde_json::to_string(&code_file(code)).expect("code serializes").as_bytes())
}

pub fn code_from_json(text: &str) -> Result<AdditiveCode, IoError> {
    let file: CodeFile = from_json(text)?;
    let field = file.field.shared();
    let encoders = file
        .encoders
        .into_iter()
        .enumerate()
        .map(|(i, d)| Matrix::from_data(&field, d).map_err(|e| parse_err(format!("encoders[{i}]"), e)))
        .collect::<Result<Vec<_>, _>>()?;
    let code = code_new(&field, file.k, file.s, file.n, encoders).map_err(|e| parse_err("code", e))?;
    Ok(code.with_meta(file.meta.kind, file.meta.seed))
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    d: usize,
    left_adj: Vec<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    certificate: Option<SpectralCertificate>,
}

pub fn graph_to_json(g: &BipartiteGraph, cert: Option<&SpectralCertificate>) -> String {
    to_pretty(&GraphFile {
        n: g.n(),
        d: g.d(),
        left_adj: g.left_adj().iter().map(|s| s.iter().map(|&(j, l)| [j, l]).collect()).collect(),
        certificate: cert.cloned(),
    })
}

pub fn graph_from_json(text: &str) -> Result<(BipartiteGraph, Option<SpectralCertificate>), IoError> {
    let file: GraphFile = from_json(text)?;
    let adj = file.left_adj.into_iter().map(|s| s.into_iter().map(|[j, l]| (j, l)).collect()).collect();
    let g = BipartiteGraph::from_left_adj(file.n, file.d, adj).map_err(|e| parse_err("left_adj", e))?;
    Ok((g, file.certificate))
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    code_hash: String,
    r_max: usize,
    #[serde(with = "crate::rational::json_vec")]
    tau_hat: Vec<Rational>,
    witness: Vec<MatrixData>,
    subspaces_scanned: u64,
}

pub fn certificate_to_json(cert: &DesignCertificate, code: &AdditiveCode) -> String {
    to_pretty(&CertificateFile {
        code_hash: code_hash(code),
        r_max: cert.r_max,
        tau_hat: cert.tau_hat.clone(),
        witness: cert.witness.iter().map(|w| w.basis().to_data()).collect(),
        subspaces_scanned: cert.subspaces_scanned,
    })
}

/// Loads a certificate for `code`, checking the hash, canonical witnesses,
/// and that each witness reproduces its ratio.
pub fn certificate_from_json(text: &str, code: &AdditiveCode) -> Result<DesignCertificate, IoError> {
    let file: CertificateFile = from_json(text)?;
    let expected = code_hash(code);
    if file.code_hash != expected {
        return Err(parse_err(
            "code_hash",
            format!("certificate is for code {}, not {expected}", file.code_hash),
        ));
    }
    let witness = file
        .witness
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            Matrix::from_data(code.field(), d)
                .and_then(Subspace::from_canonical)
                .map_err(|e| parse_err(format!("witness[{i}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (i, (w, t)) in witness.iter().zip(&file.tau_hat).enumerate() {
        if w.ambient() != code.k() || w.dim() == 0 || kernel_ratio(code, w) != *t {
            return Err(parse_err(format!("witness[{i}]"), format!("does not attain tau_hat = {t}")));
        }
    }
    let cert = DesignCertificate {
        r_max: file.r_max,
        tau_hat: file.tau_hat,
        witness,
        subspaces_scanned: file.subspaces_scanned,
    };
    if !cert.verify(code) {
        return Err(parse_err("tau_hat", "inconsistent with r_max or not monotone"));
    }
    Ok(cert)
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|e| IoError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Attaches the file name to a parse error.
pub fn in_file(path: &Path) -> impl Fn(IoError) -> IoError + '_ {
    move |e| match e {
        IoError::Parse { location, message } => IoError::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    }
}
