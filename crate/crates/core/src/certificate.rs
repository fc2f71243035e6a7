//! Certificate format (version `"1"`), canonical bytes and digest.
//!
//! Every integer is a decimal string. Canonical bytes are compact JSON with
//! object keys sorted by code point; the digest is lowercase SHA-256 hex of
//! the canonical bytes of the certificate with the `digest` key removed.
//! Unknown fields are rejected everywhere.

use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bigmath;
use crate::bls::{DiscriminantRecord, Form, TermOutcome, WagstaffProof};
use crate::certify::{NMinusOneProof, PrimalityProof, ProofFactor, ProofForm};
use crate::codec;
use crate::factor::Provenance;
use crate::quad_ring::ChuaOutcome;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlsCertificate {
    pub format_version: String,
    #[serde(with = "codec::unsigned")]
    pub exponent: u64,
    #[serde(with = "codec::unsigned")]
    pub n_digits: u64,
    pub cyclotomic_terms: Vec<TermRecord>,
    pub entries: Vec<EntryRecord>,
    #[serde(with = "codec::big_uint")]
    pub cofactor: BigUint,
    pub form: Form,
    pub discriminant: Option<DiscriminantRecord>,
    #[serde(with = "codec::signed")]
    pub margin_bits: i64,
    pub chua: ChuaRecord,
    pub digest: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermState {
    Complete,
    Partial,
    Skipped,
}

/// `Φ_d(2) = ∏ q^e · residual`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    #[serde(with = "codec::unsigned")]
    pub d: u64,
    #[serde(with = "codec::big_uint")]
    pub value: BigUint,
    pub factors: Vec<TermFactor>,
    #[serde(with = "codec::big_uint")]
    pub residual: BigUint,
    pub status: TermState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFactor {
    #[serde(with = "codec::big_uint")]
    pub q: BigUint,
    #[serde(with = "codec::unsigned")]
    pub e: u32,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    #[serde(with = "codec::big_uint")]
    pub q: BigUint,
    #[serde(with = "codec::unsigned")]
    pub e: u32,
    #[serde(with = "codec::big_uint")]
    pub witness: BigUint,
    pub provenance: Provenance,
    pub proof: ProofRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChuaRecord {
    #[serde(with = "codec::signed")]
    pub epsilon: i8,
    #[serde(with = "codec::signed")]
    pub delta: i8,
    pub holds: bool,
}

impl From<ChuaOutcome> for ChuaRecord {
    fn from(c: ChuaOutcome) -> Self {
        ChuaRecord { epsilon: c.epsilon, delta: c.delta, holds: c.holds }
    }
}

/// Wire form of a [`PrimalityProof`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProofRecord {
    SmallDeterministic {
        #[serde(with = "codec::big_uint")]
        n: BigUint,
    },
    NMinusOne {
        #[serde(with = "codec::big_uint")]
        n: BigUint,
        factors: Vec<ProofFactorRecord>,
        form: Form,
        discriminant: Option<DiscriminantRecord>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofFactorRecord {
    #[serde(with = "codec::big_uint")]
    pub q: BigUint,
    #[serde(with = "codec::unsigned")]
    pub e: u32,
    #[serde(with = "codec::big_uint")]
    pub witness: BigUint,
    pub proof: ProofRecord,
}

impl From<&PrimalityProof> for ProofRecord {
    fn from(p: &PrimalityProof) -> Self {
        match p {
            PrimalityProof::SmallDeterministic { n } => ProofRecord::SmallDeterministic { n: n.clone() },
            PrimalityProof::NMinusOne(node) => {
                let (form, discriminant) = match &node.form {
                    ProofForm::Sqrt => (Form::Sqrt, None),
                    ProofForm::Cube(rec) => (Form::Cube, Some(rec.clone())),
                };
                ProofRecord::NMinusOne {
                    n: node.n.clone(),
                    factors: node
                        .factors
                        .iter()
                        .map(|f| ProofFactorRecord {
                            q: f.q.clone(),
                            e: f.exponent,
                            witness: f.witness.clone(),
                            proof: (&f.proof).into(),
                        })
                        .collect(),
                    form,
                    discriminant,
                }
            }
        }
    }
}

impl ProofRecord {
    /// Back to the in-memory proof; `field` labels schema errors.
    pub fn to_proof(&self, field: &str) -> Result<PrimalityProof, SchemaError> {
        match self {
            ProofRecord::SmallDeterministic { n } => Ok(PrimalityProof::SmallDeterministic { n: n.clone() }),
            ProofRecord::NMinusOne { n, factors, form, discriminant } => {
                let form = match (form, discriminant) {
                    (Form::Sqrt, None) => ProofForm::Sqrt,
                    (Form::Cube, Some(rec)) => ProofForm::Cube(rec.clone()),
                    (Form::Sqrt, Some(_)) => return Err(invalid(format!("{field}.discriminant"), "present on sqrt form")),
                    (Form::Cube, None) => return Err(invalid(format!("{field}.discriminant"), "missing on cube form")),
                };
                let factors = factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        Ok(ProofFactor {
                            q: f.q.clone(),
                            exponent: f.e,
                            witness: f.witness.clone(),
                            proof: f.proof.to_proof(&format!("{field}.factors[{i}].proof"))?,
                        })
                    })
                    .collect::<Result<Vec<_>, SchemaError>>()?;
                Ok(PrimalityProof::NMinusOne(Box::new(NMinusOneProof { n: n.clone(), factors, form })))
            }
        }
    }
}

impl TermRecord {
    fn from_outcome(t: &TermOutcome) -> Self {
        match &t.factorization {
            None => TermRecord {
                d: t.term.d,
                value: t.term.value.clone(),
                factors: Vec::new(),
                residual: t.term.value.clone(),
                status: TermState::Skipped,
            },
            Some(fz) => TermRecord {
                d: t.term.d,
                value: t.term.value.clone(),
                factors: fz
                    .factors
                    .iter()
                    .map(|f| TermFactor { q: f.prime.clone(), e: f.exponent, provenance: f.provenance })
                    .collect(),
                residual: fz.residual.clone(),
                status: if fz.residual.is_one() { TermState::Complete } else { TermState::Partial },
            },
        }
    }
}

impl BlsCertificate {
    pub fn from_proof(proof: &WagstaffProof) -> Self {
        let dec = &proof.decomposition;
        let mut cert = BlsCertificate {
            format_version: FORMAT_VERSION.to_string(),
            exponent: proof.p,
            n_digits: bigmath::digits10(&dec.n),
            cyclotomic_terms: proof.terms.iter().map(TermRecord::from_outcome).collect(),
            entries: dec
                .entries
                .iter()
                .map(|e| EntryRecord {
                    q: e.q.clone(),
                    e: e.e,
                    witness: e.witness.clone().expect("witnesses are set before packaging"),
                    provenance: e.provenance,
                    proof: (&e.proof).into(),
                })
                .collect(),
            cofactor: dec.r.clone(),
            form: dec.form,
            discriminant: dec.discriminant.clone(),
            margin_bits: dec.margin_bits,
            chua: proof.chua.into(),
            digest: String::new(),
        };
        cert.digest = digest(&cert);
        cert
    }

    /// Schema rules that serde alone cannot express.
    pub fn validate_schema(&self) -> Result<(), SchemaError> {
        if self.format_version != FORMAT_VERSION {
            return Err(invalid("format_version", format!("unsupported version {:?}", self.format_version)));
        }
        match (self.form, &self.discriminant) {
            (Form::Cube, None) => return Err(invalid("discriminant", "missing on cube form")),
            (Form::Sqrt, Some(_)) => return Err(invalid("discriminant", "present on sqrt form")),
            _ => {}
        }
        if self.digest.len() != 64 || !self.digest.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
            return Err(invalid("digest", "expected 64 lowercase hex characters"));
        }
        for (i, e) in self.entries.iter().enumerate() {
            e.proof.to_proof(&format!("entries[{i}].proof"))?;
        }
        Ok(())
    }

    /// Decoded proof of entry `i`.
    pub fn entry_proof(&self, i: usize) -> Result<PrimalityProof, SchemaError> {
        self.entries[i].proof.to_proof(&format!("entries[{i}].proof"))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Recursively key-sorted, compact JSON bytes.
pub fn canonical_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, SchemaError> {
    let v = serde_json::to_value(value).map_err(|e| invalid("$", e.to_string()))?;
    Ok(canonical_value_bytes(&v))
}

/// `serde_json::Map` is ordered by key, so plain compact output is canonical.
pub fn canonical_value_bytes(v: &Value) -> Vec<u8> {
    serde_json::to_vec(v).expect("JSON value serializes")
}

/// SHA-256 over the canonical bytes of `cert` without its `digest` field.
pub fn digest(cert: &BlsCertificate) -> String {
    let mut v = serde_json::to_value(cert).expect("certificate serializes");
    if let Value::Object(map) = &mut v {
        map.remove("digest");
    }
    hex::encode(Sha256::digest(canonical_value_bytes(&v)))
}

/// Parses and schema-checks certificate JSON. Semantics are not checked.
pub fn parse_certificate(text: &str) -> Result<BlsCertificate, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cert: BlsCertificate = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        invalid(field, e.into_inner().to_string())
    })?;
    cert.validate_schema()?;
    Ok(cert)
}

/// Writes canonical bytes plus a trailing newline.
pub fn write_certificate(cert: &BlsCertificate, path: &Path) -> Result<(), SchemaError> {
    let mut bytes = canonical_bytes(cert)?;
    bytes.push(b'\n');
    fs::write(path, bytes).map_err(|source| SchemaError::Io { path: path.display().to_string(), source })
}

pub fn read_certificate(path: &Path) -> Result<BlsCertificate, SchemaError> {
    let text = fs::read_to_string(path).map_err(|source| SchemaError::Io { path: path.display().to_string(), source })?;
    parse_certificate(&text)
}
