//! Fishing-task records and their hash abstract.
//!
//! A record binds four attributes, in this order: the task script digest,
//! the witness-verified result, the network verification proof and a
//! user-specific key. The abstract is the SHA-1 digest of a canonical,
//! injective encoding of those attributes:
//!
//! ```text
//! for each field: u64 big-endian byte length || field bytes
//! ```
//!
//! The verified result is encoded as its entries in IEEE-754 big-endian
//! form, so its length prefix is `8 * dim`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};

use crate::domain::ResultVector;
use crate::error::{Error, Result};

pub const ABSTRACT_LEN: usize = 20;

/// 20-byte SHA-1 abstract, rendered as 40 lowercase hex characters.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Abstract(pub [u8; ABSTRACT_LEN]);

impl fmt::Display for Abstract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for Abstract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Abstract({self})")
    }
}

impl FromStr for Abstract {
    type Err = hex::FromHexError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut out = [0u8; ABSTRACT_LEN];
        hex::decode_to_slice(s, &mut out)?;
        Ok(Abstract(out))
    }
}

impl Serialize for Abstract {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Abstract {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.len() != 2 * ABSTRACT_LEN || s.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(serde::de::Error::custom(
                "abstract must be 40 lowercase hex characters",
            ));
        }
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for byte strings carried as base16 text.
pub mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

/// Length-prefixed concatenation of raw fields.
pub fn encode_fields(fields: [&[u8]; 4]) -> Vec<u8> {
    let total = fields.iter().map(|f| 8 + f.len()).sum();
    let mut out = Vec::with_capacity(total);
    for field in fields {
        out.extend_from_slice(&(field.len() as u64).to_be_bytes());
        out.extend_from_slice(field);
    }
    out
}

/// IEEE-754 big-endian encoding of a real sequence.
pub fn encode_reals(values: &[f64]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(8 * values.len());
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index, value });
        }
        out.extend_from_slice(&value.to_be_bytes());
    }
    Ok(out)
}

pub fn sha1_abstract(bytes: &[u8]) -> Abstract {
    Abstract(Sha1::digest(bytes).into())
}

/// The four attributes a fishing record commits to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordFields {
    #[serde(with = "hex_bytes")]
    pub script_digest: Vec<u8>,
    pub verified_result: ResultVector,
    #[serde(with = "hex_bytes")]
    pub network_proof: Vec<u8>,
    #[serde(with = "hex_bytes")]
    pub user_key: Vec<u8>,
}

impl RecordFields {
    pub fn canonical_bytes(&self) -> Result<Vec<u8>> {
        canonical_serialize(self)
    }

    pub fn compute_abstract(&self) -> Result<Abstract> {
        compute_abstract(self)
    }
}

pub fn canonical_serialize(fields: &RecordFields) -> Result<Vec<u8>> {
    let result = encode_reals(fields.verified_result.values())?;
    Ok(encode_fields([
        &fields.script_digest,
        &result,
        &fields.network_proof,
        &fields.user_key,
    ]))
}

pub fn compute_abstract(fields: &RecordFields) -> Result<Abstract> {
    Ok(sha1_abstract(&canonical_serialize(fields)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RecordId(pub u64);

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FishingRecord {
    #[serde(flatten)]
    pub fields: RecordFields,
    #[serde(rename = "abstract")]
    pub abstract_digest: Abstract,
    #[serde(default)]
    consumed: bool,
}

impl FishingRecord {
    pub fn new(fields: RecordFields) -> Result<Self> {
        let abstract_digest = fields.compute_abstract()?;
        Ok(Self {
            fields,
            abstract_digest,
            consumed: false,
        })
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Recomputes the abstract from the stored fields and compares.
    pub fn abstract_matches(&self) -> bool {
        self.fields
            .compute_abstract()
            .is_ok_and(|a| a == self.abstract_digest)
    }
}

/// An officer's fishing-task repository. Consumed records leave the
/// available set for good.
#[derive(Debug, Clone, Default)]
pub struct Repository {
    available: BTreeMap<RecordId, FishingRecord>,
    consumed: BTreeSet<RecordId>,
    next_id: u64,
}

impl Repository {
    pub fn insert(&mut self, record: FishingRecord) -> Result<RecordId> {
        if record.consumed {
            return Err(Error::invalid("record", "cannot add a consumed record"));
        }
        let id = RecordId(self.next_id);
        self.next_id += 1;
        self.available.insert(id, record);
        Ok(id)
    }

    pub fn get(&self, id: RecordId) -> Option<&FishingRecord> {
        self.available.get(&id)
    }

    pub fn list(&self) -> impl Iterator<Item = (RecordId, &FishingRecord)> {
        self.available.iter().map(|(id, r)| (*id, r))
    }

    pub fn ids(&self) -> impl Iterator<Item = RecordId> + '_ {
        self.available.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.available.len()
    }

    pub fn is_empty(&self) -> bool {
        self.available.is_empty()
    }

    pub fn is_consumed(&self, id: RecordId) -> bool {
        self.consumed.contains(&id)
    }

    pub fn consumed_count(&self) -> usize {
        self.consumed.len()
    }

    /// Marks a record as used for a catch and removes it from circulation.
    pub fn remove_consumed(&mut self, id: RecordId) -> Result<FishingRecord> {
        if self.consumed.contains(&id) {
            return Err(Error::RecordConsumed(id));
        }
        let mut record = self.available.remove(&id).ok_or(Error::UnknownRecord(id))?;
        record.consumed = true;
        self.consumed.insert(id);
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(key: &[u8]) -> RecordFields {
        RecordFields {
            script_digest: vec![0xab, 0xcd],
            verified_result: ResultVector::new(vec![1.0, 2.0]).unwrap(),
            network_proof: b"proof".to_vec(),
            user_key: key.to_vec(),
        }
    }

    #[test]
    fn four_single_char_fields_encode_to_36_bytes() {
        let bytes = encode_fields([b"s", b"r", b"p", b"k"]);
        assert_eq!(bytes.len(), 36);
        assert_eq!(
            hex::encode(&bytes),
            "0000000000000001730000000000000001720000000000000001700000000000000001\
             6b"
        );
    }

    #[test]
    fn empty_fields_hash_the_zero_prefix_stream() {
        // sha1 of 32 zero bytes, from an independent implementation
        let bytes = encode_fields([b"", b"", b"", b""]);
        assert_eq!(bytes, vec![0u8; 32]);
        assert_eq!(
            sha1_abstract(&bytes).to_string(),
            "de8a847bff8c343d69b853a215e6ee775ef2ef96"
        );
    }

    #[test]
    fn record_abstract_matches_reference_digest() {
        let f = fields(b"key");
        assert_eq!(
            hex::encode(f.canonical_bytes().unwrap()),
            "0000000000000002abcd00000000000000103ff000000000000040000000000000000000\
             00000000000570726f6f6600000000000000036b6579"
        );
        assert_eq!(
            f.compute_abstract().unwrap().to_string(),
            "856c8cec349a4a3700d3735a8ee5354fbf8ea02e"
        );
    }

    #[test]
    fn encoding_is_deterministic_and_sensitive_to_the_key() {
        let a = fields(b"key");
        assert_eq!(a.canonical_bytes().unwrap(), a.canonical_bytes().unwrap());
        let b = fields(b"kez");
        assert_ne!(a.canonical_bytes().unwrap(), b.canonical_bytes().unwrap());
        assert_ne!(a.compute_abstract().unwrap(), b.compute_abstract().unwrap());
    }

    #[test]
    fn non_finite_reals_fail_to_encode() {
        assert!(matches!(
            encode_reals(&[1.0, f64::INFINITY]),
            Err(Error::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn stored_record_recomputes_to_its_abstract() {
        let r = FishingRecord::new(fields(b"key")).unwrap();
        assert!(r.abstract_matches());
        let mut tampered = r.clone();
        tampered.fields.user_key.push(0);
        assert!(!tampered.abstract_matches());
    }

    #[test]
    fn remove_consumed_excludes_record_and_guards_repeats() {
        let mut repo = Repository::default();
        let a = repo.insert(FishingRecord::new(fields(b"a")).unwrap()).unwrap();
        let b = repo.insert(FishingRecord::new(fields(b"b")).unwrap()).unwrap();

        let taken = repo.remove_consumed(a).unwrap();
        assert!(taken.is_consumed());
        assert_eq!(repo.ids().collect::<Vec<_>>(), vec![b]);
        assert!(repo.is_consumed(a));
        assert_eq!(repo.remove_consumed(a), Err(Error::RecordConsumed(a)));
        assert_eq!(
            repo.remove_consumed(RecordId(99)),
            Err(Error::UnknownRecord(RecordId(99)))
        );
        assert!(repo.insert(taken).is_err());
    }

    #[test]
    fn json_uses_hex_fields() {
        let r = FishingRecord::new(fields(b"key")).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["script_digest"], "abcd");
        assert_eq!(json["user_key"], "6b6579");
        assert_eq!(json["abstract"], "856c8cec349a4a3700d3735a8ee5354fbf8ea02e");
        let back: FishingRecord = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);

        let upper = serde_json::json!("856C8CEC349A4A3700D3735A8EE5354FBF8EA02E");
        assert!(serde_json::from_value::<Abstract>(upper).is_err());
    }
}
