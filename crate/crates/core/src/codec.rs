//! Serde adapters writing every integer as a decimal string.

use num_bigint::{BigInt, BigUint};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

use crate::bigmath::parse_decimal;

pub mod big_uint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        parse_decimal(&s).ok_or_else(|| D::Error::custom(format!("expected unsigned decimal string, got {s:?}")))
    }
}

pub mod big_int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        parse_signed(&s).ok_or_else(|| D::Error::custom(format!("expected signed decimal string, got {s:?}")))
    }
}

pub mod unsigned {
    use super::*;

    pub fn serialize<S: Serializer, T: ToString>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>, T: TryFrom<u64>>(d: D) -> Result<T, D::Error> {
        let s = String::deserialize(d)?;
        parse_decimal(&s)
            .and_then(|v| u64::try_from(v).ok())
            .and_then(|v| T::try_from(v).ok())
            .ok_or_else(|| D::Error::custom(format!("expected small unsigned decimal string, got {s:?}")))
    }
}

pub mod signed {
    use super::*;

    pub fn serialize<S: Serializer, T: ToString>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>, T: TryFrom<i64>>(d: D) -> Result<T, D::Error> {
        let s = String::deserialize(d)?;
        parse_signed(&s)
            .and_then(|v| i64::try_from(v).ok())
            .and_then(|v| T::try_from(v).ok())
            .ok_or_else(|| D::Error::custom(format!("expected small signed decimal string, got {s:?}")))
    }
}

fn parse_signed(s: &str) -> Option<BigInt> {
    match s.strip_prefix('-') {
        Some(rest) if rest != "0" => parse_decimal(rest).map(|v| -BigInt::from(v)),
        Some(_) => None,
        None => parse_decimal(s).map(BigInt::from),
    }
}
