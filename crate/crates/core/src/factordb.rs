//! Client for an external factor database (FactorDB-style JSON API).
//!
//! Responses are claims only: the factor engine re-checks divisibility and
//! certifies every prime before use. Each response is cached in its own file
//! named `<decimal n>.json`, whose first line is a `#` metadata comment and
//! whose remainder is the raw response body. Cached entries are served
//! without touching the network.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use log::{info, warn};
use num_bigint::BigUint;
use num_traits::Zero;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::bigmath::parse_decimal;

pub const DEFAULT_BASE_URL: &str = "http://factordb.com/api";
pub const ENV_BASE_URL: &str = "WAGSTAFF_FACTORDB_URL";
pub const ENV_CACHE_DIR: &str = "WAGSTAFF_FACTORDB_CACHE";

/// Minimum spacing between live queries.
pub const MIN_QUERY_INTERVAL: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DbStatus {
    FullyFactored,
    CompositeFactorsKnown,
    Prime,
    ProbablePrime,
    CompositeNoFactors,
    Unknown,
}

impl DbStatus {
    pub fn from_code(code: &str) -> Option<Self> {
        Some(match code {
            "FF" => DbStatus::FullyFactored,
            "CF" => DbStatus::CompositeFactorsKnown,
            "P" => DbStatus::Prime,
            "PRP" => DbStatus::ProbablePrime,
            "C" => DbStatus::CompositeNoFactors,
            "U" | "Unit" | "N" | "*" => DbStatus::Unknown,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbResponse {
    pub n: BigUint,
    pub status: DbStatus,
    /// Claims only; entries that do not divide `n` are already dropped.
    pub claimed_factors: Vec<(BigUint, u32)>,
}

#[derive(Debug, Error)]
pub enum DbError {
    #[error("factor database unavailable: {0}")]
    DbUnavailable(String),
    #[error("malformed factor database response: {0}")]
    DbParseError(String),
}

#[derive(Deserialize)]
struct RawResponse {
    status: String,
    #[serde(default)]
    factors: Vec<(Value, Value)>,
}

fn number(v: &Value) -> Option<BigUint> {
    match v {
        Value::String(s) => parse_decimal(s),
        Value::Number(n) => n.as_u64().map(BigUint::from),
        _ => None,
    }
}

/// Parses a response body for the query `n`.
pub fn parse_response(n: &BigUint, body: &str) -> Result<DbResponse, DbError> {
    let raw: RawResponse = serde_json::from_str(body).map_err(|e| DbError::DbParseError(e.to_string()))?;
    let status = DbStatus::from_code(&raw.status)
        .ok_or_else(|| DbError::DbParseError(format!("unknown status {:?}", raw.status)))?;
    let mut claimed = Vec::with_capacity(raw.factors.len());
    for (f, e) in &raw.factors {
        let f = number(f).ok_or_else(|| DbError::DbParseError(format!("bad factor {f}")))?;
        let e = number(e)
            .and_then(|e| u32::try_from(e).ok())
            .filter(|&e| e >= 1)
            .ok_or_else(|| DbError::DbParseError(format!("bad exponent {e}")))?;
        if f <= BigUint::from(1u32) || &f == n || !(n % f.pow(e)).is_zero() {
            warn!("factor database claims {f}^{e} | {n}: does not check out, discarded");
            continue;
        }
        claimed.push((f, e));
    }
    Ok(DbResponse { n: n.clone(), status, claimed_factors: claimed })
}

pub struct FactorDbClient {
    base_url: String,
    cache_dir: Option<PathBuf>,
    live: bool,
    last_query: Mutex<Option<Instant>>,
}

impl std::fmt::Debug for FactorDbClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorDbClient")
            .field("base_url", &self.base_url)
            .field("cache_dir", &self.cache_dir)
            .field("live", &self.live)
            .finish()
    }
}

impl FactorDbClient {
    /// `live = false` serves the cache only.
    pub fn new(base_url: impl Into<String>, cache_dir: Option<PathBuf>, live: bool) -> Self {
        FactorDbClient { base_url: base_url.into(), cache_dir, live, last_query: Mutex::new(None) }
    }

    /// Base URL and cache directory from the environment, live queries on.
    pub fn from_env() -> Self {
        let base = std::env::var(ENV_BASE_URL).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        let cache = std::env::var_os(ENV_CACHE_DIR).map(PathBuf::from);
        Self::new(base, cache, true)
    }

    pub fn cache_only(cache_dir: impl Into<PathBuf>) -> Self {
        Self::new(DEFAULT_BASE_URL, Some(cache_dir.into()), false)
    }

    pub fn cache_path(&self, n: &BigUint) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("{n}.json")))
    }

    pub fn lookup(&self, n: &BigUint) -> Result<DbResponse, DbError> {
        if let Some(body) = self.cached_body(n) {
            return parse_response(n, &body);
        }
        if !self.live {
            return Err(DbError::DbUnavailable(format!("{n} not in cache and live queries are off")));
        }
        let body = self.fetch(n)?;
        let resp = parse_response(n, &body)?;
        if let Some(path) = self.cache_path(n) {
            if let Err(e) = write_cache(&path, &self.base_url, &body) {
                warn!("could not write cache file {}: {e}", path.display());
            }
        }
        Ok(resp)
    }

    fn cached_body(&self, n: &BigUint) -> Option<String> {
        let text = fs::read_to_string(self.cache_path(n)?).ok()?;
        Some(strip_metadata(&text).to_string())
    }

    fn fetch(&self, n: &BigUint) -> Result<String, DbError> {
        {
            let mut last = self.last_query.lock().expect("rate limit lock");
            if let Some(t) = *last {
                let since = t.elapsed();
                if since < MIN_QUERY_INTERVAL {
                    std::thread::sleep(MIN_QUERY_INTERVAL - since);
                }
            }
            *last = Some(Instant::now());
        }
        info!("querying {} for a {}-bit number", self.base_url, n.bits());
        http_get(&self.base_url, &n.to_string())
    }
}

/// Drops the leading `#` metadata line, if any.
pub fn strip_metadata(text: &str) -> &str {
    if text.starts_with('#') {
        text.split_once('\n').map_or("", |(_, rest)| rest)
    } else {
        text
    }
}

fn write_cache(path: &Path, base_url: &str, body: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    fs::write(path, format!("# source={base_url} fetched_unix={stamp}\n{body}"))
}

#[cfg(feature = "network")]
fn http_get(base_url: &str, query: &str) -> Result<String, DbError> {
    let mut resp = ureq::get(base_url)
        .query("query", query)
        .call()
        .map_err(|e| DbError::DbUnavailable(e.to_string()))?;
    resp.body_mut().read_to_string().map_err(|e| DbError::DbUnavailable(e.to_string()))
}

#[cfg(not(feature = "network"))]
fn http_get(_base_url: &str, _query: &str) -> Result<String, DbError> {
    Err(DbError::DbUnavailable("built without the network feature".into()))
}
