//! Handle-style persistent identifiers (`<prefix>/<suffix>`).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PidError {
    #[error("invalid prefix {0:?}: must be non-empty and contain no '/'")]
    InvalidPrefix(String),
    #[error("malformed pid {0:?}: expected <prefix>/<suffix> with both parts non-empty")]
    Malformed(String),
}

/// Persistent identifier of an ecosystem component. Immutable after minting.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pid(String);

impl Pid {
    /// Parses a `<prefix>/<suffix>` string. The prefix must not contain `/`;
    /// the suffix may (Handle suffixes are free-form).
    pub fn parse(s: &str) -> Result<Self, PidError> {
        let (prefix, suffix) = s
            .split_once('/')
            .ok_or_else(|| PidError::Malformed(s.to_string()))?;
        if prefix.is_empty() || suffix.is_empty() {
            return Err(PidError::Malformed(s.to_string()));
        }
        Ok(Pid(s.to_string()))
    }

    pub fn new(prefix: &str, suffix: &str) -> Result<Self, PidError> {
        if prefix.is_empty() || prefix.contains('/') {
            return Err(PidError::InvalidPrefix(prefix.to_string()));
        }
        if suffix.is_empty() {
            return Err(PidError::Malformed(format!("{prefix}/")));
        }
        Ok(Pid(format!("{prefix}/{suffix}")))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn prefix(&self) -> &str {
        self.0.split_once('/').map(|(p, _)| p).unwrap_or(&self.0)
    }

    pub fn suffix(&self) -> &str {
        self.0.split_once('/').map(|(_, s)| s).unwrap_or("")
    }
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Deterministic PID minter: a monotone suffix counter per prefix.
/// Same mint sequence always yields the same PIDs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PidMinter {
    counters: BTreeMap<String, u64>,
}

impl PidMinter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mint(&mut self, prefix: &str) -> Result<Pid, PidError> {
        if prefix.is_empty() || prefix.contains('/') {
            return Err(PidError::InvalidPrefix(prefix.to_string()));
        }
        let counter = self.counters.entry(prefix.to_string()).or_insert(0);
        *counter += 1;
        Pid::new(prefix, &format!("{:04}", counter))
    }

    /// Advances the counter for `prefix` past `suffix` if the suffix is a
    /// number the minter could have produced. Used when loading an existing
    /// ecosystem so subsequent mints stay unique.
    pub fn observe(&mut self, pid: &Pid) {
        if let Ok(n) = pid.suffix().parse::<u64>() {
            let counter = self.counters.entry(pid.prefix().to_string()).or_insert(0);
            if n > *counter {
                *counter = n;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_mint_is_0001() {
        let mut minter = PidMinter::new();
        assert_eq!(minter.mint("21.T").unwrap().as_str(), "21.T/0001");
    }

    #[test]
    fn mints_are_distinct() {
        let mut minter = PidMinter::new();
        let a = minter.mint("21.T").unwrap();
        let b = minter.mint("21.T").unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn slash_in_prefix_rejected() {
        let mut minter = PidMinter::new();
        assert_eq!(
            minter.mint("a/b"),
            Err(PidError::InvalidPrefix("a/b".to_string()))
        );
    }

    #[test]
    fn parse_rejects_missing_parts() {
        assert!(Pid::parse("noslash").is_err());
        assert!(Pid::parse("/x").is_err());
        assert!(Pid::parse("x/").is_err());
        assert!(Pid::parse("a/b/c").is_ok());
    }

    #[test]
    fn observe_keeps_uniqueness() {
        let mut minter = PidMinter::new();
        minter.observe(&Pid::parse("21.T/0007").unwrap());
        assert_eq!(minter.mint("21.T").unwrap().as_str(), "21.T/0008");
    }
}
