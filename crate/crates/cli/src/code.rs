//! Code selection from the command line.
//!
//! `mdpc:N:M` and `rs:S:K:R` name a fixed code (K and R in symbols). In
//! optimizer mode the free parameter is dropped: `mdpc:N` and `rs:S:R`.

use std::fmt;
use std::str::FromStr;

use thz_fec_core::sim::Codec;
use thz_fec_core::{Field, MdpcCode, RsCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeSpec {
    Mdpc { n: u32, m: Option<u64> },
    Rs { s: u32, k: Option<u64>, r: u64 },
}

#[derive(Debug, thiserror::Error)]
pub enum CodeError {
    #[error("cannot parse code '{0}': expected mdpc:N:M, rs:S:K:R, mdpc:N or rs:S:R")]
    Syntax(String),
    #[error("code '{0}' has no free parameter to optimize; use mdpc:N or rs:S:R")]
    Fixed(CodeSpec),
    #[error("code '{0}' needs all parameters unless --optimize is given")]
    Partial(CodeSpec),
    #[error(transparent)]
    Rs(#[from] thz_fec_core::RsError),
    #[error(transparent)]
    Mdpc(#[from] thz_fec_core::MdpcError),
    #[error(transparent)]
    Field(#[from] thz_fec_core::FieldError),
}

impl FromStr for CodeSpec {
    type Err = CodeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = || CodeError::Syntax(text.into());
        let mut parts = text.split(':');
        let kind = parts.next().unwrap_or("").to_ascii_lowercase();
        let nums = parts.map(|p| p.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
        let small = |v: u64| u32::try_from(v).map_err(|_| bad());
        match (kind.as_str(), nums.as_slice()) {
            ("mdpc", &[n]) => Ok(CodeSpec::Mdpc { n: small(n)?, m: None }),
            ("mdpc", &[n, m]) => Ok(CodeSpec::Mdpc { n: small(n)?, m: Some(m) }),
            ("rs", &[s, r]) => Ok(CodeSpec::Rs { s: small(s)?, k: None, r }),
            ("rs", &[s, k, r]) => Ok(CodeSpec::Rs { s: small(s)?, k: Some(k), r }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CodeSpec::Mdpc { n, m: Some(m) } => write!(f, "mdpc:{n}:{m}"),
            CodeSpec::Mdpc { n, m: None } => write!(f, "mdpc:{n}"),
            CodeSpec::Rs { s, k: Some(k), r } => write!(f, "rs:{s}:{k}:{r}"),
            CodeSpec::Rs { s, k: None, r } => write!(f, "rs:{s}:{r}"),
        }
    }
}

impl CodeSpec {
    pub fn is_complete(&self) -> bool {
        matches!(self, CodeSpec::Mdpc { m: Some(_), .. } | CodeSpec::Rs { k: Some(_), .. })
    }

    /// Builds the codec for a complete spec.
    pub fn build(&self) -> Result<Codec, CodeError> {
        match *self {
            CodeSpec::Mdpc { n, m: Some(m) } => {
                let m = usize::try_from(m).map_err(|_| CodeError::Syntax(self.to_string()))?;
                Ok(Codec::Mdpc(MdpcCode::new(n, m)?))
            }
            CodeSpec::Rs { s, k: Some(k), r } => {
                let k = usize::try_from(k).map_err(|_| CodeError::Syntax(self.to_string()))?;
                let r = usize::try_from(r).map_err(|_| CodeError::Syntax(self.to_string()))?;
                Ok(Codec::Rs(RsCode::new(Field::with_default_poly(s)?, k, r)?))
            }
            _ => Err(CodeError::Partial(*self)),
        }
    }

    /// The same family with the free parameter set, e.g. after optimizing.
    pub fn with_param(&self, param: u64) -> Self {
        match *self {
            CodeSpec::Mdpc { n, .. } => CodeSpec::Mdpc { n, m: Some(param) },
            CodeSpec::Rs { s, r, .. } => CodeSpec::Rs { s, k: Some(param), r },
        }
    }
}
