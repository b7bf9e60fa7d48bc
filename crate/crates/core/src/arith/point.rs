use std::fmt;

use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// A point of P^1 over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    Finite(Rational),
    Infinity,
}

impl ProjPoint {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ProjPoint::Finite(r) => Some(r),
            ProjPoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(ProjPoint::Infinity),
            other => parse_rational(other)
                .map(ProjPoint::Finite)
                .map_err(|_| Error::Parse(format!("malformed point {other:?}"))),
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(r) => write!(f, "{}", format_rational(r)),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl From<Rational> for ProjPoint {
    fn from(r: Rational) -> Self {
        ProjPoint::Finite(r)
    }
}
