use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The matrix groups the tools work in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearGroup {
    Gl,
    Sl,
    Psl,
}

impl fmt::Display for LinearGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinearGroup::Gl => "gl",
            LinearGroup::Sl => "sl",
            LinearGroup::Psl => "psl",
        })
    }
}

impl FromStr for LinearGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(LinearGroup::Gl),
            "sl" => Ok(LinearGroup::Sl),
            "psl" => Ok(LinearGroup::Psl),
            other => Err(Error::Parse(format!("unknown group {other:?}"))),
        }
    }
}
