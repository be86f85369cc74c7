//! Text form of words: `w := atom ('*' atom)*` with
//! `atom := IDENT | IDENT '^-1' | 'x' INT | 'x' INT '^-1'`.
//!
//! Identifiers resolve against a [`ConstantTable`]; `1` and `I` denote the
//! identity unless the table defines them. Adjacent constants multiply, and
//! omitted boundary constants are the identity.

use crate::error::{Error, Result};
use crate::io::ConstantTable;
use crate::linalg::Matrix;

use super::{Letter, Word};

enum Atom {
    Var(Letter),
    Const(Matrix),
}

fn parse_atom(token: &str, table: &ConstantTable) -> Result<Atom> {
    let (name, inverted) = match token.strip_suffix("^-1") {
        Some(base) => (base.trim_end(), true),
        None => (token, false),
    };
    if name.is_empty() {
        return Err(Error::Parse(format!("empty atom in {token:?}")));
    }
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(Error::Parse(format!("bad atom {token:?}")));
    }
    if let Some(digits) = name.strip_prefix('x') {
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            let var: usize = digits.parse().map_err(|_| Error::Parse(format!("bad index in {token:?}")))?;
            if var == 0 {
                return Err(Error::Parse("variables are numbered from x1".into()));
            }
            return Ok(Atom::Var(Letter::new(var, if inverted { -1 } else { 1 })));
        }
    }
    let m = match table.constants.get(name) {
        Some(m) => m.clone(),
        None if name == "1" || name == "I" => Matrix::identity(&table.field, table.n),
        None => return Err(Error::Parse(format!("unknown constant {name:?}"))),
    };
    if inverted {
        Ok(Atom::Const(m.inverse().map_err(|_| Error::NotInvertible)?))
    } else {
        Ok(Atom::Const(m))
    }
}

/// Parse a word; `r` defaults to the largest variable index used.
pub fn parse_word(text: &str, table: &ConstantTable, r: Option<usize>) -> Result<Word> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty word".into()));
    }
    let mut letters = Vec::new();
    let mut constants = vec![Matrix::identity(&table.field, table.n)];
    for token in text.split('*') {
        match parse_atom(token.trim(), table)? {
            Atom::Var(l) => {
                letters.push(l);
                constants.push(Matrix::identity(&table.field, table.n));
            }
            Atom::Const(m) => {
                let last = constants.last_mut().expect("nonempty");
                *last = last.try_mul(&m)?;
            }
        }
    }
    let used = letters.iter().map(|l| l.var).max().unwrap_or(0);
    let r = match r {
        Some(r) if r < used => {
            return Err(Error::Validation(format!("word uses x{used} but r = {r}")));
        }
        Some(r) => r,
        None => used,
    };
    Word::new(&table.field, table.n, r, letters, constants)
}

/// Text and constants table that parse back to `w`; non-identity constants
/// are named `c0`, `c1`, ... by position.
pub fn to_text(w: &Word) -> (String, ConstantTable) {
    let mut table = ConstantTable::empty(w.field(), w.n());
    for (j, c) in w.constants().iter().enumerate() {
        if !c.is_identity() {
            table.insert(&format!("c{j}"), c.clone());
        }
    }
    (w.to_string(), table)
}
