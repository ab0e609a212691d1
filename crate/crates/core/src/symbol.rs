//! Decoder outputs: messages, the rejection symbol, and the `same` marker.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitWord;
use crate::error::{Error, Result};

/// An element of `{0,1}^k ∪ {⊥, same}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Message(BitWord),
    Bottom,
    Same,
}

impl Symbol {
    pub fn is_bottom(&self) -> bool {
        matches!(self, Symbol::Bottom)
    }

    pub fn as_message(&self) -> Option<&BitWord> {
        match self {
            Symbol::Message(m) => Some(m),
            _ => None,
        }
    }

    /// JSON tag: `bottom`, `same`, or the message hex.
    pub fn tag(&self) -> String {
        match self {
            Symbol::Message(m) => m.to_hex(),
            Symbol::Bottom => "bottom".into(),
            Symbol::Same => "same".into(),
        }
    }

    pub fn from_tag(tag: &str, message_bits: usize) -> Result<Self> {
        match tag {
            "bottom" => Ok(Symbol::Bottom),
            "same" => Ok(Symbol::Same),
            hex => Ok(Symbol::Message(BitWord::from_hex(hex, message_bits)?)),
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Message(m) => write!(f, "Message({m})"),
            Symbol::Bottom => f.write_str("Bottom"),
            Symbol::Same => f.write_str("Same"),
        }
    }
}

/// `copy(x, y)`: `y` when `x` is `same`, otherwise `x`.
pub fn copy_symbol(x: &Symbol, y: &Symbol) -> Result<Symbol> {
    if *y == Symbol::Same {
        return Err(Error::SameAsFallback);
    }
    Ok(match x {
        Symbol::Same => y.clone(),
        other => other.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_rules() {
        let s = Symbol::Message(BitWord::from_u64(5, 4));
        let t = Symbol::Message(BitWord::from_u64(9, 4));
        assert_eq!(copy_symbol(&Symbol::Same, &s).unwrap(), s);
        assert_eq!(copy_symbol(&t, &s).unwrap(), t);
        assert_eq!(copy_symbol(&Symbol::Bottom, &s).unwrap(), Symbol::Bottom);
        assert_eq!(copy_symbol(&Symbol::Same, &Symbol::Bottom).unwrap(), Symbol::Bottom);
        assert!(matches!(
            copy_symbol(&Symbol::Same, &Symbol::Same),
            Err(Error::SameAsFallback)
        ));
    }

    #[test]
    fn tags_round_trip() {
        for sym in [
            Symbol::Bottom,
            Symbol::Same,
            Symbol::Message(BitWord::from_u64(0b1011, 4)),
        ] {
            assert_eq!(Symbol::from_tag(&sym.tag(), 4).unwrap(), sym);
        }
    }
}
