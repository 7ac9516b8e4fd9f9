use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Identifier of an index element.
///
/// Keys have a textual form used in documents and reports: natural numbers
/// print as digits, labels as themselves, pairs as `(a,b)` and finite sets
/// as `{a,b,c}`. Parsing inverts [`fmt::Display`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Key {
    Nat(u64),
    Label(String),
    Pair(Box<Key>, Box<Key>),
    /// Members sorted by `Ord`, no duplicates.
    Set(Vec<Key>),
}

impl Key {
    pub fn nat(n: u64) -> Key {
        Key::Nat(n)
    }

    pub fn label(s: impl Into<String>) -> Key {
        Key::Label(s.into())
    }

    pub fn pair(a: Key, b: Key) -> Key {
        Key::Pair(Box::new(a), Box::new(b))
    }

    pub fn set(members: impl IntoIterator<Item = Key>) -> Key {
        let mut v: Vec<Key> = members.into_iter().collect();
        v.sort();
        v.dedup();
        Key::Set(v)
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Key::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Key, &Key)> {
        match self {
            Key::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&[Key]> {
        match self {
            Key::Set(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Nat(n) => write!(f, "{n}"),
            Key::Label(s) => f.write_str(s),
            Key::Pair(a, b) => write!(f, "({a},{b})"),
            Key::Set(v) => {
                f.write_str("{")?;
                for (i, k) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{k}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid key {input:?} at byte {pos}: {msg}")]
pub struct KeyParseError {
    pub input: String,
    pub pos: usize,
    pub msg: &'static str,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &'static str) -> KeyParseError {
        KeyParseError {
            input: self.src.to_string(),
            pos: self.pos,
            msg,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<(), KeyParseError> {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            Ok(())
        } else {
            Err(self.err("unexpected character"))
        }
    }

    fn key(&mut self) -> Result<Key, KeyParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let a = self.key()?;
                self.expect(',')?;
                let b = self.key()?;
                self.expect(')')?;
                Ok(Key::pair(a, b))
            }
            Some('{') => {
                self.pos += 1;
                let mut members = Vec::new();
                self.skip_ws();
                if self.peek() == Some('}') {
                    self.pos += 1;
                    return Ok(Key::Set(members));
                }
                loop {
                    members.push(self.key()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some('}') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("expected ',' or '}'")),
                    }
                }
                Ok(Key::set(members))
            }
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || "(){},".contains(c) {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                let atom = &self.src[start..self.pos];
                if atom.is_empty() {
                    return Err(self.err("empty atom"));
                }
                if atom.bytes().all(|b| b.is_ascii_digit()) {
                    atom.parse::<u64>()
                        .map(Key::Nat)
                        .map_err(|_| self.err("natural number out of range"))
                } else {
                    Ok(Key::Label(atom.to_string()))
                }
            }
            None => Err(self.err("unexpected end of input")),
        }
    }
}

impl FromStr for Key {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let k = p.key()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(k)
    }
}

impl Serialize for Key {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Key {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_each_form() {
        assert_eq!("7".parse::<Key>().unwrap(), Key::Nat(7));
        assert_eq!("a".parse::<Key>().unwrap(), Key::label("a"));
        assert_eq!(
            "(1, b)".parse::<Key>().unwrap(),
            Key::pair(Key::Nat(1), Key::label("b"))
        );
        assert_eq!(
            "{3,0}".parse::<Key>().unwrap(),
            Key::set([Key::Nat(0), Key::Nat(3)])
        );
        assert!("(1,".parse::<Key>().is_err());
        assert!("1 2".parse::<Key>().is_err());
    }

    fn arb_key() -> impl Strategy<Value = Key> {
        let leaf = prop_oneof![
            (0u64..1000).prop_map(Key::Nat),
            "[a-z][a-z0-9_]{0,4}".prop_map(Key::Label),
        ];
        leaf.prop_recursive(3, 16, 4, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Key::pair(a, b)),
                proptest::collection::vec(inner, 0..4).prop_map(Key::set),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(k in arb_key()) {
            let text = k.to_string();
            prop_assert_eq!(text.parse::<Key>().unwrap(), k);
        }
    }
}
