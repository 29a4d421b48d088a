use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Identifier of a message: a plain message `j` or the stripe `j.pk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageId {
    pub base: u32,
    pub part: Option<u32>,
}

impl MessageId {
    pub const fn plain(base: u32) -> Self {
        MessageId { base, part: None }
    }

    pub const fn stripe(base: u32, part: u32) -> Self {
        MessageId {
            base,
            part: Some(part),
        }
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.part {
            None => write!(f, "{}", self.base),
            Some(p) => write!(f, "{}.p{}", self.base, p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid message id `{0}` (expected `j` or `j.pk`)")]
pub struct ParseMessageIdError(pub String);

impl FromStr for MessageId {
    type Err = ParseMessageIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMessageIdError(s.to_string());
        let s = s.trim();
        let positive = |t: &str| t.parse::<u32>().ok().filter(|v| *v > 0);
        match s.split_once('.') {
            None => positive(s).map(MessageId::plain).ok_or_else(err),
            Some((base, part)) => {
                let base = positive(base).ok_or_else(err)?;
                let part = part.strip_prefix('p').and_then(positive).ok_or_else(err)?;
                Ok(MessageId::stripe(base, part))
            }
        }
    }
}

impl Serialize for MessageId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.part {
            None => serializer.serialize_u32(self.base),
            Some(_) => serializer.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for MessageId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u32),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(0) => Err(serde::de::Error::custom("message ids are 1-based")),
            Repr::Num(n) => Ok(MessageId::plain(n)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

macro_rules! bitset {
    ($(#[$meta:meta])* $name:ident, $repr:ty) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        pub struct $name(pub $repr);

        impl $name {
            pub const CAPACITY: usize = <$repr>::BITS as usize;

            pub const fn empty() -> Self {
                $name(0)
            }

            pub fn singleton(index: usize) -> Self {
                $name(1 << index)
            }

            /// `{0, .., n-1}`
            pub fn full(n: usize) -> Self {
                if n >= Self::CAPACITY {
                    $name(<$repr>::MAX)
                } else {
                    $name((1 << n) - 1)
                }
            }

            pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
                indices.into_iter().fold(Self::empty(), |s, i| s.with(i))
            }

            pub fn with(self, index: usize) -> Self {
                $name(self.0 | (1 << index))
            }

            pub fn contains(self, index: usize) -> bool {
                index < Self::CAPACITY && self.0 >> index & 1 == 1
            }

            pub fn is_empty(self) -> bool {
                self.0 == 0
            }

            pub fn len(self) -> usize {
                self.0.count_ones() as usize
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            pub fn intersects(self, other: Self) -> bool {
                self.0 & other.0 != 0
            }

            pub fn union(self, other: Self) -> Self {
                $name(self.0 | other.0)
            }

            pub fn intersection(self, other: Self) -> Self {
                $name(self.0 & other.0)
            }

            pub fn difference(self, other: Self) -> Self {
                $name(self.0 & !other.0)
            }

            pub fn iter(self) -> impl Iterator<Item = usize> {
                let bits = self.0;
                (0..Self::CAPACITY).filter(move |i| bits >> i & 1 == 1)
            }

            /// Nonempty subsets, in increasing bit-pattern order.
            pub fn nonempty_subsets(self) -> impl Iterator<Item = Self> {
                let mask = self.0;
                let mut sub: $repr = 0;
                let mut done = mask == 0;
                std::iter::from_fn(move || {
                    if done {
                        return None;
                    }
                    sub = sub.wrapping_sub(mask) & mask;
                    if sub == mask {
                        done = true;
                    }
                    Some($name(sub))
                })
            }

            /// All subsets including the empty set.
            pub fn subsets(self) -> impl Iterator<Item = Self> {
                std::iter::once(Self::empty()).chain(self.nonempty_subsets())
            }
        }
    };
}

bitset!(
    /// Set of message positions within an instance's message universe.
    MessageSet,
    u64
);
bitset!(
    /// Set of source positions (0-based; rendered 1-based).
    SourceSet,
    u32
);
