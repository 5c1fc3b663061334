//! Hierarchical content names. The canonical text form is the components
//! joined with '/' behind a leading '/', no trailing slash; that exact byte
//! string is also what gets hashed into Bloom filters, so it must round-trip
//! through parsing unchanged.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NameError {
    #[error("name must start with '/'")]
    MissingLeadingSlash,
    #[error("name must have at least one component")]
    Empty,
    #[error("empty component at index {0}")]
    EmptyComponent(usize),
}

/// An ordered list of non-empty components, e.g. `/ch/unibe/v1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    components: Vec<String>,
}

impl Name {
    pub fn parse(text: &str) -> Result<Self, NameError> {
        let rest = text.strip_prefix('/').ok_or(NameError::MissingLeadingSlash)?;
        if rest.is_empty() {
            return Err(NameError::Empty);
        }
        let mut components = Vec::new();
        for (i, part) in rest.split('/').enumerate() {
            if part.is_empty() {
                return Err(NameError::EmptyComponent(i));
            }
            components.push(part.to_string());
        }
        Ok(Name { components })
    }

    pub fn from_components<I, S>(parts: I) -> Result<Self, NameError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let components: Vec<String> = parts.into_iter().map(Into::into).collect();
        if components.is_empty() {
            return Err(NameError::Empty);
        }
        if let Some(i) = components.iter().position(String::is_empty) {
            return Err(NameError::EmptyComponent(i));
        }
        Ok(Name { components })
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least one component
    }

    /// Canonical text form; these exact bytes feed the filter hashes.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        for c in &self.components {
            s.push('/');
            s.push_str(c);
        }
        s
    }

    /// All prefixes from shortest to longest; the last element is the name
    /// itself, so the list length equals the component count.
    pub fn prefixes(&self) -> Vec<Name> {
        (1..=self.components.len())
            .map(|n| Name { components: self.components[..n].to_vec() })
            .collect()
    }

    /// Componentwise prefix test; `/a` is not a prefix of `/ab`.
    pub fn is_prefix_of(&self, other: &Name) -> bool {
        self.components.len() <= other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a == b)
    }

    pub fn child(&self, component: impl Into<String>) -> Name {
        let mut components = self.components.clone();
        components.push(component.into());
        Name { components }
    }

    pub fn parent(&self) -> Option<Name> {
        if self.components.len() <= 1 {
            return None;
        }
        Some(Name { components: self.components[..self.components.len() - 1].to_vec() })
    }

    /// Strips a trailing segment component (`s<digits>`) if present. FIB
    /// entries are learned and installed at this granularity.
    pub fn file_level(&self) -> Name {
        if self.components.len() > 1 {
            if let Some(last) = self.components.last() {
                if is_segment_component(last) {
                    return self.parent().expect("len > 1");
                }
            }
        }
        self.clone()
    }

    pub fn segment_index(&self) -> Option<u32> {
        self.components
            .last()
            .and_then(|c| c.strip_prefix('s'))
            .and_then(|digits| {
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    None
                } else {
                    digits.parse().ok()
                }
            })
    }
}

fn is_segment_component(c: &str) -> bool {
    c.len() > 1 && c.starts_with('s') && c[1..].bytes().all(|b| b.is_ascii_digit())
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical())
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_canonical())
    }
}

impl<'de> Deserialize<'de> for Name {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Name::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A file plus a segment index within it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FileId {
    pub file: Name,
    pub segment_index: u32,
}

impl FileId {
    pub fn new(file: Name, segment_index: u32) -> Self {
        FileId { file, segment_index }
    }

    /// The file name with one appended component `s<index>`. Because the
    /// file name is a prefix of every segment name, a file-level
    /// advertisement covers all of the file's segment Interests.
    pub fn segment_name(&self) -> Name {
        self.file.child(format!("s{}", self.segment_index))
    }
}
