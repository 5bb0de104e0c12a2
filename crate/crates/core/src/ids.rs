//! Interned identifiers for papers, authors, and topic keywords.
//!
//! All cross-references inside the corpus use dense `u32` indices so the
//! citation graph and author index stay cache-friendly at large paper counts.

use std::collections::HashMap;

macro_rules! idx_newtype {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn usize(self) -> usize {
                self.0 as usize
            }
        }
    };
}

idx_newtype!(PaperIdx);
idx_newtype!(AuthorIdx);
idx_newtype!(KeywordIdx);

/// String interner with stable, insertion-ordered indices.
#[derive(Debug, Clone, Default)]
pub struct Interner {
    strings: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, s: &str) -> u32 {
        if let Some(&i) = self.lookup.get(s) {
            return i;
        }
        let i = self.strings.len() as u32;
        self.strings.push(s.to_string());
        self.lookup.insert(s.to_string(), i);
        i
    }

    pub fn get(&self, s: &str) -> Option<u32> {
        self.lookup.get(s).copied()
    }

    pub fn resolve(&self, i: u32) -> &str {
        &self.strings[i as usize]
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.strings
            .iter()
            .enumerate()
            .map(|(i, s)| (i as u32, s.as_str()))
    }

    /// Rebuild from an ordered string list (snapshot load path).
    pub fn from_vec(strings: Vec<String>) -> Self {
        let lookup = strings
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        Interner { strings, lookup }
    }

    pub fn as_slice(&self) -> &[String] {
        &self.strings
    }
}
