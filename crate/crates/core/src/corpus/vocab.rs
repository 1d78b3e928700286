use std::collections::HashMap;

use super::CorpusError;

/// Ordered set of unique tokens with O(1) reverse lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary from a list of tokens, rejecting duplicates and
    /// tokens that are empty or contain whitespace.
    pub fn from_entries<I, S>(entries: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self::new();
        for entry in entries {
            let entry = entry.into();
            if vocab.contains(&entry) {
                return Err(CorpusError::DuplicateToken(entry));
            }
            vocab.insert(entry)?;
        }
        Ok(vocab)
    }

    /// Inserts `token` if absent and returns its index.
    pub fn insert(&mut self, token: impl Into<String>) -> Result<usize, CorpusError> {
        let token = token.into();
        if let Some(&i) = self.index.get(&token) {
            return Ok(i);
        }
        validate_token(&token)?;
        let i = self.entries.len();
        self.index.insert(token.clone(), i);
        self.entries.push(token);
        Ok(i)
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, i: usize) -> &str {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.as_str()))
    }
}

fn validate_token(token: &str) -> Result<(), CorpusError> {
    if token.is_empty() || token.chars().any(char::is_whitespace) {
        return Err(CorpusError::InvalidToken(token.to_string()));
    }
    Ok(())
}
