//! Line-oriented `key = value` key files. Plain text keeps the files
//! diffable; entries stay ordered so parse -> serialize round-trips
//! byte-identically.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyFileError {
    #[error("line {0} is not of the form 'key = value'")]
    MalformedLine(usize),
    #[error("missing field '{0}'")]
    MissingField(String),
    #[error("field '{field}' holds '{value}', not a decimal integer")]
    BadInteger { field: String, value: String },
    #[error("duplicate field '{0}'")]
    DuplicateField(String),
}

pub type Result<T> = std::result::Result<T, KeyFileError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyFile {
    entries: Vec<(String, String)>,
}

impl KeyFile {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| KeyFileError::MissingField(key.to_string()))
    }

    pub fn get_nat(&self, key: &str) -> Result<BigUint> {
        let value = self.get(key)?;
        value
            .parse::<BigUint>()
            .map_err(|_| KeyFileError::BadInteger {
                field: key.to_string(),
                value: value.to_string(),
            })
    }

    pub fn scheme(&self) -> Result<&str> {
        self.get("scheme")
    }

    pub fn visibility(&self) -> Result<&str> {
        self.get("visibility")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(" = ")
                .ok_or(KeyFileError::MalformedLine(i + 1))?;
            if key.is_empty() || key.contains(' ') {
                return Err(KeyFileError::MalformedLine(i + 1));
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(KeyFileError::DuplicateField(key.to_string()));
            }
            entries.push((key.to_string(), value.to_string()));
        }
        Ok(Self { entries })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

impl Default for KeyFile {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_serialize_identity() {
        let text = "scheme = u3\nvisibility = public\nn = 81\ng = 50\nB = 5\n";
        let kf = KeyFile::parse(text).unwrap();
        assert_eq!(kf.serialize(), text);
        assert_eq!(kf.scheme().unwrap(), "u3");
        assert_eq!(kf.get_nat("n").unwrap(), BigUint::from(81u32));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert_eq!(
            KeyFile::parse("scheme=u3"),
            Err(KeyFileError::MalformedLine(1))
        );
        assert_eq!(
            KeyFile::parse("n = 1\nn = 2\n"),
            Err(KeyFileError::DuplicateField("n".into()))
        );
    }

    #[test]
    fn missing_and_bad_fields() {
        let kf = KeyFile::parse("scheme = u3\nn = abc\n").unwrap();
        assert!(matches!(kf.get("g"), Err(KeyFileError::MissingField(_))));
        assert!(matches!(
            kf.get_nat("n"),
            Err(KeyFileError::BadInteger { .. })
        ));
    }
}
