//! Flat `key = value` documents with line-anchored diagnostics.
//!
//! The syntax is the flat subset of TOML (scalars, strings and nested
//! arrays); tables are rejected so every key maps to one source line.

use std::collections::BTreeMap;

use toml::{Spanned, Value};

/// One diagnostic, anchored to a 1-based source line when known.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: Value,
    pub line: Option<usize>,
}

/// Parsed document; keys are consumed by the `take_*` accessors so leftover
/// keys can be reported as unknown.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDoc {
    entries: BTreeMap<String, Entry>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl KvDoc {
    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        let raw: BTreeMap<Spanned<String>, Spanned<Value>> = match toml::from_str(text) {
            Ok(raw) => raw,
            Err(e) => {
                let line = e.span().map(|s| line_of(text, s.start));
                return Err(vec![Diagnostic {
                    line,
                    message: e.message().trim().to_string(),
                }]);
            }
        };
        let mut entries = BTreeMap::new();
        let mut diags = Vec::new();
        for (key, value) in raw {
            let line = Some(line_of(text, key.span().start));
            let value = value.into_inner();
            if matches!(value, Value::Table(_)) {
                diags.push(Diagnostic {
                    line,
                    message: format!("`{}`: nested tables are not supported", key.get_ref()),
                });
                continue;
            }
            entries.insert(key.into_inner(), Entry { value, line });
        }
        if diags.is_empty() {
            Ok(Self { entries })
        } else {
            Err(diags)
        }
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        self.entries.insert(key.to_string(), Entry { value, line: None });
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).and_then(|e| e.line)
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    /// Diagnostics for every key that was never consumed.
    pub fn unknown_keys(&self) -> Vec<Diagnostic> {
        self.entries
            .iter()
            .map(|(k, e)| Diagnostic {
                line: e.line,
                message: format!("unknown key: {k}"),
            })
            .collect()
    }
}

/// Typed accessors used by every consumer of a [`KvDoc`].
pub struct Reader<'a> {
    pub doc: &'a mut KvDoc,
    pub diags: Vec<Diagnostic>,
}

impl<'a> Reader<'a> {
    pub fn new(doc: &'a mut KvDoc) -> Self {
        Self {
            doc,
            diags: Vec::new(),
        }
    }

    pub fn error(&mut self, line: Option<usize>, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            line,
            message: message.into(),
        });
    }

    fn required(&mut self, key: &str) -> Option<Entry> {
        let entry = self.doc.take(key);
        if entry.is_none() {
            self.error(None, format!("missing key: {key}"));
        }
        entry
    }

    pub fn f64_opt(&mut self, key: &str) -> Option<f64> {
        let entry = self.doc.take(key)?;
        match as_f64(&entry.value) {
            Some(v) => Some(v),
            None => {
                self.error(entry.line, format!("`{key}` must be a number"));
                None
            }
        }
    }

    pub fn f64_req(&mut self, key: &str) -> Option<f64> {
        if !self.doc.contains(key) {
            self.required(key);
            return None;
        }
        self.f64_opt(key)
    }

    pub fn int_opt(&mut self, key: &str) -> Option<i64> {
        let entry = self.doc.take(key)?;
        match entry.value {
            Value::Integer(i) => Some(i),
            _ => {
                self.error(entry.line, format!("`{key}` must be an integer"));
                None
            }
        }
    }

    pub fn int_req(&mut self, key: &str) -> Option<i64> {
        if !self.doc.contains(key) {
            self.required(key);
            return None;
        }
        self.int_opt(key)
    }

    pub fn usize_req(&mut self, key: &str) -> Option<usize> {
        let line = self.doc.line(key);
        let v = self.int_req(key)?;
        if v < 0 {
            self.error(line, format!("`{key}` must be non-negative"));
            return None;
        }
        Some(v as usize)
    }

    pub fn str_opt(&mut self, key: &str) -> Option<String> {
        let entry = self.doc.take(key)?;
        match entry.value {
            Value::String(s) => Some(s),
            _ => {
                self.error(entry.line, format!("`{key}` must be a string"));
                None
            }
        }
    }

    pub fn str_req(&mut self, key: &str) -> Option<String> {
        if !self.doc.contains(key) {
            self.required(key);
            return None;
        }
        self.str_opt(key)
    }

    pub fn bool_opt(&mut self, key: &str) -> Option<bool> {
        let entry = self.doc.take(key)?;
        match entry.value {
            Value::Boolean(b) => Some(b),
            _ => {
                self.error(entry.line, format!("`{key}` must be true or false"));
                None
            }
        }
    }

    /// Numeric array, flattened row-major whatever its nesting.
    pub fn flat_array_opt(&mut self, key: &str) -> Option<(Vec<f64>, Option<usize>)> {
        let entry = self.doc.take(key)?;
        let mut out = Vec::new();
        if flatten(&entry.value, &mut out) {
            Some((out, entry.line))
        } else {
            self.error(entry.line, format!("`{key}` must be a (nested) array of numbers"));
            None
        }
    }

    pub fn flat_array_req(&mut self, key: &str) -> Option<(Vec<f64>, Option<usize>)> {
        if !self.doc.contains(key) {
            self.required(key);
            return None;
        }
        self.flat_array_opt(key)
    }

    pub fn finish(mut self) -> Vec<Diagnostic> {
        let unknown = self.doc.unknown_keys();
        self.diags.extend(unknown);
        self.diags
    }
}

pub fn as_f64(value: &Value) -> Option<f64> {
    match value {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn flatten(value: &Value, out: &mut Vec<f64>) -> bool {
    match value {
        Value::Array(items) => items.iter().all(|v| flatten(v, out)),
        other => match as_f64(other) {
            Some(v) => {
                out.push(v);
                true
            }
            None => false,
        },
    }
}
