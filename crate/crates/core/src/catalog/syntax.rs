//! `name(key=value, ...)` terms used by scenario values.

use std::fmt;

/// A parsed `name(key=value, ...)` term. Values are kept as text; vectors
/// are written `[a,b,...]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub name: String,
    pub args: Vec<(String, String)>,
}

impl Term {
    pub fn parse(text: &str) -> Result<Term, String> {
        let text = text.trim();
        let Some(open) = text.find('(') else {
            if text.is_empty() || !text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(format!("malformed term `{text}`"));
            }
            return Ok(Term {
                name: text.to_string(),
                args: Vec::new(),
            });
        };
        if !text.ends_with(')') {
            return Err(format!("missing `)` in `{text}`"));
        }
        let name = text[..open].trim().to_string();
        let body = &text[open + 1..text.len() - 1];
        let mut args = Vec::new();
        for part in split_top(body) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("argument `{part}` is not key=value"))?;
            let k = k.trim().to_string();
            if args.iter().any(|(a, _): &(String, String)| *a == k) {
                return Err(format!("argument `{k}` given twice"));
            }
            args.push((k, v.trim().to_string()));
        }
        Ok(Term { name, args })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.args.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Errors on any argument outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<(), String> {
        match self.args.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(format!("`{}` takes no argument `{k}`", self.name)),
            None => Ok(()),
        }
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, String> {
        self.get(key).map(parse_number).transpose()
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64, String> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn required(&self, key: &str) -> Result<f64, String> {
        self.number(key)?
            .ok_or_else(|| format!("`{}` needs `{key}`", self.name))
    }

    pub fn count_or(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("`{key}` = `{v}` is not a count")),
        }
    }

    pub fn vector(&self, key: &str) -> Result<Option<Vec<f64>>, String> {
        self.get(key).map(parse_vector).transpose()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, (k, v)) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str(")")
    }
}

/// Splits on commas outside brackets and parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(v)
}

pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| format!("`{s}` is not a vector [a,b,...]"))?;
    inner.split(',').map(parse_number).collect()
}

pub fn format_vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}
