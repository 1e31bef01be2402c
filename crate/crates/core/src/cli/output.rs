use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::torus::write_atomic;

/// Round-trip decimal with 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One-line `key=value` summary; values never contain spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    fields: Vec<(String, String)>,
}

impl Summary {
    pub fn new(status: &str, cmd: &str) -> Self {
        Summary {
            fields: vec![("status".into(), status.into()), ("cmd".into(), cmd.into())],
        }
    }

    pub fn set_status(&mut self, status: &str) {
        self.fields[0].1 = status.into();
    }

    pub fn status(&self) -> &str {
        &self.fields[0].1
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields
            .push((key.into(), value.to_string().replace(char::is_whitespace, "_")));
        self
    }

    pub fn push_float(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, float(value))
    }

    pub fn line(&self) -> String {
        self.fields
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// CSV text with a header row.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            text: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.text.as_bytes())
    }
}
