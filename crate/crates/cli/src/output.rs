//! CSV writing with a `#` metadata header.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::CliError;

/// C `printf("%.12e")`: at least two exponent digits, explicit exponent sign.
pub fn fmt_e12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[derive(Debug, Clone, Copy)]
pub enum Field {
    Int(u64),
    Float(f64),
}

pub struct Csv {
    buf: String,
}

impl Csv {
    /// Starts a file with the metadata block and the column header.
    pub fn new(command: &str, echo: &[(String, String)], notes: &[&str], columns: &[&str]) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# kicktop {} {command}", env!("CARGO_PKG_VERSION"));
        for (k, v) in echo {
            let _ = writeln!(buf, "# config {k}={v}");
        }
        for n in notes {
            let _ = writeln!(buf, "# {n}");
        }
        let _ = writeln!(buf, "{}", columns.join(","));
        Csv { buf }
    }

    /// Rows only, for blocks merged into a document later.
    pub fn bare() -> Self {
        Csv { buf: String::new() }
    }

    pub fn row(&mut self, fields: &[Field]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match *f {
                Field::Int(n) => {
                    let _ = write!(self.buf, "{n}");
                }
                Field::Float(x) => self.buf.push_str(&fmt_e12(x)),
            }
        }
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }

    /// Appends pre-rendered rows.
    pub fn extend(&mut self, rows: &str) {
        self.buf.push_str(rows);
    }

    pub fn finish(self, out: Option<&Path>) -> Result<(), CliError> {
        emit(&self.buf, out)
    }
}

/// Writes the whole document to `out`, or to stdout.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(format!("cannot write output: {e}"))),
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                if !dir.is_dir() {
                    return Err(CliError::usage(format!("output directory {} does not exist", dir.display())));
                }
            }
            std::fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
        }
    }
}

/// Conventions recorded in every output.
pub const CONVENTIONS: [&str; 3] = [
    "units: entropies and discord in nats (natural logarithm)",
    "basis: Dicke |j, j-n> for n = 0..2j (m descending); two-qubit states over |11>,|10>,|01>,|00>",
    "discord: projective measurement on the first qubit of the pair",
];
