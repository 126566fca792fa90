//! Secret key material and its text file format.
//!
//! A key file holds one `name=value` pair per line. The names are exactly
//! `p`, `q`, `n` (integers) and `x0`, `y0`, `z0`, `c` (decimal reals). Lines
//! starting with `#` and blank lines are ignored.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::keystream::{ChenState, CHEN_C_MAX, CHEN_C_MIN};

#[derive(Debug, Error, PartialEq)]
pub enum KeyError {
    #[error("cat map parameter {0} must be at least 1")]
    ZeroCatParameter(&'static str),
    #[error("iteration count n must be at least 1")]
    ZeroIterations,
    #[error("Chen parameter c is outside [20, 28.4]")]
    ChenParameterOutOfRange,
    #[error("initial value {0} is not finite")]
    NonFiniteInitial(&'static str),
    #[error("line {line}: expected name=value")]
    MalformedLine { line: usize },
    #[error("line {line}: unknown key field {name:?}")]
    UnknownField { line: usize, name: String },
    #[error("line {line}: field {name} given twice")]
    DuplicateField { line: usize, name: &'static str },
    #[error("line {line}: field {name} has an unparsable value")]
    BadValue { line: usize, name: &'static str },
    #[error("missing key field {0}")]
    MissingField(&'static str),
    #[error("cannot read key file: {0}")]
    Io(String),
}

/// Cat map parameters `(p, q, n)` plus Chen initial values and `c`.
///
/// `Debug` is redacted so the key cannot leak through logs or error chains.
#[derive(Clone, PartialEq)]
pub struct SecretKey {
    p: u64,
    q: u64,
    n: u64,
    x0: f64,
    y0: f64,
    z0: f64,
    c: f64,
}

impl SecretKey {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: u64,
        q: u64,
        n: u64,
        x0: f64,
        y0: f64,
        z0: f64,
        c: f64,
    ) -> Result<Self, KeyError> {
        if p == 0 {
            return Err(KeyError::ZeroCatParameter("p"));
        }
        if q == 0 {
            return Err(KeyError::ZeroCatParameter("q"));
        }
        if n == 0 {
            return Err(KeyError::ZeroIterations);
        }
        for (name, v) in [("x0", x0), ("y0", y0), ("z0", z0)] {
            if !v.is_finite() {
                return Err(KeyError::NonFiniteInitial(name));
            }
        }
        if !(CHEN_C_MIN..=CHEN_C_MAX).contains(&c) {
            return Err(KeyError::ChenParameterOutOfRange);
        }
        Ok(Self {
            p,
            q,
            n,
            x0,
            y0,
            z0,
            c,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn chen_start(&self) -> ChenState {
        ChenState::new(self.x0, self.y0, self.z0)
    }

    pub fn parse(text: &str) -> Result<Self, KeyError> {
        const NAMES: [&str; 7] = ["p", "q", "n", "x0", "y0", "z0", "c"];
        let mut raw: [Option<&str>; 7] = [None; 7];
        let mut lines: [usize; 7] = [0; 7];

        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, value) = line
                .split_once('=')
                .ok_or(KeyError::MalformedLine { line: lineno })?;
            let name = name.trim();
            let slot =
                NAMES
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| KeyError::UnknownField {
                        line: lineno,
                        name: name.to_string(),
                    })?;
            if raw[slot].is_some() {
                return Err(KeyError::DuplicateField {
                    line: lineno,
                    name: NAMES[slot],
                });
            }
            raw[slot] = Some(value.trim());
            lines[slot] = lineno;
        }

        let get = |i: usize| raw[i].ok_or(KeyError::MissingField(NAMES[i]));
        let int = |i: usize| -> Result<u64, KeyError> {
            get(i)?.parse().map_err(|_| KeyError::BadValue {
                line: lines[i],
                name: NAMES[i],
            })
        };
        let real = |i: usize| -> Result<f64, KeyError> {
            get(i)?.parse().map_err(|_| KeyError::BadValue {
                line: lines[i],
                name: NAMES[i],
            })
        };

        Self::new(
            int(0)?,
            int(1)?,
            int(2)?,
            real(3)?,
            real(4)?,
            real(5)?,
            real(6)?,
        )
    }

    pub fn load(path: &Path) -> Result<Self, KeyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| KeyError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Serializes to the key file format. Reals use Rust's shortest
    /// round-trip representation, so `parse(to_key_file())` is exact.
    pub fn to_key_file(&self) -> String {
        format!(
            "p={}\nq={}\nn={}\nx0={:?}\ny0={:?}\nz0={:?}\nc={:?}\n",
            self.p, self.q, self.n, self.x0, self.y0, self.z0, self.c
        )
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(<redacted>)")
    }
}
