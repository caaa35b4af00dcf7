//! JSON system configuration.
//!
//! Complex entries are `[re, im]` pairs; a bare number is read as a real
//! entry. Matrices are either nested rows or a flat row-major list.

use std::fmt;

use num_complex::Complex64;
use phs_core::numerics::{c64, hermitian_eigenvalues, ComplexMatrix, ComplexVector};
use phs_core::{BoundaryMatrixW, HamiltonianField, HamiltonianKind, PHSystem};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid value at `{path}`: {message}")]
    Semantic { path: String, message: String },
}

impl ParseError {
    pub fn path(&self) -> Option<&str> {
        match self {
            ParseError::Semantic { path, .. } => Some(path),
            ParseError::Syntax { .. } => None,
        }
    }

    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. } => Some(*offset),
            ParseError::Semantic { .. } => None,
        }
    }
}

type Parsed<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `amplitude * exp(-((xi - center) / width)^2) * direction`.
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
        direction: ComplexVector,
    },
    /// `amplitude * sin(mode * pi * (xi - a) / (b - a)) * direction`.
    Sine {
        mode: u32,
        amplitude: f64,
        direction: ComplexVector,
    },
    Constant {
        value: ComplexVector,
    },
}

impl InitialCondition {
    pub fn eval(&self, xi: f64, a: f64, b: f64) -> ComplexVector {
        match self {
            InitialCondition::Gaussian {
                center,
                width,
                amplitude,
                direction,
            } => {
                let r = (xi - center) / width;
                direction * c64(amplitude * (-r * r).exp(), 0.0)
            }
            InitialCondition::Sine {
                mode,
                amplitude,
                direction,
            } => {
                let s = (xi - a) / (b - a);
                direction
                    * c64(
                        amplitude * (*mode as f64 * std::f64::consts::PI * s).sin(),
                        0.0,
                    )
            }
            InitialCondition::Constant { value } => value.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub n: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub initial: Option<InitialCondition>,
}

#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub system: PHSystem,
    pub simulate: Option<SimulateConfig>,
}

/// Byte offset of a `serde_json` error from its 1-based line and column.
fn byte_offset(text: &[u8], err: &serde_json::Error) -> usize {
    if err.is_eof() {
        return text.len();
    }
    let line_start: usize = text
        .split_inclusive(|&b| b == b'\n')
        .take(err.line().saturating_sub(1))
        .map(<[u8]>::len)
        .sum();
    (line_start + err.column().saturating_sub(1)).min(text.len())
}

pub fn parse_config(text: &[u8]) -> Parsed<SystemConfig> {
    let root: Value = serde_json::from_slice(text).map_err(|e| ParseError::Syntax {
        offset: byte_offset(text, &e),
        message: e.to_string(),
    })?;
    Reader::root(&root).system_config()
}

/// A JSON value together with its path from the document root.
#[derive(Clone, Copy)]
struct Reader<'a> {
    value: &'a Value,
    parent: Option<&'a Reader<'a>>,
    segment: Segment<'a>,
}

#[derive(Clone, Copy)]
enum Segment<'a> {
    Root,
    Key(&'a str),
    Index(usize),
}

impl fmt::Display for Reader<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.parent {
            write!(f, "{p}")?;
        }
        match self.segment {
            Segment::Root => Ok(()),
            Segment::Key(k)
                if self
                    .parent
                    .is_some_and(|p| !matches!(p.segment, Segment::Root)) =>
            {
                write!(f, ".{k}")
            }
            Segment::Key(k) => write!(f, "{k}"),
            Segment::Index(i) => write!(f, "[{i}]"),
        }
    }
}

impl<'a> Reader<'a> {
    fn root(value: &'a Value) -> Self {
        Reader {
            value,
            parent: None,
            segment: Segment::Root,
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Parsed<T> {
        let path = self.to_string();
        Err(ParseError::Semantic {
            path: if path.is_empty() { "$".into() } else { path },
            message: message.into(),
        })
    }

    fn object(&self) -> Parsed<&'a Map<String, Value>> {
        match self.value.as_object() {
            Some(m) => Ok(m),
            None => self.fail("expected an object"),
        }
    }

    fn array(&self) -> Parsed<&'a Vec<Value>> {
        match self.value.as_array() {
            Some(a) => Ok(a),
            None => self.fail("expected an array"),
        }
    }

    fn key(&'a self, key: &'a str) -> Parsed<Reader<'a>> {
        match self.optional(key)? {
            Some(r) => Ok(r),
            None => Reader {
                value: &Value::Null,
                parent: Some(self),
                segment: Segment::Key(key),
            }
            .fail("missing required key"),
        }
    }

    fn optional(&'a self, key: &'a str) -> Parsed<Option<Reader<'a>>> {
        Ok(self.object()?.get(key).map(|value| Reader {
            value,
            parent: Some(self),
            segment: Segment::Key(key),
        }))
    }

    fn items(&'a self) -> Parsed<Vec<Reader<'a>>> {
        Ok(self
            .array()?
            .iter()
            .enumerate()
            .map(|(i, value)| Reader {
                value,
                parent: Some(self),
                segment: Segment::Index(i),
            })
            .collect())
    }

    fn real(&self) -> Parsed<f64> {
        match self.value.as_f64() {
            Some(x) if x.is_finite() => Ok(x),
            _ => self.fail("expected a finite number"),
        }
    }

    fn positive(&self) -> Parsed<f64> {
        let x = self.real()?;
        if x > 0.0 {
            Ok(x)
        } else {
            self.fail(format!("expected a positive number, got {x}"))
        }
    }

    fn count(&self) -> Parsed<usize> {
        match self.value.as_u64() {
            Some(n) if n > 0 => Ok(n as usize),
            _ => self.fail("expected a positive integer"),
        }
    }

    fn complex(&self) -> Parsed<Complex64> {
        if self.value.is_number() {
            return Ok(c64(self.real()?, 0.0));
        }
        let parts = self.items()?;
        if parts.len() != 2 {
            return self.fail("expected an [re, im] pair");
        }
        Ok(c64(parts[0].real()?, parts[1].real()?))
    }

    fn is_complex_entry(value: &Value) -> bool {
        value.is_number()
            || value
                .as_array()
                .is_some_and(|a| a.len() == 2 && a.iter().all(Value::is_number))
    }

    fn vector(&self, len: usize) -> Parsed<ComplexVector> {
        let items = self.items()?;
        if items.len() != len {
            return self.fail(format!("expected {len} entries, got {}", items.len()));
        }
        let entries = items
            .iter()
            .map(Reader::complex)
            .collect::<Parsed<Vec<_>>>()?;
        Ok(ComplexVector::from_vec(entries))
    }

    /// Row-major matrix, either as nested rows or as a flat entry list.
    fn matrix(&self, rows: usize, cols: usize) -> Parsed<ComplexMatrix> {
        let items = self.items()?;
        let flat = items.iter().all(|r| Self::is_complex_entry(r.value));
        // A single row of bare reals looks flat too; prefer the nested reading
        // whenever the flat one has the wrong length but the nested one fits.
        let nested_fits = items.len() == rows
            && items
                .iter()
                .all(|r| r.value.as_array().is_some_and(|a| a.len() == cols));
        if flat && !(items.len() != rows * cols && nested_fits) {
            if items.len() != rows * cols {
                return self.fail(format!(
                    "expected a {rows}x{cols} matrix: {rows} rows of {cols} entries or {} flat entries, got {} entries",
                    rows * cols,
                    items.len()
                ));
            }
            let entries = items
                .iter()
                .map(Reader::complex)
                .collect::<Parsed<Vec<_>>>()?;
            return Ok(ComplexMatrix::from_row_slice(rows, cols, &entries));
        }
        if items.len() != rows {
            return self.fail(format!("expected {rows} rows, got {}", items.len()));
        }
        let mut m = ComplexMatrix::zeros(rows, cols);
        for (i, row) in items.iter().enumerate() {
            let entries = row.items()?;
            if entries.len() != cols {
                return row.fail(format!("expected {cols} columns, got {}", entries.len()));
            }
            for (j, e) in entries.iter().enumerate() {
                m[(i, j)] = e.complex()?;
            }
        }
        Ok(m)
    }

    fn system_config(&self) -> Parsed<SystemConfig> {
        let d = self.key("d")?.count()?;
        let interval = self.key("interval")?;
        let ends = interval.items()?;
        if ends.len() != 2 {
            return interval.fail("expected [a, b]");
        }
        let (a, b) = (ends[0].real()?, ends[1].real()?);
        if a >= b {
            return interval.fail(format!("expected a < b, got [{a}, {b}]"));
        }
        let p0 = self.key("P0")?.matrix(d, d)?;
        let p1 = self.key("P1")?.matrix(d, d)?;
        let hamiltonian = self.key("hamiltonian")?.hamiltonian(d)?;
        let w_reader = self.key("W")?;
        let w = w_reader.matrix(d, 2 * d)?;
        let w = match BoundaryMatrixW::new(w) {
            Ok(w) => w,
            Err(e) => return w_reader.fail(e.to_string()),
        };
        let system = match PHSystem::new(a, b, p0, p1, hamiltonian, w) {
            Ok(s) => s,
            Err(e) => return self.fail(e.to_string()),
        };
        let simulate = match self.optional("simulate")? {
            Some(r) => Some(r.simulate(d, a, b)?),
            None => None,
        };
        Ok(SystemConfig { system, simulate })
    }

    fn hamiltonian(&self, d: usize) -> Parsed<HamiltonianField> {
        let kind_reader = self.key("kind")?;
        let kind = match kind_reader.value.as_str() {
            Some("constant") => HamiltonianKind::Constant,
            Some("cells") => HamiltonianKind::Cells,
            _ => return kind_reader.fail("expected \"constant\" or \"cells\""),
        };
        let values_reader = self.key("values")?;
        let values = match kind {
            HamiltonianKind::Constant => vec![values_reader.matrix(d, d)?],
            _ => {
                let cells = values_reader.items()?;
                if cells.is_empty() {
                    return values_reader.fail("expected at least one cell");
                }
                cells
                    .iter()
                    .map(|c| c.matrix(d, d))
                    .collect::<Parsed<Vec<_>>>()?
            }
        };
        let spectrum: Vec<f64> = values.iter().flat_map(hermitian_eigenvalues).collect();
        let lower = match self.optional("m")? {
            Some(r) => r.positive()?,
            None => spectrum.iter().copied().fold(f64::INFINITY, f64::min),
        };
        let upper = match self.optional("M")? {
            Some(r) => r.positive()?,
            None => spectrum.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        HamiltonianField::new(kind, values, lower, upper).or_else(|e| self.fail(e.to_string()))
    }

    fn simulate(&self, d: usize, a: f64, b: f64) -> Parsed<SimulateConfig> {
        self.object()?;
        let n = self.optional("n")?.map(|r| r.count()).transpose()?;
        let dt = self.optional("dt")?.map(|r| r.positive()).transpose()?;
        let t_end = self.optional("T")?.map(|r| r.positive()).transpose()?;
        let initial = self
            .optional("initial")?
            .map(|r| r.initial(d, a, b))
            .transpose()?;
        Ok(SimulateConfig {
            n,
            dt,
            t_end,
            initial,
        })
    }

    fn direction(&self, d: usize) -> Parsed<ComplexVector> {
        match self.optional("direction")? {
            Some(r) => r.vector(d),
            None => {
                let mut e1 = ComplexVector::zeros(d);
                e1[0] = c64(1.0, 0.0);
                Ok(e1)
            }
        }
    }

    fn amplitude(&self) -> Parsed<f64> {
        self.optional("amplitude")?.map_or(Ok(1.0), |r| r.real())
    }

    fn initial(&self, d: usize, a: f64, b: f64) -> Parsed<InitialCondition> {
        let kind_reader = self.key("kind")?;
        match kind_reader.value.as_str() {
            Some("gaussian") => Ok(InitialCondition::Gaussian {
                center: self
                    .optional("center")?
                    .map_or(Ok(0.5 * (a + b)), |r| r.real())?,
                width: self
                    .optional("width")?
                    .map_or(Ok(0.1 * (b - a)), |r| r.positive())?,
                amplitude: self.amplitude()?,
                direction: self.direction(d)?,
            }),
            Some("sine") => {
                let mode = match self.optional("mode")? {
                    Some(r) => {
                        u32::try_from(r.count()?).or_else(|_| r.fail("mode is too large"))?
                    }
                    None => 1,
                };
                Ok(InitialCondition::Sine {
                    mode,
                    amplitude: self.amplitude()?,
                    direction: self.direction(d)?,
                })
            }
            Some("constant") => {
                let value = match self.optional("value")? {
                    Some(r) => r.vector(d)?,
                    None => self.direction(d)? * c64(self.amplitude()?, 0.0),
                };
                Ok(InitialCondition::Constant { value })
            }
            _ => kind_reader.fail("expected \"gaussian\", \"sine\" or \"constant\""),
        }
    }
}
