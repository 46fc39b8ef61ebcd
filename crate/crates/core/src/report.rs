//! Machine-readable report serialization.
//!
//! All documents carry the schema tag `holonomy-forge/1` and serialize every
//! floating-point value with 17 significant digits, so byte-identical output
//! is reproducible from identical configuration and seeds.

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::special::SpecialSubspaceReport;

pub const SCHEMA: &str = "holonomy-forge/1";

/// Pretty JSON formatter that pins floats to 17 significant digits.
struct Pretty17<'a> {
    inner: PrettyFormatter<'a>,
}

impl<'a> Pretty17<'a> {
    fn new() -> Self {
        Self {
            inner: PrettyFormatter::new(),
        }
    }
}

impl<'a> Formatter for Pretty17<'a> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.inner.end_object_value(writer)
    }
}

/// Serializes a document as pretty JSON with pinned float formatting and a
/// trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, Pretty17::new());
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Serializable view of a special-subspace report: bases as row-major arrays,
/// certificates as eigenvalue spreads.
#[derive(Debug, Serialize)]
pub struct SpecialReportJson {
    pub group: String,
    pub definition: u8,
    pub generator_dim: usize,
    pub generator: Vec<Vec<f64>>,
    pub candidates: Vec<CandidateJson>,
    pub extras_used: usize,
    pub refinement_changed: bool,
}

#[derive(Debug, Serialize)]
pub struct CandidateJson {
    pub dim: usize,
    pub basis: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summand: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<f64>,
}

impl From<&SpecialSubspaceReport> for SpecialReportJson {
    fn from(report: &SpecialSubspaceReport) -> Self {
        Self {
            group: report.spec.to_string(),
            definition: report.definition.as_u8(),
            generator_dim: report.generator.dim(),
            generator: report.generator.row_major(),
            candidates: report
                .candidates
                .iter()
                .map(|c| CandidateJson {
                    dim: c.subspace.dim(),
                    basis: c.subspace.row_major(),
                    summand: c.summand.as_ref().map(|s| s.row_major()),
                    certificate: c.certificate,
                })
                .collect(),
            extras_used: report.extras_used,
            refinement_changed: report.refinement_changed,
        }
    }
}
