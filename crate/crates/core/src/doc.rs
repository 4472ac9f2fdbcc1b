//! The shared JSON document format: bundles, fields, splittings, gauge
//! data, and invariant reports all travel in one schema, and every real is
//! serialized with 17 significant digits so emitted documents are
//! byte-reproducible.

use std::io::{self, Write as IoWrite};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::bundle::{CycleBase, DiscreteBundle, FormField, GaugeField, SubbundleField};
use crate::error::{Error, Result};
use crate::invariants::{HomotopyClass, IsoClass};
use crate::isometry::Gau0Witness;
use crate::linalg::{row_major, SymForm};
use std::sync::Arc;

/// The schema version accepted and produced by this crate.
pub const SCHEMA: &str = "inertia-bundles/1";

/// Document-level failures: I/O, JSON syntax, or schema shape. These are
/// distinct from domain errors ([`Error`]) so the CLI can map them to a
/// different exit code.
#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseDoc {
    pub n_vertices: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleDoc {
    pub rank: usize,
    /// One row-major rank×rank matrix per edge i → i+1.
    pub transitions: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubbundleDoc {
    pub dim: usize,
    /// One row-major rank×dim frame per vertex.
    pub frames: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoDoc {
    pub rank_plus: usize,
    pub w1_plus: i32,
    pub rank_minus: usize,
    pub w1_minus: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyDoc {
    /// "winding" or "orientability".
    pub kind: String,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsDoc {
    pub iso: IsoDoc,
    pub homotopy: HomotopyDoc,
}

/// A bundle/field document. `base` and `bundle` are always present; the
/// remaining sections are optional payloads.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    pub base: BaseDoc,
    pub bundle: BundleDoc,
    /// One row-major rank×rank symmetric matrix per vertex.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subbundles: Option<Vec<SubbundleDoc>>,
    /// One row-major rank×rank invertible matrix per vertex.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Vec<Vec<f64>>>,
    /// A discrete identity-component path: a list of gauge entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge_path: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantsDoc>,
}

struct DocFormatter<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for DocFormatter<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + IoWrite,
    {
        self.pretty.end_object_value(writer)
    }
}

fn matrices_to_doc(mats: &[DMatrix<f64>]) -> Vec<Vec<f64>> {
    mats.iter().map(row_major).collect()
}

fn check_matrix_list(
    what: &str,
    list: &[Vec<f64>],
    count: usize,
    rows: usize,
    cols: usize,
) -> std::result::Result<(), DocError> {
    if list.len() != count {
        return Err(DocError::Schema(format!(
            "{what}: expected {count} entries, got {}",
            list.len()
        )));
    }
    for (i, entry) in list.iter().enumerate() {
        if entry.len() != rows * cols {
            return Err(DocError::Schema(format!(
                "{what}[{i}]: expected {rows}x{cols} = {} reals, got {}",
                rows * cols,
                entry.len()
            )));
        }
    }
    Ok(())
}

impl Document {
    /// A bare document carrying only the bundle.
    pub fn new(bundle: &DiscreteBundle) -> Document {
        Document {
            schema: SCHEMA.to_string(),
            base: BaseDoc {
                n_vertices: bundle.n_vertices(),
            },
            bundle: BundleDoc {
                rank: bundle.rank(),
                transitions: matrices_to_doc(bundle.transitions()),
            },
            form: None,
            subbundles: None,
            gauge: None,
            gauge_path: None,
            invariants: None,
        }
    }

    pub fn with_form(mut self, q: &FormField) -> Document {
        self.form = Some(q.forms().iter().map(|f| row_major(f.mat())).collect());
        self
    }

    pub fn with_subbundles(mut self, subs: &[&SubbundleField]) -> Document {
        self.subbundles = Some(
            subs.iter()
                .map(|s| SubbundleDoc {
                    dim: s.dim(),
                    frames: matrices_to_doc(s.frames()),
                })
                .collect(),
        );
        self
    }

    pub fn with_gauge(mut self, g: &GaugeField) -> Document {
        self.gauge = Some(matrices_to_doc(g.maps()));
        self
    }

    pub fn with_gauge_path(mut self, w: &Gau0Witness) -> Document {
        self.gauge_path = Some(w.path().iter().map(|g| matrices_to_doc(g.maps())).collect());
        self.with_gauge(w.endpoint())
    }

    pub fn with_invariants(mut self, iso: &IsoClass, homotopy: &HomotopyClass) -> Document {
        let (kind, value) = match homotopy {
            HomotopyClass::Winding(k) => ("winding", *k),
            HomotopyClass::Orientability(s) => ("orientability", *s as i64),
        };
        self.invariants = Some(InvariantsDoc {
            iso: IsoDoc {
                rank_plus: iso.rank_plus,
                w1_plus: iso.w1_plus,
                rank_minus: iso.rank_minus,
                w1_minus: iso.w1_minus,
            },
            homotopy: HomotopyDoc {
                kind: kind.to_string(),
                value,
            },
        });
        self
    }

    /// Serialize with the fixed float format (17 significant digits,
    /// lowercase scientific) and a trailing newline.
    pub fn to_json(&self) -> std::result::Result<String, DocError> {
        let mut out = Vec::new();
        let mut ser = Serializer::with_formatter(
            &mut out,
            DocFormatter {
                pretty: PrettyFormatter::new(),
            },
        );
        self.serialize(&mut ser)?;
        out.push(b'\n');
        Ok(String::from_utf8(out).expect("serialized json is utf-8"))
    }

    pub fn from_json(text: &str) -> std::result::Result<Document, DocError> {
        let doc: Document = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn read(path: &Path) -> std::result::Result<Document, DocError> {
        let text = std::fs::read_to_string(path)?;
        Document::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> std::result::Result<(), DocError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Shape-level validation: schema string, counts, and matrix sizes.
    /// Numerical admissibility (invertibility, non-degeneracy, adjacency)
    /// is checked by the domain constructors, not here.
    pub fn validate(&self) -> std::result::Result<(), DocError> {
        if self.schema != SCHEMA {
            return Err(DocError::Schema(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                self.schema
            )));
        }
        let nv = self.base.n_vertices;
        let n = self.bundle.rank;
        check_matrix_list("bundle.transitions", &self.bundle.transitions, nv, n, n)?;
        if let Some(form) = &self.form {
            check_matrix_list("form", form, nv, n, n)?;
        }
        if let Some(subs) = &self.subbundles {
            for (j, sub) in subs.iter().enumerate() {
                check_matrix_list(
                    &format!("subbundles[{j}].frames"),
                    &sub.frames,
                    nv,
                    n,
                    sub.dim,
                )?;
            }
        }
        if let Some(gauge) = &self.gauge {
            check_matrix_list("gauge", gauge, nv, n, n)?;
        }
        if let Some(path) = &self.gauge_path {
            for (j, entry) in path.iter().enumerate() {
                check_matrix_list(&format!("gauge_path[{j}]"), entry, nv, n, n)?;
            }
        }
        Ok(())
    }

    /// Reconstruct the bundle. Fails with a domain error if a transition
    /// is singular or the base is too small.
    pub fn bundle(&self) -> Result<Arc<DiscreteBundle>> {
        let n = self.bundle.rank;
        let transitions = self
            .bundle
            .transitions
            .iter()
            .map(|t| DMatrix::from_row_slice(n, n, t))
            .collect();
        DiscreteBundle::new(CycleBase::new(self.base.n_vertices)?, n, transitions)
    }

    /// Reconstruct the form field, if the document carries one.
    pub fn form_field(&self, bundle: &Arc<DiscreteBundle>) -> Result<Option<FormField>> {
        self.form_field_with_tol(bundle, crate::linalg::DEFAULT_TOL)
    }

    pub fn form_field_with_tol(
        &self,
        bundle: &Arc<DiscreteBundle>,
        tol: f64,
    ) -> Result<Option<FormField>> {
        let Some(form) = &self.form else {
            return Ok(None);
        };
        let n = self.bundle.rank;
        let mut forms = Vec::with_capacity(form.len());
        for (i, entry) in form.iter().enumerate() {
            let mat = DMatrix::from_row_slice(n, n, entry);
            forms.push(SymForm::new(mat).map_err(|e| e.at_vertex(i))?);
        }
        FormField::new_with_tol(bundle.clone(), forms, tol).map(Some)
    }

    /// Reconstruct the subbundle fields, if any.
    pub fn subbundle_fields(&self, bundle: &Arc<DiscreteBundle>) -> Result<Vec<SubbundleField>> {
        let Some(subs) = &self.subbundles else {
            return Ok(Vec::new());
        };
        let n = self.bundle.rank;
        subs.iter()
            .map(|sub| {
                let frames = sub
                    .frames
                    .iter()
                    .map(|f| DMatrix::from_row_slice(n, sub.dim, f))
                    .collect();
                SubbundleField::new(bundle.clone(), sub.dim, frames)
            })
            .collect()
    }

    /// Reconstruct the gauge field, if the document carries one.
    pub fn gauge_field(&self, bundle: &Arc<DiscreteBundle>) -> Result<Option<GaugeField>> {
        let Some(gauge) = &self.gauge else {
            return Ok(None);
        };
        let n = self.bundle.rank;
        let maps = gauge
            .iter()
            .map(|g| DMatrix::from_row_slice(n, n, g))
            .collect();
        GaugeField::new(bundle.clone(), maps).map(Some)
    }

    /// Decode the invariants block into domain types, if present.
    pub fn invariant_classes(
        &self,
    ) -> std::result::Result<Option<(IsoClass, HomotopyClass)>, DocError> {
        let Some(inv) = &self.invariants else {
            return Ok(None);
        };
        let iso = IsoClass {
            rank_plus: inv.iso.rank_plus,
            w1_plus: inv.iso.w1_plus,
            rank_minus: inv.iso.rank_minus,
            w1_minus: inv.iso.w1_minus,
        };
        let homotopy = match inv.homotopy.kind.as_str() {
            "winding" => HomotopyClass::Winding(inv.homotopy.value),
            "orientability" => {
                let v = inv.homotopy.value;
                if v != 1 && v != -1 {
                    return Err(DocError::Schema(format!(
                        "orientability value must be 1 or -1, got {v}"
                    )));
                }
                HomotopyClass::Orientability(v as i32)
            }
            other => return Err(DocError::Schema(format!("unknown homotopy kind {other:?}"))),
        };
        Ok(Some((iso, homotopy)))
    }
}

/// Reconstruct a path witness from a document's `gauge_path`, re-running
/// the witness validity checks.
pub fn witness_from_doc(doc: &Document, bundle: &Arc<DiscreteBundle>) -> Result<Gau0Witness> {
    let Some(path) = &doc.gauge_path else {
        return Err(Error::InvalidParameter {
            what: "document",
            detail: "no gauge_path section".into(),
        });
    };
    let n = doc.bundle.rank;
    let mut fields = Vec::with_capacity(path.len());
    for entry in path {
        let maps = entry
            .iter()
            .map(|g| DMatrix::from_row_slice(n, n, g))
            .collect();
        fields.push(GaugeField::new(bundle.clone(), maps)?);
    }
    Gau0Witness::from_path(fields)
}
