//! JSON schema "v1" for problem instances.
//!
//! Matrices are stored row-major, complex entries as `[re, im]` pairs. Floats
//! are written in shortest round-trip form, so `load(save(x)) == x`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use super::{GeneratorInfo, ProblemInstance};
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::numkit::{DenseMatrix, Point, Real, Scalar};
use crate::sets::SetSpec;

pub const INSTANCE_SCHEMA: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entries {
    Real(Vec<f64>),
    Complex(Vec<[f64; 2]>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SetDoc {
    AffineSystem {
        rows: usize,
        cols: usize,
        matrix: Vec<f64>,
        rhs: Entries,
    },
    LineThroughOrigin {
        direction: Entries,
    },
    AffineLine {
        point: Entries,
        direction: Entries,
    },
    Sparsity {
        dim: usize,
        s: usize,
    },
    RealSparsity {
        dim: usize,
        s: usize,
    },
    FourierData {
        dim: usize,
        indices: Vec<usize>,
        values: Vec<[f64; 2]>,
    },
    PointSet {
        points: Vec<Entries>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    schema: String,
    field: Field,
    name: String,
    a: SetDoc,
    b: SetDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ground_truth: Option<Entries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solution: Option<SetDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gap_vector: Option<Entries>,
    consistent: bool,
    generator: GeneratorInfo,
    #[serde(default)]
    notes: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct SchemaProbe {
    schema: Option<String>,
}

fn field_of<S: Scalar>() -> Field {
    if S::IS_COMPLEX {
        Field::Complex
    } else {
        Field::Real
    }
}

fn semantic(field: &str, e: Error) -> Error {
    Error::Parse {
        line: None,
        field: field.into(),
        message: e.to_string(),
    }
}

fn encode_point<S: Scalar>(p: &Point<S>) -> Entries {
    if S::IS_COMPLEX {
        Entries::Complex(
            p.iter()
                .map(|v| [v.re().to_f64_lossy(), v.im().to_f64_lossy()])
                .collect(),
        )
    } else {
        Entries::Real(p.iter().map(|v| v.re().to_f64_lossy()).collect())
    }
}

fn decode_point<S: Scalar>(e: &Entries, field: &str) -> Result<Point<S>> {
    let entries: Vec<S> = match (e, S::IS_COMPLEX) {
        (Entries::Real(v), false) => v.iter().map(|&x| S::from_real(S::Real::lit(x))).collect(),
        (Entries::Complex(v), true) => v
            .iter()
            .map(|&[re, im]| S::from_parts(S::Real::lit(re), S::Real::lit(im)))
            .collect(),
        (Entries::Real(_), true) => {
            return Err(Error::parse(
                field,
                "expected [re, im] pairs for a complex instance",
            ))
        }
        (Entries::Complex(_), false) => {
            return Err(Error::parse(
                field,
                "found [re, im] pairs in a real instance",
            ))
        }
    };
    Point::new(entries).map_err(|e| semantic(field, e))
}

fn encode_set<S: Scalar>(set: &SetSpec<S>) -> SetDoc {
    match set {
        SetSpec::AffineSystem(sys) => {
            let m = sys.matrix();
            SetDoc::AffineSystem {
                rows: m.rows(),
                cols: m.cols(),
                matrix: m.as_slice().iter().map(|v| v.to_f64_lossy()).collect(),
                rhs: encode_point(sys.rhs()),
            }
        }
        SetSpec::LineThroughOrigin(l) => SetDoc::LineThroughOrigin {
            direction: encode_point(l.direction()),
        },
        SetSpec::AffineLine(l) => SetDoc::AffineLine {
            point: encode_point(l.point()),
            direction: encode_point(l.direction()),
        },
        SetSpec::Sparsity(s) => SetDoc::Sparsity {
            dim: s.dim(),
            s: s.level(),
        },
        SetSpec::RealSparsity(s) => SetDoc::RealSparsity {
            dim: s.dim(),
            s: s.level(),
        },
        SetSpec::FourierData(f) => SetDoc::FourierData {
            dim: f.dim(),
            indices: f.indices().to_vec(),
            values: f
                .values()
                .iter()
                .map(|v| [v.re.to_f64_lossy(), v.im.to_f64_lossy()])
                .collect(),
        },
        SetSpec::PointSet(p) => SetDoc::PointSet {
            points: p.points().iter().map(encode_point).collect(),
        },
    }
}

fn decode_set<S: Scalar>(doc: &SetDoc, field: &str) -> Result<SetSpec<S>> {
    let sub = |name: &str| format!("{field}.{name}");
    let set = match doc {
        SetDoc::AffineSystem {
            rows,
            cols,
            matrix,
            rhs,
        } => {
            let data = matrix.iter().map(|&v| S::Real::lit(v)).collect();
            let m =
                DenseMatrix::new(*rows, *cols, data).map_err(|e| semantic(&sub("matrix"), e))?;
            SetSpec::affine_system(m, decode_point(rhs, &sub("rhs"))?)
        }
        SetDoc::LineThroughOrigin { direction } => {
            SetSpec::line_through_origin(decode_point(direction, &sub("direction"))?)
        }
        SetDoc::AffineLine { point, direction } => SetSpec::affine_line(
            decode_point(point, &sub("point"))?,
            decode_point(direction, &sub("direction"))?,
        ),
        SetDoc::Sparsity { dim, s } => SetSpec::sparsity(*dim, *s),
        SetDoc::RealSparsity { dim, s } => SetSpec::real_sparsity(*dim, *s),
        SetDoc::FourierData {
            dim,
            indices,
            values,
        } => SetSpec::fourier_data(
            *dim,
            indices.clone(),
            values
                .iter()
                .map(|&[re, im]| Complex::new(S::Real::lit(re), S::Real::lit(im)))
                .collect(),
        ),
        SetDoc::PointSet { points } => SetSpec::point_set(
            points
                .iter()
                .enumerate()
                .map(|(i, p)| decode_point(p, &format!("{field}.points[{i}]")))
                .collect::<Result<_>>()?,
        ),
    };
    set.map_err(|e| match e {
        e @ Error::Parse { .. } => e,
        e => semantic(field, e),
    })
}

pub fn instance_to_json<S: Scalar>(inst: &ProblemInstance<S>) -> String {
    let doc = InstanceDoc {
        schema: INSTANCE_SCHEMA.into(),
        field: field_of::<S>(),
        name: inst.name.clone(),
        a: encode_set(&inst.a),
        b: encode_set(&inst.b),
        ground_truth: inst.ground_truth.as_ref().map(encode_point),
        solution: inst.solution.as_ref().map(encode_set),
        gap_vector: inst.gap_vector.as_ref().map(encode_point),
        consistent: inst.consistent,
        generator: inst.generator.clone(),
        notes: inst.notes.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance documents always serialize");
    text.push('\n');
    text
}

fn parse_doc(text: &str) -> Result<InstanceDoc> {
    if let Ok(SchemaProbe {
        schema: Some(found),
    }) = serde_json::from_str::<SchemaProbe>(text)
    {
        if found != INSTANCE_SCHEMA {
            return Err(Error::VersionMismatch {
                expected: INSTANCE_SCHEMA.into(),
                found,
            });
        }
    }
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            line: Some(inner.line()),
            field: if path == "." { "document".into() } else { path },
            message: inner.to_string(),
        }
    })
}

/// Parsed document's field tag, without decoding the sets.
fn doc_field(text: &str) -> Result<Field> {
    Ok(parse_doc(text)?.field)
}

pub fn instance_from_json<S: Scalar>(text: &str) -> Result<ProblemInstance<S>> {
    let doc = parse_doc(text)?;
    if doc.field != field_of::<S>() {
        return Err(Error::parse(
            "field",
            format!(
                "instance is {:?}, requested {:?}",
                doc.field,
                field_of::<S>()
            ),
        ));
    }
    let a = decode_set::<S>(&doc.a, "a")?;
    let b = decode_set::<S>(&doc.b, "b")?;
    if a.dim() != b.dim() {
        return Err(Error::parse(
            "b",
            format!("dimension {} differs from a ({})", b.dim(), a.dim()),
        ));
    }
    let ground_truth = doc
        .ground_truth
        .as_ref()
        .map(|e| decode_point(e, "ground_truth"))
        .transpose()?;
    let solution = doc
        .solution
        .as_ref()
        .map(|s| decode_set(s, "solution"))
        .transpose()?;
    let gap_vector = doc
        .gap_vector
        .as_ref()
        .map(|e| decode_point(e, "gap_vector"))
        .transpose()?;
    let dim = a.dim();
    for (name, d) in [
        ("ground_truth", ground_truth.as_ref().map(|p| p.dim())),
        ("solution", solution.as_ref().map(|s| s.dim())),
        ("gap_vector", gap_vector.as_ref().map(|p| p.dim())),
    ] {
        if let Some(d) = d.filter(|&d| d != dim) {
            return Err(Error::parse(
                name,
                format!("dimension {d} differs from the sets ({dim})"),
            ));
        }
    }
    Ok(ProblemInstance {
        name: doc.name,
        a: a.into(),
        b: b.into(),
        ground_truth,
        solution,
        gap_vector,
        consistent: doc.consistent,
        generator: doc.generator,
        notes: doc.notes,
    })
}

pub fn save_instance<S: Scalar>(inst: &ProblemInstance<S>, path: &Path) -> Result<()> {
    write_atomic(path, instance_to_json(inst).as_bytes())
}

pub fn load_instance<S: Scalar>(path: &Path) -> Result<ProblemInstance<S>> {
    instance_from_json(&std::fs::read_to_string(path)?)
}

/// An instance over either field, as found in a file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyInstance {
    Real(ProblemInstance<f64>),
    Complex(ProblemInstance<Complex64>),
}

impl AnyInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        match doc_field(text)? {
            Field::Real => instance_from_json(text).map(AnyInstance::Real),
            Field::Complex => instance_from_json(text).map(AnyInstance::Complex),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnyInstance::Real(i) => instance_to_json(i),
            AnyInstance::Complex(i) => instance_to_json(i),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            AnyInstance::Real(i) => i.name(),
            AnyInstance::Complex(i) => i.name(),
        }
    }

    pub fn field(&self) -> Field {
        match self {
            AnyInstance::Real(_) => Field::Real,
            AnyInstance::Complex(_) => Field::Complex,
        }
    }
}

pub fn load_any(path: &Path) -> Result<AnyInstance> {
    AnyInstance::from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen_geometry, gen_sparse_affine, gen_sparse_fourier, GeometryKind};

    #[test]
    fn round_trips_are_exact() {
        let g = gen_geometry::<f64>(GeometryKind::OrthogonalAxes, 2).unwrap();
        assert_eq!(instance_from_json::<f64>(&instance_to_json(&g)).unwrap(), g);
        let t = gen_geometry::<f64>(GeometryKind::LinesAtAngle { degrees: 37.0 }, 3).unwrap();
        assert_eq!(instance_from_json::<f64>(&instance_to_json(&t)).unwrap(), t);
        let p = gen_geometry::<f64>(GeometryKind::ParallelLines { offset: -2.5 }, 2).unwrap();
        assert_eq!(instance_from_json::<f64>(&instance_to_json(&p)).unwrap(), p);
        let s = gen_sparse_affine::<f64>(20, 5, 2, 3, 11, Some(0.01)).unwrap();
        assert_eq!(instance_from_json::<f64>(&instance_to_json(&s)).unwrap(), s);
        let f = gen_sparse_fourier::<f64>(32, 0.25, 3, 4, 2, true).unwrap();
        let back = AnyInstance::from_json(&instance_to_json(&f)).unwrap();
        assert_eq!(back, AnyInstance::Complex(f));
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let text = instance_to_json(&gen_geometry::<f64>(GeometryKind::OrthogonalAxes, 2).unwrap());
        let cut = &text[..text.len() / 2];
        assert!(matches!(
            instance_from_json::<f64>(cut),
            Err(Error::Parse { line: Some(_), .. })
        ));
    }

    #[test]
    fn schema_tag_is_checked() {
        let text = instance_to_json(&gen_geometry::<f64>(GeometryKind::OrthogonalAxes, 2).unwrap());
        let old = text.replace("\"schema\": \"v1\"", "\"schema\": \"v0\"");
        assert!(matches!(
            instance_from_json::<f64>(&old),
            Err(Error::VersionMismatch { found, .. }) if found == "v0"
        ));
    }

    #[test]
    fn bad_fields_are_named() {
        let text = instance_to_json(&gen_geometry::<f64>(GeometryKind::OrthogonalAxes, 2).unwrap());
        let bad = text.replace("\"consistent\": true", "\"consistent\": 3");
        match instance_from_json::<f64>(&bad) {
            Err(Error::Parse { field, line, .. }) => {
                assert_eq!(field, "consistent");
                assert!(line.is_some());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            instance_from_json::<Complex64>(&text),
            Err(Error::Parse { field, .. }) if field == "field"
        ));
    }
}
