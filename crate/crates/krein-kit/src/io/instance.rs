//! Instance files: JSON documents with schema tag `krein-kit/1`, matrices
//! embedded as nested arrays or referenced as Matrix Market attachments.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix_market;
use super::IoError;
use crate::extension::RestrictedOperator;
use crate::linalg::DenseMatrix;
use crate::provenance::Provenance;

pub const INSTANCE_SCHEMA: &str = "krein-kit/1";

/// A matrix slot in an instance document: either inline rows or a relative
/// path to a Matrix Market file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Embedded(DenseMatrix),
    MatrixMarket { matrix_market: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema: String,
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    #[serde(rename = "E")]
    pub domain_basis: MatrixSource,
    #[serde(rename = "B")]
    pub image: MatrixSource,
    pub provenance: Provenance,
}

/// How matrices are stored when writing an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixLayout {
    Embedded,
    /// Write `<stem>.E.mtx` / `<stem>.B.mtx` next to the JSON and reference
    /// them by file name.
    MatrixMarket,
}

pub fn save_instance(
    op: &RestrictedOperator,
    path: &Path,
    layout: MatrixLayout,
) -> Result<(), IoError> {
    let (e_src, b_src) = match layout {
        MatrixLayout::Embedded => (
            MatrixSource::Embedded(op.domain_basis().clone()),
            MatrixSource::Embedded(op.image().clone()),
        ),
        MatrixLayout::MatrixMarket => {
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| IoError::Unsupported {
                    what: format!("instance path without a stem: {}", path.display()),
                })?;
            let dir = path.parent().unwrap_or_else(|| Path::new("."));
            let e_name = format!("{stem}.E.mtx");
            let b_name = format!("{stem}.B.mtx");
            matrix_market::write_dense_path(&dir.join(&e_name), op.domain_basis(), false)?;
            matrix_market::write_dense_path(&dir.join(&b_name), op.image(), false)?;
            (
                MatrixSource::MatrixMarket { matrix_market: e_name },
                MatrixSource::MatrixMarket { matrix_market: b_name },
            )
        }
    };
    let doc = InstanceFile {
        schema: INSTANCE_SCHEMA.to_string(),
        n: op.ambient_dim(),
        d: op.domain_dim(),
        epsilon: op.epsilon(),
        domain_basis: e_src,
        image: b_src,
        provenance: op.provenance().clone(),
    };
    let json = serde_json::to_string_pretty(&doc)?;
    std::fs::write(path, json).map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })
}

fn resolve(src: &MatrixSource, base: &Path) -> Result<DenseMatrix, IoError> {
    match src {
        MatrixSource::Embedded(m) => Ok(m.clone()),
        MatrixSource::MatrixMarket { matrix_market } => {
            let p = base.join(matrix_market);
            Ok(matrix_market::read_path(&p)?.to_dense())
        }
    }
}

pub fn load_instance(path: &Path) -> Result<RestrictedOperator, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::File {
        path: path.display().to_string(),
        source: e,
    })?;
    let doc: InstanceFile = serde_json::from_str(&text)?;
    if doc.schema != INSTANCE_SCHEMA {
        return Err(IoError::SchemaMismatch { found: doc.schema, expected: INSTANCE_SCHEMA });
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let e = resolve(&doc.domain_basis, base)?;
    let b = resolve(&doc.image, base)?;
    if e.rows() != doc.n || e.cols() != doc.d || b.rows() != doc.n || b.cols() != doc.d {
        return Err(IoError::InstanceInvalid {
            message: format!(
                "declared {}x{}, but E is {}x{} and B is {}x{}",
                doc.n,
                doc.d,
                e.rows(),
                e.cols(),
                b.rows(),
                b.cols()
            ),
        });
    }
    RestrictedOperator::from_parts(e, b, doc.epsilon, doc.provenance)
        .map_err(|err| IoError::InstanceInvalid { message: err.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::random_instance;

    #[test]
    fn embedded_round_trip() {
        let op = random_instance(8, 3, 0.5, 42).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&op, &path, MatrixLayout::Embedded).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(back.ambient_dim(), 8);
        assert_eq!(back.domain_dim(), 3);
        assert!((back.epsilon() - op.epsilon()).abs() < 1e-15);
        assert_eq!(back.image().data(), op.image().data());
    }

    #[test]
    fn matrix_market_attachments_round_trip() {
        let op = random_instance(7, 2, 1.0, 5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("attached.json");
        save_instance(&op, &path, MatrixLayout::MatrixMarket).unwrap();
        assert!(dir.path().join("attached.E.mtx").exists());
        assert!(dir.path().join("attached.B.mtx").exists());
        let back = load_instance(&path).unwrap();
        assert_eq!(back.domain_dim(), 2);
        let diff = (back.image() - op.image()).norm_max();
        assert!(diff < 1e-15);
    }

    #[test]
    fn corrupted_instance_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        // symmetric compression is violated: B column not aligned with E
        let doc = serde_json::json!({
            "schema": INSTANCE_SCHEMA,
            "n": 2, "d": 1, "epsilon": 1.0,
            "E": [[1.0],[0.0]],
            "B": [[1.0],[5.0]],
            "provenance": {"kind": "ambient", "label": "bad"}
        });
        std::fs::write(&path, doc.to_string()).unwrap();
        // loads matrices fine, but operator validation must fail on epsilon:
        // here EᵀB = [1], min eig 1 >= epsilon 1 ok, symmetric ok, so this
        // one actually validates; break it harder with epsilon
        let doc = serde_json::json!({
            "schema": INSTANCE_SCHEMA,
            "n": 2, "d": 1, "epsilon": 7.0,
            "E": [[1.0],[0.0]],
            "B": [[1.0],[0.0]],
            "provenance": {"kind": "ambient", "label": "bad"}
        });
        std::fs::write(&path, doc.to_string()).unwrap();
        assert!(matches!(load_instance(&path), Err(IoError::InstanceInvalid { .. })));

        let doc = serde_json::json!({"schema": "other/9", "n": 2, "d": 1, "epsilon": 1.0,
            "E": [[1.0],[0.0]], "B": [[1.0],[0.0]],
            "provenance": {"kind": "ambient", "label": "x"}});
        std::fs::write(&path, doc.to_string()).unwrap();
        assert!(matches!(load_instance(&path), Err(IoError::SchemaMismatch { .. })));
    }
}
