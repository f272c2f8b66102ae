//! CSV tables (RFC 4180: CRLF line endings, header row). All fields are
//! numeric, so no quoting is ever needed.

use std::io::Write;

use super::IoError;
use crate::grid::RefinementStudy;

/// Eigenvalue table `j,lambda`.
pub fn write_eigenvalue_table<W: Write>(w: &mut W, lambdas: &[f64]) -> Result<(), IoError> {
    write!(w, "j,lambda\r\n")?;
    for (j, lam) in lambdas.iter().enumerate() {
        write!(w, "{},{:.12e}\r\n", j + 1, lam)?;
    }
    Ok(())
}

/// Comparison table `j,lambda_pencil,lambda_krein,rel_diff`.
pub fn write_comparison_table<W: Write>(
    w: &mut W,
    pencil: &[f64],
    krein: &[f64],
) -> Result<(), IoError> {
    write!(w, "j,lambda_pencil,lambda_krein,rel_diff\r\n")?;
    for (j, (p, k)) in pencil.iter().zip(krein).enumerate() {
        let rel = (p - k).abs() / k.abs().max(f64::MIN_POSITIVE);
        write!(w, "{},{:.12e},{:.12e},{:.3e}\r\n", j + 1, p, k, rel)?;
    }
    Ok(())
}

/// Convergence table `level,nodes,h,lambda1,observed_order,extrapolated`.
/// The order and limit are the study-wide fit, repeated on each row so the
/// file stands alone.
pub fn write_convergence_table<W: Write>(
    w: &mut W,
    study: &RefinementStudy,
) -> Result<(), IoError> {
    write!(w, "level,nodes,h,lambda1,observed_order,extrapolated\r\n")?;
    for (i, level) in study.levels.iter().enumerate() {
        write!(
            w,
            "{},{},{:.12e},{:.12e},{:.6},{:.12e}\r\n",
            i + 1,
            level.nodes,
            level.h,
            level.lambda1,
            study.observed_order,
            study.extrapolated
        )?;
    }
    Ok(())
}
