//! Shared dense linear-algebra helpers.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

/// Jitter escalation ladder used before declaring a factorization failure.
pub(crate) const JITTERS: [f64; 4] = [0.0, 1e-8, 1e-6, 1e-4];

/// Cholesky factorization with escalating diagonal jitter. Returns the
/// factorization together with the jitter that was actually applied.
pub(crate) fn jittered_cholesky(m: &DMatrix<f64>) -> Result<(Cholesky<f64, Dyn>, f64)> {
    debug_assert_eq!(m.nrows(), m.ncols());
    for &jitter in &JITTERS {
        let mut work = m.clone();
        if jitter > 0.0 {
            for i in 0..work.nrows() {
                work[(i, i)] += jitter;
            }
        }
        if let Some(chol) = Cholesky::new(work) {
            return Ok((chol, jitter));
        }
    }
    Err(Error::FactorizationFailed {
        max_jitter: *JITTERS.last().unwrap(),
    })
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}
