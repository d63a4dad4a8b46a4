#[allow(unused_imports)]
use num_traits::Float;
use super::{ComplexMatrix, TOL_FLOOR};
use crate::{Error, Result, C64};

/// Pfaffian of an antisymmetric 2×2 or 4×4 matrix.
pub fn pfaffian(m: &ComplexMatrix) -> Result<C64> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch { what: "pfaffian of non-square matrix" });
    }
    let n = m.rows();
    if n % 2 == 1 {
        return Err(Error::OddDimension { dim: n });
    }
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] + m[(j, i)]).norm());
        }
    }
    if dev > 1e-10 * m.max_abs().max(TOL_FLOOR) {
        return Err(Error::NotAntisymmetric { deviation: dev });
    }
    match n {
        2 => Ok(m[(0, 1)]),
        4 => Ok(m[(0, 1)] * m[(2, 3)] - m[(0, 2)] * m[(1, 3)] + m[(0, 3)] * m[(1, 2)]),
        _ => Err(Error::UnsupportedDimension { dim: n }),
    }
}
