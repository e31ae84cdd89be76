use num_complex::Complex64;

use crate::error::{ErgoError, Result};
use crate::koopman::Observable;
use crate::summation::norm;
use crate::systems::StatePoint;

/// Relative norm below which a re-projected vector counts as dependent.
const RANK_TOL: f64 = 1e-8;

/// Orthonormalizes the values of a frame of ℂᴺ-valued observables separately
/// at every sample (modified Gram-Schmidt). Returns, per sample, the
/// orthonormal vectors in frame order.
pub fn pointwise_gram_schmidt(
    frame: &[Observable],
    samples: &[StatePoint],
) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let Some(first) = frame.first() else {
        return Err(ErgoError::invalid("frame must be nonempty"));
    };
    let n = first.dim();
    for f in frame {
        ErgoError::check_dim(n, f.dim())?;
    }
    if frame.len() > n {
        return Err(ErgoError::invalid(format!(
            "{} vectors cannot be independent in C^{n}",
            frame.len()
        )));
    }
    samples
        .iter()
        .enumerate()
        .map(|(s, x)| {
            let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(frame.len());
            for (vi, f) in frame.iter().enumerate() {
                let mut u = f.eval(x)?;
                let original = norm(&u);
                for q in &basis {
                    let coeff: Complex64 = u.iter().zip(q).map(|(a, b)| a * b.conj()).sum();
                    for (a, b) in u.iter_mut().zip(q) {
                        *a -= coeff * b;
                    }
                }
                let len = norm(&u);
                if !(len > RANK_TOL * original.max(f64::MIN_POSITIVE)) {
                    return Err(ErgoError::RankDeficient { sample: s, vector: vi });
                }
                u.iter_mut().for_each(|a| *a /= len);
                basis.push(u);
            }
            Ok(basis)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn samples() -> Vec<StatePoint> {
        vec![StatePoint::circle(0.1), StatePoint::circle(0.7)]
    }

    #[test]
    fn orthonormal_frame_is_unchanged() {
        let frame = vec![
            Observable::constant(vec![c(0.0), Complex64::new(0.0, 1.0)]),
            Observable::constant(vec![c(1.0), c(0.0)]),
        ];
        let out = pointwise_gram_schmidt(&frame, &samples()).unwrap();
        for per in &out {
            assert_eq!(per[0], vec![c(0.0), Complex64::new(0.0, 1.0)]);
            assert_eq!(per[1], vec![c(1.0), c(0.0)]);
        }
    }

    #[test]
    fn hand_computed_frame() {
        let frame = vec![
            Observable::constant(vec![c(1.0), c(0.0)]),
            Observable::constant(vec![c(1.0), c(1.0)]),
        ];
        let out = pointwise_gram_schmidt(&frame, &samples()).unwrap();
        assert_eq!(out[0][0], vec![c(1.0), c(0.0)]);
        assert_eq!(out[0][1], vec![c(0.0), c(1.0)]);
    }

    #[test]
    fn collinear_frame_is_rank_deficient() {
        let frame = vec![
            Observable::constant(vec![c(1.0), c(0.0)]),
            Observable::constant(vec![c(2.0), c(0.0)]),
        ];
        assert!(matches!(
            pointwise_gram_schmidt(&frame, &samples()),
            Err(ErgoError::RankDeficient { sample: 0, vector: 1 })
        ));
    }

    #[test]
    fn point_dependent_frame_is_orthonormal_everywhere() {
        let frame = vec![
            Observable::custom("u", 2, |x, out| {
                let t = x.as_torus().unwrap()[0];
                out[0] = c(1.0 + t);
                out[1] = Complex64::new(0.0, t);
                Ok(())
            }),
            Observable::custom("v", 2, |x, out| {
                let t = x.as_torus().unwrap()[0];
                out[0] = c(t);
                out[1] = c(2.0 - t);
                Ok(())
            }),
        ];
        let out = pointwise_gram_schmidt(&frame, &samples()).unwrap();
        for per in &out {
            for (i, a) in per.iter().enumerate() {
                for (j, b) in per.iter().enumerate() {
                    let ip: Complex64 = a.iter().zip(b).map(|(p, q)| p * q.conj()).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - c(expected)).norm() < 1e-10);
                }
            }
        }
    }
}
