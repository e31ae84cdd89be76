use nalgebra::DMatrix;
use num_complex::Complex64;

use super::group::{FiberGroup, GroupElement, GroupTag};
use super::unitary::UnitaryMatrix;
use crate::error::{ErgoError, Result};
use crate::koopman::Observable;
use crate::skew_ergodic::haar_average;
use crate::summation::{turns, wrap};

#[derive(Clone, Debug, PartialEq)]
enum RepKind {
    /// One matrix per element of a finite group.
    Matrices(Vec<UnitaryMatrix>),
    /// `ω ↦ e^{2πikω}` on 𝕋.
    TorusCharacter(i64),
    /// `U ↦ U` on U(N).
    Defining,
}

/// A finite-dimensional unitary representation `π: Ω → U(N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    label: String,
    group: GroupTag,
    dim: usize,
    kind: RepKind,
}

impl Representation {
    pub(crate) fn from_matrices(label: &str, group: GroupTag, matrices: Vec<UnitaryMatrix>) -> Self {
        Self {
            label: label.to_string(),
            group,
            dim: matrices[0].dim(),
            kind: RepKind::Matrices(matrices),
        }
    }

    pub fn torus_character(k: i64) -> Self {
        Self {
            label: format!("chi{k}"),
            group: GroupTag::Torus,
            dim: 1,
            kind: RepKind::TorusCharacter(k),
        }
    }

    pub fn defining(n: usize) -> Self {
        Self {
            label: format!("U{n}"),
            group: GroupTag::Unitary(n),
            dim: n,
            kind: RepKind::Defining,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> &GroupTag {
        &self.group
    }

    /// Whether this is the trivial one-dimensional representation.
    pub fn is_trivial(&self) -> bool {
        match &self.kind {
            RepKind::Matrices(ms) => {
                self.dim == 1 && ms.iter().all(|m| m.entry(0, 0) == Complex64::new(1.0, 0.0))
            }
            RepKind::TorusCharacter(k) => *k == 0,
            RepKind::Defining => false,
        }
    }

    fn foreign(&self, w: &GroupElement) -> ErgoError {
        ErgoError::GroupMismatch(format!(
            "representation `{}` of {} evaluated at {w}",
            self.label, self.group
        ))
    }

    pub fn eval(&self, w: &GroupElement) -> Result<UnitaryMatrix> {
        match (&self.kind, w) {
            (RepKind::Matrices(ms), GroupElement::Finite(i)) => {
                ms.get(*i).cloned().ok_or_else(|| self.foreign(w))
            }
            (RepKind::TorusCharacter(k), GroupElement::Torus(t)) => {
                Ok(UnitaryMatrix::scalar(turns(wrap(*k as f64 * t)))?)
            }
            (RepKind::Defining, GroupElement::Unitary(u)) if u.dim() == self.dim => Ok(u.clone()),
            _ => Err(self.foreign(w)),
        }
    }

    /// `out = π(w) v` without allocating.
    #[inline]
    pub fn apply(&self, w: &GroupElement, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        match (&self.kind, w) {
            (RepKind::Matrices(ms), GroupElement::Finite(i)) => {
                ms.get(*i).ok_or_else(|| self.foreign(w))?.apply(v, out);
                Ok(())
            }
            (RepKind::TorusCharacter(k), GroupElement::Torus(t)) => {
                out[0] = turns(wrap(*k as f64 * t)) * v[0];
                Ok(())
            }
            (RepKind::Defining, GroupElement::Unitary(u)) if u.dim() == self.dim => {
                u.apply(v, out);
                Ok(())
            }
            _ => Err(self.foreign(w)),
        }
    }

    pub(crate) fn check_group(&self, group: &FiberGroup) -> Result<()> {
        if &group.tag() == self.group() {
            Ok(())
        } else {
            Err(ErgoError::GroupMismatch(format!(
                "representation `{}` lives on {}, not on {group}",
                self.label, self.group
            )))
        }
    }
}

/// The matrix element `ω ↦ π_ij(ω) = ⟨π(ω) e_i, e_j⟩` (0-based indices).
#[derive(Clone, Debug)]
pub struct MatrixElement {
    rep: Representation,
    i: usize,
    j: usize,
}

impl MatrixElement {
    pub fn eval(&self, w: &GroupElement) -> Result<Complex64> {
        Ok(self.rep.eval(w)?.entry(self.j, self.i))
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// The function `(x, ω) ↦ π_ij(ω)` on a skew-product space.
    pub fn on_fiber(&self) -> Observable {
        let me = self.clone();
        Observable::fiber_function(
            &format!("{}[{},{}]", self.rep.label(), self.i, self.j),
            move |w| me.eval(w),
        )
    }
}

pub fn matrix_element(rep: &Representation, i: usize, j: usize) -> Result<MatrixElement> {
    for idx in [i, j] {
        if idx >= rep.dim() {
            return Err(ErgoError::IndexOutOfRange {
                index: idx,
                dim: rep.dim(),
            });
        }
    }
    Ok(MatrixElement {
        rep: rep.clone(),
        i,
        j,
    })
}

/// Largest deviation of `∫ π_ij ρ̄_kl dη` from `δ_{πρ} δ_ik δ_jl / N` over all
/// index quadruples. Finite groups are summed exactly; 𝕋 uses the Haar grid.
pub fn schur_check(pi: &Representation, rho: &Representation, group: &FiberGroup) -> Result<f64> {
    pi.check_group(group)?;
    rho.check_group(group)?;
    let same = pi == rho;
    let (n, m) = (pi.dim(), rho.dim());
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    let integral = haar_average(group, 1, |w| {
                        let a = pi.eval(w)?.entry(j, i);
                        let b = rho.eval(w)?.entry(l, k);
                        Ok(vec![a * b.conj()])
                    })?[0];
                    let expected = if same && i == k && j == l { 1.0 / n as f64 } else { 0.0 };
                    worst = worst.max((integral - Complex64::new(expected, 0.0)).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Dense matrix of `π(ω)` entries, used by serializers.
pub(crate) fn rep_matrices(rep: &Representation) -> Option<Vec<DMatrix<Complex64>>> {
    match &rep.kind {
        RepKind::Matrices(ms) => Some(ms.iter().map(|m| m.matrix().clone()).collect()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle_rep::FiniteGroup;

    #[test]
    fn matrix_element_examples() {
        let z1 = FiniteGroup::cyclic(1).unwrap();
        let triv = matrix_element(&z1.irreps()[0], 0, 0).unwrap();
        assert_eq!(triv.eval(&GroupElement::Finite(0)).unwrap(), Complex64::new(1.0, 0.0));

        let z4 = FiniteGroup::cyclic(4).unwrap();
        let chi1 = matrix_element(z4.irrep("chi1").unwrap(), 0, 0).unwrap();
        assert_eq!(chi1.eval(&GroupElement::Finite(1)).unwrap(), Complex64::new(0.0, 1.0));

        let s3 = FiniteGroup::s3();
        let std = s3.irrep("standard").unwrap();
        let p11 = matrix_element(std, 0, 0).unwrap();
        assert_eq!(p11.eval(&GroupElement::Finite(0)).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matrix_element(std, 2, 0).is_err());
        // ⟨π(r) e_0, e_1⟩ is the (1, 0) entry: sin(2π/3)
        let p01 = matrix_element(std, 0, 1).unwrap();
        assert_eq!(p01.eval(&GroupElement::Finite(1)).unwrap().re, 3f64.sqrt() / 2.0);
    }

    #[test]
    fn schur_examples() {
        let z5 = FiberGroup::finite(FiniteGroup::cyclic(5).unwrap());
        let FiberGroup::Finite(g) = &z5 else { unreachable!() };
        let (c0, c1, c2) = (&g.irreps()[0], &g.irreps()[1], &g.irreps()[2]);
        assert!((schur_check(c0, c0, &z5).unwrap()).abs() < 1e-15);
        assert!(schur_check(c1, c2, &z5).unwrap() < 1e-15);

        let s3 = FiberGroup::finite(FiniteGroup::s3());
        let FiberGroup::Finite(g) = &s3 else { unreachable!() };
        let std = g.irrep("standard").unwrap();
        // ∫|π_11|² = 1/2 by a 6-term sum
        let direct: f64 = (0..6)
            .map(|w| std.eval(&GroupElement::Finite(w)).unwrap().entry(0, 0).norm_sqr())
            .sum::<f64>()
            / 6.0;
        assert!((direct - 0.5).abs() < 1e-15);
        assert!(schur_check(std, std, &s3).unwrap() < 1e-12);
        assert!(schur_check(std, g.irrep("sign").unwrap(), &s3).unwrap() < 1e-12);

        let t = FiberGroup::Torus;
        let a = Representation::torus_character(1);
        let b = Representation::torus_character(3);
        assert!(schur_check(&a, &b, &t).unwrap() < 1e-12);
        assert!(schur_check(&a, &a, &t).unwrap() < 1e-12);
        assert!(matches!(schur_check(&a, std, &t), Err(ErgoError::GroupMismatch(_))));
    }
}
