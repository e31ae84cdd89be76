use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::representation::Representation;
use super::unitary::UnitaryMatrix;
use crate::error::{ErgoError, Result};
use crate::summation::{frac_mul, turns, wrap};

const HOMOMORPHISM_TOL: f64 = 1e-10;

/// A finite group given by its multiplication table, together with a catalog
/// of irreducible unitary representations.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    irreps: Vec<Representation>,
}

impl FiniteGroup {
    /// Validates the group axioms for a row-major `order × order` table.
    pub fn from_table(name: &str, order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(ErgoError::invalid("group order must be positive"));
        }
        ErgoError::check_dim(order * order, table.len())?;
        if let Some(&bad) = table.iter().find(|&&v| v >= order) {
            return Err(ErgoError::invalid(format!("table entry {bad} exceeds order {order}")));
        }
        let at = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or_else(|| ErgoError::invalid(format!("group `{name}` has no identity")))?;
        let mut inverses = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or_else(|| ErgoError::invalid(format!("element {a} of `{name}` has no inverse")))?;
            inverses.push(inv);
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(ErgoError::invalid(format!(
                            "table of `{name}` is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            order,
            table,
            identity,
            inverses,
            irreps: Vec::new(),
        })
    }

    /// Adds an irreducible representation given by one matrix per element.
    pub fn with_irrep(mut self, label: &str, matrices: Vec<UnitaryMatrix>) -> Result<Self> {
        ErgoError::check_dim(self.order, matrices.len())?;
        let dim = matrices[0].dim();
        for m in &matrices {
            ErgoError::check_dim(dim, m.dim())?;
        }
        for a in 0..self.order {
            for b in 0..self.order {
                let lhs = &matrices[self.mul(a, b)];
                let rhs = matrices[a].mul(&matrices[b]);
                if lhs.distance(&rhs) > HOMOMORPHISM_TOL {
                    return Err(ErgoError::invalid(format!(
                        "irrep `{label}` is not a homomorphism at ({a},{b})"
                    )));
                }
            }
        }
        if self.irreps.iter().any(|r| r.label() == label) {
            return Err(ErgoError::invalid(format!("duplicate irrep label `{label}`")));
        }
        let rep = Representation::from_matrices(label, self.tag(), matrices);
        self.irreps.push(rep);
        Ok(self)
    }

    /// ℤ/m with its `m` characters `chi<k>: a ↦ e^{2πi k a / m}`.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(ErgoError::invalid("cyclic group order must be positive"));
        }
        let table = (0..m * m).map(|i| (i / m + i % m) % m).collect();
        let mut g = Self::from_table(&format!("Z{m}"), m, table)?;
        for k in 0..m {
            let matrices = (0..m)
                .map(|a| UnitaryMatrix::scalar(turns(((k * a) % m) as f64 / m as f64)))
                .collect::<Result<Vec<_>>>()?;
            g = g.with_irrep(&format!("chi{k}"), matrices)?;
        }
        Ok(g)
    }

    /// The symmetric group S₃. Element `a + 3b` is `rᵃ sᵇ` with `r` a 3-cycle,
    /// `s` a transposition and `s r = r⁻¹ s`. Irreps: `trivial`, `sign`, and the
    /// two-dimensional `standard` representation with entries in
    /// `{0, ±1, ±1/2, ±√3/2}`.
    pub fn s3() -> Self {
        let idx = |a: usize, b: usize| a % 3 + 3 * (b % 2);
        let mut table = vec![0; 36];
        for x in 0..6 {
            for y in 0..6 {
                let (a, b) = (x % 3, x / 3);
                let (c, d) = (y % 3, y / 3);
                let a2 = if b == 0 { a + c } else { a + 3 - c };
                table[x * 6 + y] = idx(a2, b + d);
            }
        }
        let h = 3f64.sqrt() / 2.0;
        let cs = [(1.0, 0.0), (-0.5, h), (-0.5, -h)];
        let re = |v: f64| Complex64::new(v, 0.0);
        let mut standard = Vec::with_capacity(6);
        let mut sign = Vec::with_capacity(6);
        for x in 0..6 {
            let (a, b) = (x % 3, x / 3);
            let (c, s) = cs[a];
            let rows = if b == 0 {
                [re(c), re(-s), re(s), re(c)]
            } else {
                [re(c), re(s), re(s), re(-c)]
            };
            standard.push(UnitaryMatrix::from_rows(2, &rows).expect("rotation/reflection"));
            sign.push(UnitaryMatrix::scalar(re(if b == 0 { 1.0 } else { -1.0 })).expect("±1"));
        }
        let trivial = vec![UnitaryMatrix::identity(1); 6];
        Self::from_table("S3", 6, table)
            .and_then(|g| g.with_irrep("trivial", trivial))
            .and_then(|g| g.with_irrep("sign", sign))
            .and_then(|g| g.with_irrep("standard", standard))
            .expect("S3 catalog is consistent")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn power(&self, a: usize, mut n: u64) -> usize {
        let mut result = self.identity;
        let mut base = a;
        while n > 0 {
            if n & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        result
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn irreps(&self) -> &[Representation] {
        &self.irreps
    }

    pub fn irrep(&self, label: &str) -> Option<&Representation> {
        self.irreps.iter().find(|r| r.label() == label)
    }

    pub fn tag(&self) -> GroupTag {
        GroupTag::Finite {
            name: self.name.clone(),
            order: self.order,
        }
    }
}

/// Identifies the group a representation or cocycle lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupTag {
    Finite { name: String, order: usize },
    Torus,
    Unitary(usize),
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::Finite { name, .. } => write!(f, "{name}"),
            GroupTag::Torus => write!(f, "T"),
            GroupTag::Unitary(n) => write!(f, "U({n})"),
        }
    }
}

/// An element of a fiber group.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    /// Index into a finite group's table.
    Finite(usize),
    /// Angle in `[0, 1)` on the circle group.
    Torus(f64),
    Unitary(UnitaryMatrix),
}

impl GroupElement {
    pub fn torus(angle: f64) -> Self {
        GroupElement::Torus(wrap(angle))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Finite(i) => write!(f, "g{i}"),
            GroupElement::Torus(t) => write!(f, "{t:.17e}"),
            GroupElement::Unitary(u) => write!(f, "U{}", u.dim()),
        }
    }
}

/// A compact fiber group Ω.
#[derive(Clone, Debug)]
pub enum FiberGroup {
    Finite(Arc<FiniteGroup>),
    /// The circle group 𝕋 = ℝ/ℤ written additively in angles.
    Torus,
    /// The unitary group U(N).
    Unitary(usize),
}

impl fmt::Display for FiberGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

impl FiberGroup {
    pub fn finite(group: FiniteGroup) -> Self {
        FiberGroup::Finite(Arc::new(group))
    }

    pub fn tag(&self) -> GroupTag {
        match self {
            FiberGroup::Finite(g) => g.tag(),
            FiberGroup::Torus => GroupTag::Torus,
            FiberGroup::Unitary(n) => GroupTag::Unitary(*n),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            FiberGroup::Finite(g) => GroupElement::Finite(g.identity()),
            FiberGroup::Torus => GroupElement::Torus(0.0),
            FiberGroup::Unitary(n) => GroupElement::Unitary(UnitaryMatrix::identity(*n)),
        }
    }

    pub fn contains(&self, w: &GroupElement) -> bool {
        match (self, w) {
            (FiberGroup::Finite(g), GroupElement::Finite(i)) => *i < g.order(),
            (FiberGroup::Torus, GroupElement::Torus(t)) => (0.0..1.0).contains(t),
            (FiberGroup::Unitary(n), GroupElement::Unitary(u)) => u.dim() == *n,
            _ => false,
        }
    }

    fn foreign(&self, w: &GroupElement) -> ErgoError {
        ErgoError::GroupMismatch(format!("element {w} is not in {self}"))
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        match (self, a, b) {
            (FiberGroup::Finite(g), GroupElement::Finite(x), GroupElement::Finite(y))
                if *x < g.order() && *y < g.order() =>
            {
                Ok(GroupElement::Finite(g.mul(*x, *y)))
            }
            (FiberGroup::Torus, GroupElement::Torus(x), GroupElement::Torus(y)) => {
                Ok(GroupElement::Torus(wrap(x + y)))
            }
            (FiberGroup::Unitary(n), GroupElement::Unitary(x), GroupElement::Unitary(y))
                if x.dim() == *n && y.dim() == *n =>
            {
                Ok(GroupElement::Unitary(x.mul(y)))
            }
            _ => Err(self.foreign(if self.contains(a) { b } else { a })),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        match (self, a) {
            (FiberGroup::Finite(g), GroupElement::Finite(x)) if *x < g.order() => {
                Ok(GroupElement::Finite(g.inverse(*x)))
            }
            (FiberGroup::Torus, GroupElement::Torus(x)) => Ok(GroupElement::Torus(wrap(-x))),
            (FiberGroup::Unitary(n), GroupElement::Unitary(u)) if u.dim() == *n => {
                Ok(GroupElement::Unitary(u.adjoint()))
            }
            _ => Err(self.foreign(a)),
        }
    }

    pub fn power(&self, a: &GroupElement, n: u64) -> Result<GroupElement> {
        match (self, a) {
            (FiberGroup::Finite(g), GroupElement::Finite(x)) if *x < g.order() => {
                Ok(GroupElement::Finite(g.power(*x, n)))
            }
            (FiberGroup::Torus, GroupElement::Torus(x)) => Ok(GroupElement::Torus(frac_mul(n, *x))),
            (FiberGroup::Unitary(d), GroupElement::Unitary(u)) if u.dim() == *d => {
                Ok(GroupElement::Unitary(u.power(n)))
            }
            _ => Err(self.foreign(a)),
        }
    }

    /// Distance on Ω: discrete metric on finite groups, chordal distance
    /// `|e^{2πia} − e^{2πib}|` on 𝕋, Frobenius distance on U(N).
    pub fn distance(&self, a: &GroupElement, b: &GroupElement) -> Result<f64> {
        match (self, a, b) {
            (FiberGroup::Finite(_), GroupElement::Finite(x), GroupElement::Finite(y)) => {
                Ok(if x == y { 0.0 } else { 1.0 })
            }
            (FiberGroup::Torus, GroupElement::Torus(x), GroupElement::Torus(y)) => {
                Ok((turns(*x) - turns(*y)).norm())
            }
            (FiberGroup::Unitary(_), GroupElement::Unitary(x), GroupElement::Unitary(y)) => {
                Ok(x.distance(y))
            }
            _ => Err(self.foreign(if self.contains(a) { b } else { a })),
        }
    }

    /// A Haar-random element (unsupported for U(N)).
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<GroupElement> {
        match self {
            FiberGroup::Finite(g) => Ok(GroupElement::Finite(rng.gen_range(0..g.order()))),
            FiberGroup::Torus => Ok(GroupElement::Torus(rng.gen::<f64>())),
            FiberGroup::Unitary(_) => Err(ErgoError::invalid("Haar sampling on U(N) is not supported")),
        }
    }

    /// Irreducible representations to probe: the catalog for finite groups, the
    /// characters `ω ↦ e^{2πikω}` for the given `k` on 𝕋, and the defining
    /// representation for U(N).
    pub fn irreps(&self, torus_characters: &[i64]) -> Vec<Representation> {
        match self {
            FiberGroup::Finite(g) => g.irreps().to_vec(),
            FiberGroup::Torus => torus_characters
                .iter()
                .map(|&k| Representation::torus_character(k))
                .collect(),
            FiberGroup::Unitary(n) => vec![Representation::defining(*n)],
        }
    }
}
