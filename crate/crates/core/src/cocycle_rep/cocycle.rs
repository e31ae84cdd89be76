use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::group::{FiberGroup, GroupElement};
use super::representation::Representation;
use crate::error::{ErgoError, Result};
use crate::koopman::{AverageResult, Observable};
use crate::semigroup::{Character, FolnerBox, SemigroupElement};
use crate::summation::{frac_mul, norm, wrap, VectorSum};
use crate::systems::{walk_lex, DynamicalSystem, StatePoint};

/// Largest `g` coordinate drawn by [`cocycle_check`] for closed-form cocycles.
const CHECK_RANGE_CLOSED: u64 = 10_000;
/// Largest `g` coordinate drawn for cocycles evaluated by walking the orbit.
const CHECK_RANGE_WALKED: u64 = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum CocycleKind {
    /// `γ(g, x) = Π_k c_kᵍᵏ` for pairwise commuting `c_k`.
    Constant { generators: Vec<GroupElement> },
    /// Over a circle rotation by α: `γ(1, x) = k·x`, hence
    /// `γ(n, x) = k (n x + α n(n−1)/2)` in 𝕋.
    TorusExponential { k: i64 },
    /// x-independent values `γ(n, ·) = table[n]` for `n < table.len()`.
    Tabulated { table: Vec<GroupElement> },
    /// Over the alternating subshift: `γ(1, x) = on_plus` if `x₁ = +1`, else `on_minus`.
    CoordinateSwitch {
        on_plus: GroupElement,
        on_minus: GroupElement,
    },
}

/// A continuous cocycle `γ: ℤ₊ᵈ × K → Ω`.
#[derive(Clone, Debug)]
pub struct Cocycle {
    group: FiberGroup,
    kind: CocycleKind,
}

impl Cocycle {
    pub fn identity(group: FiberGroup, dim: usize) -> Self {
        let e = group.identity();
        Self {
            kind: CocycleKind::Constant {
                generators: vec![e; dim.max(1)],
            },
            group,
        }
    }

    pub fn constant(group: FiberGroup, generators: Vec<GroupElement>) -> Result<Self> {
        if generators.is_empty() {
            return Err(ErgoError::invalid("constant cocycle needs one generator per axis"));
        }
        for a in &generators {
            if !group.contains(a) {
                return Err(ErgoError::GroupMismatch(format!("{a} is not in {group}")));
            }
        }
        for a in &generators {
            for b in &generators {
                let ab = group.mul(a, b)?;
                let ba = group.mul(b, a)?;
                if group.distance(&ab, &ba)? > 1e-12 {
                    return Err(ErgoError::invalid("constant cocycle generators must commute"));
                }
            }
        }
        Ok(Self {
            group,
            kind: CocycleKind::Constant { generators },
        })
    }

    pub fn torus_exponential(k: i64) -> Self {
        Self {
            group: FiberGroup::Torus,
            kind: CocycleKind::TorusExponential { k },
        }
    }

    /// Tabulates `n ↦ generatorⁿ` for `n < len`.
    pub fn tabulated(group: FiberGroup, generator: &GroupElement, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(ErgoError::invalid("cocycle table needs at least 2 entries"));
        }
        let table = (0..len as u64)
            .map(|n| group.power(generator, n))
            .collect::<Result<Vec<_>>>()?;
        Self::from_table(group, table)
    }

    pub fn from_table(group: FiberGroup, table: Vec<GroupElement>) -> Result<Self> {
        if let Some(bad) = table.iter().find(|w| !group.contains(w)) {
            return Err(ErgoError::GroupMismatch(format!("{bad} is not in {group}")));
        }
        Ok(Self {
            group,
            kind: CocycleKind::Tabulated { table },
        })
    }

    /// A copy of a tabulated cocycle with entry `n` replaced.
    pub fn with_table_entry(&self, n: usize, value: GroupElement) -> Result<Self> {
        match &self.kind {
            CocycleKind::Tabulated { table } if n < table.len() => {
                let mut table = table.clone();
                table[n] = value;
                Self::from_table(self.group.clone(), table)
            }
            _ => Err(ErgoError::invalid("only tabulated cocycles have table entries")),
        }
    }

    pub fn coordinate_switch(
        group: FiberGroup,
        on_plus: GroupElement,
        on_minus: GroupElement,
    ) -> Result<Self> {
        for a in [&on_plus, &on_minus] {
            if !group.contains(a) {
                return Err(ErgoError::GroupMismatch(format!("{a} is not in {group}")));
            }
        }
        Ok(Self {
            group,
            kind: CocycleKind::CoordinateSwitch { on_plus, on_minus },
        })
    }

    pub fn group(&self) -> &FiberGroup {
        &self.group
    }

    pub fn kind(&self) -> &CocycleKind {
        &self.kind
    }

    pub fn label(&self) -> String {
        match &self.kind {
            CocycleKind::Constant { generators } => {
                let parts: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
                format!("const[{}]", parts.join(","))
            }
            CocycleKind::TorusExponential { k } => format!("torus-exp-{k}"),
            CocycleKind::Tabulated { table } => format!("table[{}]", table.len()),
            CocycleKind::CoordinateSwitch { on_plus, on_minus } => {
                format!("coord-switch[{on_plus},{on_minus}]")
            }
        }
    }

    /// Whether `γ(g, x)` is computed directly rather than by walking the orbit.
    pub fn has_closed_form(&self) -> bool {
        !matches!(self.kind, CocycleKind::CoordinateSwitch { .. })
    }

    pub(crate) fn validate_base(&self, base: &DynamicalSystem) -> Result<()> {
        match &self.kind {
            CocycleKind::Constant { generators } => ErgoError::check_dim(base.dim(), generators.len()),
            CocycleKind::TorusExponential { .. } => match base.as_rotation() {
                Some(r) if r.generators().len() == 1 => Ok(()),
                _ => Err(ErgoError::invalid(
                    "torus-exponential cocycles need a rotation base acted on by ℕ",
                )),
            },
            CocycleKind::Tabulated { .. } => ErgoError::check_dim(1, base.dim()),
            CocycleKind::CoordinateSwitch { .. } => match base {
                DynamicalSystem::Derndinger => Ok(()),
                _ => Err(ErgoError::invalid("coordinate-switch cocycles need the subshift base")),
            },
        }
    }

    fn torus_angle(x: &StatePoint) -> Result<f64> {
        x.as_torus()
            .map(|c| c[0])
            .ok_or_else(|| ErgoError::KindMismatch {
                system: "rotation".into(),
                point: x.kind_name().into(),
            })
    }

    /// `γ(e_axis, x)`.
    pub fn step(&self, base: &DynamicalSystem, axis: usize, x: &StatePoint) -> Result<GroupElement> {
        match &self.kind {
            CocycleKind::Constant { generators } => generators
                .get(axis)
                .cloned()
                .ok_or(ErgoError::IndexOutOfRange {
                    index: axis,
                    dim: generators.len(),
                }),
            CocycleKind::TorusExponential { k } => {
                let t = frac_mul(k.unsigned_abs(), Self::torus_angle(x)?);
                Ok(GroupElement::Torus(if *k < 0 { wrap(-t) } else { t }))
            }
            _ => self.eval(base, &SemigroupElement::unit(base.dim(), axis), x),
        }
    }

    /// `γ(g, x)`.
    pub fn eval(&self, base: &DynamicalSystem, g: &SemigroupElement, x: &StatePoint) -> Result<GroupElement> {
        ErgoError::check_dim(base.dim(), g.dim())?;
        self.eval_coords(base, g.coords(), x)
    }

    /// [`Cocycle::eval`] on raw coordinates of length `base.dim()`.
    pub(crate) fn eval_coords(&self, base: &DynamicalSystem, g: &[u64], x: &StatePoint) -> Result<GroupElement> {
        match &self.kind {
            CocycleKind::Constant { generators } => {
                ErgoError::check_dim(generators.len(), g.len())?;
                let mut acc = self.group.identity();
                for (c, &n) in generators.iter().zip(g) {
                    acc = self.group.mul(&acc, &self.group.power(c, n)?)?;
                }
                Ok(acc)
            }
            CocycleKind::TorusExponential { k } => {
                let alpha = base
                    .as_rotation()
                    .ok_or_else(|| ErgoError::invalid("torus-exponential cocycle needs a rotation base"))?
                    .generators()[0][0];
                let x0 = Self::torus_angle(x)?;
                let n = g[0];
                // exact n(n−1)/2 before multiplying by α
                let tri = if n == 0 { 0 } else { n / 2 * (n - 1) + (n % 2) * ((n - 1) / 2) };
                let angle = wrap(frac_mul(n, x0) + frac_mul(tri, alpha));
                let scaled = frac_mul(k.unsigned_abs(), angle);
                Ok(GroupElement::Torus(if *k < 0 { wrap(-scaled) } else { scaled }))
            }
            CocycleKind::Tabulated { table } => {
                let n = g[0];
                table.get(n as usize).cloned().ok_or_else(|| {
                    ErgoError::UndefinedCocycle(format!("g = {} beyond table length {}", g[0], table.len()))
                })
            }
            CocycleKind::CoordinateSwitch { on_plus, on_minus } => {
                let mut p = *x.as_subshift().ok_or_else(|| ErgoError::KindMismatch {
                    system: "derndinger".into(),
                    point: x.kind_name().into(),
                })?;
                let mut acc = self.group.identity();
                for _ in 0..g[0] {
                    let v = if p.coord(1) > 0 { on_plus } else { on_minus };
                    acc = self.group.mul(&acc, v)?;
                    p = p.shifted(1);
                }
                Ok(acc)
            }
        }
    }

    fn check_range(&self) -> Option<u64> {
        match &self.kind {
            CocycleKind::Tabulated { table } => Some(table.len() as u64),
            _ => None,
        }
    }
}

pub fn cocycle_eval(
    gamma: &Cocycle,
    base: &DynamicalSystem,
    g: &SemigroupElement,
    x: &StatePoint,
) -> Result<GroupElement> {
    gamma.eval(base, g, x)
}

/// Largest violation of `γ(g₁ + g₂, x) = γ(g₂, x) γ(g₁, g₂·x)` over seeded random
/// triples, measured with the fiber group's distance.
pub fn cocycle_check(gamma: &Cocycle, base: &DynamicalSystem, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(ErgoError::invalid("cocycle check needs at least one trial"));
    }
    gamma.validate_base(base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = base.dim();
    let range = if gamma.has_closed_form() {
        CHECK_RANGE_CLOSED
    } else {
        CHECK_RANGE_WALKED
    };
    let group = gamma.group();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let (g1, g2) = match gamma.check_range() {
            Some(len) => {
                let total = rng.gen_range(0..len);
                let second = rng.gen_range(0..=total);
                (vec![total - second], vec![second])
            }
            None => (
                (0..d).map(|_| rng.gen_range(0..range)).collect(),
                (0..d).map(|_| rng.gen_range(0..range)).collect(),
            ),
        };
        let g1 = SemigroupElement::new(g1)?;
        let g2 = SemigroupElement::new(g2)?;
        let x = base.random_point(&mut rng)?;
        let lhs = gamma.eval(base, &g1.compose(&g2)?, &x)?;
        let rhs = group.mul(
            &gamma.eval(base, &g2, &x)?,
            &gamma.eval(base, &g1, &base.act(&g2, &x)?)?,
        )?;
        worst = worst.max(group.distance(&lhs, &rhs)?);
    }
    Ok(worst)
}

/// Cocycle-twisted Cesàro averages
/// `1/|F_n| Σ_{g ∈ F_n} π(γ(g, x)) f(g·x)` at every sample point.
///
/// With `rep = None` the cocycle must take values in U(N) and acts through the
/// defining representation.
pub fn twisted_average(
    sys: &DynamicalSystem,
    f: &Observable,
    gamma: &Cocycle,
    rep: Option<&Representation>,
    window: &FolnerBox,
    samples: &[StatePoint],
) -> Result<AverageResult> {
    if samples.is_empty() {
        return Err(ErgoError::invalid("twisted average needs at least one sample"));
    }
    ErgoError::check_dim(sys.dim(), window.dim())?;
    gamma.validate_base(sys)?;
    let defining;
    let rep = match rep {
        Some(r) => {
            r.check_group(gamma.group())?;
            r
        }
        None => match gamma.group() {
            FiberGroup::Unitary(n) => {
                defining = Representation::defining(*n);
                &defining
            }
            other => {
                return Err(ErgoError::GroupMismatch(format!(
                    "cocycle into {other} needs a representation"
                )))
            }
        },
    };
    let n = rep.dim();
    ErgoError::check_dim(n, f.dim())?;
    for x in samples {
        sys.validate_point(x)?;
    }
    let count = window.cardinality() as f64;
    let group = gamma.group();

    let per_sample = samples
        .par_iter()
        .map(|x| -> Result<(Vec<Complex64>, f64)> {
            let mut acc = VectorSum::new(n);
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            let mut visited: f64 = 0.0;
            let mut summand = |point: &StatePoint, w: &GroupElement| -> Result<()> {
                f.eval_into(point, &mut buf)?;
                visited = visited.max(norm(&buf));
                rep.apply(w, &buf, &mut out)?;
                acc.add(&out);
                Ok(())
            };
            if gamma.has_closed_form() {
                walk_lex(
                    sys.dim(),
                    window.side(),
                    x.clone(),
                    &mut |axis, p: &mut StatePoint| sys.step_in_place(axis, p),
                    &mut |g, p: &StatePoint| {
                        let w = gamma.eval_coords(sys, g, x)?;
                        summand(p, &w)
                    },
                )?;
            } else {
                walk_lex(
                    sys.dim(),
                    window.side(),
                    (x.clone(), group.identity()),
                    &mut |axis, (p, w): &mut (StatePoint, GroupElement)| {
                        let step = gamma.step(sys, axis, p)?;
                        *w = group.mul(w, &step)?;
                        sys.step_in_place(axis, p)
                    },
                    &mut |_, (p, w): &(StatePoint, GroupElement)| summand(p, w),
                )?;
            }
            Ok((acc.mean(count), visited))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut result = AverageResult::assemble(
        sys,
        f,
        Character::trivial(sys.dim()),
        *window,
        samples,
        per_sample,
    )?;
    result.twist = Some(format!("{}@{}", rep.label(), gamma.label()));
    Ok(result)
}
