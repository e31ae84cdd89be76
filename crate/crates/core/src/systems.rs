//! State points and the catalog of compact dynamical systems.
//!
//! Three kinds of system are available: rotations of a torus by one vector per
//! generator of ℤ₊ᵈ, the alternating subshift `K = {±x⁽ⁱ⁾}` under the left
//! shift, and skew products `g·(x, ω) = (g·x, ω γ(g, x))` over either of them.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::cocycle_rep::{Cocycle, FiberGroup, GroupElement};
use crate::error::{ErgoError, Result};
use crate::semigroup::SemigroupElement;
use crate::summation::{frac_mul, wrap};

/// Number of coordinates compared by [`subshift_metric`].
pub const METRIC_DEPTH: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// The point `sign · x⁽ⁱⁿᵈᵉˣ⁾` of the alternating subshift, where
/// `x⁽ⁱ⁾_n = (−1)ⁿ` for `n < i` and `(−1)ⁿ⁺¹` for `n ≥ i`.
///
/// The limit point `lim x⁽ⁱ⁾ = −x⁽¹⁾` is `(Minus, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubshiftPoint {
    sign: Sign,
    index: u64,
}

impl SubshiftPoint {
    pub fn new(sign: Sign, index: u64) -> Result<Self> {
        if index == 0 {
            return Err(ErgoError::invalid("subshift index starts at 1"));
        }
        Ok(Self { sign, index })
    }

    pub fn plus(index: u64) -> Self {
        Self {
            sign: Sign::Plus,
            index: index.max(1),
        }
    }

    pub fn minus(index: u64) -> Self {
        Self {
            sign: Sign::Minus,
            index: index.max(1),
        }
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Coordinate `n ≥ 1` of the underlying ±1 sequence.
    #[inline]
    pub fn coord(&self, n: u64) -> i8 {
        let base_odd = if n < self.index { n % 2 == 1 } else { n % 2 == 0 };
        let base = if base_odd { -1 } else { 1 };
        base * self.sign.value()
    }

    /// The left shift applied `steps` times: `φ(s x⁽ⁱ⁾) = −s x⁽ᵐᵃˣ⁽ⁱ⁻¹,¹⁾⁾`.
    #[inline]
    pub fn shifted(&self, steps: u64) -> Self {
        let sign = if steps % 2 == 1 { self.sign.flip() } else { self.sign };
        let index = if self.index > steps { self.index - steps } else { 1 };
        Self { sign, index }
    }
}

impl fmt::Display for SubshiftPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{s}x{}", self.index)
    }
}

/// Coordinate `n` of a subshift point; `n` counts from 1.
pub fn subshift_coord(x: &SubshiftPoint, n: u64) -> Result<i8> {
    if n == 0 {
        return Err(ErgoError::invalid("subshift coordinates are indexed from 1"));
    }
    Ok(x.coord(n))
}

/// Product-topology distance `Σ_{n ≤ 64} 2⁻ⁿ |x_n − y_n| / 2`.
pub fn subshift_metric(x: &SubshiftPoint, y: &SubshiftPoint) -> f64 {
    let mut mask: u64 = 0;
    for n in 1..=METRIC_DEPTH {
        if x.coord(n) != y.coord(n) {
            mask |= 1u64 << (METRIC_DEPTH - n);
        }
    }
    // mask / 2^64, rounded once
    mask as f64 * 2f64.powi(-(METRIC_DEPTH as i32))
}

/// A point of one of the catalogued state spaces.
#[derive(Clone, Debug, PartialEq)]
pub enum StatePoint {
    /// Torus coordinates, each in `[0, 1)`.
    Torus(Vec<f64>),
    Subshift(SubshiftPoint),
    Product(Box<StatePoint>, GroupElement),
}

impl StatePoint {
    /// A torus point with coordinates reduced mod 1.
    pub fn torus(coords: Vec<f64>) -> Self {
        StatePoint::Torus(coords.into_iter().map(wrap).collect())
    }

    pub fn circle(x: f64) -> Self {
        StatePoint::Torus(vec![wrap(x)])
    }

    pub fn product(base: StatePoint, fiber: GroupElement) -> Self {
        StatePoint::Product(Box::new(base), fiber)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            StatePoint::Torus(_) => "torus",
            StatePoint::Subshift(_) => "subshift",
            StatePoint::Product(..) => "product",
        }
    }

    pub fn as_torus(&self) -> Option<&[f64]> {
        match self {
            StatePoint::Torus(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_subshift(&self) -> Option<&SubshiftPoint> {
        match self {
            StatePoint::Subshift(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_product(&self) -> Option<(&StatePoint, &GroupElement)> {
        match self {
            StatePoint::Product(b, w) => Some((b, w)),
            _ => None,
        }
    }
}

impl fmt::Display for StatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatePoint::Torus(c) => {
                let parts: Vec<String> = c.iter().map(|v| format!("{v:.17e}")).collect();
                write!(f, "T({})", parts.join(";"))
            }
            StatePoint::Subshift(p) => write!(f, "{p}"),
            StatePoint::Product(b, w) => write!(f, "({b}|{w})"),
        }
    }
}

/// Rotation of `𝕋ᵐ`: generator `k` of ℤ₊ᵈ translates by `generators[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    generators: Vec<Vec<f64>>,
    uniquely_ergodic: bool,
}

impl Rotation {
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn torus_dim(&self) -> usize {
        self.generators[0].len()
    }
}

#[derive(Clone, Debug)]
pub struct SkewProduct {
    base: DynamicalSystem,
    cocycle: Cocycle,
}

impl SkewProduct {
    pub fn base(&self) -> &DynamicalSystem {
        &self.base
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn group(&self) -> &FiberGroup {
        self.cocycle.group()
    }
}

#[derive(Clone, Debug)]
pub enum DynamicalSystem {
    Rotation(Rotation),
    /// The alternating subshift under the left shift (an ℕ-action).
    Derndinger,
    SkewProduct(Arc<SkewProduct>),
}

impl DynamicalSystem {
    /// A torus rotation. `uniquely_ergodic` is a declared catalog attribute
    /// (floating-point vectors cannot certify rational independence).
    pub fn rotation(generators: Vec<Vec<f64>>, uniquely_ergodic: bool) -> Result<Self> {
        let m = generators.first().map(Vec::len).unwrap_or(0);
        if generators.is_empty() || m == 0 {
            return Err(ErgoError::invalid("rotation needs at least one nonempty generator"));
        }
        for g in &generators {
            ErgoError::check_dim(m, g.len())?;
            if g.iter().any(|a| !a.is_finite()) {
                return Err(ErgoError::invalid("rotation angles must be finite"));
            }
        }
        let generators = generators
            .into_iter()
            .map(|g| g.into_iter().map(wrap).collect())
            .collect();
        Ok(DynamicalSystem::Rotation(Rotation {
            generators,
            uniquely_ergodic,
        }))
    }

    /// Circle rotation `x ↦ x + α` as an ℕ-action.
    pub fn circle_rotation(alpha: f64, uniquely_ergodic: bool) -> Result<Self> {
        Self::rotation(vec![vec![alpha]], uniquely_ergodic)
    }

    /// Rotation by the golden mean conjugate `(√5 − 1)/2`.
    pub fn golden_rotation() -> Self {
        Self::circle_rotation(golden_alpha(), true).expect("valid rotation")
    }

    pub fn derndinger() -> Self {
        DynamicalSystem::Derndinger
    }

    pub fn skew_product(base: DynamicalSystem, cocycle: Cocycle) -> Result<Self> {
        cocycle.validate_base(&base)?;
        Ok(DynamicalSystem::SkewProduct(Arc::new(SkewProduct {
            base,
            cocycle,
        })))
    }

    /// The Anzai skew product `(x, ω) ↦ (x + α, ω + x)` on 𝕋².
    pub fn anzai(alpha: f64, uniquely_ergodic: bool) -> Result<Self> {
        let base = Self::circle_rotation(alpha, uniquely_ergodic)?;
        Self::skew_product(base, Cocycle::torus_exponential(1))
    }

    /// Dimension `d` of the acting semigroup ℤ₊ᵈ.
    pub fn dim(&self) -> usize {
        match self {
            DynamicalSystem::Rotation(r) => r.generators.len(),
            DynamicalSystem::Derndinger => 1,
            DynamicalSystem::SkewProduct(s) => s.base.dim(),
        }
    }

    pub fn id(&self) -> String {
        match self {
            DynamicalSystem::Rotation(_) => "rotation".to_string(),
            DynamicalSystem::Derndinger => "derndinger".to_string(),
            DynamicalSystem::SkewProduct(s) => {
                format!("skew({};{})", s.base.id(), s.cocycle.label())
            }
        }
    }

    pub fn as_rotation(&self) -> Option<&Rotation> {
        match self {
            DynamicalSystem::Rotation(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_skew(&self) -> Option<&SkewProduct> {
        match self {
            DynamicalSystem::SkewProduct(s) => Some(s),
            _ => None,
        }
    }

    /// Catalog attribute; for skew products this is never asserted.
    pub fn is_uniquely_ergodic(&self) -> bool {
        match self {
            DynamicalSystem::Rotation(r) => r.uniquely_ergodic,
            DynamicalSystem::Derndinger => true,
            DynamicalSystem::SkewProduct(_) => false,
        }
    }

    fn mismatch(&self, x: &StatePoint) -> ErgoError {
        ErgoError::KindMismatch {
            system: self.id(),
            point: x.kind_name().to_string(),
        }
    }

    /// Checks that `x` lies in this system's state space.
    pub fn validate_point(&self, x: &StatePoint) -> Result<()> {
        match (self, x) {
            (DynamicalSystem::Rotation(r), StatePoint::Torus(c)) => {
                ErgoError::check_dim(r.torus_dim(), c.len())?;
                if c.iter().all(|v| (0.0..1.0).contains(v)) {
                    Ok(())
                } else {
                    Err(ErgoError::invalid("torus coordinates must lie in [0, 1)"))
                }
            }
            (DynamicalSystem::Derndinger, StatePoint::Subshift(_)) => Ok(()),
            (DynamicalSystem::SkewProduct(s), StatePoint::Product(b, w)) => {
                s.base.validate_point(b)?;
                if s.group().contains(w) {
                    Ok(())
                } else {
                    Err(ErgoError::invalid(format!("fiber element {w} is not in {}", s.group())))
                }
            }
            _ => Err(self.mismatch(x)),
        }
    }

    /// The image `g·x`.
    pub fn act(&self, g: &SemigroupElement, x: &StatePoint) -> Result<StatePoint> {
        ErgoError::check_dim(self.dim(), g.dim())?;
        match (self, x) {
            (DynamicalSystem::Rotation(r), StatePoint::Torus(c)) => {
                ErgoError::check_dim(r.torus_dim(), c.len())?;
                let coords = c
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let mut t = v;
                        for (&gk, gen) in g.coords().iter().zip(&r.generators) {
                            t = wrap(t + frac_mul(gk, gen[i]));
                        }
                        t
                    })
                    .collect();
                Ok(StatePoint::Torus(coords))
            }
            (DynamicalSystem::Derndinger, StatePoint::Subshift(p)) => {
                Ok(StatePoint::Subshift(p.shifted(g.coords()[0])))
            }
            (DynamicalSystem::SkewProduct(s), StatePoint::Product(b, w)) => {
                let gamma = s.cocycle.eval(&s.base, g, b)?;
                let fiber = s.group().mul(w, &gamma)?;
                Ok(StatePoint::product(s.base.act(g, b)?, fiber))
            }
            _ => Err(self.mismatch(x)),
        }
    }

    /// The image of `x` under the generator `e_axis`.
    pub fn step(&self, axis: usize, x: &StatePoint) -> Result<StatePoint> {
        let mut y = x.clone();
        self.step_in_place(axis, &mut y)?;
        Ok(y)
    }

    /// Replaces `x` by its image under the generator `e_axis`.
    pub fn step_in_place(&self, axis: usize, x: &mut StatePoint) -> Result<()> {
        if axis >= self.dim() {
            return Err(ErgoError::IndexOutOfRange {
                index: axis,
                dim: self.dim(),
            });
        }
        match self {
            DynamicalSystem::Rotation(r) => match x {
                StatePoint::Torus(c) => {
                    ErgoError::check_dim(r.torus_dim(), c.len())?;
                    for (v, a) in c.iter_mut().zip(&r.generators[axis]) {
                        *v = wrap(*v + a);
                    }
                    Ok(())
                }
                _ => Err(self.mismatch(x)),
            },
            DynamicalSystem::Derndinger => match x {
                StatePoint::Subshift(p) => {
                    *p = p.shifted(1);
                    Ok(())
                }
                _ => Err(self.mismatch(x)),
            },
            DynamicalSystem::SkewProduct(s) => match x {
                StatePoint::Product(b, w) => {
                    let gamma = s.cocycle.step(&s.base, axis, b)?;
                    *w = s.group().mul(w, &gamma)?;
                    s.base.step_in_place(axis, b)
                }
                _ => Err(self.mismatch(x)),
            },
        }
    }

    /// Distance between two points of the state space.
    pub fn metric(&self, x: &StatePoint, y: &StatePoint) -> Result<f64> {
        match (self, x, y) {
            (DynamicalSystem::Rotation(_), StatePoint::Torus(a), StatePoint::Torus(b)) => {
                ErgoError::check_dim(a.len(), b.len())?;
                Ok(a.iter()
                    .zip(b)
                    .map(|(u, v)| {
                        let d = (u - v).abs();
                        let d = d.min(1.0 - d);
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt())
            }
            (DynamicalSystem::Derndinger, StatePoint::Subshift(a), StatePoint::Subshift(b)) => {
                Ok(subshift_metric(a, b))
            }
            (
                DynamicalSystem::SkewProduct(s),
                StatePoint::Product(xb, xw),
                StatePoint::Product(yb, yw),
            ) => Ok(s.base.metric(xb, yb)? + s.group().distance(xw, yw)?),
            _ => Err(self.mismatch(if matches!(x, StatePoint::Product(..)) { y } else { x })),
        }
    }

    /// A random point; subshift indices are drawn from `1..=128`.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<StatePoint> {
        match self {
            DynamicalSystem::Rotation(r) => Ok(StatePoint::Torus(
                (0..r.torus_dim()).map(|_| rng.gen::<f64>()).collect(),
            )),
            DynamicalSystem::Derndinger => {
                let sign = if rng.gen::<bool>() { Sign::Plus } else { Sign::Minus };
                Ok(StatePoint::Subshift(SubshiftPoint::new(sign, rng.gen_range(1..=128))?))
            }
            DynamicalSystem::SkewProduct(s) => Ok(StatePoint::product(
                s.base.random_point(rng)?,
                s.group().random_element(rng)?,
            )),
        }
    }
}

/// `(√5 − 1)/2`.
pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// `[x, g·x, (2g)·x, …]` of length `count`, built by repeated application of `g`.
pub fn orbit(
    sys: &DynamicalSystem,
    x: &StatePoint,
    g_step: &SemigroupElement,
    count: usize,
) -> Result<Vec<StatePoint>> {
    if count == 0 {
        return Err(ErgoError::invalid("orbit length must be at least 1"));
    }
    sys.validate_point(x)?;
    let mut out = Vec::with_capacity(count);
    out.push(x.clone());
    for _ in 1..count {
        let next = sys.act(g_step, out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Walks `{0, …, side−1}ᵈ` in lexicographic order (last axis fastest),
/// carrying a state that is advanced in place one generator at a time.
///
/// Each box element costs one `step` call, so the walk performs `O(sideᵈ)`
/// steps with no recomputation.
pub(crate) fn walk_lex<S, St, V>(
    dim: usize,
    side: u64,
    start: S,
    step: &mut St,
    visit: &mut V,
) -> Result<()>
where
    S: Clone,
    St: FnMut(usize, &mut S) -> Result<()>,
    V: FnMut(&[u64], &S) -> Result<()>,
{
    let mut g = vec![0u64; dim];
    walk_axis(0, dim, side, start, &mut g, step, visit)
}

fn walk_axis<S, St, V>(
    axis: usize,
    dim: usize,
    side: u64,
    start: S,
    g: &mut Vec<u64>,
    step: &mut St,
    visit: &mut V,
) -> Result<()>
where
    S: Clone,
    St: FnMut(usize, &mut S) -> Result<()>,
    V: FnMut(&[u64], &S) -> Result<()>,
{
    let mut cur = start;
    for j in 0..side {
        g[axis] = j;
        if axis + 1 == dim {
            visit(g, &cur)?;
        } else {
            walk_axis(axis + 1, dim, side, cur.clone(), g, step, visit)?;
        }
        if j + 1 < side {
            step(axis, &mut cur)?;
        }
    }
    g[axis] = 0;
    Ok(())
}

/// All points `g·x` for `g` in the box `{0, …, side−1}ᵈ`, in lexicographic order.
pub fn box_orbit(sys: &DynamicalSystem, x: &StatePoint, side: u64) -> Result<Vec<StatePoint>> {
    sys.validate_point(x)?;
    let mut out = Vec::new();
    walk_lex(
        sys.dim(),
        side,
        x.clone(),
        &mut |axis, p: &mut StatePoint| sys.step_in_place(axis, p),
        &mut |_, p: &StatePoint| {
            out.push(p.clone());
            Ok(())
        },
    )?;
    Ok(out)
}
