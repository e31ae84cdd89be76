//! Observables, Koopman operators and character-weighted Cesàro averages.
//!
//! For a system over ℤ₊ᵈ, a character χ and the box `F_n`,
//!
//! ```text
//! A_n f(x) = 1/|F_n| Σ_{g ∈ F_n} χ(g) f(g·x)
//! ```
//!
//! is evaluated in a single lexicographic walk per sample point. Sums are
//! compensated; uniform convergence on K is approximated by the supremum over
//! the supplied samples.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cocycle_rep::GroupElement;
use crate::error::{ErgoError, Result};
use crate::output::{Cell, Table};
use crate::semigroup::{Character, FolnerBox, SemigroupElement};
use crate::summation::{distance, norm, turns, wrap, VectorSum};
use crate::systems::{walk_lex, DynamicalSystem, StatePoint};

type EvalFn = dyn Fn(&StatePoint, &mut [Complex64]) -> Result<()> + Send + Sync;

/// A continuous ℂᴺ-valued function on a state space.
#[derive(Clone)]
pub struct Observable {
    dim: usize,
    descriptor: String,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("dim", &self.dim)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

fn kind_error(expected: &str, x: &StatePoint) -> ErgoError {
    ErgoError::KindMismatch {
        system: expected.to_string(),
        point: x.kind_name().to_string(),
    }
}

impl Observable {
    pub fn custom<F>(name: &str, dim: usize, eval: F) -> Self
    where
        F: Fn(&StatePoint, &mut [Complex64]) -> Result<()> + Send + Sync + 'static,
    {
        Self {
            dim,
            descriptor: format!("custom:{name}"),
            eval: Arc::new(eval),
        }
    }

    fn tagged<F>(descriptor: String, dim: usize, eval: F) -> Self
    where
        F: Fn(&StatePoint, &mut [Complex64]) -> Result<()> + Send + Sync + 'static,
    {
        Self {
            dim,
            descriptor,
            eval: Arc::new(eval),
        }
    }

    /// The constant function with value `values` on every space.
    pub fn constant(values: Vec<Complex64>) -> Self {
        let descriptor = if values.len() == 1 && values[0] == Complex64::new(1.0, 0.0) {
            "one".to_string()
        } else {
            "const".to_string()
        };
        Self::tagged(descriptor, values.len(), move |_, out| {
            out.copy_from_slice(&values);
            Ok(())
        })
    }

    pub fn one() -> Self {
        Self::constant(vec![Complex64::new(1.0, 0.0)])
    }

    /// `x ↦ e^{2πi k x₀}` on a torus.
    pub fn exp(k: i64) -> Self {
        Self::tagged(format!("exp-{k}"), 1, move |x, out| {
            let c = x.as_torus().ok_or_else(|| kind_error("torus", x))?;
            out[0] = turns(wrap(k as f64 * c[0]));
            Ok(())
        })
    }

    /// `x ↦ x_n`, the `n`-th coordinate of a subshift point (`n ≥ 1`).
    pub fn coord(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(ErgoError::invalid("subshift coordinates are indexed from 1"));
        }
        Ok(Self::tagged(format!("coord-{n}"), 1, move |x, out| {
            let p = x.as_subshift().ok_or_else(|| kind_error("subshift", x))?;
            out[0] = Complex64::new(p.coord(n) as f64, 0.0);
            Ok(())
        }))
    }

    /// A scalar function of the fiber coordinate of a skew-product point.
    pub fn fiber_function<F>(name: &str, h: F) -> Self
    where
        F: Fn(&GroupElement) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self::tagged(format!("fiber:{name}"), 1, move |x, out| {
            let (_, w) = x.as_product().ok_or_else(|| kind_error("skew product", x))?;
            out[0] = h(w)?;
            Ok(())
        })
    }

    /// `(x, ω) ↦ e^{2πikω}` on a skew product with circle fiber.
    pub fn fiber_character(k: i64) -> Self {
        let mut f = Self::fiber_function("", move |w| match w {
            GroupElement::Torus(t) => Ok(turns(wrap(k as f64 * t))),
            other => Err(ErgoError::GroupMismatch(format!("{other} is not a circle element"))),
        });
        f.descriptor = format!("fiber-{k}");
        f
    }

    /// `(x, ω) ↦ f(x)` on a skew product over `f`'s space.
    pub fn lift(f: &Observable) -> Self {
        let inner = f.clone();
        Self::tagged(format!("lift({})", f.descriptor), f.dim, move |x, out| {
            let (b, _) = x.as_product().ok_or_else(|| kind_error("skew product", x))?;
            inner.eval_into(b, out)
        })
    }

    /// Pointwise product of a scalar observable with `other`.
    pub fn product(f: &Observable, other: &Observable) -> Result<Self> {
        ErgoError::check_dim(1, f.dim)?;
        let (a, b) = (f.clone(), other.clone());
        Ok(Self::tagged(
            format!("{}*{}", f.descriptor, other.descriptor),
            other.dim,
            move |x, out| {
                let mut s = [Complex64::new(0.0, 0.0)];
                a.eval_into(x, &mut s)?;
                b.eval_into(x, out)?;
                out.iter_mut().for_each(|v| *v *= s[0]);
                Ok(())
            },
        ))
    }

    /// `(x, ω) ↦ f(x) h(ω)` for a base observable `f` and fiber function `h`.
    pub fn tensor(f: &Observable, h: &Observable) -> Result<Self> {
        Self::product(h, &Self::lift(f))
    }

    pub fn sum(f: &Observable, g: &Observable) -> Result<Self> {
        ErgoError::check_dim(f.dim, g.dim)?;
        let (a, b) = (f.clone(), g.clone());
        Ok(Self::tagged(
            format!("{}+{}", f.descriptor, g.descriptor),
            f.dim,
            move |x, out| {
                let mut tmp = vec![Complex64::new(0.0, 0.0); out.len()];
                a.eval_into(x, out)?;
                b.eval_into(x, &mut tmp)?;
                out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t);
                Ok(())
            },
        ))
    }

    /// The vector-valued `f · e_i ∈ ℂⁿ` for scalar `f`.
    pub fn along(f: &Observable, n: usize, i: usize) -> Result<Self> {
        ErgoError::check_dim(1, f.dim)?;
        if i >= n {
            return Err(ErgoError::IndexOutOfRange { index: i, dim: n });
        }
        let a = f.clone();
        Ok(Self::tagged(format!("{}*e{i}", f.descriptor), n, move |x, out| {
            out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            a.eval_into(x, &mut out[i..=i])
        }))
    }

    /// The Koopman image `S_g f = f ∘ (g·)`.
    pub fn koopman(sys: &DynamicalSystem, g: &SemigroupElement, f: &Observable) -> Result<Self> {
        ErgoError::check_dim(sys.dim(), g.dim())?;
        let (sys, g, inner) = (sys.clone(), g.clone(), f.clone());
        Ok(Self::tagged(
            format!("S{g}({})", f.descriptor),
            f.dim,
            move |x, out| inner.eval_into(&sys.act(&g, x)?, out),
        ))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn with_descriptor(mut self, descriptor: &str) -> Self {
        self.descriptor = descriptor.to_string();
        self
    }

    #[inline]
    pub fn eval_into(&self, x: &StatePoint, out: &mut [Complex64]) -> Result<()> {
        ErgoError::check_dim(self.dim, out.len())?;
        (self.eval)(x, out)
    }

    pub fn eval(&self, x: &StatePoint) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }
}

/// `(S_g f)(x) = f(g·x)`.
pub fn koopman_apply(
    sys: &DynamicalSystem,
    g: &SemigroupElement,
    f: &Observable,
    x: &StatePoint,
) -> Result<Vec<Complex64>> {
    f.eval(&sys.act(g, x)?)
}

/// Averages of one observable at a list of sample points.
#[derive(Clone, Debug)]
pub struct AverageResult {
    pub values: Vec<(StatePoint, Vec<Complex64>)>,
    pub window: FolnerBox,
    pub character: Character,
    /// Largest Euclidean norm among `values`.
    pub sup_norm: f64,
    /// Largest `‖f(g·x)‖₂` over every orbit point visited.
    pub max_visited_norm: f64,
    pub system_id: String,
    pub observable_id: String,
    /// Label of the representation/cocycle pair for twisted averages.
    pub twist: Option<String>,
}

impl AverageResult {
    pub(crate) fn assemble(
        sys: &DynamicalSystem,
        f: &Observable,
        character: Character,
        window: FolnerBox,
        samples: &[StatePoint],
        per_sample: Vec<(Vec<Complex64>, f64)>,
    ) -> Result<Self> {
        let mut sup_norm: f64 = 0.0;
        let mut max_visited: f64 = 0.0;
        let mut values = Vec::with_capacity(samples.len());
        for (x, (v, visited)) in samples.iter().zip(per_sample) {
            let nv = norm(&v);
            if nv.is_nan() {
                return Err(ErgoError::Numerical(format!("NaN average at sample {x}")));
            }
            sup_norm = sup_norm.max(nv);
            max_visited = max_visited.max(visited);
            values.push((x.clone(), v));
        }
        Ok(Self {
            values,
            window,
            character,
            sup_norm,
            max_visited_norm: max_visited,
            system_id: sys.id(),
            observable_id: f.descriptor().to_string(),
            twist: None,
        })
    }

    pub fn n(&self) -> u64 {
        self.window.side()
    }

    pub fn value(&self, i: usize) -> &[Complex64] {
        &self.values[i].1
    }

    /// `max_x ‖A f(x) − B f(x)‖` over common samples.
    pub fn sup_distance(&self, other: &AverageResult) -> Result<f64> {
        ErgoError::check_dim(self.values.len(), other.values.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|((_, a), (_, b))| distance(a, b))
            .fold(0.0, f64::max))
    }

    pub fn csv_header(theta_dim: usize, value_dim: usize) -> Vec<String> {
        let mut h = vec!["system_id".to_string(), "observable".to_string()];
        h.extend((0..theta_dim).map(|k| format!("theta_{k}")));
        h.push("n".into());
        h.push("sample_id".into());
        for c in 0..value_dim {
            h.push(format!("re_{c}"));
            h.push(format!("im_{c}"));
        }
        h.push("sup_norm".into());
        h
    }

    /// One row per sample: system, observable, θ…, n, sample, (re, im)…, sup-norm.
    pub fn to_table(&self) -> Table {
        let dim = self.values.first().map(|(_, v)| v.len()).unwrap_or(0);
        let mut t = Table::new(Self::csv_header(self.character.dim(), dim));
        let observable = match &self.twist {
            Some(tw) => format!("{}|{tw}", self.observable_id),
            None => self.observable_id.clone(),
        };
        for (i, (_, v)) in self.values.iter().enumerate() {
            let mut row = vec![Cell::text(&self.system_id), Cell::text(&observable)];
            row.extend(self.character.angles().iter().map(|&a| Cell::Real(a)));
            row.push(Cell::Int(self.n() as i64));
            row.push(Cell::Int(i as i64));
            for z in v {
                row.push(Cell::Real(z.re));
                row.push(Cell::Real(z.im));
            }
            row.push(Cell::Real(self.sup_norm));
            t.push(row);
        }
        t
    }
}

fn check_inputs(
    sys: &DynamicalSystem,
    chi: &Character,
    window: &FolnerBox,
    samples: &[StatePoint],
) -> Result<()> {
    if samples.is_empty() {
        return Err(ErgoError::invalid("averages need at least one sample point"));
    }
    ErgoError::check_dim(sys.dim(), window.dim())?;
    ErgoError::check_dim(sys.dim(), chi.dim())?;
    samples.iter().try_for_each(|x| sys.validate_point(x))
}

/// `1/|F_n| Σ_{g ∈ F_n} χ(g) f(g·x)` at every sample.
pub fn weighted_average(
    sys: &DynamicalSystem,
    f: &Observable,
    chi: &Character,
    window: &FolnerBox,
    samples: &[StatePoint],
) -> Result<AverageResult> {
    check_inputs(sys, chi, window, samples)?;
    let dim = f.dim();
    let count = window.cardinality() as f64;
    let trivial = chi.is_trivial();
    let per_sample = samples
        .par_iter()
        .map(|x| -> Result<(Vec<Complex64>, f64)> {
            let mut acc = VectorSum::new(dim);
            let mut buf = vec![Complex64::new(0.0, 0.0); dim];
            let mut visited: f64 = 0.0;
            walk_lex(
                sys.dim(),
                window.side(),
                x.clone(),
                &mut |axis, p: &mut StatePoint| sys.step_in_place(axis, p),
                &mut |g, p: &StatePoint| {
                    f.eval_into(p, &mut buf)?;
                    visited = visited.max(norm(&buf));
                    if !trivial {
                        let w = turns(chi.phase_unchecked(g));
                        buf.iter_mut().for_each(|v| *v *= w);
                    }
                    acc.add(&buf);
                    Ok(())
                },
            )?;
            Ok((acc.mean(count), visited))
        })
        .collect::<Result<Vec<_>>>()?;
    AverageResult::assemble(sys, f, chi.clone(), *window, samples, per_sample)
}

/// The plain Cesàro average `1/|F_n| Σ_{g ∈ F_n} f(g·x)`.
pub fn cesaro_average(
    sys: &DynamicalSystem,
    f: &Observable,
    window: &FolnerBox,
    samples: &[StatePoint],
) -> Result<AverageResult> {
    let chi = Character::trivial(sys.dim());
    check_inputs(sys, &chi, window, samples)?;
    let dim = f.dim();
    let count = window.cardinality() as f64;
    let per_sample = samples
        .par_iter()
        .map(|x| -> Result<(Vec<Complex64>, f64)> {
            let mut acc = VectorSum::new(dim);
            let mut buf = vec![Complex64::new(0.0, 0.0); dim];
            let mut visited: f64 = 0.0;
            walk_lex(
                sys.dim(),
                window.side(),
                x.clone(),
                &mut |axis, p: &mut StatePoint| sys.step_in_place(axis, p),
                &mut |_, p: &StatePoint| {
                    f.eval_into(p, &mut buf)?;
                    visited = visited.max(norm(&buf));
                    acc.add(&buf);
                    Ok(())
                },
            )?;
            Ok((acc.mean(count), visited))
        })
        .collect::<Result<Vec<_>>>()?;
    AverageResult::assemble(sys, f, chi, *window, samples, per_sample)
}

/// Per-character sup-norms of weighted averages over a character family.
#[derive(Clone, Debug)]
pub struct WwScan {
    pub entries: Vec<(Character, f64)>,
    pub max: f64,
}

/// Evaluates [`weighted_average`] independently for every character of `grid`.
pub fn ww_scan(
    sys: &DynamicalSystem,
    f: &Observable,
    grid: &[Character],
    window: &FolnerBox,
    samples: &[StatePoint],
) -> Result<WwScan> {
    if grid.is_empty() {
        return Err(ErgoError::invalid("character grid must be nonempty"));
    }
    let entries = grid
        .par_iter()
        .map(|chi| Ok((chi.clone(), weighted_average(sys, f, chi, window, samples)?.sup_norm)))
        .collect::<Result<Vec<_>>>()?;
    let max = entries.iter().map(|(_, s)| *s).fold(0.0, f64::max);
    Ok(WwScan { entries, max })
}

/// `‖A_n f − A_{n_max} f‖` (sup over samples) for each window `n`.
pub fn cauchy_diagnostic(
    sys: &DynamicalSystem,
    f: &Observable,
    chi: &Character,
    samples: &[StatePoint],
    windows: &[u64],
) -> Result<Vec<(u64, f64)>> {
    if windows.len() < 2 {
        return Err(ErgoError::invalid("cauchy diagnostic needs at least 2 windows"));
    }
    if windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ErgoError::invalid("windows must be strictly increasing"));
    }
    let averages = windows
        .iter()
        .map(|&n| weighted_average(sys, f, chi, &FolnerBox::new(n, sys.dim())?, samples))
        .collect::<Result<Vec<_>>>()?;
    let last = averages.last().expect("at least two windows");
    averages
        .iter()
        .map(|a| Ok((a.n(), a.sup_distance(last)?)))
        .collect()
}

/// `‖A_n f − A_n S_g f‖` (sup over samples): the asymptotic-invariance defect
/// of the Følner net in direction `g`.
pub fn invariance_defect(
    sys: &DynamicalSystem,
    f: &Observable,
    chi: &Character,
    window: &FolnerBox,
    samples: &[StatePoint],
    g: &SemigroupElement,
) -> Result<f64> {
    let shifted = Observable::koopman(sys, g, f)?;
    let a = weighted_average(sys, f, chi, window, samples)?;
    let b = weighted_average(sys, &shifted, chi, window, samples)?;
    a.sup_distance(&b)
}
