//! Ergodic properties of skew products `K × Ω` via twisted fixed spaces.
//!
//! For each irreducible representation π of the fiber group the twisted
//! averages `1/|F_n| Σ π(γ(g, x)) f(g·x)` estimate the projection onto
//! `Fix (π∘γ)S`. The skew product is ergodic iff these fixed spaces vanish for
//! every nontrivial π, and mean ergodic iff every twisted limit is continuous.
//! Numerical limits can refute those properties or support them, never prove
//! them, so all verdicts are three-valued.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

pub use crate::cocycle_rep::GroupElement;
use crate::cocycle_rep::{twisted_average, Cocycle, FiberGroup, Representation};
use crate::error::{ErgoError, Result};
use crate::koopman::{cesaro_average, AverageResult, Observable};
use crate::output::{Cell, Table};
use crate::semigroup::FolnerBox;
use crate::summation::{distance, VectorSum};
use crate::systems::{DynamicalSystem, StatePoint};

/// Number of grid points used for Haar integrals over the circle.
pub const TORUS_HAAR_POINTS: usize = 1 << 10;

/// Sample pairs closer than this are compared by the continuity heuristic.
pub const CONTINUITY_RADIUS: f64 = 1e-6;

/// `∫_Ω h dη`: the exact mean over a finite group, the uniform `2¹⁰`-point
/// rule on the circle.
pub fn haar_average<H>(group: &FiberGroup, dim: usize, h: H) -> Result<Vec<Complex64>>
where
    H: Fn(&GroupElement) -> Result<Vec<Complex64>>,
{
    let (count, points): (usize, Box<dyn Iterator<Item = GroupElement>>) = match group {
        FiberGroup::Finite(g) => (g.order(), Box::new((0..g.order()).map(GroupElement::Finite))),
        FiberGroup::Torus => (
            TORUS_HAAR_POINTS,
            Box::new(
                (0..TORUS_HAAR_POINTS).map(|j| GroupElement::Torus(j as f64 / TORUS_HAAR_POINTS as f64)),
            ),
        ),
        FiberGroup::Unitary(n) => {
            return Err(ErgoError::invalid(format!("Haar integration over U({n}) is not supported")))
        }
    };
    let mut acc = VectorSum::new(dim);
    for w in points {
        let v = h(&w)?;
        ErgoError::check_dim(dim, v.len())?;
        acc.add(&v);
    }
    Ok(acc.mean(count as f64))
}

/// `h_{π,i}(x) = ∫_Ω F(x, ω) π(ω)⁻¹ e_i dη(ω)` at every base sample.
pub fn fiber_average(
    big_f: &Observable,
    group: &FiberGroup,
    pi: &Representation,
    i: usize,
    samples: &[StatePoint],
) -> Result<Vec<Vec<Complex64>>> {
    ErgoError::check_dim(1, big_f.dim())?;
    pi.check_group(group)?;
    let n = pi.dim();
    if i >= n {
        return Err(ErgoError::IndexOutOfRange { index: i, dim: n });
    }
    samples
        .iter()
        .map(|x| {
            haar_average(group, n, |w| {
                let value = big_f.eval(&StatePoint::product(x.clone(), w.clone()))?[0];
                // π(ω)⁻¹ e_i is the i-th column of π(ω)*, i.e. conj of row i
                let m = pi.eval(w)?;
                Ok((0..n).map(|r| value * m.entry(i, r).conj()).collect())
            })
        })
        .collect()
}

/// Three-valued answer to a yes/no question that numerics can only support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// How the `A_{n/2} → A_n → A_{2n}` sequence behaved for one probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeStatus {
    /// `‖A_{2n} f − A_n f‖ ≤ tol`.
    Converged,
    /// Above tolerance but smaller than `‖A_n f − A_{n/2} f‖`.
    StillDecreasing,
    Stagnant,
}

impl fmt::Display for ProbeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProbeStatus::Converged => "converged",
            ProbeStatus::StillDecreasing => "still-decreasing",
            ProbeStatus::Stagnant => "stagnant",
        })
    }
}

impl ProbeStatus {
    pub fn classify(residual: f64, previous: f64, tol: f64) -> Self {
        if residual <= tol {
            ProbeStatus::Converged
        } else if residual < previous {
            ProbeStatus::StillDecreasing
        } else {
            ProbeStatus::Stagnant
        }
    }
}

/// One probe `f · e_c` pushed through the twisted averages.
#[derive(Clone, Debug)]
pub struct ProbeRecord {
    pub probe: String,
    /// Sup-norm over samples of the estimated limit `A_{2n} f`.
    pub limit_sup: f64,
    pub residual: f64,
    pub status: ProbeStatus,
    /// The estimated limit at every sample.
    pub limit: Vec<Vec<Complex64>>,
}

/// Outcome of [`irrep_fixed_space_probe`] for one representation.
#[derive(Clone, Debug)]
pub struct IrrepRecord {
    pub label: String,
    pub dim: usize,
    pub trivial: bool,
    pub fixed_dimension: usize,
    pub max_residual: f64,
    /// Whether `Fix (π∘γ)S` is `{0}`.
    pub verdict: Verdict,
    pub probes: Vec<ProbeRecord>,
}

/// Verdict on `Fix (π∘γ)S = {0}` from the estimated dimension and probe statuses.
pub fn fixed_space_verdict(fixed_dimension: usize, statuses: &[ProbeStatus]) -> Verdict {
    if fixed_dimension > 0 {
        Verdict::No
    } else if statuses.iter().all(|s| *s == ProbeStatus::Converged) {
        Verdict::Yes
    } else {
        Verdict::Inconclusive
    }
}

/// Numerical rank of a set of sampled functions: singular values above
/// `tol · √(sample count)`.
pub fn limit_rank(columns: &[Vec<Complex64>], tol: f64) -> usize {
    if columns.is_empty() || columns[0].is_empty() {
        return 0;
    }
    let rows = columns[0].len();
    let m = DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r]);
    let threshold = tol * (rows as f64).sqrt();
    m.singular_values().iter().filter(|&&s| s > threshold).count()
}

/// Twisted-average probes for the fixed space of `(π∘γ)S`.
///
/// Scalar probes are expanded to `f · e_c` for every component `c` of π.
/// Limits are estimated at `2n`; the residual compares with `n`, and `n/2`
/// decides whether a large residual is still shrinking.
pub fn irrep_fixed_space_probe(
    base: &DynamicalSystem,
    gamma: &Cocycle,
    pi: &Representation,
    probes: &[Observable],
    n: u64,
    samples: &[StatePoint],
    tol: f64,
) -> Result<IrrepRecord> {
    if probes.is_empty() {
        return Err(ErgoError::invalid("fixed-space probe needs at least one probe observable"));
    }
    if n < 2 {
        return Err(ErgoError::invalid("fixed-space probe needs n ≥ 2"));
    }
    let dim = pi.dim();
    let mut expanded = Vec::new();
    for f in probes {
        if f.dim() == dim {
            expanded.push(f.clone());
        } else {
            for c in 0..dim {
                expanded.push(Observable::along(f, dim, c)?);
            }
        }
    }
    let windows = [n / 2, n, 2 * n]
        .iter()
        .map(|&m| FolnerBox::new(m, base.dim()))
        .collect::<Result<Vec<_>>>()?;
    let records = expanded
        .par_iter()
        .map(|f| -> Result<ProbeRecord> {
            let avgs = windows
                .iter()
                .map(|w| twisted_average(base, f, gamma, Some(pi), w, samples))
                .collect::<Result<Vec<AverageResult>>>()?;
            let previous = avgs[1].sup_distance(&avgs[0])?;
            let residual = avgs[2].sup_distance(&avgs[1])?;
            let limit: Vec<Vec<Complex64>> = avgs[2].values.iter().map(|(_, v)| v.clone()).collect();
            Ok(ProbeRecord {
                probe: f.descriptor().to_string(),
                limit_sup: avgs[2].sup_norm,
                residual,
                status: ProbeStatus::classify(residual, previous, tol),
                limit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let columns: Vec<Vec<Complex64>> = records
        .iter()
        .map(|r| r.limit.iter().flatten().copied().collect())
        .collect();
    let fixed_dimension = limit_rank(&columns, tol);
    let statuses: Vec<ProbeStatus> = records.iter().map(|r| r.status).collect();
    Ok(IrrepRecord {
        label: pi.label().to_string(),
        dim,
        trivial: pi.is_trivial(),
        fixed_dimension,
        max_residual: records.iter().map(|r| r.residual).fold(0.0, f64::max),
        verdict: fixed_space_verdict(fixed_dimension, &statuses),
        probes: records,
    })
}

/// Parameters shared by the probes of one report.
#[derive(Clone, Debug)]
pub struct ProbeParams {
    pub n: u64,
    pub tol: f64,
    /// Characters `k` probed when the fiber is the circle.
    pub torus_characters: Vec<i64>,
}

impl Default for ProbeParams {
    fn default() -> Self {
        Self {
            n: 10_000,
            tol: 0.05,
            torus_characters: vec![0, 1, 2, 3],
        }
    }
}

/// Largest jump `‖limit(x) − limit(y)‖` over sample pairs closer than
/// [`CONTINUITY_RADIUS`], with the offending pair.
#[derive(Clone, Debug)]
pub struct ContinuityJump {
    pub jump: f64,
    pub pair: Option<(usize, usize)>,
    pub distance: f64,
}

fn continuity_jump(
    base: &DynamicalSystem,
    samples: &[StatePoint],
    limit: &[Vec<Complex64>],
) -> Result<ContinuityJump> {
    let mut worst = ContinuityJump {
        jump: 0.0,
        pair: None,
        distance: f64::INFINITY,
    };
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            let d = base.metric(&samples[a], &samples[b])?;
            if d < CONTINUITY_RADIUS {
                let jump = distance(&limit[a], &limit[b]);
                if worst.pair.is_none() || jump > worst.jump {
                    worst = ContinuityJump {
                        jump,
                        pair: Some((a, b)),
                        distance: d,
                    };
                }
            }
        }
    }
    Ok(worst)
}

/// Per-irrep fixed spaces, the ergodicity verdict and the mean-ergodicity
/// verdict for a skew product.
#[derive(Clone, Debug)]
pub struct ErgodicityReport {
    pub system_id: String,
    pub irreps: Vec<IrrepRecord>,
    /// Largest continuity jump of any twisted limit, per irrep.
    pub jumps: Vec<ContinuityJump>,
    pub ergodic: Verdict,
    pub mean_ergodic: Verdict,
    pub n: u64,
    pub sample_count: usize,
    pub tol: f64,
}

/// Ergodic only if every nontrivial irrep has an empty fixed space.
pub fn ergodicity_verdict(irreps: &[IrrepRecord]) -> Verdict {
    let nontrivial: Vec<&IrrepRecord> = irreps.iter().filter(|r| !r.trivial).collect();
    if nontrivial.iter().any(|r| r.fixed_dimension > 0) {
        Verdict::No
    } else if nontrivial.iter().all(|r| r.verdict == Verdict::Yes) {
        Verdict::Yes
    } else {
        Verdict::Inconclusive
    }
}

/// Mean ergodicity of `(π∘γ)S` alone: refuted by a continuity jump above
/// `10 · tol`, supported when every probe converged.
pub fn irrep_mean_verdict(record: &IrrepRecord, jump: &ContinuityJump, tol: f64) -> Verdict {
    if jump.jump > 10.0 * tol {
        Verdict::No
    } else if record.probes.iter().all(|p| p.status == ProbeStatus::Converged) {
        Verdict::Yes
    } else {
        Verdict::Inconclusive
    }
}

/// Mean ergodicity of the skew product: every twisted operator must be mean
/// ergodic, on top of unique ergodicity of the base.
pub fn mean_ergodic_verdict(
    base_uniquely_ergodic: bool,
    irreps: &[IrrepRecord],
    jumps: &[ContinuityJump],
    tol: f64,
) -> Verdict {
    let verdicts: Vec<Verdict> = irreps
        .iter()
        .zip(jumps)
        .map(|(r, j)| irrep_mean_verdict(r, j, tol))
        .collect();
    if verdicts.contains(&Verdict::No) {
        Verdict::No
    } else if base_uniquely_ergodic && verdicts.iter().all(|v| *v == Verdict::Yes) {
        Verdict::Yes
    } else {
        Verdict::Inconclusive
    }
}

/// Runs [`irrep_fixed_space_probe`] for every irrep of the cocycle's fiber
/// group and aggregates the verdicts.
pub fn mean_ergodicity_verdict(
    base: &DynamicalSystem,
    gamma: &Cocycle,
    probes: &[Observable],
    samples: &[StatePoint],
    params: &ProbeParams,
) -> Result<ErgodicityReport> {
    let group = gamma.group();
    let reps = group.irreps(&params.torus_characters);
    if reps.is_empty() {
        return Err(ErgoError::invalid("no representations to probe"));
    }
    let irreps = reps
        .par_iter()
        .map(|pi| irrep_fixed_space_probe(base, gamma, pi, probes, params.n, samples, params.tol))
        .collect::<Result<Vec<_>>>()?;
    let jumps = irreps
        .iter()
        .map(|r| {
            let mut worst = ContinuityJump {
                jump: 0.0,
                pair: None,
                distance: f64::INFINITY,
            };
            for p in &r.probes {
                let j = continuity_jump(base, samples, &p.limit)?;
                if j.pair.is_some() && (worst.pair.is_none() || j.jump > worst.jump) {
                    worst = j;
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErgodicityReport {
        system_id: format!("skew({};{})", base.id(), gamma.label()),
        ergodic: ergodicity_verdict(&irreps),
        mean_ergodic: mean_ergodic_verdict(base.is_uniquely_ergodic(), &irreps, &jumps, params.tol),
        irreps,
        jumps,
        n: params.n,
        sample_count: samples.len(),
        tol: params.tol,
    })
}

impl ErgodicityReport {
    /// One row per irrep × probe.
    pub fn to_table(&self) -> Table {
        let header = [
            "system_id",
            "irrep",
            "dim",
            "probe",
            "n",
            "samples",
            "tol",
            "limit_sup",
            "residual",
            "status",
            "fixed_dim",
            "irrep_verdict",
            "continuity_jump",
        ];
        let mut t = Table::new(header.iter().map(|s| s.to_string()).collect());
        for (r, jump) in self.irreps.iter().zip(&self.jumps) {
            for p in &r.probes {
                t.push(vec![
                    Cell::text(&self.system_id),
                    Cell::text(&r.label),
                    Cell::Int(r.dim as i64),
                    Cell::text(&p.probe),
                    Cell::Int(self.n as i64),
                    Cell::Int(self.sample_count as i64),
                    Cell::Real(self.tol),
                    Cell::Real(p.limit_sup),
                    Cell::Real(p.residual),
                    Cell::text(p.status.to_string()),
                    Cell::Int(r.fixed_dimension as i64),
                    Cell::text(r.verdict.to_string()),
                    Cell::Real(jump.jump),
                ]);
            }
        }
        t
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "system {} (n = {}, samples = {}, tol = {})\n",
            self.system_id, self.n, self.sample_count, self.tol
        );
        for (r, j) in self.irreps.iter().zip(&self.jumps) {
            s.push_str(&format!(
                "  irrep {:<10} dim {} fixed-dim {} max-residual {:.3e} jump {:.3e} trivial-fixed-space: {}\n",
                r.label, r.dim, r.fixed_dimension, r.max_residual, j.jump, r.verdict
            ));
        }
        s.push_str(&format!("  ergodic: {}\n", self.ergodic));
        s.push_str(&format!("  mean-ergodic: {}\n", self.mean_ergodic));
        s
    }
}

/// Largest spread of Cesàro averages across starting points, over the test
/// observables. The spread is the largest pairwise distance in ℂᴺ.
pub fn unique_ergodicity_probe(
    sys: &DynamicalSystem,
    tests: &[Observable],
    starts: &[StatePoint],
    window: &FolnerBox,
) -> Result<f64> {
    if starts.len() < 2 {
        return Err(ErgoError::invalid("unique-ergodicity probe needs at least 2 starting points"));
    }
    if tests.is_empty() {
        return Err(ErgoError::invalid("unique-ergodicity probe needs a test observable"));
    }
    let spreads = tests
        .par_iter()
        .map(|f| -> Result<f64> {
            let avg = cesaro_average(sys, f, window, starts)?;
            let mut spread: f64 = 0.0;
            for a in 0..avg.values.len() {
                for b in a + 1..avg.values.len() {
                    spread = spread.max(distance(&avg.values[a].1, &avg.values[b].1));
                }
            }
            Ok(spread)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(spreads.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle_rep::{matrix_element, FiniteGroup};
    use crate::semigroup::SemigroupElement;
    use crate::summation::turns;
    use crate::systems::{golden_alpha, SubshiftPoint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(m: usize) -> FiberGroup {
        FiberGroup::finite(FiniteGroup::cyclic(m).unwrap())
    }

    fn circles(count: usize, seed: u64) -> Vec<StatePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rot = DynamicalSystem::golden_rotation();
        (0..count).map(|_| rot.random_point(&mut rng).unwrap()).collect()
    }

    #[test]
    fn haar_average_examples() {
        let c = Complex64::new(0.3, -2.0);
        for g in [z(4), FiberGroup::Torus, FiberGroup::finite(FiniteGroup::s3())] {
            assert_eq!(haar_average(&g, 1, |_| Ok(vec![c])).unwrap(), vec![c]);
        }
        let chi1 = z(4).irreps(&[])[1].clone();
        let v = haar_average(&z(4), 1, |w| Ok(vec![chi1.eval(w)?.entry(0, 0)])).unwrap();
        assert_eq!(v[0], Complex64::new(0.0, 0.0));
        let v = haar_average(&FiberGroup::Torus, 1, |w| match w {
            GroupElement::Torus(t) => Ok(vec![turns(*t)]),
            _ => unreachable!(),
        })
        .unwrap();
        assert!(v[0].norm() <= 1e-12);
        assert!(haar_average(&FiberGroup::Unitary(2), 1, |_| Ok(vec![c])).is_err());
    }

    #[test]
    fn fiber_average_examples() {
        let samples = circles(4, 1);
        let one = Observable::one();
        let g = z(3);
        for pi in g.irreps(&[]) {
            let h = fiber_average(&one, &g, &pi, 0, &samples).unwrap();
            let expected = if pi.is_trivial() { 1.0 } else { 0.0 };
            for v in h {
                assert!((v[0] - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn fiber_average_matches_enumeration() {
        let g = z(3);
        let samples = circles(5, 2);
        for pi in g.irreps(&[]) {
            let pi11 = matrix_element(&pi, 0, 0).unwrap();
            let big_f = Observable::tensor(&Observable::exp(2), &pi11.on_fiber()).unwrap();
            let h = fiber_average(&big_f, &g, &pi, 0, &samples).unwrap();
            for (x, v) in samples.iter().zip(&h) {
                let fx = Observable::exp(2).eval(x).unwrap()[0];
                let mut brute = Complex64::new(0.0, 0.0);
                for w in 0..3 {
                    let m = pi.eval(&GroupElement::Finite(w)).unwrap().entry(0, 0);
                    brute += fx * m * m.conj();
                }
                brute /= 3.0;
                assert!((v[0] - brute).norm() < 1e-14);
            }
        }
        let s3 = FiberGroup::finite(FiniteGroup::s3());
        let std = s3.irreps(&[]).iter().find(|r| r.dim() == 2).unwrap().clone();
        assert!(fiber_average(&Observable::one(), &s3, &std, 2, &samples).is_err());
    }

    #[test]
    fn fiber_average_of_fixed_function_is_twisted_fixed() {
        // F_m(x, ω) = e^{2πi(ω − m x)} is invariant under (x, ω) ↦ (x + α, ω + mα)
        let alpha = golden_alpha();
        let base = DynamicalSystem::golden_rotation();
        let samples = circles(8, 3);
        for m in [1i64, 2, -3] {
            let c = GroupElement::torus((m as f64 * alpha).rem_euclid(1.0));
            let gamma = Cocycle::constant(FiberGroup::Torus, vec![c]).unwrap();
            let big_f = Observable::tensor(&Observable::exp(-m), &Observable::fiber_character(1)).unwrap();
            let skew = DynamicalSystem::skew_product(base.clone(), gamma.clone()).unwrap();
            for x in &samples {
                for w in [0.0, 0.3] {
                    let p = StatePoint::product(x.clone(), GroupElement::torus(w));
                    let q = skew.act(&SemigroupElement::scalar(5), &p).unwrap();
                    assert!((big_f.eval(&p).unwrap()[0] - big_f.eval(&q).unwrap()[0]).norm() < 1e-12);
                }
            }
            for k in [1i64, 2] {
                let pi = Representation::torus_character(k);
                let h = fiber_average(&big_f, &FiberGroup::Torus, &pi, 0, &samples).unwrap();
                for (x, hx) in samples.iter().zip(&h) {
                    for g in [1u64, 7] {
                        let g = SemigroupElement::scalar(g);
                        let gx = base.act(&g, x).unwrap();
                        let hgx = fiber_average(&big_f, &FiberGroup::Torus, &pi, 0, &[gx]).unwrap();
                        let w = gamma.eval(&base, &g, x).unwrap();
                        let mut out = vec![Complex64::new(0.0, 0.0)];
                        pi.apply(&w, &hgx[0], &mut out).unwrap();
                        assert!(distance(&out, hx) <= 1e-8);
                    }
                }
                let nonzero = h.iter().any(|v| v[0].norm() > 0.5);
                assert_eq!(nonzero, k == 1);
            }
        }
    }

    #[test]
    fn trivial_irrep_constants_are_fixed() {
        let base = DynamicalSystem::golden_rotation();
        let gamma = Cocycle::identity(z(2), 1);
        let pi = z(2).irreps(&[])[0].clone();
        let r = irrep_fixed_space_probe(&base, &gamma, &pi, &[Observable::one()], 100, &circles(6, 4), 0.05)
            .unwrap();
        assert!(r.fixed_dimension >= 1);
        assert_eq!(r.probes[0].limit_sup, 1.0);
    }

    #[test]
    fn identity_cocycle_is_not_ergodic() {
        let base = DynamicalSystem::golden_rotation();
        let gamma = Cocycle::identity(z(2), 1);
        let sign = z(2).irreps(&[])[1].clone();
        let r = irrep_fixed_space_probe(&base, &gamma, &sign, &[Observable::one()], 1000, &circles(6, 5), 0.05)
            .unwrap();
        assert_eq!(r.fixed_dimension, 1);
        assert_eq!(r.verdict, Verdict::No);
        let report = mean_ergodicity_verdict(
            &base,
            &gamma,
            &[Observable::one(), Observable::exp(1)],
            &circles(6, 5),
            &ProbeParams { n: 1000, ..ProbeParams::default() },
        )
        .unwrap();
        assert_eq!(report.ergodic, Verdict::No);
    }

    #[test]
    fn trivial_fiber_reduces_to_base() {
        let base = DynamicalSystem::golden_rotation();
        let gamma = Cocycle::identity(z(1), 1);
        let report = mean_ergodicity_verdict(
            &base,
            &gamma,
            &[Observable::one(), Observable::exp(1)],
            &circles(10, 6),
            &ProbeParams { n: 10_000, ..ProbeParams::default() },
        )
        .unwrap();
        assert_eq!(report.irreps.len(), 1);
        assert_eq!(report.mean_ergodic, Verdict::Yes);
        assert_eq!(report.ergodic, Verdict::Yes);
        assert_eq!(report.to_table().rows.len(), 2);
    }

    #[test]
    fn anzai_is_ergodic_and_mean_ergodic() {
        let base = DynamicalSystem::golden_rotation();
        let gamma = Cocycle::torus_exponential(1);
        let report = mean_ergodicity_verdict(
            &base,
            &gamma,
            &[Observable::one(), Observable::exp(1), Observable::exp(-1)],
            &circles(4, 7),
            &ProbeParams {
                n: 20_000,
                tol: 0.05,
                torus_characters: vec![0, 1, 2],
            },
        )
        .unwrap();
        assert_eq!(report.ergodic, Verdict::Yes, "{}", report.summary());
        assert_eq!(report.mean_ergodic, Verdict::Yes, "{}", report.summary());
        let trivial = report.irreps.iter().find(|r| r.trivial).unwrap();
        assert_eq!(trivial.fixed_dimension, 1);
    }

    #[test]
    fn derndinger_sign_twist_is_not_mean_ergodic() {
        let base = DynamicalSystem::derndinger();
        let gamma = Cocycle::constant(z(2), vec![GroupElement::Finite(1)]).unwrap();
        let samples: Vec<StatePoint> = (1..=100)
            .flat_map(|i| [SubshiftPoint::plus(i), SubshiftPoint::minus(i)])
            .map(StatePoint::Subshift)
            .collect();
        let report = mean_ergodicity_verdict(
            &base,
            &gamma,
            &[Observable::coord(1).unwrap()],
            &samples,
            &ProbeParams { n: 10_000, ..ProbeParams::default() },
        )
        .unwrap();
        assert_eq!(report.mean_ergodic, Verdict::No, "{}", report.summary());
        let sign = report.irreps.iter().position(|r| !r.trivial).unwrap();
        assert!(report.jumps[sign].jump >= 1.9);
        let trivial = report.irreps.iter().position(|r| r.trivial).unwrap();
        assert!(report.jumps[trivial].jump <= 0.05);
    }

    #[test]
    fn unique_ergodicity_examples() {
        let anzai = DynamicalSystem::anzai(golden_alpha(), false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let starts: Vec<StatePoint> = (0..6).map(|_| anzai.random_point(&mut rng).unwrap()).collect();
        let w = FolnerBox::new(1000, 1).unwrap();
        assert_eq!(unique_ergodicity_probe(&anzai, &[Observable::one()], &starts, &w).unwrap(), 0.0);

        let control = DynamicalSystem::skew_product(
            DynamicalSystem::golden_rotation(),
            Cocycle::identity(z(2), 1),
        )
        .unwrap();
        let sign = matrix_element(&z(2).irreps(&[])[1], 0, 0).unwrap().on_fiber();
        let starts = vec![
            StatePoint::product(StatePoint::circle(0.1), GroupElement::Finite(0)),
            StatePoint::product(StatePoint::circle(0.7), GroupElement::Finite(1)),
        ];
        assert_eq!(unique_ergodicity_probe(&control, &[sign], &starts, &w).unwrap(), 2.0);
        assert!(unique_ergodicity_probe(&control, &[Observable::one()], &starts[..1], &w).is_err());
    }

    #[test]
    fn verdict_logic() {
        use ProbeStatus::*;
        assert_eq!(ProbeStatus::classify(0.01, 0.5, 0.05), Converged);
        assert_eq!(ProbeStatus::classify(0.1, 0.5, 0.05), StillDecreasing);
        assert_eq!(ProbeStatus::classify(0.1, 0.1, 0.05), Stagnant);
        assert_eq!(fixed_space_verdict(1, &[Converged]), Verdict::No);
        assert_eq!(fixed_space_verdict(0, &[Converged, Converged]), Verdict::Yes);
        assert_eq!(fixed_space_verdict(0, &[Converged, StillDecreasing]), Verdict::Inconclusive);
    }

    #[test]
    fn rank_threshold_scales_with_samples() {
        let ones = vec![Complex64::new(1.0, 0.0); 100];
        let small = vec![Complex64::new(0.01, 0.0); 100];
        assert_eq!(limit_rank(&[ones.clone(), small], 0.05), 1);
        assert_eq!(limit_rank(&[ones.clone(), ones], 0.05), 1);
        assert_eq!(limit_rank(&[], 0.05), 0);
    }
}
