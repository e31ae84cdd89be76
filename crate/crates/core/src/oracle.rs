//! Brute-force reference computations for tests.
//!
//! Nothing here calls the averaging engines: sums are accumulated locally,
//! phases are computed from closed forms and subshift sums use integer
//! arithmetic on the defining coordinate formula.

use num_complex::Complex64;

use crate::error::{ErgoError, Result};
use crate::koopman::Observable;
use crate::semigroup::{Character, FolnerBox};
use crate::systems::{box_orbit, DynamicalSystem, Sign, StatePoint, SubshiftPoint};

const TAU: f64 = std::f64::consts::TAU;

/// Neumaier summation, kept separate from the engine accumulators.
#[derive(Clone, Copy, Default)]
struct Kahan {
    hi: f64,
    lo: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let t = self.hi + v;
        if self.hi.abs() >= v.abs() {
            self.lo += (self.hi - t) + v;
        } else {
            self.lo += (v - t) + self.hi;
        }
        self.hi = t;
    }

    fn total(&self) -> f64 {
        self.hi + self.lo
    }
}

fn unit(turns: f64) -> Complex64 {
    let (s, c) = (TAU * turns).sin_cos();
    Complex64::new(c, s)
}

/// `m · a = q + r` with integer `q` and `r ∈ [0, 1)`, using an exact product.
fn split_product(m: f64, a: f64) -> (i64, f64) {
    let p = m * a;
    let e = m.mul_add(a, -p);
    let q = p.floor();
    let r = (p - q) + e;
    let carry = r.floor();
    (q as i64 + carry as i64, r - carry)
}

fn frac_product(m: f64, a: f64) -> f64 {
    split_product(m, a).1
}

/// A finitely supported probability measure.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure {
    atoms: Vec<(StatePoint, f64)>,
    /// Set when every atom carries weight `1/count`.
    uniform: bool,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<(StatePoint, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(ErgoError::invalid("empirical measure needs at least one atom"));
        }
        if atoms.iter().any(|(_, w)| !(*w >= 0.0)) {
            return Err(ErgoError::invalid("weights must be nonnegative"));
        }
        let mut total = Kahan::default();
        atoms.iter().for_each(|(_, w)| total.add(*w));
        if (total.total() - 1.0).abs() > 1e-12 {
            return Err(ErgoError::invalid(format!("weights sum to {}, not 1", total.total())));
        }
        Ok(Self { atoms, uniform: false })
    }

    pub fn point_mass(x: StatePoint) -> Self {
        Self {
            atoms: vec![(x, 1.0)],
            uniform: true,
        }
    }

    pub fn atoms(&self) -> &[(StatePoint, f64)] {
        &self.atoms
    }

    /// Total weight carried by atoms satisfying `pred`.
    pub fn mass_where(&self, pred: impl Fn(&StatePoint) -> bool) -> f64 {
        let mut s = Kahan::default();
        self.atoms.iter().filter(|(x, _)| pred(x)).for_each(|(_, w)| s.add(*w));
        s.total()
    }
}

/// Uniform weights on the orbit `{g·start : g ∈ F_n}`.
pub fn empirical_measure(
    sys: &DynamicalSystem,
    start: &StatePoint,
    window: &FolnerBox,
) -> Result<EmpiricalMeasure> {
    ErgoError::check_dim(sys.dim(), window.dim())?;
    let points = box_orbit(sys, start, window.side())?;
    let w = 1.0 / points.len() as f64;
    Ok(EmpiricalMeasure {
        atoms: points.into_iter().map(|p| (p, w)).collect(),
        uniform: true,
    })
}

/// `∫ f dμ`. Uniform measures sum first and divide once.
pub fn integrate(mu: &EmpiricalMeasure, f: &Observable) -> Result<Vec<Complex64>> {
    let dim = f.dim();
    let mut re = vec![Kahan::default(); dim];
    let mut im = vec![Kahan::default(); dim];
    for (x, w) in &mu.atoms {
        let v = f.eval(x)?;
        let scale = if mu.uniform { 1.0 } else { *w };
        for (c, z) in v.iter().enumerate() {
            re[c].add(z.re * scale);
            im[c].add(z.im * scale);
        }
    }
    let count = if mu.uniform { mu.atoms.len() as f64 } else { 1.0 };
    Ok(re
        .iter()
        .zip(&im)
        .map(|(r, i)| Complex64::new(r.total() / count, i.total() / count))
        .collect())
}

/// Closed form of `1/n Σ_{j<n} e^{2πiλj} e^{2πik(x + jα)}`:
/// `e^{2πikx} (zⁿ − 1) / (n (z − 1))` with `z = e^{2πi(λ + kα)}`, and
/// `e^{2πikx}` when `z = 1`.
pub fn geometric_oracle(lambda: f64, alpha: f64, k: i64, n: u64, x: f64) -> Complex64 {
    let base = unit(frac_product(k as f64, x));
    let mut delta = lambda + frac_product(k as f64, alpha);
    delta -= delta.round();
    if delta == 0.0 || n <= 1 {
        return base;
    }
    // (zⁿ − 1)/(z − 1) = e^{πi(n−1)δ} sin(πnδ)/sin(πδ); writing (n−1)δ = q + r
    // and nδ = q' + r' gives signs (−1)^q and (−1)^{q'}
    let nf = n as f64;
    let (q, r) = split_product(nf - 1.0, delta);
    let (q2, r2) = split_product(nf, delta);
    let sign = if (q + q2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let pi = std::f64::consts::PI;
    let ratio = (pi * r2).sin() / (pi * delta).sin();
    base * unit(r / 2.0) * (sign * ratio / nf)
}

/// `2 / (n |z − 1|)`, an upper bound for `|geometric_oracle|` when `z ≠ 1`.
pub fn geometric_bound(lambda: f64, alpha: f64, k: i64, n: u64) -> f64 {
    let z = unit(lambda + frac_product(k as f64, alpha));
    2.0 / (n as f64 * (z - 1.0).norm())
}

/// Angle of `γ(n, x) = Π_{j<n} e^{2πik(x + jα)}`, accumulated term by term.
pub fn torus_exponential_recursive(k: i64, alpha: f64, x: f64, n: u64) -> f64 {
    let mut s = Kahan::default();
    for j in 0..n {
        let xj = x + frac_product(j as f64, alpha);
        s.add(xj - xj.floor());
    }
    let (hi, lo) = (s.hi, s.lo);
    let kf = k as f64;
    let r = frac_product(kf, hi) + kf * lo;
    r - r.floor()
}

/// `x_n` for the subshift point `(sign, i)` straight from the definition.
fn defining_coordinate(sign: Sign, i: u64, n: u64) -> i64 {
    let alternating = if n % 2 == 0 { 1 } else { -1 };
    let base = if n < i { alternating } else { -alternating };
    match sign {
        Sign::Plus => base,
        Sign::Minus => -base,
    }
}

/// `Σ_{m<count} w^m (σ^m x)_n` in integers, with `w = −1` when `twisted`.
/// Uses `(σ^m x)_n = x_{n+m}`.
pub fn subshift_sum(x: &SubshiftPoint, n: u64, count: u64, twisted: bool) -> i64 {
    (0..count)
        .map(|m| {
            let v = defining_coordinate(x.sign(), x.index(), n + m);
            if twisted && m % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .sum()
}

/// The (twisted) Cesàro average of `coord-n`, exact up to the final division.
pub fn subshift_average(x: &SubshiftPoint, n: u64, count: u64, twisted: bool) -> f64 {
    subshift_sum(x, n, count, twisted) as f64 / count as f64
}

/// `1/|F| Σ_{g ∈ F} χ(g) f(g·x)` with every `g·x` computed from scratch.
pub fn brute_weighted_average(
    sys: &DynamicalSystem,
    f: &Observable,
    chi: &Character,
    window: &FolnerBox,
    x: &StatePoint,
) -> Result<Vec<Complex64>> {
    let dim = f.dim();
    let mut re = vec![Kahan::default(); dim];
    let mut im = vec![Kahan::default(); dim];
    for g in window.elements() {
        let mut phase = Kahan::default();
        for (&gk, &t) in g.coords().iter().zip(chi.angles()) {
            phase.add(frac_product(gk as f64, t));
        }
        let w = unit(phase.total());
        for (c, v) in f.eval(&sys.act(&g, x)?)?.into_iter().enumerate() {
            let z = v * w;
            re[c].add(z.re);
            im[c].add(z.im);
        }
    }
    let count = window.cardinality() as f64;
    Ok(re
        .iter()
        .zip(&im)
        .map(|(r, i)| Complex64::new(r.total() / count, i.total() / count))
        .collect())
}

/// `1/|G| Σ_{a ∈ G} h(a)` over the element indices of a finite group.
pub fn enumerate_mean(order: usize, h: impl Fn(usize) -> Complex64) -> Complex64 {
    let sum: Complex64 = (0..order).map(h).sum();
    sum / order as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::golden_alpha;

    #[test]
    fn empirical_measure_examples() {
        let rot = DynamicalSystem::circle_rotation(0.5, false).unwrap();
        let mu = empirical_measure(&rot, &StatePoint::circle(0.0), &FolnerBox::new(2, 1).unwrap()).unwrap();
        assert_eq!(mu.atoms().len(), 2);
        assert_eq!(mu.atoms()[1], (StatePoint::circle(0.5), 0.5));

        let dern = DynamicalSystem::derndinger();
        let mu = empirical_measure(
            &dern,
            &StatePoint::Subshift(SubshiftPoint::plus(3)),
            &FolnerBox::new(100, 1).unwrap(),
        )
        .unwrap();
        let near = mu.mass_where(|x| x.as_subshift().map(|p| p.index() == 1).unwrap_or(false));
        assert!(near >= 0.96);
    }

    #[test]
    fn integrate_examples() {
        let c = Complex64::new(2.0, -1.0);
        let x = StatePoint::circle(0.3);
        let mu = EmpiricalMeasure::point_mass(x.clone());
        assert_eq!(integrate(&mu, &Observable::constant(vec![c])).unwrap(), vec![c]);
        assert_eq!(integrate(&mu, &Observable::exp(1)).unwrap(), Observable::exp(1).eval(&x).unwrap());

        let pm = EmpiricalMeasure::new(vec![
            (StatePoint::Subshift(SubshiftPoint::plus(1)), 0.5),
            (StatePoint::Subshift(SubshiftPoint::minus(1)), 0.5),
        ])
        .unwrap();
        let v = integrate(&pm, &Observable::coord(1).unwrap()).unwrap();
        assert_eq!(v[0], Complex64::new(0.0, 0.0));
        assert!(EmpiricalMeasure::new(vec![(x.clone(), 0.4)]).is_err());
        assert!(EmpiricalMeasure::new(vec![(x.clone(), 1.5), (x, -0.5)]).is_err());
    }

    #[test]
    fn rotation_measure_decays_geometrically() {
        let alpha = golden_alpha();
        let rot = DynamicalSystem::circle_rotation(alpha, true).unwrap();
        for n in [10u64, 100, 1000] {
            let mu = empirical_measure(&rot, &StatePoint::circle(0.2), &FolnerBox::new(n, 1).unwrap()).unwrap();
            let v = integrate(&mu, &Observable::exp(1)).unwrap()[0];
            assert!(v.norm() <= geometric_bound(0.0, alpha, 1, n) + 1e-12);
        }
    }

    #[test]
    fn geometric_oracle_examples() {
        let x = 0.37;
        let ex = unit(x);
        // z = 1
        let v = geometric_oracle(1.0 - 0.25, 0.25, 1, 1000, x);
        assert_eq!(v, ex);
        assert_eq!(geometric_oracle(0.3, 0.1, 1, 1, x), ex);
        // k = 0, λ = 1/4, n = 4: the four powers of i cancel
        assert!(geometric_oracle(0.25, 0.1, 0, 4, x).norm() < 1e-15);
        // brute force
        for &(l, a, k, n) in &[(0.1, 0.3, 2i64, 17u64), (0.9, golden_alpha(), -1, 1000), (0.0, 0.01, 3, 333)] {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                s += unit(l * j as f64) * unit(k as f64 * (x + j as f64 * a));
            }
            s /= n as f64;
            assert!((s - geometric_oracle(l, a, k, n, x)).norm() < 1e-11, "{l} {a} {k} {n}");
        }
    }

    #[test]
    fn recursion_examples() {
        let a = golden_alpha();
        assert_eq!(torus_exponential_recursive(1, a, 0.3, 0), 0.0);
        assert!((torus_exponential_recursive(1, a, 0.3, 1) - 0.3).abs() < 1e-16);
        let t = torus_exponential_recursive(1, a, 0.1, 2);
        assert!((t - (0.2 + a)).abs() < 1e-15);
    }

    #[test]
    fn subshift_sums_match_known_values() {
        // untwisted: x^{(3)} coordinates 1.. are −1, +1, +1, −1, +1, … from index 3 on
        assert_eq!(subshift_sum(&SubshiftPoint::plus(3), 1, 10, false), 0);
        assert_eq!(subshift_average(&SubshiftPoint::plus(3), 1, 10, true), 0.6);
        assert_eq!(subshift_sum(&SubshiftPoint::minus(1), 1, 10_000, true), -10_000);
        let x100 = SubshiftPoint::plus(100);
        assert_eq!(subshift_sum(&x100, 1, 10_000, true), 10_000 - 2 * 99);
    }

    #[test]
    fn brute_average_uses_actions() {
        let rot = DynamicalSystem::circle_rotation(0.25, false).unwrap();
        let v = brute_weighted_average(
            &rot,
            &Observable::exp(1),
            &Character::trivial(1),
            &FolnerBox::new(4, 1).unwrap(),
            &StatePoint::circle(0.0),
        )
        .unwrap();
        assert!(v[0].norm() < 1e-15);
    }

    #[test]
    fn enumeration_of_roots_of_unity() {
        assert!(enumerate_mean(5, |a| unit(a as f64 / 5.0)).norm() < 1e-15);
        assert_eq!(enumerate_mean(3, |_| Complex64::new(1.0, 0.0)), Complex64::new(1.0, 0.0));
    }
}
