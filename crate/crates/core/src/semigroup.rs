//! The acting semigroups ℕ and ℤ₊ᵈ, their Følner boxes and characters.
//!
//! Only these concrete semigroups are modelled. They are abelian, so left and
//! right asymptotic invariance coincide and a single box family
//! `F_n = {0, …, n−1}ᵈ` serves as the averaging net.

use std::fmt;

use num_complex::Complex64;

use crate::error::{ErgoError, Result};
use crate::summation::{frac_mul, turns, wrap};

/// An element of ℤ₊ᵈ; `d = 1` models ℕ (with 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemigroupElement(Vec<u64>);

impl SemigroupElement {
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(ErgoError::invalid("semigroup dimension must be at least 1"));
        }
        Ok(Self(coords))
    }

    /// The element `n` of ℕ.
    pub fn scalar(n: u64) -> Self {
        Self(vec![n])
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim.max(1)])
    }

    /// The generator `e_axis` of ℤ₊ᵈ.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut coords = vec![0; dim.max(1)];
        coords[axis] = 1;
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Semigroup composition (coordinatewise addition).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        ErgoError::check_dim(self.dim(), other.dim())?;
        let coords = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                a.checked_add(*b)
                    .ok_or_else(|| ErgoError::invalid("semigroup element overflow"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(coords))
    }

    /// `self` composed with itself `n` times.
    pub fn times(&self, n: u64) -> Result<Self> {
        let coords = self
            .0
            .iter()
            .map(|c| {
                c.checked_mul(n)
                    .ok_or_else(|| ErgoError::invalid("semigroup element overflow"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self(coords))
    }

    /// Sum of coordinates (word length in the standard generators).
    pub fn length(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for SemigroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The averaging window `F_n = {0, …, n−1}ᵈ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FolnerBox {
    side: u64,
    dim: usize,
}

impl FolnerBox {
    pub fn new(side: u64, dim: usize) -> Result<Self> {
        if side == 0 {
            return Err(ErgoError::invalid("Følner box side must be positive"));
        }
        if dim == 0 {
            return Err(ErgoError::invalid("Følner box dimension must be positive"));
        }
        let b = Self { side, dim };
        b.checked_cardinality()?;
        Ok(b)
    }

    pub fn side(&self) -> u64 {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn checked_cardinality(&self) -> Result<u64> {
        let mut card: u64 = 1;
        for _ in 0..self.dim {
            card = card
                .checked_mul(self.side)
                .ok_or_else(|| ErgoError::invalid("Følner box cardinality overflows u64"))?;
        }
        Ok(card)
    }

    /// `|F_n| = nᵈ`.
    pub fn cardinality(&self) -> u64 {
        self.side.pow(self.dim as u32)
    }

    pub fn contains(&self, g: &SemigroupElement) -> bool {
        g.dim() == self.dim && g.coords().iter().all(|&c| c < self.side)
    }

    /// Elements of the box in lexicographic order (last axis fastest).
    pub fn elements(&self) -> impl Iterator<Item = SemigroupElement> + '_ {
        let card = self.cardinality();
        (0..card).map(move |mut idx| {
            let mut coords = vec![0; self.dim];
            for c in coords.iter_mut().rev() {
                *c = idx % self.side;
                idx /= self.side;
            }
            SemigroupElement(coords)
        })
    }
}

/// Relative Følner defect `|F_n △ (g + F_n)| / |F_n|`, computed per axis.
pub fn folner_defect(window: &FolnerBox, g: &SemigroupElement) -> Result<f64> {
    ErgoError::check_dim(window.dim(), g.dim())?;
    let n = window.side() as u128;
    let mut overlap: u128 = 1;
    let mut card: u128 = 1;
    for &c in g.coords() {
        overlap *= n.saturating_sub(c as u128);
        card *= n;
    }
    Ok(2.0 * (card - overlap) as f64 / card as f64)
}

/// A character `χ(g) = Π_k e^{2πi θ_k g_k}` of ℤ₊ᵈ, stored by its angles.
///
/// Angles are kept exactly as given (a grid endpoint of 1.0 stays 1.0);
/// evaluation works modulo 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    angles: Vec<f64>,
}

impl Character {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(ErgoError::invalid("character needs at least one angle"));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(ErgoError::invalid("character angles must be finite"));
        }
        Ok(Self { angles })
    }

    pub fn trivial(dim: usize) -> Self {
        Self {
            angles: vec![0.0; dim.max(1)],
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.angles.iter().all(|&a| wrap(a) == 0.0)
    }

    /// Phase of `χ(g)` in turns, reduced to `[0, 1)`.
    pub fn phase(&self, g: &SemigroupElement) -> Result<f64> {
        ErgoError::check_dim(self.dim(), g.dim())?;
        Ok(self.phase_unchecked(g.coords()))
    }

    #[inline]
    pub(crate) fn phase_unchecked(&self, g: &[u64]) -> f64 {
        let mut t = 0.0;
        for (&c, &a) in g.iter().zip(&self.angles) {
            t = wrap(t + frac_mul(c, a));
        }
        t
    }
}

/// `χ(g)` as a unit complex number.
pub fn character_eval(chi: &Character, g: &SemigroupElement) -> Result<Complex64> {
    Ok(turns(chi.phase(g)?))
}

/// Uniform grid of characters between `lo` and `hi`, inclusive at both ends,
/// with `steps` points per axis, in lexicographic order.
pub fn character_grid(lo: &[f64], hi: &[f64], steps: usize) -> Result<Vec<Character>> {
    if steps < 2 {
        return Err(ErgoError::invalid("character grid needs at least 2 steps"));
    }
    ErgoError::check_dim(lo.len(), hi.len())?;
    if lo.is_empty() {
        return Err(ErgoError::invalid("character grid needs at least one axis"));
    }
    if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
        return Err(ErgoError::invalid("character grid requires lo <= hi coordinatewise"));
    }
    let axes: Vec<Vec<f64>> = lo
        .iter()
        .zip(hi)
        .map(|(&l, &h)| {
            (0..steps)
                .map(|j| {
                    if j + 1 == steps {
                        h
                    } else {
                        l + (h - l) * j as f64 / (steps - 1) as f64
                    }
                })
                .collect()
        })
        .collect();
    let total = steps.pow(lo.len() as u32);
    let mut grid = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut angles = vec![0.0; lo.len()];
        for (axis, a) in angles.iter_mut().enumerate().rev() {
            *a = axes[axis][idx % steps];
            idx /= steps;
        }
        grid.push(Character { angles });
    }
    Ok(grid)
}

/// Circular distance between two characters: the largest per-axis distance
/// of the angles modulo 1.
pub fn character_distance(a: &Character, b: &Character) -> Result<f64> {
    ErgoError::check_dim(a.dim(), b.dim())?;
    Ok(a.angles
        .iter()
        .zip(&b.angles)
        .map(|(x, y)| {
            let d = wrap(x - y);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max))
}

/// Drops the characters strictly closer than `radius` to `center`.
pub fn exclude_near(grid: Vec<Character>, center: &Character, radius: f64) -> Result<Vec<Character>> {
    let mut kept = Vec::with_capacity(grid.len());
    for chi in grid {
        if character_distance(&chi, center)? >= radius {
            kept.push(chi);
        }
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn brute_defect(n: u64, g: &[u64]) -> f64 {
        let window = FolnerBox::new(n, g.len()).unwrap();
        let base: HashSet<Vec<u64>> = window.elements().map(|e| e.coords().to_vec()).collect();
        let shifted: HashSet<Vec<u64>> = base
            .iter()
            .map(|e| e.iter().zip(g).map(|(a, b)| a + b).collect())
            .collect();
        base.symmetric_difference(&shifted).count() as f64 / base.len() as f64
    }

    #[test]
    fn defect_examples() {
        let b = FolnerBox::new(10, 1).unwrap();
        assert_eq!(folner_defect(&b, &SemigroupElement::scalar(0)).unwrap(), 0.0);
        assert_eq!(folner_defect(&b, &SemigroupElement::scalar(1)).unwrap(), 0.2);
        let b2 = FolnerBox::new(4, 2).unwrap();
        let g = SemigroupElement::new(vec![1, 0]).unwrap();
        assert_eq!(folner_defect(&b2, &g).unwrap(), 0.5);
        assert!(folner_defect(&b2, &SemigroupElement::scalar(1)).is_err());
    }

    #[test]
    fn defect_matches_brute_force() {
        for n in 1..=20u64 {
            for a in 0..=5u64 {
                assert_eq!(
                    folner_defect(&FolnerBox::new(n, 1).unwrap(), &SemigroupElement::scalar(a))
                        .unwrap(),
                    brute_defect(n, &[a])
                );
                for b in 0..=5u64 {
                    let g = SemigroupElement::new(vec![a, b]).unwrap();
                    let exact = folner_defect(&FolnerBox::new(n, 2).unwrap(), &g).unwrap();
                    assert!((exact - brute_defect(n, &[a, b])).abs() < 1e-15, "n={n} g={g}");
                }
            }
        }
    }

    #[test]
    fn defect_is_nonincreasing_and_bounded() {
        for g in 0..=7u64 {
            let mut prev = f64::INFINITY;
            for n in 1..200u64 {
                let d = folner_defect(&FolnerBox::new(n, 1).unwrap(), &SemigroupElement::scalar(g))
                    .unwrap();
                assert!(d <= prev);
                assert!(d <= 2.0 * g as f64 / n as f64 + 1e-15);
                prev = d;
            }
            assert!(prev < 0.08);
        }
    }

    #[test]
    fn character_examples() {
        let one = character_eval(&Character::trivial(1), &SemigroupElement::scalar(7)).unwrap();
        assert_eq!(one, Complex64::new(1.0, 0.0));
        let half = Character::new(vec![0.5]).unwrap();
        assert_eq!(
            character_eval(&half, &SemigroupElement::scalar(3)).unwrap(),
            Complex64::new(-1.0, 0.0)
        );
        let chi = Character::new(vec![0.25, 0.5]).unwrap();
        let g = SemigroupElement::new(vec![1, 1]).unwrap();
        assert_eq!(character_eval(&chi, &g).unwrap(), Complex64::new(0.0, -1.0));
        assert!(character_eval(&chi, &SemigroupElement::scalar(1)).is_err());
    }

    #[test]
    fn grid_examples() {
        let grid = character_grid(&[0.1], &[0.4], 4).unwrap();
        let got: Vec<f64> = grid.iter().map(|c| c.angles()[0]).collect();
        for (g, e) in got.iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((g - e).abs() < 1e-15);
        }
        assert_eq!(got[0], 0.1);
        assert_eq!(got[3], 0.4);

        let grid = character_grid(&[0.0], &[1.0], 5).unwrap();
        let got: Vec<f64> = grid.iter().map(|c| c.angles()[0]).collect();
        assert_eq!(got, vec![0.0, 0.25, 0.5, 0.75, 1.0]);

        // degenerate interval is allowed and yields duplicates
        let grid = character_grid(&[0.0], &[0.0], 2).unwrap();
        assert_eq!(grid.len(), 2);
        assert_eq!(grid[0], grid[1]);

        assert!(character_grid(&[0.0], &[1.0], 1).is_err());
        assert!(character_grid(&[0.5], &[0.1], 3).is_err());
        assert_eq!(character_grid(&[0.0, 0.0], &[1.0, 0.5], 3).unwrap().len(), 9);
    }

    #[test]
    fn exclusion_removes_nearby_characters() {
        let grid = character_grid(&[0.1], &[0.4], 64).unwrap();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let resonance = Character::new(vec![1.0 - alpha]).unwrap();
        let spacing = 0.3 / 63.0;
        let kept = exclude_near(grid, &resonance, spacing / 2.0).unwrap();
        assert_eq!(kept.len(), 63);
        let d = Character::new(vec![0.95]).unwrap();
        let e = Character::new(vec![0.05]).unwrap();
        assert!((character_distance(&d, &e).unwrap() - 0.1).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn characters_are_multiplicative(
            angles in proptest::collection::vec(0.0f64..1.0, 1..4),
            seed_g in proptest::collection::vec(0u64..1_000_000, 4),
            seed_h in proptest::collection::vec(0u64..1_000_000, 4),
        ) {
            let d = angles.len();
            let chi = Character::new(angles).unwrap();
            let g = SemigroupElement::new(seed_g[..d].to_vec()).unwrap();
            let h = SemigroupElement::new(seed_h[..d].to_vec()).unwrap();
            let gh = g.compose(&h).unwrap();
            let lhs = character_eval(&chi, &gh).unwrap();
            let rhs = character_eval(&chi, &g).unwrap() * character_eval(&chi, &h).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12);
            prop_assert!((lhs.norm() - 1.0).abs() <= 1e-12);
        }
    }
}
