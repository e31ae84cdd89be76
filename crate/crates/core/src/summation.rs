//! Compensated accumulation and phase arithmetic on the unit circle.

use num_complex::Complex64;

/// Neumaier-compensated sum of real numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a vector in ℂᴺ, one accumulator per real component.
#[derive(Clone, Debug)]
pub struct VectorSum {
    re: Vec<CompensatedSum>,
    im: Vec<CompensatedSum>,
}

impl VectorSum {
    pub fn new(dim: usize) -> Self {
        Self {
            re: vec![CompensatedSum::new(); dim],
            im: vec![CompensatedSum::new(); dim],
        }
    }

    #[inline]
    pub fn add(&mut self, v: &[Complex64]) {
        for ((re, im), z) in self.re.iter_mut().zip(self.im.iter_mut()).zip(v) {
            re.add(z.re);
            im.add(z.im);
        }
    }

    /// Returns the accumulated sum divided by `count`.
    pub fn mean(&self, count: f64) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(re, im)| Complex64::new(re.value() / count, im.value() / count))
            .collect()
    }
}

/// Reduces `t` into `[0, 1)`.
#[inline]
pub fn wrap(t: f64) -> f64 {
    if (0.0..1.0).contains(&t) {
        return t;
    }
    // exact for finite t; tiny negative inputs round up to exactly 1.0
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Fractional part of `m · a`, computed with an error-free product so that it
/// stays accurate for `m` up to 2⁵³.
#[inline]
pub fn frac_mul(m: u64, a: f64) -> f64 {
    let a = wrap(a);
    let mf = m as f64;
    let p = mf * a;
    let err = mf.mul_add(a, -p);
    wrap((p - p.floor()) + err)
}

/// `e^{2πi t}`. Quarter turns are returned exactly.
#[inline]
pub fn turns(t: f64) -> Complex64 {
    let t = wrap(t);
    if t == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if t == 0.25 {
        Complex64::new(0.0, 1.0)
    } else if t == 0.5 {
        Complex64::new(-1.0, 0.0)
    } else if t == 0.75 {
        Complex64::new(0.0, -1.0)
    } else {
        let (s, c) = (std::f64::consts::TAU * t).sin_cos();
        Complex64::new(c, s)
    }
}

/// Euclidean norm of a vector in ℂᴺ.
#[inline]
pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean distance between two vectors in ℂᴺ.
pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
