//! Functions on the cyclic group Z_p: Fourier transform, convolution,
//! supports and canonical reduction of frequency places.
//!
//! The transform convention is `F(a) = sum_n f(n) e^{+2 pi i a n / p}` with
//! the `1/p` factor carried by the inverse. All transforms are direct
//! `O(p^2)` sums over a precomputed table of roots of unity; angles are
//! always reduced modulo `p` in integer arithmetic before evaluation.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Deterministic trial-division primality test.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime modulus `p >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(usize);

impl PrimeModulus {
    pub fn new(p: usize) -> Result<Self> {
        if is_prime(p) {
            Ok(Self(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `(p - 1) / 2`, the largest canonical place.
    #[inline]
    pub fn half(self) -> usize {
        (self.0 - 1) / 2
    }

    /// Reduces an arbitrary integer into `{0, ..., p-1}`.
    pub fn reduce(self, x: i64) -> usize {
        x.rem_euclid(self.0 as i64) as usize
    }

    /// `(a * b) mod p` without overflow for the sizes used here.
    #[inline]
    pub fn mul(self, a: usize, b: usize) -> usize {
        ((a as u128 * b as u128) % self.0 as u128) as usize
    }

    #[inline]
    pub fn neg(self, a: usize) -> usize {
        (self.0 - a % self.0) % self.0
    }

    fn ensure_same(self, other: PrimeModulus) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.0,
                right: other.0,
            })
        }
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Table of `e^{2 pi i k / p}` for `k = 0..p`.
#[derive(Debug, Clone)]
pub struct RootsOfUnity<T> {
    modulus: PrimeModulus,
    cos: Vec<T>,
    sin: Vec<T>,
}

impl<T: Real> RootsOfUnity<T> {
    pub fn new(modulus: PrimeModulus) -> Self {
        let p = modulus.get();
        let step = T::TAU() / T::from_usize_lossy(p);
        let (cos, sin) = (0..p)
            .map(|k| {
                let theta = step * T::from_usize_lossy(k);
                (theta.cos(), theta.sin())
            })
            .unzip();
        Self { modulus, cos, sin }
    }

    /// `cos(2 pi k / p)` for any `k`, reduced mod `p`.
    #[inline]
    pub fn cos(&self, k: usize) -> T {
        self.cos[k % self.modulus.get()]
    }

    #[inline]
    pub fn sin(&self, k: usize) -> T {
        self.sin[k % self.modulus.get()]
    }

    /// `e^{2 pi i a n / p}`.
    #[inline]
    pub fn at(&self, a: usize, n: usize) -> Complex<T> {
        let k = self.modulus.mul(a, n);
        Complex::new(self.cos[k], self.sin[k])
    }
}

/// A real-valued function on Z_p.
#[derive(Debug, Clone, PartialEq)]
pub struct ZpFunction<T = f64> {
    modulus: PrimeModulus,
    values: Vec<T>,
}

impl<T: Real> ZpFunction<T> {
    pub fn new(modulus: PrimeModulus, values: Vec<T>) -> Result<Self> {
        if values.len() != modulus.get() {
            return Err(Error::LengthMismatch {
                expected: modulus.get(),
                actual: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { modulus, values })
    }

    pub fn zeros(modulus: PrimeModulus) -> Self {
        Self {
            modulus,
            values: vec![T::zero(); modulus.get()],
        }
    }

    pub fn constant(modulus: PrimeModulus, c: T) -> Self {
        Self {
            modulus,
            values: vec![c; modulus.get()],
        }
    }

    /// Indicator function of a support set.
    pub fn indicator(set: &SupportSet) -> Self {
        Self {
            modulus: set.modulus(),
            values: set
                .mask()
                .iter()
                .map(|&b| if b { T::one() } else { T::zero() })
                .collect(),
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    pub fn l1_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v.abs())
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Maximum absolute difference to `other`.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.modulus.ensure_same(other.modulus)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())))
    }
}

impl<T> std::ops::Index<usize> for ZpFunction<T> {
    type Output = T;
    fn index(&self, n: usize) -> &T {
        &self.values[n]
    }
}

/// Complex Fourier coefficients indexed by place `a in {0, ..., p-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T = f64> {
    modulus: PrimeModulus,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(modulus: PrimeModulus, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != modulus.get() {
            return Err(Error::LengthMismatch {
                expected: modulus.get(),
                actual: coeffs.len(),
            });
        }
        if let Some(i) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { modulus, coeffs })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn max_norm(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc.max(c.norm()))
    }

    /// `max_a |F(a) - conj(F(-a))|`.
    pub fn symmetry_defect(&self) -> T {
        let p = self.modulus;
        self.coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (a, c)| {
                acc.max((c - self.coeffs[p.neg(a)].conj()).norm())
            })
    }

    /// Places where `|F(a)| > tol`.
    pub fn support(&self, tol: T) -> Vec<usize> {
        (0..self.coeffs.len())
            .filter(|&a| self.coeffs[a].norm() > tol)
            .collect()
    }
}

impl<T> std::ops::Index<usize> for Spectrum<T> {
    type Output = Complex<T>;
    fn index(&self, a: usize) -> &Complex<T> {
        &self.coeffs[a]
    }
}

/// Forward transform `F(a) = sum_n f(n) e^{2 pi i a n / p}`.
pub fn dft<T: Real>(f: &ZpFunction<T>) -> Spectrum<T> {
    let roots = RootsOfUnity::new(f.modulus);
    dft_with(&roots, f)
}

/// Forward transform reusing a precomputed root table.
pub fn dft_with<T: Real>(roots: &RootsOfUnity<T>, f: &ZpFunction<T>) -> Spectrum<T> {
    let p = f.modulus.get();
    let coeffs = (0..p)
        .map(|a| {
            f.values
                .iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (n, &v)| {
                    acc + roots.at(a, n) * v
                })
        })
        .collect();
    Spectrum {
        modulus: f.modulus,
        coeffs,
    }
}

/// Single Fourier coefficient at place `a`.
pub fn dft_at<T: Real>(roots: &RootsOfUnity<T>, f: &ZpFunction<T>, a: usize) -> Complex<T> {
    f.values
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (n, &v)| {
            acc + roots.at(a, n) * v
        })
}

/// Complex inverse transform `f(n) = (1/p) sum_a F(a) e^{-2 pi i a n / p}`.
pub fn idft_complex<T: Real>(spectrum: &Spectrum<T>) -> Vec<Complex<T>> {
    let p = spectrum.modulus;
    let roots = RootsOfUnity::new(p);
    let scale = T::one() / T::from_usize_lossy(p.get());
    (0..p.get())
        .map(|n| {
            let sum = spectrum
                .coeffs
                .iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, c)| {
                    acc + c * roots.at(a, n).conj()
                });
            sum * scale
        })
        .collect()
}

/// Real inverse transform.
///
/// Fails with [`Error::SymmetryViolation`] when the spectrum is not conjugate
/// symmetric within `tol * max(1, |F|_inf)`; the residual imaginary parts are
/// then discarded.
pub fn idft<T: Real>(spectrum: &Spectrum<T>, tol: T) -> Result<ZpFunction<T>> {
    let scale = T::one().max(spectrum.max_norm());
    let defect = spectrum.symmetry_defect();
    if defect > tol * scale {
        return Err(Error::SymmetryViolation {
            deviation: defect.to_f64_lossy(),
        });
    }
    let values = idft_complex(spectrum).into_iter().map(|c| c.re).collect();
    ZpFunction::new(spectrum.modulus, values)
}

/// Cyclic convolution `(f * g)(n) = sum_a f(a) g(n - a)`.
pub fn convolve<T: Real>(f: &ZpFunction<T>, g: &ZpFunction<T>) -> Result<ZpFunction<T>> {
    f.modulus.ensure_same(g.modulus)?;
    let p = f.modulus.get();
    let values = (0..p)
        .map(|n| {
            (0..p).fold(T::zero(), |acc, a| {
                acc + f.values[a] * g.values[(n + p - a) % p]
            })
        })
        .collect();
    Ok(ZpFunction {
        modulus: f.modulus,
        values,
    })
}

/// Distinguished places `a_1..a_k` and their canonical representatives
/// `b_1 < ... < b_t` in `{1, ..., (p-1)/2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceSet {
    modulus: PrimeModulus,
    raw: Vec<i64>,
    reduced: Vec<usize>,
}

impl PlaceSet {
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn raw(&self) -> &[i64] {
        &self.raw
    }

    /// Raw places reduced into `{1, ..., p-1}`.
    pub fn raw_residues(&self) -> Vec<usize> {
        self.raw.iter().map(|&a| self.modulus.reduce(a)).collect()
    }

    pub fn reduced(&self) -> &[usize] {
        &self.reduced
    }

    /// `k`.
    pub fn k(&self) -> usize {
        self.raw.len()
    }

    /// `t`.
    pub fn t(&self) -> usize {
        self.reduced.len()
    }

    /// `{0} ∪ {±a_i}` as a membership mask over `Z_p`.
    pub fn allowed_spectrum(&self) -> Vec<bool> {
        let p = self.modulus;
        let mut mask = vec![false; p.get()];
        mask[0] = true;
        for &b in &self.reduced {
            mask[b] = true;
            mask[p.neg(b)] = true;
        }
        mask
    }
}

/// Canonicalizes places: `a -> min(a mod p, p - a mod p)`, sorted and deduplicated.
pub fn reduce_places(raw: &[i64], modulus: PrimeModulus) -> Result<PlaceSet> {
    if let Some(&a) = raw.iter().find(|&&a| modulus.reduce(a) == 0) {
        return Err(Error::ZeroPlace(a));
    }
    if modulus.get() == 2 && !raw.is_empty() {
        return Err(Error::PlacesWithTwo);
    }
    let mut reduced: Vec<usize> = raw
        .iter()
        .map(|&a| {
            let r = modulus.reduce(a);
            r.min(modulus.get() - r)
        })
        .collect();
    reduced.sort_unstable();
    reduced.dedup();
    Ok(PlaceSet {
        modulus,
        raw: raw.to_vec(),
        reduced,
    })
}

/// The set of points where a function `g : Z_p -> [0, 1]` is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportSet {
    modulus: PrimeModulus,
    mask: Vec<bool>,
}

impl SupportSet {
    pub fn from_members(
        modulus: PrimeModulus,
        members: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut mask = vec![false; modulus.get()];
        for n in members {
            if n >= modulus.get() {
                return Err(Error::IndexOutOfRange {
                    index: n,
                    p: modulus.get(),
                });
            }
            mask[n] = true;
        }
        Ok(Self { modulus, mask })
    }

    pub fn from_mask(modulus: PrimeModulus, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != modulus.get() {
            return Err(Error::LengthMismatch {
                expected: modulus.get(),
                actual: mask.len(),
            });
        }
        Ok(Self { modulus, mask })
    }

    pub fn empty(modulus: PrimeModulus) -> Self {
        Self {
            modulus,
            mask: vec![false; modulus.get()],
        }
    }

    pub fn full(modulus: PrimeModulus) -> Self {
        Self {
            modulus,
            mask: vec![true; modulus.get()],
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn contains(&self, n: usize) -> bool {
        self.mask.get(n).copied().unwrap_or(false)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&n| self.mask[n]).collect()
    }

    pub fn complement(&self) -> SupportSet {
        SupportSet {
            modulus: self.modulus,
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `{n : g(n) > 0}`, exact positivity. Every value must lie in `[0, 1]`.
pub fn support_of<T: Real>(g: &ZpFunction<T>) -> Result<SupportSet> {
    for (index, &v) in g.values.iter().enumerate() {
        if !(v >= T::zero() && v <= T::one()) {
            return Err(Error::RangeViolation {
                index,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(SupportSet {
        modulus: g.modulus,
        mask: g.values.iter().map(|&v| v > T::zero()).collect(),
    })
}
