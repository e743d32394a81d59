//! The balanced-function / small-spectral-support dichotomy.
//!
//! Columns of the sign matrix are indexed by `j in Z_p`:
//! `±(1, cos(2 pi j b_1 / p), sin(2 pi j b_1 / p), ..., sin(2 pi j b_t / p))`,
//! positive when `j` is in the support of `g`. Each round asks whether the
//! origin lies in the hull of the surviving columns. A hit yields convex
//! weights whose columns are then deleted; after `E` hits the weights add up
//! to a balanced function whose transform vanishes at every place. A miss
//! yields a normal `w`, read back as a trigonometric polynomial with the
//! right sign everywhere except at deleted columns.

use std::collections::BTreeSet;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hull::{origin_in_hull, GeometryConfig, HullOutcome, PointMatrix, SparseCoefficients};
use crate::scalar::Real;
use crate::zp::{support_of, PlaceSet, RootsOfUnity, Spectrum, SupportSet, ZpFunction};

#[derive(Debug, Clone)]
pub struct SolveConfig<T> {
    /// Number of hull rounds `E` (the guaranteed `l1` mass of a balanced certificate).
    pub budget: usize,
    pub geometry: GeometryConfig<T>,
    pub tol_dft: T,
}

impl<T: Real> SolveConfig<T> {
    pub fn new(budget: usize) -> Self {
        Self {
            budget,
            geometry: GeometryConfig::default(),
            tol_dft: T::default_tolerance(),
        }
    }
}

/// What happened in one hull round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord<T> {
    pub round: usize,
    pub columns: usize,
    /// Nonzero weights found, `None` when the round separated.
    pub nonzeros: Option<usize>,
    pub residual: T,
    pub margin: Option<T>,
    pub simplex_pivots: usize,
    pub reduction_steps: usize,
}

/// Balanced function in `[-1, 1]` vanishing at every distinguished place.
#[derive(Debug, Clone, PartialEq)]
pub struct VanishingBalanced<T> {
    pub h: ZpFunction<T>,
    /// Number of hull rounds `T` that contributed.
    pub rounds: usize,
    pub l1_norm: T,
    pub history: Vec<RoundRecord<T>>,
}

/// Trigonometric polynomial supported on `{0, ±a_i}` with the sign of the
/// support of `g` outside `exceptions`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallSpectralSupport<T> {
    pub h: ZpFunction<T>,
    pub spectrum: Spectrum<T>,
    pub exceptions: BTreeSet<usize>,
    pub rounds_before_separation: usize,
    /// Least value of `w . x` over retained columns; `None` when every
    /// column was deleted before separation.
    pub margin: Option<T>,
    pub normal: Vec<T>,
    pub history: Vec<RoundRecord<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<T> {
    VanishingBalanced(VanishingBalanced<T>),
    SmallSpectralSupport(SmallSpectralSupport<T>),
}

impl<T: Real> Certificate<T> {
    pub fn h(&self) -> &ZpFunction<T> {
        match self {
            Certificate::VanishingBalanced(c) => &c.h,
            Certificate::SmallSpectralSupport(c) => &c.h,
        }
    }

    pub fn h_mut(&mut self) -> &mut ZpFunction<T> {
        match self {
            Certificate::VanishingBalanced(c) => &mut c.h,
            Certificate::SmallSpectralSupport(c) => &mut c.h,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Certificate::VanishingBalanced(_) => "vanishing_balanced",
            Certificate::SmallSpectralSupport(_) => "small_spectral_support",
        }
    }

    pub fn history(&self) -> &[RoundRecord<T>] {
        match self {
            Certificate::VanishingBalanced(c) => &c.history,
            Certificate::SmallSpectralSupport(c) => &c.history,
        }
    }
}

/// The unsigned column `(1, cos, sin, ...)` for index `j`.
fn trig_vector<T: Real>(roots: &RootsOfUnity<T>, places: &PlaceSet, j: usize) -> Vec<T> {
    let p = places.modulus();
    let mut col = Vec::with_capacity(2 * places.t() + 1);
    col.push(T::one());
    for &b in places.reduced() {
        let k = p.mul(j, b);
        col.push(roots.cos(k));
        col.push(roots.sin(k));
    }
    col
}

fn check_moduli(support: &SupportSet, places: &PlaceSet) -> Result<()> {
    if support.modulus() != places.modulus() {
        return Err(Error::ModulusMismatch {
            left: support.modulus().get(),
            right: places.modulus().get(),
        });
    }
    Ok(())
}

/// Sign matrix with `2t + 1` rows and one column per surviving index.
pub fn build_sign_matrix<T: Real>(
    support: &SupportSet,
    places: &PlaceSet,
    deleted: &BTreeSet<usize>,
) -> Result<PointMatrix<T>> {
    check_moduli(support, places)?;
    let roots = RootsOfUnity::new(places.modulus());
    sign_matrix_with(&roots, support, places, deleted)
}

fn sign_matrix_with<T: Real>(
    roots: &RootsOfUnity<T>,
    support: &SupportSet,
    places: &PlaceSet,
    deleted: &BTreeSet<usize>,
) -> Result<PointMatrix<T>> {
    let p = places.modulus().get();
    let columns: Vec<(usize, Vec<T>)> = (0..p)
        .filter(|j| !deleted.contains(j))
        .map(|j| {
            let col = trig_vector(roots, places, j);
            if support.contains(j) {
                (j, col)
            } else {
                (j, col.into_iter().map(|x| -x).collect())
            }
        })
        .collect();
    if columns.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    PointMatrix::from_columns(2 * places.t() + 1, columns)
}

/// `|M_1 v|_inf` for weights addressed by original index.
pub fn full_matrix_residual<T: Real>(
    support: &SupportSet,
    places: &PlaceSet,
    v: &SparseCoefficients<T>,
) -> Result<T> {
    let m1 = build_sign_matrix::<T>(support, places, &BTreeSet::new())?;
    Ok(m1
        .apply_sparse(v)?
        .into_iter()
        .fold(T::zero(), |acc, x| acc.max(x.abs())))
}

/// Runs the iteration for `g : Z_p -> [0, 1]`; only its support matters.
pub fn run_dichotomy_for_g<T: Real>(
    g: &ZpFunction<T>,
    places: &PlaceSet,
    cfg: &SolveConfig<T>,
) -> Result<Certificate<T>> {
    let support = support_of(g)?;
    run_dichotomy(&support, places, cfg)
}

/// Runs up to `E` hull rounds and returns whichever certificate the
/// iteration produces.
pub fn run_dichotomy<T: Real>(
    support: &SupportSet,
    places: &PlaceSet,
    cfg: &SolveConfig<T>,
) -> Result<Certificate<T>> {
    check_moduli(support, places)?;
    let p = places.modulus();
    if cfg.budget == 0 {
        return Ok(Certificate::VanishingBalanced(VanishingBalanced {
            h: ZpFunction::zeros(p),
            rounds: 0,
            l1_norm: T::zero(),
            history: Vec::new(),
        }));
    }

    let roots = RootsOfUnity::new(p);
    let mut deleted = BTreeSet::new();
    let mut collected: Vec<SparseCoefficients<T>> = Vec::new();
    let mut history = Vec::new();

    for round in 1..=cfg.budget {
        let matrix = match sign_matrix_with(&roots, support, places, &deleted) {
            Ok(m) => m,
            Err(Error::EmptyMatrix) => {
                // nothing left to separate: every index is an exception
                let mut w = vec![T::zero(); 2 * places.t() + 1];
                w[0] = T::one();
                let (h, spectrum) = assemble_spectral(&w, places)?;
                return Ok(Certificate::SmallSpectralSupport(SmallSpectralSupport {
                    h,
                    spectrum,
                    exceptions: deleted,
                    rounds_before_separation: round - 1,
                    margin: None,
                    normal: w,
                    history,
                }));
            }
            Err(e) => return Err(e),
        };
        let columns = matrix.cols();
        match origin_in_hull(&matrix, &cfg.geometry)? {
            HullOutcome::InHull {
                coefficients,
                diagnostics,
            } => {
                history.push(RoundRecord {
                    round,
                    columns,
                    nonzeros: Some(coefficients.len()),
                    residual: diagnostics.residual,
                    margin: None,
                    simplex_pivots: diagnostics.simplex_pivots,
                    reduction_steps: diagnostics.reduction_steps,
                });
                deleted.extend(coefficients.labels());
                collected.push(coefficients);
            }
            HullOutcome::Separated {
                normal,
                diagnostics,
            } => {
                history.push(RoundRecord {
                    round,
                    columns,
                    nonzeros: None,
                    residual: diagnostics.residual,
                    margin: Some(normal.margin),
                    simplex_pivots: diagnostics.simplex_pivots,
                    reduction_steps: 0,
                });
                let (h, spectrum) = assemble_spectral(&normal.w, places)?;
                return Ok(Certificate::SmallSpectralSupport(SmallSpectralSupport {
                    h,
                    spectrum,
                    exceptions: deleted,
                    rounds_before_separation: round - 1,
                    margin: Some(normal.margin),
                    normal: normal.w,
                    history,
                }));
            }
        }
    }

    let h = assemble_vanishing(&collected, support)?;
    let l1_norm = h.l1_norm();
    Ok(Certificate::VanishingBalanced(VanishingBalanced {
        h,
        rounds: collected.len(),
        l1_norm,
        history,
    }))
}

/// `h = V` on the support and `-V` off it, where `V` is the sum of the
/// collected weight vectors placed at their original indices.
pub fn assemble_vanishing<T: Real>(
    collected: &[SparseCoefficients<T>],
    support: &SupportSet,
) -> Result<ZpFunction<T>> {
    let p = support.modulus();
    let mut seen = BTreeSet::new();
    let mut values = vec![T::zero(); p.get()];
    for v in collected {
        for (label, w) in &v.entries {
            if *label >= p.get() {
                return Err(Error::IndexOutOfRange {
                    index: *label,
                    p: p.get(),
                });
            }
            if !seen.insert(*label) {
                return Err(Error::DisjointnessViolation(*label));
            }
            values[*label] = if support.contains(*label) { *w } else { -*w };
        }
    }
    ZpFunction::new(p, values)
}

/// Reads a normal `w = (w_0, c_1, s_1, ..., c_t, s_t)` as
/// `h(x) = w_0 + sum_j c_j cos(2 pi x b_j / p) + s_j sin(2 pi x b_j / p)`
/// and returns `h` with its exact spectrum under the forward convention
/// `H(a) = sum_x h(x) e^{+2 pi i a x / p}`:
/// `H(0) = p w_0`, `H(b_j) = p (c_j + i s_j) / 2`, `H(-b_j) = conj(H(b_j))`.
pub fn assemble_spectral<T: Real>(
    w: &[T],
    places: &PlaceSet,
) -> Result<(ZpFunction<T>, Spectrum<T>)> {
    let t = places.t();
    if w.len() != 2 * t + 1 {
        return Err(Error::LengthMismatch {
            expected: 2 * t + 1,
            actual: w.len(),
        });
    }
    let modulus = places.modulus();
    let p = modulus.get();
    let roots = RootsOfUnity::<T>::new(modulus);
    let values = (0..p)
        .map(|x| {
            trig_vector(&roots, places, x)
                .into_iter()
                .zip(w)
                .fold(T::zero(), |acc, (c, &wi)| acc + c * wi)
        })
        .collect();
    let h = ZpFunction::new(modulus, values)?;

    let pf = T::from_usize_lossy(p);
    let half = pf / (T::one() + T::one());
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); p];
    coeffs[0] = Complex::new(pf * w[0], T::zero());
    for (j, &b) in places.reduced().iter().enumerate() {
        let c = Complex::new(half * w[2 * j + 1], half * w[2 * j + 2]);
        coeffs[b] = c;
        coeffs[modulus.neg(b)] = c.conj();
    }
    let spectrum = Spectrum::new(modulus, coeffs)?;
    Ok((h, spectrum))
}
