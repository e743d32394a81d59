//! Does the origin lie in the convex hull of a set of points?
//!
//! [`origin_in_hull`] answers with a certificate either way: sparse convex
//! weights `v >= 0`, `sum v = 1`, `M v = 0` (at most `m + 1` nonzeros), or a
//! unit normal `w` with `w . x_j >= margin > 0` for every column `x_j`.
//! Instances whose residual and margin both fall inside the tolerance band
//! are reported as [`Error::NumericalAmbiguity`] rather than guessed.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simplex::{self, LpStatus, PivotOrder, SimplexOptions, StandardLp};

/// An `m x n` matrix stored by columns, each column tagged with a label
/// (its index in the original, undeleted matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct PointMatrix<T> {
    rows: usize,
    labels: Vec<usize>,
    entries: Vec<T>,
}

impl<T: Scalar> PointMatrix<T> {
    pub fn from_columns(rows: usize, columns: Vec<(usize, Vec<T>)>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidInput("matrix needs at least one row".into()));
        }
        let mut labels = Vec::with_capacity(columns.len());
        let mut entries = Vec::with_capacity(columns.len() * rows);
        for (label, col) in columns {
            if col.len() != rows {
                return Err(Error::LengthMismatch {
                    expected: rows,
                    actual: col.len(),
                });
            }
            if labels.contains(&label) {
                return Err(Error::InvalidInput(format!(
                    "duplicate column label {label}"
                )));
            }
            labels.push(label);
            entries.extend(col);
        }
        Ok(Self {
            rows,
            labels,
            entries,
        })
    }

    /// Columns labeled `0..n` in order.
    pub fn from_unlabeled(rows: usize, columns: Vec<Vec<T>>) -> Result<Self> {
        Self::from_columns(rows, columns.into_iter().enumerate().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.entries[j * self.rows..(j + 1) * self.rows]
    }

    pub fn position_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// No more columns than rows (`n <= m`).
    pub fn is_underdetermined(&self) -> bool {
        self.cols() <= self.rows
    }

    pub fn scaled(&self, factor: &T) -> Self {
        Self {
            rows: self.rows,
            labels: self.labels.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| e.clone() * factor.clone())
                .collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, e| {
            let a = e.magnitude();
            if a > acc {
                a
            } else {
                acc
            }
        })
    }

    /// `M v` for a dense coefficient vector over the current columns.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.rows];
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.column(j)) {
                *o = o.clone() + x.clone() * vj.clone();
            }
        }
        out
    }

    /// `M v` for sparse coefficients addressed by label.
    pub fn apply_sparse(&self, v: &SparseCoefficients<T>) -> Result<Vec<T>> {
        let mut dense = vec![T::zero(); self.cols()];
        for (label, w) in &v.entries {
            let j = self
                .position_of(*label)
                .ok_or_else(|| Error::InvalidInput(format!("unknown column label {label}")))?;
            dense[j] = w.clone();
        }
        Ok(self.apply(&dense))
    }

    /// `w . x_j` for every column.
    pub fn left_apply(&self, w: &[T]) -> Vec<T> {
        (0..self.cols()).map(|j| dot(w, self.column(j))).collect()
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| {
        let a = x.magnitude();
        if a > acc {
            a
        } else {
            acc
        }
    })
}

#[derive(Debug, Clone)]
pub struct GeometryConfig<T> {
    /// Maximum accepted `|M v|_inf` for the hull branch.
    pub tol_hull: T,
    /// Minimum margin (exclusive) for the separation branch.
    pub tol_sep: T,
    pub pivot_eps: T,
    pub max_pivots: usize,
    pub order: PivotOrder,
}

impl<T: Scalar> Default for GeometryConfig<T> {
    fn default() -> Self {
        Self {
            tol_hull: T::default_tolerance(),
            tol_sep: T::default_tolerance(),
            pivot_eps: T::default_pivot_eps(),
            max_pivots: 100_000,
            order: PivotOrder::Ascending,
        }
    }
}

impl<T: Scalar> GeometryConfig<T> {
    fn simplex_options(&self) -> SimplexOptions<T> {
        SimplexOptions {
            eps: self.pivot_eps.clone(),
            order: self.order,
            max_pivots: self.max_pivots,
        }
    }
}

/// Convex weights addressed by column label. Weights are positive and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCoefficients<T> {
    pub entries: Vec<(usize, T)>,
}

impl<T: Scalar> SparseCoefficients<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(l, _)| *l)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatingNormal<T> {
    /// Unit Euclidean norm.
    pub w: Vec<T>,
    /// `min_j w . x_j`, strictly positive.
    pub margin: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullDiagnostics<T> {
    pub simplex_pivots: usize,
    pub reduction_steps: usize,
    /// `|M v|_inf` of the returned weights, or of the best phase-one point.
    pub residual: T,
    pub margin: Option<T>,
    pub nonzeros: Option<usize>,
    pub underdetermined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HullOutcome<T> {
    InHull {
        coefficients: SparseCoefficients<T>,
        diagnostics: HullDiagnostics<T>,
    },
    Separated {
        normal: SeparatingNormal<T>,
        diagnostics: HullDiagnostics<T>,
    },
}

impl<T> HullOutcome<T> {
    pub fn is_in_hull(&self) -> bool {
        matches!(self, HullOutcome::InHull { .. })
    }

    pub fn diagnostics(&self) -> &HullDiagnostics<T> {
        match self {
            HullOutcome::InHull { diagnostics, .. }
            | HullOutcome::Separated { diagnostics, .. } => diagnostics,
        }
    }
}

/// Divides `M` by its largest entry so pivoting decisions do not depend on scale.
fn normalized<T: Scalar>(matrix: &PointMatrix<T>) -> (PointMatrix<T>, T) {
    let scale = matrix.max_abs();
    if scale.is_zero() {
        (matrix.clone(), T::one())
    } else {
        (matrix.scaled(&(T::one() / scale.clone())), scale)
    }
}

/// Decides whether `0` lies in the convex hull of the columns of `matrix`.
pub fn origin_in_hull<T: Scalar>(
    matrix: &PointMatrix<T>,
    cfg: &GeometryConfig<T>,
) -> Result<HullOutcome<T>> {
    if matrix.cols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let (unit, _) = normalized(matrix);
    let m = matrix.rows();
    let n = matrix.cols();

    // {M v = 0, 1.v = 1, v >= 0}
    let mut rows: Vec<Vec<T>> = (0..m)
        .map(|i| (0..n).map(|j| unit.column(j)[i].clone()).collect())
        .collect();
    rows.push(vec![T::one(); n]);
    let mut rhs = vec![T::zero(); m];
    rhs.push(T::one());
    let lp = StandardLp {
        rows,
        rhs,
        cost: vec![T::zero(); n],
    };
    let phase = simplex::phase_one(&lp, &cfg.simplex_options())?;

    let total = phase.x.iter().fold(T::zero(), |acc, x| acc + x.clone());
    let half = T::one() / (T::one() + T::one());
    let mut residual = phase.infeasibility.clone();
    if total > half {
        let v: Vec<T> = phase.x.iter().map(|x| x.clone() / total.clone()).collect();
        residual = max_abs(&matrix.apply(&v));
        if residual <= cfg.tol_hull {
            let reduction = caratheodory_reduce(matrix, &v, cfg)?;
            let diagnostics = HullDiagnostics {
                simplex_pivots: phase.pivots,
                reduction_steps: reduction.steps,
                residual: reduction.residual,
                margin: None,
                nonzeros: Some(reduction.coefficients.len()),
                underdetermined: matrix.is_underdetermined(),
            };
            return Ok(HullOutcome::InHull {
                coefficients: reduction.coefficients,
                diagnostics,
            });
        }
    }

    match separating_normal(matrix, cfg) {
        Ok(normal) => {
            let diagnostics = HullDiagnostics {
                simplex_pivots: phase.pivots,
                reduction_steps: 0,
                residual,
                margin: Some(normal.margin.clone()),
                nonzeros: None,
                underdetermined: matrix.is_underdetermined(),
            };
            Ok(HullOutcome::Separated {
                normal,
                diagnostics,
            })
        }
        Err(Error::NoStrictSeparation { margin }) => Err(Error::NumericalAmbiguity {
            residual: residual.to_f64_lossy(),
            margin,
        }),
        Err(e) => Err(e),
    }
}

/// Output of [`caratheodory_reduce`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<T> {
    pub coefficients: SparseCoefficients<T>,
    pub steps: usize,
    pub residual: T,
}

/// A nonzero `z` with `A z = 0` where `A` is `[M_S; 1...1]` restricted to the
/// given columns, found by Gauss-Jordan elimination with partial pivoting.
fn augmented_null_vector<T: Scalar>(
    unit: &PointMatrix<T>,
    active: &[usize],
    eps: &T,
) -> Option<Vec<T>> {
    let rows = unit.rows() + 1;
    let k = active.len();
    let mut a: Vec<Vec<T>> = (0..rows)
        .map(|i| {
            active
                .iter()
                .map(|&j| {
                    if i < unit.rows() {
                        unit.column(j)[i].clone()
                    } else {
                        T::one()
                    }
                })
                .collect()
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut free = None;
    let mut r = 0;
    for c in 0..k {
        let best = (r..rows).fold(None::<(usize, T)>, |best, i| {
            let mag = a[i][c].magnitude();
            match best {
                Some((_, ref b)) if *b >= mag => best,
                _ => Some((i, mag)),
            }
        });
        match best {
            Some((i, mag)) if mag > *eps => {
                a.swap(r, i);
                let piv = a[r][c].clone();
                for x in a[r].iter_mut() {
                    *x = x.clone() / piv.clone();
                }
                for i2 in 0..rows {
                    if i2 == r || a[i2][c].is_zero() {
                        continue;
                    }
                    let f = a[i2][c].clone();
                    let pivot_row = a[r].clone();
                    for (x, pr) in a[i2].iter_mut().zip(pivot_row) {
                        *x = x.clone() - f.clone() * pr;
                    }
                }
                pivot_cols.push(c);
                r += 1;
            }
            _ => {
                free = Some(c);
                break;
            }
        }
    }
    let f = free?;
    let mut z = vec![T::zero(); k];
    z[f] = T::one();
    for (i, &pc) in pivot_cols.iter().enumerate() {
        z[pc] = -a[i][f].clone();
    }
    Some(z)
}

/// Carathéodory reduction of a convex combination of columns hitting the
/// origin to one supported on at most `m + 1` columns.
///
/// While the active columns, augmented by the all-ones row, have a nontrivial
/// null vector `z`, move `v` along `-z` until the first coefficient vanishes.
/// Dependent sets of at most `m + 1` columns are reduced further when the
/// step keeps the residual within bounds.
pub fn caratheodory_reduce<T: Scalar>(
    matrix: &PointMatrix<T>,
    v: &[T],
    cfg: &GeometryConfig<T>,
) -> Result<Reduction<T>> {
    if v.len() != matrix.cols() {
        return Err(Error::LengthMismatch {
            expected: matrix.cols(),
            actual: v.len(),
        });
    }
    if v.iter().any(|x| *x < T::zero()) {
        return Err(Error::InvalidInput(
            "coefficients must be nonnegative".into(),
        ));
    }
    let (unit, _) = normalized(matrix);
    let m = matrix.rows();
    let mut weights = v.to_vec();
    let mut steps = 0usize;

    loop {
        let active: Vec<usize> = (0..weights.len())
            .filter(|&j| weights[j] > T::zero())
            .collect();
        if active.len() <= 1 {
            break;
        }
        let z = match augmented_null_vector(&unit, &active, &cfg.pivot_eps) {
            Some(z) => z,
            None => break,
        };
        let positive = |z: &[T]| z.iter().any(|x| *x > cfg.pivot_eps);
        let z = if positive(&z) {
            z
        } else {
            z.into_iter().map(|x| -x).collect()
        };
        if !positive(&z) {
            break;
        }
        // ratio test, ties to the smallest label
        let mut step: Option<(usize, T)> = None;
        for (idx, zi) in z.iter().enumerate() {
            if *zi <= cfg.pivot_eps {
                continue;
            }
            let ratio = weights[active[idx]].clone() / zi.clone();
            let replace = match &step {
                None => true,
                Some((bi, br)) => {
                    ratio < *br
                        || (ratio == *br
                            && matrix.labels()[active[idx]] < matrix.labels()[active[*bi]])
                }
            };
            if replace {
                step = Some((idx, ratio));
            }
        }
        let Some((hit, t)) = step else { break };

        let mut next = weights.clone();
        for (idx, zi) in z.iter().enumerate() {
            let j = active[idx];
            let updated = next[j].clone() - t.clone() * zi.clone();
            next[j] = if updated < T::zero() {
                T::zero()
            } else {
                updated
            };
        }
        next[active[hit]] = T::zero();

        let optional = active.len() <= m + 1;
        let candidate_residual = max_abs(&matrix.apply(&normalize_sum(&next)));
        let bound = cfg.tol_hull.clone() * T::from_usize_lossy(steps + 2);
        if optional && candidate_residual > bound {
            break;
        }
        weights = next;
        steps += 1;
    }

    let weights = normalize_sum(&weights);
    let residual = max_abs(&matrix.apply(&weights));
    let bound = cfg.tol_hull.clone() * T::from_usize_lossy(steps + 1);
    if residual > bound {
        return Err(Error::ResidualBlowup {
            residual: residual.to_f64_lossy(),
            bound: bound.to_f64_lossy(),
        });
    }
    let entries = weights
        .into_iter()
        .enumerate()
        .filter(|(_, w)| *w > T::zero())
        .map(|(j, w)| (matrix.labels()[j], w))
        .collect();
    Ok(Reduction {
        coefficients: SparseCoefficients { entries },
        steps,
        residual,
    })
}

fn normalize_sum<T: Scalar>(v: &[T]) -> Vec<T> {
    let total = v.iter().fold(T::zero(), |acc, x| acc + x.clone());
    if total.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x.clone() / total.clone()).collect()
}

/// Unit normal `w` maximizing the worst-case margin `min_j w . x_j`.
///
/// Solves `max d s.t. w . x_j >= d, |w|_inf <= 1, d >= 0`, then rescales `w`
/// to unit Euclidean length and recomputes the margin on the original columns.
pub fn separating_normal<T: Scalar>(
    matrix: &PointMatrix<T>,
    cfg: &GeometryConfig<T>,
) -> Result<SeparatingNormal<T>> {
    if matrix.cols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let (unit, _) = normalized(matrix);
    let m = matrix.rows();
    let n = matrix.cols();
    let two = T::one() + T::one();

    // variables: u (m, w = u - 1), d, s (n), r (m)
    let width = m + 1 + n + m;
    let mut rows = Vec::with_capacity(n + m);
    let mut rhs = Vec::with_capacity(n + m);
    for j in 0..n {
        let col = unit.column(j);
        let mut row = vec![T::zero(); width];
        row[..m].clone_from_slice(col);
        row[m] = -T::one();
        row[m + 1 + j] = -T::one();
        rows.push(row);
        rhs.push(col.iter().fold(T::zero(), |acc, x| acc + x.clone()));
    }
    for i in 0..m {
        let mut row = vec![T::zero(); width];
        row[i] = T::one();
        row[m + 1 + n + i] = T::one();
        rows.push(row);
        rhs.push(two.clone());
    }
    let mut cost = vec![T::zero(); width];
    cost[m] = -T::one();
    let lp = StandardLp { rows, rhs, cost };
    let feas = cfg.tol_hull.clone() * T::from_usize_lossy(n + m) + cfg.pivot_eps.clone();
    let solution = match simplex::minimize(&lp, &cfg.simplex_options(), &feas)? {
        LpStatus::Optimal(s) => s,
        LpStatus::Infeasible { infeasibility, .. } => {
            return Err(Error::InvalidInput(format!(
                "separation program reported infeasible ({:e})",
                infeasibility.to_f64_lossy()
            )))
        }
    };
    let depth = solution.x[m].clone();
    if depth <= cfg.tol_sep {
        return Err(Error::NoStrictSeparation {
            margin: depth.to_f64_lossy(),
        });
    }
    let w = sparsest_normal(&unit, &depth, cfg).unwrap_or_else(|| {
        solution.x[..m]
            .iter()
            .map(|u| u.clone() - T::one())
            .collect()
    });
    let norm = dot(&w, &w).square_root();
    if norm.is_zero() {
        return Err(Error::NoStrictSeparation { margin: 0.0 });
    }
    let w: Vec<T> = w.into_iter().map(|x| x / norm.clone()).collect();
    let margin = matrix
        .left_apply(&w)
        .into_iter()
        .reduce(|a, b| if b < a { b } else { a })
        .expect("nonempty");
    if margin <= cfg.tol_sep {
        return Err(Error::NoStrictSeparation {
            margin: margin.to_f64_lossy(),
        });
    }
    Ok(SeparatingNormal { w, margin })
}

/// Among normals with `|w|_inf <= 1` reaching depth `depth`, one of least
/// `l1` norm. Pins down coordinates the depth program leaves free.
fn sparsest_normal<T: Scalar>(
    unit: &PointMatrix<T>,
    depth: &T,
    cfg: &GeometryConfig<T>,
) -> Option<Vec<T>> {
    let m = unit.rows();
    let n = unit.cols();
    let target = depth.clone();
    // variables: w+ (m), w- (m), s (n), r (m)
    let width = 3 * m + n;
    let mut rows = Vec::with_capacity(n + m);
    let mut rhs = Vec::with_capacity(n + m);
    for j in 0..n {
        let col = unit.column(j);
        let mut row = vec![T::zero(); width];
        for i in 0..m {
            row[i] = col[i].clone();
            row[m + i] = -col[i].clone();
        }
        row[2 * m + j] = -T::one();
        rows.push(row);
        rhs.push(target.clone());
    }
    for i in 0..m {
        let mut row = vec![T::zero(); width];
        row[i] = T::one();
        row[m + i] = T::one();
        row[2 * m + n + i] = T::one();
        rows.push(row);
        rhs.push(T::one());
    }
    let mut cost = vec![T::zero(); width];
    for c in cost.iter_mut().take(2 * m) {
        *c = T::one();
    }
    let lp = StandardLp { rows, rhs, cost };
    let feas = cfg.tol_hull.clone() * T::from_usize_lossy(n + m) + cfg.pivot_eps.clone();
    match simplex::minimize(&lp, &cfg.simplex_options(), &feas) {
        Ok(LpStatus::Optimal(s)) => Some(
            (0..m)
                .map(|i| s.x[i].clone() - s.x[m + i].clone())
                .collect(),
        ),
        _ => None,
    }
}
