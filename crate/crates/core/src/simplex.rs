//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Problems are given in standard form: minimize `c.x` subject to
//! `A x = b`, `x >= 0`. The implementation is generic over [`Scalar`], so the
//! same code runs in `f64` (with an `eps` threshold) and in exact rationals
//! (with `eps = 0`).
//!
//! [`PivotOrder`] selects which end of the column/basis index range Bland's
//! rule prefers. Both orders terminate; they generally visit different
//! vertices, which lets a second solve act as a loosely coupled cross-check.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed program: {0}")]
    Shape(String),
    #[error("pivot limit {0} reached")]
    PivotLimit(usize),
    #[error("objective is unbounded below")]
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotOrder {
    /// Lowest eligible index first (classic Bland).
    #[default]
    Ascending,
    /// Highest eligible index first.
    Descending,
}

#[derive(Debug, Clone)]
pub struct SimplexOptions<T> {
    /// Entries with magnitude `<= eps` are treated as zero when choosing pivots.
    pub eps: T,
    pub order: PivotOrder,
    pub max_pivots: usize,
}

impl<T: Scalar> Default for SimplexOptions<T> {
    fn default() -> Self {
        Self {
            eps: T::default_pivot_eps(),
            order: PivotOrder::Ascending,
            max_pivots: 100_000,
        }
    }
}

/// `minimize cost.x  s.t.  rows x = rhs, x >= 0`.
#[derive(Debug, Clone)]
pub struct StandardLp<T> {
    pub rows: Vec<Vec<T>>,
    pub rhs: Vec<T>,
    pub cost: Vec<T>,
}

impl<T: Scalar> StandardLp<T> {
    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        if self.rows.len() != self.rhs.len() {
            return Err(LpError::Shape(format!(
                "{} rows but {} right-hand sides",
                self.rows.len(),
                self.rhs.len()
            )));
        }
        if let Some(i) = self.rows.iter().position(|r| r.len() != self.cost.len()) {
            return Err(LpError::Shape(format!(
                "row {i} has {} entries, expected {}",
                self.rows[i].len(),
                self.cost.len()
            )));
        }
        Ok(())
    }
}

/// Result of minimizing the sum of artificial variables.
#[derive(Debug, Clone)]
pub struct PhaseOne<T> {
    /// Structural part of the final basic solution.
    pub x: Vec<T>,
    /// Sum of artificial variables, i.e. `|b - A x|_1`.
    pub infeasibility: T,
    /// Basic structural variables.
    pub basis: Vec<usize>,
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub enum LpStatus<T> {
    Optimal(LpSolution<T>),
    Infeasible { infeasibility: T, pivots: usize },
}

struct Tableau<T> {
    m: usize,
    n_struct: usize,
    /// structural + artificial
    width: usize,
    /// `m` constraint rows followed by the objective row, each `width + 1` long.
    cells: Vec<T>,
    basis: Vec<usize>,
    pivots: usize,
    opts: SimplexOptions<T>,
}

impl<T: Scalar> Tableau<T> {
    fn new(lp: &StandardLp<T>, opts: &SimplexOptions<T>) -> Self {
        let m = lp.rows.len();
        let n = lp.num_vars();
        let width = n + m;
        let stride = width + 1;
        let mut cells = vec![T::zero(); (m + 1) * stride];
        for (i, row) in lp.rows.iter().enumerate() {
            let flip = lp.rhs[i] < T::zero();
            for (j, a) in row.iter().enumerate() {
                cells[i * stride + j] = if flip { -a.clone() } else { a.clone() };
            }
            cells[i * stride + n + i] = T::one();
            cells[i * stride + width] = if flip {
                -lp.rhs[i].clone()
            } else {
                lp.rhs[i].clone()
            };
        }
        // phase-one objective: minimize the sum of artificials
        for j in 0..n {
            let mut d = T::zero();
            for i in 0..m {
                d = d - cells[i * stride + j].clone();
            }
            cells[m * stride + j] = d;
        }
        let mut z = T::zero();
        for i in 0..m {
            z = z - cells[i * stride + width].clone();
        }
        cells[m * stride + width] = z;
        Self {
            m,
            n_struct: n,
            width,
            cells,
            basis: (n..n + m).collect(),
            pivots: 0,
            opts: opts.clone(),
        }
    }

    #[inline]
    fn stride(&self) -> usize {
        self.width + 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> &T {
        &self.cells[i * self.stride() + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> &T {
        self.at(i, self.width)
    }

    fn column_order(&self, limit: usize) -> Box<dyn Iterator<Item = usize>> {
        match self.opts.order {
            PivotOrder::Ascending => Box::new(0..limit),
            PivotOrder::Descending => Box::new((0..limit).rev()),
        }
    }

    fn entering(&self, allow_artificial: bool) -> Option<usize> {
        let limit = if allow_artificial {
            self.width
        } else {
            self.n_struct
        };
        let neg_eps = -self.opts.eps.clone();
        self.column_order(limit)
            .find(|&j| *self.at(self.m, j) < neg_eps && !self.basis.contains(&j))
    }

    fn leaving(&self, q: usize) -> Option<usize> {
        let eps = &self.opts.eps;
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.m {
            let a = self.at(i, q);
            if *a <= *eps {
                continue;
            }
            let ratio = self.rhs(i).clone() / a.clone();
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let better = ratio.clone() < br.clone() - eps.clone();
                    let tie = !better && ratio.clone() <= br.clone() + eps.clone();
                    let prefer = match self.opts.order {
                        PivotOrder::Ascending => self.basis[i] < self.basis[bi],
                        PivotOrder::Descending => self.basis[i] > self.basis[bi],
                    };
                    if better || (tie && prefer) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, q: usize) -> Result<(), LpError> {
        if self.pivots >= self.opts.max_pivots {
            return Err(LpError::PivotLimit(self.opts.max_pivots));
        }
        let stride = self.stride();
        let piv = self.at(r, q).clone();
        for j in 0..stride {
            let v = self.cells[r * stride + j].clone() / piv.clone();
            self.cells[r * stride + j] = v;
        }
        self.cells[r * stride + q] = T::one();
        let pivot_row: Vec<T> = self.cells[r * stride..(r + 1) * stride].to_vec();
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let factor = self.cells[i * stride + q].clone();
            if factor.is_zero() {
                continue;
            }
            for (j, pv) in pivot_row.iter().enumerate() {
                if pv.is_zero() {
                    continue;
                }
                let v = self.cells[i * stride + j].clone() - factor.clone() * pv.clone();
                self.cells[i * stride + j] = v;
            }
            self.cells[i * stride + q] = T::zero();
        }
        // rounding can push a right-hand side marginally below zero
        for i in 0..self.m {
            let b = &self.cells[i * stride + self.width];
            if *b < T::zero() && b.magnitude() <= self.opts.eps {
                self.cells[i * stride + self.width] = T::zero();
            }
        }
        self.basis[r] = q;
        self.pivots += 1;
        Ok(())
    }

    fn iterate(&mut self, allow_artificial: bool) -> Result<(), LpError> {
        while let Some(q) = self.entering(allow_artificial) {
            let r = self.leaving(q).ok_or(LpError::Unbounded)?;
            self.pivot(r, q)?;
        }
        Ok(())
    }

    fn infeasibility(&self) -> T {
        (0..self.m)
            .filter(|&i| self.basis[i] >= self.n_struct)
            .fold(T::zero(), |acc, i| acc + self.rhs(i).clone())
    }

    fn structural_solution(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rhs(i).clone();
            }
        }
        x
    }

    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        for i in 0..self.m {
            if self.basis[i] < self.n_struct {
                continue;
            }
            let candidate = self
                .column_order(self.n_struct)
                .find(|&j| self.at(i, j).magnitude() > self.opts.eps && !self.basis.contains(&j));
            if let Some(j) = candidate {
                self.pivot(i, j)?;
            }
            // otherwise the row is redundant and its artificial stays at zero
        }
        Ok(())
    }

    fn install_cost(&mut self, cost: &[T]) {
        let stride = self.stride();
        let obj = self.m * stride;
        for j in 0..=self.width {
            let own = if j < self.n_struct {
                cost[j].clone()
            } else {
                T::zero()
            };
            let mut d = own;
            for i in 0..self.m {
                let b = self.basis[i];
                if b < self.n_struct && !cost[b].is_zero() {
                    d = d - cost[b].clone() * self.at(i, j).clone();
                }
            }
            self.cells[obj + j] = d;
        }
    }
}

/// Minimizes the total infeasibility of `A x = b, x >= 0`.
pub fn phase_one<T: Scalar>(
    lp: &StandardLp<T>,
    opts: &SimplexOptions<T>,
) -> Result<PhaseOne<T>, LpError> {
    lp.validate()?;
    let mut tab = Tableau::new(lp, opts);
    tab.iterate(true)?;
    Ok(PhaseOne {
        x: tab.structural_solution(),
        infeasibility: tab.infeasibility(),
        basis: tab
            .basis
            .iter()
            .copied()
            .filter(|&b| b < tab.n_struct)
            .collect(),
        pivots: tab.pivots,
    })
}

/// Full two-phase solve. The program is declared infeasible when the phase-one
/// optimum exceeds `feasibility_tol`.
pub fn minimize<T: Scalar>(
    lp: &StandardLp<T>,
    opts: &SimplexOptions<T>,
    feasibility_tol: &T,
) -> Result<LpStatus<T>, LpError> {
    lp.validate()?;
    let mut tab = Tableau::new(lp, opts);
    tab.iterate(true)?;
    let infeasibility = tab.infeasibility();
    if infeasibility > *feasibility_tol {
        return Ok(LpStatus::Infeasible {
            infeasibility,
            pivots: tab.pivots,
        });
    }
    tab.drive_out_artificials()?;
    tab.install_cost(&lp.cost);
    tab.iterate(false)?;
    let x = tab.structural_solution();
    let objective = x
        .iter()
        .zip(&lp.cost)
        .fold(T::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    Ok(LpStatus::Optimal(LpSolution {
        x,
        objective,
        pivots: tab.pivots,
    }))
}
