//! Independent certificate checking and small cross-check oracles.
//!
//! Nothing here reads solver diagnostics when deciding a verdict: every
//! property is recomputed from `h`, the support set and the raw places with
//! the primitives in [`crate::zp`].

use std::fmt;

use crate::dichotomy::Certificate;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::simplex::{self, LpStatus, PivotOrder, SimplexOptions, StandardLp};
use crate::zp::{
    convolve, dft_at, dft_with, PlaceSet, PrimeModulus, RootsOfUnity, SupportSet, ZpFunction,
};

/// Largest modulus accepted by [`oracle_branch1`].
pub const ORACLE_MAX_P: usize = 2000;

/// Threshold for "positive" in [`demo_minorant`].
pub const MINORANT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyTolerances {
    /// Absolute bound on Fourier coefficients that must vanish.
    pub spectral: f64,
    /// Absolute bound on `|sum_n h(n)|`.
    pub sum: f64,
    /// Allowed shortfall of `|h|_1` below `E`.
    pub l1_slack: f64,
}

impl VerifyTolerances {
    pub fn for_modulus(p: PrimeModulus) -> Self {
        Self {
            spectral: 1e-7 * p.get() as f64,
            sum: 1e-7,
            l1_slack: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub observed: f64,
    pub limit: f64,
    /// Informational checks are reported but do not affect the verdict.
    pub informational: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub variant: &'static str,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed && !c.informational)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variant: {}", self.variant)?;
        writeln!(
            f,
            "{:<28} {:<6} {:>14} {:>14}  detail",
            "property", "result", "observed", "limit"
        )?;
        for c in &self.checks {
            let result = match (c.passed, c.informational) {
                (true, _) => "pass",
                (false, true) => "info",
                (false, false) => "FAIL",
            };
            writeln!(
                f,
                "{:<28} {:<6} {:>14.6e} {:>14.6e}  {}",
                c.name, result, c.observed, c.limit, c.detail
            )?;
        }
        write!(
            f,
            "verdict: {}",
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

fn check(name: &'static str, observed: f64, limit: f64, detail: String) -> Check {
    Check {
        name,
        passed: observed <= limit,
        observed,
        limit,
        informational: false,
        detail,
    }
}

fn ensure_modulus(a: PrimeModulus, b: PrimeModulus) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ModulusMismatch {
            left: a.get(),
            right: b.get(),
        })
    }
}

/// Re-checks every conclusion a certificate claims for the instance
/// `(support, places, budget)`.
pub fn verify_certificate<T: Real>(
    cert: &Certificate<T>,
    support: &SupportSet,
    places: &PlaceSet,
    budget: usize,
    tol: &VerifyTolerances,
) -> Result<VerificationReport> {
    let modulus = support.modulus();
    ensure_modulus(modulus, places.modulus())?;
    ensure_modulus(modulus, cert.h().modulus())?;
    let roots = RootsOfUnity::<T>::new(modulus);
    let values: Vec<f64> = cert.h().values().iter().map(|v| v.to_f64_lossy()).collect();
    let mut checks = Vec::new();

    match cert {
        Certificate::VanishingBalanced(c) => {
            let over = values
                .iter()
                .map(|v| (v.abs() - 1.0).max(0.0))
                .fold(0.0, f64::max);
            checks.push(check(
                "value_range",
                over,
                0.0,
                "excess over |h| <= 1".into(),
            ));

            let wrong: Vec<usize> = (0..values.len())
                .filter(|&n| {
                    if support.contains(n) {
                        values[n] < 0.0
                    } else {
                        values[n] > 0.0
                    }
                })
                .collect();
            let worst = wrong.iter().map(|&n| values[n].abs()).fold(0.0, f64::max);
            checks.push(check(
                "sign_pattern",
                worst,
                0.0,
                format!("{} indices with the wrong sign", wrong.len()),
            ));

            let sum: f64 = values.iter().sum();
            checks.push(check("zero_sum", sum.abs(), tol.sum, "|sum h|".into()));

            let l1: f64 = values.iter().map(|v| v.abs()).sum();
            checks.push(check(
                "l1_bound",
                budget as f64 - l1,
                tol.l1_slack,
                format!("|h|_1 = {l1:.12}, E = {budget}"),
            ));
            checks.push(check(
                "l1_claim",
                (c.l1_norm.to_f64_lossy() - l1).abs(),
                tol.sum,
                "claimed vs recomputed |h|_1".into(),
            ));

            let mut worst = 0.0f64;
            for a in places.raw_residues() {
                for place in [a, modulus.neg(a)] {
                    worst = worst.max(dft_at(&roots, cert.h(), place).norm().to_f64_lossy());
                }
            }
            checks.push(check(
                "spectral_vanishing",
                worst,
                tol.spectral,
                format!("max |H(±a_i)| over {} places", places.k()),
            ));
        }
        Certificate::SmallSpectralSupport(c) => {
            ensure_modulus(modulus, c.spectrum.modulus())?;
            let fresh = dft_with(&roots, cert.h());
            let allowed = places.allowed_spectrum();
            let outside = (0..modulus.get())
                .filter(|&a| !allowed[a])
                .map(|a| fresh[a].norm().to_f64_lossy())
                .fold(0.0, f64::max);
            checks.push(check(
                "spectral_support",
                outside,
                tol.spectral,
                "max |H(a)| outside {0, ±a_i}".into(),
            ));
            let claim = (0..modulus.get())
                .map(|a| (fresh[a] - c.spectrum[a]).norm().to_f64_lossy())
                .fold(0.0, f64::max);
            checks.push(check(
                "spectrum_claim",
                claim,
                tol.spectral,
                "claimed vs fresh transform".into(),
            ));

            let out_of_range = c.exceptions.iter().filter(|&&n| n >= modulus.get()).count();
            checks.push(check(
                "exceptions_in_range",
                out_of_range as f64,
                0.0,
                "exception indices outside Z_p".into(),
            ));

            let violations: Vec<usize> = (0..values.len())
                .filter(|&n| {
                    if support.contains(n) {
                        values[n] <= 0.0
                    } else {
                        values[n] >= 0.0
                    }
                })
                .collect();
            let uncovered = violations
                .iter()
                .filter(|n| !c.exceptions.contains(n))
                .count();
            checks.push(check(
                "strict_sign",
                uncovered as f64,
                0.0,
                format!(
                    "{} sign violations, {} outside the exception set",
                    violations.len(),
                    uncovered
                ),
            ));

            let t = places.t();
            let rounds = c.rounds_before_separation;
            checks.push(check(
                "rounds_within_budget",
                rounds as f64,
                budget.max(1) as f64 - 1.0,
                format!("{rounds} hull rounds before separation"),
            ));
            let count = c.exceptions.len() as f64;
            checks.push(check(
                "exceptions_implemented",
                count,
                ((2 * t + 2) * rounds) as f64,
                "|exceptions| <= (2t+2) * rounds".into(),
            ));
            let mut wide = check(
                "exceptions_2k_plus_1",
                count,
                ((2 * places.k() + 1) * budget) as f64,
                "|exceptions| <= (2k+1) E".into(),
            );
            wide.informational = true;
            checks.push(wide);
        }
    }

    Ok(VerificationReport {
        variant: cert.tag(),
        checks,
    })
}

/// Best achievable `|h|_1` for the first alternative, by linear programming.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch1Oracle<T> {
    pub max_l1: T,
    pub witness: ZpFunction<T>,
    /// `max_l1 >= E` up to `1e-9`.
    pub feasible_at_budget: bool,
}

/// Maximizes `sum_n s(n) h(n)` over balanced `h in [-1, 1]^p` with the sign
/// pattern of `support` and `H(b_j) = 0` for every reduced place.
pub fn oracle_branch1<T: Real>(
    support: &SupportSet,
    places: &PlaceSet,
    budget: usize,
) -> Result<Branch1Oracle<T>> {
    let modulus = support.modulus();
    ensure_modulus(modulus, places.modulus())?;
    let p = modulus.get();
    if p > ORACLE_MAX_P {
        return Err(Error::TooLarge {
            p,
            limit: ORACLE_MAX_P,
        });
    }
    let roots = RootsOfUnity::<T>::new(modulus);
    let sign = |n: usize| {
        if support.contains(n) {
            T::one()
        } else {
            -T::one()
        }
    };

    // variables y (|h|, p of them) then slacks z with y + z = 1
    let width = 2 * p;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut balance = vec![T::zero(); width];
    for (n, slot) in balance.iter_mut().take(p).enumerate() {
        *slot = sign(n);
    }
    rows.push(balance);
    rhs.push(T::zero());
    for &b in places.reduced() {
        let mut re = vec![T::zero(); width];
        let mut im = vec![T::zero(); width];
        for n in 0..p {
            let k = modulus.mul(n, b);
            re[n] = sign(n) * roots.cos(k);
            im[n] = sign(n) * roots.sin(k);
        }
        rows.push(re);
        rows.push(im);
        rhs.push(T::zero());
        rhs.push(T::zero());
    }
    for n in 0..p {
        let mut row = vec![T::zero(); width];
        row[n] = T::one();
        row[p + n] = T::one();
        rows.push(row);
        rhs.push(T::one());
    }
    let mut cost = vec![T::zero(); width];
    for c in cost.iter_mut().take(p) {
        *c = -T::one();
    }
    let lp = StandardLp { rows, rhs, cost };
    let opts = SimplexOptions {
        order: PivotOrder::Descending,
        ..SimplexOptions::default()
    };
    let feas = T::from_f64_lossy(1e-9);
    let solution = match simplex::minimize(&lp, &opts, &feas)? {
        LpStatus::Optimal(s) => s,
        LpStatus::Infeasible { infeasibility, .. } => {
            return Err(Error::InvalidInput(format!(
                "oracle program infeasible ({:e})",
                infeasibility.to_f64_lossy()
            )))
        }
    };
    let y = &solution.x[..p];
    let max_l1 = y.iter().fold(T::zero(), |acc, &v| acc + v);
    let witness = ZpFunction::new(modulus, (0..p).map(|n| sign(n) * y[n]).collect())?;
    Ok(Branch1Oracle {
        feasible_at_budget: max_l1.to_f64_lossy() >= budget as f64 - 1e-9,
        max_l1,
        witness,
    })
}

/// `S + T` by enumerating all pairs.
pub fn brute_force_sumset(s: &SupportSet, t: &SupportSet) -> Result<SupportSet> {
    ensure_modulus(s.modulus(), t.modulus())?;
    let p = s.modulus().get();
    let mut mask = vec![false; p];
    for a in s.members() {
        for b in t.members() {
            mask[(a + b) % p] = true;
        }
    }
    SupportSet::from_mask(s.modulus(), mask)
}

/// `{n : (f * S)(n) > tol}` for `f >= 0` on `S` and `f <= 0` off `S`.
/// The result is checked to lie inside `S + S`.
pub fn demo_minorant<T: Real>(s: &SupportSet, f: &ZpFunction<T>) -> Result<SupportSet> {
    ensure_modulus(s.modulus(), f.modulus())?;
    for (n, &v) in f.values().iter().enumerate() {
        let ok = if s.contains(n) {
            v >= T::zero()
        } else {
            v <= T::zero()
        };
        if !ok {
            return Err(Error::SignPatternViolation(n));
        }
    }
    let conv = convolve(f, &ZpFunction::indicator(s))?;
    let tol = T::from_f64_lossy(MINORANT_TOL);
    let mask: Vec<bool> = conv.values().iter().map(|&v| v > tol).collect();
    let sumset = brute_force_sumset(s, s)?;
    if let Some(n) = (0..mask.len()).find(|&n| mask[n] && !sumset.contains(n)) {
        return Err(Error::ContainmentViolation(n));
    }
    SupportSet::from_mask(s.modulus(), mask)
}
