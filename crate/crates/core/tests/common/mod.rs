#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use farkas_balance::{reduce_places, PlaceSet, PrimeModulus, SupportSet};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn zp(p: usize) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub p: usize,
    pub support: Vec<usize>,
    pub places: Vec<i64>,
    pub budget: usize,
}

impl RandomInstance {
    pub fn support_set(&self) -> SupportSet {
        SupportSet::from_members(zp(self.p), self.support.iter().copied()).unwrap()
    }

    pub fn place_set(&self) -> PlaceSet {
        reduce_places(&self.places, zp(self.p)).unwrap()
    }

    pub fn json(&self) -> String {
        serde_json::json!({
            "p": self.p,
            "support": self.support,
            "places": self.places,
            "E": self.budget,
        })
        .to_string()
    }

    pub fn write(&self, dir: &Path, name: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, self.json()).unwrap();
        path
    }
}

pub fn random_subset(rng: &mut impl Rng, p: usize) -> Vec<usize> {
    (0..p).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Support uniform over subsets, `k` places in `1..p` (repeats allowed).
pub fn random_instance(
    rng: &mut impl Rng,
    primes: &[usize],
    ks: &[usize],
    budgets: &[usize],
) -> RandomInstance {
    let p = *primes.choose(rng).unwrap();
    let k = *ks.choose(rng).unwrap();
    RandomInstance {
        p,
        support: random_subset(rng, p),
        places: (0..k).map(|_| rng.gen_range(1..p as i64)).collect(),
        budget: *budgets.choose(rng).unwrap(),
    }
}

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_farkas-balance"))
}

pub fn run(args: &[&str]) -> Output {
    bin()
        .env_remove("FARKAS_BALANCE_TOL")
        .args(args)
        .output()
        .unwrap()
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Unique solution of `a x = b` when `a` has full column rank and the
/// system is consistent.
fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let pivot = (r..rows).find(|&i| !a[i][c].is_zero())?;
        a.swap(r, pivot);
        b.swap(r, pivot);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, pr) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * pr;
                }
                let d = &f * &b[r];
                b[i] -= d;
            }
        }
        r += 1;
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(b[..cols].to_vec())
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Whether the origin is a convex combination of the integer columns, by
/// enumerating every basic solution of `[M; 1] v = (0, 1)`.
pub fn exact_origin_in_hull(columns: &[Vec<i64>]) -> bool {
    let m = columns[0].len();
    for size in 1..=(m + 1).min(columns.len()) {
        for s in subsets(columns.len(), size) {
            let mut a = vec![vec![q(0); size]; m + 1];
            for (j, &c) in s.iter().enumerate() {
                for i in 0..m {
                    a[i][j] = q(columns[c][i]);
                }
                a[m][j] = q(1);
            }
            let mut b = vec![q(0); m + 1];
            b[m] = BigRational::one();
            if let Some(v) = solve_exact(a, b) {
                if v.iter().all(|x| !x.is_negative()) {
                    return true;
                }
            }
        }
    }
    false
}

pub fn random_sign_matrix(rng: &mut impl Rng) -> Vec<Vec<i64>> {
    let m = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=10);
    (0..n)
        .map(|_| (0..m).map(|_| rng.gen_range(-1..=1)).collect())
        .collect()
}

/// `sum_n f(n) e^{2 pi i a n / p}` straight from `f64` trigonometry.
pub fn naive_dft(f: &[f64]) -> Vec<(f64, f64)> {
    let p = f.len();
    (0..p)
        .map(|a| {
            f.iter().enumerate().fold((0.0, 0.0), |(re, im), (n, &v)| {
                let theta = 2.0 * std::f64::consts::PI * ((a * n) % p) as f64 / p as f64;
                (re + v * theta.cos(), im + v * theta.sin())
            })
        })
        .collect()
}
