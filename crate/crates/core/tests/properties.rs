mod common;

use common::*;
use farkas_balance::format::{CertificateFile, ConfigEcho, Real17};
use farkas_balance::{
    brute_force_sumset, convolve, dft, idft, origin_in_hull, reduce_places, run_dichotomy,
    verify_certificate, GeometryConfig, HullOutcome, PointMatrix, SolveConfig, SupportSet,
    VerifyTolerances, ZpFunction,
};
use proptest::prelude::*;

const PRIMES: [usize; 10] = [2, 3, 5, 7, 11, 13, 31, 61, 101, 211];

fn function() -> impl Strategy<Value = ZpFunction<f64>> {
    prop::sample::select(PRIMES.to_vec()).prop_flat_map(|p| {
        prop::collection::vec(-10.0..10.0f64, p)
            .prop_map(move |v| ZpFunction::new(zp(p), v).unwrap())
    })
}

fn function_pair() -> impl Strategy<Value = (ZpFunction<f64>, ZpFunction<f64>)> {
    prop::sample::select(PRIMES.to_vec()).prop_flat_map(|p| {
        (
            prop::collection::vec(-1.0..1.0f64, p),
            prop::collection::vec(-1.0..1.0f64, p),
        )
            .prop_map(move |(a, b)| {
                (
                    ZpFunction::new(zp(p), a).unwrap(),
                    ZpFunction::new(zp(p), b).unwrap(),
                )
            })
    })
}

fn set_pair() -> impl Strategy<Value = (SupportSet, SupportSet)> {
    prop::sample::select(PRIMES.to_vec()).prop_flat_map(|p| {
        (
            prop::collection::vec(any::<bool>(), p),
            prop::collection::vec(any::<bool>(), p),
        )
            .prop_map(move |(a, b)| {
                (
                    SupportSet::from_mask(zp(p), a).unwrap(),
                    SupportSet::from_mask(zp(p), b).unwrap(),
                )
            })
    })
}

fn instance() -> impl Strategy<Value = RandomInstance> {
    (
        prop::sample::select(vec![5usize, 7, 11, 13, 31]),
        0usize..=3,
        0usize..=5,
    )
        .prop_flat_map(|(p, k, budget)| {
            (
                prop::collection::vec(any::<bool>(), p),
                prop::collection::vec(1..p as i64, k),
            )
                .prop_map(move |(mask, places)| RandomInstance {
                    p,
                    support: (0..p).filter(|&n| mask[n]).collect(),
                    places,
                    budget,
                })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dft_roundtrip(f in function()) {
        let p = f.modulus().get() as f64;
        let back = idft(&dft(&f), 1e-9).unwrap();
        prop_assert!(back.distance(&f).unwrap() <= 1e-9 * p);
    }

    #[test]
    fn dft_conjugate_symmetry(f in function()) {
        let p = f.modulus().get();
        let spec = dft(&f);
        for a in 1..p {
            prop_assert!((spec[a] - spec[p - a].conj()).norm() <= 1e-10 * f.l1_norm().max(1.0));
        }
    }

    #[test]
    fn parseval(f in function()) {
        let p = f.modulus().get() as f64;
        let energy: f64 = dft(&f).coeffs().iter().map(|z| z.norm_sqr()).sum();
        let direct = p * f.values().iter().map(|v| v * v).sum::<f64>();
        prop_assert!((energy - direct).abs() <= 1e-9 * direct.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn convolution_theorem((f, g) in function_pair()) {
        let p = f.modulus().get();
        let lhs = dft(&convolve(&f, &g).unwrap());
        let (ff, gg) = (dft(&f), dft(&g));
        for a in 0..p {
            prop_assert!((lhs[a] - ff[a] * gg[a]).norm() <= 1e-8 * p as f64);
        }
    }

    #[test]
    fn reduce_places_idempotent_and_order_free(
        p in prop::sample::select(vec![3usize, 5, 7, 11, 101]),
        raw in prop::collection::vec(-500i64..500, 0..6),
    ) {
        let m = zp(p);
        let raw: Vec<i64> = raw.into_iter().filter(|a| a.rem_euclid(p as i64) != 0).collect();
        let once = reduce_places(&raw, m).unwrap();
        let again: Vec<i64> = once.reduced().iter().map(|&b| b as i64).collect();
        prop_assert_eq!(reduce_places(&again, m).unwrap().reduced().to_vec(), once.reduced().to_vec());
        let mut reversed = raw.clone();
        reversed.reverse();
        prop_assert_eq!(reduce_places(&reversed, m).unwrap().reduced().to_vec(), once.reduced().to_vec());
        for &b in once.reduced() {
            prop_assert!(b >= 1 && b <= (p - 1) / 2);
        }
    }

    #[test]
    fn sumset_law((s, t) in set_pair()) {
        let c = convolve(&ZpFunction::<f64>::indicator(&s), &ZpFunction::indicator(&t)).unwrap();
        let by_pairs = brute_force_sumset(&s, &t).unwrap();
        for n in 0..s.modulus().get() {
            prop_assert_eq!(c[n] > 0.0, by_pairs.contains(n));
        }
    }

    #[test]
    fn hull_outcome_sound_and_scale_free(
        cols in prop::collection::vec(prop::collection::vec(-3i32..=3, 3), 1..9),
        shift in -6i32..=6,
    ) {
        let cfg = GeometryConfig::<f64>::default();
        let to_f = |scale: f64| -> PointMatrix<f64> {
            PointMatrix::from_unlabeled(3, cols.iter().map(|c| c.iter().map(|&x| x as f64 * scale).collect()).collect()).unwrap()
        };
        let lambda = 2f64.powi(shift);
        let base = origin_in_hull(&to_f(1.0), &cfg).unwrap();
        let scaled = origin_in_hull(&to_f(lambda), &cfg).unwrap();
        prop_assert_eq!(base.is_in_hull(), scaled.is_in_hull());
        match (&base, &scaled) {
            (HullOutcome::InHull { coefficients: a, .. }, HullOutcome::InHull { coefficients: b, .. }) => {
                prop_assert_eq!(a, b);
                prop_assert!(a.len() <= 4);
                prop_assert!((a.total() - 1.0).abs() <= 1e-10);
                prop_assert!(a.entries.iter().all(|e| e.1 > 0.0));
                let image = to_f(1.0).apply_sparse(a).unwrap();
                prop_assert!(image.iter().all(|x| x.abs() <= 10.0 * cfg.tol_hull));
            }
            (HullOutcome::Separated { normal: a, .. }, HullOutcome::Separated { normal: b, .. }) => {
                prop_assert_eq!(&a.w, &b.w);
                prop_assert!((b.margin - lambda * a.margin).abs() <= 1e-12 * lambda);
                for c in &cols {
                    let dot: f64 = c.iter().zip(&a.w).map(|(&x, w)| x as f64 * w).sum();
                    prop_assert!(dot >= a.margin - 1e-12 && a.margin > 0.0);
                }
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn planted_separation_is_found(
        raw_w in prop::collection::vec(-1.0..1.0f64, 2..=5),
        raw_cols in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 5), 1..12),
    ) {
        let m = raw_w.len();
        let norm = raw_w.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let w: Vec<f64> = raw_w.iter().map(|x| x / norm).collect();
        // push every column into the half-space w . x >= 0.1
        let cols: Vec<Vec<f64>> = raw_cols
            .iter()
            .map(|c| {
                let c = &c[..m];
                let d: f64 = c.iter().zip(&w).map(|(x, y)| x * y).sum();
                let lift = (0.1 - d).max(0.0);
                c.iter().zip(&w).map(|(x, y)| x + lift * y).collect()
            })
            .collect();
        let matrix = PointMatrix::from_unlabeled(m, cols.clone()).unwrap();
        match origin_in_hull(&matrix, &GeometryConfig::default()).unwrap() {
            HullOutcome::Separated { normal, .. } => {
                let len = normal.w.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!((len - 1.0).abs() < 1e-12);
                // box-normalized programs lose at most a factor sqrt(m)
                prop_assert!(normal.margin >= 0.1 / (m as f64).sqrt() - 1e-9);
                for c in &cols {
                    let dot: f64 = c.iter().zip(&normal.w).map(|(x, y)| x * y).sum();
                    prop_assert!(dot >= normal.margin - 1e-12);
                }
            }
            other => prop_assert!(false, "expected separation, got {:?}", other),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dichotomy_is_total_deterministic_and_verifiable(inst in instance()) {
        let (s, places) = (inst.support_set(), inst.place_set());
        let cfg = SolveConfig::<f64>::new(inst.budget);
        let a = run_dichotomy(&s, &places, &cfg).unwrap();
        let b = run_dichotomy(&s, &places, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        let report = verify_certificate(&a, &s, &places, inst.budget, &VerifyTolerances::for_modulus(zp(inst.p))).unwrap();
        prop_assert!(report.passed(), "{}", report);
        prop_assert!(a.history().len() <= inst.budget);
    }

    #[test]
    fn certificate_file_roundtrip_is_exact(inst in instance()) {
        let (s, places) = (inst.support_set(), inst.place_set());
        let cert = run_dichotomy(&s, &places, &SolveConfig::<f64>::new(inst.budget)).unwrap();
        let echo = ConfigEcho {
            budget: inst.budget,
            places: inst.places.clone(),
            tol_hull: Real17(1e-9),
            tol_sep: Real17(1e-9),
            tol_dft: Real17(1e-9),
            max_p: 2000,
        };
        let json = CertificateFile::from_certificate(&cert, echo).to_json();
        let file = CertificateFile::parse(&json).unwrap();
        prop_assert_eq!(file.to_json(), json);
        let back = file.to_certificate().unwrap();
        let bits = |c: &farkas_balance::Certificate<f64>| c.h().values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&cert));
        let again = verify_certificate(&back, &s, &places, inst.budget, &VerifyTolerances::for_modulus(zp(inst.p))).unwrap();
        prop_assert!(again.passed());
    }
}

#[test]
fn single_precision_certificates_verify() {
    let mut rng = rng(21);
    for _ in 0..30 {
        let inst = random_instance(&mut rng, &[5, 7, 11, 13], &[0, 1, 2], &[1, 2, 3]);
        let (s, places) = (inst.support_set(), inst.place_set());
        let cert = run_dichotomy(&s, &places, &SolveConfig::<f32>::new(inst.budget)).unwrap();
        let tol = VerifyTolerances {
            spectral: 1e-4 * inst.p as f64,
            sum: 1e-4,
            l1_slack: 1e-4,
        };
        let report = verify_certificate(&cert, &s, &places, inst.budget, &tol).unwrap();
        assert!(report.passed(), "{inst:?}\n{report}");
    }
}
