//! JSON instance and certificate files.
//!
//! Reals in certificate files are written with 17 significant digits
//! (`{:.16e}`), which round-trips every finite `f64` exactly.

use std::collections::BTreeSet;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::dichotomy::{Certificate, RoundRecord, SmallSpectralSupport, VanishingBalanced};
use crate::zp::{reduce_places, PlaceSet, PrimeModulus, Spectrum, SupportSet, ZpFunction};

pub const CERTIFICATE_FORMAT: &str = "farkas-balance/certificate-v1";

/// An `f64` serialized with 17 significant decimal digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real17(pub f64);

impl Serialize for Real17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom("non-finite real"));
        }
        let raw =
            RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Real17 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        f64::deserialize(deserializer).map(Real17)
    }
}

/// Solver tolerances after all overrides are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hull: f64,
    pub sep: f64,
    pub dft: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hull: 1e-9,
            sep: 1e-9,
            dft: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_hull: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_sep: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_dft: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            hull: self.tol_hull.unwrap_or(base.hull),
            sep: self.tol_sep.unwrap_or(base.sep),
            dft: self.tol_dft.unwrap_or(base.dft),
        }
    }

    fn problems(&self) -> Vec<String> {
        [
            ("tol_hull", self.tol_hull),
            ("tol_sep", self.tol_sep),
            ("tol_dft", self.tol_dft),
        ]
        .into_iter()
        .filter_map(|(name, v)| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => Some(format!(
                "tolerances.{name} must be a positive finite number, got {x}"
            )),
            _ => None,
        })
        .collect()
    }

    /// Parses either a single number (applied to every tolerance) or a
    /// comma-separated list such as `hull=1e-9,sep=1e-8,dft=1e-9`.
    pub fn parse_overrides(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if let Ok(x) = text.parse::<f64>() {
            let all = Self {
                tol_hull: Some(x),
                tol_sep: Some(x),
                tol_dft: Some(x),
            };
            return match all.problems().first() {
                Some(p) => Err(p.clone()),
                None => Ok(all),
            };
        }
        let mut out = Self::default();
        for part in text.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| format!("`{value}` is not a number"))?;
            match key.trim() {
                "hull" | "tol_hull" => out.tol_hull = Some(value),
                "sep" | "tol_sep" => out.tol_sep = Some(value),
                "dft" | "tol_dft" => out.tol_dft = Some(value),
                other => return Err(format!("unknown tolerance `{other}`")),
            }
        }
        match out.problems().first() {
            Some(p) => Err(p.clone()),
            None => Ok(out),
        }
    }
}

/// Problem instance as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub p: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<i64>>,
    #[serde(default)]
    pub places: Vec<i64>,
    #[serde(rename = "E")]
    pub budget: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub modulus: PrimeModulus,
    pub support: SupportSet,
    pub places: PlaceSet,
    pub budget: usize,
    pub tolerances: ToleranceOverrides,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, Vec<String>> {
        serde_json::from_str(text).map_err(|e| vec![format!("malformed instance: {e}")])
    }

    /// Every schema violation, one message per problem.
    pub fn validate(&self) -> Result<Instance, Vec<String>> {
        let mut problems = Vec::new();
        let modulus = match usize::try_from(self.p).ok().map(PrimeModulus::new) {
            Some(Ok(m)) => Some(m),
            _ => {
                problems.push(format!("p = {} is not a prime >= 2", self.p));
                None
            }
        };
        if self.budget < 0 {
            problems.push(format!("E = {} must be nonnegative", self.budget));
        }
        if let Some(t) = &self.tolerances {
            problems.extend(t.problems());
        }
        let support = match (&self.g, &self.support, modulus) {
            (Some(_), Some(_), _) => {
                problems.push("exactly one of `g` and `support` must be given, found both".into());
                None
            }
            (None, None, _) => {
                problems
                    .push("exactly one of `g` and `support` must be given, found neither".into());
                None
            }
            (_, _, None) => None,
            (Some(g), None, Some(m)) => {
                let before = problems.len();
                if g.len() != m.get() {
                    problems.push(format!(
                        "g has {} values, expected p = {}",
                        g.len(),
                        m.get()
                    ));
                }
                for (n, v) in g.iter().enumerate() {
                    if !(v.is_finite() && (0.0..=1.0).contains(v)) {
                        problems.push(format!("g[{n}] = {v} is outside [0, 1]"));
                    }
                }
                (problems.len() == before).then(|| {
                    SupportSet::from_mask(m, g.iter().map(|&v| v > 0.0).collect())
                        .expect("length checked")
                })
            }
            (None, Some(s), Some(m)) => {
                let before = problems.len();
                let mut seen = BTreeSet::new();
                for &n in s {
                    if n < 0 || n >= m.get() as i64 {
                        problems.push(format!(
                            "support element {n} is outside [0, {}]",
                            m.get() - 1
                        ));
                    } else if !seen.insert(n as usize) {
                        problems.push(format!("support element {n} is repeated"));
                    }
                }
                (problems.len() == before)
                    .then(|| SupportSet::from_members(m, seen).expect("range checked"))
            }
        };
        let mut places = None;
        if let Some(m) = modulus {
            let before = problems.len();
            for &a in &self.places {
                if a < 1 || a >= m.get() as i64 {
                    problems.push(format!("place {a} is outside [1, {}]", m.get() - 1));
                }
            }
            if problems.len() == before {
                match reduce_places(&self.places, m) {
                    Ok(ps) => places = Some(ps),
                    Err(e) => problems.push(e.to_string()),
                }
            }
        }
        match (modulus, support, places) {
            (Some(modulus), Some(support), Some(places)) if problems.is_empty() => Ok(Instance {
                modulus,
                support,
                places,
                budget: self.budget as usize,
                tolerances: self.tolerances.clone().unwrap_or_default(),
            }),
            _ => Err(problems),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    #[serde(rename = "E")]
    pub budget: usize,
    pub places: Vec<i64>,
    pub tol_hull: Real17,
    pub tol_sep: Real17,
    pub tol_dft: Real17,
    pub max_p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundLog {
    pub round: usize,
    pub columns: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonzeros: Option<usize>,
    pub residual: Real17,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<Real17>,
    pub simplex_pivots: usize,
    pub reduction_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub rounds: usize,
    pub deleted_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1_norm: Option<Real17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<Real17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<Real17>>,
    pub round_log: Vec<RoundLog>,
    pub solver_version: String,
    pub config: ConfigEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub format: String,
    pub variant: String,
    pub p: usize,
    pub h: Vec<Real17>,
    /// `(place, re, im)` for every nonzero coefficient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<(usize, Real17, Real17)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceptions: Option<Vec<usize>>,
    pub diagnostics: Diagnostics,
}

fn reals(v: &[f64]) -> Vec<Real17> {
    v.iter().copied().map(Real17).collect()
}

fn round_log(r: &RoundRecord<f64>) -> RoundLog {
    RoundLog {
        round: r.round,
        columns: r.columns,
        nonzeros: r.nonzeros,
        residual: Real17(r.residual),
        margin: r.margin.map(Real17),
        simplex_pivots: r.simplex_pivots,
        reduction_steps: r.reduction_steps,
    }
}

fn round_record(r: &RoundLog) -> RoundRecord<f64> {
    RoundRecord {
        round: r.round,
        columns: r.columns,
        nonzeros: r.nonzeros,
        residual: r.residual.0,
        margin: r.margin.map(|m| m.0),
        simplex_pivots: r.simplex_pivots,
        reduction_steps: r.reduction_steps,
    }
}

impl CertificateFile {
    pub fn from_certificate(cert: &Certificate<f64>, config: ConfigEcho) -> Self {
        let p = cert.h().modulus().get();
        let h = reals(cert.h().values());
        let round_log = cert.history().iter().map(round_log).collect();
        let solver_version = env!("CARGO_PKG_VERSION").to_string();
        match cert {
            Certificate::VanishingBalanced(c) => Self {
                format: CERTIFICATE_FORMAT.into(),
                variant: cert.tag().into(),
                p,
                h,
                spectrum: None,
                exceptions: None,
                diagnostics: Diagnostics {
                    rounds: c.rounds,
                    deleted_count: c.history.iter().filter_map(|r| r.nonzeros).sum(),
                    l1_norm: Some(Real17(c.l1_norm)),
                    margin: None,
                    normal: None,
                    round_log,
                    solver_version,
                    config,
                },
            },
            Certificate::SmallSpectralSupport(c) => Self {
                format: CERTIFICATE_FORMAT.into(),
                variant: cert.tag().into(),
                p,
                h,
                spectrum: Some(
                    c.spectrum
                        .coeffs()
                        .iter()
                        .enumerate()
                        .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
                        .map(|(a, z)| (a, Real17(z.re), Real17(z.im)))
                        .collect(),
                ),
                exceptions: Some(c.exceptions.iter().copied().collect()),
                diagnostics: Diagnostics {
                    rounds: c.rounds_before_separation,
                    deleted_count: c.exceptions.len(),
                    l1_norm: None,
                    margin: c.margin.map(Real17),
                    normal: Some(reals(&c.normal)),
                    round_log,
                    solver_version,
                    config,
                },
            },
        }
    }

    pub fn to_certificate(&self) -> Result<Certificate<f64>, String> {
        if self.format != CERTIFICATE_FORMAT {
            return Err(format!("unsupported certificate format `{}`", self.format));
        }
        let modulus = PrimeModulus::new(self.p).map_err(|e| e.to_string())?;
        let h = ZpFunction::new(modulus, self.h.iter().map(|r| r.0).collect())
            .map_err(|e| format!("h: {e}"))?;
        let history = self
            .diagnostics
            .round_log
            .iter()
            .map(round_record)
            .collect();
        match self.variant.as_str() {
            "vanishing_balanced" => Ok(Certificate::VanishingBalanced(VanishingBalanced {
                h,
                rounds: self.diagnostics.rounds,
                l1_norm: self
                    .diagnostics
                    .l1_norm
                    .ok_or("vanishing_balanced certificate lacks diagnostics.l1_norm")?
                    .0,
                history,
            })),
            "small_spectral_support" => {
                let entries = self
                    .spectrum
                    .as_ref()
                    .ok_or("small_spectral_support certificate lacks a spectrum")?;
                let mut coeffs = vec![Complex::new(0.0, 0.0); self.p];
                for &(a, re, im) in entries {
                    if a >= self.p {
                        return Err(format!("spectrum place {a} outside Z_{}", self.p));
                    }
                    coeffs[a] = Complex::new(re.0, im.0);
                }
                let spectrum = Spectrum::new(modulus, coeffs).map_err(|e| e.to_string())?;
                let exceptions = self
                    .exceptions
                    .as_ref()
                    .ok_or("small_spectral_support certificate lacks exceptions")?
                    .iter()
                    .copied()
                    .collect();
                Ok(Certificate::SmallSpectralSupport(SmallSpectralSupport {
                    h,
                    spectrum,
                    exceptions,
                    rounds_before_separation: self.diagnostics.rounds,
                    margin: self.diagnostics.margin.map(|m| m.0),
                    normal: self
                        .diagnostics
                        .normal
                        .as_ref()
                        .map(|w| w.iter().map(|r| r.0).collect())
                        .unwrap_or_default(),
                    history,
                }))
            }
            other => Err(format!("unknown certificate variant `{other}`")),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("finite reals");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed certificate: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real17_is_exact() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 5e-324, f64::MAX, -0.0, 0.0, 2.5] {
            let s = serde_json::to_string(&Real17(x)).unwrap();
            let back: Real17 = serde_json::from_str(&s).unwrap();
            assert_eq!(back.0.to_bits(), x.to_bits(), "{x} -> {s}");
        }
        assert_eq!(
            serde_json::to_string(&Real17(0.5)).unwrap(),
            "5.0000000000000000e-1"
        );
        assert!(serde_json::to_string(&Real17(f64::NAN)).is_err());
    }

    #[test]
    fn instance_with_support() {
        let inst = InstanceFile::parse(r#"{"p": 7, "support": [0, 3], "places": [2, 5], "E": 2}"#)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(inst.support.members(), vec![0, 3]);
        assert_eq!(inst.places.reduced(), &[2]);
        assert_eq!(inst.budget, 2);
    }

    #[test]
    fn instance_with_g_and_tolerances() {
        let inst = InstanceFile::parse(
            r#"{"p": 3, "g": [0.0, 0.25, 1.0], "places": [], "E": 0,
                "tolerances": {"tol_hull": 1e-8}}"#,
        )
        .unwrap()
        .validate()
        .unwrap();
        assert_eq!(inst.support.members(), vec![1, 2]);
        assert_eq!(inst.tolerances.apply(Tolerances::default()).hull, 1e-8);
    }

    #[test]
    fn instance_violations_are_listed() {
        let errs = InstanceFile::parse(
            r#"{"p": 7, "g": [0.5, 2.0, 0, 0, 0, 0, -1], "places": [0, 9], "E": -1}"#,
        )
        .unwrap()
        .validate()
        .unwrap_err();
        assert_eq!(errs.len(), 5, "{errs:?}");

        let errs = InstanceFile::parse(r#"{"p": 8, "support": [1, 1], "places": [], "E": 0}"#)
            .unwrap()
            .validate()
            .unwrap_err();
        assert_eq!(errs, vec!["p = 8 is not a prime >= 2".to_string()]);

        let errs = InstanceFile::parse(r#"{"p": 5, "support": [1, 1, 7], "places": [], "E": 0}"#)
            .unwrap()
            .validate()
            .unwrap_err();
        assert_eq!(errs.len(), 2);

        assert!(InstanceFile::parse(r#"{"p": 5, "support": [], "E": 0, "extra": 1}"#).is_err());
        assert!(InstanceFile::parse("{not json").is_err());
    }

    #[test]
    fn tolerance_specs() {
        let all = ToleranceOverrides::parse_overrides("1e-8").unwrap();
        assert_eq!(all.tol_sep, Some(1e-8));
        let some = ToleranceOverrides::parse_overrides("hull=1e-7, dft=1e-6").unwrap();
        assert_eq!(
            (some.tol_hull, some.tol_sep, some.tol_dft),
            (Some(1e-7), None, Some(1e-6))
        );
        assert!(ToleranceOverrides::parse_overrides("-1").is_err());
        assert!(ToleranceOverrides::parse_overrides("speed=3").is_err());
    }
}
