//! JSON file formats. Rationals travel as strings (`"3/2"`, `"-7"`) so no
//! value ever passes through a binary float.

use std::collections::BTreeMap;
use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::decomp::Variant;
use crate::exactalg::{format_rational, parse_rational, RatMatrix, Rational};
use crate::oracle::VerificationReport;
use crate::surface::{ConfigRef, CurveConfiguration, Cycle, QDivisor};

/// A rational serialized as a string matching `-?[0-9]+(/[0-9]+)?`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string such as \"-3/2\"")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Q, E> {
                parse_rational(s).map(Q).map_err(E::custom)
            }
        }
        d.deserialize_str(V)
    }
}

pub type CoefficientMap = BTreeMap<String, Q>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub curves: Vec<CurveEntry>,
    pub intersections: Vec<Vec<Q>>,
    #[serde(default)]
    pub divisors: BTreeMap<String, CoefficientMap>,
    #[serde(default)]
    pub cycles: BTreeMap<String, Vec<String>>,
}

/// Malformed input, with the offending field in the message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(msg: impl Into<String>) -> Result<T, InputError> {
    Err(InputError(msg.into()))
}

pub fn from_json<T: de::DeserializeOwned>(text: &str) -> Result<T, InputError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        InputError(format!("{path}: {}", e.into_inner()))
    })?;
    de.end().map_err(|e| InputError(e.to_string()))?;
    Ok(value)
}

/// Pretty JSON with a trailing newline; map keys are sorted, so equal
/// values always produce identical bytes.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types serialize");
    s.push('\n');
    s
}

/// Validated, resolved contents of a configuration file.
#[derive(Clone, Debug)]
pub struct Model {
    pub config: ConfigRef,
    pub divisors: BTreeMap<String, QDivisor>,
    pub cycles: BTreeMap<String, Cycle>,
}

impl Model {
    pub fn divisor(&self, name: &str) -> Result<&QDivisor, InputError> {
        self.divisors
            .get(name)
            .ok_or_else(|| InputError(format!("divisors: no divisor named {name:?}")))
    }

    pub fn cycle(&self, name: &str) -> Result<&Cycle, InputError> {
        self.cycles
            .get(name)
            .ok_or_else(|| InputError(format!("cycles: no cycle named {name:?}")))
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        from_json(text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// SHA-256 of the canonical serialization.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    pub fn model(&self) -> Result<Model, InputError> {
        let n = self.curves.len();
        let mut names: Vec<String> = Vec::with_capacity(n);
        for (i, c) in self.curves.iter().enumerate() {
            if c.name.is_empty() {
                return input(format!("curves[{i}].name: empty name"));
            }
            if names.contains(&c.name) {
                return input(format!("curves[{i}].name: duplicate name {:?}", c.name));
            }
            names.push(c.name.clone());
        }
        if self.intersections.len() != n {
            return input(format!(
                "intersections: expected {n} rows, found {}",
                self.intersections.len()
            ));
        }
        for (i, row) in self.intersections.iter().enumerate() {
            if row.len() != n {
                return input(format!(
                    "intersections[{i}]: expected {n} entries, found {}",
                    row.len()
                ));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&self.intersections[i][j].0, &self.intersections[j][i].0);
                if a != b {
                    return input(format!(
                        "intersections[{i}][{j}]: {} differs from intersections[{j}][{i}] = {}",
                        format_rational(a),
                        format_rational(b)
                    ));
                }
                if *a < Rational::from_integer(0.into()) {
                    return input(format!(
                        "intersections[{i}][{j}]: distinct curves {} and {} meet negatively",
                        names[i], names[j]
                    ));
                }
            }
        }
        let rows = self
            .intersections
            .iter()
            .map(|r| r.iter().map(|q| q.0.clone()).collect())
            .collect();
        let mu =
            RatMatrix::from_rows(rows).map_err(|e| InputError(format!("intersections: {e}")))?;
        let config = CurveConfiguration::new(names, mu).map_err(|e| InputError(e.to_string()))?;

        let mut divisors = BTreeMap::new();
        for (name, coeffs) in &self.divisors {
            let d = divisor_from_map(&config, coeffs)
                .map_err(|e| InputError(format!("divisors.{name}: {e}")))?;
            divisors.insert(name.clone(), d);
        }
        let mut cycles = BTreeMap::new();
        for (name, members) in &self.cycles {
            let g = cycle_from_names(&config, members)
                .map_err(|e| InputError(format!("cycles.{name}: {e}")))?;
            cycles.insert(name.clone(), g);
        }
        Ok(Model {
            config,
            divisors,
            cycles,
        })
    }
}

pub fn divisor_from_map(
    config: &ConfigRef,
    coeffs: &CoefficientMap,
) -> Result<QDivisor, InputError> {
    let mut v = vec![Rational::from_integer(0.into()); config.len()];
    for (curve, q) in coeffs {
        let i = config
            .index_of(curve)
            .ok_or_else(|| InputError(format!("unknown curve {curve:?}")))?;
        v[i] = q.0.clone();
    }
    QDivisor::new(config.clone(), v).map_err(|e| InputError(e.to_string()))
}

pub fn cycle_from_names(config: &ConfigRef, names: &[String]) -> Result<Cycle, InputError> {
    let mut members = Vec::with_capacity(names.len());
    for curve in names {
        let i = config
            .index_of(curve)
            .ok_or_else(|| InputError(format!("unknown curve {curve:?}")))?;
        if members.contains(&i) {
            return input(format!("curve {curve:?} listed twice"));
        }
        members.push(i);
    }
    Cycle::new(config, members).map_err(|e| InputError(e.to_string()))
}

/// Nonzero coefficients keyed by curve name.
pub fn divisor_to_map(d: &QDivisor) -> CoefficientMap {
    d.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
        .map(|(i, c)| (d.config().name(i).to_string(), Q(c.clone())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub decompose_us: u64,
    pub verify_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub variant: Variant,
    /// [`ConfigFile::content_hash`] of the configuration decomposed.
    pub config_hash: String,
    pub divisor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<String>,
    #[serde(rename = "P")]
    pub nef_part: CoefficientMap,
    #[serde(rename = "N")]
    pub negative_part: CoefficientMap,
    pub support_trace: Vec<Vec<String>>,
    pub verification: VerificationReport,
    /// Wall-clock timings; only recorded on request since they break
    /// byte-for-byte reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl ResultFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        from_json(text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}
