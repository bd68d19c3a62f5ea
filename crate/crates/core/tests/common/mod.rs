#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zariski::exactalg::{int, rat, RatMatrix, Rational};
use zariski::oracle::{generate_instance, Instance, InstanceSpec, Template};
use zariski::surface::{ConfigRef, CurveConfiguration, QDivisor};

pub fn config(names: &[&str], rows: &[&[i64]]) -> ConfigRef {
    CurveConfiguration::new(
        names.iter().map(|s| s.to_string()).collect(),
        RatMatrix::from_i64(rows),
    )
    .unwrap()
}

/// H^2 = 1, E^2 = -1, H.E = 0.
pub fn blowup() -> ConfigRef {
    config(&["H", "E"], &[&[1, 0], &[0, -1]])
}

pub fn a2() -> ConfigRef {
    config(&["C1", "C2"], &[&[-2, 1], &[1, -2]])
}

/// The projective plane, modeled by its line H.
pub fn plane() -> ConfigRef {
    config(&["H"], &[&[1]])
}

/// A line disjoint from an A2 chain.
pub fn three() -> ConfigRef {
    config(&["H", "C1", "C2"], &[&[1, 0, 0], &[0, -2, 1], &[0, 1, -2]])
}

pub fn div(x: &ConfigRef, terms: &[(&str, Rational)]) -> QDivisor {
    QDivisor::from_terms(x, terms).unwrap()
}

/// The generated-instance distribution used by the cross-check suites:
/// up to nine curves, negative definite cycles of size at most six,
/// coefficients bounded by 10.
pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let spec = if seed.is_multiple_of(5) {
        InstanceSpec::new(seed, rng.gen_range(1..=6), Template::AChain)
    } else {
        InstanceSpec {
            negdef_fraction: rat(2, 3),
            ..InstanceSpec::new(seed, rng.gen_range(1..=9), Template::Random)
        }
    };
    generate_instance(&spec).unwrap()
}

/// Flips the sign of a random subset of coefficients.
pub fn mixed_sign(d: &QDivisor, seed: u64) -> QDivisor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf11b);
    let coeffs = d
        .coeffs()
        .iter()
        .map(|c| if rng.gen_bool(0.5) { -c } else { c.clone() })
        .collect();
    QDivisor::new(d.config().clone(), coeffs).unwrap()
}

/// A random (not necessarily negative definite) cycle.
pub fn any_cycle(x: &ConfigRef, seed: u64) -> zariski::surface::Cycle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc7c1e);
    let members = (0..x.len()).filter(|_| rng.gen_bool(0.6)).collect();
    zariski::surface::Cycle::new(x, members).unwrap()
}

pub fn lambda_values() -> Vec<Rational> {
    vec![rat(1, 2), int(2), rat(7, 3)]
}

pub const BLOWUP_JSON: &str = r#"{
  "curves": [{"name": "H"}, {"name": "E"}],
  "intersections": [["1", "0"], ["0", "-1"]],
  "divisors": {"D": {"H": "1", "E": "2"}, "Hd": {"H": "1"}, "Z": {}},
  "cycles": {"G": ["E"]}
}
"#;

pub const A2_JSON: &str = r#"{
  "curves": [{"name": "C1"}, {"name": "C2"}],
  "intersections": [["-2", "1"], ["1", "-2"]],
  "divisors": {"D": {"C1": "1", "C2": "-1"}},
  "cycles": {"G": ["C1", "C2"]}
}
"#;

pub const PLANE_JSON: &str = r#"{
  "curves": [{"name": "H"}],
  "intersections": [["1"]],
  "divisors": {"minusH": {"H": "-1"}},
  "cycles": {"H": ["H"]}
}
"#;

pub const THREE_JSON: &str = r#"{
  "curves": [{"name": "H"}, {"name": "C1"}, {"name": "C2"}],
  "intersections": [["1", "0", "0"], ["0", "-2", "1"], ["0", "1", "-2"]],
  "divisors": {"D": {"H": "1", "C1": "1", "C2": "1/4"}},
  "cycles": {"G": ["C1", "C2"]}
}
"#;

/// Runs the CLI in-process, returning (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["zariski"];
    full.extend_from_slice(args);
    let code = zariski::cli::run(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}
