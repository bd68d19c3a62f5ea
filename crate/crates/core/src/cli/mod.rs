//! The `zariski` command: `check`, `decompose`, `verify`, `gen`.
//!
//! Exit codes: 0 success or property holds, 1 mathematical obstruction or
//! property fails, 2 malformed input.

pub mod files;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde_json::{json, Value};

use crate::decomp::{
    decompose_effective_support, decompose_fujita, decompose_pseff_any_cycle, decompose_support,
    is_pseff_closed_world, Decomposition, PseffCertificate, Variant,
};
use crate::exactalg::format_rational;
use crate::oracle::{generate_instance, verify_decomposition, InstanceSpec, Template};
use crate::surface::{certify_negdef, is_effective, Cycle, QDivisor};
use crate::Error;

use files::{
    cycle_from_names, divisor_from_map, divisor_to_map, ConfigFile, CurveEntry, InputError,
    ResultFile, Timings, Q,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OBSTRUCTION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "zariski",
    version,
    about = "Exact Zariski decompositions of ℚ-divisors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a property of a named cycle or divisor.
    Check {
        config: PathBuf,
        #[arg(value_enum)]
        property: Property,
        /// Cycle name for `negdef`, divisor name otherwise.
        name: String,
    },
    /// Decompose a named divisor.
    #[command(group(ArgGroup::new("variant").required(true).args(["support", "support_any", "fujita"])))]
    Decompose {
        config: PathBuf,
        divisor: String,
        /// Support in a negative definite cycle.
        #[arg(long, value_name = "CYCLE")]
        support: Option<String>,
        /// Support in an arbitrary cycle (pseudo-effective divisors).
        #[arg(long, value_name = "CYCLE")]
        support_any: Option<String>,
        /// Full nef/negative decomposition.
        #[arg(long)]
        fujita: bool,
        /// Take pseudo-effectivity on trust instead of searching for a witness.
        #[arg(long)]
        assert_pseff: bool,
        /// Record wall-clock timings in the result.
        #[arg(long)]
        timings: bool,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Re-verify a stored result against its configuration.
    Verify { config: PathBuf, result: PathBuf },
    /// Generate a random configuration.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, value_enum, default_value = "random")]
        template: TemplateArg,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Property {
    Negdef,
    Nef,
    Effective,
    Pseff,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TemplateArg {
    Random,
    AChain,
}

enum Failure {
    Input(String),
    Obstruction(Error),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.0)
    }
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, out: &str, text: &str) -> Result<(), Failure> {
        if out == "-" {
            self.stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Input(format!("stdout: {e}")))
        } else {
            std::fs::write(out, text).map_err(|e| Failure::Input(format!("--out {out}: {e}")))
        }
    }

    fn report(&mut self, value: &Value) {
        let _ = writeln!(
            self.stdout,
            "{}",
            serde_json::to_string_pretty(value).unwrap_or_default()
        );
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut io = Io { stdout, stderr };
    let outcome = match cli.command {
        Command::Check {
            config,
            property,
            name,
        } => cmd_check(&mut io, &config, property, &name),
        Command::Decompose {
            config,
            divisor,
            support,
            support_any,
            fujita,
            assert_pseff,
            timings,
            out,
        } => {
            let variant = match (support, support_any, fujita) {
                (Some(g), None, false) => VariantArg::Support(g),
                (None, Some(g), false) => VariantArg::SupportAny(g),
                (None, None, true) => VariantArg::Fujita,
                _ => unreachable!("clap enforces exactly one variant"),
            };
            cmd_decompose(
                &mut io,
                &config,
                &divisor,
                variant,
                assert_pseff,
                timings,
                &out,
            )
        }
        Command::Verify { config, result } => cmd_verify(&mut io, &config, &result),
        Command::Gen {
            seed,
            n,
            template,
            out,
        } => cmd_gen(&mut io, seed, n, template, &out),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Obstruction(e)) => {
            io.report(&json!({ "error": e.kind(), "message": e.to_string() }));
            let _ = writeln!(io.stderr, "error: {e}");
            if e.is_obstruction() || matches!(e, Error::GenerationExhausted(_)) {
                EXIT_OBSTRUCTION
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<(ConfigFile, files::Model), Failure> {
    let file = ConfigFile::parse(&read(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let model = file
        .model()
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((file, model))
}

fn cmd_check(io: &mut Io, path: &Path, property: Property, name: &str) -> Result<i32, Failure> {
    let (_, model) = load_config(path)?;
    let config = &model.config;
    let (holds, mut report) = match property {
        Property::Negdef => {
            let g = model.cycle(name)?;
            match certify_negdef(g) {
                Ok(c) => {
                    let minors: Vec<String> = c
                        .certificate()
                        .unwrap_or_default()
                        .iter()
                        .map(format_rational)
                        .collect();
                    (true, json!({ "minors": minors }))
                }
                Err(Error::NotNegativeDefinite { order, minor }) => (
                    false,
                    json!({ "witness": { "order": order, "minor": format_rational(&minor) } }),
                ),
                Err(e) => return Err(Failure::Input(e.to_string())),
            }
        }
        Property::Nef => {
            let d = model.divisor(name)?;
            let offending = (0..config.len())
                .map(|i| (i, d.dot_curve(i)))
                .find(|(_, v)| v.is_negative());
            match offending {
                None => (true, json!({})),
                Some((i, v)) => (
                    false,
                    json!({ "witness": { "curve": config.name(i), "intersection": format_rational(&v) } }),
                ),
            }
        }
        Property::Effective => {
            let d = model.divisor(name)?;
            match d.coeffs().iter().position(|c| c.is_negative()) {
                None => (true, json!({})),
                Some(i) => (
                    false,
                    json!({ "witness": { "curve": config.name(i), "coefficient": format_rational(d.coeff(i)) } }),
                ),
            }
        }
        Property::Pseff => {
            let d = model.divisor(name)?;
            match is_pseff_closed_world(d) {
                Ok(cert) => {
                    let w = QDivisor::new(config.clone(), cert.witness.unwrap_or_default())
                        .map(|w| divisor_to_map(&w))
                        .unwrap_or_default();
                    (true, json!({ "witness": w }))
                }
                Err(Error::NotPseudoEffective(msg)) => {
                    (false, json!({ "witness": Value::Null, "message": msg }))
                }
                Err(e) => return Err(Failure::Obstruction(e)),
            }
        }
    };
    let label = match property {
        Property::Negdef => "negdef",
        Property::Nef => "nef",
        Property::Effective => "effective",
        Property::Pseff => "pseff",
    };
    if let Value::Object(map) = &mut report {
        map.insert("property".into(), json!(label));
        map.insert("target".into(), json!(name));
        map.insert("holds".into(), json!(holds));
    }
    io.report(&report);
    Ok(if holds { EXIT_OK } else { EXIT_OBSTRUCTION })
}

enum VariantArg {
    Support(String),
    SupportAny(String),
    Fujita,
}

fn cmd_decompose(
    io: &mut Io,
    path: &Path,
    divisor: &str,
    variant: VariantArg,
    assert_pseff: bool,
    timings: bool,
    out: &str,
) -> Result<i32, Failure> {
    if assert_pseff && matches!(variant, VariantArg::Support(_)) {
        return Err(Failure::Input(
            "--assert-pseff applies only to --support-any and --fujita".into(),
        ));
    }
    let (file, model) = load_config(path)?;
    let d = model.divisor(divisor)?;
    let assertion = assert_pseff.then(|| PseffCertificate::asserted("--assert-pseff"));
    let (cycle_name, cycle) = match &variant {
        VariantArg::Support(g) | VariantArg::SupportAny(g) => {
            (Some(g.clone()), Some(model.cycle(g)?))
        }
        VariantArg::Fujita => (None, None),
    };

    let started = Instant::now();
    let result = match (&variant, cycle) {
        (VariantArg::Support(_), Some(g)) if is_effective(d) => decompose_effective_support(d, g),
        (VariantArg::Support(_), Some(g)) => decompose_support(d, g),
        (VariantArg::SupportAny(_), Some(g)) => decompose_pseff_any_cycle(d, assertion.as_ref(), g),
        _ => decompose_fujita(d, assertion.as_ref()),
    };
    let dec = result.map_err(Failure::Obstruction)?;
    let decompose_us = started.elapsed().as_micros() as u64;

    let started = Instant::now();
    let report = verify_decomposition(d, cycle, &dec);
    let verify_us = started.elapsed().as_micros() as u64;
    if !report.passed() {
        let _ = writeln!(
            io.stderr,
            "error: decomposition failed verification: {}",
            serde_json::to_string(&report).unwrap_or_default()
        );
        return Ok(EXIT_OBSTRUCTION);
    }
    let result = ResultFile {
        variant: dec.variant,
        config_hash: file.content_hash(),
        divisor: divisor.to_string(),
        cycle: cycle_name,
        nef_part: divisor_to_map(&dec.nef_part),
        negative_part: divisor_to_map(&dec.negative_part),
        support_trace: dec
            .support_trace
            .iter()
            .map(|c| c.member_names().into_iter().map(String::from).collect())
            .collect(),
        verification: report,
        timings: timings.then_some(Timings {
            decompose_us,
            verify_us,
        }),
    };
    io.emit(out, &result.to_json())?;
    Ok(EXIT_OK)
}

fn cmd_verify(io: &mut Io, config_path: &Path, result_path: &Path) -> Result<i32, Failure> {
    let (file, model) = load_config(config_path)?;
    let result = ResultFile::parse(&read(result_path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", result_path.display())))?;
    if result.config_hash != file.content_hash() {
        return Err(Failure::Input(format!(
            "{}: config_hash does not match {}",
            result_path.display(),
            config_path.display()
        )));
    }
    let d = model.divisor(&result.divisor)?;
    let cycle: Option<&Cycle> = match &result.cycle {
        Some(name) => Some(model.cycle(name)?),
        None if result.variant != Variant::Fujita => {
            return Err(Failure::Input(format!(
                "cycle: required for variant {}",
                result.variant
            )))
        }
        None => None,
    };
    let p = divisor_from_map(&model.config, &result.nef_part)
        .map_err(|e| Failure::Input(format!("P: {e}")))?;
    let n = divisor_from_map(&model.config, &result.negative_part)
        .map_err(|e| Failure::Input(format!("N: {e}")))?;
    let trace = result
        .support_trace
        .iter()
        .enumerate()
        .map(|(k, names)| {
            cycle_from_names(&model.config, names)
                .map_err(|e| Failure::Input(format!("support_trace[{k}]: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let dec = Decomposition::from_parts(result.variant, p, n, trace);
    let report = verify_decomposition(d, cycle, &dec);
    io.report(&serde_json::to_value(&report).unwrap_or_default());
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_OBSTRUCTION
    })
}

fn cmd_gen(
    io: &mut Io,
    seed: u64,
    n: usize,
    template: TemplateArg,
    out: &str,
) -> Result<i32, Failure> {
    let template = match template {
        TemplateArg::Random => Template::Random,
        TemplateArg::AChain => Template::AChain,
    };
    let inst =
        generate_instance(&InstanceSpec::new(seed, n, template)).map_err(Failure::Obstruction)?;
    let file = ConfigFile {
        curves: inst
            .config
            .names()
            .iter()
            .map(|name| CurveEntry { name: name.clone() })
            .collect(),
        intersections: inst
            .config
            .mu()
            .rows()
            .map(|r| r.iter().cloned().map(Q).collect())
            .collect(),
        divisors: [("D".to_string(), divisor_to_map(&inst.divisor))].into(),
        cycles: [(
            "G".to_string(),
            inst.cycle
                .member_names()
                .into_iter()
                .map(String::from)
                .collect(),
        )]
        .into(),
    };
    io.emit(out, &file.to_json())?;
    Ok(EXIT_OK)
}
