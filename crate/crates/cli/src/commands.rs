use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rlcm_core::{
    AdsMorphism, DynamicalSystem, Monomial, MonomialAlgebra, ProductSystem, RegularRep, Report, RightLcm, SampleSpec,
};
use serde_json::{json, Value};

use crate::config::{ConfigFile, MorphismFile, VerifyConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "rlcm", version, about = "Exact computations for algebraic dynamical systems over right LCM semigroups")]
pub struct Cli {
    /// System configuration (TOML with a [system] table and an optional [verify] table).
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the seed from [verify].
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dynamics axioms, Li relations, Nica covariance and generator relations.
    Verify,
    /// Right LCM of two semigroup elements.
    Lcm {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Intersection of the principal ideals of two elements "g,p" of G ⋊ P.
    Intersect {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Product of the monomials listed in a JSON file, left to right.
    Mult {
        #[arg(long)]
        monomials: PathBuf,
    },
    /// Li relations and composition in the regular representation.
    RepCheck {
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Product-system and Fock-space checks.
    FockCheck {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Morphism, admissibility and ideal-functoriality checks for a morphism file.
    MorphismCheck {
        #[arg(long)]
        morphism: PathBuf,
    },
    /// Sampled left Ore conditions in G ⋊ P.
    OreCheck {
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Every suite for the configured system.
    Report,
}

/// JSON for standard output plus the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub output: Value,
    pub exit_code: i32,
}

impl Outcome {
    fn value(output: Value) -> Self {
        Outcome { output, exit_code: 0 }
    }

    fn report(report: Report, extra: &[(&str, Value)]) -> Self {
        let exit_code = if report.passed { 0 } else { 1 };
        let mut output = report.to_json();
        for (k, v) in extra {
            output[*k] = v.clone();
        }
        Outcome { output, exit_code }
    }

    pub fn error(e: &CliError) -> Self {
        Outcome { output: e.to_json(), exit_code: 2 }
    }
}

struct Loaded {
    system: DynamicalSystem,
    spec: SampleSpec,
}

fn spec_with_seed(verify: &VerifyConfig, seed: Option<u64>) -> SampleSpec {
    let mut spec = verify.sample_spec();
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec
}

fn load(config: Option<&Path>, seed: Option<u64>) -> Result<Loaded, CliError> {
    let path = config.ok_or_else(|| CliError::Usage("this command needs --config FILE".into()))?;
    let file = ConfigFile::load(path)?;
    let spec = spec_with_seed(&file.verify, seed);
    let system = file.system.build(&spec)?;
    Ok(Loaded { system, spec })
}

/// Runs the independent suites on worker threads and folds them in the given order.
fn combined(suite: &str, sys: &DynamicalSystem, spec: &SampleSpec, parts: &[Part]) -> Report {
    let reports: Vec<Report> = std::thread::scope(|scope| {
        let handles: Vec<_> = parts.iter().map(|part| scope.spawn(move || part.run(sys, spec))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    let mut out = Report::new(suite, json!({"system": sys.name(), "sample": spec.to_json()}));
    for r in reports {
        out.absorb(r);
    }
    out
}

#[derive(Clone, Copy)]
enum Part {
    Axioms,
    Li,
    Nica,
    Generators,
    Fibres,
    Ore,
}

impl Part {
    fn run(self, sys: &DynamicalSystem, spec: &SampleSpec) -> Report {
        match self {
            Part::Axioms => sys.verify_axioms(spec),
            Part::Li => RegularRep::new(sys).check_li_relations(spec),
            Part::Nica => ProductSystem::new(sys).check_nica_covariance(spec),
            Part::Generators => ProductSystem::new(sys).check_generator_relations(spec),
            Part::Fibres => ProductSystem::new(sys).check_fibre_structure(spec),
            Part::Ore => sys.sd_left_ore_sample(spec),
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Accepts `{"g":..,"p":..,"q":..,"h":..}`, `[g, p, q, h]` or `"0"`.
fn decode_monomial(alg: &MonomialAlgebra<'_>, v: &Value) -> Result<Monomial, CliError> {
    match v {
        Value::Array(parts) if parts.len() == 4 => {
            let obj = json!({"g": parts[0], "p": parts[1], "q": parts[2], "h": parts[3]});
            Ok(alg.decode(&obj)?)
        }
        Value::Array(_) => Err(CliError::Usage(format!("a monomial tuple has four entries (g, p, q, h), got {v}"))),
        _ => Ok(alg.decode(v)?),
    }
}

fn morphism_report(m: &AdsMorphism, spec: &SampleSpec) -> Report {
    let mut out = Report::new(
        "morphism-check",
        json!({"source": m.source.name(), "target": m.target.name(), "sample": spec.to_json()}),
    );
    out.absorb(m.check_morphism(spec));
    out.absorb(m.check_admissible(spec));
    out.absorb(m.ideal_functoriality_check(spec));
    out
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Verify => {
            let Loaded { system, spec } = load(config, cli.seed)?;
            let parts = [Part::Axioms, Part::Li, Part::Nica, Part::Generators];
            Ok(Outcome::report(combined("verify", &system, &spec, &parts), &[]))
        }
        Command::Lcm { left, right } => {
            let Loaded { system, .. } = load(config, cli.seed)?;
            let sg = system.semigroup();
            let (p, q) = (sg.parse(left)?, sg.parse(right)?);
            let out = match sg.right_lcm(&p, &q)? {
                RightLcm::Disjoint => json!({"kind": "disjoint"}),
                RightLcm::Meet { r, p_comp, q_comp } => json!({
                    "kind": "meet",
                    "lcm": sg.encode(&r),
                    "left_complement": sg.encode(&p_comp),
                    "right_complement": sg.encode(&q_comp),
                }),
            };
            Ok(Outcome::value(out))
        }
        Command::Intersect { left, right } => {
            let Loaded { system, .. } = load(config, cli.seed)?;
            let (a, b) = (system.parse_sd(left)?, system.parse_sd(right)?);
            Ok(Outcome::value(system.encode_ideal(&system.ideal_intersect(&a, &b)?)))
        }
        Command::Mult { monomials } => {
            let Loaded { system, .. } = load(config, cli.seed)?;
            let alg = MonomialAlgebra::new(&system);
            let Value::Array(items) = read_json(monomials)? else {
                return Err(CliError::Usage("the monomial file must hold a JSON array".into()));
            };
            let mut product = alg.identity();
            for item in &items {
                product = alg.mult(&product, &decode_monomial(&alg, item)?)?;
            }
            Ok(Outcome::value(alg.encode(&product)))
        }
        Command::RepCheck { radius } => {
            let Loaded { system, mut spec } = load(config, cli.seed)?;
            if let Some(r) = radius {
                spec.p_ball = *r;
            }
            Ok(Outcome::report(RegularRep::new(&system).check_li_relations(&spec), &[]))
        }
        Command::FockCheck { samples } => {
            let Loaded { system, mut spec } = load(config, cli.seed)?;
            if let Some(n) = samples {
                spec.pairs = *n;
            }
            let parts = [Part::Nica, Part::Generators, Part::Fibres];
            Ok(Outcome::report(combined("fock-check", &system, &spec, &parts), &[]))
        }
        Command::MorphismCheck { morphism } => {
            let file = MorphismFile::load(morphism)?;
            let verify = match config {
                Some(path) => ConfigFile::load(path)?.verify,
                None => file.verify.clone(),
            };
            let spec = spec_with_seed(&verify, cli.seed);
            let m = file.morphism.build(&spec)?;
            let findings = m.encode_findings(&m.hom_surjectivity_injectivity(&spec));
            Ok(Outcome::report(morphism_report(&m, &spec), &[("image", findings)]))
        }
        Command::OreCheck { radius } => {
            let Loaded { system, mut spec } = load(config, cli.seed)?;
            if let Some(r) = radius {
                spec.search_radius = *r;
            }
            let units = json!(system.sd_unit_description());
            Ok(Outcome::report(system.sd_left_ore_sample(&spec), &[("units", units)]))
        }
        Command::Report => {
            let Loaded { system, spec } = load(config, cli.seed)?;
            let parts = [Part::Axioms, Part::Li, Part::Nica, Part::Generators, Part::Fibres, Part::Ore];
            let units = json!(system.sd_unit_description());
            Ok(Outcome::report(combined("report", &system, &spec, &parts), &[("units", units)]))
        }
    }
}
