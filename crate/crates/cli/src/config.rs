//! TOML configuration: systems, sampling bounds and morphisms.

use std::path::Path;

use rlcm_core::{
    catalog, AdsMorphism, BaseGroup, DynamicalSystem, Gaussian, GroupMap, SampleSpec, Semigroup, SemigroupMap,
};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

/// A system description as written under `[system]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemConfig {
    IntMult { generators: Vec<i64> },
    GaussMult { generators: Vec<GaussianLiteral> },
    Shift { base_group: BaseGroupConfig, semigroup: SemigroupConfig },
    TrivialGroup { semigroup: SemigroupConfig },
    Builtin { name: String },
}

/// `"2+i"` or `[2, 1]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GaussianLiteral {
    Text(String),
    Pair([i64; 2]),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BaseGroupConfig {
    Cyclic { order: u64 },
    Integers,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SemigroupConfig {
    FreeAbelian { rank: usize },
    FreeMonoid { letters: u8 },
    Integers { generators: Vec<i64> },
    Gaussian { generators: Vec<GaussianLiteral> },
    Trivial,
}

/// `[verify]`: every field falls back to the library default.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub p_ball: Option<usize>,
    pub g_samples: Option<usize>,
    pub pairs: Option<usize>,
    pub basis_vectors: Option<usize>,
    pub prefix: Option<usize>,
    pub search_radius: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupMapConfig {
    Identity,
    Scale { factor: Value },
    Trivial,
    Pushforward,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SemigroupMapConfig {
    Identity,
    ByValue,
    Collapse,
    Images { images: Vec<Value> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismConfig {
    pub source: SystemConfig,
    pub target: SystemConfig,
    pub phi_g: GroupMapConfig,
    pub phi_p: SemigroupMapConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismFile {
    pub morphism: MorphismConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        read_toml(path)
    }
}

impl MorphismFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        read_toml(path)
    }
}

impl VerifyConfig {
    pub fn sample_spec(&self) -> SampleSpec {
        let d = SampleSpec::default();
        SampleSpec {
            p_ball: self.p_ball.unwrap_or(d.p_ball),
            g_samples: self.g_samples.unwrap_or(d.g_samples),
            pairs: self.pairs.unwrap_or(d.pairs),
            basis_vectors: self.basis_vectors.unwrap_or(d.basis_vectors),
            prefix: self.prefix.unwrap_or(d.prefix),
            search_radius: self.search_radius.unwrap_or(d.search_radius),
            seed: self.seed.unwrap_or(d.seed),
        }
    }
}

impl GaussianLiteral {
    fn value(&self) -> Result<Gaussian, CliError> {
        match self {
            GaussianLiteral::Text(s) => Ok(s.parse()?),
            GaussianLiteral::Pair([re, im]) => Ok(Gaussian::new(*re, *im)),
        }
    }
}

fn gaussians(gens: &[GaussianLiteral]) -> Result<Vec<Gaussian>, CliError> {
    gens.iter().map(GaussianLiteral::value).collect()
}

impl SemigroupConfig {
    pub fn build(&self) -> Result<Semigroup, CliError> {
        Ok(match self {
            SemigroupConfig::FreeAbelian { rank } => Semigroup::free_abelian(*rank),
            SemigroupConfig::FreeMonoid { letters } => {
                if !(1..=26).contains(letters) {
                    return Err(CliError::Usage(format!("free monoids need 1 to 26 letters, got {letters}")));
                }
                Semigroup::free_monoid(*letters)
            }
            SemigroupConfig::Integers { generators } => Semigroup::integers(generators)?,
            SemigroupConfig::Gaussian { generators } => Semigroup::gaussian(&gaussians(generators)?)?,
            SemigroupConfig::Trivial => Semigroup::trivial(),
        })
    }
}

impl SystemConfig {
    /// Builds and registers the system, running the sampled axiom checks under `spec`.
    pub fn build(&self, spec: &SampleSpec) -> Result<DynamicalSystem, CliError> {
        use rlcm_core::Action;
        let sys = match self {
            SystemConfig::IntMult { generators } => {
                DynamicalSystem::with_spec(Semigroup::integers(generators)?, Action::IntMult, spec)?
            }
            SystemConfig::GaussMult { generators } => {
                DynamicalSystem::with_spec(Semigroup::gaussian(&gaussians(generators)?)?, Action::GaussMult, spec)?
            }
            SystemConfig::Shift { base_group, semigroup } => {
                let base = match base_group {
                    BaseGroupConfig::Cyclic { order } => BaseGroup::Cyclic(*order),
                    BaseGroupConfig::Integers => BaseGroup::Integers,
                };
                DynamicalSystem::with_spec(semigroup.build()?, Action::Shift { base }, spec)?
            }
            SystemConfig::TrivialGroup { semigroup } => {
                DynamicalSystem::with_spec(semigroup.build()?, Action::Trivial, spec)?
            }
            SystemConfig::Builtin { name } => catalog::system(name)?,
        };
        Ok(sys)
    }
}

impl MorphismConfig {
    pub fn build(&self, spec: &SampleSpec) -> Result<AdsMorphism, CliError> {
        let source = self.source.build(spec)?;
        let target = self.target.build(spec)?;
        let phi_g = match &self.phi_g {
            GroupMapConfig::Identity => GroupMap::Identity,
            GroupMapConfig::Scale { factor } => GroupMap::Scale(target.decode_group(factor)?),
            GroupMapConfig::Trivial => GroupMap::Trivial,
            GroupMapConfig::Pushforward => GroupMap::Pushforward,
        };
        let (src, tgt) = (source.semigroup(), target.semigroup());
        let phi_p = match &self.phi_p {
            SemigroupMapConfig::Identity => SemigroupMap::from_images(src, tgt, src.generators())?,
            SemigroupMapConfig::ByValue => SemigroupMap::by_value(src, tgt)?,
            SemigroupMapConfig::Collapse => SemigroupMap::collapse(src, tgt),
            SemigroupMapConfig::Images { images } => SemigroupMap::from_images(
                src,
                tgt,
                images.iter().map(|v| tgt.decode(v)).collect::<Result<_, _>>()?,
            )?,
        };
        Ok(AdsMorphism::new(source, target, phi_g, phi_p)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ConfigFile {
        toml::from_str(text).unwrap()
    }

    #[test]
    fn integer_system_with_bounds() {
        let file = parse("[system]\nkind = \"int-mult\"\ngenerators = [2, 3]\n[verify]\np_ball = 2\nseed = 9\n");
        let spec = file.verify.sample_spec();
        assert_eq!((spec.p_ball, spec.seed, spec.pairs), (2, 9, SampleSpec::default().pairs));
        assert_eq!(file.system.build(&spec).unwrap().name(), "(ℤ, |2,3⟩)");
    }

    #[test]
    fn gaussian_literals_in_both_forms() {
        let a = parse("[system]\nkind = \"gauss-mult\"\ngenerators = [\"1+i\", \"2+i\"]\n");
        let b = parse("[system]\nkind = \"gauss-mult\"\ngenerators = [[1, 1], [2, 1]]\n");
        let spec = SampleSpec::default();
        assert_eq!(a.system.build(&spec).unwrap(), b.system.build(&spec).unwrap());
    }

    #[test]
    fn shift_over_naturals_is_the_toeplitz_system() {
        let file = parse(
            "[system]\nkind = \"shift\"\nbase_group = { kind = \"cyclic\", order = 2 }\n\
             semigroup = { kind = \"free-abelian\", rank = 1 }\n",
        );
        let sys = file.system.build(&file.verify.sample_spec()).unwrap();
        assert_eq!(sys, catalog::system("shift-z2-n").unwrap());
    }

    #[test]
    fn unknown_fields_and_kinds_are_rejected() {
        assert!(toml::from_str::<ConfigFile>("[system]\nkind = \"matrix\"\n").is_err());
        assert!(toml::from_str::<ConfigFile>("[system]\nkind = \"int-mult\"\ngenerators = [2]\nextra = 1\n").is_err());
        assert!(toml::from_str::<ConfigFile>("[system]\nkind = \"int-mult\"\ngenerators = [2]\n[verify]\nradius = 1\n").is_err());
    }

    #[test]
    fn registration_failure_carries_the_report() {
        let file = parse("[system]\nkind = \"int-mult\"\ngenerators = [4, 6]\n");
        match file.system.build(&SampleSpec::default()) {
            Err(CliError::Algebra(rlcm_core::AlgebraError::Registration { report: Some(r), .. })) => {
                assert!(r.failures.iter().any(|f| f.check == "order"));
            }
            other => panic!("expected a registration error, got {other:?}"),
        }
    }
}
