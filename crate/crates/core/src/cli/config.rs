use std::collections::BTreeMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::RunArgs;
use crate::data::{Distribution, PartitionScheme, Stage};
use crate::error::{Error, Result};
use crate::fed::{derive_seed, DataSource, FedConfig, PipelineOptions};
use crate::metrics::TrainingSetting;

const KEYS: [&str; 16] = [
    "mode",
    "stage",
    "clients",
    "interval",
    "rounds",
    "rounds-two",
    "lr",
    "batch",
    "distribution",
    "data-dir",
    "synthetic",
    "pretrained",
    "out",
    "seed",
    "sweep",
    "sequential",
];

const DEFAULT_OUT: &str = "fedtl-out";
const DEFAULT_SWEEP: RangeInclusive<usize> = 1..=10;

/// Flat `key = value` settings; `#` starts a comment, keys use the flag names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected `key = value`", n + 1)))?;
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("config line {}: unknown key `{key}`", n + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("config line {}: `{key}` given twice", n + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::Config(format!("config key `{key}`: invalid value `{v}`: {e}")))
            })
            .transpose()
    }
}

/// The four experiment commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Centralized,
    Federated,
    Sweep,
    TwoStage,
}

/// Fully resolved settings of one command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub setting: TrainingSetting,
    pub stage: Stage,
    pub clients: usize,
    pub interval: usize,
    pub rounds: usize,
    pub rounds_two: usize,
    pub lr: f32,
    pub batch: usize,
    pub distribution: Distribution,
    pub source: DataSource,
    pub pretrained: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub sweep: RangeInclusive<usize>,
    pub parallel: bool,
}

fn parse_flag<T: FromStr>(flag: &Option<String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    flag.as_ref()
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| Error::Config(format!("--{key}: invalid value `{v}`: {e}")))
        })
        .transpose()
}

fn parse_sweep(text: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::Config(format!("sweep range `{text}` must look like `a..b` with 1 <= a <= b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a < 1 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

struct Layers<'a> {
    args: &'a RunArgs,
    file: ConfigFile,
}

impl Layers<'_> {
    fn given(&self, key: &str) -> bool {
        let a = self.args;
        let flag = match key {
            "mode" => a.mode.is_some(),
            "stage" => a.stage.is_some(),
            "clients" => a.clients.is_some(),
            "interval" => a.interval.is_some(),
            "rounds-two" => a.rounds_two.is_some(),
            "distribution" => a.distribution.is_some(),
            "pretrained" => a.pretrained.is_some(),
            "sweep" => a.sweep.is_some(),
            _ => false,
        };
        flag || self.file.entries.contains_key(key)
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file.get(key),
        }
    }

    fn pick_str<T: FromStr>(&self, flag: &Option<String>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match parse_flag(flag, key)? {
            Some(v) => Ok(Some(v)),
            None => self.file.get(key),
        }
    }

    fn forbid(&self, keys: &[&str], context: &str) -> Result<()> {
        for key in keys {
            if self.given(key) {
                return Err(Error::Config(format!("--{key} does not apply to {context}")));
            }
        }
        Ok(())
    }
}

impl ExperimentConfig {
    pub fn resolve(args: &RunArgs, kind: Kind) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let layers = Layers { args, file };

        let mode: Option<TrainingSetting> = layers.pick_str(&args.mode, "mode")?;
        let setting = match kind {
            Kind::Centralized => TrainingSetting::Centralized,
            Kind::Federated | Kind::Sweep => TrainingSetting::Federated,
            Kind::TwoStage => mode.unwrap_or(TrainingSetting::Federated),
        };
        if kind != Kind::TwoStage && mode.is_some_and(|m| m != setting) {
            return Err(Error::Config(format!("--mode {} conflicts with this command", mode.unwrap())));
        }
        match kind {
            Kind::Centralized => layers.forbid(
                &["clients", "interval", "distribution", "sweep", "rounds-two"],
                "centralized training",
            )?,
            Kind::Federated => layers.forbid(&["sweep", "rounds-two"], "a single federated run")?,
            Kind::Sweep => layers.forbid(&["interval", "rounds-two"], "an interval sweep")?,
            Kind::TwoStage => {
                layers.forbid(&["stage", "pretrained", "sweep"], "the two-stage pipeline")?;
                if setting == TrainingSetting::Centralized {
                    layers.forbid(&["clients", "interval", "distribution"], "centralized training")?;
                }
            }
        }

        let stage: Stage = if kind == Kind::TwoStage {
            Stage::StageOne
        } else {
            layers.pick_str(&args.stage, "stage")?.unwrap_or(Stage::StageOne)
        };
        let default_rounds = match stage {
            Stage::StageOne => 20,
            Stage::StageTwo => 10,
        };
        let seed: u64 = layers.pick(args.seed, "seed")?.unwrap_or(0);
        let synthetic = |per_class| DataSource::Synthetic {
            per_class,
            seed: derive_seed(seed, 4),
        };
        // a source flag replaces whichever source the file names
        let source = match (&args.data_dir, args.synthetic) {
            (Some(dir), _) => DataSource::Directory(dir.clone()),
            (None, Some(n)) => synthetic(n),
            (None, None) => match (layers.file.get::<PathBuf>("data-dir")?, layers.file.get::<usize>("synthetic")?) {
                (Some(_), Some(_)) => return Err(Error::Config("config sets both data-dir and synthetic".into())),
                (Some(dir), None) => DataSource::Directory(dir),
                (None, Some(n)) => synthetic(n),
                (None, None) => {
                    return Err(Error::Config("a data source is required: --data-dir or --synthetic".into()))
                }
            },
        };
        match &source {
            DataSource::Directory(dir) if !dir.is_dir() => return Err(Error::MissingDirectory(dir.clone())),
            DataSource::Synthetic { per_class, .. } if *per_class < 2 => {
                return Err(Error::Config("--synthetic needs at least 2 examples per class".into()))
            }
            _ => {}
        }

        let sequential: bool = args.sequential || layers.file.get("sequential")?.unwrap_or(false);
        let sweep = match layers.pick_str::<String>(&args.sweep, "sweep")? {
            Some(text) => parse_sweep(&text)?,
            None => DEFAULT_SWEEP,
        };
        let cfg = Self {
            setting,
            stage,
            clients: layers.pick(args.clients, "clients")?.unwrap_or(5),
            interval: layers.pick(args.interval, "interval")?.unwrap_or(1),
            rounds: layers.pick(args.rounds, "rounds")?.unwrap_or(default_rounds),
            rounds_two: layers.pick(args.rounds_two, "rounds-two")?.unwrap_or(10),
            lr: layers.pick(args.lr, "lr")?.unwrap_or(0.001),
            batch: layers.pick(args.batch, "batch")?.unwrap_or(32),
            distribution: layers
                .pick_str(&args.distribution, "distribution")?
                .unwrap_or(Distribution::Balanced),
            source,
            pretrained: layers.pick(args.pretrained.clone(), "pretrained")?,
            out: layers.pick(args.out.clone(), "out")?.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            seed,
            sweep,
            parallel: !sequential,
        };
        cfg.validate(kind)?;
        Ok(cfg)
    }

    fn validate(&self, kind: Kind) -> Result<()> {
        if self.stage == Stage::StageOne && self.pretrained.is_some() {
            return Err(Error::Config("--pretrained only applies to stage two".into()));
        }
        if self.setting == TrainingSetting::Federated {
            PartitionScheme::for_distribution(self.distribution, self.clients).fractions()?;
        }
        self.fed_config(self.stage, self.interval).validate()?;
        if kind == Kind::TwoStage {
            FedConfig {
                rounds: self.rounds_two,
                pretrained: Some(PathBuf::new()),
                ..self.fed_config(Stage::StageTwo, self.interval)
            }
            .validate()?;
        }
        Ok(())
    }

    /// Engine settings for `stage`; centralized runs use one client.
    pub fn fed_config(&self, stage: Stage, interval: usize) -> FedConfig {
        let centralized = self.setting == TrainingSetting::Centralized;
        FedConfig {
            rounds: if stage == self.stage { self.rounds } else { self.rounds_two },
            interval: if centralized { 1 } else { interval },
            clients: if centralized { 1 } else { self.clients },
            stage,
            lr: self.lr,
            batch_size: self.batch,
            init_seed: derive_seed(self.seed, 1),
            shuffle_seed_base: derive_seed(self.seed, 2),
            pretrained: if stage == Stage::StageTwo { self.pretrained.clone() } else { None },
            save_to: None,
            parallel: self.parallel,
        }
    }

    pub fn pipeline_options(&self) -> PipelineOptions {
        PipelineOptions {
            setting: self.setting,
            distribution: self.distribution,
            split_ratio: 0.8,
            data_seed: derive_seed(self.seed, 3),
        }
    }
}
