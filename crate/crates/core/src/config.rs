//! Run configuration: command-line flags, an optional key=value file and
//! the `QKZ_SEED` environment default.
//!
//! File keys are the long flag names without dashes (`K`, `n`, `weights`,
//! `g`, `family`, `eta`, ...). Blank lines and text after `#` are ignored.
//! Flags override file values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use serde_json::json;

use crate::basis::check_weights;
use crate::error::{Error, Result};
use crate::grading::Grading;
use crate::omega::{check_admissible, OmegaKind};
use crate::rmatrix::RFamily;
use crate::sampling::{chain_from, check_nonsingular};
use crate::scalar::{format_rational, parse_rational, Backend, Rational};

pub const SEED_ENV: &str = "QKZ_SEED";
const DEFAULT_SEED: u64 = 1;
const MAX_DIM: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    RAxioms,
    Omega,
    Chain,
    Correspondence,
    DetIdentity,
    Degeneracy,
    SignFlip,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::RAxioms,
        Suite::Omega,
        Suite::Chain,
        Suite::Correspondence,
        Suite::DetIdentity,
        Suite::Degeneracy,
        Suite::SignFlip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::RAxioms => "r-axioms",
            Suite::Omega => "omega",
            Suite::Chain => "chain",
            Suite::Correspondence => "correspondence",
            Suite::DetIdentity => "det-identity",
            Suite::Degeneracy => "degeneracy",
            Suite::SignFlip => "sign-flip",
            Suite::All => "all",
        }
    }

    /// The suites this selector runs, in report order.
    pub fn expand(self) -> Vec<Suite> {
        if self == Suite::All {
            Self::EACH.to_vec()
        } else {
            vec![self]
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .iter()
            .chain([Suite::All].iter())
            .copied()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradingSpec {
    Fixed(Grading),
    Sweep,
}

impl GradingSpec {
    /// Parses `sweep` or `bosons=1,2` (an empty list makes every label fermionic).
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let t = text.trim();
        if t == "sweep" {
            return Ok(GradingSpec::Sweep);
        }
        let list = t
            .strip_prefix("bosons=")
            .ok_or_else(|| Error::Config(format!("grading must be \"sweep\" or \"bosons=...\", got {t:?}")))?;
        let bosons = parse_list(list, "grading", |x| {
            x.parse::<usize>().map_err(|_| Error::Config(format!("bad boson label {x:?}")))
        })?;
        Ok(GradingSpec::Fixed(Grading::new(k, &bosons)?))
    }

    pub fn gradings(&self, k: usize) -> Result<Vec<Grading>> {
        match self {
            GradingSpec::Fixed(g) => Ok(vec![g.clone()]),
            GradingSpec::Sweep => Grading::all(k),
        }
    }
}

impl fmt::Display for GradingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradingSpec::Sweep => f.write_str("sweep"),
            GradingSpec::Fixed(g) => {
                let b: Vec<String> = g.bosons().iter().map(|a| a.to_string()).collect();
                write!(f, "bosons={}", b.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub suite: Suite,
    pub k: usize,
    pub grading: GradingSpec,
    pub n: usize,
    pub weights: Option<Vec<usize>>,
    pub twist: Option<Vec<Rational>>,
    pub family: RFamily,
    pub eta: Option<Rational>,
    pub hbar: Option<Rational>,
    pub q: Option<Rational>,
    pub w: Option<Rational>,
    pub kappa: Option<Rational>,
    pub positions: Option<Vec<Rational>>,
    pub samples: usize,
    pub seed: u64,
    pub backend: Backend,
    pub output: Option<PathBuf>,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            k: 2,
            grading: GradingSpec::Sweep,
            n: 3,
            weights: None,
            twist: None,
            family: RFamily::RationalPlus,
            eta: None,
            hbar: None,
            q: None,
            w: None,
            kappa: None,
            positions: None,
            samples: 5,
            seed: DEFAULT_SEED,
            backend: Backend::Exact,
            output: None,
            timings: false,
        }
    }
}

impl RunConfig {
    /// Coupling and shift fixed for a family: (η, ħ) rational, (q, w) trig.
    pub fn couplings(&self, family: RFamily) -> (Option<Rational>, Option<Rational>) {
        if family.is_trig() {
            (self.q.clone(), self.w.clone())
        } else {
            (self.eta.clone(), self.hbar.clone())
        }
    }

    /// Weight vectors to run: the configured one or every block.
    pub fn weight_list(&self) -> Vec<Vec<usize>> {
        match &self.weights {
            Some(w) => vec![w.clone()],
            None => crate::basis::all_weights(self.k, self.n),
        }
    }

    /// The configuration as JSON, rationals as "num/den" strings.
    pub fn echo(&self) -> serde_json::Value {
        let r = |x: &Option<Rational>| x.as_ref().map(format_rational);
        let rv = |x: &Option<Vec<Rational>>| x.as_ref().map(|v| v.iter().map(format_rational).collect::<Vec<_>>());
        json!({
            "suite": self.suite.name(),
            "K": self.k,
            "grading": self.grading.to_string(),
            "n": self.n,
            "weights": self.weights,
            "g": rv(&self.twist),
            "family": self.family.name(),
            "eta": r(&self.eta),
            "hbar": r(&self.hbar),
            "q": r(&self.q),
            "w": r(&self.w),
            "kappa": r(&self.kappa),
            "x": rv(&self.positions),
            "samples": self.samples,
            "seed": self.seed,
            "backend": self.backend.to_string(),
        })
    }

    /// Checks the combination before any computation starts.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n == 0 {
            return Err(Error::Config("K and n must be at least 1".into()));
        }
        let dim = (self.k as u32).checked_pow(self.n as u32).unwrap_or(u32::MAX) as usize;
        let aux = dim.saturating_mul(self.k);
        if aux > MAX_DIM {
            return Err(Error::Config(format!("space too large: K^(n+1) = {aux} exceeds {MAX_DIM}")));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if let GradingSpec::Fixed(g) = &self.grading {
            if g.k() != self.k {
                return Err(Error::Config(format!("grading has {} labels, K is {}", g.k(), self.k)));
            }
        }
        if let Some(w) = &self.weights {
            check_weights(self.k, w, self.n)?;
        }
        if let Some(g) = &self.twist {
            if g.len() != self.k {
                return Err(Error::Config(format!("g needs {} entries, got {}", self.k, g.len())));
            }
        }
        for (name, v) in [("q", &self.q), ("w", &self.w)] {
            if let Some(v) = v {
                if v <= &Rational::from_integer(0.into()) {
                    return Err(Error::Config(format!("{name} must be positive")));
                }
            }
        }
        if let Some(x) = &self.positions {
            if x.len() != self.n {
                return Err(Error::Config(format!("x needs {} entries, got {}", self.n, x.len())));
            }
            for i in 0..x.len() {
                for j in i + 1..x.len() {
                    if x[i] == x[j] {
                        return Err(Error::Config(format!(
                            "singular fixed positions: {}",
                            Error::CoincidentPositions(i + 1, j + 1)
                        )));
                    }
                }
            }
            self.check_fixed_positions()?;
        }
        if let (GradingSpec::Fixed(g), Some(w)) = (&self.grading, &self.weights) {
            let suites = self.suite.expand();
            if suites.contains(&Suite::Correspondence) || suites.contains(&Suite::Omega) {
                let (c, _) = self.couplings(self.family);
                let kind = OmegaKind::for_family(self.family, &c.unwrap_or_else(|| Rational::from_integer(2.into())))?;
                check_admissible(&kind, g, w, self.n)
                    .map_err(|e| Error::Config(format!("inadmissible weight/grading combination: {e}")))?;
            }
        }
        Ok(())
    }

    /// With positions and couplings fixed, the configured family must be
    /// nonsingular there.
    fn check_fixed_positions(&self) -> Result<()> {
        let Some(x) = &self.positions else { return Ok(()) };
        let g = Grading::bosonic(self.k)?;
        let twist = self.twist.clone().unwrap_or_else(|| vec![Rational::from_integer(1.into()); self.k]);
        let kappa = self.kappa.clone().unwrap_or_else(|| Rational::from_integer(1.into()));
        if let (Some(c), Some(s)) = self.couplings(self.family) {
            chain_from::<Rational>(&g, self.family, x, &twist, &c, &s, &kappa)
                .and_then(|cfg| check_nonsingular(&cfg))
                .map_err(|e| Error::Config(format!("singular fixed positions: {e}")))?;
        }
        Ok(())
    }
}

fn parse_list<T>(text: &str, what: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(|x| item(x.trim())).collect::<Result<Vec<_>>>().map_err(|e| Error::Config(format!("{what}: {e}")))
}

fn parse_rationals(text: &str, what: &str) -> Result<Vec<Rational>> {
    parse_list(text, what, parse_rational)
}

fn parse_one_rational(text: &str, what: &str) -> Result<Rational> {
    parse_rational(text).map_err(|e| Error::Config(format!("{what}: {e}")))
}

fn parse_usize(text: &str, what: &str) -> Result<usize> {
    text.trim().parse().map_err(|_| Error::Config(format!("{what} must be a non-negative integer, got {text:?}")))
}

fn parse_bool(text: &str, what: &str) -> Result<bool> {
    match text.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("{what} must be true or false, got {other:?}"))),
    }
}

fn parse_backend(text: &str) -> Result<Backend> {
    match text.trim() {
        "exact" => Ok(Backend::Exact),
        "float" => Ok(Backend::Float),
        other => Err(Error::Config(format!("backend must be exact or float, got {other:?}"))),
    }
}

/// Command-line flags. Every value is kept as text and parsed together with
/// the config file so both sources report errors the same way.
#[derive(Debug, Parser, Default)]
#[command(
    name = "superqkz",
    version,
    about = "Exact checks for graded R-matrices, qKZ operators and transfer matrices"
)]
pub struct Cli {
    /// r-axioms | omega | chain | correspondence | det-identity | degeneracy | sign-flip | all
    #[arg(long)]
    pub suite: Option<String>,
    /// Number of basis labels K = N + M
    #[arg(long = "K")]
    pub k: Option<String>,
    /// "sweep" or "bosons=1,2"
    #[arg(long)]
    pub grading: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    /// Weight vector M_1,...,M_K; every block when omitted
    #[arg(long)]
    pub weights: Option<String>,
    /// Twist entries g_1,...,g_K
    #[arg(long)]
    pub g: Option<String>,
    /// rational-plus | rational-minus | trig-plus | trig-minus
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub hbar: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub w: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    /// Positions x_1,...,x_n (u_i = e^{x_i} for trig families)
    #[arg(long)]
    pub x: Option<String>,
    /// Random configurations per grading and weight
    #[arg(long)]
    pub samples: Option<String>,
    /// Default from the QKZ_SEED environment variable
    #[arg(long)]
    pub seed: Option<String>,
    /// exact | float
    #[arg(long)]
    pub backend: Option<String>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Key=value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Record per-check wall-clock times (makes reports non-reproducible)
    #[arg(long)]
    pub timings: bool,
}

const KEYS: [&str; 18] = [
    "suite", "K", "grading", "n", "weights", "g", "family", "eta", "hbar", "q", "w", "kappa", "x", "samples", "seed",
    "backend", "output", "timings",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key=value", no + 1)))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(Error::Config(format!("line {}: unknown key {k:?}", no + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Builds the validated run configuration from flags, the optional file and
/// the environment seed, in increasing precedence: defaults, env, file, flags.
pub fn parse_config(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    resolve(cli, &file, env_seed.as_deref())
}

/// [`parse_config`] with the environment seed passed in explicitly.
pub fn resolve(cli: &Cli, file: &BTreeMap<String, String>, env_seed: Option<&str>) -> Result<RunConfig> {
    let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).cloned());
    let mut cfg = RunConfig::default();
    if let Some(s) = pick(&cli.suite, "suite") {
        cfg.suite = s.parse()?;
    }
    if let Some(s) = pick(&cli.k, "K") {
        cfg.k = parse_usize(&s, "K")?;
    }
    if let Some(s) = pick(&cli.n, "n") {
        cfg.n = parse_usize(&s, "n")?;
    }
    if let Some(s) = pick(&cli.grading, "grading") {
        cfg.grading = GradingSpec::parse(&s, cfg.k)?;
    }
    if let Some(s) = pick(&cli.weights, "weights") {
        cfg.weights = Some(parse_list(&s, "weights", |x| parse_usize(x, "weight"))?);
    }
    if let Some(s) = pick(&cli.g, "g") {
        cfg.twist = Some(parse_rationals(&s, "g")?);
    }
    if let Some(s) = pick(&cli.family, "family") {
        cfg.family = s.trim().parse()?;
    }
    for (flag, key, slot) in [
        (&cli.eta, "eta", &mut cfg.eta),
        (&cli.hbar, "hbar", &mut cfg.hbar),
        (&cli.q, "q", &mut cfg.q),
        (&cli.w, "w", &mut cfg.w),
        (&cli.kappa, "kappa", &mut cfg.kappa),
    ] {
        if let Some(s) = pick(flag, key) {
            *slot = Some(parse_one_rational(&s, key)?);
        }
    }
    if let Some(s) = pick(&cli.x, "x") {
        cfg.positions = Some(parse_rationals(&s, "x")?);
    }
    if let Some(s) = pick(&cli.samples, "samples") {
        cfg.samples = parse_usize(&s, "samples")?;
    }
    if let Some(s) = pick(&cli.seed, "seed").or_else(|| env_seed.map(str::to_string)) {
        cfg.seed =
            s.trim().parse().map_err(|_| Error::Config(format!("seed must be an unsigned integer, got {s:?}")))?;
    }
    if let Some(s) = pick(&cli.backend, "backend") {
        cfg.backend = parse_backend(&s)?;
    }
    cfg.output = cli.output.clone().or_else(|| file.get("output").map(PathBuf::from));
    cfg.timings = cli.timings || file.get("timings").map(|v| parse_bool(v, "timings")).transpose()?.unwrap_or(false);
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("superqkz").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn degeneracy_example_is_valid() {
        let c = cli(&[
            "--suite",
            "degeneracy",
            "--K",
            "3",
            "--n",
            "3",
            "--weights",
            "1,1,1",
            "--g",
            "2,3,5",
            "--family",
            "trig-plus",
            "--q",
            "2",
            "--w",
            "3",
            "--seed",
            "42",
            "--backend",
            "exact",
        ]);
        let cfg = resolve(&c, &BTreeMap::new(), None).unwrap();
        assert_eq!(cfg.suite, Suite::Degeneracy);
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn weights_must_sum_to_n() {
        let e = resolve(&cli(&["--weights", "2,2", "--n", "3"]), &BTreeMap::new(), None).unwrap_err();
        assert!(e.to_string().contains("weights must sum to n"), "{e}");
    }

    #[test]
    fn sweep_expands() {
        let cfg = resolve(&cli(&["--grading", "sweep", "--K", "2"]), &BTreeMap::new(), None).unwrap();
        assert_eq!(cfg.grading.gradings(cfg.k).unwrap().len(), 4);
    }

    #[test]
    fn file_env_and_flag_precedence() {
        let file = parse_config_text("# comment\nK = 3\nn=3 # trailing\nseed = 5\nweights = 1,1,1\n").unwrap();
        let cfg = resolve(&cli(&[]), &file, Some("9")).unwrap();
        assert_eq!((cfg.k, cfg.seed), (3, 5));
        let cfg = resolve(&cli(&["--seed", "7"]), &file, Some("9")).unwrap();
        assert_eq!(cfg.seed, 7);
        let file = parse_config_text("K=2\n").unwrap();
        assert_eq!(resolve(&cli(&[]), &file, Some("9")).unwrap().seed, 9);
        assert!(parse_config_text("bogus = 1").is_err());
    }

    #[test]
    fn distinct_errors() {
        let none = BTreeMap::new();
        let e = resolve(&cli(&["--grading", "bosons=1", "--weights", "1,2", "--suite", "correspondence"]), &none, None)
            .unwrap_err();
        assert!(e.to_string().contains("inadmissible weight/grading combination"), "{e}");
        let e =
            resolve(&cli(&["--x", "0,1,3", "--eta", "1", "--hbar", "2", "--g", "2,3", "--kappa", "1"]), &none, None)
                .unwrap_err();
        assert!(e.to_string().contains("singular fixed positions"), "{e}");
        assert!(Cli::try_parse_from(["superqkz", "--bogus"]).is_err());
    }
}
