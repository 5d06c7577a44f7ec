//! Run configuration: a `[section]` / `key = value` text format with
//! comma-separated lists, resolved into validated core types, plus the
//! canonical re-emission used by `--echo-config`.
//!
//! Grammar rules: `#` starts a comment anywhere on a line; keys and section
//! names are lowercase; list values split on top-level commas so
//! parenthesized literals like `pareto(25, 2)` stay intact. Required
//! sections are `[model]`, `[market]`, `[utility]`, and `[sim]`; each
//! command additionally requires its own section.

use std::collections::BTreeMap;
use std::fmt;

use ruinlab_core::{
    premium_from_loading, ClaimDistribution, InsuranceModel, Market, Strategy, Utility,
};

/// Configuration problem; the caller maps it to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<ruinlab_core::Error> for ConfigError {
    fn from(err: ruinlab_core::Error) -> Self {
        ConfigError(err.to_string())
    }
}

type ConfigResult<T> = Result<T, ConfigError>;

/// How the premium rate was specified; the loading form remembers rho so
/// the canonical echo can reproduce it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PremiumSpec {
    Direct(f64),
    Loading(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub n_steps: usize,
    pub n_paths: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSection {
    pub x_values: Vec<f64>,
    pub distributions: Vec<ClaimDistribution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueSection {
    pub x_values: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub closed_form: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DppSection {
    pub h: f64,
    pub candidates: Vec<f64>,
    pub n_outer: usize,
    pub n_inner: usize,
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: InsuranceModel,
    pub premium: PremiumSpec,
    pub market: Market,
    pub sigma2: f64,
    pub utility: Utility,
    pub sim: SimSettings,
    pub ruin_strategy: Option<Strategy>,
    pub table: Option<TableSection>,
    pub value: Option<ValueSection>,
    pub dpp: Option<DppSection>,
}

const KNOWN_SECTIONS: [&str; 8] = [
    "model", "market", "utility", "sim", "ruin", "table", "value", "dpp",
];

/// One parsed section with consumption tracking, so leftover keys can be
/// reported by name.
struct Section {
    name: &'static str,
    entries: BTreeMap<String, String>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> ConfigResult<String> {
        self.take(key)
            .ok_or_else(|| ConfigError(format!("[{}] is missing required key '{key}'", self.name)))
    }

    fn finish(self) -> ConfigResult<()> {
        if let Some(key) = self.entries.keys().next() {
            return Err(ConfigError(format!(
                "unknown key '{key}' in [{}]",
                self.name
            )));
        }
        Ok(())
    }
}

fn parse_f64(section: &str, key: &str, raw: &str) -> ConfigResult<f64> {
    let value: f64 = raw.parse().map_err(|_| {
        ConfigError(format!("[{section}] {key} = {raw} is not a number"))
    })?;
    if !value.is_finite() {
        return Err(ConfigError(format!(
            "[{section}] {key} = {raw} must be finite"
        )));
    }
    Ok(value)
}

fn parse_usize(section: &str, key: &str, raw: &str) -> ConfigResult<usize> {
    raw.parse().map_err(|_| {
        ConfigError(format!(
            "[{section}] {key} = {raw} is not a non-negative integer"
        ))
    })
}

fn parse_u64(section: &str, key: &str, raw: &str) -> ConfigResult<u64> {
    raw.parse().map_err(|_| {
        ConfigError(format!(
            "[{section}] {key} = {raw} is not a non-negative integer"
        ))
    })
}

fn parse_bool(section: &str, key: &str, raw: &str) -> ConfigResult<bool> {
    match raw {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError(format!(
            "[{section}] {key} = {raw} must be true or false"
        ))),
    }
}

/// Splits on commas outside parentheses; empty input gives an empty list.
fn split_top_level(raw: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in raw.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(raw[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let tail = raw[start..].trim();
    if !tail.is_empty() {
        parts.push(tail);
    }
    parts
}

fn parse_f64_list(section: &str, key: &str, raw: &str) -> ConfigResult<Vec<f64>> {
    split_top_level(raw)
        .into_iter()
        .map(|item| parse_f64(section, key, item))
        .collect()
}

/// Parses a call-style literal `name(arg, ...)` or a bare `name`.
fn parse_literal(raw: &str) -> Option<(&str, Vec<&str>)> {
    match raw.find('(') {
        None => Some((raw, Vec::new())),
        Some(open) => {
            let name = raw[..open].trim();
            let rest = raw[open + 1..].trim_end();
            let body = rest.strip_suffix(')')?;
            Some((name, split_top_level(body)))
        }
    }
}

fn parse_claims(section: &str, raw: &str) -> ConfigResult<ClaimDistribution> {
    let bad = || {
        ConfigError(format!(
            "[{section}] claims = {raw} is not a distribution literal; expected \
             exponential(mean), pareto(x_m, a), or weibull(k, s)"
        ))
    };
    let (name, args) = parse_literal(raw).ok_or_else(bad)?;
    let nums: Vec<f64> = args
        .iter()
        .map(|a| parse_f64(section, "claims", a))
        .collect::<ConfigResult<_>>()?;
    let dist = match (name, nums.as_slice()) {
        ("exponential", [mean]) => ClaimDistribution::exponential(*mean),
        ("pareto", [x_m, a]) => ClaimDistribution::pareto(*x_m, *a),
        ("weibull", [k, s]) => ClaimDistribution::weibull(*k, *s),
        _ => return Err(bad()),
    };
    Ok(dist?)
}

fn parse_claims_list(section: &str, raw: &str) -> ConfigResult<Vec<ClaimDistribution>> {
    split_top_level(raw)
        .into_iter()
        .map(|item| parse_claims(section, item))
        .collect()
}

fn parse_strategy(
    section: &str,
    raw: &str,
    market: &Market,
    utility: &Utility,
) -> ConfigResult<Strategy> {
    let bad = || {
        ConfigError(format!(
            "[{section}] strategy {raw} is not a strategy literal; expected \
             none, merton, or fraction(theta)"
        ))
    };
    let (name, args) = parse_literal(raw).ok_or_else(bad)?;
    match (name, args.as_slice()) {
        ("none", []) => Ok(Strategy::no_investment()),
        ("merton", []) => Ok(Strategy::merton_clamped(market, utility)),
        ("fraction", [theta]) => {
            let theta = parse_f64(section, "strategy", theta)?;
            Ok(Strategy::constant_fraction(theta)?)
        }
        _ => Err(bad()),
    }
}

fn parse_strategy_list(
    section: &str,
    raw: &str,
    market: &Market,
    utility: &Utility,
) -> ConfigResult<Vec<Strategy>> {
    split_top_level(raw)
        .into_iter()
        .map(|item| parse_strategy(section, item, market, utility))
        .collect()
}

/// Splits the text into named sections of key-value pairs, rejecting
/// malformed lines, duplicate keys, and unknown section names.
fn raw_sections(text: &str) -> ConfigResult<BTreeMap<&'static str, Section>> {
    let mut sections: BTreeMap<&'static str, Section> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (idx, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        if let Some(inner) = line.strip_prefix('[') {
            let name = inner.strip_suffix(']').ok_or_else(|| {
                ConfigError(format!("line {lineno}: unterminated section header"))
            })?;
            let name = name.trim();
            let known = KNOWN_SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| ConfigError(format!("line {lineno}: unknown section [{name}]")))?;
            if sections.contains_key(known) {
                return Err(ConfigError(format!(
                    "line {lineno}: section [{name}] appears twice"
                )));
            }
            sections.insert(
                known,
                Section {
                    name: known,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(known);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError(format!("line {lineno}: expected 'key = value', got '{line}'"))
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(ConfigError(format!("line {lineno}: empty key")));
        }
        let section = current.ok_or_else(|| {
            ConfigError(format!(
                "line {lineno}: key '{key}' appears before any [section] header"
            ))
        })?;
        let entries = &mut sections
            .get_mut(section)
            .expect("current section was inserted")
            .entries;
        if entries.contains_key(key) {
            return Err(ConfigError(format!(
                "line {lineno}: duplicate key '{key}' in [{section}]"
            )));
        }
        entries.insert(key.to_string(), value.to_string());
    }
    Ok(sections)
}

impl RunConfig {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut sections = raw_sections(text)?;
        let mut section = |name: &'static str| -> ConfigResult<Section> {
            sections
                .remove(name)
                .ok_or_else(|| ConfigError(format!("config is missing the [{name}] section")))
        };

        let mut market_sec = section("market")?;
        let r = parse_f64("market", "r", &market_sec.require("r")?)?;
        let mu = parse_f64("market", "mu", &market_sec.require("mu")?)?;
        let sigma2 = parse_f64("market", "sigma2", &market_sec.require("sigma2")?)?;
        market_sec.finish()?;
        if !(sigma2 > 0.0) {
            return Err(ConfigError(format!(
                "[market] requires sigma2 > 0, got sigma2 = {sigma2}"
            )));
        }
        let market = Market::new(r, mu, sigma2.sqrt())?;

        let mut utility_sec = section("utility")?;
        let alpha = parse_f64("utility", "alpha", &utility_sec.require("alpha")?)?;
        let kappa = match utility_sec.take("kappa") {
            Some(raw) => parse_f64("utility", "kappa", &raw)?,
            None => 0.0,
        };
        let horizon = parse_f64("utility", "horizon", &utility_sec.require("horizon")?)?;
        utility_sec.finish()?;
        let utility = Utility::new(alpha, kappa, horizon)?;

        let mut model_sec = section("model")?;
        let x0 = parse_f64("model", "x0", &model_sec.require("x0")?)?;
        let lambda = parse_f64("model", "lambda", &model_sec.require("lambda")?)?;
        let claims = parse_claims("model", &model_sec.require("claims")?)?;
        let c_raw = model_sec.take("c");
        let rho_raw = model_sec.take("rho");
        model_sec.finish()?;
        let (premium, c) = match (c_raw, rho_raw) {
            (Some(c), None) => {
                let c = parse_f64("model", "c", &c)?;
                (PremiumSpec::Direct(c), c)
            }
            (None, Some(rho)) => {
                let rho = parse_f64("model", "rho", &rho)?;
                let c = premium_from_loading(lambda, claims.mean()?, rho)?;
                (PremiumSpec::Loading(rho), c)
            }
            (Some(_), Some(_)) => {
                return Err(ConfigError(
                    "[model] must set exactly one of c and rho; both are present".to_string(),
                ))
            }
            (None, None) => {
                return Err(ConfigError(
                    "[model] must set exactly one of c and rho; neither is present".to_string(),
                ))
            }
        };
        let model = InsuranceModel::new(x0, c, lambda, claims)?;

        let mut sim_sec = section("sim")?;
        let n_steps = parse_usize("sim", "n_steps", &sim_sec.require("n_steps")?)?;
        let n_paths = parse_usize("sim", "n_paths", &sim_sec.require("n_paths")?)?;
        let master_seed = parse_u64("sim", "master_seed", &sim_sec.require("master_seed")?)?;
        sim_sec.finish()?;
        let sim = SimSettings {
            n_steps,
            n_paths,
            master_seed,
        };

        let ruin_strategy = match sections.remove("ruin") {
            None => None,
            Some(mut sec) => {
                let strategy =
                    parse_strategy("ruin", &sec.require("strategy")?, &market, &utility)?;
                sec.finish()?;
                Some(strategy)
            }
        };

        let table = match sections.remove("table") {
            None => None,
            Some(mut sec) => {
                let x_values = parse_f64_list("table", "x_values", &sec.require("x_values")?)?;
                let distributions = parse_claims_list("table", &sec.require("distributions")?)?;
                sec.finish()?;
                if x_values.is_empty() {
                    return Err(ConfigError(
                        "[table] x_values must list at least one value".to_string(),
                    ));
                }
                if distributions.is_empty() {
                    return Err(ConfigError(
                        "[table] distributions must list at least one distribution".to_string(),
                    ));
                }
                Some(TableSection {
                    x_values,
                    distributions,
                })
            }
        };

        let value = match sections.remove("value") {
            None => None,
            Some(mut sec) => {
                let x_values = parse_f64_list("value", "x_values", &sec.require("x_values")?)?;
                let strategies =
                    parse_strategy_list("value", &sec.require("strategies")?, &market, &utility)?;
                let closed_form = match sec.take("closed_form") {
                    Some(raw) => parse_bool("value", "closed_form", &raw)?,
                    None => false,
                };
                sec.finish()?;
                if x_values.is_empty() {
                    return Err(ConfigError(
                        "[value] x_values must list at least one value".to_string(),
                    ));
                }
                if strategies.is_empty() {
                    return Err(ConfigError(
                        "[value] strategies must list at least one strategy".to_string(),
                    ));
                }
                Some(ValueSection {
                    x_values,
                    strategies,
                    closed_form,
                })
            }
        };

        let dpp = match sections.remove("dpp") {
            None => None,
            Some(mut sec) => {
                let h = parse_f64("dpp", "h", &sec.require("h")?)?;
                let candidates = parse_f64_list("dpp", "candidates", &sec.require("candidates")?)?;
                let n_outer = match sec.take("n_outer") {
                    Some(raw) => parse_usize("dpp", "n_outer", &raw)?,
                    None => 2000,
                };
                let n_inner = match sec.take("n_inner") {
                    Some(raw) => parse_usize("dpp", "n_inner", &raw)?,
                    None => 200,
                };
                sec.finish()?;
                if candidates.is_empty() {
                    return Err(ConfigError(
                        "[dpp] candidates must list at least one fraction".to_string(),
                    ));
                }
                if !(h > 0.0 && h < utility.horizon) {
                    return Err(ConfigError(format!(
                        "[dpp] requires 0 < h < horizon, got h = {h} with horizon = {}",
                        utility.horizon
                    )));
                }
                Some(DppSection {
                    h,
                    candidates,
                    n_outer,
                    n_inner,
                })
            }
        };

        Ok(RunConfig {
            model,
            premium,
            market,
            sigma2,
            utility,
            sim,
            ruin_strategy,
            table,
            value,
            dpp,
        })
    }

    /// Emits the canonical form: fixed section and key order, resolved
    /// defaults, shortest round-trip numbers. Parsing the canonical form
    /// and echoing again reproduces it byte for byte.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        out.push_str("[model]\n");
        out.push_str(&format!("x0 = {}\n", self.model.x0));
        match self.premium {
            PremiumSpec::Direct(c) => out.push_str(&format!("c = {c}\n")),
            PremiumSpec::Loading(rho) => {
                out.push_str(&format!("rho = {rho}  # c = {}\n", self.model.c))
            }
        }
        out.push_str(&format!("lambda = {}\n", self.model.lambda));
        out.push_str(&format!("claims = {}\n", claims_literal(&self.model.claims)));

        out.push_str("\n[market]\n");
        out.push_str(&format!("r = {}\n", self.market.r));
        out.push_str(&format!("mu = {}\n", self.market.mu));
        out.push_str(&format!("sigma2 = {}\n", self.sigma2));

        out.push_str("\n[utility]\n");
        out.push_str(&format!("alpha = {}\n", self.utility.alpha));
        out.push_str(&format!("kappa = {}\n", self.utility.kappa));
        out.push_str(&format!("horizon = {}\n", self.utility.horizon));

        out.push_str("\n[sim]\n");
        out.push_str(&format!("n_steps = {}\n", self.sim.n_steps));
        out.push_str(&format!("n_paths = {}\n", self.sim.n_paths));
        out.push_str(&format!("master_seed = {}\n", self.sim.master_seed));

        if let Some(strategy) = &self.ruin_strategy {
            out.push_str("\n[ruin]\n");
            out.push_str(&format!("strategy = {}\n", strategy.label()));
        }
        if let Some(table) = &self.table {
            out.push_str("\n[table]\n");
            out.push_str(&format!("x_values = {}\n", join_f64(&table.x_values)));
            let dists: Vec<String> = table.distributions.iter().map(claims_literal).collect();
            out.push_str(&format!("distributions = {}\n", dists.join(", ")));
        }
        if let Some(value) = &self.value {
            out.push_str("\n[value]\n");
            out.push_str(&format!("x_values = {}\n", join_f64(&value.x_values)));
            let labels: Vec<String> = value.strategies.iter().map(|s| s.label()).collect();
            out.push_str(&format!("strategies = {}\n", labels.join(", ")));
            out.push_str(&format!("closed_form = {}\n", value.closed_form));
        }
        if let Some(dpp) = &self.dpp {
            out.push_str("\n[dpp]\n");
            out.push_str(&format!("h = {}\n", dpp.h));
            out.push_str(&format!("candidates = {}\n", join_f64(&dpp.candidates)));
            out.push_str(&format!("n_outer = {}\n", dpp.n_outer));
            out.push_str(&format!("n_inner = {}\n", dpp.n_inner));
        }
        out
    }
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn claims_literal(claims: &ClaimDistribution) -> String {
    match claims {
        ClaimDistribution::Exponential { mean } => format!("exponential({mean})"),
        ClaimDistribution::Pareto { x_m, a } => format!("pareto({x_m}, {a})"),
        ClaimDistribution::Weibull { k, s } => format!("weibull({k}, {s})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
# reference setup
[model]
x0 = 100
rho = 0.3
lambda = 1
claims = exponential(50)

[market]
r = 8.4e-4
mu = 1e-3
sigma2 = 1e-3

[utility]
alpha = 0.2
horizon = 1

[sim]
n_steps = 1000
n_paths = 500
master_seed = 7

[ruin]
strategy = merton

[table]
x_values = 100, 200, 400
distributions = exponential(50), pareto(25, 2), weibull(1, 50)

[value]
x_values = 100, 200
strategies = none, fraction(0.8)
closed_form = true

[dpp]
h = 0.1
candidates = 0, 0.4, 0.8, 1
"#;

    #[test]
    fn full_config_parses_and_resolves_the_premium() {
        let cfg = RunConfig::parse(FULL).unwrap();
        assert_eq!(cfg.model.c, 65.0);
        assert_eq!(cfg.premium, PremiumSpec::Loading(0.3));
        assert_eq!(cfg.utility.kappa, 0.0);
        assert_eq!(cfg.sim.master_seed, 7);
        assert_eq!(cfg.table.as_ref().unwrap().distributions.len(), 3);
        let dpp = cfg.dpp.as_ref().unwrap();
        assert_eq!(dpp.n_outer, 2000);
        assert_eq!(dpp.n_inner, 200);
        assert_eq!(dpp.candidates, vec![0.0, 0.4, 0.8, 1.0]);
    }

    #[test]
    fn echo_is_idempotent() {
        let cfg = RunConfig::parse(FULL).unwrap();
        let once = cfg.canonical();
        let twice = RunConfig::parse(&once).unwrap().canonical();
        assert_eq!(once, twice);
    }

    #[test]
    fn echo_reports_the_derived_premium_as_a_comment() {
        let cfg = RunConfig::parse(FULL).unwrap();
        assert!(cfg.canonical().contains("rho = 0.3  # c = 65\n"));
    }

    #[test]
    fn both_premium_forms_are_rejected_together() {
        let text = FULL.replace("rho = 0.3", "rho = 0.3\nc = 65");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.0.contains("exactly one of c and rho"), "{err}");
    }

    #[test]
    fn missing_premium_is_rejected() {
        let text = FULL.replace("rho = 0.3\n", "");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.0.contains("exactly one of c and rho"), "{err}");
    }

    #[test]
    fn zero_variance_market_is_rejected_by_name() {
        let text = FULL.replace("sigma2 = 1e-3", "sigma2 = 0");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.0.contains("sigma2"), "{err}");
    }

    #[test]
    fn unknown_keys_and_sections_are_rejected() {
        let err = RunConfig::parse(&FULL.replace("[sim]", "[simulate]")).unwrap_err();
        assert!(err.0.contains("unknown section"), "{err}");
        let err = RunConfig::parse(&FULL.replace("lambda = 1", "lambda = 1\nfoo = 2")).unwrap_err();
        assert!(err.0.contains("unknown key 'foo'"), "{err}");
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = RunConfig::parse(&FULL.replace("x0 = 100", "x0 = 100\nx0 = 200")).unwrap_err();
        assert!(err.0.contains("duplicate key 'x0'"), "{err}");
    }

    #[test]
    fn empty_x_list_is_rejected() {
        let text = FULL.replace("x_values = 100, 200, 400", "x_values =");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.0.contains("x_values"), "{err}");
    }

    #[test]
    fn restart_time_past_the_horizon_is_rejected() {
        let text = FULL.replace("h = 0.1", "h = 2");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.0.contains("0 < h < horizon"), "{err}");
    }

    #[test]
    fn parenthesized_list_items_survive_the_comma_split() {
        assert_eq!(
            split_top_level("exponential(50), pareto(25, 2)"),
            vec!["exponential(50)", "pareto(25, 2)"]
        );
        assert_eq!(split_top_level(""), Vec::<&str>::new());
    }

    #[test]
    fn undefined_mean_blocks_the_loading_form() {
        let text = FULL.replace("claims = exponential(50)", "claims = pareto(25, 1)");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(err.0.contains("undefined mean"), "{err}");
    }
}
