use std::collections::BTreeMap;
use std::path::Path;

use qel_core::exact::{q, q_frac};
use qel_core::toric::Facet;
use qel_core::{DelzantPolytope, Perturbation, TorusGenerator};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const TASKS: [&str; 10] = ["balance", "bergman", "equiv-rr", "df", "relative-df", "inner", "fit", "futaki", "limit-weight", "chow"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub polytope: PolytopeSpec,
    /// `"a,b" → c` adds `c xᵃ yᵇ` to the canonical potential.
    #[serde(default)]
    pub perturbation: BTreeMap<String, f64>,
    #[serde(default)]
    pub k: Option<u32>,
    /// Inclusive `[lo, hi]`.
    #[serde(default)]
    pub k_range: Option<[u32; 2]>,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub start: StartSpec,
    #[serde(default)]
    pub multi_start: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub seed: u64,
    /// Generator for single-action tasks; the first coordinate axis if absent.
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    /// Named generators for the inner-product table.
    #[serde(default)]
    pub generators: BTreeMap<String, GeneratorSpec>,
    /// Test direction for `limit-weight`; the extremal generator if absent.
    #[serde(default)]
    pub beta: Option<GeneratorSpec>,
    /// Fixed-A mode: `A = a_scale · 2π · centred weights`; the moment-condition generator if absent.
    #[serde(default)]
    pub a_generator: Option<GeneratorSpec>,
    #[serde(default = "one")]
    pub a_scale: f64,
    /// Half-width of the integer direction grid scanned by `relative-df`.
    #[serde(default = "scan_default")]
    pub scan_bound: i64,
    #[serde(default)]
    pub tasks: Vec<String>,
    #[serde(default)]
    pub output: Option<String>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn one() -> f64 {
    1.0
}

fn scan_default() -> i64 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<FacetSpec>>,
}

/// Half-space `⟨normal, x⟩ + offset ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetSpec {
    pub normal: Vec<i64>,
    pub offset: i64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    #[default]
    Plain,
    TOperator,
    FixedA,
    SelfConsistent,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartSpec {
    #[default]
    Hilb,
    Identity,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub descent: f64,
    pub max_iter: usize,
    pub outer: f64,
    pub max_outer: usize,
    pub certificate: f64,
    pub span: f64,
    pub compare: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { descent: 1e-8, max_iter: 2000, outer: 1e-7, max_outer: 6, certificate: 1e-8, span: 1e-6, compare: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub order: usize,
    pub angular: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { order: 64, angular: 1 }
    }
}

/// Either `"extremal"`, `"extremal-perp"`, or an explicit `{lambda, shift}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Named(String),
    Explicit(ExplicitGenerator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGenerator {
    pub lambda: Vec<i64>,
    /// Rational `"p/q"` or integer string; zero if absent.
    #[serde(default)]
    pub shift: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks everything that can be checked without numerics.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        let p = self.polytope()?;
        self.perturbation()?;
        self.k_list()?;
        for t in &self.tasks {
            if !TASKS.contains(&t.as_str()) {
                return Err(CliError::Config(format!("unknown task {t:?}")));
            }
        }
        if self.quadrature.order < 2 || self.quadrature.angular < 1 {
            return Err(CliError::Config("quadrature order must be >= 2 and angular >= 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in
            [("descent", t.descent), ("outer", t.outer), ("certificate", t.certificate), ("span", t.span), ("compare", t.compare)]
        {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerance {name} must be positive")));
            }
        }
        if !self.a_scale.is_finite() || self.scan_bound < 1 {
            return Err(CliError::Config("a_scale must be finite and scan_bound >= 1".into()));
        }
        for g in self.generator.iter().chain(self.beta.iter()).chain(self.a_generator.iter()).chain(self.generators.values()) {
            check_generator(g, p.dim())?;
        }
        Ok(())
    }

    pub fn polytope(&self) -> Result<DelzantPolytope, CliError> {
        match (&self.polytope.preset, &self.polytope.facets) {
            (Some(name), None) => match name.as_str() {
                "P1" | "p1" => Ok(DelzantPolytope::projective_line()),
                "P1xP1" | "p1xp1" => Ok(DelzantPolytope::product_of_lines()),
                "F1" | "f1" => Ok(DelzantPolytope::hirzebruch_f1()),
                other => Err(CliError::Config(format!("unknown polytope preset {other:?}"))),
            },
            (None, Some(facets)) => {
                let dim = facets.first().map(|f| f.normal.len()).ok_or_else(|| CliError::Config("no facets".into()))?;
                let fs = facets.iter().map(|f| Facet::integral(f.normal.clone(), f.offset)).collect();
                DelzantPolytope::new(dim, fs).map_err(|e| CliError::Config(format!("polytope: {e}")))
            }
            _ => Err(CliError::Config("polytope needs exactly one of preset or facets".into())),
        }
    }

    pub fn perturbation(&self) -> Result<Perturbation, CliError> {
        let mut terms = Vec::with_capacity(self.perturbation.len());
        for (key, &c) in &self.perturbation {
            let parts: Vec<&str> = key.split(',').map(str::trim).collect();
            let parse = |s: &str| {
                s.parse::<u32>().map_err(|_| CliError::Config(format!("perturbation exponent {key:?} is not a pair of integers")))
            };
            let e = match parts.as_slice() {
                [a] => [parse(a)?, 0],
                [a, b] => [parse(a)?, parse(b)?],
                _ => return Err(CliError::Config(format!("perturbation key {key:?} must be \"a\" or \"a,b\""))),
            };
            if !c.is_finite() {
                return Err(CliError::Config(format!("perturbation coefficient for {key:?} is not finite")));
            }
            terms.push((e, c));
        }
        Ok(Perturbation { terms })
    }

    pub fn k_list(&self) -> Result<Vec<u32>, CliError> {
        match (self.k, self.k_range) {
            (Some(k), None) if k >= 1 => Ok(vec![k]),
            (None, Some([lo, hi])) if 1 <= lo && lo <= hi => Ok((lo..=hi).collect()),
            (None, None) => Err(CliError::Config("one of k or k_range is required".into())),
            (Some(_), Some(_)) => Err(CliError::Config("give k or k_range, not both".into())),
            _ => Err(CliError::Config("k must be >= 1 and k_range an increasing pair".into())),
        }
    }

    /// Physical content only: two runs differing here are not comparable.
    pub fn physics_key(&self) -> serde_json::Value {
        serde_json::json!({
            "polytope": self.polytope,
            "perturbation": self.perturbation,
            "k": self.k,
            "k_range": self.k_range,
            "mode": self.mode,
            "generator": self.generator,
            "generators": self.generators,
            "beta": self.beta,
            "a_generator": self.a_generator,
            "a_scale": self.a_scale,
            "scan_bound": self.scan_bound,
        })
    }
}

fn check_generator(g: &GeneratorSpec, dim: usize) -> Result<(), CliError> {
    match g {
        GeneratorSpec::Named(n) if n == "extremal" || n == "extremal-perp" => Ok(()),
        GeneratorSpec::Named(n) => Err(CliError::Config(format!("unknown generator name {n:?}"))),
        GeneratorSpec::Explicit(e) => {
            if e.lambda.len() != dim {
                return Err(CliError::Config(format!("generator lambda has {} entries, polytope dimension is {dim}", e.lambda.len())));
            }
            if let Some(s) = &e.shift {
                parse_rational(s)?;
            }
            Ok(())
        }
    }
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<qel_core::exact::Q, CliError> {
    let bad = || CliError::Config(format!("{s:?} is not a rational number"));
    match s.split_once('/') {
        None => s.trim().parse::<i64>().map(q).map_err(|_| bad()),
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(q_frac(n, d))
        }
    }
}

pub fn explicit_generator(e: &ExplicitGenerator) -> Result<TorusGenerator, CliError> {
    let g = TorusGenerator::from_integers(&e.lambda);
    Ok(match &e.shift {
        Some(s) => g.with_shift(parse_rational(s)?),
        None => g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ExperimentConfig, CliError> {
        let c: ExperimentConfig = serde_json::from_str(s).map_err(|e| CliError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn minimal_config() {
        let c = parse(r#"{"polytope": {"preset": "P1"}, "k": 3}"#).unwrap();
        assert_eq!(c.k_list().unwrap(), vec![3]);
        assert_eq!(c.mode, ModeSpec::Plain);
        assert_eq!(c.quadrature.order, 64);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(parse(r#"{"polytope": {"preset": "P1"}, "k": 3, "colour": 1}"#).is_err());
        assert!(parse(r#"{"polytope": {"preset": "P1"}, "k": 3, "tolerances": {"descnet": 1e-3}}"#).is_err());
    }

    #[test]
    fn rejects_bad_facets_and_ranges() {
        let bad = r#"{"polytope": {"facets": [{"normal": [2], "offset": 0}, {"normal": [-1], "offset": 1}]}, "k": 2}"#;
        assert!(matches!(parse(bad), Err(CliError::Config(_))));
        assert!(parse(r#"{"polytope": {"preset": "P1"}, "k_range": [4, 2]}"#).is_err());
        assert!(parse(r#"{"polytope": {"preset": "P1"}, "k": 2, "k_range": [1, 2]}"#).is_err());
        assert!(parse(r#"{"polytope": {"preset": "P1"}, "k": 2, "perturbation": {"x": 0.1}}"#).is_err());
    }

    #[test]
    fn generators_and_rationals() {
        let c =
            parse(r#"{"polytope": {"preset": "F1"}, "k": 3, "generator": {"lambda": [0, 1], "shift": "-1/2"}, "beta": "extremal-perp"}"#)
                .unwrap();
        match c.generator.unwrap() {
            GeneratorSpec::Explicit(e) => assert_eq!(explicit_generator(&e).unwrap().shift, q_frac(-1, 2)),
            other => panic!("{other:?}"),
        }
        assert!(parse(r#"{"polytope": {"preset": "F1"}, "k": 3, "generator": {"lambda": [1]}}"#).is_err());
        assert!(parse_rational("3/0").is_err());
    }

    #[test]
    fn perturbation_keys() {
        let c = parse(r#"{"polytope": {"preset": "P1"}, "k": 2, "perturbation": {"2": 0.1, "3": -0.2, "4": 0.1}}"#).unwrap();
        assert_eq!(c.perturbation().unwrap(), Perturbation::bump_1d(0.1));
    }
}
