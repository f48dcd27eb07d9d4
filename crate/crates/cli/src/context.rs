use qel_core::exact::Q;
use qel_core::stability::{extremal_normalisation, inner_product, ExtremalData};
use qel_core::{DelzantPolytope, LevelData, PotentialModel, QuadratureRule, TorusGenerator};

use crate::config::{explicit_generator, ExperimentConfig, GeneratorSpec};
use crate::error::CliError;

/// Everything a task needs, built once per run.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub polytope: DelzantPolytope,
    pub model: PotentialModel,
    pub quad: QuadratureRule,
    pub k_list: Vec<u32>,
    /// Levels used by the exact polynomial fits.
    pub exact_levels: Vec<u32>,
    pub config_hash: String,
}

impl Context {
    pub fn new(cfg: ExperimentConfig, config_hash: String) -> Result<Self, CliError> {
        let polytope = cfg.polytope()?;
        let pert = cfg.perturbation()?;
        if pert.terms.iter().any(|(e, _)| polytope.dim() == 1 && e[1] != 0) {
            return Err(CliError::Config("perturbation uses y on a one-dimensional polytope".into()));
        }
        let quad = QuadratureRule::new(&polytope, cfg.quadrature.order, cfg.quadrature.angular);
        let model = PotentialModel::new(polytope.clone(), pert, &quad).map_err(|e| CliError::Config(format!("perturbation: {e}")))?;
        let k_list = cfg.k_list()?;
        let exact_levels = (1..=polytope.dim() as u32 + 6).collect();
        Ok(Self { cfg, polytope, model, quad, k_list, exact_levels, config_hash })
    }

    pub fn level(&self, k: u32) -> Result<LevelData, CliError> {
        Ok(LevelData::new(&self.model, &self.quad, k)?)
    }

    pub fn extremal(&self) -> Result<ExtremalData, CliError> {
        Ok(extremal_normalisation(&self.polytope, &self.exact_levels)?)
    }

    fn axis(&self, i: usize) -> TorusGenerator {
        let mut l = vec![0; self.polytope.dim()];
        l[i] = 1;
        TorusGenerator::from_integers(&l)
    }

    pub fn resolve(&self, spec: &GeneratorSpec) -> Result<TorusGenerator, CliError> {
        match spec {
            GeneratorSpec::Explicit(e) => explicit_generator(e),
            GeneratorSpec::Named(n) if n == "extremal" => Ok(self.extremal()?.chi),
            GeneratorSpec::Named(n) if n == "extremal-perp" => {
                let chi = self.extremal()?.chi;
                if chi.is_zero() {
                    return Ok(self.axis(0));
                }
                // The coordinate axis least aligned with χ, minus its projection.
                let norm = inner_product(&self.polytope, &chi, &chi, &self.exact_levels)?;
                let mut best: Option<(f64, TorusGenerator)> = None;
                for i in 0..self.polytope.dim() {
                    let e = self.axis(i);
                    let c = inner_product(&self.polytope, &e, &chi, &self.exact_levels)?;
                    let perp = e.add(&chi.scaled(&(-(c / &norm))));
                    let size = qel_core::exact::to_f64(&inner_product(&self.polytope, &perp, &perp, &self.exact_levels)?);
                    if best.as_ref().is_none_or(|(s, _)| size > *s) {
                        best = Some((size, perp));
                    }
                }
                Ok(best.map(|b| b.1).unwrap_or_else(|| TorusGenerator::zero(self.polytope.dim())))
            }
            GeneratorSpec::Named(n) => Err(CliError::Config(format!("unknown generator name {n:?}"))),
        }
    }

    /// The configured generator, or the first coordinate axis.
    pub fn generator(&self) -> Result<TorusGenerator, CliError> {
        match &self.cfg.generator {
            Some(s) => self.resolve(s),
            None => Ok(self.axis(0)),
        }
    }

    /// Named generators for the inner-product table; the axes and the
    /// extremal generator when none are configured.
    pub fn generator_table(&self) -> Result<Vec<(String, TorusGenerator)>, CliError> {
        if !self.cfg.generators.is_empty() {
            return self.cfg.generators.iter().map(|(n, s)| Ok((n.clone(), self.resolve(s)?))).collect();
        }
        let mut out: Vec<(String, TorusGenerator)> = (0..self.polytope.dim()).map(|i| (format!("e{}", i + 1), self.axis(i))).collect();
        let chi = self.extremal()?.chi;
        if !chi.is_zero() {
            out.push(("extremal".into(), chi));
        }
        Ok(out)
    }
}

pub fn q_string(x: &Q) -> String {
    x.to_string()
}
