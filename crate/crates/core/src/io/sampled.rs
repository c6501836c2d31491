use std::fs;
use std::path::Path;
use std::sync::Arc;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{CliError, CliResult};
use crate::error::{Error, Result};
use crate::riesz::{Domain, DomainPartition, RationalOrder, TriDomainFunction, TriDomainGrid};

/// Matching defects above this are reported, above [`REJECT_MATCHING`] refused.
const WARN_MATCHING: f64 = 1e-8;
const REJECT_MATCHING: f64 = 1e-4;

/// On-disk form of a [`TriDomainFunction`]: node values on the Chebyshev
/// grids of the declared degrees, traces `u|x|^{1+α}` in the outer domains,
/// node 0 of each outer array at the finite boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledFunction {
    pub p: u32,
    pub q: u32,
    pub a: f64,
    pub b: f64,
    /// Quadrature threshold; optional, it does not affect the representation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(rename = "N_I")]
    pub n_left: usize,
    #[serde(rename = "N_II")]
    pub n_middle: usize,
    #[serde(rename = "N_III")]
    pub n_right: usize,
    #[serde(rename = "uI")]
    pub left: Vec<f64>,
    #[serde(rename = "uII")]
    pub middle: Vec<f64>,
    #[serde(rename = "uIII")]
    pub right: Vec<f64>,
}

impl SampledFunction {
    pub fn from_function(u: &TriDomainFunction) -> Self {
        let grid = u.grid();
        let part = grid.partition();
        Self {
            p: grid.order().p(),
            q: grid.order().q(),
            a: part.a,
            b: part.b,
            delta: Some(part.delta),
            n_left: part.n_left,
            n_middle: part.n_middle,
            n_right: part.n_right,
            left: u.values(Domain::Left).to_vec(),
            middle: u.values(Domain::Middle).to_vec(),
            right: u.values(Domain::Right).to_vec(),
        }
    }

    /// Validates the document and builds the function.
    pub fn into_function(self) -> Result<TriDomainFunction> {
        let order = RationalOrder::new(self.p, self.q)?;
        let delta = self
            .delta
            .unwrap_or_else(|| 1e-2f64.min(0.5 * self.a.abs().min(self.b).min(1.0)));
        let part = DomainPartition::new(self.a, self.b, delta, self.n_left, self.n_middle, self.n_right)?;
        for (name, values, n) in [
            ("uI", &self.left, self.n_left),
            ("uII", &self.middle, self.n_middle),
            ("uIII", &self.right, self.n_right),
        ] {
            if values.len() != n + 1 {
                return Err(Error::Input(format!(
                    "{name} holds {} values, degree {n} needs {}",
                    values.len(),
                    n + 1
                )));
            }
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Input(format!("{name}[{i}] is not finite")));
            }
        }
        let grid = Arc::new(TriDomainGrid::new(order, part)?);
        let u = TriDomainFunction::from_parts(grid, self.left, self.middle, self.right)?;
        let (at_a, at_b) = u.matching_defect();
        let worst = at_a.max(at_b);
        if worst > REJECT_MATCHING {
            return Err(Error::Input(format!(
                "outer traces do not match the middle values (relative defect {at_a:.2e} at a, {at_b:.2e} at b)"
            )));
        }
        if worst > WARN_MATCHING {
            warn!("outer traces match the middle values only to {worst:.2e}");
        }
        Ok(u)
    }
}

pub fn parse_sampled_function(text: &str) -> Result<TriDomainFunction> {
    let doc: SampledFunction = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    doc.into_function()
}

pub fn load_sampled_function(path: &Path) -> CliResult<TriDomainFunction> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_sampled_function(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn save_sampled_function(u: &TriDomainFunction, path: &Path) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&SampledFunction::from_function(u)).expect("plain data serialises");
    fs::write(path, text).map_err(CliError::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::Builtin;

    fn lorentz() -> TriDomainFunction {
        let part = DomainPartition::uniform(-2.0, 2.0, 1e-2, 24).unwrap();
        let grid = Arc::new(TriDomainGrid::new(RationalOrder::new(1, 2).unwrap(), part).unwrap());
        Builtin::Lorentz.sample(grid)
    }

    #[test]
    fn text_round_trip_is_exact() {
        let u = lorentz();
        let text = serde_json::to_string(&SampledFunction::from_function(&u)).unwrap();
        let back = parse_sampled_function(&text).unwrap();
        assert_eq!(back.stacked(), u.stacked());
        assert_eq!(back.grid().partition(), u.grid().partition());
    }

    #[test]
    fn rejects_bad_documents() {
        let mut doc = SampledFunction::from_function(&lorentz());
        doc.middle.pop();
        assert!(matches!(doc.into_function(), Err(Error::Input(_))));

        let mut doc = SampledFunction::from_function(&lorentz());
        doc.left[0] *= 1.01;
        assert!(doc.into_function().unwrap_err().to_string().contains("do not match"));

        // small mismatches only warn
        let mut doc = SampledFunction::from_function(&lorentz());
        doc.right[0] *= 1.0 + 1e-6;
        assert!(doc.into_function().is_ok());

        let mut doc = SampledFunction::from_function(&lorentz());
        doc.q = 4;
        doc.p = 2;
        assert!(matches!(doc.into_function(), Err(Error::InvalidOrder(_))));

        assert!(parse_sampled_function("{\"p\": 1}").is_err());
    }

    #[test]
    fn missing_delta_gets_a_default() {
        let mut doc = SampledFunction::from_function(&lorentz());
        doc.delta = None;
        let u = doc.into_function().unwrap();
        assert_eq!(u.grid().partition().delta, 1e-2);
    }
}
