use serde::{Deserialize, Serialize};

use super::RadialGrid;
use crate::error::{Error, Result};

/// A radial potential `V(|x|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant { value: f64 },
    /// One value per grid node.
    RadialTable { values: Vec<f64> },
    /// A named closed form:
    /// - `"rational"`: `a + b/(1 + r²)` with `params = [a, b]`
    /// - `"gaussian"`: `a + b·exp(−r²/w²)` with `params = [a, b, w]`
    Formula { id: String, params: Vec<f64> },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Constant { value: 1.0 }
    }
}

/// A potential sampled on a grid, together with its infimum `V0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    values: Vec<f64>,
    v0: f64,
}

impl PotentialSpec {
    pub fn constant(value: f64) -> Self {
        PotentialSpec::Constant { value }
    }

    /// Samples `V` on the grid and checks `V0 = inf V > 0`.
    pub fn sample(&self, grid: &RadialGrid) -> Result<Potential> {
        let values: Vec<f64> = match self {
            PotentialSpec::Constant { value } => vec![*value; grid.len()],
            PotentialSpec::RadialTable { values } => {
                if values.len() != grid.len() {
                    return Err(Error::Grid(format!(
                        "potential table has {} values for {} nodes",
                        values.len(),
                        grid.len()
                    )));
                }
                values.clone()
            }
            PotentialSpec::Formula { id, params } => {
                let f: Box<dyn Fn(f64) -> f64> = match (id.as_str(), params.as_slice()) {
                    ("rational", &[a, b]) => Box::new(move |r: f64| a + b / (1.0 + r * r)),
                    ("gaussian", &[a, b, w]) => Box::new(move |r: f64| a + b * (-(r * r) / (w * w)).exp()),
                    _ => {
                        return Err(Error::Domain(format!(
                            "unknown potential formula '{id}' with {} parameters",
                            params.len()
                        )))
                    }
                };
                grid.nodes().iter().map(|&r| f(r)).collect()
            }
        };
        let v0 = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(v0 > 0.0) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("V0 = inf V > 0", v0));
        }
        Ok(Potential { values, v0 })
    }
}

impl Potential {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.v0)
    }
}
