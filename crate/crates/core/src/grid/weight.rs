use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{greens_function, DomainGrid, GridField};
use crate::error::{Result, TodaError};

/// A conic singularity `−4πα·G(·, p)` in the weight exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularSource {
    pub x: f64,
    pub y: f64,
    pub alpha: f64,
}

impl SingularSource {
    pub fn new(x: f64, y: f64, alpha: f64) -> Result<Self> {
        let s = SingularSource { x, y, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(TodaError::NonPositiveAlpha(self.alpha));
        }
        if !(self.x > 0.0 && self.x < 1.0 && self.y > 0.0 && self.y < 1.0) {
            return Err(TodaError::PointOutside(self.x, self.y));
        }
        Ok(())
    }
}

/// Regular part `f` of the weight exponent.
///
/// Only `Zero` and convex quadratics are checked to be subharmonic; `Nodes`
/// values are taken as given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum FPreset {
    Zero,
    /// `c·|x − x₀|²` with `c ≥ 0`.
    Quadratic { c: f64, center: [f64; 2] },
    /// Raw interior node values in flat index order.
    Nodes { values: Vec<f64> },
}

impl Default for FPreset {
    fn default() -> Self {
        FPreset::Zero
    }
}

impl FPreset {
    pub fn validate(&self) -> Result<()> {
        match self {
            FPreset::Zero => Ok(()),
            FPreset::Quadratic { c, center } => {
                if !(*c >= 0.0 && c.is_finite()) {
                    return Err(TodaError::Precondition(format!(
                        "quadratic weight coefficient must be finite and >= 0, got {c}"
                    )));
                }
                if !center.iter().all(|v| v.is_finite()) {
                    return Err(TodaError::Precondition("quadratic center must be finite".into()));
                }
                Ok(())
            }
            FPreset::Nodes { values } => {
                if values.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(TodaError::Precondition("f node values must be finite".into()))
                }
            }
        }
    }

    pub fn sample(&self, grid: &DomainGrid) -> Result<GridField> {
        self.validate()?;
        match self {
            FPreset::Zero => Ok(GridField::zeros(grid)),
            FPreset::Quadratic { c, center } => Ok(GridField::from_fn(grid, |x, y| {
                c * ((x - center[0]).powi(2) + (y - center[1]).powi(2))
            })),
            FPreset::Nodes { values } => {
                if values.len() != grid.len() {
                    return Err(TodaError::Dimension(format!(
                        "f has {} node values, grid has {}",
                        values.len(),
                        grid.len()
                    )));
                }
                Ok(GridField::dirichlet(values.clone()))
            }
        }
    }
}

/// `h = exp(f − 4π Σⱼ αⱼ G(·, pⱼ))` on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightField {
    pub h_values: GridField,
    pub f: GridField,
    /// Sources with coordinates snapped to their grid node.
    pub sources: Vec<SingularSource>,
    pub source_nodes: Vec<usize>,
}

impl WeightField {
    /// `h ≡ 1`.
    pub fn uniform(grid: &DomainGrid) -> Self {
        WeightField {
            h_values: GridField::constant(grid, 1.0),
            f: GridField::zeros(grid),
            sources: Vec::new(),
            source_nodes: Vec::new(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.h_values.values
    }
}

/// Assembles the weight. At a source node `h` is set to its limit value 0.
pub fn assemble_weight(
    grid: &DomainGrid,
    f: &FPreset,
    sources: &[SingularSource],
) -> Result<WeightField> {
    for s in sources {
        s.validate()?;
    }
    let f_field = f.sample(grid)?;
    let greens: Vec<GridField> = sources
        .par_iter()
        .map(|s| greens_function(grid, (s.x, s.y)))
        .collect::<Result<_>>()?;
    let mut exponent = f_field.values.clone();
    for (s, g) in sources.iter().zip(&greens) {
        for (e, gv) in exponent.iter_mut().zip(&g.values) {
            *e -= 4.0 * PI * s.alpha * gv;
        }
    }
    let mut h: Vec<f64> = exponent.iter().map(|e| e.exp()).collect();
    let mut snapped = Vec::with_capacity(sources.len());
    let mut nodes = Vec::with_capacity(sources.len());
    for s in sources {
        let k = grid.nearest_node(s.x, s.y)?;
        h[k] = 0.0;
        let (x, y) = grid.coords(k);
        snapped.push(SingularSource {
            x,
            y,
            alpha: s.alpha,
        });
        nodes.push(k);
    }
    let mass = grid.integrate(&h);
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(TodaError::Precondition(format!(
            "weight integrates to {mass:e}; need a positive finite mass"
        )));
    }
    Ok(WeightField {
        h_values: GridField::dirichlet(h),
        f: f_field,
        sources: snapped,
        source_nodes: nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_sources_flat_weight() {
        let g = DomainGrid::new(15).unwrap();
        let w = assemble_weight(&g, &FPreset::Zero, &[]).unwrap();
        assert!(w.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn two_half_sources_vanish_at_both() {
        let g = DomainGrid::new(31).unwrap();
        let sources = [
            SingularSource::new(0.25, 0.5, 0.5).unwrap(),
            SingularSource::new(0.75, 0.5, 0.5).unwrap(),
        ];
        let w = assemble_weight(&g, &FPreset::Zero, &sources).unwrap();
        for &k in &w.source_nodes {
            assert_eq!(w.values()[k], 0.0);
        }
        let positive = w.values().iter().filter(|&&v| v > 0.0).count();
        assert_eq!(positive, g.len() - 2);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            SingularSource::new(0.5, 0.5, -1.0),
            Err(TodaError::NonPositiveAlpha(_))
        ));
        assert!(SingularSource::new(0.5, 0.5, 0.0).is_err());
        assert!(SingularSource::new(1.5, 0.5, 1.0).is_err());
        let g = DomainGrid::new(7).unwrap();
        let bad = FPreset::Quadratic {
            c: -1.0,
            center: [0.5, 0.5],
        };
        assert!(assemble_weight(&g, &bad, &[]).is_err());
        let short = FPreset::Nodes { values: vec![0.0; 3] };
        assert!(assemble_weight(&g, &short, &[]).is_err());
    }

    #[test]
    fn quadratic_preset() {
        let g = DomainGrid::new(15).unwrap();
        let f = FPreset::Quadratic {
            c: 2.0,
            center: [0.5, 0.5],
        };
        let w = assemble_weight(&g, &f, &[]).unwrap();
        let k = g.nearest_node(0.5, 0.5).unwrap();
        assert!((w.values()[k] - 1.0).abs() < 1e-15);
        assert!(w.values().iter().all(|&v| v >= 1.0));
    }
}
