use super::{DomainGrid, GridField};
use crate::error::Result;

/// Discrete Green's function `−ΔₕG = δₚʰ`, `G = 0` on `∂Ω`.
///
/// The source point is snapped to the nearest interior node and the
/// discrete delta carries unit mass, `δₚʰ = 1/h²` at that node.
pub fn greens_function(grid: &DomainGrid, p: (f64, f64)) -> Result<GridField> {
    let node = grid.nearest_node(p.0, p.1)?;
    let h = grid.h();
    let mut rhs = vec![0.0; grid.len()];
    rhs[node] = 1.0 / (h * h);
    grid.poisson_solve(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonnegative_and_unit_mass() {
        let g = DomainGrid::new(31).unwrap();
        let green = greens_function(&g, (0.3, 0.6)).unwrap();
        assert!(green.values.iter().all(|&v| v >= 0.0));
        let lap = g.laplacian(&green);
        assert!((g.integrate(&lap.values) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn symmetric_in_its_arguments() {
        let g = DomainGrid::new(31).unwrap();
        let pts = [(0.25, 0.25), (0.5, 0.75), (0.125, 0.875), (0.5, 0.5)];
        let fields: Vec<_> = pts.iter().map(|&p| greens_function(&g, p).unwrap()).collect();
        for (a, pa) in pts.iter().enumerate() {
            for (b, pb) in pts.iter().enumerate() {
                let ga_at_b = fields[a].values[g.nearest_node(pb.0, pb.1).unwrap()];
                let gb_at_a = fields[b].values[g.nearest_node(pa.0, pa.1).unwrap()];
                assert!((ga_at_b - gb_at_a).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn boundary_point_rejected() {
        let g = DomainGrid::new(15).unwrap();
        assert!(greens_function(&g, (1.0, 0.5)).is_err());
    }
}
