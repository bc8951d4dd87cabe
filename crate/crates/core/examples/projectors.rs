//! Local operators of one cell: degrees of freedom, the energy projector,
//! the enhanced L2 projector and the measured Poincare constant.

use nalgebra::DMatrix;
use polystokes::mesh::build_paper_mesh;
use polystokes::polybasis::{default_exactness, vector_dim};
use polystokes::vem::LocalSpace;

fn main() -> polystokes::Result<()> {
    let mesh = build_paper_mesh(1);
    let cell = (0..mesh.num_cells()).max_by_key(|&c| mesh.cell(c).len()).unwrap_or(0);
    for k in 2..=4 {
        let s = LocalSpace::new(&mesh, cell, k, default_exactness(k))?;
        let n = vector_dim(k);
        let id = DMatrix::<f64>::identity(n, n);
        let dofs = s.polynomial_dofs();
        let grad = (s.gradient_projector() * dofs - &id).amax();
        let l2 = (s.l2_projector(k, true)? * dofs - id).amax();
        println!(
            "cell {cell} ({} sides), k={k}: {} dofs, Pi_grad defect {grad:.1e}, pi_k defect {l2:.1e}, Poincare {:.3}",
            s.points.len(),
            s.ndof(),
            s.poincare_constant()
        );
    }
    Ok(())
}
