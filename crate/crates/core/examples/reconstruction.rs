//! Reconstructs a virtual element velocity in Raviart-Thomas spaces of order
//! 0 and 1 and compares the divergence of the result with that of the
//! original field.

use nalgebra::DVector;
use polystokes::mesh::build_paper_mesh;
use polystokes::polybasis::default_exactness;
use polystokes::reconstruction::Reconstruction;
use polystokes::vem::LocalSpace;

fn main() -> polystokes::Result<()> {
    let mesh = build_paper_mesh(0);
    let k = 2;
    for m in 0..=1 {
        let mut worst: f64 = 0.0;
        let mut dims = (0, 0);
        for c in 0..mesh.num_cells() {
            let s = LocalSpace::new(&mesh, c, k, default_exactness(k))?;
            let r = Reconstruction::new(&s, m, default_exactness(k))?;
            let v = DVector::from_fn(s.ndof(), |i, _| (1.3 * i as f64 + c as f64).cos());
            let w = r.apply(&v);
            let div = s.divergence_from_dofs(&v);
            let frame = s.domain.frame;
            for t in 0..r.rt.triangles.len() {
                let got = r.rt.divergence_coefficients(&w, t);
                let want = r.rt.project_scalar(t, |x| frame.eval_poly(k - 1, div.as_slice(), x));
                worst = worst.max((got - want).amax());
            }
            dims = (dims.0 + r.rt.ndof(), dims.1 + r.rank);
        }
        println!("RT order {m}: {} local RT unknowns, {} active constraints, divergence defect {worst:.2e}", dims.0, dims.1);
    }
    Ok(())
}
