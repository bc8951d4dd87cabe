//! Builds the first levels of the polygonal mesh family, prints their sizes
//! and shape indicators, and writes level 1 to a temporary file.

use polystokes::mesh::{build_paper_mesh, check_shape_regularity, load_mesh, save_mesh};
use polystokes::stokes::Discretization;

fn main() -> polystokes::Result<()> {
    println!("level  cells  vertices  edges  ndof(k=2)  h        gamma1  gamma2");
    for level in 0..=3 {
        let mesh = build_paper_mesh(level);
        let report = check_shape_regularity(&mesh);
        let (nc, nv, ne, h) = (mesh.num_cells(), mesh.num_vertices(), mesh.num_edges(), mesh.h());
        let ndof = Discretization::new(mesh, 2, None)?.ndof();
        println!(
            "{level:>5}  {nc:>5}  {nv:>8}  {ne:>5}  {ndof:>9}  {h:.4}  {:.3}   {:.3}",
            report.min_gamma1(),
            report.min_gamma2()
        );
    }

    let path = std::env::temp_dir().join("polystokes_level1.txt");
    let mesh = build_paper_mesh(1);
    save_mesh(&mesh, &path)?;
    let back = load_mesh(&path)?;
    println!("wrote {} ({} cells, identical after reload: {})", path.display(), back.num_cells(), back.cells() == mesh.cells());
    Ok(())
}
