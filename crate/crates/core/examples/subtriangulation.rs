//! Subtriangulates every cell of the coarsest mesh and reports how each cell
//! was split.

use polystokes::mesh::{build_paper_mesh, subtriangulate};

fn main() -> polystokes::Result<()> {
    let mesh = build_paper_mesh(0);
    let mut fans = 0;
    let mut stars = 0;
    for c in 0..mesh.num_cells() {
        let sub = subtriangulate(&mesh, c)?;
        let areas = sub.areas();
        let total: f64 = areas.iter().sum();
        let smallest = areas.iter().copied().fold(f64::INFINITY, f64::min);
        match sub.star {
            Some(p) => {
                stars += 1;
                println!("cell {c:>2}: {} sides, star point ({:.4}, {:.4})", mesh.cell(c).len(), p[0], p[1]);
            }
            None => {
                fans += 1;
                println!("cell {c:>2}: {} sides, fan from local vertex {}", mesh.cell(c).len(), sub.apex);
            }
        }
        println!(
            "         {} triangles, area defect {:.1e}, smallest/cell area {:.3}",
            sub.triangles.len(),
            (total - mesh.geometry(c).area).abs(),
            smallest / total
        );
    }
    println!("{fans} fans, {stars} star points");
    Ok(())
}
