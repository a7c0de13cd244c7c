//! Assemble the P1 system for a layered coefficient and solve it directly.
//!
//! cargo run --release --example poisson_direct

use hemdd::prelude::*;

fn main() -> hemdd::Result<()> {
    let mesh = Mesh::structured(32)?;
    let layers = vec![Inclusion {
        rect: Rect::new(0.0, 1.0, 0.25, 0.5),
        value: 1e4,
    }];
    let field = CoefficientField::from_inclusions(&mesh, 1.0, &layers)?;
    let a = assemble_stiffness(&mesh, &field)?;
    let b = assemble_load(&mesh, 1.0);
    let system = apply_dirichlet(&a, &b, &mesh);
    println!("nodes {}, interior dofs {}, nnz {}", mesh.num_nodes(), system.size(), system.a.nnz());

    let u = SpdFactorization::new(&system.a)?.solve(&system.b);
    let au = system.a.spmv(&u)?;
    let res: f64 = au.iter().zip(&system.b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    println!("direct residual {res:.2e}");

    // the layer touches the walls, so it pins the solution near zero
    let n = mesh.n();
    for row in (0..=n).step_by(4) {
        let node = mesh.node_id(n / 2, row);
        let value = mesh.dof(node).map_or(0.0, |d| u[d]);
        println!("y = {:.3}  u = {value:.5}", row as f64 / n as f64);
    }
    Ok(())
}
