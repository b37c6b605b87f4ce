//! Kernel values, closed forms and a small Gram matrix.

use gpbandit::kernels::{gram_matrix, KernelSpec};
use gpbandit::Points;

fn main() -> gpbandit::Result<()> {
    let kernels = [
        KernelSpec::squared_exponential(0.25)?,
        KernelSpec::matern(0.5, 0.25)?,
        KernelSpec::matern(1.5, 0.25)?,
        KernelSpec::matern(2.5, 0.25)?,
    ];
    println!(
        "{:<22} {:>10} {:>10} {:>10}",
        "kernel", "r=0.1", "r=0.25", "r=0.5"
    );
    for k in &kernels {
        let at = |r: f64| k.eval(&[0.0, 0.0], &[r, 0.0]);
        println!(
            "{:<22} {:>10.6} {:>10.6} {:>10.6}",
            k.to_string(),
            at(0.1),
            at(0.25),
            at(0.5)
        );
    }

    let pts = Points::from_rows(2, [[0.0, 0.0], [0.25, 0.0], [0.5, 0.5]]);
    let g = gram_matrix(&kernels[0], &pts);
    println!("\nSE Gram matrix on {} points:", pts.len());
    for i in 0..g.rows() {
        let row: Vec<String> = g.row(i).iter().map(|v| format!("{v:.6}")).collect();
        println!("  [{}]", row.join(", "));
    }
    println!(
        "\nconfig JSON: {}",
        serde_json::to_string(&kernels[2]).unwrap()
    );
    Ok(())
}
