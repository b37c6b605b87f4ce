//! Conditioning a noise-free GP on observations, including a repeated query.

use gpbandit::gp::{Extension, History};
use gpbandit::KernelSpec;

fn main() -> gpbandit::Result<()> {
    let spec = KernelSpec::matern(2.5, 0.25)?;
    let f = |x: &[f64]| (6.0 * x[0]).sin() * (4.0 * x[1]).cos();
    let mut h = History::new(spec, 2);
    for x in [[0.2, 0.3], [0.7, 0.6], [0.2, 0.3], [0.5, 0.9]] {
        let ext = h.extend(&x, f(&x))?;
        let note = match ext {
            Extension::Inserted => "added to the effective set",
            Extension::Correlated => "fully correlated, skipped",
        };
        println!("observe {x:?}: {note}");
    }
    println!(
        "{} queries, {} effective points\n",
        h.len(),
        h.effective_indices().len()
    );

    for z in [[0.2, 0.3], [0.45, 0.45], [0.95, 0.05]] {
        let s = h.posterior(&z)?;
        println!(
            "x = {z:?}: mu = {:+.5}  sigma = {:.5}  f = {:+.5}  sigma_0.1 = {:.5}",
            s.mean,
            s.std,
            f(&z),
            h.posterior_var_regularized(&z, 0.01).sqrt()
        );
    }
    Ok(())
}
