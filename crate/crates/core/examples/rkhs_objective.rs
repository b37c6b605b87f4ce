//! Sampling a seeded RKHS objective and saving it as JSON.

use gpbandit::rkhs::{argmax, sample_objective, RkhsFunction};
use gpbandit::rng::{labels, StreamKey};
use gpbandit::{KernelSpec, Points};

fn main() -> gpbandit::Result<()> {
    let spec = KernelSpec::squared_exponential(0.25)?;
    let seed = 7;
    let mut rng = StreamKey::new(0, seed).stream(labels::OBJECTIVE);
    let f = sample_objective(spec, 2, 50, &mut rng).with_seed(seed);
    println!("M = {}, ||f||_k = {:.6}", f.coefficients().len(), f.norm());

    let grid = Points::grid(25, 2);
    let values = f.evaluate_all(&grid);
    let (i, best) = argmax(&values);
    println!("max over the 25x25 grid: f({:?}) = {best:.6}", grid.get(i));
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("sup |f| = {sup:.4} <= ||f||_k = {:.4}", f.norm());

    let path = std::env::temp_dir().join("gpbandit_objective.json");
    f.write_json(&path)?;
    let back = RkhsFunction::read_json(&path)?;
    println!(
        "round trip through {}: identical = {}",
        path.display(),
        back == f
    );
    Ok(())
}
