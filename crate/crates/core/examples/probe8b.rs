// Sparse-vs-random medians for other sparse families and parameter choices.
use deltalab_core::barriers::{generate_positions, SparsenessSpec};
use deltalab_core::transfer::scattering;

fn median_t2(arr: &deltalab_core::BarrierArray, grid: &[f64]) -> f64 {
    let mut t2: Vec<f64> = grid.iter().map(|&k| scattering(arr, k).unwrap().abs_t2()).collect();
    t2.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = t2.len();
    if n % 2 == 1 { t2[n / 2] } else { 0.5 * (t2[n / 2 - 1] + t2[n / 2]) }
}

fn main() {
    let grid: Vec<f64> = (0..501).map(|i| 0.5 + i as f64 / 500.0).collect();
    for (label, spec) in [
        ("power 1.5", SparsenessSpec::Power { beta: 1.5 }),
        ("power 2.0", SparsenessSpec::Power { beta: 2.0 }),
        ("exp      ", SparsenessSpec::Exponential),
    ] {
        for v in [1.0, 2.0] {
            let sparse = generate_positions(&spec, 10, v, true).unwrap();
            let span = sparse.max_position().unwrap();
            let sparse_med = median_t2(&sparse, &grid);
            let mut worst_ratio = f64::INFINITY;
            let mut best_random = 0.0f64;
            for seed in 1..=10u64 {
                let arr = generate_positions(&SparsenessSpec::Random { span, seed }, 10, v, false)
                    .unwrap();
                let m = median_t2(&arr, &grid);
                best_random = best_random.max(m);
                worst_ratio = worst_ratio.min(sparse_med / m);
            }
            println!(
                "{label} v={v}: span {span:9.1}, sparse med {sparse_med:.4e}, best random med {best_random:.4e}, min ratio {worst_ratio:.2}"
            );
        }
    }
}
