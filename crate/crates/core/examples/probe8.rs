// Probe the sparse-vs-random discrimination statistics on fine grids, and
// cross-check the transfer route against a plane-wave-basis solver.
use deltalab_core::barriers::{generate_positions, BarrierArray, SparsenessSpec};
use deltalab_core::transfer::scattering;
use num_complex::Complex64;

// Independent route: solve for plane-wave coefficients region by region,
// propagating (A, B) with phi = A e^{ikx} + B e^{-ikx} backward from the
// transmitted side.
fn plane_wave_t2(arr: &BarrierArray, k: f64) -> f64 {
    let v = arr.strength();
    let ik = Complex64::new(0.0, k);
    // Rightmost region: A = 1, B = 0 (aux normalization).
    let mut a = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    for &x in arr.positions().iter().rev() {
        let ep = (ik * x).exp();
        let em = (-ik * x).exp();
        // Continuity and derivative jump at x:
        //   A' e^{ikx} + B' e^{-ikx} = A e^{ikx} + B e^{-ikx}
        //   ik(A' e^{ikx} - B' e^{-ikx}) = ik(A e^{ikx} - B e^{-ikx}) - v (A e^{ikx} + B e^{-ikx})
        // solved for the left-side (A', B').
        let phi = a * ep + b * em;
        let dphi = ik * (a * ep - b * em);
        let dphi_left = dphi - v * phi;
        let a_new = (phi + dphi_left / ik) * 0.5 / ep;
        let b_new = (phi - dphi_left / ik) * 0.5 / em;
        a = a_new;
        b = b_new;
    }
    // Incident amplitude a, reflected b, transmitted 1.
    1.0 / a.norm_sqr()
}

fn quantiles(mut v: Vec<f64>) -> (f64, f64, f64, f64, f64) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    let q = |p: f64| v[((n as f64 - 1.0) * p) as usize];
    let mean = v.iter().sum::<f64>() / n as f64;
    (q(0.5), q(0.9), q(0.99), *v.last().unwrap(), mean)
}

fn main() {
    let k_lo = 0.5;
    let k_hi = 1.5;
    let n_points = 20001;
    let grid: Vec<f64> =
        (0..n_points).map(|i| k_lo + (k_hi - k_lo) * i as f64 / (n_points - 1) as f64).collect();

    let sparse = generate_positions(&SparsenessSpec::Exponential, 10, 1.0, true).unwrap();
    let span = sparse.max_position().unwrap();

    // Cross-check transfer vs plane-wave solver on a sub-grid.
    let mut max_diff = 0.0f64;
    for i in (0..n_points).step_by(97) {
        let k = grid[i];
        let t2_transfer = scattering(&sparse, k).unwrap().abs_t2();
        let t2_pw = plane_wave_t2(&sparse, k);
        max_diff = max_diff.max((t2_transfer - t2_pw).abs());
    }
    println!("transfer vs plane-wave |t|^2 max diff (21 barriers e^n): {max_diff:.3e}");

    let t2: Vec<f64> = grid.iter().map(|&k| scattering(&sparse, k).unwrap().abs_t2()).collect();
    let (med, q90, q99, max, mean) = quantiles(t2);
    println!("sparse : median {med:.4e}  q90 {q90:.4e}  q99 {q99:.4e}  max {max:.4e}  mean {mean:.4e}");

    for seed in 0..6u64 {
        let arr =
            generate_positions(&SparsenessSpec::Random { span, seed }, 10, 1.0, false).unwrap();
        let t2: Vec<f64> = grid.iter().map(|&k| scattering(&arr, k).unwrap().abs_t2()).collect();
        let (med, q90, q99, max, mean) = quantiles(t2);
        println!("rand {seed}: median {med:.4e}  q90 {q90:.4e}  q99 {q99:.4e}  max {max:.4e}  mean {mean:.4e}");
    }

    // Does grid resolution change the sparse median?
    for np in [501usize, 2001, 20001, 100001] {
        let g: Vec<f64> = (0..np).map(|i| k_lo + (k_hi - k_lo) * i as f64 / (np - 1) as f64).collect();
        let t2: Vec<f64> = g.iter().map(|&k| scattering(&sparse, k).unwrap().abs_t2()).collect();
        let (med, _, _, _, mean) = quantiles(t2);
        println!("sparse with {np} points: median {med:.4e}, mean {mean:.4e}");
    }

    // Smaller span: random barriers packed at wavelength scale (dense
    // Anderson regime) for reference.
    for span2 in [20.0, 100.0, 1000.0] {
        let arr = generate_positions(&SparsenessSpec::Random { span: span2, seed: 1 }, 10, 1.0, false)
            .unwrap();
        let t2: Vec<f64> = grid.iter().map(|&k| scattering(&arr, k).unwrap().abs_t2()).collect();
        let (med, _, _, _, mean) = quantiles(t2);
        println!("random span {span2}: median {med:.4e}, mean {mean:.4e}");
    }
}
