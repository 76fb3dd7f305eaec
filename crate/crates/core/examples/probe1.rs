// Probe determinant drift over long factor chains and worst-case flux
// defects over random (array, k) cases.
use deltalab_core::barriers::{generate_positions, SparsenessSpec, SplitMix64};
use deltalab_core::transfer::{scattering, TransferMatrix};

fn main() {
    // Windowed det verification over a 10^4-factor growing chain: measure
    // each segment's defect while it is representable, reset, accumulate.
    let mut rng = SplitMix64::new(12345);
    let mut segment = TransferMatrix::IDENTITY;
    let mut accumulated = 0.0f64;
    let mut segments = 0usize;
    let mut total_log = 0.0f64;
    for i in 0..10_000 {
        let f = if i % 2 == 0 {
            TransferMatrix::free(0.2 + 4.8 * rng.next_f64(), 3.0 * rng.next_f64()).unwrap()
        } else {
            TransferMatrix::barrier(-2.0 + 4.0 * rng.next_f64())
        };
        segment = f.compose(&segment);
        if segment.log_scale.abs() > 3.0 || i == 9_999 {
            accumulated += segment.det_defect().abs();
            segments += 1;
            total_log += segment.log_scale;
            segment = TransferMatrix::IDENTITY;
        }
    }
    println!(
        "windowed det over 10^4 factors: {segments} segments, total log_scale = {total_log:.1}, accumulated |defect| = {accumulated:.3e}"
    );

    // Raw det defect on moderate chains (log_scale small enough to resolve).
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let mut rng = SplitMix64::new(seed);
        let mut acc = TransferMatrix::IDENTITY;
        for i in 0..200 {
            let f = if i % 2 == 0 {
                TransferMatrix::free(0.5 + rng.next_f64(), rng.next_f64()).unwrap()
            } else {
                // alternate sign to keep growth mild
                TransferMatrix::barrier(if i % 4 == 1 { 0.8 } else { -0.8 })
            };
            acc = f.compose(&acc);
        }
        if acc.log_scale.abs() < 6.0 {
            worst = worst.max(acc.det_defect().abs());
        }
    }
    println!("raw det defect over 200-factor mild chains: worst = {worst:.3e}");

    // Flux defect over random (array, k, v) cases across families.
    let mut rng = SplitMix64::new(99);
    let mut worst_flux = 0.0f64;
    let mut opaque_count = 0usize;
    for case in 0..1000 {
        let family = case % 4;
        let n = 1 + (rng.next_u64() % 10) as usize;
        let v = -2.0 + 4.0 * rng.next_f64();
        let spec = match family {
            0 => SparsenessSpec::Power { beta: 1.0 + 2.0 * rng.next_f64() },
            1 => SparsenessSpec::Exponential,
            2 => SparsenessSpec::PolyExp {
                b: 0.5 + rng.next_f64(),
                beta: 1.1 + rng.next_f64(),
                c: rng.next_f64(),
                a: 0.2 + rng.next_f64(),
                gamma: 1.0 + rng.next_f64(),
            },
            _ => SparsenessSpec::Random { span: 10.0 + 90.0 * rng.next_f64(), seed: rng.next_u64() },
        };
        let symmetric = !matches!(spec, SparsenessSpec::Random { .. }) && rng.next_f64() < 0.5;
        let arr = generate_positions(&spec, n, v, symmetric).unwrap();
        let k = 0.1 + 9.9 * rng.next_f64();
        let s = scattering(&arr, k).unwrap();
        if s.opaque {
            opaque_count += 1;
            continue;
        }
        worst_flux = worst_flux.max(s.flux_defect().abs());
    }
    println!("flux defect over 1000 random cases: worst = {worst_flux:.3e}, opaque = {opaque_count}");

    // Mirror symmetry of |t|^2.
    let mut worst_sym = 0.0f64;
    for seed in 0..200u64 {
        let spec = SparsenessSpec::Random { span: 50.0, seed };
        let arr = generate_positions(&spec, 5, 1.3, false).unwrap();
        let k = 0.2 + 3.0 * SplitMix64::new(seed).next_f64();
        let a = scattering(&arr, k).unwrap().abs_t2();
        let b = scattering(&arr.mirrored(), k).unwrap().abs_t2();
        worst_sym = worst_sym.max((a - b).abs());
    }
    println!("|t|^2 mirror asymmetry over 200 random arrays: worst = {worst_sym:.3e}");
}
