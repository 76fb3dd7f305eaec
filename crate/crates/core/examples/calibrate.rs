// Scratch calibration runs used to pin acceptance constants.
use deltalab_core::barriers::{generate_positions, SparsenessSpec};
use deltalab_core::pruefer::{equidistribution_stats, iterate, point_spectrum_diagnostic, PrueferParams};
use deltalab_core::sweep::{compare_random, normalized_fluctuation, run_zoom, SweepRequest};
use deltalab_core::transfer::{half_line_chain, rate_threshold};
use deltalab_core::wavepacket::{gaussian_packet, shredding_metrics, transmit_packet, GridSpec};

fn main() {
    // ---- Fig-1 style run: v = k = 1, x_n = n^2, N = 20000 ----
    let params = PrueferParams::new(1.0, 1.0, None).unwrap();
    let arr = generate_positions(&SparsenessSpec::Power { beta: 2.0 }, 20000, 1.0, false).unwrap();
    let gaps = arr.gaps().unwrap();
    let orbit = iterate(&params, &gaps, 20000).unwrap();
    let stats = equidistribution_stats(&orbit.betas, 50, 8).unwrap();
    let max_weyl = stats.weyl_magnitudes.iter().cloned().fold(0.0, f64::max);
    println!("fig1: KS = {:.6}, max Weyl (m<=8) = {:.6}", stats.ks_statistic, max_weyl);
    println!("fig1: weyl = {:?}", stats.weyl_magnitudes);
    println!(
        "fig1: growth = {:.9} (target ln 1.25 = {:.9}, rel dev {:.4}%)",
        orbit.growth_exponent(),
        1.25f64.ln(),
        (orbit.growth_exponent() / 1.25f64.ln() - 1.0) * 100.0
    );

    // ---- Prüfer vs transfer-matrix amplitude over first 100 barriers ----
    let chain = half_line_chain(&gaps[..100], 1.0, 1.0).unwrap();
    let phi0 = [params.theta0.sin(), params.k * params.theta0.cos()];
    let mut max_diff = 0.0f64;
    for (n, m) in chain.iter().enumerate() {
        let phi = m.apply_scaled(phi0);
        let ln_r2 = 2.0 * m.log_scale
            + (phi[0] * phi[0] + (phi[1] / params.k) * (phi[1] / params.k)).ln();
        max_diff = max_diff.max((ln_r2 - orbit.cum_log_r2[n]).abs());
    }
    println!("pruefer-vs-transfer: max |diff| over 100 barriers = {max_diff:.3e}");

    // ---- point-spectrum diagnostics ----
    println!("rate_threshold(1,1) = {:.9}", rate_threshold(1.0, 1.0));
    let exp_arr = generate_positions(&SparsenessSpec::Exponential, 50, 1.0, false).unwrap();
    let diag = point_spectrum_diagnostic(&exp_arr, 1.0, 1.0, 50).unwrap();
    println!(
        "diag exp: bound_div = {}, sharp_div = {}, last bound = {:.3e}, last sharp = {:.3e}",
        diag.bound_diverging,
        diag.sharp_diverging,
        diag.bound_partial_sums.last().unwrap(),
        diag.sharp_partial_sums.last().unwrap()
    );
    let pow_arr = generate_positions(&SparsenessSpec::Power { beta: 2.0 }, 200, 1.0, false).unwrap();
    let diag = point_spectrum_diagnostic(&pow_arr, 1.0, 1.0, 200).unwrap();
    println!(
        "diag pow: bound_div = {}, sharp_div = {}, last bound = {:.6e}, last sharp = {:.6e}",
        diag.bound_diverging,
        diag.sharp_diverging,
        diag.bound_partial_sums.last().unwrap(),
        diag.sharp_partial_sums.last().unwrap()
    );

    // ---- zoom fluctuation: 21 barriers x_n = e^n, v = 1 ----
    let req = SweepRequest {
        spec: SparsenessSpec::Exponential,
        n_per_side: 10,
        v: 1.0,
        symmetric: true,
        k_min: 0.5,
        k_max: 1.5,
        n_points: 2001,
        zoom_factors: Some(vec![10.0, 10.0]),
        zoom_anchor: None,
        seed: None,
    };
    let levels = run_zoom(&req).unwrap();
    for level in &levels {
        let fluct = normalized_fluctuation(&level.records);
        let mean = level.records.iter().map(|r| r.abs_t2).sum::<f64>() / level.records.len() as f64;
        println!(
            "zoom x{:<4}: window [{:.6}, {:.6}], mean |t|^2 = {:.4}, std/mean = {:.4}",
            level.magnification, level.k_lo, level.k_hi, mean, fluct
        );
    }

    // ---- sparse vs random comparison ----
    let req = SweepRequest { n_points: 501, seed: Some(1), ..req.clone() };
    let cmp = compare_random(&req, 10).unwrap();
    println!("compare: sparse median = {:.6e}", cmp.sparse_median_t2);
    for (i, m) in cmp.random_median_t2.iter().enumerate() {
        println!(
            "compare: random[{i}] median = {:.6e}, ratio = {:.1}",
            m,
            cmp.sparse_median_t2 / m
        );
    }

    // ---- packet shredding ----
    let grid = GridSpec::for_packet(1.0, 0.05);
    let packet = gaussian_packet(1.0, 0.05, &grid).unwrap();
    let sparse = generate_positions(&SparsenessSpec::Exponential, 10, 1.0, true).unwrap();
    let out = transmit_packet(&packet, &sparse).unwrap();
    let metrics = shredding_metrics(&packet, &out).unwrap();
    let k_side: f64 =
        out.amps_k.iter().map(|a| a.norm_sqr()).sum::<f64>() * out.delta_k;
    println!(
        "packet: xcorr = {:.4}, spread_ratio = {:.2}, entropy_ratio = {:.4}, transmitted = {:.6}",
        metrics.xcorr_peak, metrics.spread_ratio, metrics.spectral_entropy_ratio, metrics.transmitted_fraction
    );
    println!(
        "packet: |norm_x(out) - k-side sum| = {:.3e}, edge power = {:.3e}, input rms = {:.3}",
        (out.norm_x() - k_side).abs(),
        out.edge_power_fraction(),
        {
            let w: Vec<f64> = packet.amps_x.iter().map(|z| z.norm_sqr()).collect();
            let tot: f64 = w.iter().sum();
            let mean: f64 = w.iter().enumerate().map(|(m, w)| packet.x_at(m) * w).sum::<f64>() / tot;
            (w.iter().enumerate().map(|(m, w)| (packet.x_at(m) - mean).powi(2) * w).sum::<f64>() / tot).sqrt()
        }
    );

    // ---- quadrature identity ----
    for mu in [1.1f64, 1.5, 2.0, 5.0] {
        let n = 1 << 16;
        let mut sum = 0.0;
        for i in 0..n {
            let beta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            sum += (mu * mu * beta.cos().powi(2) + beta.sin().powi(2)).ln();
        }
        let avg = sum / n as f64;
        let target = 2.0 * ((mu + 1.0) / 2.0).ln();
        println!("quadrature mu={mu}: avg = {avg:.12}, 2 ln((mu+1)/2) = {target:.12}, diff = {:.2e}", (avg - target).abs());
        let mut sum2 = 0.0;
        for i in 0..n {
            let beta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            sum2 += (mu + (mu * mu - 1.0f64).sqrt() * beta.sin()).ln();
        }
        let avg2 = sum2 / n as f64;
        println!("  sine-form avg = {avg2:.12}, ln((mu+1)/2) = {:.12}, diff = {:.2e}", ((mu + 1.0) / 2.0).ln(), (avg2 - ((mu + 1.0) / 2.0).ln()).abs());
    }
}
