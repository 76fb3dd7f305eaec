//! `deltalab` — command-line front end for the sparse delta-barrier
//! scattering laboratory.
//!
//! Subcommands: `positions`, `sweep`, `zoom`, `pruefer`, `histogram`,
//! `diagnose`, `packet`, `compare-random`. Every run is deterministic for
//! fixed flags and seeds; all tabular output is CSV with 17 significant
//! digits, optional plots are static SVG. Exit codes: 0 success, 1 usage
//! error, 2 numerical-range failure.

mod config;
mod csvout;
mod svg;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use deltalab_core::barriers::{generate_positions, BarrierArray};
use deltalab_core::pruefer::{
    equidistribution_stats, histogram_counts, iterate, point_spectrum_diagnostic, PrueferParams,
};
use deltalab_core::sweep::{compare_random, run_sweep, run_zoom, SweepRecord, SweepRequest};
use deltalab_core::transfer::rate_threshold;
use deltalab_core::wavepacket::{
    gaussian_packet, shredding_metrics, transmit_packet, GridSpec, PacketGrid,
};

use config::{parse_factor_list, ConfigFile};
use csvout::{write_csv, Value};
use svg::{emit_svg_plot, Plot, PlotKind};

/// Environment variable naming the default output directory; relative
/// output paths are placed under it when set.
pub const OUT_DIR_ENV: &str = "DELTALAB_OUT";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config, impossible requests: exit code 1.
    Usage(String),
    /// Values outside f64 range (overflowing positions, vanishing zoom
    /// windows, non-finite output): exit code 2.
    Range(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn range(msg: impl Into<String>) -> Self {
        CliError::Range(msg.into())
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Range(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Range(_) => 2,
        }
    }
}

impl From<deltalab_core::Error> for CliError {
    fn from(e: deltalab_core::Error) -> Self {
        match e {
            deltalab_core::Error::NumericalRange(m) => CliError::Range(m),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "deltalab",
    version,
    about = "Quantum transmission through sparse arrays of identical delta barriers",
    after_help = "Spacing mini-language: power:beta=2 | exp | paper:b=1,beta=2,c=1,a=1,gamma=1 \
                  (alias polyexp:) | random:span=100,seed=7\n\
                  Relative output paths land in $DELTALAB_OUT when it is set."
)]
struct Cli {
    /// Config file with one [subcommand] section of key = value defaults;
    /// command-line flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a barrier array and export its positions.
    Positions(PositionsArgs),
    /// Transmission amplitudes over a uniform momentum grid.
    Sweep(SweepArgs),
    /// Nested zoom sweeps exposing fluctuation on many momentum scales.
    Zoom(ZoomArgs),
    /// Iterate the phase map along the half-line array and export the orbit.
    Pruefer(PrueferArgs),
    /// Phase histogram with equidistribution statistics.
    Histogram(HistogramArgs),
    /// Point-spectrum divergence diagnostics (growth-bound partial sums).
    Diagnose(DiagnoseArgs),
    /// Send a Gaussian packet through the array and measure shape loss.
    Packet(PacketArgs),
    /// Median transmission of the sparse array vs random placements.
    CompareRandom(CompareRandomArgs),
}

#[derive(Args)]
struct ArrayArgs {
    /// Spacing family (see the mini-language in --help) [default: power:beta=2]
    #[arg(long)]
    spacing: Option<String>,
    /// Total barrier count; odd for the default symmetric arrays [default: 11]
    #[arg(long)]
    barriers: Option<usize>,
    /// Place all barriers on the positive half-axis instead of symmetrically
    #[arg(long)]
    half_line: bool,
    /// Coupling strength v of every barrier [default: 1]
    #[arg(long)]
    v: Option<f64>,
}

const ARRAY_KEYS: &[&str] = &["spacing", "barriers", "half-line", "v"];

struct ResolvedArray {
    spec: deltalab_core::SparsenessSpec,
    n_per_side: usize,
    symmetric: bool,
    v: f64,
    array: BarrierArray,
}

fn resolve_array(
    args: &ArrayArgs,
    overlay: &config::Overlay<'_>,
    default_spacing: &str,
    default_barriers: usize,
) -> Result<ResolvedArray, CliError> {
    let spec = overlay.spacing(args.spacing.as_deref(), default_spacing)?;
    let barriers = overlay.get("barriers", args.barriers, default_barriers)?;
    let half_line = overlay.get_flag("half-line", args.half_line)?;
    let v = overlay.get("v", args.v, 1.0)?;
    let (n_per_side, symmetric) = if half_line {
        (barriers, false)
    } else {
        if barriers % 2 == 0 {
            return Err(CliError::usage(format!(
                "--barriers {barriers} cannot form a symmetric array; pass an odd count or --half-line"
            )));
        }
        (barriers / 2, true)
    };
    let array = generate_positions(&spec, n_per_side, v, symmetric)?;
    Ok(ResolvedArray { spec, n_per_side, symmetric, v, array })
}

fn out_path(name: &str) -> PathBuf {
    let p = PathBuf::from(name);
    if p.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            return Path::new(&dir).join(p);
        }
    }
    p
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}"))
}

// ---------------------------------------------------------------------
// positions
// ---------------------------------------------------------------------

#[derive(Args)]
struct PositionsArgs {
    #[command(flatten)]
    array: ArrayArgs,
    /// Output CSV path (columns n,x) [default: positions.csv]
    #[arg(long)]
    out: Option<String>,
}

fn cmd_positions(args: &PositionsArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let overlay = cfg.overlay("positions", &[ARRAY_KEYS, &["out"]].concat())?;
    let resolved = resolve_array(&args.array, &overlay, "power:beta=2", 11)?;
    let out = out_path(&overlay.get("out", args.out.clone(), "positions.csv".to_string())?);
    let rows: Vec<Vec<Value>> = resolved
        .array
        .indices()
        .iter()
        .zip(resolved.array.positions())
        .map(|(&n, &x)| vec![Value::Int(n), Value::Float(x)])
        .collect();
    write_csv(&out, &["n", "x"], &rows)?;
    println!(
        "wrote {} barrier positions (sparse: {}) to {}",
        resolved.array.len(),
        resolved.array.is_sparse(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------
// sweep / zoom
// ---------------------------------------------------------------------

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    array: ArrayArgs,
    /// Lower momentum bound [default: 0.1]
    #[arg(long)]
    kmin: Option<f64>,
    /// Upper momentum bound [default: 5]
    #[arg(long)]
    kmax: Option<f64>,
    /// Grid points, endpoints included [default: 2000]
    #[arg(long)]
    npoints: Option<usize>,
    /// Output CSV path (columns k,t_re,t_im,abs_t2,opaque) [default: sweep.csv]
    #[arg(long)]
    out: Option<String>,
    /// Also emit SVG plots (|t|^2 vs k, and the Re t / Im t trajectory)
    #[arg(long)]
    svg: bool,
}

const SWEEP_KEYS: &[&str] = &["kmin", "kmax", "npoints", "out", "svg"];
const SWEEP_HEADER: [&str; 5] = ["k", "t_re", "t_im", "abs_t2", "opaque"];

fn sweep_request(
    args: &SweepArgs,
    overlay: &config::Overlay<'_>,
    default_spacing: &str,
    default_barriers: usize,
    k_defaults: (f64, f64, usize),
) -> Result<SweepRequest, CliError> {
    let resolved = resolve_array(&args.array, overlay, default_spacing, default_barriers)?;
    Ok(SweepRequest {
        spec: resolved.spec,
        n_per_side: resolved.n_per_side,
        v: resolved.v,
        symmetric: resolved.symmetric,
        k_min: overlay.get("kmin", args.kmin, k_defaults.0)?,
        k_max: overlay.get("kmax", args.kmax, k_defaults.1)?,
        n_points: overlay.get("npoints", args.npoints, k_defaults.2)?,
        zoom_factors: None,
        zoom_anchor: None,
        seed: None,
    })
}

fn sweep_rows(records: &[SweepRecord]) -> Vec<Vec<Value>> {
    records
        .iter()
        .map(|r| {
            vec![
                Value::Float(r.k),
                Value::Float(r.t_re),
                Value::Float(r.t_im),
                Value::Float(r.abs_t2),
                Value::UInt(u64::from(r.opaque)),
            ]
        })
        .collect()
}

fn sweep_plots(records: &[SweepRecord], out: &Path, title: &str) -> Result<(), CliError> {
    emit_svg_plot(
        &Plot {
            title: title.to_string(),
            x_label: "k".to_string(),
            y_label: "|t|^2".to_string(),
            kind: PlotKind::Line(records.iter().map(|r| (r.k, r.abs_t2)).collect()),
        },
        &out.with_extension("svg"),
    )?;
    emit_svg_plot(
        &Plot {
            title: format!("{title} trajectory"),
            x_label: "Re t".to_string(),
            y_label: "Im t".to_string(),
            kind: PlotKind::Scatter(records.iter().map(|r| (r.t_re, r.t_im)).collect()),
        },
        &sibling(out, "_trajectory.svg"),
    )
}

fn cmd_sweep(args: &SweepArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let overlay = cfg.overlay("sweep", &[ARRAY_KEYS, SWEEP_KEYS].concat())?;
    let req = sweep_request(args, &overlay, "power:beta=2", 11, (0.1, 5.0, 2000))?;
    let records = run_sweep(&req)?;
    let out = out_path(&overlay.get("out", args.out.clone(), "sweep.csv".to_string())?);
    write_csv(&out, &SWEEP_HEADER, &sweep_rows(&records))?;
    if overlay.get_flag("svg", args.svg)? {
        sweep_plots(&records, &out, "transmission")?;
    }
    let mean = records.iter().map(|r| r.abs_t2).sum::<f64>() / records.len() as f64;
    println!("swept {} momenta, mean |t|^2 = {mean:.6}, wrote {}", records.len(), out.display());
    Ok(())
}

#[derive(Args)]
struct ZoomArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Comma-separated shrink factors per level, each > 1 [default: 10,10]
    #[arg(long)]
    zooms: Option<String>,
    /// Center of the zoomed windows [default: midpoint of previous window]
    #[arg(long)]
    anchor: Option<f64>,
}

fn cmd_zoom(args: &ZoomArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let overlay = cfg.overlay("zoom", &[ARRAY_KEYS, SWEEP_KEYS, &["zooms", "anchor"]].concat())?;
    let mut req = sweep_request(&args.sweep, &overlay, "exp", 21, (0.5, 1.5, 2000))?;
    let zooms = overlay.get("zooms", args.zooms.clone(), "10,10".to_string())?;
    req.zoom_factors = Some(parse_factor_list(&zooms)?);
    req.zoom_anchor = overlay.get_opt("anchor", args.anchor)?;
    let levels = run_zoom(&req)?;

    let out = out_path(&overlay.get("out", args.sweep.out.clone(), "zoom.csv".to_string())?);
    let svg = overlay.get_flag("svg", args.sweep.svg)?;
    for (i, level) in levels.iter().enumerate() {
        let path = sibling(&out, &format!("_level{i}_k{}-{}.csv", level.k_lo, level.k_hi));
        write_csv(&path, &SWEEP_HEADER, &sweep_rows(&level.records))?;
        if svg {
            sweep_plots(&level.records, &path, &format!("transmission x{}", level.magnification))?;
        }
        println!(
            "level {i} (x{}): k in [{}, {}], std/mean = {:.4}, wrote {}",
            level.magnification,
            level.k_lo,
            level.k_hi,
            deltalab_core::sweep::normalized_fluctuation(&level.records),
            path.display()
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------
// pruefer / histogram
// ---------------------------------------------------------------------

#[derive(Args)]
struct PrueferArgs {
    /// Coupling strength v [default: 1]
    #[arg(long)]
    v: Option<f64>,
    /// Momentum k [default: 1]
    #[arg(long)]
    k: Option<f64>,
    /// Spacing family for the half-line array [default: power:beta=2]
    #[arg(long)]
    spacing: Option<String>,
    /// Number of barriers to iterate through [default: 20000]
    #[arg(long)]
    steps: Option<usize>,
    /// Boundary phase at the origin; defaults to the value encoding a
    /// barrier of strength v at x = 0
    #[arg(long)]
    boundary_phase: Option<f64>,
    /// Output CSV path (columns n,x,theta,beta,log_r2,cum_log_R2)
    /// [default: orbit.csv]
    #[arg(long)]
    out: Option<String>,
}

const PRUEFER_KEYS: &[&str] = &["v", "k", "spacing", "steps", "boundary-phase", "out"];

struct PrueferRun {
    params: PrueferParams,
    array: BarrierArray,
    orbit: deltalab_core::PrueferOrbit,
}

fn pruefer_run(args: &PrueferArgs, overlay: &config::Overlay<'_>) -> Result<PrueferRun, CliError> {
    let v = overlay.get("v", args.v, 1.0)?;
    let k = overlay.get("k", args.k, 1.0)?;
    let steps = overlay.get("steps", args.steps, 20_000)?;
    let boundary = overlay.get_opt("boundary-phase", args.boundary_phase)?;
    let spec = overlay.spacing(args.spacing.as_deref(), "power:beta=2")?;
    let params = PrueferParams::new(v, k, boundary)?;
    let array = generate_positions(&spec, steps, v, false)?;
    let orbit = iterate(&params, &array.gaps()?, steps)?;
    Ok(PrueferRun { params, array, orbit })
}

fn cmd_pruefer(args: &PrueferArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let overlay = cfg.overlay("pruefer", PRUEFER_KEYS)?;
    let run = pruefer_run(args, &overlay)?;
    let out = out_path(&overlay.get("out", args.out.clone(), "orbit.csv".to_string())?);
    let rows: Vec<Vec<Value>> = (0..run.orbit.len())
        .map(|j| {
            vec![
                Value::UInt(j as u64 + 1),
                Value::Float(run.array.positions()[j]),
                Value::Float(run.orbit.thetas[j]),
                Value::Float(run.orbit.betas[j]),
                Value::Float(run.orbit.log_r2[j]),
                Value::Float(run.orbit.cum_log_r2[j]),
            ]
        })
        .collect();
    write_csv(&out, &["n", "x", "theta", "beta", "log_r2", "cum_log_R2"], &rows)?;
    println!(
        "iterated {} barriers: growth exponent {:.6} (uniform-phase value {:.6}), wrote {}",
        run.orbit.len(),
        run.orbit.growth_exponent(),
        run.params.equidistributed_growth(),
        out.display()
    );
    Ok(())
}

#[derive(Args)]
struct HistogramArgs {
    #[command(flatten)]
    pruefer: PrueferArgs,
    /// Histogram bins [default: 50]
    #[arg(long)]
    bins: Option<usize>,
    /// Number of Weyl sums to report [default: 8]
    #[arg(long)]
    weyl: Option<usize>,
    /// Which phase to bin: beta or theta [default: beta]
    #[arg(long)]
    variable: Option<String>,
    /// Kolmogorov-Smirnov pass threshold for beta [default: 0.05]
    #[arg(long)]
    ks_threshold: Option<f64>,
    /// Weyl-magnitude pass threshold for beta [default: 0.05]
    #[arg(long)]
    weyl_threshold: Option<f64>,
    /// Also emit an SVG bar chart
    #[arg(long)]
    svg: bool,
}

fn cmd_histogram(args: &HistogramArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let keys = [
        PRUEFER_KEYS,
        &["bins", "weyl", "variable", "ks-threshold", "weyl-threshold", "svg"],
    ]
    .concat();
    let overlay = cfg.overlay("histogram", &keys)?;
    let run = pruefer_run(&args.pruefer, &overlay)?;
    let bins = overlay.get("bins", args.bins, 50)?;
    if bins < 2 {
        return Err(CliError::usage(format!("need at least 2 bins, got {bins}")));
    }
    let n_weyl = overlay.get("weyl", args.weyl, 8)?;
    let variable = overlay.get("variable", args.variable.clone(), "beta".to_string())?;
    let out = out_path(&overlay.get("out", args.pruefer.out.clone(), "histogram.csv".to_string())?);

    use std::f64::consts::PI;
    let (samples, lo, hi): (&[f64], f64, f64) = match variable.as_str() {
        "beta" => (&run.orbit.betas, -PI, PI),
        // theta lives on (0, pi] and is generally not uniform; counts only.
        "theta" => (&run.orbit.thetas[..run.orbit.len()], 0.0, PI),
        other => {
            return Err(CliError::usage(format!(
                "--variable must be beta or theta, got '{other}'"
            )))
        }
    };
    let counts = histogram_counts(samples, lo, hi, bins);
    let width = (hi - lo) / bins as f64;
    let rows: Vec<Vec<Value>> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            vec![
                Value::Float(lo + i as f64 * width),
                Value::Float(lo + (i + 1) as f64 * width),
                Value::UInt(c),
            ]
        })
        .collect();
    write_csv(&out, &["bin_lo", "bin_hi", "count"], &rows)?;
    if overlay.get_flag("svg", args.svg)? {
        emit_svg_plot(
            &Plot {
                title: format!("{variable} distribution"),
                x_label: variable.clone(),
                y_label: "count".to_string(),
                kind: PlotKind::Histogram(
                    counts
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| {
                            (lo + i as f64 * width, lo + (i + 1) as f64 * width, c as f64)
                        })
                        .collect(),
                ),
            },
            &out.with_extension("svg"),
        )?;
    }
    println!(
        "binned {} {variable} samples into {bins} bins, wrote {}",
        samples.len(),
        out.display()
    );

    if variable == "beta" {
        let stats = equidistribution_stats(&run.orbit.betas, bins, n_weyl)?;
        let max_weyl = stats.weyl_magnitudes.iter().cloned().fold(0.0, f64::max);
        let ks_threshold = overlay.get("ks-threshold", args.ks_threshold, 0.05)?;
        let weyl_threshold = overlay.get("weyl-threshold", args.weyl_threshold, 0.05)?;
        let pass = stats.ks_statistic < ks_threshold && max_weyl < weyl_threshold;
        println!(
            "KS = {:.6} (threshold {ks_threshold}), max |Weyl m<={n_weyl}| = {max_weyl:.6} \
             (threshold {weyl_threshold}) -> {}",
            stats.ks_statistic,
            if pass { "uniform" } else { "not uniform" }
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------

#[derive(Args)]
struct DiagnoseArgs {
    /// Coupling strength v [default: 1]
    #[arg(long)]
    v: Option<f64>,
    /// Momentum k [default: 1]
    #[arg(long)]
    k: Option<f64>,
    /// Spacing family for the half-line array [default: exp]
    #[arg(long)]
    spacing: Option<String>,
    /// Number of gaps to sum over [default: 50]
    #[arg(long)]
    n: Option<usize>,
    /// Output CSV path (columns n,gap,bound_partial_sum,sharp_partial_sum)
    /// [default: diagnose.csv]
    #[arg(long)]
    out: Option<String>,
}

fn cmd_diagnose(args: &DiagnoseArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let overlay = cfg.overlay("diagnose", &["v", "k", "spacing", "n", "out"])?;
    let v = overlay.get("v", args.v, 1.0)?;
    let k = overlay.get("k", args.k, 1.0)?;
    let n = overlay.get("n", args.n, 50)?;
    let spec = overlay.spacing(args.spacing.as_deref(), "exp")?;
    let array = generate_positions(&spec, n, v, false)?;
    let gaps = array.gaps()?;
    let diag = point_spectrum_diagnostic(&array, v, k, n)?;

    let out = out_path(&overlay.get("out", args.out.clone(), "diagnose.csv".to_string())?);
    let rows: Vec<Vec<Value>> = (0..n)
        .map(|i| {
            vec![
                Value::UInt(i as u64 + 1),
                Value::Float(gaps[i]),
                Value::Float(diag.bound_partial_sums[i]),
                Value::Float(diag.sharp_partial_sums[i]),
            ]
        })
        .collect();
    write_csv(&out, &["n", "gap", "bound_partial_sum", "sharp_partial_sum"], &rows)?;
    println!(
        "rate threshold at (v={v}, k={k}): {:.6}; bound sums diverging: {}; \
         sharp sums diverging: {}; diverging trend: {}",
        rate_threshold(v, k),
        diag.bound_diverging,
        diag.sharp_diverging,
        diag.diverging_trend()
    );
    println!("wrote {}", out.display());
    Ok(())
}

// ---------------------------------------------------------------------
// packet
// ---------------------------------------------------------------------

#[derive(Args)]
struct PacketArgs {
    #[command(flatten)]
    array: ArrayArgs,
    /// Packet center momentum [default: 1]
    #[arg(long)]
    k0: Option<f64>,
    /// Momentum spread of |phi(k)|^2 [default: 0.05]
    #[arg(long)]
    sigma: Option<f64>,
    /// Grid samples [default: 16384]
    #[arg(long)]
    samples: Option<usize>,
    /// Momentum half-window in units of sigma [default: 8]
    #[arg(long)]
    window_sigmas: Option<f64>,
    /// Optional free-evolution phase exp(-i k^2 tau) applied to the output
    /// (visualization only)
    #[arg(long)]
    tau: Option<f64>,
    /// Output prefix; writes <prefix>_{in,out}_{k,x}.csv and
    /// <prefix>_metrics.csv [default: packet]
    #[arg(long)]
    out_prefix: Option<String>,
    /// Also emit SVG density plots
    #[arg(long)]
    svg: bool,
}

fn packet_rows(var: &str, packet: &PacketGrid) -> Vec<Vec<Value>> {
    (0..packet.n)
        .map(|i| {
            let (coord, amp) = if var == "k" {
                (packet.k_at(i), packet.amps_k[i])
            } else {
                (packet.x_at(i), packet.amps_x[i])
            };
            vec![
                Value::Float(coord),
                Value::Float(amp.re),
                Value::Float(amp.im),
                Value::Float(amp.norm_sqr()),
            ]
        })
        .collect()
}

fn cmd_packet(args: &PacketArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let keys = [
        ARRAY_KEYS,
        &["k0", "sigma", "samples", "window-sigmas", "tau", "out-prefix", "svg"],
    ]
    .concat();
    let overlay = cfg.overlay("packet", &keys)?;
    let resolved = resolve_array(&args.array, &overlay, "exp", 21)?;
    let k0 = overlay.get("k0", args.k0, 1.0)?;
    let sigma = overlay.get("sigma", args.sigma, 0.05)?;
    let samples =
        overlay.get("samples", args.samples, deltalab_core::wavepacket::DEFAULT_SAMPLES)?;
    let window = overlay.get(
        "window-sigmas",
        args.window_sigmas,
        deltalab_core::wavepacket::DEFAULT_HALF_WIDTH_SIGMAS,
    )?;
    let tau = overlay.get_opt("tau", args.tau)?;
    let prefix = overlay.get("out-prefix", args.out_prefix.clone(), "packet".to_string())?;

    let grid = GridSpec { n: samples, k_lo: k0 - window * sigma, k_hi: k0 + window * sigma };
    let input = gaussian_packet(k0, sigma, &grid)?;
    let mut output = transmit_packet(&input, &resolved.array)?;
    if let Some(tau) = tau {
        for (j, amp) in output.amps_k.iter_mut().enumerate() {
            let k = grid.k_lo + j as f64 * grid.delta_k();
            *amp *= num_complex::Complex64::from_polar(1.0, -k * k * tau);
        }
        output.amps_x = output.k_to_x();
    }
    let metrics = shredding_metrics(&input, &output)?;

    if output.edge_power_fraction() > 0.01 {
        eprintln!(
            "warning: {:.2}% of the output norm sits in the outer 5% of the position window; \
             consider more --samples or a wider --window-sigmas",
            output.edge_power_fraction() * 100.0
        );
    }

    let base = out_path(&prefix).to_string_lossy().into_owned();
    for (name, var, packet) in [
        ("in_k", "k", &input),
        ("in_x", "x", &input),
        ("out_k", "k", &output),
        ("out_x", "x", &output),
    ] {
        let path = PathBuf::from(format!("{base}_{name}.csv"));
        let header = if var == "k" { ["k", "re", "im", "abs2"] } else { ["x", "re", "im", "abs2"] };
        write_csv(&path, &header, &packet_rows(var, packet))?;
    }
    write_csv(
        &PathBuf::from(format!("{base}_metrics.csv")),
        &["xcorr_peak", "spread_ratio", "spectral_entropy_ratio", "transmitted_fraction"],
        &[vec![
            Value::Float(metrics.xcorr_peak),
            Value::Float(metrics.spread_ratio),
            Value::Float(metrics.spectral_entropy_ratio),
            Value::Float(metrics.transmitted_fraction),
        ]],
    )?;
    if overlay.get_flag("svg", args.svg)? {
        for (name, packet) in [("in_x", &input), ("out_x", &output)] {
            emit_svg_plot(
                &Plot {
                    title: format!("packet {name}"),
                    x_label: "x".to_string(),
                    y_label: "|phi|^2".to_string(),
                    kind: PlotKind::Line(
                        (0..packet.n)
                            .map(|m| (packet.x_at(m), packet.amps_x[m].norm_sqr()))
                            .collect(),
                    ),
                },
                &PathBuf::from(format!("{base}_{name}.svg")),
            )?;
        }
    }
    println!(
        "packet through {} barriers: transmitted {:.6}, xcorr peak {:.4}, spread ratio {:.2}, \
         entropy ratio {:.4}; wrote {base}_*.csv",
        resolved.array.len(),
        metrics.transmitted_fraction,
        metrics.xcorr_peak,
        metrics.spread_ratio,
        metrics.spectral_entropy_ratio
    );
    Ok(())
}

// ---------------------------------------------------------------------
// compare-random
// ---------------------------------------------------------------------

#[derive(Args)]
struct CompareRandomArgs {
    #[command(flatten)]
    array: ArrayArgs,
    /// Lower momentum bound [default: 0.5]
    #[arg(long)]
    kmin: Option<f64>,
    /// Upper momentum bound [default: 1.5]
    #[arg(long)]
    kmax: Option<f64>,
    /// Grid points [default: 501]
    #[arg(long)]
    npoints: Option<usize>,
    /// Random realizations [default: 10]
    #[arg(long)]
    realizations: Option<usize>,
    /// Base seed; realization i uses seed + i [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (columns realization,median_abs_t2; realization -1
    /// is the sparse array) [default: compare.csv]
    #[arg(long)]
    out: Option<String>,
}

fn cmd_compare_random(args: &CompareRandomArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let keys = [ARRAY_KEYS, &["kmin", "kmax", "npoints", "realizations", "seed", "out"]].concat();
    let overlay = cfg.overlay("compare-random", &keys)?;
    let resolved = resolve_array(&args.array, &overlay, "exp", 21)?;
    let req = SweepRequest {
        spec: resolved.spec,
        n_per_side: resolved.n_per_side,
        v: resolved.v,
        symmetric: resolved.symmetric,
        k_min: overlay.get("kmin", args.kmin, 0.5)?,
        k_max: overlay.get("kmax", args.kmax, 1.5)?,
        n_points: overlay.get("npoints", args.npoints, 501)?,
        zoom_factors: None,
        zoom_anchor: None,
        seed: Some(overlay.get("seed", args.seed, 1)?),
    };
    let realizations = overlay.get("realizations", args.realizations, 10)?;
    let cmp = compare_random(&req, realizations)?;

    let out = out_path(&overlay.get("out", args.out.clone(), "compare.csv".to_string())?);
    let mut rows = vec![vec![Value::Int(-1), Value::Float(cmp.sparse_median_t2)]];
    for (i, &m) in cmp.random_median_t2.iter().enumerate() {
        rows.push(vec![Value::Int(i as i64), Value::Float(m)]);
    }
    write_csv(&out, &["realization", "median_abs_t2"], &rows)?;
    let best = cmp.random_median_t2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!(
        "sparse median |t|^2 = {:.6e}; random medians in [{:.6e}, {:.6e}] over {realizations} \
         realizations (sparse/best-random = {:.3}); wrote {}",
        cmp.sparse_median_t2,
        cmp.random_median_t2.iter().cloned().fold(f64::INFINITY, f64::min),
        best,
        cmp.sparse_median_t2 / best,
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Positions(args) => cmd_positions(args, &cfg),
        Command::Sweep(args) => cmd_sweep(args, &cfg),
        Command::Zoom(args) => cmd_zoom(args, &cfg),
        Command::Pruefer(args) => cmd_pruefer(args, &cfg),
        Command::Histogram(args) => cmd_histogram(args, &cfg),
        Command::Diagnose(args) => cmd_diagnose(args, &cfg),
        Command::Packet(args) => cmd_packet(args, &cfg),
        Command::CompareRandom(args) => cmd_compare_random(args, &cfg),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let usage = CliError::from(deltalab_core::Error::InvalidParameter("x".to_string()));
        assert_eq!(usage.exit_code(), 1);
        let range = CliError::from(deltalab_core::Error::NumericalRange("x".to_string()));
        assert_eq!(range.exit_code(), 2);
    }
}
