//! Acceptance suite: every criterion at its pinned tolerance, one PASS/FAIL
//! line each. Runs without the libtest harness so the lines always print.

#[path = "../../core/tests/support/loopnest.rs"]
mod loopnest;

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dnncost::dataflow::layer_access_counts;
use dnncost::kernels::{
    conv_direct, conv_fft, conv_im2col, conv_winograd_f22_33, mult_count, TransformMethod, DIRECT_TILE_MULTS,
    WINOGRAD_TILE_MULTS,
};
use dnncost::netmodel::BUILTIN_NAMES;
use dnncost::optkit::streams::{relu_stream, sparse_stream};
use dnncost::optkit::{compression_ratio, rle_decode, rle_encode};
use dnncost::{
    builtin, compare_dataflows, default_arch, network_energy, network_stats, DataType, DataflowKind, DenseTensor,
    LayerKind, Level, Modifiers,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

/// Published totals: weights and MACs per network, with tolerance.
fn network_totals() -> Outcome {
    let table = [
        ("lenet5", 60e3, 341e3, 0.05),
        ("alexnet", 61e6, 724e6, 0.05),
        ("vgg16", 138e6, 15.5e9, 0.05),
        ("googlenet", 7e6, 1.43e9, 0.10),
        ("resnet50", 25.5e6, 3.9e9, 0.10),
    ];
    let start = Instant::now();
    let mut misses = Vec::new();
    let mut worst = 0.0f64;
    for (name, weights, macs, tol) in table {
        let s = network_stats(&builtin(name).unwrap().resolve(1).unwrap());
        for (what, got, want) in [("weights", s.total.weights, weights), ("MACs", s.total.macs, macs)] {
            let dev = (got as f64 - want) / want;
            worst = worst.max(dev.abs());
            if dev.abs() > tol {
                misses.push(format!(
                    "{name} {what} {got} vs {want:e} ({:+.1}%, limit {:.0}%)",
                    100.0 * dev,
                    100.0 * tol
                ));
            }
        }
    }
    let took = start.elapsed();
    if took >= Duration::from_secs(1) {
        misses.push(format!("took {}", secs(took)));
    }
    let detail = if misses.is_empty() {
        format!("5 networks, worst deviation {:.1}%, {}", 100.0 * worst, secs(took))
    } else {
        misses.join("; ")
    };
    outcome(misses.is_empty(), detail)
}

fn winograd_reduction() -> Outcome {
    let tiles = DIRECT_TILE_MULTS == 36 && WINOGRAD_TILE_MULTS == 16;
    let exact = (1..=256).all(|no| mult_count(TransformMethod::Winograd, no, 3, 1).unwrap().reduction() == 2.25);
    outcome(
        tiles && exact,
        format!("{DIRECT_TILE_MULTS} -> {WINOGRAD_TILE_MULTS} multiplications per 2x2 tile, reduction 2.25 for No in 1..=256"),
    )
}

fn kernel_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut exact_pair, mut mixed) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let c = rng.random_range(1..=4);
        let m = rng.random_range(1..=4);
        let h = rng.random_range(3..=16);
        let w = rng.random_range(3..=16);
        let input = DenseTensor::random(&[c, h, w], &mut rng);
        let filters = DenseTensor::random(&[m, c, 3, 3], &mut rng);
        let outs = [
            conv_direct(&input, &filters, 1, 0).unwrap(),
            conv_im2col(&input, &filters, 1, 0).unwrap(),
            conv_winograd_f22_33(&input, &filters).unwrap(),
            conv_fft(&input, &filters).unwrap(),
        ];
        exact_pair = exact_pair.max(outs[1].max_rel_diff(&outs[0]).unwrap());
        for i in 0..4 {
            for j in i + 1..4 {
                mixed = mixed.max(outs[j].max_rel_diff(&outs[i]).unwrap());
            }
        }
    }
    let took = start.elapsed();
    outcome(
        exact_pair <= 1e-9 && mixed <= 1e-6 && took < Duration::from_secs(10),
        format!(
            "200 instances, direct/im2col {exact_pair:.2e}, worst pair {mixed:.2e}, {}",
            secs(took)
        ),
    )
}

fn dataflow_dominance() -> Outcome {
    let net = builtin("alexnet").unwrap().resolve(1).unwrap();
    let report = compare_dataflows(&net, &default_arch(), &Modifiers::default()).unwrap();
    let conv: Vec<_> = report.layers.iter().filter(|l| l.kind == LayerKind::Conv).collect();
    let rs_layers = conv.iter().filter(|l| l.winner == DataflowKind::Rs).count();
    let adv = report.rs_advantage_conv.expect("alexnet has conv layers");
    let pass = report.conv_winner == DataflowKind::Rs && rs_layers >= 4 && adv.min >= 1.1 && adv.max <= 3.5;
    outcome(
        pass,
        format!(
            "conv aggregate winner {}, rs wins {rs_layers}/{} conv layers, advantage {:.3}x to {:.3}x",
            report.conv_winner,
            conv.len(),
            adv.min,
            adv.max
        ),
    )
}

fn access_oracle() -> Outcome {
    let start = Instant::now();
    let arch = default_arch();
    let layers = loopnest::sweep();
    let mut mismatches = Vec::new();
    for (layer, n) in &layers {
        for kind in DataflowKind::ALL {
            let sim = loopnest::simulate(kind, layer, *n);
            let eng = layer_access_counts(kind, layer, &arch, *n).unwrap();
            for d in DataType::ALL {
                let i = d.index();
                if sim.rf[i] != eng.get(d, Level::Rf) || sim.dram[i] != eng.get(d, Level::Dram) {
                    mismatches.push(format!(
                        "{kind} {d:?} N={n} {}x{}x{} -> {}",
                        layer.in_channels, layer.in_h, layer.in_w, layer.out_channels
                    ));
                }
            }
        }
    }
    let took = start.elapsed();
    let mut detail = format!(
        "{} layers x 4 dataflows, {} mismatches, {}",
        layers.len(),
        mismatches.len(),
        secs(took)
    );
    if let Some(first) = mismatches.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    outcome(mismatches.is_empty() && took < Duration::from_secs(30), detail)
}

fn conservation() -> Outcome {
    let arch = default_arch();
    let mods = Modifiers::default();
    let mut failures = Vec::new();
    let mut checked = 0;
    for name in BUILTIN_NAMES {
        let net = builtin(name).unwrap().resolve(1).unwrap();
        let stats = network_stats(&net);
        for kind in DataflowKind::ALL {
            for (layer, s) in net.weighted_layers().zip(&stats.layers) {
                let c = layer_access_counts(kind, layer, &arch, 1).unwrap();
                let dram = [DataType::Input, DataType::Weight, DataType::Psum].map(|d| c.get(d, Level::Dram));
                if dram != [s.input_volume, s.weight_volume, s.output_volume] {
                    failures.push(format!("{name}/{kind}/{} DRAM {dram:?}", layer.name));
                }
                checked += 1;
            }
            let report = network_energy(&net, kind, &arch, &mods).unwrap();
            for r in report.layers.iter().chain([&report.conv_aggregate, &report.aggregate]) {
                let by_type: f64 = r.per_type.iter().sum();
                let by_level: f64 = r.per_level.iter().sum();
                if by_type != by_level || by_type != r.movement {
                    failures.push(format!("{name}/{kind}/{} partitions {by_type} vs {by_level}", r.layer));
                }
            }
        }
    }
    let mut detail = format!("{checked} layer/dataflow pairs, {} violations", failures.len());
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    outcome(failures.is_empty(), detail)
}

fn codec() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lossless = true;
    for _ in 0..10_000 {
        let len = rng.random_range(0..=512);
        let p = rng.random_range(0.0..=1.0);
        let s = sparse_stream(len, p, &mut rng).unwrap();
        lossless &= rle_decode(&rle_encode(&s)).unwrap() == s;
    }
    let sparse_ratio = (0..10)
        .map(|seed| {
            compression_ratio(&sparse_stream(10_000, 0.7, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()).unwrap()
        })
        .fold(f64::INFINITY, f64::min);
    let dense: Vec<u16> = (0..10_000).map(|_| rng.random_range(1..=u16::MAX)).collect();
    let dense_ratio = compression_ratio(&dense).unwrap();
    let expansion = (rle_encode(&dense).len() * 8) as f64 / (dense.len() * 16) as f64;
    let bound = 21.0 / 16.0 + 8.0 / (dense.len() * 16) as f64;
    let relu = compression_ratio(&relu_stream(100_000, &mut ChaCha8Rng::seed_from_u64(1))).unwrap();
    outcome(
        lossless && sparse_ratio >= 1.5 && dense_ratio == 16.0 / 21.0 && expansion <= bound,
        format!(
            "10^4 round trips lossless={lossless}, 70% zeros min ratio {sparse_ratio:.3}, dense expansion {expansion:.4}, relu-like ratio {relu:.3} (reported)"
        ),
    )
}

fn precision_scaling() -> Outcome {
    let arch = default_arch();
    let mut ok = true;
    for name in ["lenet5", "alexnet"] {
        let net = builtin(name).unwrap().resolve(1).unwrap();
        for kind in DataflowKind::ALL {
            let compute = |bits: u32| {
                network_energy(&net, kind, &arch, &Modifiers::with_bits(bits))
                    .unwrap()
                    .aggregate
                    .compute
            };
            let base = compute(16);
            ok &= compute(8) == 0.25 * base && compute(10) == 0.390625 * base;
        }
    }
    outcome(
        ok,
        "compute energy x0.25 at 8 bits, x0.390625 at 10 bits (exact)".into(),
    )
}

fn compare_runtime() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    for name in BUILTIN_NAMES {
        let out = Command::new(env!("CARGO_BIN_EXE_dnncost"))
            .args(["compare", "--builtin", name, "--format", "json"])
            .output()
            .expect("run dnncost");
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
        if !out.status.success() || doc["entries"].as_array().map_or(0, Vec::len) != 4 {
            problems.push(name);
        }
    }
    let took = start.elapsed();
    outcome(
        problems.is_empty() && took < Duration::from_secs(10),
        format!(
            "compare on {} networks in {}, failures {problems:?}",
            BUILTIN_NAMES.len(),
            secs(took)
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("network totals", network_totals),
        ("winograd reduction", winograd_reduction),
        ("kernel equivalence", kernel_equivalence),
        ("dataflow dominance", dataflow_dominance),
        ("access-count oracle", access_oracle),
        ("conservation", conservation),
        ("codec", codec),
        ("precision scaling", precision_scaling),
        ("compare runtime", compare_runtime),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| outcome(false, "panicked".into()));
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name}: {}", i + 1, result.detail);
        failed += usize::from(!result.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
