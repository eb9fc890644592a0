use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use dnncost::optkit::rle::rle_pairs;
use dnncost::optkit::streams::{relu_stream, sparse_stream};
use dnncost::optkit::{compression_ratio, rle_decode, rle_encode, SparseStats};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{usage_error, Ctx};
use crate::args::{CompressArgs, Format};
use crate::output::{emit, to_json, Table};

#[derive(Serialize)]
struct Summary {
    source: String,
    words: usize,
    zeros: usize,
    density: f64,
    pairs: usize,
    bytes: usize,
    ratio: f64,
    lossless: bool,
}

fn read_words(path: &Path) -> Result<Vec<u16>> {
    let bytes = fs::read(path).with_context(|| format!("cannot read '{}'", path.display()))?;
    ensure!(
        bytes.len() % 2 == 0,
        "'{}' holds an odd number of bytes",
        path.display()
    );
    Ok(bytes
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]))
        .collect())
}

fn synthetic(ctx: &Ctx, args: &CompressArgs) -> Result<(String, Vec<u16>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let n = args.n as usize;
    if args.relu {
        return Ok((format!("relu n={n} seed={}", ctx.seed), relu_stream(n, &mut rng)));
    }
    let stream = sparse_stream(n, args.sparsity, &mut rng)?;
    Ok((
        format!("iid sparsity={} n={n} seed={}", args.sparsity, ctx.seed),
        stream,
    ))
}

fn summarize(source: String, words: &[u16], encoded: &[u8]) -> Result<Summary> {
    let stats = SparseStats::of_words(words);
    Ok(Summary {
        source,
        words: words.len(),
        zeros: stats.zeros,
        density: stats.density,
        pairs: rle_pairs(encoded)?.len(),
        bytes: encoded.len(),
        ratio: if words.is_empty() {
            0.0
        } else {
            compression_ratio(words)?
        },
        lossless: rle_decode(encoded)? == words,
    })
}

fn render(format: Format, s: &Summary) -> Result<String> {
    if format == Format::Json {
        return to_json(s);
    }
    let mut table = Table::new(&[
        "source", "words", "zeros", "density", "pairs", "bytes", "ratio", "lossless",
    ]);
    let (density, ratio) = if format == Format::Csv {
        (s.density.to_string(), s.ratio.to_string())
    } else {
        (format!("{:.4}", s.density), format!("{:.4}", s.ratio))
    };
    table.row(vec![
        s.source.clone(),
        s.words.to_string(),
        s.zeros.to_string(),
        density,
        s.pairs.to_string(),
        s.bytes.to_string(),
        ratio,
        s.lossless.to_string(),
    ]);
    if format == Format::Csv {
        table.to_csv()
    } else {
        Ok(table.render())
    }
}

pub fn run(ctx: &Ctx, args: &CompressArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.sparsity) {
        bail!("sparsity must be in [0, 1], got {}", args.sparsity);
    }
    if !args.encode && !args.decode {
        let (source, words) = synthetic(ctx, args)?;
        let summary = summarize(source, &words, &rle_encode(&words))?;
        return ctx.emit(&render(ctx.format, &summary)?);
    }
    // The bitstream or raw words go to --out; the summary goes to stdout.
    let Some(out) = ctx.out else {
        usage_error("--encode and --decode write their result to --out <PATH>");
    };
    let summary = if args.encode {
        let (source, words) = match &args.input {
            Some(path) => (path.display().to_string(), read_words(path)?),
            None => synthetic(ctx, args)?,
        };
        let encoded = rle_encode(&words);
        fs::write(out, &encoded).with_context(|| format!("cannot write '{}'", out.display()))?;
        summarize(source, &words, &encoded)?
    } else {
        let Some(path) = &args.input else {
            usage_error("--decode requires --input <PATH>");
        };
        let encoded = fs::read(path).with_context(|| format!("cannot read '{}'", path.display()))?;
        let words = rle_decode(&encoded).with_context(|| format!("in '{}'", path.display()))?;
        let raw: Vec<u8> = words.iter().flat_map(|w| w.to_be_bytes()).collect();
        fs::write(out, raw).with_context(|| format!("cannot write '{}'", out.display()))?;
        summarize(path.display().to_string(), &words, &encoded)?
    };
    emit(None, &render(ctx.format, &summary)?)
}
