//! Subcommand bodies. Each returns an error when any requested output could
//! not be produced; `main` maps that to a nonzero exit status.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use dereflect_core::{
    blend, decode_image, encode_png, evaluate, make_toy_example, read_image, suppress, write_png, BlendParams,
    ImageTensor, SuppressionParams,
};

use crate::config::{BenchArgs, EvalArgs, SuppressArgs, SynthArgs};
use crate::report::{format_table, write_csv, EvalRow};

/// Input/output pairs requested by `suppress`.
fn suppress_jobs(args: &SuppressArgs) -> Result<Vec<(PathBuf, PathBuf)>> {
    match &args.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Ok(args
                .paths
                .iter()
                .map(|input| {
                    let stem = input.file_stem().unwrap_or_default().to_string_lossy();
                    (input.clone(), dir.join(format!("{stem}_dereflected.png")))
                })
                .collect())
        }
        None => match args.paths.as_slice() {
            [input, output] => Ok(vec![(input.clone(), output.clone())]),
            _ => bail!("expected INPUT OUTPUT, or several inputs with --out-dir"),
        },
    }
}

pub fn run_suppress(args: &SuppressArgs) -> Result<()> {
    let params = args.solve.params()?;
    let jobs = suppress_jobs(args)?;
    let mut failures = 0;
    for (input, output) in &jobs {
        if let Err(e) = suppress_one(input, output, &params, args.time, args.time_total) {
            eprintln!("{}: {e:#}", input.display());
            failures += 1;
        }
    }
    if failures > 0 {
        bail!("{failures} of {} images failed", jobs.len());
    }
    Ok(())
}

fn suppress_one(input: &Path, output: &Path, params: &SuppressionParams, time: Option<u32>, total: bool) -> Result<()> {
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let y = decode_image(&bytes)?;
    let out = suppress(&y, params);
    let png = encode_png(&out)?;
    fs::write(output, &png).with_context(|| format!("writing {}", output.display()))?;

    if let Some(runs) = time {
        let start = Instant::now();
        for _ in 0..runs {
            if total {
                let y = decode_image(&bytes)?;
                std::hint::black_box(encode_png(&suppress(&y, params))?);
            } else {
                std::hint::black_box(suppress(&y, params));
            }
        }
        let mean_ms = start.elapsed().as_secs_f64() * 1e3 / runs as f64;
        let scope = if total { "decode+solve+encode" } else { "solve" };
        println!(
            "{}: {}x{}x{} mean {scope} time {mean_ms:.2} ms over {runs} runs",
            input.display(),
            y.height(),
            y.width(),
            y.num_channels()
        );
    }
    Ok(())
}

pub fn run_synth(args: &SynthArgs) -> Result<()> {
    let (t, r) = match (&args.transmission, &args.reflection) {
        (Some(t), Some(r)) => (read_image(t)?, read_image(r)?),
        _ => make_toy_example(args.height, args.width, args.seed)?,
    };
    let params = BlendParams::new(args.w, args.sigma)?;
    let y = blend(&t, &r, &params)?;
    let reference = t.map(|v| params.w() * v);

    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let outputs: [(&str, &ImageTensor); 4] = [
        ("transmission.png", &t),
        ("reflection.png", &r),
        ("blend.png", &y),
        ("reference.png", &reference),
    ];
    for (name, image) in outputs {
        let path = args.out_dir.join(name);
        write_png(&path, image).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "wrote {}x{}x{} blend (w = {}, sigma = {}) to {}",
        y.height(),
        y.width(),
        y.num_channels(),
        params.w(),
        params.sigma(),
        args.out_dir.display()
    );
    Ok(())
}

/// Metrics for one pair, computed exactly as the library call would.
pub fn eval_pair(reference: &Path, test: &Path) -> Result<EvalRow> {
    let a = read_image(reference).with_context(|| format!("reading {}", reference.display()))?;
    let b = read_image(test).with_context(|| format!("reading {}", test.display()))?;
    let report = evaluate(&a, &b)?;
    Ok(EvalRow {
        image: test.display().to_string(),
        psnr_db: report.psnr_db,
        ssim: report.ssim,
    })
}

pub fn run_eval(args: &EvalArgs) -> Result<()> {
    if !args.pairs.chunks_exact(2).remainder().is_empty() {
        bail!("eval takes REF TEST pairs; got {} paths", args.pairs.len());
    }
    let results: Vec<_> = args
        .pairs
        .chunks(2)
        .map(|p| eval_pair(&p[0], &p[1]).map_err(|e| (p[1].display().to_string(), format!("{e:#}"))))
        .collect();
    print!("{}", format_table(&results));

    let rows: Vec<EvalRow> = results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
    if let Some(path) = &args.csv {
        if path.as_os_str() == "-" {
            write_csv(std::io::stdout().lock(), &rows)?;
        } else {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(file, &rows)?;
        }
    }
    let failed = results.len() - rows.len();
    if failed > 0 {
        for (image, err) in results.iter().filter_map(|r| r.as_ref().err()) {
            eprintln!("{image}: {err}");
        }
        bail!("{failed} of {} pairs failed", results.len());
    }
    Ok(())
}

pub fn run_bench(args: &BenchArgs) -> Result<()> {
    let params = args.solve.params()?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{:>12}  {:>12}  {:>6}", "size", "mean_ms", "runs")?;
    for &(h, w) in &args.sizes {
        let (t, r) = make_toy_example(h, w, 0)?;
        let y = blend(&t, &r, &BlendParams::new(0.7, 4.0)?)?;
        // Warm-up builds the transform plans for this size.
        std::hint::black_box(suppress(&y, &params));
        let start = Instant::now();
        for _ in 0..args.time {
            std::hint::black_box(suppress(&y, &params));
        }
        let mean_ms = start.elapsed().as_secs_f64() * 1e3 / args.time as f64;
        writeln!(
            out,
            "{:>12}  {mean_ms:>12.2}  {:>6}",
            format!("{}x{}x3", y.height(), y.width()),
            args.time
        )?;
    }
    Ok(())
}
