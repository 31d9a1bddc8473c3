use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use lightpath::arena::FillPolicy;
use lightpath::lightpath::{CaseStats, HistWord};
use lightpath::methods::Method;
use lightpath::oracle::{check_equivalence, generate_ops, mask_values, Distribution, FailureReport, ValidateEvery};
use lightpath::word::Word;
use rayon::prelude::*;

use crate::common::{make, parse_fault, parse_list, CliError, CliResult, MethodArgs};

#[derive(Args, Debug)]
pub struct FuzzArgs {
    /// A method name, a comma-separated list, or `all`.
    #[arg(long, default_value = "all")]
    pub method: String,
    #[command(flatten)]
    pub m: MethodArgs,
    /// Operations per run.
    #[arg(long, default_value_t = 10_000)]
    pub ops: usize,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated fill policies; bare `rand` uses the run's seed.
    #[arg(long, default_value = "zeros,ones,alt,rand")]
    pub fill: String,
    /// Comma-separated distributions.
    #[arg(long, default_value = "uniform,zipf,crafted")]
    pub dist: String,
    /// Validate after every k-th write (0: only at the end).
    #[arg(long)]
    pub validate_every: Option<usize>,
    /// Where the JSON-lines failure report goes.
    #[arg(long, default_value = "fuzz-failure.jsonl")]
    pub artifact: PathBuf,
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

struct Job {
    method: Method,
    dist: Distribution,
    fill: FillPolicy,
    seed: u64,
}

pub fn run(args: &FuzzArgs) -> CliResult<String> {
    crate::with_word!(args.m.w, fuzz(args))
}

fn fuzz<W: Word + HistWord>(args: &FuzzArgs) -> CliResult<String> {
    let n = args.m.n()?;
    let params = args.m.params();
    let fault = args.inject_fault.as_deref().map(parse_fault).transpose()?;
    let explicit = args.method != "all";
    let methods: Vec<Method> = if explicit { parse_list(&args.method)? } else { Method::ALL.to_vec() };
    let dists: Vec<Distribution> = parse_list(&args.dist)?;
    let fills: Vec<String> = args.fill.split(',').map(|s| s.trim().to_string()).collect();
    for f in &fills {
        f.parse::<FillPolicy>().map_err(CliError::Usage)?;
    }
    let every = match args.validate_every {
        Some(0) => ValidateEvery::Never,
        Some(k) => ValidateEvery::Writes(k),
        None if n <= 256 => ValidateEvery::Writes(1),
        None => ValidateEvery::Writes(64),
    };

    let mut out = String::new();
    let mut runnable = vec![];
    for &m in &methods {
        match make::<W>(m, n, params, FillPolicy::Zeros, fault) {
            Ok(_) => runnable.push(m),
            Err(e) if explicit => return Err(e),
            Err(e) => writeln!(out, "{m}: skipped ({e})").unwrap(),
        }
    }
    let mut jobs = vec![];
    for &method in &runnable {
        for &dist in &dists {
            for seed in args.seed..args.seed + args.seeds {
                for f in &fills {
                    let fill = if f == "rand" { FillPolicy::Random(seed) } else { f.parse().unwrap() };
                    jobs.push(Job { method, dist, fill, seed });
                }
            }
        }
    }

    let results: Vec<_> = jobs
        .par_iter()
        .map(|job| {
            let mut ops = generate_ops::<W>(n, args.ops, job.dist, job.seed);
            if let Some(b) = params.b {
                mask_values(&mut ops, b);
            }
            let mut a = make::<W>(job.method, n, params, job.fill, fault).expect("checked above");
            let r = check_equivalence(&mut *a, &ops, every);
            (r, a.case_stats(), ops)
        })
        .collect();

    let mut per_method: Vec<(Method, usize, u64, u64, Option<CaseStats>)> =
        runnable.iter().map(|&m| (m, 0, 0, 0, None)).collect();
    for (job, (r, cases, ops)) in jobs.iter().zip(results) {
        let slot = per_method.iter_mut().find(|s| s.0 == job.method).unwrap();
        match r {
            Ok(s) => {
                slot.1 += 1;
                slot.2 = slot.2.max(s.max_read_probes);
                slot.3 = slot.3.max(s.max_write_probes);
                if let Some(c) = cases {
                    slot.4.get_or_insert_with(CaseStats::default).merge(&c);
                }
            }
            Err(d) => {
                let upto = match &d {
                    lightpath::oracle::Divergence::Value { op_index, .. }
                    | lightpath::oracle::Divergence::Invariant { op_index, .. } => *op_index,
                };
                let report = FailureReport {
                    method: job.method.to_string(),
                    n,
                    w: W::BITS,
                    t: params.t,
                    h: params.h,
                    b: params.b,
                    fill: job.fill.to_string(),
                    seed: Some(job.seed),
                    fault: args.inject_fault.clone(),
                    divergence: d.clone(),
                    ops: ops[..=upto.min(ops.len().saturating_sub(1))].iter().map(|o| o.to_string()).collect(),
                };
                std::fs::write(&args.artifact, report.to_json_line() + "\n")
                    .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", args.artifact.display())))?;
                return Err(CliError::Failed(format!(
                    "{out}{} n={n} {} fill={} seed={}: {d}\nfailure report written to {}",
                    job.method,
                    job.dist,
                    job.fill,
                    job.seed,
                    args.artifact.display()
                )));
            }
        }
    }
    for (m, runs, rp, wp, cases) in per_method {
        write!(out, "{m}: {runs} runs ok, max probes read {rp} write {wp}").unwrap();
        if let Some(c) = cases {
            write!(
                out,
                "; cases already-black={} root-white-gray={} root-gray-black={} case1={} case2={} case3={} case4={} case5={}",
                c.already_black, c.root_white_to_gray, c.root_gray_to_black, c.cases[0], c.cases[1], c.cases[2], c.cases[3], c.cases[4]
            )
            .unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}
