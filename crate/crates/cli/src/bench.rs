use std::time::Instant;

use clap::{Args, ValueEnum};
use lightpath::arena::FillPolicy;
use lightpath::lightpath::HistWord;
use lightpath::methods::Method;
use lightpath::oracle::{generate_ops, mask_values, Distribution, Op};
use lightpath::word::Word;
use serde::Serialize;

use crate::common::{make, CliResult, MethodArgs, Percentiles};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub method: Method,
    #[command(flatten)]
    pub m: MethodArgs,
    /// Number of operations after initialization.
    #[arg(long, default_value_t = 10_000)]
    pub ops: usize,
    #[arg(long, default_value = "uniform")]
    pub dist: Distribution,
    #[arg(long, default_value = "rand")]
    pub fill: FillPolicy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also report wall times. They vary between runs, so reports with
    /// timings are not reproducible byte for byte.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub init_ns: u64,
    pub read_ns: Percentiles,
    pub write_ns: Percentiles,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub method: String,
    pub n: usize,
    pub w: u32,
    pub t: Option<u32>,
    pub h: Option<usize>,
    pub b: Option<u32>,
    pub ops: usize,
    pub dist: String,
    pub fill: String,
    pub seed: u64,
    pub init_read_probes: u64,
    pub init_write_probes: u64,
    pub space_bits: u64,
    pub redundancy_bits: u64,
    pub read_probes: Percentiles,
    pub write_probes: Percentiles,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

pub fn run(args: &BenchArgs) -> CliResult<String> {
    let report = crate::with_word!(args.m.w, measure(args))?;
    Ok(match args.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => csv(&report),
    })
}

fn measure<W: Word + HistWord>(args: &BenchArgs) -> CliResult<BenchReport> {
    let m = &args.m;
    let n = m.n()?;
    let mut ops = generate_ops::<W>(n, args.ops, args.dist, args.seed);
    if let Some(b) = m.b {
        if b >= 1 && b <= W::BITS {
            mask_values(&mut ops, b);
        }
    }
    let clock = Instant::now();
    let mut a = make::<W>(args.method, n, m.params(), args.fill, None)?;
    let init_ns = clock.elapsed().as_nanos() as u64;
    let init = a.probes();
    let (mut rp, mut wp, mut rt, mut wt) = (vec![], vec![], vec![], vec![]);
    for op in &ops {
        let before = a.probes();
        let clock = Instant::now();
        match *op {
            Op::Write(l, x) => {
                a.write(l, x);
                wt.push(clock.elapsed().as_nanos() as u64);
                let p = a.probes() - before;
                wp.push(p.reads + p.writes);
            }
            Op::Read(l, _) => {
                std::hint::black_box(a.read(l));
                rt.push(clock.elapsed().as_nanos() as u64);
                let p = a.probes() - before;
                rp.push(p.reads + p.writes);
            }
        }
    }
    Ok(BenchReport {
        method: args.method.to_string(),
        n,
        w: W::BITS,
        t: m.t,
        h: m.h,
        b: m.b,
        ops: args.ops,
        dist: args.dist.to_string(),
        fill: args.fill.to_string(),
        seed: args.seed,
        init_read_probes: init.reads,
        init_write_probes: init.writes,
        space_bits: a.space_bits(),
        redundancy_bits: a.redundancy_bits(),
        read_probes: Percentiles::of(rp),
        write_probes: Percentiles::of(wp),
        timing: args.timing.then(|| Timing { init_ns, read_ns: Percentiles::of(rt), write_ns: Percentiles::of(wt) }),
    })
}

fn csv(r: &BenchReport) -> String {
    let opt = |x: Option<String>| x.unwrap_or_default();
    let mut cols: Vec<(String, String)> = vec![
        ("method".into(), r.method.clone()),
        ("n".into(), r.n.to_string()),
        ("w".into(), r.w.to_string()),
        ("t".into(), opt(r.t.map(|x| x.to_string()))),
        ("h".into(), opt(r.h.map(|x| x.to_string()))),
        ("b".into(), opt(r.b.map(|x| x.to_string()))),
        ("ops".into(), r.ops.to_string()),
        ("dist".into(), r.dist.clone()),
        ("fill".into(), r.fill.clone()),
        ("seed".into(), r.seed.to_string()),
        ("init_read_probes".into(), r.init_read_probes.to_string()),
        ("init_write_probes".into(), r.init_write_probes.to_string()),
        ("space_bits".into(), r.space_bits.to_string()),
        ("redundancy_bits".into(), r.redundancy_bits.to_string()),
    ];
    let pct = |prefix: &str, p: &Percentiles| {
        [("p50", p.p50), ("p90", p.p90), ("p99", p.p99), ("max", p.max)].map(|(k, v)| (format!("{prefix}_{k}"), v.to_string()))
    };
    cols.extend(pct("read_probes", &r.read_probes));
    cols.extend(pct("write_probes", &r.write_probes));
    if let Some(t) = &r.timing {
        cols.push(("init_ns".into(), t.init_ns.to_string()));
        cols.extend(pct("read_ns", &t.read_ns));
        cols.extend(pct("write_ns", &t.write_ns));
    }
    let (head, row): (Vec<String>, Vec<String>) = cols.into_iter().unzip();
    format!("{}\n{}\n", head.join(","), row.join(","))
}
