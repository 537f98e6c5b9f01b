use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use laffaille::campaign::{human_summary, recheck, run_suite, to_json_lines, CaseConfig, Status, Suite, SuiteReport};
use laffaille::functors::{breuil_to_fl, fl_to_breuil, section_compute};
use laffaille::gen::{self, rng_for};
use laffaille::json::{self, Object};
use laffaille::kisin::kisin_to_breuil;
use laffaille::{Ambient, AmbientParams};

/// Workbench for Fontaine-Laffaille, Kisin and strongly divisible modules.
#[derive(Parser, Debug)]
#[command(name = "laffaille", version)]
struct Cli {
    #[command(flatten)]
    params: ParamArgs,
    /// Output directory; objects and reports go to stdout when unset.
    #[arg(long, global = true, env = "LAFFAILLE_OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long, global = true, default_value_t = 3)]
    p: u64,
    /// Residue degree of k over F_p.
    #[arg(long, global = true, default_value_t = 1)]
    f: usize,
    /// Target p-adic precision.
    #[arg(long = "Np", global = true, default_value_t = 6)]
    n_p: u32,
    /// Divided-power truncation; derived from the precision when unset.
    #[arg(long = "Ngamma", global = true)]
    n_gamma: Option<usize>,
    #[arg(long, global = true, default_value_t = 2)]
    r: u32,
    /// Coefficients of the unit a in E(u) = u + pa, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<i64>>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a random instance from a seed.
    Gen(GenArgs),
    /// Apply a functor to an object read from JSON.
    Apply {
        #[arg(value_enum)]
        functor: Functor,
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute the section s: M/uM -> M of a Breuil (or Kisin) module.
    Section {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run verification suites; exit 1 if any fails.
    Verify(VerifyArgs),
    /// Summarise a JSON-lines report; exit 1 if any suite failed.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Fl,
    KisinGls,
    BreuilFromFl,
    BreuilFromKisin,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Functor {
    /// FL module to strongly divisible module.
    Mls,
    /// Strongly divisible (or Kisin) module to FL module.
    Mfl,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long)]
    d: Option<usize>,
    /// Sorted jumps in 0..=r, comma separated; random when unset.
    #[arg(long, value_delimiter = ',')]
    jumps: Option<Vec<u32>>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// FL only: a module whose Ftil is not invertible.
    #[arg(long)]
    not_strong: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name or `all`; repeatable.
    #[arg(long, required = true)]
    suite: Vec<String>,
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// `a..b` (inclusive), `a..=b`, or a comma list.
    #[arg(long)]
    seeds: Option<String>,
    /// Largest rank drawn.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Random elements per instance.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Re-check a stored counterexample instead of drawing instances.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty seed range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().with_context(|| format!("bad seed {x:?}"))).collect()
}

fn parse_suites(names: &[String]) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(n.parse().map_err(|_| anyhow::anyhow!("unknown suite {n:?}"))?);
        }
    }
    Ok(out)
}

fn ambient(args: &ParamArgs) -> Result<Ambient> {
    let mut params = AmbientParams::with_residue_degree(args.p, args.f, args.r, args.n_p)?;
    if let Some(a) = &args.a {
        params = params.with_a(a.clone())?;
    }
    if let Some(n) = args.n_gamma {
        params = params.with_n_gamma(n)?;
    }
    Ok(Ambient::new(params)?)
}

fn read_object(path: &Path) -> Result<(Ambient, Object)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    json::from_str(&text).with_context(|| format!("decoding {}", path.display()))
}

/// Prints to stdout; a reader that hangs up early is not an error.
fn print_stdout(text: &str) -> Result<()> {
    let mut o = std::io::stdout().lock();
    match o.write_all(text.as_bytes()).and_then(|_| o.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Writes to `out/name`, or prints when there is no output directory.
fn emit(out: &Option<PathBuf>, name: &str, text: &str) -> Result<()> {
    match out {
        None => print_stdout(&format!("{}\n", text.trim_end()))?,
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn gen_cmd(amb: &Ambient, g: &GenArgs) -> Result<(String, Object)> {
    let mut rng = rng_for(g.seed);
    let d = match (&g.jumps, g.d) {
        (Some(j), Some(d)) if j.len() != d => bail!("--d {d} but {} jumps given", j.len()),
        (Some(j), _) => j.len(),
        (None, d) => d.unwrap_or(2),
    };
    if d == 0 {
        bail!("rank must be positive");
    }
    let jumps = match &g.jumps {
        Some(j) => {
            if j.windows(2).any(|w| w[0] > w[1]) || j.iter().any(|&x| x > amb.r()) {
                bail!("jumps must be sorted and lie in 0..={}", amb.r());
            }
            j.clone()
        }
        None => gen::random_jumps(amb, &mut rng, d),
    };
    if g.not_strong && !matches!(g.kind, Kind::Fl) {
        bail!("--not-strong applies to `gen fl` only");
    }
    let fl = |rng: &mut _| if g.not_strong { gen::fl_random_not_strong(amb, rng, jumps.clone()) } else { gen::fl_random(amb, rng, jumps.clone()) };
    let obj = match g.kind {
        Kind::Fl => Object::Fl(fl(&mut rng)?),
        Kind::KisinGls => Object::Kisin(gen::kisin_random_gls(amb, &mut rng, jumps.clone())?),
        Kind::BreuilFromFl => Object::Breuil(fl_to_breuil(amb, &fl(&mut rng)?)),
        Kind::BreuilFromKisin => Object::Breuil(kisin_to_breuil(amb, &gen::kisin_random_gls(amb, &mut rng, jumps.clone())?)?),
    };
    let stem = format!("{:?}", g.kind).to_lowercase();
    Ok((format!("{stem}-seed{}.json", g.seed), obj))
}

fn to_breuil(amb: &Ambient, obj: Object) -> Result<laffaille::BreuilModule> {
    Ok(match obj {
        Object::Breuil(b) => b,
        Object::Kisin(k) => kisin_to_breuil(amb, &k)?,
        Object::Fl(_) => bail!("expected a Breuil or Kisin module, found an FL module"),
        Object::Section(_) => bail!("expected a Breuil or Kisin module, found a section"),
    })
}

fn verify_cmd(amb: &Ambient, v: &VerifyArgs, out: &Option<PathBuf>) -> Result<bool> {
    let suites = parse_suites(&v.suite)?;
    let seeds = match (&v.seeds, v.seed) {
        (Some(s), _) => parse_seeds(s)?,
        (None, Some(s)) => vec![s],
        (None, None) => (1..=100).collect(),
    };
    let cfg = CaseConfig { d_max: v.d, samples: v.samples };

    if let Some(path) = &v.input {
        let (amb, obj) = read_object(path)?;
        let mut ok = true;
        for &suite in &suites {
            for &seed in &seeds {
                let c = recheck(&amb, suite, &obj, seed, cfg);
                print_stdout(&format!("{}\n", serde_json::to_string(&c)?))?;
                ok &= c.status == Status::Pass;
            }
        }
        eprintln!("{}", if ok { "counterexample no longer fails" } else { "counterexample reproduces" });
        return Ok(ok);
    }

    let start = Instant::now();
    let mut reports = Vec::new();
    let mut cases = Vec::new();
    let mut timing = Vec::new();
    for &suite in &suites {
        let t = Instant::now();
        let (r, c) = run_suite(amb, suite, &seeds, cfg);
        timing.push(format!("{:<26} {:.2}s", suite.name(), t.elapsed().as_secs_f64()));
        reports.push(r);
        cases.extend(c);
    }
    // timing stays out of the JSON lines so reports are byte-identical
    let summary = format!(
        "{}\n\ntiming:\n{}\ntotal {:.2}s\n",
        human_summary(&reports),
        timing.join("\n"),
        start.elapsed().as_secs_f64()
    );
    let lines = to_json_lines(&reports, &cases);
    match out {
        None => {
            print_stdout(&lines)?;
            eprint!("{summary}");
        }
        Some(dir) => {
            emit(out, "report.jsonl", &lines)?;
            emit(out, "summary.txt", &summary)?;
            for c in cases.iter().filter(|c| c.counterexample.is_some()) {
                let doc = c.counterexample.as_ref().expect("filtered");
                let name = format!("counterexample-{}-seed{}.json", c.suite.name(), c.seed);
                fs::create_dir_all(dir)?;
                fs::write(dir.join(name), serde_json::to_string_pretty(doc)?)?;
            }
            eprint!("{summary}");
        }
    }
    Ok(reports.iter().all(|r| r.ok))
}

fn report_cmd(path: &Path) -> Result<bool> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut reports: Vec<SuiteReport> = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
        if let Some(s) = v.get("summary") {
            reports.push(serde_json::from_value(s.clone()).with_context(|| format!("summary on line {}", i + 1))?);
        }
    }
    if reports.is_empty() {
        bail!("{} has no summary lines", path.display());
    }
    let mut text = format!("{}\n", human_summary(&reports));
    for r in reports.iter().filter(|r| !r.failing_seeds.is_empty()) {
        text.push_str(&format!("{}: failing seeds {:?}\n", r.suite.name(), r.failing_seeds));
    }
    print_stdout(&text)?;
    Ok(reports.iter().all(|r| r.ok))
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::Report { input } => report_cmd(input),
        Cmd::Apply { functor, input } => {
            let (amb, obj) = read_object(input)?;
            let (name, res) = match functor {
                Functor::Mls => match obj {
                    Object::Fl(m) => ("mls.json", Object::Breuil(fl_to_breuil(&amb, &m))),
                    _ => bail!("`apply mls` takes an FL module"),
                },
                Functor::Mfl => ("mfl.json", Object::Fl(breuil_to_fl(&amb, &to_breuil(&amb, obj)?)?)),
            };
            emit(&cli.out, name, &json::to_string(&amb, &res))?;
            Ok(true)
        }
        Cmd::Section { input } => {
            let (amb, obj) = read_object(input)?;
            let res = section_compute(&amb, &to_breuil(&amb, obj)?)?;
            emit(&cli.out, "section.json", &json::to_string(&amb, &Object::Section(res)))?;
            Ok(true)
        }
        Cmd::Gen(g) => {
            let amb = ambient(&cli.params)?;
            let (name, obj) = gen_cmd(&amb, g)?;
            emit(&cli.out, &name, &json::to_string(&amb, &obj))?;
            Ok(true)
        }
        Cmd::Verify(v) => {
            let amb = ambient(&cli.params)?;
            verify_cmd(&amb, v, &cli.out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_syntax() {
        assert_eq!(parse_seeds("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_seeds("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_seeds("5, 9").unwrap(), vec![5, 9]);
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn suite_lists() {
        assert_eq!(parse_suites(&["all".into()]).unwrap().len(), Suite::ALL.len());
        assert!(parse_suites(&["bogus".into()]).is_err());
    }
}
