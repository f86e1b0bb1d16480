//! Command-line front end.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::{CtComplex, CtPage};
use crate::graphs::StableGraph;
use crate::reps::{is_restriction, pieri_induce, Partition, SnModule};
use crate::taut::{self, GetzlerRelationData, StrataVector};
use crate::weights;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest `n` accepted without `--force`.
pub const FEASIBLE_N: usize = 6;

pub const GOLDEN_PAGE2: &str = include_str!("../data/ct_n3_page2.json");
pub const GOLDEN_PAGE3: &str = include_str!("../data/ct_n3_page3.json");

#[derive(Parser, Debug)]
#[command(name = "m1taut", version, about = "Strata relations on genus-one moduli spaces and Cohen-Taylor pages")]
pub struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Allow n beyond the feasibility bound
    #[arg(long, global = true)]
    force: bool,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Wdvv,
    Getzler,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Figures,
    Gorenstein,
    Theorems,
    Reps,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List isomorphism classes of stable graphs
    Graphs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        codim: usize,
    },
    /// Generators, relation ranks and even Betti numbers
    Betti {
        #[arg(long)]
        n: usize,
        /// Use WDVV relations only
        #[arg(long)]
        without_getzler: bool,
    },
    /// Dump relation vectors
    Relations {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        codim: usize,
        #[arg(long, value_enum, default_value_t = Family::All)]
        family: Family,
    },
    /// Cohen-Taylor spectral sequence pages
    Ct {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        page: u8,
        /// Single entry as P,Q
        #[arg(long, value_parser = parse_entry)]
        entry: Option<(usize, usize)>,
    },
    /// Run verification suites
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
}

fn parse_entry(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s.split_once(',').ok_or("expected P,Q")?;
    Ok((p.trim().parse().map_err(|e| format!("{e}"))?, q.trim().parse().map_err(|e| format!("{e}"))?))
}

struct UsageError(String);

/// Relation data from `M1TAUT_DATA` if set, otherwise the bundled copy.
fn relation_data() -> Result<GetzlerRelationData, UsageError> {
    match std::env::var_os("M1TAUT_DATA") {
        Some(path) => GetzlerRelationData::load(&path)
            .map_err(|e| UsageError(format!("{}: {e}", std::path::Path::new(&path).display()))),
        None => Ok(GetzlerRelationData::bundled()),
    }
}

fn check_n(n: usize, force: bool) -> Result<(), UsageError> {
    if n == 0 {
        return Err(UsageError("n must be at least 1".into()));
    }
    if n > FEASIBLE_N && !force {
        return Err(UsageError(format!("n = {n} exceeds the feasibility bound {FEASIBLE_N}; pass --force to run anyway")));
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buf));
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, UsageError> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Graphs { n, codim } => {
            check_n(*n, cli.force)?;
            let graphs = if codim <= n { taut::strata(*n)[*codim].clone() } else { Vec::new() };
            if json {
                let list: Vec<_> = graphs
                    .iter()
                    .map(|g| json!({"graph": g.to_json(), "automorphisms": g.automorphism_count()}))
                    .collect();
                emit(out, &json!({"n": n, "codim": codim, "count": graphs.len(), "graphs": list}));
            } else {
                let _ = writeln!(out, "{} graphs with n = {n}, codim = {codim}", graphs.len());
                for (i, g) in graphs.iter().enumerate() {
                    let _ = writeln!(out, "{i:>4}  |Aut| = {:<3} {g}", g.automorphism_count());
                }
            }
            Ok(EXIT_OK)
        }
        Command::Betti { n, without_getzler } => {
            check_n(*n, cli.force)?;
            let data = if *without_getzler { None } else { Some(relation_data()?) };
            let rows = taut::betti_table(*n, data.as_ref());
            let betti: Vec<usize> = rows.iter().map(|r| r.betti).collect();
            let palindromic = betti.iter().eq(betti.iter().rev());
            if json {
                let table: Vec<_> = rows
                    .iter()
                    .map(|r| json!({"codim": r.codim, "generators": r.generators, "relation_rank": r.relation_rank, "betti": r.betti}))
                    .collect();
                emit(out, &json!({"n": n, "getzler": data.is_some(), "rows": table, "betti": betti, "palindromic": palindromic}));
            } else {
                let line: Vec<String> = betti.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
            Ok(EXIT_OK)
        }
        Command::Relations { n, codim, family } => {
            check_n(*n, cli.force)?;
            let mut rels: Vec<StrataVector> = Vec::new();
            if matches!(family, Family::Wdvv | Family::All) {
                rels.extend(taut::wdvv_relations(*n, *codim));
            }
            if matches!(family, Family::Getzler | Family::All) {
                rels.extend(taut::getzler_relations(*n, *codim, &relation_data()?));
            }
            let r = if codim <= n { taut::relation_rank(*n, *codim, &rels) } else { 0 };
            if json {
                let list: Vec<_> = rels.iter().map(StrataVector::to_json).collect();
                emit(out, &json!({"n": n, "codim": codim, "rank": r, "relations": list}));
            } else {
                let _ = writeln!(out, "{} relations, rank {r}", rels.len());
                for v in &rels {
                    let terms: Vec<String> = v
                        .terms()
                        .map(|(k, c)| format!("{}*[{}]", crate::linalg::format_rational(c), StableGraph::from_key(k).expect("own key")))
                        .collect();
                    let _ = writeln!(out, "{}", terms.join(" + "));
                }
            }
            Ok(EXIT_OK)
        }
        Command::Ct { n, page, entry } => {
            check_n(*n, cli.force)?;
            let mut pg = CtComplex::new(*n).page(*page);
            if let Some((p, q)) = entry {
                if pg.entry(*p, *q).is_none() {
                    return Err(UsageError(format!("no entry ({p},{q}) for n = {n}")));
                }
                pg.entries.retain(|k, _| k == &(*p, *q));
            }
            if json {
                emit(out, &pg.to_json());
            } else {
                for e in pg.entries.values() {
                    let _ = writeln!(out, "({},{})  dim {:<5} {}", e.p, e.q, e.dim, e.sl2);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite, n_max } => {
            if *n_max > FEASIBLE_N && !cli.force {
                return Err(UsageError(format!("--n-max {n_max} exceeds the feasibility bound {FEASIBLE_N}")));
            }
            let needs_data = matches!(suite, Suite::Gorenstein | Suite::Theorems | Suite::All);
            let data = if needs_data { Some(relation_data()?) } else { None };
            let checks = run_suite(*suite, *n_max, data.as_ref());
            let ok = checks.iter().all(|c| c.passed);
            if json {
                let list: Vec<_> = checks.iter().map(Check::to_json).collect();
                emit(out, &json!({"suite": format!("{suite:?}").to_lowercase(), "passed": ok, "checks": list}));
            } else {
                for c in &checks {
                    let _ = writeln!(out, "{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
            }
            Ok(if ok { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

/// Outcome of one verification check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"check": self.name, "status": if self.passed { "pass" } else { "fail" }, "detail": self.detail})
    }
}

/// Runs a suite; `data` is required for the suites touching relations.
pub fn run_suite(suite: Suite, n_max: usize, data: Option<&GetzlerRelationData>) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Figures | Suite::All) {
        out.extend(figures_suite());
    }
    if matches!(suite, Suite::Gorenstein | Suite::All) {
        out.extend(gorenstein_suite(n_max, data.expect("relation data")));
    }
    if matches!(suite, Suite::Theorems | Suite::All) {
        for c in weights::verify_theorems(n_max, data.expect("relation data")) {
            out.push(Check::new(format!("{} n={}", c.theorem, c.n), c.passed, c.witness.to_string()));
        }
    }
    if matches!(suite, Suite::Reps | Suite::All) {
        out.extend(reps_suite());
    }
    out
}

fn compare_page(name: &str, golden: &str, computed: &CtPage) -> Check {
    let expected = CtPage::from_json(&serde_json::from_str(golden).expect("golden file is JSON")).expect("golden page parses");
    let mismatches: Vec<String> = expected
        .entries
        .iter()
        .filter(|(k, e)| computed.entries.get(k) != Some(e))
        .map(|((p, q), e)| {
            let got = computed.entries.get(&(*p, *q)).map(|g| g.sl2.to_string()).unwrap_or_else(|| "missing".into());
            format!("({p},{q}) expected {} got {got}", e.sl2)
        })
        .collect();
    let passed = mismatches.is_empty() && expected.entries.len() == computed.entries.len();
    let detail = if passed {
        format!("{} entries match", expected.entries.len())
    } else {
        format!("golden {name} mismatch: {}", mismatches.join("; "))
    };
    Check::new(name, passed, detail)
}

fn figures_suite() -> Vec<Check> {
    let c = CtComplex::new(3);
    vec![
        compare_page("page-2 n=3 golden", GOLDEN_PAGE2, &c.page(2)),
        compare_page("page-3 n=3 golden", GOLDEN_PAGE3, &c.page(3)),
    ]
}

fn gorenstein_suite(n_max: usize, data: &GetzlerRelationData) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 1..=n_max.min(FEASIBLE_N) {
        let b: Vec<usize> = taut::betti_table(n, Some(data)).into_iter().map(|r| r.betti).collect();
        let pal = b.iter().eq(b.iter().rev());
        out.push(Check::new(format!("palindromic betti n={n}"), pal, format!("{b:?}")));
    }
    if n_max >= 4 {
        let with = taut::betti_table(4, Some(data));
        let without = taut::betti_table(4, None);
        let deficit = without[2].betti as i64 - with[2].betti as i64;
        out.push(Check::new("getzler deficit n=4 codim=2", deficit == 1, format!("deficit {deficit}")));
    }
    out
}

fn reps_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let p = |v: Vec<u32>| Partition::new(v).expect("valid partition");
    let twos = |k: usize| vec![2u32; k];
    for k in 1..=4usize {
        let got = pieri_induce(2, &p(twos(k)));
        let mut expected = SnModule::irreducible(p(twos(k + 1)));
        let mut a = vec![3];
        a.extend(twos(k - 1));
        a.push(1);
        let mut b = vec![4];
        b.extend(twos(k - 1));
        expected = expected.direct_sum(&SnModule::irreducible(p(a))).direct_sum(&SnModule::irreducible(p(b)));
        out.push(Check::new(format!("pieri 2 x (2^{k})"), got == expected, format!("{got}")));
    }
    for k in [2usize, 3] {
        let mut a = vec![3];
        a.extend(twos(k - 1));
        a.push(1);
        let mut b = vec![4];
        b.extend(twos(k - 1));
        let (va, vb) = (SnModule::irreducible(p(a)), SnModule::irreducible(p(b)));
        for (label, m) in [("first", va.clone()), ("second", vb.clone()), ("sum", va.direct_sum(&vb))] {
            let w = is_restriction(&m);
            out.push(Check::new(
                format!("not a restriction k={k} {label}"),
                w.is_none(),
                w.map(|w| format!("unexpected witness {w}")).unwrap_or_else(|| format!("{m}")),
            ));
        }
    }
    let w = is_restriction(&SnModule::irreducible(p(vec![4])));
    out.push(Check::new(
        "V(4) is a restriction",
        w.as_ref() == Some(&SnModule::irreducible(p(vec![5]))),
        w.map(|w| format!("witness {w}")).unwrap_or_else(|| "no witness".into()),
    ));
    let c = CtComplex::new(4);
    let m = c.sn_module(2, 1, true);
    let expected = crate::reps::restrict(
        &SnModule::irreducible(p(vec![5])).direct_sum(&SnModule::irreducible(p(vec![4, 1]))),
    );
    out.push(Check::new(
        "weight-4 invariants n=4",
        m.as_ref().ok() == Some(&expected),
        match m {
            Ok(m) => format!("{m} (dim {})", m.dimension()),
            Err(e) => e.to_string(),
        },
    ));
    out
}
