use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qflat::claims::{run_claim, verify_all, ClaimParams};
use qflat::criterion::{build_excluder, truant_prefix, IntegerSet, TruantOutcome};
use qflat::recover::{phi9, phi9_chain, phi9_preimages, proper_sublattices};
use qflat::represent::{represents_integer_with_budget, represents_lattice_with_budget};
use qflat::{
    is_isometric, lll_reduce, reduce_binary, reduced_forms_of_disc, short_vectors_with_budget, vectors_of_norm_with_budget,
    Budget, Lattice, QfError, ReducedBinary, Status,
};

#[derive(Parser)]
#[command(name = "qflat", version, about = "Exact computations with positive-definite integral lattices")]
struct Cli {
    /// Search-node budget per query.
    #[arg(long, global = true, env = "QFLAT_BUDGET")]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a lattice (Gauss for rank 2, LLL otherwise).
    Reduce {
        #[arg(long)]
        lattice: PathBuf,
    },
    /// Vectors up to a norm bound, or of one exact norm.
    Shortvec {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long, default_value_t = 0)]
        bound: i64,
        #[arg(long)]
        norm: Option<i64>,
    },
    /// Whether the target represents an integer or a lattice.
    Represents {
        #[arg(long)]
        target: PathBuf,
        /// Lattice file or integer.
        #[arg(long)]
        source: String,
    },
    /// Isometry test with a witness.
    Isometric {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Reduced forms and genera of a negative discriminant.
    Classes {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Truant search over a prefix of an integer set.
    Truants {
        /// Set file, or a generator name such as `naturals`.
        #[arg(long)]
        set: String,
        /// Last index searched (zero-based).
        #[arg(long)]
        upto: usize,
        /// Largest element materialized for generated sets.
        #[arg(long, default_value_t = 1000)]
        set_bound: i64,
    },
    /// Lattice whose values in the set skip the k-th element.
    Excluder {
        #[arg(long)]
        set: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        base: PathBuf,
        #[arg(long, default_value_t = 200)]
        verify_bound: i64,
    },
    /// Proper sublattices of a binary lattice up to an index.
    Sublattices {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        max_index: i64,
    },
    /// The shift map on a reduced binary `a,b,c`.
    Phi9 {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        form: Vec<i64>,
        /// List preimages instead of the image.
        #[arg(long)]
        preimages: bool,
        /// Iterate until the second minimum is at most 12.
        #[arg(long)]
        chain: bool,
    },
    /// Run one named check.
    Verify {
        #[arg(long)]
        claim: String,
        #[arg(long)]
        m: Option<i64>,
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        a: Option<i64>,
        #[arg(long)]
        b: Option<i64>,
        #[arg(long)]
        h: Option<i64>,
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Run every named check.
    VerifyAll {
        /// μ₂ bound of the bounded sublattice scans.
        #[arg(long, default_value_t = 60)]
        bound: i64,
    },
}

fn read_lattice(path: &Path) -> qflat::Result<Lattice> {
    let text = std::fs::read_to_string(path).map_err(|e| QfError::Parse(format!("{}: {e}", path.display())))?;
    Lattice::parse(&text)
}

fn read_set(spec: &str, bound: i64) -> qflat::Result<IntegerSet> {
    if let Ok(set) = IntegerSet::generated(spec, bound) {
        return Ok(set);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| QfError::Parse(format!("{spec}: {e}")))?;
    IntegerSet::parse_json(&text, bound)
}

fn form(v: &[i64]) -> qflat::Result<ReducedBinary> {
    if v.len() != 3 {
        return Err(QfError::Parse(format!("expected a,b,c, got {} values", v.len())));
    }
    let g = Lattice::binary(v[0], v[1], v[2])?.gram();
    Ok(reduce_binary(&g)?.0)
}

/// JSON output and whether it reports a failed claim.
fn run(cmd: Command) -> qflat::Result<(Value, Status)> {
    let ok = |v: Value| Ok((v, Status::Pass));
    match cmd {
        Command::Reduce { lattice } => {
            let l = read_lattice(&lattice)?;
            if l.rank() == 2 {
                let (r, u) = reduce_binary(&l.gram())?;
                ok(json!({ "reduced": r.rows(), "transform": u }))
            } else {
                let (r, u) = lll_reduce(&l)?;
                let n = l.rank();
                let rows: Vec<&[i64]> = u.chunks(n.max(1)).collect();
                ok(json!({ "reduced": r.gram().rows(), "transform": rows }))
            }
        }
        Command::Shortvec { lattice, bound, norm } => {
            let l = read_lattice(&lattice)?;
            let budget = Budget::default();
            let vectors: Vec<Value> = match norm {
                Some(n) => vectors_of_norm_with_budget(&l, n, &budget)?.into_iter().map(|v| json!({ "vector": v.coords, "norm": n })).collect(),
                None => short_vectors_with_budget(&l, bound, &budget)?
                    .entries
                    .into_iter()
                    .map(|(v, n)| json!({ "vector": v.coords, "norm": n }))
                    .collect(),
            };
            ok(json!({ "count": vectors.len(), "vectors": vectors }))
        }
        Command::Represents { target, source } => {
            let t = read_lattice(&target)?;
            let budget = Budget::default();
            if let Ok(n) = source.trim().parse::<i64>() {
                let w = represents_integer_with_budget(&t, n, &budget)?;
                ok(json!({ "represented": w.is_some(), "witness": w.map(|v| v.coords) }))
            } else {
                let s = read_lattice(Path::new(&source))?;
                let w = represents_lattice_with_budget(&t, &s, &budget)?;
                ok(json!({ "represented": w.is_some(), "witness": w.map(|e| e.rows()) }))
            }
        }
        Command::Isometric { a, b } => {
            let w = is_isometric(&read_lattice(&a)?, &read_lattice(&b)?)?;
            ok(json!({ "isometric": w.is_some(), "witness": w.map(|e| e.rows()) }))
        }
        Command::Classes { disc } => {
            let list = reduced_forms_of_disc(disc)?;
            let genera: Vec<Vec<String>> =
                list.genus_partition.iter().map(|g| g.iter().map(|&i| list.classes[i].to_string()).collect()).collect();
            ok(json!({
                "disc": disc,
                "class_number": list.classes.len(),
                "classes": list.classes.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "genera": genera,
            }))
        }
        Command::Truants { set, upto, set_bound } => {
            let s = read_set(&set, set_bound)?;
            let entries = truant_prefix(&s, upto, Budget::default_limit())?;
            let mut status = Status::Pass;
            let rows: Vec<Value> = entries
                .iter()
                .map(|e| match &e.outcome {
                    TruantOutcome::Truant(c) => json!({ "index": e.index, "value": e.value, "truant": true, "certificate": c.to_json() }),
                    TruantOutcome::NotTruant => json!({ "index": e.index, "value": e.value, "truant": false }),
                    TruantOutcome::BudgetExceeded { budget } => {
                        status = Status::BudgetExceeded;
                        json!({ "index": e.index, "value": e.value, "budget_exceeded": budget })
                    }
                })
                .collect();
            let truants: Vec<i64> =
                entries.iter().filter(|e| matches!(e.outcome, TruantOutcome::Truant(_))).map(|e| e.value).collect();
            Ok((json!({ "entries": rows, "truants": truants }), status))
        }
        Command::Excluder { set, k, base, verify_bound } => {
            let s = read_set(&set, verify_bound)?;
            let (_, rep) = build_excluder(&read_lattice(&base)?, &s, k, verify_bound, &Budget::default())?;
            Ok((rep.to_value(), rep.status))
        }
        Command::Sublattices { lattice, max_index } => {
            let list = proper_sublattices(&read_lattice(&lattice)?, max_index)?;
            ok(serde_json::to_value(&list).expect("serializes"))
        }
        Command::Phi9 { form: f, preimages, chain } => {
            let k = form(&f)?;
            if preimages {
                let pre = phi9_preimages(k)?;
                let rows: Vec<Value> = pre.iter().map(|p| json!({ "form": p.form.rows(), "in_l13": p.in_l13 })).collect();
                ok(json!({ "target": k.rows(), "preimages": rows }))
            } else if chain {
                let c = phi9_chain(k)?;
                ok(json!({ "start": k.rows(), "steps": c.steps.iter().map(|s| s.rows()).collect::<Vec<_>>() }))
            } else {
                ok(json!({ "form": k.rows(), "image": phi9(k)?.rows() }))
            }
        }
        Command::Verify { claim, m, p, a, b, h, bound } => {
            let rep = run_claim(&claim, &ClaimParams { m, p, a, b, h, bound })?;
            Ok((rep.to_value(), rep.status))
        }
        Command::VerifyAll { bound } => {
            let rep = verify_all(bound)?;
            Ok((rep.to_value(), rep.status))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(b) = cli.budget {
        Budget::set_default_limit(b);
    }
    let start = Instant::now();
    let outcome = run(cli.command);
    eprintln!("wall time: {:.3}s", start.elapsed().as_secs_f64());
    match outcome {
        Ok((v, status)) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
            ExitCode::from(status.exit_code() as u8)
        }
        Err(QfError::BudgetExceeded { budget }) => {
            println!("{}", json!({ "status": "budget-exceeded", "budget": budget }));
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
