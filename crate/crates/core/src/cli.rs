//! Command-line front end. Every command prints one JSON document (or JSON lines for `table`).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::algebra::{self, AlgebraElement, DEFAULT_TABLE_BOUND};
use crate::arith::{format_rational, Rational};
use crate::braid;
use crate::coset::{enumerate_coset_matrices, CosetMatrix, Margins, OffDiagonalType};
use crate::error::{Error, Result};
use crate::graded::{self, GradedElement};
use crate::nu2::{self, Method};
use crate::perm::{Oracle, DEFAULT_LIMIT};
use crate::universal;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;

/// Environment variable overriding the brute-force size limit.
pub const NMAX_ENV: &str = "YOUNG_COSETS_NMAX";

#[derive(Debug, Parser)]
#[command(
    name = "young-cosets",
    version,
    about = "Double coset algebras of symmetric groups by Young subgroups"
)]
pub struct Cli {
    /// Largest N for which permutations of S_N are enumerated (at most 9).
    #[arg(long, global = true, env = NMAX_ENV, default_value_t = DEFAULT_LIMIT)]
    pub nmax: u32,

    /// Write the JSON here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct MarginArgs {
    /// Block sizes, e.g. `2,2,1`.
    #[arg(long = "n", value_parser = parse_list)]
    pub n: List,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub nu: usize,
    /// Off-diagonal entries as `i,j,v` triples (1-based) separated by `;`.
    #[arg(long, default_value = "")]
    pub a: String,
    #[arg(long, default_value = "")]
    pub b: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List coset matrices with their sizes.
    Cosets(MarginArgs),
    /// Size of one double coset.
    Mu {
        #[command(flatten)]
        margins: MarginArgs,
        /// Row-major entries.
        #[arg(long, value_parser = parse_list)]
        matrix: List,
    },
    /// Product of two basis elements.
    Product {
        #[command(flatten)]
        margins: MarginArgs,
        #[arg(long, value_parser = parse_list)]
        a: List,
        #[arg(long, value_parser = parse_list)]
        b: List,
        /// Multiply in the group algebra instead.
        #[arg(long)]
        oracle: bool,
    },
    /// All nonzero structure constants, one JSON object per line.
    Table {
        #[command(flatten)]
        margins: MarginArgs,
        #[arg(long, default_value_t = DEFAULT_TABLE_BOUND)]
        bound: usize,
    },
    /// Check associativity on all basis triples.
    VerifyAssoc {
        #[command(flatten)]
        margins: MarginArgs,
        #[arg(long, default_value_t = DEFAULT_TABLE_BOUND)]
        bound: usize,
    },
    /// Compare every structure constant with the permutation oracle.
    OracleCheck(MarginArgs),
    /// Universal product, or one universal constant when `--c` is given.
    Universal {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        c: Option<String>,
    },
    /// Universal constants at eps_j = 1/n_j.
    Specialize {
        #[command(flatten)]
        margins: MarginArgs,
        #[arg(long, default_value = "")]
        a: String,
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long)]
        c: Option<String>,
        /// Skip the domain check on the operands and substitute anyway.
        #[arg(long)]
        force: bool,
    },
    /// Verify the infinitesimal braid relations.
    BraidCheck {
        #[command(flatten)]
        margins: MarginArgs,
        /// Multiply with the permutation oracle.
        #[arg(long)]
        oracle: bool,
        /// Use `r_ij` without the `n_i n_j` factor.
        #[arg(long, conflicts_with = "oracle")]
        unnormalized: bool,
    },
    /// Two-block constants.
    Nu2 {
        #[command(subcommand)]
        command: Nu2Command,
    },
    /// Poisson bracket of two basis elements of the graded algebra.
    Poisson(PairArgs),
    /// Graded product and first-order term of two basis elements.
    Graded(PairArgs),
    /// Randomized comparison of structure constants against the oracle.
    Fuzz {
        #[command(flatten)]
        margins: MarginArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iterations: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum Nu2Command {
    /// `s_ab^c`.
    S {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        c: u32,
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n2: u32,
        /// sum, closed, eq3, oracle or all.
        #[arg(long, default_value = "sum")]
        method: String,
    },
    /// Universal two-block constant.
    Universal {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long)]
        c: u32,
    },
    /// Associativity identity for all a, b, c, d.
    Assoc {
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n2: u32,
    },
}

/// Comma-separated nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List(pub Vec<u32>);

fn parse_list(s: &str) -> std::result::Result<List, String> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(List)
}

/// `"1,2,1;2,1,1"` as an off-diagonal type; `;` and whitespace separate triples.
pub fn parse_offdiag(s: &str, nu: usize) -> Result<OffDiagonalType> {
    let mut triples = Vec::new();
    for part in s
        .split(|c: char| c == ';' || c.is_whitespace())
        .filter(|p| !p.is_empty())
    {
        let xs = parse_list(part).map_err(Error::Parse)?.0;
        let [i, j, v] = xs[..] else {
            return Err(Error::Parse(format!("expected i,j,v, got {part:?}")));
        };
        if i == 0 || j == 0 {
            return Err(Error::InvalidIndex("indices are 1-based".into()));
        }
        triples.push((i as usize - 1, j as usize - 1, v));
    }
    OffDiagonalType::from_triples(nu, &triples)
}

/// Result of a command.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Json(Value),
    Lines(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: Output,
}

impl Outcome {
    fn ok(v: Value) -> Self {
        Outcome {
            code: EXIT_OK,
            output: Output::Json(v),
        }
    }

    fn verdict(passed: bool, v: Value) -> Self {
        Outcome {
            code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
            output: Output::Json(v),
        }
    }

    pub fn render(&self) -> String {
        match &self.output {
            Output::Json(v) => format!("{}\n", serde_json::to_string(v).unwrap()),
            Output::Lines(vs) => vs
                .iter()
                .map(|v| format!("{}\n", serde_json::to_string(v).unwrap()))
                .collect(),
        }
    }
}

pub fn error_json(e: &Error) -> Value {
    match e {
        Error::PoleAtSpecialization { j, m } => json!({
            "error": "pole",
            "j": j + 1,
            "m": m,
            "factor": format!("(1 - {m} eps_{})", j + 1),
            "message": e.to_string(),
        }),
        Error::OutsideDomain { block, star, n } => json!({
            "error": "outside_domain",
            "block": block,
            "star": star,
            "n": n,
            "message": e.to_string(),
        }),
        _ => json!({ "error": "invalid_input", "message": e.to_string() }),
    }
}

fn value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

fn margins(m: &MarginArgs) -> Result<Margins> {
    Margins::new(m.n.0.clone())
}

fn matrix(m: &Margins, entries: &List) -> Result<CosetMatrix> {
    CosetMatrix::new(m.clone(), entries.0.clone())
}

fn pair(p: &PairArgs) -> Result<(OffDiagonalType, OffDiagonalType)> {
    Ok((parse_offdiag(&p.a, p.nu)?, parse_offdiag(&p.b, p.nu)?))
}

fn graded_first_order(map: &std::collections::BTreeMap<usize, GradedElement>) -> Value {
    Value::Object(
        map.iter()
            .map(|(j, g)| ((j + 1).to_string(), value(g)))
            .collect(),
    )
}

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    let nmax = cli.nmax;
    match &cli.command {
        Command::Cosets(m) => {
            let m = margins(m)?;
            let list: Vec<Value> = enumerate_coset_matrices(&m)
                .iter()
                .map(|c| json!({ "entries": c.rows(), "mu": c.coset_size().to_string() }))
                .collect();
            Ok(Outcome::ok(
                json!({ "n": m.sizes(), "count": list.len(), "matrices": list }),
            ))
        }
        Command::Mu {
            margins: m,
            matrix: e,
        } => {
            let m = margins(m)?;
            Ok(Outcome::ok(Value::String(
                matrix(&m, e)?.coset_size().to_string(),
            )))
        }
        Command::Product {
            margins: m,
            a,
            b,
            oracle,
        } => {
            let m = margins(m)?;
            let (a, b) = (matrix(&m, a)?, matrix(&m, b)?);
            let p = if *oracle {
                Oracle::new(&m, nmax)?.multiply_basis(&a, &b)?
            } else {
                algebra::multiply_basis(&a, &b)?
            };
            Ok(Outcome::ok(value(&p)))
        }
        Command::Table { margins: m, bound } => {
            let table = algebra::product_table(&margins(m)?, *bound)?;
            Ok(Outcome {
                code: EXIT_OK,
                output: Output::Lines(table.iter().map(value).collect()),
            })
        }
        Command::VerifyAssoc { margins: m, bound } => {
            let r = algebra::verify_associativity(&margins(m)?, *bound)?;
            Ok(Outcome::verdict(r.passed(), value(&r)))
        }
        Command::OracleCheck(m) => {
            let m = margins(m)?;
            let oracle = Oracle::new(&m, nmax)?;
            let table = oracle.table();
            let basis = enumerate_coset_matrices(&m);
            let mut mismatches = Vec::new();
            let mut count = 0usize;
            for a in &basis {
                for b in &basis {
                    for c in &basis {
                        count += 1;
                        let formula = algebra::structure_constant(a, b, c)?;
                        let brute = table
                            .get(&(a.clone(), b.clone(), c.clone()))
                            .cloned()
                            .unwrap_or_default();
                        if formula != brute {
                            mismatches.push(json!({
                                "a": a.rows(), "b": b.rows(), "c": c.rows(),
                                "formula": rational(&formula), "oracle": rational(&brute),
                            }));
                        }
                    }
                }
            }
            let message = if mismatches.is_empty() {
                format!("all {count} triples agree")
            } else {
                format!("{} of {count} triples disagree", mismatches.len())
            };
            let passed = mismatches.is_empty();
            Ok(Outcome::verdict(
                passed,
                json!({ "n": m.sizes(), "triples": count, "mismatches": mismatches, "message": message }),
            ))
        }
        Command::Universal { pair: p, c } => {
            let (a, b) = pair(p)?;
            match c {
                Some(c) => {
                    let c = parse_offdiag(c, p.nu)?;
                    Ok(Outcome::ok(value(
                        &universal::universal_structure_constant(&a, &b, &c)?,
                    )))
                }
                None => Ok(Outcome::ok(value(&universal::multiply_basis(&a, &b)?))),
            }
        }
        Command::Specialize {
            margins: m,
            a,
            b,
            c,
            force,
        } => {
            let m = margins(m)?;
            let (a, b) = (parse_offdiag(a, m.nu())?, parse_offdiag(b, m.nu())?);
            match (c, force) {
                (Some(c), false) => {
                    let c = parse_offdiag(c, m.nu())?;
                    Ok(Outcome::ok(rational(&universal::specialize_constant(
                        &a, &b, &c, &m,
                    )?)))
                }
                (Some(c), true) => {
                    let c = parse_offdiag(c, m.nu())?;
                    Ok(Outcome::ok(rational(
                        &universal::universal_structure_constant(&a, &b, &c)?.specialize(&m)?,
                    )))
                }
                (None, force) => {
                    if !force {
                        for t in [&a, &b] {
                            if !t.fits(&m) {
                                let j = (0..m.nu()).find(|&j| t.star(j) > m.size(j)).unwrap();
                                return Err(Error::OutsideDomain {
                                    block: j + 1,
                                    star: t.star(j),
                                    n: m.size(j),
                                });
                            }
                        }
                    }
                    let values = universal::multiply_basis(&a, &b)?.specialize(&m)?;
                    let terms: Vec<Value> = values
                        .iter()
                        .map(|(t, q)| json!({ "offdiag": value(t), "coeff": rational(q) }))
                        .collect();
                    Ok(Outcome::ok(json!({ "n": m.sizes(), "terms": terms })))
                }
            }
        }
        Command::BraidCheck {
            margins: m,
            oracle,
            unnormalized,
        } => {
            let m = margins(m)?;
            let report = if *oracle {
                braid::check_relations_oracle(&m, &Oracle::new(&m, nmax)?)?
            } else if *unnormalized {
                braid::check_relations_unnormalized(&m)?
            } else {
                braid::check_relations(&m)?
            };
            Ok(Outcome::verdict(
                report.all_hold(),
                value(&report.instances),
            ))
        }
        Command::Nu2 { command } => nu2_command(command, nmax),
        Command::Poisson(p) => {
            let (a, b) = pair(p)?;
            Ok(Outcome::ok(value(&graded::poisson_bracket(
                &GradedElement::basis(&a),
                &GradedElement::basis(&b),
            )?)))
        }
        Command::Graded(p) => {
            let (a, b) = pair(p)?;
            let product =
                graded::graded_multiply(&GradedElement::basis(&a), &GradedElement::basis(&b))?;
            let first = graded::first_order_term(&a, &b)?;
            Ok(Outcome::ok(
                json!({ "product": value(&product), "first_order": graded_first_order(&first) }),
            ))
        }
        Command::Fuzz {
            margins: m,
            seed,
            iterations,
        } => fuzz(&margins(m)?, *seed, *iterations, nmax),
    }
}

fn nu2_command(command: &Nu2Command, nmax: u32) -> Result<Outcome> {
    match command {
        Nu2Command::S {
            a,
            b,
            c,
            n1,
            n2,
            method,
        } => {
            if method == "all" {
                let mut values = serde_json::Map::new();
                let mut seen: Vec<Rational> = Vec::new();
                for m in [
                    Method::Sum,
                    Method::Closed,
                    Method::ProductFormula,
                    Method::Oracle,
                ] {
                    let q = match m {
                        Method::Oracle if n1 + n2 > nmax => continue,
                        Method::Oracle => nu2::s_oracle(*a, *b, *c, *n1, *n2, nmax)?,
                        _ => nu2::s_constant(m, *a, *b, *c, *n1, *n2)?,
                    };
                    values.insert(m.to_string(), rational(&q));
                    seen.push(q);
                }
                let agree = seen.windows(2).all(|w| w[0] == w[1]);
                values.insert("agree".into(), Value::Bool(agree));
                return Ok(Outcome::verdict(agree, Value::Object(values)));
            }
            let method: Method = method.parse()?;
            let q = match method {
                Method::Oracle => nu2::s_oracle(*a, *b, *c, *n1, *n2, nmax)?,
                _ => nu2::s_constant(method, *a, *b, *c, *n1, *n2)?,
            };
            Ok(Outcome::ok(rational(&q)))
        }
        Nu2Command::Universal { a, b, c } => {
            Ok(Outcome::ok(value(&nu2::universal_s_nu2(*a, *b, *c)?)))
        }
        Nu2Command::Assoc { n1, n2 } => {
            let bad = nu2::associativity_violations(*n1, *n2)?;
            Ok(Outcome::verdict(
                bad.is_empty(),
                json!({ "n1": n1, "n2": n2, "violations": bad }),
            ))
        }
    }
}

fn fuzz(m: &Margins, seed: u64, iterations: u32, nmax: u32) -> Result<Outcome> {
    let oracle = Oracle::new(m, nmax)?;
    let basis = enumerate_coset_matrices(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..iterations {
        let a = basis.choose(&mut rng).unwrap();
        let b = basis.choose(&mut rng).unwrap();
        let formula = algebra::multiply_basis(a, b)?;
        let brute = oracle.multiply_basis(a, b)?;
        // also a random element against the basis expansion
        let weight = Rational::from_integer(rng.gen_range(-3i64..=3).into());
        let x = AlgebraElement::basis(a)
            .scale(&weight)
            .add(&AlgebraElement::basis(b))?;
        let lhs = x.multiply(&AlgebraElement::basis(b))?;
        let rhs = oracle.multiply(&x, &AlgebraElement::basis(b))?;
        if formula != brute || lhs != rhs || formula.mass() != Rational::from_integer(1.into()) {
            failures.push(json!({ "a": a.rows(), "b": b.rows() }));
        }
    }
    let passed = failures.is_empty();
    Ok(Outcome::verdict(
        passed,
        json!({ "n": m.sizes(), "seed": seed, "iterations": iterations, "failures": failures }),
    ))
}

/// What `run` produced: exit code, text, and where the text goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub text: String,
    /// Usage errors go to standard error.
    pub stderr: bool,
    pub path: Option<PathBuf>,
}

/// Parses `args` and runs the command.
pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let stderr = e.use_stderr();
            return Invocation {
                code: if stderr { EXIT_ERROR } else { EXIT_OK },
                text: e.render().to_string(),
                stderr,
                path: None,
            };
        }
    };
    let path = cli.output.clone();
    let (code, text) = match dispatch(&cli) {
        Ok(out) => (out.code, out.render()),
        Err(e) => (
            EXIT_ERROR,
            format!("{}\n", serde_json::to_string(&error_json(&e)).unwrap()),
        ),
    };
    Invocation {
        code,
        text,
        stderr: false,
        path,
    }
}
