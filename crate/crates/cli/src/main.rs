use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde_json::{json, Value};

use etaq_core::decompose::{self, DecomposeOptions, DecompositionResult, TargetForm};
use etaq_core::search::{self, SearchConfig, SpaceKind};
use etaq_core::spaces::{self, LevelProfile};
use etaq_core::{EtaQuotient, Error, WeierstrassCurve};

#[derive(Parser)]
#[command(name = "etaq", version, about = "Exact computations with Dedekind eta-quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Cusp,
    Holo,
}

impl From<Space> for SpaceKind {
    fn from(s: Space) -> Self {
        match s {
            Space::Cusp => SpaceKind::Cusp,
            Space::Holo => SpaceKind::Holomorphic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Modularity conditions, character, weight, cusp orders, classification.
    Check {
        /// Quotient such as "35; 1:2, 35:2".
        quotient: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// q-expansion with N integral steps past the leading exponent.
    Expand {
        quotient: String,
        #[arg(short, long, default_value_t = 10)]
        n: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Cusp representatives of a level, or the orders of a quotient at them.
    Cusps {
        /// A level N or a quotient.
        target: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Invariants of Gamma0(N).
    Profile {
        level: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Dimension of S_k or M_k for Gamma0(N).
    Dim {
        level: u64,
        weight: i64,
        #[arg(long, value_enum, default_value = "cusp")]
        space: Space,
    },
    /// Sturm bound for weight k on Gamma0(N).
    Sturm { level: u64, weight: i64 },
    /// Existence of a holomorphic eta-quotient at prime or semiprime level: `p k` or `p q k`.
    Exists {
        #[arg(num_args = 2..=3, required = true, allow_negative_numbers = true)]
        args: Vec<i64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// All eta-quotients in S_k or M_k of Gamma0(N), N squarefree.
    Enumerate {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        weight: i64,
        #[arg(long, value_enum, default_value = "cusp")]
        space: Space,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Writes a weight-2 newform as a combination of eta-quotients.
    Decompose {
        #[command(flatten)]
        input: DecomposeInput,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Recomputes a decomposition (or checks given coefficients) past the Sturm bound.
    Verify {
        #[command(flatten)]
        input: DecomposeInput,
        /// Extra q-powers compared beyond the Sturm bound.
        #[arg(long, default_value_t = 20)]
        margin: i64,
        /// Coefficient file (`i c_i` lines) to check instead of solving.
        #[arg(long)]
        coefficients: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DecomposeInput {
    /// Target coefficient file (`n a_n` lines).
    target: Option<PathBuf>,
    /// Weierstrass coefficients a1,a2,a3,a4,a6 (instead of a target file).
    #[arg(long, allow_hyphen_values = true)]
    curve: Option<String>,
    #[arg(long)]
    conductor: Option<u64>,
    /// Level for target files without a `level` line.
    #[arg(long)]
    level: Option<u64>,
    /// Coefficients computed from a curve.
    #[arg(long, default_value_t = 100)]
    n_max: usize,
    /// Multiplier a(tau) in textual form.
    #[arg(long)]
    multiplier: Option<String>,
    /// File listing the basis quotients in order.
    #[arg(long)]
    basis: Option<PathBuf>,
    #[arg(long, default_value_t = 24)]
    max_weight: i64,
    #[arg(long)]
    jobs: Option<usize>,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => 3,
            Error::NoSpanningWeight { .. } => 1,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Check { quotient, format } => check(&quotient, format),
        Command::Expand { quotient, n, format } => expand(&quotient, n, format),
        Command::Cusps { target, format } => cusps(&target, format),
        Command::Profile { level, format } => profile(level, format),
        Command::Dim { level, weight, space } => {
            let d = match space {
                Space::Cusp => spaces::dim_cusp_forms(level, weight)?,
                Space::Holo => spaces::dim_modular_forms(level, weight)?,
            };
            println!("{d}");
            Ok(0)
        }
        Command::Sturm { level, weight } => {
            if level == 0 {
                return Err(usage("level must be positive"));
            }
            println!("{}", spaces::sturm_bound(level, weight));
            Ok(0)
        }
        Command::Exists { args, format } => exists(&args, format),
        Command::Enumerate { level, weight, space, format, jobs } => {
            enumerate(level, weight, space.into(), format, jobs)
        }
        Command::Decompose { input, format } => {
            let (target, opts) = load_input(&input)?;
            let r = decompose::escalate_and_decompose(&target, &opts)?;
            print_decomposition(&r, format);
            Ok(0)
        }
        Command::Verify { input, margin, coefficients } => verify(&input, margin, coefficients),
    }
}

fn parse_quotient(s: &str) -> Result<EtaQuotient, Failure> {
    s.parse::<EtaQuotient>().map_err(|e| usage(e.to_string()))
}

fn emit(v: Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("json values serialise"));
}

fn check(text: &str, format: Format) -> Outcome {
    let f = parse_quotient(text)?;
    let (c1, c2) = f.newman_conditions();
    let class = f.classify();
    let character = f.nebentypus().ok().map(|c| c.describe());
    let orders: Vec<(String, String)> = spaces::cusp_reps(f.level())
        .into_iter()
        .map(|c| Ok((c.to_string(), f.cusp_order(c.denom)?.to_string())))
        .collect::<Result<_, Error>>()?;
    if format == Format::Json {
        emit(json!({
            "quotient": f.to_string(),
            "level": f.level(),
            "weight": f.weight().to_string(),
            "newman": [c1, c2],
            "modular": f.is_modular(),
            "character": character,
            "orders": orders.iter().map(|(c, v)| json!({"cusp": c, "order": v})).collect::<Vec<_>>(),
            "classification": class.as_str(),
        }));
        return Ok(0);
    }
    println!("quotient: {f}");
    println!("eta: {}", f.to_eta_string());
    println!("weight: {}", f.weight());
    println!("newman: sum delta*r = 0 mod 24: {}; sum (N/delta)*r = 0 mod 24: {}", yes(c1), yes(c2));
    println!("character: {}", character.as_deref().unwrap_or("undefined (not modular)"));
    println!("orders:");
    for (c, v) in &orders {
        println!("  {c} {v}");
    }
    println!("classification: {class}");
    Ok(0)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn expand(text: &str, n: i64, format: Format) -> Outcome {
    if n < 0 {
        return Err(usage("term count must be nonnegative"));
    }
    let f = parse_quotient(text)?;
    let s = f.q_expansion(n);
    if format == Format::Json {
        let terms: Vec<Value> = s
            .terms()
            .map(|(e, c)| json!({"exponent": format!("{e}/24"), "coefficient": c.to_string()}))
            .collect();
        emit(json!({"quotient": f.to_string(), "terms": terms, "trunc": format!("{}/24", s.trunc())}));
    } else {
        println!("{}", s.to_q_string());
    }
    Ok(0)
}

fn cusps(target: &str, format: Format) -> Outcome {
    if let Ok(level) = target.trim().parse::<u64>() {
        if level == 0 {
            return Err(usage("level must be positive"));
        }
        let reps: Vec<String> = spaces::cusp_reps(level).iter().map(|c| c.to_string()).collect();
        if format == Format::Json {
            emit(json!({"level": level, "cusps": reps}));
        } else {
            for c in reps {
                println!("{c}");
            }
        }
        return Ok(0);
    }
    let f = parse_quotient(target)?;
    let orders = f.cusp_orders_all()?;
    if format == Format::Json {
        let list: Vec<Value> = orders
            .orders
            .iter()
            .map(|(c, v)| json!({"cusp": c.to_string(), "order": v.to_string()}))
            .collect();
        emit(json!({"quotient": f.to_string(), "orders": list, "total": orders.total().to_string()}));
    } else {
        for (c, v) in &orders.orders {
            println!("{c} {v}");
        }
    }
    Ok(0)
}

fn profile(level: u64, format: Format) -> Outcome {
    let p = LevelProfile::new(level)?;
    let fact: Vec<String> = p
        .factorization
        .iter()
        .map(|(q, e)| if *e == 1 { q.to_string() } else { format!("{q}^{e}") })
        .collect();
    if format == Format::Json {
        emit(json!({
            "level": p.level,
            "factorization": p.factorization.iter().map(|(q, e)| json!([q, e])).collect::<Vec<_>>(),
            "divisors": p.divisors,
            "cusps": p.cusp_reps.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "index": p.index_mu,
            "eps2": p.eps2,
            "eps3": p.eps3,
            "eps_inf": p.eps_inf,
            "genus": p.genus,
        }));
        return Ok(0);
    }
    println!("level: {}", p.level);
    println!("factorization: {}", if fact.is_empty() { "1".into() } else { fact.join(" * ") });
    println!("divisors: {}", join(&p.divisors));
    println!("cusps: {}", p.cusp_reps.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
    println!("index: {}", p.index_mu);
    println!("eps2: {}", p.eps2);
    println!("eps3: {}", p.eps3);
    println!("eps_inf: {}", p.eps_inf);
    println!("genus: {}", p.genus);
    Ok(0)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn exists(args: &[i64], format: Format) -> Outcome {
    let prime = |x: i64| u64::try_from(x).map_err(|_| usage(format!("{x} is not a prime")));
    let v = match *args {
        [p, k] => spaces::exists_prime_level(prime(p)?, k)?,
        [p, q, k] => spaces::exists_semiprime_level(prime(p)?, prime(q)?, k)?,
        _ => return Err(usage("expected `p k` or `p q k`")),
    };
    if format == Format::Json {
        emit(json!({
            "exists": v.exists,
            "reason": v.reason.as_str(),
            "witness": v.witness.as_ref().map(|w| w.to_string()),
        }));
    } else {
        println!("{} ({})", if v.exists { "YES" } else { "NO" }, v.reason.as_str());
        if let Some(w) = &v.witness {
            println!("witness: {w}");
            println!("eta: {}", w.to_eta_string());
        }
    }
    Ok(if v.exists { 0 } else { 1 })
}

fn search_config(jobs: Option<usize>) -> Result<SearchConfig, Failure> {
    let mut cfg = SearchConfig::from_env()?;
    if jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    cfg.jobs = jobs;
    Ok(cfg)
}

fn enumerate(level: u64, k: i64, kind: SpaceKind, format: Format, jobs: Option<usize>) -> Outcome {
    let cfg = search_config(jobs)?;
    let r = search::enumerate_eta_quotients(level, k, kind, &cfg)?;
    if format == Format::Json {
        let found: Vec<Value> = r
            .found
            .iter()
            .zip(&r.tuples)
            .enumerate()
            .map(|(i, (f, t))| {
                json!({
                    "quotient": f.to_string(),
                    "orders": t.orders,
                    "in_basis": r.basis_indices.contains(&i),
                })
            })
            .collect();
        emit(json!({
            "level": r.level,
            "weight": r.weight,
            "space": kind.as_str(),
            "found": found,
            "independent_count": r.independent_count,
            "space_dim": r.space_dim,
            "spans": r.spans,
        }));
        return Ok(0);
    }
    println!("# level {} weight {} space {}", r.level, r.weight, kind);
    for (i, (f, t)) in r.found.iter().zip(&r.tuples).enumerate() {
        let mark = if r.basis_indices.contains(&i) { '*' } else { ' ' };
        println!("{mark} {f}  orders {}", join(&t.orders));
    }
    println!("found: {}", r.found.len());
    println!("independent: {}", r.independent_count);
    println!("dimension: {}", r.space_dim);
    println!("spans: {}", yes(r.spans));
    Ok(0)
}

fn load_input(input: &DecomposeInput) -> Result<(TargetForm, DecomposeOptions), Failure> {
    let target = match (&input.target, &input.curve) {
        (Some(_), Some(_)) => return Err(usage("give either a target file or --curve, not both")),
        (None, None) => return Err(usage("a target file or --curve is required")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            TargetForm::parse(&text, input.level.or(input.conductor))?
        }
        (None, Some(c)) => {
            let e: WeierstrassCurve = c.parse()?;
            let n = input
                .conductor
                .or(input.level)
                .ok_or_else(|| usage("--curve needs --conductor"))?;
            TargetForm::from_curve(&e, n, input.n_max)?
        }
    };
    let multiplier = input.multiplier.as_deref().map(parse_quotient).transpose()?;
    let basis = match &input.basis {
        None => None,
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Some(decompose::parse_quotient_list(&text)?)
        }
    };
    let opts = DecomposeOptions {
        multiplier,
        basis,
        max_weight: input.max_weight,
        search: search_config(input.jobs)?,
    };
    Ok((target, opts))
}

fn print_decomposition(r: &DecompositionResult, format: Format) {
    let reduced = r.reduced_basis();
    if format == Format::Json {
        let entries: Vec<Value> = r
            .coefficients
            .iter()
            .zip(&r.basis)
            .zip(&reduced)
            .map(|((c, g), q)| {
                json!({"coefficient": c.to_string(), "quotient": q.to_string(), "basis_element": g.to_string()})
            })
            .collect();
        emit(json!({
            "level": r.target.level,
            "stage_weight": r.stage_weight,
            "multiplier": r.multiplier.as_ref().map(|a| a.to_string()),
            "entries": entries,
        }));
        return;
    }
    println!("# level {} stage weight {}", r.target.level, r.stage_weight);
    if let Some(a) = &r.multiplier {
        println!("# multiplier {a}");
    }
    let terms: Vec<String> = r
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| if c.is_one() { format!("g{}", i + 1) } else { format!("({c})*g{}", i + 1) })
        .collect();
    println!("f = {}", if terms.is_empty() { "0".into() } else { terms.join(" + ") });
    for (i, (c, q)) in r.coefficients.iter().zip(&reduced).enumerate() {
        println!("g{:<3} {c}  {q}", i + 1);
    }
}

fn verify(input: &DecomposeInput, margin: i64, coefficients: Option<PathBuf>) -> Outcome {
    if margin < 0 {
        return Err(usage("--margin must be nonnegative"));
    }
    let (target, opts) = load_input(input)?;
    let result = match coefficients {
        None => decompose::escalate_and_decompose(&target, &opts)?,
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let coefficients = decompose::parse_coefficient_list(&text)?;
            let basis = opts.basis.ok_or_else(|| usage("--coefficients needs --basis"))?;
            let stage_weight = basis.first().map_or(2, |g| g.double_weight() / 2);
            DecompositionResult { target, stage_weight, multiplier: opts.multiplier, basis, coefficients }
        }
    };
    let ok = decompose::verify_decomposition(&result, margin)?;
    println!("{}", if ok { "verified" } else { "MISMATCH" });
    Ok(if ok { 0 } else { 1 })
}
