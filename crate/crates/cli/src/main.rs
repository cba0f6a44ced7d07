use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use regsynth_core::execution::{simulate, simulate_with, ExecError, HumanAgent, HumanPolicy, PlayState};
use regsynth_core::game::{
    export_dot, generate_scenario, load_game, toy_game, GameGraph, Owner, Preset, ScenarioParams, ARCH_FORMULA,
};
use regsynth_core::ltlf::{build_dfa, parse, parse_open};
use regsynth_core::product::{adversarial_values, compose, LabelTiming, ProductConfig, ProductGame};
use regsynth_core::regret::{baseline_strategy, synthesize, RegretError, RegretStrategy, SynthConfig};
use regsynth_core::Cost;

// println! panics on a closed pipe; these surface the io error instead
macro_rules! outln {
    ($($t:tt)*) => { writeln!(std::io::stdout(), $($t)*)? };
}
macro_rules! out {
    ($($t:tt)*) => { write!(std::io::stdout(), $($t)*)? };
}

#[derive(Parser, Debug)]
#[command(name = "regsynth", version, about = "Regret-minimizing strategy synthesis for human-robot tasks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Synthesize a regret-minimizing strategy within a budget.
    Synth(SynthArgs),
    /// Print the minimal budget W(s0) and the min-max strategy.
    Mincost(SourceArgs),
    /// Run a strategy against a human policy and print the trace.
    Play(PlayArgs),
    /// Print the DFA of a formula as DOT.
    Dfa(DfaArgs),
    /// Print the game or product game as DOT.
    Export(ExportArgs),
    /// Serve interactive play sessions over HTTP.
    Serve(ServeArgs),
}

#[derive(Args, Debug, Clone)]
struct SourceArgs {
    /// Game file (JSON).
    #[arg(long, conflicts_with = "scenario")]
    game: Option<PathBuf>,
    /// Built-in scenario: toy, arch or line.
    #[arg(long)]
    scenario: Option<String>,
    /// LTLf formula; scenarios supply their own.
    #[arg(long)]
    formula: Option<String>,
    /// Energy budget B; scenarios supply their own.
    #[arg(long)]
    budget: Option<u32>,
    /// Number of blocks for generated scenarios.
    #[arg(long)]
    blocks: Option<usize>,
    /// Table spots per region for generated scenarios.
    #[arg(long)]
    locations: Option<usize>,
    #[arg(long)]
    robot_cost: Option<u32>,
    #[arg(long)]
    human_cost: Option<u32>,
    /// Let the DFA read the initial state's label before the first move.
    #[arg(long)]
    consume_initial_label: bool,
    /// Ignore best alternatives that exceed the budget.
    #[arg(long)]
    budgeted_ba: bool,
    /// Also write the product game as DOT to this path.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    src: SourceArgs,
    /// Where the strategy is written.
    #[arg(long, default_value = "strategy.json")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Robot {
    /// The regret-minimizing strategy.
    Regret,
    /// The min-max strategy.
    Baseline,
}

#[derive(Args, Debug)]
struct PlayArgs {
    #[command(flatten)]
    src: SourceArgs,
    /// Strategy file from `synth`; synthesized on the fly when omitted.
    #[arg(long)]
    strategy: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "regret")]
    robot: Robot,
    /// adversarial, cost-max, cooperative, random, interactive, or
    /// `script:a1;a2;...`.
    #[arg(long, default_value = "adversarial")]
    human: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct DfaArgs {
    #[arg(long)]
    formula: String,
    /// Comma-separated atoms; defaults to the formula's own.
    #[arg(long)]
    props: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    Game,
    Product,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    src: SourceArgs,
    #[arg(long, value_enum, default_value = "product")]
    what: What,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Sessions kept in memory.
    #[arg(long, default_value_t = 64)]
    capacity: usize,
    /// Directory for evicted sessions.
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
}

/// Game, formula and budget resolved from the source flags.
struct Loaded {
    game: GameGraph,
    formula: String,
    budget: Option<u32>,
    product: ProductGame,
}

fn load(src: &SourceArgs) -> anyhow::Result<Loaded> {
    let (game, formula, budget) = match (&src.game, src.scenario.as_deref()) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let game = load_game(&text).with_context(|| format!("loading {}", path.display()))?;
            let formula = src.formula.clone().ok_or_else(|| anyhow!("--formula is required with --game"))?;
            (game, formula, src.budget)
        }
        (None, Some("toy")) => (
            toy_game(),
            src.formula.clone().unwrap_or_else(|| ARCH_FORMULA.to_string()),
            Some(src.budget.unwrap_or(7)),
        ),
        (None, Some(name)) => {
            let preset: Preset = name.parse()?;
            let mut params = ScenarioParams::minimal(preset);
            if let Some(b) = src.blocks {
                params.blocks = b;
            }
            if let Some(l) = src.locations {
                params.locations = l;
            }
            if let Some(c) = src.robot_cost {
                params.robot_cost = c;
            }
            if let Some(c) = src.human_cost {
                params.human_cost = c;
            }
            let sc = generate_scenario(&params)?;
            (
                sc.game,
                src.formula.clone().unwrap_or(sc.formula),
                Some(src.budget.unwrap_or(sc.budget)),
            )
        }
        (None, None) => bail!("one of --game or --scenario is required"),
        (Some(_), Some(_)) => bail!("--game and --scenario are mutually exclusive"),
    };
    let f = parse(&formula, game.props())?;
    let dfa = build_dfa(&f, game.props())?;
    let config = ProductConfig {
        label_timing: LabelTiming::Target,
        consume_initial_label: src.consume_initial_label,
    };
    let product = compose(&game, &dfa, config)?;
    if let Some(path) = &src.dot {
        write_out(Some(path), &product.to_dot())?;
    }
    Ok(Loaded {
        game,
        formula,
        budget,
        product,
    })
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn synth_config(src: &SourceArgs) -> SynthConfig {
    SynthConfig {
        budgeted_ba: src.budgeted_ba,
        ..SynthConfig::default()
    }
}

fn cmd_synth(a: &SynthArgs) -> anyhow::Result<()> {
    let l = load(&a.src)?;
    let budget = l.budget.ok_or_else(|| anyhow!("--budget is required"))?;
    let s = synthesize(&l.product, budget, &l.formula, synth_config(&a.src))?;
    write_out(Some(&a.out), &s.to_json())?;
    let st = &s.stats;
    outln!("product_states\tbudget\tutility_nodes\tbest_response_nodes\ttime_ms\troot_regret");
    outln!(
        "{}\t{}\t{}\t{}\t{:.1}\t{}",
        st.product_states, st.budget, st.utility_nodes, st.best_response_nodes, st.time_ms, st.root_regret
    );
    if let Some(action) = s.lookup(l.product.init(), 0, Cost::Infinite).and_then(|r| r.action.clone()) {
        outln!("opening action {action}");
    }
    Ok(())
}

fn cmd_mincost(src: &SourceArgs) -> anyhow::Result<bool> {
    let l = load(src)?;
    let p = &l.product;
    let sol = adversarial_values(p);
    let Cost::Finite(w) = sol.min_budget() else {
        outln!("infeasible");
        return Ok(false);
    };
    outln!("minimal budget {w}");
    // the strategy along its own plays, one line per robot state
    let mut seen = vec![false; p.num_states()];
    let mut stack = vec![p.init()];
    seen[p.init()] = true;
    let mut lines = Vec::new();
    while let Some(s) = stack.pop() {
        if p.is_accepting(s) {
            continue;
        }
        let next: Vec<usize> = match p.owner(s) {
            Owner::Robot => {
                let e = &p.edges(s)[sol.strategy[s].expect("finite robot state has a move")];
                lines.push((s, format!("{}\t{}\t{}", p.name(s), e.action, sol.values[s])));
                vec![e.target]
            }
            Owner::Human => p.moves(s).map(|e| e.target).collect(),
        };
        for t in next {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    lines.sort();
    for (_, line) in lines {
        outln!("{line}");
    }
    Ok(true)
}

/// Reads human moves from standard input.
struct Interactive<R> {
    input: R,
}

impl<R: BufRead> HumanAgent for Interactive<R> {
    fn choose(
        &mut self,
        _strategy: &RegretStrategy,
        p: &ProductGame,
        st: &PlayState,
        legal: &[String],
    ) -> Result<String, ExecError> {
        loop {
            eprintln!("state {} payoff {}", p.name(st.state), st.u);
            eprintln!("legal actions: {}", legal.join(" | "));
            eprint!("> ");
            let _ = std::io::stderr().flush();
            let mut line = String::new();
            match self.input.read_line(&mut line) {
                Ok(0) => return Err(ExecError::Input("end of input".into())),
                Ok(_) => {}
                Err(e) => return Err(ExecError::Input(e.to_string())),
            }
            let a = line.trim();
            if legal.iter().any(|l| l == a) {
                return Ok(a.to_string());
            }
            eprintln!("`{a}` is not legal here");
        }
    }
}

fn parse_policy(text: &str) -> anyhow::Result<HumanPolicy> {
    Ok(match text {
        "adversarial" => HumanPolicy::Adversarial,
        "cost-max" | "cost-maximizing" => HumanPolicy::CostMaximizing,
        "cooperative" => HumanPolicy::Cooperative,
        "random" => HumanPolicy::Random,
        other => match other.strip_prefix("script:") {
            Some(list) => HumanPolicy::Scripted(
                list.split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect(),
            ),
            None => bail!("unknown human policy `{other}`"),
        },
    })
}

fn cmd_play(a: &PlayArgs) -> anyhow::Result<()> {
    let l = load(&a.src)?;
    let strategy = match (&a.strategy, a.robot) {
        (Some(_), Robot::Baseline) => bail!("--robot baseline computes its own table; drop --strategy"),
        (Some(path), Robot::Regret) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RegretStrategy::from_json(&text)?
        }
        (None, Robot::Baseline) => baseline_strategy(&l.product, &l.formula)?,
        (None, Robot::Regret) => {
            let budget = l.budget.ok_or_else(|| anyhow!("--budget is required"))?;
            synthesize(&l.product, budget, &l.formula, synth_config(&a.src))?
        }
    };
    let trace = if a.human == "interactive" {
        let stdin = std::io::stdin();
        let mut agent = Interactive { input: stdin.lock() };
        simulate_with(&strategy, &l.product, &mut agent)?
    } else {
        simulate(&strategy, &l.product, &parse_policy(&a.human)?, a.seed)?
    };
    out!("{}", trace.to_json_lines());
    outln!(
        "{}",
        serde_json::json!({
            "payoff": trace.payoff,
            "satisfied": trace.satisfied,
            "regret": trace.regret,
        })
    );
    Ok(())
}

fn cmd_dfa(a: &DfaArgs) -> anyhow::Result<()> {
    let props: BTreeSet<String> = match &a.props {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => parse_open(&a.formula)?.atoms(),
    };
    let f = parse(&a.formula, &props)?;
    let dfa = build_dfa(&f, &props)?;
    write_out(a.out.as_deref(), &dfa.to_dot())
}

fn cmd_export(a: &ExportArgs) -> anyhow::Result<()> {
    let l = load(&a.src)?;
    let text = match a.what {
        What::Game => export_dot(&l.game),
        What::Product => l.product.to_dot(),
    };
    write_out(a.out.as_deref(), &text)
}

fn cmd_serve(a: &ServeArgs) -> anyhow::Result<()> {
    let config = regsynth_service::StoreConfig {
        capacity: a.capacity,
        snapshot_dir: a.snapshot_dir.clone(),
    };
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], a.port));
    let rt = tokio::runtime::Runtime::new()?;
    eprintln!("listening on {addr}");
    rt.block_on(regsynth_service::serve(addr, config))?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match &cli.cmd {
        Cmd::Synth(a) => cmd_synth(a)?,
        Cmd::Mincost(src) => {
            if !cmd_mincost(src)? {
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::Play(a) => cmd_play(a)?,
        Cmd::Dfa(a) => cmd_dfa(a)?,
        Cmd::Export(a) => cmd_export(a)?,
        Cmd::Serve(a) => cmd_serve(a)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) {
                return ExitCode::SUCCESS;
            }
            if let Some(RegretError::Infeasible { min_budget, .. }) = e.downcast_ref::<RegretError>() {
                eprintln!("error: {e}");
                eprintln!("minimal budget {min_budget}");
                return ExitCode::from(2);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
