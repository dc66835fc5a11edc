//! Command-line front end.
//!
//! Exit codes: 0 decided or verified, 2 resource limit hit or not
//! certified, 1 usage or input error.

use std::io::Write;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use crate::element::expr::{Scope, GRAMMAR};
use crate::element::{order_bounded, Element, Order};
use crate::engel::{
    self, build_witness, decide_engel_element, decide_engel_pair, engel_iterate, exponent_survey, lemma_check,
    periodic_state_search, EngelBudget, ElementVerdict, LemmaData, Verdict,
};
use crate::groups::{self, GroupPresentation, KMembership};
use crate::mealy::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "agr", version, about = "Automaton group computations and Engel certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Built-in group name (grigorchuk, gupta-sidki) or MAF file path.
    #[arg(short = 'G', long = "group", default_value = "grigorchuk")]
    group: String,
    /// Binding `name=expr`, evaluated left to right; may repeat.
    #[arg(long = "define", value_name = "NAME=EXPR")]
    define: Vec<String>,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long, default_value_t = 20_000)]
    max_states: usize,
    #[arg(long, default_value_t = 100_000)]
    max_vertices: usize,
    #[arg(long, default_value_t = 64)]
    max_c: usize,
}

impl BudgetArgs {
    fn budget(&self) -> EngelBudget {
        EngelBudget { max_states: self.max_states, max_vertices: self.max_vertices, max_c: self.max_c }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Image of a word under an element.
    Act {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// Product of expressions, printed as a minimized machine.
    Mul {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(required = true)]
        exprs: Vec<String>,
    },
    Order {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(long, default_value_t = engel::ORDER_LIMIT)]
        limit: usize,
    },
    /// Section `g@w`.
    Section {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    /// The element `w*g` acting as `g` below `w`.
    Insert {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(short = 'w', long = "word")]
        word: String,
    },
    #[command(name = "engel-pair", disable_help_flag = true)]
    EngelPair {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'g')]
        g: String,
        #[arg(short = 'h')]
        h: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, action = ArgAction::Help)]
        help: Option<bool>,
    },
    #[command(name = "engel-element", disable_help_flag = true)]
    EngelElement {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'h')]
        h: String,
        #[arg(long, action = ArgAction::Help)]
        help: Option<bool>,
    },
    /// Sweeps start tuples over a ball of radius `r`.
    #[command(name = "exponent-survey")]
    ExponentSurvey {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'r')]
        r: usize,
        /// Extra start tuple, entries separated by commas at top level.
        #[arg(long)]
        seed: Vec<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Checks a built-in periodic certificate.
    Lemma {
        #[arg(value_parser = ["grigorchuk", "gupta-sidki"])]
        which: String,
    },
    #[command(disable_help_flag = true)]
    Witness {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'h')]
        h: String,
        /// Checks `E_{period·m}@(v_1·word^m) = A_{0,1}` for `m <= checks`.
        #[arg(long, default_value_t = 1)]
        checks: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_states: usize,
        #[arg(long, action = ArgAction::Help)]
        help: Option<bool>,
    },
    /// Common states of `E_c` and `E_{c+period}`.
    #[command(disable_help_flag = true)]
    Search {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'g')]
        g: String,
        #[arg(short = 'h')]
        h: String,
        #[arg(long, default_value_t = 30)]
        cmax: usize,
        #[arg(long, default_value_t = 9)]
        pmax: usize,
        #[arg(long, default_value_t = 200_000)]
        max_states: usize,
        #[arg(long, action = ArgAction::Help)]
        help: Option<bool>,
    },
    Contraction {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'L', long = "radius", default_value_t = 8)]
        radius: usize,
    },
    /// Level quotient order, and the index of K for the Grigorchuk group.
    Quotient {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(short = 'm', long = "level")]
        level: usize,
    },
}

#[derive(Debug)]
struct Failure(i32, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `args` (without the program name), writing the
/// report to `out` and diagnostics to `err`.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = std::iter::once("agr".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = writeln!(err, "{e}\nexpression grammar:\n{GRAMMAR}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            if code == EXIT_USAGE {
                let _ = writeln!(err, "expression grammar:\n{GRAMMAR}");
            }
            code
        }
    }
}

fn load(args: &GroupArgs) -> Result<(GroupPresentation, Scope), Failure> {
    let group = GroupPresentation::load(&args.group)?;
    let mut scope = group.scope();
    for binding in &args.define {
        scope.define_binding(binding)?;
    }
    Ok((group, scope))
}

fn eval(scope: &Scope, text: &str) -> Result<Element, Failure> {
    scope.eval(text).map_err(|e| Failure(EXIT_USAGE, format!("in `{text}`: {e}")))
}

fn word(text: &str, p: usize) -> Result<Word, Failure> {
    let w: Word = text.parse()?;
    w.check_alphabet(p)?;
    Ok(w)
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Act { group, expr, word: w } => {
            let (grp, scope) = load(&group)?;
            let g = eval(&scope, &expr)?;
            writeln!(out, "{}", g.act(&word(&w, grp.alphabet_size())?)?)?;
            Ok(EXIT_OK)
        }
        Command::Mul { group, exprs } => {
            let (grp, scope) = load(&group)?;
            let mut acc = grp.identity();
            for e in &exprs {
                acc = acc.mul(&eval(&scope, e)?);
            }
            print_element(out, &acc)?;
            Ok(EXIT_OK)
        }
        Command::Order { group, expr, limit } => {
            let (_, scope) = load(&group)?;
            let g = eval(&scope, &expr)?;
            match order_bounded(&g, limit) {
                Order::Finite(k) => {
                    writeln!(out, "{k}")?;
                    Ok(EXIT_OK)
                }
                Order::Unbounded => {
                    writeln!(out, "unbounded")?;
                    Ok(EXIT_UNDECIDED)
                }
            }
        }
        Command::Section { group, expr, word: w } => {
            let (grp, scope) = load(&group)?;
            let g = eval(&scope, &expr)?;
            print_element(out, &g.section_at(&word(&w, grp.alphabet_size())?)?)?;
            Ok(EXIT_OK)
        }
        Command::Insert { group, expr, word: w } => {
            let (grp, scope) = load(&group)?;
            let g = eval(&scope, &expr)?;
            print_element(out, &Element::insert(&word(&w, grp.alphabet_size())?, &g)?)?;
            Ok(EXIT_OK)
        }
        Command::EngelPair { group, g, h, budget, format, .. } => {
            let (_, scope) = load(&group)?;
            let (g, h) = (eval(&scope, &g)?, eval(&scope, &h)?);
            engel_pair(out, &g, &h, &budget.budget(), format)
        }
        Command::EngelElement { group, h, .. } => {
            let (grp, scope) = load(&group)?;
            let h = eval(&scope, &h)?;
            match decide_engel_element(&grp, &h)? {
                ElementVerdict::Engel(why) => {
                    writeln!(out, "engel: {why}")?;
                    Ok(EXIT_OK)
                }
                ElementVerdict::NotEngel { g, period } => {
                    writeln!(out, "not-engel: witness g has {} states, period {period}", g.size())?;
                    write!(out, "{}", g.to_maf())?;
                    Ok(EXIT_OK)
                }
                ElementVerdict::Undecided(why) => {
                    writeln!(out, "undecided: {why}")?;
                    Ok(EXIT_UNDECIDED)
                }
            }
        }
        Command::ExponentSurvey { group, n, r, seed, budget } => {
            let (grp, scope) = load(&group)?;
            let mut seeds = Vec::new();
            for s in &seed {
                let entries = split_top_level(s).iter().map(|t| eval(&scope, t)).collect::<Result<Vec<_>, _>>()?;
                seeds.push(engel::TupleVertex::new(entries));
            }
            let report = exponent_survey(&grp, n, r, &budget.budget(), &seeds)?;
            writeln!(
                out,
                "n={} r={} ball={} starts={} exceeded={} nontrivial-cycles={}",
                report.n,
                report.radius,
                report.ball_size,
                report.starts,
                report.exceeded,
                report.cycles.len()
            )?;
            for (k, cyc) in report.cycles.iter().enumerate() {
                writeln!(out, "cycle {k} length {}", cyc.len())?;
                for v in cyc {
                    writeln!(out, "  {v}")?;
                }
            }
            Ok(if report.exceeded > 0 { EXIT_UNDECIDED } else { EXIT_OK })
        }
        Command::Lemma { which } => {
            if which == "grigorchuk" {
                let data = engel::grigorchuk_lemma_data();
                let ok = print_lemma(out, "grigorchuk", &data)?;
                let oracle = groups::k_oracle()?;
                let mut in_k = true;
                for e in &data.a0 {
                    in_k &= oracle.membership(e)? == KMembership::InK;
                }
                writeln!(out, "A_0 in K^4: {in_k}")?;
                Ok(if ok && in_k { EXIT_OK } else { EXIT_UNDECIDED })
            } else {
                let stated = print_lemma(out, "gupta-sidki (stated tuple)", &engel::gupta_sidki_stated_lemma_data())?;
                let repaired = print_lemma(out, "gupta-sidki", &engel::gupta_sidki_lemma_data())?;
                Ok(if stated && repaired { EXIT_OK } else { EXIT_UNDECIDED })
            }
        }
        Command::Witness { group, h, checks, max_states, .. } => {
            let (grp, scope) = load(&group)?;
            let h = eval(&scope, &h)?;
            let data = engel::lemma_data_for(&grp)
                .ok_or_else(|| Failure(EXIT_USAGE, "no periodic certificate for this group".into()))?;
            witness(out, &h, &data, checks, max_states)
        }
        Command::Search { group, g, h, cmax, pmax, max_states, .. } => {
            let (grp, scope) = load(&group)?;
            let (g, h) = (eval(&scope, &g)?, eval(&scope, &h)?);
            let oracle = match grp.kind() {
                groups::GroupKind::Grigorchuk => Some(groups::k_oracle()?),
                _ => None,
            };
            let report = periodic_state_search(&g, &h, cmax, pmax, max_states, oracle)?;
            let sizes: Vec<String> = report.sizes.iter().map(usize::to_string).collect();
            writeln!(out, "sizes {}", sizes.join(" "))?;
            if let Some(c) = report.truncated_at {
                writeln!(out, "truncated at c={c}")?;
            }
            for period in 1..=pmax {
                let hits = report.hits(period);
                if !hits.is_empty() {
                    let hs: Vec<String> = hits.iter().map(usize::to_string).collect();
                    writeln!(out, "period {period}: c = {}", hs.join(" "))?;
                }
            }
            if let Some(best) = report.candidates.first() {
                writeln!(
                    out,
                    "best c={} period={} common={} in-K={} total-size={}",
                    best.c,
                    best.period,
                    best.common.len(),
                    best.in_k.len(),
                    best.total_size
                )?;
            }
            Ok(if report.truncated_at.is_some() { EXIT_UNDECIDED } else { EXIT_OK })
        }
        Command::Contraction { group, radius } => {
            let (grp, _) = load(&group)?;
            let est = groups::estimate_contraction(&grp, radius)?;
            writeln!(
                out,
                "eta = {}/{}  C = {}/{}  radius {} samples {} unresolved {}",
                est.eta_num, est.denom, est.c_num, est.denom, est.sample_radius, est.samples, est.unresolved
            )?;
            Ok(EXIT_OK)
        }
        Command::Quotient { group, level } => {
            let (grp, _) = load(&group)?;
            let q = groups::level_quotient(&grp, level)?;
            writeln!(out, "level {level}: |G_m| = {}", q.order)?;
            if grp.kind() == groups::GroupKind::Grigorchuk {
                let k = groups::k_image(level)?;
                writeln!(out, "level {level}: |K_m| = {}, index {}", k.k_order, k.index())?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn print_element(out: &mut dyn Write, g: &Element) -> Result<(), Failure> {
    if g.is_identity() {
        writeln!(out, "identity")?;
    }
    write!(out, "{}", g.to_maf())?;
    Ok(())
}

fn print_lemma(out: &mut dyn Write, name: &str, data: &LemmaData) -> Result<bool, Failure> {
    let cert = lemma_check(&data.a0, data.period, &data.word)?;
    writeln!(out, "{name}: period {} word {}", cert.period, cert.word)?;
    for (i, ((fixes, nontrivial, returns), a)) in cert.entry_checks.iter().zip(&cert.a_period).enumerate() {
        writeln!(
            out,
            "  A_{},{}: states {} fixes {fixes} nontrivial {nontrivial} returns {returns}",
            cert.period,
            i + 1,
            a.size()
        )?;
    }
    writeln!(out, "  checked {}", cert.checked)?;
    Ok(cert.checked)
}

fn engel_pair(out: &mut dyn Write, g: &Element, h: &Element, budget: &EngelBudget, format: Format) -> Outcome {
    let d = decide_engel_pair(g, h, budget)?;
    match format {
        Format::Records => {
            for (c, s) in d.sizes.iter().enumerate() {
                writeln!(out, "iterate {c} {s}")?;
            }
            match &d.report {
                Some(r) => write!(out, "{}", r.to_records())?,
                None => writeln!(out, "verdict {}", d.verdict)?,
            }
        }
        Format::Text => {
            writeln!(out, "order(h) = {}, tuple length {}", d.order_h, d.n)?;
            let sizes: Vec<String> = d.sizes.iter().map(usize::to_string).collect();
            writeln!(out, "sizes of E_c: {}", sizes.join(" "))?;
            if let Some(r) = &d.report {
                writeln!(
                    out,
                    "graph: {} vertices, {} expanded, {} cycles, budget hit {}",
                    r.vertices.len(),
                    r.expanded,
                    r.cycles.len(),
                    r.hit_fail
                )?;
                if let Verdict::EngelNo(k) = d.verdict {
                    writeln!(out, "non-trivial cycle of length {}:", r.cycles[k].len())?;
                    for v in r.cycle_vertices(k) {
                        writeln!(out, "  {v}")?;
                    }
                }
            }
            let how = if d.by_iteration { "direct iteration" } else { "tuple graph" };
            writeln!(out, "verdict {} ({how})", d.verdict)?;
        }
    }
    Ok(match d.verdict {
        Verdict::ResourceExceeded => EXIT_UNDECIDED,
        _ => EXIT_OK,
    })
}

fn witness(out: &mut dyn Write, h: &Element, data: &LemmaData, checks: usize, max_states: usize) -> Outcome {
    let w = build_witness(h, &data.a0)?;
    let orbit: Vec<String> = w.orbit.iter().map(Word::to_string).collect();
    writeln!(out, "orbit at level {}: {}", w.level, orbit.join(" "))?;
    writeln!(out, "cocycle holds: {}", w.cocycle_holds())?;
    writeln!(out, "g: {} states", w.g.size())?;
    let mut ok = w.cocycle_holds();
    for m in 0..=checks {
        let run = engel_iterate(&w.g, h, data.period * m, max_states)?;
        let v = w.orbit[0].concat(&data.word.repeat(m));
        let section = run.value.section_at(&v)?;
        let hit = section == data.a0[0] && !section.is_identity();
        writeln!(out, "E_{}@{v} = A_0,1: {hit}", data.period * m)?;
        ok &= hit;
    }
    write!(out, "{}", w.g.to_maf())?;
    Ok(if ok { EXIT_OK } else { EXIT_UNDECIDED })
}

/// Splits at commas outside parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = vec![String::new()];
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(String::new());
                continue;
            }
            _ => {}
        }
        parts.last_mut().unwrap().push(ch);
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(&args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn act_command() {
        let (code, out, _) = run_str(&["act", "-G", "grigorchuk", "-e", "b", "-w", "12"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "11");
    }

    #[test]
    fn usage_errors_print_grammar() {
        let (code, _, err) = run_str(&["act", "-e", "b*(", "-w", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("expr   :="));
        let (code, _, _) = run_str(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn split_commas() {
        assert_eq!(split_top_level("comm(a,b),c"), vec!["comm(a,b)", "c"]);
    }
}
