//! Command-line front end. `run` does all the work and returns the text to
//! print, so the binary is a thin wrapper and the commands are testable.

use std::io::Read;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::algebra::{syntactic_monoid, syntactic_semiring, syntactic_transition_check, SEMIRING_CAP};
use crate::automata::{Dfa, Nfa};
use crate::canonical::{bool_min, dist_min, kappa_check, lambda_check, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::jsldfa::{
    brzozowski_minimize, canonical_rfsa, dep_of_lang, dependency_theorem_check, dr_iso_check, full_subset, jsl_reach,
    JslDfa,
};
use crate::kw::{covering_of_extension, grids, minimal_nfa, GRID_CAP};
use crate::lang::{Alphabet, Language};
use crate::saturate::{atomicity, saturation, transition_maximal_extension};

#[derive(Parser, Debug)]
#[command(name = "regdual", version, about = "Dualities of regular languages and exact nfa minimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimal complete dfa
    MinDfa(Common),
    /// State-minimal nfa by grid-cover search
    MinNfa {
        #[command(flatten)]
        common: Common,
        /// Also print the covering that induces the machine
        #[arg(long)]
        emit_cover: bool,
    },
    /// Canonical residual automaton
    Rfsa(Common),
    /// Double reversal minimization, cross-checked
    Brzozowski(Common),
    /// Dependency relation and its grids
    DepRel(Common),
    /// Atoms with shortest words and the quotients containing them
    Atoms(Common),
    /// Syntactic monoid with its multiplication table
    SynMonoid(Common),
    /// Syntactic semiring, as elements and tables
    SynSemiring(Common),
    /// Atomic, positively atomic and subatomic, from both sides
    CheckAtomic(Common),
    /// Saturation flags with witnesses
    Saturation(Common),
    /// Boolean and distributive canonical machines
    Canon(Common),
    /// Randomized cross-checks
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per suite
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// A regex, a path to an nfa JSON file, or `-` for nfa JSON on stdin
    pub input: String,
    /// Alphabet for a regex (default: the letters it mentions)
    #[arg(long)]
    pub alphabet: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Shorthand for `--format json`
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = GRID_CAP)]
    pub grid_cap: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub atom_cap: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Dot,
}

impl Common {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

/// Process exit status for an error: 2 input, 3 cap, 4 failed cross-check.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidAutomaton(_) | Error::DuplicateLabel(_) | Error::AlphabetMismatch(_) => 2,
        Error::CapExceeded { .. } => 3,
        _ => 4,
    }
}

/// One line for stderr: `error kind=<kind> reason=<text>`.
pub fn error_line(e: &Error) -> String {
    let kind = match exit_code(e) {
        2 => "input",
        3 => "cap",
        _ => "check",
    };
    format!("error kind={kind} reason={e}")
}

enum Input {
    Regex(Language),
    Machine(Nfa),
}

impl Input {
    fn language(&self) -> Language {
        match self {
            Input::Regex(l) => l.clone(),
            Input::Machine(n) => n.language(),
        }
    }

    fn nfa(&self) -> Nfa {
        match self {
            Input::Regex(l) => Nfa::from_language(l),
            Input::Machine(n) => n.clone(),
        }
    }
}

fn read_input(c: &Common, stdin: &mut dyn Read) -> Result<Input> {
    let json_text = if c.input == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        Some(s)
    } else if Path::new(&c.input).is_file() {
        Some(std::fs::read_to_string(&c.input).map_err(|e| Error::Parse(format!("{}: {e}", c.input)))?)
    } else {
        None
    };
    match json_text {
        Some(s) => Ok(Input::Machine(Nfa::from_json(&s)?)),
        None => {
            let l = match &c.alphabet {
                Some(a) => Language::parse_over(&c.input, &Alphabet::from_str(a)?)?,
                None => Language::parse(&c.input)?,
            };
            Ok(Input::Regex(l))
        }
    }
}

fn machine_out(n: &Nfa, f: Format) -> String {
    match f {
        Format::Text => n.describe(),
        Format::Json => n.to_json() + "\n",
        Format::Dot => n.to_dot(),
    }
}

fn carrier_out(name: &str, j: &JslDfa) -> String {
    let mut s = format!("{name}: {} elements\n", j.len());
    for (x, lang) in j.element_languages().iter().enumerate() {
        let words: Vec<String> = lang.words_upto(3).iter().map(|w| j.alphabet().fmt_word(w)).collect();
        let mark = if x == j.init() { " (initial)" } else { "" };
        s.push_str(&format!("  {}{mark}: {{{}}}\n", j.carrier().label(x), words.join(",")));
    }
    s
}

/// Runs a parsed command. `stdin` supplies nfa JSON when the input is `-`.
pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Result<String> {
    match &cli.command {
        Command::MinDfa(c) => {
            let l = read_input(c, stdin)?.language();
            Ok(machine_out(&Nfa::from_language(&l), c.format()))
        }
        Command::MinNfa { common: c, emit_cover } => {
            let l = read_input(c, stdin)?.language();
            let (n, cover) = minimal_nfa(&l, c.grid_cap)?;
            match c.format() {
                Format::Json if *emit_cover => Ok(json!({
                    "nfa": n.to_json_value(),
                    "cover": cover.rel().to_text(),
                    "lower": cover.lower().to_text(),
                })
                .to_string()
                    + "\n"),
                Format::Text if *emit_cover => {
                    Ok(format!("{}cover\n{}lower\n{}", n.describe(), cover.rel().to_text(), cover.lower().to_text()))
                }
                f => Ok(machine_out(&n, f)),
            }
        }
        Command::Rfsa(c) => {
            let l = read_input(c, stdin)?.language();
            Ok(machine_out(&canonical_rfsa(&l), c.format()))
        }
        Command::Brzozowski(c) => {
            let n = read_input(c, stdin)?.nfa();
            Ok(machine_out(brzozowski_minimize(&n)?.nfa(), c.format()))
        }
        Command::DepRel(c) => {
            let l = read_input(c, stdin)?.language();
            let dr = l.dependency_relation();
            let gs = grids(&l, c.grid_cap)?;
            Ok(match c.format() {
                Format::Json => {
                    let g: Vec<String> = gs.iter().map(|g| g.describe(&dr)).collect();
                    json!({
                        "rows": dr.src().labels(),
                        "cols": dr.dst().labels(),
                        "edges": dr.edges(),
                        "grids": g,
                    })
                    .to_string()
                        + "\n"
                }
                Format::Dot => dep_of_lang(&l).to_dot(),
                Format::Text => {
                    let mut s = dr.to_text();
                    s.push_str(&format!("grids {}\n", gs.len()));
                    for g in &gs {
                        s.push_str(&format!("  {}\n", g.describe(&dr)));
                    }
                    s
                }
            })
        }
        Command::Atoms(c) => {
            let l = read_input(c, stdin)?.language();
            let atoms = l.atoms();
            let idx = l.quotients();
            let rows: Vec<(String, String)> = (0..atoms.len())
                .map(|x| {
                    let qs: Vec<String> =
                        atoms.quotient_set(x).ones().map(|q| format!("{}⁻¹L", l.alphabet().fmt_word(idx.rep(q)))).collect();
                    (l.alphabet().fmt_word(atoms.rep(x)), qs.join(" "))
                })
                .collect();
            Ok(match c.format() {
                Format::Json => json!({ "atoms": rows }).to_string() + "\n",
                _ => {
                    let mut s = format!("atoms {}\n", rows.len());
                    for (w, qs) in rows {
                        s.push_str(&format!("  [{w}] in {qs}\n"));
                    }
                    s
                }
            })
        }
        Command::SynMonoid(c) => {
            let l = read_input(c, stdin)?.language();
            let (m, _) = syntactic_monoid(&l);
            Ok(m.to_text())
        }
        Command::SynSemiring(c) => {
            let l = read_input(c, stdin)?.language();
            let (s, _) = syntactic_semiring(&l, SEMIRING_CAP)?;
            Ok(s.to_text())
        }
        Command::CheckAtomic(c) => {
            let n = read_input(c, stdin)?.nfa();
            let r = atomicity(&n, c.atom_cap)?;
            Ok(match c.format() {
                Format::Json => json!({
                    "atomic": [r.atomic_direct, r.atomic_via_rsc],
                    "positively_atomic": [r.positive_direct, r.positive_via_order],
                    "subatomic": [r.subatomic_direct, r.subatomic_via_monoid],
                })
                .to_string()
                    + "\n",
                _ => r.render(),
            })
        }
        Command::Saturation(c) => {
            let n = read_input(c, stdin)?.nfa();
            let r = saturation(&n);
            Ok(match c.format() {
                Format::Json => json!({
                    "locally": r.locally,
                    "intersection": r.intersection,
                    "transition_maximal": r.transition_maximal,
                    "union_free": r.union_free,
                })
                .to_string()
                    + "\n",
                _ => r.render(&n),
            })
        }
        Command::Canon(c) => {
            let l = read_input(c, stdin)?.language();
            Ok(carrier_out("boolean", &bool_min(&l, c.atom_cap)?) + &carrier_out("distributive", &dist_min(&l, c.atom_cap)?))
        }
        Command::Selftest { seed, cases } => selftest(*seed, *cases),
    }
}

/// Each suite runs `cases` seeded random inputs; the first failure aborts
/// with its error. Cap overruns on random inputs are skipped and counted.
pub fn selftest(seed: u64, cases: usize) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ab = Alphabet::from_str("ab")?;
    let mut out = String::new();
    let mut suite = |name: &str, out: &mut String, f: &mut dyn FnMut(&mut ChaCha8Rng) -> Result<()>| -> Result<()> {
        let mut skipped = 0;
        for _ in 0..cases {
            match f(&mut rng) {
                Err(Error::CapExceeded { .. }) => skipped += 1,
                Err(e) => return Err(Error::CheckFailed(format!("{name}: {e}"))),
                Ok(()) => {}
            }
        }
        out.push_str(&format!("{name:<24} ok  ({} cases, {skipped} over cap)\n", cases));
        Ok(())
    };
    let random_nfa = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(1..=4);
        Nfa::random(rng, &ab, k, 0.3)
    };
    suite("dependency theorem", &mut out, &mut |rng| {
        let l = Language::random(rng, &ab, 4);
        dependency_theorem_check(&l)?;
        dr_iso_check(&l).map(|_| ())
    })?;
    suite("brzozowski", &mut out, &mut |rng| {
        let n = random_nfa(rng);
        let d = brzozowski_minimize(&n)?;
        if !d.is_isomorphic(&Dfa::from_language(&n.language())) {
            return Err(Error::CheckFailed("not the minimal dfa".into()));
        }
        Ok(())
    })?;
    suite("reverse quotient maps", &mut out, &mut |rng| {
        let l = Language::random(rng, &ab, 4);
        kappa_check(&l)?;
        lambda_check(&l, DEFAULT_CAP).map(|_| ())
    })?;
    suite("syntactic semiring", &mut out, &mut |rng| {
        let l = Language::random(rng, &ab, 3);
        syntactic_transition_check(&l, SEMIRING_CAP).map(|_| ())
    })?;
    suite("atomicity", &mut out, &mut |rng| atomicity(&random_nfa(rng), DEFAULT_CAP).map(|_| ()))?;
    suite("saturation", &mut out, &mut |rng| {
        let n = random_nfa(rng);
        let r = saturation(&transition_maximal_extension(&n));
        if !(r.locally && r.intersection && r.transition_maximal) {
            return Err(Error::CheckFailed("maximal extension is not saturated".into()));
        }
        Ok(())
    })?;
    suite("atomizer coverings", &mut out, &mut |rng| {
        let j = jsl_reach(&full_subset(&random_nfa(rng)));
        covering_of_extension(&j).map(|_| ())
    })?;
    Ok(out)
}

/// `SEED` in the environment takes precedence over `--seed`.
pub fn apply_seed_env(cli: &mut Cli) {
    if let Command::Selftest { seed, .. } = &mut cli.command {
        if let Some(s) = std::env::var("SEED").ok().and_then(|v| v.trim().parse().ok()) {
            *seed = s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("regdual").chain(args.iter().copied())).unwrap();
        run(&cli, &mut std::io::empty())
    }

    #[test]
    fn min_nfa_of_a_plus_aa() {
        let out = run_args(&["min-nfa", "a+aa"]).unwrap();
        assert!(out.starts_with("states: 3\n"));
        let out = run_args(&["min-nfa", "a+aa", "--emit-cover"]).unwrap();
        assert!(out.contains("cover\n") && out.contains("lower\n"));
    }

    #[test]
    fn min_dfa_of_empty_language() {
        let out = run_args(&["min-dfa", "#", "--alphabet", "a"]).unwrap();
        assert!(out.starts_with("states: 1\n"));
    }

    #[test]
    fn json_round_trip() {
        let direct = run_args(&["min-dfa", "(ab)*+(abc)*"]).unwrap();
        let json = run_args(&["min-nfa", "(ab)*+(abc)*", "--json"]).unwrap();
        let cli = Cli::try_parse_from(["regdual", "min-dfa", "-"]).unwrap();
        let again = run(&cli, &mut json.as_bytes()).unwrap();
        assert_eq!(direct, again);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&run_args(&["min-dfa", "(a"]).unwrap_err()), 2);
        assert_eq!(exit_code(&run_args(&["canon", "(a+b)*a(a+b)(a+b)(a+b)(a+b)", "--atom-cap", "3"]).unwrap_err()), 3);
        assert_eq!(exit_code(&Error::CheckFailed("x".into())), 4);
        assert!(error_line(&Error::Parse("x".into())).starts_with("error kind=input"));
    }

    #[test]
    fn outputs_are_deterministic() {
        for args in [["dep-rel", "a*b+b*a"], ["atoms", "a+aa"], ["saturation", "a+aa"], ["check-atomic", "a+aa"], ["syn-monoid", "a+aa"]] {
            assert_eq!(run_args(&args).unwrap(), run_args(&args).unwrap());
        }
    }

    #[test]
    fn selftest_passes() {
        let out = selftest(1, 3).unwrap();
        assert_eq!(out.lines().count(), 7);
    }

    #[test]
    fn check_atomic_table_columns_agree() {
        let out = run_args(&["check-atomic", "(ab)*+(abc)*", "--atom-cap", "64"]).unwrap();
        for line in out.lines().skip(1) {
            let cells: Vec<&str> = line.split_whitespace().rev().take(2).collect();
            assert_eq!(cells[0], cells[1]);
        }
    }
}
