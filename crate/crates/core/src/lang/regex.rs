//! Regular expressions over single-letter symbols.
//!
//! Grammar: letters are literals, juxtaposition concatenates, `+` is union,
//! `*` is Kleene star, parentheses group, `%` is ε and `#` is ∅. Whitespace is
//! ignored. Compilation goes through the position (Glushkov) automaton, so the
//! result has no ε-transitions.

use crate::automata::Nfa;
use crate::bits::{self, Bits};
use crate::error::{Error, Result};
use crate::lang::Alphabet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regex {
    Empty,
    Epsilon,
    Letter(char),
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at position {} in `{}`", self.pos, self.src))
    }

    fn expr(&mut self) -> Result<Regex> {
        let mut r = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            r = Regex::Union(Box::new(r), Box::new(self.term()?));
        }
        Ok(r)
    }

    fn term(&mut self) -> Result<Regex> {
        let mut r: Option<Regex> = None;
        while let Some(c) = self.peek() {
            if c == '+' || c == ')' {
                break;
            }
            let f = self.factor()?;
            r = Some(match r {
                None => f,
                Some(p) => Regex::Concat(Box::new(p), Box::new(f)),
            });
        }
        r.ok_or_else(|| self.err("empty expression"))
    }

    fn factor(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            r = Regex::Star(Box::new(r));
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        match c {
            '(' => {
                let r = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("missing `)`"));
                }
                self.pos += 1;
                Ok(r)
            }
            '%' => Ok(Regex::Epsilon),
            '#' => Ok(Regex::Empty),
            c if c.is_alphanumeric() => Ok(Regex::Letter(c)),
            _ => {
                self.pos -= 1;
                Err(self.err(&format!("unexpected `{c}`")))
            }
        }
    }
}

impl Regex {
    pub fn parse(src: &str) -> Result<Regex> {
        let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { chars, pos: 0, src };
        let r = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(p.err("trailing input"));
        }
        Ok(r)
    }

    pub fn letters(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_letters(&self, out: &mut Vec<char>) {
        match self {
            Regex::Letter(c) => out.push(*c),
            Regex::Concat(a, b) | Regex::Union(a, b) => {
                a.collect_letters(out);
                b.collect_letters(out);
            }
            Regex::Star(a) => a.collect_letters(out),
            Regex::Empty | Regex::Epsilon => {}
        }
    }
}

/// Position-automaton data for a subexpression.
struct Glushkov {
    nullable: bool,
    first: Vec<usize>,
    last: Vec<usize>,
}

fn positions(r: &Regex, letters: &mut Vec<char>, follow: &mut Vec<Vec<usize>>) -> Glushkov {
    match r {
        Regex::Empty => Glushkov { nullable: false, first: vec![], last: vec![] },
        Regex::Epsilon => Glushkov { nullable: true, first: vec![], last: vec![] },
        Regex::Letter(c) => {
            let p = letters.len();
            letters.push(*c);
            follow.push(Vec::new());
            Glushkov { nullable: false, first: vec![p], last: vec![p] }
        }
        Regex::Union(a, b) => {
            let ga = positions(a, letters, follow);
            let gb = positions(b, letters, follow);
            Glushkov {
                nullable: ga.nullable || gb.nullable,
                first: [ga.first, gb.first].concat(),
                last: [ga.last, gb.last].concat(),
            }
        }
        Regex::Concat(a, b) => {
            let ga = positions(a, letters, follow);
            let gb = positions(b, letters, follow);
            for &p in &ga.last {
                follow[p].extend_from_slice(&gb.first);
            }
            let first = if ga.nullable { [ga.first.clone(), gb.first.clone()].concat() } else { ga.first.clone() };
            let last = if gb.nullable { [ga.last, gb.last.clone()].concat() } else { gb.last.clone() };
            Glushkov { nullable: ga.nullable && gb.nullable, first, last }
        }
        Regex::Star(a) => {
            let ga = positions(a, letters, follow);
            for &p in &ga.last {
                follow[p].extend_from_slice(&ga.first);
            }
            Glushkov { nullable: true, first: ga.first, last: ga.last }
        }
    }
}

/// Compiles to the position automaton. Without an explicit alphabet the
/// letters of the expression are used (`a` when there are none).
pub fn compile(src: &str, alphabet: Option<&Alphabet>) -> Result<Nfa> {
    let re = Regex::parse(src)?;
    let alphabet = match alphabet {
        Some(a) => {
            if let Some(c) = re.letters().into_iter().find(|&c| a.index_of(c).is_none()) {
                return Err(Error::Parse(format!("`{c}` is not in the alphabet `{a}`")));
            }
            a.clone()
        }
        None if re.letters().is_empty() => Alphabet::first(1),
        None => Alphabet::new(re.letters())?,
    };
    let mut letters = Vec::new();
    let mut follow = Vec::new();
    let g = positions(&re, &mut letters, &mut follow);
    let n = letters.len() + 1;
    let mut edges = Vec::new();
    for &p in &g.first {
        edges.push((0, alphabet.index_of(letters[p]).unwrap(), p + 1));
    }
    for (p, fs) in follow.iter().enumerate() {
        for &q in fs {
            edges.push((p + 1, alphabet.index_of(letters[q]).unwrap(), q + 1));
        }
    }
    let mut finals: Bits = bits::from_iter(n, g.last.iter().map(|p| p + 1));
    if g.nullable {
        finals.insert(0);
    }
    let labels: Vec<String> =
        std::iter::once("s".to_string()).chain(letters.iter().enumerate().map(|(i, c)| format!("{c}{}", i + 1))).collect();
    Nfa::from_edges(alphabet, labels, &[0], &finals.ones().collect::<Vec<_>>(), &edges)
}
