//! Reader for presentation files.
//!
//! ```text
//! operad Com;                         # or `algebra NAME;` (optional header)
//! gen mu/2;                           # `gens a b` for unary generators
//! rel mu(mu(1,2),3) = mu(1,mu(2,3)) = mu(mu(1,3),2);
//! rel ab = 1/2*ba - bb;               # linear right-hand side
//! order a < b < c;                    # generator order chain
//! sym mu(2,1) = mu(1,2);              # action of a transposition on a generator
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::monomial::{GenId, TreeMonomial};
use super::{Generator, Kind, Presentation, Relation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, name: String },
    #[error("line {line}: generator `{name}` declared twice")]
    DuplicateGenerator { line: usize, name: String },
    #[error("line {line}: generator `{name}` has arity {expected} but is applied to {found} inputs")]
    ArityMismatch { line: usize, name: String, expected: usize, found: usize },
    #[error("line {line}: relation terms do not share arity and weight")]
    Inhomogeneous { line: usize },
    #[error("line {line}: relation of weight {weight}; relations must have weight at least 2")]
    WeightTooSmall { line: usize, weight: usize },
    #[error("line {line}: `{term}` is not a shuffle tree (leaves must be 1..n with increasing minima)")]
    NotShuffle { line: usize, term: String },
    #[error("order clauses contain a cycle through `{name}`")]
    CyclicOrder { name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Lt,
    Star,
    Slash,
    Plus,
    Minus,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let src = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), line));
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse().map_err(|_| ParseError::Syntax { line, message: format!("integer `{s}` too large") })?;
                out.push((Tok::Int(v), line));
                continue;
            }
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                other => {
                    return Err(ParseError::Syntax { line, message: format!("unexpected character `{other}`") })
                }
            };
            out.push((tok, line));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    pres: Presentation,
    header_kind: Option<(Kind, usize)>,
}

/// One side of a relation before classification.
enum Side {
    Mono(TreeMonomial),
    Lin(Vec<(BigRational, TreeMonomial)>),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l)| *l)
            .unwrap_or(1)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { line: self.line(), message: message.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            other => {
                let found = other.cloned();
                self.syntax(format!("expected {want:?}, found {found:?}"))
            }
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => {
                self.pos -= 1;
                self.syntax(format!("expected a name, found {other:?}"))
            }
        }
    }

    fn run(mut self) -> Result<Presentation, ParseError> {
        while let Some(tok) = self.peek().cloned() {
            let line = self.line();
            match tok {
                Tok::Ident(kw) => {
                    self.pos += 1;
                    match kw.as_str() {
                        "operad" | "algebra" => {
                            let kind = if kw == "operad" { Kind::Operad } else { Kind::Algebra };
                            if let Some(Tok::Ident(_)) = self.peek() {
                                self.pres.name = self.ident()?;
                            }
                            self.header_kind = Some((kind, line));
                        }
                        "gen" | "gens" => self.generators()?,
                        "rel" => self.relation(line)?,
                        "order" => {
                            let chain = self.order_chain()?;
                            self.pres.orders.push(chain);
                        }
                        "sym" => self.symmetry(line)?,
                        other => return self.syntax(format!("unknown statement `{other}`")),
                    }
                    self.expect(Tok::Semi)?;
                }
                other => return self.syntax(format!("expected a statement, found {other:?}")),
            }
        }
        self.pres.kind = if self.pres.generators.is_empty() {
            self.header_kind.map(|(k, _)| k).unwrap_or(Kind::Operad)
        } else if self.pres.generators.iter().all(|g| g.arity == 1) {
            Kind::Algebra
        } else {
            Kind::Operad
        };
        if let Some((Kind::Algebra, line)) = self.header_kind {
            if self.pres.kind != Kind::Algebra {
                return Err(ParseError::Syntax {
                    line,
                    message: "an algebra may only have generators of arity 1".into(),
                });
            }
        }
        self.pres.generator_order()?;
        Ok(self.pres)
    }

    fn generators(&mut self) -> Result<(), ParseError> {
        while let Some(Tok::Ident(_)) = self.peek() {
            let line = self.line();
            let name = self.ident()?;
            let mut arity = 1;
            if self.peek() == Some(&Tok::Slash) {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Int(a)) if a >= 1 => arity = a as usize,
                    _ => {
                        self.pos -= 1;
                        return self.syntax("expected a positive arity after `/`");
                    }
                }
            }
            if self.pres.generator_id(&name).is_some() {
                return Err(ParseError::DuplicateGenerator { line, name });
            }
            self.pres.generators.push(Generator { name, arity });
        }
        Ok(())
    }

    fn gen_id(&self, name: &str, line: usize) -> Result<GenId, ParseError> {
        self.pres
            .generator_id(name)
            .ok_or_else(|| ParseError::UnknownGenerator { line, name: name.to_string() })
    }

    fn order_chain(&mut self) -> Result<Vec<GenId>, ParseError> {
        let line = self.line();
        let first = self.ident()?;
        let mut chain = vec![self.gen_id(&first, line)?];
        while self.peek() == Some(&Tok::Lt) {
            self.pos += 1;
            let name = self.ident()?;
            chain.push(self.gen_id(&name, line)?);
        }
        if chain.len() < 2 {
            return self.syntax("an order clause needs at least two generators");
        }
        Ok(chain)
    }

    fn symmetry(&mut self, line: usize) -> Result<(), ParseError> {
        let lhs = self.term(line)?;
        self.expect(Tok::Eq)?;
        let rhs = self.term(line)?;
        let (g, perm) = match &lhs {
            TreeMonomial::Node(g, ch) if ch.iter().all(|c| matches!(c, TreeMonomial::Leaf(_))) => {
                (*g, ch.iter().map(|c| c.min_leaf()).collect::<Vec<u32>>())
            }
            _ => return self.syntax("`sym` expects a single generator applied to a permutation"),
        };
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if sorted.iter().enumerate().any(|(i, &v)| v != i as u32 + 1) {
            return self.syntax("`sym` inputs must be a permutation of 1..k");
        }
        match &rhs {
            TreeMonomial::Node(h, _) if rhs == TreeMonomial::corolla(*h, perm.len()) => {
                self.pres.symmetries.insert((g, perm), *h);
                Ok(())
            }
            _ => self.syntax("right-hand side of `sym` must be a generator applied to 1..k in order"),
        }
    }

    fn relation(&mut self, line: usize) -> Result<(), ParseError> {
        let mut sides = vec![self.side(line)?];
        while self.peek() == Some(&Tok::Eq) {
            self.pos += 1;
            sides.push(self.side(line)?);
        }
        if sides.len() < 2 {
            return self.syntax("a relation needs at least two sides");
        }
        let relation = if sides.iter().all(|s| matches!(s, Side::Mono(_))) {
            let terms = sides
                .into_iter()
                .map(|s| match s {
                    Side::Mono(m) => m,
                    Side::Lin(_) => unreachable!(),
                })
                .collect();
            Relation::Set(terms)
        } else {
            if sides.len() != 2 {
                return self.syntax("a linear relation must have the form `M = combination`");
            }
            let rhs = sides.pop().unwrap();
            let lhs = sides.pop().unwrap();
            let lhs = match lhs {
                Side::Mono(m) => m,
                Side::Lin(_) => return self.syntax("the left-hand side of a linear relation must be a monomial"),
            };
            let rhs = match rhs {
                Side::Mono(m) => vec![(BigRational::one(), m)],
                Side::Lin(v) => v,
            };
            Relation::Linear { lhs, rhs }
        };
        let terms = relation.monomials();
        let (a, w) = (terms[0].arity(), terms[0].weight());
        if terms.iter().any(|t| t.arity() != a || t.weight() != w) {
            return Err(ParseError::Inhomogeneous { line });
        }
        if w < 2 {
            return Err(ParseError::WeightTooSmall { line, weight: w });
        }
        self.pres.relations.push(relation);
        Ok(())
    }

    /// A monomial, or a signed sum of rationally weighted monomials.
    fn side(&mut self, line: usize) -> Result<Side, ParseError> {
        let mut terms = Vec::new();
        let mut plain = true;
        let mut first = true;
        loop {
            let mut sign = BigRational::one();
            match self.peek() {
                Some(Tok::Plus) if !first => {
                    self.pos += 1;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = -sign;
                    plain = false;
                }
                _ if !first => break,
                _ => {}
            }
            first = false;
            let mut coeff = BigRational::one();
            if let Some(Tok::Int(num)) = self.peek().cloned() {
                self.pos += 1;
                plain = false;
                let mut c = BigRational::from_integer(BigInt::from(num));
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.next() {
                        Some(Tok::Int(den)) if den > 0 => c /= BigRational::from_integer(BigInt::from(den)),
                        _ => {
                            self.pos -= 1;
                            return self.syntax("expected a positive denominator");
                        }
                    }
                }
                if self.peek() == Some(&Tok::Star) {
                    self.pos += 1;
                }
                coeff = c;
            }
            let m = self.monomial(line)?;
            terms.push((sign * coeff, m));
            if !matches!(self.peek(), Some(Tok::Plus) | Some(Tok::Minus)) {
                break;
            }
            plain = false;
        }
        if plain && terms.len() == 1 {
            return Ok(Side::Mono(terms.pop().unwrap().1));
        }
        terms.retain(|(c, _)| !c.is_zero());
        Ok(Side::Lin(terms))
    }

    fn monomial(&mut self, line: usize) -> Result<TreeMonomial, ParseError> {
        let is_term = matches!(self.toks.get(self.pos + 1), Some((Tok::LParen, _)));
        if is_term {
            let t = self.term(line)?;
            if !t.is_shuffle() {
                return Err(ParseError::NotShuffle { line, term: self.pres.show(&t) });
            }
            return Ok(t);
        }
        self.word(line)
    }

    /// Juxtaposed, space- or `*`-separated generator names; each identifier
    /// is split greedily into declared names.
    fn word(&mut self, line: usize) -> Result<TreeMonomial, ParseError> {
        let mut letters = Vec::new();
        loop {
            match self.peek().cloned() {
                Some(Tok::Ident(s)) => {
                    self.pos += 1;
                    letters.extend(self.split_word(&s, line)?);
                }
                _ => break,
            }
            if self.peek() == Some(&Tok::Star) && matches!(self.toks.get(self.pos + 1), Some((Tok::Ident(_), _))) {
                self.pos += 1;
            }
        }
        if letters.is_empty() {
            return self.syntax("expected a monomial");
        }
        for &g in &letters {
            let gen = &self.pres.generators[g];
            if gen.arity != 1 {
                return Err(ParseError::ArityMismatch {
                    line,
                    name: gen.name.clone(),
                    expected: gen.arity,
                    found: 1,
                });
            }
        }
        Ok(TreeMonomial::word(&letters))
    }

    fn split_word(&self, s: &str, line: usize) -> Result<Vec<GenId>, ParseError> {
        if let Some(g) = self.pres.generator_id(s) {
            return Ok(vec![g]);
        }
        let mut out = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let best = self
                .pres
                .generators
                .iter()
                .enumerate()
                .filter(|(_, g)| rest.starts_with(g.name.as_str()))
                .max_by_key(|(_, g)| g.name.len());
            match best {
                Some((id, g)) => {
                    out.push(id);
                    rest = &rest[g.name.len()..];
                }
                None => return Err(ParseError::UnknownGenerator { line, name: s.to_string() }),
            }
        }
        Ok(out)
    }

    /// `g(arg, …)` where each argument is a leaf number or a nested term.
    fn term(&mut self, line: usize) -> Result<TreeMonomial, ParseError> {
        if let Some(Tok::Int(i)) = self.peek().cloned() {
            self.pos += 1;
            if i == 0 || i > u32::MAX as u64 {
                return self.syntax("leaf labels start at 1");
            }
            return Ok(TreeMonomial::Leaf(i as u32));
        }
        let name = self.ident()?;
        let g = self.gen_id(&name, line)?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term(line)?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            args.push(self.term(line)?);
        }
        self.expect(Tok::RParen)?;
        let expected = self.pres.generators[g].arity;
        if args.len() != expected {
            return Err(ParseError::ArityMismatch { line, name, expected, found: args.len() });
        }
        Ok(TreeMonomial::Node(g, args))
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let toks = lex(text)?;
    Parser { toks, pos: 0, pres: Presentation::default(), header_kind: None }.run()
}

/// Parses a file of `order …;` clauses against the generators of `base` and
/// returns a copy of `base` whose order clauses are replaced.
pub fn with_order_clauses(base: &Presentation, text: &str) -> Result<Presentation, ParseError> {
    let toks = lex(text)?;
    let mut pres = base.clone();
    pres.orders.clear();
    let mut p = Parser { toks, pos: 0, pres, header_kind: None };
    while p.peek().is_some() {
        match p.ident()?.as_str() {
            "order" => {
                let chain = p.order_chain()?;
                p.pres.orders.push(chain);
            }
            other => return p.syntax(format!("only `order` clauses are allowed here, found `{other}`")),
        }
        p.expect(Tok::Semi)?;
    }
    p.pres.generator_order()?;
    Ok(p.pres)
}

/// Parses a single monomial over the generators of `p`, in the syntax of
/// relation sides (`mu(mu(1,3),2)` or a word such as `lgb`).
pub fn parse_monomial(p: &Presentation, text: &str) -> Result<TreeMonomial, ParseError> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, pos: 0, pres: p.clone(), header_kind: None };
    let m = parser.monomial(1)?;
    if parser.peek().is_some() {
        return parser.syntax("trailing input after the monomial");
    }
    Ok(m)
}
