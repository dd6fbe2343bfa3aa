//! Line-oriented parser for the network DSL.
//!
//! ```text
//! network <name>
//! state   <id> : <k>        # k = 2 may be written "bool"
//! control <id> : <k>
//! op <id> : (<k1>,...,<kr>) -> <k> = [i1,...,i_{k1*...*kr}]
//! <stateid>' = <expr>
//! ```
//!
//! Expressions use `!`, `&`, `^`, `|`, `->`, `<->` (loosest last, `->`
//! right-associative), declared operator names applied call-style, and
//! parentheses. Constants: `0` and `1` denote the bottom/top value of the
//! expected domain, `p/q` a fractional value, `d(k,i)` the delta literal
//! δ_k^i. `#` starts a comment.

use std::collections::BTreeMap;

use super::expr::{BinOp, Expr, VarKind, VarRef};
use super::{value_to_level, Domain, Network, Operator, VarDecl, MAX_COMBINED_SPACE};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Int(usize),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Equals,
    Prime,
    Not,
    And,
    Or,
    Xor,
    Arrow,
    Iff,
    Slash,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(s) => format!("'{s}'"),
            Token::Int(v) => format!("'{v}'"),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::LBracket => "'['".into(),
            Token::RBracket => "']'".into(),
            Token::Comma => "','".into(),
            Token::Colon => "':'".into(),
            Token::Equals => "'='".into(),
            Token::Prime => "'''".into(),
            Token::Not => "'!'".into(),
            Token::And => "'&'".into(),
            Token::Or => "'|'".into(),
            Token::Xor => "'^'".into(),
            Token::Arrow => "'->'".into(),
            Token::Iff => "'<->'".into(),
            Token::Slash => "'/'".into(),
        }
    }
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                tokens.push(Token::LParen);
            }
            ')' => {
                chars.next();
                tokens.push(Token::RParen);
            }
            '[' => {
                chars.next();
                tokens.push(Token::LBracket);
            }
            ']' => {
                chars.next();
                tokens.push(Token::RBracket);
            }
            ',' => {
                chars.next();
                tokens.push(Token::Comma);
            }
            ':' => {
                chars.next();
                tokens.push(Token::Colon);
            }
            '=' => {
                chars.next();
                tokens.push(Token::Equals);
            }
            '\'' => {
                chars.next();
                tokens.push(Token::Prime);
            }
            '!' => {
                chars.next();
                tokens.push(Token::Not);
            }
            '&' => {
                chars.next();
                tokens.push(Token::And);
            }
            '|' => {
                chars.next();
                tokens.push(Token::Or);
            }
            '^' => {
                chars.next();
                tokens.push(Token::Xor);
            }
            '/' => {
                chars.next();
                tokens.push(Token::Slash);
            }
            '-' => {
                chars.next();
                if chars.peek() == Some(&'>') {
                    chars.next();
                    tokens.push(Token::Arrow);
                } else {
                    return Err(ParseError::new(lineno, "expected '->' after '-'"));
                }
            }
            '<' => {
                chars.next();
                if chars.peek() == Some(&'-') {
                    chars.next();
                    if chars.peek() == Some(&'>') {
                        chars.next();
                        tokens.push(Token::Iff);
                    } else {
                        return Err(ParseError::new(lineno, "expected '<->' after '<-'"));
                    }
                } else {
                    return Err(ParseError::new(lineno, "expected '<->' after '<'"));
                }
            }
            c if c.is_ascii_digit() => {
                let mut v: usize = 0;
                while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(d as usize))
                        .ok_or_else(|| ParseError::new(lineno, "integer literal too large"))?;
                    chars.next();
                }
                tokens.push(Token::Int(v));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Ident(s));
            }
            other => {
                return Err(ParseError::new(lineno, format!("unexpected character '{other}'")))
            }
        }
    }
    Ok(tokens)
}

/// Expression before name/domain resolution.
#[derive(Clone, Debug)]
enum RawExpr {
    Name(String),
    Call(String, Vec<RawExpr>),
    Int(usize),
    Frac(usize, usize),
    Delta(usize, usize),
    Not(Box<RawExpr>),
    Bin(BinOp, Box<RawExpr>, Box<RawExpr>),
}

struct LineParser {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
}

impl LineParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, msg)
    }

    fn expect(&mut self, want: &Token) -> Result<(), ParseError> {
        match self.next() {
            Some(ref t) if t == want => Ok(()),
            Some(t) => {
                Err(self.err(format!("expected {}, found {}", want.describe(), t.describe())))
            }
            None => Err(self.err(format!("expected {}, found end of line", want.describe()))),
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.next() {
            Some(Token::Ident(s)) => Ok(s),
            Some(t) => Err(self.err(format!("expected identifier, found {}", t.describe()))),
            None => Err(self.err("expected identifier, found end of line")),
        }
    }

    fn expect_int(&mut self) -> Result<usize, ParseError> {
        match self.next() {
            Some(Token::Int(v)) => Ok(v),
            Some(t) => Err(self.err(format!("expected integer, found {}", t.describe()))),
            None => Err(self.err("expected integer, found end of line")),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected trailing {}", t.describe()))),
        }
    }

    /// `<k>` or `bool`.
    fn domain_size(&mut self) -> Result<usize, ParseError> {
        match self.next() {
            Some(Token::Int(k)) if k >= 2 => Ok(k),
            Some(Token::Int(k)) => {
                Err(self.err(format!("domain size must be at least 2, got {k}")))
            }
            Some(Token::Ident(s)) if s == "bool" => Ok(2),
            Some(t) => Err(self.err(format!("expected domain size, found {}", t.describe()))),
            None => Err(self.err("expected domain size, found end of line")),
        }
    }

    fn expr(&mut self) -> Result<RawExpr, ParseError> {
        self.iff_expr()
    }

    fn iff_expr(&mut self) -> Result<RawExpr, ParseError> {
        let mut lhs = self.imp_expr()?;
        while self.peek() == Some(&Token::Iff) {
            self.next();
            let rhs = self.imp_expr()?;
            lhs = RawExpr::Bin(BinOp::Iff, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn imp_expr(&mut self) -> Result<RawExpr, ParseError> {
        let lhs = self.or_expr()?;
        if self.peek() == Some(&Token::Arrow) {
            self.next();
            let rhs = self.imp_expr()?;
            return Ok(RawExpr::Bin(BinOp::Imp, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> Result<RawExpr, ParseError> {
        let mut lhs = self.xor_expr()?;
        while self.peek() == Some(&Token::Or) {
            self.next();
            let rhs = self.xor_expr()?;
            lhs = RawExpr::Bin(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn xor_expr(&mut self) -> Result<RawExpr, ParseError> {
        let mut lhs = self.and_expr()?;
        while self.peek() == Some(&Token::Xor) {
            self.next();
            let rhs = self.and_expr()?;
            lhs = RawExpr::Bin(BinOp::Xor, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<RawExpr, ParseError> {
        let mut lhs = self.unary_expr()?;
        while self.peek() == Some(&Token::And) {
            self.next();
            let rhs = self.unary_expr()?;
            lhs = RawExpr::Bin(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> Result<RawExpr, ParseError> {
        if self.peek() == Some(&Token::Not) {
            self.next();
            return Ok(RawExpr::Not(Box::new(self.unary_expr()?)));
        }
        self.primary_expr()
    }

    fn primary_expr(&mut self) -> Result<RawExpr, ParseError> {
        match self.next() {
            Some(Token::LParen) => {
                let e = self.expr()?;
                self.expect(&Token::RParen)?;
                Ok(e)
            }
            Some(Token::Int(v)) => {
                if self.peek() == Some(&Token::Slash) {
                    self.next();
                    let den = self.expect_int()?;
                    Ok(RawExpr::Frac(v, den))
                } else {
                    Ok(RawExpr::Int(v))
                }
            }
            Some(Token::Ident(name)) if name == "d" => {
                self.expect(&Token::LParen)?;
                let k = self.expect_int()?;
                self.expect(&Token::Comma)?;
                let i = self.expect_int()?;
                self.expect(&Token::RParen)?;
                Ok(RawExpr::Delta(k, i))
            }
            Some(Token::Ident(name)) => {
                if self.peek() == Some(&Token::LParen) {
                    self.next();
                    let mut args = Vec::new();
                    if self.peek() != Some(&Token::RParen) {
                        loop {
                            args.push(self.expr()?);
                            match self.next() {
                                Some(Token::Comma) => continue,
                                Some(Token::RParen) => break,
                                Some(t) => {
                                    return Err(self.err(format!(
                                        "expected ',' or ')' in argument list, found {}",
                                        t.describe()
                                    )))
                                }
                                None => return Err(self.err("unterminated argument list")),
                            }
                        }
                    } else {
                        self.next();
                    }
                    Ok(RawExpr::Call(name, args))
                } else {
                    Ok(RawExpr::Name(name))
                }
            }
            Some(t) => Err(self.err(format!("expected expression, found {}", t.describe()))),
            None => Err(self.err("expected expression, found end of line")),
        }
    }
}

#[derive(Clone, Copy)]
enum NameEntry {
    State(usize),
    Control(usize),
    Op,
}

struct Resolver<'a> {
    states: &'a [VarDecl],
    controls: &'a [VarDecl],
    ops: &'a BTreeMap<String, Operator>,
    names: &'a BTreeMap<String, NameEntry>,
}

impl Resolver<'_> {
    /// Resolve `raw` against the expected output domain `k`.
    fn resolve(&self, raw: &RawExpr, k: usize, line: usize) -> Result<Expr, ParseError> {
        let err = |msg: String| Err(ParseError::new(line, msg));
        match raw {
            RawExpr::Name(name) => match self.names.get(name) {
                Some(NameEntry::State(pos)) => {
                    let have = self.states[*pos].domain.k;
                    if have != k {
                        return err(format!("variable {name} has domain {have}, expected {k}"));
                    }
                    Ok(Expr::Var(VarRef { kind: VarKind::State, pos: *pos }))
                }
                Some(NameEntry::Control(pos)) => {
                    let have = self.controls[*pos].domain.k;
                    if have != k {
                        return err(format!("variable {name} has domain {have}, expected {k}"));
                    }
                    Ok(Expr::Var(VarRef { kind: VarKind::Control, pos: *pos }))
                }
                Some(NameEntry::Op) => err(format!("operator {name} must be applied to arguments")),
                None => err(format!("unknown variable '{name}'")),
            },
            RawExpr::Call(name, args) => {
                let op = match self.names.get(name) {
                    Some(NameEntry::Op) => &self.ops[name],
                    Some(_) => return err(format!("'{name}' is a variable, not an operator")),
                    None => return err(format!("unknown operator '{name}'")),
                };
                if op.out_k != k {
                    return err(format!(
                        "operator {name} produces domain {}, expected {k}",
                        op.out_k
                    ));
                }
                if args.len() != op.arg_ks.len() {
                    return err(format!(
                        "operator {name} takes {} arguments, got {}",
                        op.arg_ks.len(),
                        args.len()
                    ));
                }
                let resolved = args
                    .iter()
                    .zip(&op.arg_ks)
                    .map(|(a, &ak)| self.resolve(a, ak, line))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Expr::Call(name.clone(), resolved))
            }
            RawExpr::Int(v) => match v {
                1 => Ok(Expr::Const { k, index: 1 }),
                0 => Ok(Expr::Const { k, index: k }),
                _ => err(format!("constant {v} is not a logical value (use fractions or d(k,i))")),
            },
            RawExpr::Frac(p, q) => match value_to_level(k, *p, *q) {
                Some(index) => Ok(Expr::Const { k, index }),
                None => err(format!("{p}/{q} is not a value of D_{k}")),
            },
            RawExpr::Delta(dk, i) => {
                if *dk != k {
                    return err(format!(
                        "delta literal d({dk},{i}) used where domain {k} is expected"
                    ));
                }
                if *i == 0 || *i > *dk {
                    return err(format!("delta index {i} out of range 1..={dk}"));
                }
                Ok(Expr::Const { k, index: *i })
            }
            RawExpr::Not(a) => {
                if k != 2 {
                    return err(format!(
                        "'!' produces a Boolean value, used where domain {k} is expected"
                    ));
                }
                Ok(Expr::Not(Box::new(self.resolve(a, 2, line)?)))
            }
            RawExpr::Bin(op, a, b) => {
                if k != 2 {
                    return err(format!(
                        "'{}' produces a Boolean value, used where domain {k} is expected",
                        op.symbol()
                    ));
                }
                Ok(Expr::Bin(
                    *op,
                    Box::new(self.resolve(a, 2, line)?),
                    Box::new(self.resolve(b, 2, line)?),
                ))
            }
        }
    }
}

/// Parse a network description. Reports unresolved names, arity and domain
/// mismatches with their line numbers.
pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    let mut name: Option<String> = None;
    let mut states: Vec<VarDecl> = Vec::new();
    let mut controls: Vec<VarDecl> = Vec::new();
    let mut ops: BTreeMap<String, Operator> = BTreeMap::new();
    let mut names: BTreeMap<String, NameEntry> = BTreeMap::new();
    let mut raw_updates: Vec<(String, RawExpr, usize)> = Vec::new();

    let declare = |names: &mut BTreeMap<String, NameEntry>,
                   id: &str,
                   entry: NameEntry,
                   line: usize|
     -> Result<(), ParseError> {
        if id == "d" || id == "bool" {
            return Err(ParseError::new(line, format!("'{id}' is reserved")));
        }
        if names.insert(id.to_string(), entry).is_some() {
            return Err(ParseError::new(line, format!("duplicate declaration of '{id}'")));
        }
        Ok(())
    };

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = lineno + 1;
        let tokens = tokenize(raw_line, line)?;
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser { tokens, pos: 0, line };
        match p.peek() {
            Some(Token::Ident(kw)) if kw == "network" => {
                p.next();
                let id = p.expect_ident()?;
                p.expect_end()?;
                if name.replace(id).is_some() {
                    return Err(ParseError::new(line, "duplicate network header"));
                }
            }
            Some(Token::Ident(kw)) if kw == "state" || kw == "control" => {
                let is_state = kw == "state";
                p.next();
                let id = p.expect_ident()?;
                p.expect(&Token::Colon)?;
                let k = p.domain_size()?;
                p.expect_end()?;
                let decl = VarDecl { name: id.clone(), domain: Domain { k } };
                if is_state {
                    declare(&mut names, &id, NameEntry::State(states.len()), line)?;
                    states.push(decl);
                } else {
                    declare(&mut names, &id, NameEntry::Control(controls.len()), line)?;
                    controls.push(decl);
                }
            }
            Some(Token::Ident(kw)) if kw == "op" => {
                p.next();
                let id = p.expect_ident()?;
                p.expect(&Token::Colon)?;
                p.expect(&Token::LParen)?;
                let mut arg_ks = vec![p.domain_size()?];
                while p.peek() == Some(&Token::Comma) {
                    p.next();
                    arg_ks.push(p.domain_size()?);
                }
                p.expect(&Token::RParen)?;
                p.expect(&Token::Arrow)?;
                let out_k = p.domain_size()?;
                p.expect(&Token::Equals)?;
                p.expect(&Token::LBracket)?;
                let mut indices = vec![p.expect_int()?];
                while p.peek() == Some(&Token::Comma) {
                    p.next();
                    indices.push(p.expect_int()?);
                }
                p.expect(&Token::RBracket)?;
                p.expect_end()?;
                let op = Operator::new(id.clone(), arg_ks, out_k, indices)
                    .map_err(|e| ParseError::new(line, e.to_string()))?;
                declare(&mut names, &id, NameEntry::Op, line)?;
                ops.insert(id, op);
            }
            Some(Token::Ident(_)) => {
                let id = p.expect_ident()?;
                p.expect(&Token::Prime)?;
                p.expect(&Token::Equals)?;
                let raw = p.expr()?;
                p.expect_end()?;
                raw_updates.push((id, raw, line));
            }
            Some(t) => {
                let d = t.describe();
                return Err(ParseError::new(
                    line,
                    format!("expected a declaration or update, found {d}"),
                ));
            }
            None => unreachable!("empty token lists are skipped"),
        }
    }

    let name = name.ok_or_else(|| ParseError::new(1, "missing 'network <name>' header"))?;
    if states.is_empty() {
        return Err(ParseError::new(1, "a network needs at least one state variable"));
    }

    let n: usize = states.iter().map(|v| v.domain.k).product();
    let m: usize = controls.iter().map(|v| v.domain.k).product();
    if n.checked_mul(m).is_none_or(|c| c > MAX_COMBINED_SPACE) {
        return Err(ParseError::new(
            1,
            format!(
                "combined control-state space exceeds the supported maximum {MAX_COMBINED_SPACE}"
            ),
        ));
    }

    let resolver = Resolver { states: &states, controls: &controls, ops: &ops, names: &names };
    let mut updates: Vec<Option<Expr>> = vec![None; states.len()];
    for (id, raw, line) in raw_updates {
        let pos = match names.get(&id) {
            Some(NameEntry::State(pos)) => *pos,
            _ => {
                return Err(ParseError::new(
                    line,
                    format!("update target '{id}' is not a state variable"),
                ))
            }
        };
        let expr = resolver.resolve(&raw, states[pos].domain.k, line)?;
        if updates[pos].replace(expr).is_some() {
            return Err(ParseError::new(line, format!("duplicate update for '{id}'")));
        }
    }
    let mut resolved = Vec::with_capacity(states.len());
    for (decl, upd) in states.iter().zip(updates) {
        match upd {
            Some(e) => resolved.push(e),
            None => {
                return Err(ParseError::new(
                    1,
                    format!("missing update equation for state '{}'", decl.name),
                ))
            }
        }
    }

    Ok(Network::from_parts(name, states, controls, resolved, ops.into_values().collect()))
}
