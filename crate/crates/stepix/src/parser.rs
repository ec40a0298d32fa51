//! Concrete syntax for terms and types.
//!
//! Terms: `c | x | \x. a | \x:T. a | a b | fix a`, application
//! left-associative, lambda and `fix` bodies extending maximally right,
//! parentheses, line comments `--`.
//!
//! Types: `Bot | Top | Nat | T -> T | mu X. T | X | floor(T, k)`, arrow
//! right-associative, `mu` binding weakest. In a binder annotation a bare
//! `mu` must be parenthesized so its dot cannot swallow the lambda's.

use std::fmt;
use std::rc::Rc;

use crate::term::SurfaceTerm;
use crate::types::TypeExpr;

/// Lexical or syntax error with a 1-based line:column position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    Colon,
    Comma,
    LParen,
    RParen,
    Arrow,
    Number(u64),
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lambda => write!(f, "`\\`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Number(n) => write!(f, "number `{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('-') => {
                        // line comment
                        while let Some(&c) = chars.peek() {
                            if c == '\n' {
                                break;
                            }
                            bump(&mut chars);
                        }
                    }
                    Some('>') => {
                        bump(&mut chars);
                        toks.push((Tok::Arrow, tl, tc));
                    }
                    _ => return Err(ParseError::new(tl, tc, "expected `->` or `--`")),
                }
            }
            '\\' | 'λ' => {
                bump(&mut chars);
                toks.push((Tok::Lambda, tl, tc));
            }
            '.' => {
                bump(&mut chars);
                toks.push((Tok::Dot, tl, tc));
            }
            ':' => {
                bump(&mut chars);
                toks.push((Tok::Colon, tl, tc));
            }
            ',' => {
                bump(&mut chars);
                toks.push((Tok::Comma, tl, tc));
            }
            '(' => {
                bump(&mut chars);
                toks.push((Tok::LParen, tl, tc));
            }
            ')' => {
                bump(&mut chars);
                toks.push((Tok::RParen, tl, tc));
            }
            '0'..='9' => {
                let mut digits = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        digits.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let n = digits
                    .parse::<u64>()
                    .map_err(|_| ParseError::new(tl, tc, format!("number `{digits}` out of range")))?;
                toks.push((Tok::Number(n), tl, tc));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        ident.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(ident), tl, tc));
            }
            other => {
                return Err(ParseError::new(tl, tc, format!("unexpected character `{other}`")));
            }
        }
    }
    toks.push((Tok::Eof, line, col));
    Ok(toks)
}

impl Lexer {
    fn new(text: &str) -> Result<Lexer, ParseError> {
        Ok(Lexer {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let (l, c) = self.here();
        let got = self.next();
        if got == want {
            Ok(())
        } else {
            Err(ParseError::new(l, c, format!("expected {want}, found {got}")))
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (l, c) = self.here();
        ParseError::new(l, c, msg)
    }
}

const TYPE_KEYWORDS: [&str; 5] = ["Bot", "Top", "Nat", "mu", "floor"];

fn is_term_keyword(s: &str) -> bool {
    s == "fix"
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

fn parse_term_level(lx: &mut Lexer) -> Result<SurfaceTerm, ParseError> {
    match lx.peek() {
        Tok::Lambda => {
            lx.next();
            let (l, c) = lx.here();
            let name = match lx.next() {
                Tok::Ident(s) if !is_term_keyword(&s) => s,
                other => {
                    return Err(ParseError::new(l, c, format!("expected binder name, found {other}")))
                }
            };
            let annot = if lx.peek() == &Tok::Colon {
                lx.next();
                Some(parse_annot_type(lx)?)
            } else {
                None
            };
            lx.expect(Tok::Dot)?;
            let body = parse_term_level(lx)?;
            Ok(SurfaceTerm::Abs {
                param: name,
                annot,
                body: Rc::new(body),
            })
        }
        Tok::Ident(s) if s == "fix" => {
            lx.next();
            let body = parse_term_level(lx)?;
            Ok(SurfaceTerm::Fix(Rc::new(body)))
        }
        _ => parse_app(lx),
    }
}

fn parse_app(lx: &mut Lexer) -> Result<SurfaceTerm, ParseError> {
    let mut acc = parse_atom(lx)?;
    loop {
        match lx.peek() {
            Tok::Number(_) | Tok::LParen => {
                let arg = parse_atom(lx)?;
                acc = SurfaceTerm::app(acc, arg);
            }
            Tok::Ident(s) if !is_term_keyword(s) => {
                let arg = parse_atom(lx)?;
                acc = SurfaceTerm::app(acc, arg);
            }
            Tok::Lambda => {
                // trailing lambda argument extends maximally right
                let arg = parse_term_level(lx)?;
                acc = SurfaceTerm::app(acc, arg);
            }
            Tok::Ident(s) if s == "fix" => {
                let arg = parse_term_level(lx)?;
                acc = SurfaceTerm::app(acc, arg);
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_atom(lx: &mut Lexer) -> Result<SurfaceTerm, ParseError> {
    let (l, c) = lx.here();
    match lx.next() {
        Tok::Number(n) => Ok(SurfaceTerm::Const(n)),
        Tok::Ident(s) if !is_term_keyword(&s) => Ok(SurfaceTerm::Var(s)),
        Tok::LParen => {
            let t = parse_term_level(lx)?;
            lx.expect(Tok::RParen)?;
            Ok(t)
        }
        other => Err(ParseError::new(l, c, format!("expected a term, found {other}"))),
    }
}

/// Parse the concrete syntax of a term.
pub fn parse_term(text: &str) -> Result<SurfaceTerm, ParseError> {
    let mut lx = Lexer::new(text)?;
    let t = parse_term_level(&mut lx)?;
    if lx.peek() != &Tok::Eof {
        return Err(lx.err(format!("trailing input: found {}", lx.peek())));
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

fn parse_type_level(lx: &mut Lexer, scope: &mut Vec<String>) -> Result<TypeExpr, ParseError> {
    if let Tok::Ident(s) = lx.peek() {
        if s == "mu" {
            lx.next();
            let (l, c) = lx.here();
            let name = match lx.next() {
                Tok::Ident(s) if !TYPE_KEYWORDS.contains(&s.as_str()) => s,
                other => {
                    return Err(ParseError::new(l, c, format!("expected type variable, found {other}")))
                }
            };
            lx.expect(Tok::Dot)?;
            scope.push(name);
            let body = parse_type_level(lx, scope)?;
            scope.pop();
            return Ok(TypeExpr::mu(body));
        }
    }
    parse_arrow(lx, scope)
}

fn parse_arrow(lx: &mut Lexer, scope: &mut Vec<String>) -> Result<TypeExpr, ParseError> {
    let dom = parse_type_atom(lx, scope)?;
    if lx.peek() == &Tok::Arrow {
        lx.next();
        // right-associative; mu allowed bare in the codomain
        let cod = parse_type_level(lx, scope)?;
        Ok(TypeExpr::arrow(dom, cod))
    } else {
        Ok(dom)
    }
}

fn parse_type_atom(lx: &mut Lexer, scope: &mut Vec<String>) -> Result<TypeExpr, ParseError> {
    let (l, c) = lx.here();
    match lx.next() {
        Tok::Ident(s) => match s.as_str() {
            "Bot" => Ok(TypeExpr::Bot),
            "Top" => Ok(TypeExpr::Top),
            "Nat" => Ok(TypeExpr::Nat),
            "floor" => {
                lx.expect(Tok::LParen)?;
                let inner = parse_type_level(lx, scope)?;
                lx.expect(Tok::Comma)?;
                let (kl, kc) = lx.here();
                let cutoff = match lx.next() {
                    Tok::Number(n) => n,
                    other => {
                        return Err(ParseError::new(kl, kc, format!("expected cutoff, found {other}")))
                    }
                };
                lx.expect(Tok::RParen)?;
                Ok(TypeExpr::Floor(Rc::new(inner), cutoff))
            }
            "mu" => Err(ParseError::new(l, c, "`mu` must be parenthesized here")),
            name => match scope.iter().rev().position(|b| b == name) {
                Some(i) => Ok(TypeExpr::TVar(i)),
                None => Err(ParseError::new(l, c, format!("unbound type variable `{name}`"))),
            },
        },
        Tok::LParen => {
            let t = parse_type_level(lx, scope)?;
            lx.expect(Tok::RParen)?;
            Ok(t)
        }
        other => Err(ParseError::new(l, c, format!("expected a type, found {other}"))),
    }
}

/// A type in binder-annotation position: parsed at arrow level, so a bare
/// `mu` (whose dot would be ambiguous with the lambda's) is rejected
/// unless parenthesized.
fn parse_annot_type(lx: &mut Lexer) -> Result<TypeExpr, ParseError> {
    parse_arrow(lx, &mut Vec::new())
}

/// Parse the concrete syntax of a type. Type variables must be bound by an
/// enclosing `mu`.
pub fn parse_type(text: &str) -> Result<TypeExpr, ParseError> {
    let mut lx = Lexer::new(text)?;
    let mut scope = Vec::new();
    let t = parse_type_level(&mut lx, &mut scope)?;
    if lx.peek() != &Tok::Eof {
        return Err(lx.err(format!("trailing input: found {}", lx.peek())));
    }
    Ok(t)
}

/// Parse environment bindings of the form `x: Nat, f: Nat -> Nat`.
pub fn parse_env(text: &str) -> Result<crate::types::TypeEnv, ParseError> {
    let mut lx = Lexer::new(text)?;
    let mut env = crate::types::TypeEnv::new();
    if lx.peek() == &Tok::Eof {
        return Ok(env);
    }
    loop {
        let (l, c) = lx.here();
        let name = match lx.next() {
            Tok::Ident(s) if !is_term_keyword(&s) && !TYPE_KEYWORDS.contains(&s.as_str()) => s,
            other => {
                return Err(ParseError::new(l, c, format!("expected variable name, found {other}")))
            }
        };
        lx.expect(Tok::Colon)?;
        let ty = parse_type_level(&mut lx, &mut Vec::new())?;
        env.insert(name, ty);
        match lx.peek() {
            Tok::Comma => {
                lx.next();
            }
            Tok::Eof => return Ok(env),
            other => return Err(lx.err(format!("expected `,` or end of input, found {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::SurfaceTerm as S;

    #[test]
    fn parses_identity() {
        assert_eq!(
            parse_term("\\x. x").unwrap(),
            S::abs("x", None, S::var("x"))
        );
    }

    #[test]
    fn parses_application_of_identity() {
        assert_eq!(
            parse_term("(\\x. x) 0").unwrap(),
            S::app(S::abs("x", None, S::var("x")), S::Const(0))
        );
    }

    #[test]
    fn parses_fix_of_identity() {
        assert_eq!(
            parse_term("fix \\x. x").unwrap(),
            S::fix(S::abs("x", None, S::var("x")))
        );
    }

    #[test]
    fn application_is_left_associative() {
        assert_eq!(
            parse_term("a b c").unwrap(),
            S::app(S::app(S::var("a"), S::var("b")), S::var("c"))
        );
    }

    #[test]
    fn lambda_body_extends_right() {
        assert_eq!(
            parse_term("\\x. x x").unwrap(),
            S::abs("x", None, S::app(S::var("x"), S::var("x")))
        );
    }

    #[test]
    fn annotations_parse() {
        let t = parse_term("\\x:Nat. x").unwrap();
        assert_eq!(t, S::abs("x", Some(TypeExpr::Nat), S::var("x")));
        let t = parse_term("\\f:Nat -> Nat. \\x:Nat. f x").unwrap();
        let S::Abs { annot, .. } = &t else { panic!() };
        assert_eq!(annot.as_ref().unwrap(), &crate::parser::parse_type("Nat -> Nat").unwrap());
        // mu annotation requires parens
        assert!(parse_term("\\x:mu X. X. x").is_err());
        assert!(parse_term("\\x:(mu X. Nat -> X). x").is_ok());
    }

    #[test]
    fn comments_and_whitespace() {
        let t = parse_term("-- the identity\n\\x. -- binder\n  x\n").unwrap();
        assert_eq!(t, S::abs("x", None, S::var("x")));
    }

    #[test]
    fn reports_positions() {
        let err = parse_term("(\\x. x").unwrap_err();
        assert_eq!((err.line, err.column), (1, 7));
        let err = parse_term("\\x. $").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
    }

    #[test]
    fn rejects_trailing_input() {
        assert!(parse_term("0 0 )").is_err());
        assert!(parse_type("Nat Nat").is_err());
    }

    #[test]
    fn type_examples() {
        assert_eq!(
            parse_type("Nat -> Nat").unwrap(),
            TypeExpr::arrow(TypeExpr::Nat, TypeExpr::Nat)
        );
        assert_eq!(
            parse_type("mu X. Nat -> X").unwrap(),
            TypeExpr::mu(TypeExpr::arrow(TypeExpr::Nat, TypeExpr::TVar(0)))
        );
        assert!(parse_type("X").is_err());
        assert!(parse_type("mu X. Y").is_err());
    }

    #[test]
    fn parses_env_bindings() {
        let env = parse_env("x: Nat, f: Nat -> Nat").unwrap();
        assert_eq!(env.len(), 2);
        assert_eq!(env["x"], TypeExpr::Nat);
        assert_eq!(env["f"], parse_type("Nat -> Nat").unwrap());
        assert!(parse_env("").unwrap().is_empty());
    }

    #[test]
    fn fix_body_extends_right() {
        // fix a b parses as fix (a b)
        assert_eq!(
            parse_term("fix a b").unwrap(),
            S::fix(S::app(S::var("a"), S::var("b")))
        );
        assert_eq!(
            parse_term("(fix a) b").unwrap(),
            S::app(S::fix(S::var("a")), S::var("b"))
        );
    }
}
