//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := rational | name | '(' expr ')'
//! ```
//!
//! Rationals are written `p` or `p/q`. A leading sign is accepted at the start
//! of an expression or parenthesised group. Rational expressions additionally
//! allow `term := factor (('*'|'/') factor)*`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{PolyError, Polynomial, RatExpr, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Dot,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '.' => Tok::Dot,
            d if d.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((start, Tok::Int(s.parse().expect("digits"))));
                continue;
            }
            a if a.is_alphabetic() || a == '_' => {
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Name(chars[start..i].iter().collect())));
                continue;
            }
            other => {
                return Err(PolyError::Syntax {
                    position: start,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
    allow_division: bool,
}

/// Resolves a variable name against the ordering, accepting the aliases
/// `x, y, z` <-> `x1, x2, x3` when there are at most three variables.
fn resolve(name: &str, vars: &[String]) -> Option<usize> {
    if let Some(i) = vars.iter().position(|v| v == name) {
        return Some(i);
    }
    if vars.len() <= 3 {
        const SHORT: [&str; 3] = ["x", "y", "z"];
        const LONG: [&str; 3] = ["x1", "x2", "x3"];
        for i in 0..vars.len() {
            let v = vars[i].as_str();
            if (v == SHORT[i] && name == LONG[i]) || (v == LONG[i] && name == SHORT[i]) {
                return Some(i);
            }
        }
    }
    None
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            position: self.position(),
            message: message.into(),
        })
    }

    fn nvars(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<RatExpr, PolyError> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatExpr, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                Some(Tok::Slash) if self.allow_division => {
                    self.pos += 1;
                    let at = self.position();
                    let f = self.factor()?;
                    acc = (&acc / &f).map_err(|_| PolyError::Syntax {
                        position: at,
                        message: "division by zero".into(),
                    })?;
                }
                Some(Tok::Slash) => {
                    return Err(PolyError::NonPolynomial {
                        position: self.position(),
                        message: "division is only allowed inside a rational literal p/q".into(),
                    })
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatExpr, PolyError> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let at = self.position();
            match self.peek().cloned() {
                Some(Tok::Int(k)) => {
                    self.pos += 1;
                    let fractional = match self.peek() {
                        Some(Tok::Dot) => true,
                        Some(Tok::Slash) => !self.allow_division,
                        _ => false,
                    };
                    if fractional {
                        return Err(PolyError::NonPolynomial {
                            position: at,
                            message: "exponent must be a non-negative integer".into(),
                        });
                    }
                    let k: u32 = k.try_into().map_err(|_| PolyError::NonPolynomial {
                        position: at,
                        message: "exponent too large".into(),
                    })?;
                    return Ok(base.pow(k));
                }
                Some(Tok::Minus) | Some(Tok::Dot) => {
                    return Err(PolyError::NonPolynomial {
                        position: at,
                        message: "exponent must be a non-negative integer".into(),
                    })
                }
                Some(Tok::LParen) | Some(Tok::Name(_)) => {
                    return Err(PolyError::NonPolynomial {
                        position: at,
                        message: "exponent must be an integer literal".into(),
                    })
                }
                _ => return self.err("expected exponent after '^'"),
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<RatExpr, PolyError> {
        let at = self.position();
        match self.peek().cloned() {
            Some(Tok::Int(p)) => {
                self.pos += 1;
                if let Some(Tok::Dot) = self.peek() {
                    return Err(PolyError::Syntax {
                        position: self.position(),
                        message: "decimal literals are not supported; use p/q".into(),
                    });
                }
                let mut value = Rational::from_integer(p);
                if let Some(Tok::Slash) = self.peek() {
                    if let Some((_, Tok::Int(q))) = self.toks.get(self.pos + 1).cloned() {
                        if q.is_zero() {
                            return Err(PolyError::Syntax {
                                position: at,
                                message: "zero denominator in rational literal".into(),
                            });
                        }
                        self.pos += 2;
                        value /= Rational::from_integer(q);
                    }
                }
                Ok(RatExpr::constant(self.nvars(), value))
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                match resolve(&name, self.vars) {
                    Some(i) => Ok(Polynomial::var(self.nvars(), i).into()),
                    None => Err(PolyError::UnknownVariable {
                        name,
                        position: at,
                    }),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` into an expanded polynomial over the given variable order.
pub fn parse_expression<S: AsRef<str>>(
    text: &str,
    variable_order: &[S],
) -> Result<Polynomial, PolyError> {
    let e = parse(text, variable_order, false)?;
    debug_assert!(e.denominator().is_one());
    Ok(e.numerator().clone())
}

/// Parses a quotient of polynomials such as `6*x/(3*x^2 + 1)`, the form
/// [`RatExpr`] prints itself in.
pub fn parse_rational_expression<S: AsRef<str>>(
    text: &str,
    variable_order: &[S],
) -> Result<RatExpr, PolyError> {
    parse(text, variable_order, true)
}

fn parse<S: AsRef<str>>(
    text: &str,
    variable_order: &[S],
    allow_division: bool,
) -> Result<RatExpr, PolyError> {
    let vars: Vec<String> = variable_order.iter().map(|s| s.as_ref().to_string()).collect();
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
        vars: &vars,
        allow_division,
    };
    if parser.toks.is_empty() {
        return parser.err("empty expression");
    }
    let p = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.err("unexpected trailing input");
    }
    Ok(p)
}

/// Infers a variable order from the names used in `text`: `x1..xn` when every
/// name has that form (n = largest index), otherwise the prefix of `x, y, z`
/// up to the last letter used, otherwise the names in order of appearance.
pub fn infer_variables(text: &str) -> Result<Vec<String>, PolyError> {
    let mut names: Vec<String> = Vec::new();
    for (_, t) in tokenize(text)? {
        if let Tok::Name(n) = t {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    let indexed: Option<Vec<usize>> = names
        .iter()
        .map(|n| {
            n.strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&k| k >= 1)
        })
        .collect();
    if let Some(idx) = indexed {
        let n = idx.into_iter().max().unwrap_or(1);
        return Ok((1..=n).map(|i| format!("x{i}")).collect());
    }
    const XYZ: [&str; 3] = ["x", "y", "z"];
    if names.iter().all(|n| XYZ.contains(&n.as_str())) {
        let last = names
            .iter()
            .map(|n| XYZ.iter().position(|x| x == n).unwrap())
            .max()
            .unwrap_or(0);
        return Ok(XYZ[..=last].iter().map(|s| s.to_string()).collect());
    }
    Ok(names)
}
