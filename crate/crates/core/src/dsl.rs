//! Text format for presentations.
//!
//! ```text
//! theory Boole;            # comments start with '#'
//! op 0/0; op and/2;
//! eq 2: and(x1,x2) = and(x2,x1);
//! end
//! ```

use crate::error::{Error, Result};
use crate::term::{is_op_name, is_var_name, Equation, Presentation, Signature, Term};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Punct(char),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (_, c) = chars[i];
            let column = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                let start = i;
                while i < chars.len() && {
                    let c = chars[i].1;
                    c.is_ascii_alphanumeric() || c == '_' || c == '.'
                } {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push(Spanned { tok: Tok::Word(word), line: lineno + 1, column });
            } else if ";/:=(),".contains(c) {
                out.push(Spanned { tok: Tok::Punct(c), line: lineno + 1, column });
                i += 1;
            } else {
                return Err(Error::Syntax { line: lineno + 1, column, message: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.column),
            None => (1, 1),
        };
        Err(Error::Syntax { line, column, message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn word(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.err("expected a name"),
        }
    }

    fn number(&mut self) -> Result<usize> {
        let w = self.word()?;
        match w.parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos -= 1;
                self.err(format!("expected a number, found `{w}`"))
            }
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let start = self.pos;
        let name = self.word()?;
        if is_var_name(&name) {
            let idx: usize = name[1..].parse().unwrap_or(0);
            if idx == 0 {
                self.pos = start;
                return self.err("variables are numbered from x1");
            }
            return Ok(Term::Var(idx));
        }
        if !is_op_name(&name) {
            self.pos = start;
            return self.err(format!("invalid operation name `{name}`"));
        }
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::Punct('(')) {
            self.pos += 1;
            if self.peek() == Some(&Tok::Punct(')')) {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    match self.peek() {
                        Some(Tok::Punct(',')) => self.pos += 1,
                        Some(Tok::Punct(')')) => {
                            self.pos += 1;
                            break;
                        }
                        _ => return self.err("expected `,` or `)`"),
                    }
                }
            }
        }
        Ok(Term::app(&name, args))
    }
}

/// Parses a presentation; operations and equations keep source order.
pub fn parse_presentation(src: &str) -> Result<Presentation> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    p.keyword("theory")?;
    let name = p.word()?;
    p.punct(';')?;
    let mut sig = Signature::new();
    let mut equations = Vec::new();
    loop {
        match p.peek() {
            None => return p.err("missing `end`"),
            Some(Tok::Word(w)) if w == "end" => {
                p.pos += 1;
                break;
            }
            Some(Tok::Word(w)) if w == "op" => {
                p.pos += 1;
                let at = p.pos;
                let op = p.word()?;
                p.punct('/')?;
                let arity = p.number()?;
                p.punct(';')?;
                if let Err(e) = sig.add(&op, arity) {
                    p.pos = at;
                    return match e {
                        Error::DuplicateOp(_) => Err(e),
                        other => p.err(other.to_string()),
                    };
                }
            }
            Some(Tok::Word(w)) if w == "eq" => {
                p.pos += 1;
                let context = p.number()?;
                p.punct(':')?;
                let left = p.term()?;
                p.punct('=')?;
                let right = p.term()?;
                p.punct(';')?;
                let eq = Equation::new(left, right, context);
                eq.check(&sig)?;
                equations.push(eq);
            }
            _ => return p.err("expected `op`, `eq` or `end`"),
        }
    }
    if p.pos != p.toks.len() {
        return p.err("unexpected input after `end`");
    }
    Presentation::new(&name, sig, equations)
}

/// Parses a single term (used for command-line arguments).
pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected input after term");
    }
    Ok(t)
}

/// Renders a presentation in the text format; `parse_presentation` inverts it.
pub fn print_presentation(p: &Presentation) -> String {
    let mut out = format!("theory {};\n", p.name);
    for op in p.signature.ops() {
        out.push_str(&format!("op {}/{};\n", op.name, op.arity));
    }
    for eq in &p.equations {
        out.push_str(&format!("eq {}: {} = {};\n", eq.context, eq.left, eq.right));
    }
    out.push_str("end\n");
    out
}
