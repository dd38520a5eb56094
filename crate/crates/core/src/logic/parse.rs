//! Recursive-descent parser for the formula text grammar:
//!
//! ```text
//! formula := quant | impl
//! quant   := ("forall" | "exists") var "." formula
//! impl    := or ("->" impl)?            (right associative)
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | atom
//! atom    := "true" | "false" | rel "(" terms ")" | term "=" term | "(" formula ")"
//! ```
//!
//! Quantifiers bind weakest; printing inverts parsing. Bare identifiers
//! resolve to constants of the language, then to parameters (carrier
//! elements), then to variables.

use super::{Formula, Language, LogicError, Term};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    lang: &'a Language,
    params: &'a [String],
}

pub fn parse_formula(text: &str, lang: &Language) -> Result<Formula, LogicError> {
    parse_formula_with_params(text, lang, &[])
}

/// Parses with carrier element names usable as constants (the
/// parameter-expanded language).
pub fn parse_formula_with_params(
    text: &str,
    lang: &Language,
    params: &[String],
) -> Result<Formula, LogicError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, lang, params };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a formula and equips it with the context of its free variables in
/// order of first occurrence.
pub fn parse_formula_in_context(
    text: &str,
    lang: &Language,
) -> Result<super::FormulaInContext, LogicError> {
    let formula = parse_formula(text, lang)?;
    let mut free = Vec::new();
    formula.free_vars(&mut free);
    super::FormulaInContext::new(super::Context::new(free)?, formula)
}

pub fn parse_term(text: &str, lang: &Language) -> Result<Term, LogicError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, lang, params: &[] };
    let t = p.term()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(t)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> LogicError {
        LogicError::Syntax { col: self.pos + 1, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), LogicError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{token}`")))
        }
    }

    // Identifiers are [A-Za-z0-9_]+; leading digits are allowed because
    // carrier and frame element names like "0" appear as parameters.
    fn ident(&mut self) -> Option<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        while end < self.src.len()
            && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
        {
            end += 1;
        }
        if end == start {
            return None;
        }
        self.pos = end;
        Some((String::from_utf8_lossy(&self.src[start..end]).into_owned(), start))
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        self.skip_ws();
        let save = self.pos;
        if let Some((word, _)) = self.ident() {
            if word == "forall" || word == "exists" {
                let (var, col) = self.ident().ok_or_else(|| self.err("expected a variable"))?;
                if self.lang.function_arity(&var).is_some()
                    || self.lang.relation_arity(&var).is_some()
                    || self.params.contains(&var)
                {
                    return Err(LogicError::Syntax {
                        col: col + 1,
                        msg: format!("`{var}` is a declared symbol, not a variable"),
                    });
                }
                self.expect(".")?;
                let body = self.formula()?;
                return Ok(if word == "forall" {
                    Formula::Forall(var, Box::new(body))
                } else {
                    Formula::Exists(var, Box::new(body))
                });
            }
            self.pos = save;
        }
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let rhs = self.implication_or_quant()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    // The right-hand side of `->` may start a quantifier, which then extends
    // to the end: `R(v) -> exists w. v = w`.
    fn implication_or_quant(&mut self) -> Result<Formula, LogicError> {
        self.formula()
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut acc = self.conjunction()?;
        loop {
            self.skip_ws();
            // `|` but not `|...` variants; the grammar has only one
            if self.peek() == Some(b'|') {
                self.pos += 1;
                let rhs = self.conjunction()?;
                acc = Formula::or(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'&') {
                self.pos += 1;
                let rhs = self.unary()?;
                acc = Formula::and(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        if self.peek() == Some(b'~') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Formula::not(inner));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, LogicError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.formula()?;
                self.expect(")")?;
                Ok(inner)
            }
            Some(_) => {
                let save = self.pos;
                if let Some((word, col)) = self.ident() {
                    if word == "true" {
                        return Ok(Formula::True);
                    }
                    if word == "false" {
                        return Ok(Formula::False);
                    }
                    if let Some(arity) = self.lang.relation_arity(&word) {
                        let args = if self.peek() == Some(b'(') {
                            self.term_list()?
                        } else {
                            Vec::new()
                        };
                        if args.len() != arity {
                            return Err(LogicError::Arity {
                                col: col + 1,
                                symbol: word,
                                expected: arity,
                                got: args.len(),
                            });
                        }
                        return Ok(Formula::Rel(word, args));
                    }
                    self.pos = save;
                }
                let lhs = self.term()?;
                self.expect("=")?;
                let rhs = self.term()?;
                Ok(Formula::Eq(lhs, rhs))
            }
            None => Err(self.err("expected a formula")),
        }
    }

    fn term_list(&mut self) -> Result<Vec<Term>, LogicError> {
        self.expect("(")?;
        let mut args = Vec::new();
        if self.peek() != Some(b')') {
            loop {
                args.push(self.term()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        let (word, col) = match self.ident() {
            Some(w) => w,
            None => return Err(self.err("expected a term")),
        };
        if let Some(arity) = self.lang.function_arity(&word) {
            let args = if self.peek() == Some(b'(') {
                self.term_list()?
            } else {
                Vec::new()
            };
            if args.len() != arity {
                return Err(LogicError::Arity {
                    col: col + 1,
                    symbol: word,
                    expected: arity,
                    got: args.len(),
                });
            }
            return Ok(Term::App(word, args));
        }
        if self.lang.relation_arity(&word).is_some() {
            return Err(LogicError::Syntax {
                col: col + 1,
                msg: format!("relation symbol `{word}` used as a term"),
            });
        }
        if let Some(i) = self.params.iter().position(|p| p == &word) {
            return Ok(Term::Param(i));
        }
        // an applied but undeclared symbol is an error, not a variable
        if self.peek() == Some(b'(') {
            return Err(LogicError::UnknownSymbol { name: word, col: col + 1 });
        }
        Ok(Term::Var(word))
    }
}
