//! Recursive-descent parser for the PDDL subset: conjunctive positive
//! preconditions, add/delete effects, and a single additive total-cost
//! effect per action.

use super::lexer::{tokenize, Spanned, Token};
use super::{
    ActionSchema, CostExpr, Literal, ParseError, ParseErrorKind, PddlDomain, PddlProblem, Term,
};

const UNSUPPORTED_HEADS: &[&str] = &[
    "forall", "exists", "or", "when", "imply", "oneof", "either", "decrease", "assign",
    "scale-up", "scale-down", "preference",
];

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    last_line: u32,
    last_col: u32,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(text)?;
        let (last_line, last_col) = tokens
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1));
        Ok(Parser { tokens, pos: 0, last_line, last_col })
    }

    fn here(&self) -> (u32, u32) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or((self.last_line, self.last_col))
    }

    fn syntax<T>(&self, expected: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        let found = self
            .tokens
            .get(self.pos)
            .map(|t| t.token.describe())
            .unwrap_or_else(|| "end of input".to_string());
        Err(ParseError {
            line,
            col,
            kind: ParseErrorKind::Syntax { expected: expected.into(), found },
        })
    }

    fn unsupported<T>(&self, construct: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError {
            line,
            col,
            kind: ParseErrorKind::Unsupported { construct: construct.into() },
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.token)
    }

    fn next(&mut self) -> Option<&Spanned> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_lparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::LParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax("'('"),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax("')'"),
        }
    }

    fn expect_symbol(&mut self, sym: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::Symbol(s)) if s == sym => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax(format!("'{sym}'")),
        }
    }

    fn symbol(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Token::Symbol(s)) => {
                let s = s.clone();
                if s == "-" {
                    return self.unsupported("typed parameters");
                }
                self.pos += 1;
                Ok(s)
            }
            _ => self.syntax(what),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        match self.peek() {
            Some(Token::Number(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.syntax("a number"),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    /// Skips a balanced parenthesized form whose opening paren was consumed.
    fn skip_form(&mut self) -> Result<(), ParseError> {
        let mut depth = 1usize;
        while depth > 0 {
            match self.next().map(|t| t.token.clone()) {
                Some(Token::LParen) => depth += 1,
                Some(Token::RParen) => depth -= 1,
                Some(_) => {}
                None => return self.syntax("')'"),
            }
        }
        Ok(())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let s = self.symbol("a term")?;
        if let Some(stripped) = s.strip_prefix('?') {
            if stripped.is_empty() {
                return self.syntax("a variable name after '?'");
            }
            Ok(Term::Var(s))
        } else {
            Ok(Term::Const(s))
        }
    }

    /// `(pred term*)` with the opening paren not yet consumed.
    fn literal(&mut self) -> Result<Literal, ParseError> {
        self.expect_lparen()?;
        let pred = self.symbol("a predicate name")?;
        if UNSUPPORTED_HEADS.contains(&pred.as_str()) {
            self.pos -= 1;
            return self.unsupported(pred);
        }
        if pred == "not" || pred == "and" || pred == "increase" || pred == "=" {
            self.pos -= 1;
            return self.syntax("a predicate name");
        }
        let mut args = Vec::new();
        while !matches!(self.peek(), Some(Token::RParen)) {
            args.push(self.term()?);
        }
        self.expect_rparen()?;
        Ok(Literal { pred, args })
    }

    /// Conjunction of positive literals: `(and lit*)` or a bare literal.
    fn conjunction(&mut self) -> Result<Vec<Literal>, ParseError> {
        self.expect_lparen()?;
        match self.peek() {
            Some(Token::Symbol(s)) if s == "and" => {
                self.pos += 1;
                let mut lits = Vec::new();
                while !matches!(self.peek(), Some(Token::RParen)) {
                    match self.peek() {
                        Some(Token::LParen) => lits.push(self.literal_checked()?),
                        _ => return self.syntax("'(' or ')'"),
                    }
                }
                self.expect_rparen()?;
                Ok(lits)
            }
            _ => {
                self.pos -= 1;
                Ok(vec![self.literal_checked()?])
            }
        }
    }

    /// A literal in a positive-only context; flags `not` as unsupported.
    fn literal_checked(&mut self) -> Result<Literal, ParseError> {
        let mark = self.pos;
        self.expect_lparen()?;
        if let Some(Token::Symbol(s)) = self.peek() {
            if s == "not" {
                return self.unsupported("negative precondition");
            }
        }
        self.pos = mark;
        self.literal()
    }

    fn effect(&mut self, action: &str) -> Result<(Vec<Literal>, Vec<Literal>, Option<CostExpr>), ParseError> {
        let mut add = Vec::new();
        let mut del = Vec::new();
        let mut cost = None;
        self.expect_lparen()?;
        match self.peek() {
            Some(Token::Symbol(s)) if s == "and" => {
                self.pos += 1;
                while !matches!(self.peek(), Some(Token::RParen)) {
                    self.effect_item(action, &mut add, &mut del, &mut cost)?;
                }
                self.expect_rparen()?;
            }
            _ => {
                self.pos -= 1;
                self.effect_item(action, &mut add, &mut del, &mut cost)?;
            }
        }
        Ok((add, del, cost))
    }

    fn effect_item(
        &mut self,
        action: &str,
        add: &mut Vec<Literal>,
        del: &mut Vec<Literal>,
        cost: &mut Option<CostExpr>,
    ) -> Result<(), ParseError> {
        let mark = self.pos;
        self.expect_lparen()?;
        let head = match self.peek() {
            Some(Token::Symbol(s)) => s.clone(),
            _ => return self.syntax("an effect"),
        };
        if UNSUPPORTED_HEADS.contains(&head.as_str()) {
            return self.unsupported(head);
        }
        match head.as_str() {
            "not" => {
                self.pos += 1;
                del.push(self.literal()?);
                self.expect_rparen()?;
            }
            "increase" => {
                self.pos += 1;
                self.expect_lparen()?;
                self.expect_symbol("total-cost")?;
                self.expect_rparen()?;
                if cost.is_some() {
                    return self.syntax(format!("a single total-cost effect in action {action}"));
                }
                *cost = Some(match self.peek() {
                    Some(Token::Number(_)) => CostExpr::Constant(self.number()?),
                    Some(Token::LParen) => {
                        self.expect_lparen()?;
                        let name = self.symbol("a cost function name")?;
                        let mut args = Vec::new();
                        while !matches!(self.peek(), Some(Token::RParen)) {
                            args.push(self.term()?);
                        }
                        self.expect_rparen()?;
                        CostExpr::Function { name, args }
                    }
                    _ => return self.syntax("a number or a cost function term"),
                });
                self.expect_rparen()?;
            }
            _ => {
                self.pos = mark;
                add.push(self.literal()?);
            }
        }
        Ok(())
    }

    fn action(&mut self) -> Result<ActionSchema, ParseError> {
        // ":action" already consumed.
        let name = self.symbol("an action name")?;
        self.expect_symbol(":parameters")?;
        self.expect_lparen()?;
        let mut params = Vec::new();
        while !matches!(self.peek(), Some(Token::RParen)) {
            match self.term()? {
                Term::Var(v) => params.push(v),
                Term::Const(c) => {
                    self.pos -= 1;
                    if c == "-" {
                        return self.unsupported("typed parameters");
                    }
                    return self.syntax("a ?variable");
                }
            }
        }
        self.expect_rparen()?;
        self.expect_symbol(":precondition")?;
        let precondition = self.conjunction()?;
        self.expect_symbol(":effect")?;
        let (add, del, cost) = self.effect(&name)?;
        self.expect_rparen()?;

        let schema = ActionSchema {
            name: name.clone(),
            params,
            precondition,
            add,
            del,
            cost: cost.unwrap_or(CostExpr::Constant(0.0)),
        };
        // Every variable used must be bound by the parameter list.
        for lit in schema
            .precondition
            .iter()
            .chain(schema.add.iter())
            .chain(schema.del.iter())
        {
            for t in &lit.args {
                if let Term::Var(v) = t {
                    if !schema.params.contains(v) {
                        return self.syntax(format!("parameter {v} bound in action {name}"));
                    }
                }
            }
        }
        if let CostExpr::Function { args, .. } = &schema.cost {
            for t in args {
                if let Term::Var(v) = t {
                    if !schema.params.contains(v) {
                        return self.syntax(format!("parameter {v} bound in action {name}"));
                    }
                }
            }
        }
        Ok(schema)
    }
}

/// Parses a full domain definition.
pub fn parse_domain(text: &str) -> Result<PddlDomain, ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_lparen()?;
    p.expect_symbol("define")?;
    p.expect_lparen()?;
    p.expect_symbol("domain")?;
    let name = p.symbol("a domain name")?;
    p.expect_rparen()?;

    let mut predicates = Vec::new();
    let mut actions: Vec<ActionSchema> = Vec::new();
    while !matches!(p.peek(), Some(Token::RParen)) {
        p.expect_lparen()?;
        let section = p.symbol("a domain section")?;
        match section.as_str() {
            ":requirements" => {
                while let Some(Token::Symbol(s)) = p.peek() {
                    let s = s.clone();
                    match s.as_str() {
                        ":action-costs" | ":strips" => {
                            p.pos += 1;
                        }
                        other => return p.unsupported(other.to_string()),
                    }
                }
                p.expect_rparen()?;
            }
            ":predicates" => {
                while matches!(p.peek(), Some(Token::LParen)) {
                    let lit = p.literal()?;
                    predicates.push((lit.pred, lit.args.len()));
                }
                p.expect_rparen()?;
            }
            ":functions" => {
                // Declarations only; arities are not enforced.
                p.skip_form()?;
            }
            ":action" => {
                let a = p.action()?;
                if actions.iter().any(|b| b.name == a.name) {
                    return p.syntax(format!("a unique action name (duplicate {})", a.name));
                }
                actions.push(a);
            }
            ":types" | ":constants" | ":derived" | ":axioms" => {
                return p.unsupported(section.trim_start_matches(':').to_string());
            }
            other => return p.syntax(format!("a known domain section, not {other}")),
        }
    }
    p.expect_rparen()?;
    if !p.at_end() {
        return p.syntax("end of input");
    }
    Ok(PddlDomain { name, predicates, actions })
}

/// Parses a single `(:action ...)` form on its own, e.g. a listing
/// excerpted from a larger domain.
pub fn parse_action(text: &str) -> Result<ActionSchema, ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_lparen()?;
    p.expect_symbol(":action")?;
    let a = p.action()?;
    if !p.at_end() {
        return p.syntax("end of input");
    }
    Ok(a)
}

/// Parses a problem file: objects, init (with function assignments), goal.
pub fn parse_problem(text: &str) -> Result<PddlProblem, ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_lparen()?;
    p.expect_symbol("define")?;
    p.expect_lparen()?;
    p.expect_symbol("problem")?;
    let name = p.symbol("a problem name")?;
    p.expect_rparen()?;

    let mut domain = String::new();
    let mut objects = Vec::new();
    let mut init = Vec::new();
    let mut function_values = Vec::new();
    let mut goal = Vec::new();
    while !matches!(p.peek(), Some(Token::RParen)) {
        p.expect_lparen()?;
        let section = p.symbol("a problem section")?;
        match section.as_str() {
            ":domain" => {
                domain = p.symbol("a domain name")?;
                p.expect_rparen()?;
            }
            ":objects" => {
                while let Some(Token::Symbol(_)) = p.peek() {
                    objects.push(p.symbol("an object name")?);
                }
                p.expect_rparen()?;
            }
            ":init" => {
                while matches!(p.peek(), Some(Token::LParen)) {
                    let mark = p.pos;
                    p.expect_lparen()?;
                    if matches!(p.peek(), Some(Token::Symbol(s)) if s == "=") {
                        p.pos += 1;
                        p.expect_lparen()?;
                        let fname = p.symbol("a function name")?;
                        let mut args = Vec::new();
                        while let Some(Token::Symbol(_)) = p.peek() {
                            args.push(p.symbol("a function argument")?);
                        }
                        p.expect_rparen()?;
                        let value = p.number()?;
                        p.expect_rparen()?;
                        function_values.push((fname, args, value));
                    } else {
                        p.pos = mark;
                        init.push(p.literal()?);
                    }
                }
                p.expect_rparen()?;
            }
            ":goal" => {
                goal = p.conjunction()?;
                p.expect_rparen()?;
            }
            ":metric" => {
                p.skip_form()?;
            }
            other => return p.syntax(format!("a known problem section, not {other}")),
        }
    }
    p.expect_rparen()?;
    if !p.at_end() {
        return p.syntax("end of input");
    }
    if domain.is_empty() {
        return p.syntax("a (:domain ...) section");
    }
    Ok(PddlProblem { name, domain, objects, init, function_values, goal })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The pick action as published, three parameters and all.
    const PICK_LISTING: &str = r#"
  (:action pick
    :parameters (?r ?b ?s)
    :precondition (and (Robot ?r) (HandEmpty ?r) (At ?r ?s) (In ?b ?s))
    :effect (and (Holding ?r ?b) (not (In ?b ?s))
                 (not (HandEmpty ?r))
                 (increase (total-cost) 100)
                 ))
"#;

    #[test]
    fn parses_pick_listing_verbatim() {
        let a = parse_action(PICK_LISTING).unwrap();
        assert_eq!(a.name, "pick");
        assert_eq!(a.params, vec!["?r", "?b", "?s"]);
        assert_eq!(a.precondition.len(), 4);
        assert_eq!(a.add.len(), 1);
        assert_eq!(a.del.len(), 2);
        assert_eq!(a.cost, CostExpr::Constant(100.0));
    }

    #[test]
    fn parses_bundled_blockworld_domain() {
        let d = parse_domain(super::super::BLOCKWORLD_DOMAIN).unwrap();
        assert_eq!(d.name, "blockworld");
        assert_eq!(d.actions.len(), 3);
        let pick = d.action("pick").unwrap();
        assert_eq!(pick.cost, CostExpr::Constant(100.0));
        let mv = d.action("move").unwrap();
        assert!(matches!(&mv.cost, CostExpr::Function { name, .. } if name == "move-cost"));
    }

    #[test]
    fn empty_input_errors_at_1_1() {
        let err = parse_domain("").unwrap_err();
        assert_eq!((err.line, err.col), (1, 1));
        assert!(!err.is_unsupported());
    }

    #[test]
    fn forall_is_unsupported() {
        let text = r#"(define (domain d)
  (:action a
    :parameters (?x)
    :precondition (and (P ?x))
    :effect (and (forall (?y) (Q ?y)))))"#;
        let err = parse_domain(text).unwrap_err();
        match err.kind {
            ParseErrorKind::Unsupported { construct } => assert_eq!(construct, "forall"),
            other => panic!("expected unsupported, got {other:?}"),
        }
        assert_eq!(err.line, 5);
    }

    #[test]
    fn negative_precondition_is_unsupported() {
        let text = r#"(define (domain d)
  (:action a
    :parameters (?x)
    :precondition (and (not (P ?x)))
    :effect (and (Q ?x))))"#;
        let err = parse_domain(text).unwrap_err();
        assert!(err.is_unsupported());
    }

    #[test]
    fn unbound_variable_is_a_syntax_error() {
        let text = r#"(define (domain d)
  (:action a
    :parameters (?x)
    :precondition (and (P ?x))
    :effect (and (Q ?z))))"#;
        assert!(parse_domain(text).is_err());
    }

    #[test]
    fn duplicate_action_names_rejected() {
        let text = r#"(define (domain d)
  (:action a :parameters (?x) :precondition (and (P ?x)) :effect (and (Q ?x)))
  (:action a :parameters (?x) :precondition (and (P ?x)) :effect (and (Q ?x))))"#;
        assert!(parse_domain(text).is_err());
    }
}
