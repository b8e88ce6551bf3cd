//! Recursive-descent parser for `.sbp` property files.

use std::collections::BTreeSet;

use super::ast::{Body, Node, OrderSpec, ParseError, Pattern, Property, SourceSpan};
use super::lexer::{tokenize, Tok, Token};
use crate::assertion::DataAssertion;
use crate::extrema::ExtremaMethod;
use crate::oscillation::{
    AmplitudeMode, DampingKind, DampingRequirement, ExtremumAnchor, OscillationSpec, PeriodMode,
};
use crate::relationship::{BinOp, Expr, ProjectionKind};
use crate::scalar::{Cmp, Constraint, Interval, Scalar};
use crate::spike::{DerivativeSource, Polarity, Psi, Spike2Spec, SpikeAnchor, SpikeSpec};
use crate::transient::{Limit, OvershootDirection, OvershootSpec, RiseDirection, RiseSpec};

type PResult<T> = Result<T, ParseError>;

/// Parses every `property` declaration in `text`, in file order.
pub fn parse<T: Scalar>(text: &str) -> PResult<Vec<Property<T>>> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, eof: eof_span(text) };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while !p.at_end() {
        let prop = p.property()?;
        if !seen.insert(prop.name.clone()) {
            return Err(ParseError::DuplicatePropertyName { name: prop.name, span: prop.span });
        }
        out.push(prop);
    }
    Ok(out)
}

/// Parses a single property body, e.g. `assert s < 3`.
pub fn parse_body<T: Scalar>(text: &str) -> PResult<Node<T>> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, eof: eof_span(text) };
    let node = p.body()?;
    if !p.at_end() {
        return Err(p.unexpected("end of input"));
    }
    Ok(node)
}

fn eof_span(text: &str) -> SourceSpan {
    let line = text.matches('\n').count() as u32 + 1;
    let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32 + 1;
    // Point at the last byte so the span stays inside the input.
    let start = text.len().saturating_sub(1);
    SourceSpan { line, column: column.saturating_sub(1).max(1), start, end: text.len() }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    eof: SourceSpan,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn span(&self) -> SourceSpan {
        self.tokens.get(self.pos).map_or(self.eof, |t| t.span)
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = self.peek().map_or("end of input".to_string(), Tok::describe);
        ParseError::Syntax { message: format!("expected {wanted}, found {found}"), span: self.span() }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{w}`")))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    /// One of several keywords; returns its index.
    fn choice(&mut self, words: &[&str]) -> PResult<usize> {
        for (i, w) in words.iter().enumerate() {
            if self.eat_word(w) {
                return Ok(i);
            }
        }
        let list: Vec<String> = words.iter().map(|w| format!("`{w}`")).collect();
        Err(self.unexpected(&list.join(" or ")))
    }

    fn literal<T: Scalar>(&mut self, text: &str, span: SourceSpan, negate: bool) -> PResult<T> {
        let v: T = text.parse().map_err(|_| ParseError::Syntax {
            message: format!("invalid number `{text}`"),
            span,
        })?;
        if !v.is_finite() {
            return Err(ParseError::Syntax { message: format!("number `{text}` is not finite"), span });
        }
        Ok(if negate { -v } else { v })
    }

    /// Optionally signed numeric literal.
    fn number<T: Scalar>(&mut self) -> PResult<T> {
        let start = self.span();
        let negate = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Number(s)) => {
                let s = s.clone();
                let span = self.span();
                self.pos += 1;
                self.literal(&s, start.to(span), negate)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn cmp(&mut self) -> PResult<Cmp> {
        let op = match self.peek() {
            Some(Tok::Lt) => Cmp::Lt,
            Some(Tok::Le) => Cmp::Le,
            Some(Tok::Eq) => Cmp::Eq,
            Some(Tok::Ge) => Cmp::Ge,
            Some(Tok::Gt) => Cmp::Gt,
            Some(Tok::Ne) => Cmp::Ne,
            _ => return Err(self.unexpected("a comparison operator")),
        };
        self.pos += 1;
        Ok(op)
    }

    fn constraint<T: Scalar>(&mut self) -> PResult<Constraint<T>> {
        let op = self.cmp()?;
        Ok(Constraint::new(op, self.number()?))
    }

    fn interval<T: Scalar>(&mut self) -> PResult<Interval<T>> {
        self.expect(Tok::LBracket)?;
        let lo = self.number()?;
        self.expect(Tok::Comma)?;
        let hi = self.number()?;
        self.expect(Tok::RBracket)?;
        Ok(Interval::new(lo, hi))
    }

    fn property<T: Scalar>(&mut self) -> PResult<Property<T>> {
        self.word("property")?;
        let span = self.span();
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let node = self.body()?;
        self.expect(Tok::Semi)?;
        Ok(Property { name, node, span })
    }

    fn body<T: Scalar>(&mut self) -> PResult<Node<T>> {
        let start = self.span();
        if self.eat(&Tok::LParen) {
            let inner = self.body()?;
            self.expect(Tok::RParen)?;
            return Ok(inner);
        }
        let word = match self.peek() {
            Some(Tok::Ident(w)) => w.clone(),
            _ => return Err(self.unexpected("a property body")),
        };
        let body = match word.as_str() {
            "assert" => self.assertion(start)?,
            "spike" => self.spike()?,
            "spike2" => self.spike2()?,
            "oscillation" => self.oscillation()?,
            "let" => self.functional()?,
            "whenever" => self.order(Pattern::Response)?,
            "before" => self.order(Pattern::Precedence)?,
            "rise" | "fall" => self.rise()?,
            "overshoot" | "undershoot" => self.overshoot()?,
            _ => return Err(self.unexpected("a property body")),
        };
        Ok(Node { body, span: start.to(self.prev_span()) })
    }

    fn assertion<T: Scalar>(&mut self, start: SourceSpan) -> PResult<Body<T>> {
        self.word("assert")?;
        let lhs = self.expr()?;
        let op = self.cmp()?;
        let rhs = self.expr()?;
        let mut intervals: Vec<Interval<T>> = Vec::new();
        if self.eat_word("in") {
            loop {
                intervals.push(self.interval()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            for (i, a) in intervals.iter().enumerate() {
                if intervals[..i].iter().any(|b| a.overlaps(b)) {
                    return Err(ParseError::OverlappingIntervals { span: start.to(self.prev_span()) });
                }
            }
        }
        Ok(Body::Assert(DataAssertion { lhs, op, rhs, intervals }))
    }

    fn method(&mut self) -> PResult<ExtremaMethod> {
        Ok(match self.choice(&["analytical", "punctual", "precomputed"])? {
            0 => ExtremaMethod::Analytical,
            1 => ExtremaMethod::Punctual,
            _ => {
                self.expect(Tok::LParen)?;
                let first = self.ident()?;
                self.expect(Tok::Comma)?;
                let second = self.ident()?;
                self.expect(Tok::RParen)?;
                ExtremaMethod::Precomputed { first, second }
            }
        })
    }

    fn spike<T: Scalar>(&mut self) -> PResult<Body<T>> {
        self.word("spike")?;
        let polarity = if self.eat_word("down") { Polarity::Downward } else { Polarity::Upward };
        self.word("on")?;
        let signal = self.ident()?;
        self.word("in")?;
        let mut spec = SpikeSpec::new(self.interval()?);
        spec.polarity = polarity;
        self.word("with")?;
        loop {
            let which = self.choice(&["a", "sp1", "sp2", "w"])?;
            let c = Some(self.constraint()?);
            match which {
                0 => spec.a = c,
                1 => spec.sp1 = c,
                2 => spec.sp2 = c,
                _ => spec.w = c,
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        loop {
            if self.eat_word("psi") {
                spec.psi = [Psi::Min, Psi::Max, Psi::Mean][self.choice(&["min", "max", "mean"])?];
            } else if self.eat_word("method") {
                spec.method = self.method()?;
            } else if self.eat_word("anchor") {
                spec.anchor =
                    [SpikeAnchor::Vp1, SpikeAnchor::Peak, SpikeAnchor::Vp2][self.choice(&["vp1", "peak", "vp2"])?];
            } else {
                break;
            }
        }
        Ok(Body::Spike { signal, spec })
    }

    fn spike2<T: Scalar>(&mut self) -> PResult<Body<T>> {
        self.word("spike2")?;
        self.word("on")?;
        let signal = self.ident()?;
        self.word("with")?;
        self.word("m")?;
        self.expect(Tok::Eq)?;
        let m = self.number()?;
        self.expect(Tok::Comma)?;
        self.word("w")?;
        self.expect(Tok::Eq)?;
        let w = self.number()?;
        let derivative = if self.eat_word("derivative") {
            DerivativeSource::Column(self.ident()?)
        } else {
            DerivativeSource::FiniteDifference
        };
        Ok(Body::Spike2 { signal, spec: Spike2Spec { m, w, derivative } })
    }

    /// `peak-to-peak` and `avg-peak-to-peak` are lexed as words joined by `-`.
    fn hyphenated(&mut self, words: &[&str]) -> bool {
        let n = words.len() * 2 - 1;
        let ok = (0..n).all(|k| match (k % 2, self.peek_at(k)) {
            (0, Some(Tok::Ident(s))) => s == words[k / 2],
            (1, Some(Tok::Minus)) => true,
            _ => false,
        });
        if ok {
            self.pos += n;
        }
        ok
    }

    fn oscillation<T: Scalar>(&mut self) -> PResult<Body<T>> {
        self.word("oscillation")?;
        self.word("on")?;
        let signal = self.ident()?;
        self.word("in")?;
        let mut spec = OscillationSpec::new(self.interval()?);
        self.word("with")?;
        loop {
            if self.choice(&["period", "amplitude"])? == 0 {
                spec.period = Some(self.constraint()?);
            } else {
                spec.amplitude = Some(self.constraint()?);
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        loop {
            if self.eat_word("ref") {
                spec.amplitude_mode = AmplitudeMode::Reference(self.number()?);
            } else if self.hyphenated(&["peak", "to", "peak"]) {
                spec.amplitude_mode = AmplitudeMode::PeakToPeak;
            } else if self.hyphenated(&["avg", "peak", "to", "peak"]) {
                spec.amplitude_mode = AmplitudeMode::AvgPeakToPeak;
            } else if self.eat_word("average") {
                spec.period_mode = PeriodMode::Average;
            } else if self.eat_word("method") {
                spec.method = self.method()?;
            } else if self.eat_word("prominence") {
                spec.prominence = Some(self.number()?);
            } else if self.is_word("damped") || self.is_word("driven") {
                let kind = [DampingKind::Damped, DampingKind::Driven][self.choice(&["damped", "driven"])?];
                let trend = self.eat_word("trend");
                spec.damping = Some(DampingRequirement { kind, trend });
            } else if self.eat_word("anchor") {
                spec.anchor = [ExtremumAnchor::Min, ExtremumAnchor::Max, ExtremumAnchor::Any]
                    [self.choice(&["min", "max", "any"])?];
            } else {
                break;
            }
        }
        Ok(Body::Oscillation { signal, spec })
    }

    fn functional<T: Scalar>(&mut self) -> PResult<Body<T>> {
        self.word("let")?;
        let target = self.ident()?;
        self.expect(Tok::Eq)?;
        let expr = self.expr()?;
        self.word("then")?;
        let inner = Box::new(self.body()?);
        Ok(Body::Functional { target, expr, inner })
    }

    fn kind(&mut self) -> PResult<ProjectionKind> {
        Ok([ProjectionKind::Event, ProjectionKind::State][self.choice(&["event", "state"])?])
    }

    fn order<T: Scalar>(&mut self, pattern: Pattern) -> PResult<Body<T>> {
        let (first, second) = match pattern {
            Pattern::Response => ("whenever", "then"),
            Pattern::Precedence => ("before", "requires"),
        };
        self.word(first)?;
        let k1 = self.kind()?;
        let n1 = Box::new(self.body()?);
        self.word(second)?;
        let k2 = self.kind()?;
        let n2 = Box::new(self.body()?);
        let bound = if self.eat_word("within") { Some(self.constraint()?) } else { None };
        // `whenever CAUSE then EFFECT`, `before EFFECT requires CAUSE`.
        let spec = match pattern {
            Pattern::Response => {
                OrderSpec { pattern, cause: n1, cause_kind: k1, effect: n2, effect_kind: k2, bound }
            }
            Pattern::Precedence => {
                OrderSpec { pattern, cause: n2, cause_kind: k2, effect: n1, effect_kind: k1, bound }
            }
        };
        Ok(Body::Order(spec))
    }

    fn rise<T: Scalar>(&mut self) -> PResult<Body<T>> {
        let direction = [RiseDirection::Rise, RiseDirection::Fall][self.choice(&["rise", "fall"])?];
        self.word("on")?;
        let signal = self.ident()?;
        self.word("to")?;
        let target = self.constraint()?;
        self.word("after")?;
        let trigger = Box::new(self.body()?);
        self.word("within")?;
        let rt = self.number()?;
        let monotonic = self.eat_word("monotonic");
        Ok(Body::Rise { signal, target, trigger, spec: RiseSpec { rt, direction, monotonic } })
    }

    fn overshoot<T: Scalar>(&mut self) -> PResult<Body<T>> {
        let direction = [OvershootDirection::Overshoot, OvershootDirection::Undershoot]
            [self.choice(&["overshoot", "undershoot"])?];
        self.word("on")?;
        let signal = self.ident()?;
        self.word("to")?;
        let target = self.constraint()?;
        self.word("after")?;
        let trigger = Box::new(self.body()?);
        self.word(match direction {
            OvershootDirection::Overshoot => "max",
            OvershootDirection::Undershoot => "min",
        })?;
        let limit = if self.eat_word("target") {
            let sign = [T::one(), -T::one()][if self.eat(&Tok::Plus) {
                0
            } else if self.eat(&Tok::Minus) {
                1
            } else {
                return Err(self.unexpected("`+` or `-`"));
            }];
            Limit::Relative(sign * self.number::<T>()?)
        } else {
            Limit::Absolute(self.number()?)
        };
        self.word("over")?;
        let oi = self.number()?;
        let monotonic = self.eat_word("monotonic");
        Ok(Body::Overshoot { signal, target, trigger, spec: OvershootSpec { oi, limit, direction, monotonic } })
    }

    fn expr<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        if self.peek() == Some(&Tok::Minus) {
            // `-3` is a literal; `-(3)` and `-x` are negations.
            if matches!(self.peek_at(1), Some(Tok::Number(_))) {
                return Ok(Expr::Num(self.number()?));
            }
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary<T: Scalar>(&mut self) -> PResult<Expr<T>> {
        let span = self.span();
        match self.peek().cloned() {
            Some(Tok::Number(s)) => {
                self.pos += 1;
                Ok(Expr::Num(self.literal(&s, span, false)?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(w)) if w == "abs" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.pos += 2;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Some(Tok::Ident(w)) if w == "deriv" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.pos += 2;
                let e = self.expr()?;
                let mut order = 1;
                if self.eat(&Tok::Comma) {
                    order = match self.peek() {
                        Some(Tok::Number(n)) if n == "1" || n == "2" => n.parse().unwrap(),
                        _ => return Err(self.unexpected("derivative order 1 or 2")),
                    };
                    self.pos += 1;
                }
                self.expect(Tok::RParen)?;
                Ok(Expr::Deriv(Box::new(e), order))
            }
            Some(Tok::Ident(w)) => {
                self.pos += 1;
                Ok(Expr::Signal(w))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}
