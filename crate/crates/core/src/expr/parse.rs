use super::{Expr, Node};
use crate::error::{Error, Result};

/// Parses `text` as a function of `x1, ..., x{arity}`.
///
/// Grammar (whitespace ignored):
///
/// ```text
/// sum     := product (('+' | '-') product)*
/// product := unary (('*' | '/') unary)*
/// unary   := '-' unary | atom
/// atom    := number | 'x' digits | '(' sum ')'
///          | ('max' | 'min') '(' sum (',' sum)* ')' | 'abs' '(' sum ')'
/// ```
///
/// A minus sign directly in front of a number literal folds into the
/// constant.
pub fn parse(text: &str, arity: usize) -> Result<Expr> {
    if arity == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, arity };
    let root = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(Expr::from_parts(arity, root))
}

/// Largest variable index mentioned in `text`, or `None` if there is none.
/// Used by front ends to infer the dimension.
pub fn max_variable_index(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut best = None;
    let mut i = 0;
    while i < bytes.len() {
        let starts_word = i == 0 || !bytes[i - 1].is_ascii_alphanumeric();
        if bytes[i] == b'x' && starts_word {
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if let Ok(v) = text[i + 1..j].parse::<usize>() {
                best = best.max(Some(v));
            }
            i = j;
        } else {
            i += 1;
        }
    }
    best
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = Node::Add(Box::new(acc), Box::new(self.product()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = Node::Sub(Box::new(acc), Box::new(self.product()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Node> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = Node::Mul(Box::new(acc), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = Node::Div(Box::new(acc), Box::new(self.unary()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek() != Some(b'-') {
            return self.atom();
        }
        self.pos += 1;
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Node::Const(-self.number()?)),
            _ => Ok(Node::Neg(Box::new(self.unary()?))),
        }
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Node::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => self.word(),
            Some(c) => Err(self.error(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let lexeme = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let value: f64 = lexeme.parse().map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("invalid number literal '{lexeme}'"),
        })?;
        if !value.is_finite() {
            return Err(Error::Syntax { pos: start, msg: "number literal overflows".into() });
        }
        Ok(value)
    }

    fn word(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match name {
            "x" => self.variable(start),
            "max" | "min" => {
                self.expect(b'(')?;
                let mut args = vec![self.sum()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    args.push(self.sum()?);
                }
                self.expect(b')')?;
                Ok(if name == "max" { Node::max_of(args) } else { Node::min_of(args) })
            }
            "abs" => {
                self.expect(b'(')?;
                let inner = self.sum()?;
                self.expect(b')')?;
                let negated = Node::Neg(Box::new(inner.clone()));
                Ok(Node::Max(vec![inner, negated]))
            }
            _ => Err(Error::Syntax { pos: start, msg: format!("unknown identifier '{name}'") }),
        }
    }

    fn variable(&mut self, start: usize) -> Result<Node> {
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits_start == self.pos {
            return Err(Error::Syntax { pos: start, msg: "variable needs an index, as in x1".into() });
        }
        let digits = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap_or("");
        let index: usize = digits.parse().unwrap_or(usize::MAX);
        if index == 0 || index > self.arity {
            return Err(Error::VariableOutOfRange { index, arity: self.arity });
        }
        Ok(Node::var(self.arity, index - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse("1 - 2 - 3 * 4 / 8", 1).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 1.0 - 2.0 - 3.0 * 4.0 / 8.0);
        let e = parse("-x1*x1", 1).unwrap();
        assert_eq!(e.eval(&[3.0]).unwrap(), -9.0);
        let e = parse("2*-3", 1).unwrap();
        assert_eq!(e.root(), &Node::Mul(Box::new(Node::Const(2.0)), Box::new(Node::Const(-3.0))));
    }

    #[test]
    fn functions_and_whitespace() {
        let e = parse(" max ( abs(x1) ,abs( x2 ) ) ", 2).unwrap();
        assert_eq!(e.eval(&[-3.0, 2.0]).unwrap(), 3.0);
        let e = parse("min(x1, x2, 0.5)", 2).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0]).unwrap(), 0.5);
        assert_eq!(parse("max(x1)", 1).unwrap(), Expr::var(1, 0));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("x0", 2), Err(Error::VariableOutOfRange { index: 0, .. })));
        assert!(matches!(parse("x3", 2), Err(Error::VariableOutOfRange { index: 3, .. })));
        assert!(matches!(parse("max(x1,", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x1 x2", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse("sin(x1)", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("1 $ 2", 1), Err(Error::Syntax { .. })));
    }

    #[test]
    fn variable_index_scan() {
        assert_eq!(max_variable_index("max(x1, x12) + x3"), Some(12));
        assert_eq!(max_variable_index("max(1, 2)"), None);
    }

    #[test]
    fn display_round_trip() {
        for text in [
            "max(abs(x1),abs(x2))",
            "min(abs(x1-x2),abs(x1-x2/2))",
            "(x1*x2 - 3.25)/(1+x1*x1) + -0.5",
            "-(x1) - -x2",
            "max(x1, x2, x3) * 0.000001",
        ] {
            let e = parse(text, 3).unwrap();
            assert_eq!(parse(&e.to_string(), 3).unwrap(), e, "{text}");
        }
    }
}
