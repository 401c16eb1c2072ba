//! Polynomial expressions in `z`, `w` and input files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ('+' | '-')* base ('^' uint)?
//! base   := number | number 'i' | 'z' | 'w' | '(' expr ')'
//! number := digits ('.' digits?)? (('e' | 'E') ('+' | '-')? digits)?
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{sym3_product, OneForm, Sym3Diff};
use crate::series::{Complex, Series2};

struct Parser {
    chars: Vec<char>,
    pos: usize,
    order: usize,
}

fn expected(position: usize, items: &[&str]) -> Error {
    Error::Parse {
        position,
        expected: items.iter().map(|s| s.to_string()).collect(),
    }
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Series2> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Series2> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Series2> {
        let mut negate = false;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            negate ^= c == '-';
        }
        let base = self.base()?;
        let value = if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.uint()?;
            let mut acc = Series2::one(self.order);
            for _ in 0..k {
                acc = &acc * &base;
            }
            acc
        } else {
            base
        };
        Ok(if negate { -value } else { value })
    }

    fn uint(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(expected(start, &["unsigned integer"]));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| expected(start, &["unsigned integer"]))
    }

    fn base(&mut self) -> Result<Series2> {
        let n = self.order;
        match self.peek() {
            Some('z') => {
                self.pos += 1;
                Ok(Series2::z(n))
            }
            Some('w') => {
                self.pos += 1;
                Ok(Series2::w(n))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(expected(self.pos, &["')'", "'+'", "'-'", "'*'", "'^'"]));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let value = self.number()?;
                if self.chars.get(self.pos) == Some(&'i') {
                    self.pos += 1;
                    Ok(Series2::constant(n, Complex::new(0.0, value)))
                } else {
                    Ok(Series2::constant(n, Complex::new(value, 0.0)))
                }
            }
            _ => Err(expected(self.pos, &["number", "'z'", "'w'", "'('"])),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.chars.get(p.pos).is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(expected(start, &["digit"]));
        }
        if let Some('e' | 'E') = self.chars.get(self.pos) {
            self.pos += 1;
            if let Some('+' | '-') = self.chars.get(self.pos) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(expected(self.pos, &["exponent digits"]));
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| expected(start, &["number"]))
    }
}

/// Parses a polynomial in `z`, `w`, truncated at total degree `order`.
/// Positions in errors count characters from zero.
pub fn parse_expression(text: &str, order: usize) -> Result<Series2> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        order,
    };
    let value = parser.expr()?;
    if parser.peek().is_some() {
        return Err(expected(parser.pos, &["'+'", "'-'", "'*'", "'^'", "end of input"]));
    }
    Ok(value)
}

/// How η is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// `(a dz + b dw) dz dw`
    Adapted { a: String, b: String },
    /// `c0 dz³ + c1 dz²dw + c2 dz dw² + c3 dw³`
    Cubic {
        c0: String,
        c1: String,
        c2: String,
        c3: String,
    },
    /// The product of three 1-forms, each given as `[dz-part, dw-part]`.
    Frame {
        omega1: [String; 2],
        omega2: [String; 2],
        omega3: [String; 2],
    },
}

fn default_order() -> usize {
    crate::criteria::DEFAULT_ORDER
}

fn default_tolerance() -> f64 {
    crate::criteria::DEFAULT_TOLERANCE
}

/// A complete input file.
///
/// ```toml
/// order = 12
/// tolerance = 1e-9
///
/// [adapted]
/// a = "1 + z*w - 0.5*w^2"
/// b = "1 + 0.5*z^2 - z*w"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub mode: InputMode,
}

pub const MIN_ORDER: usize = 6;

impl InputSpec {
    pub fn new(mode: InputMode) -> Self {
        InputSpec {
            order: default_order(),
            tolerance: default_tolerance(),
            seed: None,
            mode,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: InputSpec = toml::from_str(text).map_err(|e| Error::InvalidInput(e.message().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("input spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < MIN_ORDER {
            return Err(Error::InvalidInput(format!(
                "order {} is below {MIN_ORDER}",
                self.order
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance {} is not positive",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Builds η at the spec's order.
    pub fn eta(&self) -> Result<Sym3Diff> {
        let n = self.order;
        let p = |s: &str| parse_expression(s, n);
        Ok(match &self.mode {
            InputMode::Adapted { a, b } => Sym3Diff::from_adapted(&p(a)?, &p(b)?),
            InputMode::Cubic { c0, c1, c2, c3 } => Sym3Diff::new(p(c0)?, p(c1)?, p(c2)?, p(c3)?),
            InputMode::Frame { omega1, omega2, omega3 } => {
                let form = |f: &[String; 2]| -> Result<OneForm> { Ok(OneForm::new(p(&f[0])?, p(&f[1])?)) };
                sym3_product(&form(omega1)?, &form(omega2)?, &form(omega3)?)
            }
        })
    }

    /// The same spec with every expression re-emitted from its parsed series.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.order;
        let norm = |s: &str| parse_expression(s, n).map(|x| x.to_expression());
        let mode = match &self.mode {
            InputMode::Adapted { a, b } => InputMode::Adapted {
                a: norm(a)?,
                b: norm(b)?,
            },
            InputMode::Cubic { c0, c1, c2, c3 } => InputMode::Cubic {
                c0: norm(c0)?,
                c1: norm(c1)?,
                c2: norm(c2)?,
                c3: norm(c3)?,
            },
            InputMode::Frame { omega1, omega2, omega3 } => {
                let pair = |f: &[String; 2]| -> Result<[String; 2]> { Ok([norm(&f[0])?, norm(&f[1])?]) };
                InputMode::Frame {
                    omega1: pair(omega1)?,
                    omega2: pair(omega2)?,
                    omega3: pair(omega3)?,
                }
            }
        };
        Ok(InputSpec { mode, ..self.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 8;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn parses_polynomials() {
        let s = parse_expression("1 + z*w - 0.5*w^2", N).unwrap();
        let expected = Series2::from_terms(N, [(0, 0, c(1.0, 0.0)), (1, 1, c(1.0, 0.0)), (0, 2, c(-0.5, 0.0))]);
        assert_eq!(s, expected);
        let s = parse_expression("(2+3i)*z", N).unwrap();
        assert_eq!(s, Series2::monomial(N, 1, 0, c(2.0, 3.0)));
        let s = parse_expression("-(1+z)^3 + 2.5e-1", N).unwrap();
        assert_eq!(s.coeff(0, 0), c(-0.75, 0.0));
        assert_eq!(s.coeff(2, 0), c(-3.0, 0.0));
        assert_eq!(parse_expression(" z ^ 0 ", N).unwrap(), Series2::one(N));
    }

    #[test]
    fn truncates_at_order() {
        let s = parse_expression("z^5 + w", 3).unwrap();
        assert_eq!(s, Series2::w(3));
    }

    #[test]
    fn reports_positions() {
        match parse_expression("z^", N) {
            Err(Error::Parse { position, expected }) => {
                assert_eq!(position, 2);
                assert_eq!(expected, vec!["unsigned integer".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        for (text, pos) in [
            ("", 0),
            ("z +", 3),
            ("(z", 2),
            ("z w", 2),
            ("2*x", 2),
            ("1e", 2),
            ("z^-1", 2),
        ] {
            match parse_expression(text, N) {
                Err(Error::Parse { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trips_through_expression_text() {
        let s = parse_expression("(0.1+0.2i)*z^2*w - 1/3", N);
        assert!(s.is_err());
        let s = parse_expression("(0.1+0.2i)*z^2*w - 0.3333333333333333 + 7i*w^4", N).unwrap();
        assert_eq!(parse_expression(&s.to_expression(), N).unwrap(), s);
        assert_eq!(
            parse_expression(&Series2::zero(N).to_expression(), N).unwrap(),
            Series2::zero(N)
        );
    }

    #[test]
    fn input_files() {
        let spec =
            InputSpec::from_toml("order = 10\n[adapted]\na = \"1 + z*w - 0.5*w^2\"\nb = \"1 + 0.5*z^2 - z*w\"\n")
                .unwrap();
        assert_eq!(spec.order, 10);
        assert_eq!(spec.tolerance, 1e-9);
        let eta = spec.eta().unwrap();
        assert_eq!(eta.c[1].coeff(1, 1), c(1.0, 0.0));
        let again = InputSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(again, spec);

        let frame = InputSpec::from_toml(
            "[frame]\nomega1 = [\"1\", \"0\"]\nomega2 = [\"0\", \"1\"]\nomega3 = [\"-1\", \"-1\"]\n",
        )
        .unwrap();
        let eta = frame.eta().unwrap();
        assert_eq!(eta.c[1].constant_term(), c(-1.0, 0.0));
        assert_eq!(eta.c[2].constant_term(), c(-1.0, 0.0));

        assert!(InputSpec::from_toml("order = 4\n[adapted]\na = \"1\"\nb = \"1\"\n").is_err());
        assert!(InputSpec::from_toml("[adapted]\na = \"1\"\n").is_err());
    }
}
