use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// `φ(p) = c + a · p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearField {
    pub constant: f64,
    pub gradient: Vector3<f64>,
}

impl LinearField {
    pub fn new(constant: f64, gradient: [f64; 3]) -> Self {
        LinearField {
            constant,
            gradient: Vector3::from(gradient),
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, [0.0; 3])
    }

    pub fn eval(&self, p: &Vector3<f64>) -> f64 {
        self.constant + self.gradient.dot(p)
    }

    /// Bound on `|φ|` over the unit sphere.
    pub fn amplitude(&self) -> f64 {
        self.constant.abs() + self.gradient.norm()
    }

    fn scale(self, s: f64) -> Self {
        LinearField {
            constant: self.constant * s,
            gradient: self.gradient * s,
        }
    }

    fn is_constant(&self) -> bool {
        self.gradient == Vector3::zeros()
    }
}

impl fmt::Display for LinearField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        if self.constant != 0.0 {
            terms.push(format!("{}", self.constant));
        }
        for (c, name) in self.gradient.iter().zip(["x", "y", "z"]) {
            if *c != 0.0 {
                terms.push(format!("{c}*{name}"));
            }
        }
        let Some((first, rest)) = terms.split_first() else {
            return f.write_str("0");
        };
        f.write_str(first)?;
        for t in rest {
            match t.strip_prefix('-') {
                Some(t) => write!(f, " - {t}")?,
                None => write!(f, " + {t}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for LinearField {
    type Err = Error;

    /// Parses sums, differences, products and quotients of numbers and the
    /// coordinates `x`, `y`, `z`, as long as the result stays linear.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s.as_bytes(), at: 0 };
        let v = p.expr()?;
        p.skip_ws();
        if p.at != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(v)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    at: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("phi expression, byte {}: {what}", self.at))
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.at).is_some_and(|c| c.is_ascii_whitespace()) {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.at).copied()
    }

    fn expr(&mut self) -> Result<LinearField> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.at += 1;
            let rhs = self.term()?;
            let s = if op == b'+' { 1.0 } else { -1.0 };
            acc.constant += s * rhs.constant;
            acc.gradient += rhs.gradient * s;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LinearField> {
        let mut acc = self.factor()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.at += 1;
            let rhs = self.factor()?;
            acc = if op == b'*' {
                if rhs.is_constant() {
                    acc.scale(rhs.constant)
                } else if acc.is_constant() {
                    rhs.scale(acc.constant)
                } else {
                    return Err(self.error("product of two coordinates is not linear"));
                }
            } else {
                if !rhs.is_constant() || rhs.constant == 0.0 {
                    return Err(self.error("division by a non-constant or zero"));
                }
                acc.scale(1.0 / rhs.constant)
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LinearField> {
        match self.peek() {
            Some(b'-') => {
                self.at += 1;
                Ok(self.factor()?.scale(-1.0))
            }
            Some(b'+') => {
                self.at += 1;
                self.factor()
            }
            Some(b'(') => {
                self.at += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.at += 1;
                Ok(v)
            }
            Some(c @ (b'x' | b'y' | b'z')) => {
                self.at += 1;
                let mut g = [0.0; 3];
                g[(c - b'x') as usize] = 1.0;
                Ok(LinearField::new(0.0, g))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<LinearField> {
        let start = self.at;
        while self.src.get(self.at).is_some_and(|c| c.is_ascii_digit() || *c == b'.') {
            self.at += 1;
        }
        // optional exponent
        if matches!(self.src.get(self.at), Some(b'e' | b'E')) {
            let save = self.at;
            self.at += 1;
            if matches!(self.src.get(self.at), Some(b'+' | b'-')) {
                self.at += 1;
            }
            if self.src.get(self.at).is_some_and(|c| c.is_ascii_digit()) {
                while self.src.get(self.at).is_some_and(|c| c.is_ascii_digit()) {
                    self.at += 1;
                }
            } else {
                self.at = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.at]).expect("ascii");
        let v: f64 = text.parse().map_err(|_| self.error("malformed number"))?;
        Ok(LinearField::new(v, [0.0; 3]))
    }
}
