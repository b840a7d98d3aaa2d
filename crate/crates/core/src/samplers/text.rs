//! Canonical text form of sampler specs:
//!
//! ```text
//! spec := "bernoulli(" prob ")"
//!       | "max(" spec ",k=" int ")"
//!       | "complement(" spec ")"
//!       | "matching"
//!       | "bipartite-site"
//! ```
//!
//! Probabilities are plain decimals with at most 12 fractional digits.
//! Whitespace between tokens is ignored.

use crate::error::{Error, Result};

use super::SamplerSpec;

pub const MAX_FRACTION_DIGITS: usize = 12;

pub fn parse_sampler(text: &str) -> Result<SamplerSpec> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let spec = p.spec()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(spec)
}

pub(crate) fn format_probability(p: f64) -> String {
    let s = format!("{p:.prec$}", prec = MAX_FRACTION_DIGITS);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            offset,
            message: message.into(),
        }
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
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(format!("expected '{}', found '{}'", c as char, x as char))),
            None => Err(self.error(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn ident(&mut self) -> Result<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || matches!(self.src[self.pos], b'-' | b'_'))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a sampler name"));
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok((start, name.to_owned()))
    }

    /// Accepts an optional empty argument list `()`.
    fn optional_unit_args(&mut self) -> Result<()> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            self.expect(b')')?;
        }
        Ok(())
    }

    fn spec(&mut self) -> Result<SamplerSpec> {
        let (start, name) = self.ident()?;
        match name.as_str() {
            "bernoulli" => {
                self.expect(b'(')?;
                let p = self.probability()?;
                self.expect(b')')?;
                Ok(SamplerSpec::Bernoulli { p })
            }
            "max" => {
                self.expect(b'(')?;
                let base_at = self.pos;
                let base = self.spec()?;
                self.expect(b',')?;
                let (kpos, key) = self.ident()?;
                if key != "k" {
                    return Err(self.error_at(kpos, format!("expected 'k=', found '{key}'")));
                }
                self.expect(b'=')?;
                let k = self.integer()?;
                self.expect(b')')?;
                SamplerSpec::max_of_k(base, k).map_err(|e| self.error_at(base_at, e.to_string()))
            }
            "complement" => {
                self.expect(b'(')?;
                let base_at = self.pos;
                let base = self.spec()?;
                self.expect(b')')?;
                SamplerSpec::complement(base).map_err(|e| self.error_at(base_at, e.to_string()))
            }
            "matching" => {
                self.optional_unit_args()?;
                Ok(SamplerSpec::MutualChoiceMatching)
            }
            "bipartite-site" => {
                self.optional_unit_args()?;
                Ok(SamplerSpec::BipartiteSite)
            }
            other => Err(self.error_at(start, format!("unknown sampler '{other}'"))),
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn probability(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if self.digits() == 0 {
            return Err(self.error("expected a decimal probability"));
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac_at = self.pos;
            let frac = self.digits();
            if frac == 0 {
                return Err(self.error("expected digits after '.'"));
            }
            if frac > MAX_FRACTION_DIGITS {
                return Err(self.error_at(
                    frac_at,
                    format!("at most {MAX_FRACTION_DIGITS} fractional digits allowed, found {frac}"),
                ));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let p: f64 = text
            .parse()
            .map_err(|_| self.error_at(start, format!("invalid number '{text}'")))?;
        if p > 1.0 {
            return Err(self.error_at(start, format!("probability {text} exceeds 1")));
        }
        Ok(p)
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        if self.digits() == 0 {
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse()
            .map_err(|_| self.error_at(start, format!("integer '{text}' out of range")))
    }
}
