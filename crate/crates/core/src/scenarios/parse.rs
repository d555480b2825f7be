//! Mini-grammar for distribution expressions and the scenario override
//! file.
//!
//! Expressions: `N(3,0.5)`, `Be(3,4)`, `Ga(18,4)`, `FN(3,4)`, `La(0,1)`,
//! `vM(2,10)`, `Skel(8,8)`, `NB(5,12)`, `Pois(2)`, and mixtures
//! `mix(0.5*Be(1,5), 0.5*Be(5,2))`. Numbers may be decimals or simple
//! fractions (`3/7`). `N` takes (mean, variance); `NB` takes (mean, size).
//!
//! Override files hold one scenario per line:
//!
//! ```text
//! # id  sample1          sample2                          null mean
//! h     La(0,1)          mix(0.4*La(-2,2), 0.6*N(0.8,1))  0
//! ```

use super::{DistSpec, ScenarioSpec};
use crate::{Error, Result};
use std::collections::HashMap;
use std::path::Path;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str, line: usize) -> Self {
        Cursor {
            bytes: s.as_bytes(),
            pos: 0,
            line,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::ParseError {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a distribution name"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ident bytes are ascii")
            .to_string())
    }

    /// A float literal, or a simple fraction `a/b`.
    fn number(&mut self) -> Result<f64> {
        let first = self.float_token()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let denom = self.float_token()?;
            if denom == 0.0 {
                return Err(self.err("zero denominator"));
            }
            Ok(first / denom)
        } else {
            Ok(first)
        }
    }

    fn float_token(&mut self) -> Result<f64> {
        let start = self.pos;
        if matches!(self.peek(), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let token = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        token
            .parse::<f64>()
            .map_err(|_| self.err(format!("expected a number, found `{token}`")))
    }

    fn dist(&mut self) -> Result<DistSpec> {
        self.skip_ws();
        let at = self.pos;
        let name = self.ident()?;
        self.expect(b'(')?;
        let spec = match name.to_ascii_lowercase().as_str() {
            "mix" => {
                let mut components = Vec::new();
                loop {
                    self.skip_ws();
                    let w = self.number()?;
                    self.skip_ws();
                    self.expect(b'*')?;
                    let d = self.dist()?;
                    components.push((w, d));
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b')') => break,
                        _ => return Err(self.err("expected `,` or `)` in mixture")),
                    }
                }
                DistSpec::Mixture(components)
            }
            family => {
                let mut params = Vec::new();
                loop {
                    self.skip_ws();
                    params.push(self.number()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => {
                            self.pos += 1;
                        }
                        Some(b')') => break,
                        _ => return Err(self.err("expected `,` or `)` in parameter list")),
                    }
                }
                let two = |ps: &[f64]| -> Result<(f64, f64)> {
                    if ps.len() == 2 {
                        Ok((ps[0], ps[1]))
                    } else {
                        Err(Error::ParseError {
                            line: self.line,
                            column: at + 1,
                            message: format!("`{name}` takes 2 parameters, got {}", ps.len()),
                        })
                    }
                };
                match family {
                    "n" => {
                        let (m, v) = two(&params)?;
                        DistSpec::Normal { mean: m, variance: v }
                    }
                    "be" => {
                        let (a, b) = two(&params)?;
                        DistSpec::Beta { alpha: a, beta: b }
                    }
                    "ga" => {
                        let (s, r) = two(&params)?;
                        DistSpec::Gamma { shape: s, rate: r }
                    }
                    "fn" => {
                        let (m, s) = two(&params)?;
                        DistSpec::FoldedNormal { mu: m, sigma: s }
                    }
                    "la" => {
                        let (l, s) = two(&params)?;
                        DistSpec::Laplace { location: l, scale: s }
                    }
                    "vm" => {
                        let (m, k) = two(&params)?;
                        DistSpec::VonMises { mu: m, kappa: k }
                    }
                    "skel" => {
                        let (l1, l2) = two(&params)?;
                        DistSpec::Skellam { lambda1: l1, lambda2: l2 }
                    }
                    "nb" => {
                        let (m, s) = two(&params)?;
                        DistSpec::NegativeBinomial { mu: m, size: s }
                    }
                    "pois" => {
                        if params.len() != 1 {
                            return Err(Error::ParseError {
                                line: self.line,
                                column: at + 1,
                                message: format!("`Pois` takes 1 parameter, got {}", params.len()),
                            });
                        }
                        DistSpec::Poisson { rate: params[0] }
                    }
                    other => {
                        return Err(Error::ParseError {
                            line: self.line,
                            column: at + 1,
                            message: format!("unknown distribution family `{other}`"),
                        })
                    }
                }
            }
        };
        self.expect(b')')?;
        spec.validate().map_err(|e| Error::ParseError {
            line: self.line,
            column: at + 1,
            message: e.to_string(),
        })?;
        Ok(spec)
    }
}

/// Parses a single distribution expression.
pub fn parse_dist_expr(s: &str) -> Result<DistSpec> {
    let mut c = Cursor::new(s, 1);
    let d = c.dist()?;
    c.skip_ws();
    if c.peek().is_some() {
        return Err(c.err("trailing input after distribution expression"));
    }
    Ok(d)
}

/// Scenario definitions loaded from an override file; entries shadow the
/// canonical table and provide the only way to run scenarios `h` and `j`.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOverrides {
    map: HashMap<char, ScenarioSpec>,
}

impl ScenarioOverrides {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut c = Cursor::new(line, line_no);
            c.skip_ws();
            let id = match c.peek() {
                Some(ch) if ch.is_ascii_alphabetic() => {
                    c.pos += 1;
                    ch as char
                }
                _ => return Err(c.err("expected a one-letter scenario id")),
            };
            if matches!(c.peek(), Some(ch) if !(ch == b' ' || ch == b'\t')) {
                return Err(c.err("scenario id must be a single letter"));
            }
            let sample1 = c.dist()?;
            let sample2 = c.dist()?;
            c.skip_ws();
            let null_mean = c.number()?;
            c.skip_ws();
            if c.peek().is_some() {
                return Err(c.err("trailing input after null mean"));
            }
            map.insert(
                id,
                ScenarioSpec {
                    id,
                    sample1,
                    sample2,
                    null_mean,
                },
            );
        }
        Ok(ScenarioOverrides { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn get(&self, id: char) -> Option<&ScenarioSpec> {
        self.map.get(&id)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families() {
        assert_eq!(
            parse_dist_expr("N(3,0.5)").unwrap(),
            DistSpec::Normal { mean: 3.0, variance: 0.5 }
        );
        assert_eq!(
            parse_dist_expr("N(3/7, 0.5)").unwrap(),
            DistSpec::Normal { mean: 3.0 / 7.0, variance: 0.5 }
        );
        assert_eq!(
            parse_dist_expr("Pois(9.5)").unwrap(),
            DistSpec::Poisson { rate: 9.5 }
        );
        assert!(matches!(
            parse_dist_expr("vM(2, 10)").unwrap(),
            DistSpec::VonMises { .. }
        ));
    }

    #[test]
    fn parses_mixtures() {
        let d = parse_dist_expr("mix(0.4*La(-2,2), 0.6*N(0.8,1))").unwrap();
        match d {
            DistSpec::Mixture(cs) => {
                assert_eq!(cs.len(), 2);
                assert_eq!(cs[0].0, 0.4);
                assert!(matches!(cs[0].1, DistSpec::Laplace { .. }));
                assert!(matches!(cs[1].1, DistSpec::Normal { .. }));
            }
            other => panic!("expected mixture, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_dist_expr("Zeta(1,2)"),
            Err(Error::ParseError { .. })
        ));
        // Invalid parameters are reported with position context.
        let err = parse_dist_expr("Be(-2,2)").unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 1, .. }), "{err:?}");
        assert!(parse_dist_expr("N(0,1) junk").is_err());
        // Mixture weights must sum to one.
        assert!(parse_dist_expr("mix(0.5*N(0,1), 0.4*N(1,1))").is_err());
    }

    #[test]
    fn parses_override_file() {
        let text = "\
# corrected definitions
h\tLa(0,1)\tmix(0.4*La(-2,2), 0.6*N(0.8,1))\t0
j  Skel(8,8)   N(0, 10)   0.0
";
        let ovr = ScenarioOverrides::parse(text).unwrap();
        let h = ovr.get('h').unwrap();
        assert_eq!(h.id, 'h');
        assert_eq!(h.null_mean, 0.0);
        assert!(matches!(h.sample1, DistSpec::Laplace { .. }));
        assert!(ovr.get('j').is_some());
        assert!(ovr.get('a').is_none());
    }

    #[test]
    fn override_errors_carry_position() {
        let err = ScenarioOverrides::parse("h La(0,1) Be(0,1) 0").unwrap_err();
        match err {
            Error::ParseError { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
