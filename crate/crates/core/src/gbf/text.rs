//! Line-oriented text form of a [`Gbf`].
//!
//! ```text
//! q=2 m=4
//! 1 * x0*x1
//! 1 * x1
//! ```
//!
//! Constant terms are written as the bare coefficient. Terms appear in
//! ascending index-set order, and `to_string` of a parsed canonical file
//! reproduces it byte for byte. Blank lines and `#` comments are ignored when
//! parsing.

use std::fmt;
use std::str::FromStr;

use super::Gbf;
use crate::error::{Error, Result};

impl fmt::Display for Gbf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q={} m={}", self.q, self.m)?;
        for (mono, c) in self.terms() {
            if mono.is_empty() {
                writeln!(f, "{c}")?;
            } else {
                let vars: Vec<String> = mono.iter().map(|v| format!("x{v}")).collect();
                writeln!(f, "{c} * {}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_header(line_no: usize, line: &str) -> Result<(u32, usize)> {
    let mut q = None;
    let mut m = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected key=value, got `{field}`")))?;
        match key {
            "q" => {
                q = Some(
                    value
                        .parse::<u32>()
                        .map_err(|e| parse_err(line_no, format!("q: {e}")))?,
                )
            }
            "m" => {
                m = Some(
                    value
                        .parse::<usize>()
                        .map_err(|e| parse_err(line_no, format!("m: {e}")))?,
                )
            }
            other => return Err(parse_err(line_no, format!("unknown header key `{other}`"))),
        }
    }
    match (q, m) {
        (Some(q), Some(m)) => Ok((q, m)),
        _ => Err(parse_err(line_no, "header must be `q=<q> m=<m>`")),
    }
}

impl FromStr for Gbf {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let (q, m) = parse_header(line_no, header)?;
        let mut f = Gbf::zero(q, m).map_err(|e| parse_err(line_no, e.to_string()))?;
        for (line_no, line) in lines {
            let mut parts = line.split('*').map(str::trim);
            let coeff: u32 = parts
                .next()
                .unwrap_or_default()
                .parse()
                .map_err(|e| parse_err(line_no, format!("coefficient: {e}")))?;
            let vars = parts
                .map(|p| {
                    p.strip_prefix('x')
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| parse_err(line_no, format!("expected x<index>, got `{p}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            f.add_term(&vars, coeff)
                .map_err(|e| parse_err(line_no, e.to_string()))?;
        }
        Ok(f)
    }
}

impl TryFrom<String> for Gbf {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Gbf> for String {
    fn from(f: Gbf) -> String {
        f.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EXAMPLE: &str = "q=2 m=4\n1 * x0*x1\n1 * x0*x2\n1 * x0*x3\n1 * x1\n1 * x1*x2\n1 * x2\n";

    #[test]
    fn canonical_text_roundtrips_exactly() {
        let f: Gbf = EXAMPLE.parse().unwrap();
        assert_eq!(f.to_string(), EXAMPLE);
        assert_eq!(f.terms().count(), 6);
    }

    #[test]
    fn parser_is_lenient_about_layout() {
        let f: Gbf = "# comment\n q=4   m=3 \n\n3*x2 * x0\n 5 \n2 * x1\n".parse().unwrap();
        assert_eq!(f.to_string(), "q=4 m=3\n1\n3 * x0*x2\n2 * x1\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = "q=2 m=2\n1 * x0\n1 * y1\n".parse::<Gbf>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(matches!("q=3 m=2\n".parse::<Gbf>(), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            "q=2 m=2\n1 * x2\n".parse::<Gbf>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!("".parse::<Gbf>(), Err(Error::Parse { .. })));
    }

    #[test]
    fn serde_uses_text_form() {
        let f: Gbf = EXAMPLE.parse().unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let back: Gbf = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    fn arb_gbf() -> impl Strategy<Value = Gbf> {
        (prop::sample::select(vec![2u32, 4, 6, 8]), 1usize..7).prop_flat_map(|(q, m)| {
            prop::collection::vec((prop::collection::btree_set(0..m, 0..=3), 0..q), 0..12).prop_map(move |terms| {
                Gbf::from_terms(
                    q,
                    m,
                    terms.into_iter().map(|(v, c)| (v.into_iter().collect::<Vec<_>>(), c)),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn text_roundtrip(f in arb_gbf()) {
            let text = f.to_string();
            let back: Gbf = text.parse().unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
