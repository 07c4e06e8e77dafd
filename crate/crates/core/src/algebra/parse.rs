//! Text forms for univariate Laurent polynomials: `3/2*t^-1 - t + (1+2*i)*t^3 + O(t^5)`.

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Parsed terms plus an optional `O(var^N)` bound.
#[derive(Debug, Default)]
pub(crate) struct Terms {
    pub terms: Vec<(i64, Scalar)>,
    pub big_o: Option<i64>,
}

fn split_terms(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    let mut prev: Option<char> = None;
    for c in s.chars().filter(|c| !c.is_whitespace()) {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        // a sign starts a new term unless nested, leading, or an exponent sign
        let exp_sign = matches!(prev, Some('^') | Some('(') | Some('/') | Some('*'));
        if (c == '+' || c == '-') && depth == 0 && !cur.is_empty() && !exp_sign {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(c);
        prev = Some(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_exp(s: &str) -> Result<i64> {
    let s = s.trim_start_matches('(').trim_end_matches(')');
    s.parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))
}

pub(crate) fn parse_terms(src: &str, var: char) -> Result<Terms> {
    let mut out = Terms::default();
    if src.trim().is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    for raw in split_terms(src) {
        let (neg, body) = match raw.strip_prefix('-') {
            Some(b) => (true, b.to_string()),
            None => (false, raw.strip_prefix('+').unwrap_or(&raw).to_string()),
        };
        if let Some(inner) = body.strip_prefix("O(").and_then(|b| b.strip_suffix(')')) {
            let e = match inner.split_once('^') {
                Some((v, e)) if v.len() == 1 && v.starts_with(var) => parse_exp(e)?,
                None if inner.len() == 1 && inner.starts_with(var) => 1,
                _ => return Err(Error::Parse(format!("bad O-term {raw:?}"))),
            };
            out.big_o = Some(out.big_o.map_or(e, |o: i64| o.min(e)));
            continue;
        }
        // coefficient part and variable part
        let (coef_s, var_s) = match body.find(var) {
            Some(k) => {
                let c = body[..k].trim_end_matches('*');
                (c.to_string(), Some(body[k..].to_string()))
            }
            None => (body.clone(), None),
        };
        let coef_s = coef_s.trim_start_matches('(').trim_end_matches(')');
        let mut coef = if coef_s.is_empty() { Scalar::one() } else { coef_s.parse::<Scalar>()? };
        if neg {
            coef = -coef;
        }
        let e = match var_s {
            None => 0,
            Some(v) => {
                let rest = &v[1..];
                if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    parse_exp(e)?
                } else {
                    return Err(Error::Parse(format!("bad term {raw:?}")));
                }
            }
        };
        out.terms.push((e, coef));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_terms() {
        let t = parse_terms("3/2*t^-1 - t + (1+2*i)*t^3 + O(t^5)", 't').unwrap();
        assert_eq!(t.big_o, Some(5));
        assert_eq!(t.terms.len(), 3);
        assert_eq!(t.terms[0], (-1, Scalar::from_ratio(3, 2)));
        assert_eq!(t.terms[1], (1, Scalar::from_i64(-1)));
        assert_eq!(t.terms[2], (3, Scalar::gaussian(1, 2)));
    }

    #[test]
    fn parses_constants_and_bare_var() {
        let t = parse_terms("v^2", 'v').unwrap();
        assert_eq!(t.terms, vec![(2, Scalar::one())]);
        let t = parse_terms("-7", 'v').unwrap();
        assert_eq!(t.terms, vec![(0, Scalar::from_i64(-7))]);
        let t = parse_terms("t^(-2)", 't').unwrap();
        assert_eq!(t.terms, vec![(-2, Scalar::one())]);
    }
}
