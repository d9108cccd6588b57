//! Line-oriented text format for replaying fixed loss sequences.
//!
//! ```text
//! # comments and blank lines are ignored
//! linear <g_1> ... <g_d> [G=<bound>]
//! quad <lambda> <c_1> ... <c_d> [G=<bound>]
//! ```
//!
//! `linear` defaults `G` to `|g|`. `quad` defaults `G` to
//! `lambda * (D + dist(c, W))` when a domain is supplied and otherwise
//! requires an explicit `G=`.

use std::fmt::Write as _;

use super::{LossFn, LossForm, LossSequence};
use crate::error::{Error, Result};
use crate::geometry::Domain;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("not a number: {token:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value: {token:?}")));
    }
    Ok(v)
}

fn parse_line(body: &str, line: usize, domain: Option<&Domain>) -> Result<LossFn> {
    let mut tokens: Vec<&str> = body.split_whitespace().collect();
    let tag = tokens.remove(0);

    let mut lipschitz = None;
    if let Some(last) = tokens.last() {
        if let Some(v) = last.strip_prefix("G=") {
            lipschitz = Some(parse_number(v, line)?);
            tokens.pop();
        }
    }
    let numbers = tokens
        .iter()
        .map(|t| parse_number(t, line))
        .collect::<Result<Vec<f64>>>()?;

    let loss = match tag {
        "linear" => {
            if numbers.is_empty() {
                return Err(parse_err(line, "linear needs at least one coefficient"));
            }
            let l = LossFn::linear(numbers).map_err(|e| parse_err(line, e.to_string()))?;
            match lipschitz {
                Some(g) => l.with_lipschitz(g),
                None => Ok(l),
            }
        }
        "quad" => {
            if numbers.len() < 2 {
                return Err(parse_err(line, "quad needs lambda and a center"));
            }
            let lambda = numbers[0];
            let center = numbers[1..].to_vec();
            match (lipschitz, domain) {
                (Some(g), _) => LossFn::iso_quadratic_with_lipschitz(lambda, center, g),
                (None, Some(dom)) => LossFn::iso_quadratic(lambda, center, dom),
                (None, None) => {
                    return Err(parse_err(line, "quad needs G= when no domain is given"))
                }
            }
        }
        other => return Err(parse_err(line, format!("unknown loss form {other:?}"))),
    };
    loss.map_err(|e| parse_err(line, e.to_string()))
}

/// Parse a loss sequence. Line numbers in errors are 1-based.
pub fn parse_loss_sequence(text: &str, domain: Option<&Domain>) -> Result<LossSequence> {
    let mut losses = Vec::new();
    let mut dimension = domain.map(Domain::dimension);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let loss = parse_line(body, line, domain)?;
        match dimension {
            Some(d) if d != loss.dimension() => {
                return Err(parse_err(
                    line,
                    format!("dimension {} does not match {d}", loss.dimension()),
                ))
            }
            _ => dimension = Some(loss.dimension()),
        }
        losses.push(loss);
    }
    LossSequence::new(losses)
}

/// Dimension of the first loss line, without building any loss.
pub fn peek_dimension(text: &str) -> Result<usize> {
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body
            .split_whitespace()
            .filter(|t| !t.starts_with("G="))
            .collect();
        let Some((tag, numbers)) = tokens.split_first() else {
            return Err(parse_err(i + 1, "missing loss form"));
        };
        let numbers = numbers.len();
        let d = match *tag {
            "linear" => numbers,
            "quad" => numbers.saturating_sub(1),
            other => return Err(parse_err(i + 1, format!("unknown loss form {other:?}"))),
        };
        if d == 0 {
            return Err(parse_err(i + 1, "loss without coefficients"));
        }
        return Ok(d);
    }
    Err(Error::EmptySequence)
}

/// Serialize a sequence; every line carries an explicit `G=` so parsing the
/// output reproduces the sequence exactly.
pub fn write_loss_sequence(seq: &LossSequence) -> Result<String> {
    let mut out = String::new();
    for (t, l) in seq.losses().iter().enumerate() {
        match l.form() {
            LossForm::Linear { g } => {
                out.push_str("linear");
                for v in g {
                    write!(out, " {v:?}").unwrap();
                }
            }
            LossForm::IsoQuadratic { lambda, center } => {
                write!(out, "quad {lambda:?}").unwrap();
                for v in center {
                    write!(out, " {v:?}").unwrap();
                }
            }
            LossForm::Custom(_) => {
                return Err(Error::InvalidParameter(format!(
                    "loss {} is a custom oracle and cannot be serialized",
                    t + 1
                )))
            }
        }
        writeln!(out, " G={:?}", l.lipschitz()).unwrap();
    }
    Ok(out)
}
