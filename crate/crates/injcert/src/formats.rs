//! Text formats for matrices, sign-set matrices, interval matrices and sign
//! vectors.
//!
//! All formats are line oriented: `#` starts a comment, blank lines are
//! skipped and every remaining line is one row. Numbers are integers, `p/q`
//! fractions or decimals (`1.25`, `-3e-2`), always converted exactly.

use injcert_core::classes::Grid;
use injcert_core::{IntervalEntry, Matrix, Rational, SignSet, SignVector};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;

/// Non-empty content lines as `(line number, column of first char, text)`,
/// comments removed.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((i + 1, body))
    })
}

/// Whitespace-separated tokens with 1-based columns.
pub(crate) fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let tail = &rest[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let col = line[..offset + start].chars().count() + 1;
        let tok = &tail[..len];
        offset += start + len;
        rest = &rest[start + len..];
        Some((col, tok))
    })
}

fn digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// An integer, `p/q` or exact decimal with optional exponent.
pub fn parse_rational(tok: &str) -> Result<Rational, String> {
    let bad = || format!("invalid number {tok:?}");
    if let Some((p, q)) = tok.split_once('/') {
        let num: BigInt = p.parse().map_err(|_| bad())?;
        let den: BigInt = q.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(format!("zero denominator in {tok:?}"));
        }
        return Ok(Rational::new(num, den));
    }
    let (neg, body) = match tok.as_bytes().first() {
        Some(b'-') => (true, &tok[1..]),
        Some(b'+') => (false, &tok[1..]),
        _ => (false, tok),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(k) => {
            let e: i32 = body[k + 1..].parse().map_err(|_| bad())?;
            (&body[..k], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits(&all).ok_or_else(bad)?);
    let shift = exp - i32::try_from(frac_part.len()).map_err(|_| bad())?;
    if shift.unsigned_abs() > 4096 {
        return Err(format!("exponent out of range in {tok:?}"));
    }
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if neg { -value } else { value })
}

fn grid_rows<T>(
    text: &str,
    mut entries: impl FnMut(usize, &str) -> Result<Vec<T>, ParseError>,
) -> Result<Vec<Vec<T>>, ParseError> {
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (line, body) in content_lines(text) {
        let row = entries(line, body)?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(ParseError::new(
                    line,
                    1,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError::new(1, 1, "no rows"));
    }
    Ok(rows)
}

/// A rational matrix, one row per line.
pub fn parse_matrix(text: &str) -> Result<Matrix, ParseError> {
    let rows = grid_rows(text, |line, body| {
        tokens(body)
            .map(|(col, t)| parse_rational(t).map_err(|m| ParseError::new(line, col, m)))
            .collect()
    })?;
    Ok(Matrix::from_rows(rows).expect("rows have equal length"))
}

pub fn format_matrix(m: &Matrix) -> String {
    m.to_string()
}

/// A sign-set matrix with tokens `0 - + -0 0+ -+ *`.
pub fn parse_signset_matrix(text: &str) -> Result<Grid<SignSet>, ParseError> {
    let rows = grid_rows(text, |line, body| {
        tokens(body)
            .map(|(col, t)| {
                SignSet::from_token(t).ok_or_else(|| ParseError::new(line, col, format!("invalid sign set {t:?}")))
            })
            .collect()
    })?;
    Ok(Grid::from_rows(rows).expect("rows have equal length"))
}

pub fn format_signset_matrix(w: &Grid<SignSet>) -> String {
    let mut out = String::new();
    for i in 0..w.rows() {
        let row: Vec<&str> = w.row(i).iter().map(|s| s.token()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_bound(s: &str) -> Result<Option<Rational>, String> {
    match s.trim() {
        "inf" | "+inf" | "-inf" => Ok(None),
        t => parse_rational(t).map(Some),
    }
}

/// One bracketed interval `(a,b]`, without the punctured form.
fn parse_plain_interval(tok: &str) -> Result<IntervalEntry, String> {
    let bad = || format!("invalid interval {tok:?}");
    let lower_open = match tok.chars().next() {
        Some('(') => true,
        Some('[') => false,
        _ => return Err(bad()),
    };
    let upper_open = match tok.chars().last() {
        Some(')') => true,
        Some(']') => false,
        _ => return Err(bad()),
    };
    let inner = &tok[1..tok.len() - 1];
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let (lo, hi) = (a.trim(), b.trim());
    if lo == "inf" || lo == "+inf" || hi == "-inf" {
        return Err(bad());
    }
    let lower = parse_bound(lo)?;
    let upper = parse_bound(hi)?;
    if (lower.is_none() && !lower_open) || (upper.is_none() && !upper_open) {
        return Err(format!("infinite ends must be open in {tok:?}"));
    }
    IntervalEntry::new(lower, lower_open, upper, upper_open).map_err(|e| e.to_string())
}

/// `[a,b)`, `(0,inf)`, `{p}`, a bare number, or `(a,0)u(0,b)`.
pub fn parse_interval(tok: &str) -> Result<IntervalEntry, String> {
    let tok = tok.trim();
    if let Some(inner) = tok.strip_prefix('{') {
        let p = inner.strip_suffix('}').ok_or_else(|| format!("invalid point {tok:?}"))?;
        return parse_rational(p.trim()).map(IntervalEntry::point);
    }
    if !tok.starts_with(['(', '[']) {
        return parse_rational(tok).map(IntervalEntry::point);
    }
    if let Some((left, right)) = tok.split_once(")u(") {
        let lo = parse_plain_interval(&format!("{left})"))?;
        let hi = parse_plain_interval(&format!("({right}"))?;
        let zero_split = lo.upper().is_some_and(Zero::is_zero) && hi.lower().is_some_and(Zero::is_zero);
        let sides = lo.lower().is_none_or(Signed::is_negative) && hi.upper().is_none_or(Signed::is_positive);
        if !zero_split || !sides {
            return Err(format!("a union must have the form (a,0)u(0,b) with a < 0 < b, got {tok:?}"));
        }
        let whole = IntervalEntry::new(lo.lower().cloned(), lo.lower_open(), hi.upper().cloned(), hi.upper_open())
            .map_err(|e| e.to_string())?;
        return whole.punctured().map_err(|e| e.to_string());
    }
    parse_plain_interval(tok)
}

/// Splits a row of interval entries, allowing spaces inside brackets.
fn interval_tokens(line: &str) -> Result<Vec<(usize, String)>, (usize, String)> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let mut depth = 0usize;
        while i < chars.len() {
            let c = chars[i];
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => {
                    depth = depth.checked_sub(1).ok_or((start + 1, "unbalanced bracket".to_string()))?;
                    let union = chars.get(i + 1) == Some(&'u') && chars.get(i + 2) == Some(&'(');
                    if depth == 0 && !union {
                        i += 1;
                        break;
                    }
                }
                c if c.is_whitespace() && depth == 0 => break,
                _ => {}
            }
            i += 1;
        }
        if depth != 0 {
            return Err((start + 1, "unclosed bracket".to_string()));
        }
        let tok: String = chars[start..i].iter().filter(|c| !c.is_whitespace()).collect();
        out.push((start + 1, tok));
    }
    Ok(out)
}

pub fn parse_interval_matrix(text: &str) -> Result<Grid<IntervalEntry>, ParseError> {
    let rows = grid_rows(text, |line, body| {
        interval_tokens(body)
            .map_err(|(col, m)| ParseError::new(line, col, m))?
            .into_iter()
            .map(|(col, t)| parse_interval(&t).map_err(|m| ParseError::new(line, col, m)))
            .collect()
    })?;
    Ok(Grid::from_rows(rows).expect("rows have equal length"))
}

pub fn format_interval_matrix(d: &Grid<IntervalEntry>) -> String {
    let mut out = String::new();
    for i in 0..d.rows() {
        let row: Vec<String> = d.row(i).iter().map(ToString::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Sign vectors over `+ - 0`, one per line, all of one length.
pub fn parse_sign_vectors(text: &str) -> Result<Vec<SignVector>, ParseError> {
    let mut out: Vec<SignVector> = Vec::new();
    for (line, body) in content_lines(text) {
        let col = body.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        let v: SignVector = body.parse().map_err(|e: injcert_core::Error| ParseError::new(line, col, e.to_string()))?;
        if out.first().is_some_and(|f| f.len() != v.len()) {
            return Err(ParseError::new(line, col, "sign vectors differ in length"));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn format_sign_vectors(vs: &[SignVector]) -> String {
    vs.iter().map(|v| format!("{v}\n")).collect()
}

/// `p/q` text for a rational; integers print without a denominator.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use injcert_core::linalg::rat;
    use injcert_core::Sign;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("1.3").unwrap(), rat(13, 10));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("2.").unwrap(), rat(2, 1));
        assert_eq!(parse_rational("1.5e-3").unwrap(), rat(3, 2000));
        assert_eq!(parse_rational("+7E2").unwrap(), rat(700, 1));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("4").unwrap(), rat(4, 1));
        for bad in ["", "-", ".", "1/0", "1.2.3", "abc", "1e", "0x10", "1/2/3", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn matrix_with_comments_and_mixed_entries() {
        let m = parse_matrix("# B\n1 1\n\n2 1.5  # tail\n-1/3 0\n").unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(m.row(1), &[rat(2, 1), rat(3, 2)]);
        assert_eq!(m.row(2), &[rat(-1, 3), rat(0, 1)]);
        assert_eq!(parse_matrix(&format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn matrix_errors_carry_positions() {
        let e = parse_matrix("1 2\n3 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_matrix("1 2\n3\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_matrix("# nothing\n").is_err());
    }

    #[test]
    fn signset_tokens() {
        let w = parse_signset_matrix("+ 0 -\n-0 0+ -+\n* + +\n").unwrap();
        assert_eq!(*w.get(0, 0), SignSet::POS);
        assert_eq!(*w.get(1, 0), SignSet::NONPOS);
        assert_eq!(*w.get(1, 2), SignSet::NONZERO);
        assert_eq!(*w.get(2, 0), SignSet::ANY);
        assert_eq!(parse_signset_matrix(&format_signset_matrix(&w)).unwrap(), w);
        let e = parse_signset_matrix("+ ++\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
    }

    #[test]
    fn interval_tokens_of_every_kind() {
        let d = parse_interval_matrix("[1,2) (0,inf) (-inf,0] {3/2}\n(-inf,0)u(0,inf) ( 1 , 2 ] 5 (-1,0)u(0,1/2]\n").unwrap();
        assert!(d.get(0, 0).contains(&rat(1, 1)) && !d.get(0, 0).contains(&rat(2, 1)));
        assert!(d.get(0, 1).is_positive_half_line());
        assert!(d.get(0, 2).contains(&rat(0, 1)));
        assert_eq!(d.get(0, 3).as_point(), Some(&rat(3, 2)));
        assert!(d.get(1, 0).is_punctured() && !d.get(1, 0).contains(&rat(0, 1)));
        assert!(d.get(1, 1).contains(&rat(2, 1)) && !d.get(1, 1).contains(&rat(1, 1)));
        assert_eq!(d.get(1, 2).as_point(), Some(&rat(5, 1)));
        assert!(d.get(1, 3).contains(&rat(1, 2)) && !d.get(1, 3).contains(&rat(-1, 1)));
        assert_eq!(parse_interval_matrix(&format_interval_matrix(&d)).unwrap(), d);
    }

    #[test]
    fn interval_errors() {
        for bad in ["[inf,1)", "(2,1)", "[-inf,0)", "(0,1)u(2,3)", "(1,0)u(0,2)", "{1", "[1,2", "(0,1]u(0,2)"] {
            assert!(parse_interval_matrix(bad).is_err(), "{bad}");
        }
        let e = parse_interval_matrix("(0,1) (1,0)\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 7));
    }

    #[test]
    fn sign_vectors_round_trip() {
        let vs = parse_sign_vectors("++\n--\n# c\n0+\n").unwrap();
        assert_eq!(vs[2].as_slice(), &[Sign::Zero, Sign::Pos]);
        assert_eq!(format_sign_vectors(&vs), "++\n--\n0+\n");
        assert!(parse_sign_vectors("++\n+\n").is_err());
        assert!(parse_sign_vectors("+x\n").is_err());
    }
}
