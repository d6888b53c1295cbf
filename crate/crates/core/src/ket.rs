//! Ket-expression grammar for local vectors.
//!
//! ```text
//! expr  := sign? term (('+'|'-') term)*
//! term  := coeff? ket
//! coeff := integer | integer '/' integer | 'w' | 'w^2' | number ('*'|'·')? ('w'|'w^2')
//! ket   := '|' idx '>' | '|+_' idx '>' | '|_' idx '+_' idx '>'
//! ```
//!
//! Whitespace is ignored. `w` is the cube root of unity e^{2πi/3};
//! `|+_n>` is `|0>+…+|n>` and `|_m+_n>` is `|m>+…+|n>` (m < n).
//! Repeated kets accumulate, so `|0>+w|0>` is `(1+w)|0>`.

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::state::LocalVector;

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn number(&mut self) -> Option<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        self.chars[start..self.pos].iter().collect::<String>().parse().ok()
    }

    fn expect_number(&mut self) -> Result<u64> {
        self.number().ok_or_else(|| self.err("expected a number"))
    }

    /// `w` or `w^2`, if present.
    fn omega_power(&mut self) -> Option<CycloRational> {
        if self.eat('w') {
            if self.eat_str("^2") {
                Some(CycloRational::omega_sq())
            } else {
                Some(CycloRational::omega())
            }
        } else {
            None
        }
    }

    fn coeff(&mut self) -> Result<CycloRational> {
        if let Some(w) = self.omega_power() {
            return Ok(w);
        }
        let Some(n) = self.number() else {
            return Ok(CycloRational::one());
        };
        let n = i64::try_from(n).map_err(|_| self.err("coefficient overflow"))?;
        let mut r = Rational64::from_integer(n);
        if self.eat('/') {
            let d = self.expect_number()?;
            if d == 0 {
                return Err(Error::ZeroDenominator);
            }
            let d = i64::try_from(d).map_err(|_| self.err("coefficient overflow"))?;
            r = Rational64::new(n, d);
        }
        let sep = self.eat('*') || self.eat('·');
        match self.omega_power() {
            Some(w) => Ok(w.scale(r)),
            None if sep => Err(self.err("expected `w` after `*`")),
            None => Ok(r.into()),
        }
    }

    fn index(&mut self, dim: usize) -> Result<usize> {
        let i = self.expect_number()? as usize;
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        Ok(i)
    }

    /// Returns the inclusive index range covered by the ket.
    fn ket(&mut self, dim: usize) -> Result<(usize, usize)> {
        if !self.eat('|') {
            return Err(self.err("expected `|`"));
        }
        let range = if self.eat_str("+_") {
            (0, self.index(dim)?)
        } else if self.eat('_') {
            let m = self.index(dim)?;
            if !self.eat_str("+_") {
                return Err(self.err("expected `+_`"));
            }
            let n = self.index(dim)?;
            if m >= n {
                return Err(self.err("range ket needs m < n"));
            }
            (m, n)
        } else {
            let i = self.index(dim)?;
            (i, i)
        };
        if !self.eat('>') {
            return Err(self.err("expected `>`"));
        }
        Ok(range)
    }
}

/// Parse a ket expression into a vector of dimension `dim`.
pub fn parse_ket(text: &str, dim: usize) -> Result<LocalVector> {
    let stripped: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if stripped.is_empty() {
        return Err(Error::EmptyExpression);
    }
    let mut cur = Cursor { chars: stripped.chars().collect(), pos: 0, src: text };
    let mut v = LocalVector::zeros(dim);
    let mut first = true;
    while cur.peek().is_some() {
        let negative = match cur.peek() {
            Some('+') => {
                cur.bump();
                false
            }
            Some('-') => {
                cur.bump();
                true
            }
            _ if first => false,
            _ => return Err(cur.err("expected `+` or `-`")),
        };
        let mut c = cur.coeff()?;
        if negative {
            c = -c;
        }
        let (lo, hi) = cur.ket(dim)?;
        for e in &mut v.entries_mut()[lo..=hi] {
            *e += c;
        }
        first = false;
    }
    Ok(v)
}

fn fmt_rational(r: Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One signed term `coeff·|i>` for a rational or rational·w^k coefficient.
fn push_term(out: &mut String, magnitude: Rational64, omega: &str, ket: &str) {
    let negative = magnitude < Rational64::zero();
    let abs = if negative { -magnitude } else { magnitude };
    if negative {
        out.push('-');
    } else if !out.is_empty() {
        out.push('+');
    }
    if !abs.is_one() {
        out.push_str(&fmt_rational(abs));
    }
    out.push_str(omega);
    out.push_str(ket);
}

/// Canonical printed form; `parse_ket(print_ket(v), v.dim()) == v`.
pub fn print_ket(v: &LocalVector) -> String {
    let e = v.entries();
    let nz: Vec<usize> = (0..e.len()).filter(|&i| !e[i].is_zero()).collect();
    if nz.is_empty() {
        return "0".to_string();
    }
    // contiguous all-ones run prints as a range ket
    let (lo, hi) = (nz[0], *nz.last().unwrap());
    if hi > lo && nz.len() == hi - lo + 1 && nz.iter().all(|&i| e[i] == CycloRational::one()) {
        return if lo == 0 { format!("|+_{hi}>") } else { format!("|_{lo}+_{hi}>") };
    }
    let mut out = String::new();
    for i in nz {
        let c = e[i];
        let ket = format!("|{i}>");
        let (a, b) = (c.re_part(), c.omega_part());
        if b.is_zero() {
            push_term(&mut out, a, "", &ket);
        } else if a.is_zero() {
            push_term(&mut out, b, "w", &ket);
        } else if a == b {
            // a + aω = −a·ω²
            push_term(&mut out, -a, "w^2", &ket);
        } else {
            push_term(&mut out, a, "", &ket);
            push_term(&mut out, b, "w", &ket);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(dim: usize, terms: &[(usize, i64)]) -> LocalVector {
        LocalVector::from_terms(dim, terms)
    }

    #[test]
    fn basis_difference() {
        assert_eq!(parse_ket("|0>-|4>", 11).unwrap(), v(11, &[(0, 1), (4, -1)]));
    }

    #[test]
    fn plus_ket() {
        assert_eq!(parse_ket("|+_4>", 11).unwrap(), v(11, &[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]));
        assert_eq!(parse_ket("|_5+_7>", 11).unwrap(), v(11, &[(5, 1), (6, 1), (7, 1)]));
    }

    #[test]
    fn omega_coefficients() {
        let got = parse_ket("|0>+w|1>+w^2|2>", 7).unwrap();
        let mut want = LocalVector::zeros(7);
        want.entries_mut()[0] = CycloRational::one();
        want.entries_mut()[1] = CycloRational::omega();
        want.entries_mut()[2] = CycloRational::omega_sq();
        assert_eq!(got, want);
        let scaled = parse_ket("2w|1> - 3*w^2|0> + 1/2|2>", 3).unwrap();
        assert_eq!(scaled.entries()[1], CycloRational::omega().scale(Rational64::from_integer(2)));
        assert_eq!(scaled.entries()[0], CycloRational::omega_sq().scale(Rational64::from_integer(-3)));
        assert_eq!(scaled.entries()[2], CycloRational::rational(1, 2).unwrap());
    }

    #[test]
    fn leading_sign_and_whitespace() {
        assert_eq!(parse_ket(" - | 3 > + |1>", 4).unwrap(), v(4, &[(1, 1), (3, -1)]));
        assert_eq!(parse_ket("+|+_1>", 4).unwrap(), v(4, &[(0, 1), (1, 1)]));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_ket("", 3), Err(Error::EmptyExpression)));
        assert!(matches!(parse_ket("   ", 3), Err(Error::EmptyExpression)));
        assert!(matches!(parse_ket("|3>", 3), Err(Error::IndexOutOfRange { index: 3, dim: 3 })));
        assert!(matches!(parse_ket("|+_5>", 3), Err(Error::IndexOutOfRange { .. })));
        for bad in ["|0", "0>", "|0>|1>", "|a>", "|_2+_1>", "2*|0>", "|0>+", "w^3|0>"] {
            assert!(parse_ket(bad, 3).is_err(), "{bad}");
        }
    }

    #[test]
    fn printer_forms() {
        assert_eq!(print_ket(&v(11, &[(0, 1), (4, -1)])), "|0>-|4>");
        assert_eq!(print_ket(&parse_ket("|+_10>", 11).unwrap()), "|+_10>");
        assert_eq!(print_ket(&parse_ket("|_5+_10>", 11).unwrap()), "|_5+_10>");
        assert_eq!(print_ket(&parse_ket("|0>+w|1>+w^2|2>", 3).unwrap()), "|0>+w|1>+w^2|2>");
        assert_eq!(print_ket(&v(3, &[(2, -3)])), "-3|2>");
    }

    #[test]
    fn listed_corpus_round_trips() {
        let corpus = [
            ("|0>-|1>+|9>-|10>", 11),
            ("|+_4>", 11),
            ("|_5+_10>", 11),
            ("|5>-|6>+|2>-|3>", 11),
            ("|0>+w|1>+w^2|2>", 7),
            ("|1>+w^2|2>+w|3>", 7),
            ("|3>-|4>+|5>-|6>", 8),
            ("|6>-|11>", 13),
        ];
        for (text, dim) in corpus {
            let once = parse_ket(text, dim).unwrap();
            let twice = parse_ket(&print_ket(&once), dim).unwrap();
            assert_eq!(once, twice, "{text}");
        }
    }

    fn arb_vector() -> impl Strategy<Value = LocalVector> {
        (2usize..8).prop_flat_map(|d| {
            proptest::collection::vec((-3i64..=3, 1i64..=3, -3i64..=3), d).prop_map(move |cs| {
                LocalVector::new(
                    cs.into_iter()
                        .map(|(a, q, b)| CycloRational::new(Rational64::new(a, q), Rational64::from_integer(b)))
                        .collect(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn print_parse_identity(x in arb_vector()) {
            prop_assume!(!x.is_zero());
            let printed = print_ket(&x);
            prop_assert_eq!(parse_ket(&printed, x.dim()).unwrap(), x);
        }
    }
}
