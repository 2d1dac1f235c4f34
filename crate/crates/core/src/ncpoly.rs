//! Noncommutative polynomials with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A word in ring generators, given by generator index.
pub type Word = Vec<u16>;

/// Integer-linear combination of words. Zero coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct NCPoly {
    terms: BTreeMap<Word, i64>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, Vec::new())
    }

    pub fn generator(g: u16) -> Self {
        Self::monomial(1, vec![g])
    }

    pub fn monomial(coeff: i64, word: Word) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(word, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn coeff(&self, w: &[u16]) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, word: Word, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(word.clone()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&word);
        }
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> NCPoly {
        NCPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a * b);
            }
        }
        out
    }

    /// Renders with the given generator names, e.g. `3*R1.C2 - 1`.
    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut ordered: Vec<(&Word, i64)> = self.terms().collect();
        ordered.sort_by(|(u, _), (v, _)| u.len().cmp(&v.len()).then_with(|| u.cmp(v)));
        let mut out = String::new();
        for (i, (w, c)) in ordered.into_iter().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            let word = w
                .iter()
                .map(|&g| names.get(g as usize).cloned().unwrap_or_else(|| format!("g{g}")))
                .collect::<Vec<_>>()
                .join(".");
            match (w.is_empty(), mag) {
                (true, _) => out.push_str(&mag.to_string()),
                (false, 1) => out.push_str(&word),
                (false, _) => out.push_str(&format!("{mag}*{word}")),
            }
        }
        out
    }

    /// Parses the textual format produced by [`NCPoly::render`].
    pub fn parse(src: &str, names: &[String]) -> Result<NCPoly> {
        let invalid = |m: String| Error::Invalid(format!("polynomial `{src}`: {m}"));
        let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(invalid("empty".into()));
        }
        let mut out = NCPoly::zero();
        let mut chunks: Vec<(i64, String)> = Vec::new();
        let mut sign = 1;
        let mut cur = String::new();
        for (i, ch) in compact.chars().enumerate() {
            if ch == '+' || ch == '-' {
                if !cur.is_empty() {
                    chunks.push((sign, std::mem::take(&mut cur)));
                } else if i != 0 {
                    return Err(invalid("dangling sign".into()));
                }
                sign = if ch == '-' { -1 } else { 1 };
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(invalid("trailing sign".into()));
        }
        chunks.push((sign, cur));
        for (sign, chunk) in chunks {
            let (coeff, word_src) = match chunk.split_once('*') {
                Some((c, w)) => (c.parse::<i64>().map_err(|e| invalid(e.to_string()))?, Some(w)),
                None => match chunk.parse::<i64>() {
                    Ok(c) => (c, None),
                    Err(_) => (1, Some(chunk.as_str())),
                },
            };
            let mut word = Vec::new();
            if let Some(ws) = word_src {
                for g in ws.split('.') {
                    if g == "1" {
                        continue;
                    }
                    let idx =
                        names.iter().position(|n| n == g).ok_or_else(|| invalid(format!("unknown generator `{g}`")))?;
                    word.push(idx as u16);
                }
            }
            out.add_term(word, sign * coeff);
        }
        Ok(out)
    }
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["R1", "R2", "C1", "C2"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn render_and_parse() {
        let n = names();
        let p = NCPoly::parse("3*R1.C2 - 1", &n).unwrap();
        assert_eq!(p.coeff(&[0, 3]), 3);
        assert_eq!(p.coeff(&[]), -1);
        assert_eq!(p.render(&n), "-1 + 3*R1.C2");
        assert_eq!(NCPoly::parse(&p.render(&n), &n).unwrap(), p);
        assert_eq!(NCPoly::parse("1 - R1.C1", &n).unwrap().render(&n), "1 - R1.C1");
        assert!(NCPoly::parse("R1 +", &n).is_err());
        assert!(NCPoly::parse("X9", &n).is_err());
    }

    #[test]
    fn arithmetic() {
        let r = NCPoly::generator(0);
        let c = NCPoly::generator(2);
        let rc = r.mul(&c);
        let cr = c.mul(&r);
        assert_ne!(rc, cr);
        assert!(rc.sub(&rc).is_zero());
        assert_eq!(rc.add(&rc), rc.scale(2));
    }
}
