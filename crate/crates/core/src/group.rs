//! Finite groups given by multiplication tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group on `0..order`. Element 0 is not assumed to be the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    pub name: String,
    mul: Vec<Vec<usize>>,
    #[serde(skip)]
    identity: usize,
    #[serde(skip)]
    inverse: Vec<usize>,
}

#[derive(Deserialize)]
struct GroupFile {
    order: usize,
    mul: Vec<Vec<usize>>,
    #[serde(default)]
    name: Option<String>,
}

impl FiniteGroup {
    /// Validates the table (closure, associativity, identity, inverses).
    pub fn from_table(name: &str, mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if mul.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(Error::InvalidGroup("table is not closed".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))?;
        let inverse = (0..n)
            .map(|a| {
                (0..n)
                    .find(|&b| mul[a][b] == identity && mul[b][a] == identity)
                    .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteGroup { name: name.to_string(), mul, identity, inverse })
    }

    /// Parses `{order, mul: [[...]]}`.
    pub fn from_json(src: &str) -> Result<Self> {
        let file: GroupFile = serde_json::from_str(src).map_err(|e| Error::InvalidGroup(e.to_string()))?;
        if file.order != file.mul.len() {
            return Err(Error::InvalidGroup(format!("order {} but table has {} rows", file.order, file.mul.len())));
        }
        let name = file.name.unwrap_or_else(|| format!("G{}", file.order));
        Self::from_table(&name, file.mul)
    }

    pub fn cyclic(n: usize) -> Self {
        let n = n.max(1);
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(&format!("C{n}"), mul).expect("cyclic table is a group")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Symmetric group on three letters, elements in lexicographic permutation order.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mul = perms.iter().map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect()).collect();
        Self::from_table("S3", mul).expect("S3 table is a group")
    }

    /// Direct product; `(g, h)` is encoded as `g * |H| + h`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (n, m) = (g.order(), h.order());
        let mul =
            (0..n * m).map(|a| (0..n * m).map(|b| g.mul(a / m, b / m) * m + h.mul(a % m, b % m)).collect()).collect();
        Self::from_table(&format!("{}x{}", g.name, h.name), mul).expect("product of groups")
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    /// Non-identity elements in index order.
    pub fn non_identity(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(move |&a| a != self.identity)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_product() {
        let c2 = FiniteGroup::cyclic(2);
        let c3 = FiniteGroup::cyclic(3);
        let p = FiniteGroup::product(&c2, &c3);
        assert_eq!(p.order(), 6);
        assert!(p.is_abelian());
        assert_eq!(p.identity(), 0);
    }

    #[test]
    fn s3_is_non_abelian() {
        let s3 = FiniteGroup::symmetric3();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
    }

    #[test]
    fn json_table() {
        let g = FiniteGroup::from_json(r#"{"order": 2, "mul": [[0,1],[1,0]]}"#).unwrap();
        assert_eq!(g.inverse(1), 1);
        assert!(FiniteGroup::from_json(r#"{"order": 2, "mul": [[0,1],[1,1]]}"#).is_err());
        assert!(FiniteGroup::from_json(r#"{"order": 3, "mul": [[0,1],[1,0]]}"#).is_err());
    }
}
