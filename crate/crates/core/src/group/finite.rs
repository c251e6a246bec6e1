use serde::{Deserialize, Serialize};

use super::{Carrier, CarrierTag};
use crate::error::{Error, Result};

/// A finite group given by its full multiplication table.
///
/// Elements are dense indices `0..order`. Tables are validated on construction,
/// so every `FiniteGroup` satisfies the group axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    label: String,
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

/// On-disk table format: `{"order": n, "table": [row-major n*n entries]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupTableFile {
    pub order: usize,
    pub table: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl FiniteGroup {
    /// Validates `table` (row-major, `table[a * order + b] = a * b`).
    ///
    /// Associativity is checked before the Latin-square property so that a
    /// corrupted group table reports "not a group"; associative tables that are
    /// not Latin squares (e.g. constant tables) report an invalid table.
    pub fn from_table(label: impl Into<String>, order: usize, table: Vec<usize>) -> Result<Self> {
        let label = label.into();
        if order == 0 {
            return Err(Error::InvalidTable("order must be positive".into()));
        }
        if table.len() != order * order {
            return Err(Error::InvalidTable(format!(
                "expected {} entries, found {}",
                order * order,
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x >= order) {
            return Err(Error::InvalidTable(format!("entry {bad} out of range")));
        }
        let m = |a: usize, b: usize| table[a * order + b];
        for a in 0..order {
            for b in 0..order {
                let ab = m(a, b);
                for c in 0..order {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let mut seen = vec![false; order];
        for a in 0..order {
            seen.iter_mut().for_each(|s| *s = false);
            for b in 0..order {
                let v = m(a, b);
                if seen[v] {
                    return Err(Error::InvalidTable(format!("row {a} repeats {v}")));
                }
                seen[v] = true;
            }
            seen.iter_mut().for_each(|s| *s = false);
            for b in 0..order {
                let v = m(b, a);
                if seen[v] {
                    return Err(Error::InvalidTable(format!("column {a} repeats {v}")));
                }
                seen[v] = true;
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        let mut inv = vec![0; order];
        for (a, slot) in inv.iter_mut().enumerate() {
            *slot = (0..order)
                .find(|&b| m(a, b) == identity)
                .ok_or_else(|| Error::NotAGroup(format!("element {a} has no inverse")))?;
            if m(*slot, a) != identity {
                return Err(Error::NotAGroup(format!("inverse of {a} is one-sided")));
            }
        }
        Ok(Self {
            label,
            order,
            mul: table,
            inv,
            identity,
        })
    }

    pub fn from_file(file: &GroupTableFile) -> Result<Self> {
        let label = file.label.clone().unwrap_or_else(|| format!("table:{}", file.order));
        Self::from_table(label, file.order, file.table.clone())
    }

    pub fn to_file(&self) -> GroupTableFile {
        GroupTableFile {
            order: self.order,
            table: self.mul.clone(),
            label: Some(self.label.clone()),
        }
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("cyclic order must be positive".into()));
        }
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        Self::from_table(format!("cyclic:{n}"), n, table)
    }

    /// Dihedral group of order `2n`; element `k + n*j` is `r^k s^j`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dihedral parameter must be positive".into()));
        }
        let order = 2 * n;
        let mut table = vec![0; order * order];
        for x in 0..order {
            let (a, i) = (x % n, x / n);
            for y in 0..order {
                let (b, j) = (y % n, y / n);
                let rot = if i == 0 { (a + b) % n } else { (a + n - b) % n };
                table[x * order + y] = rot + n * ((i + j) % 2);
            }
        }
        Self::from_table(format!("dihedral:{n}"), order, table)
    }

    /// Symmetric group on `n` letters, permutations in lexicographic order.
    ///
    /// Composition is `(στ)(i) = σ(τ(i))`; index 0 is the identity.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::InvalidParameter(format!(
                "symmetric group degree must lie in 1..=5, got {n}"
            )));
        }
        let perms = permutations(n);
        Self::from_permutations(format!("sym:{n}"), &perms)
    }

    /// Alternating group: the even permutations, in lexicographic order.
    pub fn alternating(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::InvalidParameter(format!(
                "alternating group degree must lie in 1..=5, got {n}"
            )));
        }
        let perms: Vec<_> = permutations(n).into_iter().filter(|p| is_even(p)).collect();
        Self::from_permutations(format!("alt:{n}"), &perms)
    }

    fn from_permutations(label: String, perms: &[Vec<usize>]) -> Result<Self> {
        let order = perms.len();
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p);
        let mut table = vec![0; order * order];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                let composed: Vec<usize> = pb.iter().map(|&i| pa[i]).collect();
                table[a * order + b] = index(&composed)
                    .ok_or_else(|| Error::NotAGroup("permutation set not closed".into()))?;
            }
        }
        Self::from_table(label, order, table)
    }

    /// Parses `cyclic:n`, `dihedral:n`, `sym:n` or `alt:n`.
    pub fn from_preset(spec: &str) -> Result<Self> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("group preset '{spec}' lacks ':'")))?;
        let n: usize = arg
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad group parameter '{arg}'")))?;
        match kind.trim() {
            "cyclic" | "z" => Self::cyclic(n),
            "dihedral" | "d" => Self::dihedral(n),
            "sym" | "symmetric" | "s" => Self::symmetric(n),
            "alt" | "alternating" | "a" => Self::alternating(n),
            other => Err(Error::Parse(format!("unknown group preset '{other}'"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn table(&self) -> &[usize] {
        &self.mul
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != self.identity {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// Closure of `gens` under multiplication.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Result<Subgroup> {
        if let Some(&g) = gens.iter().find(|&&g| g >= self.order) {
            return Err(Error::NotSubgroup(format!("generator {g} out of range")));
        }
        let mut members = vec![false; self.order];
        members[self.identity] = true;
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !members[y] {
                    members[y] = true;
                    frontier.push(y);
                }
            }
        }
        let elements: Vec<usize> = (0..self.order).filter(|&x| members[x]).collect();
        Subgroup::new(self, elements, format!("<{gens:?}>"))
    }

    /// Commutator subgroup `[G, G]`; for `sym:n` this is `alt:n`.
    pub fn derived_subgroup(&self) -> Result<Subgroup> {
        let mut gens = Vec::new();
        for a in 0..self.order {
            for b in 0..self.order {
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                if !gens.contains(&c) {
                    gens.push(c);
                }
            }
        }
        let mut sub = self.generated_subgroup(&gens)?;
        sub.label = format!("[{0}, {0}]", self.label);
        Ok(sub)
    }

    /// Resolves a subgroup spec relative to `self`.
    ///
    /// Accepted forms: the parent's own preset (whole group), `alt:n` inside
    /// `sym:n` (derived subgroup), `cyclic:m` (generated by the first element of
    /// order `m`), `trivial`, and `gens:i,j,..` (explicit generator indices).
    pub fn subgroup_from_spec(&self, spec: &str) -> Result<Subgroup> {
        let spec = spec.trim();
        if spec == self.label {
            let mut sub = Subgroup::new(self, self.elements().collect(), self.label.clone())?;
            sub.group = self.clone();
            return Ok(sub);
        }
        if spec == "trivial" {
            return Subgroup::new(self, vec![self.identity], "trivial".into());
        }
        if let Some(list) = spec.strip_prefix("gens:") {
            let gens = list
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse(format!("bad generator list '{list}'")))?;
            let mut sub = self.generated_subgroup(&gens)?;
            sub.label = spec.to_string();
            return Ok(sub);
        }
        if let Some(arg) = spec.strip_prefix("alt:") {
            if self.label == format!("sym:{}", arg.trim()) {
                let mut sub = self.derived_subgroup()?;
                sub.label = spec.to_string();
                return Ok(sub);
            }
        }
        if let Some(arg) = spec.strip_prefix("cyclic:") {
            let m: usize = arg
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad cyclic order '{arg}'")))?;
            let g = (0..self.order)
                .find(|&x| self.element_order(x) == m)
                .ok_or_else(|| Error::NotSubgroup(format!("{} has no element of order {m}", self.label)))?;
            let mut sub = self.generated_subgroup(&[g])?;
            sub.label = spec.to_string();
            return Ok(sub);
        }
        Err(Error::NotSubgroup(format!(
            "cannot realise '{spec}' inside {}",
            self.label
        )))
    }
}

/// A subgroup together with its embedding into the parent group.
#[derive(Debug, Clone)]
pub struct Subgroup {
    /// The subgroup as a group in its own right (re-indexed).
    pub group: FiniteGroup,
    /// `embedding[i]` is the parent index of subgroup element `i`.
    pub embedding: Vec<usize>,
    /// Inverse of the embedding.
    pub locate: Vec<Option<usize>>,
    pub label: String,
}

impl Subgroup {
    /// Verifies closure of `elements` inside `parent` and builds the re-indexed group.
    pub fn new(parent: &FiniteGroup, mut elements: Vec<usize>, label: String) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        let mut locate = vec![None; parent.order()];
        for (i, &x) in elements.iter().enumerate() {
            if x >= parent.order() {
                return Err(Error::NotSubgroup(format!("element {x} out of range")));
            }
            locate[x] = Some(i);
        }
        if locate[parent.identity()].is_none() {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        let k = elements.len();
        let mut table = vec![0; k * k];
        for (i, &a) in elements.iter().enumerate() {
            for (j, &b) in elements.iter().enumerate() {
                table[i * k + j] = locate[parent.mul(a, b)].ok_or_else(|| {
                    Error::NotSubgroup(format!("not closed under products: {a}*{b}"))
                })?;
            }
        }
        let group = FiniteGroup::from_table(format!("{label}<{}", parent.label()), k, table)?;
        Ok(Self {
            group,
            embedding: elements,
            locate,
            label,
        })
    }

    pub fn index_in(&self, parent: &FiniteGroup) -> usize {
        parent.order() / self.group.order()
    }

    /// The least element of each left coset `xΓ`, in increasing order.
    pub fn left_transversal(&self, parent: &FiniteGroup) -> Vec<usize> {
        let mut omega = Vec::new();
        let mut covered = vec![false; parent.order()];
        for x in parent.elements() {
            if !covered[x] {
                omega.push(x);
                for &h in &self.embedding {
                    covered[parent.mul(x, h)] = true;
                }
            }
        }
        omega
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn is_even(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

impl Carrier for FiniteGroup {
    fn size(&self) -> usize {
        self.order
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn inverse(&self, x: usize) -> usize {
        self.inv(x)
    }

    fn product(&self, x: usize, y: usize) -> Option<usize> {
        Some(self.mul(x, y))
    }

    fn is_total(&self) -> bool {
        true
    }

    fn tag(&self) -> CarrierTag {
        CarrierTag::Finite {
            label: self.label.clone(),
            order: self.order,
        }
    }

    fn element_name(&self, x: usize) -> String {
        x.to_string()
    }

    fn parse_element(&self, s: &str) -> Option<usize> {
        s.trim().parse().ok().filter(|&x| x < self.order)
    }

    fn schur_index_set(&self) -> Vec<usize> {
        self.elements().collect()
    }

    fn tuple_index_set(&self, _d: usize) -> Vec<usize> {
        self.elements().collect()
    }

    fn as_finite(&self) -> Option<&FiniteGroup> {
        Some(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_group_axioms(g: &FiniteGroup) {
        for x in g.elements() {
            assert_eq!(g.mul(x, g.inv(x)), g.identity());
            for y in g.elements() {
                for z in g.elements() {
                    assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
                }
            }
        }
    }

    #[test]
    fn presets_have_expected_orders() {
        assert_eq!(FiniteGroup::cyclic(1).unwrap().order(), 1);
        assert_eq!(FiniteGroup::symmetric(3).unwrap().order(), 6);
        assert_eq!(FiniteGroup::symmetric(4).unwrap().order(), 24);
        assert_eq!(FiniteGroup::dihedral(4).unwrap().order(), 8);
        assert_eq!(FiniteGroup::alternating(4).unwrap().order(), 12);
        for g in ["cyclic:6", "dihedral:4", "sym:3", "alt:4"] {
            assert_group_axioms(&FiniteGroup::from_preset(g).unwrap());
        }
    }

    #[test]
    fn trivial_group_is_identity_only() {
        let g = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(g.identity(), 0);
        assert_eq!(g.mul(0, 0), 0);
    }

    #[test]
    fn corrupted_cyclic_table_is_not_a_group() {
        let mut table = FiniteGroup::cyclic(4).unwrap().table().to_vec();
        table[4 + 1] = 3; // 1 + 1 should be 2
        let err = FiniteGroup::from_table("bad", 4, table).unwrap_err();
        assert!(matches!(err, Error::NotAGroup(_)), "{err}");
        assert!(err.to_string().contains("not a group"));
    }

    #[test]
    fn constant_table_is_invalid() {
        let err = FiniteGroup::from_table("zero", 3, vec![0; 9]).unwrap_err();
        assert!(err.to_string().contains("invalid multiplication table"));
    }

    #[test]
    fn dihedral_is_non_abelian() {
        let g = FiniteGroup::dihedral(4).unwrap();
        let (r, s) = (1, 4);
        assert_ne!(g.mul(r, s), g.mul(s, r));
    }

    #[test]
    fn subgroup_specs_resolve() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let a3 = s3.subgroup_from_spec("alt:3").unwrap();
        assert_eq!(a3.group.order(), 3);
        let z3 = s3.subgroup_from_spec("cyclic:3").unwrap();
        assert_eq!(z3.embedding, a3.embedding);
        let z2 = s3.subgroup_from_spec("cyclic:2").unwrap();
        assert_eq!(z2.group.order(), 2);
        let z4 = FiniteGroup::cyclic(4).unwrap();
        let z2in4 = z4.subgroup_from_spec("cyclic:2").unwrap();
        assert_eq!(z2in4.embedding, vec![0, 2]);
        assert!(matches!(
            Subgroup::new(&z4, vec![0, 1], "x".into()),
            Err(Error::NotSubgroup(_))
        ));
    }

    #[test]
    fn table_file_round_trip() {
        let g = FiniteGroup::dihedral(3).unwrap();
        let json = serde_json::to_string(&g.to_file()).unwrap();
        let back: GroupTableFile = serde_json::from_str(&json).unwrap();
        assert_eq!(FiniteGroup::from_file(&back).unwrap(), g);
    }
}
