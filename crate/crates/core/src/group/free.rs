use std::collections::HashMap;

use super::{Carrier, CarrierTag};
use crate::error::{Error, Result};

/// A letter of a free group: `+i` is the i-th generator (1-based), `-i` its inverse.
pub type Letter = i8;

/// The ball of radius `R` in the free group on `k` generators.
///
/// Elements are the reduced words of length at most `R`, indexed by length and
/// then lexicographically in the letter order `a, A, b, B, ...` (uppercase is
/// the inverse). The ball doubles as the vertex set of the Cayley tree with base
/// point at the identity; tree distance is `d(x, y) = |x⁻¹y|`.
#[derive(Debug, Clone)]
pub struct FreeBall {
    gens: usize,
    radius: usize,
    words: Vec<Vec<Letter>>,
    index: HashMap<Vec<Letter>, usize>,
    /// `sphere_start[j]` is the index of the first word of length `j`.
    sphere_start: Vec<usize>,
}

impl FreeBall {
    pub fn new(gens: usize, radius: usize) -> Result<Self> {
        if gens == 0 || gens > 26 {
            return Err(Error::InvalidParameter(format!(
                "generator count must lie in 1..=26, got {gens}"
            )));
        }
        let letters: Vec<Letter> = (1..=gens as Letter).flat_map(|g| [g, -g]).collect();
        let mut words = vec![Vec::new()];
        let mut sphere_start = vec![0];
        let mut frontier: Vec<Vec<Letter>> = vec![Vec::new()];
        for _ in 0..radius {
            sphere_start.push(words.len());
            let mut next = Vec::with_capacity(frontier.len() * (2 * gens));
            for w in &frontier {
                for &l in &letters {
                    if w.last() == Some(&-l) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        sphere_start.push(words.len());
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(Self {
            gens,
            radius,
            words,
            index,
            sphere_start,
        })
    }

    /// `1 + Σ_{j=1..R} 2k(2k-1)^{j-1}`.
    pub fn expected_size(gens: usize, radius: usize) -> usize {
        let mut total = 1;
        let mut sphere = 2 * gens;
        for _ in 0..radius {
            total += sphere;
            sphere *= 2 * gens - 1;
        }
        total
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn word(&self, x: usize) -> &[Letter] {
        &self.words[x]
    }

    pub fn length(&self, x: usize) -> usize {
        self.words[x].len()
    }

    pub fn lookup(&self, word: &[Letter]) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Elements of length at most `r` (a prefix of the index range).
    pub fn ball(&self, r: usize) -> Vec<usize> {
        let end = self.sphere_start[(r + 1).min(self.radius + 1)];
        (0..end).collect()
    }

    /// Elements of length exactly `n`.
    pub fn sphere(&self, n: usize) -> Vec<usize> {
        if n > self.radius {
            return Vec::new();
        }
        (self.sphere_start[n]..self.sphere_start[n + 1]).collect()
    }

    /// Reduced product of two words, ignoring the radius.
    pub fn reduce_concat(a: &[Letter], b: &[Letter]) -> Vec<Letter> {
        let mut k = 0;
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == -b[k] {
            k += 1;
        }
        let mut out = Vec::with_capacity(a.len() + b.len() - 2 * k);
        out.extend_from_slice(&a[..a.len() - k]);
        out.extend_from_slice(&b[k..]);
        out
    }

    pub fn inverse_word(w: &[Letter]) -> Vec<Letter> {
        w.iter().rev().map(|&l| -l).collect()
    }

    /// Tree distance `|x⁻¹y|`.
    pub fn distance(&self, x: usize, y: usize) -> usize {
        Self::reduce_concat(&Self::inverse_word(&self.words[x]), &self.words[y]).len()
    }

    /// The vertex `γ_v(n)` of the geodesic ray from `v` towards the end `a^{+∞}`.
    ///
    /// The ray descends from `v` towards the identity until it reaches the
    /// longest prefix of `v` of the form `a^j` (`j ≥ 0`), then ascends along
    /// the base ray `a^{j+1}, a^{j+2}, ...`.
    pub fn ray_point(&self, v: usize, n: usize) -> Result<usize> {
        let w = self.words.get(v).ok_or_else(|| {
            Error::InvalidParameter(format!("element {v} outside the ball"))
        })?;
        let j = w.iter().take_while(|&&l| l == 1).count();
        let descent = w.len() - j;
        let target: Vec<Letter> = if n <= descent {
            w[..w.len() - n].to_vec()
        } else {
            vec![1; j + n - descent]
        };
        self.lookup(&target).ok_or_else(|| {
            Error::RadiusExhausted(format!(
                "ray point {n} from {} has length {} > {}",
                self.element_name(v),
                target.len(),
                self.radius
            ))
        })
    }

    pub fn format_word(w: &[Letter]) -> String {
        if w.is_empty() {
            return "e".to_string();
        }
        w.iter()
            .map(|&l| {
                let c = (b'a' + (l.unsigned_abs() - 1)) as char;
                if l > 0 {
                    c
                } else {
                    c.to_ascii_uppercase()
                }
            })
            .collect()
    }

    pub fn parse_word(&self, s: &str) -> Option<Vec<Letter>> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Some(Vec::new());
        }
        let mut raw = Vec::with_capacity(s.len());
        for c in s.chars() {
            let l = if c.is_ascii_lowercase() {
                (c as u8 - b'a' + 1) as Letter
            } else if c.is_ascii_uppercase() {
                -((c.to_ascii_lowercase() as u8 - b'a' + 1) as Letter)
            } else {
                return None;
            };
            if l.unsigned_abs() as usize > self.gens {
                return None;
            }
            raw = Self::reduce_concat(&raw, &[l]);
        }
        Some(raw)
    }
}

impl Carrier for FreeBall {
    fn size(&self) -> usize {
        self.words.len()
    }

    fn identity(&self) -> usize {
        0
    }

    fn inverse(&self, x: usize) -> usize {
        self.index[&Self::inverse_word(&self.words[x])]
    }

    fn product(&self, x: usize, y: usize) -> Option<usize> {
        let w = Self::reduce_concat(&self.words[x], &self.words[y]);
        if w.len() > self.radius {
            return None;
        }
        self.lookup(&w)
    }

    fn is_total(&self) -> bool {
        false
    }

    fn tag(&self) -> CarrierTag {
        CarrierTag::FreeBall {
            gens: self.gens,
            radius: self.radius,
        }
    }

    fn element_name(&self, x: usize) -> String {
        Self::format_word(&self.words[x])
    }

    fn parse_element(&self, s: &str) -> Option<usize> {
        self.parse_word(s).and_then(|w| self.lookup(&w))
    }

    fn schur_index_set(&self) -> Vec<usize> {
        self.ball(self.radius / 2)
    }

    fn tuple_index_set(&self, d: usize) -> Vec<usize> {
        self.ball(self.radius / d.max(1))
    }

    fn length(&self, x: usize) -> Option<usize> {
        Some(self.words[x].len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_sphere_counts() {
        assert_eq!(FreeBall::new(2, 0).unwrap().size(), 1);
        assert_eq!(FreeBall::new(2, 2).unwrap().size(), 17);
        assert_eq!(FreeBall::new(1, 3).unwrap().size(), 7);
        for (k, r) in [(2, 4), (3, 3), (1, 6)] {
            assert_eq!(FreeBall::new(k, r).unwrap().size(), FreeBall::expected_size(k, r));
        }
    }

    #[test]
    fn every_word_is_reduced_and_listed_once() {
        let b = FreeBall::new(2, 4).unwrap();
        for x in 0..b.size() {
            let w = b.word(x);
            assert!(w.windows(2).all(|p| p[0] != -p[1]));
            assert_eq!(b.lookup(w), Some(x));
        }
    }

    #[test]
    fn partial_product_respects_radius() {
        let b = FreeBall::new(2, 2).unwrap();
        let a = b.parse_element("a").unwrap();
        let aa = b.parse_element("aa").unwrap();
        assert_eq!(b.product(a, a), Some(aa));
        assert_eq!(b.product(aa, a), None);
        let big_a = b.parse_element("A").unwrap();
        assert_eq!(b.product(aa, big_a), Some(a));
        assert_eq!(b.inverse(aa), b.parse_element("AA").unwrap());
    }

    #[test]
    fn ray_examples() {
        let b = FreeBall::new(2, 4).unwrap();
        let e = b.identity();
        let name = |x| b.element_name(x);
        assert_eq!(name(b.ray_point(e, 3).unwrap()), "aaa");
        let gen_b = b.parse_element("b").unwrap();
        assert_eq!(name(b.ray_point(gen_b, 1).unwrap()), "e");
        assert_eq!(name(b.ray_point(gen_b, 2).unwrap()), "a");
        let a2 = b.parse_element("aa").unwrap();
        assert_eq!(name(b.ray_point(a2, 1).unwrap()), "aaa");
        assert_eq!(b.ray_point(a2, 0).unwrap(), a2);
    }

    #[test]
    fn ray_leaving_ball_is_reported() {
        let b = FreeBall::new(2, 2).unwrap();
        let err = b.ray_point(b.identity(), 3).unwrap_err();
        assert!(err.to_string().contains("radius exhausted"));
    }

    #[test]
    fn rays_are_geodesic() {
        let b = FreeBall::new(2, 6).unwrap();
        for v in b.ball(3) {
            let pts: Vec<_> = (0..=3).map(|k| b.ray_point(v, k).unwrap()).collect();
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate() {
                    assert_eq!(b.distance(x, y), i.abs_diff(j));
                }
            }
        }
    }

    #[test]
    fn word_parsing() {
        let b = FreeBall::new(2, 3).unwrap();
        assert_eq!(b.parse_element("e"), Some(0));
        assert_eq!(b.parse_element("aA"), Some(0));
        assert_eq!(b.parse_element("c"), None);
        let x = b.parse_element("aBa").unwrap();
        assert_eq!(b.element_name(x), "aBa");
    }
}
