/// Levenshtein distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Lowercased with all whitespace removed.
pub fn fold(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).flat_map(char::to_lowercase).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzyConfig {
    /// A candidate is accepted when `distance <= ceil(len / divisor)`.
    pub divisor: usize,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        FuzzyConfig { divisor: 3 }
    }
}

impl FuzzyConfig {
    pub fn threshold(&self, len: usize) -> usize {
        len.div_ceil(self.divisor.max(1))
    }
}

/// Closest allowed value under case- and whitespace-insensitive edit
/// distance, if it is within the threshold. Ties go to the lexicographically
/// smallest candidate.
pub fn fuzzy_match<'a, S: AsRef<str>>(bad: &str, allowed: &'a [S]) -> Option<&'a str> {
    fuzzy_match_with(bad, allowed, FuzzyConfig::default())
}

pub fn fuzzy_match_with<'a, S: AsRef<str>>(bad: &str, allowed: &'a [S], config: FuzzyConfig) -> Option<&'a str> {
    let folded = fold(bad);
    let limit = config.threshold(folded.chars().count());
    allowed
        .iter()
        .map(|c| (levenshtein(&folded, &fold(c.as_ref())), c.as_ref()))
        .filter(|(d, _)| *d <= limit)
        .min()
        .map(|(_, c)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Registry;

    /// Textbook recursive definition with memoization; independent of the
    /// two-row implementation above.
    fn oracle(a: &[char], b: &[char], memo: &mut std::collections::HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        if let Some(&d) = memo.get(&(a.len(), b.len())) {
            return d;
        }
        let cost = usize::from(a[0] != b[0]);
        let d =
            (oracle(&a[1..], &b[1..], memo) + cost).min(oracle(&a[1..], b, memo) + 1).min(oracle(a, &b[1..], memo) + 1);
        memo.insert((a.len(), b.len()), d);
        d
    }

    fn oracle_distance(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        oracle(&a, &b, &mut Default::default())
    }

    fn enum_values(name: &str) -> Vec<String> {
        Registry::builtin().enums[name].clone()
    }

    #[test]
    fn distances_agree_with_oracle() {
        let words = ["", "a", "kitten", "sitting", "cmicsans", "comicsansms", "ellipse", "zebra", "über"];
        for a in words {
            for b in words {
                assert_eq!(levenshtein(a, b), oracle_distance(a, b), "{a} / {b}");
            }
        }
    }

    #[test]
    fn comic_sans_typo() {
        assert_eq!(fuzzy_match("Cmic Sans", &enum_values("fontName")), Some("Comic Sans MS"));
    }

    #[test]
    fn exact_match_wins() {
        assert_eq!(fuzzy_match("Triangle", &enum_values("shapeType")), Some("Triangle"));
        assert_eq!(fuzzy_match("triangle", &enum_values("shapeType")), Some("Triangle"));
    }

    #[test]
    fn zebra_has_no_match() {
        let shapes = enum_values("shapeType");
        // Brute-force table: every candidate is beyond ceil(5/3) = 2 edits.
        for c in &shapes {
            assert!(oracle_distance("zebra", &fold(c)) > 2, "{c}");
        }
        assert_eq!(fuzzy_match("Zebra", &shapes), None);
    }

    #[test]
    fn circle_and_square_are_not_fuzzy_matches() {
        let shapes = enum_values("shapeType");
        assert_eq!(fuzzy_match("Circle", &shapes), None);
        assert_eq!(fuzzy_match("Square", &shapes), None);
    }

    #[test]
    fn ties_break_lexicographically() {
        assert_eq!(fuzzy_match("bat", &["cat", "bar", "hat"]), Some("bar"));
    }

    #[test]
    fn threshold_is_configurable() {
        let strict = FuzzyConfig { divisor: 100 };
        assert_eq!(fuzzy_match_with("Cmic Sans", &enum_values("fontName"), strict), None);
        assert_eq!(FuzzyConfig::default().threshold(8), 3);
        assert_eq!(FuzzyConfig::default().threshold(9), 3);
        assert_eq!(FuzzyConfig::default().threshold(10), 4);
    }
}
