//! Unrestricted Damerau–Levenshtein distance (insertions, deletions,
//! substitutions and transpositions of adjacent characters, where a
//! transposed pair may be edited further).

pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    distance_chars(&a, &b)
}

pub(crate) fn distance_chars(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    let inf = n + m;
    let w = m + 2;
    let mut d = vec![0usize; (n + 2) * w];
    d[0] = inf;
    for i in 0..=n {
        d[(i + 1) * w] = inf;
        d[(i + 1) * w + 1] = i;
    }
    for j in 0..=m {
        d[j + 1] = inf;
        d[w + j + 1] = j;
    }
    // last row (1-based) in which each character of `a` appeared
    let mut last_row: Vec<(char, usize)> = Vec::new();
    for i in 1..=n {
        let mut last_match_col = 0;
        for j in 1..=m {
            let i1 = last_row.iter().find(|(c, _)| *c == b[j - 1]).map_or(0, |&(_, r)| r);
            let j1 = last_match_col;
            let cost = if a[i - 1] == b[j - 1] {
                last_match_col = j;
                0
            } else {
                1
            };
            let substitution = d[i * w + j] + cost;
            let insertion = d[(i + 1) * w + j] + 1;
            let deletion = d[i * w + j + 1] + 1;
            let transposition = d[i1 * w + j1] + (i - i1 - 1) + 1 + (j - j1 - 1);
            d[(i + 1) * w + j + 1] = substitution.min(insertion).min(deletion).min(transposition);
        }
        match last_row.iter_mut().find(|(c, _)| *c == a[i - 1]) {
            Some(entry) => entry.1 = i,
            None => last_row.push((a[i - 1], i)),
        }
    }
    d[(n + 1) * w + m + 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_distances() {
        assert_eq!(damerau_levenshtein("", ""), 0);
        assert_eq!(damerau_levenshtein("abc", ""), 3);
        assert_eq!(damerau_levenshtein("kyera", "kyerwa"), 1);
        assert_eq!(damerau_levenshtein("karogwe", "karagwe"), 1);
        assert_eq!(damerau_levenshtein("karogwe", "korogwe"), 1);
        assert_eq!(damerau_levenshtein("korogwe", "karagwe"), 2);
        assert_eq!(damerau_levenshtein("ca", "abc"), 2);
        assert_eq!(damerau_levenshtein("mbgeu", "mbegu"), 1);
        assert_eq!(damerau_levenshtein("kanazí", "kanazi"), 1);
    }

    proptest! {
        #[test]
        fn agrees_with_strsim(a in "[a-e]{0,9}", b in "[a-e]{0,9}") {
            prop_assert_eq!(damerau_levenshtein(&a, &b), strsim::damerau_levenshtein(&a, &b));
        }

        #[test]
        fn symmetric_and_bounded(a in "\\PC{0,8}", b in "\\PC{0,8}") {
            let d = damerau_levenshtein(&a, &b);
            prop_assert_eq!(d, damerau_levenshtein(&b, &a));
            prop_assert!(d <= a.chars().count().max(b.chars().count()));
            prop_assert_eq!(d == 0, a == b);
        }
    }
}
