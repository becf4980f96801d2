//! Screen layout under the 160-character limit.

/// Maximum characters in a screen body.
pub const SCREEN_LIMIT: usize = 160;

/// List labels longer than this are cut and suffixed with "…".
pub const LABEL_WIDTH: usize = 24;

pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Ordinal shown for the `index`-th choice (0-based). Numbers 96, 98 and 99
/// are reserved for navigation and skipped.
pub fn ordinal(index: usize) -> u32 {
    let mut n = index as u32 + 1;
    if n >= 96 {
        n += 1;
    }
    if n >= 98 {
        n += 2;
    }
    n
}

pub fn truncate_label(label: &str, width: usize) -> String {
    if char_len(label) <= width {
        return label.to_string();
    }
    let mut out: String = label.chars().take(width).collect();
    out.push('…');
    out
}

#[cfg(test)]
fn body_len(lines: &[&str]) -> usize {
    lines.iter().map(|l| char_len(l)).sum::<usize>() + lines.len().saturating_sub(1)
}

pub struct ListPage {
    pub lines: Vec<String>,
    /// Indices into the item list shown on this page.
    pub range: std::ops::Range<usize>,
    pub has_next: bool,
}

/// Greedy pagination of `items` (already numbered and truncated) under
/// `budget` characters. Every page starts with `title`, which is counted as
/// `title_slot` characters so another line of that width can stand in for
/// it. `footer(more)` returns the navigation lines for a page with or
/// without a following page. A page index past the end yields the last page.
pub fn list_page(
    title: &str,
    title_slot: usize,
    items: &[String],
    footer: impl Fn(bool) -> Vec<String>,
    budget: usize,
    page: u32,
) -> ListPage {
    let last_footer = footer(false);
    let more_footer = footer(true);
    let slot = title_slot.max(char_len(title));
    let fixed = |f: &[String]| slot + f.iter().map(|l| char_len(l) + 1).sum::<usize>();

    let mut start = 0;
    let mut p = 0u32;
    loop {
        let rest: usize = items[start..].iter().map(|l| char_len(l) + 1).sum();
        let (count, more) = if fixed(&last_footer) + rest <= budget {
            (items.len() - start, false)
        } else {
            let mut used = fixed(&more_footer);
            let mut count = 0;
            for item in &items[start..] {
                let next = used + char_len(item) + 1;
                if next > budget && count > 0 {
                    break;
                }
                used = next;
                count += 1;
            }
            (count, start + count < items.len())
        };
        if p == page || !more {
            let footer_lines = if more { more_footer } else { last_footer };
            let mut lines = vec![title.to_string()];
            lines.extend(items[start..start + count].iter().cloned());
            lines.extend(footer_lines);
            return ListPage { lines, range: start..start + count, has_next: more };
        }
        start += count;
        p += 1;
    }
}

pub struct TextPage {
    pub lines: Vec<String>,
    pub has_next: bool,
}

/// Word-wrapped pagination of running text; each page ends with
/// `footer(more)`.
pub fn text_page(text: &str, footer: impl Fn(bool) -> Vec<String>, budget: usize, page: u32) -> TextPage {
    let words: Vec<&str> = text.split_whitespace().collect();
    let more_footer = footer(true);
    let last_footer = footer(false);
    let footer_len = |f: &[String]| f.iter().map(|l| char_len(l) + 1).sum::<usize>();

    let mut start = 0;
    let mut p = 0u32;
    loop {
        let rest = words[start..].join(" ");
        let (chunk, next) = if char_len(&rest) + footer_len(&last_footer) <= budget {
            (rest, words.len())
        } else {
            let room = budget - footer_len(&more_footer);
            let mut used = 0;
            let mut end = start;
            while end < words.len() {
                let add = char_len(words[end]) + usize::from(end > start);
                if used + add > room && end > start {
                    break;
                }
                used += add;
                end += 1;
            }
            (words[start..end].join(" "), end)
        };
        let more = next < words.len();
        if p == page || !more {
            let mut lines = vec![chunk];
            lines.extend(if more { more_footer } else { last_footer });
            return TextPage { lines, has_next: more };
        }
        start = next;
        p += 1;
    }
}

/// Cuts the longest lines (never those listed in `keep`) one character at a
/// time until the body fits `budget`.
pub fn fit_lines(lines: Vec<String>, keep: &[usize], budget: usize) -> Vec<String> {
    let full: Vec<usize> = lines.iter().map(|l| char_len(l)).collect();
    let mut width = full.clone();
    let shown = |i: usize, w: &[usize]| if w[i] < full[i] { w[i] + 1 } else { full[i] };
    loop {
        let total = (0..lines.len()).map(|i| shown(i, &width)).sum::<usize>() + lines.len().saturating_sub(1);
        let candidate = (0..lines.len())
            .filter(|i| !keep.contains(i) && width[*i] > 1)
            .max_by_key(|&i| (shown(i, &width), std::cmp::Reverse(i)));
        match candidate {
            Some(i) if total > budget => {
                width[i] = if width[i] == full[i] { full[i].saturating_sub(2).max(1) } else { width[i] - 1 };
            }
            _ => {
                return lines.iter().zip(&width).map(|(l, &w)| truncate_label(l, w)).collect();
            }
        }
    }
}
