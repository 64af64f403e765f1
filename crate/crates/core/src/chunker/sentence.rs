//! Rule-based sentence boundary detection for technical prose.
//!
//! A boundary is placed after a run of `.`, `?` or `!` (plus any closing
//! quotes or brackets) when it is followed by whitespace and then an
//! uppercase letter, a digit, or an opening bracket/quote. A single `.` does
//! not end a sentence when the word before it is a known abbreviation, or
//! when it closes a leading list enumerator such as `1.`. Dots inside
//! numbering (`5.1.2`) are never candidates because no whitespace follows.

const ABBREVIATIONS: &[&str] = &[
    "al", "approx", "art", "cf", "ch", "co", "corp", "dr", "e.g", "eq", "eqs", "esp", "et",
    "etc", "fig", "figs", "i.e", "inc", "incl", "ltd", "max", "min", "mr", "mrs", "ms", "no",
    "nos", "p", "pp", "prof", "ref", "refs", "resp", "sec", "sect", "st", "viz", "vol", "vs",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{201d}', '\u{2019}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '\u{201c}', '\u{2018}'];

/// Splits `text` into trimmed, non-empty sentences in order.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let c = chars[i].1;
        if !matches!(c, '.' | '?' | '!') {
            i += 1;
            continue;
        }
        let term_start = i;
        while i < chars.len() && matches!(chars[i].1, '.' | '?' | '!') {
            i += 1;
        }
        let single_dot = i - term_start == 1 && c == '.';
        while i < chars.len() && CLOSERS.contains(&chars[i].1) {
            i += 1;
        }
        let end = chars.get(i).map_or(text.len(), |&(b, _)| b);
        if i >= chars.len() || !chars[i].1.is_whitespace() {
            continue;
        }
        let mut j = i;
        while j < chars.len() && chars[j].1.is_whitespace() {
            j += 1;
        }
        if j >= chars.len() || !starts_sentence(&chars[j..]) {
            continue;
        }
        if single_dot {
            let word = word_before(text, start, chars[term_start].0);
            if is_abbreviation(word) || is_leading_enumerator(text, start, word) {
                continue;
            }
        }
        push_trimmed(&mut out, &text[start..end]);
        start = end;
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

fn starts_sentence(rest: &[(usize, char)]) -> bool {
    let mut it = rest.iter().map(|&(_, c)| c).skip_while(|c| OPENERS.contains(c));
    match it.next() {
        Some(c) => c.is_uppercase() || c.is_ascii_digit(),
        None => false,
    }
}

/// The whitespace-delimited word ending at byte offset `dot`, with leading
/// brackets and quotes removed.
fn word_before(text: &str, floor: usize, dot: usize) -> &str {
    let head = &text[floor..dot];
    let word_start = head
        .rfind(char::is_whitespace)
        .map_or(0, |p| p + head[p..].chars().next().map_or(1, char::len_utf8));
    head[word_start..].trim_start_matches(|c| OPENERS.contains(&c))
}

fn is_abbreviation(word: &str) -> bool {
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

/// `1.` or `a)`-style enumerators opening a sentence: only a bare number of
/// at most three digits that is the first word since the last boundary.
fn is_leading_enumerator(text: &str, floor: usize, word: &str) -> bool {
    !word.is_empty()
        && word.len() <= 3
        && word.bytes().all(|b| b.is_ascii_digit())
        && text[floor..].trim_start().starts_with(word)
        && text[floor..].trim_start()[word.len()..].starts_with('.')
}
