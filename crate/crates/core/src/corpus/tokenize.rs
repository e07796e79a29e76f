use serde::{Deserialize, Serialize};

/// Text split into sentences of lowercase, punctuation-free tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub sentences: Vec<Vec<String>>,
    pub tokens_flat: Vec<String>,
}

impl TokenizedDocument {
    pub fn len(&self) -> usize {
        self.tokens_flat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens_flat.is_empty()
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}')
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_apostrophe(c)
}

/// Byte ranges of the words in `text`.
///
/// A word is a maximal run of alphanumerics and apostrophes with leading and
/// trailing apostrophes trimmed off, so `ain't` stays whole while `'cause`
/// yields `cause`. Hyphens and all other punctuation separate words.
pub(crate) fn word_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if !is_word_char(c) {
            chars.next();
            continue;
        }
        let mut end = start;
        while let Some(&(i, c)) = chars.peek() {
            if !is_word_char(c) {
                break;
            }
            end = i + c.len_utf8();
            chars.next();
        }
        let run = &text[start..end];
        let lead = run.len() - run.trim_start_matches(is_apostrophe).len();
        let trimmed = run.trim_start_matches(is_apostrophe).trim_end_matches(is_apostrophe);
        if !trimmed.is_empty() {
            spans.push((start + lead, start + lead + trimmed.len()));
        }
    }
    spans
}

pub(crate) fn normalize_word(word: &str) -> String {
    word.chars()
        .map(|c| if is_apostrophe(c) { '\'' } else { c })
        .flat_map(char::to_lowercase)
        .collect()
}

/// Split on terminal punctuation (`.`, `!`, `?`) that is followed by
/// whitespace or the end of the text. No abbreviation handling.
fn sentence_slices(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = match iter.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if at_boundary {
                let end = i + c.len_utf8();
                out.push(&text[start..end]);
                start = end;
            }
        }
    }
    if start < text.len() {
        out.push(&text[start..]);
    }
    out
}

pub fn tokenize(text: &str) -> TokenizedDocument {
    let mut doc = TokenizedDocument::default();
    for slice in sentence_slices(text) {
        let tokens: Vec<String> = word_spans(slice)
            .into_iter()
            .map(|(s, e)| normalize_word(&slice[s..e]))
            .collect();
        if !tokens.is_empty() {
            doc.tokens_flat.extend(tokens.iter().cloned());
            doc.sentences.push(tokens);
        }
    }
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn two_sentences() {
        let d = tokenize("I was born. I was freed!");
        assert_eq!(d.sentences, vec![toks(&["i", "was", "born"]), toks(&["i", "was", "freed"])]);
        assert_eq!(d.len(), 6);
    }

    #[test]
    fn empty_text() {
        let d = tokenize("");
        assert!(d.sentences.is_empty() && d.tokens_flat.is_empty());
        assert!(tokenize("  ... !!").is_empty());
    }

    #[test]
    fn apostrophes_and_hyphens() {
        let d = tokenize("I ain't tellin' white folks nuthin' 'cause I'm skeer'd.");
        assert_eq!(
            d.tokens_flat,
            toks(&["i", "ain't", "tellin", "white", "folks", "nuthin", "cause", "i'm", "skeer'd"])
        );
        let d = tokenize("the slave-driver\u{2019}s whip");
        assert_eq!(d.tokens_flat, toks(&["the", "slave", "driver's", "whip"]));
    }

    #[test]
    fn punctuation_inside_sentence_does_not_split() {
        let d = tokenize("Mr.Jones came; 3.5 miles?!  Yes.");
        assert_eq!(d.sentences.len(), 2);
        assert_eq!(d.sentences[0], toks(&["mr", "jones", "came", "3", "5", "miles"]));
    }

    #[test]
    fn excerpt_matches_hand_count() {
        // 55 words counted by hand; "ole-time" counts as two.
        let excerpt = "When I was a little boy, my mammy worked in the big house. \
            Ole Marster had a lot of hands on the place, and they all had to work \
            mighty hard. I 'members the ole-time days when we'd go down to the creek \
            and fish all day long! Dem was good times, sho' nuff.";
        assert_eq!(tokenize(excerpt).len(), 55);
    }

    proptest! {
        #[test]
        fn sentences_concatenate_to_flat(text in "[a-zA-Z '.!?,-]{0,200}") {
            let d = tokenize(&text);
            let joined: Vec<String> = d.sentences.concat();
            prop_assert_eq!(&joined, &d.tokens_flat);
            for t in &d.tokens_flat {
                prop_assert!(!t.is_empty());
                prop_assert!(t.chars().all(|c| c.is_alphanumeric() || c == '\''));
                prop_assert!(!t.starts_with('\'') && !t.ends_with('\''));
                prop_assert_eq!(t.to_lowercase(), t.clone());
            }
        }
    }
}
