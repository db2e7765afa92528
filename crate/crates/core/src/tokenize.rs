//! Lossless word segmentation.
//!
//! Text is split into maximal runs of word characters (Unicode letters and
//! digits plus apostrophes), maximal runs of whitespace, and single
//! punctuation characters. Concatenating the token texts always reproduces
//! the input, so transforms can edit individual tokens and reassemble.

use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Punct,
    Space,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Byte span in the original string.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenizedText {
    pub tokens: Vec<Token>,
}

pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '\u{2019}'
}

fn kind_of(c: char) -> TokenKind {
    if is_word_char(c) {
        TokenKind::Word
    } else if c.is_whitespace() {
        TokenKind::Space
    } else {
        TokenKind::Punct
    }
}

pub fn tokenize(text: &str) -> TokenizedText {
    let mut tokens: Vec<Token> = Vec::new();
    for (start, c) in text.char_indices() {
        let kind = kind_of(c);
        let end = start + c.len_utf8();
        match tokens.last_mut() {
            Some(last) if last.kind == kind && kind != TokenKind::Punct => {
                last.text.push(c);
                last.span.end = end;
            }
            _ => tokens.push(Token {
                kind,
                text: c.to_string(),
                span: start..end,
            }),
        }
    }
    TokenizedText { tokens }
}

pub fn detokenize(tt: &TokenizedText) -> String {
    tt.tokens.iter().map(|t| t.text.as_str()).collect()
}

impl TokenizedText {
    /// Token positions of the WORD tokens, in order.
    pub fn word_positions(&self) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_word())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_word()).count()
    }

    /// Removes the token at `pos` together with one adjacent SPACE token,
    /// preferring the preceding one.
    pub fn remove_word(&mut self, pos: usize) {
        let before = pos > 0 && self.tokens[pos - 1].kind == TokenKind::Space;
        let after = pos + 1 < self.tokens.len() && self.tokens[pos + 1].kind == TokenKind::Space;
        if before {
            self.tokens.drain(pos - 1..=pos);
        } else if after {
            self.tokens.drain(pos..=pos + 1);
        } else {
            self.tokens.remove(pos);
        }
    }

    pub fn to_text(&self) -> String {
        detokenize(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn summary(tt: &TokenizedText) -> Vec<(TokenKind, &str)> {
        tt.tokens.iter().map(|t| (t.kind, t.text.as_str())).collect()
    }

    #[test]
    fn sentence_with_period() {
        use TokenKind::*;
        let tt = tokenize("I am happy.");
        assert_eq!(
            summary(&tt),
            vec![
                (Word, "I"),
                (Space, " "),
                (Word, "am"),
                (Space, " "),
                (Word, "happy"),
                (Punct, "."),
            ]
        );
        assert_eq!(tt.tokens[4].span, 5..10);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").tokens.is_empty());
    }

    #[test]
    fn apostrophes_and_hyphens() {
        let tt = tokenize("don't stop");
        assert_eq!(tt.tokens[0].text, "don't");
        assert_eq!(tt.word_count(), 2);
        let tt = tokenize("well-known");
        assert_eq!(tt.word_count(), 2);
        assert_eq!(tt.tokens[1].kind, TokenKind::Punct);
    }

    #[test]
    fn punctuation_is_single_char() {
        let tt = tokenize("wait!!");
        assert_eq!(tt.tokens.len(), 3);
    }

    #[test]
    fn unicode_words() {
        let tt = tokenize("naïve café 東京");
        assert_eq!(tt.word_count(), 3);
        assert_eq!(tt.to_text(), "naïve café 東京");
    }

    #[test]
    fn delete_word_keeps_single_space() {
        let mut tt = tokenize("I am happy.");
        tt.remove_word(2);
        assert_eq!(tt.to_text(), "I happy.");
        let mut tt = tokenize("I am happy.");
        tt.remove_word(0);
        assert_eq!(tt.to_text(), "am happy.");
        let mut tt = tokenize("(alone)");
        tt.remove_word(1);
        assert_eq!(tt.to_text(), "()");
    }

    #[test]
    fn replace_word() {
        let mut tt = tokenize("I am happy.");
        tt.tokens[4].text = "glad".into();
        assert_eq!(detokenize(&tt), "I am glad.");
    }

    proptest! {
        #[test]
        fn round_trip(s in any::<String>()) {
            let tt = tokenize(&s);
            prop_assert_eq!(detokenize(&tt), s.clone());
            let mut cursor = 0;
            for t in &tt.tokens {
                prop_assert_eq!(t.span.start, cursor);
                prop_assert_eq!(&s[t.span.clone()], t.text.as_str());
                cursor = t.span.end;
            }
            prop_assert_eq!(cursor, s.len());
        }

        #[test]
        fn round_trip_wordy(s in "[a-zA-Z' ,.!?\\-\t\n]{0,60}") {
            prop_assert_eq!(detokenize(&tokenize(&s)), s);
        }

        #[test]
        fn editing_one_token_leaves_others(s in "[a-z ,.]{1,40}", repl in "[A-Z]{1,5}") {
            let tt = tokenize(&s);
            if let Some(&pos) = tt.word_positions().first() {
                let mut edited = tt.clone();
                edited.tokens[pos].text = repl.clone();
                let out = detokenize(&edited);
                let prefix: String = tt.tokens[..pos].iter().map(|t| t.text.as_str()).collect();
                let suffix: String = tt.tokens[pos + 1..].iter().map(|t| t.text.as_str()).collect();
                prop_assert_eq!(out, format!("{prefix}{repl}{suffix}"));
            }
        }
    }
}
