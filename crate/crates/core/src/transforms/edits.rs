use rand::Rng;

use super::{below, char_selection_count, choose_k, nearest_neighbors, Lexicon, TransformKind, TransformSpec};
use crate::error::Result;
use crate::tokenize::{is_word_char, Token, TokenKind, TokenizedText};

const LOWER: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

pub(super) fn apply_char<R: Rng + ?Sized>(spec: &TransformSpec, tt: &mut TokenizedText, rng: &mut R) -> Result<()> {
    let keyboard = match spec.kind {
        TransformKind::KeyboardTypo => Some(spec.lexicon()?),
        _ => None,
    };
    let eligible: Vec<usize> = tt
        .word_positions()
        .into_iter()
        .filter(|&p| {
            let chars: Vec<char> = tt.tokens[p].text.chars().collect();
            chars.len() >= spec.min_word_len && !edit_sites(spec.kind, &chars, keyboard).is_empty()
        })
        .collect();
    let n_sel = char_selection_count(spec.word_fraction, eligible.len());
    for pos in choose_k(rng, &eligible, n_sel) {
        let chars: Vec<char> = tt.tokens[pos].text.chars().collect();
        tt.tokens[pos].text = edit_word(spec.kind, chars, keyboard, rng);
    }
    Ok(())
}

/// Character positions at which `kind` can make a visible edit.
fn edit_sites(kind: TransformKind, chars: &[char], keyboard: Option<&Lexicon>) -> Vec<usize> {
    match kind {
        TransformKind::CharInsert => (0..=chars.len()).collect(),
        TransformKind::CharDelete => (0..chars.len()).collect(),
        TransformKind::CharSubstitute => (0..chars.len()).filter(|&i| chars[i].is_alphanumeric()).collect(),
        TransformKind::CharSwap => (0..chars.len().saturating_sub(1))
            .filter(|&i| chars[i] != chars[i + 1])
            .collect(),
        TransformKind::KeyboardTypo => {
            let table = keyboard.expect("keyboard table checked by caller");
            (0..chars.len())
                .filter(|&i| !keyboard_neighbors(table, chars[i]).is_empty())
                .collect()
        }
        _ => unreachable!("not a character transform"),
    }
}

fn keyboard_neighbors(table: &Lexicon, c: char) -> Vec<char> {
    let key: String = c.to_lowercase().collect();
    table
        .get(&key)
        .map(|ns| {
            ns.iter()
                .filter_map(|n| {
                    let mut it = n.chars();
                    match (it.next(), it.next()) {
                        (Some(ch), None) if is_word_char(ch) => Some(ch),
                        _ => None,
                    }
                })
                .collect()
        })
        .unwrap_or_default()
}

fn match_case(template: char, c: char) -> char {
    if template.is_uppercase() {
        c.to_uppercase().next().unwrap_or(c)
    } else {
        c
    }
}

fn random_letter<R: Rng + ?Sized>(rng: &mut R, uppercase: bool, avoid: Option<char>) -> char {
    loop {
        let c = LOWER[below(rng, LOWER.len())] as char;
        let c = if uppercase { c.to_ascii_uppercase() } else { c };
        if Some(c) != avoid {
            return c;
        }
    }
}

fn edit_word<R: Rng + ?Sized>(kind: TransformKind, mut chars: Vec<char>, keyboard: Option<&Lexicon>, rng: &mut R) -> String {
    let sites = edit_sites(kind, &chars, keyboard);
    let at = sites[below(rng, sites.len())];
    match kind {
        TransformKind::CharInsert => {
            let all_upper = chars.iter().any(|c| c.is_alphabetic()) && chars.iter().all(|c| !c.is_lowercase());
            let c = random_letter(rng, all_upper, None);
            chars.insert(at, c);
        }
        TransformKind::CharDelete => {
            chars.remove(at);
        }
        TransformKind::CharSubstitute => {
            let old = chars[at];
            chars[at] = if old.is_ascii_digit() || (old.is_numeric() && !old.is_alphabetic()) {
                let digits: Vec<char> = ('0'..='9').filter(|&d| d != old).collect();
                digits[below(rng, digits.len())]
            } else {
                random_letter(rng, old.is_uppercase(), Some(old))
            };
        }
        TransformKind::CharSwap => chars.swap(at, at + 1),
        TransformKind::KeyboardTypo => {
            let table = keyboard.expect("keyboard table checked by caller");
            let ns = keyboard_neighbors(table, chars[at]);
            chars[at] = match_case(chars[at], ns[below(rng, ns.len())]);
        }
        _ => unreachable!("not a character transform"),
    }
    chars.into_iter().collect()
}

pub(super) fn apply_word<R: Rng + ?Sized>(spec: &TransformSpec, tt: &mut TokenizedText, rng: &mut R) -> Result<()> {
    let words = tt.word_positions();
    let k = spec.words_to_modify;
    match spec.kind {
        TransformKind::WordDelete => {
            // Always leave at least one word standing.
            let n = k.min(words.len() - 1);
            let mut chosen = choose_k(rng, &words, n);
            chosen.reverse();
            for pos in chosen {
                tt.remove_word(pos);
            }
        }
        TransformKind::WordSwap => {
            if words.len() < 2 {
                return Ok(());
            }
            let order: Vec<usize> = (0..words.len()).collect();
            for wi in choose_k(rng, &order, k) {
                let other = if wi + 1 < words.len() { wi + 1 } else { wi - 1 };
                let (a, b) = (words[wi], words[other]);
                let tmp = std::mem::take(&mut tt.tokens[a].text);
                tt.tokens[a].text = std::mem::replace(&mut tt.tokens[b].text, tmp);
            }
        }
        TransformKind::WordSplit => {
            let candidates: Vec<usize> = words.iter().copied().filter(|&p| tt.tokens[p].char_len() >= 2).collect();
            let mut chosen = choose_k(rng, &candidates, k);
            chosen.reverse();
            for pos in chosen {
                let chars: Vec<char> = tt.tokens[pos].text.chars().collect();
                let cut = 1 + below(rng, chars.len() - 1);
                let left: String = chars[..cut].iter().collect();
                let right: String = chars[cut..].iter().collect();
                let span = tt.tokens[pos].span.clone();
                let piece = |kind, text: String| Token {
                    kind,
                    text,
                    span: span.clone(),
                };
                tt.tokens.splice(
                    pos..=pos,
                    [
                        piece(TokenKind::Word, left),
                        piece(TokenKind::Space, " ".into()),
                        piece(TokenKind::Word, right),
                    ],
                );
            }
        }
        TransformKind::SpellingError | TransformKind::SynonymLexicon | TransformKind::ParaphraseLexicon => {
            let lex = spec.lexicon()?;
            let candidates: Vec<usize> = words.iter().copied().filter(|&p| lex.contains(&tt.tokens[p].text)).collect();
            for pos in choose_k(rng, &candidates, k) {
                let options = lex.get(&tt.tokens[pos].text).expect("candidate has entry");
                let pick = &options[below(rng, options.len())];
                tt.tokens[pos].text = restore_case(&tt.tokens[pos].text, pick);
            }
        }
        TransformKind::EmbeddingSubstitute => {
            let table = spec.embeddings()?;
            let candidates: Vec<usize> = words
                .iter()
                .copied()
                .filter(|&p| table.contains(&tt.tokens[p].text) && table.vocab().len() > 1)
                .collect();
            for pos in choose_k(rng, &candidates, k) {
                let neighbors = nearest_neighbors(table, &tt.tokens[pos].text, table.neighbor_count.max(1))
                    .expect("candidate is in vocabulary");
                let pick = neighbors[below(rng, neighbors.len())];
                tt.tokens[pos].text = restore_case(&tt.tokens[pos].text, pick);
            }
        }
        _ => unreachable!("not a word transform"),
    }
    Ok(())
}

/// Carries the original word's capitalisation pattern onto a replacement.
pub(crate) fn restore_case(original: &str, replacement: &str) -> String {
    let cased: Vec<char> = original.chars().filter(|c| c.is_alphabetic()).collect();
    if cased.len() >= 2 && cased.iter().all(|c| c.is_uppercase()) {
        return replacement.to_uppercase();
    }
    match original.chars().next() {
        Some(first) if first.is_uppercase() => {
            let mut it = replacement.chars();
            match it.next() {
                Some(c) => c.to_uppercase().chain(it).collect(),
                None => String::new(),
            }
        }
        _ => replacement.to_string(),
    }
}
