use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Kw(&'static str),
    Punct(&'static str),
    /// `//@ key: text` line comment.
    Annot(String, String),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const KEYWORDS: &[&str] = &[
    "int", "boolean", "true", "false", "if", "else", "while", "for", "break", "continue",
    "throw", "try", "catch",
];

// Longest first.
const PUNCT: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "->", "++", "--", ";", "{", "}", "(", ")", ",", ":",
    "=", "<", ">", "+", "-", "*", "!",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| SyntaxError::Parse { line, col, msg };

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            let end = src[i..].find('\n').map(|n| i + n).unwrap_or(src.len());
            let text = &src[i + 2..end];
            if let Some(annot) = text.strip_prefix('@') {
                let (key, body) = annot
                    .split_once(':')
                    .ok_or_else(|| err(line, col, "annotation needs `key: value`".into()))?;
                out.push(Token {
                    tok: Tok::Annot(key.trim().to_string(), body.trim().to_string()),
                    line,
                    col,
                });
            }
            col += end - i;
            i = end;
            continue;
        }
        let start_col = col;
        if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let v: i64 = src[i..j]
                .parse()
                .map_err(|_| err(line, col, format!("integer literal `{}` out of range", &src[i..j])))?;
            out.push(Token { tok: Tok::Int(v), line, col: start_col });
            col += j - i;
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut j = i;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            let word = &src[i..j];
            if word == "loop" && src[j..].starts_with("-scope") {
                j += "-scope".len();
                out.push(Token { tok: Tok::Kw("loop-scope"), line, col: start_col });
            } else if let Some(kw) = KEYWORDS.iter().find(|k| **k == word) {
                out.push(Token { tok: Tok::Kw(kw), line, col: start_col });
            } else {
                out.push(Token { tok: Tok::Ident(word.to_string()), line, col: start_col });
            }
            col += j - i;
            i = j;
            continue;
        }
        match PUNCT.iter().find(|p| src[i..].starts_with(**p)) {
            Some(p) => {
                out.push(Token { tok: Tok::Punct(p), line, col: start_col });
                i += p.len();
                col += p.len();
            }
            None => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(err(line, col, format!("unexpected character `{ch}`")));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}
