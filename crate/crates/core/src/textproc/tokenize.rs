/// Characters split off the edges of whitespace-delimited chunks.
pub fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '‘' | '’' | '“' | '”' | '–' | '—' | '…' | '«' | '»' | '¿' | '¡'
        )
}

fn closes(token: &str) -> bool {
    matches!(
        token,
        "." | "," | ";" | ":" | "!" | "?" | ")" | "]" | "}" | "%" | "’" | "”" | "»" | "…"
    )
}

fn opens(token: &str) -> bool {
    matches!(token, "(" | "[" | "{" | "‘" | "“" | "«" | "¿" | "¡" | "$" | "#")
}

/// Splits on whitespace runs, then peels leading and trailing punctuation
/// off each chunk into one-character tokens. Casing is preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let lead = chars.iter().take_while(|c| is_punct(**c)).count();
        if lead == chars.len() {
            tokens.extend(chars.iter().map(|c| c.to_string()));
            continue;
        }
        let trail = chars.iter().rev().take_while(|c| is_punct(**c)).count();
        tokens.extend(chars[..lead].iter().map(|c| c.to_string()));
        tokens.push(chars[lead..chars.len() - trail].iter().collect());
        tokens.extend(chars[chars.len() - trail..].iter().map(|c| c.to_string()));
    }
    tokens
}

/// Joins tokens with single spaces, attaching closing punctuation to the
/// left and opening punctuation to the right.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for (k, tok) in tokens.iter().enumerate() {
        let tok = tok.as_ref();
        if k > 0 && !closes(tok) && !opens(tokens[k - 1].as_ref()) {
            out.push(' ');
        }
        out.push_str(tok);
    }
    out
}
