//! Rule-based sentence splitting for issue-tracker prose.
//!
//! Units are delimited by terminal punctuation and newlines; enumerated list
//! markers ("1.", "2)", "-", "*") do not split from their item text. The
//! splitter is total and lossless: the raw segments concatenate back to the
//! exact input. Stack-trace and log lines simply become their own units.

/// Raw segments partitioning `body`: their concatenation equals `body`
/// byte-for-byte. Segments may be whitespace-only (blank lines).
pub fn split_segments(body: &str) -> Vec<&str> {
    let mut segments = Vec::new();
    let mut segment_start = 0usize;
    let mut line_start = 0usize;
    let mut marker_guard_end = marker_end(body, 0);

    let mut chars = body.char_indices().peekable();
    while let Some((at, c)) = chars.next() {
        if c == '\n' {
            let end = at + c.len_utf8();
            segments.push(&body[segment_start..end]);
            segment_start = end;
            line_start = end;
            marker_guard_end = marker_end(body, line_start);
            continue;
        }
        if is_terminal(c) && at >= marker_guard_end {
            // Consume the whole punctuation run plus closing quotes/brackets.
            let mut end = at + c.len_utf8();
            while let Some(&(next_at, next)) = chars.peek() {
                if is_terminal(next) || is_closer(next) {
                    end = next_at + next.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let boundary = match chars.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if boundary && end > segment_start {
                segments.push(&body[segment_start..end]);
                segment_start = end;
            }
        }
        let _ = line_start;
    }
    if segment_start < body.len() {
        segments.push(&body[segment_start..]);
    }
    segments
}

/// Sentence units of `body` in order: trimmed, non-empty. List items,
/// numbered steps, and newline-separated fragments each count as a unit.
pub fn split_sentences(body: &str) -> Vec<String> {
    split_segments(body)
        .into_iter()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '…')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | '”' | '’' | ')' | ']')
}

/// Byte offset just past a leading list marker on the line starting at
/// `line_start`, or `line_start` when the line has none. Sentence cuts are
/// suppressed before this offset so "1." stays attached to its item.
fn marker_end(body: &str, line_start: usize) -> usize {
    let line = &body[line_start..];
    let mut chars = line.char_indices().peekable();

    while let Some(&(_, c)) = chars.peek() {
        if c == ' ' || c == '\t' {
            chars.next();
        } else {
            break;
        }
    }

    match chars.peek() {
        Some(&(_, c)) if c.is_ascii_digit() => {
            let mut digits = 0;
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() && digits < 3 {
                    digits += 1;
                    chars.next();
                } else {
                    break;
                }
            }
            match chars.peek() {
                Some(&(at, p)) if p == '.' || p == ')' => line_start + at + p.len_utf8(),
                _ => line_start,
            }
        }
        Some(&(at, c)) if matches!(c, '-' | '*' | '•') => line_start + at + c.len_utf8(),
        _ => line_start,
    }
}
