use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("tag name is empty")]
    EmptyTag,
    #[error("no <{0}>...</{0}> pair found")]
    Missing(String),
    #[error("<{0}> is never closed")]
    Unterminated(String),
}

/// Content of the last complete `<tag>...</tag>` pair, trimmed. Tag names
/// match case-insensitively.
pub fn extract_tag(text: &str, tag: &str) -> Result<String, ExtractError> {
    let tag = tag.trim();
    if tag.is_empty() {
        return Err(ExtractError::EmptyTag);
    }
    // ASCII lowercasing keeps byte offsets aligned with `text`.
    let lower = text.to_ascii_lowercase();
    let open = format!("<{}>", tag.to_ascii_lowercase());
    let close = format!("</{}>", tag.to_ascii_lowercase());

    let mut last = None;
    let mut dangling = false;
    let mut pos = 0;
    while let Some(start) = lower[pos..].find(&open) {
        let body = pos + start + open.len();
        match lower[body..].find(&close) {
            Some(end) => {
                last = Some((body, body + end));
                dangling = false;
                pos = body + end + close.len();
            }
            None => {
                dangling = true;
                break;
            }
        }
    }
    match last {
        Some((a, b)) => Ok(text[a..b].trim().to_string()),
        None if dangling => Err(ExtractError::Unterminated(tag.to_string())),
        None => Err(ExtractError::Missing(tag.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn last_pair_wins() {
        assert_eq!(extract_tag("thinking... <HEALTH>7</HEALTH>", "HEALTH").unwrap(), "7");
        assert_eq!(
            extract_tag("<GOAL>A</GOAL> on second thought <goal> B </Goal>", "GOAL").unwrap(),
            "B"
        );
    }

    #[test]
    fn errors() {
        assert_eq!(extract_tag("nothing", "HEALTH"), Err(ExtractError::Missing("HEALTH".into())));
        assert_eq!(
            extract_tag("<HEALTH>7", "HEALTH"),
            Err(ExtractError::Unterminated("HEALTH".into()))
        );
        assert_eq!(extract_tag("x", " "), Err(ExtractError::EmptyTag));
    }
}
