use super::resources::{LanguageResources, Tag};
use super::Token;

/// Strips the longest matching suffix once, provided the remaining stem keeps
/// at least the rule's minimum length. Only the longest matching rule is
/// consulted: when its guard fails the surface is returned unchanged.
pub fn stem(surface: &str, resources: &LanguageResources) -> String {
    let len = surface.chars().count();
    for rule in &resources.suffix_rules {
        if surface.ends_with(&rule.suffix) {
            // min_stem_len >= 1, so the stem is never empty
            if len - rule.suffix_chars >= rule.min_stem_len {
                return surface[..surface.len() - rule.suffix.len()].to_string();
            }
            return surface.to_string();
        }
    }
    surface.to_string()
}

fn suffix_hint(surface: &str, resources: &LanguageResources) -> Option<Tag> {
    let len = surface.chars().count();
    resources
        .suffix_rules
        .iter()
        .find(|r| surface.ends_with(&r.suffix))
        .filter(|r| r.suffix_chars < len)
        .and_then(|r| r.tag_hint)
}

/// Assigns tags: lexicon by surface, then by stem, then the suffix cue of the
/// longest matching suffix rule, else `OTHER`. Stop words only take lexicon
/// tags.
pub fn pos_tag(mut tokens: Vec<Token>, resources: &LanguageResources) -> Vec<Token> {
    for token in &mut tokens {
        token.tag = tag_one(token, resources);
    }
    tokens
}

pub(crate) fn tag_one(token: &Token, resources: &LanguageResources) -> Tag {
    if let Some(tag) = resources
        .lexicon_tag(&token.surface)
        .or_else(|| resources.lexicon_tag(&token.stem))
    {
        return tag;
    }
    if token.is_stopword {
        return Tag::Other;
    }
    suffix_hint(&token.surface, resources).unwrap_or(Tag::Other)
}
