use std::collections::HashMap;

use super::resources::{CharRewrite, LanguageResources};

/// Normalized text together with, for every output character, the index of
/// the raw character that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub text: String,
    pub offset_map: Vec<usize>,
}

/// Applies the bundle's character map codepoint by codepoint.
pub fn normalize(raw_text: &str, resources: &LanguageResources) -> Normalized {
    let mut text = String::with_capacity(raw_text.len());
    let mut offset_map = Vec::with_capacity(raw_text.len());
    for (raw_idx, c) in raw_text.chars().enumerate() {
        match resources.char_map.get(&c) {
            Some(CharRewrite::Delete) => {}
            Some(CharRewrite::Replace(dst)) => {
                text.push(*dst);
                offset_map.push(raw_idx);
            }
            None => {
                text.push(c);
                offset_map.push(raw_idx);
            }
        }
    }
    Normalized { text, offset_map }
}

pub(crate) fn normalize_str(s: &str, char_map: &HashMap<char, CharRewrite>) -> String {
    s.chars()
        .filter_map(|c| match char_map.get(&c) {
            Some(CharRewrite::Delete) => None,
            Some(CharRewrite::Replace(d)) => Some(*d),
            None => Some(c),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textnorm::testing::tiny_latin;
    use proptest::prelude::*;

    #[test]
    fn arabic_yeh_becomes_persian_yeh() {
        let fa = LanguageResources::persian();
        let n = normalize("علي", &fa);
        assert_eq!(n.text, "علی");
        assert_eq!(n.offset_map, vec![0, 1, 2]);
    }

    #[test]
    fn digits_unify_to_ascii() {
        let fa = LanguageResources::persian();
        assert_eq!(normalize("۱۲", &fa).text, "12");
        assert_eq!(normalize("١٢", &fa).text, "12");
    }

    #[test]
    fn deleted_diacritic_skips_offset() {
        let fa = LanguageResources::persian();
        // kasra at raw index 2
        let n = normalize("کتِاب", &fa);
        assert_eq!(n.text, "کتاب");
        assert_eq!(n.offset_map, vec![0, 1, 3, 4]);
    }

    #[test]
    fn zwnj_is_kept() {
        let fa = LanguageResources::persian();
        assert_eq!(normalize("کتاب\u{200c}ها", &fa).text, "کتاب\u{200c}ها");
    }

    #[test]
    fn empty_input() {
        let n = normalize("", &LanguageResources::persian());
        assert!(n.text.is_empty() && n.offset_map.is_empty());
    }

    #[test]
    fn tiny_map_deletes_and_replaces() {
        let res = tiny_latin();
        let n = normalize("A-b", &res);
        assert_eq!(n.text, "ab");
        assert_eq!(n.offset_map, vec![0, 2]);
    }

    fn arabic_mix() -> impl Strategy<Value = String> {
        let chars: Vec<char> = "علیيكکآأإا ًٌٍَُِّْـ٠١٢۰۱۲abc.؟\u{200c}\n"
            .chars()
            .collect();
        prop::collection::vec(prop::sample::select(chars), 0..64)
            .prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn idempotent(s in arabic_mix()) {
            let fa = LanguageResources::persian();
            let once = normalize(&s, &fa).text;
            let twice = normalize(&once, &fa).text;
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn offset_map_monotone_and_in_bounds(s in arabic_mix()) {
            let fa = LanguageResources::persian();
            let n = normalize(&s, &fa);
            let raw_len = s.chars().count();
            prop_assert_eq!(n.offset_map.len(), n.text.chars().count());
            prop_assert!(n.offset_map.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(n.offset_map.iter().all(|&i| i < raw_len));
        }
    }
}
