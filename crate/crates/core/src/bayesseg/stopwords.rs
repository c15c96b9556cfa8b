/// English function words plus common spoken-meeting fillers.
pub const ENGLISH: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "ah", "all", "also", "am", "an", "and",
    "any", "are", "aren", "as", "at", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "cannot", "could", "couldn", "d", "did", "didn", "do",
    "does", "doesn", "doing", "don", "down", "during", "each", "eh", "er", "few", "for", "from",
    "further", "gonna", "got", "had", "hadn", "has", "hasn", "have", "haven", "having", "he",
    "her", "here", "hers", "herself", "him", "himself", "his", "hm", "hmm", "how", "i", "if",
    "in", "into", "is", "isn", "it", "its", "itself", "just", "know", "like", "ll", "m", "me",
    "mhm", "mm", "more", "most", "mustn", "my", "myself", "no", "nor", "not", "now", "of", "off",
    "oh", "ok", "okay", "on", "once", "only", "or", "other", "ought", "our", "ours", "ourselves",
    "out", "over", "own", "re", "right", "s", "same", "shan", "she", "should", "shouldn", "so",
    "some", "such", "t", "than", "that", "the", "their", "theirs", "them", "themselves", "then",
    "there", "these", "they", "this", "those", "through", "to", "too", "uh", "uhhuh", "um",
    "under", "until", "up", "ve", "very", "was", "wasn", "we", "well", "were", "weren", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will", "with", "won", "would",
    "wouldn", "yeah", "yes", "you", "your", "yours", "yourself", "yourselves",
];

pub fn is_stopword(token: &str) -> bool {
    ENGLISH.binary_search(&token).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_is_sorted_for_binary_search() {
        assert!(ENGLISH.windows(2).all(|w| w[0] < w[1]));
        assert!(is_stopword("the"));
        assert!(is_stopword("uh"));
        assert!(!is_stopword("transcription"));
    }
}
