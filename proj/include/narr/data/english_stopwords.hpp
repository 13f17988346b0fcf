#pragma once

// Generated by tools/embed_wordlists.py from data/; keep in sync (checked by tests).

#include <array>
#include <string_view>

namespace narr::data {

inline constexpr std::array<std::string_view, 172> kEnglishStopwords = {
    "a", "about", "above", "after", "again", "against", "ain", "all", "also", "am", "amp", "an",
    "and", "any", "are", "aren", "as", "at", "be", "because", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "could", "couldn", "d", "did", "didn", "do", "does",
    "doesn", "doing", "don", "down", "during", "each", "few", "for", "from", "further", "get",
    "got", "had", "hadn", "has", "hasn", "have", "haven", "having", "he", "her", "here", "hers",
    "herself", "hes", "him", "himself", "his", "how", "i", "if", "im", "in", "into", "is", "isn",
    "it", "its", "itself", "ive", "just", "lets", "ll", "m", "ma", "me", "mightn", "more", "most",
    "mustn", "my", "myself", "needn", "no", "nor", "not", "now", "o", "of", "off", "on", "once",
    "one", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "re", "rt", "s",
    "same", "shan", "she", "shes", "should", "shouldn", "so", "some", "such", "t", "than", "that",
    "thats", "the", "their", "theirs", "them", "themselves", "then", "there", "theres", "these",
    "they", "this", "those", "through", "to", "too", "under", "until", "up", "us", "ve", "very",
    "via", "was", "wasn", "we", "were", "weren", "what", "whats", "when", "where", "which", "while",
    "who", "whom", "why", "will", "with", "won", "would", "wouldn", "y", "you", "your", "youre",
    "yours", "yourself", "yourselves",
};

}  // namespace narr::data
