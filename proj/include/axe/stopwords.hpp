// Shipped default English stopword list plus the file loader (one lowercase
// word per line). Override with any list via the CLI.
#pragma once

#include <istream>
#include <sstream>
#include <string>

#include "axe/corpus.hpp"

namespace axe {

inline const StopwordSet &default_stopwords() {
    static const StopwordSet set = {
        "i",       "me",      "my",      "myself",  "we",       "our",     "ours",    "ourselves", "you",
        "your",    "yours",   "yourself", "yourselves", "he",    "him",     "his",     "himself",  "she",
        "her",     "hers",    "herself", "it",      "its",      "itself",  "they",    "them",     "their",
        "theirs",  "themselves", "what", "which",   "who",      "whom",    "this",    "that",     "these",
        "those",   "am",      "is",      "are",     "was",      "were",    "be",      "been",     "being",
        "have",    "has",     "had",     "having",  "do",       "does",    "did",     "doing",    "a",
        "an",      "the",     "and",     "but",     "if",       "or",      "because", "as",       "until",
        "while",   "of",      "at",      "by",      "for",      "with",    "about",   "against",  "between",
        "into",    "through", "during",  "before",  "after",    "above",   "below",   "to",       "from",
        "up",      "down",    "in",      "out",     "on",       "off",     "over",    "under",    "again",
        "further", "then",    "once",    "here",    "there",    "when",    "where",   "why",      "how",
        "all",     "any",     "both",    "each",    "few",      "more",    "most",    "other",    "some",
        "such",    "no",      "nor",     "not",     "only",     "own",     "same",    "so",       "than",
        "too",     "very",    "s",       "t",       "can",      "will",    "just",    "don't",    "should",
        "now",     "isn't",   "wasn't",  "aren't",  "weren't",  "won't",   "wouldn't", "couldn't", "shouldn't",
        "didn't",  "doesn't", "hasn't",  "haven't", "hadn't",   "it's",    "i'm",     "i've",     "i'll",
        "we're",   "we've",   "they're", "you're",  "you've",   "he's",    "she's",   "that's",   "there's",
        "what's",  "let's",
    };
    return set;
}

// One lowercase word per line; blank lines and '#' comments ignored.
inline StopwordSet parse_stopwords(std::istream &in) {
    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        set.insert(line);
    }
    return set;
}

inline StopwordSet parse_stopwords(const std::string &bytes) {
    std::istringstream in(bytes);
    return parse_stopwords(in);
}

}  // namespace axe
