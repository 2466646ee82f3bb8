// JSONL corpus format: {"text": str, "pos": [str]?, "category": str?} one
// object per line. The serializer additionally writes "id" and, for
// multi-aspect sentences, "aspect_count", and parse() accepts both, so a
// parsed corpus round-trips exactly.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "axe/corpus.hpp"

namespace axe {

inline std::vector<Sentence> parse_jsonl(const std::string &bytes, const StopwordSet &stopwords) {
    std::vector<Sentence> out;
    size_t start = 0;
    int line_no = 0;
    while (start <= bytes.size()) {
        size_t end = bytes.find('\n', start);
        if (end == std::string::npos) end = bytes.size();
        std::string line = bytes.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = "jsonl line " + std::to_string(line_no) + ": ";
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error &e) {
            throw std::invalid_argument(where + e.what());
        }
        if (!obj.is_object()) throw std::invalid_argument(where + "expected a JSON object");
        if (!obj.contains("text") || !obj["text"].is_string())
            throw std::invalid_argument(where + "missing required field \"text\"");

        Sentence s;
        s.text = obj["text"].get<std::string>();
        s.id = obj.contains("id") ? obj["id"].get<std::string>() : std::to_string(line_no);
        s.tokens = tokenize(s.text, stopwords);
        if (obj.contains("pos")) {
            if (!obj["pos"].is_array()) throw std::invalid_argument(where + "\"pos\" must be an array of tags");
            const auto &tags = obj["pos"];
            if (tags.size() != s.tokens.size())
                throw std::invalid_argument(where + "pos has " + std::to_string(tags.size()) +
                                            " tags but the text tokenizes to " + std::to_string(s.tokens.size()) +
                                            " tokens");
            for (size_t i = 0; i < s.tokens.size(); ++i)
                s.tokens[i].pos = pos_tag_from_string(tags[i].get<std::string>());
        }
        if (obj.contains("category")) {
            try {
                s.gold = category_from_string(obj["category"].get<std::string>());
            } catch (const std::invalid_argument &e) {
                throw std::invalid_argument(where + e.what());
            }
            s.aspect_count = 1;
        }
        if (obj.contains("aspect_count")) {
            const int n = obj["aspect_count"].get<int>();
            if (n < 0) throw std::invalid_argument(where + "aspect_count must be non-negative");
            s.aspect_count = n;
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline std::string to_jsonl(const std::vector<Sentence> &sentences) {
    std::string out;
    for (const auto &s : sentences) {
        nlohmann::json obj;
        obj["id"] = s.id;
        obj["text"] = s.text;
        const bool all_tagged =
            !s.tokens.empty() && std::all_of(s.tokens.begin(), s.tokens.end(), [](const Token &t) {
                return t.pos.has_value();
            });
        if (all_tagged) {
            nlohmann::json tags = nlohmann::json::array();
            for (const auto &t : s.tokens) tags.push_back(to_string(*t.pos));
            obj["pos"] = std::move(tags);
        }
        if (s.gold) obj["category"] = to_string(*s.gold);
        if (s.aspect_count != (s.gold ? 1 : 0)) obj["aspect_count"] = s.aspect_count;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

}  // namespace axe
