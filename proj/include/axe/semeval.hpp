// SemEval-2014 ABSA XML reader:
//   sentences/sentence[@id]/text + aspectCategories/aspectCategory[@category]
// Category attributes are mapped onto the gold set; polarity and aspect-term
// spans are ignored.
#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "axe/corpus.hpp"

namespace axe {

inline std::vector<Sentence> parse_semeval_xml(const std::string &xml_bytes, const StopwordSet &stopwords) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(xml_bytes);
    try {
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error &e) {
        throw std::invalid_argument("semeval xml: parse error at line " + std::to_string(e.line()) + ": " +
                                    e.message());
    }
    const auto root = tree.get_child_optional("sentences");
    if (!root) throw std::invalid_argument("semeval xml: missing <sentences> root element");

    std::vector<Sentence> out;
    int index = 0;
    for (const auto &[tag, node] : *root) {
        if (tag != "sentence") continue;
        ++index;
        Sentence s;
        s.id = node.get<std::string>("<xmlattr>.id", "s" + std::to_string(index));
        s.text = node.get<std::string>("text", "");
        s.tokens = tokenize(s.text, stopwords);
        if (const auto cats = node.get_child_optional("aspectCategories")) {
            std::vector<GoldCategory> distinct;
            for (const auto &[ctag, cnode] : *cats) {
                if (ctag != "aspectCategory") continue;
                const auto raw = cnode.get_optional<std::string>("<xmlattr>.category");
                if (!raw)
                    throw std::invalid_argument("semeval xml: sentence " + s.id +
                                                ": aspectCategory without category attribute");
                GoldCategory cat;
                try {
                    cat = category_from_string(*raw);
                } catch (const std::invalid_argument &e) {
                    throw std::invalid_argument("semeval xml: sentence " + s.id + ": " + e.what());
                }
                if (std::find(distinct.begin(), distinct.end(), cat) == distinct.end()) distinct.push_back(cat);
            }
            if (!distinct.empty()) {
                s.gold = distinct.front();
                s.aspect_count = static_cast<int>(distinct.size());
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace axe
