// Pipeline driver: ingest -> train-embeddings -> train-abae / run-cat ->
// predict-abae -> ensemble-rule -> evaluate, plus top-words and gen-synthetic.
// Every command persists its artifacts with a sidecar manifest; exit codes are
// 0 success, 1 validation error, 2 runtime error.
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "axe/abae.hpp"
#include "axe/cat.hpp"
#include "axe/corpus.hpp"
#include "axe/embeddings.hpp"
#include "axe/ensembles.hpp"
#include "axe/evaluation.hpp"
#include "axe/jsonl.hpp"
#include "axe/manifest.hpp"
#include "axe/semeval.hpp"
#include "axe/stopwords.hpp"
#include "axe/synthetic.hpp"

namespace {

using namespace axe;

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_f6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string &joined) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
    };
    for (char c : joined) {
        if (c == ',')
            flush();
        else if (!std::isspace(static_cast<unsigned char>(c)))
            cur.push_back(c);
    }
    flush();
    return out;
}

StopwordSet load_stopword_file(const std::string &path) {
    if (path.empty()) return default_stopwords();
    return parse_stopwords(read_file(path));
}

std::vector<Sentence> load_corpus(const std::string &path, const StopwordSet &stopwords) {
    std::vector<Sentence> sentences;
    try {
        sentences = parse_jsonl(read_file(path), stopwords);
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument("\"" + path + "\": " + e.what());
    }
    if (sentences.empty()) throw std::invalid_argument("\"" + path + "\": empty corpus");
    return sentences;
}

EmbeddingMatrix load_embedding_file(const std::string &path) {
    try {
        return load_text(read_file(path));
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument("\"" + path + "\": " + e.what());
    }
}

// Re-keys token ids against the embedding vocabulary, dropping unknown words.
long long attach_against_embeddings(std::vector<Sentence> &sentences, const EmbeddingMatrix &E) {
    const long long dropped = attach_token_ids(sentences, [&](const std::string &w) {
        auto it = E.index.find(w);
        return it == E.index.end() ? -1 : it->second;
    });
    const bool any = std::any_of(sentences.begin(), sentences.end(),
                                 [](const Sentence &s) { return !s.token_ids.empty(); });
    if (!any)
        throw std::invalid_argument("corpus shares no vocabulary with the embeddings; "
                                    "were they trained on a different corpus?");
    return dropped;
}

// {"id": str, "category": str} per line; extra fields are ignored.
std::vector<std::pair<std::string, GoldCategory>> parse_category_jsonl(const std::string &bytes,
                                                                       const std::string &what) {
    std::vector<std::pair<std::string, GoldCategory>> out;
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
        const std::string where = what + " line " + std::to_string(line_no) + ": ";
        try {
            const nlohmann::json obj = nlohmann::json::parse(line);
            out.emplace_back(obj.at("id").get<std::string>(),
                             category_from_string(obj.at("category").get<std::string>()));
        } catch (const nlohmann::json::exception &e) {
            throw std::invalid_argument(where + e.what());
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument(where + e.what());
        }
    }
    return out;
}

std::vector<std::pair<std::string, PriorLabel>> load_prior_file(const std::string &path) {
    try {
        return parse_prior_jsonl(read_file(path));
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument("\"" + path + "\": " + e.what());
    }
}

struct SeedWordOpts {
    std::string food = "food";
    std::string staff = "staff";
    std::string ambience = "ambience";

    void add_flags(CLI::App *cmd) {
        cmd->add_option("--food-seeds", food, "comma-separated Food seed words");
        cmd->add_option("--staff-seeds", staff, "comma-separated Staff seed words");
        cmd->add_option("--ambience-seeds", ambience, "comma-separated Ambience seed words");
    }

    CatConfig to_cat_config() const {
        CatConfig config;
        config.food_seeds = split_csv(food);
        config.staff_seeds = split_csv(staff);
        config.ambience_seeds = split_csv(ambience);
        if (config.food_seeds.empty() || config.staff_seeds.empty() ||
            config.ambience_seeds.empty())
            throw std::invalid_argument("every label needs at least one seed word");
        return config;
    }
};

// ---------------------------------------------------------------- ingest ---

struct IngestOpts {
    std::vector<std::string> inputs;
    std::string format = "semeval";
    bool single_aspect = false;
    std::string stopwords;
    int min_count = 10;
    std::string out_dir = ".";
};

void run_ingest(const IngestOpts &opt) {
    const StageTimer timer;
    const StopwordSet stopwords = load_stopword_file(opt.stopwords);

    RunManifest manifest;
    manifest.command = "ingest";
    manifest.config = {{"format", opt.format},
                       {"single_aspect", opt.single_aspect},
                       {"min_count", opt.min_count},
                       {"stopwords", opt.stopwords}};

    std::vector<Sentence> sentences;
    for (const std::string &path : opt.inputs) {
        const std::string bytes = read_file(path);
        manifest.add_input(path, bytes);
        std::vector<Sentence> part;
        try {
            part = opt.format == "semeval" ? parse_semeval_xml(bytes, stopwords)
                                           : parse_jsonl(bytes, stopwords);
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("\"" + path + "\": " + e.what());
        }
        sentences.insert(sentences.end(), part.begin(), part.end());
    }
    const long long parsed = std::ssize(sentences);
    if (parsed == 0) throw std::invalid_argument("ingest: no sentences found in the input");

    std::unordered_set<std::string> ids;
    for (const auto &s : sentences)
        if (!ids.insert(s.id).second)
            throw std::invalid_argument("ingest: duplicate sentence id \"" + s.id +
                                        "\" across inputs");

    long long dropped_multi = 0;
    if (opt.single_aspect) {
        std::vector<Sentence> kept = filter_single_aspect(sentences);
        dropped_multi = parsed - std::ssize(kept);
        sentences = std::move(kept);
        if (sentences.empty())
            throw std::invalid_argument("ingest: every sentence was multi-aspect");
    }

    const Vocabulary vocab = build_vocab(sentences, opt.min_count);
    const long long dropped_tokens = attach_token_ids(sentences, vocab);

    const std::string corpus_path = opt.out_dir + "/corpus.jsonl";
    const std::string vocab_path = opt.out_dir + "/vocab.tsv";
    const std::string corpus_bytes = to_jsonl(sentences);
    std::string vocab_bytes;
    for (int i = 0; i < vocab.size(); ++i)
        vocab_bytes += vocab.words[i] + "\t" + std::to_string(vocab.counts[i]) + "\n";
    write_file(corpus_path, corpus_bytes);
    write_file(vocab_path, vocab_bytes);
    manifest.add_output(corpus_path, corpus_bytes);
    manifest.add_output(vocab_path, vocab_bytes);
    manifest.timings_s["ingest"] = timer.seconds();
    write_manifest(corpus_path, manifest);

    std::cout << "parsed " << parsed << " sentences\n";
    if (opt.single_aspect) std::cout << "dropped " << dropped_multi << " multi-aspect sentences\n";
    std::cout << "kept " << sentences.size() << " sentences\n"
              << "vocabulary: " << vocab.size() << " words (min count " << opt.min_count << ")\n"
              << "dropped " << dropped_tokens << " below-threshold tokens\n"
              << "wrote " << corpus_path << "\n"
              << "wrote " << vocab_path << "\n";
}

// ------------------------------------------------------- train-embeddings ---

struct TrainEmbOpts {
    std::string corpus;
    std::string out = "embeddings.txt";
    std::string stopwords;
    SgnsConfig config;
    int min_count = 10;
};

void run_train_embeddings(const TrainEmbOpts &opt) {
    const StageTimer timer;
    const StopwordSet stopwords = load_stopword_file(opt.stopwords);
    const std::string corpus_bytes = read_file(opt.corpus);
    std::vector<Sentence> sentences = load_corpus(opt.corpus, stopwords);

    const Vocabulary vocab = build_vocab(sentences, opt.min_count);
    attach_token_ids(sentences, vocab);

    std::vector<double> epoch_loss;
    const EmbeddingMatrix E = train_sgns(sentences, vocab, opt.config, &epoch_loss);
    const std::string emb_bytes = save_text(E);
    write_file(opt.out, emb_bytes);

    RunManifest manifest;
    manifest.command = "train-embeddings";
    manifest.config = {{"dim", opt.config.dim},         {"window", opt.config.window},
                       {"negatives", opt.config.negatives}, {"epochs", opt.config.epochs},
                       {"learning_rate", opt.config.learning_rate}, {"seed", opt.config.seed},
                       {"min_count", opt.min_count}};
    manifest.add_input(opt.corpus, corpus_bytes);
    manifest.add_output(opt.out, emb_bytes);
    manifest.timings_s["train"] = timer.seconds();
    write_manifest(opt.out, manifest);

    std::cout << "vocabulary: " << vocab.size() << " words, dim " << opt.config.dim << "\n";
    for (size_t i = 0; i < epoch_loss.size(); ++i)
        std::cout << "epoch " << i + 1 << ": mean pair loss " << fmt_f6(epoch_loss[i]) << "\n";
    std::cout << "wrote " << opt.out << "\n";
}

// ------------------------------------------------------------ train-abae ---

struct TrainAbaeOpts {
    std::string corpus;
    std::string embeddings;
    std::string out = "model.bin";
    std::string loss_csv;  // defaults to <out>.loss.csv
    std::string anchors;
    std::string stopwords;
    double sigma = 0.1;
    AbaeHyper hyper;
};

void run_train_abae(const TrainAbaeOpts &opt) {
    const StageTimer timer;
    const StopwordSet stopwords = load_stopword_file(opt.stopwords);
    const std::string corpus_bytes = read_file(opt.corpus);
    std::vector<Sentence> sentences = load_corpus(opt.corpus, stopwords);
    const std::string emb_bytes = read_file(opt.embeddings);
    const EmbeddingMatrix E = load_embedding_file(opt.embeddings);
    const long long dropped = attach_against_embeddings(sentences, E);

    RunManifest manifest;
    manifest.command = "train-abae";
    manifest.config = {{"aspects", opt.hyper.k},
                       {"lambda", opt.hyper.lambda},
                       {"negatives", opt.hyper.negatives},
                       {"epochs", opt.hyper.epochs},
                       {"batch_size", opt.hyper.batch_size},
                       {"learning_rate", opt.hyper.learning_rate},
                       {"seed", opt.hyper.seed},
                       {"anchors", opt.anchors},
                       {"sigma", opt.sigma}};
    manifest.add_input(opt.corpus, corpus_bytes);
    manifest.add_input(opt.embeddings, emb_bytes);

    AnchorSet anchor_set;
    const bool anchored = !opt.anchors.empty();
    if (anchored) {
        const std::string anchor_bytes = read_file(opt.anchors);
        manifest.add_input(opt.anchors, anchor_bytes);
        std::vector<std::pair<std::string, PriorLabel>> priors;
        try {
            priors = parse_prior_jsonl(anchor_bytes);
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("\"" + opt.anchors + "\": " + e.what());
        }
        anchor_set = build_anchors(priors, sentences, E, opt.sigma);
    }

    const AbaeTrainResult result = train(sentences, E, opt.hyper, anchored ? &anchor_set : nullptr);

    const std::string model_bytes = save_model(result.params, opt.hyper.lambda);
    write_file(opt.out, model_bytes);
    const std::string csv_path = opt.loss_csv.empty() ? opt.out + ".loss.csv" : opt.loss_csv;
    std::string csv = "epoch,mean_loss,mean_j,mean_u,mean_k\n";
    for (size_t i = 0; i < result.history.size(); ++i) {
        const EpochStats &st = result.history[i];
        csv += std::to_string(i + 1) + "," + fmt_g17(st.mean_loss) + "," + fmt_g17(st.mean_j) +
               "," + fmt_g17(st.mean_u) + "," + fmt_g17(st.mean_k) + "\n";
    }
    write_file(csv_path, csv);
    manifest.add_output(opt.out, model_bytes);
    manifest.add_output(csv_path, csv);
    manifest.timings_s["train"] = timer.seconds();
    write_manifest(opt.out, manifest);

    std::cout << "training corpus: " << sentences.size() << " sentences ("
              << result.skipped_empty << " empty after vocabulary filtering, " << dropped
              << " unknown tokens dropped)\n";
    for (size_t i = 0; i < result.history.size(); ++i) {
        const EpochStats &st = result.history[i];
        std::cout << "epoch " << i + 1 << ": loss " << fmt_f6(st.mean_loss) << " (j "
                  << fmt_f6(st.mean_j) << ", u " << fmt_f6(st.mean_u) << ", k "
                  << fmt_f6(st.mean_k) << ")\n";
    }
    std::cout << "wrote " << opt.out << "\n"
              << "wrote " << csv_path << "\n";
}

// ---------------------------------------------------------- predict-abae ---

struct PredictAbaeOpts {
    std::string model;
    std::string corpus;
    std::string embeddings;
    std::string mapping;
    bool auto_map = false;
    std::string stopwords;
    std::string out = "abae-preds.jsonl";
};

void run_predict_abae(const PredictAbaeOpts &opt) {
    const StageTimer timer;
    const StopwordSet stopwords = load_stopword_file(opt.stopwords);
    const std::string model_bytes = read_file(opt.model);
    AbaeParams params;
    try {
        params = load_model(model_bytes).first;
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument("\"" + opt.model + "\": " + e.what());
    }
    const std::string corpus_bytes = read_file(opt.corpus);
    std::vector<Sentence> sentences = load_corpus(opt.corpus, stopwords);
    const std::string emb_bytes = read_file(opt.embeddings);
    const EmbeddingMatrix E = load_embedding_file(opt.embeddings);
    if (params.d() != E.dim())
        throw std::invalid_argument("model dimension " + std::to_string(params.d()) +
                                    " does not match embedding dimension " +
                                    std::to_string(E.dim()));
    attach_against_embeddings(sentences, E);

    std::optional<AspectMapping> mapping;
    if (opt.auto_map) {
        mapping = auto_mapping(params.T, E);
    } else if (!opt.mapping.empty()) {
        try {
            mapping = parse_mapping(read_file(opt.mapping), params.k());
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("\"" + opt.mapping + "\": " + e.what());
        }
    }

    std::string out_bytes;
    long long skipped = 0;
    for (const Sentence &s : sentences) {
        if (s.token_ids.empty()) {
            ++skipped;
            continue;
        }
        const InferResult res = infer(s.token_ids, params, E);
        nlohmann::json obj;
        obj["id"] = s.id;
        obj["aspect"] = res.aspect;
        if (mapping) obj["category"] = to_string(mapping->category_of(res.aspect));
        out_bytes += obj.dump();
        out_bytes += '\n';
    }
    write_file(opt.out, out_bytes);

    RunManifest manifest;
    manifest.command = "predict-abae";
    manifest.config = {{"mapping", opt.mapping}, {"auto_map", opt.auto_map}};
    manifest.add_input(opt.model, model_bytes);
    manifest.add_input(opt.corpus, corpus_bytes);
    manifest.add_input(opt.embeddings, emb_bytes);
    manifest.add_output(opt.out, out_bytes);
    manifest.timings_s["predict"] = timer.seconds();
    write_manifest(opt.out, manifest);

    std::cout << "predicted " << sentences.size() - skipped << " sentences (" << skipped
              << " empty after vocabulary filtering)\n"
              << "wrote " << opt.out << "\n";
}

// --------------------------------------------------------------- run-cat ---

struct RunCatOpts {
    std::string corpus;
    std::string embeddings;
    std::string stopwords;
    std::string out = "priors.jsonl";
    SeedWordOpts seeds;
    double gamma = 0.0;
    int top_n = 200;
};

void run_run_cat(const RunCatOpts &opt) {
    const StageTimer timer;
    const StopwordSet stopwords = load_stopword_file(opt.stopwords);
    const std::string corpus_bytes = read_file(opt.corpus);
    std::vector<Sentence> sentences = load_corpus(opt.corpus, stopwords);
    const std::string emb_bytes = read_file(opt.embeddings);
    const EmbeddingMatrix E = load_embedding_file(opt.embeddings);
    attach_against_embeddings(sentences, E);

    CatConfig config = opt.seeds.to_cat_config();
    config.gamma = opt.gamma;
    config.top_n = opt.top_n;
    const CatModel model = build_cat_model(sentences, E, config);
    const std::vector<PriorPrediction> preds = run_cat(sentences, model, E);

    const std::string out_bytes = to_prior_jsonl(preds);
    write_file(opt.out, out_bytes);

    RunManifest manifest;
    manifest.command = "run-cat";
    manifest.config = {{"food_seeds", opt.seeds.food},
                       {"staff_seeds", opt.seeds.staff},
                       {"ambience_seeds", opt.seeds.ambience},
                       {"gamma", opt.gamma},
                       {"top_n", opt.top_n}};
    manifest.add_input(opt.corpus, corpus_bytes);
    manifest.add_input(opt.embeddings, emb_bytes);
    manifest.add_output(opt.out, out_bytes);
    manifest.timings_s["predict"] = timer.seconds();
    write_manifest(opt.out, manifest);

    std::unordered_map<PriorLabel, long long> histogram;
    for (const auto &p : preds) ++histogram[p.label];
    std::cout << "candidate aspects: " << model.candidates.size() << " nouns\n"
              << "none label word: " << model.none_word << "\n";
    for (PriorLabel label :
         {PriorLabel::Food, PriorLabel::Staff, PriorLabel::Ambience, PriorLabel::None})
        std::cout << to_string(label) << ": " << histogram[label] << "\n";
    std::cout << "wrote " << opt.out << "\n";
}

// --------------------------------------------------------- ensemble-rule ---

struct EnsembleRuleOpts {
    std::string cat;
    std::string abae;
    std::string corpus;
    std::string embeddings;
    std::string stopwords;
    std::string out = "ensemble.jsonl";
    std::string candidates = "nn-adj";
    std::string scope = "food,staff,ambience";
    std::string fallback = "abae-misc";
    SeedWordOpts seeds;
};

void run_ensemble_rule(const EnsembleRuleOpts &opt) {
    const StageTimer timer;
    const StopwordSet stopwords = load_stopword_file(opt.stopwords);
    const std::string corpus_bytes = read_file(opt.corpus);
    std::vector<Sentence> sentences = load_corpus(opt.corpus, stopwords);
    const std::string emb_bytes = read_file(opt.embeddings);
    const EmbeddingMatrix E = load_embedding_file(opt.embeddings);
    attach_against_embeddings(sentences, E);

    const std::string cat_bytes = read_file(opt.cat);
    std::vector<std::pair<std::string, PriorLabel>> cat_preds;
    try {
        cat_preds = parse_prior_jsonl(cat_bytes);
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument("\"" + opt.cat + "\": " + e.what());
    }
    std::vector<std::pair<std::string, GoldCategory>> abae_preds;
    std::string abae_bytes;
    if (!opt.abae.empty()) {
        abae_bytes = read_file(opt.abae);
        abae_preds = parse_category_jsonl(abae_bytes, "\"" + opt.abae + "\"");
    }

    RuleConfig config;
    config.candidate_mode = opt.candidates == "nn" ? CandidateMode::NounsOnly
                                                   : CandidateMode::NounsAndAdjectives;
    config.fallback = opt.fallback == "misc" ? FallbackMode::MiscOnly : FallbackMode::AbaeThenMisc;
    config.scope.clear();
    if (opt.scope != "none")
        for (const std::string &name : split_csv(opt.scope))
            config.scope.push_back(category_from_string(name));

    const CatConfig seed_config = opt.seeds.to_cat_config();
    std::vector<std::pair<GoldCategory, Vector>> label_embs;
    for (GoldCategory category : config.scope) {
        const std::vector<std::string> *words = nullptr;
        if (category == GoldCategory::Food) words = &seed_config.food_seeds;
        if (category == GoldCategory::Staff) words = &seed_config.staff_seeds;
        if (category == GoldCategory::Ambience) words = &seed_config.ambience_seeds;
        if (words) label_embs.emplace_back(category, label_embedding(*words, E));
    }

    const std::vector<EnsemblePrediction> preds =
        rule_ensemble(cat_preds, abae_preds, sentences, E, label_embs, config);
    const std::string out_bytes = to_ensemble_jsonl(preds);
    write_file(opt.out, out_bytes);

    RunManifest manifest;
    manifest.command = "ensemble-rule";
    manifest.config = {{"candidates", opt.candidates},
                       {"scope", opt.scope},
                       {"fallback", opt.fallback},
                       {"food_seeds", opt.seeds.food},
                       {"staff_seeds", opt.seeds.staff},
                       {"ambience_seeds", opt.seeds.ambience}};
    manifest.add_input(opt.cat, cat_bytes);
    if (!opt.abae.empty()) manifest.add_input(opt.abae, abae_bytes);
    manifest.add_input(opt.corpus, corpus_bytes);
    manifest.add_input(opt.embeddings, emb_bytes);
    manifest.add_output(opt.out, out_bytes);
    manifest.timings_s["ensemble"] = timer.seconds();
    write_manifest(opt.out, manifest);

    std::unordered_map<Provenance, long long> histogram;
    for (const auto &p : preds) ++histogram[p.provenance];
    for (Provenance p : {Provenance::Agreement, Provenance::Disambiguated,
                         Provenance::AbaeFallback, Provenance::Miscellaneous})
        std::cout << to_string(p) << ": " << histogram[p] << "\n";
    std::cout << "wrote " << opt.out << "\n";
}

// -------------------------------------------------------------- evaluate ---

struct EvaluateOpts {
    std::string preds;
    std::string gold;
    std::string stopwords;
    std::string out_text;
    std::string out_json;
    std::string baseline;
};

void run_evaluate(const EvaluateOpts &opt) {
    const StageTimer timer;
    const StopwordSet stopwords = load_stopword_file(opt.stopwords);
    const std::string gold_bytes = read_file(opt.gold);
    const std::vector<Sentence> sentences = load_corpus(opt.gold, stopwords);
    const std::string pred_bytes = read_file(opt.preds);
    const auto pred_pairs = parse_category_jsonl(pred_bytes, "\"" + opt.preds + "\"");

    std::unordered_map<std::string, GoldCategory> pred_by_id;
    for (const auto &[id, category] : pred_pairs)
        if (!pred_by_id.emplace(id, category).second)
            throw std::invalid_argument("\"" + opt.preds + "\": duplicate prediction for id \"" +
                                        id + "\"");
    std::unordered_set<std::string> corpus_ids;
    for (const auto &s : sentences) corpus_ids.insert(s.id);
    for (const auto &[id, category] : pred_pairs)
        if (!corpus_ids.contains(id))
            throw std::invalid_argument("\"" + opt.preds + "\": prediction for unknown id \"" + id +
                                        "\"");

    std::vector<GoldCategory> golds, preds;
    long long unlabeled = 0, missing = 0;
    for (const auto &s : sentences) {
        if (!s.gold) {
            ++unlabeled;
            continue;
        }
        golds.push_back(*s.gold);
        auto it = pred_by_id.find(s.id);
        if (it == pred_by_id.end()) {
            ++missing;
            preds.push_back(GoldCategory::Miscellaneous);
        } else {
            preds.push_back(it->second);
        }
    }
    if (golds.empty())
        throw std::invalid_argument("\"" + opt.gold + "\": no gold-labeled sentences to score");
    const EvalReport report = score(preds, golds);

    std::cout << "scored " << golds.size() << " sentences";
    if (missing > 0) std::cout << " (" << missing << " without predictions -> Miscellaneous)";
    if (unlabeled > 0) std::cout << "; skipped " << unlabeled << " unlabeled";
    std::cout << "\n\n" << format_report(report);

    if (!opt.baseline.empty()) {
        EvalReport base;
        try {
            base = report_from_json(nlohmann::json::parse(read_file(opt.baseline)));
        } catch (const nlohmann::json::exception &e) {
            throw std::invalid_argument("\"" + opt.baseline + "\": " + e.what());
        }
        const ReportDelta delta = compare_reports(base, report);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%+.2f", delta.macro_f1);
        std::cout << "\nmacro F1 vs baseline: " << buf;
        std::snprintf(buf, sizeof(buf), "%+.2f", delta.weighted_f1);
        std::cout << "\nweighted F1 vs baseline: " << buf << "\n";
    }

    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.config = {{"baseline", opt.baseline}};
    manifest.add_input(opt.preds, pred_bytes);
    manifest.add_input(opt.gold, gold_bytes);
    manifest.timings_s["evaluate"] = timer.seconds();

    std::string primary;
    if (!opt.out_text.empty()) {
        const std::string text = format_report(report);
        write_file(opt.out_text, text);
        manifest.add_output(opt.out_text, text);
        primary = opt.out_text;
        std::cout << "wrote " << opt.out_text << "\n";
    }
    if (!opt.out_json.empty()) {
        const std::string json = report_to_json(report).dump(2) + "\n";
        write_file(opt.out_json, json);
        manifest.add_output(opt.out_json, json);
        primary = opt.out_json;
        std::cout << "wrote " << opt.out_json << "\n";
    }
    if (!primary.empty()) write_manifest(primary, manifest);
}

// ------------------------------------------------------------- top-words ---

struct TopWordsOpts {
    std::string model;
    std::string embeddings;
    int count = 10;
    std::string out;
};

void run_top_words(const TopWordsOpts &opt) {
    const StageTimer timer;
    const std::string model_bytes = read_file(opt.model);
    AbaeParams params;
    try {
        params = load_model(model_bytes).first;
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument("\"" + opt.model + "\": " + e.what());
    }
    const std::string emb_bytes = read_file(opt.embeddings);
    const EmbeddingMatrix E = load_embedding_file(opt.embeddings);
    if (params.d() != E.dim())
        throw std::invalid_argument("model dimension " + std::to_string(params.d()) +
                                    " does not match embedding dimension " +
                                    std::to_string(E.dim()));

    const auto words = top_words(params.T, E, opt.count);
    std::string text;
    for (size_t a = 0; a < words.size(); ++a) {
        text += "aspect " + std::to_string(a) + ":";
        for (const auto &w : words[a]) text += " " + w;
        text += '\n';
    }
    std::cout << text;
    if (!opt.out.empty()) {
        write_file(opt.out, text);
        RunManifest manifest;
        manifest.command = "top-words";
        manifest.config = {{"count", opt.count}};
        manifest.add_input(opt.model, model_bytes);
        manifest.add_input(opt.embeddings, emb_bytes);
        manifest.add_output(opt.out, text);
        manifest.timings_s["top-words"] = timer.seconds();
        write_manifest(opt.out, manifest);
        std::cout << "wrote " << opt.out << "\n";
    }
}

// --------------------------------------------------------- gen-synthetic ---

struct GenSyntheticOpts {
    std::string out_dir = ".";
    SyntheticConfig config;
};

void run_gen_synthetic(const GenSyntheticOpts &opt) {
    const StageTimer timer;
    const SyntheticCorpus corpus = generate_synthetic(opt.config);
    const std::string corpus_path = opt.out_dir + "/corpus.jsonl";
    const std::string bytes = to_jsonl(corpus.sentences);
    write_file(corpus_path, bytes);

    RunManifest manifest;
    manifest.command = "gen-synthetic";
    manifest.config = {{"topic_vocab", opt.config.topic_vocab},
                       {"sentences", opt.config.n_sentences},
                       {"min_len", opt.config.min_len},
                       {"max_len", opt.config.max_len},
                       {"noise", opt.config.noise},
                       {"seed", opt.config.seed}};
    manifest.add_output(corpus_path, bytes);
    manifest.timings_s["generate"] = timer.seconds();
    write_manifest(corpus_path, manifest);

    std::cout << "generated " << corpus.sentences.size() << " sentences over 3 topics ("
              << corpus.vocab.size() << " vocabulary words)\n"
              << "wrote " << corpus_path << "\n";
}

void add_stopword_flag(CLI::App *cmd, std::string &target) {
    cmd->add_option("--stopwords", target,
                    "stopword list file, one word per line (default: built-in English list)");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"unsupervised aspect extraction pipeline"};
    app.require_subcommand(1);
    app.set_config("--config", "", "config file; command-line flags win");
    app.failure_message(CLI::FailureMessage::help);

    auto ingest = std::make_shared<IngestOpts>();
    CLI::App *cmd = app.add_subcommand("ingest", "normalize raw review files into a JSONL corpus");
    cmd->add_option("inputs", ingest->inputs, "input files")->required();
    cmd->add_option("--format", ingest->format, "input format")
        ->check(CLI::IsMember({"semeval", "jsonl"}))
        ->capture_default_str();
    cmd->add_flag("--single-aspect", ingest->single_aspect,
                  "drop sentences annotated with more than one category");
    add_stopword_flag(cmd, ingest->stopwords);
    cmd->add_option("--min-count", ingest->min_count, "vocabulary frequency threshold")
        ->capture_default_str();
    cmd->add_option("-o,--out", ingest->out_dir, "output directory")->capture_default_str();
    cmd->callback([ingest] { run_ingest(*ingest); });

    auto emb = std::make_shared<TrainEmbOpts>();
    cmd = app.add_subcommand("train-embeddings", "train skip-gram word embeddings on a corpus");
    cmd->add_option("--corpus", emb->corpus, "corpus JSONL")->required();
    cmd->add_option("-o,--out", emb->out, "output embedding file")->capture_default_str();
    add_stopword_flag(cmd, emb->stopwords);
    cmd->add_option("--dim", emb->config.dim, "embedding dimension")->capture_default_str();
    cmd->add_option("--window", emb->config.window, "context window")->capture_default_str();
    cmd->add_option("--negatives", emb->config.negatives, "negative samples per pair")
        ->capture_default_str();
    cmd->add_option("--epochs", emb->config.epochs, "training epochs")->capture_default_str();
    cmd->add_option("--lr", emb->config.learning_rate, "initial learning rate")
        ->capture_default_str();
    cmd->add_option("--min-count", emb->min_count, "vocabulary frequency threshold")
        ->capture_default_str();
    cmd->add_option("--seed", emb->config.seed, "random seed")->capture_default_str();
    cmd->callback([emb] { run_train_embeddings(*emb); });

    auto abae = std::make_shared<TrainAbaeOpts>();
    cmd = app.add_subcommand("train-abae", "train the attention autoencoder");
    cmd->add_option("--corpus", abae->corpus, "corpus JSONL")->required();
    cmd->add_option("--embeddings", abae->embeddings, "embedding file")->required();
    cmd->add_option("-o,--out", abae->out, "output model file")->capture_default_str();
    cmd->add_option("--loss-csv", abae->loss_csv, "loss history CSV (default: <out>.loss.csv)");
    cmd->add_option("--anchors", abae->anchors,
                    "prior predictions JSONL enabling anchored regularization");
    cmd->add_option("--sigma", abae->sigma, "anchor penalty weight")->capture_default_str();
    add_stopword_flag(cmd, abae->stopwords);
    cmd->add_option("--aspects", abae->hyper.k, "number of aspects")->capture_default_str();
    cmd->add_option("--lambda", abae->hyper.lambda, "orthogonality penalty weight")
        ->capture_default_str();
    cmd->add_option("--negatives", abae->hyper.negatives, "negative sentences per sample")
        ->capture_default_str();
    cmd->add_option("--epochs", abae->hyper.epochs, "training epochs")->capture_default_str();
    cmd->add_option("--batch-size", abae->hyper.batch_size, "minibatch size")
        ->capture_default_str();
    cmd->add_option("--lr", abae->hyper.learning_rate, "Adam learning rate")
        ->capture_default_str();
    cmd->add_option("--seed", abae->hyper.seed, "random seed")->capture_default_str();
    cmd->callback([abae] { run_train_abae(*abae); });

    auto predict = std::make_shared<PredictAbaeOpts>();
    cmd = app.add_subcommand("predict-abae", "assign the dominant aspect to each sentence");
    cmd->add_option("--model", predict->model, "trained model file")->required();
    cmd->add_option("--corpus", predict->corpus, "corpus JSONL")->required();
    cmd->add_option("--embeddings", predict->embeddings, "embedding file")->required();
    CLI::Option *mapping_opt =
        cmd->add_option("--mapping", predict->mapping, "aspect-to-category mapping file");
    cmd->add_flag("--auto-map", predict->auto_map,
                  "derive the mapping from seed-word embedding similarity")
        ->excludes(mapping_opt);
    add_stopword_flag(cmd, predict->stopwords);
    cmd->add_option("-o,--out", predict->out, "output predictions JSONL")->capture_default_str();
    cmd->callback([predict] { run_predict_abae(*predict); });

    auto cat = std::make_shared<RunCatOpts>();
    cmd = app.add_subcommand("run-cat", "run the contrastive-attention prior model");
    cmd->add_option("--corpus", cat->corpus, "corpus JSONL")->required();
    cmd->add_option("--embeddings", cat->embeddings, "embedding file")->required();
    add_stopword_flag(cmd, cat->stopwords);
    cmd->add_option("-o,--out", cat->out, "output prior predictions JSONL")->capture_default_str();
    cat->seeds.add_flags(cmd);
    cmd->add_option("--gamma", cat->gamma, "RBF kernel width (0 means 1/dim)")
        ->capture_default_str();
    cmd->add_option("--top-n", cat->top_n, "candidate aspect vocabulary size")
        ->capture_default_str();
    cmd->callback([cat] { run_run_cat(*cat); });

    auto rule = std::make_shared<EnsembleRuleOpts>();
    cmd = app.add_subcommand("ensemble-rule", "combine prior and autoencoder predictions");
    cmd->add_option("--cat", rule->cat, "prior predictions JSONL")->required();
    cmd->add_option("--abae", rule->abae, "autoencoder predictions JSONL with categories");
    cmd->add_option("--corpus", rule->corpus, "corpus JSONL")->required();
    cmd->add_option("--embeddings", rule->embeddings, "embedding file")->required();
    add_stopword_flag(cmd, rule->stopwords);
    cmd->add_option("-o,--out", rule->out, "output predictions JSONL")->capture_default_str();
    cmd->add_option("--candidates", rule->candidates, "disambiguation candidate tokens")
        ->check(CLI::IsMember({"nn", "nn-adj"}))
        ->capture_default_str();
    cmd->add_option("--scope", rule->scope,
                    "comma-separated aspect categories eligible for disambiguation; "
                    "\"none\" disables it")
        ->capture_default_str();
    cmd->add_option("--fallback", rule->fallback, "handling of out-of-scope conflicts")
        ->check(CLI::IsMember({"abae-misc", "misc"}))
        ->capture_default_str();
    rule->seeds.add_flags(cmd);
    cmd->callback([rule] { run_ensemble_rule(*rule); });

    auto eval = std::make_shared<EvaluateOpts>();
    cmd = app.add_subcommand("evaluate", "score predictions against gold categories");
    cmd->add_option("--preds", eval->preds, "predictions JSONL with categories")->required();
    cmd->add_option("--gold", eval->gold, "gold corpus JSONL")->required();
    add_stopword_flag(cmd, eval->stopwords);
    cmd->add_option("--out-text", eval->out_text, "write the text report here");
    cmd->add_option("--out-json", eval->out_json, "write the JSON report here");
    cmd->add_option("--baseline", eval->baseline, "JSON report to diff against");
    cmd->callback([eval] { run_evaluate(*eval); });

    auto top = std::make_shared<TopWordsOpts>();
    cmd = app.add_subcommand("top-words", "list representative words per aspect");
    cmd->add_option("--model", top->model, "trained model file")->required();
    cmd->add_option("--embeddings", top->embeddings, "embedding file")->required();
    cmd->add_option("-n,--count", top->count, "words per aspect")->capture_default_str();
    cmd->add_option("-o,--out", top->out, "also write the list to this file");
    cmd->callback([top] { run_top_words(*top); });

    auto synth = std::make_shared<GenSyntheticOpts>();
    cmd = app.add_subcommand("gen-synthetic", "generate a 3-topic synthetic corpus");
    cmd->add_option("-o,--out", synth->out_dir, "output directory")->capture_default_str();
    cmd->add_option("--topic-vocab", synth->config.topic_vocab, "words per topic")
        ->capture_default_str();
    cmd->add_option("--sentences", synth->config.n_sentences, "number of sentences")
        ->capture_default_str();
    cmd->add_option("--min-len", synth->config.min_len, "minimum sentence length")
        ->capture_default_str();
    cmd->add_option("--max-len", synth->config.max_len, "maximum sentence length")
        ->capture_default_str();
    cmd->add_option("--noise", synth->config.noise, "probability of an off-topic word")
        ->capture_default_str();
    cmd->add_option("--seed", synth->config.seed, "random seed")->capture_default_str();
    cmd->callback([synth] { run_gen_synthetic(*synth); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
