#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "axe/numerics.hpp"

namespace axe {

inline constexpr const char *kToolVersion = "0.1.0";
inline constexpr int kModelFormatVersion = 1;

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open \"" + path + "\" for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Atomic write via tmp + rename so a crash never leaves partial artifacts.
inline void write_file(const std::string &path, const std::string &content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp(path + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open \"" + tmp.string() + "\" for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for \"" + tmp.string() + "\"");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw std::runtime_error("cannot move \"" + tmp.string() + "\" into place: " + ec.message());
}

inline std::string content_digest(const std::string &bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string(buf);
}

// Wall-clock stage timer; manifests record but never compare these fields.
class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct RunManifest {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::map<std::string, std::string> inputs;   // path -> content digest
    std::map<std::string, std::string> outputs;  // path -> content digest
    std::map<std::string, double> timings_s;     // stage -> wall-clock seconds

    void add_input(const std::string &path, const std::string &bytes) {
        inputs[path] = content_digest(bytes);
    }
    void add_output(const std::string &path, const std::string &bytes) {
        outputs[path] = content_digest(bytes);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool"] = {{"name", "axe"}, {"version", kToolVersion}};
        j["command"] = command;
        j["config"] = config;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["timings_s"] = timings_s;
        return j;
    }
};

// Written next to the primary artifact as "<artifact>.manifest.json".
inline void write_manifest(const std::string &primary_output, const RunManifest &manifest) {
    write_file(primary_output + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

}  // namespace axe
