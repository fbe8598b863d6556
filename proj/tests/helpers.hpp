#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "tf/constructs.hpp"

namespace tftest {

inline std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::string fixture(const std::string& rel) {
    return std::string(TF_FIXTURE_DIR) + "/" + rel;
}

// A loaded grammar + annotation pair. Held by unique_ptr at call sites so
// Program's back-pointers stay valid.
struct Lang {
    tf::Grammar g;
    tf::AnnotationSet ann;
};

inline std::unique_ptr<Lang> load_lang(const std::string& name) {
    auto l = std::make_unique<Lang>();
    l->g = tf::load_grammar(slurp(fixture("grammars/" + name + ".g")));
    l->ann = tf::load_annotations(slurp(fixture("annotations/" + name + ".ann")),
                                  l->g);
    return l;
}

inline tf::Program analyze(const Lang& l, const std::string& src,
                           const std::string& id = "test") {
    return tf::analyze(l.g, l.ann, src, id);
}

// Every fixture program of a language, sorted by filename.
inline std::vector<std::pair<std::string, std::string>> corpus_files(
    const std::string& lang) {
    namespace fs = std::filesystem;
    std::vector<std::pair<std::string, std::string>> out;
    for (const char* sub : {"opt", "seed"}) {
        fs::path dir = fixture("corpus/" + lang + "/" + sub);
        std::vector<fs::path> paths;
        for (auto& e : fs::directory_iterator(dir)) paths.push_back(e.path());
        std::sort(paths.begin(), paths.end());
        for (auto& p : paths) out.emplace_back(p.string(), slurp(p.string()));
    }
    return out;
}

}  // namespace tftest
