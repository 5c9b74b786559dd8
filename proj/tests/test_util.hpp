#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "tempdiff/instance.hpp"

namespace tempdiff::testing {

inline std::string source_dir() {
#ifdef TEMPDIFF_SOURCE_DIR
    return TEMPDIFF_SOURCE_DIR;
#else
    return ".";
#endif
}

inline std::string fixture_path(const std::string& name) {
    return source_dir() + "/fixtures/" + name;
}

inline std::string prompts_dir() { return source_dir() + "/prompts"; }

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("tempdiff_" + tag + "_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::filesystem::path path() const { return path_; }

    std::string write_file(const std::string& name, const std::string& content) {
        auto file = path_ / name;
        std::ofstream out(file);
        out << content;
        return file.string();
    }

private:
    std::filesystem::path path_;
};

inline DiffInstance make_diff_instance(
    const std::string& id = "d-1",
    Relation direction = Relation::before) {
    DiffInstance inst;
    inst.id = id;
    inst.context = "The kettle whistled on the stove. Ana poured two cups. "
                   "The kitchen smelled of mint.";
    inst.pair = {"Ana picked the tea leaves", "Ana poured two cups"};
    inst.additional_sentence = "Ana kept a small herb garden by the window.";
    inst.direction = direction;
    inst.explanation = "A gardener would have picked her own leaves before "
                       "brewing with them.";
    inst.split = Split::train;
    return inst;
}

inline HardInstance make_hard_instance(const std::string& id = "h-1",
                                       Relation gold = Relation::before) {
    HardInstance inst;
    inst.id = id;
    inst.context = "The alarm rang at six. Jo laced up her shoes. "
                   "The park was still dark.";
    inst.pair = {"Jo decided to go running", "Jo laced up her shoes"};
    inst.gold = gold;
    inst.source = Source::tracie;
    inst.split = Split::train;
    return inst;
}

}  // namespace tempdiff::testing
