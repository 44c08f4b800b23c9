// SPDX-License-Identifier: Apache-2.0

#include "qasynth/corpus.hpp"

#include <algorithm>

#include "qasynth/jsonl.hpp"
#include "qasynth/text.hpp"

namespace qasynth::corpus {

const IndexedFile* Repository::find(std::string_view path) const {
    for (const auto& f : files) {
        if (f.path == path) return &f;
    }
    return nullptr;
}

const Repository& RepoCorpusIndex::repo(std::string_view id) const {
    for (const auto& r : repos) {
        if (r.id == id) return r;
    }
    throw CorpusError("unknown repository '" + std::string(id) + "'");
}

std::size_t RepoCorpusIndex::file_count() const {
    std::size_t n = 0;
    for (const auto& r : repos) n += r.files.size();
    return n;
}

int count_lines(const std::string& contents) {
    if (contents.empty()) return 0;
    int n = static_cast<int>(std::count(contents.begin(), contents.end(), '\n'));
    return contents.back() == '\n' ? n : n + 1;
}

void RepoCorpusIndex::validate(const LanguageTable& languages) const {
    for (const auto& r : repos) {
        for (const auto& f : r.files) {
            const auto full = r.root / f.path;
            if (!fs::is_regular_file(full)) throw CorpusError("indexed file missing: " + full.string());
            if (fs::file_size(full) == 0) throw CorpusError("indexed file empty: " + full.string());
            if (languages.language_for_path(f.path) != f.language) {
                throw CorpusError("language tag '" + f.language + "' does not match extension of " + full.string());
            }
        }
    }
}

Repository index_repository(const fs::path& root, std::string id, const LanguageTable& languages) {
    if (!fs::is_directory(root)) throw CorpusError("repository root is not a directory: " + root.string());
    Repository repo{std::move(id), fs::absolute(root), {}};
    auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
    for (auto entry = fs::begin(it); entry != fs::end(it); ++entry) {
        const auto name = entry->path().filename().string();
        if (entry->is_directory() && name.starts_with('.')) {
            entry.disable_recursion_pending();
            continue;
        }
        if (!entry->is_regular_file() || entry->file_size() == 0) continue;
        const auto rel = fs::relative(entry->path(), root).generic_string();
        const auto lang = languages.language_for_path(rel);
        if (lang == kUnknownLanguage) continue;
        const int lines = count_lines(io::read_file(entry->path()));
        if (lines == 0) continue;
        repo.files.push_back({rel, lang, lines});
    }
    std::sort(repo.files.begin(), repo.files.end(),
              [](const IndexedFile& a, const IndexedFile& b) { return a.path < b.path; });
    return repo;
}

RepoCorpusIndex index_directory(const fs::path& dir, const LanguageTable& languages) {
    if (!fs::is_directory(dir)) throw CorpusError("corpus is not a directory: " + dir.string());
    std::vector<fs::path> subdirs;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_directory() && !e.path().filename().string().starts_with('.')) subdirs.push_back(e.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    RepoCorpusIndex idx;
    if (subdirs.empty()) {
        idx.repos.push_back(index_repository(dir, fs::absolute(dir).filename().string(), languages));
    } else {
        for (const auto& s : subdirs) idx.repos.push_back(index_repository(s, s.filename().string(), languages));
    }
    return idx;
}

RepoCorpusIndex load_index(const fs::path& path, const LanguageTable& languages) {
    if (fs::is_directory(path)) return index_directory(path, languages);
    auto idx = io::read_json(path).get<RepoCorpusIndex>();
    // Relative roots are resolved against the index file's directory.
    for (auto& r : idx.repos) {
        if (r.root.is_relative()) r.root = fs::absolute(path).parent_path() / r.root;
    }
    idx.validate(languages);
    return idx;
}

std::vector<std::string> read_lines(const Repository& repo, const IndexedFile& file) {
    return text::split_lines(io::read_file(repo.root / file.path));
}

void to_json(json& j, const RepoCorpusIndex& idx) {
    json repos = json::array();
    for (const auto& r : idx.repos) {
        json files = json::array();
        for (const auto& f : r.files) files.push_back({{"path", f.path}, {"language", f.language}, {"lines", f.lines}});
        repos.push_back({{"id", r.id}, {"root", r.root.generic_string()}, {"files", files}});
    }
    j = json{{"repos", repos}};
}

void from_json(const json& j, RepoCorpusIndex& idx) {
    idx.repos.clear();
    for (const auto& rj : j.at("repos")) {
        Repository r{rj.at("id").get<std::string>(), fs::path(rj.at("root").get<std::string>()), {}};
        for (const auto& fj : rj.at("files")) {
            r.files.push_back({fj.at("path").get<std::string>(), fj.at("language").get<std::string>(),
                               fj.at("lines").get<int>()});
        }
        idx.repos.push_back(std::move(r));
    }
}

}  // namespace qasynth::corpus
