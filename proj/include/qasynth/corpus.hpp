// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "qasynth/taxonomy.hpp"

namespace qasynth::corpus {

namespace fs = std::filesystem;

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IndexedFile {
    std::string path;  // relative to the repository root, '/' separated
    std::string language;
    int lines = 0;
};

struct Repository {
    std::string id;
    fs::path root;
    std::vector<IndexedFile> files;

    const IndexedFile* find(std::string_view path) const;
};

/// Source files of local repositories, tagged by language.
struct RepoCorpusIndex {
    std::vector<Repository> repos;

    const Repository& repo(std::string_view id) const;
    std::size_t file_count() const;

    /// Throws CorpusError when a file is missing, empty, or mislabeled.
    void validate(const LanguageTable& languages = LanguageTable::defaults()) const;
};

/// Indexes one repository; files with unmapped extensions are skipped.
Repository index_repository(const fs::path& root, std::string id,
                            const LanguageTable& languages = LanguageTable::defaults());

/// Each immediate subdirectory of `dir` is a repository; a directory with no
/// subdirectories is itself a single repository.
RepoCorpusIndex index_directory(const fs::path& dir, const LanguageTable& languages = LanguageTable::defaults());

/// Loads an index from a JSON file, or builds one when `path` is a directory.
RepoCorpusIndex load_index(const fs::path& path, const LanguageTable& languages = LanguageTable::defaults());

std::vector<std::string> read_lines(const Repository& repo, const IndexedFile& file);

int count_lines(const std::string& contents);

void to_json(json& j, const RepoCorpusIndex& idx);
void from_json(const json& j, RepoCorpusIndex& idx);

}  // namespace qasynth::corpus
