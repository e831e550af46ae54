#pragma once
/**
 * @file results_store.hpp
 * @brief Directory of immutable JSON/CSV documents.
 *
 * Files are written to a temporary name and renamed into place. Writing a
 * path that already exists succeeds only if the content is identical;
 * anything else is a StoreError, so a completed document never changes.
 */

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "pinngen/serialization.hpp"

namespace pinngen {

class ResultsStore {
 public:
  explicit ResultsStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(const std::filesystem::path& rel) const { return root_ / rel; }

  bool exists(const std::filesystem::path& rel) const;

  Json read_json(const std::filesystem::path& rel) const;
  std::string read_text(const std::filesystem::path& rel) const;

  /// Returns true if the file was created, false if an identical one existed.
  bool write_text(const std::filesystem::path& rel, const std::string& content);
  bool write_json(const std::filesystem::path& rel, const Json& doc);

  /// Names of the entries of a directory, sorted; empty if it does not exist.
  std::vector<std::string> list(const std::filesystem::path& rel_dir) const;

 private:
  std::filesystem::path root_;
  std::mutex write_mutex_;
};

}  // namespace pinngen
