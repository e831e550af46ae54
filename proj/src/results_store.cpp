#include "pinngen/results_store.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "pinngen/error.hpp"

namespace pinngen {

namespace fs = std::filesystem;

ResultsStore::ResultsStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) {
    throw StoreError("cannot create store root " + root_.string() + ": " + ec.message());
  }
}

bool ResultsStore::exists(const fs::path& rel) const {
  std::error_code ec;
  return fs::exists(root_ / rel, ec);
}

std::string ResultsStore::read_text(const fs::path& rel) const {
  std::ifstream in(root_ / rel, std::ios::binary);
  if (!in) throw StoreError("cannot read " + (root_ / rel).string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw StoreError("read error on " + (root_ / rel).string());
  return buf.str();
}

Json ResultsStore::read_json(const fs::path& rel) const {
  const std::string text = read_text(rel);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw StoreError("malformed JSON in " + (root_ / rel).string() + ": " + e.what());
  }
}

bool ResultsStore::write_text(const fs::path& rel, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  std::lock_guard lock(write_mutex_);
  const fs::path target = root_ / rel;
  if (fs::exists(target)) {
    if (read_text(rel) == content) return false;
    throw StoreError("refusing to overwrite " + target.string() + " with different content");
  }
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw StoreError("cannot create " + target.parent_path().string() + ": " + ec.message());

  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp." +
                                               std::to_string(::getpid()) + "." +
                                               std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw StoreError("write error on " + tmp.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw StoreError("cannot move " + tmp.string() + " into place");
  }
  return true;
}

bool ResultsStore::write_json(const fs::path& rel, const Json& doc) {
  return write_text(rel, doc.dump(1) + "\n");
}

std::vector<std::string> ResultsStore::list(const fs::path& rel_dir) const {
  std::vector<std::string> names;
  std::error_code ec;
  const fs::path dir = root_ / rel_dir;
  if (!fs::is_directory(dir, ec)) return names;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (!name.empty() && name.front() != '.') names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace pinngen
