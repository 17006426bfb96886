#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xfree/extremal.hpp"
#include "xfree/pattern.hpp"

namespace xfree {

// XFREE_CACHE if set, otherwise ".xfree_cache".
std::string default_cache_dir();

// On-disk store of r_X(n) bounds. Layout inside the directory:
//   rx_cache.txt            "<hash> <n> <lower> <upper> <exact 0|1> <provenance>" per line
//   <hash>.pattern          the normalized pattern
//   <hash>_<n>.witness      largest known X-free witness, grid-set text format
class RCache {
 public:
  explicit RCache(std::string dir);

  const std::string& dir() const noexcept { return dir_; }
  std::string index_path() const;
  std::string pattern_path(const std::string& hash) const;
  std::string witness_path(const std::string& hash, std::int64_t n) const;

  // Appends under the cache lock. A record whose witness fails verification
  // is rejected and nothing is written; returns whether it was stored.
  bool append(const Pattern& p, const RNumberRecord& rec);

  // Merged, verified view of the bounds for (p, n).
  std::optional<RNumberRecord> lookup(const Pattern& p, std::int64_t n) const;
  std::vector<RNumberRecord> records() const;

 private:
  std::string dir_;
};

struct CacheReport {
  std::size_t lines = 0;
  std::size_t merged_duplicates = 0;
  std::vector<std::string> corrupt;  // "line N: reason"
  std::vector<std::string> demoted;  // "<hash> n=<n>: reason"
  std::vector<RNumberRecord> records;  // one per (pattern, n), tightest bounds
  bool ok() const noexcept { return corrupt.empty() && demoted.empty(); }
};

// Re-reads and re-verifies every record. With `rewrite`, the index is
// replaced by the merged records.
CacheReport cache_roundtrip(const std::string& dir, bool rewrite = false);

std::string cache_report_text(const CacheReport& report);

}  // namespace xfree
