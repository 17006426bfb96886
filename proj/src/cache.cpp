#include "xfree/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "xfree/copies.hpp"
#include "xfree/error.hpp"

namespace xfree {

namespace fs = std::filesystem;

std::string default_cache_dir() {
  if (const char* env = std::getenv("XFREE_CACHE"); env && *env) return env;
  return ".xfree_cache";
}

namespace {

std::mutex& process_lock() {
  static std::mutex m;
  return m;
}

class DirLock {
 public:
  explicit DirLock(const std::string& dir) : guard_(process_lock()) {
    const std::string path = dir + "/rx_cache.lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) throw PreconditionError("cannot open cache lock '" + path + "'");
    ::flock(fd_, LOCK_EX);
  }
  ~DirLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  std::lock_guard<std::mutex> guard_;
  int fd_ = -1;
};

void write_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw PreconditionError("cannot write '" + tmp + "'");
    out << text;
  }
  fs::rename(tmp, path);
}

std::string record_line(const RNumberRecord& r) {
  std::ostringstream os;
  os << r.pattern_id << ' ' << r.n << ' ' << r.lower << ' ' << r.upper << ' ' << (r.exact ? 1 : 0) << ' '
     << to_string(r.provenance) << '\n';
  return os.str();
}

bool is_hash(const std::string& s) {
  if (s.size() != 32) return false;
  for (char c : s)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

std::optional<RNumberRecord> parse_line(const std::string& line, std::string& why) {
  std::istringstream in(line);
  RNumberRecord r;
  std::string hash, prov, extra;
  long long n = 0;
  unsigned long long lower = 0, upper = 0;
  int exact = -1;
  if (!(in >> hash >> n >> lower >> upper >> exact >> prov)) {
    why = "expected '<hash> <n> <lower> <upper> <exact> <provenance>'";
    return std::nullopt;
  }
  if (in >> extra) {
    why = "trailing fields";
    return std::nullopt;
  }
  if (!is_hash(hash)) {
    why = "bad pattern hash";
    return std::nullopt;
  }
  if (n < 1 || (exact != 0 && exact != 1)) {
    why = "bad n or exact flag";
    return std::nullopt;
  }
  if (lower > upper) {
    why = "lower bound exceeds upper bound";
    return std::nullopt;
  }
  if (exact == 1 && lower != upper) {
    why = "exact record with lower != upper";
    return std::nullopt;
  }
  try {
    r.provenance = parse_provenance(prov);
  } catch (const Error&) {
    why = "unknown provenance '" + prov + "'";
    return std::nullopt;
  }
  r.pattern_id = hash;
  r.n = n;
  r.lower = lower;
  r.upper = upper;
  r.exact = exact == 1;
  return r;
}

std::optional<Pattern> read_pattern(const std::string& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    return normalize(load_pattern(path));
  } catch (const Error&) {
    return std::nullopt;
  }
}

void demote(RNumberRecord& r, std::optional<int> d) {
  r.lower = 0;
  r.upper = std::numeric_limits<std::uint64_t>::max();
  if (d) {
    try {
      r.upper = checked_power(r.n, *d);
    } catch (const Error&) {
    }
  }
  r.exact = false;
  r.witness.reset();
}

CacheReport roundtrip_unlocked(const RCache& cache) {
  CacheReport rep;
  std::map<std::pair<std::string, std::int64_t>, RNumberRecord> merged;
  std::ifstream in(cache.index_path(), std::ios::binary);
  std::string line;
  int line_no = 0;
  while (in && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ++rep.lines;
    std::string why;
    auto rec = parse_line(line, why);
    if (!rec) {
      rep.corrupt.push_back("line " + std::to_string(line_no) + ": " + why);
      continue;
    }
    auto key = std::make_pair(rec->pattern_id, rec->n);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, *rec);
      continue;
    }
    ++rep.merged_duplicates;
    RNumberRecord& m = it->second;
    if (rec->lower > m.lower || (rec->exact && !m.exact)) m.provenance = rec->provenance;
    m.lower = std::max(m.lower, rec->lower);
    m.upper = std::min(m.upper, rec->upper);
    m.exact = m.lower == m.upper;
  }

  std::map<std::string, std::optional<Pattern>> patterns;
  for (auto& [key, r] : merged) {
    const std::string id = r.pattern_id;
    auto pit = patterns.find(id);
    if (pit == patterns.end()) pit = patterns.emplace(id, read_pattern(cache.pattern_path(id))).first;
    const std::optional<Pattern>& pat = pit->second;
    const std::string label = id + " n=" + std::to_string(r.n);
    std::optional<int> d;
    if (pat) d = pat->dim();

    if (!pat || pattern_hash(*pat) != id) {
      rep.demoted.push_back(label + ": pattern file missing or does not match its hash");
      demote(r, d);
      continue;
    }
    if (r.lower > r.upper) {
      rep.demoted.push_back(label + ": merged bounds are inconsistent");
      demote(r, d);
      continue;
    }
    const std::string wpath = cache.witness_path(id, r.n);
    if (!fs::exists(wpath)) continue;
    try {
      GridSet w = load_grid_set(wpath);
      if (w.side() != r.n || w.dim() != pat->dim()) throw PreconditionError("witness grid does not match");
      if (!is_x_free(w, *pat)) throw PreconditionError("witness contains a copy of the pattern");
      if (w.size() < r.lower) throw PreconditionError("witness is smaller than the lower bound");
      r.witness = std::move(w);
    } catch (const Error& e) {
      rep.demoted.push_back(label + ": " + e.what());
      demote(r, d);
    }
  }
  for (auto& [key, r] : merged) rep.records.push_back(std::move(r));
  return rep;
}

}  // namespace

RCache::RCache(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (!fs::is_directory(dir_)) throw PreconditionError("cache directory '" + dir_ + "' is not usable");
}

std::string RCache::index_path() const { return dir_ + "/rx_cache.txt"; }
std::string RCache::pattern_path(const std::string& hash) const { return dir_ + "/" + hash + ".pattern"; }
std::string RCache::witness_path(const std::string& hash, std::int64_t n) const {
  return dir_ + "/" + hash + "_" + std::to_string(n) + ".witness";
}

bool RCache::append(const Pattern& p, const RNumberRecord& rec) {
  const Pattern canon = normalize(p);
  const std::string id = pattern_hash(canon);
  if (!rec.pattern_id.empty() && rec.pattern_id != id) throw PreconditionError("record belongs to a different pattern");
  if (rec.lower > rec.upper) return false;
  if (rec.witness && !verify_witness(*rec.witness, canon, rec.witness->size())) return false;
  if (rec.witness && rec.witness->size() < rec.lower) return false;

  RNumberRecord out = rec;
  out.pattern_id = id;
  DirLock lock(dir_);
  if (!fs::exists(pattern_path(id))) write_atomically(pattern_path(id), canon.to_text());
  if (out.witness) {
    const std::string wpath = witness_path(id, out.n);
    bool replace = true;
    if (fs::exists(wpath)) {
      try {
        const GridSet old = load_grid_set(wpath);
        replace = !(old.side() == out.n && old.dim() == canon.dim() && old.size() >= out.witness->size() &&
                    is_x_free(old, canon));
      } catch (const Error&) {
      }
    }
    if (replace) write_atomically(wpath, grid_set_text(*out.witness));
  }
  std::ofstream idx(index_path(), std::ios::binary | std::ios::app);
  if (!idx) throw PreconditionError("cannot append to '" + index_path() + "'");
  idx << record_line(out);
  return static_cast<bool>(idx);
}

std::optional<RNumberRecord> RCache::lookup(const Pattern& p, std::int64_t n) const {
  const std::string id = pattern_hash(normalize(p));
  for (auto& r : records())
    if (r.pattern_id == id && r.n == n) return r;
  return std::nullopt;
}

std::vector<RNumberRecord> RCache::records() const {
  if (!fs::exists(index_path())) return {};
  DirLock lock(dir_);
  return roundtrip_unlocked(*this).records;
}

CacheReport cache_roundtrip(const std::string& dir, bool rewrite) {
  if (!fs::is_directory(dir)) throw PreconditionError("cache directory '" + dir + "' does not exist");
  RCache cache(dir);
  DirLock lock(dir);
  CacheReport rep = roundtrip_unlocked(cache);
  if (rewrite) {
    std::string text;
    for (const auto& r : rep.records) text += record_line(r);
    write_atomically(cache.index_path(), text);
  }
  return rep;
}

std::string cache_report_text(const CacheReport& rep) {
  std::ostringstream os;
  os << "lines " << rep.lines << '\n'
     << "records " << rep.records.size() << '\n'
     << "merged_duplicates " << rep.merged_duplicates << '\n';
  for (const auto& c : rep.corrupt) os << "corrupt " << c << '\n';
  for (const auto& d : rep.demoted) os << "demoted " << d << '\n';
  for (const auto& r : rep.records)
    os << "record " << r.pattern_id << ' ' << r.n << ' ' << r.lower << ' ' << r.upper << ' ' << (r.exact ? 1 : 0) << ' '
       << to_string(r.provenance) << (r.witness ? " witness" : "") << '\n';
  os << (rep.ok() ? "OK" : "ISSUES") << '\n';
  return os.str();
}

}  // namespace xfree
