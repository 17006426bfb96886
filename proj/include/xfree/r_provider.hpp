#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

#include "xfree/behrend.hpp"
#include "xfree/extremal.hpp"
#include "xfree/pattern.hpp"

namespace xfree {

struct RValue {
  std::uint64_t value = 0;
  Provenance provenance = Provenance::User;
  bool exact = false;
};

// Source of r_X(n) values. Lookup order: exact records, then the Behrend
// lower bound (if enabled), then the user override.
class RProvider {
 public:
  using Override = std::function<std::optional<std::uint64_t>(std::int64_t)>;

  explicit RProvider(Pattern p);

  void add_record(const RNumberRecord& rec);  // only exact records are kept
  void add_exact(std::int64_t n, std::uint64_t value, Provenance prov = Provenance::Exhaustive);
  void enable_behrend(LiftOptions options = {});
  void set_override(Override fn) { override_ = std::move(fn); }
  void set_override(std::int64_t n, std::uint64_t value);

  std::optional<RValue> find(std::int64_t n) const;
  RValue get(std::int64_t n) const;  // PreconditionError on a miss

  const Pattern& pattern() const noexcept { return pattern_; }

 private:
  Pattern pattern_;
  std::map<std::int64_t, RValue> exact_;
  std::map<std::int64_t, std::uint64_t> fixed_;
  Override override_;
  std::optional<LiftOptions> behrend_;
  mutable std::map<std::int64_t, std::uint64_t> behrend_memo_;
};

}  // namespace xfree
