#include "xfree/r_provider.hpp"

#include "xfree/error.hpp"

namespace xfree {

RProvider::RProvider(Pattern p) : pattern_(normalize(p)) {}

void RProvider::add_record(const RNumberRecord& rec) {
  if (!rec.exact) return;
  exact_[rec.n] = RValue{rec.lower, rec.provenance, true};
}

void RProvider::add_exact(std::int64_t n, std::uint64_t value, Provenance prov) { exact_[n] = RValue{value, prov, true}; }

void RProvider::enable_behrend(LiftOptions options) { behrend_ = options; }

void RProvider::set_override(std::int64_t n, std::uint64_t value) { fixed_[n] = value; }

std::optional<RValue> RProvider::find(std::int64_t n) const {
  if (auto it = exact_.find(n); it != exact_.end()) return it->second;
  if (behrend_ && n >= 1) {
    auto it = behrend_memo_.find(n);
    if (it == behrend_memo_.end()) {
      const LiftCertificate c = behrend_lift(pattern_, n, *behrend_);
      if (c.verification_run && !c.verified) throw std::logic_error("Behrend construction failed verification");
      it = behrend_memo_.emplace(n, c.set.size()).first;
    }
    return RValue{it->second, Provenance::Behrend, false};
  }
  if (auto it = fixed_.find(n); it != fixed_.end()) return RValue{it->second, Provenance::User, false};
  if (override_)
    if (auto v = override_(n)) return RValue{*v, Provenance::User, false};
  return std::nullopt;
}

RValue RProvider::get(std::int64_t n) const {
  if (auto v = find(n)) return *v;
  throw PreconditionError("no r-value available for n = " + std::to_string(n));
}

}  // namespace xfree
