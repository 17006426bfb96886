#include "xfree/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "xfree/behrend.hpp"
#include "xfree/cache.hpp"
#include "xfree/container.hpp"
#include "xfree/copies.hpp"
#include "xfree/error.hpp"
#include "xfree/extremal.hpp"
#include "xfree/supersat.hpp"

namespace xfree {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string pattern;
  std::string set_file;
  std::string cache_dir;
  std::string out;
  std::string witness;
  std::string n_range;
  std::string n_list;
  std::string m_rule = "half";
  std::string alpha = "1/2";
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t l0 = kDefaultL0;
  std::int64_t lmax = 1'000'000;
  std::uint64_t seed = 0;
  std::uint64_t samples = 1000;
  std::uint64_t cap = 0;
  std::uint64_t budget = 0;
  std::uint64_t r_override = 0;
  int workers = 1;
  bool all_triples = false;
  bool compact = false;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw PreconditionError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

std::int64_t parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad " + what + " '" + s + "'");
  }
}

std::vector<std::int64_t> n_values(const Config& c) {
  std::vector<std::int64_t> ns;
  if (!c.n_range.empty()) {
    const auto colon = c.n_range.find(':');
    if (colon == std::string::npos) throw UsageError("--n-range expects A:B");
    const auto a = parse_int(c.n_range.substr(0, colon), "--n-range");
    const auto b = parse_int(c.n_range.substr(colon + 1), "--n-range");
    if (a > b) throw UsageError("--n-range start exceeds end");
    for (auto n = a; n <= b; ++n) ns.push_back(n);
  }
  if (!c.n_list.empty()) {
    std::stringstream ss(c.n_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) ns.push_back(parse_int(tok, "--n-list"));
  }
  if (ns.empty() && c.n > 0) ns.push_back(c.n);
  if (ns.empty()) throw UsageError("one of --n, --n-range or --n-list is required");
  for (auto n : ns)
    if (n < 1) throw PreconditionError("n must be positive");
  return ns;
}

std::int64_t single_n(const Config& c) {
  if (c.n < 1) throw UsageError("--n is required");
  return c.n;
}

Pattern load(const Config& c) { return normalize(load_pattern(c.pattern)); }

RCache open_cache(const Config& c) { return RCache(c.cache_dir.empty() ? default_cache_dir() : c.cache_dir); }

GridSet input_set(const Config& c, const Pattern& p) {
  if (!c.set_file.empty()) {
    GridSet a = load_grid_set(c.set_file);
    if (a.dim() != p.dim()) throw PreconditionError("set and pattern dimensions differ");
    return a;
  }
  return GridSet::full(single_n(c), p.dim());
}

SolverOptions solver_options(const Config& c) {
  SolverOptions so;
  so.workers = c.workers;
  if (c.budget) so.node_budget = c.budget;
  return so;
}

RNumberRecord exact_or_solve(const Config& c, RCache& cache, const Pattern& p, std::int64_t n) {
  if (auto hit = cache.lookup(p, n); hit && hit->exact) return *hit;
  RNumberRecord rec = solve_rx_exact(p, n, solver_options(c));
  if (rec.exact) cache.append(p, rec);
  return rec;
}

// Best available r_X(n) record for the sub-grid experiments.
RNumberRecord r_surrogate(const Config& c, RCache& cache, const Pattern& p, std::int64_t n) {
  if (c.r_override) {
    RNumberRecord r;
    r.pattern_id = pattern_hash(p);
    r.n = n;
    r.d = p.dim();
    r.lower = r.upper = c.r_override;
    r.provenance = Provenance::User;
    return r;
  }
  if (auto hit = cache.lookup(p, n)) return *hit;
  if (checked_power(n, p.dim()) <= 256) {
    try {
      SolverOptions so = solver_options(c);
      so.node_budget = std::min<std::uint64_t>(so.node_budget, 20'000'000);
      RNumberRecord rec = solve_rx_exact(p, n, so);
      if (rec.exact) {
        cache.append(p, rec);
        return rec;
      }
    } catch (const BudgetError&) {
    }
  }
  return greedy_lower_bound(p, n, c.seed);
}

void print_setup(std::ostream& err, const SubgridSetup& s) {
  err << "prime_bound " << s.prime_bound << '\n'
      << "primes " << s.primes.size() << '\n'
      << "density_condition " << s.density_condition << '\n'
      << "r_certified " << s.r_certified << '\n'
      << "conditionally_admissible " << s.conditionally_admissible << '\n';
}

int cmd_solve(const Config& c, std::ostream& out, std::ostream& err) {
  const Pattern p = load(c);
  RCache cache = open_cache(c);
  const auto ns = n_values(c);
  std::vector<RNumberRecord> recs;
  for (auto n : ns) recs.push_back(exact_or_solve(c, cache, p, n));
  if (!c.witness.empty() && recs.back().witness) {
    std::ofstream w(c.witness, std::ios::binary | std::ios::trunc);
    write_grid_set(w, *recs.back().witness);
  }
  Output o(c.out, out);
  bool all_exact = true;
  if (ns.size() == 1 && c.n_range.empty() && c.n_list.empty()) {
    const auto& r = recs.front();
    if (r.exact) {
      o.stream() << r.lower << '\n';
    } else {
      err << "budget exhausted: " << r.lower << " <= r <= " << r.upper << '\n';
      all_exact = false;
    }
  } else {
    o.stream() << "n,lower,upper,exact,provenance\n";
    for (const auto& r : recs) {
      o.stream() << r.n << ',' << r.lower << ',' << r.upper << ',' << (r.exact ? 1 : 0) << ',' << to_string(r.provenance)
                 << '\n';
      all_exact = all_exact && r.exact;
    }
  }
  return all_exact ? kExitOk : kExitBudget;
}

int cmd_count(const Config& c, std::ostream& out, std::ostream&) {
  const Pattern p = load(c);
  RCache cache = open_cache(c);
  CountOptions co;
  if (c.cap) co.max_vertices = c.cap;
  if (c.budget) co.node_budget = c.budget;
  const auto ns = n_values(c);
  Output o(c.out, out);
  if (ns.size() == 1 && c.n_range.empty() && c.n_list.empty()) {
    o.stream() << count_xfree_subsets(p, ns[0], co).count << '\n';
    return kExitOk;
  }
  o.stream() << "n,count,log2_count,r_exact,ratio_to_r\n";
  for (auto n : ns) {
    std::optional<std::uint64_t> r;
    if (auto hit = cache.lookup(p, n); hit && hit->exact) r = hit->lower;
    const CountRecord rec = count_xfree_subsets(p, n, co, r);
    o.stream() << n << ',' << rec.count << ',' << format_real(rec.log2_count) << ',' << (r ? std::to_string(*r) : "")
               << ',' << (rec.ratio_to_r ? format_real(*rec.ratio_to_r) : "") << '\n';
  }
  return kExitOk;
}

int cmd_enum(const Config& c, std::ostream& out, std::ostream&) {
  const Pattern p = load(c);
  const auto n = single_n(c);
  Output o(c.out, out);
  auto& os = o.stream();
  os << "r";
  for (int i = 1; i <= p.dim(); ++i) os << ",b" << i;
  os << '\n';
  std::uint64_t rows = 0;
  for_each_copy(p, n, [&](const CopyPlacement& cp) {
    os << cp.ratio;
    for (auto b : cp.base) os << ',' << b;
    os << '\n';
    return c.cap == 0 || ++rows < c.cap;
  });
  return kExitOk;
}

int cmd_stats(const Config& c, std::ostream& out, std::ostream&) {
  const Pattern p = load(c);
  Output o(c.out, out);
  auto& os = o.stream();
  const int k = static_cast<int>(p.size());
  os << "n,vertices,edges,edges_closed_form,avg_degree,gamma_estimate";
  for (int j = 2; j <= k; ++j) os << ",delta_" << j;
  os << '\n';
  EnumerationCaps caps;
  if (c.cap) caps.max_edges = c.cap;
  for (auto n : n_values(c)) {
    const HypergraphSummary s = codegree_stats(p, n, caps);
    os << n << ',' << s.vertex_count << ',' << s.edge_count << ',' << count_copies_closed_form(p, n) << ','
       << format_real(s.avg_degree) << ',' << format_real(s.gamma_estimate);
    for (int j = 2; j <= k; ++j) os << ',' << s.codegree[j];
    os << '\n';
  }
  return kExitOk;
}

LiftOptions lift_options(const Config& c) {
  LiftOptions lo;
  lo.all_triples = c.all_triples;
  if (c.cap) lo.behrend.verify_cap = c.cap;
  return lo;
}

int cmd_behrend(const Config& c, std::ostream& out, std::ostream&) {
  const Pattern p = load(c);
  const auto rows = lower_bound_table(p, n_values(c), lift_options(c));
  Output o(c.out, out);
  o.stream() << density_table_csv(rows);
  for (const auto& r : rows)
    if (!r.verified && r.n > 0 && static_cast<std::uint64_t>(r.record.upper) <= lift_options(c).behrend.verify_cap)
      return kExitCheckFailed;
  return kExitOk;
}

int cmd_lift(const Config& c, std::ostream& out, std::ostream&) {
  const Pattern p = load(c);
  const LiftCertificate cert = behrend_lift(p, single_n(c), lift_options(c));
  if (!c.witness.empty()) {
    std::ofstream w(c.witness, std::ios::binary | std::ios::trunc);
    write_grid_set(w, cert.set);
  }
  Output o(c.out, out);
  o.stream() << certificate_text(cert);
  return cert.verification_run && !cert.verified ? kExitCheckFailed : kExitOk;
}

int cmd_supersat_sample(const Config& c, std::ostream& out, std::ostream& err) {
  const Pattern p = load(c);
  const GridSet a = input_set(c, p);
  RCache cache = open_cache(c);
  if (c.m < 2) throw UsageError("--m >= 2 is required");
  if (c.samples == 0) throw PreconditionError("sample count must be positive");
  const RNumberRecord r = r_surrogate(c, cache, p, a.side());
  const SubgridSampler sampler(a, p, c.m, r, c.seed, c.l0);
  print_setup(err, sampler.setup());
  std::vector<SupersatSample> samples;
  samples.reserve(c.samples);
  for (std::uint64_t i = 0; i < c.samples; ++i) samples.push_back(sampler.sample(i));
  Output o(c.out, out);
  o.stream() << samples_csv(samples, p.dim());
  return kExitOk;
}

int cmd_supersat_exact(const Config& c, std::ostream& out, std::ostream& err) {
  const Pattern p = load(c);
  const GridSet a = input_set(c, p);
  RCache cache = open_cache(c);
  if (c.m < 2) throw UsageError("--m >= 2 is required");
  const RNumberRecord r = r_surrogate(c, cache, p, a.side());
  const ExactExpectation e = c.budget ? exact_expected_gamma(a, p, c.m, r, c.budget, c.l0)
                                      : exact_expected_gamma(a, p, c.m, r, 500'000'000, c.l0);
  print_setup(err, e.setup);
  err << "mean_gamma " << to_string(e.mean_gamma) << '\n'
      << "mean_size " << to_string(e.mean_size) << '\n'
      << "size_floor " << to_string(e.size_floor) << '\n'
      << "size_ok " << e.size_ok << '\n';
  bool inner_ok = true;
  for (const auto& pa : e.per_prime) inner_ok = inner_ok && pa.inner_ok;
  err << "inner_ok " << inner_ok << '\n';
  Output o(c.out, out);
  o.stream() << expectation_csv(e);
  return e.size_ok && inner_ok ? kExitOk : kExitCheckFailed;
}

int cmd_pnt(const Config& c, std::ostream& out, std::ostream&) {
  const PntCheck r = verify_pnt_constant(c.l0, c.lmax, c.cap ? static_cast<std::int64_t>(c.cap) : kDefaultSieveCap);
  Output o(c.out, out);
  if (r.holds) {
    o.stream() << "OK\n";
    return kExitOk;
  }
  o.stream() << "FAIL first_violation=" << *r.first_violation << '\n';
  return kExitCheckFailed;
}

std::function<std::int64_t(std::int64_t)> m_rule(const Config& c, const Pattern& p, const RProvider& provider) {
  if (c.m_rule == "half") return [](std::int64_t n) { return (n + 1) / 2; };
  if (c.m_rule == "log-power") return [&p, &provider](std::int64_t n) { return std::min(n, m_of_n(p, n, provider)); };
  throw UsageError("--m-rule must be 'half' or 'log-power'");
}

int cmd_sequence_filter(const Config& c, std::ostream& out, std::ostream&) {
  const Pattern p = load(c);
  RCache cache = open_cache(c);
  const auto ns = n_values(c);
  RProvider provider(p);
  auto ensure = [&](std::int64_t n) {
    if (provider.find(n)) return;
    const RNumberRecord rec = exact_or_solve(c, cache, p, n);
    if (!rec.exact) throw BudgetError("no exact r-value for n = " + std::to_string(n));
    provider.add_record(rec);
  };
  const auto rule = m_rule(c, p, provider);
  for (auto n : ns) {
    ensure(n);
    ensure(rule(n));
  }
  const auto report =
      filter_sequence(provider, rule, parse_rational(c.alpha), p.dim(), *std::min_element(ns.begin(), ns.end()),
                      *std::max_element(ns.begin(), ns.end()));
  Output o(c.out, out);
  o.stream() << filter_csv(report);
  return kExitOk;
}

int cmd_container(const Config& c, std::ostream& out, std::ostream&, bool with_counts) {
  const Pattern p = load(c);
  RCache cache = open_cache(c);
  const auto ns = n_values(c);
  RProvider provider(p);
  for (const auto& rec : cache.records()) provider.add_record(rec);
  if (c.r_override) {
    provider.set_override([v = c.r_override](std::int64_t) { return std::optional<std::uint64_t>(v); });
  } else {
    provider.enable_behrend(lift_options(c));
  }
  const Rational alpha = parse_rational(c.alpha);
  const auto [lo, hi] = std::minmax_element(ns.begin(), ns.end());
  const GammaEstimate g = estimate_gamma_const(p, *lo, *hi);

  std::vector<ContainerParams> rows;
  for (auto n : ns) {
    ContainerParams params = epsilon_tau_schedule(p, n, provider, g.gamma);
    std::optional<HypergraphSummary> summary;
    try {
      EnumerationCaps caps;
      caps.max_edges = c.cap ? c.cap : 200'000;
      summary = codegree_stats(p, n, caps);
    } catch (const BudgetError&) {
    }
    check_container_hypotheses(params, summary);
    std::optional<BigInt> count;
    if (with_counts && checked_power(n, p.dim()) <= CountOptions{}.max_vertices)
      count = count_xfree_subsets(p, n).count;
    counting_budget(params, alpha, count);
    rows.push_back(std::move(params));
  }
  Output o(c.out, out);
  o.stream() << container_csv(rows);
  return kExitOk;
}

int cmd_cache_verify(const Config& c, std::ostream& out, std::ostream&) {
  const CacheReport rep = cache_roundtrip(c.cache_dir.empty() ? default_cache_dir() : c.cache_dir, c.compact);
  Output o(c.out, out);
  o.stream() << cache_report_text(rep);
  return rep.ok() ? kExitOk : kExitCheckFailed;
}

struct Command {
  const char* name;
  const char* help;
  std::vector<std::string> flags;
  std::function<int(const Config&, std::ostream&, std::ostream&)> run;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> table = {
      {"solve-rx", "exact r_X(n) by branch and bound", {"pattern", "n", "n-range", "n-list", "workers", "budget", "cache", "out", "witness"}, cmd_solve},
      {"count-free", "number of X-free subsets", {"pattern", "n", "n-range", "n-list", "cap", "budget", "cache", "out"}, cmd_count},
      {"enum-copies", "list the copies of X in [n]^d", {"pattern", "n", "cap", "out"}, cmd_enum},
      {"stats", "copies hypergraph degree and co-degree statistics", {"pattern", "n", "n-range", "n-list", "cap", "out"}, cmd_stats},
      {"behrend", "Behrend-type lower bound table", {"pattern", "n", "n-range", "n-list", "all-triples", "cap", "out"}, cmd_behrend},
      {"lift", "lifted Behrend set with certificate", {"pattern", "n", "all-triples", "cap", "out", "witness"}, cmd_lift},
      {"supersat-sample", "random sub-grid samples", {"pattern", "n", "set", "m", "samples", "seed", "l0", "r-override", "workers", "budget", "cache", "out"}, cmd_supersat_sample},
      {"supersat-exact", "exact sub-grid expectation and audits", {"pattern", "n", "set", "m", "l0", "r-override", "workers", "budget", "cache", "out"}, cmd_supersat_exact},
      {"pnt-check", "prime counting lower bound scan", {"l0", "lmax", "cap", "out"}, cmd_pnt},
      {"sequence-filter", "density comparison filter", {"pattern", "n", "n-range", "n-list", "alpha", "m-rule", "workers", "budget", "cache", "out"}, cmd_sequence_filter},
      {"container-params", "container hypotheses and budgets", {"pattern", "n", "n-range", "n-list", "alpha", "r-override", "cap", "cache", "out"},
       [](const Config& c, std::ostream& o, std::ostream& e) { return cmd_container(c, o, e, false); }},
      {"budget-report", "container budgets against exact counts", {"pattern", "n", "n-range", "n-list", "alpha", "r-override", "cap", "cache", "out"},
       [](const Config& c, std::ostream& o, std::ostream& e) { return cmd_container(c, o, e, true); }},
      {"cache-verify", "re-verify and merge the r-value cache", {"cache", "compact", "out"}, cmd_cache_verify},
  };
  return table;
}

void add_flags(CLI::App& app, Config& c, const std::vector<std::string>& flags) {
  for (const auto& f : flags) {
    if (f == "pattern") app.add_option("--pattern", c.pattern, "pattern file")->required()->check(CLI::ExistingFile);
    else if (f == "n") app.add_option("--n", c.n, "grid side");
    else if (f == "n-range") app.add_option("--n-range", c.n_range, "range A:B of grid sides");
    else if (f == "n-list") app.add_option("--n-list", c.n_list, "comma separated grid sides");
    else if (f == "m") app.add_option("--m", c.m, "sub-grid side");
    else if (f == "alpha") app.add_option("--alpha", c.alpha, "rational alpha (default 1/2)");
    else if (f == "seed") app.add_option("--seed", c.seed, "random seed (default 0)");
    else if (f == "samples") app.add_option("--samples", c.samples, "number of samples");
    else if (f == "cap") app.add_option("--cap", c.cap, "size cap")->check(CLI::PositiveNumber);
    else if (f == "cache") app.add_option("--cache", c.cache_dir, "cache directory (default $XFREE_CACHE)");
    else if (f == "out") app.add_option("--out", c.out, "output file (default stdout)");
    else if (f == "witness") app.add_option("--witness", c.witness, "write the set to this file");
    else if (f == "all-triples") app.add_flag("--all-triples", c.all_triples, "try every 3-subset");
    else if (f == "set") app.add_option("--set", c.set_file, "grid set file (default: full grid)")->check(CLI::ExistingFile);
    else if (f == "m-rule") app.add_option("--m-rule", c.m_rule, "half or log-power");
    else if (f == "l0") app.add_option("--l0", c.l0, "prime threshold");
    else if (f == "lmax") app.add_option("--lmax", c.lmax, "scan end");
    else if (f == "r-override") app.add_option("--r-override", c.r_override, "user r-value");
    else if (f == "workers") app.add_option("--workers", c.workers, "solver threads")->check(CLI::PositiveNumber);
    else if (f == "budget") app.add_option("--budget", c.budget, "node budget")->check(CLI::PositiveNumber);
    else if (f == "compact") app.add_flag("--compact", c.compact, "rewrite the index with merged records");
  }
}

std::string usage() {
  std::ostringstream os;
  os << "usage: xfree <subcommand> [options]\n\nsubcommands:\n";
  for (const auto& cmd : commands()) os << "  " << cmd.name << "  " << cmd.help << '\n';
  return os.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage();
    return kExitUnknownCommand;
  }
  if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    out << usage();
    return kExitOk;
  }
  const auto& table = commands();
  auto it = std::find_if(table.begin(), table.end(), [&](const Command& c) { return args[0] == c.name; });
  if (it == table.end()) {
    err << "unknown subcommand '" << args[0] << "'\n" << usage();
    return kExitUnknownCommand;
  }

  Config cfg;
  CLI::App app{it->help, std::string("xfree ") + it->name};
  add_flags(app, cfg, it->flags);
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  }

  try {
    return it->run(cfg, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const BudgetError& e) {
    err << "budget: " << e.what() << '\n';
    return kExitBudget;
  }
}

}  // namespace xfree
