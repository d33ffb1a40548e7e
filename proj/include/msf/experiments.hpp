// Seeded comparison runs for the two filters and their CSV rendering.
//
// Each run builds its filter from a dataset, queries it, tallies outcomes and
// attaches the matching closed-form prediction. Rates are compared with the
// prediction using 3 binomial standard deviations when the expected count is
// at least 25, and the central 99% Poisson band otherwise; a deviation adds a
// flag to the report instead of failing the run.

#pragma once

#include <boost/math/distributions/poisson.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msf/analytics.hpp"
#include "msf/outcome.hpp"
#include "msf/shifting_filter.hpp"
#include "msf/spatial_filter.hpp"
#include "msf/workload.hpp"

namespace msf::experiments {

struct RunConfig {
  FilterKind kind = FilterKind::sbf;
  std::uint64_t m = 1ULL << 20;
  std::uint32_t k = 10;
  std::uint32_t s = 1;
  ShiftMode mode = ShiftMode::circular;  // ShBF only
  std::uint64_t w = 0;                   // word-bounded ShBF only
  std::uint64_t seed = 0;

  std::uint64_t bit_length() const noexcept { return kind == FilterKind::shbf ? m : m * sbf_cell_bits(s); }
};

struct ExperimentReport {
  std::string experiment;
  RunConfig config;
  std::uint64_t n = 0;
  std::optional<std::uint64_t> queries;
  std::optional<OutcomeTally> tally;
  std::optional<double> fpp_emp;
  std::optional<double> fpp_ana;
  std::optional<double> isep_emp;
  std::optional<double> isep_ana;
  std::optional<double> entropy;
  std::optional<double> hashes_per_query;
  std::optional<std::uint64_t> cells_read_total;
  double ms = 0;
  /// Expected multi-match counts by cardinality (index = |Γ|), ShBF member runs.
  std::vector<double> expected_u;
  /// Tolerance violations, human readable.
  std::vector<std::string> flags;

  bool flagged() const noexcept { return !flags.empty(); }
};

// ---------------------------------------------------------------------------
// Tolerances

struct CountBand {
  double lo = 0;
  double hi = 0;
  bool contains(double observed) const noexcept { return observed >= lo && observed <= hi; }
};

/// Acceptance band for an observed count of events with probability `p`
/// over `trials` independent queries.
inline CountBand count_band(double p, std::uint64_t trials) {
  const double n = static_cast<double>(trials);
  const double expected = p * n;
  if (expected >= 25.0) {
    const double sigma = std::sqrt(n * p * (1.0 - p));
    return {expected - 3.0 * sigma, expected + 3.0 * sigma};
  }
  if (expected <= 0.0) return {0.0, 0.0};
  const boost::math::poisson_distribution<double> poisson(expected);
  return {boost::math::quantile(poisson, 0.005), boost::math::quantile(poisson, 0.995)};
}

// ---------------------------------------------------------------------------
// Building and querying

inline ShiftingFilter build_shbf(const workload::Dataset& data, const RunConfig& cfg) {
  ShiftingFilter f = cfg.mode == ShiftMode::word_bounded
                         ? ShiftingFilter::word_bounded(cfg.m, cfg.k, cfg.s, cfg.w, cfg.seed)
                         : ShiftingFilter(cfg.m, cfg.k, cfg.s, cfg.seed);
  for (const auto& e : data.entries) f.insert(e.element, e.label);
  f.seal();
  f.reset_counters();
  return f;
}

inline SpatialFilter build_sbf(const workload::Dataset& data, const RunConfig& cfg) {
  SpatialFilter f(cfg.m, cfg.k, cfg.s, cfg.seed);
  for (const auto& e : data.entries) f.insert(e.element, e.label);
  f.seal();
  f.reset_counters();
  return f;
}

template <class Filter>
OutcomeTally query_members(const Filter& f, const workload::Dataset& data) {
  OutcomeTally tally;
  for (const auto& e : data.entries) tally.record(f.classify(e.element, e.label));
  return tally;
}

template <class Filter>
OutcomeTally query_non_members(const Filter& f, const workload::NonElementSet& ne) {
  OutcomeTally tally;
  for (const auto& e : ne.elements) tally.record(f.classify(e, 0));
  return tally;
}

namespace detail {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <class Filter>
void attach_counters(ExperimentReport& r, const Filter& f, std::uint64_t queries) {
  const auto c = f.counters().snapshot();
  if (queries > 0) {
    r.hashes_per_query = static_cast<double>(c.hash_evaluations) / static_cast<double>(queries);
  }
  r.cells_read_total = c.cells_read;
}

inline void check_count(ExperimentReport& r, std::string_view what, std::uint64_t observed, double p,
                        std::uint64_t trials) {
  const CountBand band = count_band(p, trials);
  if (!band.contains(static_cast<double>(observed))) {
    std::ostringstream msg;
    msg << r.experiment << ' ' << to_string(r.config.kind) << " m=" << r.config.m << ": " << what << ' ' << observed
        << " outside [" << band.lo << ", " << band.hi << "] (expected " << p * static_cast<double>(trials) << ")";
    r.flags.push_back(msg.str());
  }
}

inline ExperimentReport member_run(std::string experiment, const workload::Dataset& data, const RunConfig& cfg) {
  if (cfg.s < data.s) throw std::invalid_argument("experiments: dataset labels exceed filter set count");
  Stopwatch clock;
  ExperimentReport r;
  r.experiment = std::move(experiment);
  r.config = cfg;
  r.n = data.size();
  r.queries = data.size();

  const auto params = analytics::FilterParams::with_counts(cfg.m, cfg.k, [&] {
    auto counts = data.per_set_counts;
    counts.resize(cfg.s, 0);
    return counts;
  }());

  if (cfg.kind == FilterKind::shbf) {
    const auto f = build_shbf(data, cfg);
    r.tally = query_members(f, data);
    attach_counters(r, f, *r.queries);
    const std::uint64_t multi = r.tally->multi_matches();
    r.isep_emp = static_cast<double>(multi) / static_cast<double>(r.n);
    if (cfg.mode == ShiftMode::circular) {
      r.isep_ana = static_cast<double>(analytics::shbf_isep(params));
      r.expected_u.assign(std::min<std::uint32_t>(cfg.s, 64) + 1, 0.0);
      for (std::uint32_t i = 2; i < r.expected_u.size(); ++i) {
        r.expected_u[i] = static_cast<double>(analytics::shbf_isep_cardinality(params, i)) * static_cast<double>(r.n);
      }
      check_count(r, "multi-matches", multi, *r.isep_ana, r.n);
    }
  } else {
    const auto f = build_sbf(data, cfg);
    r.tally = query_members(f, data);
    attach_counters(r, f, *r.queries);
    r.isep_emp = static_cast<double>(r.tally->e) / static_cast<double>(r.n);
    r.isep_ana = static_cast<double>(analytics::sbf_isep_overall(params));
    check_count(r, "inter-set errors", r.tally->e, *r.isep_ana, r.n);
  }
  if (r.n > 0) r.entropy = static_cast<double>(analytics::entropy(*r.tally));
  r.ms = clock.ms();
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiments

struct WordSweepConfig {
  std::uint64_t m = 1ULL << 23;
  std::uint32_t k = 10;
  std::uint32_t s = 255;
};

/// Word sizes of the default sweep; nullopt is the unbounded (circular) run.
inline std::vector<std::optional<std::uint64_t>> default_word_sizes() {
  return {1ULL << 10, 1ULL << 12, 1ULL << 14, 1ULL << 16, 1ULL << 18, std::nullopt};
}

/// ShBF multi-match counts as the offset range shrinks. Only the unbounded
/// row carries an analytic prediction; the closed forms assume offsets
/// spread over all m cells.
inline std::vector<ExperimentReport> run_word_size_sweep(const WordSweepConfig& base, const workload::Dataset& data,
                                                         const std::vector<std::optional<std::uint64_t>>& word_sizes,
                                                         std::uint64_t seed) {
  for (const auto& w : word_sizes) {
    if (w && (*w < 1 || *w > base.m)) throw std::invalid_argument("experiments: word size must be in [1, m]");
  }
  std::vector<ExperimentReport> out;
  for (const auto& w : word_sizes) {
    RunConfig cfg{FilterKind::shbf, base.m, base.k, base.s, w ? ShiftMode::word_bounded : ShiftMode::circular,
                  w.value_or(0), seed};
    out.push_back(detail::member_run("word-sweep", data, cfg));
  }
  return out;
}

/// Empirical false-positive rate over a non-element corpus for each filter
/// kind and cell count.
inline std::vector<ExperimentReport> run_fpp_sweep(const std::vector<FilterKind>& kinds,
                                                   const std::vector<std::uint64_t>& cell_counts,
                                                   const workload::Dataset& data,
                                                   const workload::NonElementSet& non_elements, std::uint32_t k,
                                                   std::uint64_t seed) {
  std::vector<ExperimentReport> out;
  for (const auto kind : kinds) {
    for (const auto m : cell_counts) {
      detail::Stopwatch clock;
      ExperimentReport r;
      r.experiment = "fpp-sweep";
      r.config = {kind, m, k, data.s, ShiftMode::circular, 0, seed};
      r.n = data.size();
      r.queries = non_elements.size();
      const analytics::FilterParams params{m, k, data.s, data.size(), std::nullopt};
      if (kind == FilterKind::shbf) {
        const auto f = build_shbf(data, r.config);
        r.tally = query_non_members(f, non_elements);
        detail::attach_counters(r, f, *r.queries);
        r.fpp_ana = static_cast<double>(analytics::shbf_fpp_overall(params));
      } else {
        const auto f = build_sbf(data, r.config);
        r.tally = query_non_members(f, non_elements);
        detail::attach_counters(r, f, *r.queries);
        r.fpp_ana = static_cast<double>(analytics::sbf_fpp(params));
      }
      r.fpp_emp = static_cast<double>(r.tally->fp) / static_cast<double>(*r.queries);
      detail::check_count(r, "false positives", r.tally->fp, *r.fpp_ana, *r.queries);
      r.ms = clock.ms();
      out.push_back(std::move(r));
    }
  }
  return out;
}

/// Default cell counts of the false-positive sweep, 2^17 .. 2^24.
inline std::vector<std::uint64_t> default_fpp_cell_counts() {
  std::vector<std::uint64_t> out;
  for (unsigned e = 17; e <= 24; ++e) out.push_back(1ULL << e);
  return out;
}

/// Closed-form false-positive probability of both filters as s grows. The SBF
/// value does not depend on s.
inline std::vector<ExperimentReport> run_fpp_curves(const std::vector<std::uint64_t>& m_values, std::uint32_t k,
                                                    std::uint64_t n, std::uint32_t s_min, std::uint32_t s_max) {
  if (s_min < 1 || s_max < s_min) throw std::invalid_argument("experiments: invalid s range");
  std::vector<ExperimentReport> out;
  for (const auto m : m_values) {
    for (std::uint32_t s = s_min; s <= s_max; ++s) {
      const analytics::FilterParams params{m, k, s, n, std::nullopt};
      for (const auto kind : {FilterKind::shbf, FilterKind::sbf}) {
        ExperimentReport r;
        r.experiment = "fpp-curves";
        r.config = {kind, m, k, s, ShiftMode::circular, 0, 0};
        r.n = n;
        r.fpp_ana = static_cast<double>(kind == FilterKind::shbf ? analytics::shbf_fpp_overall(params)
                                                                 : analytics::sbf_fpp(params));
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

/// The three filter setups compared on inter-set errors: SBF with m = 2^20
/// (l = 2^23 for 255 sets), ShBF with the same cells, ShBF with the same bits.
inline std::vector<RunConfig> interset_configs(std::uint32_t k, std::uint32_t s, std::uint64_t seed) {
  return {{FilterKind::sbf, 1ULL << 20, k, s, ShiftMode::circular, 0, seed},
          {FilterKind::shbf, 1ULL << 20, k, s, ShiftMode::circular, 0, seed},
          {FilterKind::shbf, 1ULL << 23, k, s, ShiftMode::circular, 0, seed}};
}

/// Member queries against each configuration: c, e, u_i and entropy with the
/// matching inter-set error prediction.
inline std::vector<ExperimentReport> run_interset_experiment(const workload::Dataset& data,
                                                             const std::vector<RunConfig>& configs,
                                                             std::string_view experiment = "interset") {
  std::vector<ExperimentReport> out;
  for (const auto& cfg : configs) out.push_back(detail::member_run(std::string(experiment), data, cfg));
  return out;
}

/// Per-query instrumentation: every query's hash count must equal the cost
/// model exactly and its cell reads must lie within the model's bounds.
inline std::vector<ExperimentReport> run_cost_experiment(const std::vector<RunConfig>& configs,
                                                         std::uint64_t query_count) {
  std::vector<ExperimentReport> out;
  for (const auto& cfg : configs) {
    detail::Stopwatch clock;
    ExperimentReport r;
    r.experiment = "cost";
    r.config = cfg;
    // Fill to roughly half occupancy so reads vary between the bounds.
    const std::uint64_t per_set = std::max<std::uint64_t>(1, cfg.m / (2ULL * cfg.k * cfg.s));
    const auto data = workload::gen_uniform(cfg.s, per_set, cfg.seed);
    const auto probes = workload::gen_non_elements(std::max<std::uint64_t>(1, query_count / 2), cfg.seed, data);
    r.n = data.size();
    r.queries = query_count;
    const auto model = analytics::cost_model(cfg.kind, cfg.k, cfg.s);

    auto measure = [&](const auto& f) {
      std::uint64_t violations = 0;
      for (std::uint64_t q = 0; q < query_count; ++q) {
        const std::string& e = (q % 2 == 0) ? data.entries[(q / 2) % data.entries.size()].element
                                            : probes.elements[(q / 2) % probes.elements.size()];
        const auto before = f.counters().snapshot();
        (void)f.query(e);
        const auto d = f.counters().snapshot() - before;
        if (d.hash_evaluations != model.hashes_per_query || d.lookups != model.lookups_per_query ||
            d.cells_read < model.cells_read_min || d.cells_read > model.cells_read_max) {
          ++violations;
        }
      }
      detail::attach_counters(r, f, query_count);
      if (violations > 0) {
        r.flags.push_back("cost " + std::string(to_string(cfg.kind)) + ": " + std::to_string(violations) +
                          " queries disagree with the cost model");
      }
    };
    if (cfg.kind == FilterKind::shbf) {
      measure(build_shbf(data, cfg));
    } else {
      measure(build_sbf(data, cfg));
    }
    r.ms = clock.ms();
    out.push_back(std::move(r));
  }
  return out;
}

/// Cost sweep over s for both kinds at fixed k and m.
inline std::vector<RunConfig> cost_configs(std::uint64_t m, std::uint32_t k, const std::vector<std::uint32_t>& s_values,
                                           std::uint64_t seed) {
  std::vector<RunConfig> out;
  for (const auto kind : {FilterKind::shbf, FilterKind::sbf}) {
    for (const auto s : s_values) out.push_back({kind, m, k, s, ShiftMode::circular, 0, seed});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCsvHeader =
    "experiment,filter,m,l_bits,k,s,n,w,seed,queries,c,e,u2,u3,u4,u5plus,fp,tn,fpp_emp,fpp_ana,isep_emp,isep_ana,"
    "entropy,hashes_per_query,cells_read_total,ms";

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// One CSV document (header + one row per report, LF endings). The wall-time
/// column is left empty unless `with_timing` is set, so equal seeds give equal
/// bytes.
inline std::string to_csv(const std::vector<ExperimentReport>& reports, bool with_timing = false) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  auto opt_real = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  auto opt_int = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& r : reports) {
    const auto& c = r.config;
    const bool shbf = c.kind == FilterKind::shbf;
    out << r.experiment << ',' << to_string(c.kind) << ',' << c.m << ',' << c.bit_length() << ',' << c.k << ','
        << c.s << ',' << r.n << ',' << (c.mode == ShiftMode::word_bounded ? std::to_string(c.w) : std::string())
        << ',' << c.seed << ',' << opt_int(r.queries) << ',';
    if (r.tally && r.tally->member_queries() > 0) {
      const auto& t = *r.tally;
      out << t.c << ',' << (shbf ? std::string() : std::to_string(t.e)) << ',';
      if (shbf) {
        out << t.u_at(2) << ',' << t.u_at(3) << ',' << t.u_at(4) << ',' << t.u_from(5) << ',';
      } else {
        out << ",,,,";
      }
    } else {
      out << ",,,,,,";
    }
    if (r.tally && r.tally->non_member_queries() > 0) {
      out << r.tally->fp << ',' << r.tally->tn << ',';
    } else {
      out << ",,";
    }
    out << opt_real(r.fpp_emp) << ',' << opt_real(r.fpp_ana) << ',' << opt_real(r.isep_emp) << ','
        << opt_real(r.isep_ana) << ',' << opt_real(r.entropy) << ',' << opt_real(r.hashes_per_query) << ','
        << opt_int(r.cells_read_total) << ',' << (with_timing ? format_real(r.ms) : std::string()) << '\n';
  }
  return out.str();
}

}  // namespace msf::experiments
