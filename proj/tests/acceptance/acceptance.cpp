// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 when any
// criterion fails. Stochastic checks use fixed seeds chosen before the first
// run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../fixtures.hpp"
#include "msf/msf.hpp"

namespace {

namespace an = msf::analytics;
namespace x = msf::experiments;
namespace wl = msf::workload;
using msf::FilterKind;
using msf::Label;

constexpr std::uint64_t kSeed = 7;
constexpr std::uint64_t kM20 = 1ULL << 20;
constexpr std::uint64_t kM23 = 1ULL << 23;
constexpr std::uint32_t kK = 10;
constexpr std::uint32_t kS = 255;
constexpr std::uint64_t kPerSet = 256;

// Collects sub-checks of one criterion and prints the verdict line.
class Criterion {
 public:
  explicit Criterion(std::string id, std::string title) : id_(std::move(id)), title_(std::move(title)) {}

  void check(bool ok, const std::string& detail) {
    ok_ = ok_ && ok;
    details_.push_back((ok ? "  ok   " : "  FAIL ") + detail);
  }

  bool finish(double seconds) const {
    std::printf("[%s] %s %s (%.1fs)\n", ok_ ? "PASS" : "FAIL", id_.c_str(), title_.c_str(), seconds);
    for (const auto& d : details_) std::printf("%s\n", d.c_str());
    std::fflush(stdout);
    return ok_;
  }

 private:
  std::string id_;
  std::string title_;
  bool ok_ = true;
  std::vector<std::string> details_;
};

std::string num(double v) { return x::format_real(v); }

std::string band_text(const x::CountBand& b) { return "[" + num(b.lo) + ", " + num(b.hi) + "]"; }

msf::OutcomeTally table_row(std::uint64_t c, std::uint64_t e, std::vector<std::uint64_t> u) {
  msf::OutcomeTally t;
  t.c = c;
  t.e = e;
  t.u.assign(2, 0);
  t.u.insert(t.u.end(), u.begin(), u.end());
  return t;
}

// ---------------------------------------------------------------------------

void ac1(Criterion& cr) {
  struct Row {
    const char* name;
    msf::OutcomeTally t;
    double reference;
  };
  const Row rows[] = {
      {"uniform ShBF m=2^20", table_row(58174, 0, {6739, 352, 15, 0}), 0.94462},
      {"uniform SBF m=2^20", table_row(65276, 4, {}), 0.99994},
      {"uniform ShBF m=2^23", table_row(65276, 0, {4}), 0.99997},
      {"random ShBF m=2^20", table_row(58282, 0, {6600, 379, 18, 1}), 0.94536},
      {"random SBF m=2^20", table_row(65277, 3, {}), 0.99995},
      {"random ShBF m=2^23", table_row(65278, 0, {2}), 0.99998},
  };
  for (const auto& r : rows) {
    const double v = static_cast<double>(an::entropy(r.t));
    cr.check(std::abs(v - r.reference) <= 5e-6, std::string(r.name) + ": " + num(v) + " vs " + num(r.reference));
  }
}

void ac2(Criterion& cr) {
  const double at250 = static_cast<double>(an::shbf_fpp_overall({kM20, kK, 250, 65280, std::nullopt}));
  cr.check(at250 > 0.1, "ShBF m=2^20 s=250: " + num(at250) + " > 0.1");

  const auto curves = x::run_fpp_curves({kM20}, kK, 65280, 1, 255);
  double lo = 1, hi = 0;
  for (const auto& r : curves) {
    if (r.config.kind != FilterKind::sbf) continue;
    lo = std::min(lo, *r.fpp_ana);
    hi = std::max(hi, *r.fpp_ana);
  }
  cr.check(lo == hi, "SBF m=2^20 constant over s=1..255: " + num(lo));

  const double at23 = static_cast<double>(an::shbf_fpp_overall({kM23, kK, 255, 65280, std::nullopt}));
  cr.check(std::abs(at23 - 1.4e-9) <= 0.14e-9, "ShBF m=2^23 s=255: " + num(at23) + " within 10% of 1.4e-9");
}

void ac3(Criterion& cr) {
  const auto data = wl::gen_uniform(kS, kPerSet, kSeed);
  auto configs = x::interset_configs(kK, kS, kSeed);
  configs.pop_back();  // the two m = 2^20 filters
  const auto reports = x::run_interset_experiment(data, configs);
  const auto& sbf = reports[0];
  const auto& shbf = reports[1];
  const auto n = data.size();

  const std::uint64_t multi = shbf.tally->multi_matches();
  const auto band = x::count_band(*shbf.isep_ana, n);
  cr.check(band.contains(static_cast<double>(multi)), "ShBF multi-matches " + std::to_string(multi) + " in " +
                                                         band_text(band) + " (expected " + num(*shbf.isep_ana * n) +
                                                         ")");
  for (std::size_t i = 2; i <= 4; ++i) {
    const double expected = shbf.expected_u[i];
    const auto got = static_cast<double>(shbf.tally->u_at(i));
    cr.check(std::abs(got - expected) <= 0.2 * expected,
             "ShBF u" + std::to_string(i) + " " + num(got) + " within 20% of " + num(expected));
  }
  const auto sbf_band = x::count_band(*sbf.isep_ana, n);
  cr.check(sbf_band.contains(static_cast<double>(sbf.tally->e)),
           "SBF inter-set errors " + std::to_string(sbf.tally->e) + " in " + band_text(sbf_band) + " (expected " +
               num(*sbf.isep_ana * n) + ")");
  cr.check(true, "entropy ShBF " + num(*shbf.entropy) + ", SBF " + num(*sbf.entropy));
}

void ac4(Criterion& cr) {
  const auto data = wl::gen_uniform(kS, kPerSet, kSeed);
  const auto ne = wl::gen_non_elements(500000, kSeed, data);
  auto reports = x::run_fpp_sweep({FilterKind::sbf}, {kM20}, data, ne, kK, kSeed);
  const auto shbf = x::run_fpp_sweep({FilterKind::shbf}, {kM20, kM23}, data, ne, kK, kSeed);
  reports.insert(reports.end(), shbf.begin(), shbf.end());
  for (const auto& r : reports) {
    const auto band = x::count_band(*r.fpp_ana, *r.queries);
    cr.check(band.contains(static_cast<double>(r.tally->fp)),
             std::string(to_string(r.config.kind)) + " m=2^" + std::to_string(std::countr_zero(r.config.m)) +
                 ": false positives " + std::to_string(r.tally->fp) + " in " + band_text(band) + " (rate " +
                 num(*r.fpp_emp) + " vs " + num(*r.fpp_ana) + ")");
  }
}

void ac5(Criterion& cr) {
  std::mt19937_64 rng(kSeed);
  std::uint64_t builds = 0, queries = 0, shbf_misses = 0, sbf_misses = 0;
  for (; builds < 10000; ++builds) {
    const std::uint64_t m = (1ULL << 6) + wl::detail::below(rng, (1ULL << 14) - (1ULL << 6) + 1);
    const auto k = static_cast<std::uint32_t>(1 + wl::detail::below(rng, 8));
    const auto s = static_cast<std::uint32_t>(1 + wl::detail::below(rng, 32));
    const std::uint64_t n = s + wl::detail::below(rng, std::min<std::uint64_t>(m / k, 256));
    const std::uint64_t seed = rng();
    const auto data = wl::gen_random(s, n, seed);
    msf::ShiftingFilter sh(m, k, s, seed);
    msf::SpatialFilter sp(m, k, s, seed);
    for (const auto& e : data.entries) {
      sh.insert(e.element, e.label);
      sp.insert(e.element, e.label);
    }
    for (const auto& e : data.entries) {
      shbf_misses += !sh.query(e.element).contains(e.label);
      const Label v = sp.query(e.element);
      sbf_misses += (v == 0 || v < e.label);
      ++queries;
    }
  }
  cr.check(shbf_misses == 0, "ShBF: " + std::to_string(shbf_misses) + " members missing from their candidate set");
  cr.check(sbf_misses == 0, "SBF: " + std::to_string(sbf_misses) + " members below their label");
  cr.check(true, std::to_string(builds) + " builds, " + std::to_string(queries) + " member queries per filter");
}

void ac6(Criterion& cr) {
  std::vector<an::FilterParams> grid;
  const std::uint64_t ms[] = {64, 1000, 1ULL << 14, kM20, kM23};
  const std::uint32_t ks[] = {1, 3, 10, 16};
  const std::uint32_t ss[] = {1, 2, 9, 64, 255};
  for (const auto m : ms) {
    for (const auto k : ks) {
      for (const auto s : ss) {
        std::vector<std::uint64_t> counts(s);
        for (std::uint32_t i = 0; i < s; ++i) counts[i] = 1 + (i * 5 + m % 97 + k) % 17;
        grid.push_back(an::FilterParams::with_counts(m, k, std::move(counts)));
      }
    }
  }
  double worst_reduction = 0, worst_card = 0, worst_split = 0, worst_top = 0;
  for (const auto& p : grid) {
    const auto one = an::FilterParams::with_counts(p.m, p.k, {p.n});
    const an::Real bf = an::bf_fpp(p.m, p.k, p.n);
    for (const an::Real v : {an::shbf_fpp_overall(one), an::sbf_fpp(one), an::sbf_fpp_specific(one, 1)}) {
      worst_reduction = std::max(worst_reduction, static_cast<double>(std::abs(v - bf)));
    }
    worst_reduction = std::max({worst_reduction, static_cast<double>(an::shbf_isep(one)),
                                static_cast<double>(an::sbf_isep_overall(one))});
    an::Real card = 0, split = 0;
    for (std::uint32_t i = 1; i <= p.s; ++i) {
      card += an::shbf_isep_cardinality(p, i);
      split += an::sbf_fpp_specific(p, i);
    }
    worst_card = std::max(worst_card, static_cast<double>(std::abs(card - 1)));
    worst_split = std::max(worst_split, static_cast<double>(std::abs(split - an::sbf_fpp(p))));
    worst_top = std::max(worst_top, static_cast<double>(an::sbf_isep_specific(p, p.s)));
  }
  cr.check(grid.size() == 100, std::to_string(grid.size()) + " parameter points");
  cr.check(worst_reduction <= 1e-12, "s=1 reductions, max deviation " + num(worst_reduction));
  cr.check(worst_card <= 1e-12, "cardinality distribution sums to 1, max deviation " + num(worst_card));
  cr.check(worst_split <= 1e-12, "set-specific SBF rates sum to the overall rate, max deviation " + num(worst_split));
  cr.check(worst_top == 0, "top set inter-set error " + num(worst_top));
}

void ac7(Criterion& cr) {
  constexpr std::uint64_t m = 64, trials = 100000;
  constexpr std::uint32_t k = 2, s = 3;
  constexpr std::uint64_t per_set = 2;
  const auto p = an::FilterParams::uniform(m, k, s, per_set);
  std::uint64_t shbf_fp = 0, shbf_multi = 0, sbf_fp = 0, sbf_err = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t seed = 1'000'000 + t;
    const auto data = wl::gen_uniform(s, per_set, seed);
    const auto probe = wl::gen_non_elements(1, seed, data).elements[0];
    std::mt19937_64 pick(seed);
    const auto& member = data.entries[wl::detail::below(pick, data.size())];
    msf::ShiftingFilter sh(m, k, s, seed);
    msf::SpatialFilter sp(m, k, s, seed);
    for (const auto& e : data.entries) {
      sh.insert(e.element, e.label);
      sp.insert(e.element, e.label);
    }
    shbf_fp += !sh.query(probe).empty();
    shbf_multi += sh.query(member.element).size() > 1;
    sbf_fp += sp.query(probe) != 0;
    sbf_err += sp.query(member.element) != member.label;
  }
  auto report = [&](const char* what, std::uint64_t observed, an::Real prob) {
    const auto band = x::count_band(static_cast<double>(prob), trials);
    cr.check(band.contains(static_cast<double>(observed)),
             std::string(what) + ": " + std::to_string(observed) + " in " + band_text(band) + " (rate " +
                 num(static_cast<double>(observed) / trials) + " vs " + num(static_cast<double>(prob)) + ")");
  };
  report("ShBF false positives", shbf_fp, an::shbf_fpp_overall(p));
  report("ShBF multi-matches", shbf_multi, an::shbf_isep(p));
  report("SBF false positives", sbf_fp, an::sbf_fpp(p));
  report("SBF inter-set errors", sbf_err, an::sbf_isep_overall(p));
}

void ac8(Criterion& cr) {
  const std::vector<std::uint32_t> s_values{1, 2, 4, 16, 64, 128, 255};
  std::vector<x::RunConfig> configs;
  for (const std::uint32_t k : {1U, 3U, 10U}) {
    const auto part = x::cost_configs(1ULL << 16, k, s_values, kSeed);
    configs.insert(configs.end(), part.begin(), part.end());
  }
  const auto reports = x::run_cost_experiment(configs, 2000);
  std::uint64_t flagged = 0;
  for (const auto& r : reports) flagged += r.flagged();
  cr.check(flagged == 0, std::to_string(reports.size() - flagged) + "/" + std::to_string(reports.size()) +
                             " configs: every query's hash count and cell reads match the model");

  bool linear = true, constant = true;
  for (const auto& r : reports) {
    const double h = *r.hashes_per_query;
    if (r.config.kind == FilterKind::shbf) {
      linear = linear && h == r.config.k + r.config.s - 1.0;
    } else {
      constant = constant && h == r.config.k;
    }
    if (r.config.k == 10 && r.config.s == 255) {
      cr.check(h == (r.config.kind == FilterKind::shbf ? 264.0 : 10.0),
               std::string(to_string(r.config.kind)) + " k=10 s=255: " + num(h) + " hashes/query");
    }
  }
  cr.check(linear, "ShBF hashes/query = k + s - 1 (linear in s)");
  cr.check(constant, "SBF hashes/query = k (constant in s)");
}

void ac9(Criterion& cr) {
  const auto data = wl::gen_uniform(kS, kPerSet, kSeed);
  const auto rows = x::run_word_size_sweep({kM23, kK, kS}, data, x::default_word_sizes(), kSeed);
  const auto unbounded = rows.back().tally->multi_matches();
  std::string series;
  for (const auto& r : rows) {
    series += (r.config.mode == msf::ShiftMode::word_bounded ? "2^" + std::to_string(std::countr_zero(r.config.w))
                                                              : std::string("unbounded")) +
              "=" + std::to_string(r.tally->multi_matches()) + " ";
  }
  cr.check(true, "multi-matches: " + series);

  const auto w10 = rows.front().tally->multi_matches();
  cr.check(w10 >= 10 * std::max<std::uint64_t>(unbounded, 1),
           "w=2^10: " + std::to_string(w10) + " >= 10 x unbounded " + std::to_string(unbounded));

  const auto& w16 = rows[3];
  const auto band = x::count_band(static_cast<double>(unbounded) / static_cast<double>(data.size()), data.size());
  cr.check(band.contains(static_cast<double>(w16.tally->multi_matches())),
           "w=2^16: " + std::to_string(w16.tally->multi_matches()) + " in " + band_text(band) + " around unbounded");

  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    monotone = monotone && rows[i].tally->multi_matches() <= rows[i - 1].tally->multi_matches();
  }
  cr.check(monotone, "non-increasing as w grows");
}

void ac10(Criterion& cr) {
  std::mt19937_64 rng(kSeed);
  std::uint64_t mismatches = 0, image_diffs = 0, probes = 0;
  for (int build = 0; build < 1000; ++build) {
    const std::uint64_t m = 8 + wl::detail::below(rng, 250);
    const auto k = static_cast<std::uint32_t>(1 + wl::detail::below(rng, 6));
    const auto s = static_cast<std::uint32_t>(1 + wl::detail::below(rng, 16));
    const std::uint64_t seed = rng();
    auto data = wl::gen_random(s, s + wl::detail::below(rng, 2 * m / k + 1), seed);
    msf::SpatialFilter f(m, k, s, seed);
    for (const auto& e : data.entries) f.insert(e.element, e.label);
    f.seal();

    std::vector<std::string> elements;
    for (const auto& e : data.entries) elements.push_back(e.element);
    const auto ne = wl::gen_non_elements(20, seed, data);
    elements.insert(elements.end(), ne.elements.begin(), ne.elements.end());
    for (const auto& e : elements) {
      std::vector<Label> probed;
      for (std::uint32_t j = 1; j <= k; ++j) probed.push_back(f.cell(f.family().cell_index(j, e)));
      Label literal = 0;
      for (Label i = 1; i <= s; ++i) {
        const bool some = std::find(probed.begin(), probed.end(), i) != probed.end();
        const bool all = std::all_of(probed.begin(), probed.end(), [&](Label v) { return v >= i; });
        if (some && all) literal = i;
      }
      mismatches += f.query(e) != literal;
      ++probes;
    }

    const auto image = msf::codec::encode(f);
    for (int round = 0; round < 3; ++round) {
      std::shuffle(data.entries.begin(), data.entries.end(), rng);
      msf::SpatialFilter g(m, k, s, seed);
      for (const auto& e : data.entries) g.insert(e.element, e.label);
      g.seal();
      image_diffs += msf::codec::encode(g) != image;
    }
  }
  cr.check(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(probes) +
                                " queries differ from the literal predicate over 1000 filters");
  cr.check(image_diffs == 0, std::to_string(image_diffs) + " of 3000 shuffled insertion orders changed the image");
}

void ac11(Criterion& cr) {
  const auto fig = msf::codec::encode(msf::test::spatial_figure_filter());
  const std::vector<std::uint8_t> payload(fig.begin() + msf::codec::kHeaderSize, fig.end());
  cr.check(payload == std::vector<std::uint8_t>{0x01, 0x88, 0xC4, 0x03},
           "16-cell example encodes to payload 01 88 C4 03");

  std::mt19937_64 rng(kSeed);
  std::uint64_t diffs = 0, images = 0;
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t m = 2 + wl::detail::below(rng, 5000);
    const auto k = static_cast<std::uint32_t>(1 + wl::detail::below(rng, 8));
    const auto s = static_cast<std::uint32_t>(1 + wl::detail::below(rng, 300));
    const std::uint64_t seed = rng();
    const auto data = wl::gen_random(s, s + wl::detail::below(rng, 200), seed);
    msf::SpatialFilter sp(m, k, s, seed);
    auto sh = (i % 2) ? msf::ShiftingFilter::word_bounded(m, k, s, 1 + wl::detail::below(rng, m), seed)
                      : msf::ShiftingFilter(m, k, s, seed);
    for (const auto& e : data.entries) {
      sp.insert(e.element, e.label);
      sh.insert(e.element, e.label);
    }
    sp.seal();
    sh.seal();
    for (const auto& img : {msf::codec::encode(sp), msf::codec::encode(sh)}) {
      diffs += msf::codec::encode(msf::codec::decode(img)) != img;
      ++images;
    }
  }
  cr.check(diffs == 0, std::to_string(images - diffs) + "/" + std::to_string(images) +
                           " images survive decode and re-encode byte for byte");
}

}  // namespace

int main() {
  struct Entry {
    const char* id;
    const char* title;
    std::function<void(Criterion&)> run;
  };
  const std::vector<Entry> criteria{
      {"AC1", "entropy of reference counts", ac1},
      {"AC2", "false-positive curve endpoints", ac2},
      {"AC3", "inter-set errors in expectation (255 x 256, m=2^20)", ac3},
      {"AC4", "false-positive rate over 500000 non-elements", ac4},
      {"AC5", "no false negatives over 10^4 random builds", ac5},
      {"AC6", "closed-form identities over a 100-point grid", ac6},
      {"AC7", "small-instance Monte-Carlo (m=64, k=2, s=3, n=6)", ac7},
      {"AC8", "per-query cost counters", ac8},
      {"AC9", "word-size sweep (m=2^23)", ac9},
      {"AC10", "spatial query equals its defining predicate", ac10},
      {"AC11", "codec round trip and hand-packed payload", ac11},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Criterion cr(c.id, c.title);
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(cr);
    } catch (const std::exception& e) {
      cr.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !cr.finish(secs);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
