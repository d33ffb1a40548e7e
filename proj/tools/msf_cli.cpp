// msf: build, query and analyse multi-set filters, and run the comparison
// experiments.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 tolerance violation.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msf/msf.hpp"

namespace {

namespace fs = std::filesystem;
using msf::FilterKind;
using msf::Label;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kTolerance = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(long double v) { return msf::experiments::format_real(static_cast<double>(v)); }

// --m and --m-exp name the same quantity.
struct CellCount {
  std::optional<std::uint64_t> plain;
  std::optional<unsigned> exp;

  void add_to(CLI::App& app, const std::string& what = "cells") {
    auto* a = app.add_option("--m", plain, "number of " + what);
    auto* b = app.add_option("--m-exp", exp, "number of " + what + " as a power of two")->check(CLI::Range(1, 62));
    a->excludes(b);
  }
  std::optional<std::uint64_t> value() const {
    if (exp) return std::uint64_t{1} << *exp;
    return plain;
  }
  std::uint64_t require(const char* cmd) const {
    const auto v = value();
    if (!v) throw UsageError(std::string(cmd) + ": --m or --m-exp is required");
    return *v;
  }
};

FilterKind parse_kind(const std::string& s) { return s == "shbf" ? FilterKind::shbf : FilterKind::sbf; }

void warn_if_biased(std::uint64_t m) {
  if (m < 2 || (m & (m - 1)) == 0) return;
  std::cerr << "warning: m = " << m << " is not a power of two; modulo reduction is slightly biased\n";
}

std::ifstream open_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw msf::io::IoError("cannot open " + path);
  return in;
}

// Digest table lines: <ordinal> <hex element> <digest>
msf::DigestTable read_script(const std::string& path) {
  auto in = open_text(path);
  msf::DigestTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::uint32_t ordinal = 0;
    std::string hex;
    std::uint64_t digest = 0;
    if (!(row >> ordinal >> hex >> digest)) {
      throw msf::DataError(path + ":" + std::to_string(lineno) + ": expected '<ordinal> <hex> <digest>'");
    }
    table.set(ordinal, msf::workload::from_hex(hex), digest);
  }
  return table;
}

std::string render(const msf::CandidateSet& gamma) {
  if (gamma.empty()) return "none";
  std::string out;
  for (const auto l : gamma) out += (out.empty() ? "" : ",") + std::to_string(l);
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    msf::io::write_file_atomic(out_path, text);
  }
}

// ---------------------------------------------------------------------------
// build

struct BuildArgs {
  std::string kind = "sbf";
  CellCount m;
  std::uint32_t k = 10;
  std::optional<std::uint32_t> s;
  std::optional<std::uint64_t> w;
  std::uint64_t seed = 0;
  std::string data;
  std::string out;
  std::string script;
};

template <class Filter>
void fill(Filter& f, const msf::workload::Dataset& data) {
  for (const auto& e : data.entries) f.insert(e.element, e.label);
  f.seal();
}

int cmd_build(const BuildArgs& a) {
  const auto m = a.m.require("build");
  warn_if_biased(m);
  auto in = open_text(a.data);
  const auto data = msf::workload::read_dataset(in);
  const std::uint32_t s = a.s.value_or(data.s);
  if (s < 1) throw UsageError("build: dataset is empty; give --s");
  if (data.s > s) throw msf::DataError("dataset label " + std::to_string(data.s) + " exceeds s = " + std::to_string(s));
  if (a.w && a.kind != "shbf") throw UsageError("build: --w applies to shbf only");

  const msf::HashFamilyConfig cfg{a.seed, a.k, s, m};
  auto family = a.script.empty() ? msf::HashFamily(cfg) : msf::HashFamily::scripted(cfg, read_script(a.script));
  std::vector<std::uint8_t> image;
  std::ostringstream summary;
  summary << "filter: " << a.kind << "\nm: " << m << "\nk: " << a.k << "\ns: " << s << '\n';
  if (a.kind == "shbf") {
    msf::ShiftingFilter f(std::move(family), a.w ? msf::ShiftMode::word_bounded : msf::ShiftMode::circular,
                          a.w.value_or(0));
    fill(f, data);
    image = msf::codec::encode(f);
    if (a.w) summary << "w: " << *a.w << '\n';
    summary << "bits: " << f.bit_length() << "\nelements: " << data.size() << "\nfill ratio: " << fmt(f.fill_ratio())
            << '\n';
  } else {
    msf::SpatialFilter f(std::move(family));
    fill(f, data);
    image = msf::codec::encode(f);
    summary << "cell bits: " << f.cell_bits() << "\nbits: " << f.bit_length() << "\nelements: " << data.size()
            << "\nfill ratio: " << fmt(f.fill_ratio()) << '\n';
  }
  msf::io::write_file_atomic(a.out, image);
  summary << "image bytes: " << image.size() << '\n';
  std::cout << summary.str();
  return kOk;
}

// ---------------------------------------------------------------------------
// query

struct QueryArgs {
  std::string image;
  std::string element;
  std::string file;
  std::string script;
  bool summary = false;
};

int cmd_query(const QueryArgs& a) {
  auto filter = msf::codec::decode(msf::io::read_file(a.image));
  if (!a.script.empty()) {
    auto table = read_script(a.script);
    filter = std::visit(
        [&](const auto& f) -> msf::codec::AnyFilter {
          auto family = msf::HashFamily::scripted(f.family().config(), table);
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, msf::ShiftingFilter>) {
            return msf::ShiftingFilter::from_cells(std::move(family), f.mode(), f.word_size(), f.cells());
          } else {
            return msf::SpatialFilter::from_cells(std::move(family), f.cells());
          }
        },
        filter);
  }
  std::visit([](const auto& f) { warn_if_biased(f.m()); }, filter);

  std::vector<msf::workload::TextRecord> probes;
  if (!a.element.empty()) {
    probes.push_back({msf::workload::from_hex(a.element), 0});
  } else {
    auto in = open_text(a.file);
    probes = msf::workload::read_records(in);
  }

  std::uint64_t positives = 0, labelled = 0, label_found = 0;
  std::ostringstream out;
  for (const auto& p : probes) {
    std::string verdict;
    bool positive = false, found = false;
    if (const auto* sh = std::get_if<msf::ShiftingFilter>(&filter)) {
      const auto gamma = sh->query(p.element);
      verdict = render(gamma);
      positive = !gamma.empty();
      found = p.label != 0 && gamma.contains(p.label);
    } else {
      const Label v = std::get<msf::SpatialFilter>(filter).query(p.element);
      verdict = std::to_string(v);
      positive = v != 0;
      found = p.label != 0 && v >= p.label;
    }
    positives += positive;
    labelled += p.label != 0;
    label_found += found;
    if (!a.summary) out << verdict << '\n';
  }
  if (a.summary) {
    out << "queries: " << probes.size() << "\npositives: " << positives << "\npositive fraction: "
        << fmt(probes.empty() ? 0.0 : static_cast<double>(positives) / static_cast<double>(probes.size())) << '\n';
    if (labelled > 0) out << "labels recovered: " << label_found << '/' << labelled << '\n';
  }
  std::cout << out.str();
  return kOk;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string formula;
  std::string filter = "shbf";
  CellCount m;
  std::uint32_t k = 10;
  std::optional<std::uint32_t> s;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> per_set;
  std::vector<std::uint64_t> counts;
  std::optional<std::uint32_t> i;
  std::uint64_t c = 0;
  std::uint64_t e = 0;
  std::vector<std::uint64_t> u;
};

const std::vector<std::string>& formula_names() {
  static const std::vector<std::string> names{"bf-fpp",          "shbf-fpp",          "shbf-fpp-specific",
                                              "shbf-isep",       "shbf-isep-card",    "sbf-fpp",
                                              "sbf-fpp-specific", "sbf-isep-specific", "sbf-isep",
                                              "fill",            "entropy",           "cost"};
  return names;
}

msf::analytics::FilterParams analyze_params(const AnalyzeArgs& a, bool need_counts) {
  const auto m = a.m.require("analyze");
  if (!a.counts.empty()) return msf::analytics::FilterParams::with_counts(m, a.k, a.counts);
  if (!a.s) throw UsageError("analyze " + a.formula + ": --s is required");
  if (a.per_set) return msf::analytics::FilterParams::uniform(m, a.k, *a.s, *a.per_set);
  if (need_counts) throw UsageError("analyze " + a.formula + ": needs --per-set or --counts");
  if (!a.n) throw UsageError("analyze " + a.formula + ": --n is required");
  return {m, a.k, *a.s, *a.n, std::nullopt};
}

std::uint32_t require_i(const AnalyzeArgs& a) {
  if (!a.i) throw UsageError("analyze " + a.formula + ": --i is required");
  return *a.i;
}

int cmd_analyze(const AnalyzeArgs& a) {
  namespace an = msf::analytics;
  const auto& f = a.formula;
  if (f == "entropy") {
    msf::OutcomeTally t;
    t.c = a.c;
    t.e = a.e;
    t.u.assign(2, 0);
    t.u.insert(t.u.end(), a.u.begin(), a.u.end());
    std::cout << fmt(an::entropy(t)) << '\n';
    return kOk;
  }
  if (f == "cost") {
    if (!a.s) throw UsageError("analyze cost: --s is required");
    const auto cost = an::cost_model(parse_kind(a.filter), a.k, *a.s);
    std::cout << "lookups/query: " << cost.lookups_per_query << "\nhashes/query: " << cost.hashes_per_query
              << "\ncells read: " << cost.cells_read_min << ".." << cost.cells_read_max << '\n';
    return kOk;
  }
  if (f == "bf-fpp" || f == "fill") {
    const auto m = a.m.require("analyze");
    std::uint64_t n = 0;
    if (a.n) {
      n = *a.n;
    } else if (!a.counts.empty()) {
      for (const auto c : a.counts) n += c;
    } else {
      throw UsageError("analyze " + f + ": --n is required");
    }
    const auto v = f == "fill" ? 1 - an::empty_cell_probability(m, a.k, n) : an::bf_fpp(m, a.k, n);
    std::cout << fmt(v) << '\n';
    return kOk;
  }

  long double v = 0;
  if (f == "shbf-fpp") {
    v = an::shbf_fpp_overall(analyze_params(a, false));
  } else if (f == "shbf-fpp-specific") {
    v = an::shbf_fpp_specific(analyze_params(a, false));
  } else if (f == "shbf-isep") {
    v = an::shbf_isep(analyze_params(a, false));
  } else if (f == "shbf-isep-card") {
    v = an::shbf_isep_cardinality(analyze_params(a, false), require_i(a));
  } else if (f == "sbf-fpp") {
    v = an::sbf_fpp(analyze_params(a, false));
  } else if (f == "sbf-fpp-specific") {
    v = an::sbf_fpp_specific(analyze_params(a, true), require_i(a));
  } else if (f == "sbf-isep-specific") {
    v = an::sbf_isep_specific(analyze_params(a, true), require_i(a));
  } else if (f == "sbf-isep") {
    v = an::sbf_isep_overall(analyze_params(a, true));
  } else {
    throw UsageError("analyze: unknown formula '" + f + "'");
  }
  std::cout << fmt(v) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  std::string name;
  std::uint64_t seed = 7;
  std::string out;
  bool timing = false;
  CellCount m;
  std::uint32_t k = 10;
  std::uint32_t s = 255;
  std::uint64_t per_set = 256;
  std::uint64_t non_elements = 500000;
  std::uint64_t queries = 1000;
  std::vector<unsigned> word_exps;
  std::vector<unsigned> m_exps;
  std::string filters = "both";
};

std::vector<FilterKind> kinds_of(const std::string& filters) {
  if (filters == "shbf") return {FilterKind::shbf};
  if (filters == "sbf") return {FilterKind::sbf};
  return {FilterKind::shbf, FilterKind::sbf};
}

std::vector<std::uint64_t> powers(const std::vector<unsigned>& exps) {
  std::vector<std::uint64_t> out;
  for (const auto e : exps) out.push_back(std::uint64_t{1} << e);
  return out;
}

int cmd_experiment(const ExperimentArgs& a) {
  namespace x = msf::experiments;
  namespace w = msf::workload;
  std::vector<x::ExperimentReport> reports;
  const auto& n = a.name;

  if (n == "word-sweep") {
    const x::WordSweepConfig base{a.m.value().value_or(std::uint64_t{1} << 23), a.k, a.s};
    const auto data = w::gen_uniform(a.s, a.per_set, a.seed);
    auto sizes = x::default_word_sizes();
    if (!a.word_exps.empty()) {
      sizes.clear();
      for (const auto e : a.word_exps) sizes.emplace_back(std::uint64_t{1} << e);
      sizes.emplace_back(std::nullopt);
    }
    reports = x::run_word_size_sweep(base, data, sizes, a.seed);
  } else if (n == "fpp-sweep") {
    const auto data = w::gen_uniform(a.s, a.per_set, a.seed);
    const auto ne = w::gen_non_elements(a.non_elements, a.seed, data);
    const auto cells = a.m_exps.empty() ? x::default_fpp_cell_counts() : powers(a.m_exps);
    reports = x::run_fpp_sweep(kinds_of(a.filters), cells, data, ne, a.k, a.seed);
  } else if (n == "fpp-curves") {
    const auto ms = a.m_exps.empty() ? std::vector<std::uint64_t>{1ULL << 20, 1ULL << 23} : powers(a.m_exps);
    reports = x::run_fpp_curves(ms, a.k, a.s * a.per_set, 1, a.s);
  } else if (n == "interset") {
    const auto configs = x::interset_configs(a.k, a.s, a.seed);
    for (const auto& [label, data] :
         {std::pair{"interset-uniform", w::gen_uniform(a.s, a.per_set, a.seed)},
          std::pair{"interset-random", w::gen_random(a.s, a.s * a.per_set, a.seed)}}) {
      auto part = x::run_interset_experiment(data, configs, label);
      reports.insert(reports.end(), part.begin(), part.end());
    }
  } else if (n == "cost") {
    std::vector<std::uint32_t> s_values;
    for (std::uint32_t s = 1; s < a.s; s *= 2) s_values.push_back(s);
    s_values.push_back(a.s);
    reports = x::run_cost_experiment(x::cost_configs(a.m.value().value_or(1ULL << 20), a.k, s_values, a.seed),
                                     a.queries);
  } else {
    throw UsageError("experiment: unknown name '" + n + "'");
  }

  std::string out = a.out;
  if (!out.empty() && fs::is_directory(out)) out = (fs::path(out) / (n + ".csv")).string();
  emit(x::to_csv(reports, a.timing), out);

  bool flagged = false;
  for (const auto& r : reports) {
    for (const auto& f : r.flags) {
      std::cerr << "tolerance: " << f << '\n';
      flagged = true;
    }
  }
  return flagged ? kTolerance : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-set membership filters: build, query, analyse, experiment"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "build a filter image from a labelled dataset");
  b->add_option("--filter", build.kind, "shbf or sbf")->check(CLI::IsMember({"shbf", "sbf"}));
  build.m.add_to(*b);
  b->add_option("--k", build.k, "hash functions")->check(CLI::PositiveNumber);
  b->add_option("--s", build.s, "number of sets (default: largest label)")->check(CLI::PositiveNumber);
  b->add_option("--w", build.w, "word size for word-bounded shbf offsets")->check(CLI::PositiveNumber);
  b->add_option("--seed", build.seed, "hash seed");
  b->add_option("--data", build.data, "dataset file (hex<TAB>label per line)")->required();
  b->add_option("--out", build.out, "image path")->required();
  b->add_option("--script", build.script, "digest table replacing the seeded hashes");

  QueryArgs query;
  auto* q = app.add_subcommand("query", "query a filter image");
  q->add_option("--image", query.image, "image path")->required();
  auto* qe = q->add_option("--element", query.element, "hex-encoded element");
  auto* qf = q->add_option("--file", query.file, "file of hex elements, optionally labelled");
  qe->excludes(qf);
  q->add_option("--script", query.script, "digest table replacing the seeded hashes");
  q->add_flag("--summary", query.summary, "print totals instead of one verdict per element");

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "evaluate a closed-form quantity");
  an->add_option("formula", analyze.formula, "formula name")->required()->check(CLI::IsMember(formula_names()));
  an->add_option("--filter", analyze.filter, "shbf or sbf (cost)")->check(CLI::IsMember({"shbf", "sbf"}));
  analyze.m.add_to(*an);
  an->add_option("--k", analyze.k)->check(CLI::PositiveNumber);
  an->add_option("--s", analyze.s)->check(CLI::PositiveNumber);
  an->add_option("--n", analyze.n, "total elements");
  an->add_option("--per-set", analyze.per_set, "elements per set (uniform)");
  an->add_option("--counts", analyze.counts, "per-set element counts")->delimiter(',');
  an->add_option("--i", analyze.i, "set label or candidate-set size")->check(CLI::PositiveNumber);
  an->add_option("--c", analyze.c, "correct answers (entropy)");
  an->add_option("--e", analyze.e, "wrong single answers (entropy)");
  an->add_option("--u", analyze.u, "multi-match counts u2,u3,... (entropy)")->delimiter(',');

  ExperimentArgs exp;
  auto* ex = app.add_subcommand("experiment", "run an experiment and write CSV");
  ex->add_option("name", exp.name, "experiment")
      ->required()
      ->check(CLI::IsMember({"word-sweep", "fpp-sweep", "fpp-curves", "interset", "cost"}));
  ex->add_option("--seed", exp.seed, "seed for datasets and hashes");
  ex->add_option("--out", exp.out, "CSV file or directory (default: stdout)");
  ex->add_flag("--timing", exp.timing, "fill the wall-time column");
  exp.m.add_to(*ex, "cells (word-sweep, cost)");
  ex->add_option("--k", exp.k)->check(CLI::PositiveNumber);
  ex->add_option("--s", exp.s)->check(CLI::PositiveNumber);
  ex->add_option("--per-set", exp.per_set, "elements per set")->check(CLI::PositiveNumber);
  ex->add_option("--non-elements", exp.non_elements, "non-element probes (fpp-sweep)")->check(CLI::PositiveNumber);
  ex->add_option("--queries", exp.queries, "queries per config (cost)")->check(CLI::PositiveNumber);
  ex->add_option("--w-exps", exp.word_exps, "word sizes as powers of two (word-sweep)")->delimiter(',');
  ex->add_option("--m-exps", exp.m_exps, "cell counts as powers of two (fpp-sweep, fpp-curves)")->delimiter(',');
  ex->add_option("--filters", exp.filters, "shbf, sbf or both (fpp-sweep)")
      ->check(CLI::IsMember({"shbf", "sbf", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*b) return cmd_build(build);
    if (*q) {
      if (query.element.empty() && query.file.empty()) throw UsageError("query: give --element or --file");
      return cmd_query(query);
    }
    if (*an) return cmd_analyze(analyze);
    if (*ex) return cmd_experiment(exp);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
