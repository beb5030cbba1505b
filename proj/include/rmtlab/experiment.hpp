#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <array>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rmtlab/ensembles.hpp"
#include "rmtlab/error.hpp"
#include "rmtlab/momentlab.hpp"
#include "rmtlab/semicircle.hpp"
#include "rmtlab/spectral_stats.hpp"
#include "rmtlab/table.hpp"
#include "rmtlab/walks.hpp"

// Experiment configs (INI text), their validation, and the runner that turns
// a config into result tables plus a metadata sidecar.

namespace rmtlab {

inline constexpr std::string_view artifact_version = "0.1.0";

enum class ExperimentKind { selftest, moments, delta, localization, shift, walks, counting_variance };

inline constexpr std::array all_experiment_kinds{
    ExperimentKind::selftest, ExperimentKind::moments,      ExperimentKind::delta,
    ExperimentKind::localization, ExperimentKind::shift,    ExperimentKind::walks,
    ExperimentKind::counting_variance};

constexpr std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::selftest: return "selftest";
    case ExperimentKind::moments: return "moments";
    case ExperimentKind::delta: return "delta";
    case ExperimentKind::localization: return "localization";
    case ExperimentKind::shift: return "shift";
    case ExperimentKind::walks: return "walks";
    case ExperimentKind::counting_variance: return "counting-variance";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_experiment_kind(std::string_view s) {
  for (auto k : all_experiment_kinds)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

enum class OutputFormat { csv, json };

constexpr std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

inline std::optional<SymmetryClass> parse_symmetry_class(std::string_view s) {
  if (s == to_string(SymmetryClass::complex_hermitian)) return SymmetryClass::complex_hermitian;
  if (s == to_string(SymmetryClass::real_symmetric)) return SymmetryClass::real_symmetric;
  return std::nullopt;
}

/// An ensemble without its dimension.
struct EnsembleConfig {
  SymmetryClass symmetry = SymmetryClass::complex_hermitian;
  AtomDistribution off_diagonal = AtomDistribution::gaussian(std::sqrt(0.5));
  AtomDistribution diagonal = AtomDistribution::gaussian(1.0);

  EnsembleSpec spec(std::size_t n) const { return {n, symmetry, off_diagonal, diagonal}; }

  friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

/// Scale that gives an atom of this kind the requested variance.
inline double conventional_scale(AtomKind kind, double variance) {
  return kind == AtomKind::laplace ? std::sqrt(variance / 2.0) : std::sqrt(variance);
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::selftest;
  std::uint64_t seed = 0;
  std::string output;
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;

  std::vector<std::size_t> n_values;
  std::size_t trials = 0;
  std::optional<EnsembleConfig> ensemble_a;
  std::optional<EnsembleConfig> ensemble_b;
  std::vector<int> k_values;
  double finite_size_band = Tolerances::finite_size_band;
  double bulk_ceiling = 1.0;
  double interval_lo = -1.0;
  double interval_hi = 1.0;
  int two_max_m = walks::max_two_walk_edges;
  int four_max_m = walks::max_four_walk_edges;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Every field-level problem found while parsing, one message per field.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : InvalidArgument(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out = "invalid config:";
    for (const auto& e : errors) out += "\n  " + e;
    return out;
  }
  std::vector<std::string> errors_;
};

namespace detail {

struct KindTraits {
  std::set<std::string> keys{};  // [experiment] keys beyond the common ones
  int ensembles = 0;           // required sections; -1 means ensemble_a optional (GUE default)
  bool n_list = false;
  std::vector<std::size_t> default_n{};
  std::size_t default_trials = 0;
  std::size_t min_trials = 1;
  std::vector<int> default_k{};
};

inline KindTraits traits(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::selftest: return {};
    case ExperimentKind::walks: return {.keys = {"two_max_m", "four_max_m"}};
    case ExperimentKind::moments:
      return {.keys = {"n", "trials", "k", "finite_size_band"}, .ensembles = 2,
              .default_n = {40}, .default_trials = 2000, .min_trials = 100, .default_k = {4}};
    case ExperimentKind::delta:
      return {.keys = {"n", "trials"}, .ensembles = -1, .n_list = true,
              .default_n = {100, 200, 400}, .default_trials = 2000};
    case ExperimentKind::localization:
      return {.keys = {"n", "trials", "bulk_ceiling"}, .ensembles = -1, .n_list = true,
              .default_n = {200, 400}, .default_trials = 1000, .min_trials = 500};
    case ExperimentKind::shift:
      return {.keys = {"n", "trials", "k"}, .ensembles = 2, .default_n = {500},
              .default_trials = 1000, .min_trials = 2, .default_k = {2, 4, 8}};
    case ExperimentKind::counting_variance:
      return {.keys = {"n", "trials", "interval_lo", "interval_hi"}, .ensembles = -1,
              .n_list = true, .default_n = {100, 200, 400}, .default_trials = 2000,
              .min_trials = 2};
  }
  return {};
}

inline const std::set<std::string>& common_keys() {
  static const std::set<std::string> keys{"kind", "seed", "output", "format", "threads"};
  return keys;
}

inline const std::set<std::string>& ensemble_keys() {
  static const std::set<std::string> keys{"class", "off_diagonal_kind", "off_diagonal_scale",
                                          "diagonal_kind", "diagonal_scale"};
  return keys;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

template <class T>
std::optional<std::vector<T>> parse_list(std::string_view s) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    auto item = s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    const auto v = parse_number<T>(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <class T>
std::string render_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

class Reader {
 public:
  Reader(const boost::property_tree::ptree& section, std::string name, std::vector<std::string>& errors)
      : section_(section), name_(std::move(name)), errors_(errors) {}

  std::optional<std::string> text(const std::string& key) const {
    const auto v = section_.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '\0'));
    return v ? std::optional<std::string>(*v) : std::nullopt;
  }

  template <class T>
  void number(const std::string& key, T& target) const {
    const auto t = text(key);
    if (!t) return;
    if (const auto v = parse_number<T>(*t)) {
      target = *v;
    } else {
      fail(key, "expected a number, got '" + *t + "'");
    }
  }

  template <class T>
  void list(const std::string& key, std::vector<T>& target) const {
    const auto t = text(key);
    if (!t) return;
    if (auto v = parse_list<T>(*t)) {
      target = std::move(*v);
    } else {
      fail(key, "expected a comma-separated list of numbers, got '" + *t + "'");
    }
  }

  void fail(const std::string& key, const std::string& message) const {
    errors_.push_back(name_ + "." + key + ": " + message);
  }

 private:
  const boost::property_tree::ptree& section_;
  std::string name_;
  std::vector<std::string>& errors_;
};

inline std::optional<AtomDistribution> read_atom(const Reader& r, const std::string& prefix,
                                                 double variance,
                                                 const std::optional<AtomDistribution>& fallback) {
  const auto kind_text = r.text(prefix + "_kind");
  if (!kind_text) {
    if (fallback) {
      if (r.text(prefix + "_scale")) r.fail(prefix + "_scale", "given without " + prefix + "_kind");
      return fallback;
    }
    r.fail(prefix + "_kind", "required");
    return std::nullopt;
  }
  const auto kind = parse_atom_kind(*kind_text);
  if (!kind) {
    r.fail(prefix + "_kind",
           "unknown atom '" + *kind_text + "' (gaussian, bernoulli, laplace, three_point)");
    return std::nullopt;
  }
  double scale = conventional_scale(*kind, variance);
  r.number(prefix + "_scale", scale);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    r.fail(prefix + "_scale", "must be positive and finite");
    return std::nullopt;
  }
  return AtomDistribution(*kind, scale);
}

inline std::optional<EnsembleConfig> read_ensemble(const boost::property_tree::ptree& section,
                                                   const std::string& name,
                                                   std::vector<std::string>& errors) {
  const Reader r(section, name, errors);
  for (const auto& [key, value] : section) {
    if (!ensemble_keys().contains(key)) r.fail(key, "unknown key");
  }
  const auto cls_text = r.text("class");
  if (!cls_text) {
    r.fail("class", "required (complex_hermitian or real_symmetric)");
    return std::nullopt;
  }
  const auto cls = parse_symmetry_class(*cls_text);
  if (!cls) {
    r.fail("class", "expected complex_hermitian or real_symmetric, got '" + *cls_text + "'");
    return std::nullopt;
  }
  const auto off = read_atom(r, "off_diagonal", off_diagonal_variance(*cls), std::nullopt);
  if (!off) return std::nullopt;
  // Real class: every upper-triangular entry, diagonal included, from one atom.
  const auto diag_default = *cls == SymmetryClass::real_symmetric
                                ? *off
                                : AtomDistribution::gaussian(std::sqrt(diagonal_variance(*cls)));
  const auto diag = read_atom(r, "diagonal", diagonal_variance(*cls), diag_default);
  if (!diag) return std::nullopt;
  EnsembleConfig e{*cls, *off, *diag};
  try {
    e.spec(1).validate();
  } catch (const InvalidArgument& ex) {
    errors.push_back(name + ": " + ex.what());
    return std::nullopt;
  }
  return e;
}

}  // namespace detail

/// Checks cross-field constraints. Appends one message per violated field.
inline void validate_config(const ExperimentConfig& c, std::vector<std::string>& errors) {
  const auto t = detail::traits(c.kind);
  const auto field = [&](const std::string& f, const std::string& m) {
    errors.push_back("experiment." + f + ": " + m);
  };
  if (c.output.empty() || c.output.find('/') != std::string::npos)
    field("output", "must be a plain file stem");
  if (c.threads < 1) field("threads", "must be at least 1");
  if (t.keys.contains("n")) {
    if (c.n_values.empty()) field("n", "required");
    if (!t.n_list && c.n_values.size() > 1) field("n", "takes a single dimension");
    for (auto n : c.n_values)
      if (n < 1 || n > 0xFFFFFF) field("n", "each dimension must lie in 1..16777215");
  }
  if (t.keys.contains("trials") && c.trials < t.min_trials)
    field("trials", "must be at least " + std::to_string(t.min_trials));
  if (c.kind == ExperimentKind::moments) {
    if (c.k_values.empty()) field("k", "required");
    for (int k : c.k_values)
      if (k < 1 || k > 10) field("k", "each power must lie in 1..10");
    if (!(c.finite_size_band >= 0.0)) field("finite_size_band", "must be nonnegative");
  }
  if (c.kind == ExperimentKind::shift) {
    for (int k : c.k_values)
      if (k < 1 || k > 16) field("k", "each power must lie in 1..16");
  }
  if (c.kind == ExperimentKind::localization && !(c.bulk_ceiling > 0.0))
    field("bulk_ceiling", "must be positive");
  if (c.kind == ExperimentKind::counting_variance &&
      !(c.interval_lo > -2.0 && c.interval_hi < 2.0 && c.interval_lo <= c.interval_hi))
    field("interval_lo", "need -2 < interval_lo <= interval_hi < 2");
  if (c.kind == ExperimentKind::walks) {
    if (c.two_max_m < 1 || c.two_max_m > walks::max_two_walk_edges)
      field("two_max_m", "must lie in 1.." + std::to_string(walks::max_two_walk_edges));
    if (c.four_max_m < 1 || c.four_max_m > walks::max_four_walk_edges)
      field("four_max_m", "must lie in 1.." + std::to_string(walks::max_four_walk_edges));
  }
  if (t.ensembles == 2 && c.ensemble_a && c.ensemble_b) {
    if (c.ensemble_a->symmetry != c.ensemble_b->symmetry)
      errors.push_back("ensemble_b.class: must match ensemble_a.class");
    if (c.kind == ExperimentKind::shift) {
      for (const auto* e : {&*c.ensemble_a, &*c.ensemble_b})
        if (atom_moment(e->off_diagonal, 3) != 0.0)
          errors.push_back("ensemble: off-diagonal atoms must have vanishing third moment");
      if (c.ensemble_a->symmetry == c.ensemble_b->symmetry &&
          fourth_gap(c.ensemble_a->off_diagonal, c.ensemble_b->off_diagonal) == 0.0)
        errors.push_back(
            "ensemble_b.off_diagonal_kind: fourth moment equals ensemble_a's (kappa0 = 0), "
            "the shift experiment is degenerate");
    }
  }
}

/// Parses INI text into a validated config. `seed_override` replaces (or
/// supplies) the seed. Throws ConfigError listing every field problem.
inline ExperimentConfig parse_config(const std::string& text,
                                     std::optional<std::uint64_t> seed_override = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("syntax: ") + e.message() + " (line " +
                       std::to_string(e.line()) + ")"});
  }

  std::vector<std::string> errors;
  ExperimentConfig c;
  const auto exp_it = tree.find("experiment");
  if (exp_it == tree.not_found()) throw ConfigError({"experiment: section required"});
  const auto& exp = exp_it->second;
  const detail::Reader r(exp, "experiment", errors);

  const auto kind_text = r.text("kind");
  if (!kind_text) throw ConfigError({"experiment.kind: required"});
  const auto kind = parse_experiment_kind(*kind_text);
  if (!kind) throw ConfigError({"experiment.kind: unknown kind '" + *kind_text + "'"});
  c.kind = *kind;
  const auto t = detail::traits(c.kind);

  for (const auto& [key, value] : exp) {
    if (!value.empty()) {
      errors.push_back("experiment." + key + ": nested keys are not allowed");
    } else if (!detail::common_keys().contains(key) && !t.keys.contains(key)) {
      errors.push_back("experiment." + key + ": unknown key for kind " + std::string(*kind_text));
    }
  }

  if (seed_override) {
    c.seed = *seed_override;
    if (const auto s = r.text("seed"); s && !detail::parse_number<std::uint64_t>(*s))
      r.fail("seed", "expected an unsigned 64-bit integer, got '" + *s + "'");
  } else if (!r.text("seed")) {
    r.fail("seed", "required (no default seed)");
  } else {
    const auto s = *r.text("seed");
    if (const auto v = detail::parse_number<std::uint64_t>(s)) {
      c.seed = *v;
    } else {
      r.fail("seed", "expected an unsigned 64-bit integer, got '" + s + "'");
    }
  }

  c.output = r.text("output").value_or(std::string(to_string(c.kind)));
  if (const auto f = r.text("format")) {
    if (*f == "csv") {
      c.format = OutputFormat::csv;
    } else if (*f == "json") {
      c.format = OutputFormat::json;
    } else {
      r.fail("format", "expected csv or json, got '" + *f + "'");
    }
  }
  r.number("threads", c.threads);

  c.n_values = t.default_n;
  c.trials = t.default_trials;
  c.k_values = t.default_k;
  if (t.keys.contains("n")) r.list("n", c.n_values);
  if (t.keys.contains("trials")) r.number("trials", c.trials);
  if (t.keys.contains("k")) r.list("k", c.k_values);
  if (t.keys.contains("finite_size_band")) r.number("finite_size_band", c.finite_size_band);
  if (t.keys.contains("bulk_ceiling")) r.number("bulk_ceiling", c.bulk_ceiling);
  if (t.keys.contains("interval_lo")) r.number("interval_lo", c.interval_lo);
  if (t.keys.contains("interval_hi")) r.number("interval_hi", c.interval_hi);
  if (t.keys.contains("two_max_m")) r.number("two_max_m", c.two_max_m);
  if (t.keys.contains("four_max_m")) r.number("four_max_m", c.four_max_m);

  const std::set<std::string> sections{"experiment", "ensemble_a", "ensemble_b"};
  for (const auto& [name, section] : tree) {
    if (!sections.contains(name)) {
      errors.push_back(name + ": unknown section");
    } else if (section.empty() && !section.data().empty()) {
      errors.push_back(name + ": expected a section, found a bare key");
    }
  }
  const auto read_section = [&](const char* name, bool allowed, bool required,
                                std::optional<EnsembleConfig>& target) {
    const auto it = tree.find(name);
    if (it == tree.not_found()) {
      if (required) errors.push_back(std::string(name) + ": section required for kind " +
                                     std::string(to_string(c.kind)));
      return;
    }
    if (!allowed) {
      errors.push_back(std::string(name) + ": unknown field for kind " +
                       std::string(to_string(c.kind)));
      return;
    }
    target = detail::read_ensemble(it->second, name, errors);
  };
  read_section("ensemble_a", t.ensembles != 0, t.ensembles == 2, c.ensemble_a);
  read_section("ensemble_b", t.ensembles == 2, t.ensembles == 2, c.ensemble_b);
  if (t.ensembles == -1 && !c.ensemble_a && !tree.count("ensemble_a"))
    c.ensemble_a = EnsembleConfig{};  // GUE

  if (errors.empty()) validate_config(c, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

/// INI text that parses back to `c`. Every field is written explicitly.
inline std::string render_config(const ExperimentConfig& c) {
  const auto t = detail::traits(c.kind);
  std::ostringstream os;
  os << "[experiment]\n";
  os << "kind = " << to_string(c.kind) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "output = " << c.output << "\n";
  os << "format = " << to_string(c.format) << "\n";
  os << "threads = " << c.threads << "\n";
  if (t.keys.contains("n")) os << "n = " << detail::render_list(c.n_values) << "\n";
  if (t.keys.contains("trials")) os << "trials = " << c.trials << "\n";
  if (t.keys.contains("k")) os << "k = " << detail::render_list(c.k_values) << "\n";
  if (t.keys.contains("finite_size_band"))
    os << "finite_size_band = " << format_double(c.finite_size_band) << "\n";
  if (t.keys.contains("bulk_ceiling")) os << "bulk_ceiling = " << format_double(c.bulk_ceiling) << "\n";
  if (t.keys.contains("interval_lo")) os << "interval_lo = " << format_double(c.interval_lo) << "\n";
  if (t.keys.contains("interval_hi")) os << "interval_hi = " << format_double(c.interval_hi) << "\n";
  if (t.keys.contains("two_max_m")) os << "two_max_m = " << c.two_max_m << "\n";
  if (t.keys.contains("four_max_m")) os << "four_max_m = " << c.four_max_m << "\n";
  const auto section = [&](const char* name, const std::optional<EnsembleConfig>& e) {
    if (!e) return;
    os << "\n[" << name << "]\n";
    os << "class = " << to_string(e->symmetry) << "\n";
    os << "off_diagonal_kind = " << to_string(e->off_diagonal.kind()) << "\n";
    os << "off_diagonal_scale = " << format_double(e->off_diagonal.scale()) << "\n";
    os << "diagonal_kind = " << to_string(e->diagonal.kind()) << "\n";
    os << "diagonal_scale = " << format_double(e->diagonal.scale()) << "\n";
  };
  section("ensemble_a", c.ensemble_a);
  section("ensemble_b", c.ensemble_b);
  return os.str();
}

// ---------------------------------------------------------------------------
// Runner.

enum ExitCode : int { exit_success = 0, exit_validation = 1, exit_numerical = 2 };

struct RunResult {
  int exit_code = exit_success;
  std::string message;
  std::vector<std::filesystem::path> files;
  nlohmann::ordered_json results;
};

namespace detail {

inline nlohmann::ordered_json describe(const EnsembleConfig& e) {
  return {{"class", to_string(e.symmetry)},
          {"off_diagonal", e.off_diagonal.name()},
          {"diagonal", e.diagonal.name()}};
}

class Emitter {
 public:
  Emitter(const ExperimentConfig& c, std::filesystem::path dir) : config_(c), dir_(std::move(dir)) {}

  void write(const Table& table, const std::string& stem) {
    std::filesystem::create_directories(dir_);
    const auto path = dir_ / (stem + (config_.format == OutputFormat::csv ? ".csv" : ".json"));
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (config_.format == OutputFormat::csv) {
      table.write_csv(os);
    } else {
      os << table.to_json().dump(2) << '\n';
    }
    if (!os) throw std::runtime_error("failed writing " + path.string());
    files_.push_back(path);
  }

  std::vector<std::filesystem::path>& files() { return files_; }

 private:
  const ExperimentConfig& config_;
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

inline Cell pass_cell(bool ok) { return std::string(ok ? "true" : "false"); }

inline bool run_selftest(Emitter& out, const ExperimentConfig& c, nlohmann::ordered_json& results) {
  Table t(schema::selftest);
  bool all = true;
  const auto row = [&](const std::string& check, int arg, Cell value, Cell expected, bool ok) {
    all = all && ok;
    t.add_row({check, cell(arg), std::move(value), std::move(expected), pass_cell(ok)});
  };
  for (int m = 1; m <= walks::max_modified_catalan_order; ++m) {
    const auto rec = walks::modified_catalan_recurrence(m);
    const auto closed = walks::modified_catalan(m);
    row("modified_catalan_recurrence", m, static_cast<std::int64_t>(rec),
        static_cast<std::int64_t>(closed), rec == closed);
  }
  for (int order : {1, 10, 25}) {
    const bool ok = walks::series_identity_check(order);
    row("series_identity", order, std::int64_t{ok}, std::int64_t{1}, ok);
  }
  for (int m = 1; m <= walks::max_two_walk_edges; ++m) {
    const auto n = walks::count_admissible_walks(m, walks::WalkProfile::two);
    row("two_admissible_walks", m, static_cast<std::int64_t>(n),
        static_cast<std::int64_t>(walks::catalan(m)), n == walks::catalan(m));
  }
  for (int m = 1; m <= walks::max_four_walk_edges; ++m) {
    const auto n = walks::count_admissible_walks(m, walks::WalkProfile::four);
    row("four_admissible_walks", m, static_cast<std::int64_t>(n),
        static_cast<std::int64_t>(walks::modified_catalan(m)), n == walks::modified_catalan(m));
  }
  for (int k = 2; k <= 12; k += 2) {
    const double v = d_moment_integral(k);
    const auto d = static_cast<double>(walks::modified_catalan((k - 2) / 2));
    row("d_moment_integral", k, v, d, std::abs(v - d) <= Tolerances::moment_formula);
  }
  out.write(t, c.output);
  results["all_passed"] = all;
  return all;
}

inline void run_walks(Emitter& out, const ExperimentConfig& c) {
  Table t(schema::walks);
  for (int m = 1; m <= c.two_max_m; ++m)
    t.add_row({std::string("two"), cell(m),
               static_cast<std::int64_t>(walks::count_admissible_walks(m, walks::WalkProfile::two)),
               static_cast<std::int64_t>(walks::catalan(m))});
  for (int m = 1; m <= c.four_max_m; ++m)
    t.add_row({std::string("four"), cell(m),
               static_cast<std::int64_t>(walks::count_admissible_walks(m, walks::WalkProfile::four)),
               static_cast<std::int64_t>(walks::modified_catalan(m))});
  out.write(t, c.output);
}

inline void run_moments(Emitter& out, const ExperimentConfig& c, nlohmann::ordered_json& results) {
  const std::size_t n = c.n_values.front();
  const auto a = c.ensemble_a->spec(n);
  const auto b = c.ensemble_b->spec(n);
  Table t(schema::moments);
  for (int k : c.k_values) {
    const auto uk = static_cast<unsigned>(k);
    const auto est = mc_trace_moment_diff(a, b, uk, c.trials, Seed{c.seed}, c.threads);
    const double target = trace_gap_target(a, b, uk);
    double z = z_score(est, target);
    if (k >= 6 && k % 2 == 0) {
      const double slack = c.finite_size_band / static_cast<double>(n);
      z = band_z_score(est, target * (1.0 - slack), target * (1.0 + slack));
    }
    t.add_row({c.output, cell(n), cell(k), est.value, est.std_error, target, z});
  }
  out.write(t, c.output);
  results["entry_fourth_gap"] = entry_fourth_gap(a, b);
  results["kappa0"] = fourth_gap(a.off_diagonal, b.off_diagonal);
}

inline void run_delta(Emitter& out, const ExperimentConfig& c) {
  Table t(schema::delta);
  for (auto n : c.n_values) {
    const auto r = delta_statistic(c.ensemble_a->spec(n), c.trials, delta_grid(n), Seed{c.seed}, c.threads);
    t.add_row({cell(n), cell(c.trials), r.delta, r.std_error, r.argmax,
               r.delta * static_cast<double>(n)});
  }
  out.write(t, c.output);
}

inline void run_localization(Emitter& out, const ExperimentConfig& c, nlohmann::ordered_json& results) {
  results["profiles"] = nlohmann::json::array();
  for (auto n : c.n_values) {
    const auto spectra = sample_spectra(c.ensemble_a->spec(n), c.trials, Seed{c.seed},
                                        EnsembleRole::a, c.threads);
    const auto p = localization_profile(summarize(spectra), c.bulk_ceiling);
    Table t(schema::profile);
    for (std::size_t i = 0; i < n; ++i)
      t.add_row({cell(i + 1), p.gamma[i], p.second_moment[i], p.std_error[i]});
    const auto stem = c.output + "_n" + std::to_string(n);
    out.write(t, stem);
    results["profiles"].push_back({{"n", n},
                                   {"file", stem},
                                   {"bulk_mean", p.bulk_mean.value},
                                   {"bulk_mean_std_error", p.bulk_mean.std_error},
                                   {"flagged_bulk_indices", p.flagged}});
  }
}

inline void run_shift(Emitter& out, const ExperimentConfig& c, nlohmann::ordered_json& results) {
  const std::size_t n = c.n_values.front();
  const auto curve = shift_experiment(c.ensemble_a->spec(n), c.ensemble_b->spec(n), c.trials,
                                      Seed{c.seed}, c.threads);
  Table t(schema::shift);
  for (std::size_t i = 0; i < n; ++i)
    t.add_row({cell(curve.indices[i]), curve.gamma[i], curve.f1[i], curve.f1_std_error[i],
               curve.f2[i], curve.a.mean[i], curve.b.mean[i], curve.a.median[i],
               curve.b.median[i]});
  out.write(t, c.output);
  results["kappa0"] = curve.kappa0;
  results["bulk_correlation"] = bulk_correlation(curve);
  results["aggregate"] = curve.aggregate;
  results["aggregate_noise"] = curve.aggregate_noise;
  results["aggregate_lower_bound_over_sqrt_n"] = aggregate_lower_bound(curve);
  results["predicted_aggregate"] = predicted_aggregate_shift(n, curve.kappa0);
  results["witness_index"] = curve.witness_index;
  auto sums = nlohmann::ordered_json::array();
  for (const auto& s : normalized_shift_check(curve, c.k_values))
    sums.push_back({{"k", s.k}, {"value", s.value}, {"std_error", s.std_error}});
  results["normalized_shift_sums"] = sums;
}

inline void run_counting_variance(Emitter& out, const ExperimentConfig& c) {
  Table t(schema::counting_variance);
  for (auto n : c.n_values) {
    const auto spectra = sample_spectra(c.ensemble_a->spec(n), c.trials, Seed{c.seed},
                                        EnsembleRole::a, c.threads);
    const auto s = counting_statistics(spectra, c.interval_lo, c.interval_hi);
    t.add_row({cell(n), cell(c.trials), s.lo, s.hi, s.mean, s.variance, s.expected,
               s.variance_over_log_n, s.concentrated_fraction});
  }
  out.write(t, c.output);
}

}  // namespace detail

/// Runs a parsed config, writing tables and `<output>.meta.json` under `dir`.
/// Exit code 1 for validation failures, 2 for numerical failures (including a
/// failed self-test identity).
inline RunResult run(const ExperimentConfig& c, const std::filesystem::path& dir) {
  RunResult result;
  std::vector<std::string> errors;
  validate_config(c, errors);
  if (!errors.empty()) {
    result.exit_code = exit_validation;
    result.message = ConfigError(errors).what();
    return result;
  }
  const auto start = std::chrono::steady_clock::now();
  detail::Emitter out(c, dir);
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  try {
    switch (c.kind) {
      case ExperimentKind::selftest:
        if (!detail::run_selftest(out, c, results)) {
          result.exit_code = exit_numerical;
          result.message = "selftest: at least one identity failed";
        }
        break;
      case ExperimentKind::walks: detail::run_walks(out, c); break;
      case ExperimentKind::moments: detail::run_moments(out, c, results); break;
      case ExperimentKind::delta: detail::run_delta(out, c); break;
      case ExperimentKind::localization: detail::run_localization(out, c, results); break;
      case ExperimentKind::shift: detail::run_shift(out, c, results); break;
      case ExperimentKind::counting_variance: detail::run_counting_variance(out, c); break;
    }
  } catch (const NumericalFailure& e) {
    result.exit_code = exit_numerical;
    result.message = std::string("numerical failure: ") + e.what();
    return result;
  } catch (const std::invalid_argument& e) {
    result.exit_code = exit_validation;
    result.message = e.what();
    return result;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::ordered_json meta;
  meta["artifact"] = "rmtlab";
  meta["version"] = artifact_version;
  meta["kind"] = to_string(c.kind);
  meta["seed"] = c.seed;
  meta["threads"] = c.threads;
  meta["wall_time_seconds"] = seconds;
  meta["config"] = render_config(c);
  if (c.ensemble_a) meta["ensemble_a"] = detail::describe(*c.ensemble_a);
  if (c.ensemble_b) meta["ensemble_b"] = detail::describe(*c.ensemble_b);
  auto files = nlohmann::ordered_json::array();
  for (const auto& f : out.files()) files.push_back(f.filename().string());
  meta["outputs"] = files;
  meta["results"] = results;
  std::filesystem::create_directories(dir);
  const auto meta_path = dir / (c.output + ".meta.json");
  std::ofstream(meta_path, std::ios::binary) << meta.dump(2) << '\n';
  out.files().push_back(meta_path);

  result.files = out.files();
  result.results = std::move(results);
  return result;
}

}  // namespace rmtlab
