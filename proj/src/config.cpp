#include "urlab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "urlab/errors.hpp"

namespace urlab {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    auto item = trim(std::string_view(s).substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_number(const std::string& s, std::uint64_t& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Typed access to one section; remembers which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name, std::vector<std::string>& errors)
      : tree_(tree), name_(std::move(name)), errors_(errors) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!has(key)) return std::nullopt;
    return trim(tree_->get<std::string>(key));
  }

  void get(const std::string& key, double& value) {
    if (auto s = raw(key)) {
      if (!parse_number(*s, value)) bad(key, *s, "a real number");
    }
  }

  void get(const std::string& key, std::uint64_t& value) {
    if (auto s = raw(key)) {
      if (!parse_number(*s, value)) bad(key, *s, "a non-negative integer");
    }
  }

  static_assert(std::is_same_v<std::size_t, std::uint64_t>, "size_t keys parse as uint64_t");

  void get(const std::string& key, unsigned& value) {
    std::uint64_t v = value;
    get(key, v);
    value = static_cast<unsigned>(v);
  }

  void get(const std::string& key, bool& value) {
    if (auto s = raw(key)) {
      if (*s == "true" || *s == "1" || *s == "yes") {
        value = true;
      } else if (*s == "false" || *s == "0" || *s == "no") {
        value = false;
      } else {
        bad(key, *s, "true or false");
      }
    }
  }

  void get(const std::string& key, std::string& value) {
    if (auto s = raw(key)) value = *s;
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& value) {
    auto s = raw(key);
    if (!s) return;
    std::vector<T> parsed;
    for (const auto& item : split_list(*s)) {
      T v{};
      if (!parse_number(item, v)) {
        bad(key, item, "a comma-separated list of numbers");
        return;
      }
      parsed.push_back(v);
    }
    value = std::move(parsed);
  }

  void error(const std::string& message) { errors_.push_back("[" + name_ + "] " + message); }

  void report_unknown() {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!used_.count(key)) error("unknown key '" + key + "'");
    }
  }

 private:
  void bad(const std::string& key, const std::string& got, const char* expected) {
    error(key + " = '" + got + "' is not " + expected);
  }

  const pt::ptree* tree_;
  std::string name_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

void parse_filter(Section& s, FilterSpec& spec) {
  std::string family = "finite";
  s.get("family", family);
  if (family == "finite") {
    // Without coeffs the default random-walk filter c = [1] stays in place.
    if (s.has("coeffs")) {
      FiniteFilter f;
      s.get_list("coeffs", f.coeffs);
      spec.family = f;
    }
  } else if (family == "geometric") {
    GeometricFilter f;
    s.get("a", f.a);
    s.get("r", f.r);
    if (!s.has("r")) s.error("geometric filter requires r");
    spec.family = f;
  } else if (family == "polynomial") {
    PolynomialFilter f;
    s.get("a", f.a);
    s.get("p", f.p);
    if (!s.has("p")) s.error("polynomial filter requires p");
    spec.family = f;
  } else {
    s.error("family = '" + family + "' is not one of finite, geometric, polynomial");
  }
  s.get("truncation_lag", spec.truncation_lag);
  s.get("tail_tol", spec.tail_tol);
}

void parse_innovations(Section& s, InnovationSpec& spec, std::vector<std::string>& errors) {
  s.get("sigma_omega_sq", spec.sigma_omega_sq);
  s.get("sigma_sq", spec.sigma_sq);
  s.get("pi", spec.pi);
  std::string family(family_name(spec.family));
  s.get("family", family);
  try {
    spec.family = parse_family(family);
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) errors.push_back("[innovations] " + p);
  }
}

void parse_experiment(Section& s, ExperimentConfig& cfg, std::vector<std::string>& errors) {
  s.get_list("n_grid", cfg.n_grid);
  s.get("reps", cfg.reps);
  s.get("base_seed", cfg.base_seed);
  s.get("output", cfg.output);
  s.get("workers", cfg.workers);
  if (auto list = s.raw("statistics")) {
    cfg.statistics.clear();
    for (const auto& name : split_list(*list)) {
      try {
        cfg.statistics.push_back(parse_statistic(name));
      } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) errors.push_back("[experiment] " + p);
      }
    }
  }
}

void parse_thresholds(Section& s, Thresholds& t) {
  s.get("se_multiplier", t.se_multiplier);
  s.get("fpe_floor", t.fpe_floor);
  s.get("mse_floor", t.mse_floor);
  s.get("cross_floor", t.cross_floor);
  s.get("stationary_floor", t.stationary_floor);
  s.get("slope_rel_tol", t.slope_rel_tol);
  s.get("k1_tol", t.k1_tol);
  s.get("k2_tol", t.k2_tol);
  s.get("k1_max_se", t.k1_max_se);
  s.get("k2_max_se", t.k2_max_se);
  s.get("ks_max", t.ks_max);
  s.get("ks_limit_grid", t.ks_limit_grid);
  s.get("k1", t.k1);
  s.get("k2", t.k2);
}

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

}  // namespace

LabConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("malformed config (line " + std::to_string(e.line()) + "): " + e.message());
  }

  std::vector<std::string> errors;
  static const std::set<std::string> known = {"filter", "innovations", "model", "experiment", "brownian",
                                              "thresholds"};
  for (const auto& [name, child] : tree) {
    if (!known.count(name)) {
      errors.push_back(child.empty() ? "key '" + name + "' outside any section" : "unknown section [" + name + "]");
    }
  }
  auto section = [&](const std::string& name) {
    auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name, errors);
  };

  LabConfig cfg;
  {
    Section s = section("filter");
    parse_filter(s, cfg.experiment.model.filter);
    s.report_unknown();
  }
  {
    Section s = section("innovations");
    parse_innovations(s, cfg.experiment.model.innovations, errors);
    s.report_unknown();
  }
  {
    Section s = section("model");
    s.get("beta", cfg.experiment.model.beta);
    if (s.has("varsigma")) {
      double v = 0.0;
      s.get("varsigma", v);
      cfg.experiment.model.varsigma = v;
    }
    s.report_unknown();
  }
  {
    Section s = section("experiment");
    parse_experiment(s, cfg.experiment, errors);
    s.report_unknown();
  }
  {
    Section s = section("brownian");
    s.get("grid", cfg.brownian.grid);
    s.get("reps", cfg.brownian.reps);
    s.get("refine", cfg.brownian.refine);
    s.get("batches", cfg.brownian.batches);
    s.report_unknown();
  }
  {
    Section s = section("thresholds");
    parse_thresholds(s, cfg.thresholds);
    s.report_unknown();
  }

  for (auto& p : validation_errors(cfg.experiment)) errors.push_back(std::move(p));
  if (cfg.brownian.grid < 2) errors.emplace_back("[brownian] grid >= 2 violated");
  if (cfg.brownian.batches < 2) errors.emplace_back("[brownian] batches >= 2 violated");
  if (cfg.brownian.reps < 2 * cfg.brownian.batches) errors.emplace_back("[brownian] reps >= 2 * batches violated");
  if (!(cfg.thresholds.se_multiplier > 0.0)) errors.emplace_back("[thresholds] se_multiplier > 0 violated");
  if (cfg.thresholds.ks_limit_grid < 2) errors.emplace_back("[thresholds] ks_limit_grid >= 2 violated");

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

LabConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const LabConfig& c) {
  std::ostringstream o;
  const auto& m = c.experiment.model;
  o << "[filter]\n";
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FiniteFilter>) {
          o << "family = finite\ncoeffs = " << join(f.coeffs) << "\n";
        } else if constexpr (std::is_same_v<T, GeometricFilter>) {
          o << "family = geometric\na = " << fmt(f.a) << "\nr = " << fmt(f.r) << "\n";
        } else {
          o << "family = polynomial\na = " << fmt(f.a) << "\np = " << fmt(f.p) << "\n";
        }
      },
      m.filter.family);
  o << "truncation_lag = " << m.filter.truncation_lag << "\n";
  o << "tail_tol = " << fmt(m.filter.tail_tol) << "\n\n";

  o << "[innovations]\n";
  o << "family = " << family_name(m.innovations.family) << "\n";
  o << "sigma_omega_sq = " << fmt(m.innovations.sigma_omega_sq) << "\n";
  o << "sigma_sq = " << fmt(m.innovations.sigma_sq) << "\n";
  o << "pi = " << fmt(m.innovations.pi) << "\n\n";

  o << "[model]\nbeta = " << fmt(m.beta) << "\n";
  if (m.varsigma) o << "varsigma = " << fmt(*m.varsigma) << "\n";
  o << "\n";

  const auto& e = c.experiment;
  o << "[experiment]\n";
  o << "n_grid = " << join(e.n_grid) << "\n";
  o << "reps = " << e.reps << "\n";
  o << "base_seed = " << e.base_seed << "\n";
  o << "statistics = ";
  for (std::size_t i = 0; i < e.statistics.size(); ++i) o << (i ? ", " : "") << statistic_name(e.statistics[i]);
  o << "\noutput = " << e.output << "\n";
  o << "workers = " << e.workers << "\n\n";

  const auto& b = c.brownian;
  o << "[brownian]\ngrid = " << b.grid << "\nreps = " << b.reps << "\nrefine = " << (b.refine ? "true" : "false")
    << "\nbatches = " << b.batches << "\n\n";

  const auto& t = c.thresholds;
  o << "[thresholds]\n";
  o << "se_multiplier = " << fmt(t.se_multiplier) << "\n";
  o << "fpe_floor = " << fmt(t.fpe_floor) << "\n";
  o << "mse_floor = " << fmt(t.mse_floor) << "\n";
  o << "cross_floor = " << fmt(t.cross_floor) << "\n";
  o << "stationary_floor = " << fmt(t.stationary_floor) << "\n";
  o << "slope_rel_tol = " << fmt(t.slope_rel_tol) << "\n";
  o << "k1_tol = " << fmt(t.k1_tol) << "\n";
  o << "k2_tol = " << fmt(t.k2_tol) << "\n";
  o << "k1_max_se = " << fmt(t.k1_max_se) << "\n";
  o << "k2_max_se = " << fmt(t.k2_max_se) << "\n";
  o << "ks_max = " << fmt(t.ks_max) << "\n";
  o << "ks_limit_grid = " << t.ks_limit_grid << "\n";
  o << "k1 = " << fmt(t.k1) << "\n";
  o << "k2 = " << fmt(t.k2) << "\n";
  return o.str();
}

ConstantsConfig constants_config(const LabConfig& config) {
  ConstantsConfig c;
  c.m = config.brownian.grid;
  c.reps = config.brownian.reps;
  c.base_seed = config.experiment.base_seed;
  c.workers = config.experiment.workers;
  c.with_cross = true;
  c.refine = config.brownian.refine;
  c.batches = config.brownian.batches;
  return c;
}

}  // namespace urlab
