#include "biharm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "biharm/operator.hpp"

namespace biharm::cli {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSpectrum: return "spectrum";
    case ExperimentKind::kAsymptotics: return "asymptotics";
    case ExperimentKind::kObservability: return "observability";
    case ExperimentKind::kControl: return "control";
    case ExperimentKind::kSimulate: return "simulate";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view text) {
  for (auto k : {ExperimentKind::kSpectrum, ExperimentKind::kAsymptotics, ExperimentKind::kObservability,
                 ExperimentKind::kControl, ExperimentKind::kSimulate}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& i : issues) {
    os << "\n  ";
    if (i.line > 0) os << "line " << i.line << ": ";
    os << i.message;
  }
  return os.str();
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> entries;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment", {"kind", "elements", "modes", "horizons", "quadrature_order", "output", "dump_matrices"}},
      {"profile", {"length"}},
      {"profile.rho", {"poly", "samples"}},
      {"profile.sigma", {"poly", "samples"}},
      {"profile.q", {"poly", "samples"}},
      {"initial", {"modes", "poly"}},
      {"control", {"method", "waveform_samples", "gram_cap"}},
      {"simulate", {"times"}},
  };
  return keys;
}

bool parse_number(std::string_view text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view text, int& out) {
  const std::string s = trim(text);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Splits "[a, b, (c, d)]" at top-level commas.
bool split_list(std::string_view text, std::vector<std::string>& items) {
  const std::string s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') return false;
  const std::string body = s.substr(1, s.size() - 2);
  if (trim(body).empty()) return true;
  int depth = 0;
  std::string current;
  for (char c : body) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) return false;
    if (c == ',' && depth == 0) {
      items.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (depth != 0) return false;
  items.push_back(trim(current));
  return std::none_of(items.begin(), items.end(), [](const std::string& i) { return i.empty(); });
}

bool parse_number_list(std::string_view text, std::vector<double>& out) {
  std::vector<std::string> items;
  if (!split_list(text, items)) return false;
  for (const auto& i : items) {
    double v;
    if (!parse_number(i, v)) return false;
    out.push_back(v);
  }
  return true;
}

bool parse_tuple(std::string_view text, std::vector<double>& out) {
  const std::string s = trim(text);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') return false;
  return parse_number_list("[" + s.substr(1, s.size() - 2) + "]", out);
}

bool parse_tuple_list(std::string_view text, std::size_t arity, std::vector<std::vector<double>>& out) {
  std::vector<std::string> items;
  if (!split_list(text, items)) return false;
  for (const auto& i : items) {
    std::vector<double> t;
    if (!parse_tuple(i, t) || t.size() != arity) return false;
    out.push_back(std::move(t));
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) { tokenize(text); }

  ExperimentConfig build() {
    ExperimentConfig cfg;
    read_experiment(cfg);
    read_profile(cfg);
    read_initial(cfg);
    read_control(cfg);
    read_simulate(cfg);
    cross_checks(cfg);
    if (!issues_.empty()) {
      std::stable_sort(issues_.begin(), issues_.end(),
                       [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
      throw ConfigError(issues_);
    }
    return cfg;
  }

 private:
  void issue(int line, std::string message) { issues_.push_back({line, std::move(message)}); }

  void tokenize(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    Section* current = nullptr;
    std::string current_name;
    std::string pending_key;
    Entry pending;
    int bracket_balance = 0;
    bool seen_header = false;
    auto finish_pending = [&]() {
      if (pending_key.empty()) return;
      if (bracket_balance != 0) issue(pending.line, "unbalanced brackets in value of '" + pending_key + "'");
      if (current != nullptr) {
        if (current->entries.count(pending_key)) {
          issue(pending.line, "duplicate key '" + pending_key + "' in [" + current_name + "]");
        } else {
          current->entries[pending_key] = pending;
        }
      }
      pending_key.clear();
      bracket_balance = 0;
    };
    auto balance_of = [](const std::string& s) {
      return static_cast<int>(std::count(s.begin(), s.end(), '[')) -
             static_cast<int>(std::count(s.begin(), s.end(), ']'));
    };
    while (std::getline(in, raw)) {
      ++lineno;
      const auto hash = raw.find('#');
      const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (!pending_key.empty() && bracket_balance > 0) {
        if (!line.empty()) {
          pending.value += " " + line;
          bracket_balance += balance_of(line);
        }
        if (bracket_balance <= 0) finish_pending();
        continue;
      }
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
        finish_pending();
        seen_header = true;
        const std::string name = trim(line.substr(1, line.size() - 2));
        if (!known_keys().count(name)) {
          issue(lineno, "unknown section [" + name + "]");
          current = nullptr;
          current_name.clear();
          continue;
        }
        if (sections_.count(name)) {
          issue(lineno, name == "profile" ? std::string("exactly one profile section is allowed")
                                          : "duplicate section [" + name + "]");
          current = nullptr;
          current_name.clear();
          continue;
        }
        sections_[name].line = lineno;
        current = &sections_[name];
        current_name = name;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        issue(lineno, "expected 'key = value' or '[section]'");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (current == nullptr) {
        if (!seen_header) issue(lineno, "key '" + key + "' outside any section");
        continue;
      }
      if (!known_keys().at(current_name).count(key)) {
        issue(lineno, "unknown key '" + key + "' in [" + current_name + "]");
        continue;
      }
      if (value.empty()) {
        issue(lineno, "empty value for '" + key + "'");
        continue;
      }
      pending_key = key;
      pending = {value, lineno};
      bracket_balance = balance_of(value);
      if (bracket_balance <= 0) finish_pending();
    }
    finish_pending();
  }

  const Section* section(const std::string& name) const {
    const auto it = sections_.find(name);
    return it == sections_.end() ? nullptr : &it->second;
  }

  const Entry* entry(const Section* s, const std::string& key) const {
    if (s == nullptr) return nullptr;
    const auto it = s->entries.find(key);
    return it == s->entries.end() ? nullptr : &it->second;
  }

  void require_section(const std::string& name) {
    if (!section(name)) issue(0, "missing section [" + name + "]");
  }

  const Entry* require_key(const std::string& sec, const std::string& key) {
    const Section* s = section(sec);
    if (!s) return nullptr;
    const Entry* e = entry(s, key);
    if (!e) issue(s->line, "missing key '" + key + "' in [" + sec + "]");
    return e;
  }

  void read_positive_int(const Entry* e, const std::string& field, int minimum, int& out) {
    if (!e) return;
    int v;
    if (!parse_int(e->value, v)) {
      issue(e->line, field + ": expected an integer, got '" + e->value + "'");
    } else if (v < minimum) {
      issue(e->line, field + " must be >= " + std::to_string(minimum) + ", got " + std::to_string(v));
    } else {
      out = v;
    }
  }

  void read_experiment(ExperimentConfig& cfg) {
    require_section("experiment");
    if (const Entry* e = require_key("experiment", "kind")) {
      if (const auto k = parse_kind(e->value)) {
        cfg.kind = *k;
        have_kind_ = true;
      } else {
        issue(e->line, "kind: unknown experiment kind '" + e->value +
                           "' (expected spectrum, asymptotics, observability, control or simulate)");
      }
    }
    read_positive_int(require_key("experiment", "elements"), "elements", kMinElements, cfg.elements);
    read_positive_int(require_key("experiment", "modes"), "modes", 1, cfg.modes);
    const Section* s = section("experiment");
    if (const Entry* e = entry(s, "quadrature_order")) read_positive_int(e, "quadrature_order", 2, cfg.quadrature_order);
    if (const Entry* e = entry(s, "output")) cfg.output = e->value;
    if (const Entry* e = entry(s, "dump_matrices")) {
      if (e->value == "true") {
        cfg.dump_matrices = true;
      } else if (e->value != "false") {
        issue(e->line, "dump_matrices: expected true or false");
      }
    }
    if (const Entry* e = entry(s, "horizons")) {
      std::vector<double> h;
      if (!parse_number_list(e->value, h) || h.empty()) {
        issue(e->line, "horizons: expected a nonempty list of numbers");
      } else if (std::any_of(h.begin(), h.end(), [](double v) { return !(v > 0.0); })) {
        issue(e->line, "horizons: every T must be positive");
      } else {
        cfg.horizons = std::move(h);
      }
      horizons_line_ = e->line;
    }
  }

  void read_coefficient(const std::string& name, CoefficientSpec& out, bool required) {
    const std::string sec = "profile." + name;
    const Section* s = section(sec);
    if (!s) {
      if (required) issue(0, "missing section [" + sec + "]");
      return;
    }
    const Entry* poly = entry(s, "poly");
    const Entry* samples = entry(s, "samples");
    if ((poly == nullptr) == (samples == nullptr)) {
      issue(s->line, "[" + sec + "] needs exactly one of 'poly' or 'samples'");
      return;
    }
    if (poly) {
      std::vector<double> c;
      if (!parse_number_list(poly->value, c) || c.empty()) {
        issue(poly->line, name + ".poly: expected a nonempty list of numbers");
      } else {
        out = CoefficientSpec::polynomial(std::move(c));
      }
      return;
    }
    std::vector<std::vector<double>> t;
    if (!parse_tuple_list(samples->value, 2, t) || t.size() < 2) {
      issue(samples->line, name + ".samples: expected a list of at least two (x, value) pairs");
      return;
    }
    std::vector<std::pair<double, double>> table;
    for (const auto& p : t) table.emplace_back(p[0], p[1]);
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (!(table[i].first > table[i - 1].first)) {
        issue(samples->line, name + ".samples: abscissae must be strictly increasing");
        return;
      }
    }
    out = CoefficientSpec::sampled(std::move(table));
  }

  void read_profile(ExperimentConfig& cfg) {
    require_section("profile");
    if (const Entry* e = require_key("profile", "length")) {
      double v;
      if (!parse_number(e->value, v)) {
        issue(e->line, "length: expected a number");
      } else if (!(v > 0.0)) {
        issue(e->line, "length must be positive");
      } else {
        cfg.profile.length = v;
      }
    }
    read_coefficient("rho", cfg.profile.rho, true);
    read_coefficient("sigma", cfg.profile.sigma, true);
    read_coefficient("q", cfg.profile.q, false);
  }

  void read_initial(ExperimentConfig& cfg) {
    const Section* s = section("initial");
    if (!s) return;
    const Entry* modes = entry(s, "modes");
    const Entry* poly = entry(s, "poly");
    if ((modes == nullptr) == (poly == nullptr)) {
      issue(s->line, "[initial] needs exactly one of 'modes' or 'poly'");
      return;
    }
    InitialSpec init;
    if (modes) {
      std::vector<std::vector<double>> t;
      if (!parse_tuple_list(modes->value, 3, t) || t.empty()) {
        issue(modes->line, "initial.modes: expected a list of (n, re, im) triples");
        return;
      }
      for (const auto& row : t) {
        const double n = row[0];
        if (n != std::floor(n) || n < 1) {
          issue(modes->line, "initial.modes: mode index must be a positive integer");
          return;
        }
        init.modes.emplace_back(static_cast<int>(n), std::complex<double>(row[1], row[2]));
      }
      initial_line_ = modes->line;
    } else {
      if (!parse_number_list(poly->value, init.poly) || init.poly.empty()) {
        issue(poly->line, "initial.poly: expected a nonempty list of numbers");
        return;
      }
    }
    cfg.initial = std::move(init);
  }

  void read_control(ExperimentConfig& cfg) {
    const Section* s = section("control");
    if (!s) return;
    if (const Entry* e = entry(s, "method")) {
      if (e->value == "hum") {
        cfg.method = ControlMethod::kHum;
      } else if (e->value == "moment") {
        cfg.method = ControlMethod::kMoment;
      } else {
        issue(e->line, "method: expected 'hum' or 'moment'");
      }
    }
    if (const Entry* e = entry(s, "waveform_samples")) read_positive_int(e, "waveform_samples", 2, cfg.waveform_samples);
    if (const Entry* e = entry(s, "gram_cap")) {
      double v;
      if (!parse_number(e->value, v) || !(v > 1.0)) {
        issue(e->line, "gram_cap: expected a number greater than 1");
      } else {
        cfg.gram_cap = v;
      }
    }
  }

  void read_simulate(ExperimentConfig& cfg) {
    const Section* s = section("simulate");
    if (!s) return;
    if (const Entry* e = entry(s, "times")) {
      if (!parse_number_list(e->value, cfg.times) || cfg.times.empty()) {
        issue(e->line, "simulate.times: expected a nonempty list of numbers");
      }
    }
  }

  void cross_checks(const ExperimentConfig& cfg) {
    if (!have_kind_) return;
    const auto kind = cfg.kind;
    const int exp_line = section("experiment") ? section("experiment")->line : 0;
    if ((kind == ExperimentKind::kObservability || kind == ExperimentKind::kControl) && cfg.horizons.empty() &&
        horizons_line_ == 0) {
      issue(exp_line, "kind " + std::string(to_string(kind)) + " requires 'horizons'");
    }
    if (kind == ExperimentKind::kControl && cfg.horizons.size() > 1) {
      issue(horizons_line_, "kind control takes exactly one horizon");
    }
    if ((kind == ExperimentKind::kControl || kind == ExperimentKind::kSimulate) && !section("initial")) {
      issue(0, "kind " + std::string(to_string(kind)) + " requires an [initial] section");
    }
    if (kind == ExperimentKind::kSimulate && cfg.times.empty() && !section("simulate")) {
      issue(0, "kind simulate requires [simulate] times");
    }
    if (cfg.initial && cfg.modes > 0) {
      for (const auto& [n, c] : cfg.initial->modes) {
        if (n > cfg.modes) {
          issue(initial_line_, "initial.modes: index " + std::to_string(n) + " exceeds modes = " +
                                   std::to_string(cfg.modes));
          break;
        }
      }
    }
  }

  std::map<std::string, Section> sections_;
  std::vector<ConfigIssue> issues_;
  bool have_kind_ = false;
  int horizons_line_ = 0;
  int initial_line_ = 0;
};

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(ErrorKind::kConfig, join_issues(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config(std::string_view text) { return Parser(text).build(); }

}  // namespace biharm::cli
