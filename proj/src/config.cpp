#include "semispec/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

#include "semispec/error.hpp"

namespace semispec {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + t + "'");
  }
  return v;
}

long to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("config: '" + key + "' expects an integer, got '" + t + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::string t = trim(text);
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') t = trim(t.substr(1, t.size() - 2));
  std::vector<std::string> out;
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> v;
  for (const auto& s : split_list(text)) v.push_back(to_double(key, s));
  return v;
}

Interval to_interval(const std::string& key, const std::string& text) {
  const auto v = to_list(key, text);
  if (v.size() != 2) throw ConfigError("config: '" + key + "' expects two bounds 'a, b'");
  return {v[0], v[1]};
}

int positive_int(const std::string& key, const std::string& text) {
  const long v = to_int(key, text);
  if (v < 1 || v > 100000000) throw ConfigError("config: '" + key + "' must be a positive integer");
  return static_cast<int>(v);
}

double positive(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (!(v > 0.0)) throw ConfigError("config: '" + key + "' must be positive");
  return v;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"", {"potential", "regime"}},
      {"domain", {"x", "y"}},
      {"sweep", {"hs", "points_per_scale", "levels", "n_max", "tolerance"}},
      {"solver", {"method", "dense_cap", "tol", "k_per_shift", "max_iterations", "shifts", "extra_shifts"}},
      {"spectrum", {"h"}},
      {"pseudo", {"h", "gamma_factor", "nu_samples", "region", "nx", "ny"}},
      {"decay", {"h", "samples", "t_max", "c0", "gamma_factor"}},
      {"gl", {"Rs"}},
      {"models",
       {"airy_n", "airy_L", "airy_count", "airy_tol", "davies_n", "davies_L", "davies_count", "davies_tol",
        "tensor_n", "tensor_L", "tensor_count", "tensor_tol"}},
      {"output", {"dir"}},
  };
  return k;
}

}  // namespace

int ExperimentConfig::dim() const {
  return domain ? domain_dim(*domain) : 1;
}

const Domain& ExperimentConfig::require_domain() const {
  if (!domain) throw ConfigError("config: [domain] section with 'x' is required");
  return *domain;
}

PotentialProfile ExperimentConfig::profile() const {
  if (!potential) throw ConfigError("config: 'potential' is required");
  return PotentialProfile::parse(*potential, dim());
}

Complex parse_complex(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  }
  static const std::string num = R"(((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))";
  static const std::regex real_only("^([+-]?)" + num + "$");
  static const std::regex imag_only("^([+-]?)" + num + "?[ij]$");
  static const std::regex both("^([+-]?)" + num + "([+-])" + num + "?[ij]$");
  std::smatch m;
  auto sign = [](const std::string& s) { return s == "-" ? -1.0 : 1.0; };
  auto val = [&](const std::ssub_match& s) { return s.matched ? to_double("shift", s.str()) : 1.0; };
  if (std::regex_match(t, m, real_only)) return {sign(m[1]) * val(m[2]), 0.0};
  if (std::regex_match(t, m, imag_only)) return {0.0, sign(m[1]) * val(m[2])};
  if (std::regex_match(t, m, both)) return {sign(m[1]) * val(m[2]), sign(m[3]) * val(m[4])};
  throw ConfigError("config: cannot parse complex number '" + text + "'");
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }

  ExperimentConfig c;
  c.hash = sha256_hex(text);
  const auto& keys = known_keys();

  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    const pt::ptree* node = &tree;
    if (!section.empty()) {
      auto it = tree.find(section);
      if (it == tree.not_found()) return std::nullopt;
      node = &it->second;
    }
    auto it = node->find(key);
    if (it == node->not_found() || !it->second.empty()) return std::nullopt;
    return it->second.data();
  };

  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      if (!keys.at("").count(name)) throw ConfigError("config: unknown top-level key '" + name + "'");
      continue;
    }
    auto sec = keys.find(name);
    if (name.empty() || sec == keys.end()) throw ConfigError("config: unknown section [" + name + "]");
    for (const auto& [key, child] : node) {
      if (!sec->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
    }
  }

  if (auto v = get("", "potential")) {
    if (trim(*v).empty()) throw ConfigError("config: 'potential' is empty");
    c.potential = trim(*v);
  }
  if (auto v = get("", "regime")) {
    const std::string r = lower(trim(*v));
    if (r == "auto") c.regime = RegimeChoice::Auto;
    else if (r == "airy") c.regime = RegimeChoice::Airy;
    else if (r == "morse") c.regime = RegimeChoice::Morse;
    else throw ConfigError("config: regime must be auto, airy or morse");
  }

  if (auto x = get("domain", "x")) {
    const Interval ix = to_interval("domain.x", *x);
    if (auto y = get("domain", "y")) {
      c.domain = Rectangle{ix, to_interval("domain.y", *y)};
    } else {
      c.domain = ix;
    }
    validate_domain(*c.domain);
  } else if (get("domain", "y")) {
    throw ConfigError("config: [domain] has 'y' without 'x'");
  }

  if (auto v = get("sweep", "hs")) {
    const auto hs = to_list("sweep.hs", *v);
    if (hs.empty()) throw ConfigError("hs empty");
    for (double h : hs) {
      if (!(h > 0.0)) throw ConfigError("config: hs must be positive");
    }
    c.hs = hs;
  }
  if (auto v = get("sweep", "points_per_scale")) c.points_per_scale = positive_int("sweep.points_per_scale", *v);
  if (auto v = get("sweep", "levels")) {
    c.levels = positive_int("sweep.levels", *v);
    if (c.levels < 2 || c.levels > 6) throw ConfigError("config: sweep.levels must be in 2..6");
  }
  if (auto v = get("sweep", "n_max")) c.n_max = static_cast<std::size_t>(positive_int("sweep.n_max", *v));
  if (auto v = get("sweep", "tolerance")) c.theory_tolerance = positive("sweep.tolerance", *v);

  if (auto v = get("solver", "method")) {
    const std::string m = lower(trim(*v));
    if (m == "auto") c.solver.method = SolverMethod::Auto;
    else if (m == "dense") c.solver.method = SolverMethod::Dense;
    else if (m == "shift-invert" || m == "shift_invert") c.solver.method = SolverMethod::ShiftInvert;
    else throw ConfigError("config: solver.method must be auto, dense or shift-invert");
  }
  if (auto v = get("solver", "dense_cap")) c.solver.dense_cap = positive_int("solver.dense_cap", *v);
  if (auto v = get("solver", "tol")) c.solver.tol = positive("solver.tol", *v);
  if (auto v = get("solver", "k_per_shift")) c.solver.k_per_shift = positive_int("solver.k_per_shift", *v);
  if (auto v = get("solver", "max_iterations")) c.solver.max_iterations = positive_int("solver.max_iterations", *v);
  for (const char* key : {"shifts", "extra_shifts"}) {
    if (auto v = get("solver", key)) {
      std::vector<Complex> s;
      for (const auto& item : split_list(*v)) {
        const Complex z = parse_complex(item);
        if (z.real() < 0.0) throw ConfigError("config: shifts must have nonnegative real part");
        s.push_back(z);
      }
      if (s.empty()) throw ConfigError(std::string("config: solver.") + key + " is empty");
      (std::string(key) == "shifts" ? c.solver.shifts_override : c.solver.extra_shifts) = s;
    }
  }

  if (auto v = get("spectrum", "h")) c.spectrum_h = positive("spectrum.h", *v);

  if (auto v = get("pseudo", "h")) c.pseudo_h = positive("pseudo.h", *v);
  if (auto v = get("pseudo", "gamma_factor")) c.pseudo_gamma_factor = positive("pseudo.gamma_factor", *v);
  if (auto v = get("pseudo", "nu_samples")) {
    c.nu_samples = positive_int("pseudo.nu_samples", *v);
    if (c.nu_samples < 2) throw ConfigError("config: pseudo.nu_samples must be at least 2");
  }
  if (auto v = get("pseudo", "region")) {
    const auto r = to_list("pseudo.region", *v);
    if (r.size() != 4 || !(r[0] < r[1]) || !(r[2] < r[3])) {
      throw ConfigError("config: pseudo.region expects 're_lo, re_hi, im_lo, im_hi' with ordered bounds");
    }
    c.pseudo_region = Region{r[0], r[1], r[2], r[3]};
  }
  if (auto v = get("pseudo", "nx")) c.pseudo_nx = positive_int("pseudo.nx", *v);
  if (auto v = get("pseudo", "ny")) c.pseudo_ny = positive_int("pseudo.ny", *v);

  if (auto v = get("decay", "h")) c.decay_h = positive("decay.h", *v);
  if (auto v = get("decay", "samples")) {
    c.decay_samples = positive_int("decay.samples", *v);
    if (c.decay_samples < 2) throw ConfigError("config: decay.samples must be at least 2");
  }
  if (auto v = get("decay", "t_max")) c.decay_t_max = positive("decay.t_max", *v);
  if (auto v = get("decay", "c0")) c.c0 = positive("decay.c0", *v);
  if (auto v = get("decay", "gamma_factor")) c.decay_gamma_factor = positive("decay.gamma_factor", *v);

  if (auto v = get("gl", "Rs")) {
    c.Rs = to_list("gl.Rs", *v);
    if (c.Rs.empty()) throw ConfigError("Rs empty");
    for (double R : c.Rs) {
      if (!(R > 0.0)) throw ConfigError("config: Rs must be positive");
    }
  }

  if (auto v = get("models", "airy_n")) c.airy_n = positive_int("models.airy_n", *v);
  if (auto v = get("models", "airy_L")) c.airy_L = positive("models.airy_L", *v);
  if (auto v = get("models", "airy_count")) c.airy_count = positive_int("models.airy_count", *v);
  if (auto v = get("models", "airy_tol")) c.airy_tol = positive("models.airy_tol", *v);
  if (auto v = get("models", "davies_n")) c.davies_n = positive_int("models.davies_n", *v);
  if (auto v = get("models", "davies_L")) c.davies_L = positive("models.davies_L", *v);
  if (auto v = get("models", "davies_count")) c.davies_count = positive_int("models.davies_count", *v);
  if (auto v = get("models", "davies_tol")) c.davies_tol = positive("models.davies_tol", *v);
  if (auto v = get("models", "tensor_n")) c.tensor_n = positive_int("models.tensor_n", *v);
  if (auto v = get("models", "tensor_L")) c.tensor_L = positive("models.tensor_L", *v);
  if (auto v = get("models", "tensor_count")) c.tensor_count = positive_int("models.tensor_count", *v);
  if (auto v = get("models", "tensor_tol")) c.tensor_tol = positive("models.tensor_tol", *v);

  if (auto v = get("output", "dir")) {
    if (trim(*v).empty()) throw ConfigError("config: output.dir is empty");
    c.output_dir = trim(*v);
  }

  if (c.potential) (void)c.profile();  // reject unparseable expressions up front
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace semispec
