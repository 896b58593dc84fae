#include "gausscurv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gausscurv/error.hpp"

namespace gcurv {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(int line, const std::string& key, const std::string& what) {
  std::ostringstream msg;
  if (line > 0) msg << "line " << line << ": ";
  msg << key << ": " << what;
  fail(ErrorKind::Config, msg.str());
}

double read_double(const std::string& raw, int line, const std::string& key) {
  double v = 0.0;
  const char* end = raw.data() + raw.size();
  auto res = std::from_chars(raw.data(), end, v);
  if (raw.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    config_error(line, key, "expected a finite number, got '" + raw + "'");
  }
  return v;
}

long long read_integer(const std::string& raw, int line, const std::string& key) {
  long long v = 0;
  const char* end = raw.data() + raw.size();
  auto res = std::from_chars(raw.data(), end, v);
  if (raw.empty() || res.ec != std::errc() || res.ptr != end) {
    config_error(line, key, "expected an integer, got '" + raw + "'");
  }
  return v;
}

int read_int(const std::string& raw, int line, const std::string& key) {
  const long long v = read_integer(raw, line, key);
  if (v < -1000000000LL || v > 1000000000LL) config_error(line, key, "integer out of range: " + raw);
  return static_cast<int>(v);
}

bool read_bool(const std::string& raw, int line, const std::string& key) {
  if (raw == "true") return true;
  if (raw == "false") return false;
  config_error(line, key, "expected true or false, got '" + raw + "'");
}

std::string read_string(const std::string& raw, int line, const std::string& key) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return raw.substr(1, raw.size() - 2);
  if (raw.find('"') != std::string::npos) config_error(line, key, "unbalanced quote in '" + raw + "'");
  return raw;
}

std::vector<double> read_list(const std::string& raw, int line, const std::string& key) {
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
    config_error(line, key, "expected a list like [1, 2], got '" + raw + "'");
  }
  std::vector<double> out;
  const std::string body = trim(raw.substr(1, raw.size() - 2));
  if (body.empty()) return out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(read_double(trim(item), line, key));
  if (body.back() == ',') config_error(line, key, "trailing comma in list");
  return out;
}

std::string show_string(const std::string& s) {
  const bool plain = !s.empty() && s.find_first_of("#\"[ \t") == std::string::npos;
  return plain ? s : "\"" + s + "\"";
}

std::string show_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&, int, const std::string&)> set;
  std::function<std::string()> show;
};

Field dbl(const char* s, const char* k, double& ref) {
  return {s, k, [&ref](const std::string& raw, int line, const std::string& key) { ref = read_double(raw, line, key); },
          [&ref] { return format_double(ref); }};
}
Field integer(const char* s, const char* k, int& ref) {
  return {s, k, [&ref](const std::string& raw, int line, const std::string& key) { ref = read_int(raw, line, key); },
          [&ref] { return std::to_string(ref); }};
}
Field boolean(const char* s, const char* k, bool& ref) {
  return {s, k, [&ref](const std::string& raw, int line, const std::string& key) { ref = read_bool(raw, line, key); },
          [&ref] { return std::string(ref ? "true" : "false"); }};
}
Field text(const char* s, const char* k, std::string& ref) {
  return {s, k, [&ref](const std::string& raw, int line, const std::string& key) { ref = read_string(raw, line, key); },
          [&ref] { return show_string(ref); }};
}
Field list(const char* s, const char* k, std::vector<double>& ref) {
  return {s, k, [&ref](const std::string& raw, int line, const std::string& key) { ref = read_list(raw, line, key); },
          [&ref] { return show_list(ref); }};
}

std::vector<Field> fields(ExperimentConfig& c) {
  auto& k = c.curvature;
  auto& s = c.solve;
  auto& a = c.alphap;
  auto& y = c.asymptotics;
  auto& p = c.potential;
  auto& r = c.run;
  return {
      text("curvature", "kind", k.kind),
      dbl("curvature", "amplitude", k.amplitude),
      dbl("curvature", "ell", k.ell),
      dbl("curvature", "q", k.q),
      integer("curvature", "n_max", k.n_max),
      dbl("curvature", "alpha", k.alpha),
      text("curvature", "grid_file", k.grid_file),
      dbl("curvature", "scale", k.scale),

      dbl("solve", "alpha", s.alpha),
      dbl("solve", "omega", s.omega),
      dbl("solve", "tol", s.tol),
      integer("solve", "max_iter", s.max_iter),
      dbl("solve", "r_max", s.r_max),
      integer("solve", "radial_order", s.radial_order),
      dbl("solve", "panel_ratio", s.panel_ratio),
      integer("solve", "angles", s.angles),
      integer("solve", "bump_radii", s.bump_radii),
      integer("solve", "bump_angles", s.bump_angles),
      dbl("solve", "v_init", s.v_init),
      boolean("solve", "bracket", s.bracket),
      dbl("solve", "check_radius", s.check_radius),

      list("alphap", "p", a.p),
      dbl("alphap", "alpha_min", a.alpha_min),
      dbl("alphap", "alpha_max", a.alpha_max),
      dbl("alphap", "alpha_step", a.alpha_step),
      dbl("alphap", "bisect_tol", a.bisect_tol),
      integer("alphap", "k_max", a.k_max),
      integer("alphap", "fit_k_min", a.fit_k_min),

      list("asymptotics", "radii", y.radii),
      integer("asymptotics", "angles", y.angles),
      list("asymptotics", "decay_radii", y.decay_radii),
      dbl("asymptotics", "beta", y.beta),
      integer("asymptotics", "n_min", y.n_min),
      integer("asymptotics", "n_max", y.n_max),
      list("asymptotics", "probe_alphas", y.probe_alphas),
      dbl("asymptotics", "gap_small", y.gap_small),
      dbl("asymptotics", "gap_floor", y.gap_floor),
      dbl("asymptotics", "alpha_fit_tol", y.alpha_fit_tol),
      dbl("asymptotics", "ratio_step", y.ratio_step),
      dbl("asymptotics", "anisotropy_bound", y.anisotropy_bound),
      dbl("asymptotics", "decay_floor", y.decay_floor),

      dbl("potential", "spacing", p.spacing),
      integer("potential", "half_width", p.half_width),
      list("potential", "center", p.center),
      list("potential", "decay_radii", p.decay_radii),

      {"run", "seed",
       [&r](const std::string& raw, int line, const std::string& key) {
         std::uint64_t v = 0;
         const char* end = raw.data() + raw.size();
         auto res = std::from_chars(raw.data(), end, v);
         if (raw.empty() || res.ec != std::errc() || res.ptr != end) {
           config_error(line, key, "expected a non-negative 64-bit integer, got '" + raw + "'");
         }
         r.seed = v;
       },
       [&r] { return std::to_string(r.seed); }},
      text("run", "out_dir", r.out_dir),
      integer("run", "threads", r.threads),
      integer("run", "samples", r.samples),
  };
}

const std::vector<std::string> kSections{"curvature", "solve", "alphap", "asymptotics", "potential", "run"};

// Semantic checks; `lines` maps "section.key" to its source line.
void validate(const ExperimentConfig& c, const std::map<std::string, int>& lines) {
  auto line_of = [&](const std::string& key) {
    auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  auto require = [&](bool ok, const std::string& key, const std::string& what) {
    if (!ok) config_error(line_of(key), key, what);
  };
  auto positive_list = [&](const std::vector<double>& v, const std::string& key, std::size_t min_size) {
    require(v.size() >= min_size, key, "needs at least " + std::to_string(min_size) + " entries");
    for (double x : v) require(x > 0.0, key, "entries must be positive, got " + format_double(x));
  };

  const auto& k = c.curvature;
  require(!k.kind.empty(), "curvature.kind", "missing required key");
  require(k.kind == "radial_power" || k.kind == "exact_family" || k.kind == "bump_sum" || k.kind == "grid_sampled",
          "curvature.kind", "unknown kind '" + k.kind + "' (radial_power, exact_family, bump_sum, grid_sampled)");
  require(k.scale > 0.0, "curvature.scale", "must be positive");
  if (k.kind == "radial_power") {
    require(k.amplitude > 0.0, "curvature.amplitude", "must be positive");
    require(k.ell > 2.0, "curvature.ell", "must exceed 2 for radial_power");
  } else if (k.kind == "exact_family") {
    require(k.alpha > 0.0, "curvature.alpha", "must be positive");
  } else if (k.kind == "bump_sum") {
    require(k.q > 1.0, "curvature.q", "must exceed 1");
    require(k.ell > k.q, "curvature.ell",
            "ell = " + format_double(k.ell) + " must exceed q = " + format_double(k.q) + " (curvature.q)");
    require(k.n_max >= 2 && k.n_max <= 10, "curvature.n_max", "must lie in [2, 10]");
  } else {
    require(!k.grid_file.empty(), "curvature.grid_file", "required for grid_sampled");
  }

  const auto& s = c.solve;
  require(s.alpha > 0.0, "solve.alpha", "must be positive, got " + format_double(s.alpha));
  require(s.omega > 0.0 && s.omega <= 1.0, "solve.omega", "must lie in (0, 1]");
  require(s.tol > 0.0, "solve.tol", "must be positive");
  require(s.max_iter >= 1, "solve.max_iter", "must be at least 1");
  require(s.r_max > 10.0, "solve.r_max", "must exceed 10");
  require(s.radial_order >= 2 && s.radial_order <= 64, "solve.radial_order", "must lie in [2, 64]");
  require(s.panel_ratio > 1.0, "solve.panel_ratio", "must exceed 1");
  require(s.angles >= 4, "solve.angles", "must be at least 4");
  require(s.bump_radii >= 4, "solve.bump_radii", "must be at least 4");
  require(s.bump_angles >= 4, "solve.bump_angles", "must be at least 4");
  require(s.check_radius > 0.0, "solve.check_radius", "must be positive");

  const auto& a = c.alphap;
  require(!a.p.empty(), "alphap.p", "needs at least one entry");
  for (double p : a.p) require(p >= 1.0, "alphap.p", "entries must be >= 1, got " + format_double(p));
  require(a.alpha_min < a.alpha_max, "alphap.alpha_max", "must exceed alphap.alpha_min");
  require(a.alpha_step > 0.0, "alphap.alpha_step", "must be positive");
  require(a.bisect_tol > 0.0, "alphap.bisect_tol", "must be positive");
  require(a.fit_k_min >= 1, "alphap.fit_k_min", "must be at least 1");
  require(a.k_max >= a.fit_k_min + 2, "alphap.k_max", "must exceed alphap.fit_k_min by at least 2");

  const auto& y = c.asymptotics;
  positive_list(y.radii, "asymptotics.radii", 4);
  require(y.angles >= 1, "asymptotics.angles", "must be at least 1");
  positive_list(y.decay_radii, "asymptotics.decay_radii", 2);
  require(y.beta >= 0.0, "asymptotics.beta", "must be non-negative (0 selects the default)");
  require(y.n_min >= 2, "asymptotics.n_min", "must be at least 2");
  require(y.n_max >= y.n_min, "asymptotics.n_max", "must be at least asymptotics.n_min");
  positive_list(y.probe_alphas, "asymptotics.probe_alphas", 1);
  require(y.gap_small > 0.0, "asymptotics.gap_small", "must be positive");
  require(y.gap_floor > 0.0, "asymptotics.gap_floor", "must be positive");
  require(y.alpha_fit_tol > 0.0, "asymptotics.alpha_fit_tol", "must be positive");
  require(y.ratio_step >= 0.0, "asymptotics.ratio_step", "must be non-negative");
  require(y.anisotropy_bound > 0.0, "asymptotics.anisotropy_bound", "must be positive");
  require(y.decay_floor > 0.0, "asymptotics.decay_floor", "must be positive");

  const auto& p = c.potential;
  require(p.spacing > 0.0, "potential.spacing", "must be positive");
  require(p.half_width >= 2, "potential.half_width", "must be at least 2");
  require(p.center.size() == 2, "potential.center", "must have two entries [x, y]");
  positive_list(p.decay_radii, "potential.decay_radii", 2);

  const auto& r = c.run;
  require(!r.out_dir.empty(), "run.out_dir", "must not be empty");
  require(r.threads >= 1, "run.threads", "must be at least 1");
  require(r.samples >= 1, "run.samples", "must be at least 1");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  auto table = fields(c);
  std::map<std::string, Field*> by_name;
  for (auto& f : table) by_name[f.section + "." + f.key] = &f;

  std::map<std::string, int> seen;
  std::set<std::string> sections_seen;
  std::string section;
  std::istringstream in(text);
  std::string raw_line;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    // Strip comments outside quotes.
    bool quoted = false;
    std::size_t cut = raw_line.size();
    for (std::size_t i = 0; i < raw_line.size(); ++i) {
      if (raw_line[i] == '"') quoted = !quoted;
      if (raw_line[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    const std::string l = trim(raw_line.substr(0, cut));
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') config_error(line, "section", "malformed header '" + l + "'");
      section = trim(l.substr(1, l.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
        config_error(line, section, "unknown section [" + section + "]");
      }
      if (!sections_seen.insert(section).second) config_error(line, section, "duplicate section [" + section + "]");
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) config_error(line, l, "expected 'key = value'");
    const std::string key = trim(l.substr(0, eq));
    const std::string value = trim(l.substr(eq + 1));
    if (section.empty()) config_error(line, key, "key outside of any [section]");
    const std::string full = section + "." + key;
    auto it = by_name.find(full);
    if (it == by_name.end()) config_error(line, full, "unknown key");
    if (auto [pos, fresh] = seen.emplace(full, line); !fresh) {
      config_error(line, full, "duplicate key (first set on line " + std::to_string(pos->second) + ")");
    }
    it->second->set(value, line, full);
  }
  validate(c, seen);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  std::string out;
  std::string section;
  for (const auto& f : fields(copy)) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.show() + "\n";
  }
  return out;
}

CurvatureField build_curvature(const CurvatureConfig& c) {
  CurvatureField k = [&] {
    if (c.kind == "radial_power") return CurvatureField::radial_power(c.amplitude, c.ell);
    if (c.kind == "exact_family") return CurvatureField::exact_family(c.alpha);
    if (c.kind == "bump_sum") return CurvatureField::bump_sum(c.ell, c.q, c.n_max);
    if (c.kind == "grid_sampled") return CurvatureField::grid_sampled(read_grid_samples(c.grid_file));
    fail(ErrorKind::Config, "curvature.kind: unknown kind '" + c.kind + "'");
  }();
  return c.scale == 1.0 ? k : k.scaled(c.scale);
}

SolverOptions solver_options(const ExperimentConfig& c) {
  SolverOptions o;
  o.omega = c.solve.omega;
  o.tol = c.solve.tol;
  o.max_iter = c.solve.max_iter;
  o.r_max = c.solve.r_max;
  o.radial_order = c.solve.radial_order;
  o.panel_ratio = c.solve.panel_ratio;
  o.angles = c.solve.angles;
  o.bump_radii = c.solve.bump_radii;
  o.bump_angles = c.solve.bump_angles;
  o.v_init = c.solve.v_init;
  o.bracket = c.solve.bracket;
  o.threads = c.run.threads;
  return o;
}

AlphaPOptions alphap_options(const ExperimentConfig& c) {
  AlphaPOptions o;
  o.alpha_min = c.alphap.alpha_min;
  o.alpha_max = c.alphap.alpha_max;
  o.alpha_step = c.alphap.alpha_step;
  o.bisect_tol = c.alphap.bisect_tol;
  o.k_max = c.alphap.k_max;
  o.fit_k_min = c.alphap.fit_k_min;
  o.threads = c.run.threads;
  return o;
}

VerdictThresholds verdict_thresholds(const AsymptoticsConfig& c) {
  return {c.gap_small, c.gap_floor, c.alpha_fit_tol, c.ratio_step};
}

}  // namespace gcurv
