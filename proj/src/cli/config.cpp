#include "fluoinv/cli/config.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace fluoinv::cli {

using nlohmann::json;

ConfigError::ConfigError(const std::string& what, int line, std::string path)
    : std::runtime_error(what), line_(line), path_(std::move(path)) {}

namespace {

int line_at(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  for (std::size_t k = 0; k < offset; ++k)
    if (text[k] == '\n') ++line;
  return line;
}

std::string join(const std::vector<std::string>& path) {
  std::string s;
  for (const auto& p : path) s += "/" + p;
  return s.empty() ? "/" : s;
}

struct Context {
  const json& overlay;
  const std::string& text;

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    // Only point at the file when the value actually came from it.
    const json* node = &overlay;
    for (const auto& key : path) {
      if (!node->is_object() || !node->contains(key)) {
        node = nullptr;
        break;
      }
      node = &(*node)[key];
    }
    const int line = node ? locate_line(text, path) : 0;
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << join(path) << ": " << msg;
    throw ConfigError(os.str(), line, join(path));
  }
};

class Section {
public:
  Section(const Context& ctx, const json& node, std::vector<std::string> path)
      : ctx_(ctx), node_(node), path_(std::move(path)) {
    if (!node_.is_object()) ctx_.fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  void number(const std::string& key, double& out, double lo = -std::numeric_limits<double>::infinity(),
              double hi = std::numeric_limits<double>::infinity(), bool open_lo = false) {
    if (!take(key)) return;
    const auto& v = node_[key];
    if (!v.is_number()) ctx_.fail(sub(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi || (open_lo && x == lo)) {
      std::ostringstream os;
      os << "value " << x << " outside " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
      ctx_.fail(sub(key), os.str());
    }
    out = x;
  }

  template <class Int>
  void integer(const std::string& key, Int& out, long long lo, long long hi) {
    if (!take(key)) return;
    const auto& v = node_[key];
    double x = 0.0;
    if (v.is_number_integer()) {
      x = static_cast<double>(v.get<long long>());
    } else if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) {
      x = v.get<double>();  // 1e4 style
    } else {
      ctx_.fail(sub(key), "expected an integer");
    }
    if (x < static_cast<double>(lo) || x > static_cast<double>(hi)) {
      std::ostringstream os;
      os << "value " << x << " outside [" << lo << ", " << hi << "]";
      ctx_.fail(sub(key), os.str());
    }
    out = static_cast<Int>(x);
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (!take(key)) return;
    const auto& v = node_[key];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      ctx_.fail(sub(key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool& out) {
    if (!take(key)) return;
    if (!node_[key].is_boolean()) ctx_.fail(sub(key), "expected true or false");
    out = node_[key].get<bool>();
  }

  void string(const std::string& key, std::string& out, const std::set<std::string>& allowed = {}) {
    if (!take(key)) return;
    if (!node_[key].is_string()) ctx_.fail(sub(key), "expected a string");
    out = node_[key].get<std::string>();
    if (!allowed.empty() && !allowed.contains(out)) {
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
      ctx_.fail(sub(key), "unknown value \"" + out + "\" (expected one of " + opts + ")");
    }
  }

  void numbers(const std::string& key, std::vector<double>& out, double lo_open) {
    if (!take(key)) return;
    const auto& v = node_[key];
    if (!v.is_array()) ctx_.fail(sub(key), "expected an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number() || !(e.get<double>() > lo_open) || !std::isfinite(e.get<double>()))
        ctx_.fail(sub(key), "entries must be finite numbers > " + std::to_string(lo_open));
      out.push_back(e.get<double>());
    }
  }

  void orders(const std::string& key, std::vector<int>& out) {
    if (!take(key)) return;
    const auto& v = node_[key];
    if (!v.is_array() || v.empty()) ctx_.fail(sub(key), "expected a non-empty array of penalty orders");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number_integer() || (e.get<int>() != 0 && e.get<int>() != 1))
        ctx_.fail(sub(key), "penalty orders must be 0 or 1");
      out.push_back(e.get<int>());
    }
  }

  void field(const std::string& key, FieldSpec& out, const std::set<std::string>& names) {
    if (!take(key)) return;
    const auto& v = node_[key];
    if (v.is_number()) {
      out = {"constant", v.get<double>()};
      if (!std::isfinite(out.value)) ctx_.fail(sub(key), "constant must be finite");
      return;
    }
    if (!v.is_string()) ctx_.fail(sub(key), "expected a number or a built-in name");
    std::string name;
    string(key, name, names);
    out = {name, 0.0};
  }

  Section child(const std::string& key) {
    take(key);
    static const json empty = json::object();
    return Section(ctx_, node_.contains(key) ? node_[key] : empty, sub(key));
  }

  /// Rejects keys that no reader consumed.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.contains(it.key())) ctx_.fail(sub(it.key()), "unknown key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const { ctx_.fail(sub(key), msg); }

private:
  bool take(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) && !node_[key].is_null();
  }
  std::vector<std::string> sub(const std::string& key) const {
    auto p = path_;
    p.push_back(key);
    return p;
  }

  const Context& ctx_;
  const json& node_;
  std::vector<std::string> path_;
  std::set<std::string> seen_;
};

constexpr long long kMaxCells = 4096;

}  // namespace

int locate_line(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const std::string needle = "\"" + key + "\"";
    std::size_t hit = std::string::npos;
    for (std::size_t from = pos; (from = text.find(needle, from)) != std::string::npos; from += needle.size()) {
      std::size_t k = from + needle.size();
      while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
      if (k < text.size() && text[k] == ':') {
        hit = from;
        break;
      }
    }
    if (hit == std::string::npos) return 0;
    pos = hit + needle.size();
  }
  return path.empty() ? 0 : line_at(text, pos);
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    const int line = line_at(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (const auto k = msg.find("syntax error"); k != std::string::npos) msg = msg.substr(k);
    throw ConfigError("line " + std::to_string(line) + ": " + msg, line);
  }
}

RunConfig resolve_config(const json& base, const json& overlay, const std::string& text) {
  if (!overlay.is_object()) throw ConfigError("configuration must be a JSON object", overlay.is_null() ? 0 : 1);
  json merged = base;
  merged.merge_patch(overlay);
  // An absolute or relative noise level in the overlay replaces the other
  // form inherited from the preset.
  if (overlay.contains("measurements") && overlay["measurements"].is_object() && merged["measurements"].is_object()) {
    const auto& om = overlay["measurements"];
    auto& mm = merged["measurements"];
    if (om.contains("sigma") && !om.contains("sigma_relative")) mm.erase("sigma_relative");
    if (om.contains("sigma_relative") && !om.contains("sigma")) mm.erase("sigma");
  }
  const Context ctx{overlay, text};
  RunConfig c;
  c.echo = merged;
  Section root(ctx, merged, {});

  root.string("preset", c.preset);
  root.seed("seed", c.seed);
  root.number("beta", c.beta, 0.0, 1e6, true);
  {
    auto g = root.child("grid");
    g.integer("dim", c.dim, 1, 2);
    g.integer("cells", c.cells, 4, kMaxCells);
    g.finish();
  }
  {
    auto p = root.child("problem");
    p.number("T", c.problem.T, 0.0, 1e6, true);
    p.number("tau", c.problem.tau, 0.0, 1e6, true);
    p.number("M", c.problem.M, 0.0, 1e12, true);
    p.field("p", c.problem.p, {"example2"});
    p.field("b", c.problem.b, {"example2", "example2-flipped"});
    if (c.problem.tau > c.problem.T) p.fail("tau", "time step exceeds T");
    const double steps = c.problem.T / c.problem.tau;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) p.fail("tau", "T / tau must be an integer");
    if (c.problem.p.name == "constant" && !(c.problem.p.value > 0.0)) p.fail("p", "background absorption must be > 0");
    p.finish();
  }
  root.field("source", c.source, {"example2-smooth", "example2-discontinuous", "zero"});
  if (c.source.name == "constant" && c.source.value < 0.0) root.fail("source", "source must be nonnegative");
  {
    auto m = root.child("measurements");
    m.integer("n", c.measurements.n, 1, 100000000);
    std::string noise = "gaussian", layout = "halton";
    m.string("noise", noise, {"gaussian", "uniform", "zero"});
    m.string("layout", layout, {"halton", "regular"});
    c.measurements.noise = noise == "gaussian" ? NoiseKind::Gaussian
                           : noise == "uniform" ? NoiseKind::Uniform
                                                : NoiseKind::Zero;
    c.measurements.layout = layout == "halton" ? PointLayout::Halton : PointLayout::RegularGrid;
    if (m.has("sigma") && m.has("sigma_relative")) m.fail("sigma", "give either sigma or sigma_relative");
    m.number("sigma", c.measurements.sigma, 0.0, 1e6);
    if (m.has("sigma_relative")) {
      m.number("sigma_relative", c.measurements.sigma, 0.0, 1e3);
      c.measurements.relative = true;
    }
    m.finish();
  }
  {
    auto f = root.child("fit");
    f.integer("s", c.fit.s, 0, 1);
    std::string policy = "prior";
    f.string("lambda_policy", policy, {"prior", "fixed", "self-consistent", "ladder"});
    c.fit.policy = policy == "prior"    ? LambdaPolicy::Prior
                   : policy == "fixed"  ? LambdaPolicy::Fixed
                   : policy == "ladder" ? LambdaPolicy::Ladder
                                        : LambdaPolicy::SelfConsistent;
    f.number("lambda", c.fit.lambda, 0.0, 1e6, true);
    f.numbers("lambda_ladder", c.fit.ladder, 0.0);
    if (c.fit.policy == LambdaPolicy::Ladder && c.fit.ladder.empty())
      f.fail("lambda_ladder", "ladder policy needs a non-empty lambda_ladder");
    f.number("stop_tol", c.fit.stop_tol, 0.0, 1.0, true);
    f.integer("max_outer", c.fit.max_outer, 1, 10000);
    f.number("tol", c.fit.tol, 0.0, 1.0);
    f.string("truth", c.fit.truth, {"example1", "example2-smooth", "example2-discontinuous"});
    f.finish();
  }
  {
    auto p = root.child("p2");
    p.boolean("clean", c.p2.clean);
    p.number("tol", c.p2.tol, 0.0, 1.0, true);
    p.integer("max_iter", c.p2.max_iter, 1, 100000);
    p.boolean("clamp", c.p2.clamp);
    p.finish();
  }
  {
    auto r = root.child("rates");
    int cells = 0;
    r.integer("cells", cells, 4, kMaxCells);
    if (cells > 0) c.rates.cells = cells;
    r.string("target", c.rates.target, {"p1", "p2"});
    r.orders("s", c.rates.s);
    r.integer("trials", c.rates.trials, 1, 100000);
    r.number("n_start", c.rates.n_start, 1.0, 1e8);
    r.number("n_factor", c.rates.n_factor, 1.0, 1e3, true);
    r.integer("points", c.rates.points, 2, 100);
    r.integer("tail_trials", c.rates.tail_trials, 0, 100000);
    r.numbers("tail_z", c.rates.tail_z, -1.0);
    if (c.rates.tail_trials > 0 && c.rates.tail_trials < 50) r.fail("tail_trials", "the tail check needs >= 50 trials");
    r.finish();
  }
  {
    auto s = root.child("spectral");
    s.integer("dirichlet_cells", c.spectral.dirichlet_cells, 4, 64);
    s.integer("dirichlet_dim", c.spectral.dirichlet_dim, 1, 2);
    s.integer("k_max", c.spectral.k_max, 1, 100000);
    s.integer("smoothing_cells", c.spectral.smoothing_cells, 4, kMaxCells);
    s.integer("n", c.spectral.n, 1, 400);
    s.orders("s", c.spectral.s);
    s.finish();
  }
  {
    auto v = root.child("verify");
    v.integer("cells", c.verify.cells, 4, 256);
    v.integer("monotone_pairs", c.verify.monotone_pairs, 1, 10000);
    v.integer("energy_pairs", c.verify.energy_pairs, 1, 10000);
    v.integer("stability_pairs", c.verify.stability_pairs, 1, 10000);
    v.integer("lipschitz_pairs", c.verify.lipschitz_pairs, 1, 10000);
    v.finish();
  }
  root.finish();
  return c;
}

SpatialFunction source_function(const FieldSpec& spec) {
  if (spec.name == "example2-smooth") return example2_smooth_source;
  if (spec.name == "example2-discontinuous") return example2_discontinuous_source;
  if (spec.name == "zero") return [](Point) { return 0.0; };
  const double v = spec.value;
  return [v](Point) { return v; };
}

ProblemSpec problem_spec(const RunConfig& cfg, int cells) {
  ProblemSpec s;
  s.dim = cfg.dim;
  s.cells = cells;
  s.beta = cfg.beta;
  s.T = cfg.problem.T;
  s.tau = cfg.problem.tau;
  s.M = cfg.problem.M;
  if (cfg.problem.p.name == "constant") {
    const double v = cfg.problem.p.value;
    s.p = [v](Point) { return v; };
  } else {
    s.p = example2_background;
  }
  if (cfg.problem.b.name == "constant") {
    const double v = cfg.problem.b.value;
    s.b = [v](Point, double) { return v; };
  } else if (cfg.problem.b.name == "example2-flipped") {
    s.b = [](Point pt, double t) { return -example2_boundary(pt, t); };
  } else {
    s.b = example2_boundary;
  }
  return s;
}

}  // namespace fluoinv::cli
