#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace arcrom::cli {
namespace {

using json = nlohmann::json;

int line_at(const std::string& text, std::size_t pos) {
  int line = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

class Section {
 public:
  Section(const json& root, const std::string& name, const std::string& text)
      : name_(name), text_(text) {
    start_ = text.find("\"" + name + "\"");
    if (!root.contains(name)) return;
    if (!root[name].is_object()) fail("", "must be an object");
    j_ = &root[name];
  }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_ || !j_->contains(key)) return;
    try {
      out = (*j_)[key].get<T>();
    } catch (const json::exception& e) {
      fail(key, std::string("has the wrong type (") + e.what() + ")");
    }
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_ && j_->contains(key);
  }
  const json& at(const std::string& key) const { return (*j_)[key]; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::size_t pos = start_;
    if (!key.empty() && start_ != std::string::npos) {
      const std::size_t k = text_.find("\"" + key + "\"", start_);
      if (k != std::string::npos) pos = k;
    }
    std::ostringstream os;
    os << "config";
    if (pos != std::string::npos) os << " line " << line_at(text_, pos);
    os << ": " << name_ << (key.empty() ? "" : "." + key) << " " << what;
    throw ConfigError(os.str());
  }

  void check(bool ok, const std::string& key, const std::string& what) const {
    if (!ok) fail(key, what);
  }

  void finish() const {
    if (!j_) return;
    for (const auto& [k, v] : j_->items())
      if (!used_.count(k)) fail(k, "is not a known key");
  }

 private:
  std::string name_;
  const std::string& text_;
  const json* j_ = nullptr;
  std::size_t start_ = std::string::npos;
  std::set<std::string> used_;
};

bool in_unit(double x) { return x > 0.0 && x < 1.0; }

SecondRhs parse_second(Section& s, const std::string& v) {
  if (v == "rotated_polarization") return SecondRhs::rotated_polarization;
  if (v == "rotated_direction") return SecondRhs::rotated_direction;
  s.fail("second_rhs", "must be rotated_polarization or rotated_direction");
}

}  // namespace

ArcFamily ExperimentConfig::family() const {
  const auto& g = geometry;
  return {g.geom, std::make_shared<PerturbationBasis>(
                      PerturbationBasis::trigonometric(g.geom.s, g.amplitude, g.decay_exponent))};
}

HfOptions ExperimentConfig::hf_options() const {
  HfOptions o;
  o.N = discretization.N;
  o.n_c = discretization.n_c;
  o.n_log = discretization.n_log;
  o.adaptive_nodes = discretization.adaptive_nodes;
  o.solver = discretization.solver;
  o.threads = run.threads;
  return o;
}

OfflineSettings ExperimentConfig::offline_settings() const {
  OfflineSettings s = rom.offline;
  s.N = discretization.N;
  s.n_c = discretization.n_c;
  s.n_log = discretization.n_log;
  s.theta0 = physics.theta0;
  s.threads = run.threads;
  return s;
}

std::uint64_t ExperimentConfig::hash() const {
  const OfflineSettings s = offline_settings();
  return family_hash(family(), physics.params, physics.theta0, s.N, s.nodes());
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "config line " << line_at(text, e.byte > 0 ? e.byte - 1 : 0) << ": " << e.what();
    throw ConfigError(os.str());
  }
  if (!root.is_object()) throw ConfigError("config line 1: top level must be an object");
  const std::set<std::string> sections{"geometry", "physics", "discretization", "rom", "run"};
  for (const auto& [k, v] : root.items())
    if (!sections.count(k)) {
      const std::size_t pos = text.find("\"" + k + "\"");
      throw ConfigError("config line " + std::to_string(line_at(text, pos)) + ": " + k +
                        " is not a known section");
    }

  ExperimentConfig c;
  {
    Section s(root, "geometry", text);
    auto& g = c.geometry;
    s.get("box_half_width", g.geom.box_half_width);
    s.get("r_min", g.geom.r_min);
    s.get("r_max", g.geom.r_max);
    s.get("d_min", g.geom.d_min);
    s.get("d_max", g.geom.d_max);
    s.get("s", g.geom.s);
    s.get("amplitude", g.amplitude);
    s.get("decay_exponent", g.decay_exponent);
    s.get("M", g.M);
    s.get("seed", g.seed);
    s.check(g.geom.r_min > 0 && g.geom.r_max >= g.geom.r_min, "r_max", "requires 0 < r_min <= r_max");
    s.check(g.geom.d_min > 0 && g.geom.d_max >= g.geom.d_min, "d_max", "requires 0 < d_min <= d_max");
    s.check(g.geom.box_half_width > 0, "box_half_width", "must be positive");
    s.check(g.geom.s >= 4 && g.geom.s % 4 == 0, "s", "must be a positive multiple of 4");
    s.check(g.M >= 1, "M", "must be at least 1");
    if (s.has("arcs")) {
      const json& arcs = s.at("arcs");
      s.check(arcs.is_array(), "arcs", "must be an array");
      for (const auto& a : arcs) {
        s.check(a.is_object(), "arcs", "entries must be objects");
        for (const auto& [k, v] : a.items())
          s.check(k == "center" || k == "half_length" || k == "orientation" || k == "y", k,
                  "is not a known arc key");
        ExplicitArc e;
        try {
          const auto ctr = a.at("center").get<std::vector<double>>();
          s.check(ctr.size() == 2, "center", "must have two components");
          e.segment.center = Vec2(ctr[0], ctr[1]);
          e.segment.half_length = a.at("half_length").get<double>();
          e.segment.orientation = a.value("orientation", 0.0);
          const auto y = a.value("y", std::vector<double>(g.geom.s, 0.0));
          s.check(static_cast<int>(y.size()) == g.geom.s, "y", "must have s entries");
          e.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
        } catch (const json::exception& ex) {
          s.fail("arcs", std::string("entry is malformed (") + ex.what() + ")");
        }
        s.check(e.segment.half_length > 0, "half_length", "must be positive");
        g.arcs.push_back(std::move(e));
      }
      g.M = static_cast<int>(g.arcs.size());
      s.check(g.M >= 1, "arcs", "must not be empty");
    }
    s.finish();
  }
  {
    Section s(root, "physics", text);
    auto& p = c.physics;
    double omega = p.params.omega, lambda = p.params.lambda, mu = p.params.mu;
    s.get("omega", omega);
    s.get("lambda", lambda);
    s.get("mu", mu);
    s.get("theta0", p.theta0);
    s.check(omega > 0, "omega", "must be positive");
    s.check(mu > 0 && lambda + 2 * mu > 0, "mu", "requires mu > 0 and lambda + 2 mu > 0");
    p.params = ElasticParams(omega, lambda, mu);
    s.finish();
  }
  {
    Section s(root, "discretization", text);
    auto& d = c.discretization;
    s.get("N", d.N);
    s.get("n_c", d.n_c);
    s.get("n_log", d.n_log);
    s.get("adaptive_nodes", d.adaptive_nodes);
    s.get("reference_N", d.reference_N);
    s.get("convergence_N", d.convergence_N);
    std::string solver = "lu";
    s.get("solver", solver);
    if (solver == "lu") d.solver = LinearSolver::lu;
    else if (solver == "gmres") d.solver = LinearSolver::gmres;
    else s.fail("solver", "must be lu or gmres");
    s.check(d.N >= 4, "N", "must be at least 4");
    s.check(d.n_c == 0 || d.n_c >= d.N + 1, "n_c", "must be 0 (automatic) or at least N+1");
    s.check(d.n_log >= 0, "n_log", "must be non-negative");
    s.check(d.reference_N == 0 || d.reference_N > d.N, "reference_N", "must exceed N");
    for (int n : d.convergence_N) s.check(n >= 4, "convergence_N", "entries must be at least 4");
    s.finish();
  }
  {
    Section s(root, "rom", text);
    auto& o = c.rom.offline;
    s.get("eps_svd", o.eps_svd);
    s.get("eps_eim", o.eps_eim);
    s.get("n_geo_samples", o.n_geo_samples);
    s.get("cross_candidates", o.cross_candidates);
    s.get("self_candidates", o.self_candidates);
    s.get("q_max", o.q_max);
    s.get("snapshot_seed", o.snapshot_seed);
    s.get("candidate_seed", o.candidate_seed);
    s.get("memory_budget_mb", o.memory_budget_mb);
    std::string second = to_string(o.second_rhs);
    s.get("second_rhs", second);
    o.second_rhs = parse_second(s, second);
    s.get("sweep_eps_svd", c.rom.sweep_eps_svd);
    s.get("sweep_eps_eim", c.rom.sweep_eps_eim);
    s.check(in_unit(o.eps_svd), "eps_svd", "must lie in (0,1)");
    s.check(in_unit(o.eps_eim), "eps_eim", "must lie in (0,1)");
    for (double e : c.rom.sweep_eps_svd) s.check(in_unit(e), "sweep_eps_svd", "entries must lie in (0,1)");
    for (double e : c.rom.sweep_eps_eim) s.check(in_unit(e), "sweep_eps_eim", "entries must lie in (0,1)");
    s.check(o.n_geo_samples >= 1, "n_geo_samples", "must be at least 1");
    s.check(o.cross_candidates >= 1, "cross_candidates", "must be at least 1");
    s.check(o.self_candidates >= 1, "self_candidates", "must be at least 1");
    s.check(o.q_max >= 1, "q_max", "must be at least 1");
    s.check(o.memory_budget_mb > 0, "memory_budget_mb", "must be positive");
    s.finish();
  }
  {
    Section s(root, "run", text);
    auto& r = c.run;
    s.get("out", r.out);
    s.get("container", r.container);
    s.get("threads", r.threads);
    s.get("samples", r.samples);
    s.get("seed", r.seed);
    s.get("skip_hf", r.skip_hf);
    s.get("timing_repeats", r.timing_repeats);
    s.check(r.samples >= 1, "samples", "must be at least 1");
    s.check(r.threads >= 0, "threads", "must be non-negative");
    s.check(r.timing_repeats >= 1, "timing_repeats", "must be at least 1");
    s.finish();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace arcrom::cli
