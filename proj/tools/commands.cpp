#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "arcrom/sampling.hpp"

namespace arcrom::cli {
namespace {

namespace fs = std::filesystem;

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw InputError("cannot write " + path.string());
    out_ << header << "\n";
  }

  Csv& operator<<(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return field(buf);
  }
  Csv& operator<<(int v) { return field(std::to_string(v)); }
  Csv& operator<<(const std::string& v) { return field(v); }
  Csv& operator<<(const char* v) { return field(v); }
  void end() {
    out_ << "\n";
    first_ = true;
  }

 private:
  Csv& field(const std::string& s) {
    if (!first_) out_ << ",";
    out_ << s;
    first_ = false;
    return *this;
  }

  fs::path path_;
  std::ofstream out_;
  bool first_ = true;
};

fs::path out_dir(const ExperimentConfig& cfg) {
  fs::path dir(cfg.run.out);
  fs::create_directories(dir);
  return dir;
}

double pct_error(const DensitySet& rb, const DensitySet& hf) {
  return 100.0 * t_norm_error(rb, hf) / t_norm(hf);
}

struct RbRun {
  RbSolution sol;
  int extrapolated = 0;
};

RbRun rb_once(const MultiArcConfig& mc, const OfflineModel& model, const GlobalGeometry& geom,
              int threads) {
  ReducedAssemblyOptions ro;
  ro.threads = threads;
  const ReducedSystem sys = assemble_reduced(mc, model, geom, ro);
  return {rb_solve(sys, model.basis), sys.extrapolated};
}

void print_model_summary(const OfflineModel& m, int M) {
  auto qs = [](const std::vector<EimModel>& set) {
    std::string s;
    for (const auto& e : set) s += (s.empty() ? "" : "/") + std::to_string(e.q());
    return s;
  };
  std::printf("R=%d q cross=%s self_j=%s self_reg=%s mean_q(M=%d)=%.1f\n", m.basis.R(),
              qs(m.cross).c_str(), qs(m.self_j).c_str(), qs(m.self_reg).c_str(), M, m.mean_q(M));
}

ModelMeta meta_of(const ExperimentConfig& cfg, const OfflineSettings& s, double eps_svd,
                  double eps_eim) {
  ModelMeta meta;
  meta.family_hash = cfg.hash();
  meta.eps_svd = eps_svd;
  meta.eps_eim = eps_eim;
  meta.snapshot_seed = s.snapshot_seed;
  meta.candidate_seed = s.candidate_seed;
  meta.n_geo_samples = s.n_geo_samples;
  meta.cross_candidates = s.cross_candidates;
  meta.self_candidates = s.self_candidates;
  meta.q_max = s.q_max;
  meta.second_rhs = to_string(s.second_rhs);
  return meta;
}

}  // namespace

std::vector<Arc> configuration(const ExperimentConfig& cfg, int sample) {
  const ArcFamily fam = cfg.family();
  if (!cfg.geometry.arcs.empty()) {
    std::vector<Arc> arcs;
    for (const auto& a : cfg.geometry.arcs) arcs.emplace_back(a.segment, a.y, fam.basis);
    return arcs;
  }
  std::seed_seq seq{cfg.run.seed, cfg.geometry.seed, static_cast<std::uint64_t>(sample)};
  std::mt19937_64 rng(seq);
  return sample_configuration(cfg.geometry.M, fam.geom, fam.basis, rng());
}

MultiArcConfig multi_arc(const ExperimentConfig& cfg, std::vector<Arc> arcs) {
  MultiArcConfig mc;
  mc.arcs = std::move(arcs);
  mc.params = cfg.physics.params;
  mc.theta0 = cfg.physics.theta0;
  mc.options = cfg.hf_options();
  return mc;
}

double median_ms(int repeats, const std::function<void()>& body) {
  std::vector<double> t;
  for (int i = 0; i < std::max(1, repeats); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

std::string container_path(const ExperimentConfig& cfg) {
  const fs::path p(cfg.run.container);
  return (p.is_absolute() ? p : fs::path(cfg.run.out) / p).string();
}

int cmd_hf_solve(const ExperimentConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const auto& d = cfg.discretization;
  Csv rows(dir / "hf-solve.csv", "sample,M,N,n_c,residual,cond,iterations");
  Csv times(dir / "hf-solve-timings.csv", "sample,M,N,time_hf_ms");
  std::unique_ptr<Csv> conv;
  if (d.reference_N > 0)
    conv = std::make_unique<Csv>(dir / "hf-convergence.csv", "sample,N,t0_error,relative_error");
  for (int i = 0; i < cfg.run.samples; ++i) {
    const MultiArcConfig mc = multi_arc(cfg, configuration(cfg, i));
    HfSolution sol;
    const double ms = median_ms(cfg.run.timing_repeats, [&] { sol = solve_hf(mc); });
    rows << i << mc.M() << d.N << resolve_node_count(mc) << sol.report.residual << sol.report.cond
         << sol.report.iterations;
    rows.end();
    times << i << mc.M() << d.N << ms;
    times.end();
    if (!conv) continue;
    MultiArcConfig ref = mc;
    ref.options.N = d.reference_N;
    ref.options.n_c = 0;
    ref.options.n_log = 0;
    const HfSolution r = solve_hf(ref);
    const double norm = t_norm(r.density);
    std::vector<int> orders = d.convergence_N.empty() ? std::vector<int>{d.N} : d.convergence_N;
    for (int n : orders) {
      MultiArcConfig c = mc;
      c.options.N = n;
      c.options.n_c = 0;
      c.options.n_log = 0;
      const double err = t_norm_error(solve_hf(c).density, r.density);
      *conv << i << n << err << err / norm;
      conv->end();
    }
  }
  std::printf("hf-solve: %d sample(s) written to %s\n", cfg.run.samples, dir.string().c_str());
  return 0;
}

int cmd_offline(const ExperimentConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const OfflineSettings s = cfg.offline_settings();
  const ArcFamily fam = cfg.family();
  const OfflineData data = run_offline(fam, cfg.physics.params, s);
  const auto& snaps = data.snapshots;
  if (!snaps.failed.empty()) {
    std::fprintf(stderr, "offline: %zu of %d snapshot samples failed and were skipped\n",
                 snaps.failed.size(), s.n_geo_samples);
    for (std::size_t i = 0; i < snaps.failed.size(); ++i)
      std::fprintf(stderr, "  sample %d: %s\n", snaps.failed[i], snaps.failure_messages[i].c_str());
  }
  if (snaps.columns.cols() == 0) throw SolverError("offline: every snapshot solve failed");
  OfflineModel model = build_model(data, s.eps_svd, s.eps_eim, s);
  model.quantize();
  const std::string path = container_path(cfg);
  write_model(path, model);
  write_meta(path, model, meta_of(cfg, s, s.eps_svd, s.eps_eim));

  Csv sv(dir / "singular-values.csv", "index,sigma,relative");
  const auto& sigma = model.basis.singular_values;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    sv << int(i + 1) << sigma[i] << sigma[i] / sigma[0];
    sv.end();
  }
  Csv eim(dir / "eim-errors.csv", "kind,entry,q,max_relative_error");
  for (const auto* set : {&data.cross, &data.self_j, &data.self_reg})
    for (const auto& g : *set)
      for (std::size_t q = 0; q < g.trajectory.size(); ++q) {
        eim << to_string(g.kind) << g.entry << int(q) << g.trajectory[q];
        eim.end();
      }
  Csv t(dir / "offline-timings.csv", "phase,time_ms");
  t << "snapshots" << data.ms_snapshots;
  t.end();
  t << "eim" << data.ms_eim;
  t.end();
  for (const auto* set : {&model.cross, &model.self_j, &model.self_reg})
    for (const auto& m : *set)
      if (m.q_max_reached || m.stagnated)
        std::fprintf(stderr, "offline: %s entry %d stopped at q=%d before reaching eps_eim (%s)\n",
                     to_string(m.kind), m.entry, m.q(), m.stagnated ? "stagnated" : "q_max");
  print_model_summary(model, cfg.geometry.M);
  std::printf("offline: model written to %s\n", path.c_str());
  return 0;
}

int cmd_rb_solve(const ExperimentConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const std::string path = container_path(cfg);
  if (!fs::exists(path)) throw InputError("rb-solve: no model container at " + path + "; run offline first");
  const ModelMeta meta = read_meta(path);
  if (meta.family_hash != cfg.hash())
    throw InputError("rb-solve: the model at " + path +
                     " was trained for a different family, physics or discretization "
                     "(family hash mismatch); rerun offline with this config");
  const OfflineModel model = read_model(path);
  const GlobalGeometry& geom = cfg.geometry.geom;
  Csv rows(dir / "rb-errors.csv", "sample,M,N,R,mean_q,pct_error,pct_residual,extrapolated,lu_fallback");
  Csv times(dir / "rb-timings.csv", "sample,M,time_rb_ms,time_hf_ms");
  for (int i = 0; i < cfg.run.samples; ++i) {
    const MultiArcConfig mc = multi_arc(cfg, configuration(cfg, i));
    RbRun rb;
    const double t_rb = median_ms(cfg.run.timing_repeats, [&] { rb = rb_once(mc, model, geom, cfg.run.threads); });
    const double res = aposteriori_residual(mc, rb.sol.density);
    rows << i << mc.M() << model.N << model.basis.R() << model.mean_q(mc.M());
    times << i << mc.M() << t_rb;
    if (cfg.run.skip_hf) {
      rows << "";
      times << "";
    } else {
      HfSolution hf;
      const double t_hf = median_ms(cfg.run.timing_repeats, [&] { hf = solve_hf(mc); });
      rows << pct_error(rb.sol.density, hf.density);
      times << t_hf;
    }
    rows << 100.0 * res << rb.extrapolated << int(rb.sol.lu_fallback);
    rows.end();
    times.end();
  }
  std::printf("rb-solve: %d sample(s) written to %s\n", cfg.run.samples, dir.string().c_str());
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const auto& svd = cfg.rom.sweep_eps_svd;
  const auto& eim = cfg.rom.sweep_eps_eim;
  if (svd.empty() || eim.empty()) throw ConfigError("sweep: empty tolerance grid");
  OfflineSettings s = cfg.offline_settings();
  s.eps_eim = *std::min_element(eim.begin(), eim.end());
  const ArcFamily fam = cfg.family();
  const OfflineData data = run_offline(fam, cfg.physics.params, s);

  std::vector<MultiArcConfig> configs;
  std::vector<HfSolution> hf;
  std::vector<double> t_hf;
  for (int i = 0; i < cfg.run.samples; ++i) {
    configs.push_back(multi_arc(cfg, configuration(cfg, i)));
    if (cfg.run.skip_hf) continue;
    HfSolution sol;
    t_hf.push_back(median_ms(cfg.run.timing_repeats, [&] { sol = solve_hf(configs.back()); }));
    hf.push_back(std::move(sol));
  }
  Csv rows(dir / "sweep.csv", "eps_svd,eps_eim,R,mean_q,pct_error,pct_residual");
  Csv times(dir / "sweep-timings.csv", "eps_svd,eps_eim,time_rb_ms,time_hf_ms");
  for (double es : svd)
    for (double ee : eim) {
      const OfflineModel model = build_model(data, es, ee, s);
      double err = 0.0, res = 0.0, trb = 0.0, thf = 0.0;
      for (std::size_t i = 0; i < configs.size(); ++i) {
        RbRun rb;
        trb += median_ms(cfg.run.timing_repeats, [&] { rb = rb_once(configs[i], model, fam.geom, cfg.run.threads); });
        res += 100.0 * aposteriori_residual(configs[i], rb.sol.density);
        if (!hf.empty()) {
          err += pct_error(rb.sol.density, hf[i].density);
          thf += t_hf[i];
        }
      }
      const double n = static_cast<double>(configs.size());
      rows << es << ee << model.basis.R() << model.mean_q(cfg.geometry.M);
      if (hf.empty()) rows << "";
      else rows << err / n;
      rows << res / n;
      rows.end();
      times << es << ee << trb / n;
      if (hf.empty()) times << "";
      else times << thf / n;
      times.end();
    }
  std::printf("sweep: %zu x %zu grid written to %s\n", svd.size(), eim.size(), dir.string().c_str());
  return 0;
}

int cmd_validate(const ExperimentConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const ArcFamily fam = cfg.family();
  std::vector<SegmentMeta> segments;
  for (const auto& arc : configuration(cfg, 0)) segments.push_back(arc.segment());
  const ValidationReport rep = validate_family(fam.geom, *fam.basis, segments);
  Csv out(dir / "validate.csv", "check,passed,informational,detail");
  for (const auto& c : rep.checks) {
    out << c.name << int(c.passed) << int(c.informational) << ("\"" + c.detail + "\"");
    out.end();
    std::printf("%-4s %s%s: %s\n", c.passed ? "ok" : "FAIL", c.name.c_str(),
                c.informational ? " (informational)" : "", c.detail.c_str());
  }
  std::printf("validate: family %s\n", rep.ok() ? "accepted" : "rejected");
  return rep.ok() ? 0 : 2;
}

}  // namespace arcrom::cli
