#include "arcrom/rom.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstring>

#include "arcrom/parallel.hpp"
#include "arcrom/sampling.hpp"
#include "arcrom/spectral.hpp"

namespace arcrom {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::pair<int, int> entry_slot(int entry) { return {entry / 2, entry % 2}; }

void check_entry(int entry) {
  if (entry != 0 && entry != 1 && entry != 3)
    throw MisuseError("kernel entry must be 0 (11), 1 (12 and 21) or 3 (22)");
}

Eigen::Map<const VectorXc> flat(const MatrixXc& m) { return {m.data(), m.size()}; }

}  // namespace

const char* to_string(SecondRhs r) {
  return r == SecondRhs::rotated_polarization ? "rotated_polarization" : "rotated_direction";
}

SnapshotMatrix sample_snapshots(const ArcFamily& family, const ElasticParams& params,
                                int n_geo_samples, double theta, std::uint64_t seed,
                                const SnapshotOptions& opts) {
  if (n_geo_samples < 1) throw DomainError("sample_snapshots: need at least one sample");
  const int s = family.geom.s;
  const int N = opts.N, n = 2 * (N + 1);
  const int n_c = opts.n_c > 0 ? opts.n_c : spectral::default_node_count(N);
  const int n_log = opts.n_log > 0 ? opts.n_log : spectral::default_log_terms(N);
  Halton halton(s + 4, seed);
  const Eigen::MatrixXd Y = halton.take(n_geo_samples);

  std::vector<MatrixXc> sols(n_geo_samples);
  std::vector<Eigen::Vector2d> res(n_geo_samples);
  std::vector<std::string> errors(n_geo_samples);
  parallel_for(
      n_geo_samples,
      [&](int i) {
        try {
          const Arc arc = generalized_arc(Y.row(i).transpose(), family.geom, family.basis);
          const MatrixXc A = assemble_self_block(params, arc, N, n_c, n_log, 1);
          MatrixXc B(n, 2);
          B.col(0) = assemble_rhs(params, arc, N, n_c, theta, theta);
          B.col(1) = opts.second == SecondRhs::rotated_polarization
                         ? assemble_rhs(params, arc, N, n_c, theta, theta + pi / 2)
                         : assemble_rhs(params, arc, N, n_c, theta + pi / 2, theta);
          Eigen::PartialPivLU<MatrixXc> lu(A);
          if (!(lu.rcond() > 1e-15)) throw SolverError("numerically singular self block");
          MatrixXc X = lu.solve(B);
          for (int c = 0; c < 2; ++c) res[i][c] = (A * X.col(c) - B.col(c)).norm() / B.col(c).norm();
          sols[i] = std::move(X);
        } catch (const Error& e) {
          errors[i] = e.what();
        }
      },
      opts.threads);

  SnapshotMatrix out;
  int kept = 0;
  for (int i = 0; i < n_geo_samples; ++i) kept += errors[i].empty();
  out.columns.resize(n, 2 * kept);
  out.sample_params.resize(kept, s + 4);
  int c = 0;
  for (int i = 0; i < n_geo_samples; ++i) {
    if (!errors[i].empty()) {
      out.failed.push_back(i);
      out.failure_messages.push_back(errors[i]);
      continue;
    }
    out.columns.middleCols(2 * c, 2) = sols[i];
    out.sample_params.row(c) = Y.row(i);
    for (int r = 0; r < 2; ++r) {
      out.rhs_kind.push_back(r);
      out.residuals.push_back(res[i][r]);
    }
    ++c;
  }
  return out;
}

int energy_rank(const Eigen::VectorXd& sigma, double eps_svd) {
  const Eigen::Index n = sigma.size();
  if (n == 0 || sigma[0] <= 0.0) return 0;
  const double floor = sigma[0] * std::numeric_limits<double>::epsilon() * double(n);
  int rank = 0;
  while (rank < n && sigma[rank] > floor) ++rank;
  // tail[r] = sum_{i >= r} sigma_i^2, summed from the small end
  std::vector<double> tail(n + 1, 0.0);
  for (Eigen::Index i = n - 1; i >= 0; --i) tail[i] = tail[i + 1] + sigma[i] * sigma[i];
  const double total = tail[0];
  for (int R = 1; R <= rank; ++R)
    if (tail[R] < eps_svd * eps_svd * total) return R;
  return rank;
}

ReducedBasis pod_basis(const MatrixXc& snapshots, double eps_svd) {
  if (snapshots.size() == 0) throw DimensionError("pod_basis: empty snapshot matrix");
  if (!(eps_svd > 0.0 && eps_svd < 1.0)) throw DomainError("pod_basis: eps_svd must lie in (0,1)");
  Eigen::BDCSVD<MatrixXc> svd(snapshots, Eigen::ComputeThinU);
  ReducedBasis out;
  out.singular_values = svd.singularValues();
  out.eps_svd = eps_svd;
  out.v = svd.matrixU().leftCols(energy_rank(out.singular_values, eps_svd));
  return out;
}

ReducedBasis complete_basis(int N) {
  ReducedBasis out;
  out.v = MatrixXc::Identity(2 * (N + 1), 2 * (N + 1));
  out.singular_values = Eigen::VectorXd::Ones(2 * (N + 1));
  return out;
}

ReducedMap::ReducedMap(MatrixXc v, int n_log) : v_(std::move(v)) {
  if (v_.rows() < 2 || v_.rows() % 2) throw DimensionError("ReducedMap: basis rows must be 2(N+1)");
  N_ = static_cast<int>(v_.rows() / 2) - 1;
  n_log_ = n_log > 0 ? n_log : spectral::default_log_terms(N_);
}

MatrixXc ReducedMap::scalar_block(GridKind kind, const MatrixXc& scalar) const {
  if (kind == GridKind::self_j)
    return spectral::singular_assemble(2.0 * spectral::cheb2d_coeffs(scalar),
                                       spectral::log_coeffs(n_log_), N_);
  return spectral::matrix_transform(scalar, N_);
}

MatrixXc ReducedMap::project(int entry, const MatrixXc& block, bool swapped) const {
  check_entry(entry);
  const int n = N_ + 1;
  auto part = [&](int a) { return v_.middleRows(a * n, n); };
  const auto [a, b] = entry_slot(entry);
  MatrixXc out;
  if (!swapped) {
    out = part(a).adjoint() * block * part(b);
    if (a != b) out += part(b).adjoint() * block * part(a);
  } else {
    out = part(b).adjoint() * block.transpose() * part(a);
    if (a != b) out += part(a).adjoint() * block.transpose() * part(b);
  }
  return out;
}

MatrixXc ReducedMap::apply(const KernelGrid& grid) const {
  const int n = N_ + 1;
  MatrixXc out = MatrixXc::Zero(R(), R());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out += v_.middleRows(a * n, n).adjoint() * scalar_block(grid.kind, grid.entry(a, b)) *
             v_.middleRows(b * n, n);
  return out;
}

MatrixXc ReducedMap::apply_entry(GridKind kind, int entry, const MatrixXc& scalar,
                                 bool swapped) const {
  return project(entry, scalar_block(kind, scalar), swapped);
}

int EimGreedy::terms_for(double eps) const {
  for (std::size_t q = 0; q < trajectory.size(); ++q)
    if (trajectory[q] < eps) return std::min<int>(static_cast<int>(q), this->q());
  return q();
}

namespace {

struct GreedyState {
  EimGreedy g;
  std::vector<VectorXc> basis;

  void add(const VectorXc& residual, std::uint32_t x, int candidate) {
    VectorXc xi = residual / residual[x];
    xi[x] = 1.0;
    g.magic.push_back(x);
    g.selected.push_back(candidate);
    basis.push_back(std::move(xi));
  }

  bool stagnant(int window) const {
    const auto& t = g.trajectory;
    if (window <= 0 || static_cast<int>(t.size()) <= window) return false;
    const auto first = t.end() - window - 1;
    const auto [lo, hi] = std::minmax_element(first, t.end());
    return *hi - *lo <= 1e-14;
  }

  void finish(double eps, int q_max) {
    const int q = static_cast<int>(basis.size());
    g.q_max_reached = q >= q_max && g.trajectory.back() >= eps;
    const Eigen::Index P = q ? basis[0].size() : 0;
    g.basis.resize(P, q);
    for (int j = 0; j < q; ++j) g.basis.col(j) = basis[j];
    g.interp_square.resize(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) g.interp_square(i, j) = basis[j][g.magic[i]];
  }
};

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

int argmax_of(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::uint32_t argmax_abs(const VectorXc& r) {
  Eigen::Index x;
  r.cwiseAbs2().maxCoeff(&x);
  return static_cast<std::uint32_t>(x);
}

EimGreedy greedy_resident(GridKind kind, int entry, int n_c, MatrixXc H, const EimOptions& opts) {
  GreedyState st;
  st.g.kind = kind;
  st.g.entry = entry;
  st.g.n_c = n_c;
  const int ns = static_cast<int>(H.cols());
  std::vector<double> norm0(ns), err(ns);
  for (int l = 0; l < ns; ++l) {
    norm0[l] = H.col(l).norm();
    err[l] = norm0[l] > 0.0 ? 1.0 : 0.0;
  }
  st.g.trajectory.push_back(max_of(err));
  const int chunk = 16;
  const int n_chunks = (ns + chunk - 1) / chunk;
  while (st.g.trajectory.back() >= opts.eps && st.g.q() < opts.q_max) {
    const int best = argmax_of(err);
    const std::uint32_t x = argmax_abs(H.col(best));
    if (H(x, best) == 0.0) break;
    st.add(H.col(best), x, best);
    const VectorXc& xi = st.basis.back();
    H.col(best).setZero();
    err[best] = 0.0;
    parallel_for(
        n_chunks,
        [&](int c) {
          for (int l = c * chunk; l < std::min(ns, (c + 1) * chunk); ++l) {
            if (l == best) continue;
            const cplx a = H(x, l);
            if (a != 0.0) H.col(l) -= a * xi;
            err[l] = norm0[l] > 0.0 ? H.col(l).norm() / norm0[l] : 0.0;
          }
        },
        opts.threads);
    st.g.trajectory.push_back(max_of(err));
    if (st.stagnant(opts.stagnation_window)) {
      st.g.stagnated = true;
      break;
    }
  }
  st.finish(opts.eps, opts.q_max);
  return std::move(st.g);
}

EimGreedy greedy_chunked(GridKind kind, int entry, int n_c, int ns, const CandidateGrid& candidate,
                         int chunk, const EimOptions& opts) {
  GreedyState st;
  st.g.kind = kind;
  st.g.entry = entry;
  st.g.n_c = n_c;
  const Eigen::Index P = Eigen::Index(n_c) * n_c;
  std::vector<double> norm0(ns, 0.0);
  bool first = true;
  for (;;) {
    const int q = st.g.q();
    MatrixXc B(P, q);
    for (int j = 0; j < q; ++j) B.col(j) = st.basis[j];
    std::vector<double> err(ns, 0.0);
    VectorXc best_res;
    int best = -1;
    double best_err = -1.0;
    for (int start = 0; start < ns; start += chunk) {
      const int count = std::min(chunk, ns - start);
      MatrixXc H(P, count);
      parallel_for(
          count,
          [&](int c) {
            const KernelGrid g = candidate(start + c);
            H.col(c) = flat(g.entries[entry]);
            if (first) norm0[start + c] = H.col(c).norm();
            if (q > 0) {
              VectorXc vals(q);
              for (int i = 0; i < q; ++i) vals[i] = H(st.g.magic[i], c);
              H.col(c) -= B * st.g.interp_square.topLeftCorner(q, q)
                                  .triangularView<Eigen::UnitLower>()
                                  .solve(vals);
            }
            const double n0 = norm0[start + c];
            err[start + c] = n0 > 0.0 ? H.col(c).norm() / n0 : 0.0;
          },
          opts.threads);
      for (int c = 0; c < count; ++c)
        if (err[start + c] > best_err) {
          best_err = err[start + c];
          best = start + c;
          best_res = H.col(c);
        }
    }
    first = false;
    st.g.trajectory.push_back(max_of(err));
    if (st.stagnant(opts.stagnation_window)) {
      st.g.stagnated = true;
      break;
    }
    if (st.g.trajectory.back() < opts.eps || q >= opts.q_max) break;
    const std::uint32_t x = argmax_abs(best_res);
    if (best_res[x] == 0.0) break;
    st.add(best_res, x, best);
    const int qn = st.g.q();
    st.g.interp_square.conservativeResize(qn, qn);
    for (int j = 0; j < qn; ++j) st.g.interp_square(qn - 1, j) = st.basis[j][x];
    for (int i = 0; i < qn - 1; ++i) st.g.interp_square(i, qn - 1) = 0.0;
  }
  st.finish(opts.eps, opts.q_max);
  return std::move(st.g);
}

}  // namespace

std::vector<EimGreedy> eim_greedy(GridKind kind, const std::vector<int>& entries,
                                  int n_candidates, int n_c, const CandidateGrid& candidate,
                                  const EimOptions& opts) {
  if (n_candidates < 1) throw DomainError("eim_greedy: empty candidate set");
  for (int e : entries) check_entry(e);
  const Eigen::Index P = Eigen::Index(n_c) * n_c;
  const double mb_per_entry = 16.0 * double(P) * n_candidates / (1024.0 * 1024.0);
  std::vector<EimGreedy> out;

  auto evaluate = [&](const std::vector<int>& which) {
    std::vector<MatrixXc> H(which.size(), MatrixXc(P, n_candidates));
    parallel_for(
        n_candidates,
        [&](int l) {
          const KernelGrid g = candidate(l);
          if (g.n_c() != n_c) throw DimensionError("eim_greedy: candidate grid has wrong size");
          for (std::size_t e = 0; e < which.size(); ++e) H[e].col(l) = flat(g.entries[which[e]]);
        },
        opts.threads);
    return H;
  };

  if (mb_per_entry * entries.size() <= opts.memory_budget_mb) {
    auto H = evaluate(entries);
    for (std::size_t e = 0; e < entries.size(); ++e)
      out.push_back(greedy_resident(kind, entries[e], n_c, std::move(H[e]), opts));
  } else if (mb_per_entry <= opts.memory_budget_mb) {
    for (int e : entries) {
      auto H = evaluate({e});
      out.push_back(greedy_resident(kind, e, n_c, std::move(H[0]), opts));
    }
  } else {
    const int chunk =
        std::max(1, static_cast<int>(opts.memory_budget_mb * 1024.0 * 1024.0 / (16.0 * double(P))));
    for (int e : entries)
      out.push_back(greedy_chunked(kind, e, n_c, n_candidates, candidate, chunk, opts));
  }
  return out;
}

int EimModel::R() const {
  return static_cast<int>(std::lround(std::sqrt(double(reduced.rows()))));
}

VectorXc EimModel::coefficients(const VectorXc& values) const {
  if (values.size() != q()) throw DimensionError("EimModel: expected one value per magic point");
  return interp_square.triangularView<Eigen::UnitLower>().solve(values);
}

MatrixXc EimModel::combine(const VectorXc& coeffs, bool swapped) const {
  const MatrixXc& src = swapped ? reduced_swapped : reduced;
  if (swapped && kind != GridKind::cross) return combine(coeffs, false);
  const int r = R();
  VectorXc flat_out = src * coeffs;
  return Eigen::Map<MatrixXc>(flat_out.data(), r, r);
}

EimModel eim_reduce(const EimGreedy& greedy, const ReducedMap& map, double eps_eim) {
  EimModel m;
  m.kind = greedy.kind;
  m.entry = greedy.entry;
  m.n_c = greedy.n_c;
  m.eps_eim = eps_eim;
  const int q = greedy.terms_for(eps_eim);
  m.magic.assign(greedy.magic.begin(), greedy.magic.begin() + q);
  m.selected.assign(greedy.selected.begin(), greedy.selected.begin() + q);
  m.interp_square = greedy.interp_square.topLeftCorner(q, q);
  m.trajectory.assign(greedy.trajectory.begin(),
                      greedy.trajectory.begin() + std::min<std::size_t>(q + 1, greedy.trajectory.size()));
  m.q_max_reached = greedy.q_max_reached && q == greedy.q();
  m.stagnated = greedy.stagnated && q == greedy.q();
  const int R = map.R();
  const bool cross = greedy.kind == GridKind::cross;
  m.reduced.resize(Eigen::Index(R) * R, q);
  if (cross) m.reduced_swapped.resize(Eigen::Index(R) * R, q);
  for (int j = 0; j < q; ++j) {
    const Eigen::Map<const MatrixXc> xi(greedy.basis.col(j).data(), greedy.n_c, greedy.n_c);
    const MatrixXc block = map.scalar_block(greedy.kind, xi);
    m.reduced.col(j) = flat(map.project(greedy.entry, block, false));
    if (cross) m.reduced_swapped.col(j) = flat(map.project(greedy.entry, block, true));
  }
  return m;
}

EimModel eim_offline(GridKind kind, int entry, int n_candidates, const CandidateGrid& candidate,
                     const ReducedMap& map, const EimOptions& opts) {
  const int n_c = candidate(0).n_c();
  auto g = eim_greedy(kind, {entry}, n_candidates, n_c, candidate, opts);
  return eim_reduce(g[0], map, opts.eps);
}

namespace {

VectorXc values_at(const EimModel& model, const ElasticParams& p, const std::vector<Vec2>& test,
                   const std::vector<Vec2>* trial, const Arc* self) {
  const auto [a, b] = entry_slot(model.entry);
  const auto& nodes = spectral::ChebGrid::get(model.n_c)->nodes();
  VectorXc out(model.q());
  for (int m = 0; m < model.q(); ++m) {
    const int i = static_cast<int>(model.magic[m] % model.n_c);
    const int l = static_cast<int>(model.magic[m] / model.n_c);
    if (model.kind == GridKind::cross)
      out[m] = green(p, test[i], (*trial)[l])(a, b);
    else
      out[m] = self_grid_value(p, *self, nodes[i], nodes[l], model.kind)(a, b);
  }
  return out;
}

std::vector<Vec2> node_points(const Arc& arc, int n_c) {
  const auto& nodes = spectral::ChebGrid::get(n_c)->nodes();
  std::vector<Vec2> pts(n_c);
  for (int i = 0; i < n_c; ++i) pts[i] = arc(nodes[i]);
  return pts;
}

}  // namespace

VectorXc magic_values(const EimModel& model, const ElasticParams& p, const Arc& test,
                      const Arc* trial) {
  if (model.kind == GridKind::cross) {
    if (!trial) throw MisuseError("magic_values: cross models need a trial arc");
    const auto pt = node_points(test, model.n_c), ps = node_points(*trial, model.n_c);
    return values_at(model, p, pt, &ps, nullptr);
  }
  return values_at(model, p, {}, nullptr, &test);
}

MatrixXc eim_online(const EimModel& model, const VectorXc& values, bool swapped) {
  return model.combine(model.coefficients(values), swapped);
}

Eigen::MatrixXd cross_candidates(const GlobalGeometry& geom, int count, std::uint64_t seed) {
  return Halton(2 * geom.s + 6, seed).take(count);
}

Eigen::MatrixXd self_candidates(const GlobalGeometry& geom, int count, std::uint64_t seed) {
  return Halton(geom.s + 2, seed).take(count);
}

double OfflineModel::mean_q(int M) const {
  auto avg = [](const std::vector<const std::vector<EimModel>*>& sets) {
    double sum = 0.0, count = 0.0;
    for (const auto* set : sets)
      for (const auto& m : *set) {
        const double w = m.entry == 1 ? 2.0 : 1.0;
        sum += w * m.q();
        count += w;
      }
    return count > 0 ? sum / count : 0.0;
  };
  const double mm = double(M) * M;
  return (mm - M) / mm * avg({&cross}) + M / mm * avg({&self_j, &self_reg});
}

namespace {

void quantize_matrix(MatrixXc& m) {
  m = m.cast<std::complex<float>>().cast<cplx>();
}

}  // namespace

void OfflineModel::quantize() {
  quantize_matrix(basis.v);
  for (auto* set : {&cross, &self_j, &self_reg})
    for (auto& m : *set) {
      quantize_matrix(m.interp_square);
      quantize_matrix(m.reduced);
      quantize_matrix(m.reduced_swapped);
    }
}

int OfflineSettings::nodes() const { return n_c > 0 ? n_c : spectral::default_node_count(N); }
int OfflineSettings::log_terms() const {
  return n_log > 0 ? n_log : spectral::default_log_terms(N);
}

OfflineData run_offline(const ArcFamily& family, const ElasticParams& params,
                        const OfflineSettings& settings) {
  OfflineData data;
  const int n_c = settings.nodes();
  auto t0 = Clock::now();
  SnapshotOptions so;
  so.N = settings.N;
  so.n_c = n_c;
  so.n_log = settings.log_terms();
  so.second = settings.second_rhs;
  so.threads = settings.threads;
  data.snapshots = sample_snapshots(family, params, settings.n_geo_samples, settings.theta0,
                                    settings.snapshot_seed, so);
  data.ms_snapshots = ms_since(t0);

  t0 = Clock::now();
  const auto& geom = family.geom;
  const auto& nodes = spectral::ChebGrid::get(n_c)->nodes();
  EimOptions eo;
  eo.eps = settings.eps_eim;
  eo.q_max = settings.q_max;
  eo.memory_budget_mb = settings.memory_budget_mb;
  eo.threads = settings.threads;
  const std::vector<int> entries(std::begin(model_entries), std::end(model_entries));

  const Eigen::MatrixXd zc = cross_candidates(geom, settings.cross_candidates, settings.candidate_seed);
  data.cross = eim_greedy(
      GridKind::cross, entries, settings.cross_candidates, n_c,
      [&](int l) {
        const Eigen::VectorXd z = zc.row(l).transpose();
        return cross_grid(params, h1_arc(z, geom, family.basis), h2_arc(z, geom, family.basis),
                          nodes, 1);
      },
      eo);

  const Eigen::MatrixXd zs =
      self_candidates(geom, settings.self_candidates, settings.candidate_seed + 1);
  for (GridKind kind : {GridKind::self_j, GridKind::self_reg}) {
    auto runs = eim_greedy(
        kind, entries, settings.self_candidates, n_c,
        [&](int l) {
          const Eigen::VectorXd z = zs.row(l).transpose();
          return self_grid(params, self_arc(z, geom, family.basis), nodes, kind, 1);
        },
        eo);
    (kind == GridKind::self_j ? data.self_j : data.self_reg) = std::move(runs);
  }
  data.ms_eim = ms_since(t0);
  return data;
}

OfflineModel build_model(const OfflineData& data, double eps_svd, double eps_eim,
                         const OfflineSettings& settings) {
  OfflineModel m;
  m.basis = pod_basis(data.snapshots.columns, eps_svd);
  m.N = settings.N;
  m.n_c = settings.nodes();
  m.n_log = settings.log_terms();
  m.eps_eim = eps_eim;
  const ReducedMap map(m.basis.v, m.n_log);
  for (const auto& g : data.cross) m.cross.push_back(eim_reduce(g, map, eps_eim));
  for (const auto& g : data.self_j) m.self_j.push_back(eim_reduce(g, map, eps_eim));
  for (const auto& g : data.self_reg) m.self_reg.push_back(eim_reduce(g, map, eps_eim));
  return m;
}

namespace {

bool outside_box(const Eigen::VectorXd& z) {
  return z.size() && z.cwiseAbs().maxCoeff() > 0.5 + 1e-12;
}

}  // namespace

ReducedSystem assemble_reduced(const MultiArcConfig& cfg, const OfflineModel& model,
                               const GlobalGeometry& geom, const ReducedAssemblyOptions& opts) {
  if (cfg.options.N != model.N)
    throw DimensionError("assemble_reduced: configuration order differs from the model");
  const MatrixXc& V = model.basis.v;
  if (V.rows() != cfg.block_size()) throw DimensionError("assemble_reduced: basis size mismatch");
  ReducedSystem sys;
  sys.M = cfg.M();
  sys.R = model.basis.R();
  sys.matrix = MatrixXc::Zero(Eigen::Index(sys.M) * sys.R, Eigen::Index(sys.M) * sys.R);
  sys.rhs = VectorXc::Zero(Eigen::Index(sys.M) * sys.R);
  if (sys.M == 0 || sys.R == 0) return sys;

  MultiArcConfig local = cfg;
  local.options.n_c = model.n_c;
  local.options.n_log = model.n_log;
  local.options.adaptive_nodes = false;
  local.options.threads = 1;

  std::vector<std::pair<int, int>> tasks;
  for (int k = 0; k < sys.M; ++k)
    for (int j = k; j < sys.M; ++j) tasks.emplace_back(k, j);
  std::atomic<int> flagged{0};

  if (opts.exact) {
    parallel_for(
        static_cast<int>(tasks.size()),
        [&](int t) {
          const auto [k, j] = tasks[t];
          const MatrixXc A = assemble_block(local, k, j);
          sys.block(k, j) = V.adjoint() * A * V;
          if (k != j) sys.block(j, k) = V.adjoint() * A.transpose() * V;
        },
        opts.threads);
  } else {
    for (const auto& arc : cfg.arcs)
      if (arc.y().size() != geom.s)
        throw DimensionError("assemble_reduced: arc does not belong to the family");
    std::vector<std::vector<Vec2>> pts(sys.M);
    for (int k = 0; k < sys.M; ++k) pts[k] = node_points(cfg.arcs[k], model.n_c);
    parallel_for(
        static_cast<int>(tasks.size()),
        [&](int t) {
          const auto [k, j] = tasks[t];
          if (k == j) {
            const Arc& arc = cfg.arcs[k];
            if (outside_box(self_param(arc, geom))) ++flagged;
            MatrixXc b = MatrixXc::Zero(sys.R, sys.R);
            for (const auto* set : {&model.self_j, &model.self_reg})
              for (const auto& m : *set)
                b += eim_online(m, values_at(m, cfg.params, {}, nullptr, &arc));
            sys.block(k, k) = b;
            return;
          }
          const LiftedParam lp = lift_pair(cfg.arcs[k], cfg.arcs[j], geom, false);
          if (outside_box(lp.z)) ++flagged;
          const int a = lp.transposed ? j : k, b = lp.transposed ? k : j;
          MatrixXc ab = MatrixXc::Zero(sys.R, sys.R), ba = MatrixXc::Zero(sys.R, sys.R);
          for (const auto& m : model.cross) {
            const VectorXc c = m.coefficients(values_at(m, cfg.params, pts[a], &pts[b], nullptr));
            ab += m.combine(c, false);
            ba += m.combine(c, true);
          }
          sys.block(a, b) = ab;
          sys.block(b, a) = ba;
        },
        opts.threads);
  }
  for (int k = 0; k < sys.M; ++k)
    sys.rhs.segment(Eigen::Index(k) * sys.R, sys.R) = V.adjoint() * assemble_rhs(local, k);
  sys.extrapolated = flagged;
  return sys;
}

RbSolution rb_solve(const ReducedSystem& sys, const ReducedBasis& basis, const GmresOptions& gopts) {
  RbSolution out;
  const int M = sys.M, R = sys.R;
  if (basis.R() != R) throw DimensionError("rb_solve: basis does not match the system");
  VectorXc x = VectorXc::Zero(Eigen::Index(M) * R);
  if (M > 0 && R > 0) {
    std::vector<MatrixXc> diag;
    for (int k = 0; k < M; ++k) diag.push_back(sys.block(k, k));
    BlockJacobi pre(diag);
    auto res = gmres([&](const VectorXc& in, VectorXc& o) { o.noalias() = sys.matrix * in; },
                     [&](const VectorXc& in, VectorXc& o) { pre.apply(in, o); }, sys.rhs, gopts);
    out.iterations = res.iterations;
    if (res.converged) {
      x = std::move(res.x);
    } else {
      out.lu_fallback = true;
      x = sys.matrix.partialPivLu().solve(sys.rhs);
    }
    const double bn = sys.rhs.norm();
    out.rel_residual = bn > 0 ? (sys.matrix * x - sys.rhs).norm() / bn : 0.0;
  }
  for (int k = 0; k < M; ++k) {
    out.coeffs.push_back(x.segment(Eigen::Index(k) * R, R));
    out.density.arcs.push_back(basis.v * out.coeffs.back());
  }
  return out;
}

double aposteriori_residual(const MultiArcConfig& cfg, const DensitySet& density) {
  const int M = cfg.M();
  if (static_cast<int>(density.arcs.size()) != M)
    throw DimensionError("aposteriori_residual: density does not match the arcs");
  MultiArcConfig local = cfg;
  local.options.n_c = resolve_node_count(cfg);
  local.options.threads = 1;
  std::vector<double> terms(M);
  parallel_for(
      M,
      [&](int k) {
        const VectorXc g = assemble_rhs(local, k);
        VectorXc r = -g;
        for (int j = 0; j < M; ++j) r += assemble_block(local, k, j) * density.arcs[j];
        terms[k] = r.squaredNorm() / g.squaredNorm();
      },
      cfg.options.threads);
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

double aposteriori_residual(const MultiArcConfig& cfg, const ReducedBasis& basis,
                            const std::vector<VectorXc>& coeffs) {
  DensitySet d;
  for (const auto& c : coeffs) d.arcs.push_back(basis.v * c);
  return aposteriori_residual(cfg, d);
}

std::uint64_t family_hash(const ArcFamily& family, const ElasticParams& params, double theta0,
                          int N, int n_c) {
  const auto& g = family.geom;
  char buf[512];
  std::snprintf(buf, sizeof buf, "B=%.17g;r=%.17g,%.17g;d=%.17g,%.17g;s=%d;w=%.17g;l=%.17g;m=%.17g;t=%.17g;N=%d;nc=%d;",
                g.box_half_width, g.r_min, g.r_max, g.d_min, g.d_max, g.s, params.omega,
                params.lambda, params.mu, theta0, N, n_c);
  std::string text = buf;
  text += family.basis ? family.basis->tag() : std::string("none");
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace arcrom
