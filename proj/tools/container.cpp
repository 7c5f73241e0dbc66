#include "container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace arcrom::cli {
namespace {

constexpr char kMagic[8] = {'A', 'R', 'C', 'R', 'O', 'M', '1', '\0'};

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open " + path + " for writing");
  }

  template <class U>
  void uint(U v) {
    unsigned char b[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), sizeof b);
  }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

  void complex64(const MatrixXc& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      f32(static_cast<float>(m.data()[i].real()));
      f32(static_cast<float>(m.data()[i].imag()));
    }
  }

  void close(const std::string& path) {
    out_.close();
    if (!out_) throw Error("write to " + path + " failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error("cannot open " + path);
  }

  template <class U>
  U uint() {
    unsigned char b[sizeof(U)];
    raw(reinterpret_cast<char*>(b), sizeof b);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(b[i]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  void raw(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n))
      throw Error(path_ + ": truncated model container");
  }

  MatrixXc complex64(Eigen::Index rows, Eigen::Index cols) {
    if (rows < 0 || cols < 0 || (rows > 0 && cols > (Eigen::Index(1) << 40) / rows))
      throw Error(path_ + ": corrupt matrix dimensions");
    MatrixXc m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const float re = f32();
      const float im = f32();
      m.data()[i] = cplx(re, im);
    }
    return m;
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof())
      throw Error(path_ + ": trailing bytes in model container");
  }

 private:
  std::string path_;
  std::ifstream in_;
};

void write_eim(Writer& w, const EimModel& m) {
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(m.kind));
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(m.entry));
  w.uint<std::uint8_t>(static_cast<std::uint8_t>((m.stagnated ? 1 : 0) | (m.q_max_reached ? 2 : 0)));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(m.q()));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(m.R()));
  for (auto x : m.magic) w.uint<std::uint32_t>(x);
  for (std::size_t i = 0; i < m.magic.size(); ++i)
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(i < m.selected.size() ? m.selected[i] : -1));
  w.uint<std::uint64_t>(m.trajectory.size());
  for (double t : m.trajectory) w.f64(t);
  w.complex64(m.interp_square);
  w.complex64(m.reduced);
  if (m.kind == GridKind::cross) w.complex64(m.reduced_swapped);
}

EimModel read_eim(Reader& r, int n_c, double eps_eim) {
  EimModel m;
  const int kind = r.uint<std::uint8_t>();
  if (kind > 2) throw Error("model container: unknown kernel kind");
  m.kind = static_cast<GridKind>(kind);
  m.entry = r.uint<std::uint8_t>();
  const int flags = r.uint<std::uint8_t>();
  m.stagnated = flags & 1;
  m.q_max_reached = flags & 2;
  const auto q = r.uint<std::uint32_t>();
  const auto R = r.uint<std::uint32_t>();
  m.n_c = n_c;
  m.eps_eim = eps_eim;
  m.magic.resize(q);
  for (auto& x : m.magic) x = r.uint<std::uint32_t>();
  m.selected.resize(q);
  for (auto& x : m.selected) x = static_cast<std::int32_t>(r.uint<std::uint32_t>());
  m.trajectory.resize(r.uint<std::uint64_t>());
  for (auto& t : m.trajectory) t = r.f64();
  m.interp_square = r.complex64(q, q);
  m.reduced = r.complex64(Eigen::Index(R) * R, q);
  if (m.kind == GridKind::cross) m.reduced_swapped = r.complex64(Eigen::Index(R) * R, q);
  return m;
}

std::string hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace

void write_model(const std::string& path, const OfflineModel& model) {
  Writer w(path);
  w.raw(kMagic, sizeof kMagic);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(model.N));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(model.n_c));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(model.n_log));
  w.f64(model.basis.eps_svd);
  w.f64(model.eps_eim);
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(model.basis.v.rows()));
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(model.basis.v.cols()));
  w.complex64(model.basis.v);
  w.uint<std::uint64_t>(static_cast<std::uint64_t>(model.basis.singular_values.size()));
  for (double s : model.basis.singular_values) w.f64(s);
  const auto n = model.cross.size() + model.self_j.size() + model.self_reg.size();
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(n));
  for (const auto* set : {&model.cross, &model.self_j, &model.self_reg})
    for (const auto& m : *set) write_eim(w, m);
  w.close(path);
}

OfflineModel read_model(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(path + ": not a model container (bad magic bytes)");
  OfflineModel m;
  m.N = static_cast<int>(r.uint<std::uint32_t>());
  m.n_c = static_cast<int>(r.uint<std::uint32_t>());
  m.n_log = static_cast<int>(r.uint<std::uint32_t>());
  m.basis.eps_svd = r.f64();
  m.eps_eim = r.f64();
  const auto rows = static_cast<Eigen::Index>(r.uint<std::uint64_t>());
  const auto cols = static_cast<Eigen::Index>(r.uint<std::uint64_t>());
  if (rows != 2 * (m.N + 1)) throw Error(path + ": basis rows do not match N");
  m.basis.v = r.complex64(rows, cols);
  m.basis.singular_values.resize(static_cast<Eigen::Index>(r.uint<std::uint64_t>()));
  for (auto& s : m.basis.singular_values) s = r.f64();
  const auto n = r.uint<std::uint32_t>();
  for (std::uint32_t i = 0; i < n; ++i) {
    EimModel e = read_eim(r, m.n_c, m.eps_eim);
    if (e.q() > 0 && e.R() != cols) throw Error(path + ": EIM model does not match the basis");
    switch (e.kind) {
      case GridKind::cross: m.cross.push_back(std::move(e)); break;
      case GridKind::self_j: m.self_j.push_back(std::move(e)); break;
      case GridKind::self_reg: m.self_reg.push_back(std::move(e)); break;
    }
  }
  r.expect_end();
  return m;
}

void write_meta(const std::string& path, const OfflineModel& model, const ModelMeta& meta) {
  nlohmann::ordered_json j;
  j["format"] = "ARCROM1";
  j["family_hash"] = hex(meta.family_hash);
  j["eps_svd"] = meta.eps_svd;
  j["eps_eim"] = meta.eps_eim;
  j["snapshot_seed"] = meta.snapshot_seed;
  j["candidate_seed"] = meta.candidate_seed;
  j["n_geo_samples"] = meta.n_geo_samples;
  j["cross_candidates"] = meta.cross_candidates;
  j["self_candidates"] = meta.self_candidates;
  j["q_max"] = meta.q_max;
  j["second_rhs"] = meta.second_rhs;
  j["N"] = model.N;
  j["n_c"] = model.n_c;
  j["n_log"] = model.n_log;
  j["R"] = model.basis.R();
  auto qs = [](const std::vector<EimModel>& set) {
    std::vector<int> q;
    for (const auto& m : set) q.push_back(m.q());
    return q;
  };
  j["q"] = {{"cross", qs(model.cross)}, {"self_j", qs(model.self_j)}, {"self_reg", qs(model.self_reg)}};
  std::ofstream out(path + ".json");
  if (!out) throw Error("cannot open " + path + ".json for writing");
  out << j.dump(2) << "\n";
}

ModelMeta read_meta(const std::string& path) {
  std::ifstream in(path + ".json");
  if (!in) throw Error("cannot open " + path + ".json");
  ModelMeta meta;
  try {
    const auto j = nlohmann::json::parse(in);
    meta.family_hash = std::stoull(j.at("family_hash").get<std::string>(), nullptr, 16);
    meta.eps_svd = j.at("eps_svd").get<double>();
    meta.eps_eim = j.at("eps_eim").get<double>();
    meta.snapshot_seed = j.at("snapshot_seed").get<std::uint64_t>();
    meta.candidate_seed = j.at("candidate_seed").get<std::uint64_t>();
    meta.n_geo_samples = j.at("n_geo_samples").get<int>();
    meta.cross_candidates = j.at("cross_candidates").get<int>();
    meta.self_candidates = j.at("self_candidates").get<int>();
    meta.q_max = j.at("q_max").get<int>();
    meta.second_rhs = j.at("second_rhs").get<std::string>();
  } catch (const std::exception& e) {
    throw Error(path + ".json: malformed metadata (" + e.what() + ")");
  }
  return meta;
}

}  // namespace arcrom::cli
