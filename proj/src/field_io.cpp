#include "nlslab/field_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace nlslab {

using nlohmann::json;

namespace {
std::string manifest_path(const std::string& csv_path) { return csv_path + ".json"; }
}  // namespace

void write_snapshot(const std::string& csv_path, const VecField& f, const SnapshotManifest& m) {
  std::ofstream out(csv_path);
  if (!out) throw PreconditionError("cannot open " + csv_path + " for writing");
  out << "x,re_a,im_a,re_b,im_b\n" << std::setprecision(17);
  for (int i = 0; i < f.n(); ++i) {
    out << f.grid.x(i) << ',' << f.a[i].real() << ',' << f.a[i].imag() << ','
        << f.b[i].real() << ',' << f.b[i].imag() << '\n';
  }
  json j;
  j["L"] = m.L;
  j["N"] = m.N;
  j["dt"] = m.dt;
  j["t"] = m.t;
  j["omega"] = m.omega;
  j["gamma"] = m.gamma;
  std::ofstream jm(manifest_path(csv_path));
  if (!jm) throw PreconditionError("cannot open manifest for " + csv_path);
  jm << j.dump(2) << '\n';
}

VecField read_snapshot(const std::string& csv_path, SnapshotManifest* manifest_out) {
  std::ifstream jm(manifest_path(csv_path));
  if (!jm) throw PreconditionError("missing manifest for " + csv_path);
  json j = json::parse(jm);
  SnapshotManifest m;
  m.L = j.at("L").get<double>();
  m.N = j.at("N").get<int>();
  m.dt = j.value("dt", 2e-3);
  m.t = j.value("t", 0.0);
  m.omega = j.value("omega", 0.0);
  m.gamma = j.value("gamma", 0.0);

  Grid grid(m.L, m.N, m.dt > 0 ? m.dt : 2e-3);
  VecField f(grid);
  std::ifstream in(csv_path);
  if (!in) throw PreconditionError("cannot open " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  for (int i = 0; i < m.N; ++i) {
    if (!std::getline(in, line)) throw PreconditionError("snapshot truncated: " + csv_path);
    std::istringstream ss(line);
    double x, ra, ia, rb, ib;
    char c;
    ss >> x >> c >> ra >> c >> ia >> c >> rb >> c >> ib;
    f.a[i] = Complex(ra, ia);
    f.b[i] = Complex(rb, ib);
  }
  if (manifest_out) *manifest_out = m;
  return f;
}

}  // namespace nlslab
