#include "config.hpp"

#include "heatcoeff/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace heatcoeff::cli {

namespace {

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw ValidationError(std::string("config: missing field \"") + key + "\"");
  return doc.at(key);
}

int get_int(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ValidationError(std::string("config: ") + what + " must be an integer");
  return j.get<int>();
}

double get_double(const json& j, const char* what) {
  if (!j.is_number()) throw ValidationError(std::string("config: ") + what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(std::string("config: ") + what + " must be finite");
  return v;
}

template <class T>
T value_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  if constexpr (std::is_same_v<T, int>) return get_int(doc.at(key), key);
  else if constexpr (std::is_same_v<T, double>) return get_double(doc.at(key), key);
  else return doc.at(key).get<T>();
}

DensityForm parse_form(const std::string& s) {
  if (s == "automatic") return DensityForm::automatic;
  if (s == "coordinate") return DensityForm::coordinate;
  if (s == "covariant") return DensityForm::covariant;
  if (s == "corollary") return DensityForm::corollary;
  throw ValidationError("config: unknown form \"" + s + "\"");
}

std::vector<MatJet> parse_jet_list(const json& j, int N, int d, int order, const char* what);

MatJet parse_jet(const json& j, int N, int d, int order) {
  MatJet r(parse_matrix(require(j, "value"), N), d, order);
  if (order >= 1 && j.contains("d")) {
    const json& dj = j.at("d");
    if (!dj.is_array() || static_cast<int>(dj.size()) != d) throw ValidationError("config: jet \"d\" needs dim entries");
    for (int mu = 0; mu < d; ++mu) r.d[mu] = parse_matrix(dj[mu], N);
  }
  if (order >= 2 && j.contains("dd")) {
    const json& dd = j.at("dd");
    if (!dd.is_array() || static_cast<int>(dd.size()) != d) throw ValidationError("config: jet \"dd\" needs dim rows");
    for (int mu = 0; mu < d; ++mu) {
      if (!dd[mu].is_array() || static_cast<int>(dd[mu].size()) != d)
        throw ValidationError("config: jet \"dd\" needs dim x dim entries");
      for (int nu = 0; nu < d; ++nu) r.dd_at(mu, nu) = parse_matrix(dd[mu][nu], N);
    }
    for (int mu = 0; mu < d; ++mu)
      for (int nu = 0; nu < mu; ++nu)
        if (max_abs(r.dd_at(mu, nu) - r.dd_at(nu, mu)) > 1e-12 * (1.0 + max_abs(r.dd_at(mu, nu))))
          throw ValidationError("config: jet second derivatives must be symmetric");
  }
  return r;
}

std::vector<MatJet> parse_jet_list(const json& j, int N, int d, int order, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw ValidationError(std::string("config: \"") + what + "\" needs dim entries");
  std::vector<MatJet> out;
  for (const auto& e : j) out.push_back(parse_jet(e, N, d, order));
  return out;
}

std::vector<MatJet> zero_jets(int N, int d, int order) {
  return std::vector<MatJet>(d, MatJet(Mat::Zero(N, N), d, order));
}

void apply_oracle_settings(const json& doc, VerifyOptions& v, const Overrides& ov) {
  if (doc.contains("oracle")) {
    const json& o = doc.at("oracle");
    v.oracle.cutoff = value_or(o, "cutoff", v.oracle.cutoff);
    v.oracle.transverse_radius = value_or(o, "transverse_radius", v.oracle.transverse_radius);
    v.oracle.max_block_dim = static_cast<size_t>(value_or(o, "max_block_dim", static_cast<int>(v.oracle.max_block_dim)));
  }
  if (doc.contains("fit")) {
    const json& f = doc.at("fit");
    v.fit.n_terms = value_or(f, "n_terms", v.fit.n_terms);
    v.fit.points = value_or(f, "points", v.fit.points);
    v.fit.t_min = value_or(f, "t_min", v.fit.t_min);
    v.fit.t_max = value_or(f, "t_max", v.fit.t_max);
    v.fit.max_condition = value_or(f, "max_condition", v.fit.max_condition);
  }
  v.density_points = value_or(doc, "density_points", v.density_points);
  if (ov.cutoff) v.oracle.cutoff = *ov.cutoff;
  if (v.oracle.cutoff < 1) throw ValidationError("config: cutoff must be positive");
  if (v.oracle.transverse_radius < 0) throw ValidationError("config: transverse_radius must be non-negative");
  if (v.fit.n_terms < 2) throw ValidationError("config: fit.n_terms must be at least 2");
  if (v.fit.points < v.fit.n_terms) throw ValidationError("config: fit.points must be at least fit.n_terms");
  if (v.fit.t_min < 0 || !(v.fit.t_max > 0)) throw ValidationError("config: invalid t window");
  if (v.density_points < 1) throw ValidationError("config: density_points must be positive");
}

void apply_curvature_settings(const json& doc, NctCurvatureOptions& c, const Overrides& ov) {
  c.radius = value_or(doc, "radius", c.radius);
  c.points = value_or(doc, "points", c.points);
  if (ov.cluster_tol) c.cluster_tol = *ov.cluster_tol;
  if (c.radius < 0) throw ValidationError("config: radius must be non-negative");
  if (c.points < 2 * c.radius + 1) throw ValidationError("config: points must be at least 2 radius + 1");
}

SpectralOptions spectral_from(const Overrides& ov) {
  SpectralOptions s;
  if (ov.gap_tol) {
    if (!(*ov.gap_tol > 0)) throw ValidationError("--gap-tol must be positive");
    s.policy.tau = *ov.gap_tol;
  }
  return s;
}

LocalOptions local_from(const Overrides& ov) {
  LocalOptions l;
  if (ov.cluster_tol) {
    if (!(*ov.cluster_tol > 0)) throw ValidationError("--cluster-tol must be positive");
    l.cluster_tol = *ov.cluster_tol;
  }
  return l;
}

//! k directly, or k = exp(h/2) through the realised functional calculus.
NctElement parse_conformal_factor(const json& doc, const NctCurvatureOptions& c) {
  if (doc.contains("k") == doc.contains("h")) throw ValidationError("config: give exactly one of \"k\" and \"h\"");
  if (doc.contains("k")) return parse_nct_element(doc.at("k"));
  const NctElement h = parse_nct_element(doc.at("h"));
  const NctElement ha = adjoint(h);
  double defect = 0.0;
  for (const auto& [k, v] : h.coeffs) defect = std::max(defect, std::abs(v - ha.coeff(k)));
  if (defect > 1e-12) throw ValidationError("config: \"h\" must be self-adjoint");
  return nct_function(h, [](double x) { return std::exp(0.5 * x); }, c.radius, c.points);
}

std::vector<std::optional<NctElement>> parse_nct_weights(const json& doc) {
  std::vector<std::optional<NctElement>> w;
  if (doc.contains("weight")) w.emplace_back(parse_nct_element(doc.at("weight")));
  if (doc.contains("weights"))
    for (const auto& e : doc.at("weights")) {
      if (e.is_null()) w.emplace_back(std::nullopt);
      else w.emplace_back(parse_nct_element(e));
    }
  if (w.empty()) w.emplace_back(std::nullopt);
  return w;
}

}  // namespace

// ----------------------------------------------------------------------------

ConfigKind parse_kind(const std::string& s) {
  if (s == "explicit-grid") return ConfigKind::explicit_grid;
  if (s == "fourier-fields") return ConfigKind::fourier_fields;
  if (s == "nct2") return ConfigKind::nct2;
  if (s == "nct4") return ConfigKind::nct4;
  if (s == "chart-analytic") return ConfigKind::chart_analytic;
  throw ValidationError("config: unknown kind \"" + s + "\"");
}

std::string to_string(ConfigKind k) {
  switch (k) {
    case ConfigKind::explicit_grid: return "explicit-grid";
    case ConfigKind::fourier_fields: return "fourier-fields";
    case ConfigKind::nct2: return "nct2";
    case ConfigKind::nct4: return "nct4";
    case ConfigKind::chart_analytic: return "chart-analytic";
  }
  return "?";
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open \"" + path + "\"");
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return check_config(std::move(doc));
}

json check_config(json doc) {
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  const json& schema = require(doc, "schema");
  if (!schema.is_string() || schema.get<std::string>() != "1")
    throw ValidationError("config: unsupported schema (expected \"1\")");
  const json& kind = require(doc, "kind");
  if (!kind.is_string()) throw ValidationError("config: kind must be a string");
  parse_kind(kind.get<std::string>());
  return doc;
}

ConfigKind config_kind(const json& doc) { return parse_kind(require(doc, "kind").get<std::string>()); }

// ----------------------------------------------------------------------------

cplx parse_complex(const json& j) {
  if (j.is_number()) return {get_double(j, "complex entry"), 0.0};
  if (j.is_array() && j.size() == 2) return {get_double(j[0], "real part"), get_double(j[1], "imaginary part")};
  throw ValidationError("config: complex numbers are a number or [re, im]");
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

Mat parse_matrix(const json& j, int N) {
  if (N < 1) throw ValidationError("config: fiber size must be positive");
  if (j.is_number()) return parse_complex(j) * identity(N);
  if (!j.is_array() || static_cast<int>(j.size()) != N)
    throw ValidationError("config: matrix must have " + std::to_string(N) + " rows");
  Mat m(N, N);
  for (int r = 0; r < N; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != N)
      throw ValidationError("config: matrix rows must have " + std::to_string(N) + " entries");
    for (int c = 0; c < N; ++c) m(r, c) = parse_complex(j[r][c]);
  }
  return m;
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

RMat parse_real_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("config: real matrix must be a non-empty array of rows");
  const size_t n = j.size();
  RMat m(n, n);
  for (size_t r = 0; r < n; ++r) {
    if (!j[r].is_array() || j[r].size() != n) throw ValidationError("config: real matrix must be square");
    for (size_t c = 0; c < n; ++c) m(r, c) = get_double(j[r][c], "matrix entry");
  }
  return m;
}

json to_json(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

NctElement parse_nct_element(const json& j) {
  const int m = get_int(require(j, "m"), "m");
  const json& th = require(j, "theta");
  if (!th.is_array()) throw ValidationError("config: theta must be a list of [p, q]");
  std::vector<Rational> theta;
  for (const auto& pq : th) {
    if (!pq.is_array() || pq.size() != 2) throw ValidationError("config: theta entries are [p, q]");
    theta.push_back({static_cast<long>(get_int(pq[0], "p")), static_cast<long>(get_int(pq[1], "q"))});
  }
  NctElement a(m, theta);
  const json& cs = require(j, "coeffs");
  if (!cs.is_array()) throw ValidationError("config: coeffs must be a list");
  for (const auto& c : cs) {
    const json& kj = require(c, "k");
    if (!kj.is_array()) throw ValidationError("config: coefficient index must be a list");
    NctIndex k;
    for (const auto& v : kj) k.push_back(get_int(v, "coefficient index"));
    const double re = c.contains("re") ? get_double(c.at("re"), "re") : 0.0;
    const double im = c.contains("im") ? get_double(c.at("im"), "im") : 0.0;
    if (static_cast<int>(k.size()) != 2 * m) throw ValidationError("config: coefficient index needs 2m entries");
    a.add(k, cplx(re, im));
  }
  a.validate();
  return a;
}

json to_json(const NctElement& a) {
  json th = json::array();
  for (const auto& r : a.theta) th.push_back(json::array({r.p, r.q}));
  json cs = json::array();
  for (const auto& [k, v] : a.coeffs) cs.push_back({{"k", k}, {"re", v.real()}, {"im", v.imag()}});
  return {{"m", a.m}, {"theta", th}, {"coeffs", cs}};
}

FourierField parse_fourier_field(const json& j, int dim, int N) {
  if (!j.is_object()) return FourierField::constant(dim, parse_matrix(j, N));
  FourierField f(dim, N);
  const json& modes = require(j, "modes");
  if (!modes.is_array()) throw ValidationError("config: modes must be a list");
  for (const auto& e : modes) {
    const json& kj = require(e, "k");
    if (!kj.is_array() || static_cast<int>(kj.size()) != dim)
      throw ValidationError("config: mode index needs dim entries");
    ModeIndex k;
    for (const auto& v : kj) k.push_back(get_int(v, "mode index"));
    const Mat c = parse_matrix(require(e, "c"), N);
    auto it = f.modes.find(k);
    if (it == f.modes.end()) f.modes.emplace(k, c);
    else it->second += c;
  }
  f.validate();
  return f;
}

// ----------------------------------------------------------------------------

namespace {

FourierField field_from_grid(const json& samples, const std::vector<int>& n, int N, int radius) {
  size_t total = 1;
  for (int v : n) total *= static_cast<size_t>(v);
  if (!samples.is_array() || samples.size() != total)
    throw ValidationError("config: explicit grid fields need one matrix per grid point");
  std::vector<Mat> s;
  s.reserve(total);
  for (const auto& m : samples) s.push_back(parse_matrix(m, N));
  return FourierField::from_samples(n, s, radius);
}

void parse_explicit_grid(const json& doc, FourierConfig& c, int d, int N) {
  const json& grid = require(doc, "grid");
  const json& nj = require(grid, "n");
  if (!nj.is_array() || static_cast<int>(nj.size()) != d) throw ValidationError("config: grid.n needs dim entries");
  std::vector<int> n;
  for (const auto& v : nj) n.push_back(get_int(v, "grid size"));
  for (int v : n)
    if (v < 1) throw ValidationError("config: grid sizes must be positive");
  if (grid.contains("length")) {
    const json& lj = grid.at("length");
    if (!lj.is_array() || static_cast<int>(lj.size()) != d) throw ValidationError("config: grid.length needs dim entries");
    for (const auto& v : lj)
      if (std::abs(get_double(v, "grid length") - 2.0 * std::numbers::pi) > 1e-12)
        throw ValidationError("config: explicit grids cover the period 2 pi on every axis");
  }
  int radius = doc.contains("radius") ? get_int(doc.at("radius"), "radius") : -1;
  if (radius < 0) {
    int nmin = 0;
    for (int v : n)
      if (v > 1) nmin = nmin == 0 ? v : std::min(nmin, v);
    radius = nmin > 0 ? (nmin - 1) / 2 : 0;
  }
  const json& s = require(doc, "samples");
  c.op.u = field_from_grid(require(s, "u"), n, N, radius);
  c.op.v.clear();
  if (s.contains("v")) {
    if (!s.at("v").is_array() || static_cast<int>(s.at("v").size()) != d)
      throw ValidationError("config: samples.v needs dim fields");
    for (const auto& vj : s.at("v")) c.op.v.push_back(field_from_grid(vj, n, N, radius));
  } else {
    c.op.v.assign(d, FourierField(d, N));
  }
  c.op.w = s.contains("w") ? field_from_grid(s.at("w"), n, N, radius) : FourierField(d, N);
  if (s.contains("weight")) c.weights.emplace_back(field_from_grid(s.at("weight"), n, N, radius));
}

void parse_fourier_fields(const json& doc, FourierConfig& c, int d, int N) {
  const std::string op = value_or<std::string>(doc, "operator", "uvw");
  auto field_list = [&](const char* key) {
    std::vector<FourierField> out;
    if (!doc.contains(key)) return std::vector<FourierField>(d, FourierField(d, N));
    const json& j = doc.at(key);
    if (!j.is_array() || static_cast<int>(j.size()) != d)
      throw ValidationError(std::string("config: \"") + key + "\" needs dim fields");
    for (const auto& e : j) out.push_back(parse_fourier_field(e, d, N));
    return out;
  };
  auto field_or_zero = [&](const char* key) {
    return doc.contains(key) ? parse_fourier_field(doc.at(key), d, N) : FourierField(d, N);
  };
  if (op == "uvw") {
    c.op.u = parse_fourier_field(require(doc, "u"), d, N);
    c.op.v = field_list("v");
    c.op.w = field_or_zero("w");
  } else if (op == "upq") {
    c.op = operator_from_upq(c.op.g_inv, parse_fourier_field(require(doc, "u"), d, N), field_list("p"),
                             field_or_zero("q"));
  } else if (op == "conformal") {
    c.op = conformal_like_operator(c.op.g_inv, parse_fourier_field(require(doc, "k"), d, N));
  } else {
    throw ValidationError("config: operator must be uvw, upq or conformal");
  }
  if (doc.contains("weight")) c.weights.emplace_back(parse_fourier_field(doc.at("weight"), d, N));
  if (doc.contains("weights"))
    for (const auto& e : doc.at("weights")) {
      if (e.is_null()) c.weights.emplace_back(std::nullopt);
      else c.weights.emplace_back(parse_fourier_field(e, d, N));
    }
}

}  // namespace

FourierConfig parse_fourier_config(const json& doc, const Overrides& ov) {
  const ConfigKind kind = config_kind(doc);
  if (kind != ConfigKind::fourier_fields && kind != ConfigKind::explicit_grid)
    throw ValidationError("config: expected kind fourier-fields or explicit-grid");
  FourierConfig c;
  const int d = get_int(require(doc, "dim"), "dim");
  const int N = value_or(doc, "N", 1);
  if (d < 1 || N < 1) throw ValidationError("config: dim and N must be positive");
  c.op.g_inv = doc.contains("g_inv") ? parse_real_matrix(doc.at("g_inv")) : RMat::Identity(d, d);
  if (c.op.g_inv.rows() != d) throw ValidationError("config: g_inv must be dim x dim");
  MetricJet::constant(c.op.g_inv).validate();
  if (kind == ConfigKind::explicit_grid) parse_explicit_grid(doc, c, d, N);
  else parse_fourier_fields(doc, c, d, N);
  if (c.weights.empty()) c.weights.emplace_back(std::nullopt);
  c.op.validate();
  c.form = parse_form(value_or<std::string>(doc, "form", "automatic"));
  apply_oracle_settings(doc, c.verify, ov);
  c.density_points = c.verify.density_points;
  c.verify.form = c.form;
  c.local = local_from(ov);
  c.spectral = spectral_from(ov);
  return c;
}

ChartConfig parse_chart_config(const json& doc, const Overrides& ov) {
  if (config_kind(doc) != ConfigKind::chart_analytic) throw ValidationError("config: expected kind chart-analytic");
  ChartConfig c;
  const int d = get_int(require(doc, "dim"), "dim");
  const int N = value_or(doc, "N", 1);
  if (d < 1 || N < 1) throw ValidationError("config: dim and N must be positive");
  c.N = N;
  const json& mj = require(doc, "metric");
  const RMat g = parse_real_matrix(require(mj, "g_inv"));
  if (g.rows() != d) throw ValidationError("config: metric.g_inv must be dim x dim");
  std::vector<RMat> dg(d, RMat::Zero(d, d)), ddg(static_cast<size_t>(d) * d, RMat::Zero(d, d));
  if (mj.contains("dg")) {
    if (!mj.at("dg").is_array() || static_cast<int>(mj.at("dg").size()) != d)
      throw ValidationError("config: metric.dg needs dim matrices");
    for (int r = 0; r < d; ++r) dg[r] = parse_real_matrix(mj.at("dg")[r]);
  }
  if (mj.contains("ddg")) {
    const json& dd = mj.at("ddg");
    if (!dd.is_array() || static_cast<int>(dd.size()) != d) throw ValidationError("config: metric.ddg needs dim rows");
    for (int r = 0; r < d; ++r) {
      if (!dd[r].is_array() || static_cast<int>(dd[r].size()) != d)
        throw ValidationError("config: metric.ddg needs dim x dim matrices");
      for (int s = 0; s < d; ++s) ddg[static_cast<size_t>(r) * d + s] = parse_real_matrix(dd[r][s]);
    }
  }
  for (const auto& m : dg)
    if (m.rows() != d) throw ValidationError("config: metric derivatives must be dim x dim");
  for (const auto& m : ddg)
    if (m.rows() != d) throw ValidationError("config: metric derivatives must be dim x dim");
  c.metric = MetricJet::from_arrays(g, dg, ddg);
  c.metric.validate();

  c.fields = value_or<std::string>(doc, "fields", "uvw");
  c.A = doc.contains("A") ? parse_jet_list(doc.at("A"), N, d, 1, "A") : zero_jets(N, d, 1);
  if (c.fields == "uvw") {
    c.uvw.u = parse_jet(require(doc, "u"), N, d, 2);
    c.uvw.v = doc.contains("v") ? parse_jet_list(doc.at("v"), N, d, 1, "v") : zero_jets(N, d, 1);
    c.uvw.w = doc.contains("w") ? parse_jet(doc.at("w"), N, d, 0) : MatJet(Mat::Zero(N, N), d, 0);
  } else if (c.fields == "upq") {
    c.upq.u = parse_jet(require(doc, "u"), N, d, 2);
    c.upq.p = doc.contains("p") ? parse_jet_list(doc.at("p"), N, d, 1, "p") : zero_jets(N, d, 1);
    c.upq.q = doc.contains("q") ? parse_jet(doc.at("q"), N, d, 0) : MatJet(Mat::Zero(N, N), d, 0);
    c.upq.A = c.A;
  } else if (c.fields == "conformal") {
    c.k = parse_jet(require(doc, "k"), N, d, 2);
  } else {
    throw ValidationError("config: fields must be uvw, upq or conformal");
  }
  c.local = local_from(ov);
  c.spectral = spectral_from(ov);
  return c;
}

Nct2Config parse_nct2_config(const json& doc, const Overrides& ov) {
  if (config_kind(doc) != ConfigKind::nct2) throw ValidationError("config: expected kind nct2");
  Nct2Config c;
  apply_curvature_settings(doc, c.curvature, ov);
  c.tau = doc.contains("tau") ? parse_complex(doc.at("tau")) : cplx(0.0, 1.0);
  if (!(c.tau.imag() > 0)) throw ValidationError("config: tau must lie in the upper half plane");
  c.k = parse_conformal_factor(doc, c.curvature);
  if (c.k.m != 1) throw ValidationError("config: nct2 needs m = 1");
  c.weights = parse_nct_weights(doc);
  for (const auto& w : c.weights)
    if (w && !w->same_algebra(c.k)) throw ValidationError("config: weight lives in a different algebra");
  apply_oracle_settings(doc, c.verify, ov);
  c.verify.nct = c.curvature;
  return c;
}

Nct4Config parse_nct4_config(const json& doc, const Overrides& ov) {
  if (config_kind(doc) != ConfigKind::nct4) throw ValidationError("config: expected kind nct4");
  Nct4Config c;
  apply_curvature_settings(doc, c.curvature, ov);
  c.g_inv = doc.contains("g_inv") ? parse_real_matrix(doc.at("g_inv")) : RMat::Identity(4, 4);
  if (c.g_inv.rows() != 4) throw ValidationError("config: nct4 needs a 4 x 4 g_inv");
  MetricJet::constant(c.g_inv).validate();
  c.k = parse_conformal_factor(doc, c.curvature);
  if (c.k.m != 2) throw ValidationError("config: nct4 needs m = 2");
  return c;
}

}  // namespace heatcoeff::cli
