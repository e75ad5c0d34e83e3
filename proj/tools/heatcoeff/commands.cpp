#include "commands.hpp"

#include "heatcoeff/errors.hpp"
#include "heatcoeff/modular.hpp"
#include "heatcoeff/universal_functions.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace heatcoeff::cli {

std::string csv_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json report_json(const HeatFitReport& r) {
  return {{"d", r.d},
          {"t", r.t},
          {"trace", r.trace},
          {"model", r.model},
          {"residual", r.residual},
          {"coefficients", r.coefficients},
          {"a0", r.a0()},
          {"a2", r.a2()},
          {"residual_norm", r.residual_norm},
          {"condition", r.condition},
          {"closed_form_a2", optional_json(r.closed_form_a2)},
          {"delta", optional_json(r.delta)},
          {"absolute_delta", optional_json(r.absolute_delta)}};
}

std::string reports_csv(const std::vector<HeatFitReport>& reports) {
  std::ostringstream os;
  const bool many = reports.size() > 1;
  os << (many ? "weight," : "") << "t,trace,model,residual\n";
  for (size_t w = 0; w < reports.size(); ++w) {
    const HeatFitReport& r = reports[w];
    for (size_t i = 0; i < r.t.size(); ++i) {
      if (many) os << w << ',';
      os << csv_number(r.t[i]) << ',' << csv_number(r.trace[i]) << ',' << csv_number(r.model[i]) << ','
         << csv_number(r.residual[i]) << '\n';
    }
  }
  return os.str();
}

std::string element_csv(const NctElement& a) {
  std::ostringstream os;
  for (int i = 0; i < a.dim(); ++i) os << 'k' << i << ',';
  os << "re,im\n";
  for (const auto& [k, v] : a.coeffs) {
    for (int x : k) os << x << ',';
    os << csv_number(v.real()) << ',' << csv_number(v.imag()) << '\n';
  }
  return os.str();
}

json grid_json(const Grid& g) { return {{"n", g.n}, {"length", g.length}}; }

CommandOutput r2_fourier(const json& cfg, const Overrides& ov) {
  const FourierConfig c = parse_fourier_config(cfg, ov);
  const HeatDensityResult res = fourier_heat_density(c.op, c.density_points, c.form, c.local, c.spectral);
  json a2 = json::array();
  for (const auto& w : c.weights) {
    const std::vector<Mat> a = w ? sample_on(*w, res.grid) : std::vector<Mat>{};
    a2.push_back(to_json(a2_integrate(a, res)));
  }
  json R2 = json::array();
  for (const Mat& m : res.R2) R2.push_back(to_json(m));
  CommandOutput out;
  out.doc = {{"command", "r2"},
             {"kind", cfg.at("kind")},
             {"form_used", to_string(res.form_used)},
             {"N", res.N},
             {"grid", grid_json(res.grid)},
             {"confluent_points", res.confluent_points},
             {"a2", a2},
             {"sqrt_g", res.sqrt_g},
             {"R2", R2}};
  std::ostringstream os;
  const int d = res.grid.dim();
  for (int j = 0; j < d; ++j) os << 'x' << j << ',';
  os << "trace_re,trace_im\n";
  for (size_t i = 0; i < res.R2.size(); ++i) {
    for (double x : res.grid.point(i)) os << csv_number(x) << ',';
    const cplx tr = res.R2[i].trace();
    os << csv_number(tr.real()) << ',' << csv_number(tr.imag()) << '\n';
  }
  out.csv = os.str();
  return out;
}

CommandOutput r2_chart(const json& cfg, const Overrides& ov) {
  const ChartConfig c = parse_chart_config(cfg, ov);
  const int d = c.metric.dim;
  const MetricData md = metric_data(c.metric);
  std::vector<std::pair<std::string, Mat>> forms;
  const auto branch = corollary_branch_for(d);
  auto add_covariant = [&](const PointFieldsUPQ& f) {
    forms.emplace_back("covariant", r2_local_upq(c.metric, f, g_generic(d, c.spectral), c.local));
    if (branch) forms.emplace_back("corollary", r2_corollary(*branch, c.metric, f, c.local, c.spectral));
  };
  if (c.fields == "uvw") {
    forms.emplace_back("coordinate", r2_local_uvw(c.metric, c.uvw, f_generic(d, c.spectral), c.local));
    add_covariant(uvw_to_upq(md, c.metric, c.uvw, c.A));
  } else if (c.fields == "upq") {
    forms.emplace_back("coordinate", r2_local_uvw(c.metric, upq_to_uvw(md, c.metric, c.upq), f_generic(d, c.spectral),
                                                  c.local));
    add_covariant(c.upq);
  } else {
    forms.emplace_back("conformal_like", r2_conformal_like(c.metric, c.k, c.A, g_generic(d, c.spectral), c.local));
    add_covariant(conformal_like_fields(c.metric, c.k, c.A));
  }
  json fj = json::object();
  double spread = 0.0;
  for (const auto& [name, m] : forms) {
    fj[name] = to_json(m);
    spread = std::max(spread, rel_diff(m, forms.front().second));
  }
  CommandOutput out;
  out.doc = {{"command", "r2"},
             {"kind", "chart-analytic"},
             {"dim", d},
             {"N", c.N},
             {"fields", c.fields},
             {"scalar_curvature", scalar_curvature(c.metric)},
             {"R2", forms.front().second.size() ? to_json(forms.front().second) : json::array()},
             {"forms", fj},
             {"max_relative_spread", spread}};
  std::ostringstream os;
  os << "form,row,col,re,im\n";
  for (const auto& [name, m] : forms)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index col = 0; col < m.cols(); ++col)
        os << name << ',' << r << ',' << col << ',' << csv_number(m(r, col).real()) << ','
           << csv_number(m(r, col).imag()) << '\n';
  out.csv = os.str();
  return out;
}

}  // namespace

// ----------------------------------------------------------------------------

CommandOutput cmd_ifun(double alpha, int k, const std::vector<double>& rs, const Overrides& ov) {
  if (static_cast<int>(rs.size()) != k + 1)
    throw ValidationError("ifun: --rs must hold k + 1 values");
  GapPolicy policy;
  if (ov.gap_tol) {
    if (!(*ov.gap_tol > 0)) throw ValidationError("--gap-tol must be positive");
    policy.tau = *ov.gap_tol;
  }
  const SimplexArgs args(alpha, rs);
  args.validate();
  const double v = i_eval(args, policy);
  CommandOutput out;
  out.doc = {{"command", "ifun"}, {"alpha", alpha}, {"k", k}, {"rs", rs}, {"value", v}};
  out.csv = "alpha,k,value\n" + csv_number(alpha) + ',' + std::to_string(k) + ',' + csv_number(v) + '\n';
  return out;
}

CommandOutput cmd_r2(const json& cfg, const Overrides& ov) {
  switch (config_kind(cfg)) {
    case ConfigKind::explicit_grid:
    case ConfigKind::fourier_fields: return r2_fourier(cfg, ov);
    case ConfigKind::chart_analytic: return r2_chart(cfg, ov);
    case ConfigKind::nct2: return cmd_nct2(cfg, ov);
    case ConfigKind::nct4: return cmd_nct4(cfg, ov);
  }
  throw ValidationError("r2: unsupported kind");
}

CommandOutput cmd_a2_verify(const json& cfg, const Overrides& ov) {
  std::vector<HeatFitReport> reports;
  const ConfigKind kind = config_kind(cfg);
  if (kind == ConfigKind::explicit_grid || kind == ConfigKind::fourier_fields) {
    const FourierConfig c = parse_fourier_config(cfg, ov);
    reports = verify_fourier(c.op, c.weights, c.verify);
  } else if (kind == ConfigKind::nct2) {
    const Nct2Config c = parse_nct2_config(cfg, ov);
    reports = verify_nct2(c.k, c.tau, c.weights, c.verify);
  } else {
    throw ValidationError("a2-verify: kind must be explicit-grid, fourier-fields or nct2");
  }
  json rj = json::array();
  for (const auto& r : reports) rj.push_back(report_json(r));
  CommandOutput out;
  out.doc = {{"command", "a2-verify"}, {"kind", cfg.at("kind")}, {"reports", rj}};
  out.csv = reports_csv(reports);
  return out;
}

CommandOutput cmd_nct2(const json& cfg, const Overrides& ov) {
  const Nct2Config c = parse_nct2_config(cfg, ov);
  const Nct2Curvature cur = nct2_curvature(c.k, c.tau, c.curvature);
  const std::vector<RMat> g{tau_metric(c.tau)};
  json phis = json::array();
  for (const auto& w : c.weights) {
    const NctElement aR = w ? multiply(*w, cur.R2) : cur.R2;
    const cplx via_trace = (kTwoPi * kTwoPi / c.tau.imag()) * nct_trace(aR);
    const cplx via_grid = phi_correspondence(aR, g);
    phis.push_back({{"trace_form", to_json(via_trace)},
                    {"grid_form", to_json(via_grid)},
                    {"residual", std::abs(via_trace - via_grid)}});
  }
  CommandOutput out;
  out.doc = {{"command", "nct2"},
             {"tau", to_json(c.tau)},
             {"k", to_json(c.k)},
             {"R2", to_json(cur.R2)},
             {"trace_R2", to_json(nct_trace(cur.R2))},
             {"closed_form_residual", cur.closed_form_residual},
             {"grid", cur.grid.n},
             {"phi", phis}};
  out.csv = element_csv(cur.R2);
  return out;
}

CommandOutput cmd_nct4(const json& cfg, const Overrides& ov) {
  const Nct4Config c = parse_nct4_config(cfg, ov);
  const Nct4Curvature cur = nct4_curvature(c.k, c.g_inv, c.curvature);
  CommandOutput out;
  out.doc = {{"command", "nct4"},
             {"g_inv", to_json(c.g_inv)},
             {"k", to_json(c.k)},
             {"R2", to_json(cur.R2)},
             {"trace_R2", to_json(nct_trace(cur.R2))},
             {"corollary_residual", cur.corollary_residual},
             {"grid", cur.grid.n}};
  out.csv = element_csv(cur.R2);
  return out;
}

CommandOutput cmd_modular(double r0, double y1, std::optional<double> y2) {
  if (!(r0 > 0) || !(y1 > 0) || (y2 && !(*y2 > 0))) throw DomainError("modular: arguments must be positive");
  // neither function depends on r0; the spread measures how far that holds numerically
  double spread_dlnk = 0.0, spread_metric = 0.0, spread_antisym = 0.0;
  const double ref_dlnk = g_delta_ln_k(1.0, y1);
  const ModularPair ref_pair = y2 ? g_dlnk_dlnk(1.0, y1, *y2) : ModularPair{};
  for (int i = 0; i <= 20; ++i) {
    const double r = 0.1 * std::pow(100.0, i / 20.0);
    spread_dlnk = std::max(spread_dlnk, std::abs(g_delta_ln_k(r, y1) - ref_dlnk));
    if (y2) {
      const ModularPair p = g_dlnk_dlnk(r, y1, *y2);
      spread_metric = std::max(spread_metric, std::abs(p.metric - ref_pair.metric));
      spread_antisym = std::max(spread_antisym, std::abs(p.antisym - ref_pair.antisym));
    }
  }
  CommandOutput out;
  out.doc = {{"command", "modular"},
             {"r0", r0},
             {"y1", y1},
             {"g1", modular_g1(y1)},
             {"G_delta_ln_k", g_delta_ln_k(r0, y1)},
             {"r0_spread", {{"G_delta_ln_k", spread_dlnk}}}};
  std::ostringstream os;
  os << "name,value\n";
  os << "g1," << csv_number(modular_g1(y1)) << '\n';
  os << "G_delta_ln_k," << csv_number(g_delta_ln_k(r0, y1)) << '\n';
  if (y2) {
    const ModularPair p = g_dlnk_dlnk(r0, y1, *y2);
    out.doc["y2"] = *y2;
    out.doc["g2"] = modular_g2(y1, *y2);
    out.doc["G_metric"] = p.metric;
    out.doc["G_antisym"] = p.antisym;
    out.doc["r0_spread"]["G_metric"] = spread_metric;
    out.doc["r0_spread"]["G_antisym"] = spread_antisym;
    os << "g2," << csv_number(modular_g2(y1, *y2)) << '\n';
    os << "G_metric," << csv_number(p.metric) << '\n';
    os << "G_antisym," << csv_number(p.antisym) << '\n';
  }
  out.csv = os.str();
  return out;
}

}  // namespace heatcoeff::cli
