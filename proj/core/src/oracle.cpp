#include "heatcoeff/oracle.hpp"

#include "heatcoeff/dense_eigen.hpp"
#include "heatcoeff/errors.hpp"
#include "heatcoeff/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

namespace heatcoeff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double min_eigenvalue(const RMat& g) {
  if (g.rows() == 0) return std::numeric_limits<double>::infinity();
  return Eigen::SelfAdjointEigenSolver<RMat>(g, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double min_eigenvalue(const Mat& u) {
  return Eigen::SelfAdjointEigenSolver<Mat>(hermitian_part(u), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

RMat submatrix(const RMat& g, const std::vector<int>& rows, const std::vector<int>& cols) {
  RMat s(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) s(i, j) = g(rows[i], cols[j]);
  return s;
}

//! Coefficients of a field on the difference box [-2M, 2M]^{d_a}, nullptr where absent.
class DiffTable {
 public:
  DiffTable(const FourierField& f, const std::vector<int>& axes, int M) : axes_(axes), M_(M), side_(4 * M + 1) {
    size_t total = 1;
    for (size_t i = 0; i < axes.size(); ++i) total *= static_cast<size_t>(side_);
    table_.assign(total, nullptr);
    for (const auto& [k, c] : f.modes) {
      size_t idx = 0;
      bool inside = true;
      for (int a : axes) {
        if (std::abs(k[a]) > 2 * M) inside = false;
        idx = idx * side_ + static_cast<size_t>(k[a] + 2 * M);
      }
      if (inside && max_abs(c) > 0.0) table_[idx] = &c;
    }
  }
  const Mat* at(const ModeIndex& m, const ModeIndex& n) const {
    size_t idx = 0;
    for (int a : axes_) idx = idx * side_ + static_cast<size_t>(m[a] - n[a] + 2 * M_);
    return table_[idx];
  }
  bool empty() const {
    return std::all_of(table_.begin(), table_.end(), [](const Mat* p) { return p == nullptr; });
  }

 private:
  std::vector<int> axes_;
  int M_;
  int side_;
  std::vector<const Mat*> table_;
};

void decompose(OperatorBlock& b, const OracleOptions& opt) {
  const double norm = b.matrix.norm();
  b.hermitian_defect = norm > 0 ? (b.matrix - b.matrix.adjoint()).norm() / norm : 0.0;
  b.hermitian = b.hermitian_defect <= opt.hermitian_tol;
  if (b.hermitian) {
    HermitianEigen e = hermitian_eigen(b.matrix);
    b.eigenvalues = e.values.cast<cplx>();
    b.vectors = std::move(e.vectors);
  } else {
    GeneralEigen e = general_eigen(b.matrix);
    b.eigenvalues = std::move(e.values);
    b.vectors = std::move(e.vectors);
    b.inverse = std::move(e.inverse);
  }
  if (!opt.keep_matrices) b.matrix = Mat();
}

std::vector<ModeIndex> box_modes(int d, const std::vector<int>& axes, int M) {
  std::vector<ModeIndex> out;
  ModeIndex m(d, 0);
  for (int a : axes) m[a] = -M;
  while (true) {
    out.push_back(m);
    int j = static_cast<int>(axes.size()) - 1;
    while (j >= 0 && m[axes[j]] == M) {
      m[axes[j]] = -M;
      --j;
    }
    if (j < 0) break;
    ++m[axes[j]];
  }
  return out;
}

}  // namespace

double AssembledOperator::hermitian_defect() const {
  double d = 0.0;
  for (const auto& b : blocks) d = std::max(d, b.hermitian_defect);
  return d;
}

double AssembledOperator::min_real_eigenvalue() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks)
    for (const cplx& l : b.eigenvalues) m = std::min(m, l.real());
  return m;
}

double oracle_t_min(const AssembledOperator& op, const FitOptions& fit) {
  if (fit.t_min > 0) return fit.t_min;
  if (std::isfinite(op.lambda_cut) && op.lambda_cut > 0) return 20.0 / op.lambda_cut;
  return 0.01 * fit.t_max;
}

AssembledOperator assemble(const FourierOperator& op, const OracleOptions& opt, std::optional<double> t_min_in) {
  op.validate();
  if (opt.cutoff < 1) throw ValidationError("assemble: cutoff must be positive");
  const int d = op.dim();
  const int N = op.N();
  const int M = opt.cutoff;

  AssembledOperator out;
  out.d = d;
  out.N = N;
  out.cutoff = M;
  out.active = op.active_axes();
  std::vector<int> act, perp;
  for (int j = 0; j < d; ++j) (out.active[j] ? act : perp).push_back(j);

  for (const auto* f : {&op.u, &op.w})
    if (f->radius() > 2 * M) throw ValidationError("assemble: field modes exceed twice the cutoff");
  for (const auto& f : op.v)
    if (f.radius() > 2 * M) throw ValidationError("assemble: field modes exceed twice the cutoff");

  out.basis = box_modes(d, act, M);
  out.basis_dim = out.basis.size() * static_cast<size_t>(N);
  if (out.basis_dim > opt.max_block_dim)
    throw SizeError("assemble: block dimension " + std::to_string(out.basis_dim) + " exceeds the cap " +
                    std::to_string(opt.max_block_dim) + "; lower the cutoff or raise the cap");

  // positivity floor of u over a fine grid of the active axes
  std::vector<int> n(d, 1);
  for (int a : act) n[a] = std::max(16, 4 * op.u.radius() + 4);
  double u_min = std::numeric_limits<double>::infinity();
  for (const auto& x : torus_points(n)) u_min = std::min(u_min, min_eigenvalue(op.u.value(x)));
  if (!(u_min > 0)) throw DomainError("assemble: u is not positive definite");
  out.lambda_cut =
      act.empty() ? std::numeric_limits<double>::infinity() : u_min * min_eigenvalue(submatrix(op.g_inv, act, act)) * M * M;
  out.lambda_transverse = u_min * min_eigenvalue(submatrix(op.g_inv, perp, perp));

  FitOptions probe;
  const double t_min = t_min_in ? *t_min_in : oracle_t_min(out, probe);

  // transverse modes inside the ellipsoid t_min u_min (n^T G n) <= 40, merged by block data
  const RMat Gpp = submatrix(op.g_inv, perp, perp), Gap = submatrix(op.g_inv, act, perp);
  bool v_perp = false;
  for (int p : perp)
    for (const auto& [k, c] : op.v[p].modes)
      if (max_abs(c) > 0) v_perp = true;
  const double bound = perp.empty() ? 0.0 : 40.0 / (t_min * u_min);
  out.transverse_radius = opt.transverse_radius > 0
                              ? opt.transverse_radius
                              : (perp.empty() ? 0 : static_cast<int>(std::ceil(std::sqrt(bound / min_eigenvalue(Gpp)))));
  std::map<std::vector<long long>, std::pair<ModeIndex, double>> groups;
  {
    const int T = out.transverse_radius;
    for (const auto& np : box_modes(d, perp, T)) {
      Eigen::VectorXd v(perp.size());
      for (size_t i = 0; i < perp.size(); ++i) v(i) = np[perp[i]];
      const double s = v.dot(Gpp * v);
      if (opt.transverse_radius <= 0 && !perp.empty() && s > bound) continue;
      std::vector<long long> key{std::llround(s * 1e9)};
      const Eigen::VectorXd cross = Gap * v;
      for (int i = 0; i < cross.size(); ++i) key.push_back(std::llround(cross(i) * 1e9));
      if (v_perp)
        for (int p : perp) key.push_back(np[p]);
      auto it = groups.find(key);
      if (it == groups.end())
        groups.emplace(key, std::make_pair(np, 1.0));
      else
        it->second.second += 1.0;
      out.transverse_modes += 1;
    }
  }

  const DiffTable tu(op.u, act, M), tw(op.w, act, M);
  std::vector<DiffTable> tv;
  std::vector<bool> has_v(d);
  for (int mu = 0; mu < d; ++mu) {
    tv.emplace_back(op.v[mu], act, M);
    has_v[mu] = !tv.back().empty();
  }

  std::vector<std::pair<ModeIndex, double>> reps;
  for (const auto& [k, rep] : groups) reps.push_back(rep);
  out.blocks.resize(reps.size());
  const size_t B = out.basis.size();
  parallel_for(reps.size(), [&](size_t bi) {
    const ModeIndex& np = reps[bi].first;
    OperatorBlock& blk = out.blocks[bi];
    blk.multiplicity = reps[bi].second;
    blk.matrix = Mat::Zero(out.basis_dim, out.basis_dim);
    for (size_t j = 0; j < B; ++j) {
      ModeIndex K = out.basis[j];
      for (int p : perp) K[p] = np[p];
      Eigen::VectorXd kv(d);
      for (int a = 0; a < d; ++a) kv(a) = K[a];
      const double quad = kv.dot(op.g_inv * kv);
      for (size_t i = 0; i < B; ++i) {
        const ModeIndex& m = out.basis[i];
        Mat e = Mat::Zero(N, N);
        bool any = false;
        if (const Mat* c = tu.at(m, out.basis[j])) e += quad * *c, any = true;
        for (int mu = 0; mu < d; ++mu)
          if (has_v[mu] && K[mu] != 0)
            if (const Mat* c = tv[mu].at(m, out.basis[j])) e -= cplx(0.0, K[mu]) * *c, any = true;
        if (const Mat* c = tw.at(m, out.basis[j])) e -= *c, any = true;
        if (any) blk.matrix.block(i * N, j * N, N, N) = e;
      }
    }
    decompose(blk, opt);
  });
  return out;
}

namespace {

cplx gns_phase(const Rational& th, long b, long c) {
  const long q = th.q;
  auto mod = [q](long x) { return ((x % q) + q) % q; };
  const long e = mod(mod(th.p) * mod(b) % q * mod(c));
  return std::polar(1.0, -kTwoPi * static_cast<double>(e) / static_cast<double>(q));
}

//! Sparse matrix of left multiplication from the radius-M box into the radius-E box.
Eigen::SparseMatrix<cplx> left_mult(const NctElement& x, int M, int E) {
  const int sm = 2 * M + 1, se = 2 * E + 1;
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int c = -M; c <= M; ++c)
    for (int dd = -M; dd <= M; ++dd) {
      const int col = (c + M) * sm + (dd + M);
      for (const auto& [k, v] : x.coeffs) {
        const int a = k[0] + c, b = k[1] + dd;
        if (std::abs(a) > E || std::abs(b) > E) continue;
        trip.emplace_back((a + E) * se + (b + E), col, v * gns_phase(x.theta[0], k[1], c));
      }
    }
  Eigen::SparseMatrix<cplx> L(se * se, sm * sm);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

}  // namespace

AssembledOperator assemble_nct2(const NctElement& k, cplx tau, const OracleOptions& opt) {
  if (k.m != 1) throw ValidationError("assemble_nct2: k must live on a two-torus");
  k.validate();
  const int M = opt.cutoff;
  if (M < 1) throw ValidationError("assemble_nct2: cutoff must be positive");
  const RMat g = tau_metric(tau);
  AssembledOperator out;
  out.d = 2;
  out.N = 1;
  out.cutoff = M;
  out.active = {true, true};
  const int sm = 2 * M + 1;
  out.basis_dim = static_cast<size_t>(sm) * sm;
  if (out.basis_dim > opt.max_block_dim)
    throw SizeError("assemble_nct2: block dimension " + std::to_string(out.basis_dim) + " exceeds the cap " +
                    std::to_string(opt.max_block_dim) + "; lower the cutoff or raise the cap");
  out.basis = box_modes(2, {0, 1}, M);

  // positivity floor of k^2 from the realisation
  const SampleGrid grid = sample_grid_for(k, std::max(16, 4 * k.radius() + 4));
  double u_min = std::numeric_limits<double>::infinity();
  for (const Mat& s : sample(k, grid)) {
    if (max_abs(s - s.adjoint()) > 1e-8 * std::max(1.0, max_abs(s)))
      throw DomainError("assemble_nct2: k is not self-adjoint");
    const double lo = min_eigenvalue(s);
    if (!(lo > 0)) throw DomainError("assemble_nct2: k is not positive");
    u_min = std::min(u_min, lo * lo);
  }
  out.lambda_cut = u_min * min_eigenvalue(g) * M * M;

  const int R = k.radius();
  const int E = M + R;
  auto lap = [&](int a, int b) { return std::norm(cplx(a) + tau * cplx(b)); };

  OperatorBlock p1, p2;
  {
    const Eigen::SparseMatrix<cplx> L = left_mult(k, M, E);
    Eigen::VectorXcd diag(L.rows());
    for (int a = -E; a <= E; ++a)
      for (int b = -E; b <= E; ++b) diag((a + E) * (2 * E + 1) + (b + E)) = lap(a, b);
    const Eigen::SparseMatrix<cplx> DL = diag.asDiagonal() * L;
    const Eigen::SparseMatrix<cplx> P = L.adjoint() * DL;
    p1.matrix = Mat(P);
  }
  {
    const NctElement k2 = multiply(k, k);
    const Eigen::SparseMatrix<cplx> L = left_mult(k2, M, M);
    Mat P(L);
    for (int a = -M; a <= M; ++a)
      for (int b = -M; b <= M; ++b) {
        const int i = (a + M) * sm + (b + M);
        const cplx D = cplx(0.0, 1.0) * (cplx(a) + std::conj(tau) * cplx(b));
        P.row(i) *= std::conj(D);
        P.col(i) *= D;
      }
    p2.matrix = std::move(P);
  }
  out.blocks.push_back(std::move(p1));
  out.blocks.push_back(std::move(p2));
  parallel_for(out.blocks.size(), [&](size_t i) { decompose(out.blocks[i], opt); });
  return out;
}

Mat multiplication_matrix(const AssembledOperator& op, const FourierField& a) {
  if (a.dim != op.d || a.N != op.N) throw ValidationError("multiplication_matrix: weight shape differs from P");
  const auto wa = a.active_axes();
  std::vector<int> act;
  for (int j = 0; j < op.d; ++j) {
    if (wa[j] && !op.active[j])
      throw ValidationError("multiplication_matrix: weight depends on an axis the operator ignores");
    if (op.active[j]) act.push_back(j);
  }
  const DiffTable t(a, act, op.cutoff);
  const size_t B = op.basis.size();
  const int N = op.N;
  Mat A = Mat::Zero(op.basis_dim, op.basis_dim);
  for (size_t i = 0; i < B; ++i)
    for (size_t j = 0; j < B; ++j)
      if (const Mat* c = t.at(op.basis[i], op.basis[j])) A.block(i * N, j * N, N, N) = *c;
  return A;
}

Mat left_multiplication_matrix(const AssembledOperator& op, const NctElement& a) {
  if (a.m != 1) throw ValidationError("left_multiplication_matrix: weight must live on a two-torus");
  return Mat(left_mult(a, op.cutoff, op.cutoff));
}

HeatTraceData heat_trace_data(const AssembledOperator& op, const Mat& A) {
  HeatTraceData out;
  std::vector<std::vector<cplx>> w(op.blocks.size());
  parallel_for(op.blocks.size(), [&](size_t bi) {
    const OperatorBlock& b = op.blocks[bi];
    const Eigen::Index n = b.eigenvalues.size();
    w[bi].assign(n, cplx(b.multiplicity));
    if (A.size() == 0) return;
    if (A.rows() != n) throw ValidationError("heat_trace_data: weight matrix does not match the block size");
    const Mat AV = A * b.vectors;
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx dj = b.hermitian ? b.vectors.col(j).dot(AV.col(j))
                                  : b.inverse.row(j).transpose().cwiseProduct(AV.col(j)).sum();
      w[bi][j] = b.multiplicity * dj;
    }
  });
  for (size_t bi = 0; bi < op.blocks.size(); ++bi) {
    const auto& ev = op.blocks[bi].eigenvalues;
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
      out.lambda.push_back(ev(j));
      out.weight.push_back(w[bi][j]);
    }
  }
  return out;
}

cplx heat_trace(const HeatTraceData& data, double t) {
  if (!(t > 0)) throw ValidationError("heat_trace: t must be positive");
  // summed in ascending magnitude
  std::vector<cplx> terms(data.lambda.size());
  for (size_t j = 0; j < terms.size(); ++j) terms[j] = data.weight[j] * std::exp(-t * data.lambda[j]);
  std::sort(terms.begin(), terms.end(), [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
  cplx s = 0.0;
  for (const cplx& x : terms) s += x;
  return s;
}

// ----------------------------------------------------------------------------

void HeatFitReport::set_closed_form(double a2_closed) {
  closed_form_a2 = a2_closed;
  absolute_delta = std::abs(a2() - a2_closed);
  delta = a2_closed != 0.0 ? std::optional<double>(*absolute_delta / std::abs(a2_closed)) : std::nullopt;
}

std::vector<double> t_window(double t_min, double t_max, int points) {
  if (!(t_min > 0) || !(t_max > t_min)) throw ValidationError("t window is empty: raise the cutoff or t_max");
  if (points < 2) throw ValidationError("t window needs at least two points");
  std::vector<double> t(points);
  const double r = std::log(t_max / t_min);
  for (int i = 0; i < points; ++i) t[i] = t_min * std::exp(r * i / (points - 1));
  return t;
}

HeatFitReport fit_asymptotics(const std::vector<double>& t, const std::vector<double>& values, int d, int n_terms,
                              double max_condition) {
  if (t.size() != values.size()) throw ValidationError("fit_asymptotics: sample lengths differ");
  if (n_terms < 2) throw ValidationError("fit_asymptotics: need at least two terms");
  if (t.size() < static_cast<size_t>(n_terms)) throw ValidationError("fit_asymptotics: fewer samples than terms");
  const Eigen::Index n = static_cast<Eigen::Index>(t.size());
  // t^{d/2} t^{(r - d)/2} = t^{r/2}: the weighted model is a polynomial in t
  RMat X(n, n_terms);
  RVec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(t[i] > 0)) throw ValidationError("fit_asymptotics: t must be positive");
    const double w = std::pow(t[i], 0.5 * d);
    y(i) = values[i] * w;
    for (int j = 0; j < n_terms; ++j) X(i, j) = std::pow(t[i], j);
  }
  Eigen::JacobiSVD<RMat> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond <= max_condition)) throw FitError("fit_asymptotics: design matrix is ill-conditioned", cond);
  const RVec c = svd.solve(y);

  HeatFitReport r;
  r.d = d;
  r.t = t;
  r.trace = values;
  r.condition = cond;
  r.coefficients.assign(c.data(), c.data() + c.size());
  const RVec res = y - X * c;
  r.residual_norm = y.norm() > 0 ? res.norm() / y.norm() : res.norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    double m = 0.0;
    for (int j = 0; j < n_terms; ++j) m += c(j) * std::pow(t[i], 0.5 * (2 * j - d));
    r.model.push_back(m);
    r.residual.push_back(values[i] - m);
  }
  return r;
}

// ----------------------------------------------------------------------------

HeatFitReport fit_heat_trace(const AssembledOperator& asm_op, const Mat& A, const FitOptions& fit) {
  const double t_min = oracle_t_min(asm_op, fit);
  const auto ts = t_window(t_min, fit.t_max, fit.points);
  const HeatTraceData data = heat_trace_data(asm_op, A);
  std::vector<double> vals(ts.size());
  parallel_for(ts.size(), [&](size_t i) { vals[i] = heat_trace(data, ts[i]).real(); });
  return fit_asymptotics(ts, vals, asm_op.d, fit.n_terms, fit.max_condition);
}

std::vector<HeatFitReport> verify_fourier(const FourierOperator& op,
                                          const std::vector<std::optional<FourierField>>& weights,
                                          const VerifyOptions& opt) {
  const AssembledOperator asm_op =
      assemble(op, opt.oracle, opt.fit.t_min > 0 ? std::optional<double>(opt.fit.t_min) : std::nullopt);
  const HeatDensityResult dens = fourier_heat_density(op, opt.density_points, opt.form);
  std::vector<HeatFitReport> out;
  for (const auto& weight : weights) {
    const Mat A = weight ? multiplication_matrix(asm_op, *weight) : Mat();
    HeatFitReport r = fit_heat_trace(asm_op, A, opt.fit);
    const std::vector<Mat> a = weight ? sample_on(*weight, dens.grid) : std::vector<Mat>{};
    r.set_closed_form(a2_integrate(a, dens).real());
    out.push_back(std::move(r));
  }
  return out;
}

HeatFitReport verify_fourier(const FourierOperator& op, const std::optional<FourierField>& weight,
                             const VerifyOptions& opt) {
  return verify_fourier(op, std::vector<std::optional<FourierField>>{weight}, opt).front();
}

std::vector<HeatFitReport> verify_nct2(const NctElement& k, cplx tau,
                                       const std::vector<std::optional<NctElement>>& weights,
                                       const VerifyOptions& opt) {
  const AssembledOperator asm_op = assemble_nct2(k, tau, opt.oracle);
  const Nct2Curvature cur = nct2_curvature(k, tau, opt.nct);
  std::vector<HeatFitReport> out;
  for (const auto& weight : weights) {
    const Mat A = weight ? left_multiplication_matrix(asm_op, *weight) : Mat();
    HeatFitReport r = fit_heat_trace(asm_op, A, opt.fit);
    const NctElement aR = weight ? multiply(*weight, cur.R2) : cur.R2;
    r.set_closed_form((kTwoPi * kTwoPi / std::abs(tau.imag())) * nct_trace(aR).real());
    out.push_back(std::move(r));
  }
  return out;
}

HeatFitReport verify_nct2(const NctElement& k, cplx tau, const std::optional<NctElement>& weight,
                          const VerifyOptions& opt) {
  return verify_nct2(k, tau, std::vector<std::optional<NctElement>>{weight}, opt).front();
}

}  // namespace heatcoeff
