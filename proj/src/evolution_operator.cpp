#include "mpp/evolution_operator.hpp"

#include <cmath>
#include <string>

#include "mpp/errors.hpp"
#include "mpp/stable_noise.hpp"

namespace mpp {

std::string_view to_string(BoundaryPolicy policy) {
  return policy == BoundaryPolicy::reinject ? "reinject" : "absorbing";
}

BoundaryPolicy parse_boundary_policy(std::string_view text) {
  if (text == "reinject") return BoundaryPolicy::reinject;
  if (text == "absorbing") return BoundaryPolicy::absorbing;
  throw DomainError("grid.boundary must be 'reinject' or 'absorbing'; got '" + std::string(text) +
                    "'");
}

Eigen::MatrixXd Tridiagonal::dense() const {
  const Eigen::Index n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i > 0) m(i, i - 1) = lower[i];
    if (i + 1 < n) m(i, i + 1) = upper[i];
  }
  return m;
}

Eigen::VectorXd Tridiagonal::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  const Eigen::Index n = size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = diag[i] * v[i];
    if (i > 0) s += lower[i] * v[i - 1];
    if (i + 1 < n) s += upper[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

namespace {

// int_k^{k+1} s^p ds without cancellation for large k.
double power_integral(double p, double k) {
  if (k == 0.0) return 1.0 / (p + 1.0);
  return std::pow(k, p + 1.0) * std::expm1((p + 1.0) * std::log1p(1.0 / k)) / (p + 1.0);
}

}  // namespace

Eigen::VectorXd nonlocal_weights(double alpha, double spacing, Eigen::Index max_offset) {
  require_stable_index(alpha);
  if (!(spacing > 0.0)) throw DomainError("grid spacing must be positive");
  if (max_offset < 1) throw DomainError("nonlocal stencil needs at least one offset");

  // Coefficients of G_k = g(kh) / (kh)^2 in int_0^{Kh} G(y) y^(1-alpha) dy,
  // computed in units of h and rescaled at the end.
  Eigen::VectorXd g_coef = Eigen::VectorXd::Zero(max_offset + 1);
  g_coef[1] += 1.0 / (2.0 - alpha);  // hole [0, 1]
  for (Eigen::Index k = 1; k < max_offset; ++k) {
    const double lo = static_cast<double>(k);
    const double m1 = power_integral(1.0 - alpha, lo);
    const double m2 = power_integral(2.0 - alpha, lo);
    g_coef[k] += (lo + 1.0) * m1 - m2;
    g_coef[k + 1] += m2 - lo * m1;
  }

  const double scale = c_alpha(alpha) * std::pow(spacing, -alpha);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(max_offset + 1);
  for (Eigen::Index k = 1; k <= max_offset; ++k) {
    const double kk = static_cast<double>(k);
    a[k] = scale * g_coef[k] / (kk * kk);
  }
  return a;
}

Eigen::VectorXd nonlocal_apply(double alpha, const Grid1D& grid,
                               const Eigen::Ref<const Eigen::VectorXd>& q) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (q.size() != n) throw DomainError("field does not match the grid");
  const Eigen::VectorXd a = nonlocal_weights(alpha, grid.spacing(), n);
  const double tail = JumpMeasure(alpha).tail_mass(static_cast<double>(n) * grid.spacing());
  const double self = -2.0 * a.tail(n).sum() - tail;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = self * q[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) s += a[std::abs(i - j)] * q[j];
    }
    out[i] = s;
  }
  return out;
}

EvolutionOperator::EvolutionOperator(const Grid1D& grid, const ModelSpec& model,
                                     BoundaryPolicy boundary)
    : grid_(grid), model_(model), boundary_(boundary) {
  model_.validate();
  const auto n = static_cast<Eigen::Index>(grid_.size());
  drift_ = Tridiagonal(n);
  leak_rates_ = Eigen::VectorXd::Zero(n);
  exterior_rates_ = Eigen::VectorXd::Zero(n);
  assemble_drift();

  switch (model_.noise) {
    case NoiseKind::none:
      local_ = drift_;
      matrix_ = local_.dense();
      break;
    case NoiseKind::brownian: {
      Tridiagonal diffusion(n);
      assemble_brownian(diffusion);
      local_ = drift_;
      local_.lower += diffusion.lower;
      local_.diag += diffusion.diag;
      local_.upper += diffusion.upper;
      matrix_ = local_.dense();
      break;
    }
    case NoiseKind::levy:
      matrix_ = drift_.dense();
      assemble_levy();
      break;
  }
}

// Finite volumes around each node (half cells at the two edges), first-order
// upwind fluxes with the velocity sampled at the faces.
void EvolutionOperator::assemble_drift() {
  const Eigen::Index n = drift_.size();
  const auto w = [&](Eigen::Index i) { return grid_.weight(static_cast<std::size_t>(i)); };
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double xf = 0.5 * (grid_.node(static_cast<std::size_t>(i)) +
                             grid_.node(static_cast<std::size_t>(i + 1)));
    const double v = model_.drift(xf);
    if (v > 0.0) {
      drift_.diag[i] -= v / w(i);
      drift_.lower[i + 1] += v / w(i + 1);
    } else {
      drift_.upper[i] -= v / w(i);
      drift_.diag[i + 1] += v / w(i + 1);
    }
  }
  // Outflow through the window edges; inflow from the empty exterior is zero.
  const double v_left = model_.drift(-grid_.half_width());
  if (v_left < 0.0) {
    drift_.diag[0] += v_left / w(0);
    leak_rates_[0] -= v_left;
  }
  const double v_right = model_.drift(grid_.half_width());
  if (v_right > 0.0) {
    drift_.diag[n - 1] -= v_right / w(n - 1);
    leak_rates_[n - 1] += v_right;
  }
}

// Conservative form of (1/2)(x^2 p)_xx: face fluxes (u_{i+1} - u_i)/h with
// u = x^2 p / 2. Zero flux at the edges under reinject, a zero ghost value one
// spacing outside the window under absorbing.
void EvolutionOperator::assemble_brownian(Tridiagonal& diffusion) {
  const Eigen::Index n = diffusion.size();
  const double h = grid_.spacing();
  const auto w = [&](Eigen::Index i) { return grid_.weight(static_cast<std::size_t>(i)); };
  const auto c = [&](Eigen::Index i) {
    const double x = grid_.node(static_cast<std::size_t>(i));
    return 0.5 * x * x;
  };
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    diffusion.upper[i] += c(i + 1) / (h * w(i));
    diffusion.diag[i] -= c(i) / (h * w(i));
    diffusion.diag[i + 1] -= c(i + 1) / (h * w(i + 1));
    diffusion.lower[i + 1] += c(i) / (h * w(i + 1));
  }
  for (Eigen::Index i : {Eigen::Index{0}, n - 1}) {
    const double rate = c(i) / h;
    exterior_rates_[i] += rate;
    if (boundary_ == BoundaryPolicy::absorbing) {
      diffusion.diag[i] -= rate / w(i);
      leak_rates_[i] += rate;
    }
  }
}

// Nonlocal term int [q(x-y) - q(x)] nu_alpha(dy) with q = |x|^alpha p and
// q = 0 outside the window: a symmetric Toeplitz stencil acting on q, i.e.
// column j of the matrix is scaled by |x_j|^alpha. The stencil reaches K = N
// offsets so every jump beyond Kh lands outside the window and the remaining
// tail is exactly -q(x) nu_alpha(|y| > Kh).
void EvolutionOperator::assemble_levy() {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  const double alpha = model_.alpha;
  const double h = grid_.spacing();
  const Eigen::Index reach = n;
  const Eigen::VectorXd a = nonlocal_weights(alpha, h, reach);
  const double tail = JumpMeasure(alpha).tail_mass(static_cast<double>(reach) * h);

  // prefix[k] = a_1 + ... + a_k
  Eigen::VectorXd prefix = Eigen::VectorXd::Zero(reach + 1);
  for (Eigen::Index k = 1; k <= reach; ++k) prefix[k] = prefix[k - 1] + a[k];
  const double total = prefix[reach];
  const double self = -2.0 * total - tail;

  Eigen::VectorXd q_scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    q_scale[j] = std::pow(std::abs(grid_.node(static_cast<std::size_t>(j))), alpha);
  }

  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = q_scale[j];
    if (s == 0.0) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      matrix_(i, j) += s * (i == j ? self : a[std::abs(i - j)]);
    }
  }

  const double w_edge = grid_.weight(0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = q_scale[j];
    if (s == 0.0) continue;
    // Trapezoid-weighted column sum of the stencil.
    const double column = self + prefix[j] + prefix[n - 1 - j];
    const double t_first = (j == 0) ? self : a[j];
    const double t_last = (j == n - 1) ? self : a[n - 1 - j];
    const double loss = -s * (h * column - 0.5 * h * (t_first + t_last));
    exterior_rates_[j] += loss;
    if (boundary_ == BoundaryPolicy::absorbing) {
      leak_rates_[j] += loss;
      continue;
    }
    const double out_right = total - prefix[n - 1 - j] + 0.5 * tail;
    const double out_left = total - prefix[j] + 0.5 * tail;
    const double share_right = out_right / (out_right + out_left);
    matrix_(n - 1, j) += share_right * loss / w_edge;
    matrix_(0, j) += (1.0 - share_right) * loss / w_edge;
  }
}

Eigen::MatrixXd EvolutionOperator::noise_part() const {
  Eigen::MatrixXd m = matrix_;
  m -= drift_.dense();
  return m;
}

Eigen::VectorXd EvolutionOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  if (p.size() != matrix_.cols()) throw DomainError("field does not match the operator grid");
  if (is_local()) return local_.apply(p);
  return matrix_ * p;
}

EvolutionOperator assemble_evolution_operator(const Grid1D& grid, const ModelSpec& model,
                                              BoundaryPolicy boundary) {
  return EvolutionOperator(grid, model, boundary);
}

}  // namespace mpp
