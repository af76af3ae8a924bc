#include "sqg/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "sqg/velocity.hpp"

namespace sqg {

double kinetic_energy(const FemOperators& ops, const std::vector<double>& theta) {
  std::vector<double> mt(theta.size());
  ops.mass_st.apply(theta.data(), mt.data());
  double s = 0.0;
  for (size_t i = 0; i < theta.size(); ++i) s += theta[i] * mt[i];
  return 0.5 * s;
}

double helicity_integral(const FemOperators& ops, const std::vector<double>& psi,
                         const std::vector<double>& theta) {
  std::vector<double> mt(theta.size());
  ops.mass_st.apply(theta.data(), mt.data());
  double s = 0.0;
  for (size_t i = 0; i < theta.size(); ++i) s += psi[i] * mt[i];
  return s;
}

double grad_sup_norm(const TorusMesh& mesh, const std::vector<double>& theta) {
  std::vector<double> gx, gy;
  element_gradients(mesh, theta, gx, gy);
  double m = 0.0;
  for (size_t t = 0; t < gx.size(); ++t)
    m = std::max(m, std::hypot(gx[t], gy[t]));
  return m;
}

namespace {

// local corner offsets of the two triangle shapes, in units of h
constexpr double corner_dx[2][3] = {{0.0, 1.0, 1.0}, {0.0, 1.0, 0.0}};
constexpr double corner_dy[2][3] = {{0.0, 0.0, 1.0}, {0.0, 1.0, 1.0}};

}  // namespace

ErrorNorms error_norms(const TorusMesh& mesh, const std::vector<double>& theta,
                       const std::function<double(double, double)>& exact) {
  const double h = mesh.h();
  const double area3 = h * h / 2.0 / 3.0;  // |K| / 3 per midpoint
  ErrorNorms out;
  for (const Triangle& tri : mesh.triangles()) {
    const int kind = tri.upper ? 1 : 0;
    const double ox = tri.cell_i1 * h, oy = tri.cell_i2 * h;
    for (int e = 0; e < 3; ++e) {
      const int a = e, b = (e + 1) % 3;
      const double mx = ox + 0.5 * (corner_dx[kind][a] + corner_dx[kind][b]) * h;
      const double my = oy + 0.5 * (corner_dy[kind][a] + corner_dy[kind][b]) * h;
      const double th = 0.5 * (theta[static_cast<size_t>(tri.v[static_cast<size_t>(a)])] +
                               theta[static_cast<size_t>(tri.v[static_cast<size_t>(b)])]);
      const double d = th - exact(mx, my);
      out.l1 += area3 * std::abs(d);
      out.l2 += area3 * d * d;
      out.linf = std::max(out.linf, std::abs(d));
    }
  }
  const int nv = mesh.n_vertices();
  for (int i = 0; i < nv; ++i) {
    const Vec2 p = mesh.vertex(i);
    out.linf = std::max(out.linf, std::abs(theta[static_cast<size_t>(i)] - exact(p.x, p.y)));
  }
  out.l2 = std::sqrt(out.l2);
  return out;
}

std::vector<double> convergence_rates(const std::vector<double>& errors) {
  std::vector<double> rates;
  for (size_t k = 0; k + 1 < errors.size(); ++k) {
    if (errors[k] > 0.0 && errors[k + 1] > 0.0)
      rates.push_back(std::log2(errors[k] / errors[k + 1]));
    else
      rates.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return rates;
}

SchlierenResult schlieren(const TorusMesh& mesh, const std::vector<double>& theta) {
  SchlierenResult res;
  std::vector<double> g = nodal_gradient_magnitude(mesh, theta);
  double gmin = 1e300, gmax = -1e300;
  for (double v : g) {
    gmin = std::min(gmin, v);
    gmax = std::max(gmax, v);
  }
  res.sigma.resize(g.size());
  if (!(gmax > gmin)) {
    std::fill(res.sigma.begin(), res.sigma.end(), 1.0);
    res.constant_field = true;
    return res;
  }
  const double inv = 1.0 / (gmax - gmin);
  for (size_t i = 0; i < g.size(); ++i)
    res.sigma[i] = std::exp(-10.0 * (g[i] - gmin) * inv);
  return res;
}

SpectrumRecord energy_spectrum(const TorusMesh& mesh, const std::vector<double>& theta) {
  const int n = mesh.n_side();
  if (static_cast<int>(theta.size()) != n * n)
    throw error("energy_spectrum: field does not match the uniform mesh");
  const double h = mesh.h();

  // R(y_m) = (h^2/2) sum_{i1,i2} theta_{i1,i2} theta_{(i1+m) mod N, i2}
  std::vector<double> R(static_cast<size_t>(n), 0.0);
  for (int m = 0; m < n; ++m) {
    double acc = 0.0;
    for (int i2 = 0; i2 < n; ++i2) {
      const double* row = theta.data() + static_cast<size_t>(i2) * n;
      for (int i1 = 0; i1 < n; ++i1) {
        const int j1 = i1 + m < n ? i1 + m : i1 + m - n;
        acc += row[i1] * row[j1];
      }
    }
    R[static_cast<size_t>(m)] = 0.5 * h * h * acc;
  }

  // direct length-N DFT, R~_m = sum_n R(y_n) e^{-2 pi i n m / N}
  SpectrumRecord rec;
  rec.n = n;
  rec.modulus.resize(static_cast<size_t>(n / 2) + 1);
  const double two_pi_over_n = 2.0 * 3.14159265358979323846 / n;
  double total = 0.0;
  for (int m = 0; m < n; ++m) {
    double re = 0.0, im = 0.0;
    for (int k = 0; k < n; ++k) {
      const double ang = two_pi_over_n * static_cast<double>(k) * static_cast<double>(m);
      re += R[static_cast<size_t>(k)] * std::cos(ang);
      im -= R[static_cast<size_t>(k)] * std::sin(ang);
    }
    const double mod = std::hypot(re, im);
    total += mod;
    if (m <= n / 2) rec.modulus[static_cast<size_t>(m)] = mod;
  }
  rec.kinetic_reconstruction = total / n;
  return rec;
}

double slope_fit(const SpectrumRecord& spec, int m_lo, int m_hi) {
  if (m_lo < 1 || m_hi <= m_lo || m_hi >= static_cast<int>(spec.modulus.size()))
    throw error("slope_fit: band outside the spectrum");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int cnt = 0;
  for (int m = m_lo; m <= m_hi; ++m) {
    const double v = spec.modulus[static_cast<size_t>(m)];
    if (!(v > 0.0)) throw error("slope_fit: vanishing modulus in band");
    const double x = std::log(static_cast<double>(m));
    const double y = std::log(v);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++cnt;
  }
  const double denom = cnt * sxx - sx * sx;
  return (cnt * sxy - sx * sy) / denom;
}

std::vector<double> interpolate_in_time(const std::vector<double>& a, double ta,
                                        const std::vector<double>& b, double tb,
                                        double t) {
  if (!(tb > ta)) throw error("interpolate_in_time: degenerate interval");
  const double w = (t - ta) / (tb - ta);
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + (b[i] - a[i]) * w;
  return out;
}

}  // namespace sqg
