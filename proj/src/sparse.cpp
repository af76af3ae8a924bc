#include "sqg/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace sqg {

std::shared_ptr<const StencilPattern> StencilPattern::build(const TorusMesh& mesh) {
  auto pat = std::make_shared<StencilPattern>();
  const int nv = mesh.n_vertices();
  pat->n = nv;
  pat->n_side = mesh.n_side();
  pat->row_ptr.resize(static_cast<size_t>(nv) + 1);
  pat->col.resize(static_cast<size_t>(nv) * TorusMesh::stencil_size);
  for (int i = 0; i < nv; ++i) {
    pat->row_ptr[static_cast<size_t>(i)] = i * TorusMesh::stencil_size;
    const int* s = mesh.stencil_begin(i);
    std::copy(s, s + TorusMesh::stencil_size,
              pat->col.begin() + static_cast<size_t>(i) * TorusMesh::stencil_size);
  }
  pat->row_ptr[static_cast<size_t>(nv)] = nv * TorusMesh::stencil_size;
  return pat;
}

double& SparseOperator::at(int i, int j) {
  const int k = find(i, j);
  if (k < 0) throw error("SparseOperator::at: (i,j) outside pattern");
  return val_[static_cast<size_t>(k)];
}

double SparseOperator::at(int i, int j) const {
  const int k = find(i, j);
  if (k < 0) throw error("SparseOperator::at: (i,j) outside pattern");
  return val_[static_cast<size_t>(k)];
}

int SparseOperator::find(int i, int j) const {
  const auto& p = *pat_;
  const int lo = p.row_ptr[static_cast<size_t>(i)];
  const int hi = p.row_ptr[static_cast<size_t>(i) + 1];
  const int* first = p.col.data() + lo;
  const int* last = p.col.data() + hi;
  const int* it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return lo + static_cast<int>(it - first);
}

void SparseOperator::apply(const double* x, double* y) const {
  const auto& p = *pat_;
  for (int i = 0; i < p.n; ++i) {
    double acc = 0.0;
    const int lo = p.row_ptr[static_cast<size_t>(i)];
    const int hi = p.row_ptr[static_cast<size_t>(i) + 1];
    for (int k = lo; k < hi; ++k)
      acc += val_[static_cast<size_t>(k)] * x[p.col[static_cast<size_t>(k)]];
    y[i] = acc;
  }
}

std::vector<double> SparseOperator::apply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != rows())
    throw error("SparseOperator::apply: dimension mismatch");
  std::vector<double> y(x.size());
  apply(x.data(), y.data());
  return y;
}

std::vector<double> SparseOperator::row_sums() const {
  const auto& p = *pat_;
  std::vector<double> r(static_cast<size_t>(p.n));
  for (int i = 0; i < p.n; ++i) {
    double acc = 0.0;
    for (int k = p.row_ptr[static_cast<size_t>(i)]; k < p.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      acc += val_[static_cast<size_t>(k)];
    r[static_cast<size_t>(i)] = acc;
  }
  return r;
}

std::vector<double> SparseOperator::diagonal() const {
  const auto& p = *pat_;
  std::vector<double> d(static_cast<size_t>(p.n));
  for (int i = 0; i < p.n; ++i) d[static_cast<size_t>(i)] = at(i, i);
  return d;
}

std::vector<signed char> classify_entries(const StencilPattern& pat) {
  std::vector<signed char> cls(pat.col.size(), -1);
  const int n = pat.n_side;
  for (int i = 0; i < pat.n; ++i) {
    const int i1 = i % n, i2 = i / n;
    for (int k = pat.row_ptr[static_cast<size_t>(i)]; k < pat.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const int j = pat.col[static_cast<size_t>(k)];
      const int j1 = j % n, j2 = j / n;
      // lattice offset in (-1, 0, 1)^2 modulo the wrap
      int d1 = (j1 - i1 + n) % n; if (d1 == n - 1) d1 = -1;
      int d2 = (j2 - i2 + n) % n; if (d2 == n - 1) d2 = -1;
      signed char c = -1;
      if (d1 == 0 && d2 == 0) c = SC_C;
      else if (d1 == 1 && d2 == 0) c = SC_E;
      else if (d1 == -1 && d2 == 0) c = SC_W;
      else if (d1 == 0 && d2 == 1) c = SC_N;
      else if (d1 == 0 && d2 == -1) c = SC_S;
      else if (d1 == 1 && d2 == 1) c = SC_NE;
      else if (d1 == -1 && d2 == -1) c = SC_SW;
      if (c < 0) throw error("classify_entries: entry outside 7-point stencil");
      cls[static_cast<size_t>(k)] = c;
    }
  }
  return cls;
}

UniformStencil SparseOperator::to_stencil(double tol) const {
  const auto cls = classify_entries(*pat_);
  UniformStencil st;
  st.n_side = pat_->n_side;
  std::array<bool, 7> seen{};
  // row 0 defines the weights
  for (int k = pat_->row_ptr[0]; k < pat_->row_ptr[1]; ++k) {
    st.w[static_cast<size_t>(cls[static_cast<size_t>(k)])] = val_[static_cast<size_t>(k)];
    seen[static_cast<size_t>(cls[static_cast<size_t>(k)])] = true;
  }
  for (bool s : seen)
    if (!s) throw error("to_stencil: incomplete stencil row");
  for (size_t k = 0; k < val_.size(); ++k) {
    const double ref = st.w[static_cast<size_t>(cls[k])];
    if (std::abs(val_[k] - ref) > tol)
      throw error("to_stencil: operator is not translation invariant");
  }
  return st;
}

void UniformStencil::apply(const double* x, double* y) const {
  const int n = n_side;
  const double wc = w[SC_C], we = w[SC_E], ww = w[SC_W], wn = w[SC_N],
               ws = w[SC_S], wne = w[SC_NE], wsw = w[SC_SW];
  for (int i2 = 0; i2 < n; ++i2) {
    const int up = (i2 + 1 == n) ? 0 : i2 + 1;
    const int dn = (i2 == 0) ? n - 1 : i2 - 1;
    const double* rc = x + static_cast<size_t>(i2) * n;
    const double* ru = x + static_cast<size_t>(up) * n;
    const double* rd = x + static_cast<size_t>(dn) * n;
    double* out = y + static_cast<size_t>(i2) * n;
    // wrap columns first and last, straight-line sweep in between
    {
      const int i1 = 0;
      out[i1] = wc * rc[0] + we * rc[1] + ww * rc[n - 1] + wn * ru[0] +
                ws * rd[0] + wne * ru[1] + wsw * rd[n - 1];
    }
    for (int i1 = 1; i1 < n - 1; ++i1) {
      out[i1] = wc * rc[i1] + we * rc[i1 + 1] + ww * rc[i1 - 1] + wn * ru[i1] +
                ws * rd[i1] + wne * ru[i1 + 1] + wsw * rd[i1 - 1];
    }
    {
      const int i1 = n - 1;
      out[i1] = wc * rc[i1] + we * rc[0] + ww * rc[i1 - 1] + wn * ru[i1] +
                ws * rd[i1] + wne * ru[0] + wsw * rd[i1 - 1];
    }
  }
}

UniformStencil UniformStencil::combine(const UniformStencil& A, double a,
                                       const UniformStencil& B, double b) {
  if (A.n_side != B.n_side) throw error("UniformStencil::combine: size mismatch");
  UniformStencil r;
  r.n_side = A.n_side;
  for (size_t k = 0; k < 7; ++k) r.w[k] = a * A.w[k] + b * B.w[k];
  return r;
}

}  // namespace sqg
