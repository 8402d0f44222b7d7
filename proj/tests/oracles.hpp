#pragma once

// Reference implementations used only by tests. They follow the textbook
// definitions directly and share no code path with the library.

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <functional>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;

// Direct O((MN)^2) orthonormal DCT-II.
inline Grid naive_dct2(const Grid& x) {
  const std::size_t m = x.size();
  const std::size_t n = x.front().size();
  Grid c(m, std::vector<double>(n, 0.0));
  for (std::size_t u = 0; u < m; ++u) {
    const double au = u == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (std::size_t v = 0; v < n; ++v) {
      const double av = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          sum += x[i][j] * std::cos(std::numbers::pi * (2.0 * i + 1.0) * u / (2.0 * m)) *
                 std::cos(std::numbers::pi * (2.0 * j + 1.0) * v / (2.0 * n));
        }
      }
      c[u][v] = au * av * sum;
    }
  }
  return c;
}

// Top-left block of the DCT computed term by term; for large grids where
// the full naive transform is too slow.
inline std::vector<double> naive_dct_block(const Grid& x, std::size_t block) {
  const std::size_t m = x.size();
  const std::size_t n = x.front().size();
  std::vector<double> out;
  for (std::size_t u = 0; u < block; ++u) {
    const double au = u == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (std::size_t v = 0; v < block; ++v) {
      const double av = v == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double ci = std::cos(std::numbers::pi * (2.0 * i + 1.0) * u / (2.0 * m));
        for (std::size_t j = 0; j < n; ++j) {
          sum += x[i][j] * ci * std::cos(std::numbers::pi * (2.0 * j + 1.0) * v / (2.0 * n));
        }
      }
      out.push_back(au * av * sum);
    }
  }
  return out;
}

inline std::vector<double> matvec(const Grid& w, const std::vector<double>& x, const std::vector<double>& b) {
  std::vector<double> y(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    double s = b[k];
    for (std::size_t d = 0; d < x.size(); ++d) s += w[k][d] * x[d];
    y[k] = s;
  }
  return y;
}

// Mean NLL of a linear softmax model, written from scratch in long double.
inline double nll(const Grid& w, const std::vector<double>& b, const Grid& xs, const std::vector<std::size_t>& ts) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto z = matvec(w, xs[i], b);
    long double peak = z[0];
    for (double v : z) peak = std::max<long double>(peak, v);
    long double s = 0.0L;
    for (double v : z) s += std::exp(static_cast<long double>(v) - peak);
    total += -(static_cast<long double>(z[ts[i]]) - peak - std::log(s));
  }
  return static_cast<double>(total / xs.size());
}

// Central finite differences of `f` at each coordinate of `params`.
inline std::vector<double> central_differences(std::vector<double> params,
                                               const std::function<double(const std::vector<double>&)>& f,
                                               double h) {
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = f(params);
    params[i] = saved - h;
    const double down = f(params);
    params[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Counts every value, keeps those with the top count, and returns the
// first list element among them.
inline int mode_first_tie(const std::vector<int>& xs) {
  std::map<int, int> counts;
  for (int x : xs) counts[x]++;
  int top = 0;
  for (auto& [v, c] : counts) top = std::max(top, c);
  int n_top = 0;
  for (auto& [v, c] : counts) n_top += c == top;
  if (n_top > 1) return xs.front();
  for (auto& [v, c] : counts) {
    if (c == top) return v;
  }
  return xs.front();
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// (eigenvalues descending, eigenvectors as rows in the same order).
inline std::pair<std::vector<double>, Grid> jacobi_eigen(Grid a) {
  const std::size_t n = a.size();
  Grid v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  std::vector<double> values;
  Grid vectors;
  for (std::size_t i : order) {
    values.push_back(a[i][i]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
    vectors.push_back(col);
  }
  return {values, vectors};
}

}  // namespace oracle
