#include "lp.hpp"

#include <cstddef>

namespace refmon::detail {
namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows * (cols + 1)), basis_(rows) {}

  mpq_class& at(std::size_t i, std::size_t j) { return a_[i * (n_ + 1) + j]; }
  mpq_class& rhs(std::size_t i) { return at(i, n_); }
  std::size_t& basis(std::size_t i) { return basis_[i]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  void pivot(std::size_t r, std::size_t c) {
    mpq_class inv = 1 / at(r, c);
    for (std::size_t j = 0; j <= n_; ++j)
      if (sgn(at(r, j)) != 0) at(r, j) *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || sgn(at(i, c)) == 0) continue;
      mpq_class f = at(i, c);
      for (std::size_t j = 0; j <= n_; ++j)
        if (sgn(at(r, j)) != 0) at(i, j) -= f * at(r, j);
    }
    basis_[r] = c;
  }

  /// Minimizes cost over columns with allowed[j]; assumes the current basis is feasible.
  /// Returns false if unbounded.
  bool minimize(const std::vector<mpq_class>& cost, const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_ && enter == n_; ++j) {
        if (!allowed[j]) continue;
        mpq_class reduced = cost[j];
        for (std::size_t i = 0; i < m_; ++i)
          if (sgn(at(i, j)) != 0 && sgn(cost[basis_[i]]) != 0) reduced -= cost[basis_[i]] * at(i, j);
        if (sgn(reduced) < 0) enter = j;
      }
      if (enter == n_) return true;
      std::size_t leave = m_;
      mpq_class best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (sgn(at(i, enter)) <= 0) continue;
        mpq_class ratio = rhs(i) / at(i, enter);
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<mpq_class> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

std::optional<std::vector<mpq_class>> lp_min_l1(const IntMatrix& g, const IntVector& h,
                                                const IntVector& lo, const IntVector& hi) {
  const std::size_t p = g.cols();
  const std::size_t s = g.rows();
  // Rows: g (u - w) >= h, (u - w) >= lo, -(u - w) >= -hi.
  const std::size_t rows = s + 2 * p;
  std::vector<std::vector<mpq_class>> coef(rows, std::vector<mpq_class>(2 * p));
  std::vector<mpq_class> beta(rows);
  for (std::size_t r = 0; r < s; ++r) {
    for (std::size_t k = 0; k < p; ++k) {
      coef[r][k] = g(r, k);
      coef[r][p + k] = -g(r, k);
    }
    beta[r] = h[r];
  }
  for (std::size_t k = 0; k < p; ++k) {
    coef[s + k][k] = 1;
    coef[s + k][p + k] = -1;
    beta[s + k] = lo[k];
    coef[s + p + k][k] = -1;
    coef[s + p + k][p + k] = 1;
    beta[s + p + k] = -hi[k];
  }

  std::size_t n_art = 0;
  for (std::size_t r = 0; r < rows; ++r)
    if (sgn(beta[r]) > 0) ++n_art;
  const std::size_t y_cols = 2 * p;
  const std::size_t s_off = y_cols;
  const std::size_t a_off = s_off + rows;
  const std::size_t cols = a_off + n_art;
  Tableau t(rows, cols);
  std::size_t art = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (sgn(beta[r]) > 0) {
      for (std::size_t j = 0; j < y_cols; ++j) t.at(r, j) = coef[r][j];
      t.at(r, s_off + r) = -1;
      t.at(r, a_off + art) = 1;
      t.rhs(r) = beta[r];
      t.basis(r) = a_off + art;
      ++art;
    } else {
      for (std::size_t j = 0; j < y_cols; ++j) t.at(r, j) = -coef[r][j];
      t.at(r, s_off + r) = 1;
      t.rhs(r) = -beta[r];
      t.basis(r) = s_off + r;
    }
  }

  std::vector<bool> allowed(cols, true);
  if (n_art > 0) {
    std::vector<mpq_class> phase1(cols);
    for (std::size_t j = a_off; j < cols; ++j) phase1[j] = 1;
    t.minimize(phase1, allowed);
    mpq_class infeasibility = 0;
    for (std::size_t i = 0; i < rows; ++i)
      if (t.basis(i) >= a_off) infeasibility += t.rhs(i);
    if (sgn(infeasibility) > 0) return std::nullopt;
    for (std::size_t i = 0; i < rows; ++i) {
      if (t.basis(i) < a_off) continue;
      for (std::size_t j = 0; j < a_off; ++j) {
        if (sgn(t.at(i, j)) != 0) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = a_off; j < cols; ++j) allowed[j] = false;
  }

  std::vector<mpq_class> phase2(cols);
  for (std::size_t j = 0; j < y_cols; ++j) phase2[j] = 1;
  t.minimize(phase2, allowed);

  std::vector<mpq_class> y(cols);
  for (std::size_t i = 0; i < rows; ++i) y[t.basis(i)] = t.rhs(i);
  std::vector<mpq_class> point(p);
  for (std::size_t k = 0; k < p; ++k) point[k] = y[k] - y[p + k];
  return point;
}

}  // namespace refmon::detail
