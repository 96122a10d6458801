#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tstruct/errors.hpp"

namespace tstruct {

/// Dense matrix over an exact field. All algorithms are fraction-free or
/// exact-division Gauss-Jordan; there is no pivoting heuristic to tune and
/// no rounding anywhere. Zero-row and zero-column shapes are first-class:
/// they model maps to and from the zero space.
template <class F>
class Matrix {
 public:
  using Elem = typename F::Elem;

  Matrix(F field, int rows, int cols)
      : field_(std::move(field)),
        rows_(rows),
        cols_(cols),
        data_(size_t(rows) * cols, field_.zero()) {
    if (rows < 0 || cols < 0) throw ValidationError("negative matrix shape");
  }

  static Matrix identity(F field, int n) {
    Matrix m(std::move(field), n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = m.field_.one();
    return m;
  }

  static Matrix from_ints(F field,
                          const std::vector<std::vector<long long>>& rows) {
    const int r = int(rows.size());
    const int c = r == 0 ? 0 : int(rows[0].size());
    Matrix m(std::move(field), r, c);
    for (int i = 0; i < r; ++i) {
      if (int(rows[i].size()) != c)
        throw ValidationError("ragged matrix literal");
      for (int j = 0; j < c; ++j) m.at(i, j) = m.field_.from_int(rows[i][j]);
    }
    return m;
  }

  const F& field() const { return field_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Elem& at(int r, int c) { return data_[size_t(r) * cols_ + c]; }
  const Elem& at(int r, int c) const { return data_[size_t(r) * cols_ + c]; }

  bool is_zero() const {
    for (const Elem& e : data_)
      if (!field_.is_zero(e)) return false;
    return true;
  }

  bool operator==(const Matrix& o) const {
    require_same_field(o);
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  Matrix add(const Matrix& o) const {
    require_same_field(o);
    require_shape(o.rows_, o.cols_, "matrix add");
    Matrix r = *this;
    for (size_t i = 0; i < data_.size(); ++i)
      r.data_[i] = field_.add(data_[i], o.data_[i]);
    return r;
  }

  Matrix sub(const Matrix& o) const {
    require_same_field(o);
    require_shape(o.rows_, o.cols_, "matrix sub");
    Matrix r = *this;
    for (size_t i = 0; i < data_.size(); ++i)
      r.data_[i] = field_.sub(data_[i], o.data_[i]);
    return r;
  }

  Matrix scale(const Elem& s) const {
    Matrix r = *this;
    for (Elem& e : r.data_) e = field_.mul(e, s);
    return r;
  }

  Matrix neg() const {
    Matrix r = *this;
    for (Elem& e : r.data_) e = field_.neg(e);
    return r;
  }

  Matrix mul(const Matrix& o) const {
    require_same_field(o);
    if (cols_ != o.rows_)
      throw ValidationError("matrix product shape mismatch");
    Matrix r(field_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const Elem& a = at(i, k);
        if (field_.is_zero(a)) continue;
        for (int j = 0; j < o.cols_; ++j)
          r.at(i, j) = field_.add(r.at(i, j), field_.mul(a, o.at(k, j)));
      }
    return r;
  }

  std::vector<Elem> apply(const std::vector<Elem>& v) const {
    if (int(v.size()) != cols_)
      throw ValidationError("matrix apply shape mismatch");
    std::vector<Elem> r(rows_, field_.zero());
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        r[i] = field_.add(r[i], field_.mul(at(i, j), v[j]));
    return r;
  }

  Matrix transpose() const {
    Matrix r(field_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  Matrix hstack(const Matrix& o) const {
    require_same_field(o);
    if (rows_ != o.rows_) throw ValidationError("hstack row mismatch");
    Matrix r(field_, rows_, cols_ + o.cols_);
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
      for (int j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
    }
    return r;
  }

  Matrix vstack(const Matrix& o) const {
    require_same_field(o);
    if (cols_ != o.cols_) throw ValidationError("vstack column mismatch");
    Matrix r(field_, rows_ + o.rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
    for (int i = 0; i < o.rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(rows_ + i, j) = o.at(i, j);
    return r;
  }

  Matrix submatrix(int r0, int c0, int nr, int nc) const {
    Matrix r(field_, nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
    return r;
  }

  Matrix column(int j) const { return submatrix(0, j, rows_, 1); }

  /// Reduced row echelon form; optionally reports the pivot columns.
  Matrix rref(std::vector<int>* pivot_cols = nullptr) const {
    Matrix r = *this;
    std::vector<int> pivots;
    int pr = 0;
    for (int pc = 0; pc < cols_ && pr < rows_; ++pc) {
      int hit = -1;
      for (int i = pr; i < rows_; ++i)
        if (!field_.is_zero(r.at(i, pc))) {
          hit = i;
          break;
        }
      if (hit < 0) continue;
      if (hit != pr)
        for (int j = 0; j < cols_; ++j) std::swap(r.at(hit, j), r.at(pr, j));
      const Elem piv_inv = field_.inv(r.at(pr, pc));
      for (int j = 0; j < cols_; ++j)
        r.at(pr, j) = field_.mul(r.at(pr, j), piv_inv);
      for (int i = 0; i < rows_; ++i) {
        if (i == pr || field_.is_zero(r.at(i, pc))) continue;
        const Elem f = r.at(i, pc);
        for (int j = 0; j < cols_; ++j)
          r.at(i, j) = field_.sub(r.at(i, j), field_.mul(f, r.at(pr, j)));
      }
      pivots.push_back(pc);
      ++pr;
    }
    if (pivot_cols) *pivot_cols = std::move(pivots);
    return r;
  }

  int rank() const {
    std::vector<int> pivots;
    (void)rref(&pivots);
    return int(pivots.size());
  }

  /// Columns form a basis of {x : Ax = 0}.
  Matrix kernel_basis() const {
    std::vector<int> pivots;
    Matrix r = rref(&pivots);
    std::vector<bool> is_pivot(cols_, false);
    for (int p : pivots) is_pivot[p] = true;
    Matrix k(field_, cols_, cols_ - int(pivots.size()));
    int out = 0;
    for (int f = 0; f < cols_; ++f) {
      if (is_pivot[f]) continue;
      k.at(f, out) = field_.one();
      for (size_t i = 0; i < pivots.size(); ++i)
        k.at(pivots[i], out) = field_.neg(r.at(int(i), f));
      ++out;
    }
    return k;
  }

  /// Rows form a basis of {y : yA = 0}.
  Matrix left_kernel_basis() const {
    return transpose().kernel_basis().transpose();
  }

  /// The pivot columns of A: a basis of the column space.
  Matrix column_space_basis() const {
    std::vector<int> pivots;
    (void)rref(&pivots);
    Matrix b(field_, rows_, int(pivots.size()));
    for (size_t j = 0; j < pivots.size(); ++j)
      for (int i = 0; i < rows_; ++i) b.at(i, int(j)) = at(i, pivots[j]);
    return b;
  }

  /// One solution of A X = B (free coordinates zero), or nullopt.
  std::optional<Matrix> solve_matrix(const Matrix& b) const {
    require_same_field(b);
    if (b.rows_ != rows_) throw ValidationError("solve shape mismatch");
    std::vector<int> pivots;
    Matrix r = hstack(b).rref(&pivots);
    for (int p : pivots)
      if (p >= cols_) return std::nullopt;  // pivot in the augmented block
    Matrix x(field_, cols_, b.cols_);
    for (size_t i = 0; i < pivots.size(); ++i)
      for (int j = 0; j < b.cols_; ++j)
        x.at(pivots[i], j) = r.at(int(i), cols_ + j);
    return x;
  }

  std::optional<std::vector<Elem>> solve(const std::vector<Elem>& b) const {
    if (int(b.size()) != rows_) throw ValidationError("solve shape mismatch");
    Matrix rhs(field_, rows_, 1);
    for (int i = 0; i < rows_; ++i) rhs.at(i, 0) = b[i];
    auto x = solve_matrix(rhs);
    if (!x) return std::nullopt;
    std::vector<Elem> v(cols_);
    for (int i = 0; i < cols_; ++i) v[i] = x->at(i, 0);
    return v;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << rows_ << "x" << cols_ << " [";
    for (int i = 0; i < rows_; ++i) {
      os << (i ? "; " : "");
      for (int j = 0; j < cols_; ++j)
        os << (j ? " " : "") << field_.to_string(at(i, j));
    }
    os << "]";
    return os.str();
  }

 private:
  void require_same_field(const Matrix& o) const {
    if (field_ != o.field_)
      throw ValidationError("matrices over different fields");
  }
  void require_shape(int r, int c, const char* what) const {
    if (rows_ != r || cols_ != c)
      throw ValidationError(std::string(what) + ": shape mismatch");
  }

  F field_;
  int rows_, cols_;
  std::vector<Elem> data_;
};

}  // namespace tstruct
