#pragma once

#include <Eigen/Dense>
#include <string>

namespace splkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws std::invalid_argument when m is empty or has a NaN/Inf entry.
void requireFinite(const Matrix& m, const std::string& what);

// Full factorization a = left * diag(singulars) * right^T. Column signs are
// pinned so the result is a pure function of the input: the first nonzero
// component of every left singular vector is nonnegative (sign flips propagate
// to the paired right vector; unpaired basis columns are normalized the same
// way on their own).
struct SvdResult {
  Matrix left;       // k x k orthogonal
  Vector singulars;  // min(k, n), nonnegative, nonincreasing
  Matrix right;      // n x n orthogonal
};
SvdResult svd(const Matrix& a);

struct Projection {
  Matrix y;
  bool degenerate = false;  // numerical row rank < rows; y is still valid
};
// Nearest matrix with orthonormal rows in Frobenius distance; rows <= cols.
Projection projectOrthonormalRows(const Matrix& v);

double frobeniusNorm(const Matrix& m);
double traceOf(const Matrix& m);  // square input only

// CSV persistence at 17 significant digits; write-then-read is bit-identical.
std::string formatDouble(double x);
void writeMatrixCsv(const Matrix& m, const std::string& path);
Matrix readMatrixCsv(const std::string& path);

// Atomic-enough plain write: binary mode, full-content check, throws on failure.
void writeTextFile(const std::string& path, const std::string& content);
std::string readTextFile(const std::string& path);

}  // namespace splkit
