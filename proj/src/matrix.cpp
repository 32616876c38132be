#include "splkit/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <vector>

namespace splkit {

void requireFinite(const Matrix& m, const std::string& what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw std::invalid_argument(what + ": empty matrix");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument(what + ": non-finite entry");
  }
}

namespace {

// Sign convention: leading nonzero of each u-column nonnegative. Columns
// j < paired carry a singular value, so the matching v-column flips with them;
// the remaining v-columns are free basis vectors and get the same treatment
// independently.
void fixSigns(Matrix& u, Matrix& v, Eigen::Index paired) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    double lead = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      if (u(i, j) != 0.0) {
        lead = u(i, j);
        break;
      }
    }
    if (lead < 0.0) {
      u.col(j) = -u.col(j);
      if (j < paired && j < v.cols()) v.col(j) = -v.col(j);
    }
  }
  for (Eigen::Index j = paired; j < v.cols(); ++j) {
    double lead = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (v(i, j) != 0.0) {
        lead = v(i, j);
        break;
      }
    }
    if (lead < 0.0) v.col(j) = -v.col(j);
  }
}

}  // namespace

SvdResult svd(const Matrix& a) {
  requireFinite(a, "svd");
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdResult r{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  fixSigns(r.left, r.right, std::min(a.rows(), a.cols()));
  return r;
}

Projection projectOrthonormalRows(const Matrix& v) {
  requireFinite(v, "project_orthonormal_rows");
  if (v.rows() > v.cols()) {
    throw std::invalid_argument("project_orthonormal_rows: more rows than columns");
  }
  const SvdResult f = svd(v);
  Projection p;
  p.y = f.left * f.right.leftCols(v.rows()).transpose();
  const double largest = f.singulars(0);
  const double smallest = f.singulars(f.singulars.size() - 1);
  p.degenerate = (largest == 0.0) || (smallest < 1e-12 * largest);
  return p;
}

double frobeniusNorm(const Matrix& m) { return m.norm(); }

double traceOf(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("trace: non-square matrix");
  }
  return m.trace();
}

std::string formatDouble(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void writeMatrixCsv(const Matrix& m, const std::string& path) {
  requireFinite(m, "write_matrix_csv(" + path + ")");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << formatDouble(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

Matrix readMatrixCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    std::size_t col = 0;
    while (true) {
      ++col;
      const std::size_t comma = line.find(',', pos);
      std::string cell = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      const std::string where =
          path + ": row " + std::to_string(lineno) + ", column " + std::to_string(col);
      char* end = nullptr;
      const double val = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == cell.c_str() || *end != '\0') {
        throw std::runtime_error(where + ": non-numeric cell '" + cell + "'");
      }
      if (!std::isfinite(val)) {
        throw std::runtime_error(where + ": non-finite value");
      }
      row.push_back(val);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(path + ": row " + std::to_string(lineno) +
                               " has " + std::to_string(row.size()) +
                               " cells, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty matrix file");
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void writeTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("read failure on " + path);
  return content;
}

}  // namespace splkit
