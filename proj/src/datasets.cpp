#include "splkit/datasets.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace splkit {

MultiViewFile loadMultiview(const std::string& manifestPath) {
  const std::string text = readTextFile(manifestPath);
  const std::filesystem::path base = std::filesystem::path(manifestPath).parent_path();

  MultiViewFile out;
  std::string labelsPath;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(manifestPath + ":" + std::to_string(lineno) +
                               ": expected 'view = path' or 'labels = path'");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      const size_t b = s.find_first_not_of(" \t");
      const size_t e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    if (value.empty()) {
      throw std::runtime_error(manifestPath + ":" + std::to_string(lineno) + ": empty path");
    }
    const std::string resolved = (base / value).string();
    if (key == "view") {
      out.viewPaths.push_back(resolved);
    } else if (key == "labels") {
      labelsPath = resolved;
    } else {
      throw std::runtime_error(manifestPath + ":" + std::to_string(lineno) +
                               ": unknown key '" + key + "'");
    }
  }
  if (out.viewPaths.empty()) {
    throw std::runtime_error(manifestPath + ": manifest names no views");
  }

  for (const std::string& path : out.viewPaths) {
    out.data.views.push_back(readMatrixCsv(path));
  }
  const Eigen::Index n = out.data.views.front().cols();
  for (size_t v = 1; v < out.data.views.size(); ++v) {
    if (out.data.views[v].cols() != n) {
      throw std::runtime_error("multi-view dataset: " + out.viewPaths[v] + " has " +
                               std::to_string(out.data.views[v].cols()) + " samples but " +
                               out.viewPaths[0] + " has " + std::to_string(n));
    }
  }
  if (!labelsPath.empty()) {
    out.labels = readLabelLines(labelsPath);
    if (out.labels.size() != static_cast<size_t>(n)) {
      throw std::runtime_error("multi-view dataset: " + labelsPath + " has " +
                               std::to_string(out.labels.size()) + " labels for " +
                               std::to_string(n) + " samples");
    }
  }
  return out;
}

LabeledDataset loadLabeled(const std::string& csvPath) {
  const Matrix raw = readMatrixCsv(csvPath);
  if (raw.cols() < 2) {
    throw std::runtime_error(csvPath + ": need a label column plus at least one feature");
  }
  LabeledDataset data;
  data.features = raw.rightCols(raw.cols() - 1);
  data.labels.resize(static_cast<size_t>(raw.rows()));
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double y = raw(i, 0);
    int label;
    if (y == 1.0) {
      label = 1;
    } else if (y == -1.0 || y == 0.0) {
      label = -1;
    } else {
      throw std::runtime_error(csvPath + ": row " + std::to_string(i + 1) +
                               ": label must be -1, 0, or +1");
    }
    data.labels[static_cast<size_t>(i)] = label;
  }
  validateDataset(data);
  return data;
}

std::vector<int> readLabelLines(const std::string& path) {
  const std::string text = readTextFile(path);
  std::vector<int> labels;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(line, &used);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not an integer");
    }
    if (line.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing characters");
    }
    labels.push_back(value);
  }
  if (labels.empty()) throw std::runtime_error(path + ": no labels");
  return labels;
}

}  // namespace splkit
