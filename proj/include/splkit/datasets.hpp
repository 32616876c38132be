#pragma once

#include <string>
#include <vector>

#include "splkit/classify.hpp"
#include "splkit/mvc.hpp"

namespace splkit {

struct MultiViewFile {
  MultiViewDataset data;
  std::vector<int> labels;  // empty unless the manifest names a label file
  std::vector<std::string> viewPaths;
};

// Manifest: one `view = relative/path.csv` line per view, optional
// `labels = relative/path.txt` (one integer per line). Paths resolve against
// the manifest's directory.
MultiViewFile loadMultiview(const std::string& manifestPath);

// CSV with the label in column 0 (+1/-1, or 0/1 mapped to -1/+1) and features
// in the remaining columns.
LabeledDataset loadLabeled(const std::string& csvPath);

std::vector<int> readLabelLines(const std::string& path);

}  // namespace splkit
